/*
Copyright 2026 The dualcurv Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Validation errors describe bad input; numerical errors describe a
/// computation that could not produce a trustworthy number.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("empty effective domain")]
    EmptyDomain,
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("origin is not an interior point of the body")]
    OriginNotInterior,
    #[error("non-integrable singularity: facet through the origin with q = {0}")]
    NonIntegrable(f64),
    #[error("degenerate body: {0}")]
    DegenerateBody(String),
    #[error("empty level set at s = {0}")]
    EmptyLevelSet(f64),
    #[error("moment may be infinite: {0}")]
    MomentMayBeInfinite(String),
    #[error("degenerate iterate: {0}")]
    DegenerateIterate(String),
    #[error("measure not admissible: {0}")]
    NotAdmissible(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_)
                | Error::OutOfDomain(_)
                | Error::OriginNotInterior
                | Error::DegenerateBody(_)
                | Error::NotAdmissible(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
