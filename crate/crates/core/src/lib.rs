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

//! Dual curvature measures of log-concave functions and convex bodies.

pub mod acceptance;
pub mod bodies;
pub mod convex;
pub mod dual_curvature;
pub mod error;
pub mod extreal;
pub mod grid;
pub mod io;
pub mod minkowski;
pub mod numerics;
pub mod variation;

pub use bodies::{ConvexBody, SphericalMeasure};
pub use convex::{ConvexFunction, ConvexKind, GridFunction, LogConcaveFunction, Support};
pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use grid::GridSpec;
