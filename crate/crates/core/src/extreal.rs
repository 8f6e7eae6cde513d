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

use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// A value in (−∞, +∞].
///
/// Infinity is carried by the IEEE `+inf` bit pattern and queried with
/// [`ExtReal::is_infinite`]; construction rejects NaN and `−inf`, so no other
/// non-finite value can appear.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
#[repr(transparent)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Finite value. Panics on NaN or infinities.
    pub fn finite(v: f64) -> ExtReal {
        assert!(v.is_finite(), "ExtReal::finite called with {v}");
        ExtReal(v)
    }

    /// Accepts any finite value or `+inf`; `None` for NaN and `−inf`.
    pub fn from_f64(v: f64) -> Option<ExtReal> {
        if v.is_nan() || v == f64::NEG_INFINITY {
            None
        } else {
            Some(ExtReal(v))
        }
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        !self.0.is_finite()
    }

    /// Raw value; `+inf` when infinite.
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn finite_or(self, other: f64) -> f64 {
        if self.is_finite() {
            self.0
        } else {
            other
        }
    }

    /// Sum with the convention ∞ + a = ∞.
    pub fn add(self, other: ExtReal) -> ExtReal {
        ExtReal(self.0 + other.0)
    }

    pub fn add_f64(self, a: f64) -> ExtReal {
        debug_assert!(a.is_finite());
        ExtReal(self.0 + a)
    }

    /// Scaling by a nonnegative factor with 0·∞ = 0 (the convention that
    /// makes 0·φ the indicator-free zero function).
    pub fn scale(self, c: f64) -> ExtReal {
        debug_assert!(c >= 0.0 && c.is_finite());
        if c == 0.0 {
            ExtReal(0.0)
        } else {
            ExtReal(self.0 * c)
        }
    }

    /// e^{−value}, which is 0 at infinity.
    pub fn exp_neg(self) -> f64 {
        (-self.0).exp()
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "+inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Serialized as a JSON number, or the string "inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<ExtReal, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => {
                ExtReal::from_f64(v).ok_or_else(|| de::Error::custom("NaN or -inf is not allowed"))
            }
            Raw::Str(s) if s == "inf" || s == "+inf" => Ok(ExtReal::INFINITY),
            Raw::Str(s) => Err(de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
