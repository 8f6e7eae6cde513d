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

//! Test functions ζ for weak comparisons of measures on ℝⁿ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::norm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    Constant {
        c: f64,
    },
    Coordinate {
        i: usize,
    },
    Norm,
    /// x_i·x_j.
    Monomial {
        i: usize,
        j: usize,
    },
    /// height·(1 − |x − center|/radius)₊.
    Bump {
        center: Vec<f64>,
        radius: f64,
        height: f64,
    },
}

impl TestFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Constant { c } => *c,
            TestFunction::Coordinate { i } => x[*i],
            TestFunction::Norm => norm(x),
            TestFunction::Monomial { i, j } => x[*i] * x[*j],
            TestFunction::Bump {
                center,
                radius,
                height,
            } => {
                let d: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                height * (1.0 - d / radius).max(0.0)
            }
        }
    }

    /// Lipschitz constant on B(r).
    pub fn lipschitz(&self, r: f64) -> f64 {
        match self {
            TestFunction::Constant { .. } => 0.0,
            TestFunction::Coordinate { .. } | TestFunction::Norm => 1.0,
            TestFunction::Monomial { i, j } => {
                if i == j {
                    2.0 * r
                } else {
                    r
                }
            }
            TestFunction::Bump { radius, height, .. } => height / radius,
        }
    }

    /// ζ(−x) = −ζ(x).
    pub fn is_odd(&self) -> bool {
        matches!(self, TestFunction::Coordinate { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionDictionary {
    pub dim: usize,
    pub seed: u64,
    pub functions: Vec<TestFunction>,
}

impl TestFunctionDictionary {
    /// Constant, coordinates, |x|, the monomials x_i x_j (i ≤ j) and `bumps`
    /// random bumps centred in [−2, 2]ⁿ.
    pub fn standard(dim: usize, bumps: usize, seed: u64) -> TestFunctionDictionary {
        let mut functions = vec![TestFunction::Constant { c: 1.0 }];
        functions.extend((0..dim).map(|i| TestFunction::Coordinate { i }));
        functions.push(TestFunction::Norm);
        for i in 0..dim {
            for j in i..dim {
                functions.push(TestFunction::Monomial { i, j });
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..bumps {
            let center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let radius = rng.gen_range(0.5..2.0);
            let height = rng.gen_range(0.5..1.5);
            functions.push(TestFunction::Bump {
                center,
                radius,
                height,
            });
        }
        TestFunctionDictionary {
            dim,
            seed,
            functions,
        }
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}
