//! Functions of two and three real variables.

use serde::{Deserialize, Serialize};

use crate::domains::pow_convention;
use crate::error::{Error, Result};
use crate::models::noise::hash_unit;
use crate::models::scalar::ScalarFunction;

/// A real function of two variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BinaryFunction {
    /// `φ(u+v) − φ(u) − φ(v)`
    PhiDifference {
        phi: ScalarFunction,
    },
    /// `(u+v)^α·f(v/(u+v))`
    Homogenized {
        f: ScalarFunction,
        alpha: f64,
    },
    /// `a·u + b·v + c`
    Linear {
        a: f64,
        b: f64,
        c: f64,
    },
    /// `scale·u·v`
    Product {
        scale: f64,
    },
    /// `φ(u+v)`
    ComposedSum {
        phi: ScalarFunction,
    },
    Noisy {
        inner: Box<BinaryFunction>,
        amplitude: f64,
        seed: u64,
    },
    /// `H(u, v, 0)`
    ZeroSlice {
        h: Box<TernaryFunction>,
    },
    Sum {
        terms: Vec<BinaryFunction>,
    },
}

impl BinaryFunction {
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        let out = match self {
            BinaryFunction::PhiDifference { phi } => {
                phi.eval(u + v)? - phi.eval(u)? - phi.eval(v)?
            }
            BinaryFunction::Homogenized { f, alpha } => {
                let s = u + v;
                if s == 0.0 {
                    0.0
                } else {
                    pow_convention(s, *alpha)? * f.eval(v / s)?
                }
            }
            BinaryFunction::Linear { a, b, c } => a * u + b * v + c,
            BinaryFunction::Product { scale } => scale * u * v,
            BinaryFunction::ComposedSum { phi } => phi.eval(u + v)?,
            BinaryFunction::Noisy {
                inner,
                amplitude,
                seed,
            } => inner.eval(u, v)? + amplitude * hash_unit(*seed, &[u, v]),
            BinaryFunction::ZeroSlice { h } => h.eval(u, v, 0.0)?,
            BinaryFunction::Sum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.eval(u, v)?;
                }
                acc
            }
        };
        finite(out, "binary function", &[u, v])
    }
}

/// A real function of three variables on the nonnegative cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TernaryFunction {
    /// `c·[(x+y+z)^α − x^α − y^α − z^α]`
    EntropySolution {
        c: f64,
        alpha: f64,
    },
    /// `φ(x+y+z) − φ(x) − φ(y) − φ(z)`
    PhiForm {
        phi: ScalarFunction,
    },
    /// `a·(x^α + y^α + z^α) + φ(x+y+z)` on the open cone.
    ///
    /// On the boundary it takes the values `a(y^α+z^α) + s^α·φ(1)` at
    /// `(0, y, z)` and `a·x^α + φ(s) − (y+z)^α·φ(1)` when `x > 0`, which is
    /// the extension solving the modified entropy equation exactly.
    ModifiedEntropySolution {
        a: f64,
        alpha: f64,
        phi: ScalarFunction,
    },
    /// Projection onto coordinate `index` (0, 1 or 2).
    Coordinate {
        index: usize,
    },
    Constant {
        value: f64,
    },
    /// Adds seeded noise; `symmetric` keys the noise on the sorted triple.
    Noisy {
        inner: Box<TernaryFunction>,
        amplitude: f64,
        seed: u64,
        #[serde(default)]
        symmetric: bool,
    },
    /// Restricts `inner` to strictly positive arguments.
    OpenCone {
        inner: Box<TernaryFunction>,
    },
    Sum {
        terms: Vec<TernaryFunction>,
    },
}

impl TernaryFunction {
    pub fn noisy(self, amplitude: f64, seed: u64, symmetric: bool) -> Self {
        TernaryFunction::Noisy {
            inner: Box::new(self),
            amplitude,
            seed,
            symmetric,
        }
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        if x < 0.0 || y < 0.0 || z < 0.0 || x + y + z <= 0.0 {
            return Err(Error::domain("ternary function", &[x, y, z]));
        }
        let out = match self {
            TernaryFunction::EntropySolution { c, alpha } => {
                let p = |t: f64| pow_convention(t, *alpha);
                c * (p(x + y + z)? - p(x)? - p(y)? - p(z)?)
            }
            TernaryFunction::PhiForm { phi } => {
                phi.eval(x + y + z)? - phi.eval(x)? - phi.eval(y)? - phi.eval(z)?
            }
            TernaryFunction::ModifiedEntropySolution { a, alpha, phi } => {
                let p = |t: f64| pow_convention(t, *alpha);
                let s = x + y + z;
                if x > 0.0 && y > 0.0 && z > 0.0 {
                    a * (p(x)? + p(y)? + p(z)?) + phi.eval(s)?
                } else if x == 0.0 {
                    a * (p(y)? + p(z)?) + p(s)? * phi.eval(1.0)?
                } else {
                    a * p(x)? + phi.eval(s)? - p(y + z)? * phi.eval(1.0)?
                }
            }
            TernaryFunction::Coordinate { index } => match index {
                0 => x,
                1 => y,
                2 => z,
                _ => {
                    return Err(Error::config(
                        "coordinate.index",
                        format!("{index} is not 0, 1 or 2"),
                    ))
                }
            },
            TernaryFunction::Constant { value } => *value,
            TernaryFunction::Noisy {
                inner,
                amplitude,
                seed,
                symmetric,
            } => {
                let mut key = [x, y, z];
                if *symmetric {
                    key.sort_by(f64::total_cmp);
                }
                inner.eval(x, y, z)? + amplitude * hash_unit(*seed, &key)
            }
            TernaryFunction::OpenCone { inner } => {
                if x == 0.0 || y == 0.0 || z == 0.0 {
                    return Err(Error::domain("open-cone function", &[x, y, z]));
                }
                inner.eval(x, y, z)?
            }
            TernaryFunction::Sum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.eval(x, y, z)?;
                }
                acc
            }
        };
        finite(out, "ternary function", &[x, y, z])
    }
}

fn finite(v: f64, what: &str, point: &[f64]) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            what: what.into(),
            point: point.to_vec(),
        })
    }
}
