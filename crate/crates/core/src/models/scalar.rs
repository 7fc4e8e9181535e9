use serde::{Deserialize, Serialize};

use crate::domains::{pow_convention, xlog2_convention};
use crate::error::{Error, Result};
use crate::models::alpha::Alpha;
use crate::models::noise::hash_unit;

/// A real function of one variable.
///
/// Families tied to the unit interval (`power-family`, `log-family`,
/// `shannon-s`, `piecewise`) reject arguments outside `[0, 1]`; the others are
/// defined on the half line or everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScalarFunction {
    /// `a·x^α + b·(1−x)^α − b`
    PowerFamily {
        a: f64,
        b: f64,
        alpha: f64,
    },
    /// `λ·log₂(1−x) + c`
    LogFamily {
        lambda: f64,
        c: f64,
    },
    /// The binary Shannon information function `−x·log₂x − (1−x)·log₂(1−x)`.
    ShannonS,
    /// `c·x·log₂x`
    XLogX {
        c: f64,
    },
    /// `λ·log₂x`
    Log2 {
        lambda: f64,
    },
    /// `c·x^α`
    PowerLaw {
        c: f64,
        alpha: f64,
    },
    /// `λ·x^α·log₂x`
    PowerLog {
        lambda: f64,
        alpha: f64,
    },
    Constant {
        value: f64,
    },
    /// Piecewise linear interpolation through `(xs[k], ys[k])`.
    GridSample {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
    Sum {
        terms: Vec<ScalarFunction>,
    },
    Scaled {
        factor: f64,
        inner: Box<ScalarFunction>,
    },
    /// Smooth bump of peak `height` at `center`, supported on `]center−width, center+width[`.
    ScaledBump {
        center: f64,
        width: f64,
        height: f64,
    },
    /// `amplitude·sin(2π·frequency·x + phase)`
    Sine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// Seeded pseudo-noise with values in `[−amplitude, amplitude]`.
    Noise {
        amplitude: f64,
        seed: u64,
    },
    /// Separate values at 0 and 1, `interior` on `]0,1[`.
    Piecewise {
        at_zero: f64,
        interior: Box<ScalarFunction>,
        at_one: f64,
    },
}

fn unit_only(what: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain(what, &[x]))
    }
}

impl ScalarFunction {
    pub fn power_family(a: f64, b: f64, alpha: f64) -> Self {
        ScalarFunction::PowerFamily { a, b, alpha }
    }

    pub fn constant(value: f64) -> Self {
        ScalarFunction::Constant { value }
    }

    pub fn bump(center: f64, width: f64, height: f64) -> Self {
        ScalarFunction::ScaledBump {
            center,
            width,
            height,
        }
    }

    /// `x ↦ I₂(1−x, x)` for the degree-α entropy (Shannon's `S` at α = 1).
    pub fn alpha_entropy_generator(alpha: Alpha) -> Self {
        if alpha.value() == 1.0 {
            ScalarFunction::ShannonS
        } else {
            let k = 1.0 / alpha.additivity_factor();
            ScalarFunction::PowerFamily {
                a: k,
                b: k,
                alpha: alpha.value(),
            }
        }
    }

    /// `self + other`, flattening nested sums.
    pub fn plus(self, other: ScalarFunction) -> Self {
        let mut terms = match self {
            ScalarFunction::Sum { terms } => terms,
            f => vec![f],
        };
        match other {
            ScalarFunction::Sum { terms: more } => terms.extend(more),
            g => terms.push(g),
        }
        ScalarFunction::Sum { terms }
    }

    pub fn scaled(self, factor: f64) -> Self {
        ScalarFunction::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    /// Samples `self` at `xs` into a `GridSample`.
    pub fn sample(&self, xs: &[f64]) -> Result<Self> {
        let ys = xs
            .iter()
            .map(|&x| self.eval(x))
            .collect::<Result<Vec<_>>>()?;
        let g = ScalarFunction::GridSample {
            xs: xs.to_vec(),
            ys,
        };
        g.validate()?;
        Ok(g)
    }

    /// Checks structural invariants that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarFunction::GridSample { xs, ys } => {
                if xs.len() < 2 || xs.len() != ys.len() {
                    return Err(Error::config(
                        "grid-sample",
                        format!(
                            "needs >= 2 nodes and matching lengths, got {} and {}",
                            xs.len(),
                            ys.len()
                        ),
                    ));
                }
                if xs.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::config(
                        "grid-sample.xs",
                        "abscissae must be strictly increasing",
                    ));
                }
                if xs.iter().chain(ys).any(|v| !v.is_finite()) {
                    return Err(Error::config("grid-sample", "non-finite node"));
                }
                Ok(())
            }
            ScalarFunction::ScaledBump { width, .. } if !(*width > 0.0) => {
                Err(Error::config("scaled-bump.width", "width must be positive"))
            }
            ScalarFunction::Sum { terms } => terms.iter().try_for_each(|t| t.validate()),
            ScalarFunction::Scaled { inner, .. }
            | ScalarFunction::Piecewise {
                interior: inner, ..
            } => inner.validate(),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::domain("scalar function", &[x]));
        }
        let v = match self {
            ScalarFunction::PowerFamily { a, b, alpha } => {
                unit_only("power-family", x)?;
                a * pow_convention(x, *alpha)? + b * pow_convention(1.0 - x, *alpha)? - b
            }
            ScalarFunction::LogFamily { lambda, c } => {
                unit_only("log-family", x)?;
                if *lambda == 0.0 {
                    *c
                } else if x == 1.0 {
                    return Err(Error::domain("log-family", &[x]));
                } else {
                    lambda * (1.0 - x).log2() + c
                }
            }
            ScalarFunction::ShannonS => {
                unit_only("shannon-s", x)?;
                -(xlog2_convention(x)? + xlog2_convention(1.0 - x)?)
            }
            ScalarFunction::XLogX { c } => c * xlog2_convention(x)?,
            ScalarFunction::Log2 { lambda } => {
                if !(x > 0.0) {
                    return Err(Error::domain("log2", &[x]));
                }
                lambda * x.log2()
            }
            ScalarFunction::PowerLaw { c, alpha } => c * pow_convention(x, *alpha)?,
            ScalarFunction::PowerLog { lambda, alpha } => {
                if x < 0.0 {
                    return Err(Error::domain("power-log", &[x]));
                }
                if x == 0.0 {
                    0.0
                } else {
                    lambda * x.powf(*alpha) * x.log2()
                }
            }
            ScalarFunction::Constant { value } => *value,
            ScalarFunction::GridSample { xs, ys } => interpolate(xs, ys, x)?,
            ScalarFunction::Sum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.eval(x)?;
                }
                acc
            }
            ScalarFunction::Scaled { factor, inner } => factor * inner.eval(x)?,
            ScalarFunction::ScaledBump {
                center,
                width,
                height,
            } => {
                let t = (x - center) / width;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    height * (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            ScalarFunction::Sine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (std::f64::consts::TAU * frequency * x + phase).sin(),
            ScalarFunction::Noise { amplitude, seed } => amplitude * hash_unit(*seed, &[x]),
            ScalarFunction::Piecewise {
                at_zero,
                interior,
                at_one,
            } => {
                unit_only("piecewise", x)?;
                if x == 0.0 {
                    *at_zero
                } else if x == 1.0 {
                    *at_one
                } else {
                    interior.eval(x)?
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                what: "scalar function".into(),
                point: vec![x],
            })
        }
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let tol = 1e-12 * (hi - lo);
    if x < lo - tol || x > hi + tol {
        return Err(Error::domain("grid-sample", &[x]));
    }
    let k = xs.partition_point(|&t| t <= x);
    if k == 0 {
        return Ok(ys[0]);
    }
    if k == xs.len() {
        return Ok(ys[xs.len() - 1]);
    }
    let (x0, x1) = (xs[k - 1], xs[k]);
    if x == x0 {
        return Ok(ys[k - 1]);
    }
    let w = (x - x0) / (x1 - x0);
    Ok(ys[k - 1] + w * (ys[k] - ys[k - 1]))
}
