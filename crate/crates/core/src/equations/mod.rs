//! Functional equation registry and sup-norm residual measurement.

mod engine;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::domains::{csv_err, ConeGrid, GridDomain, Point};
use crate::error::{Error, Result};
use crate::models::{BinaryFunction, ScalarFunction, TernaryFunction};

pub use engine::{Engine, Sweep, DEFAULT_PAIR_BUDGET, DEFAULT_SIMPLEX_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "equation", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EquationKind {
    /// `f(x) + (1−x)^α f(y/(1−x)) = f(y) + (1−y)^α f(x/(1−y))`
    FundamentalParametric { alpha: f64 },
    /// `Σ f(pᵢqⱼ) = Σ f(pᵢ) + Σ f(qⱼ)`
    SumFormAdditive { n: usize, m: usize },
    /// `Σ f(pᵢqⱼ) = Σ f(pᵢ) + Σ f(qⱼ) + (2^{1−α}−1) Σ f(pᵢ) Σ f(qⱼ)`
    SumFormAlpha { alpha: f64, n: usize, m: usize },
    /// `Σ g(pᵢqⱼ) = Σ g(pᵢ) Σ g(qⱼ)`
    SumFormMultiplicative { n: usize, m: usize },
    /// `F(x+y,z) + F(x,y) = F(x,y+z) + F(y,z)`
    Cocycle,
    /// `H(x,y,z) = H(x+y,0,z) + H(x,y,0)`
    EntropyEq,
    /// `f(x,y,z) = f(x,y+z,0) + (y+z)^α f(0, y/(y+z), z/(y+z))`
    ModifiedEntropy { alpha: f64 },
    /// `a(x+y) = a(x) + a(y)`
    CauchyAdditive,
    /// `m(xy) = m(x) m(y)`
    Multiplicative,
    /// `ℓ(xy) = ℓ(x) + ℓ(y)`
    Logarithmic,
    /// `φ(xy) = x φ(y) + y φ(x)`
    PhiEquation,
    /// `(x+y) f(y/(x+y)) = φ(x) + φ(y) − φ(x+y)` for a pair `(f, φ)`
    HomogenizedDifference,
    /// `f(x) = φ(x) + φ(1−x)` for a pair `(f, φ)`
    InfoFunctionForm,
}

impl EquationKind {
    pub fn id(&self) -> &'static str {
        match self {
            EquationKind::FundamentalParametric { .. } => "fundamental-parametric",
            EquationKind::SumFormAdditive { .. } => "sum-form-additive",
            EquationKind::SumFormAlpha { .. } => "sum-form-alpha",
            EquationKind::SumFormMultiplicative { .. } => "sum-form-multiplicative",
            EquationKind::Cocycle => "cocycle",
            EquationKind::EntropyEq => "entropy-eq",
            EquationKind::ModifiedEntropy { .. } => "modified-entropy",
            EquationKind::CauchyAdditive => "cauchy-additive",
            EquationKind::Multiplicative => "multiplicative",
            EquationKind::Logarithmic => "logarithmic",
            EquationKind::PhiEquation => "phi-equation",
            EquationKind::HomogenizedDifference => "homogenized-difference",
            EquationKind::InfoFunctionForm => "info-function-form",
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |a: f64| {
            if a.is_finite() {
                Ok(())
            } else {
                Err(Error::config("alpha", format!("{a} is not finite")))
            }
        };
        let nm = |n: usize, m: usize| {
            if n >= 2 && m >= 2 {
                Ok(())
            } else {
                Err(Error::config(
                    "n, m",
                    format!("need n, m >= 2, got {n}, {m}"),
                ))
            }
        };
        match *self {
            EquationKind::FundamentalParametric { alpha }
            | EquationKind::ModifiedEntropy { alpha } => finite(alpha),
            EquationKind::SumFormAlpha { alpha, n, m } => finite(alpha).and(nm(n, m)),
            EquationKind::SumFormAdditive { n, m }
            | EquationKind::SumFormMultiplicative { n, m } => nm(n, m),
            _ => Ok(()),
        }
    }
}

/// The function(s) an equation is applied to.
#[derive(Debug, Clone, Copy)]
pub enum Operands<'a> {
    Scalar(&'a ScalarFunction),
    /// `(f, φ)` for the two-function identities.
    Pair(&'a ScalarFunction, &'a ScalarFunction),
    Binary(&'a BinaryFunction),
    Ternary(&'a TernaryFunction),
}

impl Operands<'_> {
    fn name(&self) -> &'static str {
        match self {
            Operands::Scalar(_) => "one scalar function",
            Operands::Pair(..) => "a pair of scalar functions",
            Operands::Binary(_) => "a two-variable function",
            Operands::Ternary(_) => "a three-variable function",
        }
    }
}

/// Sup and mean of an equation's absolute defect over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: String,
    pub domain: String,
    pub resolution: usize,
    pub sup: f64,
    pub mean: f64,
    pub argmax_point: Vec<f64>,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon_target: Option<f64>,
    /// Per-point `(coordinates, |defect|)`, kept only when the engine dumps defects.
    #[serde(skip)]
    pub defects: Option<Vec<(Point, f64)>>,
}

impl ResidualReport {
    pub(crate) fn from_sweep(
        equation: &str,
        domain: &str,
        resolution: usize,
        sweep: Sweep,
        point: impl Fn(usize) -> Point,
    ) -> Self {
        let defects = sweep.defects.map(|d| {
            d.into_iter()
                .enumerate()
                .map(|(k, v)| (point(k), v))
                .collect()
        });
        ResidualReport {
            equation: equation.to_string(),
            domain: domain.to_string(),
            resolution,
            sup: sweep.sup,
            mean: sweep.mean,
            argmax_point: point(sweep.argmax).to_vec(),
            samples: sweep.count,
            epsilon_target: None,
            defects,
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.epsilon_target = Some(target);
        self
    }

    /// Whether `sup` is within the target (true when no target is set).
    pub fn within_target(&self) -> bool {
        self.epsilon_target.is_none_or(|t| self.sup <= t)
    }

    /// Writes `x0, x1, …, defect` rows; does nothing if defects were not kept.
    pub fn write_defects_csv<W: Write>(&self, writer: W) -> Result<()> {
        let Some(rows) = &self.defects else {
            return Ok(());
        };
        let mut w = csv::Writer::from_writer(writer);
        let dim = rows.first().map_or(0, |r| r.0.len());
        let mut header: Vec<String> = (0..dim).map(|k| format!("x{k}")).collect();
        header.push("defect".into());
        w.write_record(&header).map_err(csv_err)?;
        for (p, d) in rows {
            let mut rec: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            rec.push(d.to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Internal(e.to_string()))
    }
}

fn mismatch(kind: &EquationKind, grid: &GridDomain, want: &str) -> Error {
    Error::config(
        "grid",
        format!("{} needs {want}, got a {} grid", kind.id(), grid.name()),
    )
}

fn wrong_operands(kind: &EquationKind, ops: &Operands, want: &str) -> Error {
    Error::config(
        "function",
        format!("{} takes {want}, got {}", kind.id(), ops.name()),
    )
}

/// `f(x) + (1−x)^α f(y/(1−x)) − f(y) − (1−y)^α f(x/(1−y))`
pub fn fundamental_defect(f: &ScalarFunction, alpha: f64, x: f64, y: f64) -> Result<f64> {
    let (cx, cy) = (1.0 - x, 1.0 - y);
    // x + y ≤ 1 on the grid; clamp the rounding of y/(1−x) at the diagonal
    let u = (y / cx).min(1.0);
    let v = (x / cy).min(1.0);
    Ok(f.eval(x)? + cx.powf(alpha) * f.eval(u)? - f.eval(y)? - cy.powf(alpha) * f.eval(v)?)
}

/// Measures the sup-norm defect of `kind` applied to `ops` over `grid`.
pub fn residual(
    kind: &EquationKind,
    ops: Operands,
    grid: &GridDomain,
    engine: &Engine,
) -> Result<ResidualReport> {
    kind.validate()?;
    let id = kind.id();
    let report = |sweep: Sweep| {
        ResidualReport::from_sweep(id, grid.name(), grid.resolution(), sweep, |k| grid.point(k))
    };
    match *kind {
        EquationKind::FundamentalParametric { alpha } => {
            let Operands::Scalar(f) = ops else {
                return Err(wrong_operands(kind, &ops, "one scalar function"));
            };
            let GridDomain::Triangle(t) = grid else {
                return Err(mismatch(kind, grid, "a triangle grid"));
            };
            let s = engine.sweep(t.len(), |k| {
                let (x, y) = t.point(k);
                fundamental_defect(f, alpha, x, y)
            })?;
            Ok(report(s))
        }
        EquationKind::SumFormAdditive { n, m }
        | EquationKind::SumFormAlpha { n, m, .. }
        | EquationKind::SumFormMultiplicative { n, m } => {
            let Operands::Scalar(f) = ops else {
                return Err(wrong_operands(kind, &ops, "one scalar function"));
            };
            let GridDomain::SimplexPair(gp, gq) = grid else {
                return Err(mismatch(kind, grid, "a simplex-pair grid"));
            };
            if gp.n() != n || gq.n() != m {
                return Err(Error::config(
                    "grid",
                    format!(
                        "{id} with (n, m) = ({n}, {m}) got simplex dimensions ({}, {})",
                        gp.n(),
                        gq.n()
                    ),
                ));
            }
            let pairs = gp.len() as u128 * gq.len() as u128;
            if pairs > engine.pair_budget {
                return Err(Error::Budget {
                    what: format!("{id} pair sweep"),
                    requested: pairs,
                    cap: engine.pair_budget,
                });
            }
            let sums = |g: &crate::domains::SimplexGrid| -> Result<Vec<f64>> {
                (0..g.len())
                    .map(|k| g.point(k).iter().map(|&p| f.eval(p)).sum::<Result<f64>>())
                    .collect()
            };
            let (sp, sq) = (sums(gp)?, sums(gq)?);
            let lam = match *kind {
                EquationKind::SumFormAlpha { alpha, .. } => {
                    (-(alpha - 1.0) * std::f64::consts::LN_2).exp_m1()
                }
                _ => 0.0,
            };
            let multiplicative = matches!(kind, EquationKind::SumFormMultiplicative { .. });
            let nq = gq.len();
            let s = engine.sweep(gp.len() * nq, |k| {
                let (a, b) = (k / nq, k % nq);
                let (p, q) = (gp.point(a), gq.point(b));
                let mut lhs = 0.0;
                for &pi in &p {
                    for &qj in &q {
                        lhs += f.eval(pi * qj)?;
                    }
                }
                Ok(if multiplicative {
                    lhs - sp[a] * sq[b]
                } else {
                    lhs - sp[a] - sq[b] - lam * sp[a] * sq[b]
                })
            })?;
            Ok(report(s))
        }
        EquationKind::Cocycle => {
            let Operands::Binary(big_f) = ops else {
                return Err(wrong_operands(kind, &ops, "a two-variable function"));
            };
            let GridDomain::Cone(c) = grid else {
                return Err(mismatch(kind, grid, "a cone grid"));
            };
            let s = engine.sweep(c.len(), |k| {
                let [x, y, z] = c.point(k);
                Ok(big_f.eval(x + y, z)? + big_f.eval(x, y)?
                    - big_f.eval(x, y + z)?
                    - big_f.eval(y, z)?)
            })?;
            Ok(report(s))
        }
        EquationKind::EntropyEq => {
            let Operands::Ternary(h) = ops else {
                return Err(wrong_operands(kind, &ops, "a three-variable function"));
            };
            let GridDomain::Cone(c) = grid else {
                return Err(mismatch(kind, grid, "a cone grid"));
            };
            let s = engine.sweep(c.len(), |k| {
                let [x, y, z] = c.point(k);
                entropy_eq_defect(h, x, y, z, 0.0)
            })?;
            Ok(report(s))
        }
        EquationKind::ModifiedEntropy { alpha } => {
            let Operands::Ternary(f) = ops else {
                return Err(wrong_operands(kind, &ops, "a three-variable function"));
            };
            let GridDomain::Cone(c) = grid else {
                return Err(mismatch(kind, grid, "a cone grid"));
            };
            let s = engine.sweep(c.len(), |k| {
                let [x, y, z] = c.point(k);
                modified_defect(f, alpha, x, y, z)
            })?;
            Ok(report(s))
        }
        EquationKind::CauchyAdditive
        | EquationKind::Multiplicative
        | EquationKind::Logarithmic
        | EquationKind::PhiEquation
        | EquationKind::HomogenizedDifference => {
            if !matches!(
                grid,
                GridDomain::UnitPairs(_) | GridDomain::Quadrant(_) | GridDomain::Triangle(_)
            ) {
                return Err(mismatch(kind, grid, "a two-variable grid"));
            }
            let defect: Box<dyn Fn(f64, f64) -> Result<f64> + Sync> = match (*kind, ops) {
                (EquationKind::CauchyAdditive, Operands::Scalar(a)) => {
                    Box::new(move |x, y| Ok(a.eval(x + y)? - a.eval(x)? - a.eval(y)?))
                }
                (EquationKind::Multiplicative, Operands::Scalar(m)) => {
                    Box::new(move |x, y| Ok(m.eval(x * y)? - m.eval(x)? * m.eval(y)?))
                }
                (EquationKind::Logarithmic, Operands::Scalar(l)) => {
                    Box::new(move |x, y| Ok(l.eval(x * y)? - l.eval(x)? - l.eval(y)?))
                }
                (EquationKind::PhiEquation, Operands::Scalar(phi)) => Box::new(move |x, y| {
                    Ok(phi.eval(x * y)? - x * phi.eval(y)? - y * phi.eval(x)?)
                }),
                (EquationKind::HomogenizedDifference, Operands::Pair(f, phi)) => {
                    Box::new(move |x, y| {
                        let s = x + y;
                        if s <= 0.0 {
                            return Err(Error::domain("homogenized-difference", &[x, y]));
                        }
                        Ok(s * f.eval((y / s).min(1.0))? - phi.eval(x)? - phi.eval(y)?
                            + phi.eval(s)?)
                    })
                }
                (EquationKind::HomogenizedDifference, _) => {
                    return Err(wrong_operands(kind, &ops, "a pair (f, phi)"))
                }
                _ => return Err(wrong_operands(kind, &ops, "one scalar function")),
            };
            let s = engine.sweep(grid.len(), |k| {
                let p = grid.point(k);
                defect(p[0], p[1])
            })?;
            Ok(report(s))
        }
        EquationKind::InfoFunctionForm => {
            let Operands::Pair(f, phi) = ops else {
                return Err(wrong_operands(kind, &ops, "a pair (f, phi)"));
            };
            let GridDomain::Unit(u) = grid else {
                return Err(mismatch(kind, grid, "a unit grid"));
            };
            let xs = u.points();
            let s = engine.sweep(xs.len(), |k| {
                let x = xs[k];
                Ok(f.eval(x)? - phi.eval(x)? - phi.eval(1.0 - x)?)
            })?;
            Ok(report(s))
        }
    }
}

/// `H(x,y,z) − H(x+y,0,z) − H(x,y,0)`, with zeros replaced by `tau` when `tau > 0`.
pub fn entropy_eq_defect(h: &TernaryFunction, x: f64, y: f64, z: f64, tau: f64) -> Result<f64> {
    Ok(h.eval(x, y, z)? - h.eval(x + y, tau, z)? - h.eval(x, y, tau)?)
}

/// `f(x,y,z) − f(x,y+z,0) − (y+z)^α f(0, y/(y+z), z/(y+z))`
pub fn modified_defect(f: &TernaryFunction, alpha: f64, x: f64, y: f64, z: f64) -> Result<f64> {
    let t = y + z;
    Ok(f.eval(x, y, z)? - f.eval(x, t, 0.0)? - t.powf(alpha) * f.eval(0.0, y / t, z / t)?)
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Sup over the grid and all six coordinate permutations of `|F(p) − F(σp)|`.
pub fn symmetry_residual(
    f: &TernaryFunction,
    grid: &ConeGrid,
    engine: &Engine,
) -> Result<ResidualReport> {
    let s = engine.sweep(grid.len(), |k| {
        let p = grid.point(k);
        let base = f.eval(p[0], p[1], p[2])?;
        let mut worst: f64 = 0.0;
        for s in &PERMUTATIONS[1..] {
            worst = worst.max((base - f.eval(p[s[0]], p[s[1]], p[s[2]])?).abs());
        }
        Ok(worst)
    })?;
    Ok(ResidualReport::from_sweep(
        "symmetry",
        "cone",
        grid.resolution(),
        s,
        |k| Point::from_slice(&grid.point(k)),
    ))
}

/// Sup of `|F(tu, tv) − t^α F(u, v)|` over a two-variable grid and `t_set`.
pub fn homogeneity_residual(
    f: &BinaryFunction,
    alpha: f64,
    grid: &GridDomain,
    t_set: &[f64],
    engine: &Engine,
) -> Result<ResidualReport> {
    if t_set.is_empty() || t_set.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::config(
            "t_set",
            "scale factors must be positive and finite",
        ));
    }
    if !matches!(
        grid,
        GridDomain::UnitPairs(_) | GridDomain::Quadrant(_) | GridDomain::Triangle(_)
    ) {
        return Err(Error::config(
            "grid",
            format!("homogeneity needs a two-variable grid, got {}", grid.name()),
        ));
    }
    let nt = t_set.len();
    let point = |k: usize| {
        let mut p = grid.point(k / nt);
        p.push(t_set[k % nt]);
        p
    };
    let s = engine.sweep(grid.len() * nt, |k| {
        let p = grid.point(k / nt);
        let t = t_set[k % nt];
        Ok(f.eval(t * p[0], t * p[1])? - t.powf(alpha) * f.eval(p[0], p[1])?)
    })?;
    Ok(ResidualReport::from_sweep(
        "homogeneity",
        grid.name(),
        grid.resolution(),
        s,
        point,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{GridSpec, QuadrantGrid, TriangleGrid, Variant};

    fn tri(r: usize) -> GridDomain {
        GridDomain::Triangle(TriangleGrid::new(r, Variant::Open).unwrap())
    }

    fn fp(alpha: f64) -> EquationKind {
        EquationKind::FundamentalParametric { alpha }
    }

    #[test]
    fn fundamental_examples() {
        let e = Engine::default();
        let s = ScalarFunction::ShannonS;
        assert!(
            residual(&fp(1.0), Operands::Scalar(&s), &tri(64), &e)
                .unwrap()
                .sup
                <= 1e-12
        );
        let p = ScalarFunction::power_family(3.0, 2.0, 2.0);
        assert!(
            residual(&fp(2.0), Operands::Scalar(&p), &tri(64), &e)
                .unwrap()
                .sup
                <= 1e-12
        );
        let shifted = ScalarFunction::ShannonS.plus(ScalarFunction::constant(0.01));
        let r = residual(&fp(1.0), Operands::Scalar(&shifted), &tri(64), &e).unwrap();
        // the shift survives as 0.01·(x − y)
        let max_gap = 62.0 / 64.0 - 1.0 / 64.0;
        assert!((r.sup - 0.01 * max_gap).abs() < 1e-12, "{}", r.sup);
    }

    #[test]
    fn closed_triangle_boundary() {
        let e = Engine::default();
        let g = GridDomain::Triangle(TriangleGrid::new(32, Variant::Closed).unwrap());
        let p = ScalarFunction::power_family(1.0, 2.0, 3.0);
        assert!(
            residual(&fp(3.0), Operands::Scalar(&p), &g, &e)
                .unwrap()
                .sup
                <= 1e-12
        );
        let s = ScalarFunction::ShannonS;
        assert!(
            residual(&fp(1.0), Operands::Scalar(&s), &g, &e)
                .unwrap()
                .sup
                <= 1e-12
        );
    }

    #[test]
    fn sum_form_alpha_entropy() {
        let e = Engine::default();
        let alpha: f64 = 2.0;
        let k = 1.0 / (2f64.powf(1.0 - alpha) - 1.0);
        let f = ScalarFunction::Sum {
            terms: vec![
                ScalarFunction::PowerLaw { c: k, alpha },
                ScalarFunction::PowerLaw { c: -k, alpha: 1.0 },
            ],
        };
        let g = GridSpec::SimplexPair {
            n: 2,
            m: 2,
            resolution: 24,
            closed: false,
        }
        .build(u128::MAX)
        .unwrap();
        let kind = EquationKind::SumFormAlpha { alpha, n: 2, m: 2 };
        assert!(residual(&kind, Operands::Scalar(&f), &g, &e).unwrap().sup <= 1e-10);
        let wrong = EquationKind::SumFormAlpha { alpha, n: 3, m: 2 };
        assert!(matches!(
            residual(&wrong, Operands::Scalar(&f), &g, &e),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn cocycle_and_entropy_eq() {
        let e = Engine::default();
        let cone = GridDomain::Cone(ConeGrid::new(12, 2.0).unwrap());
        let big_f = BinaryFunction::PhiDifference {
            phi: ScalarFunction::XLogX { c: 1.0 },
        };
        assert!(
            residual(&EquationKind::Cocycle, Operands::Binary(&big_f), &cone, &e)
                .unwrap()
                .sup
                <= 1e-10
        );
        let h = TernaryFunction::EntropySolution { c: 1.0, alpha: 2.0 };
        assert!(
            residual(&EquationKind::EntropyEq, Operands::Ternary(&h), &cone, &e)
                .unwrap()
                .sup
                <= 1e-12
        );
    }

    #[test]
    fn section_one_three_equations() {
        let e = Engine::default();
        let g = GridDomain::Quadrant(QuadrantGrid::new(20, 2.0).unwrap());
        let lin = ScalarFunction::PowerLaw { c: 1.5, alpha: 1.0 };
        let sq = ScalarFunction::PowerLaw { c: 1.0, alpha: 2.0 };
        let log = ScalarFunction::Log2 { lambda: -0.7 };
        let phi = ScalarFunction::XLogX { c: -3.0 };
        let cases = [
            (EquationKind::CauchyAdditive, &lin),
            (EquationKind::Multiplicative, &sq),
            (EquationKind::Logarithmic, &log),
            (EquationKind::PhiEquation, &phi),
        ];
        for (kind, f) in cases {
            let r = residual(&kind, Operands::Scalar(f), &g, &e).unwrap();
            assert!(r.sup <= 1e-12, "{} {}", kind.id(), r.sup);
        }
        let shannon_phi = ScalarFunction::XLogX { c: -1.0 };
        let s = ScalarFunction::ShannonS;
        let r = residual(
            &EquationKind::HomogenizedDifference,
            Operands::Pair(&s, &shannon_phi),
            &g,
            &e,
        )
        .unwrap();
        assert!(r.sup <= 1e-12);
        let u = GridSpec::Unit {
            resolution: 64,
            closed: true,
        }
        .build(u128::MAX)
        .unwrap();
        let r = residual(
            &EquationKind::InfoFunctionForm,
            Operands::Pair(&s, &shannon_phi),
            &u,
            &e,
        )
        .unwrap();
        assert!(r.sup <= 1e-12);
    }

    #[test]
    fn mismatches_are_config_errors() {
        let e = Engine::default();
        let f = ScalarFunction::ShannonS;
        let cone = GridDomain::Cone(ConeGrid::new(4, 1.0).unwrap());
        assert!(matches!(
            residual(&fp(1.0), Operands::Scalar(&f), &cone, &e),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            residual(&EquationKind::EntropyEq, Operands::Scalar(&f), &cone, &e),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn symmetry_examples() {
        let e = Engine::default();
        let g = ConeGrid::new(8, 1.0).unwrap();
        let h = TernaryFunction::EntropySolution { c: 2.0, alpha: 3.0 };
        assert!(symmetry_residual(&h, &g, &e).unwrap().sup <= 1e-12);
        let x = TernaryFunction::Coordinate { index: 0 };
        let r = symmetry_residual(&x, &g, &e).unwrap();
        assert!((r.sup - (1.0 - 0.125)).abs() < 1e-15);
        let phi = TernaryFunction::PhiForm {
            phi: ScalarFunction::XLogX { c: 1.0 },
        };
        assert!(symmetry_residual(&phi, &g, &e).unwrap().sup <= 1e-12);
    }

    #[test]
    fn homogeneity_examples() {
        let e = Engine::default();
        let g = GridDomain::Quadrant(QuadrantGrid::new(10, 1.0).unwrap());
        let big_f = BinaryFunction::Homogenized {
            f: ScalarFunction::power_family(2.0, 1.0, 0.5),
            alpha: 0.5,
        };
        let ts = [0.5, 2.0, 3.0];
        assert!(homogeneity_residual(&big_f, 0.5, &g, &ts, &e).unwrap().sup <= 1e-12);
        let sum = BinaryFunction::Linear {
            a: 1.0,
            b: 1.0,
            c: 0.0,
        };
        assert!(homogeneity_residual(&sum, 1.0, &g, &ts, &e).unwrap().sup <= 1e-12);
        let affine = BinaryFunction::Linear {
            a: 1.0,
            b: 1.0,
            c: 1.0,
        };
        assert!(
            homogeneity_residual(&affine, 1.0, &g, &[2.0], &e)
                .unwrap()
                .sup
                >= 1.0
        );
    }

    #[test]
    fn defect_dump() {
        let e = Engine::default().with_dump(true);
        let f = ScalarFunction::ShannonS.plus(ScalarFunction::constant(0.01));
        let r = residual(&fp(1.0), Operands::Scalar(&f), &tri(4), &e).unwrap();
        let mut buf = Vec::new();
        r.write_defects_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("x0,x1,defect\n"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn bounded_perturbation_growth(a in -3.0f64..3.0, b in -3.0f64..3.0, alpha in 0.0f64..4.0,
                                           delta in 1e-6f64..1e-2, seed in 0u64..1000) {
                let f = ScalarFunction::power_family(a, b, alpha)
                    .plus(ScalarFunction::Noise { amplitude: delta, seed });
                let r = residual(&fp(alpha), Operands::Scalar(&f), &tri(24), &Engine::default()).unwrap();
                prop_assert!(r.sup <= 4.0 * delta + 1e-12);
            }

            #[test]
            fn swap_symmetry(alpha in 0.0f64..3.0, seed in 0u64..1000) {
                let f = ScalarFunction::Noise { amplitude: 1.0, seed };
                for k in 1..20 {
                    for j in 1..(21 - k) {
                        let (x, y) = (k as f64 / 21.0, j as f64 / 21.0);
                        let d1 = fundamental_defect(&f, alpha, x, y).unwrap();
                        let d2 = fundamental_defect(&f, alpha, y, x).unwrap();
                        prop_assert!((d1 + d2).abs() < 1e-12);
                    }
                }
            }

            #[test]
            fn subgrid_monotone(r in 3usize..20, seed in 0u64..1000) {
                let f = ScalarFunction::Noise { amplitude: 1.0, seed };
                let e = Engine::default();
                let coarse = residual(&fp(0.5), Operands::Scalar(&f), &tri(r), &e).unwrap();
                let fine = residual(&fp(0.5), Operands::Scalar(&f), &tri(2 * r), &e).unwrap();
                prop_assert!(coarse.sup <= fine.sup + 1e-15);
            }
        }
    }
}
