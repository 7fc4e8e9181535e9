//! Information measures rebuilt from a generating function by α-recursivity,
//! and checkers for the usual axioms.
//!
//! `I₂(1−x, x) = f(x)` is the generator and, for `n ≥ 3`,
//! `Iₙ(P) = Iₙ₋₁(p₁+p₂, p₃, …) + (p₁+p₂)^α·f(p₂/(p₁+p₂)) + pertₙ(P)`.
//! Perturbations are bounded per-level terms used to manufacture measures
//! that are only approximately recursive.

use std::io::Write;
use std::sync::OnceLock;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::domains::{csv_err, GridDomain, Point, SimplexGrid, TriangleGrid, Variant};
use crate::equations::{residual, Engine, EquationKind, Operands, ResidualReport};
use crate::error::{Error, Result};
use crate::models::noise::hash_unit;
use crate::models::{Alpha, ScalarFunction};

const SUM_TOLERANCE: f64 = 1e-9;

/// A bounded term added at one recursion level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Perturbation {
    /// `height·sin(Σ wᵢpᵢ + φ)` with weights and phase drawn from `seed`.
    Smooth {
        level: usize,
        height: f64,
        seed: u64,
    },
    /// Pseudo-noise in `[−height, height]` keyed on the point; `symmetric`
    /// keys it on the sorted point.
    Noise {
        level: usize,
        height: f64,
        seed: u64,
        #[serde(default)]
        symmetric: bool,
    },
    /// The constant `height`.
    Shift { level: usize, height: f64 },
}

impl Perturbation {
    pub fn level(&self) -> usize {
        match self {
            Perturbation::Smooth { level, .. }
            | Perturbation::Noise { level, .. }
            | Perturbation::Shift { level, .. } => *level,
        }
    }

    pub fn height(&self) -> f64 {
        match self {
            Perturbation::Smooth { height, .. }
            | Perturbation::Noise { height, .. }
            | Perturbation::Shift { height, .. } => *height,
        }
    }

    /// Same perturbation with its height multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut p = self.clone();
        match &mut p {
            Perturbation::Smooth { height, .. }
            | Perturbation::Noise { height, .. }
            | Perturbation::Shift { height, .. } => *height *= k,
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
struct SmoothTable {
    weights: Vec<f64>,
    phase: f64,
}

/// A sequence `(Iₙ)` for `2 ≤ n ≤ max_n` generated by `f(x) = I₂(1−x, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InformationMeasure {
    pub alpha: Alpha,
    pub generator: ScalarFunction,
    pub max_n: usize,
    #[serde(default)]
    pub perturbations: Vec<Perturbation>,
    #[serde(skip)]
    smooth: OnceLock<Vec<Option<SmoothTable>>>,
}

impl InformationMeasure {
    pub fn new(alpha: Alpha, generator: ScalarFunction, max_n: usize) -> Result<Self> {
        let m = InformationMeasure {
            alpha,
            generator,
            max_n,
            perturbations: Vec::new(),
            smooth: OnceLock::new(),
        };
        m.validate()?;
        Ok(m)
    }

    /// The measure generated by `Hᵅ₂(1−x, x)`, i.e. the degree-α entropy.
    pub fn alpha_entropy(alpha: Alpha, max_n: usize) -> Result<Self> {
        Self::new(alpha, ScalarFunction::alpha_entropy_generator(alpha), max_n)
    }

    pub fn with_perturbation(mut self, p: Perturbation) -> Result<Self> {
        self.perturbations.push(p);
        self.smooth = OnceLock::new();
        self.validate()?;
        Ok(self)
    }

    /// Every perturbation height multiplied by `k`.
    pub fn scaled_perturbations(&self, k: f64) -> Self {
        InformationMeasure {
            alpha: self.alpha,
            generator: self.generator.clone(),
            max_n: self.max_n,
            perturbations: self.perturbations.iter().map(|p| p.scaled(k)).collect(),
            smooth: OnceLock::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_n < 2 {
            return Err(Error::config("max_n", format!("{} < 2", self.max_n)));
        }
        self.generator.validate()?;
        for p in &self.perturbations {
            let level = p.level();
            if level < 3 || level > self.max_n {
                return Err(Error::config(
                    "perturbations.level",
                    format!(
                        "level {level} outside 3..={}; level 2 is the generator itself",
                        self.max_n
                    ),
                ));
            }
            if !(p.height().is_finite() && p.height() >= 0.0) {
                return Err(Error::config(
                    "perturbations.height",
                    "height must be finite and nonnegative",
                ));
            }
        }
        Ok(())
    }

    fn smooth_tables(&self) -> &[Option<SmoothTable>] {
        self.smooth.get_or_init(|| {
            self.perturbations
                .iter()
                .map(|p| match p {
                    Perturbation::Smooth { level, seed, .. } => {
                        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                        let weights = (0..*level).map(|_| rng.random_range(-3.0..3.0)).collect();
                        let phase = rng.random_range(0.0..std::f64::consts::TAU);
                        Some(SmoothTable { weights, phase })
                    }
                    _ => None,
                })
                .collect()
        })
    }

    /// Sum of the perturbations attached to level `p.len()`.
    fn perturbation(&self, p: &[f64]) -> f64 {
        if self.perturbations.is_empty() {
            return 0.0;
        }
        let tables = self.smooth_tables();
        let mut acc = 0.0;
        for (pert, table) in self.perturbations.iter().zip(tables) {
            if pert.level() != p.len() {
                continue;
            }
            acc += match pert {
                Perturbation::Smooth { height, .. } => {
                    let t = table.as_ref().expect("smooth table");
                    let arg: f64 = t.weights.iter().zip(p).map(|(w, x)| w * x).sum();
                    height * (arg + t.phase).sin()
                }
                Perturbation::Noise {
                    height,
                    seed,
                    symmetric,
                    ..
                } => {
                    if *symmetric {
                        let mut key: SmallVec<[f64; 8]> = SmallVec::from_slice(p);
                        key.sort_by(f64::total_cmp);
                        height * hash_unit(*seed, &key)
                    } else {
                        height * hash_unit(*seed, p)
                    }
                }
                Perturbation::Shift { height, .. } => *height,
            };
        }
        acc
    }
}

fn check_point(p: &[f64]) -> Result<()> {
    let bad = |reason: &str| Error::InvalidDistribution {
        values: p.to_vec(),
        reason: reason.into(),
    };
    if p.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(bad(
            "measures are evaluated on strictly positive distributions",
        ));
    }
    if (p.iter().sum::<f64>() - 1.0).abs() > SUM_TOLERANCE {
        return Err(bad("coordinates do not sum to 1"));
    }
    Ok(())
}

/// `Iₙ(P)` by unrolling the recursion from the left down to `I₂`.
pub fn eval_measure(m: &InformationMeasure, p: &[f64]) -> Result<f64> {
    let n = p.len();
    if n < 2 || n > m.max_n {
        return Err(Error::config(
            "n",
            format!("distribution length {n} outside 2..={}", m.max_n),
        ));
    }
    check_point(p)?;
    let a = m.alpha.value();
    let mut cur: SmallVec<[f64; 8]> = SmallVec::from_slice(p);
    let mut value = 0.0;
    while cur.len() > 2 {
        let s = cur[0] + cur[1];
        value += s.powf(a) * m.generator.eval(cur[1] / s)? + m.perturbation(&cur);
        cur.remove(0);
        cur[0] = s;
    }
    Ok(value + m.generator.eval(cur[1])?)
}

fn open_simplex(n: usize, resolution: usize, engine: &Engine) -> Result<SimplexGrid> {
    SimplexGrid::with_cap(n, resolution, Variant::Open, engine.simplex_budget)
}

fn need_level(m: &InformationMeasure, n: usize) -> Result<()> {
    if n < 2 || n > m.max_n {
        return Err(Error::config("n", format!("{n} outside 2..={}", m.max_n)));
    }
    Ok(())
}

fn simplex_report(
    name: &str,
    grid: &SimplexGrid,
    engine: &Engine,
    defect: impl Fn(&[f64]) -> Result<f64> + Sync,
) -> Result<ResidualReport> {
    let s = engine.sweep(grid.len(), |k| defect(&grid.point(k)))?;
    Ok(ResidualReport::from_sweep(
        name,
        "simplex-open",
        grid.resolution(),
        s,
        |k| grid.point(k),
    ))
}

/// Sup over `Γ°ₙ` and all permutations σ of `|Iₙ(P) − Iₙ(σP)|`.
pub fn check_symmetry(
    m: &InformationMeasure,
    n: usize,
    resolution: usize,
    engine: &Engine,
) -> Result<ResidualReport> {
    need_level(m, n)?;
    let grid = open_simplex(n, resolution, engine)?;
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).skip(1).collect();
    simplex_report("symmetry", &grid, engine, |p| {
        let base = eval_measure(m, p)?;
        let mut q: Point = Point::from_slice(p);
        let mut worst: f64 = 0.0;
        for perm in &perms {
            for (slot, &i) in perm.iter().enumerate() {
                q[slot] = p[i];
            }
            worst = worst.max((base - eval_measure(m, &q)?).abs());
        }
        Ok(worst)
    })
}

/// Sup over `Γ°₃` of `|I₃(p₁,p₂,p₃) − I₃(p₁,p₃,p₂)|`.
pub fn check_semisymmetry3(
    m: &InformationMeasure,
    resolution: usize,
    engine: &Engine,
) -> Result<ResidualReport> {
    need_level(m, 3)?;
    let grid = open_simplex(3, resolution, engine)?;
    simplex_report("semi-symmetry-3", &grid, engine, |p| {
        Ok(eval_measure(m, p)? - eval_measure(m, &[p[0], p[2], p[1]])?)
    })
}

/// Sup over `Γ°ₙ` of the α-recursivity defect at level `n ≥ 3`.
pub fn check_recursivity(
    m: &InformationMeasure,
    n: usize,
    resolution: usize,
    engine: &Engine,
) -> Result<ResidualReport> {
    need_level(m, n)?;
    if n < 3 {
        return Err(Error::config("n", "recursivity starts at n = 3"));
    }
    let a = m.alpha.value();
    let grid = open_simplex(n, resolution, engine)?;
    simplex_report("recursivity", &grid, engine, |p| {
        let s = p[0] + p[1];
        let mut head: Point = Point::with_capacity(n - 1);
        head.push(s);
        head.extend_from_slice(&p[2..]);
        Ok(eval_measure(m, p)?
            - eval_measure(m, &head)?
            - s.powf(a) * eval_measure(m, &[p[0] / s, p[1] / s])?)
    })
}

/// Sup over pairs of `|I_{nm}(P∗Q) − Iₙ(P) − Iₘ(Q) − (2^{1−α}−1)Iₙ(P)Iₘ(Q)|`.
pub fn check_additivity(
    m: &InformationMeasure,
    n: usize,
    k: usize,
    resolution: usize,
    engine: &Engine,
) -> Result<ResidualReport> {
    need_level(m, n)?;
    need_level(m, k)?;
    need_level(m, n * k)?;
    let gp = open_simplex(n, resolution, engine)?;
    let gq = open_simplex(k, resolution, engine)?;
    let pairs = gp.len() as u128 * gq.len() as u128;
    if pairs > engine.pair_budget {
        return Err(Error::Budget {
            what: format!("additivity pairs n={n}, m={k}, R={resolution}"),
            requested: pairs,
            cap: engine.pair_budget,
        });
    }
    let factor = m.alpha.additivity_factor();
    let nq = gq.len();
    let point = |idx: usize| {
        let mut pt = gp.point(idx / nq);
        pt.extend_from_slice(&gq.point(idx % nq));
        pt
    };
    let s = engine.sweep(gp.len() * nq, |idx| {
        let (p, q) = (gp.point(idx / nq), gq.point(idx % nq));
        let prod: Point = p
            .iter()
            .flat_map(|&pi| q.iter().map(move |&qj| pi * qj))
            .collect();
        let (ip, iq) = (eval_measure(m, &p)?, eval_measure(m, &q)?);
        Ok(eval_measure(m, &prod)? - ip - iq - factor * ip * iq)
    })?;
    Ok(ResidualReport::from_sweep(
        "additivity",
        "simplex-open-pairs",
        resolution,
        s,
        point,
    ))
}

/// `|I₂(½, ½) − 1|`
pub fn check_normalization(m: &InformationMeasure) -> Result<f64> {
    Ok((eval_measure(m, &[0.5, 0.5])? - 1.0).abs())
}

/// Sup over `Γ°ₙ` of `|Iₙ(P) − Σf(pᵢ)|`.
pub fn check_sum_property(
    m: &InformationMeasure,
    f: &ScalarFunction,
    n: usize,
    resolution: usize,
    engine: &Engine,
) -> Result<ResidualReport> {
    need_level(m, n)?;
    let grid = open_simplex(n, resolution, engine)?;
    simplex_report("sum-property", &grid, engine, |p| {
        let mut s = 0.0;
        for &x in p {
            s += f.eval(x)?;
        }
        Ok(eval_measure(m, p)? - s)
    })
}

/// Extracts `f(x) = I₂(1−x, x)` and measures its parametric fundamental defect on the open triangle.
///
/// The report's target is `2ε₂ + ε₁`, with ε₂ the level-3 recursivity
/// defect and ε₁ the 3-semi-symmetry defect, both on `Γ°₃` at the same
/// resolution.
pub fn derive_generating_defect(
    m: &InformationMeasure,
    resolution: usize,
    engine: &Engine,
) -> Result<(ScalarFunction, ResidualReport)> {
    if m.max_n < 3 {
        return Err(Error::config("max_n", "the reduction needs I₃"));
    }
    let f = m.generator.clone();
    let eps1 = check_semisymmetry3(m, resolution, engine)?.sup;
    let eps2 = check_recursivity(m, 3, resolution, engine)?.sup;
    let grid = GridDomain::Triangle(TriangleGrid::new(resolution, Variant::Open)?);
    let kind = EquationKind::FundamentalParametric {
        alpha: m.alpha.value(),
    };
    let report =
        residual(&kind, Operands::Scalar(&f), &grid, engine)?.with_target(2.0 * eps2 + eps1);
    Ok((f, report))
}

/// Sup over the closed triangle of `|f(x+y) − f(x) − f(y) + f(0)|`, with target `2K`.
pub fn sum_property_cauchy_gap(
    k_bound: f64,
    f: &ScalarFunction,
    resolution: usize,
    engine: &Engine,
) -> Result<ResidualReport> {
    let grid = TriangleGrid::new(resolution, Variant::Closed)?;
    let f0 = f.eval(0.0)?;
    let s = engine.sweep(grid.len(), |k| {
        let (x, y) = grid.point(k);
        Ok(f.eval(x + y)? - f.eval(x)? - f.eval(y)? + f0)
    })?;
    Ok(
        ResidualReport::from_sweep("cauchy-gap", "triangle-closed", resolution, s, |k| {
            let (x, y) = grid.point(k);
            Point::from_slice(&[x, y])
        })
        .with_target(2.0 * k_bound),
    )
}

/// Writes `p1, …, pn, value` for every point of `Γ°ₙ`.
pub fn write_measure_csv<W: Write>(
    m: &InformationMeasure,
    n: usize,
    resolution: usize,
    engine: &Engine,
    writer: W,
) -> Result<()> {
    need_level(m, n)?;
    let grid = open_simplex(n, resolution, engine)?;
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=n).map(|k| format!("p{k}")).collect();
    header.push("value".into());
    w.write_record(&header).map_err(csv_err)?;
    for k in 0..grid.len() {
        let p = grid.point(k);
        let mut rec: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        rec.push(eval_measure(m, &p)?.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Internal(e.to_string()))
}
