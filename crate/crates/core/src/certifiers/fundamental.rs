//! Stability of the parametric fundamental equation on the open and closed
//! triangles, and its hyperstability for α < 0.

use serde::{Deserialize, Serialize};

use crate::certifiers::certificate::{Candidate, StabilityCertificate, Trace};
use crate::certifiers::constants::{stability_constant_K, stability_constant_T};
use crate::certifiers::minimax::ls_slope;
use crate::domains::{GridDomain, TriangleGrid, UnitGrid, Variant};
use crate::equations::{residual, Engine, EquationKind, Operands};
use crate::error::{Error, Result};
use crate::models::{Alpha, Regime, ScalarFunction};

/// Settings shared by the certifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub resolution: usize,
    /// Use this ε in the bound instead of the measured one (flagged in the report).
    #[serde(default)]
    pub epsilon_override: Option<f64>,
}

impl CertifyOptions {
    pub fn at(resolution: usize) -> Self {
        CertifyOptions {
            resolution,
            epsilon_override: None,
        }
    }
}

pub(crate) fn even_resolution(resolution: usize) -> Result<()> {
    if resolution < 4 || !resolution.is_multiple_of(2) {
        return Err(Error::InvalidResolution {
            resolution,
            reason: "certifiers need an even R >= 4 so that 1/2 is a grid node".into(),
        });
    }
    Ok(())
}

pub(crate) fn apply_epsilon(cert: &mut StabilityCertificate, measured: f64, opts: &CertifyOptions) {
    cert.epsilons.insert("measured".into(), measured);
    match opts.epsilon_override {
        Some(e) => {
            cert.epsilon = e;
            cert.epsilon_overridden = true;
            cert.trace.note(format!(
                "epsilon overridden by caller: {e} (measured {measured})"
            ));
        }
        None => cert.epsilon = measured,
    }
}

/// Sup of `|f − g|` over `xs`.
pub(crate) fn sup_distance(
    f: &ScalarFunction,
    g: &ScalarFunction,
    xs: &[f64],
    engine: &Engine,
) -> Result<f64> {
    Ok(engine
        .sup(xs.len(), |k| Ok(f.eval(xs[k])? - g.eval(xs[k])?))?
        .sup)
}

fn reject_regime(alpha: Alpha, allowed: &[Regime], hint: &str) -> Result<()> {
    if allowed.contains(&alpha.regime()) {
        return Ok(());
    }
    if alpha.regime() == Regime::One {
        return Err(Error::unsupported(
            "alpha",
            "α = 1 is not covered: the stability constant blows up as α → 1",
        ));
    }
    Err(Error::Dispatch {
        regime: alpha.regime().to_string(),
        hint: hint.to_string(),
    })
}

/// The regular solution recovered from `f`, with the pipeline's intermediate values.
pub(crate) struct OpenFit {
    pub candidate: ScalarFunction,
    pub trace: Trace,
}

/// `F(u, v) = (u+v)^α f(v/(u+v))`
fn big_f(f: &ScalarFunction, alpha: f64, u: f64, v: f64) -> Result<f64> {
    let s = u + v;
    Ok(s.powf(alpha) * f.eval(v / s)?)
}

/// `g(u) = F(u, 1) − F(1, u)`
fn g_of(f: &ScalarFunction, alpha: f64, u: f64) -> Result<f64> {
    Ok(big_f(f, alpha, u, 1.0)? - big_f(f, alpha, 1.0, u)?)
}

pub(crate) fn fit_open(f: &ScalarFunction, alpha: Alpha, resolution: usize) -> Result<OpenFit> {
    let a_val = alpha.value();
    let mut trace = Trace::default();
    let probes: Vec<f64> = (1..=8).map(|k| k as f64 / 8.0).collect();
    let mut g_samples = Vec::with_capacity(probes.len());
    let mut f_samples = Vec::with_capacity(probes.len());
    for &u in &probes {
        g_samples.push((u, g_of(f, a_val, u)?));
        f_samples.push((u, big_f(f, a_val, u, 1.0)?));
    }
    trace.samples.insert("g".into(), g_samples);
    trace.samples.insert("F(u,1)".into(), f_samples);

    let candidate = if alpha.regime() == Regime::Zero {
        // g(u) = λ·log₂u for the exact family; fit λ on the open unit grid
        let us = UnitGrid::new(resolution, false)?;
        let logs: Vec<f64> = us.points().iter().map(|u| u.log2()).collect();
        let gs = us
            .points()
            .iter()
            .map(|&u| g_of(f, 0.0, u))
            .collect::<Result<Vec<_>>>()?;
        let lambda = ls_slope(&logs, &gs);
        let c = f.eval(0.5)? + lambda;
        trace.set("lambda", lambda).set("c", c);
        trace.note("lambda fitted by least squares of g(u) against log2(u) on the open unit grid");
        trace.note("K(0) taken as 63; the general K(alpha) expression is singular at alpha = 0");
        ScalarFunction::LogFamily { lambda, c }
    } else {
        let g_half = g_of(f, a_val, 0.5)?;
        let c = g_half / (2f64.powf(-a_val) - 1.0);
        // f₀(x) = f(x) − c(1−x)^α + c
        let f0_half = f.eval(0.5)? - c * 0.5f64.powf(a_val) + c;
        let a = f0_half / alpha.additivity_factor();
        let b = a + c;
        trace
            .set("g(1/2)", g_half)
            .set("c", c)
            .set("f0(1/2)", f0_half)
            .set("a", a)
            .set("b", b);
        trace.note("f0(x) = f(x) - c(1-x)^alpha + c");
        ScalarFunction::power_family(a, b, a_val)
    };
    Ok(OpenFit { candidate, trace })
}

/// Certifies stability on the open triangle for α = 0 or 1 ≠ α > 0.
pub fn certify_fundamental_open(
    f: &ScalarFunction,
    alpha: Alpha,
    opts: &CertifyOptions,
    engine: &Engine,
) -> Result<StabilityCertificate> {
    reject_regime(
        alpha,
        &[Regime::Zero, Regime::PositiveNotOne],
        "alpha < 0 is hyperstable; use the hyperstable certifier",
    )?;
    even_resolution(opts.resolution)?;
    let r = opts.resolution;
    let grid = GridDomain::Triangle(TriangleGrid::new(r, Variant::Open)?);
    let kind = EquationKind::FundamentalParametric {
        alpha: alpha.value(),
    };
    let report = residual(&kind, Operands::Scalar(f), &grid, engine)?;

    let fit = fit_open(f, alpha, r)?;
    let k = stability_constant_K(alpha.value())?;
    let xs = UnitGrid::new(r, false)?;
    let distance = sup_distance(f, &fit.candidate, xs.points(), engine)?;

    let mut cert = StabilityCertificate::new("fundamental-open", r);
    cert.alpha = Some(alpha.value());
    cert.regime = Some(alpha.regime());
    apply_epsilon(&mut cert, report.sup, opts);
    cert.constants.insert("K".into(), k);
    cert.parameters = fit.trace.values.clone();
    cert.trace = fit.trace;
    cert.candidate = Some(Candidate::Scalar(fit.candidate));
    let bound = k * cert.epsilon;
    cert.residual = Some(report);
    cert.conclude(distance, bound);
    Ok(cert)
}

/// Certifies stability on the closed triangle, with the piecewise extensions
/// of the regular solutions to 0 and 1.
pub fn certify_fundamental_closed(
    f: &ScalarFunction,
    alpha: Alpha,
    opts: &CertifyOptions,
    engine: &Engine,
) -> Result<StabilityCertificate> {
    reject_regime(
        alpha,
        &[Regime::Zero, Regime::PositiveNotOne],
        "alpha < 0 is hyperstable; use the hyperstable certifier with closed = true",
    )?;
    even_resolution(opts.resolution)?;
    let r = opts.resolution;
    let grid = GridDomain::Triangle(TriangleGrid::new(r, Variant::Closed)?);
    let kind = EquationKind::FundamentalParametric {
        alpha: alpha.value(),
    };
    let report = residual(&kind, Operands::Scalar(f), &grid, engine)?;

    let k = stability_constant_K(alpha.value())?;
    let mut cert = StabilityCertificate::new("fundamental-closed", r);
    cert.alpha = Some(alpha.value());
    cert.regime = Some(alpha.regime());
    cert.constants.insert("K".into(), k);

    let (candidate, mut trace, factor) = if alpha.regime() == Regime::Zero {
        let c = f.eval(0.5)?;
        let (f0, f1) = (f.eval(0.0)?, f.eval(1.0)?);
        let mut trace = Trace::default();
        trace.set("c", c).set("f(0)", f0).set("f(1)", f1);
        trace.note("h2: f(0) at 0, constant c = f(1/2) on ]0,1[, f(1) at 1");
        trace.note("K(0) taken as 63; the general K(alpha) expression is singular at alpha = 0");
        let h2 = ScalarFunction::Piecewise {
            at_zero: f0,
            interior: Box::new(ScalarFunction::constant(c)),
            at_one: f1,
        };
        (h2, trace, k)
    } else {
        let fit = fit_open(f, alpha, r)?;
        let (a, b) = (
            fit.trace.get("a").unwrap_or(0.0),
            fit.trace.get("b").unwrap_or(0.0),
        );
        let t = stability_constant_T(alpha.value())?;
        cert.constants.insert("T".into(), t);
        let factor = k.max(t + 1.0);
        let mut trace = fit.trace;
        trace.note("h1: 0 at 0, a x^alpha + b(1-x)^alpha - b on ]0,1[, a - b at 1");
        let h1 = ScalarFunction::Piecewise {
            at_zero: 0.0,
            interior: Box::new(fit.candidate),
            at_one: a - b,
        };
        (h1, trace, factor)
    };
    trace.note(
        "candidates are checked against the parametric fundamental equation on the closed triangle",
    );
    cert.constants.insert("bound factor".into(), factor);
    apply_epsilon(&mut cert, report.sup, opts);
    let xs = UnitGrid::new(r, true)?;
    let distance = sup_distance(f, &candidate, xs.points(), engine)?;
    let cand_eps = residual(&kind, Operands::Scalar(&candidate), &grid, engine)?.sup;
    trace.set("candidate residual", cand_eps);
    cert.parameters = trace.values.clone();
    cert.trace = trace;
    cert.candidate = Some(Candidate::Scalar(candidate));
    let bound = factor * cert.epsilon;
    cert.residual = Some(report);
    cert.conclude(distance, bound);
    Ok(cert)
}

/// Relative tolerance of the hyperstability exactness check.
pub const EXACTNESS_TOLERANCE: f64 = 1e-8;

/// Hyperstability for α < 0: `f` must coincide with `c·x^α + d(1−x)^α − d`.
///
/// `(c, d)` solve the 2×2 system through `f(½)` and `f(¼)`; the certificate
/// passes when the grid distance is at most `10⁻⁸·sup|f|`, whatever ε is.
pub fn certify_hyperstable(
    f: &ScalarFunction,
    alpha: Alpha,
    opts: &CertifyOptions,
    closed: bool,
    engine: &Engine,
) -> Result<StabilityCertificate> {
    reject_regime(
        alpha,
        &[Regime::Negative],
        "alpha >= 0 is not hyperstable; use the fundamental certifiers",
    )?;
    even_resolution(opts.resolution)?;
    let r = opts.resolution;
    let a = alpha.value();
    let grid = GridDomain::Triangle(TriangleGrid::new(r, Variant::from_closed(closed))?);
    let kind = EquationKind::FundamentalParametric { alpha: a };
    let report = residual(&kind, Operands::Scalar(f), &grid, engine)?;

    // rows: x = 1/2 and x = 1/4 of c·x^α + d·((1−x)^α − 1)
    let (m11, m12) = (0.5f64.powf(a), 0.5f64.powf(a) - 1.0);
    let (m21, m22) = (0.25f64.powf(a), 0.75f64.powf(a) - 1.0);
    let det = m11 * m22 - m12 * m21;
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Internal(format!(
            "singular hyperstability fit at alpha = {a}"
        )));
    }
    let (y1, y2) = (f.eval(0.5)?, f.eval(0.25)?);
    let c = (y1 * m22 - m12 * y2) / det;
    let d = (m11 * y2 - m21 * y1) / det;
    let candidate = ScalarFunction::power_family(c, d, a);

    let xs = UnitGrid::new(r, closed)?;
    let distance = sup_distance(f, &candidate, xs.points(), engine)?;
    let scale = engine.sup(xs.len(), |k| f.eval(xs.points()[k]))?.sup;
    let tolerance = EXACTNESS_TOLERANCE * scale;

    let mut cert = StabilityCertificate::new(
        if closed {
            "hyperstable-closed"
        } else {
            "hyperstable"
        },
        r,
    );
    cert.alpha = Some(a);
    cert.regime = Some(alpha.regime());
    apply_epsilon(&mut cert, report.sup, opts);
    cert.constants
        .insert("exactness tolerance".into(), EXACTNESS_TOLERANCE);
    cert.trace.set("c", c).set("d", d).set("sup |f|", scale);
    if closed {
        let (f0, f1) = (f.eval(0.0)?, f.eval(1.0)?);
        cert.trace
            .set("f(0)", f0)
            .set("f(1)", f1)
            .set("c - d", c - d);
        cert.trace
            .note("closed variant: the grid distance includes f(0) = 0 and f(1) = c - d");
    }
    cert.trace
        .note("hyperstable: the bound is the exactness tolerance, independent of epsilon");
    cert.parameters = cert.trace.values.clone();
    cert.candidate = Some(Candidate::Scalar(candidate));
    cert.residual = Some(report);
    cert.conclude(distance, tolerance);
    // exactness is a hard test: no extra slack
    cert.satisfied = distance <= tolerance;
    Ok(cert)
}

/// Sup residual of the parametric equation on `{x + y ≤ 1 − h}` for each margin `h`.
pub fn hyperstability_blowup_probe(
    f: &ScalarFunction,
    alpha: Alpha,
    margins: &[f64],
    resolution: usize,
    engine: &Engine,
) -> Result<Vec<(f64, f64)>> {
    reject_regime(
        alpha,
        &[Regime::Negative],
        "the blow-up probe applies to alpha < 0",
    )?;
    if margins.is_empty() {
        return Err(Error::config("margins", "empty margin list"));
    }
    if margins.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::config(
            "margins",
            "margins must be strictly decreasing",
        ));
    }
    let kind = EquationKind::FundamentalParametric {
        alpha: alpha.value(),
    };
    margins
        .iter()
        .map(|&h| {
            let grid = GridDomain::Triangle(TriangleGrid::with_margin(resolution, h)?);
            Ok((h, residual(&kind, Operands::Scalar(f), &grid, engine)?.sup))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    fn e() -> Engine {
        Engine::default()
    }

    #[test]
    fn open_round_trip() {
        let f = ScalarFunction::power_family(2.0, 1.0, 0.5);
        let c = certify_fundamental_open(&f, al(0.5), &CertifyOptions::at(128), &e()).unwrap();
        assert!(c.satisfied);
        assert!(c.epsilon <= 1e-12);
        assert!((c.trace.get("a").unwrap() - 2.0).abs() < 1e-8);
        assert!((c.trace.get("b").unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(
            c.trace.get("b").unwrap(),
            c.trace.get("a").unwrap() + c.trace.get("c").unwrap()
        );
    }

    #[test]
    fn open_perturbed() {
        let f =
            ScalarFunction::power_family(2.0, 1.0, 0.5).plus(ScalarFunction::bump(0.5, 0.2, 1e-3));
        let c = certify_fundamental_open(&f, al(0.5), &CertifyOptions::at(128), &e()).unwrap();
        assert!(c.epsilon <= 4e-3);
        assert!(c.satisfied, "{} > {}", c.observed_distance, c.bound);
    }

    #[test]
    fn open_log_family() {
        let f = ScalarFunction::LogFamily {
            lambda: 1.0,
            c: 0.0,
        };
        let c = certify_fundamental_open(&f, al(0.0), &CertifyOptions::at(128), &e()).unwrap();
        assert!(c.satisfied);
        assert!((c.trace.get("lambda").unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(c.constants["K"], 63.0);
    }

    #[test]
    fn dispatch_errors() {
        let f = ScalarFunction::ShannonS;
        let o = CertifyOptions::at(16);
        assert!(matches!(
            certify_fundamental_open(&f, al(1.0), &o, &e()),
            Err(Error::Unsupported { .. })
        ));
        assert!(matches!(
            certify_fundamental_open(&f, al(-1.0), &o, &e()),
            Err(Error::Dispatch { .. })
        ));
        assert!(matches!(
            certify_hyperstable(&f, al(2.0), &o, false, &e()),
            Err(Error::Dispatch { .. })
        ));
        assert!(matches!(
            certify_fundamental_open(&f, al(2.0), &CertifyOptions::at(15), &e()),
            Err(Error::InvalidResolution { .. })
        ));
    }

    #[test]
    fn closed_examples() {
        let h1 = ScalarFunction::power_family(1.0, 2.0, 3.0);
        let c = certify_fundamental_closed(&h1, al(3.0), &CertifyOptions::at(64), &e()).unwrap();
        assert!(c.satisfied && c.epsilon <= 1e-10);

        let h2 = ScalarFunction::Piecewise {
            at_zero: 0.3,
            interior: Box::new(ScalarFunction::constant(5.0)),
            at_one: -0.2,
        };
        let c = certify_fundamental_closed(&h2, al(0.0), &CertifyOptions::at(64), &e()).unwrap();
        assert!(c.satisfied && c.epsilon <= 1e-10);

        let delta = 1e-3;
        let shifted = ScalarFunction::Piecewise {
            at_zero: 0.0,
            interior: Box::new(
                ScalarFunction::power_family(1.0, 2.0, 3.0).plus(ScalarFunction::constant(delta)),
            ),
            at_one: -1.0,
        };
        let c =
            certify_fundamental_closed(&shifted, al(3.0), &CertifyOptions::at(64), &e()).unwrap();
        assert!(c.epsilon <= 4.0 * delta);
        assert!(c.satisfied);
    }

    #[test]
    fn hyperstable_examples() {
        let o = CertifyOptions::at(64);
        let f = ScalarFunction::power_family(1.0, 2.0, -1.0);
        let c = certify_hyperstable(&f, al(-1.0), &o, false, &e()).unwrap();
        assert!(c.satisfied);
        assert!((c.trace.get("c").unwrap() - 1.0).abs() < 1e-12);
        assert!((c.trace.get("d").unwrap() - 2.0).abs() < 1e-12);
        assert!(
            certify_hyperstable(&f, al(-1.0), &o, true, &e())
                .unwrap()
                .satisfied
        );

        let bumped = f.clone().plus(ScalarFunction::bump(0.5, 0.1, 1e-3));
        assert!(
            !certify_hyperstable(&bumped, al(-1.0), &o, false, &e())
                .unwrap()
                .satisfied
        );

        let zero = ScalarFunction::constant(0.0);
        let c = certify_hyperstable(&zero, al(-1.0), &o, false, &e()).unwrap();
        assert!(
            c.satisfied && c.trace.get("c").unwrap() == 0.0 && c.trace.get("d").unwrap() == 0.0
        );
    }

    #[test]
    fn blowup() {
        let margins: Vec<f64> = (3..=9).map(|k| 2f64.powi(-k)).collect();
        let f = ScalarFunction::power_family(1.0, 2.0, -1.0);
        let exact = hyperstability_blowup_probe(&f, al(-1.0), &margins, 1024, &e()).unwrap();
        assert!(exact.iter().all(|&(_, s)| s <= 1e-10), "{exact:?}");
        let bumped = f.plus(ScalarFunction::bump(0.5, 0.1, 1e-3));
        let seq = hyperstability_blowup_probe(&bumped, al(-1.0), &margins, 1024, &e()).unwrap();
        assert!(seq.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(seq.last().unwrap().1 / seq[0].1 >= 10.0);
    }
}
