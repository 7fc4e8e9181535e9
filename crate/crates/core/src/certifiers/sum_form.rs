//! Stability of sum form equations on closed probability simplices.

use crate::certifiers::certificate::{Candidate, StabilityCertificate};
use crate::certifiers::entropy_eq::refine_linear;
use crate::certifiers::minimax::{chebyshev_slope, golden_section, ls_slope};
use crate::domains::{pow_convention, SimplexGrid, UnitGrid, Variant};
use crate::equations::Engine;
use crate::error::{Error, Result};
use crate::models::{Alpha, ScalarFunction};

fn need_three(name: &str, n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Hypothesis(format!(
            "{name} = {n}, the sum form theorems need {name} >= 3"
        )));
    }
    Ok(())
}

fn simplex_points(n: usize, resolution: usize, engine: &Engine) -> Result<Vec<Vec<f64>>> {
    let grid = SimplexGrid::with_cap(n, resolution, Variant::Closed, engine.simplex_budget)?;
    Ok((0..grid.len()).map(|k| grid.point(k).to_vec()).collect())
}

/// Both simplices plus a check of the pair budget.
fn simplex_pairs(
    n: usize,
    m: usize,
    resolution: usize,
    engine: &Engine,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let ps = simplex_points(n, resolution, engine)?;
    let qs = simplex_points(m, resolution, engine)?;
    let pairs = ps.len() as u128 * qs.len() as u128;
    if pairs > engine.pair_budget {
        return Err(Error::Budget {
            what: format!("sum-form pairs n={n}, m={m}, R={resolution}"),
            requested: pairs,
            cap: engine.pair_budget,
        });
    }
    Ok((ps, qs))
}

/// Certifies the sum-form stability theorem for `φ` on the closed `Γₙ`, `n ≥ 3`.
///
/// ε is the sup of `|Σφ(pᵢ)|`. The additive part `A(p) = κp` is the minimax
/// fit of `φ(p) − φ(0)` on the closed unit grid, searched on `[−M, M]` with
/// `M = 2·sup|φ|·R`. Passes when `|b̂| = |φ − φ(0) − κp| ≤ ε` on the grid.
pub fn certify_sum_form(
    phi: &ScalarFunction,
    n: usize,
    resolution: usize,
    engine: &Engine,
) -> Result<StabilityCertificate> {
    need_three("n", n)?;
    let grid = SimplexGrid::with_cap(n, resolution, Variant::Closed, engine.simplex_budget)?;
    let mut cert = StabilityCertificate::new("sum-form", resolution);
    let eps = engine
        .sup(grid.len(), |k| {
            let p = grid.point(k);
            let mut acc = 0.0;
            for &x in p.iter() {
                acc += phi.eval(x)?;
            }
            Ok(acc)
        })?
        .sup;
    cert.epsilons.insert("eps".into(), eps);
    cert.epsilon = eps;

    let xs = UnitGrid::new(resolution, true)?.points().to_vec();
    let vals = xs
        .iter()
        .map(|&x| phi.eval(x))
        .collect::<Result<Vec<_>>>()?;
    let phi0 = vals[0];
    let ys: Vec<f64> = vals.iter().map(|v| v - phi0).collect();
    let sup_phi = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let big_m = 2.0 * sup_phi * resolution as f64;
    let err = |k: f64| {
        xs.iter()
            .zip(&ys)
            .map(|(x, y)| (y - k * x).abs())
            .fold(0.0, f64::max)
    };
    let (kappa, b_sup) = if big_m == 0.0 {
        (0.0, err(0.0))
    } else {
        golden_section(err, -big_m, big_m, 1e-14 * big_m, 400)
    };
    let b_hat: Vec<(f64, f64)> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| (x, y - kappa * x))
        .collect();
    cert.trace
        .set("kappa", kappa)
        .set("phi(0)", phi0)
        .set("M", big_m)
        .set("sup |b|", b_sup)
        .set("b(0)", b_hat[0].1);
    cert.trace.samples.insert("b".into(), b_hat);
    cert.parameters = cert.trace.values.clone();
    cert.candidate = Some(Candidate::Scalar(ScalarFunction::PowerLaw {
        c: kappa,
        alpha: 1.0,
    }));
    cert.conclude(b_sup, eps);
    Ok(cert)
}

/// One candidate decomposition `g ≈ κp + m(p)`.
#[derive(Debug, Clone, Copy)]
struct MultFit {
    kappa: f64,
    beta: Option<f64>,
    remainder: f64,
}

fn mult_remainder(xs: &[f64], gs: &[f64], kappa: f64, beta: Option<f64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (&x, &g) in xs.iter().zip(gs) {
        let m = match beta {
            Some(b) => pow_convention(x, b)?,
            None => 0.0,
        };
        worst = worst.max((g - kappa * x - m).abs());
    }
    Ok(worst)
}

/// β by regression through the origin of `ln(g − κp)` on `ln p`, over points where `g − κp > 0`.
fn fit_beta(xs: &[f64], gs: &[f64], kappa: f64) -> Option<f64> {
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for (&x, &g) in xs.iter().zip(gs) {
        let r = g - kappa * x;
        if x > 0.0 && x < 1.0 && r > 0.0 {
            lx.push(x.ln());
            ly.push(r.ln());
        }
    }
    if lx.is_empty() {
        None
    } else {
        Some(ls_slope(&lx, &ly))
    }
}

fn better(a: &MultFit, b: &MultFit) -> bool {
    let tol = 1e-12 * (1.0 + a.remainder.max(b.remainder));
    if (a.remainder - b.remainder).abs() > tol {
        return a.remainder < b.remainder;
    }
    if a.beta.is_some() != b.beta.is_some() {
        return a.beta.is_some();
    }
    a.kappa.abs() < b.kappa.abs()
}

/// Decomposes `g` satisfying the multiplicative sum-form inequality into a
/// regular additive part `κp`, a multiplicative part `p^β` (or 0) and a
/// bounded remainder.
///
/// ε is the sup of `|ΣΣg(pᵢqⱼ) − Σg(pᵢ)Σg(qⱼ)|` over the closed grids,
/// divided by `|2^{1−α}−1|` when `α` is given. The check is informational:
/// it passes when the remainder is at most ε. A fit in which `g − κp` is
/// nowhere positive is flagged in the trace as `fit_failure` and falls back
/// to the `m = 0` branch.
pub fn certify_sum_form_multiplicative(
    g: &ScalarFunction,
    n: usize,
    m: usize,
    alpha: Option<Alpha>,
    resolution: usize,
    engine: &Engine,
) -> Result<StabilityCertificate> {
    need_three("n", n)?;
    need_three("m", m)?;
    let (ps, qs) = simplex_pairs(n, m, resolution, engine)?;
    let mut cert = StabilityCertificate::new("sum-form-multiplicative", resolution);
    let nq = qs.len();
    let raw = engine
        .sup(ps.len() * nq, |idx| {
            let (p, q) = (&ps[idx / nq], &qs[idx % nq]);
            let mut cross = 0.0;
            for &pi in p {
                for &qj in q {
                    cross += g.eval(pi * qj)?;
                }
            }
            let (mut sp, mut sq) = (0.0, 0.0);
            for &pi in p {
                sp += g.eval(pi)?;
            }
            for &qj in q {
                sq += g.eval(qj)?;
            }
            Ok(cross - sp * sq)
        })?
        .sup;
    cert.epsilons.insert("raw defect".into(), raw);
    let eps = match alpha {
        Some(a) => {
            let factor = a.additivity_factor().abs();
            cert.alpha = Some(a.value());
            cert.regime = Some(a.regime());
            if factor == 0.0 {
                return Err(Error::unsupported(
                    "alpha",
                    "|2^(1-alpha) - 1| vanishes at alpha = 1",
                ));
            }
            raw / factor
        }
        None => raw,
    };
    cert.epsilon = eps;

    let xs = UnitGrid::new(resolution, true)?.points().to_vec();
    let gs = xs.iter().map(|&x| g.eval(x)).collect::<Result<Vec<_>>>()?;
    // κ range scaled by the variation of g, so a constant g only tries κ = 0
    let scale = gs.iter().fold(0.0f64, |s, v| s.max((v - gs[0]).abs()));
    let steps = 40;
    let mut kappas = vec![0.0];
    if scale > 0.0 {
        kappas.extend((0..=steps).map(|k| 2.0 * scale * (2.0 * k as f64 / steps as f64 - 1.0)));
    }

    let (k0, e0) = chebyshev_slope(&xs, &gs);
    let mut best = MultFit {
        kappa: k0,
        beta: None,
        remainder: e0,
    };
    let mut any_positive = false;
    let mut with_m: Option<MultFit> = None;
    for &k in &kappas {
        if let Some(beta) = fit_beta(&xs, &gs, k) {
            any_positive = true;
            let fit = MultFit {
                kappa: k,
                beta: Some(beta),
                remainder: mult_remainder(&xs, &gs, k, Some(beta))?,
            };
            if with_m.is_none_or(|w| better(&fit, &w)) {
                with_m = Some(fit);
            }
        }
    }
    if let Some(w) = with_m {
        // local refinement of κ around the best coarse node
        let step = 4.0 * scale / steps as f64;
        let obj = |k: f64| match fit_beta(&xs, &gs, k) {
            Some(b) => mult_remainder(&xs, &gs, k, Some(b)).unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        };
        let (kr, er) = golden_section(
            obj,
            w.kappa - step,
            w.kappa + step,
            1e-13 * (1.0 + scale),
            200,
        );
        let refined = if scale > 0.0 && er < w.remainder {
            MultFit {
                kappa: kr,
                beta: fit_beta(&xs, &gs, kr),
                remainder: er,
            }
        } else {
            w
        };
        if better(&refined, &best) {
            best = refined;
        }
    }
    let fit_failure = !any_positive;
    if fit_failure {
        cert.trace
            .note("fit failure: g - kappa p is nowhere positive, multiplicative part set to 0");
    }
    cert.trace
        .set("kappa", best.kappa)
        .set("remainder", best.remainder)
        .set("fit_failure", if fit_failure { 1.0 } else { 0.0 });
    let mut terms = vec![ScalarFunction::PowerLaw {
        c: best.kappa,
        alpha: 1.0,
    }];
    match best.beta {
        Some(b) => {
            cert.trace.set("beta", b);
            terms.push(ScalarFunction::PowerLaw { c: 1.0, alpha: b });
        }
        None => {
            cert.trace.note("multiplicative part is 0");
        }
    }
    cert.parameters = cert.trace.values.clone();
    cert.candidate = Some(Candidate::Scalar(ScalarFunction::Sum { terms }));
    cert.conclude(best.remainder, eps);
    Ok(cert)
}

/// Fits the regular form of the mixed-weight sum-form inequality
/// `|ΣΣf(pᵢqⱼ) − Σf(pᵢ)Σqⱼ^β − Σf(qⱼ)Σpᵢ^α| ≤ ε`.
///
/// The additive part is pinned to 0 (it must vanish at 1). For `β ≠ α` the
/// candidate is `c(p^α − p^β)`; for `β = α ≠ 1` it is `λ·p^α·log₂p`. The
/// check is informational: remainder against measured ε.
pub fn certify_mixed_sum_form(
    f: &ScalarFunction,
    alpha: f64,
    beta: f64,
    n: usize,
    m: usize,
    resolution: usize,
    engine: &Engine,
) -> Result<StabilityCertificate> {
    need_three("n", n)?;
    need_three("m", m)?;
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(Error::config("alpha/beta", "exponents must be finite"));
    }
    if alpha == 1.0 && beta == 1.0 {
        return Err(Error::unsupported(
            "alpha",
            "the case beta = alpha = 1 is not covered",
        ));
    }
    let (ps, qs) = simplex_pairs(n, m, resolution, engine)?;
    let mut cert = StabilityCertificate::new("mixed-sum-form", resolution);
    cert.alpha = Some(alpha);
    let nq = qs.len();
    let eps = engine
        .sup(ps.len() * nq, |idx| {
            let (p, q) = (&ps[idx / nq], &qs[idx % nq]);
            let mut cross = 0.0;
            for &pi in p {
                for &qj in q {
                    cross += f.eval(pi * qj)?;
                }
            }
            let (mut fp, mut fq, mut pa, mut qb) = (0.0, 0.0, 0.0, 0.0);
            for &pi in p {
                fp += f.eval(pi)?;
                pa += pow_convention(pi, alpha)?;
            }
            for &qj in q {
                fq += f.eval(qj)?;
                qb += pow_convention(qj, beta)?;
            }
            Ok(cross - fp * qb - fq * pa)
        })?
        .sup;
    cert.epsilons.insert("eps".into(), eps);
    cert.epsilon = eps;

    let xs = UnitGrid::new(resolution, true)?.points().to_vec();
    let fs = xs.iter().map(|&x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    let same = alpha == beta;
    let basis = xs
        .iter()
        .map(|&x| {
            if same {
                Ok(pow_convention(x, alpha)? * if x == 0.0 { 0.0 } else { x.log2() })
            } else {
                Ok(pow_convention(x, alpha)? - pow_convention(x, beta)?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let c0 = ls_slope(&basis, &fs);
    let (c, remainder, _) = refine_linear(&fs, &basis, c0);
    cert.trace
        .set("kappa", 0.0)
        .set(if same { "lambda" } else { "c" }, c)
        .set("remainder", remainder)
        .note("additive part pinned to kappa = 0 so that a(1) = 0");
    let candidate = if same {
        ScalarFunction::PowerLog { lambda: c, alpha }
    } else {
        ScalarFunction::Sum {
            terms: vec![
                ScalarFunction::PowerLaw { c, alpha },
                ScalarFunction::PowerLaw { c: -c, alpha: beta },
            ],
        }
    };
    cert.parameters = cert.trace.values.clone();
    cert.candidate = Some(Candidate::Scalar(candidate));
    cert.conclude(remainder, eps);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eng() -> Engine {
        Engine::default()
    }

    #[test]
    fn sum_form_zero_and_linear() {
        let c = certify_sum_form(&ScalarFunction::constant(0.0), 3, 12, &eng()).unwrap();
        assert_eq!(c.epsilon, 0.0);
        assert_eq!(c.trace.get("kappa"), Some(0.0));
        assert!(c.satisfied);

        let lin = ScalarFunction::PowerLaw {
            c: 1e-3,
            alpha: 1.0,
        };
        let c = certify_sum_form(&lin, 3, 12, &eng()).unwrap();
        assert!((c.epsilon - 1e-3).abs() < 1e-15);
        assert!((c.trace.get("kappa").unwrap() - 1e-3).abs() < 1e-9);
        assert!(c.satisfied);
    }

    #[test]
    fn sum_form_noise() {
        let phi = ScalarFunction::PowerLaw { c: 0.5, alpha: 1.0 }.plus(ScalarFunction::Noise {
            amplitude: 1e-5,
            seed: 4,
        });
        let c = certify_sum_form(&phi, 4, 12, &eng()).unwrap();
        assert!((c.trace.get("kappa").unwrap() - 0.5).abs() < 1e-4);
        assert!(c.satisfied);
    }

    #[test]
    fn sum_form_needs_three() {
        let r = certify_sum_form(&ScalarFunction::constant(0.0), 2, 12, &eng());
        assert!(matches!(r, Err(Error::Hypothesis(_))));
    }

    #[test]
    fn multiplicative_pure_forms() {
        let sq = ScalarFunction::PowerLaw { c: 1.0, alpha: 2.0 };
        let c = certify_sum_form_multiplicative(&sq, 3, 3, None, 8, &eng()).unwrap();
        assert!(c.epsilon < 1e-12);
        assert_eq!(c.trace.get("kappa"), Some(0.0));
        assert!((c.trace.get("beta").unwrap() - 2.0).abs() < 1e-9);
        assert!(c.observed_distance < 1e-9);

        let id = ScalarFunction::PowerLaw { c: 1.0, alpha: 1.0 };
        let c = certify_sum_form_multiplicative(&id, 3, 3, None, 8, &eng()).unwrap();
        assert!(c.observed_distance < 1e-9);
        assert!(
            c.trace.get("beta").is_some(),
            "tie goes to the multiplicative part"
        );
    }

    #[test]
    fn multiplicative_fit_failure_is_flagged() {
        let neg = ScalarFunction::constant(-5.0);
        let c = certify_sum_form_multiplicative(&neg, 3, 3, None, 6, &eng()).unwrap();
        assert_eq!(c.trace.get("fit_failure"), Some(1.0));
    }

    #[test]
    fn mixed_forms_recovered() {
        let f = ScalarFunction::Sum {
            terms: vec![
                ScalarFunction::PowerLaw { c: 0.7, alpha: 2.0 },
                ScalarFunction::PowerLaw {
                    c: -0.7,
                    alpha: 3.0,
                },
            ],
        };
        let c = certify_mixed_sum_form(&f, 2.0, 3.0, 3, 3, 8, &eng()).unwrap();
        assert!(c.epsilon < 1e-12);
        assert!((c.trace.get("c").unwrap() - 0.7).abs() < 1e-9);
        assert!(c.observed_distance < 1e-8);

        let g = ScalarFunction::PowerLog {
            lambda: 1.3,
            alpha: 2.0,
        };
        let c = certify_mixed_sum_form(&g, 2.0, 2.0, 3, 3, 8, &eng()).unwrap();
        assert!(c.epsilon < 1e-12);
        assert!((c.trace.get("lambda").unwrap() - 1.3).abs() < 1e-9);
        assert!(c.observed_distance < 1e-8);
    }
}
