//! Stability of the modified entropy equation
//! `f(x,y,z) = f(x, y+z, 0) + (y+z)^α·f(0, y/(y+z), z/(y+z))`.

use rayon::prelude::*;

use crate::certifiers::certificate::{Candidate, StabilityCertificate};
use crate::certifiers::constants::{c_n, d_n};
use crate::certifiers::entropy_eq::refine_linear;
use crate::certifiers::fundamental::{apply_epsilon, CertifyOptions};
use crate::domains::ConeGrid;
use crate::equations::{modified_defect, symmetry_residual, Engine};
use crate::error::{Error, Result};
use crate::models::TernaryFunction;
use crate::models::{Alpha, Regime, ScalarFunction};

/// Certifies the modified-entropy stability theorem on `(0, n]³`.
///
/// ε₁ is the equation defect and ε₂ the symmetry defect. The candidate is
/// `a(x^α+y^α+z^α) + φ̂(x+y+z)` with `φ̂(s) = f(s/3,s/3,s/3) − 3a(s/3)^α`;
/// `a` comes from the grid point where `Σp^α − 3(s/3)^α` is largest and is
/// then refined by minimax. For `α > 0` the box bound `n` must be a positive
/// integer and the bound is `cₙ(α)ε₁ + dₙ(α)ε₂`.
pub fn certify_modified_entropy(
    f: &TernaryFunction,
    alpha: Alpha,
    box_bound: f64,
    opts: &CertifyOptions,
    engine: &Engine,
) -> Result<StabilityCertificate> {
    let a = alpha.value();
    if alpha.regime() == Regime::One {
        return Err(Error::unsupported(
            "alpha",
            "the modified entropy theorem excludes α = 1",
        ));
    }
    if alpha.regime() == Regime::PositiveNotOne && !(box_bound >= 1.0 && box_bound.fract() == 0.0) {
        return Err(Error::config(
            "box_bound",
            format!("for α > 0 the box bound must be a positive integer, got {box_bound}"),
        ));
    }
    let r = opts.resolution;
    let cone = ConeGrid::new(r, box_bound)?;
    let mut cert = StabilityCertificate::new("modified-entropy", r);
    cert.alpha = Some(a);
    cert.regime = Some(alpha.regime());

    let eps1 = engine
        .sup(cone.len(), |k| {
            let [x, y, z] = cone.point(k);
            modified_defect(f, a, x, y, z)
        })?
        .sup;
    let eps2 = symmetry_residual(f, &cone, engine)?.sup;
    cert.epsilons.insert("eps1".into(), eps1);
    cert.epsilons.insert("eps2".into(), eps2);

    // f(p) − f(diag) and D(p) per grid point.
    let rows: Vec<(f64, f64)> = (0..cone.len())
        .into_par_iter()
        .map(|k| {
            let p = cone.point(k);
            let d = (p[0] + p[1] + p[2]) / 3.0;
            let diff = f.eval(p[0], p[1], p[2])? - f.eval(d, d, d)?;
            let dp = p.iter().map(|t| t.powf(a)).sum::<f64>() - 3.0 * d.powf(a);
            Ok((diff, dp))
        })
        .collect::<Result<_>>()?;
    let (diffs, basis): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();

    let (coef, distance) = if alpha.regime() == Regime::Zero {
        (0.0, diffs.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    } else {
        let mut probe = 0;
        for (k, d) in basis.iter().enumerate() {
            if d.abs() > basis[probe].abs() {
                probe = k;
            }
        }
        let a0 = if basis[probe] == 0.0 {
            0.0
        } else {
            diffs[probe] / basis[probe]
        };
        let [x, y, z] = cone.point(probe);
        cert.trace
            .set("a probe", a0)
            .note(format!("a probed at ({x}, {y}, {z})"));
        let (c, d, refined) = refine_linear(&diffs, &basis, a0);
        if refined {
            cert.trace.note("a refined by minimax over the grid");
        }
        (c, d)
    };
    cert.trace.set("a", coef);

    let h = cone.spacing();
    let phi: Vec<(f64, f64)> = (3..=3 * r)
        .map(|m| {
            let s = m as f64 * h;
            let d = s / 3.0;
            Ok((s, f.eval(d, d, d)? - 3.0 * coef * d.powf(a)))
        })
        .collect::<Result<_>>()?;
    cert.trace.samples.insert("phi".into(), phi.clone());

    let measured = match alpha.regime() {
        Regime::Negative => 2.0 * eps1 + 3.0 * eps2,
        Regime::Zero => 191.0 * eps1 + 1263.0 * eps2,
        _ => {
            let (cn, dn) = (c_n(a, box_bound)?, d_n(a, box_bound)?);
            cert.constants.insert("c_n".into(), cn);
            cert.constants.insert("d_n".into(), dn);
            cert.constants.insert("n".into(), box_bound);
            cn * eps1 + dn * eps2
        }
    };
    apply_epsilon(&mut cert, measured, opts);
    cert.parameters = cert.trace.values.clone();
    let (xs, ys) = phi.into_iter().unzip();
    cert.candidate = Some(Candidate::Ternary(
        TernaryFunction::ModifiedEntropySolution {
            a: coef,
            alpha: a,
            phi: ScalarFunction::GridSample { xs, ys },
        },
    ));
    let bound = cert.epsilon;
    cert.conclude(distance, bound);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: &TernaryFunction, a: f64, n: f64) -> Result<StabilityCertificate> {
        certify_modified_entropy(
            f,
            Alpha::new(a).unwrap(),
            n,
            &CertifyOptions::at(10),
            &Engine::default(),
        )
    }

    #[test]
    fn exact_negative_alpha() {
        let f = TernaryFunction::ModifiedEntropySolution {
            a: 1.0,
            alpha: -1.0,
            phi: ScalarFunction::constant(0.0),
        };
        let c = run(&f, -1.0, 1.0).unwrap();
        assert!(c.epsilons["eps1"] < 1e-9 && c.epsilons["eps2"] < 1e-9);
        assert!((c.trace.get("a").unwrap() - 1.0).abs() < 1e-9);
        assert!(c.satisfied);
    }

    #[test]
    fn phi_only_at_zero() {
        let f = TernaryFunction::ModifiedEntropySolution {
            a: 0.0,
            alpha: 0.0,
            phi: ScalarFunction::PowerLaw { c: 1.0, alpha: 2.0 },
        };
        let c = run(&f, 0.0, 1.0).unwrap();
        assert!(c.observed_distance < 1e-12);
        assert!(c.satisfied);
    }

    #[test]
    fn noisy_positive_alpha() {
        let f = TernaryFunction::ModifiedEntropySolution {
            a: 0.5,
            alpha: 2.0,
            phi: ScalarFunction::Sine {
                amplitude: 1.0,
                frequency: 0.3,
                phase: 0.0,
            },
        }
        .noisy(1e-3, 3, false);
        let c = run(&f, 2.0, 2.0).unwrap();
        assert!(c.constants["c_n"] > 0.0);
        assert!(c.satisfied);
    }

    #[test]
    fn rejects_alpha_one_and_fractional_box() {
        let f = TernaryFunction::Constant { value: 0.0 };
        assert!(matches!(run(&f, 1.0, 1.0), Err(Error::Unsupported { .. })));
        assert!(matches!(run(&f, 2.0, 1.5), Err(Error::Config { .. })));
    }
}
