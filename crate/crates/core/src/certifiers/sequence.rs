//! Stability of α-recursive, 3-semi-symmetric measure sequences.

use crate::certifiers::certificate::{Candidate, StabilityCertificate};
use crate::certifiers::constants::stability_constant_K;
use crate::certifiers::fundamental::{
    apply_epsilon, certify_fundamental_open, certify_hyperstable, even_resolution, CertifyOptions,
};
use crate::domains::{SimplexGrid, Variant};
use crate::equations::Engine;
use crate::error::{Error, Result};
use crate::measures::{check_recursivity, check_semisymmetry3, eval_measure, InformationMeasure};
use crate::models::{alpha_entropy, Alpha, Regime, ScalarFunction};

/// The regular sequence `Jₙ` fitted from the two-point function.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Regular {
    /// `c·Hᵅₙ + d(p₁^α − 1)`
    Power { c: f64, d: f64 },
    /// `c(n−1) + λ·log₂p₁`
    Log { c: f64, lambda: f64 },
}

impl Regular {
    fn eval(&self, p: &[f64], alpha: Alpha) -> Result<f64> {
        match *self {
            Regular::Power { c, d } => {
                Ok(c * alpha_entropy(p, alpha)? + d * (p[0].powf(alpha.value()) - 1.0))
            }
            Regular::Log { c, lambda } => Ok(c * (p.len() as f64 - 1.0) + lambda * p[0].log2()),
        }
    }
}

/// Certifies `|Iₙ − Jₙ|` against the sequence bound for every `2 ≤ n ≤ max_level`.
///
/// ε₁ is the 3-semi-symmetry defect and εₖ the recursivity defect at level
/// `k+1`, all on open simplex grids at the same resolution. `J₂` comes from
/// the two-point certifier applied to `f(x) = I₂(1−x, x)` (the open one for
/// α ≥ 0, the hyperstable one for α < 0). The bound is
/// `Σ_{k=2}^{n−1} εₖ + (n−1)·K(α)(2ε₂+ε₁)` for α ≥ 0 and `Σ_{k=2}^{n−1} εₖ`
/// for α < 0. One certificate is returned per level.
pub fn certify_measure_sequence(
    m: &InformationMeasure,
    max_level: usize,
    opts: &CertifyOptions,
    engine: &Engine,
) -> Result<Vec<StabilityCertificate>> {
    let alpha = m.alpha;
    let a = alpha.value();
    if alpha.regime() == Regime::One {
        return Err(Error::unsupported(
            "alpha",
            "the measure-sequence theorems exclude α = 1",
        ));
    }
    let r = opts.resolution;
    even_resolution(r)?;
    if max_level < 2 || max_level > m.max_n {
        return Err(Error::config(
            "max_level",
            format!("{max_level} outside 2..={}", m.max_n),
        ));
    }
    if m.max_n < 3 {
        return Err(Error::config("max_n", "the sequence theorem needs I₃"));
    }
    if r < max_level {
        return Err(Error::InvalidResolution {
            resolution: r,
            reason: format!("open simplex of dimension {max_level} needs R >= {max_level}"),
        });
    }

    let eps1 = check_semisymmetry3(m, r, engine)?.sup;
    // eps[k] is the recursivity defect at level k + 1, for k = 2..=max(2, max_level − 1)
    let top = (max_level - 1).max(2);
    let mut eps = vec![0.0; top + 1];
    for (k, slot) in eps.iter_mut().enumerate().skip(2) {
        *slot = check_recursivity(m, k + 1, r, engine)?.sup;
    }
    let eps2 = eps[2];

    let gen = &m.generator;
    let two_point = if alpha.regime() == Regime::Negative {
        certify_hyperstable(gen, alpha, &CertifyOptions::at(r), false, engine)?
    } else {
        certify_fundamental_open(gen, alpha, &CertifyOptions::at(r), engine)?
    };
    let regular = match &two_point.candidate {
        Some(Candidate::Scalar(ScalarFunction::PowerFamily { a: pa, b: pb, .. })) => {
            Regular::Power {
                c: alpha.additivity_factor() * pa,
                d: pb - pa,
            }
        }
        Some(Candidate::Scalar(ScalarFunction::LogFamily { lambda, c })) => Regular::Log {
            c: *c,
            lambda: *lambda,
        },
        other => {
            return Err(Error::Internal(format!(
                "unexpected two-point candidate {other:?}"
            )))
        }
    };
    let k_alpha = if alpha.regime() == Regime::Negative {
        None
    } else {
        Some(stability_constant_K(a)?)
    };

    let mut out = Vec::with_capacity(max_level - 1);
    for n in 2..=max_level {
        let grid = SimplexGrid::with_cap(n, r, Variant::Open, engine.simplex_budget)?;
        let distance = engine
            .sup(grid.len(), |k| {
                let p = grid.point(k);
                Ok(eval_measure(m, &p)? - regular.eval(&p, alpha)?)
            })?
            .sup;

        let mut cert = StabilityCertificate::new("measure-sequence", r);
        cert.alpha = Some(a);
        cert.regime = Some(alpha.regime());
        apply_epsilon(&mut cert, 2.0 * eps2 + eps1, opts);
        cert.epsilons.insert("eps1".into(), eps1);
        for (k, e) in eps.iter().enumerate().take(n.max(3)).skip(2) {
            cert.epsilons.insert(format!("eps{k}"), *e);
        }
        let chain: f64 = eps.iter().take(n).skip(2).sum();
        let bound = match k_alpha {
            Some(kv) => {
                cert.constants.insert("K".into(), kv);
                chain + (n as f64 - 1.0) * kv * cert.epsilon
            }
            None => chain,
        };
        cert.trace.set("n", n as f64);
        match regular {
            Regular::Power { c, d } => {
                cert.trace.set("c", c).set("d", d);
                cert.trace.note("J_n = c H^alpha_n + d (p1^alpha - 1)");
            }
            Regular::Log { c, lambda } => {
                cert.trace.set("c", c).set("lambda", lambda);
                cert.trace.note("J_n = c (n - 1) + lambda log2(p1)");
            }
        }
        if a == 0.0 {
            cert.trace.note("K(0) taken as 63");
        }
        cert.trace.set("sum eps_k", chain);
        cert.parameters = cert.trace.values.clone();
        cert.candidate = two_point.candidate.clone();
        cert.conclude(distance, bound);
        out.push(cert);
    }
    Ok(out)
}
