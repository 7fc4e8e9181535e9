//! Stability of the associativity-type equation `A(u+v, w) = B(u, v+w)`.

use serde::{Deserialize, Serialize};

use crate::certifiers::certificate::{Candidate, StabilityCertificate};
use crate::equations::Engine;
use crate::error::{Error, Result};
use crate::models::{BinaryFunction, ScalarFunction};

/// A closed real interval of positive length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let iv = Interval { lo, hi };
        iv.validate()?;
        Ok(iv)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo) {
            return Err(Error::config(
                "interval",
                format!("[{}, {}] is empty or degenerate", self.lo, self.hi),
            ));
        }
        Ok(())
    }
}

/// Lattice used for all three intervals: a common step `h` and node counts.
struct Lattice {
    h: f64,
    nu: usize,
    nv: usize,
    nw: usize,
}

impl Lattice {
    fn new(u: &Interval, v: &Interval, w: &Interval, resolution: usize) -> Result<Self> {
        for iv in [u, v, w] {
            iv.validate()?;
        }
        if resolution == 0 {
            return Err(Error::InvalidResolution {
                resolution,
                reason: "need at least one step per interval".into(),
            });
        }
        let h = u.len().min(v.len()).min(w.len()) / resolution as f64;
        let steps = |iv: &Interval| ((iv.len() / h) * (1.0 + 1e-12)).floor() as usize;
        Ok(Lattice {
            h,
            nu: steps(u),
            nv: steps(v),
            nw: steps(w),
        })
    }
}

/// Certifies the associativity stability theorem on a lattice of `U × V × W`.
///
/// ε is the sup of `|A(u+v, w) − B(u, v+w)|`. The fitted `φ` takes, on each
/// anti-diagonal `t + s = σ`, the midrange of the values of `B`, which makes
/// `|B − φ|` as small as the data allows; the certificate checks
/// `|A − φ| ≤ 2ε` and `|B − φ| ≤ ε` (reported distance is the larger of
/// `|A − φ|/2` and `|B − φ|`, against the bound ε). The anchored choice
/// `φ(σ) = B(min U, σ − min U)` is evaluated too and recorded in the trace.
pub fn certify_associativity(
    a: &BinaryFunction,
    b: &BinaryFunction,
    u: Interval,
    v: Interval,
    w: Interval,
    resolution: usize,
    engine: &Engine,
) -> Result<StabilityCertificate> {
    let lat = Lattice::new(&u, &v, &w, resolution)?;
    let h = lat.h;
    let (nu, nv, nw) = (lat.nu, lat.nv, lat.nw);
    let ut = |i: usize| u.lo + i as f64 * h;
    let p_at = |q: usize| u.lo + v.lo + q as f64 * h;
    let s_at = |l: usize| v.lo + w.lo + l as f64 * h;
    let w_at = |k: usize| w.lo + k as f64 * h;
    let sigma_at = |m: usize| u.lo + v.lo + w.lo + m as f64 * h;

    let mut cert = StabilityCertificate::new("associativity", resolution);
    let (cu, cv, cw) = (nu + 1, nv + 1, nw + 1);
    let eps = engine
        .sup(cu * cv * cw, |idx| {
            let i = idx / (cv * cw);
            let j = (idx / cw) % cv;
            let k = idx % cw;
            Ok(a.eval(p_at(i + j), w_at(k))? - b.eval(ut(i), s_at(j + k))?)
        })?
        .sup;
    cert.epsilons.insert("eps".into(), eps);
    cert.epsilon = eps;

    // φ on the anti-diagonals m = i + l of B's lattice.
    let ns = nv + nw;
    let diag = nu + ns;
    let mut phi = Vec::with_capacity(diag + 1);
    let mut anchored = Vec::with_capacity(diag + 1);
    for m in 0..=diag {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let first = m.saturating_sub(ns);
        for i in first..=m.min(nu) {
            let val = b.eval(ut(i), s_at(m - i))?;
            lo = lo.min(val);
            hi = hi.max(val);
        }
        phi.push(0.5 * (lo + hi));
        anchored.push(if m <= ns {
            b.eval(ut(0), s_at(m))?
        } else {
            let q = m - nw.min(m);
            a.eval(p_at(q), w_at(m - q))?
        });
    }

    let dist = |phi: &[f64]| -> Result<(f64, f64)> {
        let da = engine
            .sup((nu + nv + 1) * cw, |idx| {
                let (q, k) = (idx / cw, idx % cw);
                Ok(a.eval(p_at(q), w_at(k))? - phi[q + k])
            })?
            .sup;
        let db = engine
            .sup(cu * (ns + 1), |idx| {
                let (i, l) = (idx / (ns + 1), idx % (ns + 1));
                Ok(b.eval(ut(i), s_at(l))? - phi[i + l])
            })?
            .sup;
        Ok((da, db))
    };
    let (da, db) = dist(&phi)?;
    let (aa, ab) = dist(&anchored)?;

    cert.trace
        .set("h", h)
        .set("distance A", da)
        .set("distance B", db)
        .set("anchored distance A", aa)
        .set("anchored distance B", ab)
        .note("phi is the midrange of B along each anti-diagonal t + s = sigma");
    cert.trace.samples.insert(
        "phi".into(),
        (0..=diag).map(|m| (sigma_at(m), phi[m])).collect(),
    );
    cert.parameters.insert("A bound".into(), 2.0 * eps);
    cert.parameters.insert("B bound".into(), eps);
    cert.parameters.insert("distance A".into(), da);
    cert.parameters.insert("distance B".into(), db);
    cert.candidate = Some(Candidate::Scalar(ScalarFunction::GridSample {
        xs: (0..=diag).map(sigma_at).collect(),
        ys: phi,
    }));
    cert.conclude((0.5 * da).max(db), eps);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn exact_corollary_case() {
        let sum = BinaryFunction::Linear {
            a: 1.0,
            b: 1.0,
            c: 0.0,
        };
        let c = certify_associativity(
            &sum,
            &sum,
            iv(0.0, 1.0),
            iv(0.0, 1.0),
            iv(0.0, 1.0),
            16,
            &Engine::default(),
        )
        .unwrap();
        assert!(c.epsilon <= 1e-15);
        assert!(c.satisfied);
        let phi = &c.trace.samples["phi"];
        assert!(phi.iter().all(|(s, v)| (s - v).abs() < 1e-14));
    }

    #[test]
    fn product_against_sum() {
        let a = BinaryFunction::Product { scale: 1.0 };
        let b = BinaryFunction::Linear {
            a: 1.0,
            b: 1.0,
            c: 0.0,
        };
        let c = certify_associativity(
            &a,
            &b,
            iv(1.0, 2.0),
            iv(1.0, 2.0),
            iv(1.0, 2.0),
            10,
            &Engine::default(),
        )
        .unwrap();
        assert!(c.epsilon > 0.0);
        assert!(c.parameters["distance A"] <= 2.0 * c.epsilon + 1e-12);
        assert!(c.parameters["distance B"] <= c.epsilon + 1e-12);
        assert!(c.satisfied);
    }

    #[test]
    fn empty_interval_is_config_error() {
        assert!(matches!(Interval::new(1.0, 1.0), Err(Error::Config { .. })));
        let bad = Interval { lo: 2.0, hi: 1.0 };
        let f = BinaryFunction::Product { scale: 1.0 };
        let r = certify_associativity(
            &f,
            &f,
            bad,
            iv(0.0, 1.0),
            iv(0.0, 1.0),
            4,
            &Engine::default(),
        );
        assert!(matches!(r, Err(Error::Config { .. })));
    }
}
