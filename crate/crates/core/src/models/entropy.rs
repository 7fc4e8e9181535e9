use std::f64::consts::LN_2;

use crate::domains::xlog2_convention;
use crate::error::{Error, Result};
use crate::models::alpha::Alpha;

const SUM_TOLERANCE: f64 = 1e-9;

fn check_distribution(p: &[f64]) -> Result<()> {
    let bad = |reason: &str| Error::InvalidDistribution {
        values: p.to_vec(),
        reason: reason.to_string(),
    };
    if p.is_empty() {
        return Err(bad("empty"));
    }
    if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(bad("coordinates must be finite and nonnegative"));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOLERANCE {
        return Err(bad("coordinates do not sum to 1"));
    }
    Ok(())
}

/// `H¹ₙ(P) = −Σ pᵢ·log₂pᵢ`
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    let mut h = 0.0;
    for &v in p {
        h -= xlog2_convention(v)?;
    }
    Ok(h.max(0.0))
}

/// `Hᵅₙ(P) = (2^{1−α}−1)⁻¹·(Σ pᵢ^α − 1)`, and `H¹ₙ` at α = 1.
///
/// Evaluated as `Σ pᵢ·expm1((α−1)·ln pᵢ) / expm1((1−α)·ln 2)` so that it
/// stays accurate as α approaches 1.
pub fn alpha_entropy(p: &[f64], alpha: Alpha) -> Result<f64> {
    check_distribution(p)?;
    let a = alpha.value();
    if a == 1.0 {
        return shannon_entropy(p);
    }
    let mut num = 0.0;
    for &v in p {
        if v > 0.0 {
            num += v * ((a - 1.0) * v.ln()).exp_m1();
        }
    }
    Ok(num / ((1.0 - a) * LN_2).exp_m1())
}

/// Binary Shannon information function `S(x) = −x·log₂x − (1−x)·log₂(1−x)`.
pub fn shannon_info_function(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("shannon_info_function", &[x]));
    }
    Ok(-(xlog2_convention(x)? + xlog2_convention(1.0 - x)?))
}

/// `|H^{1+δ}ₙ(P) − H¹ₙ(P)|`
pub fn entropy_limit_gap(p: &[f64], delta: f64) -> Result<f64> {
    let a = Alpha::new(1.0 + delta)?;
    Ok((alpha_entropy(p, a)? - shannon_entropy(p)?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        let t = 1.0 / 3.0;
        assert!((shannon_entropy(&[t, t, t]).unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!(matches!(
            shannon_entropy(&[0.5, 0.6]),
            Err(Error::InvalidDistribution { .. })
        ));
    }

    #[test]
    fn alpha_examples() {
        assert!((alpha_entropy(&[0.5, 0.5], al(2.0)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(alpha_entropy(&[1.0, 0.0], al(2.0)).unwrap(), 0.0);
        assert_eq!(alpha_entropy(&[0.5, 0.5], al(1.0)).unwrap(), 1.0);
        assert!((alpha_entropy(&[0.5, 0.25, 0.25], al(2.0)).unwrap() - 1.25).abs() < 1e-15);
        // degenerate distributions vanish for every α, including α ≤ 0
        assert_eq!(alpha_entropy(&[0.0, 1.0, 0.0], al(-1.0)).unwrap(), 0.0);
        assert_eq!(alpha_entropy(&[0.0, 1.0], al(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn direct_formula_agrees() {
        let p = [0.1, 0.2, 0.3, 0.4];
        for a in [-2.0, 0.0, 0.5, 2.0, 3.5] {
            let direct =
                (p.iter().map(|v: &f64| v.powf(a)).sum::<f64>() - 1.0) / (2f64.powf(1.0 - a) - 1.0);
            assert!((alpha_entropy(&p, al(a)).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn info_function() {
        assert_eq!(shannon_info_function(0.5).unwrap(), 1.0);
        assert_eq!(shannon_info_function(0.0).unwrap(), 0.0);
        assert!((shannon_info_function(0.25).unwrap() - 0.811_278_124_459_132_9).abs() < 1e-12);
    }

    #[test]
    fn limit_gap() {
        let t = 1.0 / 3.0;
        assert!(entropy_limit_gap(&[0.5, 0.5], 1e-4).unwrap() < 1e-3);
        assert_eq!(entropy_limit_gap(&[1.0, 0.0], 0.3).unwrap(), 0.0);
        assert!(entropy_limit_gap(&[t, t, t], 1e-4).unwrap() < 1e-3);
    }
}
