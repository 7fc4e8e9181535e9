use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Alpha, Regime};

/// Constant used at α = 0, where the closed form divides by zero.
pub const K_AT_ZERO: f64 = 63.0;

/// `K(α) = |2^{1−α}−1|⁻¹·(3 + 12·2^α + 32·3^{α+1}/|2^{−α}−1|)`, with `K(0) = 63`.
#[allow(non_snake_case)]
pub fn stability_constant_K(alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        return Err(Error::unsupported(
            "alpha",
            "K(α) is unbounded as α → 1; the method does not apply at α = 1",
        ));
    }
    if !alpha.is_finite() {
        return Err(Error::unsupported(
            "alpha",
            format!("{alpha} is not finite"),
        ));
    }
    if alpha == 0.0 {
        return Ok(K_AT_ZERO);
    }
    let p = 2f64.powf(alpha);
    let inner = 3.0 + 12.0 * p + 32.0 * 3f64.powf(alpha + 1.0) / (1.0 / p - 1.0).abs();
    Ok(inner / (2.0 / p - 1.0).abs())
}

/// `T(α) = 3·2^α + 8·3^{α+1}/|2^{−α}−1|` for `1 ≠ α > 0`.
#[allow(non_snake_case)]
pub fn stability_constant_T(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::unsupported(
            "alpha",
            format!("T(α) needs 1 ≠ α > 0, got {alpha}"),
        ));
    }
    let p = 2f64.powf(alpha);
    Ok(3.0 * p + 8.0 * 3f64.powf(alpha + 1.0) / (1.0 / p - 1.0).abs())
}

/// `cₙ(α) = 2 + 7·2^α·n^α·K(α)`
pub fn c_n(alpha: f64, n: f64) -> Result<f64> {
    Ok(2.0 + 7.0 * 2f64.powf(alpha) * n.powf(alpha) * stability_constant_K(alpha)?)
}

/// `dₙ(α) = 4 + 7·2^{α+2}·n^α·K(α)`
pub fn d_n(alpha: f64, n: f64) -> Result<f64> {
    Ok(4.0 + 7.0 * 2f64.powf(alpha + 2.0) * n.powf(alpha) * stability_constant_K(alpha)?)
}

/// The constants attached to a value of α (and optionally a box bound `n`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct StabilityConstants {
    pub alpha: f64,
    pub regime: Regime,
    pub K: Option<f64>,
    pub T: Option<f64>,
    pub n: Option<f64>,
    pub c_n: Option<f64>,
    pub d_n: Option<f64>,
}

impl StabilityConstants {
    pub fn new(alpha: Alpha, n: Option<f64>) -> Self {
        let a = alpha.value();
        let k = stability_constant_K(a).ok();
        StabilityConstants {
            alpha: a,
            regime: alpha.regime(),
            K: k,
            T: stability_constant_T(a).ok(),
            n,
            c_n: n.and_then(|n| c_n(a, n).ok()),
            d_n: n.and_then(|n| d_n(a, n).ok()),
        }
    }

    /// `|K·|2^{1−α}−1| − (4T+3)|`, defined for `1 ≠ α > 0`.
    pub fn relation_gap(&self) -> Option<f64> {
        let (k, t) = (self.K?, self.T?);
        Some((k * (2f64.powf(1.0 - self.alpha) - 1.0).abs() - (4.0 * t + 3.0)).abs())
    }
}
