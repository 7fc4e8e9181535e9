use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the four behaviours of the parametric equations a value of α selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Negative,
    Zero,
    PositiveNotOne,
    One,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Negative => "negative",
            Regime::Zero => "zero",
            Regime::PositiveNotOne => "positive-not-one",
            Regime::One => "one",
        };
        f.write_str(s)
    }
}

/// The real parameter α together with its regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha {
    value: f64,
    regime: Regime,
}

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::unsupported(
                "alpha",
                format!("{value} is not finite"),
            ));
        }
        let regime = if value < 0.0 {
            Regime::Negative
        } else if value == 0.0 {
            Regime::Zero
        } else if value == 1.0 {
            Regime::One
        } else {
            Regime::PositiveNotOne
        };
        Ok(Alpha {
            value: if value == 0.0 { 0.0 } else { value },
            regime,
        })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn regime(self) -> Regime {
        self.regime
    }

    /// `2^{1−α} − 1`, the factor in the degree-α entropy and in additivity.
    pub fn additivity_factor(self) -> f64 {
        (-(self.value - 1.0) * std::f64::consts::LN_2).exp_m1()
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.value
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(Alpha::new(-0.5).unwrap().regime(), Regime::Negative);
        assert_eq!(Alpha::new(0.0).unwrap().regime(), Regime::Zero);
        assert_eq!(Alpha::new(-0.0).unwrap().regime(), Regime::Zero);
        assert_eq!(Alpha::new(1.0).unwrap().regime(), Regime::One);
        assert_eq!(
            Alpha::new(1.0 + 1e-12).unwrap().regime(),
            Regime::PositiveNotOne
        );
        assert!(Alpha::new(f64::NAN).is_err());
    }

    #[test]
    fn factor() {
        assert_eq!(Alpha::new(1.0).unwrap().additivity_factor(), 0.0);
        assert!((Alpha::new(2.0).unwrap().additivity_factor() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn serde_round_trip() {
        let a: Alpha = serde_json::from_str("2.5").unwrap();
        assert_eq!(a.regime(), Regime::PositiveNotOne);
        assert_eq!(serde_json::to_string(&a).unwrap(), "2.5");
        assert!(serde_json::from_str::<Alpha>("1e400").is_err());
    }
}
