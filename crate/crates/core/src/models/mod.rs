//! Function representations and the entropy families.

mod alpha;
mod entropy;
mod multi;
pub mod noise;
mod scalar;

pub use alpha::{Alpha, Regime};
pub use entropy::{alpha_entropy, entropy_limit_gap, shannon_entropy, shannon_info_function};
pub use multi::{BinaryFunction, TernaryFunction};
pub use scalar::ScalarFunction;

use crate::error::Result;

pub fn eval(f: &ScalarFunction, x: f64) -> Result<f64> {
    f.eval(x)
}

pub fn eval3(f: &TernaryFunction, x: f64, y: f64, z: f64) -> Result<f64> {
    f.eval(x, y, z)
}
