use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::equations::ResidualReport;
use crate::models::{BinaryFunction, Regime, ScalarFunction, TernaryFunction};

/// Relative slack allowed when comparing a distance with its bound.
pub fn slack(bound: f64) -> f64 {
    1e-9 * (1.0 + bound.abs())
}

/// The exact solution a certifier fitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "arity", content = "function", rename_all = "kebab-case")]
pub enum Candidate {
    Scalar(ScalarFunction),
    Binary(BinaryFunction),
    Ternary(TernaryFunction),
}

/// Intermediate values of a certifier pipeline.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// Named scalars such as `a`, `b`, `c`, `lambda`.
    pub values: BTreeMap<String, f64>,
    /// Named sampled curves, as `(argument, value)` pairs.
    pub samples: BTreeMap<String, Vec<(f64, f64)>>,
    pub notes: Vec<String>,
}

impl Trace {
    pub fn set(&mut self, key: &str, v: f64) -> &mut Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }
}

/// Outcome of a certifier run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub theorem: String,
    pub alpha: Option<f64>,
    pub regime: Option<Regime>,
    pub resolution: usize,
    /// The ε entering the bound.
    pub epsilon: f64,
    /// Set when ε was supplied by the caller instead of measured.
    pub epsilon_overridden: bool,
    /// Every measured defect, by name.
    pub epsilons: BTreeMap<String, f64>,
    pub constants: BTreeMap<String, f64>,
    pub candidate: Option<Candidate>,
    pub parameters: BTreeMap<String, f64>,
    /// Sup of `|f − candidate|` on the grid.
    pub observed_distance: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub trace: Trace,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<ResidualReport>,
}

impl StabilityCertificate {
    pub(crate) fn new(theorem: &str, resolution: usize) -> Self {
        StabilityCertificate {
            theorem: theorem.to_string(),
            alpha: None,
            regime: None,
            resolution,
            epsilon: 0.0,
            epsilon_overridden: false,
            epsilons: BTreeMap::new(),
            constants: BTreeMap::new(),
            candidate: None,
            parameters: BTreeMap::new(),
            observed_distance: 0.0,
            bound: 0.0,
            satisfied: false,
            trace: Trace::default(),
            residual: None,
        }
    }

    /// Sets `bound` and `distance` and decides `satisfied` with the standard slack.
    pub(crate) fn conclude(&mut self, distance: f64, bound: f64) {
        self.observed_distance = distance;
        self.bound = bound;
        self.satisfied = distance <= bound + slack(bound);
    }

    /// `bound − distance`; negative when violated.
    pub fn margin(&self) -> f64 {
        self.bound - self.observed_distance
    }
}
