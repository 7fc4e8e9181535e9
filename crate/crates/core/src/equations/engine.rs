//! Deterministic parallel sup/mean reduction over indexed samples.
//!
//! Indices are cut into fixed-size chunks independent of the thread count;
//! chunk partials are merged in index order, so results are bit-identical for
//! any pool size.

use rayon::prelude::*;

use crate::error::{Error, Result};

const CHUNK: usize = 2048;

/// Default cap on (P, Q) pairs in a sum-form sweep.
pub const DEFAULT_PAIR_BUDGET: u128 = 10_000_000;
/// Default cap on simplex lattice points per level.
pub const DEFAULT_SIMPLEX_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Engine {
    pub pair_budget: u128,
    pub simplex_budget: u128,
    /// Keep every per-point defect so it can be written out.
    pub dump_defects: bool,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            pair_budget: DEFAULT_PAIR_BUDGET,
            simplex_budget: DEFAULT_SIMPLEX_BUDGET,
            dump_defects: false,
        }
    }
}

/// Result of [`Engine::sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub sup: f64,
    /// Earliest index attaining `sup`.
    pub argmax: usize,
    pub mean: f64,
    pub count: usize,
    pub defects: Option<Vec<f64>>,
}

#[derive(Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn new() -> Self {
        Neumaier {
            sum: 0.0,
            comp: 0.0,
        }
    }

    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.comp
    }
}

struct Partial {
    sup: f64,
    argmax: usize,
    sum: Neumaier,
    defects: Vec<f64>,
}

impl Engine {
    pub fn with_dump(mut self, dump: bool) -> Self {
        self.dump_defects = dump;
        self
    }

    /// Reduces `|defect(k)|` over `k ∈ 0..len`. The first failing index (in
    /// index order) determines the returned error.
    pub fn sweep<F>(&self, len: usize, defect: F) -> Result<Sweep>
    where
        F: Fn(usize) -> Result<f64> + Sync,
    {
        self.sweep_with(len, self.dump_defects, defect)
    }

    /// As [`Engine::sweep`] but never keeps per-point defects.
    pub fn sup<F>(&self, len: usize, defect: F) -> Result<Sweep>
    where
        F: Fn(usize) -> Result<f64> + Sync,
    {
        self.sweep_with(len, false, defect)
    }

    fn sweep_with<F>(&self, len: usize, keep: bool, defect: F) -> Result<Sweep>
    where
        F: Fn(usize) -> Result<f64> + Sync,
    {
        if len == 0 {
            return Err(Error::config("grid", "empty sample set"));
        }
        let chunks = len.div_ceil(CHUNK);
        let partials: Vec<Result<Partial>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(len);
                let mut p = Partial {
                    sup: -1.0,
                    argmax: lo,
                    sum: Neumaier::new(),
                    defects: Vec::new(),
                };
                for k in lo..hi {
                    let v = defect(k)?;
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            what: "defect".into(),
                            point: vec![k as f64],
                        });
                    }
                    let v = v.abs();
                    if v > p.sup {
                        p.sup = v;
                        p.argmax = k;
                    }
                    p.sum.add(v);
                    if keep {
                        p.defects.push(v);
                    }
                }
                Ok(p)
            })
            .collect();

        let mut sup = -1.0;
        let mut argmax = 0;
        let mut total = Neumaier::new();
        let mut defects = keep.then(|| Vec::with_capacity(len));
        for p in partials {
            let p = p?;
            if p.sup > sup {
                sup = p.sup;
                argmax = p.argmax;
            }
            total.add(p.sum.sum);
            total.add(p.sum.comp);
            if let Some(d) = defects.as_mut() {
                d.extend(p.defects);
            }
        }
        let mean = (total.total() / len as f64).clamp(0.0, sup);
        Ok(Sweep {
            sup,
            argmax,
            mean,
            count: len,
            defects,
        })
    }
}
