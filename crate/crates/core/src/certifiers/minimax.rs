//! One-dimensional minimization helpers for the regular-family fits.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a convex `f` on `[lo, hi]`.
///
/// Returns the best abscissa seen and its value. Stops once the bracket is
/// narrower than `tol` or after `max_iter` steps.
pub fn golden_section<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut best = (lo, f(lo));
    let consider = |x: f64, v: f64, best: &mut (f64, f64)| {
        if v < best.1 || (v == best.1 && x.abs() < best.0.abs()) {
            *best = (x, v);
        }
    };
    let fhi = f(hi);
    consider(hi, fhi, &mut best);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    consider(x1, f1, &mut best);
    consider(x2, f2, &mut best);
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            consider(x1, f1, &mut best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            consider(x2, f2, &mut best);
        }
    }
    best
}

/// Least-squares slope through the origin, `Σxy / Σx²` (0 when `Σx² = 0`).
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += x * y;
        sxx += x * x;
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Sup-norm error of the best slope `c` in `|y − c·x|` by golden section,
/// bracketed around the least-squares slope.
pub fn chebyshev_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let err = |c: f64| {
        xs.iter()
            .zip(ys)
            .map(|(x, y)| (y - c * x).abs())
            .fold(0.0, f64::max)
    };
    let c0 = ls_slope(xs, ys);
    let span = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if span == 0.0 {
        return (0.0, err(0.0));
    }
    let w = 2.0 * err(c0) / span + 1e-12 * (1.0 + c0.abs());
    golden_section(err, c0 - w, c0 + w, 1e-15 * (1.0 + c0.abs()), 200)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_vertex_of_abs() {
        let (x, v) = golden_section(|x| (x - 0.3).abs(), -5.0, 5.0, 1e-12, 200);
        assert!((x - 0.3).abs() < 1e-10);
        assert!(v < 1e-10);
    }

    #[test]
    fn chebyshev_beats_least_squares() {
        let xs: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 2.0 * x + if *x == 1.0 { 0.5 } else { 0.0 })
            .collect();
        let (c, e) = chebyshev_slope(&xs, &ys);
        let ls = ls_slope(&xs, &ys);
        let ls_err = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - ls * x).abs())
            .fold(0.0, f64::max);
        assert!(e <= ls_err + 1e-15);
        assert!(c > 2.0);
    }
}
