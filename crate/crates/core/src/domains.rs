//! Finite lattice samples of the unit interval, the triangles D° and D, the
//! probability simplices Γₙ° and Γₙ and the positive cone, together with the
//! zero-probability conventions `0·log₂0 = 0^α = 0`.
//!
//! Every grid is a rational lattice `k/R`: points of resolution `R` reappear in
//! the grid of resolution `2R`, and `½` is a node whenever `R` is even.

use std::io::Write;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Coordinates of a single grid point.
pub type Point = SmallVec<[f64; 8]>;

/// Whether a domain includes its boundary (zero probabilities).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Open,
    Closed,
}

impl Variant {
    pub fn from_closed(closed: bool) -> Self {
        if closed {
            Variant::Closed
        } else {
            Variant::Open
        }
    }

    pub fn is_closed(self) -> bool {
        matches!(self, Variant::Closed)
    }
}

/// `x^α` with the convention `0^α = 0` for every real α.
pub fn pow_convention(x: f64, alpha: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::domain("pow_convention", &[x, alpha]));
    }
    if x == 0.0 {
        Ok(0.0)
    } else {
        Ok(x.powf(alpha))
    }
}

/// `x·log₂x` with the convention `0·log₂0 = 0`.
pub fn xlog2_convention(x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::domain("xlog2_convention", &[x]));
    }
    if x == 0.0 {
        Ok(0.0)
    } else {
        Ok(x * x.log2())
    }
}

fn invalid(resolution: usize, reason: &str) -> Error {
    Error::InvalidResolution {
        resolution,
        reason: reason.to_string(),
    }
}

/// Lattice points `k/R` of the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitGrid {
    resolution: usize,
    closed: bool,
    points: Vec<f64>,
}

impl UnitGrid {
    pub fn new(resolution: usize, closed: bool) -> Result<Self> {
        if resolution < 2 {
            return Err(invalid(resolution, "unit grids need R >= 2"));
        }
        let r = resolution as f64;
        let (lo, hi) = if closed {
            (0, resolution)
        } else {
            (1, resolution - 1)
        };
        let points = (lo..=hi).map(|k| k as f64 / r).collect();
        Ok(UnitGrid {
            resolution,
            closed,
            points,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Points of the unit lattice in ascending order.
pub fn sample_unit(resolution: usize, closed: bool) -> Result<Vec<f64>> {
    Ok(UnitGrid::new(resolution, closed)?.points)
}

/// Lattice sample of D° = {x, y, x+y ∈ ]0,1[} or of D = {x, y ∈ [0,1[, x+y ∈ [0,1]}.
///
/// An optional margin `h` restricts the open triangle to `x + y ≤ 1 − h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleGrid {
    resolution: usize,
    variant: Variant,
    margin: Option<f64>,
    nodes: Vec<(u32, u32)>,
}

impl TriangleGrid {
    pub fn new(resolution: usize, variant: Variant) -> Result<Self> {
        let nodes = match variant {
            Variant::Open => {
                if resolution < 3 {
                    return Err(invalid(resolution, "open triangle needs R >= 3"));
                }
                Self::open_nodes(resolution, resolution - 1)
            }
            Variant::Closed => {
                if resolution < 1 {
                    return Err(invalid(resolution, "closed triangle needs R >= 1"));
                }
                let mut nodes = Vec::new();
                for i in 0..resolution {
                    for j in 0..resolution.min(resolution - i + 1) {
                        if i + j <= resolution {
                            nodes.push((i as u32, j as u32));
                        }
                    }
                }
                nodes
            }
        };
        Ok(TriangleGrid {
            resolution,
            variant,
            margin: None,
            nodes,
        })
    }

    /// Open triangle restricted to `x + y ≤ 1 − margin`.
    pub fn with_margin(resolution: usize, margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin < 1.0) {
            return Err(Error::config("margin", format!("{margin} is not in ]0,1[")));
        }
        let max_sum = ((1.0 - margin) * resolution as f64 + 1e-9).floor() as usize;
        if max_sum < 2 || resolution < 3 {
            return Err(invalid(
                resolution,
                "no interior lattice point satisfies the margin",
            ));
        }
        Ok(TriangleGrid {
            resolution,
            variant: Variant::Open,
            margin: Some(margin),
            nodes: Self::open_nodes(resolution, max_sum.min(resolution - 1)),
        })
    }

    fn open_nodes(_resolution: usize, max_sum: usize) -> Vec<(u32, u32)> {
        let mut nodes = Vec::new();
        for i in 1..max_sum {
            for j in 1..=(max_sum - i) {
                nodes.push((i as u32, j as u32));
            }
        }
        nodes
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn margin(&self) -> Option<f64> {
        self.margin
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn point(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.nodes[idx];
        let r = self.resolution as f64;
        (i as f64 / r, j as f64 / r)
    }

    pub fn lattice(&self, idx: usize) -> (u32, u32) {
        self.nodes[idx]
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }
}

pub fn sample_triangle(resolution: usize, variant: Variant) -> Result<Vec<(f64, f64)>> {
    Ok(TriangleGrid::new(resolution, variant)?.points().collect())
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of points of the Γₙ lattice at resolution `R`.
pub fn simplex_count(n: usize, resolution: usize, variant: Variant) -> u128 {
    match variant {
        Variant::Open if resolution >= n => binomial(resolution as u128 - 1, n as u128 - 1),
        Variant::Open => 0,
        Variant::Closed => binomial((resolution + n - 1) as u128, n as u128 - 1),
    }
}

/// Compositions of `R` into `n` parts, scaled by `1/R`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexGrid {
    n: usize,
    resolution: usize,
    variant: Variant,
    parts: Vec<u16>,
}

impl SimplexGrid {
    pub fn new(n: usize, resolution: usize, variant: Variant) -> Result<Self> {
        Self::with_cap(n, resolution, variant, u128::MAX)
    }

    /// As [`SimplexGrid::new`], refusing lattices with more than `cap` points.
    pub fn with_cap(n: usize, resolution: usize, variant: Variant, cap: u128) -> Result<Self> {
        if n < 2 {
            return Err(Error::config("n", format!("simplex dimension {n} < 2")));
        }
        if resolution > u16::MAX as usize {
            return Err(invalid(resolution, "simplex resolution above 65535"));
        }
        match variant {
            Variant::Open if resolution < n => {
                return Err(invalid(resolution, "open simplex needs R >= n"));
            }
            Variant::Closed if resolution < 1 => {
                return Err(invalid(resolution, "closed simplex needs R >= 1"));
            }
            _ => {}
        }
        let count = simplex_count(n, resolution, variant);
        if count > cap {
            return Err(Error::Budget {
                what: format!("simplex grid n={n}, R={resolution}"),
                requested: count,
                cap,
            });
        }
        let min_part = if variant.is_closed() { 0 } else { 1 };
        let mut parts = Vec::with_capacity(count as usize * n);
        let mut current = vec![0u16; n];
        Self::fill(&mut parts, &mut current, 0, resolution, min_part);
        Ok(SimplexGrid {
            n,
            resolution,
            variant,
            parts,
        })
    }

    fn fill(
        out: &mut Vec<u16>,
        current: &mut [u16],
        pos: usize,
        remaining: usize,
        min_part: usize,
    ) {
        let n = current.len();
        if pos == n - 1 {
            current[pos] = remaining as u16;
            out.extend_from_slice(current);
            return;
        }
        let reserve = min_part * (n - pos - 1);
        if remaining < reserve + min_part {
            return;
        }
        for k in min_part..=(remaining - reserve) {
            current[pos] = k as u16;
            Self::fill(out, current, pos + 1, remaining - k, min_part);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.parts.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn lattice(&self, idx: usize) -> &[u16] {
        &self.parts[idx * self.n..(idx + 1) * self.n]
    }

    pub fn point_into(&self, idx: usize, out: &mut Point) {
        let r = self.resolution as f64;
        out.clear();
        out.extend(self.lattice(idx).iter().map(|&k| k as f64 / r));
    }

    pub fn point(&self, idx: usize) -> Point {
        let mut p = Point::new();
        self.point_into(idx, &mut p);
        p
    }
}

pub fn sample_simplex(n: usize, resolution: usize, variant: Variant) -> Result<Vec<Vec<f64>>> {
    let grid = SimplexGrid::new(n, resolution, variant)?;
    Ok((0..grid.len()).map(|k| grid.point(k).to_vec()).collect())
}

/// Lattice `(i·B/R, j·B/R, k·B/R)`, `1 ≤ i, j, k ≤ R`, inside the open positive cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeGrid {
    resolution: usize,
    bound: f64,
}

impl ConeGrid {
    pub fn new(resolution: usize, bound: f64) -> Result<Self> {
        if resolution < 1 {
            return Err(invalid(resolution, "cone grid needs R >= 1"));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::config(
                "bound",
                format!("box bound {bound} must be positive"),
            ));
        }
        Ok(ConeGrid { resolution, bound })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn spacing(&self) -> f64 {
        self.bound / self.resolution as f64
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let r = self.resolution;
        let h = self.spacing();
        let i = idx / (r * r) + 1;
        let j = (idx / r) % r + 1;
        let k = idx % r + 1;
        [i as f64 * h, j as f64 * h, k as f64 * h]
    }
}

/// Lattice `(i·B/R, j·B/R)`, `1 ≤ i, j ≤ R`, in the open positive quadrant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantGrid {
    resolution: usize,
    bound: f64,
}

impl QuadrantGrid {
    pub fn new(resolution: usize, bound: f64) -> Result<Self> {
        if resolution < 1 {
            return Err(invalid(resolution, "quadrant grid needs R >= 1"));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::config(
                "bound",
                format!("box bound {bound} must be positive"),
            ));
        }
        Ok(QuadrantGrid { resolution, bound })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let r = self.resolution;
        let h = self.bound / r as f64;
        [(idx / r + 1) as f64 * h, (idx % r + 1) as f64 * h]
    }
}

/// A materialized sample of one of the domains above.
#[derive(Debug, Clone, PartialEq)]
pub enum GridDomain {
    Unit(UnitGrid),
    /// All ordered pairs of points of a unit grid.
    UnitPairs(UnitGrid),
    Triangle(TriangleGrid),
    Simplex(SimplexGrid),
    /// All pairs `(P, Q)` from two simplex grids.
    SimplexPair(SimplexGrid, SimplexGrid),
    Cone(ConeGrid),
    Quadrant(QuadrantGrid),
}

impl GridDomain {
    pub fn len(&self) -> usize {
        match self {
            GridDomain::Unit(g) => g.len(),
            GridDomain::UnitPairs(g) => g.len() * g.len(),
            GridDomain::Triangle(g) => g.len(),
            GridDomain::Simplex(g) => g.len(),
            GridDomain::SimplexPair(p, q) => p.len() * q.len(),
            GridDomain::Cone(g) => g.len(),
            GridDomain::Quadrant(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn resolution(&self) -> usize {
        match self {
            GridDomain::Unit(g) | GridDomain::UnitPairs(g) => g.resolution(),
            GridDomain::Triangle(g) => g.resolution(),
            GridDomain::Simplex(g) | GridDomain::SimplexPair(g, _) => g.resolution(),
            GridDomain::Cone(g) => g.resolution(),
            GridDomain::Quadrant(g) => g.resolution(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GridDomain::Unit(_) => "unit",
            GridDomain::UnitPairs(_) => "unit-pairs",
            GridDomain::Triangle(_) => "triangle",
            GridDomain::Simplex(_) => "simplex",
            GridDomain::SimplexPair(..) => "simplex-pair",
            GridDomain::Cone(_) => "cone",
            GridDomain::Quadrant(_) => "quadrant",
        }
    }

    /// Coordinates of point `idx`, flattened (a simplex pair yields `P` then `Q`).
    pub fn point(&self, idx: usize) -> Point {
        match self {
            GridDomain::Unit(g) => Point::from_slice(&[g.points()[idx]]),
            GridDomain::UnitPairs(g) => {
                let n = g.len();
                Point::from_slice(&[g.points()[idx / n], g.points()[idx % n]])
            }
            GridDomain::Triangle(g) => {
                let (x, y) = g.point(idx);
                Point::from_slice(&[x, y])
            }
            GridDomain::Simplex(g) => g.point(idx),
            GridDomain::SimplexPair(p, q) => {
                let mut out = p.point(idx / q.len());
                out.extend(q.point(idx % q.len()));
                out
            }
            GridDomain::Cone(g) => Point::from_slice(&g.point(idx)),
            GridDomain::Quadrant(g) => Point::from_slice(&g.point(idx)),
        }
    }

    /// Writes one point per row, columns `x0, x1, …`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let dim = if self.is_empty() {
            0
        } else {
            self.point(0).len()
        };
        let header: Vec<String> = (0..dim).map(|k| format!("x{k}")).collect();
        w.write_record(&header).map_err(csv_err)?;
        for idx in 0..self.len() {
            let row: Vec<String> = self.point(idx).iter().map(|v| v.to_string()).collect();
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Internal(e.to_string()))?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Internal(format!("csv: {e}"))
}

/// Serializable description of a grid, materialized with [`GridSpec::build`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GridSpec {
    Unit {
        resolution: usize,
        #[serde(default)]
        closed: bool,
    },
    UnitPairs {
        resolution: usize,
        #[serde(default)]
        closed: bool,
    },
    Triangle {
        resolution: usize,
        #[serde(default)]
        closed: bool,
        #[serde(default)]
        margin: Option<f64>,
    },
    Simplex {
        n: usize,
        resolution: usize,
        #[serde(default)]
        closed: bool,
    },
    SimplexPair {
        n: usize,
        m: usize,
        resolution: usize,
        #[serde(default)]
        closed: bool,
    },
    Cone {
        resolution: usize,
        #[serde(default = "default_bound")]
        bound: f64,
    },
    Quadrant {
        resolution: usize,
        #[serde(default = "default_bound")]
        bound: f64,
    },
}

fn default_bound() -> f64 {
    1.0
}

impl GridSpec {
    /// Builds the grid, refusing more than `cap` points.
    pub fn build(&self, cap: u128) -> Result<GridDomain> {
        let grid = match *self {
            GridSpec::Unit { resolution, closed } => {
                GridDomain::Unit(UnitGrid::new(resolution, closed)?)
            }
            GridSpec::UnitPairs { resolution, closed } => {
                GridDomain::UnitPairs(UnitGrid::new(resolution, closed)?)
            }
            GridSpec::Triangle {
                resolution,
                closed,
                margin,
            } => match margin {
                Some(h) if closed => {
                    return Err(Error::config(
                        "grid.margin",
                        format!("margin {h} only applies to the open triangle"),
                    ))
                }
                Some(h) => GridDomain::Triangle(TriangleGrid::with_margin(resolution, h)?),
                None => GridDomain::Triangle(TriangleGrid::new(
                    resolution,
                    Variant::from_closed(closed),
                )?),
            },
            GridSpec::Simplex {
                n,
                resolution,
                closed,
            } => GridDomain::Simplex(SimplexGrid::with_cap(
                n,
                resolution,
                Variant::from_closed(closed),
                cap,
            )?),
            GridSpec::SimplexPair {
                n,
                m,
                resolution,
                closed,
            } => {
                let v = Variant::from_closed(closed);
                GridDomain::SimplexPair(
                    SimplexGrid::with_cap(n, resolution, v, cap)?,
                    SimplexGrid::with_cap(m, resolution, v, cap)?,
                )
            }
            GridSpec::Cone { resolution, bound } => {
                GridDomain::Cone(ConeGrid::new(resolution, bound)?)
            }
            GridSpec::Quadrant { resolution, bound } => {
                GridDomain::Quadrant(QuadrantGrid::new(resolution, bound)?)
            }
        };
        if grid.len() as u128 > cap {
            return Err(Error::Budget {
                what: format!("{} grid", grid.name()),
                requested: grid.len() as u128,
                cap,
            });
        }
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_triangle_closed(r: usize) -> usize {
        let mut count = 0;
        for i in 0..r {
            for j in 0..r {
                if i + j <= r {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn unit_examples() {
        assert_eq!(sample_unit(4, false).unwrap(), vec![0.25, 0.5, 0.75]);
        assert_eq!(sample_unit(2, true).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(matches!(
            sample_unit(1, false),
            Err(Error::InvalidResolution { .. })
        ));
    }

    #[test]
    fn triangle_examples() {
        let open = sample_triangle(4, Variant::Open).unwrap();
        assert_eq!(open, vec![(0.25, 0.25), (0.25, 0.5), (0.5, 0.25)]);

        let closed = sample_triangle(4, Variant::Closed).unwrap();
        assert_eq!(closed.len(), brute_triangle_closed(4));
        assert_eq!(closed.len(), 13);
        assert!(closed.contains(&(0.0, 0.0)));
        assert!(closed.contains(&(0.75, 0.25)));
        assert!(!closed.contains(&(1.0, 0.0)));

        assert!(sample_triangle(2, Variant::Open).is_err());
    }

    #[test]
    fn closed_triangle_never_reaches_x_one() {
        for r in 1..20 {
            let g = TriangleGrid::new(r, Variant::Closed).unwrap();
            assert_eq!(g.len(), brute_triangle_closed(r));
            for (x, y) in g.points() {
                assert!(x < 1.0 && y < 1.0 && x + y <= 1.0);
            }
        }
    }

    #[test]
    fn margin_triangle() {
        let g = TriangleGrid::with_margin(16, 0.25).unwrap();
        for (x, y) in g.points() {
            assert!(x > 0.0 && y > 0.0 && x + y <= 0.75 + 1e-15);
        }
        assert!(g.points().any(|(x, y)| (x + y - 0.75).abs() < 1e-15));
    }

    #[test]
    fn simplex_examples() {
        let s = sample_simplex(3, 4, Variant::Open).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(
            sample_simplex(2, 2, Variant::Open).unwrap(),
            vec![vec![0.5, 0.5]]
        );
        let c = sample_simplex(2, 3, Variant::Closed).unwrap();
        assert_eq!(
            c,
            vec![
                vec![0.0, 1.0],
                vec![1.0 / 3.0, 2.0 / 3.0],
                vec![2.0 / 3.0, 1.0 / 3.0],
                vec![1.0, 0.0]
            ]
        );
        assert!(matches!(
            SimplexGrid::new(4, 3, Variant::Open),
            Err(Error::InvalidResolution { .. })
        ));
    }

    #[test]
    fn simplex_counts_match_enumeration() {
        for n in 2..6 {
            for r in n..12 {
                for v in [Variant::Open, Variant::Closed] {
                    let g = SimplexGrid::new(n, r, v).unwrap();
                    assert_eq!(g.len() as u128, simplex_count(n, r, v), "n={n} r={r} {v:?}");
                }
            }
        }
    }

    #[test]
    fn simplex_budget_guard() {
        assert!(matches!(
            SimplexGrid::with_cap(6, 60, Variant::Open, 1_000_000),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn conventions() {
        assert_eq!(pow_convention(0.0, -1.0).unwrap(), 0.0);
        assert_eq!(pow_convention(0.5, 2.0).unwrap(), 0.25);
        for a in [-3.0, -0.5, 0.0, 0.7, 5.0] {
            assert_eq!(pow_convention(1.0, a).unwrap(), 1.0);
        }
        assert!(pow_convention(-0.1, 2.0).is_err());
        assert_eq!(xlog2_convention(0.0).unwrap(), 0.0);
        assert_eq!(xlog2_convention(1.0).unwrap(), 0.0);
        assert_eq!(xlog2_convention(0.5).unwrap(), -0.5);
        assert!(xlog2_convention(-1e-3).is_err());
    }

    #[test]
    fn cone_points_positive_and_bounded() {
        let g = ConeGrid::new(5, 2.0).unwrap();
        assert_eq!(g.len(), 125);
        for idx in 0..g.len() {
            let p = g.point(idx);
            assert!(p.iter().all(|&c| c > 0.0 && c <= 2.0));
        }
        assert_eq!(g.point(0), [0.4, 0.4, 0.4]);
        assert_eq!(g.point(124), [2.0, 2.0, 2.0]);
    }

    #[test]
    fn csv_export() {
        let g = GridDomain::Triangle(TriangleGrid::new(4, Variant::Open).unwrap());
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x0,x1\n0.25,0.25\n0.25,0.5\n0.5,0.25\n");
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn open_simplex_points_interior_and_normalized(n in 2usize..5, extra in 0usize..10) {
                let r = n + extra;
                let g = SimplexGrid::new(n, r, Variant::Open).unwrap();
                for idx in 0..g.len() {
                    let p = g.point(idx);
                    prop_assert!(p.iter().all(|&c| c > 0.0 && c < 1.0));
                    let s: f64 = p.iter().sum();
                    prop_assert!((s - 1.0).abs() <= 2f64.powi(-48));
                }
            }

            #[test]
            fn refinement_nests(r in 3usize..24) {
                let coarse = TriangleGrid::new(r, Variant::Open).unwrap();
                let fine = TriangleGrid::new(2 * r, Variant::Open).unwrap();
                let fine_nodes: std::collections::HashSet<_> =
                    (0..fine.len()).map(|k| fine.lattice(k)).collect();
                for k in 0..coarse.len() {
                    let (i, j) = coarse.lattice(k);
                    prop_assert!(fine_nodes.contains(&(2 * i, 2 * j)));
                }
                let cu = UnitGrid::new(r, false).unwrap();
                let fu = UnitGrid::new(2 * r, false).unwrap();
                for x in cu.points() {
                    prop_assert!(fu.points().contains(x));
                }
            }
        }
    }
}
