//! Lattice-polytope hulls, exact volumes, and mixed volumes.
//!
//! All computations are exact. Vertex detection runs a phase-I simplex over
//! big rationals (is the point a convex combination of the others?). Volume
//! uses the cone decomposition from a base point: every supporting
//! hyperplane is found by brute force over point subsets, and each cone
//! contributes `height * facet_volume / n`, with the facet recursively
//! projected out along a nonzero normal coordinate so that no square roots
//! ever appear.
//!
//! Mixed volumes come from inclusion-exclusion over Minkowski sums,
//! normalized so that `MV(K, .., K) = n! * Vol(K)`: the coefficient of
//! `t_1 .. t_n` in `Vol(t_1 K_1 + .. + t_n K_n)`, which equals the generic
//! number of torus solutions of a system with those supports. The cost is
//! `2^n - 1` hull-plus-volume computations, which is why the dimension is
//! capped.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::intlattice::{hermite_normal_form, IntMatrix};

/// Hull and volume computations are supported up to this ambient dimension.
pub const MAX_HULL_DIM: usize = 6;
/// Mixed volumes run inclusion-exclusion with `2^n - 1` terms; capped here.
pub const MAX_MIXED_DIM: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("dimension {dim} exceeds supported bound {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("point configuration must be nonempty with ambient dimension >= 1")]
    EmptyConfig,
    #[error("point of length {found} in configuration of dimension {dim}")]
    MixedDimension { dim: usize, found: usize },
    #[error("mixed volume needs exactly n supports in Z^n, got {count} in Z^{dim}")]
    WrongSupportCount { count: usize, dim: usize },
    #[error("vertices are not in convex position")]
    NotConvexPosition,
}

/// A finite set of integer points in `Z^dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfig {
    dim: usize,
    points: Vec<Vec<i64>>,
}

impl PointConfig {
    pub fn new(dim: usize, points: Vec<Vec<i64>>) -> Result<Self, PolytopeError> {
        if dim == 0 || points.is_empty() {
            return Err(PolytopeError::EmptyConfig);
        }
        for p in &points {
            if p.len() != dim {
                return Err(PolytopeError::MixedDimension {
                    dim,
                    found: p.len(),
                });
            }
        }
        Ok(PointConfig { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    /// All pairwise sums; the configuration of the Minkowski sum.
    pub fn minkowski_sum(&self, other: &PointConfig) -> PointConfig {
        assert_eq!(self.dim, other.dim);
        let mut sums: BTreeSet<Vec<i64>> = BTreeSet::new();
        for a in &self.points {
            for b in &other.points {
                sums.insert((0..self.dim).map(|i| a[i] + b[i]).collect());
            }
        }
        PointConfig {
            dim: self.dim,
            points: sums.into_iter().collect(),
        }
    }

    /// Translate so the first point is the origin.
    pub fn translated_to_origin(&self) -> PointConfig {
        let base = self.points[0].clone();
        PointConfig {
            dim: self.dim,
            points: self
                .points
                .iter()
                .map(|p| (0..self.dim).map(|i| p[i] - base[i]).collect())
                .collect(),
        }
    }
}

/// Vertices of a convex lattice polytope, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<i64>>,
}

impl Polytope {
    /// Validates that every listed vertex is extreme.
    pub fn new(dim: usize, vertices: Vec<Vec<i64>>) -> Result<Self, PolytopeError> {
        let config = PointConfig::new(dim, vertices)?;
        let hull = convex_hull(&config)?;
        if hull.vertices.len() != dedupe(&config.points).len() {
            return Err(PolytopeError::NotConvexPosition);
        }
        Ok(hull)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }
}

fn dedupe(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let set: BTreeSet<Vec<i64>> = points.iter().cloned().collect();
    set.into_iter().collect()
}

/// Vertex set of the convex hull of the configuration.
pub fn convex_hull(config: &PointConfig) -> Result<Polytope, PolytopeError> {
    if config.dim() > MAX_HULL_DIM {
        return Err(PolytopeError::DimensionTooLarge {
            dim: config.dim(),
            max: MAX_HULL_DIM,
        });
    }
    let points = dedupe(config.points());
    let mut vertices = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let others: Vec<&Vec<i64>> = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| q)
            .collect();
        if !in_convex_hull(p, &others) {
            vertices.push(p.clone());
        }
    }
    Ok(Polytope {
        dim: config.dim(),
        vertices,
    })
}

/// Euclidean volume of the polytope; 0 when it is lower-dimensional.
pub fn volume(polytope: &Polytope) -> BigRational {
    volume_of_points(polytope.dim, &polytope.vertices)
}

/// Volume of the hull of an arbitrary configuration (vertex filtering is
/// applied first to keep the facet search small).
pub fn volume_of_config(config: &PointConfig) -> Result<BigRational, PolytopeError> {
    let hull = convex_hull(config)?;
    Ok(volume(&hull))
}

fn volume_of_points(n: usize, pts: &[Vec<i64>]) -> BigRational {
    if affine_rank(n, pts) < n {
        return BigRational::zero();
    }
    vol_rec(n, pts)
}

/// Cone decomposition from `pts[0]`. Requires the points to affinely span
/// `R^n`; interior or boundary non-vertex points are harmless.
fn vol_rec(n: usize, pts: &[Vec<i64>]) -> BigRational {
    if n == 1 {
        let min = pts.iter().map(|p| p[0]).min().unwrap();
        let max = pts.iter().map(|p| p[0]).max().unwrap();
        return BigRational::from_integer(BigInt::from(max - min));
    }
    let y = &pts[0];
    let mut total = BigRational::zero();
    for facet in supporting_hyperplanes(n, pts) {
        let height = (&facet.offset - dot(&facet.normal, y)).abs();
        if height.is_zero() {
            continue; // cone over a facet through the apex is flat
        }
        let k = facet
            .normal
            .iter()
            .position(|a| !a.is_zero())
            .expect("nonzero normal");
        let projected: Vec<Vec<i64>> = facet
            .point_indices
            .iter()
            .map(|&i| {
                let p = &pts[i];
                (0..n).filter(|&j| j != k).map(|j| p[j]).collect()
            })
            .collect();
        let sub = vol_rec(n - 1, &projected);
        total += BigRational::new(height, facet.normal[k].abs()) * sub;
    }
    total / BigRational::from_integer(BigInt::from(n as i64))
}

struct Facet {
    normal: Vec<BigInt>,
    offset: BigInt,
    point_indices: Vec<usize>,
}

/// All supporting hyperplanes whose contact set has affine dimension `n-1`,
/// found by brute force over `n`-point subsets. The input must affinely
/// span `R^n`, so a supporting plane never contains every point.
fn supporting_hyperplanes(n: usize, pts: &[Vec<i64>]) -> Vec<Facet> {
    let m = pts.len();
    if m < n {
        return Vec::new();
    }
    let mut seen: BTreeSet<(Vec<BigInt>, BigInt)> = BTreeSet::new();
    let mut facets = Vec::new();
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        if let Some((normal, offset)) = hyperplane_through(n, pts, &subset) {
            if seen.insert((normal.clone(), offset.clone())) {
                if let Some(indices) = contact_set(pts, &normal, &offset) {
                    facets.push(Facet {
                        normal,
                        offset,
                        point_indices: indices,
                    });
                }
            }
        }
        // advance to the next n-combination of 0..m
        let mut i = n;
        loop {
            if i == 0 {
                return facets;
            }
            i -= 1;
            if subset[i] != i + m - n {
                subset[i] += 1;
                for j in i + 1..n {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Primitive hyperplane through the subset (sign canonicalized), or `None`
/// when the subset is affinely dependent.
fn hyperplane_through(
    n: usize,
    pts: &[Vec<i64>],
    subset: &[usize],
) -> Option<(Vec<BigInt>, BigInt)> {
    let base = &pts[subset[0]];
    // (n-1) x n difference matrix; the normal is its cofactor vector
    let diffs: Vec<Vec<BigInt>> = subset[1..]
        .iter()
        .map(|&i| (0..n).map(|j| BigInt::from(pts[i][j] - base[j])).collect())
        .collect();
    let mut normal = Vec::with_capacity(n);
    for drop_col in 0..n {
        let minor: Vec<BigInt> = diffs
            .iter()
            .flat_map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != drop_col)
                    .map(|(_, v)| v.clone())
            })
            .collect();
        let m = IntMatrix::new(n - 1, n - 1, minor).expect("square minor");
        let cof = m.det();
        normal.push(if drop_col % 2 == 0 { cof } else { -cof });
    }
    if normal.iter().all(|a| a.is_zero()) {
        return None;
    }
    let mut g = BigInt::zero();
    for a in &normal {
        g = num_integer::gcd(g, a.clone());
    }
    for a in &mut normal {
        *a /= &g;
    }
    if normal
        .iter()
        .find(|a| !a.is_zero())
        .map(|a| a.is_negative())
        .unwrap_or(false)
    {
        for a in &mut normal {
            *a = -a.clone();
        }
    }
    let offset = dot(&normal, base);
    Some((normal, offset))
}

/// Indices of points on the hyperplane if it supports the configuration
/// (all points weakly on one side); `None` when points lie strictly on both
/// sides. The heights used by the caller are taken in absolute value, so the
/// normal's sign does not matter here.
fn contact_set(pts: &[Vec<i64>], normal: &[BigInt], offset: &BigInt) -> Option<Vec<usize>> {
    let mut contact = Vec::new();
    let mut side = 0i32;
    for (i, p) in pts.iter().enumerate() {
        let s = dot(normal, p) - offset;
        if s.is_zero() {
            contact.push(i);
        } else {
            let this = if s.is_positive() { 1 } else { -1 };
            if side == 0 {
                side = this;
            } else if side != this {
                return None;
            }
        }
    }
    Some(contact)
}

fn dot(a: &[BigInt], x: &[i64]) -> BigInt {
    a.iter()
        .zip(x.iter())
        .map(|(ai, &xi)| ai * BigInt::from(xi))
        .sum()
}

/// Affine rank of the configuration: rank of the difference matrix.
fn affine_rank(n: usize, pts: &[Vec<i64>]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let base = &pts[0];
    let rows: Vec<Vec<i64>> = pts[1..]
        .iter()
        .map(|p| (0..n).map(|j| p[j] - base[j]).collect())
        .collect();
    let m = IntMatrix::from_rows_i64(&rows);
    let (h, _) = hermite_normal_form(&m);
    (0..h.rows())
        .filter(|&r| (0..h.cols()).any(|c| !h.get(r, c).is_zero()))
        .count()
}

/// The BKK number of `n` supports in `Z^n` via inclusion-exclusion:
/// `MV = Σ over nonempty S of (-1)^(n-|S|) Vol(Σ_{i in S} conv(A_i))`.
pub fn mixed_volume(configs: &[PointConfig]) -> Result<u64, PolytopeError> {
    let n = configs.len();
    if n == 0 || configs.iter().any(|c| c.dim() != n) {
        return Err(PolytopeError::WrongSupportCount {
            count: n,
            dim: configs.first().map_or(0, |c| c.dim()),
        });
    }
    if n > MAX_MIXED_DIM {
        return Err(PolytopeError::DimensionTooLarge {
            dim: n,
            max: MAX_MIXED_DIM,
        });
    }
    // hull each summand once so the Minkowski sums stay small
    let hulls: Vec<PointConfig> = configs
        .iter()
        .map(|c| {
            let hull = convex_hull(c)?;
            Ok(PointConfig {
                dim: n,
                points: hull.vertices,
            })
        })
        .collect::<Result<_, PolytopeError>>()?;

    let mut total = BigRational::zero();
    for mask in 1u32..(1 << n) {
        let mut sum: Option<PointConfig> = None;
        for (i, hull) in hulls.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum = Some(match sum {
                    None => hull.clone(),
                    Some(acc) => acc.minkowski_sum(hull),
                });
            }
        }
        let term = volume_of_config(&sum.expect("mask nonzero"))?;
        if (n - (mask.count_ones() as usize)).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    assert!(
        total.is_integer() && !total.is_negative(),
        "mixed volume of lattice polytopes must be a nonnegative integer, got {total}"
    );
    Ok(total
        .to_integer()
        .to_u64()
        .expect("mixed volume fits in u64 at desk scale"))
}

/// Exact membership test `p ∈ conv(points)` by phase-I simplex (Bland's
/// rule, big-rational arithmetic).
#[allow(clippy::needless_range_loop)] // tableau rows are indexed in pairs
fn in_convex_hull(p: &[i64], points: &[&Vec<i64>]) -> bool {
    let n = p.len();
    let m = points.len();
    if m == 0 {
        return false;
    }
    let rows = n + 1;
    let width = m + rows + 1; // lambda columns, artificial columns, rhs
    let rat = |v: i64| BigRational::from_integer(BigInt::from(v));

    let mut t: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); width]; rows];
    for i in 0..rows {
        let rhs = if i < n { p[i] } else { 1 };
        let negate = rhs < 0;
        for j in 0..m {
            let a = if i < n { points[j][i] } else { 1 };
            t[i][j] = rat(if negate { -a } else { a });
        }
        t[i][m + i] = BigRational::one();
        t[i][width - 1] = rat(rhs.abs());
    }
    let mut basis: Vec<usize> = (m..m + rows).collect();

    // reduced costs for minimizing the sum of artificials
    let mut obj = vec![BigRational::zero(); width];
    for (j, slot) in obj.iter_mut().enumerate() {
        let mut s = BigRational::zero();
        for row in t.iter() {
            s += row[j].clone();
        }
        let cost = if (m..m + rows).contains(&j) {
            BigRational::one()
        } else {
            BigRational::zero()
        };
        *slot = cost - s;
    }

    loop {
        let entering = (0..width - 1).find(|&j| obj[j].is_negative());
        let Some(enter) = entering else { break };
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for i in 0..rows {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(lv) = leave else {
            return false; // phase I is bounded; defensive exit
        };
        let pivot = t[lv][enter].clone();
        for j in 0..width {
            t[lv][j] = &t[lv][j] / &pivot;
        }
        for i in 0..rows {
            if i != lv && !t[i][enter].is_zero() {
                let f = t[i][enter].clone();
                for j in 0..width {
                    let sub = &f * &t[lv][j];
                    t[i][j] = &t[i][j] - sub;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for j in 0..width {
                let sub = &f * &t[lv][j];
                obj[j] = &obj[j] - sub;
            }
        }
        basis[lv] = enter;
    }

    let infeasibility: BigRational = (0..rows)
        .filter(|&i| basis[i] >= m)
        .map(|i| t[i][width - 1].clone())
        .sum();
    infeasibility.is_zero()
}
