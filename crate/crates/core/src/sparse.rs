//! Support classification and recursive decomposition of sparse systems.
//!
//! A support system is lacunary when its exponent lattice is a proper
//! sublattice of `Z^n`, and triangular when a proper subset `I` of the
//! supports spans a rank-`|I|` lattice. Strict versions of either force the
//! family's Galois group to be imprimitive; when neither strict structure is
//! present the group is the full symmetric group, and a lacunary-but-not-
//! strict system has the finite unit group `Hom(Z^n / ZA, C^x)` acting
//! simply transitively. The decomposition tree peels strict structure
//! recursively; its leaves have none left.
//!
//! Conventions fixed here:
//! * every support is translated so its first point is the origin before
//!   lattice work (translations never change mixed volumes or verdicts);
//! * when a system is both strictly lacunary and strictly triangular, the
//!   lacunary step is taken first;
//! * triangular witnesses are ordered by size then lexicographically, and
//!   the tree always splits on the first strict witness in that order.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlattice::{
    self, difference_matrix, hermite_normal_form, IntMatrix, LatticeIndex, LatticeSummary,
};
use crate::permgroup::factorial;
use crate::polytope::{self, PointConfig, PolytopeError, MAX_MIXED_DIM};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SparseError {
    #[error("a square system needs exactly n supports in Z^n, got {count} in Z^{dim}")]
    NotSquare { count: usize, dim: usize },
    #[error("support analysis is bounded to n <= {max}, got n = {n}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("system is not lacunary (exponent lattice index is 1)")]
    NotLacunary,
    #[error("exponent lattice is rank-deficient; mixed volume is 0")]
    RankDeficient,
    #[error("index set {0:?} is not a triangular witness")]
    NotAWitness(Vec<usize>),
    #[error("mixed volume is 0; the family is not a branched cover")]
    MixedVolumeZero,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Lattice(#[from] intlattice::LatticeError),
}

/// `n` exponent-vector supports in `Z^n`: the combinatorial data of a square
/// sparse family.
///
/// Wire format: `{"n":2,"supports":[[[0,0],[2,0],..],[..]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SupportSystemWire", into = "SupportSystemWire")]
pub struct SupportSystem {
    n: usize,
    supports: Vec<PointConfig>,
}

#[derive(Serialize, Deserialize)]
struct SupportSystemWire {
    n: usize,
    supports: Vec<Vec<Vec<i64>>>,
}

impl TryFrom<SupportSystemWire> for SupportSystem {
    type Error = String;
    fn try_from(w: SupportSystemWire) -> Result<Self, String> {
        let supports = w
            .supports
            .into_iter()
            .map(|pts| PointConfig::new(w.n, pts))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        SupportSystem::new(w.n, supports).map_err(|e| e.to_string())
    }
}

impl From<SupportSystem> for SupportSystemWire {
    fn from(s: SupportSystem) -> SupportSystemWire {
        SupportSystemWire {
            n: s.n,
            supports: s
                .supports
                .iter()
                .map(|c| c.points().to_vec())
                .collect(),
        }
    }
}

impl SupportSystem {
    pub fn new(n: usize, supports: Vec<PointConfig>) -> Result<Self, SparseError> {
        if supports.len() != n || supports.iter().any(|s| s.dim() != n) || n == 0 {
            return Err(SparseError::NotSquare {
                count: supports.len(),
                dim: supports.first().map_or(0, |s| s.dim()),
            });
        }
        Ok(SupportSystem { n, supports })
    }

    /// Convenience constructor from raw exponent vectors.
    pub fn from_points(supports: Vec<Vec<Vec<i64>>>) -> Result<Self, SparseError> {
        let n = supports.len();
        let configs = supports
            .into_iter()
            .map(|pts| PointConfig::new(n, pts))
            .collect::<Result<Vec<_>, _>>()?;
        SupportSystem::new(n, configs)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_supports(&self) -> usize {
        self.supports.len()
    }

    pub fn support(&self, i: usize) -> &PointConfig {
        &self.supports[i]
    }

    pub fn supports(&self) -> &[PointConfig] {
        &self.supports
    }

    /// Each support translated so its first point is the origin.
    pub fn normalized(&self) -> SupportSystem {
        SupportSystem {
            n: self.n,
            supports: self
                .supports
                .iter()
                .map(|s| s.translated_to_origin())
                .collect(),
        }
    }

    pub fn mixed_volume(&self) -> Result<u64, SparseError> {
        Ok(polytope::mixed_volume(&self.supports)?)
    }

    /// Lattice summary of `ZA_I` for a subset of supports, or of the whole
    /// system when `indices` covers everything.
    pub fn support_lattice(&self, indices: &[usize]) -> Result<LatticeSummary, SparseError> {
        Ok(intlattice::support_lattice(self, indices)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    MVZero,
    FullSymmetric,
    ImprimitiveLacunary,
    ImprimitiveTriangular,
    RootsOfUnity,
}

/// Structural classification of a support system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub mv: u64,
    pub lattice: LatticeSummary,
    pub lacunary: bool,
    pub strictly_lacunary: bool,
    /// Proper nonempty subsets `I` with `rank(ZA_I) = |I|`, ordered by size
    /// then lexicographically.
    pub triangular_witnesses: Vec<Vec<usize>>,
    /// Witnesses whose head mixed volume lies strictly between 1 and `mv`.
    pub strict_witnesses: Vec<Vec<usize>>,
    pub strictly_triangular: bool,
    pub verdict: Verdict,
}

/// Classifies the system per the support dichotomy: computes the mixed
/// volume, the exponent-lattice index, all triangular witnesses, and the
/// resulting verdict.
pub fn classify(system: &SupportSystem) -> Result<Classification, SparseError> {
    let n = system.dim();
    if n > MAX_MIXED_DIM {
        return Err(SparseError::DimensionTooLarge {
            n,
            max: MAX_MIXED_DIM,
        });
    }
    let system = system.normalized();
    let mv = system.mixed_volume()?;
    let all: Vec<usize> = (0..n).collect();
    let lattice = system.support_lattice(&all)?;
    let lacunary = !lattice.index.is_one();
    let strictly_lacunary = match lattice.index.finite() {
        Some(index) => lacunary && BigUint::from(mv) > *index,
        None => false, // rank-deficient: mv = 0
    };

    let mut witnesses = Vec::new();
    for subset in proper_nonempty_subsets(n) {
        let summary = system.support_lattice(&subset)?;
        if summary.rank == subset.len() {
            witnesses.push(subset);
        }
    }

    let mut strict_witnesses = Vec::new();
    if mv > 0 {
        for w in &witnesses {
            let head_mv = triangular_transform(&system, w)?.head_mv;
            if 1 < head_mv && head_mv < mv {
                strict_witnesses.push(w.clone());
            }
        }
    }
    let strictly_triangular = !strict_witnesses.is_empty();

    let verdict = if mv == 0 {
        Verdict::MVZero
    } else if strictly_lacunary {
        Verdict::ImprimitiveLacunary
    } else if lacunary {
        // mv equals the index: the group is Hom(Z^n/ZA, C^x) of that order
        Verdict::RootsOfUnity
    } else if strictly_triangular {
        Verdict::ImprimitiveTriangular
    } else {
        Verdict::FullSymmetric
    };

    Ok(Classification {
        mv,
        lattice,
        lacunary,
        strictly_lacunary,
        triangular_witnesses: witnesses,
        strict_witnesses,
        strictly_triangular,
        verdict,
    })
}

/// Proper nonempty subsets of `{0..n-1}`, ordered by cardinality then
/// lexicographically (the witness tie-break order).
fn proper_nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << n) - 1)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    subsets
}

/// Result of factoring out the exponent lattice of a lacunary system:
/// systems supported on `A` are compositions `G(phi(x))` where `phi` is the
/// monomial map with exponent matrix `monomial_map` and `G` is supported on
/// `reduced` (which has lattice index 1).
#[derive(Debug, Clone)]
pub struct LacunarySplit {
    pub reduced: SupportSystem,
    /// Row `i` is the exponent vector of the `i`-th coordinate of `phi`.
    pub monomial_map: IntMatrix,
    /// Nontrivial invariant factors of `Z^n / ZA`; their product is the
    /// lattice index, the order of the deck group of roots of unity.
    pub quotient_invariant_factors: Vec<BigUint>,
    pub index: BigUint,
}

/// Rewrites a lacunary system over a basis of its own exponent lattice.
/// Requires finite index > 1; verifies `MV(A) = index * MV(B)`.
pub fn lacunary_transform(system: &SupportSystem) -> Result<LacunarySplit, SparseError> {
    let n = system.dim();
    let system = system.normalized();
    let all: Vec<usize> = (0..n).collect();
    let summary = system.support_lattice(&all)?;
    let index = match &summary.index {
        LatticeIndex::Infinite => return Err(SparseError::RankDeficient),
        LatticeIndex::Finite(i) if i.is_one() => return Err(SparseError::NotLacunary),
        LatticeIndex::Finite(i) => i.clone(),
    };

    // basis of ZA as the nonzero rows of the row-style HNF: upper triangular
    // with positive diagonal since the rank is full
    let diffs = difference_matrix(&system, &all);
    let (h, _) = hermite_normal_form(&diffs);
    let mut basis = IntMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            basis.set(r, c, h.get(r, c).clone());
        }
    }

    let reduced_supports: Vec<PointConfig> = system
        .supports()
        .iter()
        .map(|s| {
            let pts: Vec<Vec<i64>> = s
                .points()
                .iter()
                .map(|p| solve_against_upper_basis(&basis, p))
                .collect();
            PointConfig::new(n, pts).expect("preimage points stay in Z^n")
        })
        .collect();
    let reduced = SupportSystem::new(n, reduced_supports)?;

    let mv = system.mixed_volume()?;
    let reduced_mv = reduced.mixed_volume()?;
    assert_eq!(
        BigUint::from(mv),
        &index * BigUint::from(reduced_mv),
        "lattice index must divide the mixed volume multiplicatively"
    );

    let factors = summary
        .invariant_factors
        .iter()
        .filter(|f| !f.is_one())
        .cloned()
        .collect();
    Ok(LacunarySplit {
        reduced,
        monomial_map: basis,
        quotient_invariant_factors: factors,
        index,
    })
}

/// Solves `beta * L = alpha` for an upper-triangular invertible `L` by
/// forward substitution; panics if `alpha` is outside the row lattice, which
/// cannot happen for translated support points.
fn solve_against_upper_basis(l: &IntMatrix, alpha: &[i64]) -> Vec<i64> {
    let n = alpha.len();
    let mut beta = vec![num_bigint::BigInt::zero(); n];
    for j in 0..n {
        let mut acc = num_bigint::BigInt::from(alpha[j]);
        for (i, b) in beta.iter().enumerate().take(j) {
            acc -= b * l.get(i, j);
        }
        let (q, r) = num_integer::Integer::div_rem(&acc, l.get(j, j));
        assert!(r.is_zero(), "support point not in exponent lattice");
        beta[j] = q;
    }
    beta.iter()
        .map(|b| b.to_i64().expect("reduced exponents fit i64"))
        .collect()
}

/// Result of splitting on a triangular witness `I`: after the unimodular
/// change of coordinates, the supports in `I` live in the first `|I|`
/// coordinates (the `head` system) and the rest project onto the last
/// coordinates (the `tail` system), with `MV(A) = MV(head) * MV(tail)`.
#[derive(Debug, Clone)]
pub struct TriangularSplit {
    pub head: SupportSystem,
    pub tail: SupportSystem,
    /// Unimodular matrix acting on exponent row vectors from the right.
    pub coordinate_change: IntMatrix,
    pub head_mv: u64,
    pub tail_mv: u64,
}

pub fn triangular_transform(
    system: &SupportSystem,
    witness: &[usize],
) -> Result<TriangularSplit, SparseError> {
    let n = system.dim();
    let mut indices = witness.to_vec();
    indices.sort_unstable();
    indices.dedup();
    let m = indices.len();
    if m == 0 || m >= n || indices.iter().any(|&i| i >= n) {
        return Err(SparseError::NotAWitness(witness.to_vec()));
    }
    let system = system.normalized();
    let summary = system.support_lattice(&indices)?;
    if summary.rank != m {
        return Err(SparseError::NotAWitness(witness.to_vec()));
    }

    // HNF of the transposed difference matrix gives the unimodular right
    // factor: rows of D * U' have support in the first m coordinates.
    let diffs = difference_matrix(&system, &indices);
    let (_, u) = hermite_normal_form(&diffs.transpose());
    let change = u.transpose();

    let transform = |s: &PointConfig| -> Vec<Vec<i64>> {
        s.points()
            .iter()
            .map(|p| {
                (0..n)
                    .map(|c| {
                        let mut acc = num_bigint::BigInt::zero();
                        for (k, &coord) in p.iter().enumerate() {
                            acc += num_bigint::BigInt::from(coord) * change.get(k, c);
                        }
                        acc.to_i64().expect("transformed exponents fit i64")
                    })
                    .collect()
            })
            .collect()
    };

    let mut head_supports = Vec::new();
    for &i in &indices {
        let pts = transform(system.support(i));
        let truncated: Vec<Vec<i64>> = pts
            .iter()
            .map(|p| {
                assert!(
                    p[m..].iter().all(|&c| c == 0),
                    "witness supports must land in the first coordinates"
                );
                p[..m].to_vec()
            })
            .collect();
        head_supports.push(PointConfig::new(m, truncated).expect("nonempty"));
    }
    let head = SupportSystem::new(m, head_supports)?;

    let mut tail_supports = Vec::new();
    for i in 0..n {
        if indices.contains(&i) {
            continue;
        }
        let pts = transform(system.support(i));
        let projected: Vec<Vec<i64>> = pts.iter().map(|p| p[m..].to_vec()).collect();
        tail_supports.push(PointConfig::new(n - m, projected).expect("nonempty"));
    }
    let tail = SupportSystem::new(n - m, tail_supports)?;

    let head_mv = head.mixed_volume()?;
    let tail_mv = tail.mixed_volume()?;
    let total = system.mixed_volume()?;
    assert_eq!(
        head_mv * tail_mv,
        total,
        "mixed volume must factor across a triangular split"
    );

    Ok(TriangularSplit {
        head,
        tail,
        coordinate_change: change,
        head_mv,
        tail_mv,
    })
}

use crate::intlattice::biguint_strings as biguint_vec;

/// Recursive record of the strict lacunary/triangular factorizations of a
/// family. Leaves carry systems with no strict structure left.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecompositionTree {
    #[serde(rename = "lacunary")]
    LacunaryStep {
        #[serde(with = "biguint_vec")]
        invariant_factors: Vec<BigUint>,
        monomial_map: IntMatrix,
        child: Box<DecompositionTree>,
    },
    #[serde(rename = "triangular")]
    TriangularStep {
        witness: Vec<usize>,
        coordinate_change: IntMatrix,
        head: Box<DecompositionTree>,
        tail: Box<DecompositionTree>,
    },
    Leaf {
        mv: u64,
    },
}

impl DecompositionTree {
    /// Product over leaves of their mixed volumes times the product of
    /// lacunary indices; always equals the mixed volume of the root system.
    pub fn degree(&self) -> BigUint {
        match self {
            DecompositionTree::LacunaryStep {
                invariant_factors,
                child,
                ..
            } => {
                let index: BigUint = invariant_factors.iter().product();
                index * child.degree()
            }
            DecompositionTree::TriangularStep { head, tail, .. } => {
                head.degree() * tail.degree()
            }
            DecompositionTree::Leaf { mv } => BigUint::from(*mv),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            DecompositionTree::LacunaryStep { child, .. } => child.leaf_count(),
            DecompositionTree::TriangularStep { head, tail, .. } => {
                head.leaf_count() + tail.leaf_count()
            }
            DecompositionTree::Leaf { .. } => 1,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, DecompositionTree::Leaf { .. })
    }
}

/// Recursively decomposes the family: lacunary steps are taken first, then
/// the first strict triangular witness, until no strict structure remains.
pub fn decomposition_tree(system: &SupportSystem) -> Result<DecompositionTree, SparseError> {
    let classification = classify(system)?;
    if classification.mv == 0 {
        return Err(SparseError::MixedVolumeZero);
    }
    build_tree(system, &classification)
}

fn build_tree(
    system: &SupportSystem,
    classification: &Classification,
) -> Result<DecompositionTree, SparseError> {
    if classification.strictly_lacunary {
        let split = lacunary_transform(system)?;
        let child_class = classify(&split.reduced)?;
        let child = build_tree(&split.reduced, &child_class)?;
        return Ok(DecompositionTree::LacunaryStep {
            invariant_factors: split.quotient_invariant_factors,
            monomial_map: split.monomial_map,
            child: Box::new(child),
        });
    }
    if classification.verdict != Verdict::RootsOfUnity && classification.strictly_triangular {
        let witness = classification.strict_witnesses[0].clone();
        let split = triangular_transform(system, &witness)?;
        let head_class = classify(&split.head)?;
        let tail_class = classify(&split.tail)?;
        let head = build_tree(&split.head, &head_class)?;
        let tail = build_tree(&split.tail, &tail_class)?;
        return Ok(DecompositionTree::TriangularStep {
            witness,
            coordinate_change: split.coordinate_change,
            head: Box::new(head),
            tail: Box::new(tail),
        });
    }
    Ok(DecompositionTree::Leaf {
        mv: classification.mv,
    })
}

/// Iterated wreath-product upper bound on the Galois group read off a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundExpr {
    /// Full symmetric group on `m` points.
    Symmetric(u64),
    /// `inner ≀ outer`: the outer group permutes copies of the inner one.
    Wreath(Box<BoundExpr>, Box<BoundExpr>),
}

impl BoundExpr {
    pub fn degree(&self) -> u64 {
        match self {
            BoundExpr::Symmetric(m) => *m,
            BoundExpr::Wreath(inner, outer) => inner.degree() * outer.degree(),
        }
    }

    pub fn order(&self) -> BigUint {
        match self {
            BoundExpr::Symmetric(m) => factorial(*m as usize),
            BoundExpr::Wreath(inner, outer) => {
                inner.order().pow(outer.degree() as u32) * outer.order()
            }
        }
    }
}

impl std::fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundExpr::Symmetric(m) => write!(f, "S{m}"),
            BoundExpr::Wreath(inner, outer) => {
                match inner.as_ref() {
                    BoundExpr::Symmetric(_) => write!(f, "{inner}")?,
                    _ => write!(f, "({inner})")?,
                }
                write!(f, " wr ")?;
                match outer.as_ref() {
                    BoundExpr::Symmetric(_) => write!(f, "{outer}"),
                    _ => write!(f, "({outer})"),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisBound {
    pub expr: BoundExpr,
    pub order: BigUint,
    pub degree: u64,
}

/// Upper bound on the Galois group of the family from the structure of its
/// decomposition tree: a leaf of size `m` contributes `S_m`; a lacunary step
/// of index `q` wraps the child in `S_q ≀ (child)`; a triangular step gives
/// `(tail) ≀ (head)` since the fibers over head solutions are blocks.
pub fn galois_bound(tree: &DecompositionTree) -> GaloisBound {
    let expr = bound_expr(tree);
    GaloisBound {
        order: expr.order(),
        degree: expr.degree(),
        expr,
    }
}

fn bound_expr(tree: &DecompositionTree) -> BoundExpr {
    match tree {
        DecompositionTree::Leaf { mv } => BoundExpr::Symmetric(*mv),
        DecompositionTree::LacunaryStep {
            invariant_factors,
            child,
            ..
        } => {
            let index: BigUint = invariant_factors.iter().product();
            let q = index.to_u64().expect("lattice index fits u64 at desk scale");
            BoundExpr::Wreath(
                Box::new(BoundExpr::Symmetric(q)),
                Box::new(bound_expr(child)),
            )
        }
        DecompositionTree::TriangularStep { head, tail, .. } => {
            BoundExpr::Wreath(Box::new(bound_expr(tail)), Box::new(bound_expr(head)))
        }
    }
}
