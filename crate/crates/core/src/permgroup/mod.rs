//! Exact permutation arithmetic and permutation-group analysis.
//!
//! Permutations are 0-indexed throughout: a degree-`d` permutation stores the
//! images of `0..d`. Groups are given by generators; order and membership come
//! from a deterministic stabilizer chain ([`chain::StabChain`]). On top of
//! that sit cycle types, symmetric-group class densities, transitivity
//! levels, minimal block systems, the Jordan primality criterion and wreath
//! containment checks.

mod chain;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chain::StabChain;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("images of length {0} are not a bijection of 0..{0}")]
    NotAPermutation(usize),
    #[error("generator has degree {found}, expected {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("group is not transitive")]
    NotTransitive,
    #[error("blocks do not form a partition of 0..{0}")]
    MalformedPartition(usize),
    #[error("cycle type parts must be positive and weakly decreasing")]
    BadCycleType,
}

/// A permutation of `{0, .., d-1}`, stored as the list of images.
///
/// Wire format: a JSON array of images, e.g. `[1,0,3,2]`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({:?})", self.images)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = GroupError;
    fn try_from(images: Vec<usize>) -> Result<Self, GroupError> {
        Permutation::from_images(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.images
    }
}

impl Permutation {
    /// Validates that `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &x in &images {
            if x >= d || seen[x] {
                return Err(GroupError::NotAPermutation(d));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles; points not mentioned are fixed.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for w in 0..cycle.len() {
                let from = cycle[w];
                let to = cycle[(w + 1) % cycle.len()];
                if from >= degree || to >= degree {
                    return Err(GroupError::NotAPermutation(degree));
                }
                images[from] = to;
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Composition `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// Disjoint cycle decomposition; each cycle starts at its smallest point,
    /// fixed points included as singletons, cycles ordered by starting point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Raises to the `k`-th power by rotating each cycle `k mod len` steps.
    ///
    /// The exponent is reduced per cycle, so arbitrarily large exponents
    /// (element orders in large symmetric groups exceed `u64`) stay cheap.
    pub fn pow(&self, k: &BigUint) -> Permutation {
        let mut images = vec![0; self.degree()];
        for cycle in self.cycles() {
            let len = cycle.len();
            let shift = (k % BigUint::from(len))
                .try_into()
                .unwrap_or(0usize);
            for (i, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(i + shift) % len];
            }
        }
        Permutation { images }
    }

    /// Order of the element: lcm of its cycle lengths.
    pub fn element_order(&self) -> BigUint {
        let mut acc = BigUint::one();
        for cycle in self.cycles() {
            acc = num_integer::lcm(acc, BigUint::from(cycle.len()));
        }
        acc
    }

    /// Sign: `true` iff the permutation is even.
    pub fn is_even(&self) -> bool {
        let transpositions: usize = self
            .cycles()
            .iter()
            .map(|c| c.len() - 1)
            .sum();
        transpositions.is_multiple_of(2)
    }
}

/// A partition of the degree recording the multiset of cycle lengths,
/// sorted weakly decreasing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CycleType {
    parts: Vec<usize>,
}

impl fmt::Debug for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycleType{:?}", self.parts)
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

impl TryFrom<Vec<usize>> for CycleType {
    type Error = GroupError;
    fn try_from(parts: Vec<usize>) -> Result<Self, GroupError> {
        CycleType::new(parts)
    }
}

impl From<CycleType> for Vec<usize> {
    fn from(t: CycleType) -> Vec<usize> {
        t.parts
    }
}

impl CycleType {
    /// Accepts parts in any order; sorts them descending. Parts must be positive.
    pub fn new(mut parts: Vec<usize>) -> Result<Self, GroupError> {
        if parts.contains(&0) || parts.is_empty() {
            return Err(GroupError::BadCycleType);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn degree(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Parses a comma-separated part list such as `"2,2,1,1"`.
    pub fn parse(s: &str) -> Result<Self, GroupError> {
        let parts: Result<Vec<usize>, _> = s.split(',').map(|t| t.trim().parse()).collect();
        CycleType::new(parts.map_err(|_| GroupError::BadCycleType)?)
    }
}

/// Multiset of cycle lengths of `g`, descending.
pub fn cycle_type(g: &Permutation) -> CycleType {
    let parts: Vec<usize> = g.cycles().iter().map(|c| c.len()).collect();
    CycleType::new(parts).expect("cycles are nonempty")
}

/// Density `|class| / d!` of the conjugacy class of cycle type `lambda` in
/// the symmetric group: `1 / (∏ parts · ∏_j m_j!)` where `m_j` is the
/// multiplicity of part `j`.
pub fn class_density_symmetric(lambda: &CycleType) -> BigRational {
    let mut denom = BigUint::one();
    let mut run = 0usize;
    let mut prev = 0usize;
    for &p in lambda.parts() {
        denom *= BigUint::from(p);
        if p == prev {
            run += 1;
        } else {
            run = 1;
            prev = p;
        }
        denom *= BigUint::from(run); // accumulates m_j! one factor at a time
    }
    BigRational::new(One::one(), denom.into())
}

/// All partitions of `d`, parts descending, in descending lexicographic order.
pub fn partitions(d: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for next in (1..=remaining.min(max)).rev() {
            prefix.push(next);
            rec(remaining - next, next, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

/// A group given by generators, with its stabilizer-chain certificate.
#[derive(Debug, Clone)]
pub struct GeneratedGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: StabChain,
}

/// Builds the stabilizer chain for `gens` acting on `0..degree`.
pub fn generate_group(
    degree: usize,
    gens: Vec<Permutation>,
) -> Result<GeneratedGroup, GroupError> {
    for g in &gens {
        if g.degree() != degree {
            return Err(GroupError::DegreeMismatch {
                expected: degree,
                found: g.degree(),
            });
        }
    }
    let chain = StabChain::build(degree, &gens, &[]);
    Ok(GeneratedGroup {
        degree,
        generators: gens,
        chain,
    })
}

/// Outcome of the Jordan criterion on a transitive group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JordanVerdict {
    FullSymmetric,
    AtLeastAlternating,
    Inconclusive,
}

/// A partition of `{0..d-1}` into blocks of equal size, each block sorted,
/// blocks ordered by smallest element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockSystem {
    blocks: Vec<Vec<usize>>,
}

impl BlockSystem {
    /// Validates a partition of `0..degree` into equal-size parts and
    /// canonicalizes the ordering.
    pub fn new(mut blocks: Vec<Vec<usize>>, degree: usize) -> Result<Self, GroupError> {
        let mut seen = vec![false; degree];
        let mut count = 0usize;
        for b in &mut blocks {
            b.sort_unstable();
            for &x in b.iter() {
                if x >= degree || seen[x] {
                    return Err(GroupError::MalformedPartition(degree));
                }
                seen[x] = true;
                count += 1;
            }
        }
        if count != degree || blocks.is_empty() {
            return Err(GroupError::MalformedPartition(degree));
        }
        let size = blocks[0].len();
        if blocks.iter().any(|b| b.len() != size) {
            return Err(GroupError::MalformedPartition(degree));
        }
        blocks.sort();
        Ok(BlockSystem { blocks })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block index of each point.
    pub fn block_of(&self, degree: usize) -> Vec<usize> {
        let mut idx = vec![0; degree];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                idx[x] = b;
            }
        }
        idx
    }
}

impl GeneratedGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn chain(&self) -> &StabChain {
        &self.chain
    }

    /// Exact group order from the stabilizer chain.
    pub fn order(&self) -> BigUint {
        self.chain.order()
    }

    /// Membership test by sifting through the chain.
    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.chain.contains(g)
    }

    /// Orbit of a point under the generators, sorted.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        orbit_of(self.degree, &self.generators, point)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// Largest `s <= s_max` such that the group is transitive on distinct
    /// `s`-tuples; 0 if intransitive.
    ///
    /// Uses a chain with prescribed base `0,1,..`: the group is
    /// `s`-transitive iff the orbit of `i` under the stabilizer of
    /// `0..i-1` has size `d - i` for every `i < s`.
    pub fn transitivity_level(&self, s_max: usize) -> usize {
        let d = self.degree;
        let s_max = s_max.min(d);
        if d == 0 || s_max == 0 {
            return 0;
        }
        let base: Vec<usize> = (0..s_max).collect();
        let chain = StabChain::build(d, &self.generators, &base);
        let mut level = 0;
        for i in 0..s_max {
            if chain.orbit_len_at(i) == d - i {
                level = i + 1;
            } else {
                break;
            }
        }
        level
    }

    /// All minimal nontrivial block systems; empty iff the group is primitive.
    ///
    /// For each pair `{0, i}` the classical union-find merge computes the
    /// finest block system joining 0 and i; systems refined by another
    /// computed system are dropped so that only minimal ones remain.
    pub fn block_systems(&self) -> Result<Vec<BlockSystem>, GroupError> {
        if !self.is_transitive() {
            return Err(GroupError::NotTransitive);
        }
        let d = self.degree;
        let mut found: BTreeSet<BlockSystem> = BTreeSet::new();
        for i in 1..d {
            if let Some(system) = self.finest_system_joining(0, i) {
                found.insert(system);
            }
        }
        let all: Vec<BlockSystem> = found.into_iter().collect();
        // keep only systems with no strictly finer system in the list
        let minimal: Vec<BlockSystem> = all
            .iter()
            .filter(|b| {
                !all.iter()
                    .any(|other| *other != **b && refines(other, b, d))
            })
            .cloned()
            .collect();
        Ok(minimal)
    }

    /// Finest block system in which `a` and `b` share a block, or `None` if
    /// that forces a single block.
    fn finest_system_joining(&self, a: usize, b: usize) -> Option<BlockSystem> {
        let d = self.degree;
        let mut uf = UnionFind::new(d);
        let mut stack = vec![(a, b)];
        uf.union(a, b);
        while let Some((x, y)) = stack.pop() {
            for g in &self.generators {
                let (gx, gy) = (g.apply(x), g.apply(y));
                if uf.union(gx, gy) {
                    stack.push((gx, gy));
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![usize::MAX; d];
        for x in 0..d {
            let r = uf.find(x);
            if class_of[r] == usize::MAX {
                class_of[r] = classes.len();
                classes.push(Vec::new());
            }
            classes[class_of[r]].push(x);
        }
        if classes.len() <= 1 {
            return None;
        }
        Some(BlockSystem::new(classes, d).expect("union-find classes partition the points"))
    }

    /// Jordan criterion. Searches generators and 200 seeded random words for
    /// a d-cycle, a (d-1)-cycle, and a p-cycle with p prime, p < d-2.
    pub fn jordan_verdict(&self) -> Result<JordanVerdict, GroupError> {
        self.jordan_verdict_with(200, 0x6a6f_7264)
    }

    pub fn jordan_verdict_with(
        &self,
        random_draws: usize,
        seed: u64,
    ) -> Result<JordanVerdict, GroupError> {
        if !self.is_transitive() {
            return Err(GroupError::NotTransitive);
        }
        let d = self.degree;
        let order = self.order();
        let full = factorial(d);
        if order == full {
            return Ok(JordanVerdict::FullSymmetric);
        }
        if d >= 2 && order == &full / 2u32 {
            return Ok(JordanVerdict::AtLeastAlternating);
        }
        if self.generators.is_empty() {
            return Ok(JordanVerdict::Inconclusive);
        }

        let mut has_d_cycle = false;
        let mut has_dm1_cycle = false;
        let mut has_p_cycle = false;
        let mut check = |g: &Permutation| {
            let t = cycle_type(g);
            if t.parts() == [d] {
                has_d_cycle = true;
            }
            if d >= 2 && t.parts() == [d - 1, 1] {
                has_dm1_cycle = true;
            }
            if !has_p_cycle {
                has_p_cycle = jordan_p_cycle_from(g, d);
            }
        };

        for g in &self.generators {
            check(g);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..random_draws {
            let len = rand::Rng::gen_range(&mut rng, 2..=24);
            let mut w = Permutation::identity(d);
            for _ in 0..len {
                let pick = rand::Rng::gen_range(&mut rng, 0..self.generators.len());
                w = self.generators[pick].compose(&w);
            }
            check(&w);
        }

        if has_d_cycle && has_dm1_cycle && has_p_cycle {
            return Ok(JordanVerdict::FullSymmetric);
        }
        if has_p_cycle && self.block_systems()?.is_empty() {
            return Ok(JordanVerdict::AtLeastAlternating);
        }
        Ok(JordanVerdict::Inconclusive)
    }

    /// True iff every generator permutes the given blocks setwise.
    pub fn wreath_containment(&self, blocks: &BlockSystem) -> Result<bool, GroupError> {
        let d = self.degree;
        // re-validate against this group's degree
        let blocks = BlockSystem::new(blocks.blocks().to_vec(), d)?;
        let idx = blocks.block_of(d);
        for g in &self.generators {
            for block in blocks.blocks() {
                let target = idx[g.apply(block[0])];
                if block.iter().any(|&x| idx[g.apply(x)] != target) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Whether some power of `g` is a p-cycle for a prime `p < d - 2`.
fn jordan_p_cycle_from(g: &Permutation, d: usize) -> bool {
    if d < 4 {
        return false; // no prime p < d-2 exists
    }
    let order = g.element_order();
    let mut primes: Vec<usize> = g
        .cycles()
        .iter()
        .flat_map(|c| prime_factors(c.len()))
        .collect();
    primes.sort_unstable();
    primes.dedup();
    for p in primes {
        if p + 2 >= d {
            continue; // criterion requires p < d-2 strictly
        }
        let power = g.pow(&(&order / BigUint::from(p)));
        let t = cycle_type(&power);
        if t.parts().first() == Some(&p) && t.parts()[1..].iter().all(|&q| q == 1) {
            return true;
        }
    }
    false
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

fn orbit_of(degree: usize, gens: &[Permutation], point: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    seen[point] = true;
    let mut queue = vec![point];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                queue.push(y);
            }
        }
    }
    queue.sort_unstable();
    queue
}

/// True if every block of `finer` is contained in a block of `coarser`.
fn refines(finer: &BlockSystem, coarser: &BlockSystem, degree: usize) -> bool {
    if finer.block_size() >= coarser.block_size() {
        return false;
    }
    let idx = coarser.block_of(degree);
    finer
        .blocks()
        .iter()
        .all(|b| b.iter().all(|&x| idx[x] == idx[b[0]]))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns true if the classes were distinct and are now merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Sum of class densities over all partitions of `d`; used as an exactness check.
pub fn total_symmetric_density(d: usize) -> BigRational {
    partitions(d)
        .into_iter()
        .map(|parts| class_density_symmetric(&CycleType::new(parts).unwrap()))
        .fold(BigRational::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests;
