//! Exact integer-matrix normal forms and lattice summaries.
//!
//! Everything here runs over arbitrary-precision integers: Hermite and Smith
//! normal forms with their unimodular transforms, and rank / invariant-factor
//! summaries of the lattices spanned by support differences. Intermediate
//! entries in these eliminations can grow well past machine words, so no
//! fixed-width arithmetic is used anywhere.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sparse::SupportSystem;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("index set must be a nonempty set of support indices < {0}")]
    BadIndexSet(usize),
}

/// Dense row-major matrix over `BigInt`.
///
/// Wire format: array of rows, each entry a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<String>>", into = "Vec<Vec<String>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl TryFrom<Vec<Vec<String>>> for IntMatrix {
    type Error = String;
    fn try_from(rows: Vec<Vec<String>>) -> Result<Self, String> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err("ragged matrix".into());
            }
            for s in row {
                entries.push(s.parse().map_err(|_| format!("bad integer {s:?}"))?);
            }
        }
        IntMatrix::new(r, c, entries).map_err(|e| e.to_string())
    }
}

impl From<IntMatrix> for Vec<Vec<String>> {
    fn from(m: IntMatrix) -> Vec<Vec<String>> {
        (0..m.rows)
            .map(|r| (0..m.cols).map(|c| m.get(r, c).to_string()).collect())
            .collect()
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LatticeError> {
        if entries.len() != rows * cols {
            return Err(LatticeError::BadShape {
                rows,
                cols,
                len: entries.len(),
            });
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| BigInt::from(x)))
            .collect();
        IntMatrix::new(r, c, entries).expect("consistent row lengths")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let add = a * other.get(k, c);
                    let cur = out.get(r, c) + add;
                    out.set(r, c, cur);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c).clone()).collect())
            .collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev; // exact in Bareiss elimination
                }
            }
            prev = a[k][k].clone();
        }
        let last = a[n - 1][n - 1].clone();
        if sign < 0 {
            -last
        } else {
            last
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let add = q * self.get(src, c);
            let v = self.get(dst, c) + add;
            self.set(dst, c, v);
        }
    }

    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let add = q * self.get(r, src);
            let v = self.get(r, dst) + add;
            self.set(r, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `H = U * M`, `U`
/// unimodular, pivots positive, entries above each pivot reduced into
/// `[0, pivot)`, zero rows at the bottom.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivot_row = 0usize;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        // euclidean elimination below the pivot
        loop {
            let best = (pivot_row..rows)
                .filter(|&r| !h.get(r, col).is_zero())
                .min_by_key(|&r| h.get(r, col).abs());
            let Some(best) = best else { break };
            h.swap_rows(pivot_row, best);
            u.swap_rows(pivot_row, best);
            let mut clean = true;
            for r in pivot_row + 1..rows {
                if h.get(r, col).is_zero() {
                    continue;
                }
                let q = h.get(r, col).div_floor(h.get(pivot_row, col));
                h.add_row_multiple(r, pivot_row, &(-&q));
                u.add_row_multiple(r, pivot_row, &(-q));
                if !h.get(r, col).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.get(pivot_row, col).is_zero() {
            continue;
        }
        if h.get(pivot_row, col).is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        for r in 0..pivot_row {
            let q = h.get(r, col).div_floor(h.get(pivot_row, col));
            h.add_row_multiple(r, pivot_row, &(-&q));
            u.add_row_multiple(r, pivot_row, &(-q));
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(S, U, V)` with `S = U * M * V` diagonal,
/// diagonal entries nonnegative with `s_i | s_{i+1}`, and `U`, `V` unimodular.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut v = IntMatrix::identity(m.cols());
    let (rows, cols) = (m.rows(), m.cols());
    let limit = rows.min(cols);

    for t in 0..limit {
        'pivot: loop {
            // smallest nonzero entry of the trailing submatrix into (t, t)
            let mut best: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    if !s.get(r, c).is_zero()
                        && best
                            .map(|(br, bc)| s.get(r, c).abs() < s.get(br, bc).abs())
                            .unwrap_or(true)
                    {
                        best = Some((r, c));
                    }
                }
            }
            let Some((br, bc)) = best else { break 'pivot };
            s.swap_rows(t, br);
            u.swap_rows(t, br);
            s.swap_cols(t, bc);
            v.swap_cols(t, bc);

            let mut clean = true;
            for r in t + 1..rows {
                if s.get(r, t).is_zero() {
                    continue;
                }
                let q = s.get(r, t).div_floor(s.get(t, t));
                s.add_row_multiple(r, t, &(-&q));
                u.add_row_multiple(r, t, &(-q));
                if !s.get(r, t).is_zero() {
                    clean = false;
                }
            }
            for c in t + 1..cols {
                if s.get(t, c).is_zero() {
                    continue;
                }
                let q = s.get(t, c).div_floor(s.get(t, t));
                s.add_col_multiple(c, t, &(-&q));
                v.add_col_multiple(c, t, &(-q));
                if !s.get(t, c).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue 'pivot; // remainders are smaller; re-pick the pivot
            }
            // pivot must divide the trailing submatrix
            for r in t + 1..rows {
                for c in t + 1..cols {
                    if !(s.get(r, c) % s.get(t, t)).is_zero() {
                        s.add_row_multiple(t, r, &BigInt::one());
                        u.add_row_multiple(t, r, &BigInt::one());
                        continue 'pivot;
                    }
                }
            }
            break 'pivot;
        }
    }
    for t in 0..limit {
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    (s, u, v)
}

/// Whether the lattice has full rank in its ambient space; if so the index
/// is the product of the invariant factors.
///
/// Serializes as a decimal string, or `"inf"` when the rank is deficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LatticeIndex {
    Finite(BigUint),
    Infinite,
}

impl TryFrom<String> for LatticeIndex {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        if s == "inf" {
            return Ok(LatticeIndex::Infinite);
        }
        s.parse()
            .map(LatticeIndex::Finite)
            .map_err(|_| format!("bad lattice index {s:?}"))
    }
}

impl From<LatticeIndex> for String {
    fn from(i: LatticeIndex) -> String {
        match i {
            LatticeIndex::Finite(v) => v.to_string(),
            LatticeIndex::Infinite => "inf".into(),
        }
    }
}

impl LatticeIndex {
    pub fn is_one(&self) -> bool {
        matches!(self, LatticeIndex::Finite(i) if i.is_one())
    }

    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            LatticeIndex::Finite(i) => Some(i),
            LatticeIndex::Infinite => None,
        }
    }
}

/// Rank, invariant factors `s_1 | s_2 | ..`, and index of a sublattice of
/// `Z^ambient`. Factors serialize as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSummary {
    pub rank: usize,
    #[serde(with = "biguint_strings")]
    pub invariant_factors: Vec<BigUint>,
    pub index: LatticeIndex,
}

pub mod biguint_strings {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<BigUint>, D::Error> {
        let strings = Vec::<String>::deserialize(de)?;
        strings
            .into_iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Summary of the lattice spanned by the rows of `m` inside `Z^cols`.
pub fn row_lattice_summary(m: &IntMatrix) -> LatticeSummary {
    let (s, _, _) = smith_normal_form(m);
    let mut factors = Vec::new();
    for t in 0..m.rows().min(m.cols()) {
        let d = s.get(t, t);
        if d.is_zero() {
            break;
        }
        factors.push(d.to_biguint().expect("diagonal normalized nonnegative"));
    }
    let rank = factors.len();
    let index = if rank == m.cols() {
        LatticeIndex::Finite(factors.iter().product())
    } else {
        LatticeIndex::Infinite
    };
    LatticeSummary {
        rank,
        invariant_factors: factors,
        index,
    }
}

/// Lattice generated by all within-support differences of the supports
/// indexed by `indices` (the affine span of each `A_i`, summed over the
/// chosen `i`). Differences across distinct supports are not generators.
pub fn support_lattice(
    system: &SupportSystem,
    indices: &[usize],
) -> Result<LatticeSummary, LatticeError> {
    if indices.is_empty() || indices.iter().any(|&i| i >= system.num_supports()) {
        return Err(LatticeError::BadIndexSet(system.num_supports()));
    }
    Ok(row_lattice_summary(&difference_matrix(system, indices)))
}

/// Rows are the differences of each selected support from its first point;
/// those generate the same lattice as all within-support differences.
pub fn difference_matrix(system: &SupportSystem, indices: &[usize]) -> IntMatrix {
    let n = system.dim();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for &i in indices {
        let pts = system.support(i).points();
        let base = &pts[0];
        for p in &pts[1..] {
            rows.push((0..n).map(|j| p[j] - base[j]).collect());
        }
    }
    if rows.is_empty() {
        return IntMatrix::zeros(0, n);
    }
    IntMatrix::from_rows_i64(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::PointConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows_i64(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn assert_unimodular(u: &IntMatrix) {
        let det = u.det();
        assert!(
            det == BigInt::one() || det == -BigInt::one(),
            "determinant {det} is not a unit"
        );
    }

    #[test]
    fn hnf_of_index_two_lattice() {
        let m = mat(&[&[2, 0], &[0, 2], &[1, 1]]);
        let (h, u) = hermite_normal_form(&m);
        assert_unimodular(&u);
        assert_eq!(u.mul(&m), h);
        // nonzero rows span a lattice of index 2 in Z^2
        assert_eq!(h, mat(&[&[1, 1], &[0, 2], &[0, 0]]));
    }

    #[test]
    fn hnf_of_identity_and_scalar() {
        let id = IntMatrix::identity(3);
        let (h, u) = hermite_normal_form(&id);
        assert_eq!(h, id);
        assert_eq!(u, id);

        let m = mat(&[&[4]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, mat(&[&[4]]));
        assert_eq!(u, IntMatrix::identity(1));
    }

    #[test]
    fn snf_of_column_generators() {
        // columns (2,0), (0,2), (1,1)
        let m = mat(&[&[2, 0, 1], &[0, 2, 1]]);
        let (s, u, v) = smith_normal_form(&m);
        assert_unimodular(&u);
        assert_unimodular(&v);
        assert_eq!(u.mul(&m).mul(&v), s);
        assert_eq!(s.get(0, 0), &BigInt::from(1));
        assert_eq!(s.get(1, 1), &BigInt::from(2));
    }

    #[test]
    fn snf_of_single_and_zero() {
        let (s, _, _) = smith_normal_form(&mat(&[&[3]]));
        assert_eq!(s.get(0, 0), &BigInt::from(3));

        let z = IntMatrix::zeros(2, 3);
        let (s, _, _) = smith_normal_form(&z);
        assert_eq!(s, z);
        assert_eq!(row_lattice_summary(&z).rank, 0);
    }

    fn system(supports: Vec<Vec<Vec<i64>>>) -> SupportSystem {
        let n = supports[0][0].len();
        SupportSystem::new(
            n,
            supports
                .into_iter()
                .map(|pts| PointConfig::new(n, pts).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn support_lattice_of_square_plus_center() {
        let sq = vec![
            vec![0, 0],
            vec![2, 0],
            vec![0, 2],
            vec![2, 2],
            vec![1, 1],
        ];
        let sys = system(vec![sq.clone(), sq]);
        let summary = support_lattice(&sys, &[0, 1]).unwrap();
        assert_eq!(summary.rank, 2);
        assert_eq!(summary.index, LatticeIndex::Finite(BigUint::from(2u32)));
    }

    #[test]
    fn support_lattice_of_cubed_variable() {
        let sys = system(vec![vec![vec![0], vec![3], vec![6]]]);
        let summary = support_lattice(&sys, &[0]).unwrap();
        assert_eq!(summary.rank, 1);
        assert_eq!(summary.index, LatticeIndex::Finite(BigUint::from(3u32)));
    }

    #[test]
    fn support_lattice_of_singleton() {
        let sys = system(vec![vec![vec![5, 7]], vec![vec![0, 0], vec![1, 0]]]);
        let summary = support_lattice(&sys, &[0]).unwrap();
        assert_eq!(summary.rank, 0);
        assert_eq!(summary.index, LatticeIndex::Infinite);
        assert!(support_lattice(&sys, &[]).is_err());
    }

    #[test]
    fn diagonal_lattice_index_is_product() {
        for (d, e) in [(2i64, 3i64), (4, 6), (1, 5)] {
            let m = mat(&[&[d, 0], &[0, e]]);
            let summary = row_lattice_summary(&m);
            assert_eq!(
                summary.index,
                LatticeIndex::Finite(BigUint::from((d * e) as u64))
            );
        }
    }

    fn rand_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> IntMatrix {
        let rows: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        IntMatrix::from_rows_i64(&rows)
    }

    #[test]
    fn normal_form_transforms_are_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..40 {
            let r = rng.gen_range(1..=5);
            let c = rng.gen_range(1..=5);
            let m = rand_matrix(&mut rng, r, c);
            let (h, u) = hermite_normal_form(&m);
            assert_unimodular(&u);
            assert_eq!(u.mul(&m), h);
            let (s, u, v) = smith_normal_form(&m);
            assert_unimodular(&u);
            assert_unimodular(&v);
            assert_eq!(u.mul(&m).mul(&v), s);
            // divisibility chain
            let lim = r.min(c);
            for t in 1..lim {
                let (a, b) = (s.get(t - 1, t - 1), s.get(t, t));
                if !b.is_zero() {
                    assert!(!a.is_zero() && (b % a).is_zero(), "chain broken in {s:?}");
                }
            }
        }
    }

    #[test]
    fn snf_factors_invariant_under_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let r = rng.gen_range(2..=4);
            let c = rng.gen_range(2..=4);
            let m = rand_matrix(&mut rng, r, c);
            let base = row_lattice_summary(&m).invariant_factors;

            let mut pm = m.clone();
            pm.swap_rows(0, r - 1);
            pm.swap_cols(0, c - 1);
            assert_eq!(row_lattice_summary(&pm).invariant_factors, base);
        }
    }

    #[test]
    fn json_round_trip_uses_decimal_strings() {
        let m = mat(&[&[1, -2], &[30, 4]]);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"[["1","-2"],["30","4"]]"#);
        let back: IntMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
