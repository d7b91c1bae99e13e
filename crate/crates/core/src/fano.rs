//! Feasibility and degrees of Fano problems.
//!
//! A problem `(r, n, d_list)` asks for the `r`-planes on a generic complete
//! intersection of the given degrees in projective `n`-space. It is finite
//! exactly when the expected dimension `delta` vanishes and `n - s >= 2r`;
//! its degree is then the coefficient of `x_0^n x_1^(n-1) .. x_r^(n-r)` in
//! the product of the `Q_{r,d}` polynomials with the Vandermonde determinant.
//! Everything is exact big-integer arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bounds for the expanded `Q` products; enough for every problem with a
/// four-digit solution count.
pub const MAX_Q_R: usize = 3;
pub const MAX_Q_DEGREE: u32 = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FanoError {
    #[error("degree list must be nonempty, weakly increasing, all entries >= 2")]
    BadDegrees,
    #[error("q_polynomial is bounded to r <= {MAX_Q_R}, d <= {MAX_Q_DEGREE}")]
    BoundsExceeded,
    #[error("(r={r}, n={n}, d={d:?}) is not a Fano problem")]
    NotAFanoProblem { r: usize, n: usize, d: Vec<u32> },
}

/// The data `(r, n, d_list)` of a candidate Fano problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoProblem {
    pub r: usize,
    pub n: usize,
    pub d_list: Vec<u32>,
}

impl FanoProblem {
    pub fn new(r: usize, n: usize, d_list: Vec<u32>) -> Result<Self, FanoError> {
        if d_list.is_empty()
            || d_list.iter().any(|&d| d < 2)
            || d_list.windows(2).any(|w| w[0] > w[1])
        {
            return Err(FanoError::BadDegrees);
        }
        Ok(FanoProblem { r, n, d_list })
    }
}

fn binomial(n: u64, k: u64) -> i64 {
    if k > n {
        return 0;
    }
    let mut acc: u64 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) / (i + 1);
    }
    acc as i64
}

/// Expected dimension `(r+1)(n-r) - sum binom(d_i + r, r)`; may be negative.
pub fn fano_delta(p: &FanoProblem) -> i64 {
    let (r, n) = (p.r as i64, p.n as i64);
    let codim: i64 = p
        .d_list
        .iter()
        .map(|&d| binomial(d as u64 + p.r as u64, p.r as u64))
        .sum();
    (r + 1) * (n - r) - codim
}

/// A finite Fano problem: `delta = 0` and `n - s >= 2r`.
pub fn is_fano(p: &FanoProblem) -> bool {
    fano_delta(p) == 0 && p.n as i64 - p.d_list.len() as i64 >= 2 * p.r as i64
}

/// Sparse multivariate polynomial: exponent vectors over `vars` variables
/// mapped to big-integer coefficients, zero coefficients never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MultiPoly {
    pub fn one(vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; vars], BigInt::from(1));
        MultiPoly { vars, terms }
    }

    /// The linear form `sum coeffs[i] * x_i`.
    pub fn linear_form(coeffs: &[i64]) -> Self {
        let vars = coeffs.len();
        let mut terms = BTreeMap::new();
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let mut exp = vec![0; vars];
                exp[i] = 1;
                terms.insert(exp, BigInt::from(c));
            }
        }
        MultiPoly { vars, terms }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exponent: &[u32]) -> BigInt {
        self.terms.get(exponent).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    /// Total degree of each term is constant for the polynomials built here;
    /// returns the maximum total degree.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.mul_bounded(other, None)
    }

    /// Product where any term exceeding `bound` in some variable is dropped.
    /// Sound for coefficient extraction at `bound` because every factor has
    /// nonnegative exponents, so overshooting exponents never come back down.
    pub fn mul_bounded(&self, other: &MultiPoly, bound: Option<&[u32]>) -> MultiPoly {
        assert_eq!(self.vars, other.vars);
        let mut terms: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                if let Some(bound) = bound {
                    if exp.iter().zip(bound).any(|(e, b)| e > b) {
                        continue;
                    }
                }
                let entry = terms.entry(exp).or_insert_with(BigInt::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MultiPoly { vars: self.vars, terms }
    }
}

/// All compositions of `d` into `parts` nonnegative summands, lexicographic.
fn compositions(d: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in 0..=remaining {
            prefix.push(a);
            rec(remaining - a, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, parts, &mut Vec::new(), &mut out);
    out
}

/// `Q_{r,d}(x) = prod over compositions a_0 + .. + a_r = d of (a_0 x_0 + ..
/// + a_r x_r)`, expanded exactly.
pub fn q_polynomial(r: usize, d: u32) -> Result<MultiPoly, FanoError> {
    q_polynomial_bounded(r, d, None)
}

fn q_polynomial_bounded(
    r: usize,
    d: u32,
    bound: Option<&[u32]>,
) -> Result<MultiPoly, FanoError> {
    // r = 0 has a single composition for any d, so it is always cheap
    if r > MAX_Q_R || (r > 0 && d > MAX_Q_DEGREE) {
        return Err(FanoError::BoundsExceeded);
    }
    let mut acc = MultiPoly::one(r + 1);
    for comp in compositions(d, r + 1) {
        let coeffs: Vec<i64> = comp.iter().map(|&a| a as i64).collect();
        acc = acc.mul_bounded(&MultiPoly::linear_form(&coeffs), bound);
    }
    Ok(acc)
}

/// Vandermonde `prod_{0 <= i < j <= r} (x_i - x_j)`.
pub fn vandermonde(r: usize) -> MultiPoly {
    let mut acc = MultiPoly::one(r + 1);
    for i in 0..=r {
        for j in i + 1..=r {
            let mut coeffs = vec![0i64; r + 1];
            coeffs[i] = 1;
            coeffs[j] = -1;
            acc = acc.mul(&MultiPoly::linear_form(&coeffs));
        }
    }
    acc
}

/// Number of solutions of a Fano problem: the coefficient of
/// `x_0^n x_1^(n-1) .. x_r^(n-r)` in `Q_{r,d_1} .. Q_{r,d_s} * V_r`.
pub fn fano_degree(p: &FanoProblem) -> Result<BigInt, FanoError> {
    if !is_fano(p) {
        return Err(FanoError::NotAFanoProblem {
            r: p.r,
            n: p.n,
            d: p.d_list.clone(),
        });
    }
    let target: Vec<u32> = (0..=p.r).map(|i| (p.n - i) as u32).collect();
    let mut acc = vandermonde(p.r);
    for &d in &p.d_list {
        let q = q_polynomial_bounded(p.r, d, Some(&target))?;
        acc = acc.mul_bounded(&q, Some(&target));
    }
    Ok(acc.coefficient(&target))
}

/// Summary emitted by the CLI for one problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FanoReport {
    pub r: usize,
    pub n: usize,
    pub d: Vec<u32>,
    pub delta: i64,
    pub is_fano: bool,
    /// Decimal string; absent when the problem is not finite.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<String>,
}

pub fn fano_report(p: &FanoProblem) -> FanoReport {
    let delta = fano_delta(p);
    let finite = is_fano(p);
    FanoReport {
        r: p.r,
        n: p.n,
        d: p.d_list.clone(),
        delta,
        is_fano: finite,
        degree: if finite {
            Some(fano_degree(p).expect("finite problem has a degree").to_string())
        } else {
            None
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(r: usize, n: usize, d: &[u32]) -> FanoProblem {
        FanoProblem::new(r, n, d.to_vec()).unwrap()
    }

    #[test]
    fn delta_values() {
        assert_eq!(fano_delta(&problem(1, 3, &[3])), 0);
        assert_eq!(fano_delta(&problem(1, 4, &[2, 2])), 0);
        assert_eq!(fano_delta(&problem(1, 3, &[2])), 1);
    }

    #[test]
    fn fano_feasibility() {
        assert!(is_fano(&problem(1, 3, &[3])));
        assert!(!is_fano(&problem(1, 3, &[2])));
        assert!(is_fano(&problem(3, 8, &[2, 2])));
        // delta = 0 but the dimension condition fails: lines on the
        // intersection of four quadrics in P^5 would need n - s >= 2
        let p = problem(1, 7, &[2, 2, 2, 2]);
        assert!(is_fano(&p));
    }

    #[test]
    fn degree_list_validation() {
        assert_eq!(
            FanoProblem::new(1, 3, vec![]).unwrap_err(),
            FanoError::BadDegrees
        );
        assert_eq!(
            FanoProblem::new(1, 3, vec![1]).unwrap_err(),
            FanoError::BadDegrees
        );
        assert_eq!(
            FanoProblem::new(1, 6, vec![3, 2]).unwrap_err(),
            FanoError::BadDegrees
        );
    }

    #[test]
    fn q_poly_of_cubic_binary() {
        // (3 x0)(2 x0 + x1)(x0 + 2 x1)(3 x1)
        let q = q_polynomial(1, 3).unwrap();
        assert_eq!(q.coefficient(&[3, 1]), BigInt::from(18));
        assert_eq!(q.coefficient(&[2, 2]), BigInt::from(45));
        assert_eq!(q.coefficient(&[1, 3]), BigInt::from(18));
        assert_eq!(q.coefficient(&[4, 0]), BigInt::from(0));
    }

    #[test]
    fn q_poly_degenerate_and_quadratic() {
        let q = q_polynomial(0, 5).unwrap();
        assert_eq!(q.coefficient(&[1]), BigInt::from(5));

        // (2 x0)(x0 + x1)(2 x1) = 4 x0^2 x1 + 4 x0 x1^2
        let q = q_polynomial(1, 2).unwrap();
        assert_eq!(q.coefficient(&[2, 1]), BigInt::from(4));
        assert_eq!(q.coefficient(&[1, 2]), BigInt::from(4));
        assert_eq!(q.num_terms(), 2);
    }

    #[test]
    fn q_poly_bounds() {
        assert_eq!(q_polynomial(4, 2).unwrap_err(), FanoError::BoundsExceeded);
        assert_eq!(q_polynomial(1, 4).unwrap_err(), FanoError::BoundsExceeded);
    }

    #[test]
    fn twenty_seven_lines() {
        assert_eq!(fano_degree(&problem(1, 3, &[3])).unwrap(), BigInt::from(27));
    }

    #[test]
    fn degree_requires_a_fano_problem() {
        assert!(matches!(
            fano_degree(&problem(1, 3, &[2])),
            Err(FanoError::NotAFanoProblem { .. })
        ));
    }

    #[test]
    fn homogeneity_matches_target_monomial() {
        for (r, n, d) in [(1usize, 4usize, vec![2u32, 2]), (1, 3, vec![3]), (2, 6, vec![2, 2])] {
            let p = problem(r, n, &d);
            assert_eq!(fano_delta(&p), 0);
            let mut acc = vandermonde(r);
            for &di in &d {
                acc = acc.mul(&q_polynomial(r, di).unwrap());
            }
            let target_degree: u32 = (0..=r).map(|i| (n - i) as u32).sum();
            assert_eq!(acc.total_degree(), target_degree);
            // every term of the product has the same total degree
            assert!(acc
                .terms()
                .all(|(e, _)| e.iter().sum::<u32>() == target_degree));
        }
    }

    #[test]
    fn vandermonde_degree() {
        for r in 0..=3 {
            assert_eq!(vandermonde(r).total_degree() as usize, r * (r + 1) / 2);
        }
    }
}
