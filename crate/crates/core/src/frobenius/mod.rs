//! Frobenius splitting-type sampling and Chebotarev comparisons.
//!
//! For a squarefree-mod-p integer polynomial, the multiset of degrees of the
//! irreducible factors of `f mod p` is the cycle type of the Frobenius
//! element at `p`. Sampling those types over many primes and comparing the
//! empirical frequencies with the conjugacy-class densities of a candidate
//! group is a cheap statistical probe of the Galois group.
//!
//! Only distinct-degree factorization is ever run: the degree of the
//! degree-`e` product divided by `e` counts the factors, so equal-degree
//! splitting is unnecessary for cycle types.

pub mod modp;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlattice::IntMatrix;
use crate::permgroup::{class_density_symmetric, partitions, CycleType};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrobeniusError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the zero polynomial has no splitting behavior")]
    ZeroPolynomial,
    #[error("polynomial must have degree >= 1")]
    ConstantPolynomial,
    #[error("degree mismatch: histogram degree {0}, reference degree {1}")]
    DegreeMismatch(usize, usize),
    #[error("class densities must sum to 1")]
    BadDistribution,
    #[error("could not parse polynomial: {0}")]
    Parse(String),
    #[error("symmetric distributions are tabulated only up to degree {max}, got {got}")]
    DegreeTooLarge { got: usize, max: usize },
}

/// Dense integer polynomial, coefficients ascending, leading coefficient
/// nonzero (the zero polynomial is not representable).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Result<Self, FrobeniusError> {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(FrobeniusError::ZeroPolynomial);
        }
        Ok(IntPoly { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, FrobeniusError> {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading_coefficient(&self) -> &BigInt {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn derivative(&self) -> Option<IntPoly> {
        let coeffs: Vec<BigInt> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        IntPoly::from_coeffs(coeffs).ok()
    }

    pub fn reduce_mod(&self, p: u64) -> modp::Poly {
        let pp = BigInt::from(p);
        modp::trim(
            self.coeffs
                .iter()
                .map(|c| {
                    let r = c.mod_floor(&pp);
                    u64::try_from(r).expect("mod_floor result is in [0, p)")
                })
                .collect(),
        )
    }

    /// Parses expressions like `x^6-503x^5-544x^4-69x^3-152x^2-49x-763`.
    /// Accepts integer coefficients, caret powers, implicit multiplication
    /// and an optional `*`; any single letter works as the variable.
    pub fn parse(input: &str) -> Result<Self, FrobeniusError> {
        let bad = |msg: &str| FrobeniusError::Parse(format!("{msg} in {input:?}"));
        let chars: Vec<char> = input.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(bad("empty input"));
        }
        let mut terms: Vec<(usize, BigInt)> = Vec::new();
        let mut i = 0;
        let mut sign = BigInt::one();
        // optional leading sign
        if chars[0] == '+' || chars[0] == '-' {
            if chars[0] == '-' {
                sign = -sign;
            }
            i = 1;
        }
        while i < chars.len() {
            // coefficient digits
            let mut digits = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                digits.push(chars[i]);
                i += 1;
            }
            let mut coeff: BigInt = if digits.is_empty() {
                BigInt::one()
            } else {
                digits.parse().map_err(|_| bad("bad coefficient"))?
            };
            coeff *= &sign;
            if i < chars.len() && chars[i] == '*' {
                i += 1;
            }
            let mut power = 0usize;
            if i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
                power = 1;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    let mut exp = String::new();
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        exp.push(chars[i]);
                        i += 1;
                    }
                    power = exp.parse().map_err(|_| bad("bad exponent"))?;
                }
            } else if digits.is_empty() {
                return Err(bad("expected coefficient or variable"));
            }
            terms.push((power, coeff));
            if i < chars.len() {
                sign = match chars[i] {
                    '+' => BigInt::one(),
                    '-' => -BigInt::one(),
                    _ => return Err(bad("expected + or -")),
                };
                i += 1;
                if i == chars.len() {
                    return Err(bad("trailing sign"));
                }
            }
        }
        let max_pow = terms.iter().map(|(p, _)| *p).max().unwrap_or(0);
        let mut coeffs = vec![BigInt::zero(); max_pow + 1];
        for (p, c) in terms {
            coeffs[p] += c;
        }
        IntPoly::from_coeffs(coeffs)
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => {
                    if a.is_one() {
                        write!(f, "x")?
                    } else {
                        write!(f, "{a}x")?
                    }
                }
                _ => {
                    if a.is_one() {
                        write!(f, "x^{i}")?
                    } else {
                        write!(f, "{a}x^{i}")?
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    /// `p` divides the leading coefficient, so the degree drops mod `p`.
    DegreeDrop,
    /// `f mod p` has a repeated factor.
    NotSquarefree,
}

/// Splitting type of `f` at a good prime, or the reason `p` must be skipped.
pub fn splitting_outcome(
    f: &IntPoly,
    p: u64,
) -> Result<Result<CycleType, SkipReason>, FrobeniusError> {
    if !modp::is_prime(p) {
        return Err(FrobeniusError::NotPrime(p));
    }
    if f.degree() == 0 {
        return Err(FrobeniusError::ConstantPolynomial);
    }
    let fp = f.reduce_mod(p);
    if modp::degree(&fp) != Some(f.degree()) {
        return Ok(Err(SkipReason::DegreeDrop));
    }
    let fp = modp::make_monic(&fp, p);
    let deriv = modp::derivative(&fp, p);
    let g = modp::gcd(&fp, &deriv, p);
    if modp::degree(&g) != Some(0) {
        // covers both a nontrivial gcd and a vanishing derivative
        return Ok(Err(SkipReason::NotSquarefree));
    }
    let parts = distinct_degree_parts(&fp, p);
    Ok(Ok(CycleType::new(parts).expect("factor degrees are positive")))
}

/// Multiset of irreducible-factor degrees of `f mod p`; `None` when the
/// prime is bad (degree drop or repeated factors).
pub fn splitting_type(f: &IntPoly, p: u64) -> Result<Option<CycleType>, FrobeniusError> {
    Ok(splitting_outcome(f, p)?.ok())
}

/// Distinct-degree factorization of a squarefree monic polynomial: the
/// degree-`e` product `gcd(x^(p^e) - x, rem)` has `deg/e` irreducible
/// factors of degree `e`.
fn distinct_degree_parts(fp: &modp::Poly, p: u64) -> Vec<usize> {
    let x = vec![0u64, 1];
    let mut rem = fp.clone();
    let mut h = modp::rem(&x, &rem, p);
    let mut parts = Vec::new();
    let mut e = 0usize;
    while let Some(d) = modp::degree(&rem) {
        if d == 0 {
            break;
        }
        e += 1;
        if d < 2 * e {
            parts.push(d); // what is left is irreducible
            break;
        }
        h = modp::powmod(&h, p, &rem, p);
        let g = modp::gcd(&modp::sub(&h, &x, p), &rem, p);
        if let Some(dg) = modp::degree(&g) {
            if dg > 0 {
                debug_assert_eq!(dg % e, 0);
                for _ in 0..dg / e {
                    parts.push(e);
                }
                let (q, r) = modp::divmod(&rem, &g, p);
                debug_assert!(r.is_empty());
                rem = q;
                h = modp::rem(&h, &rem, p);
            }
        }
    }
    parts
}

/// `(-1)^(d(d-1)/2) * Res(f, f') / lc(f)`, exact via a Sylvester-matrix
/// determinant (fraction-free elimination).
pub fn discriminant(f: &IntPoly) -> Result<BigInt, FrobeniusError> {
    let d = f.degree();
    if d == 0 {
        return Err(FrobeniusError::ConstantPolynomial);
    }
    let deriv = f.derivative().expect("degree >= 1 over the integers");
    let res = resultant(f, &deriv);
    let (q, r) = res.div_rem(f.leading_coefficient());
    assert!(r.is_zero(), "leading coefficient divides the resultant");
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}

/// Resultant via the Sylvester matrix: `deg(g)` shifted rows of `f` above
/// `deg(f)` shifted rows of `g`.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    let (m, n) = (f.degree(), g.degree());
    if m + n == 0 {
        return BigInt::one();
    }
    let size = m + n;
    let mut mat = IntMatrix::zeros(size, size);
    for row in 0..n {
        for (k, c) in f.coeffs.iter().rev().enumerate() {
            mat.set(row, row + k, c.clone());
        }
    }
    for row in 0..m {
        for (k, c) in g.coeffs.iter().rev().enumerate() {
            mat.set(n + row, row + k, c.clone());
        }
    }
    mat.det()
}

/// Counts of observed splitting types over a run of admissible primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingHistogram {
    pub degree: usize,
    pub counts: BTreeMap<CycleType, u64>,
    pub primes_used: u64,
    pub primes_skipped: Vec<(u64, SkipReason)>,
    /// First and last admissible prime of the run.
    pub prime_range: (u64, u64),
}

impl SplittingHistogram {
    /// Counts in the canonical order of all partitions of the degree
    /// (ascending lexicographic on descending part lists), zeros included.
    pub fn counts_in_partition_order(&self) -> Vec<(CycleType, u64)> {
        let mut all: Vec<CycleType> = partitions(self.degree)
            .into_iter()
            .map(|p| CycleType::new(p).unwrap())
            .collect();
        all.sort();
        all.into_iter()
            .map(|t| {
                let c = self.counts.get(&t).copied().unwrap_or(0);
                (t, c)
            })
            .collect()
    }
}

/// Samples splitting types at primes `>= start` in order until `count`
/// admissible primes have been processed. Deterministic.
pub fn sample_splittings(
    f: &IntPoly,
    count: u64,
    start: u64,
) -> Result<SplittingHistogram, FrobeniusError> {
    if f.degree() == 0 {
        return Err(FrobeniusError::ConstantPolynomial);
    }
    let mut counts: BTreeMap<CycleType, u64> = BTreeMap::new();
    let mut skipped = Vec::new();
    let mut used = 0u64;
    let mut p = modp::next_prime_at_least(start);
    let mut first_used = None;
    let mut last_used = 0;
    while used < count {
        match splitting_outcome(f, p)? {
            Ok(t) => {
                *counts.entry(t).or_insert(0) += 1;
                used += 1;
                first_used.get_or_insert(p);
                last_used = p;
            }
            Err(reason) => skipped.push((p, reason)),
        }
        p = modp::next_prime_at_least(p + 1);
    }
    Ok(SplittingHistogram {
        degree: f.degree(),
        counts,
        primes_used: used,
        primes_skipped: skipped,
        prime_range: (first_used.unwrap_or(0), last_used),
    })
}

/// Exact class densities of a permutation group, keyed by cycle type.
///
/// Wire format: `{"degree":3,"densities":{"1,1,1":"1/6","2,1":"1/2","3":"1/3"}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DistributionWire", into = "DistributionWire")]
pub struct ClassDistribution {
    degree: usize,
    densities: BTreeMap<CycleType, BigRational>,
}

#[derive(Serialize, Deserialize)]
struct DistributionWire {
    degree: usize,
    densities: BTreeMap<String, String>,
}

impl TryFrom<DistributionWire> for ClassDistribution {
    type Error = String;
    fn try_from(w: DistributionWire) -> Result<Self, String> {
        let mut densities = BTreeMap::new();
        for (k, v) in w.densities {
            let t = CycleType::parse(&k).map_err(|e| e.to_string())?;
            densities.insert(t, parse_ratio(&v).ok_or_else(|| format!("bad ratio {v:?}"))?);
        }
        ClassDistribution::new(w.degree, densities).map_err(|e| e.to_string())
    }
}

impl From<ClassDistribution> for DistributionWire {
    fn from(d: ClassDistribution) -> DistributionWire {
        DistributionWire {
            degree: d.degree,
            densities: d
                .densities
                .into_iter()
                .map(|(t, r)| (t.to_string(), r.to_string()))
                .collect(),
        }
    }
}

fn parse_ratio(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => Some(BigRational::new(n.trim().parse().ok()?, d.trim().parse().ok()?)),
        None => Some(BigRational::from_integer(s.trim().parse().ok()?)),
    }
}

impl ClassDistribution {
    pub fn new(
        degree: usize,
        densities: BTreeMap<CycleType, BigRational>,
    ) -> Result<Self, FrobeniusError> {
        let total: BigRational = densities.values().cloned().sum();
        if !total.is_one() || densities.keys().any(|t| t.degree() != degree) {
            return Err(FrobeniusError::BadDistribution);
        }
        Ok(ClassDistribution { degree, densities })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn density(&self, t: &CycleType) -> BigRational {
        self.densities.get(t).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn densities(&self) -> &BTreeMap<CycleType, BigRational> {
        &self.densities
    }
}

pub const MAX_SYMMETRIC_DEGREE: usize = 12;

/// Class densities of the full symmetric group `S_d`, `d <= 12`.
pub fn symmetric_distribution(d: usize) -> Result<ClassDistribution, FrobeniusError> {
    if d == 0 || d > MAX_SYMMETRIC_DEGREE {
        return Err(FrobeniusError::DegreeTooLarge {
            got: d,
            max: MAX_SYMMETRIC_DEGREE,
        });
    }
    let densities: BTreeMap<CycleType, BigRational> = partitions(d)
        .into_iter()
        .map(|parts| {
            let t = CycleType::new(parts).unwrap();
            let density = class_density_symmetric(&t);
            (t, density)
        })
        .collect();
    ClassDistribution::new(d, densities)
}

/// Total-variation distance `1/2 * sum |count/used - n_lambda|` between the
/// empirical splitting frequencies and a reference distribution. Types
/// present on only one side contribute their full mass.
pub fn chebotarev_distance(
    h: &SplittingHistogram,
    reference: &ClassDistribution,
) -> Result<BigRational, FrobeniusError> {
    if h.degree != reference.degree() {
        return Err(FrobeniusError::DegreeMismatch(h.degree, reference.degree()));
    }
    let used = BigRational::from_integer(BigInt::from(h.primes_used));
    if used.is_zero() {
        return Err(FrobeniusError::BadDistribution);
    }
    let mut keys: Vec<&CycleType> = h.counts.keys().collect();
    for t in reference.densities().keys() {
        if !h.counts.contains_key(t) {
            keys.push(t);
        }
    }
    let mut total = BigRational::zero();
    for t in keys {
        let observed = BigRational::from_integer(BigInt::from(
            h.counts.get(t).copied().unwrap_or(0),
        )) / &used;
        let expected = reference.density(t);
        let diff = observed - expected;
        total += diff.abs();
    }
    Ok(total / BigRational::from_integer(BigInt::from(2)))
}
