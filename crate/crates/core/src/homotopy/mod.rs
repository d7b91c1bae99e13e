//! Parameter-homotopy path tracking, fiber population, and monodromy.
//!
//! The coefficient space of a sparse family is a product of vector spaces,
//! one coordinate per monomial per equation. A fiber is seeded by solving
//! the per-equation linear condition "this random system vanishes at a
//! prescribed torus point", then populated by tracking random triangle
//! loops in coefficient space and collecting new endpoints until the BKK
//! count is reached. Loops based at a complete fiber induce permutations:
//! the monodromy generators.
//!
//! Randomness is always drawn from a seeded generator; a fixed seed
//! reproduces fibers and permutations bit-for-bit on one platform.

mod fourplanes;
mod linalg;
mod monodromy;
mod tracker;

pub use fourplanes::{
    four_planes_monodromy, four_planes_problem, FourPlanesInstance, FourPlanesProblem,
    TwoPlaneSolution,
};
pub use monodromy::{
    monodromy_generators, monodromy_loop, populate_fiber, track_segment, MonodromyOutcome,
    PopulateOutcome,
};
pub use tracker::SegmentFamily;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sparse::{SparseError, SupportSystem};

pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum HomotopyError {
    #[error("mixed volume is 0; there is no fiber to populate")]
    MixedVolumeZero,
    #[error("seed point must have all coordinates nonzero")]
    ZeroCoordinate,
    #[error("fiber has {got} points but the BKK count is {expected}")]
    IncompleteFiber { got: usize, expected: u64 },
    #[error("fiber grew past the BKK bound {bound}; paths have crossed")]
    ExceedsBkkBound { bound: u64 },
    #[error("all {0} monodromy loops were discarded")]
    AllLoopsDiscarded(usize),
    #[error("could not draw a nondegenerate instance after {0} attempts")]
    DegenerateInstance(usize),
    #[error("tracker configuration is invalid: {0}")]
    BadConfig(&'static str),
    #[error("plane count b = {0} is outside the supported range 2..=8")]
    BadPlaneCount(usize),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// A path failed before reaching the target parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathFailure {
    pub index: usize,
    pub t_reached: f64,
}

/// Step sizes and tolerances for the predictor-corrector tracker.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub cluster_tol: f64,
    pub rng_seed: u64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            initial_step: 0.1,
            min_step: 1e-7,
            newton_tol: 1e-10,
            max_newton_iters: 4,
            cluster_tol: 1e-6,
            rng_seed: 0,
        }
    }
}

impl TrackerConfig {
    pub fn with_seed(seed: u64) -> Self {
        TrackerConfig {
            rng_seed: seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), HomotopyError> {
        if !(self.min_step > 0.0 && self.min_step < self.initial_step) {
            return Err(HomotopyError::BadConfig("need 0 < min_step < initial_step"));
        }
        if self.newton_tol <= 0.0 || self.cluster_tol <= 0.0 {
            return Err(HomotopyError::BadConfig("tolerances must be positive"));
        }
        if self.max_newton_iters == 0 {
            return Err(HomotopyError::BadConfig("max_newton_iters must be >= 1"));
        }
        Ok(())
    }
}

/// One complex coefficient per monomial of each support; the layout mirrors
/// the support system.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPoint {
    pub coeffs: Vec<Vec<C64>>,
}

impl CoefficientPoint {
    pub fn zeros_like(system: &SupportSystem) -> Self {
        CoefficientPoint {
            coeffs: system
                .supports()
                .iter()
                .map(|s| vec![C64::new(0.0, 0.0); s.points().len()])
                .collect(),
        }
    }

    pub fn interpolate(&self, other: &CoefficientPoint, t: f64) -> CoefficientPoint {
        CoefficientPoint {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| {
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| x * (1.0 - t) + y * t)
                        .collect()
                })
                .collect(),
        }
    }

    pub fn difference(&self, other: &CoefficientPoint) -> CoefficientPoint {
        CoefficientPoint {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| y - x).collect())
                .collect(),
        }
    }
}

/// Approximate torus solutions of one parameter point.
#[derive(Debug, Clone)]
pub struct Fiber {
    pub base: CoefficientPoint,
    pub points: Vec<Vec<C64>>,
    pub residual_tol: f64,
}

/// Evaluation of sparse systems and their Jacobians at torus points.
#[derive(Debug, Clone, Copy)]
pub struct SparseEvaluator<'a> {
    system: &'a SupportSystem,
}

impl<'a> SparseEvaluator<'a> {
    pub fn new(system: &'a SupportSystem) -> Self {
        SparseEvaluator { system }
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    fn monomial(x: &[C64], exponent: &[i64]) -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for (xi, &e) in x.iter().zip(exponent) {
            if e != 0 {
                acc *= xi.powi(e as i32);
            }
        }
        acc
    }

    pub fn eval(&self, coeffs: &CoefficientPoint, x: &[C64]) -> Vec<C64> {
        self.system
            .supports()
            .iter()
            .zip(&coeffs.coeffs)
            .map(|(support, cs)| {
                support
                    .points()
                    .iter()
                    .zip(cs)
                    .map(|(alpha, c)| c * Self::monomial(x, alpha))
                    .sum()
            })
            .collect()
    }

    /// Row `i`, column `j`: the partial of equation `i` in variable `j`.
    pub fn jacobian(&self, coeffs: &CoefficientPoint, x: &[C64]) -> Vec<Vec<C64>> {
        let n = self.system.dim();
        self.system
            .supports()
            .iter()
            .zip(&coeffs.coeffs)
            .map(|(support, cs)| {
                (0..n)
                    .map(|j| {
                        support
                            .points()
                            .iter()
                            .zip(cs)
                            .filter(|(alpha, _)| alpha[j] != 0)
                            .map(|(alpha, c)| {
                                let mut shifted = alpha.clone();
                                shifted[j] -= 1;
                                c * (alpha[j] as f64) * Self::monomial(x, &shifted)
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Complex standard normal via Box-Muller; the workhorse for generic points.
pub fn random_complex(rng: &mut impl Rng) -> C64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (-2.0 * u.ln()).sqrt();
    C64::new(r * v.cos(), r * v.sin())
}

/// Random coefficients for every monomial of the family.
pub fn random_coefficient_point(system: &SupportSystem, rng: &mut impl Rng) -> CoefficientPoint {
    CoefficientPoint {
        coeffs: system
            .supports()
            .iter()
            .map(|s| s.points().iter().map(|_| random_complex(rng)).collect())
            .collect(),
    }
}

/// Random point of the torus with moduli bounded away from 0 and infinity.
pub fn random_torus_point(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let r = rng.gen_range(0.7..1.4);
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            C64::from_polar(r, theta)
        })
        .collect()
}

/// Random coefficients conditioned to vanish at `x_star`: each equation gets
/// one linear constraint, solved by a hermitian projection so the residual
/// is at machine precision.
pub fn seed_fiber(
    system: &SupportSystem,
    x_star: &[C64],
    rng: &mut impl Rng,
) -> Result<CoefficientPoint, HomotopyError> {
    if x_star.len() != system.dim() || x_star.iter().any(|c| c.norm() == 0.0) {
        return Err(HomotopyError::ZeroCoordinate);
    }
    let mut point = random_coefficient_point(system, rng);
    for (support, cs) in system.supports().iter().zip(&mut point.coeffs) {
        let values: Vec<C64> = support
            .points()
            .iter()
            .map(|alpha| SparseEvaluator::monomial(x_star, alpha))
            .collect();
        let current: C64 = cs.iter().zip(&values).map(|(c, v)| c * v).sum();
        let norm2: f64 = values.iter().map(|v| v.norm_sqr()).sum();
        let shift = current / norm2;
        for (c, v) in cs.iter_mut().zip(&values) {
            *c -= shift * v.conj();
        }
    }
    Ok(point)
}

#[cfg(test)]
mod tests;
