//! Fiber population and monodromy permutations for sparse families.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::permgroup::Permutation;
use crate::sparse::SupportSystem;

use super::linalg::dist;
use super::tracker::{track_path, SegmentFamily};
use super::{
    random_coefficient_point, random_torus_point, seed_fiber, C64, CoefficientPoint, Fiber,
    HomotopyError, PathFailure, SparseEvaluator, TrackerConfig,
};

/// Convex segment between two coefficient points of one support system.
struct CoeffSegment<'a> {
    eval: SparseEvaluator<'a>,
    from: &'a CoefficientPoint,
    to: &'a CoefficientPoint,
    direction: CoefficientPoint,
}

impl<'a> CoeffSegment<'a> {
    fn new(
        system: &'a SupportSystem,
        from: &'a CoefficientPoint,
        to: &'a CoefficientPoint,
    ) -> Self {
        CoeffSegment {
            eval: SparseEvaluator::new(system),
            from,
            to,
            direction: from.difference(to),
        }
    }
}

impl SegmentFamily for CoeffSegment<'_> {
    fn dim(&self) -> usize {
        self.eval.dim()
    }

    fn eval(&self, x: &[C64], t: f64) -> Vec<C64> {
        self.eval.eval(&self.from.interpolate(self.to, t), x)
    }

    fn jacobian(&self, x: &[C64], t: f64) -> Vec<Vec<C64>> {
        self.eval.jacobian(&self.from.interpolate(self.to, t), x)
    }

    fn t_derivative(&self, x: &[C64], _t: f64) -> Vec<C64> {
        // the family is affine in t, so the derivative is exact
        self.eval.eval(&self.direction, x)
    }
}

/// Continues every point from the system at `from` to the system at `to`.
/// Failures are reported per point, never dropped.
pub fn track_segment(
    system: &SupportSystem,
    from: &CoefficientPoint,
    to: &CoefficientPoint,
    points: &[Vec<C64>],
    cfg: &TrackerConfig,
) -> Vec<Result<Vec<C64>, PathFailure>> {
    let segment = CoeffSegment::new(system, from, to);
    points
        .iter()
        .enumerate()
        .map(|(index, p)| {
            track_path(&segment, p, cfg).map_err(|t_reached| PathFailure { index, t_reached })
        })
        .collect()
}

/// Tracks points around the triangle `base -> v1 -> v2 -> base`.
fn track_triangle(
    system: &SupportSystem,
    base: &CoefficientPoint,
    v1: &CoefficientPoint,
    v2: &CoefficientPoint,
    points: &[Vec<C64>],
    cfg: &TrackerConfig,
) -> Vec<Result<Vec<C64>, PathFailure>> {
    let legs = [(base, v1), (v1, v2), (v2, base)];
    let mut states: Vec<Result<Vec<C64>, PathFailure>> =
        points.iter().cloned().map(Ok).collect();
    for (from, to) in legs {
        let segment = CoeffSegment::new(system, from, to);
        states = states
            .into_iter()
            .enumerate()
            .map(|(index, state)| {
                let p = state?;
                track_path(&segment, &p, cfg)
                    .map_err(|t_reached| PathFailure { index, t_reached })
            })
            .collect();
    }
    states
}

/// Result of populating a fiber; `stagnated` is set when 20 consecutive
/// loops found nothing new before the BKK count was reached.
#[derive(Debug, Clone)]
pub struct PopulateOutcome {
    pub fiber: Fiber,
    pub mv: u64,
    pub stagnated: bool,
    pub loops_run: usize,
}

const STAGNATION_LIMIT: usize = 20;
const MAX_POPULATE_LOOPS: usize = 600;

/// Seeds one torus solution and runs random triangle loops until the fiber
/// has `MV(A)` points or growth stagnates. Growing past the BKK bound is a
/// hard error: it means paths were crossed.
pub fn populate_fiber(
    system: &SupportSystem,
    cfg: &TrackerConfig,
) -> Result<PopulateOutcome, HomotopyError> {
    cfg.validate()?;
    let mv = system.mixed_volume()?;
    if mv == 0 {
        return Err(HomotopyError::MixedVolumeZero);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.rng_seed);
    let x_star = random_torus_point(system.dim(), &mut rng);
    let base = seed_fiber(system, &x_star, &mut rng)?;
    let mut points: Vec<Vec<C64>> = vec![x_star];
    let mut stagnant = 0usize;
    let mut loops_run = 0usize;

    while (points.len() as u64) < mv && stagnant < STAGNATION_LIMIT && loops_run < MAX_POPULATE_LOOPS
    {
        loops_run += 1;
        let v1 = random_coefficient_point(system, &mut rng);
        let v2 = random_coefficient_point(system, &mut rng);
        let before = points.len();
        for state in track_triangle(system, &base, &v1, &v2, &points, cfg) {
            let Ok(endpoint) = state else { continue };
            if endpoint.iter().any(|c| c.norm() < 1e-12) {
                continue; // left the torus; numerically meaningless
            }
            let nearest = points
                .iter()
                .map(|p| dist(p, &endpoint))
                .fold(f64::INFINITY, f64::min);
            if nearest > 2.0 * cfg.cluster_tol {
                points.push(endpoint);
            }
        }
        if points.len() as u64 > mv {
            return Err(HomotopyError::ExceedsBkkBound { bound: mv });
        }
        if points.len() == before {
            stagnant += 1;
        } else {
            stagnant = 0;
        }
    }

    let stagnated = (points.len() as u64) < mv;
    Ok(PopulateOutcome {
        fiber: Fiber {
            base,
            points,
            residual_tol: cfg.newton_tol,
        },
        mv,
        stagnated,
        loops_run,
    })
}

/// Monodromy permutations plus how many loops had to be discarded.
#[derive(Debug, Clone)]
pub struct MonodromyOutcome {
    pub generators: Vec<Permutation>,
    pub discarded_loops: usize,
    pub loops_requested: usize,
}

/// Tracks one triangle loop `base -> v1 -> v2 -> base` over a complete
/// fiber and extracts its permutation; `None` when a path fails or the
/// endpoint matching is ambiguous. The degenerate loop with both vertices
/// at the base induces the identity.
pub fn monodromy_loop(
    system: &SupportSystem,
    fiber: &Fiber,
    v1: &CoefficientPoint,
    v2: &CoefficientPoint,
    cfg: &TrackerConfig,
) -> Option<Permutation> {
    let states = track_triangle(system, &fiber.base, v1, v2, &fiber.points, cfg);
    let mut endpoints = Vec::with_capacity(states.len());
    for state in states {
        endpoints.push(state.ok()?);
    }
    match_endpoints(&fiber.points, &endpoints, cfg.cluster_tol)
        .map(|images| Permutation::from_images(images).expect("matching is a bijection"))
}

/// Runs `n_loops` random triangle loops based at the fiber and extracts one
/// permutation per loop. A loop is discarded when any path fails or when
/// the endpoint matching is ambiguous (nearest fiber point not within the
/// cluster tolerance, second-nearest within ten times it, or a collision).
/// Loops run in parallel; each draws from its own seeded stream, so the
/// result is independent of scheduling.
pub fn monodromy_generators(
    system: &SupportSystem,
    fiber: &Fiber,
    n_loops: usize,
    cfg: &TrackerConfig,
) -> Result<MonodromyOutcome, HomotopyError> {
    cfg.validate()?;
    let mv = system.mixed_volume()?;
    if fiber.points.len() as u64 != mv {
        return Err(HomotopyError::IncompleteFiber {
            got: fiber.points.len(),
            expected: mv,
        });
    }
    let results: Vec<Option<Permutation>> = (0..n_loops)
        .into_par_iter()
        .map(|li| {
            let mut rng = loop_rng(cfg.rng_seed, li as u64);
            let v1 = random_coefficient_point(system, &mut rng);
            let v2 = random_coefficient_point(system, &mut rng);
            monodromy_loop(system, fiber, &v1, &v2, cfg)
        })
        .collect();

    let generators: Vec<Permutation> = results.iter().flatten().cloned().collect();
    let discarded = n_loops - generators.len();
    if generators.is_empty() && n_loops > 0 {
        return Err(HomotopyError::AllLoopsDiscarded(n_loops));
    }
    Ok(MonodromyOutcome {
        generators,
        discarded_loops: discarded,
        loops_requested: n_loops,
    })
}

pub(crate) fn loop_rng(seed: u64, index: u64) -> ChaCha20Rng {
    // distinct deterministic stream per loop, independent of scheduling
    ChaCha20Rng::seed_from_u64(seed ^ (index + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Nearest-neighbor matching with a separation guard: endpoint `i` maps to
/// the unique fiber point within `tol`, and the second-nearest must be at
/// least `10 * tol` away. Returns `None` (ambiguous) otherwise, or when the
/// matching is not a bijection.
pub(crate) fn match_endpoints(
    fiber: &[Vec<C64>],
    endpoints: &[Vec<C64>],
    tol: f64,
) -> Option<Vec<usize>> {
    let mut images = Vec::with_capacity(endpoints.len());
    for e in endpoints {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut second = f64::INFINITY;
        for (j, p) in fiber.iter().enumerate() {
            let d = dist(e, p);
            if d < best.1 {
                second = best.1;
                best = (j, d);
            } else if d < second {
                second = d;
            }
        }
        if best.1 > tol || second < 10.0 * tol {
            return None;
        }
        images.push(best.0);
    }
    let mut seen = vec![false; fiber.len()];
    for &j in &images {
        if seen[j] {
            return None;
        }
        seen[j] = true;
    }
    Some(images)
}
