//! The four-b-planes test family: 2-planes in `C^(2b)` meeting four general
//! b-planes nontrivially.
//!
//! With `K^1 .. K^4` general, `K^3` and `K^4` are graphs of isomorphisms
//! `f_3, f_4 : K^1 -> K^2`, and the composite `phi = f_4^{-1} f_3` is a
//! semisimple endomorphism of `K^1` whose `b` eigen-lines `l` give exactly
//! the solutions `l + f_3(l)`. This makes the family a deterministic
//! generator of monodromy problems with known answer count `b` and full
//! symmetric Galois group `S_b`.
//!
//! The eigenproblem is solved without a general eigensolver: characteristic
//! polynomial by the Faddeev-LeVerrier recurrence, roots by Aberth
//! simultaneous refinement, vectors by shifted inverse iteration, then a
//! Newton polish of the pair `(v, lambda)` on the chart `c . v = 1`.
//! Monodromy loops move all four planes and track eigenpairs with the same
//! predictor-corrector used for sparse systems.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::permgroup::Permutation;

use super::linalg::{mat_mul, mat_vec, numerical_rank, solve, solve_multi};
use super::monodromy::{loop_rng, match_endpoints, MonodromyOutcome};
use super::tracker::{newton_correct, track_path, SegmentFamily};
use super::{random_complex, C64, HomotopyError, TrackerConfig};

type Mat = Vec<Vec<C64>>;

/// Four general `b`-planes in `C^(2b)`, each a `2b x b` column basis.
#[derive(Debug, Clone)]
pub struct FourPlanesInstance {
    pub b: usize,
    pub planes: [Mat; 4],
}

/// A solution 2-plane spanned by `u in K^1` and `w = f_3(u) in K^2`.
#[derive(Debug, Clone)]
pub struct TwoPlaneSolution {
    pub u: Vec<C64>,
    pub w: Vec<C64>,
}

/// Instance together with its `b` solutions and the eigen data that
/// parameterizes them (used as start points for monodromy).
#[derive(Debug, Clone)]
pub struct FourPlanesProblem {
    pub instance: FourPlanesInstance,
    pub solutions: Vec<TwoPlaneSolution>,
    /// Packed eigenpairs `[v_1..v_b, lambda]` on the chart `c . v = 1`.
    eigenpairs: Vec<Vec<C64>>,
    chart: Vec<C64>,
}

const MAX_INSTANCE_RETRIES: usize = 8;

/// Draws a generic instance and solves it through the eigen formulation.
/// Degenerate draws (non-transverse planes, clustered eigenvalues) are
/// resampled a bounded number of times.
pub fn four_planes_problem(
    b: usize,
    rng_seed: u64,
) -> Result<FourPlanesProblem, HomotopyError> {
    if !(2..=8).contains(&b) {
        return Err(HomotopyError::BadPlaneCount(b));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(rng_seed);
    let cfg = TrackerConfig::default();
    for _ in 0..MAX_INSTANCE_RETRIES {
        let planes: [Mat; 4] = std::array::from_fn(|_| random_matrix(&mut rng, 2 * b, b));
        if !pairwise_transverse(b, &planes) {
            continue;
        }
        let Some(phi) = phi_of(b, &planes) else {
            continue;
        };
        let char_coeffs = char_poly(&phi);
        let roots = aberth_roots(&char_coeffs, &mut rng);
        let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let separated = roots.iter().enumerate().all(|(i, zi)| {
            roots[i + 1..].iter().all(|zj| (zi - zj).norm() > 1e-6 * scale)
        });
        if !separated {
            continue;
        }
        let chart: Vec<C64> = (0..b).map(|_| random_complex(&mut rng)).collect();
        let segment = FourPlanesSegment {
            b,
            from: planes.clone(),
            to: planes.clone(),
            chart: chart.clone(),
        };
        let mut eigenpairs = Vec::with_capacity(b);
        let mut ok = true;
        for &lambda in &roots {
            let Some(v) = eigenvector(&phi, lambda, &chart, &mut rng) else {
                ok = false;
                break;
            };
            let mut packed = v;
            packed.push(lambda);
            match newton_correct(&segment, packed, 0.0, &cfg) {
                Some(polished) => eigenpairs.push(polished),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let solutions = eigenpairs
            .iter()
            .map(|packed| solution_from_eigenpair(b, &planes, packed))
            .collect::<Option<Vec<_>>>();
        let Some(solutions) = solutions else { continue };
        return Ok(FourPlanesProblem {
            instance: FourPlanesInstance { b, planes },
            solutions,
            eigenpairs,
            chart,
        });
    }
    Err(HomotopyError::DegenerateInstance(MAX_INSTANCE_RETRIES))
}

impl FourPlanesProblem {
    /// Numerical rank of `[u w K^j]` for each solution and each plane; a
    /// valid incidence drops the rank below `2 + b`.
    pub fn incidence_ranks(&self, tol: f64) -> Vec<Vec<usize>> {
        let b = self.instance.b;
        self.solutions
            .iter()
            .map(|sol| {
                (0..4)
                    .map(|j| {
                        let k = &self.instance.planes[j];
                        let rows: Mat = (0..2 * b)
                            .map(|r| {
                                let mut row = vec![sol.u[r], sol.w[r]];
                                row.extend(k[r].iter().copied());
                                row
                            })
                            .collect();
                        numerical_rank(rows, tol)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Monodromy of the eigen-line problem over loops in the space of
/// four-plane tuples. Same discard rules as the sparse case.
pub fn four_planes_monodromy(
    problem: &FourPlanesProblem,
    n_loops: usize,
    cfg: &TrackerConfig,
) -> Result<MonodromyOutcome, HomotopyError> {
    cfg.validate()?;
    let b = problem.instance.b;
    let base = &problem.instance.planes;
    let results: Vec<Option<Permutation>> = (0..n_loops)
        .into_par_iter()
        .map(|li| {
            let mut rng = loop_rng(cfg.rng_seed, li as u64);
            let v1: [Mat; 4] = std::array::from_fn(|_| random_matrix(&mut rng, 2 * b, b));
            let v2: [Mat; 4] = std::array::from_fn(|_| random_matrix(&mut rng, 2 * b, b));
            let legs = [
                (base.clone(), v1.clone()),
                (v1, v2.clone()),
                (v2, base.clone()),
            ];
            let mut states: Vec<Vec<C64>> = problem.eigenpairs.clone();
            for (from, to) in legs {
                let segment = FourPlanesSegment {
                    b,
                    from,
                    to,
                    chart: problem.chart.clone(),
                };
                let mut next = Vec::with_capacity(states.len());
                for state in &states {
                    match track_path(&segment, state, cfg) {
                        Ok(p) => next.push(p),
                        Err(_) => return None,
                    }
                }
                states = next;
            }
            match_endpoints(&problem.eigenpairs, &states, cfg.cluster_tol)
                .map(|images| Permutation::from_images(images).expect("matching is a bijection"))
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

/// Square eigen system `(phi(t) v - lambda v, c . v - 1)` over a segment of
/// plane tuples; unknowns packed as `[v, lambda]`.
struct FourPlanesSegment {
    b: usize,
    from: [Mat; 4],
    to: [Mat; 4],
    chart: Vec<C64>,
}

impl FourPlanesSegment {
    fn phi_at(&self, t: f64) -> Option<Mat> {
        let planes: [Mat; 4] = std::array::from_fn(|j| interpolate_mat(&self.from[j], &self.to[j], t));
        phi_of(self.b, &planes)
    }
}

impl SegmentFamily for FourPlanesSegment {
    fn dim(&self) -> usize {
        self.b + 1
    }

    fn eval(&self, x: &[C64], t: f64) -> Vec<C64> {
        let b = self.b;
        let (v, lambda) = (&x[..b], x[b]);
        let Some(phi) = self.phi_at(t) else {
            return vec![C64::new(f64::NAN, 0.0); b + 1]; // degenerate slice: force a step retry
        };
        let mut out = mat_vec(&phi, v);
        for (oi, vi) in out.iter_mut().zip(v) {
            *oi -= lambda * vi;
        }
        let affine: C64 = self.chart.iter().zip(v).map(|(c, vi)| c * vi).sum();
        out.push(affine - C64::new(1.0, 0.0));
        out
    }

    fn jacobian(&self, x: &[C64], t: f64) -> Vec<Vec<C64>> {
        let b = self.b;
        let (v, lambda) = (&x[..b], x[b]);
        let phi = match self.phi_at(t) {
            Some(p) => p,
            None => vec![vec![C64::new(f64::NAN, 0.0); b]; b],
        };
        let mut rows = Vec::with_capacity(b + 1);
        for i in 0..b {
            let mut row = phi[i].clone();
            row[i] -= lambda;
            row.push(-v[i]);
            rows.push(row);
        }
        let mut last: Vec<C64> = self.chart.clone();
        last.push(C64::new(0.0, 0.0));
        rows.push(last);
        rows
    }
}

fn interpolate_mat(a: &Mat, b: &Mat, t: f64) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| x * (1.0 - t) + y * t)
                .collect()
        })
        .collect()
}

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Mat {
    (0..rows)
        .map(|_| (0..cols).map(|_| random_complex(rng)).collect())
        .collect()
}

fn pairwise_transverse(b: usize, planes: &[Mat; 4]) -> bool {
    for i in 0..4 {
        for j in i + 1..4 {
            let rows: Mat = (0..2 * b)
                .map(|r| {
                    let mut row = planes[i][r].clone();
                    row.extend(planes[j][r].iter().copied());
                    row
                })
                .collect();
            if numerical_rank(rows, 1e-10) < 2 * b {
                return false;
            }
        }
    }
    true
}

/// `phi = F4^{-1} F3` where `F_j = C_j A_j^{-1}` comes from expressing the
/// columns of `K^j` as `K^1 A_j + K^2 C_j` (`j = 3, 4`).
fn phi_of(b: usize, planes: &[Mat; 4]) -> Option<Mat> {
    let m: Mat = (0..2 * b)
        .map(|r| {
            let mut row = planes[0][r].clone();
            row.extend(planes[1][r].iter().copied());
            row
        })
        .collect();
    let graph = |k: &Mat| -> Option<(Mat, Mat)> {
        let y = solve_multi(&m, k)?;
        let a: Mat = y[..b].to_vec();
        let c: Mat = y[b..].to_vec();
        Some((a, c))
    };
    let (a3, c3) = graph(&planes[2])?;
    let (a4, c4) = graph(&planes[3])?;
    let f3 = right_divide(&c3, &a3)?;
    let f4 = right_divide(&c4, &a4)?;
    solve_multi(&f4, &f3)
}

/// `C * A^{-1}` via transposed solves.
fn right_divide(c: &Mat, a: &Mat) -> Option<Mat> {
    let at = transpose(a);
    let ct = transpose(c);
    let xt = solve_multi(&at, &ct)?;
    Some(transpose(&xt))
}

fn transpose(a: &Mat) -> Mat {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

/// Monic characteristic polynomial by the Faddeev-LeVerrier recurrence;
/// coefficients ascending.
#[allow(clippy::needless_range_loop)] // diagonal updates
fn char_poly(a: &Mat) -> Vec<C64> {
    let b = a.len();
    let mut coeffs = vec![C64::new(0.0, 0.0); b + 1];
    coeffs[b] = C64::new(1.0, 0.0);
    let mut m = a.to_vec();
    for k in 1..=b {
        let trace: C64 = (0..b).map(|i| m[i][i]).sum();
        let c = -trace / (k as f64);
        coeffs[b - k] = c;
        if k < b {
            for i in 0..b {
                m[i][i] += c;
            }
            m = mat_mul(a, &m);
        }
    }
    coeffs
}

fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_deriv(coeffs: &[C64], z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (k, &c) in coeffs.iter().enumerate().rev().take(coeffs.len() - 1) {
        acc = acc * z + c * (k as f64);
    }
    acc
}

/// Aberth-Ehrlich simultaneous root refinement for a monic polynomial.
fn aberth_roots(coeffs: &[C64], rng: &mut impl Rng) -> Vec<C64> {
    let deg = coeffs.len() - 1;
    let radius = 1.0
        + coeffs[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..deg)
        .map(|i| {
            let angle = std::f64::consts::TAU * (i as f64 + 0.37) / (deg as f64)
                + 1e-3 * rng.gen_range(-1.0..1.0);
            C64::from_polar(radius * 0.7, angle)
        })
        .collect();
    for _ in 0..300 {
        let mut max_delta = 0.0f64;
        for i in 0..deg {
            let z = roots[i];
            let p = horner(coeffs, z);
            let dp = horner_deriv(coeffs, z);
            if dp.norm() == 0.0 {
                continue;
            }
            let w = p / dp;
            let s: C64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| (z - roots[j]).inv())
                .sum();
            let denom = C64::new(1.0, 0.0) - w * s;
            let delta = if denom.norm() > 1e-300 { w / denom } else { w };
            roots[i] -= delta;
            max_delta = max_delta.max(delta.norm());
        }
        let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max_delta < 1e-13 * scale {
            break;
        }
    }
    roots
}

/// Shifted inverse iteration toward the eigen-line of `lambda`, normalized
/// on the chart.
#[allow(clippy::needless_range_loop)] // diagonal shift
fn eigenvector(phi: &Mat, lambda: C64, chart: &[C64], rng: &mut impl Rng) -> Option<Vec<C64>> {
    let b = phi.len();
    let delta = 1e-10 * (1.0 + lambda.norm());
    let mut shifted = phi.to_vec();
    for i in 0..b {
        shifted[i][i] -= lambda + C64::new(delta, delta);
    }
    let mut v: Vec<C64> = (0..b).map(|_| random_complex(rng)).collect();
    for _ in 0..4 {
        v = solve(shifted.clone(), v)?;
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        for c in &mut v {
            *c /= norm;
        }
    }
    let affine: C64 = chart.iter().zip(&v).map(|(c, vi)| c * vi).sum();
    if affine.norm() < 1e-10 {
        return None; // eigenvector nearly orthogonal to the chart
    }
    for c in &mut v {
        *c /= affine;
    }
    Some(v)
}

/// Ambient basis of the solution 2-plane for a polished eigenpair.
fn solution_from_eigenpair(b: usize, planes: &[Mat; 4], packed: &[C64]) -> Option<TwoPlaneSolution> {
    let v = &packed[..b];
    let m: Mat = (0..2 * b)
        .map(|r| {
            let mut row = planes[0][r].clone();
            row.extend(planes[1][r].iter().copied());
            row
        })
        .collect();
    let y = solve_multi(&m, &planes[2])?;
    let a3: Mat = y[..b].to_vec();
    let c3: Mat = y[b..].to_vec();
    let f3 = right_divide(&c3, &a3)?;
    let u = mat_vec(&planes[0], v);
    let w = mat_vec(&planes[1], &mat_vec(&f3, v));
    Some(TwoPlaneSolution { u, w })
}
