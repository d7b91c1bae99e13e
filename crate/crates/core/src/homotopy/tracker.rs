//! Generic predictor-corrector continuation along one parameter segment.

use super::linalg::{norm_inf, solve};
use super::{C64, TrackerConfig};

/// A one-parameter family of square systems over `t in [0, 1]`.
///
/// The tracker only needs evaluation, the Jacobian in the unknowns, and the
/// parameter derivative; the default derivative is a central difference,
/// which is plenty for a first-order predictor.
pub trait SegmentFamily: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[C64], t: f64) -> Vec<C64>;
    fn jacobian(&self, x: &[C64], t: f64) -> Vec<Vec<C64>>;

    fn t_derivative(&self, x: &[C64], t: f64) -> Vec<C64> {
        let h = 1e-6;
        let hi = (t + h).min(1.0);
        let lo = (t - h).max(0.0);
        let fa = self.eval(x, hi);
        let fb = self.eval(x, lo);
        fa.iter()
            .zip(&fb)
            .map(|(a, b)| (a - b) / (hi - lo))
            .collect()
    }
}

/// Newton iteration at fixed `t`; succeeds when the residual drops below
/// `newton_tol`. One extra confirming step is taken after convergence so
/// accepted points sit at machine precision rather than just inside the
/// tolerance (endpoint matching depends on this).
pub fn newton_correct(
    family: &impl SegmentFamily,
    mut x: Vec<C64>,
    t: f64,
    cfg: &TrackerConfig,
) -> Option<Vec<C64>> {
    for _ in 0..cfg.max_newton_iters {
        let f = family.eval(&x, t);
        let residual = norm_inf(&f);
        if !residual.is_finite() {
            return None;
        }
        if residual < cfg.newton_tol {
            if let Some(polished) = newton_step(family, &x, t) {
                x = polished;
            }
            return Some(x);
        }
        x = newton_step_from(family, x, t, f)?;
    }
    let residual = norm_inf(&family.eval(&x, t));
    if residual.is_finite() && residual < cfg.newton_tol {
        Some(x)
    } else {
        None
    }
}

fn newton_step(family: &impl SegmentFamily, x: &[C64], t: f64) -> Option<Vec<C64>> {
    let f = family.eval(x, t);
    if !norm_inf(&f).is_finite() {
        return None;
    }
    newton_step_from(family, x.to_vec(), t, f)
}

fn newton_step_from(
    family: &impl SegmentFamily,
    mut x: Vec<C64>,
    t: f64,
    f: Vec<C64>,
) -> Option<Vec<C64>> {
    let j = family.jacobian(&x, t);
    let rhs: Vec<C64> = f.iter().map(|c| -c).collect();
    let dx = solve(j, rhs)?;
    for (xi, di) in x.iter_mut().zip(&dx) {
        *xi += di;
    }
    Some(x)
}

/// Tracks one solution from `t = 0` to `t = 1`: first-order tangent
/// predictor, Newton corrector, step doubling after two consecutive
/// successes and halving on failure. Returns the parameter reached on
/// failure (step underflow or corrector divergence at the start point).
///
/// A corrected point that lands far from the prediction is rejected even if
/// Newton converged: that is the signature of jumping onto another branch,
/// and jumps must surface as failed steps, not as quiet permutations.
pub fn track_path(
    family: &impl SegmentFamily,
    start: &[C64],
    cfg: &TrackerConfig,
) -> Result<Vec<C64>, f64> {
    let max_step = (cfg.initial_step * 2.0).min(0.25);
    let mut x = start.to_vec();
    let mut t = 0.0f64;
    let mut step = cfg.initial_step;
    let mut streak = 0u32;
    while t < 1.0 {
        let target = (t + step).min(1.0);
        let predicted = match predict(family, &x, t, target - t) {
            Some(p) => p,
            None => x.clone(), // singular tangent solve: fall back to constant prediction
        };
        let accepted = newton_correct(family, predicted.clone(), target, cfg)
            .filter(|corrected| !looks_like_a_jump(&x, &predicted, corrected));
        match accepted {
            Some(corrected) => {
                x = corrected;
                t = target;
                streak += 1;
                if streak >= 2 {
                    step = (step * 2.0).min(max_step);
                    streak = 0;
                }
            }
            None => {
                streak = 0;
                step /= 2.0;
                if step < cfg.min_step {
                    return Err(t);
                }
            }
        }
    }
    Ok(x)
}

/// The corrector should only polish the prediction; a move much larger than
/// the predicted displacement means another solution captured the iteration.
fn looks_like_a_jump(from: &[C64], predicted: &[C64], corrected: &[C64]) -> bool {
    let pred_len: f64 = dist2(from, predicted).sqrt();
    let move_len: f64 = dist2(from, corrected).sqrt();
    move_len > 3.0 * pred_len + 1e-8
}

fn dist2(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// First-order tangent step: `J dx = -F_t`, scaled by the step length.
fn predict(family: &impl SegmentFamily, x: &[C64], t: f64, h: f64) -> Option<Vec<C64>> {
    let j = family.jacobian(x, t);
    let ft = family.t_derivative(x, t);
    let rhs: Vec<C64> = ft.iter().map(|c| -c).collect();
    let velocity = solve(j, rhs)?;
    Some(
        x.iter()
            .zip(&velocity)
            .map(|(xi, vi)| xi + vi * h)
            .collect(),
    )
}
