//! Sign-based adaptive-step gradient descent (iRprop-).
//!
//! Only gradient signs steer the iteration, which makes the method robust
//! to the poor scaling of likelihood surfaces mixing O(1) shape parameters
//! with O(1e4) penalty terms.

/// Outcome of an optimization run.
#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// True when the run went stationary: every per-parameter step shrank
    /// below the tolerance, or the best value stopped improving for a full
    /// stall window. False means the iteration cap bound the result.
    pub converged: bool,
}

const GROW: f64 = 1.2;
const SHRINK: f64 = 0.5;
const MAX_STEP: f64 = 1.0;
const MIN_STEP: f64 = 1e-14;
/// Iterations without a meaningful best-value improvement before the run
/// counts as stationary. Long enough for the sign-based steps to contract
/// around a minimum once progress genuinely stops.
const STALL_WINDOW: usize = 100;

/// Minimizes `f` (returning objective and gradient) from `x0`, keeping every
/// iterate inside the box `[lo, hi]`. Iteration stops when all steps fall
/// below `step_tol`, when the best value stalls, or after `max_iter` rounds;
/// the best visited point wins.
pub(crate) fn minimize(
    f: impl Fn(&[f64]) -> (f64, Vec<f64>),
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    init_step: &[f64],
    max_iter: usize,
    step_tol: f64,
) -> Minimum {
    let n = x0.len();
    debug_assert!(lo.len() == n && hi.len() == n && init_step.len() == n);
    let clamp = |x: &mut [f64]| {
        for i in 0..n {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    };

    let mut x = x0.to_vec();
    clamp(&mut x);
    let (mut value, mut grad) = f(&x);
    let mut best_x = x.clone();
    let mut best_value = value;
    let mut step = init_step.to_vec();
    let mut prev_grad = vec![0.0f64; n];
    let mut converged = false;
    let mut iterations = 0;
    let mut last_improve = 0usize;

    for iter in 0..max_iter {
        iterations = iter + 1;
        for i in 0..n {
            let product = grad[i] * prev_grad[i];
            if product > 0.0 {
                step[i] = (step[i] * GROW).min(MAX_STEP);
            } else if product < 0.0 {
                step[i] = (step[i] * SHRINK).max(MIN_STEP);
                // iRprop-: skip the update that just overshot.
                grad[i] = 0.0;
            }
            x[i] -= grad[i].signum() * step[i] * if grad[i] == 0.0 { 0.0 } else { 1.0 };
        }
        clamp(&mut x);
        prev_grad.copy_from_slice(&grad);
        let (v, g) = f(&x);
        value = v;
        grad = g;
        if value < best_value && value.is_finite() {
            // Only improvements above 1e-6 relative reset the stall clock;
            // objective changes below that resolution are not progress worth
            // spending the remaining budget on.
            if best_value - value > 1e-12 + 1e-6 * best_value.abs() {
                last_improve = iter;
            }
            best_value = value;
            best_x.copy_from_slice(&x);
        }
        if step.iter().all(|s| *s < step_tol) || iter - last_improve >= STALL_WINDOW {
            converged = true;
            break;
        }
    }

    Minimum {
        x: best_x,
        value: best_value,
        iterations,
        converged,
    }
}
