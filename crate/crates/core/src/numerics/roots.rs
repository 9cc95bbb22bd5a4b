//! Bracketed scalar root finding.

use crate::error::{ModelError, Result};
use crate::scalar::Scalar;

/// Bisection on a sign change of `f` over `[a, b]`, refined until the
/// bracket width falls below `tol * max(1, |x|)`.
pub(crate) fn bisect<S: Scalar>(f: impl Fn(S) -> S, a: S, b: S, tol: S) -> Result<S> {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == S::zero() {
        return Ok(lo);
    }
    if fhi == S::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(ModelError::domain(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})"
        )));
    }
    let half = S::of(0.5);
    for _ in 0..200 {
        let mid = half * (lo + hi);
        if hi - lo <= tol * mid.abs().max(S::one()) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == S::zero() {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(half * (lo + hi))
}

/// Walks outward from `start` in steps of geometrically growing size until
/// `pred` holds, returning the last two probe points `(inside, outside)`
/// with `pred(inside) == false` and `pred(outside) == true`.
pub(crate) fn expand_until<S: Scalar>(
    start: S,
    initial_step: S,
    pred: impl Fn(S) -> bool,
) -> Result<(S, S)> {
    const MAX_DOUBLINGS: usize = 200;
    let mut inside = start;
    let mut step = initial_step;
    for _ in 0..MAX_DOUBLINGS {
        let outside = inside + step;
        if pred(outside) {
            return Ok((inside, outside));
        }
        inside = outside;
        step *= S::of(2.0);
    }
    Err(ModelError::numeric(format!(
        "bracket expansion from {start} never satisfied the predicate"
    )))
}
