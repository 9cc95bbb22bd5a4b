//! Cardano solution of real cubics `x^3 + a x^2 + b x + c = 0`.

use crate::scalar::Scalar;

/// Solution of a depressed-form cubic with its classification data.
#[derive(Debug, Clone)]
pub(crate) struct CubicSolution<S> {
    /// Real roots in ascending order (one or three; a repeated root appears
    /// with its multiplicity collapsed to distinct values).
    pub roots: Vec<S>,
    /// Cardano discriminant `Q = (p/3)^3 + (q/2)^2`; `Q > 0` means one real
    /// root, `Q <= 0` three real roots (counted with multiplicity).
    pub q_discriminant: S,
    /// Depressed-cubic coefficients `(p, q)` of `t^3 + p t + q = 0`.
    pub depressed: (S, S),
}

/// Solves `x^3 + a x^2 + b x + c = 0` over the reals.
///
/// Substituting `x = t - a/3` gives `t^3 + p t + q = 0` with
/// `p = b - a^2/3`, `q = 2a^3/27 - ab/3 + c`. For `Q > 0` the single real
/// root is `cbrt(-q/2 + sqrt(Q)) + cbrt(-q/2 - sqrt(Q))`, evaluated in the
/// cancellation-free order; for `Q <= 0` the three real roots come from the
/// trigonometric form.
pub(crate) fn solve_cubic<S: Scalar>(a: S, b: S, c: S) -> CubicSolution<S> {
    let three = S::of(3.0);
    let p = b - a * a / three;
    let q = S::of(2.0) * a * a * a / S::of(27.0) - a * b / three + c;
    let q_disc = (p / three).powi(3) + (q / S::of(2.0)).powi(2);
    let shift = a / three;

    let mut roots = if q_disc > S::zero() {
        let sq = q_disc.sqrt();
        let u = -q / S::of(2.0) + sq;
        let v = -q / S::of(2.0) - sq;
        // Avoid subtracting nearly equal quantities: take the cube root of the
        // larger-magnitude branch and recover the partner from p.
        let t = if u.abs() >= v.abs() {
            let au = u.cbrt();
            if au == S::zero() {
                v.cbrt()
            } else {
                au - p / (three * au)
            }
        } else {
            let bv = v.cbrt();
            if bv == S::zero() {
                u.cbrt()
            } else {
                bv - p / (three * bv)
            }
        };
        vec![t - shift]
    } else if p == S::zero() {
        // p = 0 with Q <= 0 forces q = 0: triple root at t = 0.
        vec![-shift]
    } else {
        // Three real roots: t_k = 2 sqrt(-p/3) cos((phi + 2 pi k)/3).
        let m = (-p / three).sqrt();
        let cos_arg = (-q / S::of(2.0)) / (m * m * m);
        let cos_arg = cos_arg.max(-S::one()).min(S::one());
        let phi = cos_arg.acos();
        let two_pi = S::of(std::f64::consts::TAU);
        (0..3)
            .map(|k| {
                let ang = (phi + two_pi * S::of(k as f64)) / three;
                S::of(2.0) * m * ang.cos() - shift
            })
            .collect()
    };

    roots.sort_by(|x, y| x.partial_cmp(y).expect("cubic roots are finite"));
    // One Newton polish per root: the trigonometric form is accurate to a few
    // ulps already, but polishing tightens clustered roots.
    for r in roots.iter_mut() {
        let f = ((*r + a) * *r + b) * *r + c;
        let df = (three * *r + S::of(2.0) * a) * *r + b;
        if df != S::zero() {
            let step = f / df;
            if step.abs() < S::of(1e-3) * (S::one() + r.abs()) {
                *r = *r - step;
            }
        }
    }

    CubicSolution {
        roots,
        q_discriminant: q_disc,
        depressed: (p, q),
    }
}
