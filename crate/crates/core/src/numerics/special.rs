//! Log-gamma, Kummer's confluent hypergeometric series, and the parabolic
//! cylinder function needed by the closed-form partition function.

use crate::error::{ModelError, Result};

/// Lanczos coefficients for g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Natural log of |Gamma(x)| via the Lanczos approximation, with the
/// reflection formula for x < 0.5. Poles at non-positive integers return
/// infinity.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        if x == x.floor() {
            return f64::INFINITY;
        }
        // |Gamma(x) Gamma(1-x)| = pi / |sin(pi x)|
        let s = (std::f64::consts::PI * x).sin().abs();
        return std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Kummer's confluent hypergeometric function Phi(a, b; t) by direct series
/// summation; stops once the term falls below 1e-16 of the running sum.
pub(crate) fn kummer(a: f64, b: f64, t: f64) -> Result<f64> {
    const MAX_TERMS: usize = 10_000;
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let denom = (b + kf) * (kf + 1.0);
        if denom == 0.0 {
            return Err(ModelError::domain(
                "confluent hypergeometric series hit a pole of the b parameter",
            ));
        }
        term *= (a + kf) * t / denom;
        sum += term;
        if term.abs() <= 1e-16 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(ModelError::numeric(format!(
        "confluent hypergeometric series did not converge for a={a}, b={b}, t={t}"
    )))
}

/// Largest series argument t = x^2/2 accepted by `cylinder_d_minus`.
const CYLINDER_T_MAX: f64 = 50.0;
/// Maximum tolerated relative cancellation in the two-term bracket.
const CYLINDER_CANCEL_MAX: f64 = 1e-8;

/// Parabolic cylinder function D_{-z}(x) for z > 0, assembled from two
/// Kummer series:
///
/// D_{-z}(x) = 2^{-z/2} e^{-x^2/4} [ sqrt(pi)/Gamma((1+z)/2) Phi(z/2, 1/2; t)
///             - sqrt(2 pi) x / Gamma(z/2) Phi((1+z)/2, 3/2; t) ],  t = x^2/2.
///
/// The two bracket terms nearly cancel for large positive x, so the result
/// carries a first-order cancellation estimate; arguments past the series
/// guard or past the cancellation budget are rejected (callers fall back to
/// quadrature, which stays authoritative).
///
/// Returns `(value, cancellation_estimate)`.
pub(crate) fn cylinder_d_minus(z: f64, x: f64) -> Result<(f64, f64)> {
    if z <= 0.0 {
        return Err(ModelError::domain("cylinder order -z requires z > 0"));
    }
    let t = 0.5 * x * x;
    if t > CYLINDER_T_MAX {
        return Err(ModelError::numeric(format!(
            "cylinder series argument t={t:.3} exceeds guard {CYLINDER_T_MAX}"
        )));
    }
    let phi1 = kummer(0.5 * z, 0.5, t)?;
    let phi2 = kummer(0.5 * (1.0 + z), 1.5, t)?;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let term1 = sqrt_pi / ln_gamma(0.5 * (1.0 + z)).exp() * phi1;
    let term2 = (2.0 * std::f64::consts::PI).sqrt() * x / ln_gamma(0.5 * z).exp() * phi2;
    let bracket = term1 - term2;
    let cancellation = if bracket == 0.0 {
        f64::INFINITY
    } else {
        f64::EPSILON * (term1.abs() + term2.abs()) / bracket.abs()
    };
    if cancellation > CYLINDER_CANCEL_MAX {
        return Err(ModelError::numeric(format!(
            "cylinder bracket loses too many digits (cancellation {cancellation:.3e}) \
             at z={z}, x={x}"
        )));
    }
    let value = (-0.5 * z * std::f64::consts::LN_2 - 0.5 * t).exp() * bracket;
    Ok((value, cancellation))
}
