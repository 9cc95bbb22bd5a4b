//! The four potentials of the model: classical U(x), log-space V(y),
//! effective U_eff(x), and the supersymmetric partner pair U-(y), U+(y),
//! together with their derivatives, extrema, and the barrier report.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::numerics::cubic::solve_cubic;
use crate::numerics::roots::bisect;
use crate::params::{classify_regime, ModelParams, RegimeKind};
use crate::scalar::Scalar;

/// Stationary points of a quartic x-space potential.
///
/// When `real` is false the nonzero extrema are complex and every
/// level/curvature field is NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrema<S> {
    /// The trivial extremum at the origin.
    pub x0: S,
    /// Larger nonzero stationary point.
    pub x_plus: S,
    /// Smaller nonzero stationary point.
    pub x_minus: S,
    /// U'' at `x_plus`.
    pub curvature_plus: S,
    /// U'' at `x_minus`.
    pub curvature_minus: S,
    /// True when the discriminant of the stationarity condition is >= 0.
    pub real: bool,
}

/// Geometry of the metastable well of the log-space potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierReport<S> {
    /// Log-location of the metastable minimum.
    pub y_min: S,
    /// Log-location of the barrier top (always left of the well).
    pub y_max: S,
    /// Barrier height V(y_max) - V(y_min), by direct evaluation of V.
    pub e_b: S,
    /// V'' at the minimum (positive).
    pub v2_min: S,
    /// V'' at the barrier top (negative).
    pub v2_max: S,
    /// Noise temperature sigma^2/2.
    pub temperature: S,
}

/// Partner-potential sector selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sector {
    Minus,
    Plus,
}

impl Sector {
    /// +1 for the plus sector, -1 for the minus sector.
    fn sign<S: Scalar>(self) -> S {
        match self {
            Sector::Minus => -S::one(),
            Sector::Plus => S::one(),
        }
    }
}

/// Real stationary points of a partner potential in x = e^y, with the
/// Cardano classification data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardanoRoots<S> {
    /// Real roots of the stationarity cubic, ascending. Roots <= 0 have no
    /// log-space counterpart (the trivial stationary limit sits at
    /// y -> -infinity, x = 0).
    pub roots: Vec<S>,
    /// Cardano Q: negative means three distinct real roots, zero repeated
    /// roots, positive a single real root.
    pub discriminant_q: S,
    /// (a, b, c, p, q): monic cubic coefficients and its depressed form.
    pub coefficients: (S, S, S, S, S),
}

/// Classical potential U(x) = -theta x^2/2 + kappa x^3/3 + g x^4/4.
pub fn classical_potential<S: Scalar>(x: S, p: &ModelParams<S>) -> S {
    let half = S::of(0.5);
    let third = S::of(1.0 / 3.0);
    let quarter = S::of(0.25);
    x * x * (-half * p.theta + x * (third * p.kappa + x * quarter * p.g))
}

/// Deterministic drift f(x) = -U'(x) = theta x - kappa x^2 - g x^3.
pub fn classical_drift<S: Scalar>(x: S, p: &ModelParams<S>) -> S {
    x * (p.theta - x * (p.kappa + x * p.g))
}

/// U''(x) = -theta + 2 kappa x + 3 g x^2.
fn classical_curvature<S: Scalar>(x: S, p: &ModelParams<S>) -> S {
    -p.theta + x * (S::of(2.0) * p.kappa + S::of(3.0) * p.g * x)
}

/// Roots of g x^2 + kappa x - theta_like = 0, evaluated cancellation-free,
/// as (larger, smaller). Requires g > 0.
pub(crate) fn drift_quadratic_roots<S: Scalar>(theta_like: S, kappa: S, g: S) -> Option<(S, S)> {
    let disc = kappa * kappa + S::of(4.0) * g * theta_like;
    if disc < S::zero() {
        return None;
    }
    let sqrt_d = disc.sqrt();
    // q = -(kappa + sign(kappa) sqrt_d)/2 keeps both roots away from
    // subtractive cancellation.
    let q = if kappa >= S::zero() {
        -S::of(0.5) * (kappa + sqrt_d)
    } else {
        -S::of(0.5) * (kappa - sqrt_d)
    };
    let r1 = q / g;
    let r2 = if q == S::zero() {
        S::zero()
    } else {
        -theta_like / q
    };
    Some((r1.max(r2), r1.min(r2)))
}

/// Stationary points of the classical potential: the origin plus the roots
/// of g x^2 + kappa x - theta = 0. With g = 0 the single nonzero extremum
/// theta/kappa is reported in both slots (kappa must then be nonzero).
pub fn classical_extrema<S: Scalar>(p: &ModelParams<S>) -> Result<Extrema<S>> {
    if p.g == S::zero() {
        if p.kappa == S::zero() {
            return Err(ModelError::domain(
                "classical extrema need g > 0 or kappa != 0",
            ));
        }
        let x = p.theta / p.kappa;
        let curvature = classical_curvature(x, p);
        return Ok(Extrema {
            x0: S::zero(),
            x_plus: x,
            x_minus: x,
            curvature_plus: curvature,
            curvature_minus: curvature,
            real: true,
        });
    }
    match drift_quadratic_roots(p.theta, p.kappa, p.g) {
        Some((x_plus, x_minus)) => Ok(Extrema {
            x0: S::zero(),
            x_plus,
            x_minus,
            curvature_plus: classical_curvature(x_plus, p),
            curvature_minus: classical_curvature(x_minus, p),
            real: true,
        }),
        None => Ok(Extrema {
            x0: S::zero(),
            x_plus: S::nan(),
            x_minus: S::nan(),
            curvature_plus: S::nan(),
            curvature_minus: S::nan(),
            real: false,
        }),
    }
}

/// Nonzero classical extrema in the zero-level parametrization:
/// (3/8)((a+b) +- sqrt((a+b)^2 - 32 ab / 9)).
pub fn classical_extrema_ab<S: Scalar>(a: S, b: S) -> Result<(S, S)> {
    let s = a + b;
    let radicand = s * s - S::of(32.0 / 9.0) * a * b;
    if radicand < S::zero() {
        return Err(ModelError::domain(
            "zero-level points give complex extrema",
        ));
    }
    let r = radicand.sqrt();
    let scale = S::of(3.0 / 8.0);
    Ok((scale * (s + r), scale * (s - r)))
}

/// Log-space potential V(y) = -theta_bar y + kappa e^y + g e^{2y}/2.
pub fn log_potential<S: Scalar>(y: S, p: &ModelParams<S>) -> S {
    let x = y.exp();
    -p.theta_bar() * y + x * (p.kappa + S::of(0.5) * p.g * x)
}

/// V'(y) = -theta_bar + kappa e^y + g e^{2y}.
pub fn log_potential_d1<S: Scalar>(y: S, p: &ModelParams<S>) -> S {
    let x = y.exp();
    -p.theta_bar() + x * (p.kappa + p.g * x)
}

/// V''(y) = kappa e^y + 2 g e^{2y}.
pub fn log_potential_d2<S: Scalar>(y: S, p: &ModelParams<S>) -> S {
    let x = y.exp();
    x * (p.kappa + S::of(2.0) * p.g * x)
}

/// Ratio below which closed-form extrema are considered ill-conditioned and
/// refined by bisection on V'.
const DEGENERATE_DISC_RATIO: f64 = 1e-8;

/// Well and barrier of the log-space potential in the metastable regime.
///
/// The larger x-root of V' is the minimum (V'' > 0 there), the smaller the
/// barrier top; the barrier height comes from direct evaluation of V at the
/// two points.
pub fn barrier<S: Scalar>(p: &ModelParams<S>) -> Result<BarrierReport<S>> {
    let disc = p.discriminant();
    if classify_regime(p, None).kind != RegimeKind::Metastable {
        return Err(ModelError::NoBarrier {
            discriminant: disc.to_f64().unwrap_or(f64::NAN),
        });
    }
    let (mut x_well, mut x_top) = drift_quadratic_roots(p.theta_bar(), p.kappa, p.g)
        .expect("metastable regime has real extrema");

    if disc < S::of(DEGENERATE_DISC_RATIO) * p.kappa * p.kappa {
        // Nearly degenerate extrema: polish each root by bisection on V'
        // around the parabola vertex.
        let vertex = -p.kappa / (S::of(2.0) * p.g);
        let dv = |x: S| -p.theta_bar() + x * (p.kappa + p.g * x);
        let tol = S::of(1e-12);
        let two = S::of(2.0);
        if let Ok(r) = bisect(dv, vertex, two * x_well - vertex, tol) {
            x_well = r;
        }
        if let Ok(r) = bisect(dv, two * x_top - vertex, vertex, tol) {
            x_top = r;
        }
    }

    let y_min = x_well.ln();
    let y_max = x_top.ln();
    Ok(BarrierReport {
        y_min,
        y_max,
        e_b: log_potential(y_max, p) - log_potential(y_min, p),
        v2_min: log_potential_d2(y_min, p),
        v2_max: log_potential_d2(y_max, p),
        temperature: p.temperature(),
    })
}

/// Coefficient of -ln x in (sigma^2/2) U_eff: theta - (sigma^2/2)(4 - nu).
fn effective_log_coefficient<S: Scalar>(p: &ModelParams<S>) -> S {
    p.theta - p.temperature() * (S::of(4.0) - p.nu.nu::<S>())
}

/// Effective potential of the stationary Fokker-Planck problem,
/// U_eff(x) = (2/sigma^2)[kappa x + g x^2/2 - (theta - (sigma^2/2)(4 - nu)) ln x].
pub fn effective_potential<S: Scalar>(x: S, p: &ModelParams<S>) -> Result<S> {
    if x <= S::zero() {
        return Err(ModelError::domain(
            "effective potential has an essential singularity at x <= 0",
        ));
    }
    let bracket =
        p.kappa * x + S::of(0.5) * p.g * x * x - effective_log_coefficient(p) * x.ln();
    Ok(bracket / p.temperature())
}

/// True when the origin repels probability: the ln x coefficient of the
/// effective potential is positive, i.e. theta > (4 - nu) sigma^2/2.
pub fn origin_repelling<S: Scalar>(p: &ModelParams<S>) -> bool {
    effective_log_coefficient(p) > S::zero()
}

/// Stationary points of the effective potential: the classical extremum
/// condition with theta shifted to theta - (4 - nu) sigma^2/2 + sigma^2/2
/// ... i.e. roots of g x^2 + kappa x - (theta - (4 - nu) sigma^2/2) = 0,
/// returned as (larger, smaller). For nu = 2 this is the classical result
/// with theta -> theta - sigma^2.
pub fn effective_extrema<S: Scalar>(p: &ModelParams<S>) -> Result<(S, S)> {
    if p.g <= S::zero() {
        return Err(ModelError::domain("effective extrema require g > 0"));
    }
    drift_quadratic_roots(effective_log_coefficient(p), p.kappa, p.g)
        .ok_or_else(|| ModelError::domain("effective potential has no real extrema"))
}

/// Partner potentials (U-, U+) as quartic polynomials in x = e^y:
/// U± = theta_bar^2/2 - kappa(theta_bar -+ sigma^2/2) x
///      + (kappa^2/2 - g theta_bar +- g sigma^2) x^2 + kappa g x^3 + g^2 x^4 / 2.
pub fn qm_potentials<S: Scalar>(y: S, p: &ModelParams<S>) -> (S, S) {
    let x = y.exp();
    let tb = p.theta_bar();
    let half_s2 = p.temperature();
    let half = S::of(0.5);
    let eval = |sign: S| {
        half * tb * tb
            + x * (-p.kappa * (tb - sign * half_s2)
                + x * (half * p.kappa * p.kappa - p.g * tb + sign * S::of(2.0) * p.g * half_s2
                    + x * (p.kappa * p.g + x * half * p.g * p.g)))
    };
    (eval(-S::one()), eval(S::one()))
}

/// Partner potentials through the superpotential route
/// U± = (V')^2/2 +- (sigma^2/2) V''; kept separate from `qm_potentials` so
/// the algebraic identity between the two stays testable.
pub fn qm_potentials_from_v<S: Scalar>(y: S, p: &ModelParams<S>) -> (S, S) {
    let d1 = log_potential_d1(y, p);
    let d2 = log_potential_d2(y, p);
    let base = S::of(0.5) * d1 * d1;
    let shift = p.temperature() * d2;
    (base - shift, base + shift)
}

/// Stationary points of a partner potential in x = e^y via Cardano's method
/// on x^3 + a x^2 + b x + c = 0 with a = 3 kappa/(2g),
/// b = (kappa^2/2 - g theta_bar +- g sigma^2)/g^2,
/// c = -kappa (theta_bar -+ sigma^2/2)/(2 g^2).
pub fn qm_extrema<S: Scalar>(p: &ModelParams<S>, sector: Sector) -> Result<CardanoRoots<S>> {
    if p.g <= S::zero() {
        return Err(ModelError::domain(
            "partner-potential extrema require g > 0 (cubic degenerates otherwise)",
        ));
    }
    let sign = sector.sign::<S>();
    let tb = p.theta_bar();
    let s2 = S::of(2.0) * p.temperature();
    let g2 = p.g * p.g;
    let a = S::of(1.5) * p.kappa / p.g;
    let b = (S::of(0.5) * p.kappa * p.kappa - p.g * tb + sign * p.g * s2) / g2;
    let c = -p.kappa * (tb - sign * S::of(0.5) * s2) / (S::of(2.0) * g2);
    let solution = solve_cubic(a, b, c);
    let (dp, dq) = solution.depressed;
    Ok(CardanoRoots {
        roots: solution.roots,
        discriminant_q: solution.q_discriminant,
        coefficients: (a, b, c, dp, dq),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Calculus;

    fn mp(theta: f64, kappa: f64, g: f64, sigma: f64) -> ModelParams<f64> {
        ModelParams::new(theta, kappa, g, sigma, Calculus::Ito).unwrap()
    }

    /// Canonical test potential: theta_bar = -1, kappa = -3, g = 2, so the
    /// log-space extrema sit exactly at x = 1 (well) and x = 1/2 (barrier).
    fn tp1(sigma: f64) -> ModelParams<f64> {
        ModelParams::from_theta_bar(-1.0, -3.0, 2.0, sigma, Calculus::Ito).unwrap()
    }

    fn axp_2010() -> ModelParams<f64> {
        mp(-1.6485, -4.9464, 3.7041, 0.0318)
    }

    #[test]
    fn classical_potential_and_drift_examples() {
        let p = mp(-1.0, -0.975, 0.2, 0.2);
        assert_eq!(classical_potential(0.0, &p), 0.0);
        assert_eq!(classical_drift(0.0, &p), 0.0);
        assert!((classical_drift(1.0, &p) - (-0.225)).abs() < 1e-15);
        // Zero levels of U sit at a = 2.5 and b = 4.
        for x in [2.5, 4.0] {
            assert!(classical_potential(x, &p).abs() < 1e-13, "U({x})");
        }
    }

    #[test]
    fn drift_is_cpt_antisymmetric() {
        let p = mp(0.3, 0.5, 0.1, 0.2);
        let flipped = mp(0.3, -0.5, 0.1, 0.2);
        for x in [0.7, -1.3, 0.05, 4.0] {
            let lhs = classical_drift(-x, &flipped);
            let rhs = -classical_drift(x, &p);
            assert!((lhs - rhs).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn gbm_limit_drift_is_linear() {
        let p = mp(0.17, 0.0, 0.0, 0.2);
        for x in [0.0, 0.3, 2.0, 100.0] {
            assert_eq!(classical_drift(x, &p), 0.17 * x);
        }
    }

    #[test]
    fn classical_extrema_examples() {
        let p = mp(-1.0, -0.975, 0.2, 0.2);
        let e = classical_extrema(&p).unwrap();
        assert!(e.real);
        assert!((e.x_plus - 3.407_760_918_5).abs() < 1e-9);
        assert!((e.x_minus - 1.467_239_081_5).abs() < 1e-9);
        // Interior max/min of U alternate in curvature sign.
        assert!(e.curvature_plus * e.curvature_minus < 0.0);

        // Agrees with the zero-level parametrization that produced p.
        let (ap, am) = classical_extrema_ab(2.5, 4.0).unwrap();
        assert!((ap - e.x_plus).abs() < 1e-10);
        assert!((am - e.x_minus).abs() < 1e-10);

        // kappa = 0: symmetric pair +-sqrt(theta/g).
        let p = mp(1.0, 0.0, 0.32, 0.2);
        let e = classical_extrema(&p).unwrap();
        let want = (1.0f64 / 0.32).sqrt();
        assert!((e.x_plus - want).abs() < 1e-12);
        assert!((e.x_minus + want).abs() < 1e-12);
    }

    #[test]
    fn classical_extrema_degenerate_g() {
        let p = mp(0.1, 0.5, 0.0, 0.2);
        let e = classical_extrema(&p).unwrap();
        assert_eq!(e.x_plus, 0.2);
        assert_eq!(e.x_minus, 0.2);
        assert!(classical_extrema(&mp(0.1, 0.0, 0.0, 0.2)).is_err());
    }

    #[test]
    fn classical_extrema_complex_case() {
        // theta < -kappa^2/(4g): no nonzero stationary points.
        let e = classical_extrema(&mp(-1.0, 0.2, 0.5, 0.2)).unwrap();
        assert!(!e.real);
        assert!(e.x_plus.is_nan() && e.curvature_minus.is_nan());
    }

    #[test]
    fn small_g_expansion_matches() {
        let (g, theta, kappa) = (1e-4, 0.1, 0.5);
        let p = mp(theta, kappa, g, 0.2);
        let e = classical_extrema(&p).unwrap();
        let first_order = theta / kappa * (1.0 - g * theta / (kappa * kappa));
        let rel = ((e.x_plus - first_order) / e.x_plus).abs();
        assert!(rel < 1e-8, "first-order expansion off by {rel:.3e}");
    }

    #[test]
    fn analytic_extrema_have_zero_derivative() {
        // |U'(root)| <= 1e-9 (1 + |root|) under each potential's own scale.
        let mut state = 0x1357_9BDFu64;
        let mut draw = |lo: f64, hi: f64| {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
            lo + (hi - lo) * ((state >> 11) as f64 / (1u64 << 53) as f64)
        };
        for _ in 0..100 {
            let p = mp(draw(-2.0, 2.0), draw(-3.0, 3.0), draw(0.05, 2.0), 0.2);
            let e = classical_extrema(&p).unwrap();
            if !e.real {
                continue;
            }
            for x in [e.x_plus, e.x_minus] {
                let residual = classical_drift(x, &p).abs();
                assert!(residual <= 1e-9 * (1.0 + x.abs()), "residual {residual:.3e}");
            }
        }
    }

    #[test]
    fn log_potential_fixture_values() {
        let p = tp1(0.1);
        assert!((log_potential(0.0, &p) - (-2.0)).abs() < 1e-15);
        let v_top = log_potential(0.5f64.ln(), &p);
        assert!((v_top - (-1.943_147_180_559_945)).abs() < 1e-14);
        // Stationarity at the well.
        assert!(log_potential_d1(0.0, &p).abs() < 1e-15);
    }

    #[test]
    fn log_and_x_space_drifts_agree() {
        // Chain rule: -V'(ln x) = f(x)/x - sigma^2/2.
        let p = axp_2010();
        let x = 0.7f64;
        let lhs = -log_potential_d1(x.ln(), &p);
        let rhs = classical_drift(x, &p) / x - p.sigma * p.sigma / 2.0;
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn barrier_fixture_tp1() {
        let b = barrier(&tp1(0.1)).unwrap();
        assert!((b.y_min.exp() - 1.0).abs() < 1e-12);
        assert!((b.y_max.exp() - 0.5).abs() < 1e-12);
        assert!((b.e_b - 0.056_852_819_440_054_69).abs() < 1e-14);
        assert!((b.v2_min - 1.0).abs() < 1e-12);
        assert!((b.v2_max - (-0.5)).abs() < 1e-12);
        assert!((b.temperature - 0.005).abs() < 1e-18);
        assert!(b.y_max < b.y_min && b.e_b > 0.0);
    }

    #[test]
    fn barrier_fixture_axp_2010() {
        let b = barrier(&axp_2010()).unwrap();
        assert!((b.y_min.exp() - 0.692_782).abs() < 1e-6);
        assert!((b.y_max.exp() - 0.642_603).abs() < 1e-6);
        // Height is a difference of near-equal values; the closed-form
        // evaluation stays reproducible to ~1e-9 relative.
        assert!(((b.e_b - 1.168_498e-4) / 1.168_498e-4).abs() < 1e-5);
        assert!((b.v2_min - 0.128_764_43).abs() < 1e-7);
        assert!((b.v2_max - (-0.119_437_98)).abs() < 1e-7);
    }

    #[test]
    fn no_barrier_outside_metastable_regime() {
        // theta_bar > 0.
        let err = barrier(&mp(0.5, -3.0, 2.0, 0.1)).unwrap_err();
        assert!(matches!(err, ModelError::NoBarrier { .. }));
        // Complex extrema: discriminant 1 - 8 < 0.
        let p = ModelParams::from_theta_bar(-1.0, -1.0, 2.0, 0.1, Calculus::Ito).unwrap();
        match barrier(&p).unwrap_err() {
            ModelError::NoBarrier { discriminant } => {
                assert!((discriminant - (-7.0)).abs() < 1e-12)
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn nearly_degenerate_barrier_is_refined() {
        // Discriminant ~ 4e-9 kappa^2 forces the bisection path.
        let kappa = -3.0f64;
        let g = 2.0;
        let disc_target = 1e-9 * kappa * kappa;
        let theta_bar = (disc_target - kappa * kappa) / (4.0 * g);
        let p = ModelParams::from_theta_bar(theta_bar, kappa, g, 0.1, Calculus::Ito).unwrap();
        let b = barrier(&p).unwrap();
        assert!(log_potential_d1(b.y_min, &p).abs() < 1e-9);
        assert!(log_potential_d1(b.y_max, &p).abs() < 1e-9);
        assert!(b.y_max < b.y_min && b.e_b >= 0.0);
    }

    #[test]
    fn effective_potential_domain_and_extrema() {
        let p = axp_2010();
        assert!(effective_potential(0.0, &p).is_err());
        assert!(effective_potential(-1.0, &p).is_err());

        // nu = 2 extrema equal classical extrema with theta -> theta - sigma^2.
        let shifted = mp(p.theta - p.sigma * p.sigma, p.kappa, p.g, p.sigma);
        let classical = classical_extrema(&shifted).unwrap();
        let (ep, em) = effective_extrema(&p).unwrap();
        assert!((ep - classical.x_plus).abs() < 1e-12);
        assert!((em - classical.x_minus).abs() < 1e-12);
    }

    #[test]
    fn effective_potential_noiseless_reduction() {
        // (sigma^2/2) U_eff at x = 1 is kappa + g/2 for every sigma: the ln
        // term vanishes and the bracket is sigma-free.
        for sigma in [0.5, 0.1, 1e-3] {
            let p = mp(0.3, -0.7, 0.4, sigma);
            let u = effective_potential(1.0, &p).unwrap();
            let bracket = u * p.temperature();
            assert!((bracket - (-0.7 + 0.2)).abs() < 1e-12, "sigma = {sigma}");
        }
    }

    #[test]
    fn origin_attraction_flag() {
        // TP1 with sigma^2 = 0.02: theta = -0.99 < sigma^2, attracting.
        assert!(!origin_repelling(&tp1(0.02f64.sqrt())));
        // Strongly positive drift repels.
        assert!(origin_repelling(&mp(0.5, -1.0, 0.5, 0.2)));
        // Threshold is theta = (4 - nu) sigma^2/2.
        let sigma = 0.3f64;
        assert!(!origin_repelling(&mp(sigma * sigma, -1.0, 0.5, sigma)));
        assert!(origin_repelling(&mp(sigma * sigma + 1e-12, -1.0, 0.5, sigma)));
    }

    #[test]
    fn partner_potentials_share_asymptote() {
        let p = tp1(0.02f64.sqrt());
        let (um, up) = qm_potentials(-30.0, &p);
        assert!((um - 0.5).abs() < 1e-12);
        assert!((up - 0.5).abs() < 1e-12);
    }

    #[test]
    fn partner_potential_routes_agree() {
        let p = axp_2010();
        for y in [-2.0, -0.5, 0.0, 0.3, 1.0] {
            let (um, up) = qm_potentials(y, &p);
            let (vm, vp) = qm_potentials_from_v(y, &p);
            let scale = um.abs().max(up.abs()).max(1.0);
            assert!((um - vm).abs() < 1e-12 * scale, "y = {y}");
            assert!((up - vp).abs() < 1e-12 * scale, "y = {y}");
        }
    }

    #[test]
    fn partner_gap_is_sigma_squared_v2() {
        let p = tp1(0.3);
        for y in [-1.0, 0.2, 0.9] {
            let (um, up) = qm_potentials(y, &p);
            let gap = p.sigma * p.sigma * log_potential_d2(y, &p);
            assert!((up - um - gap).abs() < 1e-12);
        }
    }

    #[test]
    fn cardano_fixture_roots() {
        let p = tp1(0.02f64.sqrt());
        let minus = qm_extrema(&p, Sector::Minus).unwrap();
        let (a, b, c, _, _) = minus.coefficients;
        assert!((a - (-2.25)).abs() < 1e-12);
        assert!((b - 1.615).abs() < 1e-12);
        assert!((c - (-0.371_25)).abs() < 1e-12);
        assert!(minus.discriminant_q < 0.0, "three real roots expected");
        let want = [0.511_756_90, 0.696_118_17, 1.042_124_93];
        assert_eq!(minus.roots.len(), 3);
        for (got, want) in minus.roots.iter().zip(want) {
            assert!((got - want).abs() < 1e-7, "got {got}, want {want}");
        }

        let plus = qm_extrema(&p, Sector::Plus).unwrap();
        let (_, b, c, _, _) = plus.coefficients;
        assert!((b - 1.635).abs() < 1e-12);
        assert!((c - (-0.378_75)).abs() < 1e-12);
        let want = [0.491_178_18, 0.831_887_75, 0.926_934_07];
        for (got, want) in plus.roots.iter().zip(want) {
            assert!((got - want).abs() < 1e-7, "got {got}, want {want}");
        }
    }

    #[test]
    fn cardano_roots_are_stationary_points() {
        let p = tp1(0.02f64.sqrt());
        for sector in [Sector::Minus, Sector::Plus] {
            let result = qm_extrema(&p, sector).unwrap();
            for &x in &result.roots {
                assert!(x > 0.0, "fixture roots all have log counterparts");
                let y = x.ln();
                // Independent residual: centered difference of the quartic.
                let h = 1e-6;
                let pick = |v: (f64, f64)| match sector {
                    Sector::Minus => v.0,
                    Sector::Plus => v.1,
                };
                let du =
                    (pick(qm_potentials(y + h, &p)) - pick(qm_potentials(y - h, &p))) / (2.0 * h);
                assert!(du.abs() < 1e-9, "dU/dy = {du:.3e} at root {x}");
            }
        }
        assert!(qm_extrema(&mp(0.1, 0.5, 0.0, 0.2), Sector::Minus).is_err());
    }

    #[test]
    fn cardano_agrees_with_scanning_root_finder() {
        let mut state = 0xFEED_FACEu64;
        let mut draw = |lo: f64, hi: f64| {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
            lo + (hi - lo) * ((state >> 11) as f64 / (1u64 << 53) as f64)
        };
        let mut tested = 0;
        while tested < 100 {
            let p = ModelParams::from_theta_bar(
                draw(-2.0, -0.05),
                draw(-4.0, -0.5),
                draw(0.1, 3.0),
                draw(0.05, 0.4),
                Calculus::Ito,
            )
            .unwrap();
            if p.discriminant() < 0.0 {
                continue;
            }
            tested += 1;
            for sector in [Sector::Minus, Sector::Plus] {
                let result = qm_extrema(&p, sector).unwrap();
                let (a, b, c, _, _) = result.coefficients;
                let poly = |x: f64| x * x * x + a * x * x + b * x + c;
                // Companion root finder: sign scan + bisection.
                let mut brute = Vec::new();
                let (lo, hi) = (-50.0, 50.0);
                let n = 20_000;
                let mut prev = poly(lo);
                for i in 1..=n {
                    let x = lo + (hi - lo) * i as f64 / n as f64;
                    let value = poly(x);
                    if prev == 0.0 {
                        brute.push(lo + (hi - lo) * (i - 1) as f64 / n as f64);
                    } else if prev.signum() != value.signum() {
                        let left = lo + (hi - lo) * (i - 1) as f64 / n as f64;
                        brute.push(bisect(poly, left, x, 1e-14).unwrap());
                    }
                    prev = value;
                }
                assert_eq!(result.roots.len(), brute.len(), "root count");
                for (got, want) in result.roots.iter().zip(&brute) {
                    assert!(
                        (got - want).abs() < 1e-10 * (1.0 + want.abs()),
                        "cardano {got} vs scan {want}"
                    );
                }
            }
        }
    }
}
