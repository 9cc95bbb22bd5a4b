//! Zero-energy instanton and bounce trajectories of the log-space flow.
//!
//! The escape path solves the inverted-potential flow dy/dt = +V'(y) from the
//! well bottom (t -> -inf) to the barrier top (t -> +inf). In levels x = e^y
//! the flow factorizes as dx/dt = g x (x - x1)(x - x2) over the stationary
//! levels x1 < x2, which integrates in closed form to a signed inverse map
//! t(x); trajectories invert that map pointwise by bisection. The
//! anti-instanton is the time reversal, and a bounce is an instanton followed
//! by an anti-instanton at a configurable separation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::numerics::roots::bisect;
use crate::params::ModelParams;
use crate::potentials::{barrier, drift_quadratic_roots, log_potential, log_potential_d1};
use crate::scalar::Scalar;

/// Relative clamp distance from the stationary levels, where the closed-form
/// time map diverges logarithmically.
const ENDPOINT_CLAMP: f64 = 1e-12;

/// Endpoint gap beyond this fraction of the extrema separation flags the time
/// span as too short to approach the asymptotes.
const GAP_WARN_FRACTION: f64 = 1e-6;

/// Branch of the signed time map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// Trajectory family of the zero-energy flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstantonKind {
    /// Well to barrier top, dy/dt = +V'(y).
    Instanton,
    /// Time reversal of the instanton, dy/dt = -V'(y).
    AntiInstanton,
    /// Instanton followed by an anti-instanton; returns to the well.
    Bounce,
}

/// Sampled trajectory on a symmetric time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstantonTrajectory {
    /// Uniform grid on [-T, T], mirrored exactly about 0.
    pub times: Vec<f64>,
    /// Log-price samples y(t_i).
    pub values: Vec<f64>,
    pub kind: InstantonKind,
    /// (y at -T, y at +T).
    pub endpoints: (f64, f64),
    /// Action of the untruncated solution: the barrier height for a single
    /// (anti-)instanton and twice that for the bounce.
    pub action_s0: f64,
    /// Largest distance of an achieved endpoint from its asymptote.
    pub endpoint_gap: f64,
    /// Set when the time span is too short to approach the asymptotes.
    pub warning: Option<String>,
}

/// Action of a monotone segment of the zero-energy flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstantonAction<S> {
    /// S0 = V(y_to) - V(y_from), in potential units.
    pub s0: S,
    /// A = 2 S0 / sigma^2, the exponent of the escape probability.
    pub noise_scaled: S,
}

impl<S: Scalar> InstantonAction<S> {
    /// exp(-A), the Arrhenius factor of the transition.
    pub fn escape_probability(&self) -> S {
        (-self.noise_scaled).exp()
    }
}

/// Hamiltonian residuals of a sampled trajectory, H = pi ((sigma^2/2) pi - V')
/// with momentum pi = (dy/dt + V')/sigma^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroEnergyReport {
    /// max |H| with the velocity from the flow identity dy/dt = +/-V'(y), so
    /// the momentum is 2V'/sigma^2 (instanton) or 0 (anti-instanton). Measures
    /// the algebraic cancellation only; zero up to rounding for any samples.
    pub identity_residual: f64,
    /// max |H| with the velocity from central differences of the samples;
    /// grows when the samples do not solve the flow.
    pub flow_residual: f64,
    /// Noise-scaled action accumulated from the sampled momentum,
    /// trapezoid of (sigma^2/2) pi^2. Near 2 S0/sigma^2 for the instanton and
    /// near zero for the relaxation (anti-instanton) branch.
    pub action: f64,
}

/// First-order correction S1(t) = -E1 (t - t0) to the leading action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WkbCorrection {
    /// First-order energy E1, typically rate * sigma^2.
    pub e1: f64,
    /// Reference time where the correction vanishes.
    pub t0: f64,
    /// Correction at the queried time.
    pub s1: f64,
}

impl WkbCorrection {
    /// The linear map S1 evaluated at `t`.
    pub fn s1_at(&self, t: f64) -> f64 {
        -self.e1 * (t - self.t0)
    }
}

/// Signed closed-form time along the instanton through `x0`, diverging
/// logarithmically at the stationary levels.
///
/// For `Sign::Plus` the returned time decreases in `x`: the instanton runs
/// downhill in levels, from the well `x2` toward the barrier top `x1`.
/// Errors unless the regime is metastable and both levels lie strictly
/// between the stationary points.
pub fn instanton_time_map<S: Scalar>(
    x: S,
    x0: S,
    p: &ModelParams<S>,
    sign: Sign,
) -> Result<S> {
    barrier(p)?;
    let (x2, x1) = drift_quadratic_roots(p.theta_bar(), p.kappa, p.g)
        .expect("metastable regime has real stationary levels");
    for level in [x, x0] {
        if !(level > x1 && level < x2) {
            return Err(ModelError::domain(format!(
                "level {level} outside the open stationary interval ({x1}, {x2})"
            )));
        }
    }
    let t = time_map_raw(x, x0, x1, x2, p.g);
    Ok(match sign {
        Sign::Plus => t,
        Sign::Minus => -t,
    })
}

/// Antiderivative of 1/(g x (x - x1)(x - x2)) between `x0` and `x`, by
/// partial fractions.
fn time_map_raw<S: Scalar>(x: S, x0: S, x1: S, x2: S, g: S) -> S {
    let log_term = |root: S| ((x - root) / (x0 - root)).abs().ln() / root;
    let split = (log_term(x2) - log_term(x1)) / (x2 - x1);
    let direct = (x / x0).ln() / (x1 * x2);
    (split + direct) / g
}

/// Stationary geometry shared by the trajectory builders.
struct FlowGeometry {
    x1: f64,
    x2: f64,
    x_mid: f64,
    eps: f64,
    /// Time at the barrier-side clamp x1 + eps (largest representable).
    t_hi: f64,
    /// Time at the well-side clamp x2 - eps (most negative).
    t_lo: f64,
    y_min: f64,
    y_max: f64,
    e_b: f64,
}

fn geometry(p: &ModelParams<f64>) -> Result<FlowGeometry> {
    let report = barrier(p)?;
    let (x2, x1) = drift_quadratic_roots(p.theta_bar(), p.kappa, p.g)
        .expect("metastable regime has real stationary levels");
    let eps = ENDPOINT_CLAMP * (x2 - x1);
    let x_mid = 0.5 * (x1 + x2);
    Ok(FlowGeometry {
        x1,
        x2,
        x_mid,
        eps,
        t_hi: time_map_raw(x1 + eps, x_mid, x1, x2, p.g),
        t_lo: time_map_raw(x2 - eps, x_mid, x1, x2, p.g),
        y_min: report.y_min,
        y_max: report.y_max,
        e_b: report.e_b,
    })
}

/// Instanton log-level at time `t`, centered so that y(0) = ln x_mid,
/// clamped at the stationary levels.
fn invert(geo: &FlowGeometry, g: f64, t: f64) -> f64 {
    if t >= geo.t_hi {
        return (geo.x1 + geo.eps).ln();
    }
    if t <= geo.t_lo {
        return (geo.x2 - geo.eps).ln();
    }
    let f = |x: f64| time_map_raw(x, geo.x_mid, geo.x1, geo.x2, g) - t;
    let x = bisect(f, geo.x1 + geo.eps, geo.x2 - geo.eps, 1e-15)
        .expect("clamp times bracket every interior target");
    x.ln()
}

/// Uniform grid on [-t_span, t_span] mirrored bitwise about zero.
fn mirrored_grid(t_span: f64, n: usize) -> Vec<f64> {
    let h = 2.0 * t_span / (n - 1) as f64;
    let mut times = vec![0.0; n];
    for i in 0..n / 2 {
        let t = -t_span + h * i as f64;
        times[i] = t;
        times[n - 1 - i] = -t;
    }
    times
}

fn check_span_and_grid(t_span: f64, n: usize) -> Result<()> {
    if !(t_span > 0.0 && t_span.is_finite()) {
        return Err(ModelError::domain(format!(
            "time span must be positive and finite, got {t_span}"
        )));
    }
    if n < 3 {
        return Err(ModelError::domain(format!(
            "trajectory grid needs at least 3 points, got {n}"
        )));
    }
    Ok(())
}

/// Samples the requested trajectory on a symmetric grid of `n` points over
/// [-t_span, t_span]. A bounce uses the default separation t_span/2; see
/// [`bounce_trajectory`] to choose it.
pub fn instanton_trajectory(
    p: &ModelParams<f64>,
    t_span: f64,
    n: usize,
    kind: InstantonKind,
) -> Result<InstantonTrajectory> {
    if kind == InstantonKind::Bounce {
        return bounce_trajectory(p, t_span, n, 0.5 * t_span);
    }
    check_span_and_grid(t_span, n)?;
    let geo = geometry(p)?;
    let times = mirrored_grid(t_span, n);
    let mut values: Vec<f64> = times.par_iter().map(|&t| invert(&geo, p.g, t)).collect();
    if kind == InstantonKind::AntiInstanton {
        values.reverse();
    }
    let (start_asym, end_asym) = match kind {
        InstantonKind::Instanton => (geo.y_min, geo.y_max),
        InstantonKind::AntiInstanton => (geo.y_max, geo.y_min),
        InstantonKind::Bounce => unreachable!(),
    };
    let gap = (values[0] - start_asym)
        .abs()
        .max((values[n - 1] - end_asym).abs());
    Ok(InstantonTrajectory {
        warning: gap_warning(gap, &geo),
        endpoints: (values[0], values[n - 1]),
        action_s0: geo.e_b,
        endpoint_gap: gap,
        times,
        values,
        kind,
    })
}

/// Bounce y(t) = y_inst(separation/2 - |t|): an instanton centered at
/// -separation/2 glued to its time reversal at +separation/2.
pub fn bounce_trajectory(
    p: &ModelParams<f64>,
    t_span: f64,
    n: usize,
    separation: f64,
) -> Result<InstantonTrajectory> {
    check_span_and_grid(t_span, n)?;
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(ModelError::domain(format!(
            "bounce separation must be positive and finite, got {separation}"
        )));
    }
    let geo = geometry(p)?;
    let times = mirrored_grid(t_span, n);
    let values: Vec<f64> = times
        .par_iter()
        .map(|&t| invert(&geo, p.g, 0.5 * separation - t.abs()))
        .collect();
    // Both ends sit on the well-side asymptote.
    let gap = (values[0] - geo.y_min)
        .abs()
        .max((values[n - 1] - geo.y_min).abs());
    Ok(InstantonTrajectory {
        warning: gap_warning(gap, &geo),
        endpoints: (values[0], values[n - 1]),
        action_s0: 2.0 * geo.e_b,
        endpoint_gap: gap,
        times,
        values,
        kind: InstantonKind::Bounce,
    })
}

fn gap_warning(gap: f64, geo: &FlowGeometry) -> Option<String> {
    let span = geo.y_min - geo.y_max;
    (gap > GAP_WARN_FRACTION * span).then(|| {
        format!(
            "time span too short to approach the asymptotic endpoints: \
             achieved gap {gap:.3e} exceeds {:.3e}",
            GAP_WARN_FRACTION * span
        )
    })
}

/// Action S0 = V(y_to) - V(y_from) of the uphill segment, with its
/// noise-scaled exponent A = 2 S0 / sigma^2. A bounce carries 2 S0.
/// Errors when the segment descends (negative action).
pub fn instanton_action<S: Scalar>(
    p: &ModelParams<S>,
    y_from: S,
    y_to: S,
) -> Result<InstantonAction<S>> {
    let s0 = log_potential(y_to, p) - log_potential(y_from, p);
    if s0 < S::zero() {
        return Err(ModelError::domain(format!(
            "descending segment: V(y_to) - V(y_from) = {s0} < 0"
        )));
    }
    Ok(InstantonAction {
        s0,
        noise_scaled: s0 / p.temperature(),
    })
}

/// Evaluates the Hamiltonian H = pi ((sigma^2/2) pi - V') along a sampled
/// (anti-)instanton through two routes: the flow identity for the velocity
/// (an algebraic zero) and central differences of the samples (sensitive to
/// trajectories that do not solve the flow). Also accumulates the
/// noise-scaled action from the sampled momentum.
pub fn zero_energy_check(
    traj: &InstantonTrajectory,
    p: &ModelParams<f64>,
) -> Result<ZeroEnergyReport> {
    let dir = match traj.kind {
        InstantonKind::Instanton => 1.0,
        InstantonKind::AntiInstanton => -1.0,
        InstantonKind::Bounce => {
            return Err(ModelError::domain(
                "zero-energy check applies to a single instanton branch",
            ))
        }
    };
    let n = traj.values.len();
    if n < 3 || traj.times.len() != n {
        return Err(ModelError::domain(
            "zero-energy check needs a trajectory with at least 3 aligned samples",
        ));
    }
    let temp = p.temperature();
    let sigma2 = 2.0 * temp;
    let hamiltonian = |pi: f64, v1: f64| pi * (temp * pi - v1);

    let mut identity = 0.0f64;
    for &y in &traj.values {
        let v1 = log_potential_d1(y, p);
        let pi = (dir * v1 + v1) / sigma2;
        identity = identity.max(hamiltonian(pi, v1).abs());
    }

    // Interior momenta from central differences; endpoint momenta from the
    // identity, so the action trapezoid covers the whole grid.
    let mut momenta = vec![0.0f64; n];
    let boundary_pi = |y: f64| (dir + 1.0) * log_potential_d1(y, p) / sigma2;
    momenta[0] = boundary_pi(traj.values[0]);
    momenta[n - 1] = boundary_pi(traj.values[n - 1]);
    let mut flow = 0.0f64;
    for i in 1..n - 1 {
        let dt = traj.times[i + 1] - traj.times[i - 1];
        let v1 = log_potential_d1(traj.values[i], p);
        let pi = ((traj.values[i + 1] - traj.values[i - 1]) / dt + v1) / sigma2;
        momenta[i] = pi;
        flow = flow.max(hamiltonian(pi, v1).abs());
    }
    let mut action = 0.0f64;
    for i in 0..n - 1 {
        let dt = traj.times[i + 1] - traj.times[i];
        let li = temp * momenta[i] * momenta[i];
        let lj = temp * momenta[i + 1] * momenta[i + 1];
        action += 0.5 * dt * (li + lj);
    }
    Ok(ZeroEnergyReport {
        identity_residual: identity,
        flow_residual: flow,
        action,
    })
}

/// First-order correction to the leading action, S1(t) = -e1 (t - t0),
/// evaluated at `t`. The first-order energy is supplied externally, typically
/// an escape rate times sigma^2.
pub fn wkb_subleading(e1: f64, t0: f64, t: f64) -> WkbCorrection {
    WkbCorrection {
        e1,
        t0,
        s1: -e1 * (t - t0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Calculus;
    use crate::potentials::barrier;
    use crate::rates::kramers_rate;

    fn tp1() -> ModelParams<f64> {
        ModelParams::from_theta_bar(-1.0, -3.0, 2.0, 0.02f64.sqrt(), Calculus::Ito).unwrap()
    }

    #[test]
    fn time_map_identity_and_sign() {
        let p = tp1();
        for x0 in [0.55, 0.75, 0.95] {
            assert_eq!(instanton_time_map(x0, x0, &p, Sign::Plus).unwrap(), 0.0);
        }
        let plus = instanton_time_map(0.6, 0.75, &p, Sign::Plus).unwrap();
        let minus = instanton_time_map(0.6, 0.75, &p, Sign::Minus).unwrap();
        assert_eq!(minus, -plus);
    }

    #[test]
    fn time_map_matches_closed_form_values() {
        let p = tp1();
        let late = instanton_time_map(0.6, 0.75, &p, Sign::Plus).unwrap();
        assert!((late - 2.0794415416798366).abs() < 1e-12, "late {late}");
        let early = instanton_time_map(0.9, 0.75, &p, Sign::Plus).unwrap();
        assert!((early + 1.6739764335716718).abs() < 1e-12, "early {early}");
    }

    #[test]
    fn time_map_monotone_between_levels() {
        let p = tp1();
        let mut prev = f64::INFINITY;
        for i in 0..1000 {
            let x = 0.5 + 0.5 * (i as f64 + 0.5) / 1000.0;
            let t = instanton_time_map(x, 0.75, &p, Sign::Plus).unwrap();
            assert!(t < prev, "t({x}) = {t} not below {prev}");
            prev = t;
        }
    }

    #[test]
    fn time_map_additive_over_midpoints() {
        let p = tp1();
        let whole = instanton_time_map(0.95, 0.55, &p, Sign::Plus).unwrap();
        let split = instanton_time_map(0.95, 0.75, &p, Sign::Plus).unwrap()
            + instanton_time_map(0.75, 0.55, &p, Sign::Plus).unwrap();
        assert!((whole - split).abs() < 1e-10);
    }

    #[test]
    fn time_map_rejects_exterior_levels() {
        let p = tp1();
        for (x, x0) in [(0.4, 0.75), (1.1, 0.75), (0.5, 0.75), (0.75, 0.3)] {
            assert!(instanton_time_map(x, x0, &p, Sign::Plus).is_err());
        }
        let confining =
            ModelParams::from_theta_bar(1.0, -3.0, 2.0, 0.02f64.sqrt(), Calculus::Ito).unwrap();
        assert!(matches!(
            instanton_time_map(0.75, 0.75, &confining, Sign::Plus),
            Err(ModelError::NoBarrier { .. })
        ));
    }

    #[test]
    fn trajectory_solves_the_flow() {
        let p = tp1();
        let traj = instanton_trajectory(&p, 20.0, 40001, InstantonKind::Instanton).unwrap();
        let h = traj.times[1] - traj.times[0];
        let max_v1 = traj
            .values
            .iter()
            .map(|&y| log_potential_d1(y, &p).abs())
            .fold(0.0f64, f64::max);
        let mut residual = 0.0f64;
        for i in 1..traj.values.len() - 1 {
            let yd = (traj.values[i + 1] - traj.values[i - 1]) / (2.0 * h);
            residual = residual.max((yd - log_potential_d1(traj.values[i], &p)).abs());
        }
        // Measured 6.2e-9 against the 1.25e-7 budget.
        assert!(
            residual <= 1e-6 * max_v1,
            "residual {residual:.3e} vs budget {:.3e}",
            1e-6 * max_v1
        );
    }

    #[test]
    fn trajectory_reaches_asymptotes() {
        let p = tp1();
        let rep = barrier(&p).unwrap();
        let traj = instanton_trajectory(&p, 40.0, 4001, InstantonKind::Instanton).unwrap();
        // Well side saturates at the clamp (5.0e-13); barrier side decays to 1.2e-9.
        assert!((traj.values[0] - rep.y_min).abs() < 1e-11);
        assert!((traj.values[4000] - rep.y_max).abs() < 5e-9);
        assert!(traj.warning.is_none(), "{:?}", traj.warning);
        for w in traj.values.windows(2) {
            assert!(w[1] <= w[0], "instanton must be monotone");
        }
        let short = instanton_trajectory(&p, 5.0, 101, InstantonKind::Instanton).unwrap();
        assert!(short.warning.is_some());
        assert!(short.endpoint_gap > 1e-3);
    }

    #[test]
    fn anti_instanton_is_the_time_reversal() {
        let p = tp1();
        let inst = instanton_trajectory(&p, 15.0, 501, InstantonKind::Instanton).unwrap();
        let anti = instanton_trajectory(&p, 15.0, 501, InstantonKind::AntiInstanton).unwrap();
        for i in 0..501 {
            assert_eq!(anti.values[i], inst.values[500 - i]);
            assert_eq!(anti.times[i], -inst.times[500 - i]);
        }
        assert_eq!(anti.endpoints, (inst.endpoints.1, inst.endpoints.0));
        assert_eq!(anti.action_s0, inst.action_s0);
    }

    #[test]
    fn bounce_is_time_symmetric() {
        let p = tp1();
        let rep = barrier(&p).unwrap();
        let traj = instanton_trajectory(&p, 20.0, 2001, InstantonKind::Bounce).unwrap();
        for i in 0..2001 {
            assert!((traj.values[i] - traj.values[2000 - i]).abs() <= 1e-9);
        }
        // Ends at the well, dips toward the barrier at the center.
        assert!((traj.values[0] - rep.y_min).abs() < 1e-6);
        assert!(traj.values[1000] < traj.values[0]);
        assert!(traj.warning.is_none(), "{:?}", traj.warning);
        assert_eq!(traj.action_s0, 2.0 * rep.e_b);

        let tight = bounce_trajectory(&p, 20.0, 2001, 30.0).unwrap();
        assert!(tight.values[1000] < traj.values[1000]);
        assert!(bounce_trajectory(&p, 20.0, 2001, -1.0).is_err());
    }

    #[test]
    fn action_reproduces_the_barrier_height() {
        let p = tp1();
        let rep = barrier(&p).unwrap();
        let act = instanton_action(&p, rep.y_min, rep.y_max).unwrap();
        assert!((act.s0 - rep.e_b).abs() < 1e-15);
        assert_eq!(instanton_action(&p, 0.3, 0.3).unwrap().s0, 0.0);
        assert!(instanton_action(&p, rep.y_max, rep.y_min).is_err());

        let kr = kramers_rate(&p).unwrap();
        assert!((act.noise_scaled - kr.exponent).abs() < 1e-12);
        let prob = act.escape_probability();
        assert!((prob - 3.3955757524295606e-3).abs() < 1e-15, "prob {prob}");
        assert!((prob - 3.40e-3).abs() / 3.40e-3 < 2e-3);
    }

    #[test]
    fn time_map_inverts_the_trajectory() {
        let p = tp1();
        let traj = instanton_trajectory(&p, 10.0, 201, InstantonKind::Instanton).unwrap();
        for (i, &t) in traj.times.iter().enumerate() {
            if t.abs() > 8.0 {
                continue;
            }
            let back = instanton_time_map(traj.values[i].exp(), 0.75, &p, Sign::Plus).unwrap();
            assert!((back - t).abs() < 1e-8, "t {t} back {back}");
        }
    }

    #[test]
    fn zero_energy_residuals() {
        let p = tp1();
        let inst = instanton_trajectory(&p, 20.0, 2001, InstantonKind::Instanton).unwrap();
        let clean = zero_energy_check(&inst, &p).unwrap();
        assert!(clean.identity_residual <= 1e-9);
        // Measured 1.5e-5 from the dt = 0.02 central differences.
        assert!(clean.flow_residual <= 1e-4);
        let exact = 2.0 * barrier(&p).unwrap().e_b / 0.02;
        assert!(
            (clean.action - exact).abs() / exact < 1e-4,
            "action {} vs {exact}",
            clean.action
        );

        let anti = instanton_trajectory(&p, 20.0, 2001, InstantonKind::AntiInstanton).unwrap();
        let relaxed = zero_energy_check(&anti, &p).unwrap();
        assert_eq!(relaxed.identity_residual, 0.0);
        assert!(relaxed.action.abs() <= 1e-4, "action {}", relaxed.action);

        let mut bent = inst.clone();
        for (i, v) in bent.values.iter_mut().enumerate() {
            *v += 1e-3 * (7.3 * i as f64).sin();
        }
        let perturbed = zero_energy_check(&bent, &p).unwrap();
        assert!(perturbed.flow_residual > 100.0 * clean.flow_residual.max(1e-6));

        let bounce = instanton_trajectory(&p, 20.0, 2001, InstantonKind::Bounce).unwrap();
        assert!(zero_energy_check(&bounce, &p).is_err());
    }

    #[test]
    fn wkb_correction_is_linear() {
        assert_eq!(wkb_subleading(0.3, 2.0, 2.0).s1, 0.0);
        let double = wkb_subleading(0.3, 2.0, 3.0).s1;
        let half = wkb_subleading(0.3, 2.0, 2.5).s1;
        assert_eq!(double, 2.0 * half);
        assert_eq!(wkb_subleading(0.3, 2.0, 3.0).s1_at(2.5), half);

        let p = tp1();
        let e1 = kramers_rate(&p).unwrap().rate * 0.02;
        let corr = wkb_subleading(e1, 0.0, 1.0);
        assert!((corr.s1 + 7.64273063164944e-6).abs() < 1e-13, "{}", corr.s1);
    }
}
