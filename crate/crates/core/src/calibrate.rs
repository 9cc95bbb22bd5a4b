//! Maximum-likelihood calibration with CDS-spread and barrier-region
//! penalties.
//!
//! The transition law is the Euler step of the log-price Langevin equation:
//! Delta y ~ Normal(-V'(y_t) dt, sigma^2 dt) with V' at the left endpoint.
//! The loss is nll + lambda1 (spread penalty) + lambda2 (barrier-region
//! penalty); the constrained fit keeps kappa negative with a guaranteed-real
//! discriminant through [`kappa_reparam`], and positivity of sigma and g is
//! enforced by optimizing their logarithms. The geometric-Brownian baseline
//! (kappa = g = 0) has a closed-form maximum-likelihood fit and is nested in
//! the unconstrained problem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::numerics::optim::minimize;
use crate::params::{classify_regime, Calculus, ModelParams, RegimeKind};
use crate::potentials::{barrier, log_potential_d1};
use crate::rates::kramers_rate;

/// Box keeping optimizer iterates in a numerically safe region: theta,
/// ln sigma, kappa (raw), ln g.
const RAW_LO: [f64; 4] = [-50.0, -13.8, -100.0, -27.6];
const RAW_HI: [f64; 4] = [50.0, 6.9, 100.0, 6.9];

/// First-order optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    pub max_iters: usize,
    /// Initial per-parameter step in raw coordinates.
    pub init_step: f64,
    /// Convergence declared when every per-parameter step falls below this.
    pub step_tol: f64,
    /// Random restarts beyond the moment-informed start.
    pub restarts: usize,
    /// Seed of the restart draws; identical seeds reproduce the fit exactly.
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            init_step: 0.05,
            step_tol: 1e-9,
            restarts: 5,
            seed: 0,
        }
    }
}

/// Calibration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibConfig {
    /// CDS-spread penalty weight; 0 disables the constraint.
    pub lambda1: f64,
    /// Barrier-region penalty weight, active alongside the CDS constraint.
    pub lambda2: f64,
    /// Observation step in years.
    pub dt: f64,
    /// Recovery rate R of the credit triangle.
    pub recovery: f64,
    /// Stochastic calculus of the fitted model.
    pub nu: Calculus,
    pub optimizer: OptimizerOptions,
}

impl Default for CalibConfig {
    fn default() -> Self {
        Self {
            lambda1: 0.0,
            lambda2: 1e5,
            dt: 1.0 / 252.0,
            recovery: 0.4,
            nu: Calculus::Ito,
            optimizer: OptimizerOptions::default(),
        }
    }
}

impl CalibConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda1 >= 0.0 && self.lambda1.is_finite()) {
            return Err(ModelError::Config("lambda1 must be >= 0".into()));
        }
        if !(self.lambda2 >= 0.0 && self.lambda2.is_finite()) {
            return Err(ModelError::Config("lambda2 must be >= 0".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ModelError::Config("dt must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.recovery) {
            return Err(ModelError::Config("recovery must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Outcome of a single calibration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub params: ModelParams<f64>,
    /// Pure-data negative log-likelihood at the fitted parameters.
    pub nll: f64,
    pub penalty_cds: f64,
    pub penalty_barrier: f64,
    /// Escape rate at the fit; None outside the metastable regime.
    pub kramers_rate: Option<f64>,
    /// kramers_rate * (1 - R) * 1e4.
    pub model_spread_bps: Option<f64>,
    pub observed_mean_spread_bps: Option<f64>,
    /// The best restart went stationary before exhausting its iteration
    /// budget (and the fit is metastable when a CDS constraint was active);
    /// false flags a budget-capped or regime-breaking row.
    pub converged: bool,
    /// Optimizer iterations summed over restarts.
    pub iterations: usize,
}

impl CalibrationResult {
    /// The minimized objective.
    pub fn total_loss(&self) -> f64 {
        self.nll + self.penalty_cds + self.penalty_barrier
    }
}

/// Closed-form geometric-Brownian fit of a log-level series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GbmFit {
    /// Constant log-drift per year, mean(Delta y)/dt.
    pub mu_drift: f64,
    /// sqrt(population var(Delta y)/dt).
    pub sigma: f64,
    pub nll: f64,
    /// Constant-increment series: sigma-hat = 0 and the Gaussian likelihood
    /// is unbounded, reported as nll = -infinity.
    pub degenerate: bool,
}

/// Negative log-likelihood with its gradient in (theta, sigma, kappa, g).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NllGradient {
    pub nll: f64,
    pub d_theta: f64,
    pub d_sigma: f64,
    pub d_kappa: f64,
    pub d_g: f64,
}

fn validate_series(series: &[f64], dt: f64) -> Result<()> {
    if series.len() < 2 {
        return Err(ModelError::Data(
            "series must hold at least two observations".into(),
        ));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(ModelError::Config("step dt must be > 0".into()));
    }
    if let Some(bad) = series.iter().find(|y| !y.is_finite()) {
        return Err(ModelError::Data(format!(
            "series holds a non-finite log-level {bad}"
        )));
    }
    Ok(())
}

/// Negative log-likelihood of a log-level series under the Euler transition
/// law, sum of 1/2 ln(2 pi sigma^2 dt) + (Delta y + V'(y_t) dt)^2 /
/// (2 sigma^2 dt) over transitions.
pub fn nll_qed(series: &[f64], p: &ModelParams<f64>, dt: f64) -> Result<f64> {
    Ok(nll_qed_gradient(series, p, dt)?.nll)
}

/// [`nll_qed`] together with its analytic gradient.
pub fn nll_qed_gradient(series: &[f64], p: &ModelParams<f64>, dt: f64) -> Result<NllGradient> {
    validate_series(series, dt)?;
    let sigma = p.sigma;
    let s2 = sigma * sigma;
    let half_log = 0.5 * (2.0 * std::f64::consts::PI * s2 * dt).ln();
    let mut out = NllGradient {
        nll: 0.0,
        d_theta: 0.0,
        d_sigma: 0.0,
        d_kappa: 0.0,
        d_g: 0.0,
    };
    for w in series.windows(2) {
        let (y0, y1) = (w[0], w[1]);
        let r = y1 - y0 + log_potential_d1(y0, p) * dt;
        let u = y0.exp();
        out.nll += half_log + r * r / (2.0 * s2 * dt);
        out.d_theta += -r / s2;
        out.d_kappa += r * u / s2;
        out.d_g += r * u * u / s2;
        // V' depends on sigma through theta_bar: dV'/dsigma = sigma.
        out.d_sigma += 1.0 / sigma + r / sigma - r * r / (s2 * sigma * dt);
    }
    Ok(out)
}

/// Gaussian negative log-likelihood of a log-level series under constant
/// drift, Delta y ~ Normal(mu_drift dt, sigma^2 dt).
pub fn nll_gbm(series: &[f64], mu_drift: f64, sigma: f64, dt: f64) -> Result<f64> {
    validate_series(series, dt)?;
    if !(sigma > 0.0 && sigma.is_finite() && mu_drift.is_finite()) {
        return Err(ModelError::domain(
            "nll_gbm needs finite drift and sigma > 0",
        ));
    }
    let s2dt = sigma * sigma * dt;
    let half_log = 0.5 * (2.0 * std::f64::consts::PI * s2dt).ln();
    Ok(series
        .windows(2)
        .map(|w| {
            let r = w[1] - w[0] - mu_drift * dt;
            half_log + r * r / (2.0 * s2dt)
        })
        .sum())
}

/// Closed-form maximum-likelihood geometric-Brownian fit: drift =
/// mean(Delta y)/dt, sigma^2 = population var(Delta y)/dt. A
/// constant-increment series is degenerate (sigma-hat = 0).
pub fn gbm_mle(series: &[f64], dt: f64) -> Result<GbmFit> {
    validate_series(series, dt)?;
    let n = (series.len() - 1) as f64;
    let mean: f64 = series.windows(2).map(|w| w[1] - w[0]).sum::<f64>() / n;
    let var: f64 = series
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0] - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    let mu_drift = mean / dt;
    if var == 0.0 {
        return Ok(GbmFit {
            mu_drift,
            sigma: 0.0,
            nll: f64::NEG_INFINITY,
            degenerate: true,
        });
    }
    let sigma = (var / dt).sqrt();
    Ok(GbmFit {
        mu_drift,
        sigma,
        nll: nll_gbm(series, mu_drift, sigma, dt)?,
        degenerate: false,
    })
}

/// Distance of the parameters from the metastable region: zero on it,
/// positive and growing with the violation outside. Built from the
/// discriminant deficit and the wrong-sign excesses of theta_bar and kappa.
fn metastability_deficit(p: &ModelParams<f64>) -> f64 {
    (-p.discriminant()).max(0.0) + p.theta_bar().max(0.0) + p.kappa.max(0.0)
}

/// CDS-spread penalty lambda1 (observed - model spread)^2 in bps, with the
/// model spread from the credit triangle kramers_rate (1 - R) 1e4. Outside
/// the metastable regime no rate exists and a finite surrogate
/// lambda1 observed^2 (1 + deficit) takes over; the surrogate is continuous
/// across the vanishing-discriminant boundary, where the model spread
/// approaches zero. Total on every input.
pub fn kramers_penalty(
    p: &ModelParams<f64>,
    observed_mean_spread_bps: f64,
    lambda1: f64,
    recovery: f64,
) -> f64 {
    if lambda1 == 0.0 {
        return 0.0;
    }
    match kramers_rate(p) {
        Ok(est) => {
            let model = est.rate * (1.0 - recovery) * 1e4;
            lambda1 * (observed_mean_spread_bps - model).powi(2)
        }
        Err(_) => {
            lambda1
                * observed_mean_spread_bps
                * observed_mean_spread_bps
                * (1.0 + metastability_deficit(p))
        }
    }
}

/// Barrier-region penalty lambda2 sum of max(y_max - y_t, 0) over the
/// observations: zero when the whole series sits in the diffusive well above
/// the barrier top y_max. Without a barrier the penalty becomes the strictly
/// positive existence surrogate lambda2 (1 + deficit). Total on every input.
pub fn barrier_region_penalty(series: &[f64], p: &ModelParams<f64>, lambda2: f64) -> f64 {
    if lambda2 == 0.0 {
        return 0.0;
    }
    match barrier(p) {
        Ok(b) => {
            lambda2
                * series
                    .iter()
                    .map(|&y| (b.y_max - y).max(0.0))
                    .sum::<f64>()
        }
        Err(_) => lambda2 * (1.0 + metastability_deficit(p)),
    }
}

/// Negativity-preserving reparametrization kappa' = -(2 sqrt(g |theta_bar|)
/// + |kappa|): kappa' <= 0 and kappa'^2 >= 4 g |theta_bar|, so the extremum
/// discriminant stays real whenever theta_bar < 0. Applied once per loss
/// evaluation; composing it with itself deepens kappa by exactly
/// 2 sqrt(g |theta_bar|) per application.
pub fn kappa_reparam(kappa_prev: f64, g: f64, theta_bar: f64) -> f64 {
    -(2.0 * (g.max(0.0) * theta_bar.abs()).sqrt() + kappa_prev.abs())
}

/// Model parameters from raw optimizer coordinates [theta, ln sigma, kappa,
/// ln g]; the constrained map routes kappa through [`kappa_reparam`].
fn assemble(u: &[f64], nu: Calculus, constrained: bool) -> ModelParams<f64> {
    let theta = u[0];
    let sigma = u[1].exp();
    let g = u[3].exp();
    let kappa = if constrained {
        kappa_reparam(u[2], g, theta - 0.5 * sigma * sigma)
    } else {
        u[2]
    };
    ModelParams::new(theta, kappa, g, sigma, nu).expect("sigma and g positive by construction")
}

/// Fits (theta, sigma, kappa, g) to a log-level series by minimizing
/// nll + penalties with analytic likelihood gradients and finite-difference
/// penalty gradients. The CDS constraint is active when `lambda1 > 0` and an
/// observed spread is supplied; it switches kappa to the reparametrized map
/// and turns the barrier-region penalty on (a pure-likelihood fit carries no
/// penalty, which keeps the geometric-Brownian limit feasible). Optimizer
/// failure yields a non-converged result, not an error.
pub fn calibrate(
    series: &[f64],
    observed_mean_spread_bps: Option<f64>,
    config: &CalibConfig,
) -> Result<CalibrationResult> {
    config.validate()?;
    validate_series(series, config.dt)?;
    let constrained = config.lambda1 > 0.0 && observed_mean_spread_bps.is_some();
    let nu = config.nu;
    let dt = config.dt;

    let penalties = |p: &ModelParams<f64>| -> f64 {
        if !constrained {
            return 0.0;
        }
        let obs = observed_mean_spread_bps.expect("constrained implies observed spread");
        kramers_penalty(p, obs, config.lambda1, config.recovery)
            + barrier_region_penalty(series, p, config.lambda2)
    };

    let loss_and_grad = |u: &[f64]| -> (f64, Vec<f64>) {
        let p = assemble(u, nu, constrained);
        let like = nll_qed_gradient(series, &p, dt).expect("series validated");
        // Chain rule onto raw coordinates; sigma and g carry their log map.
        let (sigma, g) = (p.sigma, p.g);
        let (dk0, dk1, dk2, dk3) = if constrained {
            let tb = p.theta_bar();
            let root = (g * tb.abs()).sqrt();
            let slope = if root > 0.0 { g * tb.signum() / root } else { 0.0 };
            (-slope, slope * sigma * sigma, -u[2].signum(), -root)
        } else {
            (0.0, 0.0, 1.0, 0.0)
        };
        let mut grad = vec![
            like.d_theta + like.d_kappa * dk0,
            like.d_sigma * sigma + like.d_kappa * dk1,
            like.d_kappa * dk2,
            like.d_g * g + like.d_kappa * dk3,
        ];
        let mut value = like.nll;
        if constrained {
            value += penalties(&p);
            let mut shifted = u.to_vec();
            for i in 0..4 {
                let h = 1e-5 * (1.0 + u[i].abs());
                shifted[i] = u[i] + h;
                let up = penalties(&assemble(&shifted, nu, constrained));
                shifted[i] = u[i] - h;
                let down = penalties(&assemble(&shifted, nu, constrained));
                shifted[i] = u[i];
                grad[i] += (up - down) / (2.0 * h);
            }
        }
        (value, grad)
    };

    // Moment-informed start: the geometric-Brownian fit pins theta_bar and
    // sigma; curvature starts at zero (kappa) and near-zero (g).
    let gbm = gbm_mle(series, dt)?;
    let sigma0 = if gbm.degenerate { 0.1 } else { gbm.sigma };
    let theta0 = gbm.mu_drift + 0.5 * sigma0 * sigma0;
    let mut starts = vec![[theta0, sigma0.ln(), 0.0, (1e-12f64).ln()]];
    let mut rng = ChaCha8Rng::seed_from_u64(config.optimizer.seed);
    for _ in 0..config.optimizer.restarts {
        starts.push([
            theta0 + rng.random_range(-2.0..2.0),
            sigma0.ln() + rng.random_range(-0.7..0.7),
            rng.random_range(-5.0..1.0),
            rng.random_range(-9.0..1.5),
        ]);
    }

    let step = config.optimizer.init_step;
    let mut best: Option<crate::numerics::optim::Minimum> = None;
    let mut iterations = 0;
    for start in &starts {
        let m = minimize(
            &loss_and_grad,
            start,
            &RAW_LO,
            &RAW_HI,
            &[step; 4],
            config.optimizer.max_iters,
            config.optimizer.step_tol,
        );
        iterations += m.iterations;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let best = best.expect("at least one start");

    let params = assemble(&best.x, nu, constrained);
    let nll = nll_qed(series, &params, dt)?;
    let (penalty_cds, penalty_barrier) = if constrained {
        let obs = observed_mean_spread_bps.expect("constrained implies observed spread");
        (
            kramers_penalty(&params, obs, config.lambda1, config.recovery),
            barrier_region_penalty(series, &params, config.lambda2),
        )
    } else {
        (0.0, 0.0)
    };
    let rate = kramers_rate(&params).ok().map(|e| e.rate);
    let metastable_ok =
        !constrained || classify_regime(&params, None).kind == RegimeKind::Metastable;
    Ok(CalibrationResult {
        params,
        nll,
        penalty_cds,
        penalty_barrier,
        kramers_rate: rate,
        model_spread_bps: rate.map(|r| r * (1.0 - config.recovery) * 1e4),
        observed_mean_spread_bps,
        converged: best.value.is_finite() && best.converged && metastable_ok,
        iterations,
    })
}

/// One row of the per-year model comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub year: i32,
    pub nll_gbm: f64,
    /// Unconstrained (pure-likelihood) fit.
    pub nll_qed: f64,
    /// Constrained fit; None without CDS data for the year or with
    /// lambda1 = 0.
    pub nll_qed_constrained: Option<f64>,
    pub model_spread_bps: Option<f64>,
    pub observed_mean_spread_bps: Option<f64>,
}

/// Yearly model comparison: geometric-Brownian baseline, unconstrained fit,
/// and (where CDS data exists and lambda1 > 0) the constrained fit. Years
/// run in parallel; row order follows the input.
pub fn compare_models(
    series_by_year: &[(i32, Vec<f64>)],
    cds_by_year: &[(i32, f64)],
    config: &CalibConfig,
) -> Result<Vec<ComparisonRow>> {
    config.validate()?;
    series_by_year
        .par_iter()
        .map(|(year, series)| {
            let gbm = gbm_mle(series, config.dt)?;
            let unconstrained = CalibConfig {
                lambda1: 0.0,
                ..*config
            };
            let fit = calibrate(series, None, &unconstrained)?;
            let observed = cds_by_year
                .iter()
                .find(|(y, _)| y == year)
                .map(|(_, s)| *s);
            let constrained = match observed {
                Some(obs) if config.lambda1 > 0.0 => Some(calibrate(series, Some(obs), config)?),
                _ => None,
            };
            Ok(ComparisonRow {
                year: *year,
                nll_gbm: gbm.nll,
                nll_qed: fit.nll,
                nll_qed_constrained: constrained.as_ref().map(|c| c.nll),
                model_spread_bps: constrained.as_ref().and_then(|c| c.model_spread_bps),
                observed_mean_spread_bps: observed,
            })
        })
        .collect()
}
