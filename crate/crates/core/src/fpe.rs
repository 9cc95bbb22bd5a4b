//! Stationary densities of the price process and the partition function.
//!
//! The stationary density in levels is p_s(x) = Z^{-1} e^{-U_eff(x)} with the
//! origin exponent z = 2 theta/sigma^2 + nu - 3; it exists iff z > 0. The
//! log-space density is the exact pushforward p~_s(y) = e^y p_s(e^y), which
//! under the Ito convention coincides with e^{-2V(y)/sigma^2}. The
//! normalization Z is computed by adaptive quadrature (authoritative) or in
//! closed form through the parabolic cylinder function; both are carried in
//! logs so extreme parameters cannot overflow the density evaluation.

use serde::{Deserialize, Serialize};

use crate::dynamics::Space;
use crate::error::{ModelError, Result};
use crate::numerics::quad::integrate;
use crate::numerics::roots::expand_until;
use crate::numerics::special::{cylinder_d_minus, ln_gamma};
use crate::params::ModelParams;
use crate::potentials::effective_potential;

/// Log-weight drop past which tail mass is below the smallest positive double.
const LOG_TAIL_DROP: f64 = 745.0;

/// Relative tolerance of the normalization quadrature.
const QUAD_REL_TOL: f64 = 1e-10;

/// Route used to evaluate the partition function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionMethod {
    Quadrature,
    KummerAnalytic,
}

/// Normalization integral of the stationary density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionValue {
    /// Z itself; `None` when divergent, may round to infinity for extreme
    /// parameters while `log_value` stays finite.
    pub value: Option<f64>,
    /// ln Z.
    pub log_value: Option<f64>,
    /// Set when the integral diverges (origin exponent z <= 0, or an
    /// unconfined tail with g = 0).
    pub divergent: bool,
    pub method: PartitionMethod,
    /// Origin exponent z = 2 theta / sigma^2 + nu - 3.
    pub z_exponent: f64,
}

/// Stationary density sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub space: Space,
    pub normalizable: bool,
    /// Normalization constant Z when the density exists; may round to
    /// infinity for extreme parameters while `log_z` stays finite.
    pub z: Option<f64>,
    /// ln Z when the density exists.
    pub log_z: Option<f64>,
    /// Evaluation points: levels x for [`Space::X`], log-levels y for
    /// [`Space::Y`].
    pub grid: Vec<f64>,
    /// Normalized density at the grid points; empty when not normalizable.
    pub density: Vec<f64>,
}

/// Existence threshold of the stationary density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizabilityReport {
    /// theta* = (3 - nu) sigma^2 / 2; the density exists iff theta > theta*.
    pub theta_star: f64,
    pub normalizable: bool,
}

/// Origin exponent of the stationary density, z = 2 theta/sigma^2 + nu - 3.
fn z_exponent(p: &ModelParams<f64>) -> f64 {
    p.theta / p.temperature() + p.nu.nu::<f64>() - 3.0
}

/// ln of the unnormalized stationary log-space density,
/// z y - (kappa e^y + (g/2) e^{2y}) / T.
fn log_weight(y: f64, p: &ModelParams<f64>, z: f64) -> f64 {
    let u = y.exp();
    z * y - u * (p.kappa + 0.5 * p.g * u) / p.temperature()
}

/// ln Z by adaptive quadrature in log space, where the integrand is free of
/// the origin singularity. Caller guarantees z > 0 and a confined tail.
fn quadrature_log_partition(p: &ModelParams<f64>, z: f64) -> Result<f64> {
    let t = p.temperature();
    // Stationary point of the log-weight: g u^2 + kappa u = z T.
    let u_star = if p.g > 0.0 {
        (-p.kappa + (p.kappa * p.kappa + 4.0 * p.g * z * t).sqrt()) / (2.0 * p.g)
    } else {
        z * t / p.kappa
    };
    let y_star = u_star.ln();
    let phi_star = log_weight(y_star, p, z);
    let negligible = |y: f64| log_weight(y, p, z) < phi_star - LOG_TAIL_DROP;
    let (_, lo) = expand_until(y_star, -1.0, negligible)?;
    let (_, hi) = expand_until(y_star, 1.0, negligible)?;
    let q = integrate(
        |y| (log_weight(y, p, z) - phi_star).exp(),
        lo,
        hi,
        QUAD_REL_TOL,
        0.0,
    )?;
    Ok(phi_star + q.ln())
}

/// Partition function Z = integral of x^{z-1} exp(-(2/sigma^2)(kappa x +
/// g x^2/2)) over x > 0, evaluated by the requested route. A non-integrable
/// configuration returns the divergent flag, not an error; the closed form
/// additionally requires g > 0 and a cylinder argument within the series
/// guard.
pub fn partition_function(
    p: &ModelParams<f64>,
    method: PartitionMethod,
) -> Result<PartitionValue> {
    let z = z_exponent(p);
    let divergent = z <= 0.0 || (p.g == 0.0 && p.kappa <= 0.0);
    if divergent {
        if method == PartitionMethod::KummerAnalytic && p.g <= 0.0 && z > 0.0 {
            return Err(ModelError::domain(
                "closed-form partition function requires g > 0",
            ));
        }
        return Ok(PartitionValue {
            value: None,
            log_value: None,
            divergent: true,
            method,
            z_exponent: z,
        });
    }
    let log_value = match method {
        PartitionMethod::Quadrature => quadrature_log_partition(p, z)?,
        PartitionMethod::KummerAnalytic => {
            if p.g <= 0.0 {
                return Err(ModelError::domain(
                    "closed-form partition function requires g > 0",
                ));
            }
            let sigma2 = 2.0 * p.temperature();
            let x_arg = p.kappa * (2.0 / (p.g * sigma2)).sqrt();
            let (d, _) = cylinder_d_minus(z, x_arg)?;
            -0.5 * z * (2.0 * p.g / sigma2).ln()
                + ln_gamma(z)
                + p.kappa * p.kappa / (2.0 * p.g * sigma2)
                + d.ln()
        }
    };
    Ok(PartitionValue {
        value: Some(log_value.exp()),
        log_value: Some(log_value),
        divergent: false,
        method,
        z_exponent: z,
    })
}

/// Existence threshold theta* = (3 - nu) sigma^2/2 and the classification of
/// the supplied theta, phrased through the origin exponent so it always
/// agrees with the partition-function divergence flag.
pub fn normalizability_threshold(p: &ModelParams<f64>) -> NormalizabilityReport {
    NormalizabilityReport {
        theta_star: (3.0 - p.nu.nu::<f64>()) * p.temperature(),
        normalizable: z_exponent(p) > 0.0,
    }
}

fn non_normalizable(space: Space, grid: &[f64]) -> SteadyState {
    SteadyState {
        space,
        normalizable: false,
        z: None,
        log_z: None,
        grid: grid.to_vec(),
        density: Vec::new(),
    }
}

/// Stationary density in levels, p_s(x) = Z^{-1} e^{-U_eff(x)}, sampled at
/// the grid points. A non-normalizable configuration yields the flagged
/// report without a density; grid points must be positive and finite.
pub fn steady_state_x(p: &ModelParams<f64>, grid: &[f64]) -> Result<SteadyState> {
    for &x in grid {
        if !(x > 0.0 && x.is_finite()) {
            return Err(ModelError::domain(format!(
                "level grid must be positive and finite, got {x}"
            )));
        }
    }
    let part = partition_function(p, PartitionMethod::Quadrature)?;
    let Some(log_z) = part.log_value else {
        return Ok(non_normalizable(Space::X, grid));
    };
    let density = grid
        .iter()
        .map(|&x| effective_potential(x, p).map(|u| (-u - log_z).exp()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SteadyState {
        space: Space::X,
        normalizable: true,
        z: part.value,
        log_z: Some(log_z),
        grid: grid.to_vec(),
        density,
    })
}

/// Stationary density in log space, the pushforward p~_s(y) = e^y p_s(e^y);
/// under the Ito convention it equals Z^{-1} e^{-2V(y)/sigma^2}. Grid points
/// must be finite.
pub fn steady_state_y(p: &ModelParams<f64>, grid: &[f64]) -> Result<SteadyState> {
    for &y in grid {
        if !y.is_finite() {
            return Err(ModelError::domain(format!(
                "log-level grid must be finite, got {y}"
            )));
        }
    }
    let z = z_exponent(p);
    let part = partition_function(p, PartitionMethod::Quadrature)?;
    let Some(log_z) = part.log_value else {
        return Ok(non_normalizable(Space::Y, grid));
    };
    let density = grid
        .iter()
        .map(|&y| (log_weight(y, p, z) - log_z).exp())
        .collect();
    Ok(SteadyState {
        space: Space::Y,
        normalizable: true,
        z: part.value,
        log_z: Some(log_z),
        grid: grid.to_vec(),
        density,
    })
}
