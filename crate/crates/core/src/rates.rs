//! Escape-rate estimators and credit conversions: the closed-form
//! barrier-curvature rate, the two-quadrature SUSY rate, the spectral rate
//! from the absorbing-box partner Hamiltonians, SUSY-breaking
//! classification, and the credit-triangle spread mapping.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::numerics::quad::integrate;
use crate::numerics::tridiag::{eigenvector_for, lowest_eigenvalues};
use crate::params::ModelParams;
use crate::potentials::{barrier, log_potential, qm_potentials, Sector};

/// Estimator that produced a rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMethod {
    Kramers,
    SusyQuadrature,
    Spectral,
}

/// An escape-rate estimate in decomposed Arrhenius form. For every method
/// rate = prefactor * exp(-exponent) with exponent = 2 E_b / sigma^2; for
/// the non-closed-form methods the prefactor is defined by that identity.
#[derive(Debug, Clone, Serialize)]
pub struct RateEstimate {
    /// Escape rate, per year.
    pub rate: f64,
    pub method: RateMethod,
    /// Barrier height E_b of the log-space potential.
    pub e_b: f64,
    /// Attempt frequency, per year.
    pub prefactor: f64,
    /// Arrhenius exponent E_b / T, dimensionless.
    pub exponent: f64,
    /// Validity caveat (shallow barrier, under-resolved grid), when any.
    pub warning: Option<String>,
}

/// Uniform interior grid for the discretized Hamiltonians: n points strictly
/// between the Dirichlet walls y_lo and y_hi, spacing (y_hi-y_lo)/(n+1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub y_lo: f64,
    pub y_hi: f64,
    pub n: usize,
}

impl SpectralGrid {
    pub fn spacing(&self) -> f64 {
        (self.y_hi - self.y_lo) / (self.n + 1) as f64
    }

    /// The n interior grid points.
    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (1..=self.n).map(|i| self.y_lo + h * i as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.y_hi > self.y_lo) || !self.y_lo.is_finite() || !self.y_hi.is_finite() {
            return Err(ModelError::Config("grid needs y_lo < y_hi, finite".into()));
        }
        if self.n < 3 {
            return Err(ModelError::Config("grid needs n >= 3 points".into()));
        }
        Ok(())
    }
}

/// Lowest partner-Hamiltonian eigenvalues on a common grid.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues_minus: Vec<f64>,
    pub eigenvalues_plus: Vec<f64>,
    pub grid: SpectralGrid,
    /// max |E-_{n+1} - E+_n| over n < k-1: small for an unbroken pairing.
    pub degeneracy_error: f64,
}

/// SUSY realization of the factorized Hamiltonians, decided by theta_bar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SusyBreaking {
    /// theta_bar > 0: normalizable zero-energy ground state exists.
    Unbroken,
    /// theta_bar < 0: no normalizable zero mode; metastability and escape.
    SpontaneouslyBroken,
    /// theta_bar = 0 exactly: the A/A-dagger zero modes merge.
    Boundary,
}

/// Closed-form escape rate from the barrier curvature pair:
/// r = sqrt(V''(y_min)|V''(y_max)|)/(2 pi) * exp(-2 E_b/sigma^2).
pub fn kramers_rate(p: &ModelParams<f64>) -> Result<RateEstimate> {
    let b = barrier(p)?;
    let exponent = b.e_b / b.temperature;
    // The curvature product is >= 0 (it vanishes with the discriminant);
    // clamp rounding noise at degenerate barriers so the rate tends to 0.
    let prefactor = (b.v2_min * b.v2_max.abs()).max(0.0).sqrt() / (2.0 * std::f64::consts::PI);
    Ok(RateEstimate {
        rate: prefactor * (-exponent).exp(),
        method: RateMethod::Kramers,
        e_b: b.e_b,
        prefactor,
        exponent,
        warning: shallow_barrier_warning(b.e_b, b.temperature),
    })
}

/// The closed form assumes E_b >> T; below 5 T the O(T/E_b) corrections are
/// no longer negligible and the estimate is flagged.
fn shallow_barrier_warning(e_b: f64, temperature: f64) -> Option<String> {
    (e_b <= 5.0 * temperature).then(|| {
        format!(
            "shallow barrier: E_b = {e_b:.3e} <= 5 T = {:.3e}; saddle-point validity needs E_b >> T",
            5.0 * temperature
        )
    })
}

/// Integrand excursion (V - V_peak)/T beyond which the tails are dead: the
/// weight falls below e^-42 ~ 5.7e-19 of the peak, far under the tolerance.
const EXCURSION_CUT: f64 = 42.0;

/// Escape rate from the ground-state energy split of the partner
/// Hamiltonians, evaluated as two quadratures of e^{-+2V/sigma^2} split at
/// the barrier top. The barrier-side integral covers the left half of its
/// peak and is doubled by peak symmetry, which reproduces the closed-form
/// prefactor exactly in the saddle-point limit.
pub fn susy_quadrature_rate(p: &ModelParams<f64>, rel_tol: f64) -> Result<RateEstimate> {
    let b = barrier(p)?;
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(ModelError::Config("rel_tol must be > 0".into()));
    }
    let t = b.temperature;
    let v = |y: f64| log_potential(y, p);
    let (v_min, v_max) = (v(b.y_min), v(b.y_max));
    let width = b.y_min - b.y_max;

    // Bounds: walk outward until the integrands are negligible. Rightward
    // of the well V climbs steeply; leftward of the barrier V drops
    // linearly in y.
    let (_, y_hi) = crate::numerics::roots::expand_until(b.y_min, width, |y| {
        (v(y) - v_min) / t > EXCURSION_CUT
    })?;
    let (_, y_lo) = crate::numerics::roots::expand_until(b.y_max, -width, |y| {
        (v_max - v(y)) / t > EXCURSION_CUT
    })?;

    // Peak values are factored out so both integrands are <= 1.
    let well = integrate(|y| (-(v(y) - v_min) / t).exp(), b.y_max, y_hi, rel_tol, 0.0)?;
    let bar = integrate(|y| ((v(y) - v_max) / t).exp(), y_lo, b.y_max, rel_tol, 0.0)?;

    let prefactor = t / (2.0 * well * bar);
    let exponent = b.e_b / t;
    Ok(RateEstimate {
        rate: prefactor * (-exponent).exp(),
        method: RateMethod::SusyQuadrature,
        e_b: b.e_b,
        prefactor,
        exponent,
        warning: None,
    })
}

/// Assembles the symmetric tridiagonal discretization of
/// H = -(sigma^4/2) d^2/dy^2 + U(y) with Dirichlet walls.
fn discretize(p: &ModelParams<f64>, grid: SpectralGrid, sector: Sector) -> (Vec<f64>, Vec<f64>) {
    let h = grid.spacing();
    let c = p.sigma.powi(4) / 2.0;
    let kinetic = 2.0 * c / (h * h);
    let diag: Vec<f64> = grid
        .points()
        .iter()
        .map(|&y| {
            let (um, up) = qm_potentials(y, p);
            kinetic
                + match sector {
                    Sector::Minus => um,
                    Sector::Plus => up,
                }
        })
        .collect();
    let off = vec![-c / (h * h); grid.n - 1];
    (diag, off)
}

/// Lowest k eigenvalues of both partner Hamiltonians on the given grid.
/// Does not require metastability: confining fixtures probe the unbroken
/// pairing E-_{n+1} = E+_n.
pub fn partner_spectra(
    p: &ModelParams<f64>,
    grid: SpectralGrid,
    k: usize,
) -> Result<SpectrumReport> {
    grid.validate()?;
    if k == 0 || k > grid.n {
        return Err(ModelError::Config(format!(
            "eigenvalue count k = {k} must be in 1..={}",
            grid.n
        )));
    }
    let (diag_m, off) = discretize(p, grid, Sector::Minus);
    let (diag_p, _) = discretize(p, grid, Sector::Plus);
    let eigenvalues_minus = lowest_eigenvalues(&diag_m, &off, k)?;
    let eigenvalues_plus = lowest_eigenvalues(&diag_p, &off, k)?;
    let degeneracy_error = (0..k.saturating_sub(1))
        .map(|n| (eigenvalues_minus[n + 1] - eigenvalues_plus[n]).abs())
        .fold(0.0f64, f64::max);
    Ok(SpectrumReport {
        eigenvalues_minus,
        eigenvalues_plus,
        grid,
        degeneracy_error,
    })
}

/// Ground state of one partner Hamiltonian: (energy, eigenvector on the
/// interior grid points, unit norm, largest component positive).
pub fn spectral_ground_state(
    p: &ModelParams<f64>,
    grid: SpectralGrid,
    sector: Sector,
) -> Result<(f64, Vec<f64>)> {
    grid.validate()?;
    let (diag, off) = discretize(p, grid, sector);
    let energy = lowest_eigenvalues(&diag, &off, 1)?[0];
    Ok((energy, eigenvector_for(&diag, &off, energy)))
}

/// Escape rate as the lowest H- eigenvalue over sigma^2 in an absorbing box.
///
/// The grid must bracket the extrema with margin: y_lo <= y_max - 5 w and
/// y_hi >= y_min + 3 w, w = sqrt(T/V''(y_min)) the thermal well width. The
/// rate is re-computed on a leftward-doubled domain at unchanged spacing;
/// a shift above 2% flags the box as too small.
pub fn spectral_rate(
    p: &ModelParams<f64>,
    grid: SpectralGrid,
) -> Result<(RateEstimate, SpectrumReport)> {
    let b = barrier(p)?;
    grid.validate()?;
    let w = (b.temperature / b.v2_min).sqrt();
    if grid.y_lo > b.y_max - 5.0 * w || grid.y_hi < b.y_min + 3.0 * w {
        return Err(ModelError::domain(format!(
            "grid [{}, {}] must bracket the extrema: need y_lo <= {:.4} and y_hi >= {:.4}",
            grid.y_lo,
            grid.y_hi,
            b.y_max - 5.0 * w,
            b.y_min + 3.0 * w
        )));
    }
    let report = partner_spectra(p, grid, 4)?;
    let sigma2 = 2.0 * b.temperature;
    let rate = report.eigenvalues_minus[0] / sigma2;

    let doubled = SpectralGrid {
        y_lo: grid.y_lo - (grid.y_hi - grid.y_lo),
        y_hi: grid.y_hi,
        n: 2 * grid.n + 1,
    };
    let (diag_m, off) = discretize(p, doubled, Sector::Minus);
    let rate_doubled = lowest_eigenvalues(&diag_m, &off, 1)?[0] / sigma2;
    let shift = (rate_doubled - rate) / rate;
    let warning = (shift.abs() > 0.02).then(|| {
        format!("rate shifts {shift:+.2e} relative under domain doubling; enlarge the grid")
    });

    let exponent = b.e_b / b.temperature;
    let estimate = RateEstimate {
        rate,
        method: RateMethod::Spectral,
        e_b: b.e_b,
        prefactor: rate * exponent.exp(),
        exponent,
        warning,
    };
    Ok((estimate, report))
}

/// SUSY realization from the sign of theta_bar.
pub fn susy_breaking_classify(p: &ModelParams<f64>) -> SusyBreaking {
    let tb = p.theta_bar();
    if tb > 0.0 {
        SusyBreaking::Unbroken
    } else if tb < 0.0 {
        SusyBreaking::SpontaneouslyBroken
    } else {
        SusyBreaking::Boundary
    }
}

/// Credit triangle: spread_bps = hazard * (1 - recovery) * 1e4.
pub fn hazard_to_spread(rate: f64, recovery: f64) -> Result<f64> {
    check_recovery(recovery)?;
    Ok(rate * (1.0 - recovery) * 1e4)
}

/// Inverse credit triangle: hazard = spread_bps / ((1 - recovery) * 1e4).
pub fn spread_to_hazard(spread_bps: f64, recovery: f64) -> Result<f64> {
    check_recovery(recovery)?;
    Ok(spread_bps / ((1.0 - recovery) * 1e4))
}

fn check_recovery(recovery: f64) -> Result<()> {
    if !(0.0..1.0).contains(&recovery) {
        return Err(ModelError::domain(format!(
            "recovery {recovery} must satisfy 0 <= R < 1"
        )));
    }
    Ok(())
}
