//! Subcommand implementations: resolve settings, call the library, emit
//! CSV series or JSON reports.

use std::path::Path;

use qed_core::calibrate::{
    calibrate as fit_series, compare_models, gbm_mle, CalibConfig, OptimizerOptions,
};
use qed_core::dynamics::{mc_escape_rate, simulate_sde, EscapeEstimate, SdeConfig, Space};
use qed_core::fpe::{
    normalizability_threshold, partition_function, steady_state_x, steady_state_y,
    NormalizabilityReport, PartitionMethod, PartitionValue,
};
use qed_core::instanton::{instanton_trajectory, InstantonKind};
use qed_core::params::classify_regime;
use qed_core::potentials::{
    barrier, log_potential, log_potential_d1, log_potential_d2, qm_potentials, BarrierReport,
};
use qed_core::rates::{
    hazard_to_spread, kramers_rate, spectral_rate, susy_quadrature_rate, RateEstimate,
    SpectralGrid,
};
use qed_core::{ModelParams, Regime, RegimeKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{pick, resolve_model, resolve_nu, FileConfig};
use crate::output::{fmt, fmt_opt, json, json_stdout, row, writer};
use crate::{CliError, GridArgs, ModelArgs};

/// Relative tolerance handed to the quadrature-based rate estimator.
const SUSY_REL_TOL: f64 = 1e-10;

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 {
        return Err(CliError::Usage("--grid-n must be >= 2".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Usage(format!(
            "grid edges must be finite with --grid-lo < --grid-hi, got [{lo}, {hi}]"
        )));
    }
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + h * i as f64).collect())
}

pub fn potential(
    model: &ModelArgs,
    grid: &GridArgs,
    file: &FileConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let p = resolve_model(model, file)?;
    // Default window: both extrema with one barrier-to-well width of margin;
    // without a barrier, a fixed log-price window.
    let (def_lo, def_hi) = match barrier(&p) {
        Ok(b) => {
            let width = b.y_min - b.y_max;
            (b.y_max - 2.0 * width, b.y_min + width)
        }
        Err(_) => (-3.0, 3.0),
    };
    let lo = pick(grid.grid_lo, file.grid_lo, def_lo);
    let hi = pick(grid.grid_hi, file.grid_hi, def_hi);
    let n = pick(grid.grid_n, file.grid_n, 501);
    let ys = linspace(lo, hi, n)?;

    let mut w = writer(out)?;
    row(&mut w, &["y,v,v_d1,v_d2,u_minus,u_plus".into()])?;
    for &y in &ys {
        let (u_minus, u_plus) = qm_potentials(y, &p);
        row(
            &mut w,
            &[
                fmt(y),
                fmt(log_potential(y, &p)),
                fmt(log_potential_d1(y, &p)),
                fmt(log_potential_d2(y, &p)),
                fmt(u_minus),
                fmt(u_plus),
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    model: &ModelArgs,
    gbm: bool,
    x0: Option<f64>,
    space: Space,
    paths: Option<usize>,
    dt: Option<f64>,
    t_end: Option<f64>,
    seed: Option<u64>,
    file: &FileConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut p = resolve_model(model, file)?;
    if gbm {
        p = ModelParams::new(p.theta, 0.0, 0.0, p.sigma, p.nu)?;
    }
    let cfg = SdeConfig {
        x0: x0.unwrap_or(match space {
            Space::X => 1.0,
            Space::Y => 0.0,
        }),
        t_end: pick(t_end, file.t_end, 1.0),
        dt: pick(dt, file.dt, 1e-3),
        n_paths: pick(paths, file.paths, 1),
        seed: pick(seed, file.seed, 0),
        space,
        absorb: None,
    };
    let ens = simulate_sde(&p, &cfg)?;

    let mut w = writer(out)?;
    let mut header = vec!["t".to_string()];
    header.extend((0..ens.paths.len()).map(|j| format!("path_{j}")));
    row(&mut w, &[header.join(",")])?;
    for (i, &t) in ens.times.iter().enumerate() {
        let mut cells = Vec::with_capacity(ens.paths.len() + 1);
        cells.push(fmt(t));
        cells.extend(ens.paths.iter().map(|path| fmt(path[i])));
        row(&mut w, &cells)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct EscapeReport<'a> {
    params: &'a ModelParams<f64>,
    dt: f64,
    seed: u64,
    t_max: Option<f64>,
    estimate: EscapeEstimate,
}

pub fn escape(
    model: &ModelArgs,
    dt: Option<f64>,
    paths: Option<usize>,
    seed: Option<u64>,
    t_end: Option<f64>,
    file: &FileConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let p = resolve_model(model, file)?;
    let dt = pick(dt, file.dt, 1e-3);
    let n_paths = pick(paths, file.paths, 2000);
    let seed = pick(seed, file.seed, 0);
    let t_max = t_end.or(file.t_end);
    let estimate = mc_escape_rate(&p, dt, n_paths, seed, t_max)?;

    let mut w = writer(out)?;
    json(
        &mut w,
        &EscapeReport {
            params: &p,
            dt,
            seed,
            t_max,
            estimate,
        },
    )?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RatesReport<'a> {
    params: &'a ModelParams<f64>,
    regime: Regime<f64>,
    recovery: f64,
    barrier: Option<BarrierReport<f64>>,
    kramers: Option<RateEstimate>,
    susy_quadrature: Option<RateEstimate>,
    spectral: Option<RateEstimate>,
    /// max |E-_{n+1} - E+_n| from the spectral run's SUSY pairing check.
    spectral_degeneracy_error: Option<f64>,
    monte_carlo: Option<EscapeEstimate>,
    /// Kramers rate through the credit triangle, rate x (1-R) x 1e4.
    spread_bps: Option<f64>,
    note: Option<String>,
}

/// Spectral grid wide enough for the quasi-bound state: many barrier widths
/// past the top on the escape side, several well widths on the other.
fn default_spectral_grid(b: &BarrierReport<f64>, n: usize) -> SpectralGrid {
    let w_well = (b.temperature / b.v2_min).sqrt();
    let w_bar = (b.temperature / b.v2_max.abs()).sqrt();
    SpectralGrid {
        y_lo: (b.y_max - 12.0 * w_bar - 6.0 * w_well).min(b.y_max - 6.0 * w_well),
        y_hi: (b.y_min + 6.0 * w_well).max(b.y_min + 4.0 * w_well),
        n,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn rates(
    model: &ModelArgs,
    recovery: Option<f64>,
    grid: &GridArgs,
    paths: Option<usize>,
    dt: Option<f64>,
    seed: Option<u64>,
    file: &FileConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let p = resolve_model(model, file)?;
    let recovery = pick(recovery, file.recovery, 0.4);
    let regime = classify_regime(&p, None);

    let mut report = RatesReport {
        params: &p,
        regime,
        recovery,
        barrier: None,
        kramers: None,
        susy_quadrature: None,
        spectral: None,
        spectral_degeneracy_error: None,
        monte_carlo: None,
        spread_bps: None,
        note: None,
    };
    if regime.kind == RegimeKind::Metastable {
        let b = barrier(&p)?;
        let n = pick(grid.grid_n, file.grid_n, 2001);
        let def = default_spectral_grid(&b, n);
        let sgrid = SpectralGrid {
            y_lo: pick(grid.grid_lo, file.grid_lo, def.y_lo),
            y_hi: pick(grid.grid_hi, file.grid_hi, def.y_hi),
            n,
        };
        let kram = kramers_rate(&p)?;
        let (spec, spectrum) = spectral_rate(&p, sgrid)?;
        report.spread_bps = Some(hazard_to_spread(kram.rate, recovery)?);
        report.barrier = Some(b);
        report.kramers = Some(kram);
        report.susy_quadrature = Some(susy_quadrature_rate(&p, SUSY_REL_TOL)?);
        report.spectral = Some(spec);
        report.spectral_degeneracy_error = Some(spectrum.degeneracy_error);
        if let Some(n_paths) = paths {
            let dt = pick(dt, file.dt, 1e-3);
            let seed = pick(seed, file.seed, 0);
            report.monte_carlo = Some(mc_escape_rate(&p, dt, n_paths, seed, None)?);
        }
    } else {
        report.note = Some(format!(
            "no metastable barrier in the {:?} regime: rate columns stay empty",
            regime.kind
        ));
    }

    // A .csv --out writes the fixed rates.csv row; anything else gets JSON.
    if out.is_some_and(|p| p.extension().is_some_and(|e| e == "csv")) {
        let csv_row = qed_dataio::RatesRow {
            theta: p.theta,
            sigma: p.sigma,
            kappa: p.kappa,
            g: p.g,
            barrier_height: report.barrier.as_ref().map(|b| b.e_b),
            kramers_rate: report.kramers.as_ref().map(|k| k.rate),
            spread_bps: report.spread_bps,
        };
        qed_dataio::write_rates_csv(out.expect("checked above"), &[csv_row])?;
        return Ok(());
    }
    let mut w = writer(out)?;
    json(&mut w, &report)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct InstantonSummary {
    kind: InstantonKind,
    t_span: f64,
    n: usize,
    action_s0: f64,
    endpoints: (f64, f64),
    endpoint_gap: f64,
    warning: Option<String>,
}

pub fn instanton(
    model: &ModelArgs,
    kind: InstantonKind,
    t_end: Option<f64>,
    grid_n: Option<usize>,
    file: &FileConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let p = resolve_model(model, file)?;
    let t_span = pick(t_end, file.t_end, 20.0);
    let n = pick(grid_n, file.grid_n, 2001);
    let traj = instanton_trajectory(&p, t_span, n, kind)?;

    let mut w = writer(out)?;
    row(&mut w, &["t,y,x".into()])?;
    for (&t, &y) in traj.times.iter().zip(&traj.values) {
        row(&mut w, &[fmt(t), fmt(y), fmt(y.exp())])?;
    }
    w.flush()?;
    if out.is_some() {
        json_stdout(&InstantonSummary {
            kind: traj.kind,
            t_span,
            n,
            action_s0: traj.action_s0,
            endpoints: traj.endpoints,
            endpoint_gap: traj.endpoint_gap,
            warning: traj.warning,
        })?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DensityReport<'a> {
    params: &'a ModelParams<f64>,
    space: Space,
    normalizable: bool,
    threshold: NormalizabilityReport,
    /// Partition function Z; log_z carries it when Z overflows.
    z: Option<f64>,
    log_z: Option<f64>,
    partition: PartitionValue,
}

pub fn density(
    model: &ModelArgs,
    space: Space,
    grid: &GridArgs,
    method: PartitionMethod,
    file: &FileConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let p = resolve_model(model, file)?;
    let (def_lo, def_hi) = match space {
        Space::X => (1e-3, 10.0),
        Space::Y => ((1e-3f64).ln(), (10.0f64).ln()),
    };
    let lo = pick(grid.grid_lo, file.grid_lo, def_lo);
    let hi = pick(grid.grid_hi, file.grid_hi, def_hi);
    let n = pick(grid.grid_n, file.grid_n, 501);
    let points = linspace(lo, hi, n)?;
    let ss = match space {
        Space::X => steady_state_x(&p, &points)?,
        Space::Y => steady_state_y(&p, &points)?,
    };
    let partition = partition_function(&p, method)?;

    let mut w = writer(out)?;
    let coord = match space {
        Space::X => "x",
        Space::Y => "y",
    };
    row(&mut w, &[format!("{coord},density")])?;
    for (&x, &d) in ss.grid.iter().zip(&ss.density) {
        row(&mut w, &[fmt(x), fmt(d)])?;
    }
    w.flush()?;
    if out.is_some() {
        json_stdout(&DensityReport {
            params: &p,
            space,
            normalizable: ss.normalizable,
            threshold: normalizability_threshold(&p),
            z: ss.z,
            log_z: ss.log_z,
            partition,
        })?;
    }
    Ok(())
}

/// Shared calibration flags, resolved against the config file in
/// [`fit_config`].
pub struct FitFlags {
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub dt: Option<f64>,
    pub recovery: Option<f64>,
    pub nu: Option<u8>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

fn fit_config(flags: &FitFlags, file: &FileConfig) -> Result<CalibConfig, CliError> {
    let d = CalibConfig::default();
    Ok(CalibConfig {
        lambda1: pick(flags.lambda1, file.lambda1, d.lambda1),
        lambda2: pick(flags.lambda2, file.lambda2, d.lambda2),
        dt: pick(flags.dt, file.dt, d.dt),
        recovery: pick(flags.recovery, file.recovery, d.recovery),
        nu: resolve_nu(flags.nu, file)?,
        optimizer: OptimizerOptions {
            seed: pick(flags.seed, file.seed, d.optimizer.seed),
            ..d.optimizer
        },
    })
}

fn init_pool(workers: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--workers: {e}")))?;
    }
    Ok(())
}

struct FitTask {
    symbol: String,
    year: i32,
    y: Vec<f64>,
    observed_mean_spread_bps: Option<f64>,
}

#[derive(Serialize)]
struct CalibrateSummary {
    out: String,
    rows: usize,
    symbols: Vec<String>,
}

pub fn calibrate(
    prices: &Path,
    cds: Option<&Path>,
    symbols: &[String],
    flags: FitFlags,
    file: &FileConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    init_pool(flags.workers)?;
    let config = fit_config(&flags, file)?;
    let symbols: Vec<String> = if symbols.is_empty() {
        qed_dataio::list_symbols(prices)?
    } else {
        let mut s = symbols.to_vec();
        s.sort();
        s.dedup();
        s
    };

    let mut tasks: Vec<FitTask> = Vec::new();
    for sym in &symbols {
        let series = qed_dataio::load_prices(prices, sym)?;
        if series.y.is_empty() {
            return Err(qed_dataio::DataError::Data(format!("no price rows for symbol {sym}")).into());
        }
        let means = match cds {
            Some(path) => qed_dataio::load_cds(path, sym)?.annual_means,
            None => Vec::new(),
        };
        for part in qed_dataio::partition_by_year(&series) {
            if part.too_short {
                continue;
            }
            let observed = means
                .iter()
                .find(|(year, _)| *year == part.year)
                .map(|&(_, s)| s);
            tasks.push(FitTask {
                symbol: sym.clone(),
                year: part.year,
                y: part.series.y,
                observed_mean_spread_bps: observed,
            });
        }
    }

    let rows = tasks
        .par_iter()
        .map(|t| -> Result<qed_dataio::CalibrationRow, CliError> {
            let gbm = gbm_mle(&t.y, config.dt)?;
            let fit = fit_series(&t.y, t.observed_mean_spread_bps, &config)?;
            Ok(qed_dataio::CalibrationRow {
                symbol: t.symbol.clone(),
                year: t.year,
                theta: fit.params.theta,
                sigma: fit.params.sigma,
                kappa: fit.params.kappa,
                g: fit.params.g,
                nll_gbm: gbm.nll,
                nll_qed: fit.nll,
                kramers_rate: fit.kramers_rate,
                model_spread_bps: fit.model_spread_bps,
                observed_mean_spread_bps: fit.observed_mean_spread_bps,
                converged: fit.converged,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let out_path = out.unwrap_or(Path::new("calibration.csv"));
    qed_dataio::write_calibration_csv(out_path, &rows)?;
    json_stdout(&CalibrateSummary {
        out: out_path.display().to_string(),
        rows: rows.len(),
        symbols,
    })
}

pub fn compare(
    prices: &Path,
    cds: Option<&Path>,
    symbol: &str,
    flags: FitFlags,
    file: &FileConfig,
    out: Option<&Path>,
) -> Result<(), CliError> {
    init_pool(flags.workers)?;
    let config = fit_config(&flags, file)?;
    let series = qed_dataio::load_prices(prices, symbol)?;
    if series.y.is_empty() {
        return Err(qed_dataio::DataError::Data(format!("no price rows for symbol {symbol}")).into());
    }
    let by_year: Vec<(i32, Vec<f64>)> = qed_dataio::partition_by_year(&series)
        .into_iter()
        .filter(|part| !part.too_short)
        .map(|part| (part.year, part.series.y))
        .collect();
    let cds_means = match cds {
        Some(path) => qed_dataio::load_cds(path, symbol)?.annual_means,
        None => Vec::new(),
    };
    let table = compare_models(&by_year, &cds_means, &config)?;

    let mut w = writer(out)?;
    row(
        &mut w,
        &["year,nll_gbm,nll_qed,nll_qed_constrained,model_spread_bps,observed_mean_spread_bps"
            .into()],
    )?;
    for r in &table {
        row(
            &mut w,
            &[
                r.year.to_string(),
                fmt(r.nll_gbm),
                fmt(r.nll_qed),
                fmt_opt(r.nll_qed_constrained),
                fmt_opt(r.model_spread_bps),
                fmt_opt(r.observed_mean_spread_bps),
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}
