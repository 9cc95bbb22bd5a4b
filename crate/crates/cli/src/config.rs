//! Config-file defaults and the flag/file/default resolution order.

use std::path::Path;

use qed_core::{Calculus, ModelParams};
use serde::Deserialize;

use crate::{CliError, ModelArgs};

/// Optional defaults read from the JSON file named by `--config` or
/// `QED_CONFIG`. Every key matches a long flag (dashes spelled as
/// underscores); a flag given on the command line wins over the file, and
/// the file wins over the built-in default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub theta: Option<f64>,
    pub sigma: Option<f64>,
    pub kappa: Option<f64>,
    pub g: Option<f64>,
    pub nu: Option<u8>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub t_end: Option<f64>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub recovery: Option<f64>,
    pub grid_n: Option<usize>,
    pub grid_lo: Option<f64>,
    pub grid_hi: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            msg: e.to_string(),
        })
    }
}

/// Flag value if given, else config-file value, else the built-in default.
pub fn pick<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn resolve_nu(flag: Option<u8>, file: &FileConfig) -> Result<Calculus, CliError> {
    match flag.or(file.nu) {
        None | Some(2) => Ok(Calculus::Ito),
        Some(1) => Ok(Calculus::Stratonovich),
        Some(n) => Err(CliError::Usage(format!(
            "--nu must be 1 (Stratonovich) or 2 (Ito), got {n}"
        ))),
    }
}

/// Builds model parameters from flags over file defaults. `theta` and
/// `sigma` have no built-in default and must come from one of the two;
/// `kappa` and `g` default to 0 (geometric Brownian motion).
pub fn resolve_model(args: &ModelArgs, file: &FileConfig) -> Result<ModelParams<f64>, CliError> {
    let required = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| {
            CliError::Usage(format!(
                "{flag} is required (pass the flag or set it in the config file)"
            ))
        })
    };
    let theta = required(args.theta.or(file.theta), "--theta")?;
    let sigma = required(args.sigma.or(file.sigma), "--sigma")?;
    let kappa = pick(args.kappa, file.kappa, 0.0);
    let g = pick(args.g, file.g, 0.0);
    let nu = resolve_nu(args.nu, file)?;
    Ok(ModelParams::new(theta, kappa, g, sigma, nu)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn args(theta: Option<f64>, sigma: Option<f64>) -> ModelArgs {
        ModelArgs {
            theta,
            sigma,
            kappa: None,
            g: None,
            nu: None,
        }
    }

    #[test]
    fn flags_override_file_and_file_overrides_defaults() {
        let file = FileConfig {
            theta: Some(0.3),
            sigma: Some(0.5),
            kappa: Some(-1.0),
            ..FileConfig::default()
        };
        let p = resolve_model(&args(Some(0.1), None), &file).unwrap();
        assert_eq!(p.theta, 0.1); // flag beats file
        assert_eq!(p.sigma, 0.5); // file fills the gap
        assert_eq!(p.kappa, -1.0); // file beats the built-in 0
        assert_eq!(p.g, 0.0); // built-in default
        assert_eq!(p.nu, Calculus::Ito);
    }

    #[test]
    fn missing_required_parameter_is_a_usage_error() {
        let err = resolve_model(&args(Some(0.1), None), &FileConfig::default()).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)), "{err}");
        assert!(err.to_string().contains("--sigma"));
    }

    #[test]
    fn nu_accepts_only_the_two_conventions() {
        let file = FileConfig::default();
        assert_eq!(resolve_nu(None, &file).unwrap(), Calculus::Ito);
        assert_eq!(resolve_nu(Some(1), &file).unwrap(), Calculus::Stratonovich);
        assert!(matches!(
            resolve_nu(Some(3), &file),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("qed.json");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(br#"{"theta": 0.1, "thtea": 2.0}"#).unwrap();
        let err = FileConfig::load(Some(&path)).unwrap_err();
        assert!(matches!(err, CliError::Config { .. }), "{err}");
    }

    #[test]
    fn absent_config_path_means_empty_defaults() {
        assert_eq!(FileConfig::load(None).unwrap(), FileConfig::default());
    }
}
