//! Parameter vectors, the market-to-model mapping, and regime
//! classification.
//!
//! The dynamical vector (theta, kappa, g, sigma, nu) drives every potential
//! and rate in the crate; the economic vector (r_f, c, mu, phi, lambda)
//! maps onto it. All rates are annualized: the time unit is years.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::scalar::Scalar;

/// Stochastic-calculus selector: nu = 1 reads the noise in the
/// Stratonovich sense, nu = 2 in the Ito sense (the default everywhere;
/// Stratonovich is honored by the steady-state module only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Calculus {
    Stratonovich,
    Ito,
}

impl Calculus {
    /// The integer nu carried by the model equations.
    pub fn nu<S: Scalar>(self) -> S {
        match self {
            Calculus::Stratonovich => S::one(),
            Calculus::Ito => S::of(2.0),
        }
    }
}

impl TryFrom<u8> for Calculus {
    type Error = ModelError;
    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Calculus::Stratonovich),
            2 => Ok(Calculus::Ito),
            other => Err(ModelError::domain(format!(
                "calculus selector nu must be 1 (Stratonovich) or 2 (Ito), got {other}"
            ))),
        }
    }
}

impl From<Calculus> for u8 {
    fn from(value: Calculus) -> u8 {
        match value {
            Calculus::Stratonovich => 1,
            Calculus::Ito => 2,
        }
    }
}

/// Economic parameters of the price equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams<S> {
    /// Risk-free rate (per year).
    pub r_f: S,
    /// Dividend rate (per year).
    pub c: S,
    /// Linear market-impact coefficient (dimensionless, >= 0).
    pub mu: S,
    /// Linear capital-supply coefficient (per year).
    pub phi: S,
    /// Quadratic capital-supply coefficient (per year, >= 0).
    pub lambda: S,
}

impl<S: Scalar> MarketParams<S> {
    pub fn new(r_f: S, c: S, mu: S, phi: S, lambda: S) -> Result<Self> {
        if mu < S::zero() {
            return Err(ModelError::domain("market impact mu must be >= 0"));
        }
        if lambda < S::zero() {
            return Err(ModelError::domain("capital-supply lambda must be >= 0"));
        }
        Ok(Self {
            r_f,
            c,
            mu,
            phi,
            lambda,
        })
    }
}

/// Dynamical parameters of the QED drift and noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<S> {
    /// Drift scale (per year).
    pub theta: S,
    /// Quadratic drift coefficient (per year).
    pub kappa: S,
    /// Cubic drift coefficient (per year, >= 0).
    pub g: S,
    /// Noise volatility (per sqrt-year, > 0).
    pub sigma: S,
    /// Stochastic-calculus selector.
    pub nu: Calculus,
}

impl<S: Scalar> ModelParams<S> {
    pub fn new(theta: S, kappa: S, g: S, sigma: S, nu: Calculus) -> Result<Self> {
        if !(sigma > S::zero()) {
            return Err(ModelError::domain("volatility sigma must be > 0"));
        }
        if g < S::zero() {
            return Err(ModelError::domain("cubic coefficient g must be >= 0"));
        }
        Ok(Self {
            theta,
            kappa,
            g,
            sigma,
            nu,
        })
    }

    /// Builds the vector from the log-space drift scale theta_bar instead
    /// of theta.
    pub fn from_theta_bar(theta_bar: S, kappa: S, g: S, sigma: S, nu: Calculus) -> Result<Self> {
        Self::new(
            theta_bar + sigma * sigma / S::of(2.0),
            kappa,
            g,
            sigma,
            nu,
        )
    }

    /// Log-space drift scale theta - sigma^2/2.
    pub fn theta_bar(&self) -> S {
        self.theta - self.sigma * self.sigma / S::of(2.0)
    }

    /// Noise temperature T = sigma^2/2.
    pub fn temperature(&self) -> S {
        self.sigma * self.sigma / S::of(2.0)
    }

    /// Discriminant kappa^2 + 4 g theta_bar of the log-space extremum
    /// condition; real extrema exist iff it is non-negative.
    pub fn discriminant(&self) -> S {
        self.kappa * self.kappa + S::of(4.0) * self.g * self.theta_bar()
    }
}

/// Regime of the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeKind {
    /// theta_bar >= 0: log-price grows without a trapping well.
    GrowthStable,
    /// kappa < 0, theta_bar < 0, real barrier: finite-lifetime well.
    Metastable,
    /// theta_bar < 0 with no real barrier: decay without trapping.
    Unstable,
    /// kappa = 0 and g = 0: geometric Brownian motion.
    GbmLimit,
}

/// Classification outcome, with the derived phi-window of the metastable
/// band when the economic parameters are available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime<S> {
    pub kind: RegimeKind,
    /// Upper phi bound sigma^2/2 - r_f + c (requires MarketParams).
    pub phi_bar: Option<S>,
    /// Lower phi bound (-lambda + sqrt(4 mu lambda phi_bar)) / mu; None when
    /// mu = 0 or the radicand is negative.
    pub phi_1: Option<S>,
}

/// Maps economic parameters onto the drift coefficients: g = mu lambda,
/// kappa = mu phi - lambda, theta = r_f - c + phi. Volatility and the
/// calculus selector are not economic quantities and are supplied directly.
pub fn market_to_model<S: Scalar>(
    m: &MarketParams<S>,
    sigma: S,
    nu: Calculus,
) -> Result<ModelParams<S>> {
    ModelParams::new(
        m.r_f - m.c + m.phi,
        m.mu * m.phi - m.lambda,
        m.mu * m.lambda,
        sigma,
        nu,
    )
}

/// Drift coefficients from the zero-level parametrization of the classical
/// potential: kappa = theta (3/2)(a+b)/(ab), g = -2 theta/(ab).
pub fn ab_to_model<S: Scalar>(theta: S, a: S, b: S) -> Result<(S, S)> {
    if a == S::zero() || b == S::zero() {
        return Err(ModelError::domain(
            "zero-level points a, b must both be nonzero",
        ));
    }
    let ab = a * b;
    let kappa = theta * S::of(1.5) * (a + b) / ab;
    let g = -S::of(2.0) * theta / ab;
    Ok((kappa, g))
}

/// Classifies the regime from model-space conditions (authoritative) and
/// derives the phi-window bounds when `market` is provided.
pub fn classify_regime<S: Scalar>(
    p: &ModelParams<S>,
    market: Option<&MarketParams<S>>,
) -> Regime<S> {
    let theta_bar = p.theta_bar();
    let kind = if p.kappa == S::zero() && p.g == S::zero() {
        RegimeKind::GbmLimit
    } else if p.kappa < S::zero() && theta_bar < S::zero() && p.discriminant() >= S::zero() {
        RegimeKind::Metastable
    } else if theta_bar < S::zero() {
        RegimeKind::Unstable
    } else {
        RegimeKind::GrowthStable
    };

    let (phi_bar, phi_1) = match market {
        None => (None, None),
        Some(m) => {
            let pb = p.sigma * p.sigma / S::of(2.0) - m.r_f + m.c;
            let radicand = S::of(4.0) * m.mu * m.lambda * pb;
            let p1 = if m.mu > S::zero() && radicand >= S::zero() {
                Some((-m.lambda + radicand.sqrt()) / m.mu)
            } else {
                None
            };
            (Some(pb), p1)
        }
    };

    Regime {
        kind,
        phi_bar,
        phi_1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(theta: f64, kappa: f64, g: f64, sigma: f64) -> ModelParams<f64> {
        ModelParams::new(theta, kappa, g, sigma, Calculus::Ito).unwrap()
    }

    #[test]
    fn market_mapping_examples() {
        let m = MarketParams::<f64>::new(0.015, 0.01, 0.001, 0.5, 0.0).unwrap();
        let p = market_to_model(&m, 0.2, Calculus::Ito).unwrap();
        assert!((p.theta - 0.505).abs() < 1e-15);
        assert!((p.kappa - 0.0005).abs() < 1e-15);
        assert_eq!(p.g, 0.0);

        // Frictionless limit: mu = lambda = 0 collapses to GBM drift.
        let m = MarketParams::<f64>::new(0.02, 0.0, 0.0, 0.4, 0.0).unwrap();
        let p = market_to_model(&m, 0.2, Calculus::Ito).unwrap();
        assert_eq!((p.kappa, p.g), (0.0, 0.0));
        assert!((p.theta - 0.42).abs() < 1e-15);

        let m = MarketParams::<f64>::new(0.015, 0.01, 0.001, -0.3, 0.001).unwrap();
        let p = market_to_model(&m, 0.2, Calculus::Ito).unwrap();
        assert!((p.theta - (-0.295)).abs() < 1e-15);
        assert!((p.kappa - (-0.0013)).abs() < 1e-18);
        assert!((p.g - 1e-6).abs() < 1e-20);
    }

    #[test]
    fn ab_mapping_examples() {
        let (kappa, g) = ab_to_model::<f64>(-1.0, 2.5, 4.0).unwrap();
        assert!((kappa - (-0.975)).abs() < 1e-15);
        assert!((g - 0.2).abs() < 1e-15);

        let (kappa, g) = ab_to_model::<f64>(1.0, -2.5, 2.5).unwrap();
        assert!(kappa.abs() < 1e-15);
        assert!((g - 0.32).abs() < 1e-15);

        // Symmetric zero points kill the cubic term for any theta.
        for theta in [-2.0, 0.3, 7.0] {
            let (kappa, _) = ab_to_model::<f64>(theta, -1.7, 1.7).unwrap();
            assert_eq!(kappa, 0.0);
        }

        assert!(ab_to_model(1.0, 0.0, 1.0).is_err());
        assert!(ab_to_model(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn theta_bar_examples() {
        let p = mp(-1.6485, -4.9464, 3.7041, 0.0318);
        assert!((p.theta_bar() - (-1.64900562)).abs() < 1e-9);

        let sigma = 0.3f64;
        let p = mp(sigma * sigma / 2.0, 0.0, 0.0, sigma);
        assert_eq!(p.theta_bar(), 0.0);

        let p = mp(0.1, 0.0, 0.0, 0.25);
        assert!((p.theta_bar() - 0.06875).abs() < 1e-15);
    }

    #[test]
    fn regime_examples() {
        let p = mp(-1.6485, -4.9464, 3.7041, 0.0318);
        assert!(p.discriminant() > 0.0);
        assert_eq!(classify_regime(&p, None).kind, RegimeKind::Metastable);

        let p = mp(0.3, 0.0, 0.0, 0.2);
        assert_eq!(classify_regime(&p, None).kind, RegimeKind::GbmLimit);

        // Discriminant 1 - 8 < 0: decay without a trapping barrier.
        let p = ModelParams::from_theta_bar(-1.0, -1.0, 2.0, 0.2, Calculus::Ito).unwrap();
        assert_eq!(classify_regime(&p, None).kind, RegimeKind::Unstable);

        let p = mp(0.5, -1.0, 2.0, 0.2);
        assert_eq!(classify_regime(&p, None).kind, RegimeKind::GrowthStable);
    }

    #[test]
    fn kappa_sign_flips_at_phi_equals_lambda_over_mu() {
        let (mu, lambda) = (0.3, 0.06);
        let pivot = lambda / mu;
        for (phi, negative) in [(pivot - 1e-6, true), (pivot + 1e-6, false)] {
            let m = MarketParams::<f64>::new(0.01, 0.0, mu, phi, lambda).unwrap();
            let p = market_to_model(&m, 0.2, Calculus::Ito).unwrap();
            assert_eq!(p.kappa < 0.0, negative, "phi = {phi}");
        }
    }

    #[test]
    fn phi_window_reporting() {
        let p = mp(-0.2, -1.0, 0.5, 0.25);
        let m = MarketParams::<f64>::new(0.01, 0.005, 0.4, -0.5, 0.08).unwrap();
        let regime = classify_regime(&p, Some(&m));
        let phi_bar = 0.25f64 * 0.25 / 2.0 - 0.01 + 0.005;
        assert!((regime.phi_bar.unwrap() - phi_bar).abs() < 1e-15);
        let phi_1 = (-0.08 + (4.0 * 0.4 * 0.08 * phi_bar).sqrt()) / 0.4;
        assert!((regime.phi_1.unwrap() - phi_1).abs() < 1e-15);

        // mu = 0 leaves the lower bound undefined, flagged rather than thrown.
        let m0 = MarketParams::new(0.01, 0.005, 0.0, -0.5, 0.08).unwrap();
        let regime = classify_regime(&p, Some(&m0));
        assert!(regime.phi_bar.is_some() && regime.phi_1.is_none());

        // Negative radicand likewise.
        let mneg = MarketParams::new(0.2, 0.0, 0.4, -0.5, 0.08).unwrap();
        assert!(classify_regime(&p, Some(&mneg)).phi_1.is_none());
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        assert!(ModelParams::new(0.1, 0.0, -0.1, 0.2, Calculus::Ito).is_err());
        assert!(ModelParams::new(0.1, 0.0, 0.1, 0.0, Calculus::Ito).is_err());
        assert!(MarketParams::new(0.0, 0.0, -1.0, 0.0, 0.0).is_err());
        assert!(MarketParams::new(0.0, 0.0, 0.0, 0.0, -1.0).is_err());
        assert!(Calculus::try_from(3u8).is_err());
        assert_eq!(Calculus::try_from(1u8).unwrap(), Calculus::Stratonovich);
    }

    #[test]
    fn works_in_single_precision() {
        let p = ModelParams::<f32>::new(-1.6485, -4.9464, 3.7041, 0.0318, Calculus::Ito).unwrap();
        assert_eq!(classify_regime(&p, None).kind, RegimeKind::Metastable);
        assert!((p.theta_bar() - (-1.649_005_6f32)).abs() < 1e-5);
    }
}
