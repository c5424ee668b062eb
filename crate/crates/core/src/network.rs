//! Scenario parameters, derived constants and the channel-state law.
//!
//! All quantities are linear (no dB). The channel state of the typical link
//! is S = |h₀|²R₀^{−α} / (P·Σ|h_k|²‖x_k‖^{−α} + σ_N²) with Rayleigh fading.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::z_delta;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// Transmitter density per unit area.
    pub lambda: f64,
    /// Link distance R₀.
    pub r0: f64,
    /// Path-loss exponent, must exceed 2.
    pub alpha: f64,
    /// Transmit power P.
    pub power: f64,
    /// Noise power σ_N².
    pub noise: f64,
}

impl NetworkParams {
    pub fn new(lambda: f64, r0: f64, alpha: f64, power: f64, noise: f64) -> Result<Self> {
        let p = NetworkParams {
            lambda,
            r0,
            alpha,
            power,
            noise,
        };
        p.validate()?;
        Ok(p)
    }

    /// Interference-limited scenario (σ_N² = 0) with R₀ = 1, P = 1.
    pub fn interference_limited(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(lambda, 1.0, alpha, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", self.lambda, "must be finite and >= 0"));
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(Error::param("r0", self.r0, "must be finite and > 0"));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", self.alpha, "must be finite and > 2"));
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::param("power", self.power, "must be finite and > 0"));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::param("noise", self.noise, "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        NetworkParams { lambda, ..self }
    }

    pub fn with_power(self, power: f64) -> Self {
        NetworkParams { power, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        NetworkParams { alpha, ..self }
    }

    pub fn with_noise(self, noise: f64) -> Self {
        NetworkParams { noise, ..self }
    }

    pub fn derive(&self) -> Result<DerivedConstants> {
        self.validate()?;
        let delta = 2.0 / self.alpha;
        let z = z_delta(delta)?;
        let g_lambda_tilde = PI * self.lambda * self.r0 * self.r0 * z;
        Ok(DerivedConstants {
            delta,
            z_delta: z,
            g_lambda: g_lambda_tilde * self.power.powf(delta),
            g_noise: self.r0.powf(self.alpha) * self.noise,
            g_lambda_tilde,
            sigma_tilde: self.noise / self.power,
        })
    }

    /// The parameters a regime actually computes with: λ is dropped in the
    /// noise-limited limit and σ_N² in the interference-limited one.
    pub fn effective(&self, regime: Regime) -> Self {
        match regime {
            Regime::General => *self,
            Regime::NoiseLimited => self.with_lambda(0.0),
            Regime::InterferenceLimited => self.with_noise(0.0),
        }
    }
}

/// Constants assembled from [`NetworkParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    /// δ = 2/α.
    pub delta: f64,
    pub z_delta: f64,
    /// G_λ = πλR₀²P^δ Z_δ.
    pub g_lambda: f64,
    /// G_N = R₀^α σ_N².
    pub g_noise: f64,
    /// G̃_λ = πλR₀² Z_δ.
    pub g_lambda_tilde: f64,
    /// σ̃_N² = σ_N²/P.
    pub sigma_tilde: f64,
}

impl DerivedConstants {
    /// −ln P[S > s] = G_λ s^δ + G_N s.
    pub fn state_exponent(&self, s: f64) -> f64 {
        self.g_lambda * s.powf(self.delta) + self.g_noise * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    General,
    NoiseLimited,
    InterferenceLimited,
}

impl Regime {
    /// Limiting regime implied by the parameters: no noise is
    /// interference-limited, no interferers is noise-limited.
    pub fn infer(params: &NetworkParams) -> Regime {
        if params.noise == 0.0 {
            Regime::InterferenceLimited
        } else if params.lambda == 0.0 {
            Regime::NoiseLimited
        } else {
            Regime::General
        }
    }
}

/// P[S > s | Φ] for an interferer field given by its distances to the
/// receiver. The noise enters as a single factor exp(−sR₀^ασ_N²).
pub fn conditional_ccdf(params: &NetworkParams, s: f64, distances: &[f64]) -> f64 {
    let r0a = params.r0.powf(params.alpha);
    let noise = (-s * r0a * params.noise).exp();
    let k = s * params.power * r0a;
    distances
        .iter()
        .fold(noise, |acc, &d| acc / (1.0 + k * d.powf(-params.alpha)))
}

/// F_S(s) = 1 − exp(−G_λ s^δ − G_N s).
pub fn cdf_s(params: &NetworkParams, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain("cdf_s", s, "s >= 0"));
    }
    let c = params.derive()?;
    Ok(-(-c.state_exponent(s)).exp_m1())
}
