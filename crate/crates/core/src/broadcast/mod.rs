//! Broadcast strategy with a continuum of superposed layers.
//!
//! The closed forms below differ from a literal transcription of the
//! published expressions in three places, each settled against quadrature
//! of the mean-rate integral and of E[R(S)²]:
//!
//! * noise-limited mean: the exponential terms are exp(−L₀), exp(−L₁);
//! * interference-limited mean: the E₁ difference is *multiplied* by
//!   (1 + 1/δ), which reduces to the factor 2 of the noise-limited case at δ = 1;
//! * second moment: the lone exp(T₁) term is exp(−T₁).

mod profile;
pub mod stationarity;

pub use profile::PowerProfile;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{NetworkParams, Regime};
use crate::numeric::integrate;
use crate::specfun::{exp_int, gamma_upper_2};

const QUAD_ABS: f64 = 1e-15;
const QUAD_REL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateOrigin {
    Analytic,
    Quadrature,
    MonteCarlo,
}

/// Moments of the transmission rate, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateStats {
    pub mean: f64,
    pub second_moment: Option<f64>,
    pub variance: Option<f64>,
    pub origin: RateOrigin,
}

impl RateStats {
    pub fn from_moments(mean: f64, second_moment: f64, origin: RateOrigin) -> Self {
        RateStats {
            mean,
            second_moment: Some(second_moment),
            variance: Some(second_moment - mean * mean),
            origin,
        }
    }
}

impl PowerProfile {
    /// Mean rate by adaptive quadrature of
    /// ∫ [(2G_N s + δ(δ+1)G_λ s^δ)/(G_N s + δG_λ s^δ) − (G_N s + δG_λ s^δ)] e^{−G_λ s^δ − G_N s} ds/s
    /// over [s0, s1], in the variable u = ln(s/s0).
    pub fn mean_rate_quadrature(&self) -> Result<f64> {
        let c = *self.constants();
        let s0 = self.s0();
        let f = move |u: f64| {
            let s = s0 * u.exp();
            let x = c.g_noise * s;
            let y = c.g_lambda * s.powf(c.delta);
            let sg = x + c.delta * y;
            ((2.0 * x + c.delta * (c.delta + 1.0) * y) / sg - sg) * (-(x + y)).exp()
        };
        integrate(f, 0.0, (self.s1() / s0).ln(), QUAD_ABS, QUAD_REL)
    }

    /// Closed-form mean rate of the two limiting regimes.
    pub fn mean_rate_closed_form(&self) -> Result<f64> {
        match self.regime() {
            Regime::NoiseLimited => {
                let l0 = self.constants().g_noise * self.s0();
                let l1 = 1.0;
                Ok(2.0 * (exp_int(l0)? - exp_int(l1)?) - ((-l0).exp() - (-l1).exp()))
            }
            Regime::InterferenceLimited => {
                let delta = self.constants().delta;
                let (t0, t1) = (self.t0(), self.t1());
                Ok((1.0 + 1.0 / delta) * (exp_int(t0)? - exp_int(t1)?) - ((-t0).exp() - (-t1).exp()))
            }
            Regime::General => Err(Error::RegimeMismatch {
                required: Regime::InterferenceLimited,
                actual: Regime::General,
            }),
        }
    }

    /// E[R(S)²] in the interference-limited regime: closed-form terms plus
    /// the residual integral 2(δ+1)² ∫ ln(s/s0) e^{−G_λ s^δ} ds/s.
    pub fn second_moment_closed_form(&self) -> Result<f64> {
        if self.regime() != Regime::InterferenceLimited {
            return Err(Error::RegimeMismatch {
                required: Regime::InterferenceLimited,
                actual: self.regime(),
            });
        }
        let delta = self.constants().delta;
        let a = delta + 1.0;
        let (t0, t1) = (self.t0(), self.t1());
        // ln(s1/s0), written through T so that it carries no P dependence.
        let log_ratio = (t1 / t0).ln() / delta;
        let ceiling = a * log_ratio - (t1 - t0);
        let e_diff = (-t0).exp() - (-t1).exp();
        let ei_diff = exp_int(t0)? - exp_int(t1)?;

        // ∫_0^{ln(s1/s0)} u exp(−T₀ e^{δu}) du
        let residual = integrate(
            |u| u * (-t0 * (delta * u).exp()).exp(),
            0.0,
            log_ratio,
            QUAD_ABS,
            QUAD_REL,
        )?;

        Ok(
            ceiling * ceiling + 2.0 * (gamma_upper_2(t0)? - gamma_upper_2(t1)?) - (t1 * t1 - t0 * t0)
                + (t1 - t0) * (2.0 * t0 + 2.0 * a * log_ratio)
                - e_diff * (2.0 * a / delta + 2.0 * t0)
                + 2.0 * (a / delta) * (t0 - 1.0) * ei_diff
                + a * log_ratio * (2.0 * (-t1).exp() - a * log_ratio)
                + 2.0 * a * a * residual,
        )
    }

    /// E[R(S)²] by quadrature of 2∫ R(s)R'(s) e^{−G_λ s^δ − G_N s} ds on
    /// [s0, s1]; valid in every regime.
    pub fn second_moment_quadrature(&self) -> Result<f64> {
        let c = *self.constants();
        let s0 = self.s0();
        let f = |u: f64| {
            let s = s0 * u.exp();
            2.0 * self.layer_rate(s) * self.layer_rate_derivative(s) * s * (-c.state_exponent(s)).exp()
        };
        integrate(f, 0.0, (self.s1() / s0).ln(), QUAD_ABS, QUAD_REL)
    }

    /// F_S(s0): probability that not even the lowest layer decodes.
    pub fn complete_outage(&self) -> f64 {
        -(-self.constants().state_exponent(self.s0())).exp_m1()
    }
}

/// Mean broadcast rate. The general regime integrates numerically; the
/// limiting regimes use their closed forms.
pub fn mean_rate(params: &NetworkParams, regime: Regime) -> Result<RateStats> {
    let profile = PowerProfile::solve(params, regime)?;
    let (mean, origin) = match regime {
        Regime::General => (profile.mean_rate_quadrature()?, RateOrigin::Quadrature),
        _ => (profile.mean_rate_closed_form()?, RateOrigin::Analytic),
    };
    Ok(RateStats {
        mean,
        second_moment: None,
        variance: None,
        origin,
    })
}

/// Second moment of the broadcast rate: closed form when interference-limited,
/// quadrature otherwise.
pub fn second_moment(params: &NetworkParams, regime: Regime) -> Result<RateStats> {
    let stats = rate_stats(&PowerProfile::solve(params, regime)?)?;
    Ok(RateStats {
        variance: None,
        ..stats
    })
}

/// Mean, second moment and variance.
pub fn variance(params: &NetworkParams, regime: Regime) -> Result<RateStats> {
    rate_stats(&PowerProfile::solve(params, regime)?)
}

/// All moments for a solved profile.
pub fn rate_stats(profile: &PowerProfile) -> Result<RateStats> {
    match profile.regime() {
        Regime::InterferenceLimited => Ok(RateStats::from_moments(
            profile.mean_rate_closed_form()?,
            profile.second_moment_closed_form()?,
            RateOrigin::Analytic,
        )),
        Regime::NoiseLimited => Ok(RateStats::from_moments(
            profile.mean_rate_closed_form()?,
            profile.second_moment_quadrature()?,
            RateOrigin::Quadrature,
        )),
        Regime::General => Ok(RateStats::from_moments(
            profile.mean_rate_quadrature()?,
            profile.second_moment_quadrature()?,
            RateOrigin::Quadrature,
        )),
    }
}

pub fn complete_outage(params: &NetworkParams, regime: Regime) -> Result<f64> {
    Ok(PowerProfile::solve(params, regime)?.complete_outage())
}
