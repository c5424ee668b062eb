//! Single-layer outage strategy: fixed rate ln(1 + β), decoded iff S·P ≥ β.

use serde::{Deserialize, Serialize};

use crate::broadcast::{PowerProfile, RateOrigin, RateStats};
use crate::error::{Error, Result};
use crate::network::{NetworkParams, Regime};
use crate::numeric::{expand_while, find_root_log};

/// How the SINR threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    Fixed(f64),
    /// Threshold maximising the mean rate (σ_N² = 0 only).
    Optimal,
    /// β = s0·P, giving the broadcast strategy's complete-outage probability.
    MatchedCompleteOutage,
}

impl ThresholdMode {
    pub fn resolve(&self, params: &NetworkParams) -> Result<f64> {
        match *self {
            ThresholdMode::Fixed(beta) => {
                check_beta(beta)?;
                Ok(beta)
            }
            ThresholdMode::Optimal => optimal_beta(params),
            ThresholdMode::MatchedCompleteOutage => matched_beta(params),
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::param("beta", beta, "must be finite and > 0"))
    }
}

/// P[SINR ≥ β] = exp(−G̃_λ β^δ − R₀^α σ̃_N² β).
pub fn success_probability(params: &NetworkParams, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let c = params.derive()?;
    let noise = params.r0.powf(params.alpha) * c.sigma_tilde * beta;
    Ok((-c.g_lambda_tilde * beta.powf(c.delta) - noise).exp())
}

pub fn mean_rate_os(params: &NetworkParams, beta: f64) -> Result<f64> {
    Ok(success_probability(params, beta)? * beta.ln_1p())
}

/// The mean-rate maximising threshold for σ_N² = 0: the positive root of
/// β^{δ−1}(1 + β) ln(1 + β) = 1/(δG̃_λ).
pub fn optimal_beta(params: &NetworkParams) -> Result<f64> {
    params.validate()?;
    if params.noise != 0.0 {
        return Err(Error::RegimeMismatch {
            required: Regime::InterferenceLimited,
            actual: Regime::infer(params),
        });
    }
    if params.lambda == 0.0 {
        return Err(Error::NoBracket {
            what: "optimal beta (lambda = 0)",
        });
    }
    let c = params.derive()?;
    let target = -(c.delta * c.g_lambda_tilde).ln();
    // Compared in logs; the left side is strictly increasing in β.
    let f = |b: f64| (c.delta - 1.0) * b.ln() + b.ln_1p() + b.ln_1p().ln() - target;
    let hi = expand_while(|b| f(b) <= 0.0, 1.0, 2.0, 2000).ok_or(Error::NoBracket { what: "optimal beta" })?;
    let lo =
        expand_while(|b| f(b) >= 0.0, 1e-6_f64.min(hi), 0.5, 2000).ok_or(Error::NoBracket { what: "optimal beta" })?;
    find_root_log(f, lo, hi, 300)
}

/// β = s0·P from the interference-limited broadcast profile.
pub fn matched_beta(params: &NetworkParams) -> Result<f64> {
    let profile = PowerProfile::solve(params, Regime::InterferenceLimited)?;
    Ok(profile.s0() * params.power)
}

/// Mean, second moment and variance of the scaled Bernoulli rate.
pub fn rate_stats_os(params: &NetworkParams, beta: f64) -> Result<RateStats> {
    let p = success_probability(params, beta)?;
    let r = beta.ln_1p();
    Ok(RateStats {
        mean: p * r,
        second_moment: Some(p * r * r),
        variance: Some(p * (1.0 - p) * r * r),
        origin: RateOrigin::Analytic,
    })
}
