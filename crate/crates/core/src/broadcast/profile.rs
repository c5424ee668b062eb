use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{DerivedConstants, NetworkParams, Regime};
use crate::numeric::{expand_while, find_root_log};

const ROOT_ITERS: usize = 300;

/// Optimal continuum-layer power allocation.
///
/// Layers are indexed by channel state s and only states in `[s0, s1]` carry
/// power. The residual power above s is
///
/// I(s) = 1/(G_N s² + δG_λ s^{δ+1}) − 1/s,
///
/// with I(s0) = P and I(s1) = 0. The struct keeps the regime's effective
/// parameters: λ is zeroed in the noise-limited regime, σ_N² in the
/// interference-limited regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerProfile {
    regime: Regime,
    params: NetworkParams,
    consts: DerivedConstants,
    s0: f64,
    s1: f64,
    /// G_λ s0^δ; in the interference-limited regime this is solved for
    /// directly and s0 is recovered from it.
    t0: f64,
}

impl PowerProfile {
    pub fn solve(params: &NetworkParams, regime: Regime) -> Result<Self> {
        params.validate()?;
        if params.lambda == 0.0 && params.noise == 0.0 {
            return Err(Error::Unsolvable {
                regime,
                reason: "lambda and noise are both zero",
            });
        }
        let params = params.effective(regime);
        let consts = params.derive()?;
        let delta = consts.delta;
        let (s0, s1, t0) = match regime {
            Regime::NoiseLimited => {
                let gn = consts.g_noise;
                if !(gn > 0.0) {
                    return Err(Error::Unsolvable {
                        regime,
                        reason: "noise-limited regime needs noise > 0",
                    });
                }
                let p = params.power;
                // (√(G_N² + 4G_N P) − G_N)/(2G_N P), rationalised.
                let s0 = 2.0 / ((gn * gn + 4.0 * gn * p).sqrt() + gn);
                (s0, 1.0 / gn, 0.0)
            }
            Regime::InterferenceLimited => {
                if !(consts.g_lambda > 0.0) {
                    return Err(Error::Unsolvable {
                        regime,
                        reason: "interference-limited regime needs lambda > 0",
                    });
                }
                let t0 = solve_t0(delta, consts.g_lambda_tilde)?;
                let g = consts.g_lambda;
                let s0 = (t0 / g).powf(1.0 / delta);
                let s1 = (delta * g).powf(-1.0 / delta);
                (s0, s1, t0)
            }
            Regime::General => {
                let (gn, g) = (consts.g_noise, consts.g_lambda);
                // s·g'(s) = G_N s + δG_λ s^δ is increasing from 0; s1 is where it hits 1.
                let sg = move |s: f64| gn * s + delta * g * s.powf(delta);
                let mut hi = 1.0;
                if gn > 0.0 {
                    hi += 1.0 / gn;
                }
                if g > 0.0 {
                    hi += (delta * g).powf(-1.0 / delta);
                }
                let lo = expand_while(|s| sg(s) >= 1.0, hi, 0.5, 4000).ok_or(Error::NoBracket { what: "s1" })?;
                let s1 = find_root_log(|s| sg(s) - 1.0, lo, hi, ROOT_ITERS)?;
                // I(s) = P  ⇔  s·g'(s)·(1 + P s) = 1, increasing in s.
                let p = params.power;
                let k = move |s: f64| sg(s) * (1.0 + p * s) - 1.0;
                let lo = expand_while(|s| k(s) >= 0.0, s1, 0.5, 4000).ok_or(Error::NoBracket { what: "s0" })?;
                let s0 = find_root_log(k, lo, s1, ROOT_ITERS)?;
                (s0, s1, g * s0.powf(delta))
            }
        };
        if !(s0 > 0.0 && s0 < s1 && s1.is_finite()) {
            return Err(Error::Unsolvable {
                regime,
                reason: "layer boundaries are degenerate",
            });
        }
        Ok(PowerProfile {
            regime,
            params,
            consts,
            s0,
            s1,
            t0,
        })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Effective parameters of the regime.
    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn constants(&self) -> &DerivedConstants {
        &self.consts
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn s1(&self) -> f64 {
        self.s1
    }

    /// T₀ = G_λ s0^δ.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// T₁ = G_λ s1^δ, equal to 1/δ in the interference-limited regime.
    pub fn t1(&self) -> f64 {
        match self.regime {
            Regime::InterferenceLimited => 1.0 / self.consts.delta,
            _ => self.consts.g_lambda * self.s1.powf(self.consts.delta),
        }
    }

    // h(s) = s²g'(s) = G_N s² + δG_λ s^{δ+1}
    fn h(&self, s: f64) -> f64 {
        let c = &self.consts;
        s * (c.g_noise * s + c.delta * c.g_lambda * s.powf(c.delta))
    }

    fn dh(&self, s: f64) -> f64 {
        let c = &self.consts;
        2.0 * c.g_noise * s + c.delta * (c.delta + 1.0) * c.g_lambda * s.powf(c.delta)
    }

    /// I(s): power carried by layers above s.
    pub fn residual_power(&self, s: f64) -> f64 {
        if s <= self.s0 {
            self.params.power
        } else if s >= self.s1 {
            0.0
        } else {
            1.0 / self.h(s) - 1.0 / s
        }
    }

    /// ρ(s) = −dI/ds.
    pub fn density(&self, s: f64) -> f64 {
        if s < self.s0 || s > self.s1 {
            return 0.0;
        }
        let h = self.h(s);
        self.dh(s) / (h * h) - 1.0 / (s * s)
    }

    /// R(s): rate decoded at channel state s, in nats.
    pub fn layer_rate(&self, s: f64) -> f64 {
        if s <= self.s0 {
            return 0.0;
        }
        let s = s.min(self.s1);
        let c = &self.consts;
        let log_ratio = (s / self.s0).ln();
        match self.regime {
            Regime::InterferenceLimited => {
                (c.delta + 1.0) * log_ratio - c.g_lambda * (s.powf(c.delta) - self.s0.powf(c.delta))
            }
            Regime::NoiseLimited => 2.0 * log_ratio - c.g_noise * (s - self.s0),
            // R(s) = ln h(s)/h(s0) − (g(s) − g(s0)), the exact antiderivative
            // of the layer rate density.
            Regime::General => {
                let gp = |x: f64| c.g_noise + c.delta * c.g_lambda * x.powf(c.delta - 1.0);
                2.0 * log_ratio + (gp(s) / gp(self.s0)).ln() - (c.state_exponent(s) - c.state_exponent(self.s0))
            }
        }
    }

    /// dR/ds = sρ(s)/(1 + sI(s)) inside the support, zero outside.
    pub fn layer_rate_derivative(&self, s: f64) -> f64 {
        if s < self.s0 || s > self.s1 {
            return 0.0;
        }
        let c = &self.consts;
        self.dh(s) / self.h(s) - (c.g_noise + c.delta * c.g_lambda * s.powf(c.delta - 1.0))
    }

    /// R(s1), the largest achievable rate.
    pub fn rate_ceiling(&self) -> f64 {
        self.layer_rate(self.s1)
    }
}

/// T₀ in the interference-limited regime: the root of
/// G̃_λ^{−1/δ} T^{1+1/δ} + T − 1/δ on (0, 1/δ). It depends on λ only through
/// G̃_λ, which makes everything built on it independent of P.
fn solve_t0(delta: f64, g_lambda_tilde: f64) -> Result<f64> {
    let ln_k = -g_lambda_tilde.ln() / delta;
    let f = |t: f64| (ln_k + (1.0 + 1.0 / delta) * t.ln()).exp() + t - 1.0 / delta;
    let hi = 1.0 / delta;
    let lo = expand_while(|t| f(t) >= 0.0, 0.5 * hi, 0.5, 4000).ok_or(Error::NoBracket { what: "T0" })?;
    find_root_log(f, lo, hi, ROOT_ITERS)
}
