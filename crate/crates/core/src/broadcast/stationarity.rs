//! First-order optimality check of a power profile.
//!
//! Evaluates the mean-rate functional
//! J(I) = ∫ sρ(s)/(1 + sI(s)) · e^{−G_λ s^δ − G_N s} ds
//! along I + t·η for a smooth bump η and returns the central-difference
//! directional derivative. At the optimal profile it vanishes.

use crate::error::{Error, Result};
use crate::network::{DerivedConstants, NetworkParams, Regime};
use crate::numeric::integrate;

use super::PowerProfile;

const ADMISSIBILITY_GRID: usize = 2000;

/// A power allocation over layers `support().0..=support().1`.
pub trait LayerProfile {
    fn support(&self) -> (f64, f64);
    fn residual_power(&self, s: f64) -> f64;
    fn density(&self, s: f64) -> f64;
}

impl LayerProfile for PowerProfile {
    fn support(&self) -> (f64, f64) {
        (self.s0(), self.s1())
    }

    fn residual_power(&self, s: f64) -> f64 {
        PowerProfile::residual_power(self, s)
    }

    fn density(&self, s: f64) -> f64 {
        PowerProfile::density(self, s)
    }
}

/// Constant layer density over `[s0, s1]`; a deliberately suboptimal control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformProfile {
    pub s0: f64,
    pub s1: f64,
    pub power: f64,
}

impl LayerProfile for UniformProfile {
    fn support(&self) -> (f64, f64) {
        (self.s0, self.s1)
    }

    fn residual_power(&self, s: f64) -> f64 {
        if s <= self.s0 {
            self.power
        } else if s >= self.s1 {
            0.0
        } else {
            self.power * (self.s1 - s) / (self.s1 - self.s0)
        }
    }

    fn density(&self, s: f64) -> f64 {
        if s < self.s0 || s > self.s1 {
            0.0
        } else {
            self.power / (self.s1 - self.s0)
        }
    }
}

/// Smooth compactly supported bump in ln s:
/// η(s) = amplitude · exp(1 − 1/(1 − x²)), x = (ln s − center)/half_width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn zero() -> Self {
        Bump {
            center: 0.0,
            half_width: 1.0,
            amplitude: 0.0,
        }
    }

    /// Support `[s_lo, s_hi]` in channel-state units.
    pub fn support(&self) -> (f64, f64) {
        (
            (self.center - self.half_width).exp(),
            (self.center + self.half_width).exp(),
        )
    }

    fn x(&self, s: f64) -> f64 {
        (s.ln() - self.center) / self.half_width
    }

    pub fn value(&self, s: f64) -> f64 {
        let x = self.x(s);
        if x.abs() >= 1.0 {
            return 0.0;
        }
        self.amplitude * (1.0 - 1.0 / (1.0 - x * x)).exp()
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let x = self.x(s);
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let om = 1.0 - x * x;
        let phi = (1.0 - 1.0 / om).exp();
        self.amplitude * phi * (-2.0 * x / (om * om)) / (self.half_width * s)
    }
}

struct Perturbed<'a, P: ?Sized> {
    base: &'a P,
    bump: &'a Bump,
    t: f64,
}

impl<P: LayerProfile + ?Sized> LayerProfile for Perturbed<'_, P> {
    fn support(&self) -> (f64, f64) {
        self.base.support()
    }

    fn residual_power(&self, s: f64) -> f64 {
        self.base.residual_power(s) + self.t * self.bump.value(s)
    }

    fn density(&self, s: f64) -> f64 {
        self.base.density(s) - self.t * self.bump.derivative(s)
    }
}

/// The mean-rate functional J for an arbitrary profile, with the channel-state
/// law given by `consts`.
pub fn rate_functional<P: LayerProfile + ?Sized>(profile: &P, consts: &DerivedConstants) -> Result<f64> {
    rate_functional_split(profile, consts, &[])
}

fn rate_functional_split<P: LayerProfile + ?Sized>(
    profile: &P,
    consts: &DerivedConstants,
    breaks: &[f64],
) -> Result<f64> {
    let (s0, s1) = profile.support();
    let f = |u: f64| {
        let s = u.exp();
        // ds = s du
        s * s * profile.density(s) / (1.0 + s * profile.residual_power(s)) * (-consts.state_exponent(s)).exp()
    };
    let mut knots = vec![s0.ln()];
    knots.extend(breaks.iter().map(|b| b.ln()).filter(|&u| u > s0.ln() && u < s1.ln()));
    knots.push(s1.ln());
    knots.windows(2).map(|w| integrate(f, w[0], w[1], 1e-16, 1e-13)).sum()
}

/// (J(I + step·η) − J(I − step·η)) / (2·step).
pub fn directional_derivative<P: LayerProfile + ?Sized>(
    profile: &P,
    consts: &DerivedConstants,
    bump: &Bump,
    step: f64,
) -> Result<f64> {
    if bump.amplitude == 0.0 || step == 0.0 {
        return Ok(0.0);
    }
    check_admissible(profile, bump, step)?;
    let (lo, hi) = bump.support();
    let breaks = [lo, bump.center.exp(), hi];
    let plus = rate_functional_split(
        &Perturbed {
            base: profile,
            bump,
            t: step,
        },
        consts,
        &breaks,
    )?;
    let minus = rate_functional_split(
        &Perturbed {
            base: profile,
            bump,
            t: -step,
        },
        consts,
        &breaks,
    )?;
    Ok((plus - minus) / (2.0 * step))
}

/// Directional derivative of J at the optimal profile of `regime`.
pub fn stationarity_check(params: &NetworkParams, regime: Regime, bump: &Bump, step: f64) -> Result<f64> {
    let profile = PowerProfile::solve(params, regime)?;
    directional_derivative(&profile, profile.constants(), bump, step)
}

fn check_admissible<P: LayerProfile + ?Sized>(profile: &P, bump: &Bump, step: f64) -> Result<()> {
    let (s0, s1) = profile.support();
    let (lo, hi) = bump.support();
    if !(lo > s0 && hi < s1) {
        return Err(Error::InadmissiblePerturbation {
            at: if lo <= s0 { lo } else { hi },
            reason: "bump must lie strictly inside the layer support",
        });
    }
    for t in [step, -step] {
        let perturbed = Perturbed { base: profile, bump, t };
        for k in 0..=ADMISSIBILITY_GRID {
            let s = lo * (hi / lo).powf(k as f64 / ADMISSIBILITY_GRID as f64);
            if perturbed.density(s) < 0.0 {
                return Err(Error::InadmissiblePerturbation {
                    at: s,
                    reason: "negative layer power density",
                });
            }
            if perturbed.residual_power(s) < 0.0 {
                return Err(Error::InadmissiblePerturbation {
                    at: s,
                    reason: "negative residual power",
                });
            }
        }
    }
    Ok(())
}
