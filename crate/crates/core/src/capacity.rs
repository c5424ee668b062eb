//! Rate outage, maximum density under a rate-outage constraint and the
//! resulting transmission capacity of the broadcast strategy
//! (interference-limited).
//!
//! R(s) exceeds ξ beyond the state s* with
//! −(δ/(δ+1))·G_λ s*^δ = W₀(−H_λ),
//! H_λ = (δ/(δ+1))·T₀·exp((δ/(δ+1))(ξ − T₀)),
//! so q(λ) = P[R(S) < ξ] = 1 − exp(((δ+1)/δ)·W₀(−H_λ)) while ξ < R(s1), and
//! q = 1 beyond the rate ceiling.

use std::cell::Cell;
use std::f64::consts::E;

use serde::Serialize;

use crate::broadcast::PowerProfile;
use crate::error::{Error, Result};
use crate::network::{NetworkParams, Regime};
use crate::numeric::{bisect_boundary, expand_while};
use crate::specfun::lambert_w0;

const LAMBDA_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateOutage {
    /// q = P[R(S) < ξ].
    pub probability: f64,
    /// R(s1) at this density.
    pub ceiling: f64,
    /// H_λ; `None` when ξ ≥ R(s1).
    pub h: Option<f64>,
    /// W₀(−H_λ).
    pub w: Option<f64>,
    /// s*, the state at which R(s*) = ξ.
    pub threshold_state: Option<f64>,
}

/// Rate outage with its intermediate quantities.
pub fn rate_outage_detail(params: &NetworkParams, xi: f64) -> Result<RateOutage> {
    if !(xi > 0.0) {
        return Err(Error::param("xi", xi, "must be > 0"));
    }
    if params.noise != 0.0 {
        return Err(Error::RegimeMismatch {
            required: Regime::InterferenceLimited,
            actual: Regime::infer(params),
        });
    }
    let profile = PowerProfile::solve(params, Regime::InterferenceLimited)?;
    let ceiling = profile.rate_ceiling();
    if xi >= ceiling {
        return Ok(RateOutage {
            probability: 1.0,
            ceiling,
            h: None,
            w: None,
            threshold_state: None,
        });
    }
    let c = profile.constants();
    let k = c.delta / (c.delta + 1.0);
    let t0 = profile.t0();
    let h = k * t0 * (k * (xi - t0)).exp();
    if h >= 1.0 / E {
        return Err(Error::BranchPoint { argument: -h });
    }
    let w = lambert_w0(-h)?;
    let t_star = -w / k;
    Ok(RateOutage {
        probability: -(w / k).exp_m1(),
        ceiling,
        h: Some(h),
        w: Some(w),
        threshold_state: Some((t_star / c.g_lambda).powf(1.0 / c.delta)),
    })
}

/// q(λ) = P[R(S) < ξ].
pub fn rate_outage(params: &NetworkParams, xi: f64) -> Result<f64> {
    rate_outage_detail(params, xi).map(|r| r.probability)
}

/// Rate threshold ξ, outage tolerance ε and the non-density parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityQuery {
    pub xi: f64,
    pub epsilon: f64,
    /// λ is ignored; σ_N² must be zero.
    pub params: NetworkParams,
}

impl CapacityQuery {
    pub fn new(xi: f64, epsilon: f64, params: NetworkParams) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::param("xi", xi, "must be finite and > 0"));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::param("epsilon", epsilon, "must lie in (0, 1]"));
        }
        params.validate()?;
        Ok(CapacityQuery { xi, epsilon, params })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityResult {
    /// Largest density with q(λ) ≤ ε.
    pub lambda_eps: f64,
    /// Mean broadcast rate at `lambda_eps`.
    pub mean_rate: f64,
    /// c(ε) = λ_ε · R_bs(λ_ε), in nats per unit time per unit area.
    pub capacity: f64,
    /// H_λ < 1/e held at every density evaluated during the search.
    pub branch_valid: bool,
    /// λ_ε is set by the rate ceiling R(s1) dropping to ξ rather than by
    /// q crossing ε continuously.
    pub ceiling_limited: bool,
}

fn outage_at(query: &CapacityQuery, lambda: f64) -> Result<RateOutage> {
    rate_outage_detail(&query.params.with_lambda(lambda), query.xi)
}

/// λ_ε = sup{λ : q(λ) ≤ ε}, by bisection in log λ.
pub fn max_density(query: &CapacityQuery) -> Result<f64> {
    Ok(search(query)?.0)
}

fn search(query: &CapacityQuery) -> Result<(f64, bool)> {
    let eps = query.epsilon;
    let floor = outage_at(query, LAMBDA_FLOOR)?;
    if floor.probability > eps {
        return Err(Error::Infeasible {
            epsilon: eps,
            reason: "rate outage already exceeds epsilon as lambda -> 0",
        });
    }
    let branch_valid = Cell::new(true);
    let admissible = |lambda: f64| match outage_at(query, lambda) {
        Ok(r) => r.probability <= eps,
        Err(Error::BranchPoint { .. }) => {
            branch_valid.set(false);
            false
        }
        Err(_) => false,
    };
    let hi = expand_while(admissible, LAMBDA_FLOOR * 2.0, 2.0, 400).ok_or(Error::Infeasible {
        epsilon: eps,
        reason: "no density violates the outage target",
    })?;
    let lambda = bisect_boundary(admissible, LAMBDA_FLOOR, hi, 1e-14);
    Ok((lambda, branch_valid.get()))
}

/// c(ε) = λ_ε R_bs(λ_ε).
pub fn transmission_capacity(query: &CapacityQuery) -> Result<CapacityResult> {
    let (lambda_eps, branch_valid) = search(query)?;
    let params = query.params.with_lambda(lambda_eps);
    let profile = PowerProfile::solve(&params, Regime::InterferenceLimited)?;
    let mean_rate = profile.mean_rate_closed_form()?;
    let at = outage_at(query, lambda_eps)?;
    // Just above λ_ε the outage is 1 if the ceiling has dropped below ξ.
    let beyond = outage_at(query, lambda_eps * (1.0 + 1e-9))?;
    let ceiling_limited = beyond.h.is_none() && at.probability < query.epsilon * (1.0 - 1e-6);
    Ok(CapacityResult {
        lambda_eps,
        mean_rate,
        capacity: lambda_eps * mean_rate,
        branch_valid,
        ceiling_limited,
    })
}

/// Density at which R(s1) = ξ, where q jumps to 1.
pub fn ceiling_density(params: &NetworkParams, xi: f64) -> Result<f64> {
    let below = |lambda: f64| {
        PowerProfile::solve(&params.with_lambda(lambda), Regime::InterferenceLimited)
            .map(|p| p.rate_ceiling() > xi)
            .unwrap_or(false)
    };
    if !below(LAMBDA_FLOOR) {
        return Err(Error::Infeasible {
            epsilon: 1.0,
            reason: "rate threshold above the ceiling at every density",
        });
    }
    let hi = expand_while(below, LAMBDA_FLOOR * 2.0, 2.0, 400).ok_or(Error::NoBracket {
        what: "ceiling density",
    })?;
    Ok(bisect_boundary(below, LAMBDA_FLOOR, hi, 1e-14))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::find_root;

    fn il(lambda: f64) -> NetworkParams {
        NetworkParams::interference_limited(lambda, 4.0).unwrap()
    }

    // Invert R(s) = ξ by bisection on [s0, s1], then apply F_S.
    fn outage_by_inversion(params: &NetworkParams, xi: f64) -> f64 {
        let p = PowerProfile::solve(params, Regime::InterferenceLimited).unwrap();
        if xi >= p.rate_ceiling() {
            return 1.0;
        }
        let s = find_root(|s| p.layer_rate(s) - xi, p.s0(), p.s1(), 1e-15, 500).unwrap();
        crate::network::cdf_s(params, s).unwrap()
    }

    #[test]
    fn closed_form_matches_inversion() {
        for &l in &[1e-3, 1e-2, 0.1, 0.5] {
            for &xi in &[0.01, 0.1, 0.5, 1.0, 3.0] {
                let q = rate_outage(&il(l), xi).unwrap();
                assert!((q - outage_by_inversion(&il(l), xi)).abs() < 1e-8, "lambda={l} xi={xi}");
            }
        }
    }

    #[test]
    fn saturates_above_ceiling() {
        let p = il(0.1);
        let ceiling = PowerProfile::solve(&p, Regime::InterferenceLimited)
            .unwrap()
            .rate_ceiling();
        assert_eq!(rate_outage(&p, ceiling * 1.01).unwrap(), 1.0);
        assert!(rate_outage(&p, ceiling * 0.99).unwrap() < 1.0);
    }

    #[test]
    fn small_threshold_tends_to_complete_outage() {
        let p = il(0.1);
        let co = crate::broadcast::complete_outage(&p, Regime::InterferenceLimited).unwrap();
        let q = rate_outage(&p, 1e-9).unwrap();
        assert!((q - co).abs() < 1e-8);
    }

    #[test]
    fn branch_consistency() {
        for &l in &[1e-2, 0.1, 1.0] {
            let p = il(l);
            let prof = PowerProfile::solve(&p, Regime::InterferenceLimited).unwrap();
            let r = rate_outage_detail(&p, 0.05).unwrap();
            let s = r.threshold_state.unwrap();
            assert!(s > prof.s0() && s <= prof.s1());
            let c = prof.constants();
            let lhs = -(c.delta / (c.delta + 1.0)) * c.g_lambda * s.powf(c.delta);
            assert!((lhs - r.w.unwrap()).abs() < 1e-8);
            assert!((prof.layer_rate(s) - 0.05).abs() < 1e-9);
        }
    }

    #[test]
    fn monotone_in_density_and_threshold() {
        let mut prev = 0.0;
        for k in 0..60 {
            let l = 10f64.powf(-4.0 + k as f64 / 10.0);
            let q = rate_outage(&il(l), 0.3).unwrap();
            assert!(q >= prev);
            prev = q;
        }
        let mut prev = 0.0;
        for k in 1..100 {
            let q = rate_outage(&il(0.05), k as f64 * 0.05).unwrap();
            assert!(q >= prev);
            prev = q;
        }
    }

    #[test]
    fn max_density_fixed_point() {
        let q = CapacityQuery::new(0.1, 0.05, il(0.0)).unwrap();
        let l = max_density(&q).unwrap();
        assert!((rate_outage(&il(l), 0.1).unwrap() - 0.05).abs() < 1e-8);
        let looser = CapacityQuery { epsilon: 0.1, ..q };
        assert!(max_density(&looser).unwrap() > l);
    }

    #[test]
    fn capacity_composition() {
        let q = CapacityQuery::new(0.1, 0.05, il(0.0)).unwrap();
        let c = transmission_capacity(&q).unwrap();
        assert!(c.branch_valid && !c.ceiling_limited);
        assert_eq!(c.capacity, c.lambda_eps * c.mean_rate);
        let tiny = CapacityQuery { epsilon: 1e-4, ..q };
        assert!(transmission_capacity(&tiny).unwrap().capacity < c.capacity * 0.01);
    }

    #[test]
    fn infeasible_and_invalid_queries() {
        assert!(CapacityQuery::new(0.0, 0.05, il(0.0)).is_err());
        assert!(CapacityQuery::new(0.1, 0.0, il(0.0)).is_err());
        assert!(CapacityQuery::new(0.1, 1.5, il(0.0)).is_err());
        let q = CapacityQuery::new(0.1, 1e-9, il(0.0)).unwrap();
        assert!(matches!(max_density(&q), Err(Error::Infeasible { .. })));
        assert!(rate_outage(&il(0.1).with_noise(1.0), 0.1).is_err());
    }

    #[test]
    fn ceiling_jump() {
        let p = il(0.0);
        let lj = ceiling_density(&p, 1.0).unwrap();
        assert!(rate_outage(&p.with_lambda(lj * (1.0 - 1e-6)), 1.0).unwrap() < 1.0);
        assert_eq!(rate_outage(&p.with_lambda(lj * (1.0 + 1e-6)), 1.0).unwrap(), 1.0);
    }
}
