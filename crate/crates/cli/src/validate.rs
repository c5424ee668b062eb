//! Analytic-versus-simulation report.

use bcnet::broadcast::{self, PowerProfile};
use bcnet::montecarlo::{self, Estimate, Moments};
use bcnet::{capacity, outage, Regime};
use serde::Serialize;

use crate::args::ValidateArgs;
use crate::{CliError, SCHEMA_VERSION};

/// Half-widths an analytic value may sit from its estimate.
const COVERAGE: f64 = 3.0;

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub lambda: f64,
    pub analytic: f64,
    pub mc: f64,
    pub half_width: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub seed: u64,
    pub trials: u64,
    pub r0: f64,
    pub alpha: f64,
    pub power: f64,
    pub noise: f64,
    pub r_max: f64,
    pub truncation_ratio: f64,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

struct Tally {
    rate_bs: Moments,
    outage_bs: Moments,
    below_xi: Vec<Moments>,
    success_matched: Moments,
    rate_os_opt: Moments,
}

pub fn run(args: &ValidateArgs) -> Result<Report, CliError> {
    let base = args.net.params()?;
    let lambdas = args.grid.as_ref().map_or(vec![base.lambda], |g| g.0.clone());
    let mut checks = Vec::new();
    let mut r_max = f64::NAN;
    let mut truncation_ratio = f64::NAN;
    for lambda in lambdas {
        let given = base.with_lambda(lambda);
        given.validate()?;
        let regime = args.net.regime.map_or_else(|| Regime::infer(&given), Into::into);
        let params = given.effective(regime);
        let profile = PowerProfile::solve(&params, regime)?;
        let stats = broadcast::rate_stats(&profile)?;
        let config = args.sim.config(&params);
        r_max = config.r_max;
        truncation_ratio = montecarlo::truncation_ratio(&params, config.r_max);

        let il = regime == Regime::InterferenceLimited;
        let xis: &[f64] = if il { &args.xi } else { &[] };
        let matched = profile.s0() * params.power;
        let opt = if il && params.lambda > 0.0 {
            Some(outage::optimal_beta(&params)?)
        } else {
            None
        };

        let mut t = Tally {
            rate_bs: Moments::default(),
            outage_bs: Moments::default(),
            below_xi: vec![Moments::default(); xis.len()],
            success_matched: Moments::default(),
            rate_os_opt: Moments::default(),
        };
        let indicator = |b: bool| if b { 1.0 } else { 0.0 };
        for s in montecarlo::sample_states(&params, &config)? {
            let r = profile.layer_rate(s);
            t.rate_bs.push(r);
            t.outage_bs.push(indicator(s < profile.s0()));
            for (m, &xi) in t.below_xi.iter_mut().zip(xis) {
                m.push(indicator(r < xi));
            }
            t.success_matched.push(indicator(s * params.power >= matched));
            if let Some(b) = opt {
                t.rate_os_opt.push(if s * params.power >= b { b.ln_1p() } else { 0.0 });
            }
        }

        let scale = 1.0 + args.perturb_analytic;
        let mut add = |name: String, analytic: f64, est: Estimate| {
            let analytic = analytic * scale;
            checks.push(Check {
                name,
                lambda,
                analytic,
                mc: est.value,
                half_width: est.half_width_95,
                pass: est.covers(analytic, COVERAGE),
            });
        };
        add("mean_bs".into(), stats.mean, t.rate_bs.mean());
        add(
            "variance_bs".into(),
            stats.variance.expect("variance"),
            t.rate_bs.variance(),
        );
        add(
            "complete_outage_bs".into(),
            profile.complete_outage(),
            t.outage_bs.mean(),
        );
        for (m, &xi) in t.below_xi.iter().zip(xis) {
            add(
                format!("rate_outage_xi={xi}"),
                capacity::rate_outage(&params, xi)?,
                m.mean(),
            );
        }
        add(
            "success_os_matched".into(),
            outage::success_probability(&params, matched)?,
            t.success_matched.mean(),
        );
        if let Some(b) = opt {
            let os = outage::rate_stats_os(&params, b)?;
            add("mean_os_opt".into(), os.mean, t.rate_os_opt.mean());
            add(
                "variance_os_opt".into(),
                os.variance.expect("variance"),
                t.rate_os_opt.variance(),
            );
        }
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        seed: args.sim.seed,
        trials: args.sim.trials,
        r0: base.r0,
        alpha: base.alpha,
        power: base.power,
        noise: base.noise,
        r_max,
        truncation_ratio,
        checks,
        all_pass,
    })
}
