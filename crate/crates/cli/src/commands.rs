use bcnet::montecarlo;
use bcnet::outage;

use crate::args::{Format, PointArgs, SimulateArgs, Strategy, SweepArgs, SweepVar};
use crate::format::{Cell, Table};
use crate::metrics::{EvalError, Point};
use crate::{CliError, SCHEMA_VERSION};

pub const POINT_COLUMNS: [&str; 16] = [
    "strategy",
    "regime",
    "lambda",
    "r0",
    "alpha",
    "power",
    "noise",
    "beta",
    "mean",
    "variance",
    "complete_outage",
    "s0",
    "s1",
    "q",
    "lambda_eps",
    "c",
];

pub const SIMULATE_COLUMNS: [&str; 3] = ["trial_index", "S", "R"];

fn regime_name(r: bcnet::Regime) -> &'static str {
    match r {
        bcnet::Regime::General => "general",
        bcnet::Regime::NoiseLimited => "noise-limited",
        bcnet::Regime::InterferenceLimited => "interference-limited",
    }
}

fn threshold(point: &Point, strategy: Strategy, beta_flag: Option<f64>) -> Result<Option<f64>, EvalError> {
    match strategy {
        Strategy::Broadcast => Ok(None),
        Strategy::OutageOpt => point.optimal_beta().map(Some),
        Strategy::OutageMatched => point.matched_beta().map(Some),
        Strategy::OutageFixed(b) => b.or(beta_flag).map(Some).ok_or(EvalError::Missing("beta")),
    }
}

pub fn point(args: &PointArgs) -> Result<String, CliError> {
    let params = args.net.params()?;
    let point = Point {
        params,
        regime: args.net.regime.map(Into::into),
        beta: args.beta,
        xi: args.xi,
        epsilon: args.epsilon,
    };
    let profile = point.profile()?;
    let beta = threshold(&point, args.strategy, args.beta)?;
    let (mean, variance, complete_outage) = match beta {
        None => {
            let s = point.broadcast_stats()?;
            (s.mean, s.variance, profile.complete_outage())
        }
        Some(b) => {
            let s = point.outage_stats(b)?;
            let fail = 1.0 - outage::success_probability(&params.effective(point.regime()), b)?;
            (s.mean, s.variance, fail)
        }
    };
    let q = point.xi.map(|_| point.rate_outage()).transpose()?;
    let cap = point.epsilon.map(|_| point.capacity()).transpose()?;
    let num = |x: f64| Cell::Num(Some(x));
    let row = vec![
        Cell::Text(args.strategy.name().into()),
        Cell::Text(regime_name(point.regime()).into()),
        num(params.lambda),
        num(params.r0),
        num(params.alpha),
        num(params.power),
        num(params.noise),
        Cell::Num(beta),
        num(mean),
        Cell::Num(variance),
        num(complete_outage),
        num(profile.s0()),
        num(profile.s1()),
        Cell::Num(q),
        Cell::Num(cap.map(|c| c.lambda_eps)),
        Cell::Num(cap.map(|c| c.capacity)),
    ];
    let mut table = Table::new(POINT_COLUMNS.iter().map(|s| s.to_string()).collect());
    table.rows.push(row);
    Ok(match args.out.format {
        Format::Csv => table.csv(),
        Format::Json => {
            let body = &table.json_rows()[0];
            format!("{{\"schema_version\":{SCHEMA_VERSION},{}\n", &body[1..])
        }
    })
}

pub fn sweep(args: &SweepArgs) -> Result<String, CliError> {
    let base = Point {
        params: args.net.params()?,
        regime: args.net.regime.map(Into::into),
        beta: args.beta,
        xi: args.xi,
        epsilon: args.epsilon,
    };
    let var = args.variable;
    let mut columns = vec![var.name().to_string()];
    columns.extend(args.metrics.iter().map(|m| m.name()));
    let mut table = Table::new(columns);
    let mut any_ok = false;
    for &x in &args.grid.0 {
        let mut p = base;
        match var {
            SweepVar::Lambda => p.params.lambda = x,
            SweepVar::Alpha => p.params.alpha = x,
            SweepVar::Xi => p.xi = Some(x),
            SweepVar::Beta => p.beta = Some(x),
            SweepVar::Epsilon => p.epsilon = Some(x),
        }
        let valid = p.params.validate();
        let mut row = vec![Cell::Num(Some(x))];
        for &m in &args.metrics {
            let value = match &valid {
                Ok(()) => p.eval(m),
                Err(e) => Err(EvalError::Core(e.clone())),
            };
            match value {
                Ok(v) => {
                    any_ok = true;
                    row.push(Cell::Num(Some(v)));
                }
                Err(e) => {
                    eprintln!("warning: {}={}: {}: {e}", var.name(), crate::format::fmt9(x), m.name());
                    row.push(Cell::Num(None));
                }
            }
        }
        table.rows.push(row);
    }
    if !any_ok {
        return Err(CliError::Solver("no grid point could be evaluated".into()));
    }
    Ok(match args.out.format {
        Format::Csv => table.csv(),
        Format::Json => format!(
            "{{\"schema_version\":{SCHEMA_VERSION},\"variable\":\"{}\",\"rows\":[{}]}}\n",
            var.name(),
            table.json_rows().join(",")
        ),
    })
}

pub fn simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let params = args.net.params()?;
    let point = Point {
        params,
        regime: args.net.regime.map(Into::into),
        beta: args.beta,
        xi: None,
        epsilon: None,
    };
    let sim_params = params.effective(point.regime());
    let config = args.sim.config(&sim_params);
    let mut table = Table::new(SIMULATE_COLUMNS.iter().map(|s| s.to_string()).collect());
    table.digits = 17;
    match threshold(&point, args.strategy, args.beta)? {
        None => {
            let profile = point.profile()?;
            for s in montecarlo::raw_samples(&sim_params, &profile, &config)? {
                table.rows.push(vec![
                    Cell::Int(s.trial),
                    Cell::Num(Some(s.state)),
                    Cell::Num(Some(s.rate)),
                ]);
            }
        }
        Some(beta) => {
            let rate = beta.ln_1p();
            for (k, s) in montecarlo::sample_states(&sim_params, &config)?.into_iter().enumerate() {
                let r = if s * sim_params.power >= beta { rate } else { 0.0 };
                table
                    .rows
                    .push(vec![Cell::Int(k as u64), Cell::Num(Some(s)), Cell::Num(Some(r))]);
            }
        }
    }
    Ok(match args.out.format {
        Format::Csv => table.csv(),
        Format::Json => format!(
            "{{\"schema_version\":{SCHEMA_VERSION},\"samples\":[{}]}}\n",
            table.json_rows().join(",")
        ),
    })
}
