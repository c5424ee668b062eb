use std::path::PathBuf;

use bcnet::{NetworkParams, Regime};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::metrics::Metric;

#[derive(Parser)]
#[command(
    name = "bcnet",
    version,
    about = "Broadcast versus outage transmission in Poisson ad hoc networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate one parameter point.
    Point(PointArgs),
    /// Evaluate metrics along a one-dimensional grid.
    Sweep(SweepArgs),
    /// Compare analytic values against Monte Carlo and report pass/fail.
    Validate(ValidateArgs),
    /// Dump raw Monte Carlo trials.
    Simulate(SimulateArgs),
}

#[derive(Args, Clone)]
pub struct NetArgs {
    /// Transmitter density λ.
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    /// Link distance R₀.
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    /// Path-loss exponent α (> 2).
    #[arg(long, default_value_t = 4.0)]
    pub alpha: f64,
    /// Transmit power, linear or with a dB suffix.
    #[arg(long, default_value = "1", value_parser = parse_level)]
    pub power: f64,
    /// Noise power σ², linear or with a dB suffix.
    #[arg(long, default_value = "0", value_parser = parse_level)]
    pub noise: f64,
    /// Force a regime instead of inferring it from λ and σ².
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
}

impl NetArgs {
    pub fn params(&self) -> bcnet::Result<NetworkParams> {
        NetworkParams::new(self.lambda, self.r0, self.alpha, self.power, self.noise)
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum RegimeArg {
    General,
    NoiseLimited,
    InterferenceLimited,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::General => Regime::General,
            RegimeArg::NoiseLimited => Regime::NoiseLimited,
            RegimeArg::InterferenceLimited => Regime::InterferenceLimited,
        }
    }
}

#[derive(Args, Clone)]
pub struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Strategy {
    Broadcast,
    OutageOpt,
    /// Threshold from the strategy string, or from --beta when absent.
    OutageFixed(Option<f64>),
    OutageMatched,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Broadcast => "broadcast",
            Strategy::OutageOpt => "outage-opt",
            Strategy::OutageFixed(_) => "outage-fixed",
            Strategy::OutageMatched => "outage-matched",
        }
    }
}

pub fn parse_strategy(s: &str) -> Result<Strategy, String> {
    match s {
        "broadcast" => Ok(Strategy::Broadcast),
        "outage-opt" => Ok(Strategy::OutageOpt),
        "outage-matched" => Ok(Strategy::OutageMatched),
        "outage-fixed" => Ok(Strategy::OutageFixed(None)),
        _ => match s.strip_prefix("outage-fixed:") {
            Some(b) => parse_level(b).map(|b| Strategy::OutageFixed(Some(b))),
            None => Err("expected broadcast, outage-opt, outage-fixed[:BETA] or outage-matched".into()),
        },
    }
}

/// A plain number, or a number followed by `dB` converted to linear scale.
pub fn parse_level(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, db) = match t.strip_suffix("dB").or_else(|| t.strip_suffix("db")) {
        Some(n) => (n.trim_end(), true),
        None => (t, false),
    };
    let v: f64 = num.parse().map_err(|_| format!("not a number: {s:?}"))?;
    let v = if db { 10f64.powf(v / 10.0) } else { v };
    if v.is_nan() {
        return Err(format!("not a number: {s:?}"));
    }
    Ok(v)
}

#[derive(Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long, default_value = "broadcast", value_parser = parse_strategy)]
    pub strategy: Strategy,
    /// SINR threshold for outage-fixed.
    #[arg(long, value_parser = parse_level)]
    pub beta: Option<f64>,
    /// Rate threshold ξ (nats) for the rate outage q.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Outage target ε for λ_ε and c; needs --xi.
    #[arg(long, requires = "xi")]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    Lambda,
    Alpha,
    Xi,
    Beta,
    Epsilon,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Lambda => "lambda",
            SweepVar::Alpha => "alpha",
            SweepVar::Xi => "xi",
            SweepVar::Beta => "beta",
            SweepVar::Epsilon => "epsilon",
        }
    }
}

#[derive(Args)]
pub struct SweepArgs {
    /// Swept variable.
    #[arg(long = "var", value_enum)]
    pub variable: SweepVar,
    /// Comma-separated values, or START:STOP:COUNT[:linear|log].
    #[arg(long, value_parser = parse_grid)]
    pub grid: Grid,
    /// Comma-separated metric columns.
    #[arg(long, value_delimiter = ',', required = true)]
    pub metrics: Vec<Metric>,
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long, value_parser = parse_level)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err("range grid is START:STOP:COUNT[:linear|log]".into());
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("not a number: {p:?}"));
        let (start, stop) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("bad count: {:?}", parts[2]))?;
        if count == 0 {
            return Err("grid count must be >= 1".into());
        }
        let log = match parts.get(3).map(|p| p.trim()) {
            None | Some("linear") => false,
            Some("log") => true,
            Some(other) => return Err(format!("unknown grid scale {other:?}")),
        };
        if log && !(start > 0.0 && stop > 0.0) {
            return Err("log grid needs positive end points".into());
        }
        if count == 1 {
            vec![start]
        } else {
            (0..count)
                .map(|k| {
                    let f = k as f64 / (count - 1) as f64;
                    if k == count - 1 {
                        stop
                    } else if log {
                        (start.ln() + f * (stop.ln() - start.ln())).exp()
                    } else {
                        start + f * (stop - start)
                    }
                })
                .collect()
        }
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("not a number: {p:?}")))
            .collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err("grid values must be finite".into());
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err("grid must be strictly increasing".into());
    }
    Ok(Grid(values))
}

#[derive(Args, Clone)]
pub struct SimArgs {
    #[arg(long, default_value_t = 200_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Truncation radius of the interferer field; defaults to the budgeted radius.
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl SimArgs {
    pub fn config(&self, params: &NetworkParams) -> bcnet::SimConfig {
        let mut c = bcnet::SimConfig::new(params, self.trials, self.seed);
        if let Some(r) = self.rmax {
            c.r_max = r;
        }
        if let Some(w) = self.workers {
            c.workers = w;
        }
        c
    }
}

#[derive(Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Densities to validate at; defaults to --lambda.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    /// Rate thresholds for the rate-outage checks.
    #[arg(long, value_delimiter = ',', default_value = "0.1,1")]
    pub xi: Vec<f64>,
    #[command(flatten)]
    pub sim: SimArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Scale every analytic value by (1 + x); a negative control.
    #[arg(long, hide = true, default_value_t = 0.0)]
    pub perturb_analytic: f64,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long, default_value = "broadcast", value_parser = parse_strategy)]
    pub strategy: Strategy,
    #[arg(long, value_parser = parse_level)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub out: OutArgs,
}
