use bcnet::broadcast::{self, PowerProfile};
use bcnet::capacity::{self, CapacityQuery};
use bcnet::{outage, Error, NetworkParams, Regime};
use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    #[value(name = "s0")]
    S0,
    #[value(name = "s1")]
    S1,
    #[value(name = "R_bs")]
    RBs,
    #[value(name = "M2_bs")]
    M2Bs,
    #[value(name = "var_bs")]
    VarBs,
    #[value(name = "complete_outage_bs")]
    CompleteOutageBs,
    #[value(name = "beta_opt")]
    BetaOpt,
    #[value(name = "R_os_opt")]
    ROsOpt,
    #[value(name = "var_os_opt")]
    VarOsOpt,
    #[value(name = "beta_matched")]
    BetaMatched,
    #[value(name = "R_os_matched")]
    ROsMatched,
    #[value(name = "var_os_matched")]
    VarOsMatched,
    #[value(name = "R_os_fixed")]
    ROsFixed,
    #[value(name = "var_os_fixed")]
    VarOsFixed,
    #[value(name = "q")]
    Q,
    #[value(name = "lambda_eps")]
    LambdaEps,
    #[value(name = "c")]
    C,
}

impl Metric {
    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }
}

/// One evaluation point: parameters plus the optional knobs metrics need.
#[derive(Clone, Copy, Debug)]
pub struct Point {
    pub params: NetworkParams,
    pub regime: Option<Regime>,
    pub beta: Option<f64>,
    pub xi: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug)]
pub enum EvalError {
    Core(Error),
    Missing(&'static str),
}

impl From<Error> for EvalError {
    fn from(e: Error) -> Self {
        EvalError::Core(e)
    }
}

impl std::fmt::Display for EvalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalError::Core(e) => e.fmt(f),
            EvalError::Missing(flag) => write!(f, "this metric needs --{flag}"),
        }
    }
}

pub type Eval<T> = Result<T, EvalError>;

impl Point {
    pub fn regime(&self) -> Regime {
        self.regime.unwrap_or_else(|| Regime::infer(&self.params))
    }

    fn effective(&self) -> NetworkParams {
        self.params.effective(self.regime())
    }

    pub fn profile(&self) -> Eval<PowerProfile> {
        Ok(PowerProfile::solve(&self.params, self.regime())?)
    }

    pub fn optimal_beta(&self) -> Eval<f64> {
        Ok(outage::optimal_beta(&self.effective())?)
    }

    pub fn matched_beta(&self) -> Eval<f64> {
        Ok(self.profile()?.s0() * self.params.power)
    }

    pub fn fixed_beta(&self) -> Eval<f64> {
        self.beta.ok_or(EvalError::Missing("beta"))
    }

    pub fn outage_stats(&self, beta: f64) -> Eval<bcnet::RateStats> {
        Ok(outage::rate_stats_os(&self.effective(), beta)?)
    }

    pub fn broadcast_stats(&self) -> Eval<bcnet::RateStats> {
        Ok(broadcast::rate_stats(&self.profile()?)?)
    }

    pub fn rate_outage(&self) -> Eval<f64> {
        let xi = self.xi.ok_or(EvalError::Missing("xi"))?;
        Ok(capacity::rate_outage(&self.effective(), xi)?)
    }

    pub fn capacity(&self) -> Eval<bcnet::CapacityResult> {
        let xi = self.xi.ok_or(EvalError::Missing("xi"))?;
        let eps = self.epsilon.ok_or(EvalError::Missing("epsilon"))?;
        let query = CapacityQuery::new(xi, eps, self.effective())?;
        Ok(capacity::transmission_capacity(&query)?)
    }

    pub fn eval(&self, metric: Metric) -> Eval<f64> {
        let var = |s: bcnet::RateStats| s.variance.expect("analytic variance");
        Ok(match metric {
            Metric::S0 => self.profile()?.s0(),
            Metric::S1 => self.profile()?.s1(),
            Metric::RBs => self.broadcast_stats()?.mean,
            Metric::M2Bs => self.broadcast_stats()?.second_moment.expect("analytic second moment"),
            Metric::VarBs => var(self.broadcast_stats()?),
            Metric::CompleteOutageBs => self.profile()?.complete_outage(),
            Metric::BetaOpt => self.optimal_beta()?,
            Metric::ROsOpt => self.outage_stats(self.optimal_beta()?)?.mean,
            Metric::VarOsOpt => var(self.outage_stats(self.optimal_beta()?)?),
            Metric::BetaMatched => self.matched_beta()?,
            Metric::ROsMatched => self.outage_stats(self.matched_beta()?)?.mean,
            Metric::VarOsMatched => var(self.outage_stats(self.matched_beta()?)?),
            Metric::ROsFixed => self.outage_stats(self.fixed_beta()?)?.mean,
            Metric::VarOsFixed => var(self.outage_stats(self.fixed_beta()?)?),
            Metric::Q => self.rate_outage()?,
            Metric::LambdaEps => self.capacity()?.lambda_eps,
            Metric::C => self.capacity()?.capacity,
        })
    }
}
