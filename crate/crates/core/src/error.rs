use thiserror::Error;

use crate::network::Regime;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} outside the domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("could not bracket a root of {what}")]
    NoBracket { what: &'static str },

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("operation requires the {required:?} regime, got {actual:?}")]
    RegimeMismatch { required: Regime, actual: Regime },

    #[error("regime {regime:?} is not solvable for these parameters: {reason}")]
    Unsolvable { regime: Regime, reason: &'static str },

    #[error("Lambert-W argument {argument} is below -1/e; rate outage has no real inversion")]
    BranchPoint { argument: f64 },

    #[error("outage target {epsilon} is infeasible: {reason}")]
    Infeasible { epsilon: f64, reason: &'static str },

    #[error("perturbation is not admissible at s = {at}: {reason}")]
    InadmissiblePerturbation { at: f64, reason: &'static str },
}

impl Error {
    pub(crate) fn domain(function: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            function,
            value,
            expected,
        }
    }

    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter { name, value, reason }
    }
}
