use thiserror::Error;

use crate::bridge::{Stat, Undefined};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the moment arithmetic and the statistics conversions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("no remainder group: pooled n = {pooled} but the known groups total {known}")]
    NoRemainder { pooled: u64, known: u64 },

    /// A subtraction produced a negative even-order sum well outside rounding noise.
    #[error("inconsistent group statistics: order-{order} sum of the remainder is {value:.6e} (tolerance {tolerance:.3e})")]
    InconsistentGroups {
        order: usize,
        value: f64,
        tolerance: f64,
    },

    #[error("inconsistent statistics: {0}")]
    InconsistentStatistics(String),

    #[error("maximum order {0} is outside 2..=16")]
    OrderOutOfRange(usize),

    #[error("mismatched maximum order: expected {expected}, found {found}")]
    MismatchedOrder { expected: usize, found: usize },

    #[error("{stat} undefined ({reason})")]
    Undefined { stat: Stat, reason: Undefined },

    #[error("moment chain broken: {0}")]
    MomentChain(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("unknown moment convention {0:?}")]
    UnknownConvention(String),
}
