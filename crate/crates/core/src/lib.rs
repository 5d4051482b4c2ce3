//! Mergeable central-moment sums.
//!
//! A group of values is summarized by its size, mean and centered power
//! sums. Summaries combine exactly: two groups pool into one, a known
//! subgroup can be removed from a pooled sample, and a stream can be folded
//! one value at a time. [`decomp::sample_decomp`] applies this to tables of
//! published group statistics (n, mean, variance, skewness, kurtosis).
//!
//! ```
//! use moment_decomp::PowerSums;
//!
//! let a = PowerSums::from_sequence(&[1.0, 3.0]).unwrap();
//! let b = PowerSums::from_sequence(&[5.0]).unwrap();
//! let all = a.merge(&b);
//! assert_eq!((all.n(), all.mean(), all.ss()), (3, 3.0, 8.0));
//! assert_eq!(all.subtract(&b).unwrap(), a);
//! ```

pub mod bridge;
pub mod decomp;
pub mod error;
pub mod general;
pub mod io;
pub mod oracle;
pub mod power_sums;

pub use bridge::{GroupDescriptor, MomentConventions, StatType};
pub use decomp::{sample_decomp, DecompRequest, DecompTable, GroupRef};
pub use error::{Error, Result};
pub use general::{AccumulatorN, PowerSumsN};
pub use power_sums::{Accumulator, PowerSums};
