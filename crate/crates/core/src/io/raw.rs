use std::io::BufRead;

use super::InputError;
use crate::bridge::{from_power_sums, GroupDescriptor, MomentConventions};
use crate::error::Result;
use crate::general::{AccumulatorN, PowerSumsN};

#[derive(Debug, Clone, PartialEq)]
pub struct RawSummary {
    pub descriptor: GroupDescriptor,
    pub sums: PowerSumsN,
}

impl RawSummary {
    fn from_sums(sums: PowerSumsN, conv: &MomentConventions, include_sd: bool) -> Self {
        let order = sums.max_order().min(4);
        let descriptor = from_power_sums(&sums.to_power_sums(), conv, order, include_sd);
        RawSummary { descriptor, sums }
    }
}

/// Single pass over a whitespace-separated stream of numbers. Memory use
/// depends only on `max_order`, not on the stream length.
pub fn compute_raw<R: BufRead>(
    reader: R,
    conv: &MomentConventions,
    max_order: usize,
    include_sd: bool,
) -> std::result::Result<RawSummary, InputError> {
    let mut acc = AccumulatorN::new(max_order).map_err(|e| InputError::Format(e.to_string()))?;
    let mut line = String::new();
    let mut reader = reader;
    let mut line_no = 0;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        for token in line.split_whitespace() {
            let x: f64 = token.parse().map_err(|_| InputError::Line {
                line: line_no,
                message: format!("not a number: {token:?}"),
            })?;
            acc.push(x).map_err(|e| InputError::Line {
                line: line_no,
                message: e.to_string(),
            })?;
        }
    }
    Ok(RawSummary::from_sums(acc.sums(), conv, include_sd))
}

/// Folds `values` in `chunks` independent pieces on separate threads and
/// merges the partial summaries.
pub fn fold_chunks(values: &[f64], chunks: usize, max_order: usize) -> Result<PowerSumsN> {
    let chunks = chunks.max(1);
    let size = values.len().div_ceil(chunks).max(1);
    let parts: Vec<Result<PowerSumsN>> = std::thread::scope(|scope| {
        let handles: Vec<_> = values
            .chunks(size)
            .map(|chunk| scope.spawn(move || PowerSumsN::from_sequence(chunk, max_order)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fold worker panicked"))
            .collect()
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    if parts.is_empty() {
        return PowerSumsN::empty(max_order);
    }
    PowerSumsN::merge(&parts)
}
