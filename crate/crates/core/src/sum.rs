//! Deterministic summation helpers.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SummationMode {
    Sequential,
    #[default]
    Pairwise,
}

const PAIRWISE_BLOCK: usize = 16;

/// Pairwise (cascade) summation with a fixed split rule, so the result only
/// depends on the input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

impl SummationMode {
    pub fn sum(self, values: &[f64]) -> f64 {
        match self {
            SummationMode::Sequential => values.iter().sum(),
            SummationMode::Pairwise => pairwise_sum(values),
        }
    }
}
