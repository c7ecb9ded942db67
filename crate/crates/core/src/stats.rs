//! Small statistics helpers for the verification harness.

use crate::error::{Error, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson chi-square statistic and upper-tail p-value for observed counts
/// against expected probabilities over the same cells. Cells with zero
/// expected probability must have zero observations.
pub fn chi_square_p_value(observed: &[u64], expected_probs: &[f64]) -> Result<(f64, f64)> {
    if observed.len() != expected_probs.len() {
        return Err(Error::InvalidConfig(format!(
            "observed has {} cells, expected has {}",
            observed.len(),
            expected_probs.len()
        )));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::EmptySamples);
    }
    let mut stat = 0.0;
    let mut dof = 0usize;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        if p <= 0.0 {
            if o > 0 {
                return Err(Error::InvalidConfig(
                    "observation in a zero-probability cell".into(),
                ));
            }
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e) * (o as f64 - e) / e;
        dof += 1;
    }
    if dof < 2 {
        return Err(Error::InvalidConfig(
            "chi-square needs at least two non-empty cells".into(),
        ));
    }
    let dist = ChiSquared::new((dof - 1) as f64)
        .map_err(|e| Error::InvalidConfig(format!("chi-square setup: {e}")))?;
    Ok((stat, 1.0 - dist.cdf(stat)))
}

/// Standard deviation of a binomial proportion estimate.
pub fn proportion_sigma(p: f64, samples: usize) -> f64 {
    (p * (1.0 - p) / samples as f64).sqrt()
}
