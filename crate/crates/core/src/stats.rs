//! Goodness-of-fit helpers for the Monte-Carlo checks.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of integer observations against `probs` on
/// `0..probs.len()`, with everything at or above `probs.len()` pooled into a
/// tail cell of mass `1 − Σ probs`. Cells whose expected count falls below
/// `min_expected` are merged into their right neighbour (the last into the
/// left).
pub fn chi_square_counts(observations: &[u64], probs: &[f64], min_expected: f64) -> Result<ChiSquare> {
    if observations.is_empty() || probs.is_empty() {
        return Err(Error::invalid("need observations and probabilities"));
    }
    let n = observations.len() as f64;
    let mut observed = vec![0.0; probs.len() + 1];
    for &o in observations {
        let i = (o as usize).min(probs.len());
        observed[i] += 1.0;
    }
    let head: f64 = probs.iter().sum();
    let mut expected: Vec<f64> = probs.iter().map(|p| p * n).collect();
    expected.push((1.0 - head).max(0.0) * n);

    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut eo, mut ee) = (0.0, 0.0);
    for (o, e) in observed.iter().zip(&expected) {
        eo += o;
        ee += e;
        if ee >= min_expected {
            cells.push((eo, ee));
            eo = 0.0;
            ee = 0.0;
        }
    }
    if ee > 0.0 || eo > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += eo;
                last.1 += ee;
            }
            None => cells.push((eo, ee)),
        }
    }
    if cells.len() < 2 {
        return Err(Error::invalid("too few cells for a chi-square test"));
    }
    let mut stat = 0.0;
    for (o, e) in &cells {
        if *e <= 0.0 {
            if *o > 0.0 {
                return Ok(ChiSquare {
                    statistic: f64::INFINITY,
                    dof: cells.len() - 1,
                    p_value: 0.0,
                });
            }
            continue;
        }
        stat += (o - e).powi(2) / e;
    }
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(ChiSquare {
        statistic: stat,
        dof,
        p_value: dist.sf(stat),
    })
}

/// Mean and standard error.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}
