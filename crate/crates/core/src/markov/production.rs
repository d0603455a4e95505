use nalgebra::DMatrix;

use super::check_stochastic;
use crate::error::{Error, Result};

/// Analytic (Schnakenberg) entropy production of a stationary chain.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProduction {
    /// Nats per step, summed over the pairs with flux in both directions.
    pub sigma: f64,
    /// Pairs `(i, j)`, `i < j`, where exactly one direction carries flux.
    /// Their contribution is formally infinite and left out of `sigma`.
    pub excluded_pairs: Vec<(usize, usize)>,
}

/// `sigma = sum_{i<j} (pi_i T_ij - pi_j T_ji) ln(pi_i T_ij / (pi_j T_ji))`.
pub fn analytic_entropy_production(pi: &[f64], t: &DMatrix<f64>) -> Result<EntropyProduction> {
    check_stochastic(t)?;
    let n = t.nrows();
    if pi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: pi.len(),
        });
    }
    let mut sigma = 0.0;
    let mut excluded_pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let forward = pi[i] * t[(i, j)];
            let backward = pi[j] * t[(j, i)];
            match (forward > 0.0, backward > 0.0) {
                (true, true) => sigma += (forward - backward) * (forward / backward).ln(),
                (false, false) => {}
                _ => excluded_pairs.push((i, j)),
            }
        }
    }
    Ok(EntropyProduction {
        sigma: sigma.max(0.0),
        excluded_pairs,
    })
}
