//! Markov-chain entropy measures.
//!
//! Logarithms are natural throughout, and `0 * ln 0` is taken as 0.

mod production;
mod routes;
mod vne;

pub use production::{analytic_entropy_production, EntropyProduction};
pub use routes::{
    duration_differences, dwell_vector, route_matrices, vne_of_vectors, vne_windows, RouteMatrix, RouteMode,
    VneWindow,
};
pub use vne::{
    density_operator, matrix_log_mercator, matrix_log_symmetric, pearson_matrix, spectral_norm_from_identity, vne,
    vne_mercator, DensityOperator, MercatorLog,
};

use nalgebra::DMatrix;

use crate::data::{window_split, StateTrajectory};
use crate::error::{invalid, Error, Result};

const STOCHASTIC_TOL: f64 = 1e-9;
const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 100_000;

pub(crate) fn xlogx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// Row-stochastic transition matrix plus its stationary distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    pub transition: DMatrix<f64>,
    pub stationary: Vec<f64>,
}

impl TransitionModel {
    pub fn new(transition: DMatrix<f64>, stationary: Vec<f64>) -> Result<Self> {
        check_stochastic(&transition)?;
        check_distribution(&stationary)?;
        let n = transition.nrows();
        if stationary.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: stationary.len(),
            });
        }
        let residual = stationarity_residual(&transition, &stationary);
        if residual > 1e-6 {
            return Err(Error::Invariant(format!(
                "pi T != pi (residual {residual:e})"
            )));
        }
        Ok(TransitionModel {
            transition,
            stationary,
        })
    }

    /// Fits `T` and then `pi` from a trajectory.
    pub fn fit(traj: &StateTrajectory) -> Result<Self> {
        let transition = estimate_transition_matrix(traj.states(), traj.n_states())?;
        let empirical = state_distribution(traj)?;
        let stationary = stationary_distribution(&transition, Some(&empirical))?;
        Ok(TransitionModel {
            transition,
            stationary: stationary.pi,
        })
    }

    pub fn n_states(&self) -> usize {
        self.transition.nrows()
    }

    pub fn entropy_rate(&self) -> f64 {
        entropy_rate(&self.stationary, &self.transition).expect("validated model")
    }
}

pub(crate) fn check_stochastic(t: &DMatrix<f64>) -> Result<()> {
    if t.nrows() != t.ncols() || t.nrows() == 0 {
        return Err(invalid("transition matrix must be square and non-empty"));
    }
    for (i, row) in t.row_iter().enumerate() {
        if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(invalid(format!("row {i} has a negative or non-finite entry")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(invalid(format!("row {i} sums to {sum}, not 1")));
        }
    }
    Ok(())
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(invalid("empty distribution"));
    }
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(invalid("probabilities must be finite and non-negative"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(invalid(format!("probabilities sum to {sum}, not 1")));
    }
    Ok(())
}

/// `max_j |(pi T)_j - pi_j|`.
pub fn stationarity_residual(t: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let n = t.nrows();
    (0..n)
        .map(|j| {
            let next: f64 = (0..n).map(|i| pi[i] * t[(i, j)]).sum();
            (next - pi[j]).abs()
        })
        .fold(0.0, f64::max)
}

/// Empirical state frequencies over the trajectory's whole alphabet.
pub fn state_distribution(traj: &StateTrajectory) -> Result<Vec<f64>> {
    if traj.is_empty() {
        return Err(Error::EmptyInput("trajectory".into()));
    }
    let mut counts = vec![0usize; traj.n_states()];
    for &s in traj.states() {
        counts[s] += 1;
    }
    let total = traj.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Shannon entropy in nats.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(-p.iter().map(|&x| xlogx(x)).sum::<f64>())
}

/// Maximum-likelihood transition matrix. States never seen as a predecessor
/// get the uniform row `1/n`.
pub fn estimate_transition_matrix(states: &[usize], n_states: usize) -> Result<DMatrix<f64>> {
    if states.len() < 2 {
        return Err(invalid("need at least two states to count transitions"));
    }
    if n_states == 0 {
        return Err(invalid("empty alphabet"));
    }
    let mut counts = DMatrix::<f64>::zeros(n_states, n_states);
    for pair in states.windows(2) {
        if pair[0] >= n_states || pair[1] >= n_states {
            return Err(Error::StateOutOfRange {
                state: pair[0].max(pair[1]),
                n_states,
            });
        }
        counts[(pair[0], pair[1])] += 1.0;
    }
    for mut row in counts.row_iter_mut() {
        let total: f64 = row.iter().sum();
        if total == 0.0 {
            row.fill(1.0 / n_states as f64);
        } else {
            row /= total;
        }
    }
    Ok(counts)
}

/// Result of [`stationary_distribution`].
#[derive(Debug, Clone, PartialEq)]
pub struct Stationary {
    pub pi: Vec<f64>,
    /// `true` when `pi` is the empirical fallback rather than a fixed point.
    pub fallback: bool,
    pub iterations: usize,
}

/// Stationary distribution by power iteration from the uniform vector.
///
/// When the chain has more than one closed class (so `pi` is not unique) or the
/// iteration fails to converge (periodic chain), `empirical` is returned
/// instead and `fallback` is set. Without an empirical vector the fallback is
/// an error.
pub fn stationary_distribution(t: &DMatrix<f64>, empirical: Option<&[f64]>) -> Result<Stationary> {
    check_stochastic(t)?;
    let n = t.nrows();
    let fallback = |iterations| -> Result<Stationary> {
        let pi = empirical
            .ok_or_else(|| invalid("stationary distribution not unique and no fallback given"))?;
        if pi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: pi.len(),
            });
        }
        Ok(Stationary {
            pi: pi.to_vec(),
            fallback: true,
            iterations,
        })
    };
    if closed_class_count(t) != 1 {
        return fallback(0);
    }
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for iter in 1..=POWER_MAX_ITER {
        for (j, slot) in next.iter_mut().enumerate() {
            *slot = (0..n).map(|i| pi[i] * t[(i, j)]).sum();
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let delta = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut pi, &mut next);
        if delta < POWER_TOL {
            return Ok(Stationary {
                pi,
                fallback: false,
                iterations: iter,
            });
        }
    }
    fallback(POWER_MAX_ITER)
}

/// Number of closed communicating classes of the transition graph.
fn closed_class_count(t: &DMatrix<f64>) -> usize {
    let n = t.nrows();
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        reach[i][i] = true;
        for j in 0..n {
            if t[(i, j)] > 0.0 {
                reach[i][j] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    // a class is closed iff everything reachable from it reaches back
    let mut seen = vec![false; n];
    let mut closed = 0;
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        class.iter().for_each(|&j| seen[j] = true);
        if (0..n).all(|j| !reach[i][j] || reach[j][i]) {
            closed += 1;
        }
    }
    closed
}

/// Entropy rate `-sum_ij pi_i T_ij ln T_ij` in nats per step.
pub fn entropy_rate(pi: &[f64], t: &DMatrix<f64>) -> Result<f64> {
    if t.nrows() != t.ncols() || pi.len() != t.nrows() {
        return Err(Error::DimensionMismatch {
            expected: t.nrows(),
            got: pi.len(),
        });
    }
    let rate = -t
        .row_iter()
        .zip(pi)
        .map(|(row, &p)| p * row.iter().map(|&x| xlogx(x)).sum::<f64>())
        .sum::<f64>();
    Ok(rate.max(0.0))
}

/// Stationary distribution of the chain fitted to `prefix`, falling back to
/// the prefix's state frequencies.
pub fn prefix_stationary(prefix: &[usize], n_states: usize) -> Result<Vec<f64>> {
    let t = estimate_transition_matrix(prefix, n_states)?;
    let empirical = state_distribution(&StateTrajectory::from_indices(n_states, prefix.to_vec())?)?;
    Ok(stationary_distribution(&t, Some(&empirical))?.pi)
}

/// Windowed entropy rate: `pi` fixed from the prefix `S[0:tw1]`, then one
/// value per non-overlapping window of length `tw2`, each with its own `T`.
pub fn entropy_rate_windows(traj: &StateTrajectory, tw1: usize, tw2: usize) -> Result<Vec<f64>> {
    let len = traj.len();
    for tw in [tw1, tw2] {
        if tw > len {
            return Err(Error::WindowTooLarge { window: tw, len });
        }
        if tw < 2 {
            return Err(invalid("windows must hold at least two states"));
        }
    }
    let n = traj.n_states();
    let pi = prefix_stationary(&traj.states()[..tw1], n)?;
    window_split(len, tw2, tw2)?
        .into_iter()
        .map(|w| {
            let t = estimate_transition_matrix(&traj.states()[w.range()], n)?;
            entropy_rate(&pi, &t)
        })
        .collect()
}
