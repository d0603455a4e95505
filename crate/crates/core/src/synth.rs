//! Seeded generators for Markov trajectories and signals with known structure.

use nalgebra::DMatrix;

use crate::data::{EventRecord, SignalSeries, StateTrajectory};
use crate::error::{invalid, Result};
use crate::markov::{check_stochastic, stationary_distribution};
use crate::rng::Rng;

/// A Markov chain to sample, with an optional switch to a second matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub transition: DMatrix<f64>,
    pub length: usize,
    /// `(position, T2)`: steps from `position` on are drawn from `T2`.
    pub change_point: Option<(usize, DMatrix<f64>)>,
    pub seed: u64,
}

impl ChainSpec {
    pub fn new(transition: DMatrix<f64>, length: usize, seed: u64) -> Self {
        ChainSpec {
            transition,
            length,
            change_point: None,
            seed,
        }
    }

    pub fn with_change_point(mut self, position: usize, second: DMatrix<f64>) -> Self {
        self.change_point = Some((position, second));
        self
    }

    pub fn n_states(&self) -> usize {
        self.transition.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        check_stochastic(&self.transition)?;
        if self.length == 0 {
            return Err(invalid("chain length must be positive"));
        }
        if let Some((pos, t2)) = &self.change_point {
            check_stochastic(t2)?;
            if t2.nrows() != self.n_states() {
                return Err(invalid("change-point matrix has a different state count"));
            }
            if *pos == 0 || *pos >= self.length {
                return Err(invalid("change point must lie strictly inside the chain"));
            }
        }
        Ok(())
    }
}

/// Samples a trajectory; the first state is drawn from the stationary
/// distribution of `T` (uniform when that is not unique).
pub fn gen_chain(spec: &ChainSpec) -> Result<StateTrajectory> {
    spec.validate()?;
    let n = spec.n_states();
    let uniform = vec![1.0 / n as f64; n];
    let pi = stationary_distribution(&spec.transition, Some(&uniform))?.pi;
    let rows = |t: &DMatrix<f64>| -> Vec<Vec<f64>> {
        t.row_iter().map(|r| r.iter().copied().collect()).collect()
    };
    let first_rows = rows(&spec.transition);
    let second_rows = spec.change_point.as_ref().map(|(_, t2)| rows(t2));
    let switch_at = spec.change_point.as_ref().map_or(usize::MAX, |(p, _)| *p);

    let mut rng = Rng::new(spec.seed);
    let mut states = Vec::with_capacity(spec.length);
    let mut s = rng.categorical(&pi);
    states.push(s);
    for t in 1..spec.length {
        let table = match &second_rows {
            Some(r2) if t >= switch_at => r2,
            _ => &first_rows,
        };
        s = rng.categorical(&table[s]);
        states.push(s);
    }
    StateTrajectory::from_indices(n, states)
}

/// Stamps a trajectory as one event per `step_seconds`, starting at `start`.
pub fn trajectory_to_events(traj: &StateTrajectory, start: u64, step_seconds: u64) -> Vec<EventRecord> {
    traj.states()
        .iter()
        .enumerate()
        .map(|(k, &s)| EventRecord::new(start + k as u64 * step_seconds, s))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalKind {
    Constant { value: f64 },
    /// `intercept + slope * t`
    Ramp { slope: f64, intercept: f64 },
    /// `amplitude * sin(2 pi frequency t + phase)`, frequency in cycles per sample
    Sine { amplitude: f64, frequency: f64, phase: f64 },
    /// `x_t = coef * x_{t-1} + e_t`, `x_0 = e_0`, `e_t ~ N(0, 1)`
    Ar1 { coef: f64 },
    /// i.i.d. `N(0, 1)`
    WhiteNoise,
    /// `x_{t+1} = r x_t (1 - x_t)`
    LogisticMap { r: f64, x0: f64 },
}

/// A signal recipe. Gaussian noise with SD `noise_sd` is added after the
/// closed form, drawn from the same seeded stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub length: usize,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SignalSpec {
    pub fn new(kind: SignalKind, length: usize, seed: u64) -> Self {
        SignalSpec {
            kind,
            length,
            noise_sd: 0.0,
            seed,
        }
    }

    pub fn with_noise(mut self, sd: f64) -> Self {
        self.noise_sd = sd;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

pub fn gen_signal(spec: &SignalSpec) -> Result<SignalSeries> {
    if spec.length == 0 {
        return Err(invalid("signal length must be positive"));
    }
    if !(spec.noise_sd >= 0.0 && spec.noise_sd.is_finite()) {
        return Err(invalid("noise SD must be finite and non-negative"));
    }
    let mut rng = Rng::new(spec.seed);
    let n = spec.length;
    let mut values: Vec<f64> = match spec.kind {
        SignalKind::Constant { value } => vec![value; n],
        SignalKind::Ramp { slope, intercept } => {
            (0..n).map(|t| intercept + slope * t as f64).collect()
        }
        SignalKind::Sine {
            amplitude,
            frequency,
            phase,
        } => (0..n)
            .map(|t| amplitude * (2.0 * std::f64::consts::PI * frequency * t as f64 + phase).sin())
            .collect(),
        SignalKind::Ar1 { coef } => {
            let mut x = rng.normal();
            let mut v = vec![x];
            for _ in 1..n {
                x = coef * x + rng.normal();
                v.push(x);
            }
            v
        }
        SignalKind::WhiteNoise => (0..n).map(|_| rng.normal()).collect(),
        SignalKind::LogisticMap { r, x0 } => {
            let mut x = x0;
            (0..n)
                .map(|_| {
                    let cur = x;
                    x = r * x * (1.0 - x);
                    cur
                })
                .collect()
        }
    };
    if spec.noise_sd > 0.0 {
        for v in &mut values {
            *v += spec.noise_sd * rng.normal();
        }
    }
    SignalSeries::new(values)
}

/// A labeled signal, as produced by [`gen_labeled_corpus`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSignal {
    pub id: String,
    pub signal: SignalSeries,
    pub label: u8,
}

/// `per_class` signals from each spec, interleaved A, B, A, B, ...; class A is
/// label 0. Sample `k` of a class uses seed `spec.seed + k`.
pub fn gen_labeled_corpus(
    class_a: &SignalSpec,
    class_b: &SignalSpec,
    per_class: usize,
) -> Result<Vec<LabeledSignal>> {
    let mut out = Vec::with_capacity(2 * per_class);
    for k in 0..per_class {
        for (label, spec) in [(0u8, class_a), (1u8, class_b)] {
            let signal = gen_signal(&spec.with_seed(spec.seed.wrapping_add(k as u64)))?;
            out.push(LabeledSignal {
                id: format!("s{:05}", 2 * k + label as usize),
                signal,
                label,
            });
        }
    }
    Ok(out)
}

/// A labeled trajectory, as produced by [`gen_chain_corpus`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTrajectory {
    pub id: String,
    pub trajectory: StateTrajectory,
    pub label: u8,
}

/// Trajectory counterpart of [`gen_labeled_corpus`].
pub fn gen_chain_corpus(
    class_a: &ChainSpec,
    class_b: &ChainSpec,
    per_class: usize,
) -> Result<Vec<LabeledTrajectory>> {
    let mut out = Vec::with_capacity(2 * per_class);
    for k in 0..per_class {
        for (label, spec) in [(0u8, class_a), (1u8, class_b)] {
            let mut s = spec.clone();
            s.seed = spec.seed.wrapping_add(k as u64);
            out.push(LabeledTrajectory {
                id: format!("c{:05}", 2 * k + label as usize),
                trajectory: gen_chain(&s)?,
                label,
            });
        }
    }
    Ok(out)
}

/// Parses a matrix written as rows separated by `;` and entries by spaces or
/// commas, e.g. `0.9 0.1; 0.5 0.5`.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| {
            row.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| invalid(format!("bad matrix entry {t:?}")))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(invalid("matrix must be square"));
    }
    Ok(DMatrix::from_row_slice(n, n, &rows.concat()))
}
