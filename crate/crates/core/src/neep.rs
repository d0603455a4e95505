//! Neural estimator for entropy production.
//!
//! `h(a, b)` embeds both states, concatenates `(prev || next)` and feeds the
//! result through a small tanh network with a linear scalar head. The
//! antisymmetric `dS(a, b) = h(a, b) - h(b, a)` is trained by gradient ascent
//! on `J = sum_t [dS(s_t, s_t+1) - exp(-dS(s_t, s_t+1))]`, whose maximizer
//! is the log ratio of forward to backward path probabilities.
//!
//! Objectives and gradients are evaluated through transition-pair counts:
//! every occurrence of the same pair contributes the same term.

use std::io::{Read, Write};
use std::path::Path;

use crate::data::StateTrajectory;
use crate::error::{invalid, Error, Result};
use crate::nn::{Activation, Dense, Mlp, MlpGrad};
use crate::rng::Rng;

const MAGIC: &[u8; 8] = b"EKNEEP\0\0";
const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct NeepModel {
    n_states: usize,
    embed_dim: usize,
    /// `n_states x embed_dim`, row-major.
    embedding: Vec<f64>,
    net: Mlp,
}

/// Gradient with the same layout as [`NeepModel`] parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NeepGrad {
    pub embedding: Vec<f64>,
    pub net: MlpGrad,
}

impl NeepGrad {
    /// Embedding first, then network layers in declaration order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.embedding.clone();
        v.extend(self.net.flatten());
        v
    }
}

impl NeepModel {
    /// Seeded model: standard-normal embeddings, Glorot-uniform layers.
    pub fn new(n_states: usize, embed_dim: usize, hidden: usize, seed: u64) -> Result<Self> {
        check_dims(n_states, embed_dim, hidden)?;
        let mut rng = Rng::new(seed);
        let embedding = (0..n_states * embed_dim).map(|_| rng.normal()).collect();
        let net = Mlp::new(
            &[2 * embed_dim, hidden, 1],
            Activation::Tanh,
            Activation::Identity,
            &mut rng,
        );
        Ok(NeepModel {
            n_states,
            embed_dim,
            embedding,
            net,
        })
    }

    /// All parameters zero, so `h` vanishes everywhere.
    pub fn zeros(n_states: usize, embed_dim: usize, hidden: usize) -> Result<Self> {
        check_dims(n_states, embed_dim, hidden)?;
        Ok(NeepModel {
            n_states,
            embed_dim,
            embedding: vec![0.0; n_states * embed_dim],
            net: Mlp {
                layers: vec![
                    Dense::zeros(2 * embed_dim, hidden, Activation::Tanh),
                    Dense::zeros(hidden, 1, Activation::Identity),
                ],
            },
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn embed_dim(&self) -> usize {
        self.embed_dim
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut Mlp {
        &mut self.net
    }

    pub fn embedding(&self, state: usize) -> &[f64] {
        &self.embedding[state * self.embed_dim..(state + 1) * self.embed_dim]
    }

    pub fn n_params(&self) -> usize {
        self.embedding.len() + self.net.n_params()
    }

    /// Embedding first, then network layers in declaration order.
    pub fn params(&self) -> Vec<f64> {
        let mut v = self.embedding.clone();
        v.extend(self.net.params());
        v
    }

    pub fn param_mut(&mut self, index: usize) -> &mut f64 {
        if index < self.embedding.len() {
            &mut self.embedding[index]
        } else {
            self.net.param_mut(index - self.embedding.len())
        }
    }

    pub fn is_finite(&self) -> bool {
        self.embedding.iter().all(|x| x.is_finite()) && self.net.is_finite()
    }

    fn check_state(&self, s: usize) -> Result<()> {
        if s >= self.n_states {
            return Err(Error::StateOutOfRange {
                state: s,
                n_states: self.n_states,
            });
        }
        Ok(())
    }

    fn input(&self, a: usize, b: usize) -> Vec<f64> {
        let mut x = Vec::with_capacity(2 * self.embed_dim);
        x.extend_from_slice(self.embedding(a));
        x.extend_from_slice(self.embedding(b));
        x
    }

    fn h_unchecked(&self, a: usize, b: usize) -> f64 {
        self.net.forward(&self.input(a, b))[0]
    }

    fn delta_s_unchecked(&self, a: usize, b: usize) -> f64 {
        self.h_unchecked(a, b) - self.h_unchecked(b, a)
    }

    pub fn h_theta(&self, prev: usize, next: usize) -> Result<f64> {
        self.check_state(prev)?;
        self.check_state(next)?;
        Ok(self.h_unchecked(prev, next))
    }

    pub fn delta_s(&self, prev: usize, next: usize) -> Result<f64> {
        self.check_state(prev)?;
        self.check_state(next)?;
        Ok(self.delta_s_unchecked(prev, next))
    }

    pub fn zero_grad(&self) -> NeepGrad {
        NeepGrad {
            embedding: vec![0.0; self.embedding.len()],
            net: self.net.zero_grad(),
        }
    }

    /// Adds `weight * d h(a, b) / d theta` to `grad`.
    fn accumulate_h(&self, a: usize, b: usize, weight: f64, grad: &mut NeepGrad) {
        let trace = self.net.forward_trace(&self.input(a, b));
        let gx = self.net.backward(&trace, &[weight], &mut grad.net);
        let h = self.embed_dim;
        for k in 0..h {
            grad.embedding[a * h + k] += gx[k];
            grad.embedding[b * h + k] += gx[h + k];
        }
    }

    /// Adds `weight * d dS(a, b) / d theta` to `grad`.
    fn accumulate_delta_s(&self, a: usize, b: usize, weight: f64, grad: &mut NeepGrad) {
        self.accumulate_h(a, b, weight, grad);
        self.accumulate_h(b, a, -weight, grad);
    }

    fn apply(&mut self, grad: &NeepGrad, step: f64) {
        self.embedding
            .iter_mut()
            .zip(&grad.embedding)
            .for_each(|(p, g)| *p += step * g);
        self.net.apply(&grad.net, step);
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        let mut header = vec![
            FORMAT_VERSION,
            self.n_states as u64,
            self.embed_dim as u64,
            self.net.layers.len() as u64,
        ];
        for l in &self.net.layers {
            header.extend([l.inputs as u64, l.outputs as u64, l.activation.code() as u64]);
        }
        for v in header {
            w.write_all(&v.to_le_bytes())?;
        }
        for p in self.params() {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Malformed("not a NEEP model file".into()));
        }
        let read_u64 = |r: &mut R| -> Result<u64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(u64::from_le_bytes(b))
        };
        let version = read_u64(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(Error::Malformed(format!("unsupported model version {version}")));
        }
        let n_states = read_u64(&mut r)? as usize;
        let embed_dim = read_u64(&mut r)? as usize;
        let n_layers = read_u64(&mut r)? as usize;
        if n_states == 0 || embed_dim == 0 || n_layers == 0 || n_layers > 64 {
            return Err(Error::Malformed("implausible model header".into()));
        }
        let mut layers = Vec::with_capacity(n_layers);
        let mut expected_in = 2 * embed_dim;
        for _ in 0..n_layers {
            let inputs = read_u64(&mut r)? as usize;
            let outputs = read_u64(&mut r)? as usize;
            let code = read_u64(&mut r)?;
            let activation = u8::try_from(code)
                .ok()
                .and_then(Activation::from_code)
                .ok_or_else(|| Error::Malformed(format!("unknown activation code {code}")))?;
            if inputs != expected_in || outputs == 0 || outputs > 1 << 20 {
                return Err(Error::Malformed("inconsistent layer dimensions".into()));
            }
            expected_in = outputs;
            layers.push(Dense::zeros(inputs, outputs, activation));
        }
        if expected_in != 1 {
            return Err(Error::Malformed("model head must be scalar".into()));
        }
        if n_states.checked_mul(embed_dim).map_or(true, |n| n > 1 << 28) {
            return Err(Error::Malformed("implausible embedding size".into()));
        }
        let mut model = NeepModel {
            n_states,
            embed_dim,
            embedding: vec![0.0; n_states * embed_dim],
            net: Mlp { layers },
        };
        for i in 0..model.n_params() {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            *model.param_mut(i) = f64::from_le_bytes(b);
        }
        if !model.is_finite() {
            return Err(Error::Malformed("non-finite parameter".into()));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

fn check_dims(n_states: usize, embed_dim: usize, hidden: usize) -> Result<()> {
    if n_states == 0 || embed_dim == 0 || hidden == 0 {
        return Err(invalid("state count, embedding and hidden width must be positive"));
    }
    Ok(())
}

/// `counts[a * n + b]` = number of `a -> b` steps.
fn pair_counts(states: &[usize], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for w in states.windows(2) {
        c[w[0] * n + w[1]] += 1.0;
    }
    c
}

fn checked_states<'a>(model: &NeepModel, traj: &'a StateTrajectory) -> Result<&'a [usize]> {
    let states = traj.states();
    if states.len() < 2 {
        return Err(invalid("trajectory needs at least 2 states"));
    }
    if let Some(&s) = states.iter().find(|&&s| s >= model.n_states) {
        return Err(Error::StateOutOfRange {
            state: s,
            n_states: model.n_states,
        });
    }
    Ok(states)
}

/// `J` summed over the `L - 1` transitions, and the same divided by `L - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub sum: f64,
    pub mean: f64,
}

fn objective_from_counts(model: &NeepModel, counts: &[f64]) -> f64 {
    let n = model.n_states;
    let mut total = 0.0;
    for a in 0..n {
        for b in 0..n {
            let c = counts[a * n + b];
            if c > 0.0 {
                let ds = model.delta_s_unchecked(a, b);
                total += c * (ds - (-ds).exp());
            }
        }
    }
    total
}

/// Gradient of the count-weighted objective. Pairs `(a, b)` and `(b, a)`
/// share one backward pass since `dS(b, a) = -dS(a, b)`.
fn gradient_from_counts(model: &NeepModel, counts: &[f64]) -> NeepGrad {
    let n = model.n_states;
    let mut grad = model.zero_grad();
    for a in 0..n {
        for b in a + 1..n {
            let (fwd, bwd) = (counts[a * n + b], counts[b * n + a]);
            if fwd == 0.0 && bwd == 0.0 {
                continue;
            }
            let ds = model.delta_s_unchecked(a, b);
            let weight = fwd * (1.0 + (-ds).exp()) - bwd * (1.0 + ds.exp());
            model.accumulate_delta_s(a, b, weight, &mut grad);
        }
    }
    grad
}

pub fn neep_objective(model: &NeepModel, traj: &StateTrajectory) -> Result<Objective> {
    let states = checked_states(model, traj)?;
    let sum = objective_from_counts(model, &pair_counts(states, model.n_states));
    Ok(Objective {
        sum,
        mean: sum / (states.len() - 1) as f64,
    })
}

/// Analytic gradient of the summed objective.
pub fn objective_gradient(model: &NeepModel, traj: &StateTrajectory) -> Result<NeepGrad> {
    let states = checked_states(model, traj)?;
    Ok(gradient_from_counts(model, &pair_counts(states, model.n_states)))
}

/// Mean `dS` per transition, in nats per step.
///
/// Evaluated as `sum_{a<b} (c_ab - c_ba) dS(a, b) / (L - 1)`, so reversing the
/// trajectory negates the estimate exactly.
pub fn estimate_ep(model: &NeepModel, traj: &StateTrajectory) -> Result<f64> {
    let states = checked_states(model, traj)?;
    let n = model.n_states;
    let counts = pair_counts(states, n);
    let mut total = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            let net = counts[a * n + b] - counts[b * n + a];
            if net != 0.0 {
                total += net * model.delta_s_unchecked(a, b);
            }
        }
    }
    Ok(total / (states.len() - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub hidden: usize,
    pub embed_dim: usize,
    /// Trailing fraction of the trajectory withheld from training.
    pub holdout: f64,
    /// Cap on the Euclidean norm of each batch-mean gradient; the exponential
    /// term otherwise lets one bad step run away.
    pub max_grad_norm: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            epochs: 20,
            batch_size: 256,
            seed: 0,
            hidden: 64,
            embed_dim: 16,
            holdout: 0.0,
            max_grad_norm: 10.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(invalid("learning rate must be positive"));
        }
        if self.epochs == 0 || self.batch_size == 0 || self.hidden == 0 || self.embed_dim == 0 {
            return Err(invalid("epochs, batch size, hidden and embedding width must be positive"));
        }
        if !(self.max_grad_norm > 0.0) {
            return Err(invalid("gradient norm cap must be positive"));
        }
        if !(0.0..1.0).contains(&self.holdout) {
            return Err(invalid("holdout fraction must lie in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NeepFit {
    pub model: NeepModel,
    /// Mean objective per transition on the training part, after each epoch.
    pub curve: Vec<f64>,
    pub train: StateTrajectory,
    pub holdout: Option<StateTrajectory>,
}

impl NeepFit {
    /// EP on the holdout part when there is one, else on the training part.
    pub fn estimate(&self) -> Result<f64> {
        estimate_ep(&self.model, self.holdout.as_ref().unwrap_or(&self.train))
    }
}

/// Splits off the trailing `fraction`; both parts keep at least 2 states.
fn split_holdout(traj: &StateTrajectory, fraction: f64) -> Result<(StateTrajectory, Option<StateTrajectory>)> {
    if fraction == 0.0 {
        return Ok((traj.clone(), None));
    }
    let len = traj.len();
    let held = (len as f64 * fraction).floor() as usize;
    let train_len = len - held;
    if held < 2 || train_len < 2 {
        return Err(invalid("trajectory too short for the requested holdout"));
    }
    let train = traj.slice(crate::data::Window {
        start: 0,
        length: train_len,
    });
    let test = traj.slice(crate::data::Window {
        start: train_len,
        length: held,
    });
    Ok((train, Some(test)))
}

/// Mini-batch stochastic gradient ascent on the mean objective.
///
/// Each epoch draws `ceil((L - 1) / batch)` batches of transition indices
/// uniformly with replacement. A batch gradient whose mean norm exceeds
/// `max_grad_norm` is rescaled to that norm before the step.
pub fn train_neep(traj: &StateTrajectory, config: &TrainConfig) -> Result<NeepFit> {
    config.validate()?;
    let model = NeepModel::new(traj.n_states(), config.embed_dim, config.hidden, config.seed)?;
    train_from(model, traj, config)
}

/// As [`train_neep`], starting from the given parameters.
pub fn train_from(mut model: NeepModel, traj: &StateTrajectory, config: &TrainConfig) -> Result<NeepFit> {
    config.validate()?;
    let (train, holdout) = split_holdout(traj, config.holdout)?;
    let states = checked_states(&model, &train)?;
    let n = model.n_states;
    let n_transitions = states.len() - 1;
    let full_counts = pair_counts(states, n);
    let steps = n_transitions.div_ceil(config.batch_size);
    // batch sampling uses a stream separate from initialization
    let mut rng = Rng::new(config.seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut counts = vec![0.0; n * n];
    let mut curve = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        for _ in 0..steps {
            counts.iter_mut().for_each(|c| *c = 0.0);
            for _ in 0..config.batch_size {
                let t = rng.below(n_transitions);
                counts[states[t] * n + states[t + 1]] += 1.0;
            }
            let grad = gradient_from_counts(&model, &counts);
            let norm = grad.flatten().iter().map(|g| g * g).sum::<f64>().sqrt() / config.batch_size as f64;
            let scale = if norm > config.max_grad_norm { config.max_grad_norm / norm } else { 1.0 };
            model.apply(&grad, scale * config.learning_rate / config.batch_size as f64);
        }
        let j = objective_from_counts(&model, &full_counts) / n_transitions as f64;
        if !j.is_finite() || !model.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        log::debug!("neep epoch {epoch}: J/step = {j:.6}");
        curve.push(j);
    }
    Ok(NeepFit {
        model,
        curve,
        train,
        holdout,
    })
}

/// Largest relative difference between the analytic gradient of the summed
/// objective and central differences with step `1e-5`.
///
/// Relative error is `|g - g_fd| / max(|g|, |g_fd|, 1e-4)`; the floor keeps
/// parameters with vanishing gradient from dividing round-off by zero.
pub fn gradient_check(model: &NeepModel, traj: &StateTrajectory) -> Result<f64> {
    const STEP: f64 = 1e-5;
    let analytic = objective_gradient(model, traj)?.flatten();
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (i, &g) in analytic.iter().enumerate() {
        let orig = *probe.param_mut(i);
        *probe.param_mut(i) = orig + STEP;
        let up = neep_objective(&probe, traj)?.sum;
        *probe.param_mut(i) = orig - STEP;
        let down = neep_objective(&probe, traj)?.sum;
        *probe.param_mut(i) = orig;
        let fd = (up - down) / (2.0 * STEP);
        let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-4);
        worst = worst.max(rel);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(n: usize, s: &[usize]) -> StateTrajectory {
        StateTrajectory::from_indices(n, s.to_vec()).unwrap()
    }

    #[test]
    fn zero_model_is_silent() {
        let m = NeepModel::zeros(3, 4, 5).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(m.h_theta(a, b).unwrap(), 0.0);
            }
        }
        let t = traj(3, &[0, 1, 2, 0, 2]);
        let j = neep_objective(&m, &t).unwrap();
        assert_eq!(j.sum, -4.0);
        assert_eq!(j.mean, -1.0);
        assert_eq!(estimate_ep(&m, &t).unwrap(), 0.0);
    }

    #[test]
    fn delta_s_is_antisymmetric() {
        let m = NeepModel::new(4, 3, 7, 11).unwrap();
        for a in 0..4 {
            assert_eq!(m.delta_s(a, a).unwrap(), 0.0);
            for b in 0..4 {
                let ab = m.delta_s(a, b).unwrap();
                assert_eq!(ab, -m.delta_s(b, a).unwrap());
                assert_eq!(ab, m.h_theta(a, b).unwrap() - m.h_theta(b, a).unwrap());
            }
        }
        assert_ne!(m.h_theta(0, 1).unwrap(), m.h_theta(1, 0).unwrap());
    }

    #[test]
    fn out_of_range_states_error() {
        let m = NeepModel::new(2, 2, 2, 0).unwrap();
        assert!(matches!(m.h_theta(0, 2), Err(Error::StateOutOfRange { state: 2, .. })));
        assert!(neep_objective(&m, &traj(3, &[0, 2])).is_err());
        assert!(estimate_ep(&m, &traj(2, &[1])).is_err());
    }

    #[test]
    fn objective_matches_hand_sum() {
        let m = NeepModel::new(2, 2, 3, 4).unwrap();
        let s = [0, 1, 1, 0];
        let mut expected = 0.0;
        for w in s.windows(2) {
            let ds = m.h_theta(w[0], w[1]).unwrap() - m.h_theta(w[1], w[0]).unwrap();
            expected += ds - (-ds).exp();
        }
        let j = neep_objective(&m, &traj(2, &s)).unwrap();
        assert!((j.sum - expected).abs() < 1e-12);
    }

    #[test]
    fn gradient_is_correct() {
        let m = NeepModel::new(3, 4, 8, 2).unwrap();
        let t = traj(3, &[0, 1, 2, 0, 1, 0, 2, 2, 1, 0, 0, 1]);
        assert!(gradient_check(&m, &t).unwrap() < 1e-4);
    }

    #[test]
    fn unused_states_get_no_embedding_gradient() {
        let m = NeepModel::new(3, 4, 6, 9).unwrap();
        let g = objective_gradient(&m, &traj(3, &[1, 1, 1, 1])).unwrap();
        assert!(g.flatten().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn head_scaling_is_linear() {
        let m = NeepModel::new(3, 4, 6, 1).unwrap();
        let mut doubled = m.clone();
        let head = doubled.net_mut().layers.last_mut().unwrap();
        head.weights.iter_mut().for_each(|w| *w *= 2.0);
        let (ds, ds2) = (m.delta_s(0, 2).unwrap(), doubled.delta_s(0, 2).unwrap());
        assert!((ds2 - 2.0 * ds).abs() < 1e-12);
        // d dS / dt along w -> (1 + t) w equals dS itself
        let eps = 1e-6;
        let mut bumped = m.clone();
        let head = bumped.net_mut().layers.last_mut().unwrap();
        head.weights.iter_mut().for_each(|w| *w *= 1.0 + eps);
        let fd = (bumped.delta_s(0, 2).unwrap() - ds) / eps;
        assert!((fd - ds).abs() < 1e-6);
    }

    #[test]
    fn reversal_negates_estimate() {
        let m = NeepModel::new(3, 4, 6, 3).unwrap();
        let t = traj(3, &[0, 1, 2, 0, 1, 2, 2, 0, 1]);
        let fwd = estimate_ep(&m, &t).unwrap();
        assert_eq!(estimate_ep(&m, &t.reversed()).unwrap(), -fwd);
        let mut both = t.states().to_vec();
        both.extend(t.reversed().states());
        assert_eq!(estimate_ep(&m, &traj(3, &both)).unwrap(), 0.0);
    }

    #[test]
    fn training_is_deterministic_and_ascends() {
        let s: Vec<usize> = (0..600).map(|k| k % 3).collect();
        let t = traj(3, &s);
        let cfg = TrainConfig {
            epochs: 5,
            batch_size: 32,
            seed: 7,
            hidden: 8,
            embed_dim: 4,
            ..TrainConfig::default()
        };
        let a = train_neep(&t, &cfg).unwrap();
        let b = train_neep(&t, &cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.curve, b.curve);
        for w in a.curve.windows(2) {
            assert!(w[1] >= w[0] - 1e-3);
        }
        assert!(a.curve.last().unwrap() > a.curve.first().unwrap());
    }

    #[test]
    fn holdout_splits_tail() {
        let s: Vec<usize> = (0..100).map(|k| k % 2).collect();
        let cfg = TrainConfig {
            epochs: 1,
            holdout: 0.3,
            ..TrainConfig::default()
        };
        let fit = train_neep(&traj(2, &s), &cfg).unwrap();
        assert_eq!(fit.train.len(), 70);
        assert_eq!(fit.holdout.as_ref().unwrap().len(), 30);
        assert!(fit.estimate().unwrap().is_finite());
    }

    #[test]
    fn divergence_reports_epoch() {
        let s: Vec<usize> = (0..200).map(|k| k % 3).collect();
        let cfg = TrainConfig {
            learning_rate: 1e6,
            epochs: 50,
            ..TrainConfig::default()
        };
        match train_neep(&traj(3, &s), &cfg) {
            Err(Error::Diverged { epoch }) => assert!(epoch >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn serialization_round_trips() {
        let m = NeepModel::new(5, 3, 4, 21).unwrap();
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(buf.len(), 8 + 8 * (4 + 3 * 2) + 8 * m.n_params());
        let back = NeepModel::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, m);
        buf[0] = b'X';
        assert!(matches!(NeepModel::read_from(buf.as_slice()), Err(Error::Malformed(_))));
    }
}
