//! Logistic regression, a small MLP classifier, binary metrics and the
//! repeated stratified holdout protocol.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::io::format_real;
use crate::nn::{sigmoid, Activation, Mlp};
use crate::rng::Rng;
use crate::select::FeatureMatrix;

fn check_training_set(x: &[Vec<f64>], y: &[u8]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let d = x.first().map_or(0, Vec::len);
    if let Some(row) = x.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: row.len(),
        });
    }
    let pos = y.iter().filter(|&&l| l == 1).count();
    if y.iter().any(|&l| l > 1) {
        return Err(invalid("labels must be 0 or 1"));
    }
    if pos == 0 || pos == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(d)
}

/// `n / (2 n_c)` per sample, or all ones.
fn sample_weights(y: &[u8], balanced: bool) -> Vec<f64> {
    if !balanced {
        return vec![1.0; y.len()];
    }
    let n = y.len() as f64;
    let pos = y.iter().filter(|&&l| l == 1).count() as f64;
    let w = [n / (2.0 * (n - pos)), n / (2.0 * pos)];
    y.iter().map(|&l| w[l as usize]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRegConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub balanced: bool,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            learning_rate: 0.1,
            epochs: 1000,
            l2: 1e-4,
            balanced: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogReg {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogReg {
    pub fn zeros(d: usize) -> Self {
        LogReg {
            weights: vec![0.0; d],
            bias: 0.0,
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let z: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias;
        sigmoid(z)
    }
}

/// Gradient of `(1/n) sum_i w_i BCE_i + (l2/2) |w|^2` (bias unpenalized),
/// returned as `(d weights, d bias)`.
pub fn logreg_gradient(
    model: &LogReg,
    x: &[Vec<f64>],
    y: &[u8],
    sample_weight: &[f64],
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut gw: Vec<f64> = model.weights.iter().map(|w| l2 * w).collect();
    let mut gb = 0.0;
    for ((row, &label), &sw) in x.iter().zip(y).zip(sample_weight) {
        let r = sw * (model.predict_proba(row) - label as f64) / n;
        gb += r;
        gw.iter_mut().zip(row).for_each(|(g, v)| *g += r * v);
    }
    (gw, gb)
}

/// Full-batch gradient descent from zero weights.
pub fn train_logreg(x: &[Vec<f64>], y: &[u8], config: &LogRegConfig) -> Result<LogReg> {
    let d = check_training_set(x, y)?;
    if !(config.learning_rate > 0.0) || !(config.l2 >= 0.0) {
        return Err(invalid("learning rate must be positive and l2 non-negative"));
    }
    let sw = sample_weights(y, config.balanced);
    let mut model = LogReg::zeros(d);
    for epoch in 1..=config.epochs {
        let (gw, gb) = logreg_gradient(&model, x, y, &sw, config.l2);
        model
            .weights
            .iter_mut()
            .zip(&gw)
            .for_each(|(w, g)| *w -= config.learning_rate * g);
        model.bias -= config.learning_rate * gb;
        if !model.bias.is_finite() || model.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Diverged { epoch });
        }
    }
    Ok(model)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: vec![64; 4],
            learning_rate: 0.01,
            epochs: 200,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Tanh hidden layers with a linear logit head; probabilities via sigmoid.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpClassifier {
    pub net: Mlp,
}

impl MlpClassifier {
    pub fn new(inputs: usize, hidden: &[usize], seed: u64) -> Self {
        let mut sizes = vec![inputs];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut rng = Rng::new(seed);
        MlpClassifier {
            net: Mlp::new(&sizes, Activation::Tanh, Activation::Identity, &mut rng),
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.net.forward(x)[0])
    }

    /// Mean binary cross-entropy over the given rows.
    pub fn loss(&self, x: &[Vec<f64>], y: &[u8]) -> f64 {
        let total: f64 = x
            .iter()
            .zip(y)
            .map(|(row, &label)| {
                let z = self.net.forward(row)[0];
                // log(1 + e^z) - y z, stable for both signs
                let softplus = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
                softplus - label as f64 * z
            })
            .sum();
        total / x.len() as f64
    }

    fn gradient(&self, x: &[Vec<f64>], y: &[u8], rows: &[usize]) -> crate::nn::MlpGrad {
        let mut grad = self.net.zero_grad();
        for &i in rows {
            let trace = self.net.forward_trace(&x[i]);
            let dz = sigmoid(trace.output()[0]) - y[i] as f64;
            self.net.backward(&trace, &[dz], &mut grad);
        }
        grad.scale(1.0 / rows.len() as f64);
        grad
    }
}

/// Mini-batch SGD on binary cross-entropy; batches come from a seeded
/// shuffle each epoch.
pub fn train_mlp(x: &[Vec<f64>], y: &[u8], config: &MlpConfig) -> Result<MlpClassifier> {
    let d = check_training_set(x, y)?;
    if !(config.learning_rate > 0.0) || config.batch_size == 0 || config.hidden.contains(&0) {
        return Err(invalid("learning rate, batch size and layer widths must be positive"));
    }
    let mut model = MlpClassifier::new(d, &config.hidden, config.seed);
    let mut rng = Rng::new(config.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..x.len()).collect();
    for epoch in 1..=config.epochs {
        rng.shuffle(&mut order);
        for batch in order.chunks(config.batch_size) {
            let grad = model.gradient(x, y, batch);
            model.net.apply(&grad, -config.learning_rate);
        }
        if !model.net.is_finite() {
            return Err(Error::Diverged { epoch });
        }
    }
    Ok(model)
}

/// Largest relative difference between the backpropagated gradient of the
/// mean loss and central differences (step `1e-5`), with a `1e-6` floor.
pub fn mlp_gradient_check(model: &MlpClassifier, x: &[Vec<f64>], y: &[u8]) -> f64 {
    const STEP: f64 = 1e-5;
    let rows: Vec<usize> = (0..x.len()).collect();
    let analytic = model.gradient(x, y, &rows).flatten();
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (i, &g) in analytic.iter().enumerate() {
        let orig = *probe.net.param_mut(i);
        *probe.net.param_mut(i) = orig + STEP;
        let up = probe.loss(x, y);
        *probe.net.param_mut(i) = orig - STEP;
        let down = probe.loss(x, y);
        *probe.net.param_mut(i) = orig;
        let fd = (up - down) / (2.0 * STEP);
        worst = worst.max((g - fd).abs() / g.abs().max(fd.abs()).max(1e-6));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// `None` when only one class is present.
    pub auc: Option<f64>,
}

/// Scores `>= threshold` count as positive. Recall and F1 are 0 when their
/// denominators vanish.
pub fn metrics(scores: &[f64], labels: &[u8], threshold: f64) -> Result<Metrics> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            got: labels.len(),
        });
    }
    if scores.is_empty() {
        return Err(Error::EmptyInput("no predictions".into()));
    }
    let predicted: Vec<u8> = scores.iter().map(|&s| (s >= threshold) as u8).collect();
    let mut m = metrics_from_labels(&predicted, labels);
    m.auc = auc(scores, labels);
    Ok(m)
}

/// Recall, F1 and accuracy from hard predictions; `auc` is left `None`.
pub fn metrics_from_labels(predicted: &[u8], labels: &[u8]) -> Metrics {
    let (mut tp, mut fp, mut fneg, mut tn) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &y) in predicted.iter().zip(labels) {
        match (p, y) {
            (1, 1) => tp += 1,
            (1, _) => fp += 1,
            (_, 1) => fneg += 1,
            _ => tn += 1,
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let recall = ratio(tp, tp + fneg);
    let precision = ratio(tp, tp + fp);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Metrics {
        recall,
        f1,
        accuracy: ratio(tp + tn, labels.len()),
        auc: None,
    }
}

/// Mann-Whitney statistic with midranks for ties.
pub fn auc(scores: &[f64], labels: &[u8]) -> Option<f64> {
    let n1 = labels.iter().filter(|&&l| l == 1).count();
    let n0 = labels.len() - n1;
    if n1 == 0 || n0 == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += midrank * order[i..=j].iter().filter(|&&k| labels[k] == 1).count() as f64;
        i = j + 1;
    }
    let u = rank_sum - (n1 * (n1 + 1)) as f64 / 2.0;
    Some(u / (n1 as f64 * n0 as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    LogReg(LogRegConfig),
    Mlp(MlpConfig),
    /// Scores every sample with the same probability.
    Constant(f64),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::LogReg(_) => "logreg",
            ModelSpec::Mlp(_) => "mlp",
            ModelSpec::Constant(_) => "constant",
        }
    }

    /// Fits on `(x, y)` and scores `test`; `seed` replaces the MLP's seed.
    pub fn fit_predict(&self, x: &[Vec<f64>], y: &[u8], test: &[Vec<f64>], seed: u64) -> Result<Vec<f64>> {
        Ok(match self {
            ModelSpec::LogReg(cfg) => {
                let m = train_logreg(x, y, cfg)?;
                test.iter().map(|r| m.predict_proba(r)).collect()
            }
            ModelSpec::Mlp(cfg) => {
                let cfg = MlpConfig {
                    seed,
                    ..cfg.clone()
                };
                let m = train_mlp(x, y, &cfg)?;
                test.iter().map(|r| m.predict_proba(r)).collect()
            }
            ModelSpec::Constant(p) => vec![*p; test.len()],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalProtocol {
    pub test_fraction: f64,
    pub repeats: usize,
    pub seed: u64,
    pub standardize: bool,
    pub threshold: f64,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        EvalProtocol {
            test_fraction: 0.3,
            repeats: 30,
            seed: 0,
            standardize: true,
            threshold: 0.5,
        }
    }
}

impl EvalProtocol {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(invalid("test fraction must lie in (0, 1)"));
        }
        if self.repeats == 0 {
            return Err(invalid("repeats must be at least 1"));
        }
        Ok(())
    }
}

const MAX_REDRAWS: usize = 10;

/// Train and test row indices for repeat `repeat`.
///
/// Each class contributes `round(n_c * test_fraction)` shuffled rows to the
/// test split, so every repeat has the same class counts. Draws are retried
/// (up to 10 times) while the train split lacks a class.
pub fn stratified_split(labels: &[u8], protocol: &EvalProtocol, repeat: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut rng = Rng::new(protocol.seed.wrapping_add(repeat as u64));
    for _ in 0..=MAX_REDRAWS {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in 0..2u8 {
            let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            rng.shuffle(&mut idx);
            let n_test = (idx.len() as f64 * protocol.test_fraction).round() as usize;
            test.extend_from_slice(&idx[..n_test]);
            train.extend_from_slice(&idx[n_test..]);
        }
        let classes = |ix: &[usize]| {
            let pos = ix.iter().filter(|&&i| labels[i] == 1).count();
            pos > 0 && pos < ix.len()
        };
        if classes(&train) && !test.is_empty() {
            train.sort_unstable();
            test.sort_unstable();
            return Ok((train, test));
        }
    }
    Err(Error::SingleClass)
}

/// z-scores both splits with the train split's mean and population SD
/// (SD 0 leaves the centered column unscaled).
pub fn standardize(train: &mut [Vec<f64>], test: &mut [Vec<f64>]) {
    let Some(d) = train.first().map(Vec::len) else {
        return;
    };
    let n = train.len() as f64;
    for j in 0..d {
        let mean = train.iter().map(|r| r[j]).sum::<f64>() / n;
        let sd = (train.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n).sqrt();
        let scale = if sd > 0.0 { sd } else { 1.0 };
        for r in train.iter_mut().chain(test.iter_mut()) {
            r[j] = (r[j] - mean) / scale;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub n: usize,
}

fn summarize(values: impl Iterator<Item = f64>) -> Summary {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return Summary {
            mean: f64::NAN,
            std: f64::NAN,
            n: 0,
        };
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    Summary {
        mean,
        std,
        n: v.len(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub model: String,
    pub features: Vec<String>,
    pub protocol: EvalProtocol,
    pub repeats: Vec<Metrics>,
}

impl EvalReport {
    pub fn recall(&self) -> Summary {
        summarize(self.repeats.iter().map(|m| m.recall))
    }

    pub fn f1(&self) -> Summary {
        summarize(self.repeats.iter().map(|m| m.f1))
    }

    pub fn accuracy(&self) -> Summary {
        summarize(self.repeats.iter().map(|m| m.accuracy))
    }

    /// Over the repeats where AUC is defined.
    pub fn auc(&self) -> Summary {
        summarize(self.repeats.iter().filter_map(|m| m.auc))
    }

    fn rows(&self) -> [(&'static str, Summary); 4] {
        [
            ("recall", self.recall()),
            ("f1", self.f1()),
            ("accuracy", self.accuracy()),
            ("auc", self.auc()),
        ]
    }

    /// `metric,mean,std,n_repeats`
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["metric", "mean", "std", "n_repeats"])?;
        for (name, s) in self.rows() {
            out.write_record([name.to_string(), format_real(s.mean), format_real(s.std), s.n.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    /// `repeat,recall,f1,accuracy,auc`
    pub fn write_repeats_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["repeat", "recall", "f1", "accuracy", "auc"])?;
        for (k, m) in self.repeats.iter().enumerate() {
            out.write_record([
                k.to_string(),
                format_real(m.recall),
                format_real(m.f1),
                format_real(m.accuracy),
                m.auc.map_or_else(|| "NaN".into(), format_real),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn summary_text(&self) -> String {
        let mut s = format!(
            "model: {}\nfeatures: {}\nprotocol: {} repeats, test fraction {}, seed {}, standardize {}\n",
            self.model,
            self.features.join(", "),
            self.protocol.repeats,
            self.protocol.test_fraction,
            self.protocol.seed,
            self.protocol.standardize
        );
        for (name, m) in self.rows() {
            s.push_str(&format!("{name:9} {:.4} +- {:.4} (n = {})\n", m.mean, m.std, m.n));
        }
        s
    }
}

/// Runs `protocol.repeats` stratified splits in parallel; repeat `r` draws
/// its split and model seed from `seed + r`.
pub fn repeated_holdout(matrix: &FeatureMatrix, model: &ModelSpec, protocol: &EvalProtocol) -> Result<EvalReport> {
    protocol.validate()?;
    let labels = matrix.labels();
    let rows = matrix.rows();
    let repeats = (0..protocol.repeats)
        .into_par_iter()
        .map(|r| {
            let (train_idx, test_idx) = stratified_split(labels, protocol, r)?;
            let mut xtr: Vec<Vec<f64>> = train_idx.iter().map(|&i| rows[i].clone()).collect();
            let mut xte: Vec<Vec<f64>> = test_idx.iter().map(|&i| rows[i].clone()).collect();
            if protocol.standardize {
                standardize(&mut xtr, &mut xte);
            }
            let ytr: Vec<u8> = train_idx.iter().map(|&i| labels[i]).collect();
            let yte: Vec<u8> = test_idx.iter().map(|&i| labels[i]).collect();
            let seed = protocol.seed.wrapping_add(r as u64);
            let scores = model.fit_predict(&xtr, &ytr, &xte, seed)?;
            metrics(&scores, &yte, protocol.threshold)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport {
        model: model.name().to_string(),
        features: matrix.names().to_vec(),
        protocol: *protocol,
        repeats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_confusion_case() {
        let scores = [0.9, 0.8, 0.2, 0.7, 0.1, 0.3];
        let labels = [1, 1, 1, 0, 0, 0];
        let m = metrics(&scores, &labels, 0.5).unwrap();
        assert!((m.recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.accuracy - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_and_inverted_scores() {
        let labels = [0, 0, 1, 1];
        let m = metrics(&[0.1, 0.2, 0.8, 0.9], &labels, 0.5).unwrap();
        assert_eq!((m.recall, m.f1, m.accuracy, m.auc), (1.0, 1.0, 1.0, Some(1.0)));
        assert_eq!(auc(&[0.9, 0.8, 0.2, 0.1], &labels), Some(0.0));
        assert_eq!(auc(&[0.5; 4], &labels), Some(0.5));
        assert_eq!(auc(&[0.5; 2], &[1, 1]), None);
    }

    #[test]
    fn separable_toy_fits() {
        let x = vec![vec![0.0, 0.0], vec![1.0, 0.2], vec![3.0, 3.0], vec![4.0, 2.5]];
        let y = [0, 0, 1, 1];
        let m = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
        let acc = x
            .iter()
            .zip(y)
            .filter(|(r, l)| (m.predict_proba(r) >= 0.5) as u8 == *l)
            .count();
        assert_eq!(acc, 4);
    }

    #[test]
    fn duplicated_column_matches_rescaled_fit() {
        // w1 = w2 throughout, so s = w1 + w2 follows the same updates as the
        // weight on a single column scaled by sqrt(2)
        let x1 = vec![vec![-1.0], vec![0.5], vec![2.0], vec![0.2], vec![-0.3]];
        let y = [0, 1, 1, 0, 1];
        let x2: Vec<Vec<f64>> = x1.iter().map(|r| vec![r[0], r[0]]).collect();
        let xs: Vec<Vec<f64>> = x1.iter().map(|r| vec![r[0] * 2f64.sqrt()]).collect();
        let cfg = LogRegConfig {
            epochs: 300,
            l2: 0.05,
            ..Default::default()
        };
        let dup = train_logreg(&x2, &y, &cfg).unwrap();
        let single = train_logreg(&xs, &y, &cfg).unwrap();
        for (a, b) in x2.iter().zip(&xs) {
            assert!((dup.predict_proba(a) - single.predict_proba(b)).abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_weights_match_duplication() {
        let x = vec![vec![1.0, 2.0], vec![-0.5, 1.0], vec![3.0, -1.0]];
        let y = [0, 0, 1];
        let zero = LogReg::zeros(2);
        let (g, gb) = logreg_gradient(&zero, &x, &y, &sample_weights(&y, true), 0.0);
        let mut xd = x.clone();
        xd.push(x[2].clone());
        let yd = [0, 0, 1, 1];
        let (h, hb) = logreg_gradient(&zero, &xd, &yd, &[1.0; 4], 0.0);
        let scale = g[0] / h[0];
        assert!(scale > 0.0);
        assert!((g[1] - scale * h[1]).abs() < 1e-15);
        assert!((gb - scale * hb).abs() < 1e-15);
    }

    #[test]
    fn mlp_learns_xor() {
        let x = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let y = [0, 1, 1, 0];
        let cfg = MlpConfig {
            hidden: vec![8],
            learning_rate: 0.3,
            epochs: 5000,
            batch_size: 4,
            seed: 1,
        };
        let m = train_mlp(&x, &y, &cfg).unwrap();
        for (r, &l) in x.iter().zip(&y) {
            assert_eq!((m.predict_proba(r) >= 0.5) as u8, l);
        }
    }

    #[test]
    fn mlp_gradient_is_correct() {
        let x = vec![vec![0.3, -1.0, 2.0], vec![1.0, 0.5, -0.2], vec![-0.7, 0.1, 0.4]];
        let y = [1, 0, 1];
        let m = MlpClassifier::new(3, &[5, 4], 3);
        assert!(mlp_gradient_check(&m, &x, &y) < 1e-4);
    }

    #[test]
    fn constant_model_has_zero_spread() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64]).collect();
        let labels: Vec<u8> = (0..50).map(|i| (i % 3 == 0) as u8).collect();
        let m = FeatureMatrix::new(vec!["x".into()], rows, labels).unwrap();
        let r = repeated_holdout(&m, &ModelSpec::Constant(0.7), &EvalProtocol::default()).unwrap();
        assert_eq!(r.repeats.len(), 30);
        for s in [r.recall(), r.f1(), r.accuracy(), r.auc()] {
            assert_eq!(s.std, 0.0);
        }
        assert_eq!(r.auc().mean, 0.5);
    }

    #[test]
    fn holdout_is_deterministic_and_separates() {
        let mut rng = Rng::new(2);
        let labels: Vec<u8> = (0..120).map(|i| (i % 2) as u8).collect();
        let rows = labels
            .iter()
            .map(|&l| vec![3.0 * l as f64 + rng.normal(), rng.normal()])
            .collect();
        let m = FeatureMatrix::new(vec!["a".into(), "b".into()], rows, labels).unwrap();
        let spec = ModelSpec::LogReg(LogRegConfig::default());
        let p = EvalProtocol::default();
        let a = repeated_holdout(&m, &spec, &p).unwrap();
        assert_eq!(a, repeated_holdout(&m, &spec, &p).unwrap());
        assert!(a.accuracy().mean >= 0.9);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("metric,mean,std,n_repeats\nrecall,"));
    }

    #[test]
    fn single_class_training_fails() {
        assert!(matches!(
            train_logreg(&[vec![1.0], vec![2.0]], &[1, 1], &LogRegConfig::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn split_is_stratified_and_disjoint() {
        let labels: Vec<u8> = (0..40).map(|i| (i < 10) as u8).collect();
        let (tr, te) = stratified_split(&labels, &EvalProtocol::default(), 3).unwrap();
        assert_eq!(tr.len() + te.len(), 40);
        assert_eq!(te.iter().filter(|&&i| labels[i] == 1).count(), 3);
        assert!(tr.iter().all(|i| !te.contains(i)));
    }
}
