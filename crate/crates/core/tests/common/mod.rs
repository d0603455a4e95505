//! Naive reference implementations written straight from the definitions,
//! sharing no code with the library estimators.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use entropy_kit::rng::Rng;
use nalgebra::DMatrix;

pub fn oracle_sd(u: &[f64]) -> f64 {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    (u.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n).sqrt()
}

fn entropy_of_counts<K: Ord>(counts: &BTreeMap<K, usize>) -> f64 {
    let total: usize = counts.values().sum();
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.ln()
        })
        .sum()
}

fn embed(u: &[f64], start: usize, m: usize) -> Vec<f64> {
    u[start..start + m].to_vec()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    let mut d: f64 = 0.0;
    for k in 0..a.len() {
        d = d.max((a[k] - b[k]).abs());
    }
    d
}

/// ApEn; `literal` drops the logarithm from each `Phi`.
pub fn oracle_apen(u: &[f64], m: usize, r: f64, literal: bool) -> f64 {
    let phi = |dim: usize| {
        let n = u.len() - dim + 1;
        let vectors: Vec<Vec<f64>> = (0..n).map(|i| embed(u, i, dim)).collect();
        let mut acc = 0.0;
        for i in 0..n {
            let c = vectors
                .iter()
                .filter(|v| max_abs_diff(&vectors[i], v) <= r)
                .count() as f64
                / n as f64;
            acc += if literal { c } else { c.ln() };
        }
        acc / n as f64
    };
    phi(m) - phi(m + 1)
}

/// SampEn over the first `N - m` templates of each length; `None` if undefined.
pub fn oracle_sampen(u: &[f64], m: usize, r: f64) -> Option<f64> {
    let n = u.len() - m;
    let count_pairs = |dim: usize| {
        let mut c = 0usize;
        for i in 0..n {
            for j in 0..n {
                if i != j && max_abs_diff(&embed(u, i, dim), &embed(u, j, dim)) <= r {
                    c += 1;
                }
            }
        }
        c
    };
    let b = count_pairs(m);
    let a = count_pairs(m + 1);
    (a > 0 && b > 0).then(|| (b as f64 / a as f64).ln())
}

/// FuzzyEn with baseline-removed templates and `exp(-(d/r)^p)` similarity.
pub fn oracle_fuzzyen(u: &[f64], m: usize, r: f64, p: f64) -> f64 {
    let n = u.len() - m;
    let phi = |dim: usize| {
        let templates: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let v = embed(u, i, dim);
                let base = v.iter().sum::<f64>() / dim as f64;
                v.into_iter().map(|x| x - base).collect()
            })
            .collect();
        let mut sum = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                if i != j {
                    let d = max_abs_diff(&templates[i], &templates[j]);
                    row += (-(d / r).powf(p)).exp();
                }
            }
            sum += row / (n - 1) as f64;
        }
        sum / n as f64
    };
    (phi(m) / phi(m + 1)).ln()
}

/// IncrEn with words of (sign, level) pairs, levels relative to the word's
/// largest increment.
pub fn oracle_incren(u: &[f64], m: usize, resolution: usize) -> f64 {
    let v: Vec<f64> = (1..u.len()).map(|i| u[i] - u[i - 1]).collect();
    let mut words: BTreeMap<String, usize> = BTreeMap::new();
    for start in 0..=v.len() - m {
        let w = &v[start..start + m];
        let sd = w.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let mut key = String::new();
        for &x in w {
            let s = x.signum() as i32 * (x != 0.0) as i32;
            let q = if sd == 0.0 {
                0
            } else {
                let level = (x.abs() / sd * resolution as f64).floor() as usize;
                level.min(resolution)
            };
            key.push_str(&format!("{s}:{q},"));
        }
        *words.entry(key).or_insert(0) += 1;
    }
    entropy_of_counts(&words)
}

/// DispEn through the normal CDF written with `erfc`.
pub fn oracle_dispen(u: &[f64], m: usize, c: usize, d: usize) -> f64 {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let sigma = oracle_sd(u);
    if sigma == 0.0 {
        return 0.0;
    }
    let classes: Vec<usize> = u
        .iter()
        .map(|&x| {
            let y = 0.5 * statrs::function::erf::erfc(-(x - mu) / (sigma * 2f64.sqrt()));
            let z = (c as f64 * y + 0.5).round_ties_even_floor();
            z.max(1.0).min(c as f64) as usize
        })
        .collect();
    let mut patterns: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for i in 0..u.len() - (m - 1) * d {
        let p: Vec<usize> = (0..m).map(|k| classes[i + k * d]).collect();
        *patterns.entry(p).or_insert(0) += 1;
    }
    entropy_of_counts(&patterns)
}

trait FloorHalf {
    fn round_ties_even_floor(self) -> f64;
}

impl FloorHalf for f64 {
    /// `floor`, kept as a named step to mirror `round(c*y + 0.5)` in the
    /// definition, which rounds down at exact halves.
    fn round_ties_even_floor(self) -> f64 {
        self.floor()
    }
}

/// PhEn from quadrant-corrected arctangents of the SODP points.
pub fn oracle_phen(u: &[f64], k: usize) -> f64 {
    let mut counts = vec![0usize; k];
    for i in 0..u.len() - 2 {
        let x = u[i + 1] - u[i];
        let y = u[i + 2] - u[i + 1];
        let angle = if x == 0.0 && y == 0.0 {
            0.0
        } else if x > 0.0 && y >= 0.0 {
            (y / x).atan()
        } else if x == 0.0 {
            if y > 0.0 { PI / 2.0 } else { 3.0 * PI / 2.0 }
        } else if x < 0.0 {
            PI + (y / x).atan()
        } else {
            2.0 * PI + (y / x).atan()
        };
        let mut sector = (angle * k as f64 / (2.0 * PI)).floor() as usize;
        if sector >= k {
            sector = k - 1;
        }
        counts[sector] += 1;
    }
    let total = (u.len() - 2) as f64;
    let mut h = 0.0;
    for c in counts {
        if c > 0 {
            let p = c as f64 / total;
            h -= p * p.ln();
        }
    }
    h / (k as f64).ln()
}

/// SlopEn over `m - 1` symbols per pattern.
pub fn oracle_slopen(u: &[f64], m: usize, gamma: f64, delta: f64) -> f64 {
    let sym = |d: f64| -> i32 {
        if d.abs() <= delta {
            0
        } else if d > gamma {
            2
        } else if d > 0.0 {
            1
        } else if d < -gamma {
            -2
        } else {
            -1
        }
    };
    let mut patterns: BTreeMap<Vec<i32>, usize> = BTreeMap::new();
    for i in 0..=u.len() - m {
        let p: Vec<i32> = (0..m - 1).map(|k| sym(u[i + k + 1] - u[i + k])).collect();
        *patterns.entry(p).or_insert(0) += 1;
    }
    entropy_of_counts(&patterns)
}

/// Series families for the oracle sweeps.
pub fn seeded_series(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = Rng::new(seed);
    match seed % 4 {
        0 => (0..n).map(|_| rng.normal()).collect(),
        1 => {
            let mut x = 0.0;
            (0..n)
                .map(|_| {
                    x = 0.8 * x + rng.normal();
                    x
                })
                .collect()
        }
        2 => (0..n)
            .map(|t| (0.2 * t as f64).sin() + 0.3 * rng.normal())
            .collect(),
        _ => (0..n).map(|_| (rng.uniform() * 5.0).floor()).collect(),
    }
}

/// Random row-stochastic matrix with strictly positive entries.
pub fn random_stochastic(rng: &mut Rng, n: usize) -> DMatrix<f64> {
    let mut t = DMatrix::from_fn(n, n, |_, _| rng.uniform() + 1e-3);
    for i in 0..n {
        let s: f64 = t.row(i).sum();
        for j in 0..n {
            t[(i, j)] /= s;
        }
    }
    t
}

/// Random symmetric positive-definite matrix with unit trace and
/// `||rho - I||_2 < limit`, built as `I + E` with a small symmetric `E`.
pub fn random_near_identity(rng: &mut Rng, n: usize, limit: f64) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(n, n, |_, _| rng.normal());
    let sym = (&raw + raw.transpose()) * 0.5;
    let norm = sym.symmetric_eigenvalues().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let scale = limit * (0.1 + 0.85 * rng.uniform()) / norm;
    DMatrix::identity(n, n) + sym * scale
}

/// `sum_i pi_i sum_j -T_ij ln T_ij`.
pub fn oracle_entropy_rate(pi: &[f64], t: &DMatrix<f64>) -> f64 {
    let mut h = 0.0;
    for i in 0..t.nrows() {
        for j in 0..t.ncols() {
            if t[(i, j)] > 0.0 {
                h -= pi[i] * t[(i, j)] * t[(i, j)].ln();
            }
        }
    }
    h
}
