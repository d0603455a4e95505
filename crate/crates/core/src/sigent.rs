//! Signal entropies: ApEn, SampEn, FuzzyEn, IncrEn, DispEn, PhEn and SlopEn.
//!
//! All results are in nats except PhEn, which is normalized to `[0, 1]`.

use std::collections::HashMap;
use std::f64::consts::PI;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Error, Result};

/// Tolerance for the template-matching estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// Multiple of the series' population standard deviation.
    Relative(f64),
    Absolute(f64),
}

impl Tolerance {
    fn resolve(self, u: &[f64]) -> Result<f64> {
        let r = match self {
            Tolerance::Relative(k) => k * population_sd(u),
            Tolerance::Absolute(r) => r,
        };
        if !r.is_finite() || r < 0.0 {
            return Err(invalid("tolerance must be finite and non-negative"));
        }
        if r == 0.0 {
            return Err(Error::ZeroTolerance);
        }
        Ok(r)
    }
}

/// ApEn flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApEnMode {
    /// `Phi^m - Phi^{m+1}`, `Phi^m` the mean log of self-inclusive match ratios.
    #[default]
    Standard,
    /// Difference of mean match ratios, without logarithms.
    Literal,
}

/// Parameters shared by the estimators, with the crate defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyParams {
    pub m: usize,
    pub tolerance: Tolerance,
    pub apen_mode: ApEnMode,
    pub classes: usize,
    pub delay: usize,
    pub sectors: usize,
    /// Subsequence length for SlopEn (patterns have `slope_m - 1` symbols).
    pub slope_m: usize,
    pub gamma: f64,
    pub delta: f64,
    pub resolution: usize,
    pub fuzzy_power: f64,
}

impl Default for EntropyParams {
    fn default() -> Self {
        EntropyParams {
            m: 2,
            tolerance: Tolerance::Relative(0.2),
            apen_mode: ApEnMode::Standard,
            classes: 6,
            delay: 1,
            sectors: 16,
            slope_m: 3,
            gamma: 1.0,
            delta: 1e-3,
            resolution: 4,
            fuzzy_power: 2.0,
        }
    }
}

impl EntropyParams {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(invalid("m must be at least 2"));
        }
        if self.classes < 2 {
            return Err(invalid("class count must be at least 2"));
        }
        if self.delay < 1 {
            return Err(invalid("delay must be at least 1"));
        }
        check_sectors(self.sectors)?;
        if self.slope_m < 2 {
            return Err(invalid("slope subsequence length must be at least 2"));
        }
        check_slope_thresholds(self.gamma, self.delta)?;
        if self.resolution < 1 {
            return Err(invalid("resolution must be at least 1"));
        }
        if !(self.fuzzy_power > 0.0) {
            return Err(invalid("fuzzy membership power must be positive"));
        }
        Ok(())
    }
}

fn check_sectors(k: usize) -> Result<()> {
    if k < 4 || k % 4 != 0 {
        return Err(invalid("sector count must be a multiple of 4, at least 4"));
    }
    Ok(())
}

fn check_slope_thresholds(gamma: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < gamma && gamma.is_finite()) {
        return Err(invalid("slope thresholds need 0 < delta < gamma"));
    }
    Ok(())
}

fn check_len(u: &[f64], need: usize) -> Result<()> {
    if u.len() < need {
        return Err(invalid(format!(
            "series of length {} is too short (need {need})",
            u.len()
        )));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(invalid("series values must be finite"));
    }
    Ok(())
}

pub(crate) fn mean(u: &[f64]) -> f64 {
    u.iter().sum::<f64>() / u.len() as f64
}

pub(crate) fn population_sd(u: &[f64]) -> f64 {
    if u.iter().all(|&x| x == u[0]) {
        return 0.0;
    }
    let mu = mean(u);
    (u.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / u.len() as f64).sqrt()
}

/// Entropy of a count table, normalized by `total`.
fn census_entropy<K>(counts: &HashMap<K, usize>, total: usize) -> f64 {
    let total = total as f64;
    // sorted so that the summation order does not depend on hashing
    let mut c: Vec<usize> = counts.values().copied().collect();
    c.sort_unstable();
    let h = -c
        .iter()
        .map(|&n| {
            let p = n as f64 / total;
            p * p.ln()
        })
        .sum::<f64>();
    h.max(0.0)
}

fn chebyshev(u: &[f64], i: usize, j: usize, m: usize) -> f64 {
    (0..m)
        .map(|k| (u[i + k] - u[j + k]).abs())
        .fold(0.0, f64::max)
}

/// For each of the `count` templates of length `m`, the number of templates
/// (itself included) within Chebyshev distance `r`.
fn self_inclusive_matches(u: &[f64], m: usize, r: f64) -> Vec<usize> {
    let count = u.len() - m + 1;
    let mut matches = vec![1usize; count];
    for i in 0..count {
        for j in i + 1..count {
            if chebyshev(u, i, j, m) <= r {
                matches[i] += 1;
                matches[j] += 1;
            }
        }
    }
    matches
}

/// Approximate entropy.
pub fn apen(u: &[f64], m: usize, tolerance: Tolerance, mode: ApEnMode) -> Result<f64> {
    if m < 1 {
        return Err(invalid("m must be positive"));
    }
    check_len(u, m + 2)?;
    let r = tolerance.resolve(u)?;
    let phi = |dim: usize| {
        let matches = self_inclusive_matches(u, dim, r);
        let count = matches.len() as f64;
        let terms = matches.iter().map(|&c| c as f64 / count);
        match mode {
            ApEnMode::Standard => terms.map(f64::ln).sum::<f64>() / count,
            ApEnMode::Literal => terms.sum::<f64>() / count,
        }
    };
    Ok(phi(m) - phi(m + 1))
}

/// Sample entropy result; `NoMatches` when no template pair of length `m+1`
/// (or `m`) matches and the ratio is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampEn {
    Value(f64),
    NoMatches,
}

impl SampEn {
    pub fn value(self) -> Option<f64> {
        match self {
            SampEn::Value(v) => Some(v),
            SampEn::NoMatches => None,
        }
    }
}

/// Sample entropy `-ln(A/B)` over the first `N - m` templates, self-matches excluded.
pub fn sampen(u: &[f64], m: usize, tolerance: Tolerance) -> Result<SampEn> {
    if m < 1 {
        return Err(invalid("m must be positive"));
    }
    check_len(u, m + 2)?;
    let r = tolerance.resolve(u)?;
    let count = u.len() - m;
    let (mut b, mut a) = (0u64, 0u64);
    for i in 0..count {
        for j in i + 1..count {
            if chebyshev(u, i, j, m) <= r {
                b += 1;
                if (u[i + m] - u[j + m]).abs() <= r {
                    a += 1;
                }
            }
        }
    }
    if a == 0 || b == 0 {
        return Ok(SampEn::NoMatches);
    }
    Ok(SampEn::Value(-(a as f64 / b as f64).ln()))
}

/// Fuzzy entropy with membership `exp(-(d/r)^n)` over mean-removed templates.
pub fn fuzzyen(u: &[f64], m: usize, tolerance: Tolerance, power: f64) -> Result<f64> {
    if m < 1 {
        return Err(invalid("m must be positive"));
    }
    if !(power > 0.0) {
        return Err(invalid("membership power must be positive"));
    }
    check_len(u, m + 2)?;
    let r = tolerance.resolve(u)?;
    let count = u.len() - m;
    let phi = |dim: usize| {
        let templates: Vec<Vec<f64>> = (0..count)
            .map(|i| {
                let w = &u[i..i + dim];
                let mu = mean(w);
                w.iter().map(|x| x - mu).collect()
            })
            .collect();
        let mut total = 0.0;
        for i in 0..count {
            for j in i + 1..count {
                let d = templates[i]
                    .iter()
                    .zip(&templates[j])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                total += 2.0 * (-(d / r).powf(power)).exp();
            }
        }
        total / (count * (count - 1)) as f64
    };
    Ok(phi(m).ln() - phi(m + 1).ln())
}

/// Increment entropy over words of `m` (sign, magnitude-level) letters.
///
/// The magnitude level of each increment is `min(R, floor(|v| R / max|v|))`
/// with the maximum taken within its own vector, or 0 when that maximum is 0.
pub fn incren(u: &[f64], m: usize, resolution: usize) -> Result<f64> {
    if m < 1 || resolution < 1 {
        return Err(invalid("m and resolution must be positive"));
    }
    check_len(u, m + 2)?;
    let v: Vec<f64> = u.windows(2).map(|w| w[1] - w[0]).collect();
    let rf = resolution as f64;
    let mut words: HashMap<Vec<(i8, usize)>, usize> = HashMap::new();
    let n_words = v.len() - m + 1;
    for vec in v.windows(m) {
        let peak = vec.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let word = vec
            .iter()
            .map(|&x| {
                let sign = if x > 0.0 {
                    1
                } else if x < 0.0 {
                    -1
                } else {
                    0
                };
                let q = if peak == 0.0 {
                    0
                } else {
                    ((x.abs() * rf / peak).floor() as usize).min(resolution)
                };
                (sign, q)
            })
            .collect();
        *words.entry(word).or_default() += 1;
    }
    Ok(census_entropy(&words, n_words))
}

/// Dispersion entropy with `c` classes, embedding `m` and delay `d`.
///
/// A constant series maps to a single class and has entropy 0.
pub fn dispen(u: &[f64], m: usize, classes: usize, delay: usize) -> Result<f64> {
    if m < 1 || classes < 2 || delay < 1 {
        return Err(invalid("need m >= 1, c >= 2, d >= 1"));
    }
    check_len(u, (m - 1) * delay + 2)?;
    let sigma = population_sd(u);
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let ncdf = Normal::new(mean(u), sigma).map_err(|e| invalid(e.to_string()))?;
    let c = classes as f64;
    let z: Vec<usize> = u
        .iter()
        .map(|&x| ((c * ncdf.cdf(x) + 0.5).floor() as usize).clamp(1, classes))
        .collect();
    let n_patterns = u.len() - (m - 1) * delay;
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for i in 0..n_patterns {
        let pattern = (0..m).map(|k| z[i + k * delay]).collect();
        *counts.entry(pattern).or_default() += 1;
    }
    Ok(census_entropy(&counts, n_patterns))
}

/// Phase entropy of the second-order difference plot, normalized by `ln k`.
///
/// Angles come from `atan2` over the full circle, split into `k` equal sectors
/// starting at angle 0; points at the origin fall in sector 0.
pub fn phen(u: &[f64], sectors: usize) -> Result<f64> {
    check_sectors(sectors)?;
    check_len(u, 3)?;
    let width = 2.0 * PI / sectors as f64;
    let mut counts = vec![0usize; sectors];
    for w in u.windows(3) {
        let x = w[1] - w[0];
        let y = w[2] - w[1];
        let sector = if x == 0.0 && y == 0.0 {
            0
        } else {
            let mut theta = y.atan2(x);
            if theta < 0.0 {
                theta += 2.0 * PI;
            }
            ((theta / width) as usize).min(sectors - 1)
        };
        counts[sector] += 1;
    }
    let total = (u.len() - 2) as f64;
    let h = -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            p * p.ln()
        })
        .sum::<f64>();
    Ok((h / (sectors as f64).ln()).clamp(0.0, 1.0))
}

/// Slope entropy over patterns of `m - 1` five-level slope symbols.
pub fn slopen(u: &[f64], m: usize, gamma: f64, delta: f64) -> Result<f64> {
    if m < 2 {
        return Err(invalid("m must be at least 2"));
    }
    check_slope_thresholds(gamma, delta)?;
    check_len(u, m + 1)?;
    let symbol = |d: f64| -> i8 {
        if d > gamma {
            2
        } else if d > delta {
            1
        } else if d.abs() <= delta {
            0
        } else if d >= -gamma {
            -1
        } else {
            -2
        }
    };
    let symbols: Vec<i8> = u.windows(2).map(|w| symbol(w[1] - w[0])).collect();
    let j = u.len() - m + 1;
    let mut counts: HashMap<&[i8], usize> = HashMap::new();
    for pattern in symbols.windows(m - 1) {
        *counts.entry(pattern).or_default() += 1;
    }
    Ok(census_entropy(&counts, j))
}

/// The estimators by name, as used in feature tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignalFeature {
    ApEn,
    SampEn,
    FuzzyEn,
    IncrEn,
    DispEn,
    PhEn,
    SlopEn,
}

impl SignalFeature {
    pub const ALL: [SignalFeature; 7] = [
        SignalFeature::ApEn,
        SignalFeature::SampEn,
        SignalFeature::FuzzyEn,
        SignalFeature::IncrEn,
        SignalFeature::DispEn,
        SignalFeature::PhEn,
        SignalFeature::SlopEn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SignalFeature::ApEn => "ApEn",
            SignalFeature::SampEn => "SampEn",
            SignalFeature::FuzzyEn => "FuzzyEn",
            SignalFeature::IncrEn => "IncrEn",
            SignalFeature::DispEn => "DispEn",
            SignalFeature::PhEn => "PhEn",
            SignalFeature::SlopEn => "SlopEn",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        let f = match lower.as_str() {
            "apen" => SignalFeature::ApEn,
            "sampen" => SignalFeature::SampEn,
            "fuzzyen" => SignalFeature::FuzzyEn,
            "incren" => SignalFeature::IncrEn,
            "dispen" | "de" => SignalFeature::DispEn,
            "phen" => SignalFeature::PhEn,
            "slopen" | "se" => SignalFeature::SlopEn,
            _ => return Err(Error::UnknownFeature(name.trim().to_string())),
        };
        Ok(f)
    }

    /// Evaluates the estimator; an undefined SampEn becomes `NaN`.
    pub fn compute(self, u: &[f64], p: &EntropyParams) -> Result<f64> {
        match self {
            SignalFeature::ApEn => apen(u, p.m, p.tolerance, p.apen_mode),
            SignalFeature::SampEn => {
                Ok(sampen(u, p.m, p.tolerance)?.value().unwrap_or(f64::NAN))
            }
            SignalFeature::FuzzyEn => fuzzyen(u, p.m, p.tolerance, p.fuzzy_power),
            SignalFeature::IncrEn => incren(u, p.m, p.resolution),
            SignalFeature::DispEn => dispen(u, p.m, p.classes, p.delay),
            SignalFeature::PhEn => phen(u, p.sectors),
            SignalFeature::SlopEn => slopen(u, p.slope_m, p.gamma, p.delta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_series_are_zero() {
        let u = vec![3.0; 50];
        let abs = Tolerance::Absolute(0.1);
        assert_eq!(apen(&u, 2, abs, ApEnMode::Standard).unwrap(), 0.0);
        assert_eq!(apen(&u, 2, abs, ApEnMode::Literal).unwrap(), 0.0);
        assert_eq!(sampen(&u, 2, abs).unwrap(), SampEn::Value(0.0));
        assert_eq!(fuzzyen(&u, 2, abs, 2.0).unwrap(), 0.0);
        assert_eq!(incren(&u, 2, 4).unwrap(), 0.0);
        assert_eq!(dispen(&u, 2, 3, 1).unwrap(), 0.0);
        assert_eq!(phen(&u, 16).unwrap(), 0.0);
        assert_eq!(slopen(&u, 3, 1.0, 0.001).unwrap(), 0.0);
    }

    #[test]
    fn relative_tolerance_on_constant_is_error() {
        let u = vec![1.0; 20];
        assert!(matches!(
            apen(&u, 2, Tolerance::Relative(0.2), ApEnMode::Standard),
            Err(Error::ZeroTolerance)
        ));
        assert!(matches!(
            sampen(&u, 2, Tolerance::Relative(0.2)),
            Err(Error::ZeroTolerance)
        ));
        assert!(fuzzyen(&u, 2, Tolerance::Absolute(0.0), 2.0).is_err());
    }

    #[test]
    fn alternating_series_has_near_zero_apen() {
        let u: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let a = apen(&u, 2, Tolerance::Absolute(0.5), ApEnMode::Standard).unwrap();
        assert!(a.abs() < 0.01, "{a}");
    }

    #[test]
    fn ramps_have_single_word_or_pattern() {
        let ramp: Vec<f64> = (0..60).map(|i| 2.5 * i as f64).collect();
        assert_eq!(incren(&ramp, 3, 4).unwrap(), 0.0);
        assert_eq!(slopen(&ramp, 4, 1.0, 0.001).unwrap(), 0.0);
    }

    #[test]
    fn sampen_without_matches_is_flagged() {
        let u = [0.0, 10.0, 25.0, 45.0, 70.0, 100.0];
        assert_eq!(
            sampen(&u, 2, Tolerance::Absolute(0.5)).unwrap(),
            SampEn::NoMatches
        );
    }

    #[test]
    fn phen_uniform_sectors_is_one() {
        let mut u = vec![0.0, 1.0];
        let steps = [1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0];
        for s in steps {
            let last = *u.last().unwrap();
            u.push(last + s);
        }
        // (1,1), (1,-1), (-1,-1), (-1,1), ... one point per quadrant
        let h = phen(&u, 4).unwrap();
        assert_abs_diff_eq!(h, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dispen_uniform_patterns_reach_bound() {
        // period-4 cycle over two levels visits the four 2-patterns equally
        let u: Vec<f64> = (0..401).map(|i| [0.0, 0.0, 1.0, 1.0][i % 4]).collect();
        let h = dispen(&u, 2, 2, 1).unwrap();
        assert_abs_diff_eq!(h, 2.0 * 2f64.ln(), epsilon = 1e-4);
    }

    #[test]
    fn parameter_validation() {
        assert!(phen(&[1.0, 2.0, 3.0], 6).is_err());
        assert!(phen(&[1.0, 2.0], 8).is_err());
        assert!(slopen(&[1.0; 10], 3, 0.5, 0.5).is_err());
        assert!(dispen(&[1.0; 10], 2, 1, 1).is_err());
        let mut p = EntropyParams::default();
        assert!(p.validate().is_ok());
        p.sectors = 10;
        assert!(p.validate().is_err());
    }

    #[test]
    fn feature_names_round_trip() {
        for f in SignalFeature::ALL {
            assert_eq!(SignalFeature::parse(f.name()).unwrap(), f);
        }
        assert_eq!(SignalFeature::parse("DE").unwrap(), SignalFeature::DispEn);
        assert!(matches!(
            SignalFeature::parse("MSE"),
            Err(Error::UnknownFeature(_))
        ));
    }
}
