//! Feature tables from event logs and signal corpora.

use rayon::prelude::*;

use crate::data::{resample_events, EventRecord, StateTrajectory, Timezone};
use crate::error::{invalid, Error, Result};
use crate::io::{EventSeries, EventTable, FeatureTable, SignalRow};
use crate::markov::{
    dwell_vector, entropy_rate, estimate_transition_matrix, prefix_stationary, route_matrices,
    shannon_entropy, state_distribution, vne_of_vectors, RouteMode,
};
use crate::neep::{estimate_ep, train_neep, NeepModel, TrainConfig};
use crate::sigent::{EntropyParams, SignalFeature};

/// Per-window features of a state trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkovFeature {
    /// Shannon entropy of the window's state distribution.
    Shannon,
    /// Entropy rate with `pi` from the first `tw1` bins and `T` from the window.
    EntropyRate,
    /// Mean `dS` per step under a NEEP model trained on the whole series.
    Ep,
    /// VNE of the window's per-day transition counts.
    VneFreq,
    /// VNE of the window's per-day dwell durations.
    VneDur,
    /// L1 change of per-state dwell seconds from the previous window.
    DurationDiff,
    /// Fraction of bins spent in each state; one column per state.
    StateFrequency,
}

impl MarkovFeature {
    /// Every feature except the state-frequency baseline.
    pub const ENTROPY: [MarkovFeature; 6] = [
        MarkovFeature::Shannon,
        MarkovFeature::EntropyRate,
        MarkovFeature::Ep,
        MarkovFeature::VneFreq,
        MarkovFeature::VneDur,
        MarkovFeature::DurationDiff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MarkovFeature::Shannon => "shannon",
            MarkovFeature::EntropyRate => "entropy_rate",
            MarkovFeature::Ep => "ep",
            MarkovFeature::VneFreq => "vne_freq",
            MarkovFeature::VneDur => "vne_dur",
            MarkovFeature::DurationDiff => "duration_diff",
            MarkovFeature::StateFrequency => "state_freq",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        MarkovFeature::ENTROPY
            .into_iter()
            .chain([MarkovFeature::StateFrequency])
            .find(|f| f.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventSettings {
    pub bin_seconds: u64,
    /// Bins used to estimate the stationary distribution.
    pub tw1: usize,
    /// Bins per feature window.
    pub tw2: usize,
    pub stride: usize,
    pub timezone: Timezone,
    /// Computes every feature separately on daytime and night data.
    pub day_night: bool,
    pub features: Vec<MarkovFeature>,
    pub neep: TrainConfig,
}

impl EventSettings {
    pub fn new(bin_seconds: u64, tw2: usize) -> Self {
        EventSettings {
            bin_seconds,
            tw1: tw2,
            tw2,
            stride: tw2,
            timezone: Timezone::UTC,
            day_night: false,
            features: MarkovFeature::ENTROPY.to_vec(),
            neep: TrainConfig {
                epochs: 50,
                batch_size: 32,
                ..TrainConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bin_seconds == 0 || self.tw1 < 2 || self.tw2 < 2 || self.stride == 0 {
            return Err(invalid("bin must be positive, windows at least 2 bins, stride positive"));
        }
        if self.features.is_empty() {
            return Err(invalid("no features requested"));
        }
        self.neep.validate()
    }

    /// Column names for an alphabet, in output order.
    pub fn column_names(&self, alphabet: &[String]) -> Vec<String> {
        let suffixes: &[&str] = if self.day_night { &["_day", "_night"] } else { &[""] };
        let mut names = Vec::new();
        for suffix in suffixes {
            for f in &self.features {
                match f {
                    MarkovFeature::StateFrequency => {
                        names.extend(alphabet.iter().map(|s| format!("freq_{s}{suffix}")))
                    }
                    other => names.push(format!("{}{suffix}", other.name())),
                }
            }
        }
        names
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Part {
    All,
    Day,
    Night,
}

impl Part {
    fn keeps(self, tz: Timezone, t: u64) -> bool {
        match self {
            Part::All => true,
            Part::Day => tz.is_daytime(t),
            Part::Night => !tz.is_daytime(t),
        }
    }
}

/// Features of one series; `None` when the series is shorter than a window.
fn series_features(
    series: &EventSeries,
    alphabet: &[String],
    settings: &EventSettings,
    seed: u64,
) -> Result<Option<Vec<(u64, Vec<f64>)>>> {
    let n = alphabet.len();
    let traj = resample_events(&series.events, alphabet.to_vec(), settings.bin_seconds, None)?;
    let stamps = traj.timestamps().expect("resampled trajectories carry timestamps").to_vec();
    if traj.len() < settings.tw1.max(settings.tw2) {
        log::warn!(
            "series {} has {} bins, fewer than the window; skipped",
            series.id,
            traj.len()
        );
        return Ok(None);
    }
    let windows = crate::data::window_split(traj.len(), settings.tw2, settings.stride)?;
    let parts: &[Part] = if settings.day_night { &[Part::Day, Part::Night] } else { &[Part::All] };
    let tz = settings.timezone;
    let mut rows: Vec<(u64, Vec<f64>)> = windows.iter().map(|w| (stamps[w.start], Vec::new())).collect();

    for (p, &part) in parts.iter().enumerate() {
        let keep = |k: usize| part.keeps(tz, stamps[k]);
        let masked = |range: std::ops::Range<usize>| -> Vec<usize> {
            range.filter(|&k| keep(k)).map(|k| traj.states()[k]).collect()
        };
        let events: Vec<EventRecord> = series
            .events
            .iter()
            .copied()
            .filter(|e| part.keeps(tz, e.timestamp))
            .collect();
        let prefix = masked(0..settings.tw1);
        let pi = if prefix.is_empty() { None } else { Some(prefix_stationary(&prefix, n)?) };
        let model = if settings.features.contains(&MarkovFeature::Ep) {
            let all = masked(0..traj.len());
            if all.len() >= 2 {
                let cfg = TrainConfig {
                    seed: seed.wrapping_add(p as u64),
                    ..settings.neep
                };
                Some(train_neep(&StateTrajectory::from_indices(n, all)?, &cfg)?.model)
            } else {
                None
            }
        } else {
            None
        };
        let mut prev_dwell: Option<Vec<f64>> = None;
        for (w, row) in windows.iter().zip(rows.iter_mut()) {
            let states = masked(w.range());
            let t_start = stamps[w.start];
            let t_end = t_start + w.length as u64 * settings.bin_seconds;
            let window_events: Vec<EventRecord> = events
                .iter()
                .copied()
                .filter(|e| e.timestamp >= t_start && e.timestamp < t_end)
                .collect();
            for f in &settings.features {
                match f {
                    MarkovFeature::Shannon => row.1.push(shannon_of(&states, n)?),
                    MarkovFeature::EntropyRate => row.1.push(match (&pi, states.len() >= 2) {
                        (Some(pi), true) => entropy_rate(pi, &estimate_transition_matrix(&states, n)?)?,
                        _ => f64::NAN,
                    }),
                    MarkovFeature::Ep => row.1.push(ep_of(model.as_ref(), &states, n)?),
                    MarkovFeature::VneFreq => row.1.push(vne_of(&window_events, n, RouteMode::Frequency, tz)?),
                    MarkovFeature::VneDur => row.1.push(vne_of(&window_events, n, RouteMode::Duration, tz)?),
                    MarkovFeature::DurationDiff => {
                        let dwell = dwell_vector(&events, n, t_start, t_end);
                        let diff = prev_dwell
                            .as_ref()
                            .map_or(0.0, |prev| dwell.iter().zip(prev).map(|(a, b)| (a - b).abs()).sum());
                        row.1.push(diff);
                        prev_dwell = Some(dwell);
                    }
                    MarkovFeature::StateFrequency => {
                        if states.is_empty() {
                            row.1.extend(std::iter::repeat(f64::NAN).take(n));
                        } else {
                            row.1.extend(state_distribution(&StateTrajectory::from_indices(n, states.clone())?)?);
                        }
                    }
                }
            }
        }
    }
    Ok(Some(rows))
}

fn shannon_of(states: &[usize], n: usize) -> Result<f64> {
    if states.is_empty() {
        return Ok(f64::NAN);
    }
    shannon_entropy(&state_distribution(&StateTrajectory::from_indices(n, states.to_vec())?)?)
}

fn ep_of(model: Option<&NeepModel>, states: &[usize], n: usize) -> Result<f64> {
    match model {
        Some(m) if states.len() >= 2 => estimate_ep(m, &StateTrajectory::from_indices(n, states.to_vec())?),
        _ => Ok(f64::NAN),
    }
}

/// NaN when the window covers fewer than two days.
fn vne_of(events: &[EventRecord], n: usize, mode: RouteMode, tz: Timezone) -> Result<f64> {
    let days = route_matrices(events, n, mode, tz)?;
    if days.len() < 2 {
        return Ok(f64::NAN);
    }
    let vectors: Vec<Vec<f64>> = days.iter().map(|d| d.flatten()).collect();
    vne_of_vectors(&vectors)
}

/// One row per (series, window); series are processed in parallel and
/// written in table order. Series `k` trains its NEEP model with seed
/// `neep.seed + 2k` (day) and `+ 2k + 1` (night).
pub fn extract_events(table: &EventTable, settings: &EventSettings) -> Result<FeatureTable> {
    settings.validate()?;
    let per_series = table
        .series
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            series_features(s, &table.alphabet, settings, settings.neep.seed.wrapping_add(2 * k as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = FeatureTable::new(settings.column_names(&table.alphabet));
    for (s, rows) in table.series.iter().zip(per_series) {
        for (start, row) in rows.into_iter().flatten() {
            out.push(s.id.clone(), start, row, s.label.clone().unwrap_or_default());
        }
    }
    if out.is_empty() {
        let len = table
            .series
            .iter()
            .map(|s| resample_events(&s.events, table.alphabet.clone(), settings.bin_seconds, None).map(|t| t.len()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .unwrap_or(0);
        return Err(Error::WindowTooLarge {
            window: settings.tw1.max(settings.tw2),
            len,
        });
    }
    Ok(out)
}

/// One row per signal, `window_start` 0.
pub fn extract_signals(
    rows: &[SignalRow],
    features: &[SignalFeature],
    params: &EntropyParams,
) -> Result<FeatureTable> {
    params.validate()?;
    if features.is_empty() {
        return Err(invalid("no features requested"));
    }
    let values = rows
        .par_iter()
        .map(|r| {
            features
                .iter()
                .map(|f| f.compute(r.signal.values(), params))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = FeatureTable::new(features.iter().map(|f| f.name().to_string()).collect());
    for (r, v) in rows.iter().zip(values) {
        out.push(r.id.clone(), 0, v, r.label.clone().unwrap_or_default());
    }
    Ok(out)
}
