//! Data model, preprocessing and windowing shared by every estimator.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};

const SECONDS_PER_DAY: i64 = 86_400;

/// A single sensor event: a state observed at a timestamp (seconds since epoch).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventRecord {
    pub timestamp: u64,
    pub state: usize,
}

impl EventRecord {
    pub fn new(timestamp: u64, state: usize) -> Self {
        EventRecord { timestamp, state }
    }
}

/// Discrete states over a fixed alphabet, optionally stamped.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrajectory {
    alphabet: Vec<String>,
    states: Vec<usize>,
    timestamps: Option<Vec<u64>>,
}

impl StateTrajectory {
    pub fn new(alphabet: Vec<String>, states: Vec<usize>) -> Result<Self> {
        Self::build(alphabet, states, None)
    }

    pub fn with_timestamps(
        alphabet: Vec<String>,
        states: Vec<usize>,
        timestamps: Vec<u64>,
    ) -> Result<Self> {
        Self::build(alphabet, states, Some(timestamps))
    }

    /// A trajectory over the alphabet `"0", "1", ..., n-1`.
    pub fn from_indices(n_states: usize, states: Vec<usize>) -> Result<Self> {
        Self::new(numbered_alphabet(n_states), states)
    }

    fn build(
        alphabet: Vec<String>,
        states: Vec<usize>,
        timestamps: Option<Vec<u64>>,
    ) -> Result<Self> {
        let n = alphabet.len();
        if let Some(&state) = states.iter().find(|&&s| s >= n) {
            return Err(Error::StateOutOfRange { state, n_states: n });
        }
        if let Some(ts) = &timestamps {
            if ts.len() != states.len() {
                return Err(Error::DimensionMismatch {
                    expected: states.len(),
                    got: ts.len(),
                });
            }
            if ts.windows(2).any(|w| w[1] < w[0]) {
                return Err(invalid("timestamps must be non-decreasing"));
            }
        }
        Ok(StateTrajectory {
            alphabet,
            states,
            timestamps,
        })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn n_states(&self) -> usize {
        self.alphabet.len()
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn timestamps(&self) -> Option<&[u64]> {
        self.timestamps.as_deref()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// The sub-trajectory covered by `window`.
    pub fn slice(&self, window: Window) -> StateTrajectory {
        let range = window.range();
        StateTrajectory {
            alphabet: self.alphabet.clone(),
            states: self.states[range.clone()].to_vec(),
            timestamps: self.timestamps.as_ref().map(|t| t[range].to_vec()),
        }
    }

    /// The trajectory read backwards.
    pub fn reversed(&self) -> StateTrajectory {
        let mut states = self.states.clone();
        states.reverse();
        StateTrajectory {
            alphabet: self.alphabet.clone(),
            states,
            timestamps: None,
        }
    }
}

pub fn numbered_alphabet(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// A uniformly sampled real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSeries {
    values: Vec<f64>,
    sample_rate: Option<f64>,
}

impl SignalSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("signal values must be finite"));
        }
        Ok(SignalSeries {
            values,
            sample_rate: None,
        })
    }

    pub fn with_sample_rate(mut self, hz: f64) -> Result<Self> {
        if !(hz > 0.0 && hz.is_finite()) {
            return Err(invalid("sample rate must be positive"));
        }
        self.sample_rate = Some(hz);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample_rate(&self) -> Option<f64> {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Half-open index range `[start, start + length)` into a parent sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: usize,
    pub length: usize,
}

impl Window {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.length
    }

    pub fn end(&self) -> usize {
        self.start + self.length
    }
}

/// A labeled row of named features.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    features: BTreeMap<String, f64>,
    label: u8,
}

impl LabeledSample {
    pub fn new(features: Vec<(String, f64)>, label: u8) -> Result<Self> {
        if label > 1 {
            return Err(Error::BinaryOnly(label as usize + 1));
        }
        let mut map = BTreeMap::new();
        for (name, value) in features {
            if !value.is_finite() {
                return Err(invalid(format!("feature {name} is not finite")));
            }
            if map.insert(name.clone(), value).is_some() {
                return Err(invalid(format!("duplicate feature name {name}")));
            }
        }
        Ok(LabeledSample {
            features: map,
            label,
        })
    }

    pub fn features(&self) -> &BTreeMap<String, f64> {
        &self.features
    }

    pub fn label(&self) -> u8 {
        self.label
    }
}

/// Forward-fills gaps with the last valid value, then backfills leading gaps
/// with the first valid value.
pub fn fill_missing(values: &[Option<f64>]) -> Result<SignalSeries> {
    let first = values
        .iter()
        .flatten()
        .copied()
        .find(|v| v.is_finite())
        .ok_or(Error::EmptySeries)?;
    let mut last = first;
    let filled = values
        .iter()
        .map(|v| {
            if let Some(x) = v.filter(|x| x.is_finite()) {
                last = x;
            }
            last
        })
        .collect();
    SignalSeries::new(filled)
}

/// Zero-order-hold resampling of change-point events into fixed bins.
///
/// Bins start at the first event `t0`. Bin `k` ends at `t0 + (k+1)*bin` and
/// takes the state of the last event at or before that end. The output has one
/// state per whole bin between `t0` and `horizon`; without a horizon, bins
/// continue until the last event is covered.
pub fn resample_events(
    events: &[EventRecord],
    alphabet: Vec<String>,
    bin_seconds: u64,
    horizon: Option<u64>,
) -> Result<StateTrajectory> {
    if bin_seconds == 0 {
        return Err(invalid("bin must be positive"));
    }
    let first = events
        .first()
        .ok_or_else(|| Error::EmptyInput("no events".into()))?;
    if events.windows(2).any(|w| w[1].timestamp < w[0].timestamp) {
        return Err(invalid("events must be sorted by timestamp"));
    }
    let t0 = first.timestamp;
    let t_last = events[events.len() - 1].timestamp;
    let n_bins = match horizon {
        Some(h) => (h.saturating_sub(t0) / bin_seconds) as usize,
        None => ((t_last - t0).div_ceil(bin_seconds)).max(1) as usize,
    };
    let mut states = Vec::with_capacity(n_bins);
    let mut stamps = Vec::with_capacity(n_bins);
    let mut cursor = 0;
    for k in 0..n_bins {
        let bin_end = t0 + (k as u64 + 1) * bin_seconds;
        while cursor + 1 < events.len() && events[cursor + 1].timestamp <= bin_end {
            cursor += 1;
        }
        states.push(events[cursor].state);
        stamps.push(t0 + k as u64 * bin_seconds);
    }
    StateTrajectory::with_timestamps(alphabet, states, stamps)
}

/// Windows `[sp, sp + tw)` for `sp = 0, stride, 2*stride, ...` while they fit.
pub fn window_split(len: usize, tw: usize, stride: usize) -> Result<Vec<Window>> {
    if tw == 0 || stride == 0 {
        return Err(invalid("window length and stride must be at least 1"));
    }
    Ok((0..)
        .map(|k| k * stride)
        .take_while(|&sp| sp + tw <= len)
        .map(|start| Window { start, length: tw })
        .collect())
}

/// Fixed UTC offset used to read local time of day from epoch seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Timezone {
    offset_seconds: i64,
}

impl Timezone {
    pub const UTC: Timezone = Timezone { offset_seconds: 0 };

    pub fn from_offset_seconds(offset_seconds: i64) -> Self {
        Timezone { offset_seconds }
    }

    /// Parses `UTC`, `Z`, or `+HH:MM` / `-HH:MM`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("utc") || s == "Z" {
            return Ok(Timezone::UTC);
        }
        let bad = || invalid(format!("bad timezone {s:?}, expected UTC or +HH:MM"));
        let (sign, rest) = match s.as_bytes().first() {
            Some(b'+') => (1, &s[1..]),
            Some(b'-') => (-1, &s[1..]),
            _ => return Err(bad()),
        };
        let (h, m) = rest.split_once(':').ok_or_else(bad)?;
        let h: i64 = h.parse().map_err(|_| bad())?;
        let m: i64 = m.parse().map_err(|_| bad())?;
        if h > 14 || m > 59 {
            return Err(bad());
        }
        Ok(Timezone::from_offset_seconds(sign * (h * 3600 + m * 60)))
    }

    pub fn offset_seconds(&self) -> i64 {
        self.offset_seconds
    }

    pub fn local_seconds(&self, timestamp: u64) -> i64 {
        timestamp as i64 + self.offset_seconds
    }

    pub fn seconds_of_day(&self, timestamp: u64) -> i64 {
        self.local_seconds(timestamp).rem_euclid(SECONDS_PER_DAY)
    }

    /// Local calendar day index (days since the epoch in local time).
    pub fn day_index(&self, timestamp: u64) -> i64 {
        self.local_seconds(timestamp).div_euclid(SECONDS_PER_DAY)
    }

    /// Daytime is the half-open local interval [06:00, 18:00).
    pub fn is_daytime(&self, timestamp: u64) -> bool {
        (6 * 3600..18 * 3600).contains(&self.seconds_of_day(timestamp))
    }
}

/// Partitions events into daytime [06:00, 18:00) and night.
pub fn day_night_split(
    events: &[EventRecord],
    tz: Timezone,
) -> (Vec<EventRecord>, Vec<EventRecord>) {
    events.iter().partition(|e| tz.is_daytime(e.timestamp))
}

/// Raw-label to {0, 1} mapping; the lexicographically smaller label is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMapping {
    pub negative: String,
    pub positive: String,
}

impl LabelMapping {
    pub fn encode(&self, raw: &str) -> Option<u8> {
        if raw == self.negative {
            Some(0)
        } else if raw == self.positive {
            Some(1)
        } else {
            None
        }
    }
}

pub fn encode_labels<S: AsRef<str>>(raw: &[S]) -> Result<(Vec<u8>, LabelMapping)> {
    let mut distinct: Vec<&str> = raw.iter().map(AsRef::as_ref).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != 2 {
        return Err(Error::BinaryOnly(distinct.len()));
    }
    let mapping = LabelMapping {
        negative: distinct[0].to_string(),
        positive: distinct[1].to_string(),
    };
    let labels = raw
        .iter()
        .map(|r| u8::from(r.as_ref() == mapping.positive))
        .collect();
    Ok((labels, mapping))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Vec<String> {
        vec!["A".into(), "B".into()]
    }

    #[test]
    fn fill_forward_and_back() {
        let v = fill_missing(&[Some(1.0), None, None, Some(4.0)]).unwrap();
        assert_eq!(v.values(), &[1.0, 1.0, 1.0, 4.0]);
        let v = fill_missing(&[None, Some(2.0), Some(3.0)]).unwrap();
        assert_eq!(v.values(), &[2.0, 2.0, 3.0]);
        let v = fill_missing(&[Some(5.0)]).unwrap();
        assert_eq!(v.values(), &[5.0]);
        let v = fill_missing(&[Some(1.0), Some(f64::NAN), Some(3.0)]).unwrap();
        assert_eq!(v.values(), &[1.0, 1.0, 3.0]);
    }

    #[test]
    fn fill_all_missing_is_error() {
        assert!(matches!(
            fill_missing(&[None, None]),
            Err(Error::EmptySeries)
        ));
        assert!(matches!(fill_missing(&[]), Err(Error::EmptySeries)));
    }

    #[test]
    fn resample_one_event_per_bin() {
        let ev = [EventRecord::new(0, 0), EventRecord::new(70, 1)];
        let t = resample_events(&ev, ab(), 60, None).unwrap();
        assert_eq!(t.states(), &[0, 1]);
    }

    #[test]
    fn resample_holds_last_state() {
        let ev = [EventRecord::new(0, 0)];
        let t = resample_events(&ev, ab(), 60, Some(180)).unwrap();
        assert_eq!(t.states(), &[0, 0, 0]);
    }

    #[test]
    fn resample_takes_last_in_bin() {
        let ev = [
            EventRecord::new(0, 0),
            EventRecord::new(10, 1),
            EventRecord::new(20, 0),
        ];
        let t = resample_events(&ev, ab(), 60, None).unwrap();
        assert_eq!(t.states(), &[0]);
    }

    #[test]
    fn resample_rejects_empty() {
        assert!(resample_events(&[], ab(), 60, None).is_err());
        assert!(resample_events(&[EventRecord::new(0, 0)], ab(), 0, None).is_err());
    }

    #[test]
    fn window_examples() {
        let starts = |l, tw, s| -> Vec<usize> {
            window_split(l, tw, s)
                .unwrap()
                .iter()
                .map(|w| w.start)
                .collect()
        };
        assert_eq!(starts(10, 3, 3), vec![0, 3, 6]);
        assert_eq!(starts(3, 3, 1), vec![0]);
        assert_eq!(starts(5, 2, 1), vec![0, 1, 2, 3]);
        assert!(starts(2, 3, 1).is_empty());
        assert!(window_split(5, 0, 1).is_err());
    }

    #[test]
    fn day_night_boundaries() {
        let tz = Timezone::UTC;
        let day0 = 10 * 86_400;
        assert!(tz.is_daytime(day0 + 6 * 3600));
        assert!(tz.is_daytime(day0 + 18 * 3600 - 1));
        assert!(!tz.is_daytime(day0 + 18 * 3600));
        assert!(!tz.is_daytime(day0 + 3 * 3600));
        let plus_two = Timezone::parse("+02:00").unwrap();
        // 04:00 UTC is 06:00 local
        assert!(plus_two.is_daytime(day0 + 4 * 3600));
        assert_eq!(Timezone::parse("-05:30").unwrap().offset_seconds(), -19_800);
        assert!(Timezone::parse("CET").is_err());
    }

    #[test]
    fn label_encoding() {
        let (y, m) = encode_labels(&["normal", "abnormal", "normal"]).unwrap();
        assert_eq!(y, vec![1, 0, 1]);
        assert_eq!(m.negative, "abnormal");
        let (y, _) = encode_labels(&["0", "1", "1"]).unwrap();
        assert_eq!(y, vec![0, 1, 1]);
        assert!(matches!(
            encode_labels(&["x", "x"]),
            Err(Error::BinaryOnly(1))
        ));
        assert!(matches!(
            encode_labels(&["a", "b", "c"]),
            Err(Error::BinaryOnly(3))
        ));
    }

    #[test]
    fn trajectory_validates_alphabet() {
        assert!(StateTrajectory::from_indices(2, vec![0, 2]).is_err());
        assert!(StateTrajectory::with_timestamps(ab(), vec![0, 1], vec![5, 4]).is_err());
    }

    #[test]
    fn labeled_sample_rejects_duplicates() {
        let s = LabeledSample::new(vec![("a".into(), 1.0), ("a".into(), 2.0)], 0);
        assert!(s.is_err());
        assert!(LabeledSample::new(vec![("a".into(), f64::NAN)], 0).is_err());
    }

    proptest! {
        #[test]
        fn fill_is_idempotent(raw in prop::collection::vec(prop::option::of(-1e6f64..1e6), 1..60)) {
            prop_assume!(raw.iter().any(Option::is_some));
            let once = fill_missing(&raw).unwrap();
            let again: Vec<Option<f64>> = once.values().iter().map(|&v| Some(v)).collect();
            prop_assert_eq!(fill_missing(&again).unwrap(), once);
        }

        #[test]
        fn non_overlapping_windows_tile_prefix(len in 0usize..500, tw in 1usize..50) {
            let w = window_split(len, tw, tw).unwrap();
            prop_assert_eq!(w.len(), len / tw);
            for (k, win) in w.iter().enumerate() {
                prop_assert_eq!(win.start, k * tw);
            }
        }

        #[test]
        fn day_night_is_a_partition(ts in prop::collection::vec(0u64..4_000_000_000, 0..100), off in -50_000i64..50_000) {
            let events: Vec<_> = ts.iter().map(|&t| EventRecord::new(t, 0)).collect();
            let (d, n) = day_night_split(&events, Timezone::from_offset_seconds(off));
            prop_assert_eq!(d.len() + n.len(), events.len());
        }

        #[test]
        fn resample_length_counts_whole_bins(gaps in prop::collection::vec(0u64..500, 1..30), bin in 1u64..200, extra in 0u64..1000) {
            let mut t = 0;
            let events: Vec<_> = gaps.iter().map(|g| { t += g; EventRecord::new(t, 0) }).collect();
            let horizon = t + extra;
            let traj = resample_events(&events, vec!["s".into()], bin, Some(horizon)).unwrap();
            prop_assert_eq!(traj.len() as u64, (horizon - events[0].timestamp) / bin);
        }
    }
}
