//! Per-day route matrices and the windowed von Neumann entropy built on them.

use nalgebra::DMatrix;

use super::vne::{density_operator, pearson_matrix, vne};
use crate::data::{window_split, EventRecord, Timezone};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RouteMode {
    /// Count of `i -> j` transitions.
    Frequency,
    /// Seconds spent in `i` before moving to `j`.
    Duration,
}

/// Route counts or dwell seconds between states for one local calendar day.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteMatrix {
    /// Local day index (days since the epoch in the configured timezone).
    pub day: i64,
    pub routes: DMatrix<f64>,
}

impl RouteMatrix {
    pub fn n_states(&self) -> usize {
        self.routes.nrows()
    }

    /// Row-major flattening used as the day's activity vector.
    pub fn flatten(&self) -> Vec<f64> {
        self.routes.transpose().iter().copied().collect()
    }
}

/// One matrix per local day from the first to the last event's day.
///
/// Each consecutive event pair `(e_k, e_{k+1})` on the same local day is one
/// transition; pairs spanning midnight are not counted. Days without
/// transitions get a zero matrix.
pub fn route_matrices(
    events: &[EventRecord],
    n_states: usize,
    mode: RouteMode,
    tz: Timezone,
) -> Result<Vec<RouteMatrix>> {
    let (Some(first), Some(last)) = (events.first(), events.last()) else {
        return Ok(Vec::new());
    };
    if events.windows(2).any(|w| w[1].timestamp < w[0].timestamp) {
        return Err(invalid("events must be sorted by timestamp"));
    }
    if let Some(e) = events.iter().find(|e| e.state >= n_states) {
        return Err(Error::StateOutOfRange {
            state: e.state,
            n_states,
        });
    }
    let day0 = tz.day_index(first.timestamp);
    let n_days = (tz.day_index(last.timestamp) - day0 + 1) as usize;
    let mut out: Vec<RouteMatrix> = (0..n_days)
        .map(|d| RouteMatrix {
            day: day0 + d as i64,
            routes: DMatrix::zeros(n_states, n_states),
        })
        .collect();
    for pair in events.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let day = tz.day_index(a.timestamp);
        if day != tz.day_index(b.timestamp) {
            continue;
        }
        let d = (day - day0) as usize;
        out[d].routes[(a.state, b.state)] += match mode {
            RouteMode::Frequency => 1.0,
            RouteMode::Duration => (b.timestamp - a.timestamp) as f64,
        };
    }
    Ok(out)
}

/// VNE of one window of days.
#[derive(Debug, Clone, PartialEq)]
pub struct VneWindow {
    pub first_day: i64,
    pub days: usize,
    pub value: f64,
}

/// Route matrices, per-day vectors, Pearson `R`, `rho = R/N`, then VNE, for
/// each non-overlapping window of `days_per_window` days.
pub fn vne_windows(
    events: &[EventRecord],
    n_states: usize,
    days_per_window: usize,
    mode: RouteMode,
    tz: Timezone,
) -> Result<Vec<VneWindow>> {
    let days = route_matrices(events, n_states, mode, tz)?;
    if days_per_window < 2 {
        log::warn!("VNE windows need at least 2 days; got {days_per_window}, all skipped");
        return Ok(Vec::new());
    }
    window_split(days.len(), days_per_window, days_per_window)?
        .into_iter()
        .map(|w| {
            let vectors: Vec<Vec<f64>> = days[w.range()].iter().map(RouteMatrix::flatten).collect();
            let value = vne_of_vectors(&vectors)?;
            Ok(VneWindow {
                first_day: days[w.start].day,
                days: w.length,
                value,
            })
        })
        .collect()
}

/// VNE of the density operator built from the Pearson matrix of `vectors`.
pub fn vne_of_vectors(vectors: &[Vec<f64>]) -> Result<f64> {
    let r = pearson_matrix(vectors)?;
    Ok(vne(&density_operator(&r)?))
}

/// Seconds spent in each state by events stamped in `[start, end)`; the last
/// dwell is cut at `end`.
pub fn dwell_vector(events: &[EventRecord], n_states: usize, start: u64, end: u64) -> Vec<f64> {
    let mut dwell = vec![0.0; n_states];
    for (k, e) in events.iter().enumerate() {
        if e.timestamp < start || e.timestamp >= end {
            continue;
        }
        if let Some(next) = events.get(k + 1) {
            dwell[e.state] += (next.timestamp.min(end) - e.timestamp) as f64;
        }
    }
    dwell
}

/// L1 distance between each dwell vector and its predecessor; 0 for the first.
pub fn duration_differences(dwells: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(dwells.len());
    for (k, cur) in dwells.iter().enumerate() {
        out.push(match k.checked_sub(1) {
            Some(p) => cur.iter().zip(&dwells[p]).map(|(a, b)| (a - b).abs()).sum(),
            None => 0.0,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const DAY: u64 = 86_400;

    fn ev(t: u64, s: usize) -> EventRecord {
        EventRecord::new(t, s)
    }

    #[test]
    fn frequency_counts() {
        let e = [ev(0, 0), ev(10, 1), ev(20, 0), ev(30, 1)];
        let m = route_matrices(&e, 2, RouteMode::Frequency, Timezone::UTC).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].routes[(0, 1)], 2.0);
        assert_eq!(m[0].routes[(1, 0)], 1.0);
        assert_eq!(m[0].routes.sum(), 3.0);
    }

    #[test]
    fn single_event_has_no_routes() {
        let m = route_matrices(&[ev(500, 1)], 3, RouteMode::Frequency, Timezone::UTC).unwrap();
        assert_eq!(m[0].routes, DMatrix::zeros(3, 3));
    }

    #[test]
    fn duration_dwell_times() {
        let e = [ev(0, 0), ev(100, 1), ev(160, 0)];
        let m = route_matrices(&e, 2, RouteMode::Duration, Timezone::UTC).unwrap();
        assert_eq!(m[0].routes[(0, 1)], 100.0);
        assert_eq!(m[0].routes[(1, 0)], 60.0);
    }

    #[test]
    fn empty_days_get_zero_matrices() {
        let e = [ev(0, 0), ev(10, 1), ev(3 * DAY + 5, 0)];
        let m = route_matrices(&e, 2, RouteMode::Frequency, Timezone::UTC).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m[0].routes.sum(), 1.0);
        assert_eq!(m[1].routes.sum(), 0.0);
        assert_eq!(m[3].day, 3);
    }

    fn routine_day(d: u64, order: &[usize]) -> Vec<EventRecord> {
        order
            .iter()
            .enumerate()
            .map(|(k, &s)| ev(d * DAY + 3600 * (k as u64 + 1), s))
            .collect()
    }

    #[test]
    fn identical_days_have_zero_vne() {
        let mut e = Vec::new();
        for d in 0..7 {
            e.extend(routine_day(d, &[0, 1, 2, 0, 2, 1, 0]));
        }
        let w = vne_windows(&e, 3, 7, RouteMode::Frequency, Timezone::UTC).unwrap();
        assert_eq!(w.len(), 1);
        assert_abs_diff_eq!(w[0].value, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn divergent_day_gives_intermediate_vne() {
        let mut e = Vec::new();
        for d in 0..6 {
            e.extend(routine_day(d, &[0, 1, 2, 0, 2, 1, 0]));
        }
        e.extend(routine_day(6, &[0, 0, 1, 1, 2, 2, 2]));
        let w = vne_windows(&e, 3, 7, RouteMode::Frequency, Timezone::UTC).unwrap();
        // brute force: six identical vectors plus one other
        let days = route_matrices(&e, 3, RouteMode::Frequency, Timezone::UTC).unwrap();
        let a = days[0].flatten();
        let b = days[6].flatten();
        let r = brute_pearson(&a, &b);
        // R = [[J6, r1],[r1', 1]] has eigenvalues 6 +- ... computed numerically
        let mut big = DMatrix::from_element(7, 7, 1.0);
        for i in 0..6 {
            big[(i, 6)] = r;
            big[(6, i)] = r;
        }
        let ev = nalgebra::SymmetricEigen::new(big / 7.0).eigenvalues;
        let expected: f64 = -ev.iter().filter(|&&l| l > 1e-9).map(|l| l * l.ln()).sum::<f64>();
        assert_abs_diff_eq!(w[0].value, expected, epsilon = 1e-9);
        assert!(w[0].value > 0.0 && w[0].value < 7f64.ln());
    }

    fn brute_pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }

    #[test]
    fn uncorrelated_days_approach_log_n() {
        // one-hot route vectors are nearly orthogonal after centering
        let n_states = 12;
        let mut e = Vec::new();
        for d in 0..6u64 {
            let a = 2 * d as usize;
            e.push(ev(d * DAY + 100, a));
            e.push(ev(d * DAY + 200, a + 1));
        }
        let w = vne_windows(&e, n_states, 6, RouteMode::Frequency, Timezone::UTC).unwrap();
        // centered one-hot vectors correlate at -1/(len-1); R is close to I
        assert!((w[0].value - 6f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn short_windows_are_skipped() {
        let e = [ev(0, 0), ev(10, 1)];
        assert!(vne_windows(&e, 2, 1, RouteMode::Frequency, Timezone::UTC)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn dwell_and_differences() {
        let e = [ev(0, 0), ev(100, 1), ev(160, 0), ev(1000, 1)];
        let d = dwell_vector(&e, 2, 0, 500);
        assert_eq!(d, vec![100.0 + 340.0, 60.0]);
        let diffs = duration_differences(&[vec![100.0, 50.0], vec![100.0, 50.0], vec![160.0, 50.0]]);
        assert_eq!(diffs, vec![0.0, 0.0, 60.0]);
    }
}
