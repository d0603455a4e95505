//! CSV formats for events, signals and feature tables.
//!
//! Reals are written with 17 significant digits, so they round-trip exactly.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::data::{encode_labels, fill_missing, EventRecord, LabelMapping, SignalSeries};
use crate::error::{Error, Result};
use crate::select::FeatureMatrix;

/// `d.dddddddddddddddde±x`, or `NaN` / `inf` / `-inf`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// Empty cells and `NaN` are missing.
pub fn parse_real(cell: &str) -> Result<Option<f64>> {
    let cell = cell.trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    cell.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::Malformed(format!("not a number: {cell:?}")))
}

/// Integer seconds since the epoch, or an RFC 3339 / ISO-8601 date-time.
/// Date-times without an offset are read as UTC.
pub fn parse_timestamp(cell: &str) -> Result<u64> {
    let cell = cell.trim();
    if let Ok(t) = cell.parse::<u64>() {
        return Ok(t);
    }
    let secs = if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(cell) {
        dt.timestamp()
    } else {
        chrono::NaiveDateTime::parse_from_str(cell, "%Y-%m-%dT%H:%M:%S")
            .or_else(|_| chrono::NaiveDateTime::parse_from_str(cell, "%Y-%m-%d %H:%M:%S"))
            .map_err(|_| Error::Malformed(format!("bad timestamp: {cell:?}")))?
            .and_utc()
            .timestamp()
    };
    u64::try_from(secs).map_err(|_| Error::Malformed(format!("timestamp before 1970: {cell:?}")))
}

fn header_index(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name))
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r)
}

/// Events of one subject, sorted by timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSeries {
    pub id: String,
    pub events: Vec<EventRecord>,
    pub label: Option<String>,
}

/// Parsed event CSV. State indices refer to `alphabet`, which is sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTable {
    pub alphabet: Vec<String>,
    pub series: Vec<EventSeries>,
}

/// Reads `timestamp,state` with optional `id` and `label` columns; rows are
/// grouped by `id` (sorted), a missing `id` column giving one series `all`.
pub fn read_events<R: Read>(r: R) -> Result<EventTable> {
    let mut rdr = reader(r);
    let headers = rdr.headers()?.clone();
    let ts_col = header_index(&headers, "timestamp")
        .ok_or_else(|| Error::Malformed("event CSV needs a timestamp column".into()))?;
    let state_col = header_index(&headers, "state")
        .ok_or_else(|| Error::Malformed("event CSV needs a state column".into()))?;
    let id_col = header_index(&headers, "id");
    let label_col = header_index(&headers, "label");

    let mut raw: BTreeMap<String, (Vec<(u64, String)>, Option<String>)> = BTreeMap::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| {
            rec.get(c)
                .ok_or_else(|| Error::Malformed(format!("row {}: missing column", line + 2)))
        };
        let t = parse_timestamp(field(ts_col)?)?;
        let state = field(state_col)?.to_string();
        if state.is_empty() {
            return Err(Error::Malformed(format!("row {}: empty state", line + 2)));
        }
        let id = id_col.map_or(Ok("all"), field)?.to_string();
        let label = label_col.map(field).transpose()?.map(str::to_string);
        let entry = raw.entry(id.clone()).or_default();
        match (&entry.1, &label) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Malformed(format!("series {id} has conflicting labels")));
            }
            (None, Some(_)) => entry.1 = label,
            _ => {}
        }
        entry.0.push((t, state));
    }
    if raw.is_empty() {
        return Err(Error::EmptyInput("event CSV has no rows".into()));
    }
    let mut alphabet: Vec<String> = raw
        .values()
        .flat_map(|(ev, _)| ev.iter().map(|(_, s)| s.clone()))
        .collect();
    alphabet.sort();
    alphabet.dedup();
    let series = raw
        .into_iter()
        .map(|(id, (mut ev, label))| {
            ev.sort_by_key(|(t, _)| *t);
            let events = ev
                .into_iter()
                .map(|(t, s)| EventRecord::new(t, alphabet.binary_search(&s).unwrap()))
                .collect();
            EventSeries { id, events, label }
        })
        .collect();
    Ok(EventTable { alphabet, series })
}

/// Writes `id,timestamp,state[,label]`.
pub fn write_events<W: Write>(table: &EventTable, w: W) -> Result<()> {
    let labelled = table.series.iter().any(|s| s.label.is_some());
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["id", "timestamp", "state"];
    if labelled {
        header.push("label");
    }
    out.write_record(&header)?;
    for s in &table.series {
        for e in &s.events {
            let mut rec = vec![s.id.clone(), e.timestamp.to_string(), table.alphabet[e.state].clone()];
            if labelled {
                rec.push(s.label.clone().unwrap_or_default());
            }
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalRow {
    pub id: String,
    pub label: Option<String>,
    pub signal: SignalSeries,
}

/// Reads one signal per row. A column named `id` (or an unnamed first column)
/// holds the id, `label` or `y` the label; every other column is a value.
/// Missing values are forward- then back-filled.
pub fn read_signals<R: Read>(r: R) -> Result<Vec<SignalRow>> {
    let mut rdr = reader(r);
    let headers = rdr.headers()?.clone();
    let id_col = header_index(&headers, "id").or_else(|| {
        (headers.get(0).is_some_and(|h| h.trim().is_empty())).then_some(0)
    });
    let label_col = header_index(&headers, "label").or_else(|| header_index(&headers, "y"));
    let value_cols: Vec<usize> = (0..headers.len())
        .filter(|&c| Some(c) != id_col && Some(c) != label_col)
        .collect();
    if value_cols.is_empty() {
        return Err(Error::Malformed("signal CSV has no value columns".into()));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != headers.len() {
            return Err(Error::Malformed(format!(
                "row {} has {} fields, header has {}",
                k + 2,
                rec.len(),
                headers.len()
            )));
        }
        let values: Vec<Option<f64>> = value_cols
            .iter()
            .map(|&c| parse_real(&rec[c]))
            .collect::<Result<_>>()?;
        let signal = fill_missing(&values).map_err(|e| match e {
            Error::EmptySeries => Error::Malformed(format!("row {} has no values", k + 2)),
            other => other,
        })?;
        rows.push(SignalRow {
            id: id_col.map_or_else(|| k.to_string(), |c| rec[c].to_string()),
            label: label_col.map(|c| rec[c].to_string()),
            signal,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("signal CSV has no rows".into()));
    }
    Ok(rows)
}

/// Writes `id,label,v1,...,vN`; all rows must share one length.
pub fn write_signals<W: Write>(rows: &[SignalRow], w: W) -> Result<()> {
    let n = rows.first().map_or(0, |r| r.signal.len());
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["id".to_string(), "label".to_string()];
    header.extend((1..=n).map(|i| format!("v{i}")));
    out.write_record(&header)?;
    for r in rows {
        if r.signal.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: r.signal.len(),
            });
        }
        let mut rec = vec![r.id.clone(), r.label.clone().unwrap_or_default()];
        rec.extend(r.signal.values().iter().map(|&v| format_real(v)));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// `id,window_start,feature...,label` with raw string labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub ids: Vec<String>,
    pub window_starts: Vec<u64>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

impl FeatureTable {
    pub fn new(names: Vec<String>) -> Self {
        FeatureTable {
            names,
            ..Default::default()
        }
    }

    pub fn push(&mut self, id: impl Into<String>, window_start: u64, row: Vec<f64>, label: impl Into<String>) {
        debug_assert_eq!(row.len(), self.names.len());
        self.ids.push(id.into());
        self.window_starts.push(window_start);
        self.rows.push(row);
        self.labels.push(label.into());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["id".to_string(), "window_start".to_string()];
        header.extend(self.names.iter().cloned());
        header.push("label".into());
        out.write_record(&header)?;
        for k in 0..self.rows.len() {
            let mut rec = vec![self.ids[k].clone(), self.window_starts[k].to_string()];
            rec.extend(self.rows[k].iter().map(|&v| format_real(v)));
            rec.push(self.labels[k].clone());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let mut rdr = reader(r);
        let headers = rdr.headers()?.clone();
        let n = headers.len();
        if n < 3 || &headers[0] != "id" || &headers[1] != "window_start" || &headers[n - 1] != "label" {
            return Err(Error::Malformed(
                "feature CSV header must be id,window_start,<features>,label".into(),
            ));
        }
        let mut table = FeatureTable::new(headers.iter().skip(2).take(n - 3).map(str::to_string).collect());
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != n {
                return Err(Error::Malformed(format!("row {} has {} fields", k + 2, rec.len())));
            }
            let start = rec[1]
                .parse::<u64>()
                .map_err(|_| Error::Malformed(format!("row {}: bad window_start", k + 2)))?;
            let row = (2..n - 1)
                .map(|c| parse_real(&rec[c]).map(|v| v.unwrap_or(f64::NAN)))
                .collect::<Result<_>>()?;
            table.push(&rec[0], start, row, &rec[n - 1]);
        }
        if table.is_empty() {
            return Err(Error::EmptyInput("feature CSV has no rows".into()));
        }
        Ok(table)
    }

    /// Encodes labels and drops rows with a non-finite value; returns the
    /// matrix, the label mapping and the number of dropped rows.
    pub fn to_matrix(&self) -> Result<(FeatureMatrix, LabelMapping, usize)> {
        if self.labels.iter().any(|l| l.is_empty()) {
            return Err(Error::Malformed("feature CSV has unlabeled rows".into()));
        }
        let (encoded, mapping) = encode_labels(&self.labels)?;
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (row, y) in self.rows.iter().zip(encoded) {
            if row.iter().all(|v| v.is_finite()) {
                rows.push(row.clone());
                labels.push(y);
            }
        }
        let dropped = self.rows.len() - rows.len();
        if dropped > 0 {
            log::warn!("dropped {dropped} feature rows with undefined values");
        }
        Ok((FeatureMatrix::new(self.names.clone(), rows, labels)?, mapping, dropped))
    }
}
