//! Mutual-information ranking with correlation-capped greedy selection.

use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::io::format_real;
use crate::markov::pearson_matrix;

/// Named feature columns with binary labels, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    names: Vec<String>,
    rows: Vec<Vec<f64>>,
    labels: Vec<u8>,
}

impl FeatureMatrix {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(invalid(format!("duplicate feature name {dup}")));
        }
        for row in &rows {
            if row.len() != names.len() {
                return Err(Error::DimensionMismatch {
                    expected: names.len(),
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(invalid("feature values must be finite"));
            }
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(invalid("labels must be 0 or 1"));
        }
        Ok(FeatureMatrix {
            names,
            rows,
            labels,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Keeps the named columns, in the given order.
    pub fn subset<S: AsRef<str>>(&self, names: &[S]) -> Result<FeatureMatrix> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.index_of(n.as_ref())
                    .ok_or_else(|| Error::UnknownFeature(n.as_ref().to_string()))
            })
            .collect::<Result<_>>()?;
        FeatureMatrix::new(
            idx.iter().map(|&j| self.names[j].clone()).collect(),
            self.rows
                .iter()
                .map(|r| idx.iter().map(|&j| r[j]).collect())
                .collect(),
            self.labels.clone(),
        )
    }
}

/// Plug-in mutual information (nats) between a feature cut into `bins`
/// equal-frequency bins and a binary label.
///
/// Sample at sorted position `r` (stable sort, so ties keep input order) goes
/// to bin `floor(r * bins / n)`.
pub fn mutual_information(values: &[f64], labels: &[u8], bins: usize) -> Result<f64> {
    let n = values.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    if bins == 0 {
        return Err(invalid("bin count must be positive"));
    }
    if n < 2 * bins {
        return Err(invalid(format!("need at least {} samples for {bins} bins", 2 * bins)));
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(invalid("labels must be 0 or 1"));
    }
    let positives = labels.iter().filter(|&&l| l == 1).count();
    if positives == 0 || positives == n {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut joint = vec![[0usize; 2]; bins];
    for (r, &i) in order.iter().enumerate() {
        joint[r * bins / n][labels[i] as usize] += 1;
    }
    let nf = n as f64;
    let py = [(n - positives) as f64 / nf, positives as f64 / nf];
    let mut mi = 0.0;
    for cell in &joint {
        let pb = (cell[0] + cell[1]) as f64 / nf;
        for y in 0..2 {
            if cell[y] > 0 {
                let p = cell[y] as f64 / nf;
                mi += p * (p / (pb * py[y])).ln();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Pearson correlation between feature columns.
pub fn feature_pearson_matrix(matrix: &FeatureMatrix) -> Result<DMatrix<f64>> {
    if matrix.n_rows() < 2 {
        return Err(invalid("need at least two rows"));
    }
    match matrix.n_features() {
        0 => Ok(DMatrix::zeros(0, 0)),
        1 => Ok(DMatrix::identity(1, 1)),
        p => {
            let cols: Vec<Vec<f64>> = (0..p).map(|j| matrix.column(j)).collect();
            pearson_matrix(&cols)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub k: usize,
    pub tau: f64,
    pub bins: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            k: 4,
            tau: 0.9,
            bins: 10,
        }
    }
}

/// A feature dropped because it correlates too strongly with one already kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub feature: String,
    pub blocker: String,
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub names: Vec<String>,
    pub mi: Vec<f64>,
    pub pearson: DMatrix<f64>,
    /// Feature indices by MI descending, ties by name.
    pub ranking: Vec<usize>,
    /// Accepted names in acceptance order.
    pub selected: Vec<String>,
    pub rejections: Vec<Rejection>,
    pub config: SelectionConfig,
}

impl SelectionReport {
    /// True when fewer than `k` features could be accepted.
    pub fn is_partial(&self) -> bool {
        self.selected.len() < self.config.k
    }

    /// `rank,feature,mi,selected`
    pub fn write_scores<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["rank", "feature", "mi", "selected"])?;
        for (rank, &j) in self.ranking.iter().enumerate() {
            let name = &self.names[j];
            let sel = self.selected.contains(name);
            out.write_record([
                (rank + 1).to_string(),
                name.clone(),
                format_real(self.mi[j]),
                (sel as u8).to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Square matrix with a leading `feature` column.
    pub fn write_pearson<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["feature".to_string()];
        header.extend(self.names.iter().cloned());
        out.write_record(&header)?;
        for (i, name) in self.names.iter().enumerate() {
            let mut rec = vec![name.clone()];
            rec.extend(self.pearson.row(i).iter().map(|&v| format_real(v)));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Human-readable account of each decision.
    pub fn rationale(&self) -> String {
        let mut s = format!(
            "selection: k = {}, tau = {}, bins = {}\n",
            self.config.k, self.config.tau, self.config.bins
        );
        for &j in &self.ranking {
            let name = &self.names[j];
            let mi = self.mi[j];
            if self.selected.contains(name) {
                s.push_str(&format!("accept {name} (mi {mi:.6})\n"));
            } else if let Some(r) = self.rejections.iter().find(|r| &r.feature == name) {
                s.push_str(&format!(
                    "reject {name} (mi {mi:.6}): |r| = {:.6} with {} >= tau\n",
                    r.correlation.abs(),
                    r.blocker
                ));
            } else {
                s.push_str(&format!("skip {name} (mi {mi:.6}): k reached\n"));
            }
        }
        if self.is_partial() {
            s.push_str(&format!(
                "partial: only {} of {} requested features accepted\n",
                self.selected.len(),
                self.config.k
            ));
        }
        s.push_str(&format!("selected: {}\n", self.selected.join(", ")));
        s
    }
}

/// Ranks features by MI and greedily accepts those whose absolute correlation
/// with every accepted feature stays below `tau`, up to `k`.
pub fn select_features(matrix: &FeatureMatrix, config: SelectionConfig) -> Result<SelectionReport> {
    let p = matrix.n_features();
    if config.k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if !(config.tau > 0.0 && config.tau <= 1.0) {
        return Err(invalid("tau must lie in (0, 1]"));
    }
    let mi: Vec<f64> = (0..p)
        .into_par_iter()
        .map(|j| mutual_information(&matrix.column(j), matrix.labels(), config.bins))
        .collect::<Result<_>>()?;
    let pearson = feature_pearson_matrix(matrix)?;
    let names = matrix.names().to_vec();
    let mut ranking: Vec<usize> = (0..p).collect();
    ranking.sort_by(|&a, &b| mi[b].total_cmp(&mi[a]).then_with(|| names[a].cmp(&names[b])));

    let mut accepted: Vec<usize> = Vec::new();
    let mut rejections = Vec::new();
    for &j in &ranking {
        if accepted.len() == config.k {
            break;
        }
        match accepted.iter().find(|&&a| pearson[(j, a)].abs() >= config.tau) {
            Some(&a) => rejections.push(Rejection {
                feature: names[j].clone(),
                blocker: names[a].clone(),
                correlation: pearson[(j, a)],
            }),
            None => accepted.push(j),
        }
    }
    let report = SelectionReport {
        selected: accepted.iter().map(|&j| names[j].clone()).collect(),
        names,
        mi,
        pearson,
        ranking,
        rejections,
        config,
    };
    if report.is_partial() {
        log::warn!(
            "only {} of {} features passed the correlation cap",
            report.selected.len(),
            config.k
        );
    }
    Ok(report)
}
