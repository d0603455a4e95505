//! The `entropy-kit` commands, callable from the binary or from tests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{InputKind, RunConfig};
use crate::data::resample_events;
use crate::error::{invalid, Error, Result};
use crate::eval::repeated_holdout;
use crate::extract::{extract_events, extract_signals};
use crate::io::{format_real, read_events, read_signals, write_events, write_signals, EventSeries, EventTable, FeatureTable, SignalRow};
use crate::neep::train_neep;
use crate::select::select_features;
use crate::synth::{gen_chain, gen_chain_corpus, gen_labeled_corpus, parse_matrix, trajectory_to_events, ChainSpec, SignalKind, SignalSpec};

/// Environment variable that overrides the worker count.
pub const THREADS_ENV: &str = "ENTROPY_KIT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Extract,
    Select,
    Eval,
    Neep,
    Synth,
}

/// Process exit status for each error class.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } => 3,
        Error::Io(_) => 4,
        Error::Malformed(_) | Error::Csv(_) | Error::EmptyInput(_) | Error::EmptySeries => 5,
        Error::UnknownFeature(_) => 6,
        Error::WindowTooLarge { .. } => 7,
        Error::Diverged { .. } => 8,
        Error::SingleClass | Error::BinaryOnly(_) => 9,
        _ => 10,
    }
}

/// Worker count: `ENTROPY_KIT_THREADS`, then the config, then all cores.
pub fn thread_count(config: &RunConfig) -> Result<usize> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| invalid(format!("{THREADS_ENV} must be a positive integer")));
    }
    Ok(config.threads()?.unwrap_or(0))
}

/// Files written by a command, plus a line for stdout when it has a headline result.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub message: Option<String>,
}

impl From<Vec<PathBuf>> for RunOutput {
    fn from(files: Vec<PathBuf>) -> Self {
        RunOutput { files, message: None }
    }
}

/// Runs a command inside a worker pool.
pub fn run(command: Command, config: &RunConfig, out: &Path) -> Result<RunOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(config)?)
        .build()
        .map_err(|e| invalid(e.to_string()))?;
    pool.install(|| match command {
        Command::Extract => cmd_extract(config, out).map(RunOutput::from),
        Command::Select => cmd_select(config, out).map(RunOutput::from),
        Command::Eval => cmd_eval(config, out).map(RunOutput::from),
        Command::Neep => cmd_neep(config, out),
        Command::Synth => cmd_synth(config, out).map(RunOutput::from),
    })
}

/// Renders every output to memory first so a failure leaves no partial files.
fn write_all(out: &Path, files: Vec<(&str, Vec<u8>)>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    files
        .into_iter()
        .map(|(name, bytes)| {
            let path = out.join(name);
            fs::write(&path, bytes)?;
            Ok(path)
        })
        .collect()
}

fn render(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

/// Features from the configured input, extracting first when the input is
/// raw events or signals.
pub fn load_features(config: &RunConfig) -> Result<FeatureTable> {
    let (kind, path) = config.input()?;
    let file = open(&path)?;
    match kind {
        InputKind::Features => FeatureTable::read(file),
        InputKind::Events => extract_events(&read_events(file)?, &config.event_settings()?),
        InputKind::Signals => extract_signals(
            &read_signals(file)?,
            &config.signal_features()?,
            &config.entropy_params()?,
        ),
    }
}

pub fn cmd_extract(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let (kind, _) = config.input()?;
    if kind == InputKind::Features {
        return Err(Error::Config {
            line: 0,
            msg: "extract needs events or signals input".into(),
        });
    }
    let table = load_features(config)?;
    write_all(out, vec![("features.csv", render(|b| table.write(b))?)])
}

pub fn cmd_select(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let (matrix, _, _) = load_features(config)?.to_matrix()?;
    let report = select_features(&matrix, config.selection()?)?;
    write_all(
        out,
        vec![
            ("selection_scores.csv", render(|b| report.write_scores(b))?),
            ("selection_pearson.csv", render(|b| report.write_pearson(b))?),
            ("selection_rationale.txt", report.rationale().into_bytes()),
        ],
    )
}

pub fn cmd_eval(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let (mut matrix, mapping, dropped) = load_features(config)?.to_matrix()?;
    if let Some(names) = config.eval_features() {
        matrix = matrix.subset(&names)?;
    }
    let report = repeated_holdout(&matrix, &config.model_spec()?, &config.protocol()?)?;
    let mut summary = report.summary_text();
    summary.push_str(&format!(
        "labels: {} = 0, {} = 1\nrows dropped for undefined features: {dropped}\n",
        mapping.negative, mapping.positive
    ));
    write_all(
        out,
        vec![
            ("eval_report.csv", render(|b| report.write_csv(b))?),
            ("eval_repeats.csv", render(|b| report.write_repeats_csv(b))?),
            ("eval_summary.txt", summary.into_bytes()),
        ],
    )
}

/// Picks the configured series, or the only one.
fn neep_series(table: &EventTable, wanted: Option<&str>) -> Result<EventSeries> {
    match wanted {
        Some(id) => table
            .series
            .iter()
            .find(|s| s.id == id)
            .cloned()
            .ok_or_else(|| Error::Malformed(format!("no series with id {id:?}"))),
        None if table.series.len() == 1 => Ok(table.series[0].clone()),
        None => Err(Error::Config {
            line: 0,
            msg: "several series in input; set [input] series".into(),
        }),
    }
}

/// Trains NEEP; the message is the per-step EP estimate.
pub fn cmd_neep(config: &RunConfig, out: &Path) -> Result<RunOutput> {
    let (kind, path) = config.input()?;
    if kind != InputKind::Events {
        return Err(Error::Config {
            line: 0,
            msg: "neep needs events input".into(),
        });
    }
    let table = read_events(open(&path)?)?;
    let series = neep_series(&table, config.raw("input", "series"))?;
    let bin = config.event_settings().map(|s| s.bin_seconds).or_else(|_| {
        config
            .raw("window", "bin_seconds")
            .and_then(|v| v.parse::<u64>().ok())
            .filter(|&b| b > 0)
            .ok_or_else(|| Error::Config {
                line: 0,
                msg: "missing required key [window] bin_seconds".into(),
            })
    })?;
    let traj = resample_events(&series.events, table.alphabet.clone(), bin, None)?;
    let cfg = config.neep_config()?;
    let fit = train_neep(&traj, &cfg)?;
    let ep = fit.estimate()?;
    let curve = render(|b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["epoch", "objective_per_step"])?;
        for (k, j) in fit.curve.iter().enumerate() {
            w.write_record([(k + 1).to_string(), format_real(*j)])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let evaluated = fit.holdout.as_ref().unwrap_or(&fit.train);
    let summary = format!(
        "series: {}\nstates: {}\nbins: {}\nevaluated on: {} ({} transitions)\nep_per_step: {}\nep_total: {}\n",
        series.id,
        traj.n_states(),
        traj.len(),
        if fit.holdout.is_some() { "holdout" } else { "training trajectory" },
        evaluated.len() - 1,
        format_real(ep),
        format_real(ep * (evaluated.len() - 1) as f64),
    );
    let files = write_all(
        out,
        vec![
            ("neep_model.bin", render(|b| fit.model.write_to(b))?),
            ("neep_curve.csv", curve),
            ("neep_summary.txt", summary.into_bytes()),
        ],
    )?;
    Ok(RunOutput {
        files,
        message: Some(format_real(ep)),
    })
}

/// State names that sort in index order.
fn state_names(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("s{i:0width$}")).collect()
}

fn synth_err(line: usize, e: impl std::fmt::Display) -> Error {
    Error::Config {
        line,
        msg: e.to_string(),
    }
}

fn synth_matrix(config: &RunConfig, key: &str) -> Result<nalgebra::DMatrix<f64>> {
    let (text, line) = config.synth_required(key)?;
    parse_matrix(&text)
        .and_then(|t| crate::markov::check_stochastic(&t).map(|_| t))
        .map_err(|e| synth_err(line, format!("{key}: {e}")))
}

/// `sine amplitude=1 frequency=0.05`, `ar1 coef=0.9`, `white`, ...
pub fn parse_signal_kind(text: &str) -> std::result::Result<SignalKind, String> {
    let mut tokens = text.split_whitespace();
    let name = tokens.next().ok_or("empty signal spec")?.to_ascii_lowercase();
    let mut params = std::collections::BTreeMap::new();
    for t in tokens {
        let (k, v) = t.split_once('=').ok_or(format!("expected name=value, got {t:?}"))?;
        let v: f64 = v.parse().map_err(|_| format!("bad number in {t:?}"))?;
        params.insert(k.to_ascii_lowercase(), v);
    }
    let mut take = |k: &str, default: Option<f64>| {
        params
            .remove(k)
            .or(default)
            .ok_or(format!("{name} needs {k}="))
    };
    let kind = match name.as_str() {
        "constant" => SignalKind::Constant { value: take("value", Some(0.0))? },
        "ramp" => SignalKind::Ramp {
            slope: take("slope", Some(1.0))?,
            intercept: take("intercept", Some(0.0))?,
        },
        "sine" => SignalKind::Sine {
            amplitude: take("amplitude", Some(1.0))?,
            frequency: take("frequency", None)?,
            phase: take("phase", Some(0.0))?,
        },
        "ar1" => SignalKind::Ar1 { coef: take("coef", None)? },
        "white" => SignalKind::WhiteNoise,
        "logistic" => SignalKind::LogisticMap {
            r: take("r", Some(4.0))?,
            x0: take("x0", Some(0.4))?,
        },
        other => return Err(format!("unknown signal kind {other:?}")),
    };
    if let Some(k) = params.keys().next() {
        return Err(format!("unknown parameter {k:?} for {name}"));
    }
    Ok(kind)
}

fn synth_signal(config: &RunConfig, key: &str, noise_key: &str, length: usize, seed: u64) -> Result<SignalSpec> {
    let (text, line) = config.synth_required(key)?;
    let kind = parse_signal_kind(&text).map_err(|e| synth_err(line, format!("{key}: {e}")))?;
    let noise = config.synth_value::<f64>(noise_key)?.unwrap_or(0.0);
    Ok(SignalSpec::new(kind, length, seed).with_noise(noise))
}

pub fn cmd_synth(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let (kind, kind_line) = config.synth_required("kind")?;
    let seed = config.seed()?;
    let length: usize = config.synth_value("length")?.unwrap_or(1000);
    let step: u64 = config.synth_value("step_seconds")?.unwrap_or(60);
    let start: u64 = config.synth_value("start")?.unwrap_or(0);
    let per_class: usize = config.synth_value("per_class")?.unwrap_or(50);
    let chain_labels = kind == "chain_corpus";
    let label_a = config
        .synth_raw("label_a")
        .map_or(if chain_labels { "stable" } else { "0" }.to_string(), |v| v.0);
    let label_b = config
        .synth_raw("label_b")
        .map_or(if chain_labels { "changed" } else { "1" }.to_string(), |v| v.0);
    match kind.as_str() {
        "chain" => {
            let t = synth_matrix(config, "transition")?;
            let mut spec = ChainSpec::new(t.clone(), length, seed);
            if let Some((pos, line)) = config.synth_raw("change_point") {
                let pos = pos.parse().map_err(|_| synth_err(line, "change_point: not an integer"))?;
                spec = spec.with_change_point(pos, synth_matrix(config, "change_transition")?);
            }
            let traj = gen_chain(&spec).map_err(|e| synth_err(kind_line, e))?;
            let table = EventTable {
                alphabet: state_names(t.nrows()),
                series: vec![EventSeries {
                    id: "chain".into(),
                    events: trajectory_to_events(&traj, start, step),
                    label: None,
                }],
            };
            write_all(out, vec![("events.csv", render(|b| write_events(&table, b))?)])
        }
        "chain_corpus" => {
            let ta = synth_matrix(config, "transition")?;
            let tb = match config.synth_raw("transition_b") {
                Some(_) => synth_matrix(config, "transition_b")?,
                None => ta.clone(),
            };
            let a = ChainSpec::new(ta.clone(), length, seed);
            let mut b = ChainSpec::new(tb, length, seed.wrapping_add(1 << 32));
            if let Some((pos, line)) = config.synth_raw("change_point") {
                let pos = pos.parse().map_err(|_| synth_err(line, "change_point: not an integer"))?;
                b = b.with_change_point(pos, synth_matrix(config, "change_transition")?);
            }
            let corpus = gen_chain_corpus(&a, &b, per_class).map_err(|e| synth_err(kind_line, e))?;
            let table = EventTable {
                alphabet: state_names(ta.nrows()),
                series: corpus
                    .into_iter()
                    .map(|c| EventSeries {
                        id: c.id,
                        events: trajectory_to_events(&c.trajectory, start, step),
                        label: Some(if c.label == 0 { label_a.clone() } else { label_b.clone() }),
                    })
                    .collect(),
            };
            write_all(out, vec![("events.csv", render(|b| write_events(&table, b))?)])
        }
        "signal_corpus" => {
            let a = synth_signal(config, "signal_a", "noise_a", length, seed)?;
            let b = synth_signal(config, "signal_b", "noise_b", length, seed.wrapping_add(1 << 32))?;
            let corpus = gen_labeled_corpus(&a, &b, per_class).map_err(|e| synth_err(kind_line, e))?;
            let rows: Vec<SignalRow> = corpus
                .into_iter()
                .map(|s| SignalRow {
                    id: s.id,
                    label: Some(if s.label == 0 { label_a.clone() } else { label_b.clone() }),
                    signal: s.signal,
                })
                .collect();
            write_all(out, vec![("signals.csv", render(|b| write_signals(&rows, b))?)])
        }
        other => Err(synth_err(
            kind_line,
            format!("unknown synth kind {other:?}; use chain, chain_corpus or signal_corpus"),
        )),
    }
}

/// Prints a short line per written file.
pub fn report_outputs<W: Write>(mut w: W, files: &[PathBuf]) -> std::io::Result<()> {
    for f in files {
        writeln!(w, "wrote {}", f.display())?;
    }
    Ok(())
}
