//! Line-oriented run configuration: `key = value` pairs under `[section]`
//! headers, `#` comments, and optional named presets.
//!
//! ```text
//! preset = esrd
//! seed = 7
//!
//! [input]
//! kind = signals
//! path = data/esrd.csv
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::data::Timezone;
use crate::error::{Error, Result};
use crate::eval::{EvalProtocol, LogRegConfig, MlpConfig, ModelSpec};
use crate::extract::{EventSettings, MarkovFeature};
use crate::neep::TrainConfig;
use crate::select::SelectionConfig;
use crate::sigent::{ApEnMode, EntropyParams, SignalFeature, Tolerance};

const KEYS: &[(&str, &[&str])] = &[
    ("", &["preset", "seed", "threads", "out"]),
    ("input", &["kind", "path", "series"]),
    (
        "window",
        &["bin_seconds", "tw1", "tw2", "stride", "window_days", "timezone", "day_night"],
    ),
    (
        "features",
        &[
            "names", "m", "r", "r_absolute", "apen_mode", "classes", "delay", "sectors", "slope_m",
            "gamma", "delta", "resolution", "fuzzy_power",
        ],
    ),
    ("select", &["k", "tau", "bins"]),
    (
        "eval",
        &[
            "model", "features", "lr", "epochs", "l2", "balanced", "hidden", "batch_size",
            "test_fraction", "repeats", "standardize", "threshold", "constant",
        ],
    ),
    ("neep", &["lr", "epochs", "batch_size", "hidden", "embed_dim", "holdout", "max_grad_norm"]),
    (
        "synth",
        &[
            "kind", "transition", "transition_b", "change_point", "change_transition", "length",
            "per_class", "step_seconds", "start", "signal_a", "signal_b", "noise_a", "noise_b",
            "label_a", "label_b",
        ],
    ),
];

/// Preset names accepted by `preset = ...`.
pub const PRESETS: [&str; 3] = ["minder-style", "esrd", "ptbdb"];

fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "minder-style" => {
            "[input]\nkind = events\n\
             [window]\nwindow_days = 7\nday_night = true\n\
             [features]\nnames = shannon, entropy_rate, ep, vne_freq, vne_dur, duration_diff\n\
             [eval]\nmodel = logreg\n"
        }
        "esrd" => {
            "[input]\nkind = signals\n\
             [features]\nnames = IncrEn, ApEn, SlopEn, PhEn\n\
             [eval]\nmodel = mlp\nhidden = 64, 64, 64, 64\nepochs = 2000\nbatch_size = 256\nlr = 0.3\n"
        }
        "ptbdb" => {
            "[input]\nkind = signals\n\
             [features]\nnames = PhEn, DispEn, ApEn, FuzzyEn\n\
             [eval]\nmodel = mlp\nhidden = 64, 64, 64, 64\nepochs = 2000\nbatch_size = 256\nlr = 0.3\n"
        }
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    /// 0 for values that came from a preset.
    line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Copy)]
pub enum InputKind {
    Events,
    Signals,
    Features,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    entries: BTreeMap<(String, String), Entry>,
    base_dir: PathBuf,
    seed_override: Option<u64>,
}

fn config_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        msg: msg.into(),
    }
}

fn parse_entries(text: &str, from_preset: bool) -> Result<BTreeMap<(String, String), Entry>> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = if from_preset { 0 } else { k + 1 };
        let line = match raw.find(" #").or_else(|| raw.trim_start().starts_with('#').then_some(0)) {
            Some(0) => "",
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| config_err(line_no, "unterminated section header"))?
                .trim()
                .to_ascii_lowercase();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(config_err(line_no, format!("unknown section [{name}]")));
            }
            section = name;
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(line_no, format!("expected key = value, got {line:?}")))?;
        let key = key.trim().to_ascii_lowercase();
        let allowed = KEYS.iter().find(|(s, _)| *s == section).map_or(&[][..], |(_, k)| k);
        if !allowed.contains(&key.as_str()) {
            let place = if section.is_empty() { "top level".into() } else { format!("[{section}]") };
            return Err(config_err(line_no, format!("unknown key {key:?} in {place}")));
        }
        let entry = Entry {
            value: value.trim().to_string(),
            line: line_no,
        };
        if out.insert((section.clone(), key.clone()), entry).is_some() {
            return Err(config_err(line_no, format!("duplicate key {key:?}")));
        }
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(e: &Entry, key: &str) -> Result<T> {
    e.value
        .parse()
        .map_err(|_| config_err(e.line, format!("{key}: cannot parse {:?}", e.value)))
}

fn parse_bool(e: &Entry, key: &str) -> Result<bool> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(config_err(e.line, format!("{key}: expected true or false"))),
    }
}

fn list(e: &Entry) -> Vec<String> {
    e.value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

impl RunConfig {
    /// Parses config text; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let own = parse_entries(text, false)?;
        let mut entries = match own.get(&(String::new(), "preset".into())) {
            Some(e) => {
                let body = preset_text(&e.value).ok_or_else(|| {
                    config_err(e.line, format!("unknown preset {:?}; known: {}", e.value, PRESETS.join(", ")))
                })?;
                parse_entries(body, true)?
            }
            None => BTreeMap::new(),
        };
        entries.extend(own);
        Ok(RunConfig {
            entries,
            base_dir: base_dir.to_path_buf(),
            seed_override: None,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed_override = seed;
        self
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn num<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        self.get(section, key).map(|e| parse_num(e, key)).transpose()
    }

    fn flag(&self, section: &str, key: &str) -> Result<Option<bool>> {
        self.get(section, key).map(|e| parse_bool(e, key)).transpose()
    }

    fn required(&self, section: &str, key: &str) -> Result<&Entry> {
        self.get(section, key)
            .ok_or_else(|| config_err(0, format!("missing required key [{section}] {key}")))
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.get(section, key).map(|e| e.value.as_str())
    }

    pub fn seed(&self) -> Result<u64> {
        match self.seed_override {
            Some(s) => Ok(s),
            None => Ok(self.num("", "seed")?.unwrap_or(0)),
        }
    }

    pub fn threads(&self) -> Result<Option<usize>> {
        self.num("", "threads")
    }

    pub fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// `out` from the config, else `out` next to it.
    pub fn out_dir(&self) -> PathBuf {
        self.resolve(self.raw("", "out").unwrap_or("out"))
    }

    pub fn input(&self) -> Result<(InputKind, PathBuf)> {
        let kind_e = self.required("input", "kind")?;
        let kind = match kind_e.value.as_str() {
            "events" => InputKind::Events,
            "signals" => InputKind::Signals,
            "features" => InputKind::Features,
            other => return Err(config_err(kind_e.line, format!("unknown input kind {other:?}"))),
        };
        let path = self.resolve(&self.required("input", "path")?.value);
        Ok((kind, path))
    }

    pub fn event_settings(&self) -> Result<EventSettings> {
        let bin_e = self.required("window", "bin_seconds")?;
        let bin: u64 = parse_num(bin_e, "bin_seconds")?;
        if bin == 0 {
            return Err(config_err(bin_e.line, "bin_seconds must be positive"));
        }
        let tw2 = match (self.num::<usize>("window", "tw2")?, self.num::<u64>("window", "window_days")?) {
            (Some(tw2), _) => tw2,
            (None, Some(days)) => (days * 86_400 / bin) as usize,
            (None, None) => return Err(config_err(0, "set [window] tw2 or window_days")),
        };
        let mut s = EventSettings::new(bin, tw2);
        s.tw1 = self.num("window", "tw1")?.unwrap_or(tw2);
        s.stride = self.num("window", "stride")?.unwrap_or(tw2);
        if let Some(e) = self.get("window", "timezone") {
            s.timezone = Timezone::parse(&e.value).map_err(|err| config_err(e.line, err.to_string()))?;
        }
        s.day_night = self.flag("window", "day_night")?.unwrap_or(false);
        if let Some(e) = self.get("features", "names") {
            s.features = list(e)
                .iter()
                .map(|n| MarkovFeature::parse(n))
                .collect::<Result<_>>()?;
        }
        s.neep = self.neep_config_over(s.neep)?;
        s.validate()?;
        Ok(s)
    }

    pub fn signal_features(&self) -> Result<Vec<SignalFeature>> {
        match self.get("features", "names") {
            Some(e) => list(e).iter().map(|n| SignalFeature::parse(n)).collect(),
            None => Ok(SignalFeature::ALL.to_vec()),
        }
    }

    pub fn entropy_params(&self) -> Result<EntropyParams> {
        let mut p = EntropyParams::default();
        let s = "features";
        if let Some(v) = self.num(s, "m")? {
            p.m = v;
        }
        match (self.num::<f64>(s, "r")?, self.num::<f64>(s, "r_absolute")?) {
            (Some(_), Some(_)) => {
                return Err(config_err(self.get(s, "r_absolute").unwrap().line, "set r or r_absolute, not both"))
            }
            (Some(r), None) => p.tolerance = Tolerance::Relative(r),
            (None, Some(r)) => p.tolerance = Tolerance::Absolute(r),
            (None, None) => {}
        }
        if let Some(e) = self.get(s, "apen_mode") {
            p.apen_mode = match e.value.to_ascii_lowercase().as_str() {
                "standard" => ApEnMode::Standard,
                "literal" => ApEnMode::Literal,
                _ => return Err(config_err(e.line, "apen_mode must be standard or literal")),
            };
        }
        if let Some(v) = self.num(s, "classes")? {
            p.classes = v;
        }
        if let Some(v) = self.num(s, "delay")? {
            p.delay = v;
        }
        if let Some(v) = self.num(s, "sectors")? {
            p.sectors = v;
        }
        if let Some(v) = self.num(s, "slope_m")? {
            p.slope_m = v;
        }
        if let Some(v) = self.num(s, "gamma")? {
            p.gamma = v;
        }
        if let Some(v) = self.num(s, "delta")? {
            p.delta = v;
        }
        if let Some(v) = self.num(s, "resolution")? {
            p.resolution = v;
        }
        if let Some(v) = self.num(s, "fuzzy_power")? {
            p.fuzzy_power = v;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn selection(&self) -> Result<SelectionConfig> {
        let d = SelectionConfig::default();
        Ok(SelectionConfig {
            k: self.num("select", "k")?.unwrap_or(d.k),
            tau: self.num("select", "tau")?.unwrap_or(d.tau),
            bins: self.num("select", "bins")?.unwrap_or(d.bins),
        })
    }

    /// Feature subset for evaluation, if restricted.
    pub fn eval_features(&self) -> Option<Vec<String>> {
        self.get("eval", "features").map(list)
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        let s = "eval";
        let model = self.get(s, "model");
        match model.map_or("logreg", |e| e.value.as_str()) {
            "logreg" => {
                let d = LogRegConfig::default();
                Ok(ModelSpec::LogReg(LogRegConfig {
                    learning_rate: self.num(s, "lr")?.unwrap_or(d.learning_rate),
                    epochs: self.num(s, "epochs")?.unwrap_or(d.epochs),
                    l2: self.num(s, "l2")?.unwrap_or(d.l2),
                    balanced: self.flag(s, "balanced")?.unwrap_or(d.balanced),
                }))
            }
            "mlp" => {
                let d = MlpConfig::default();
                let hidden = match self.get(s, "hidden") {
                    Some(e) => list(e)
                        .iter()
                        .map(|w| w.parse().map_err(|_| config_err(e.line, format!("hidden: bad width {w:?}"))))
                        .collect::<Result<_>>()?,
                    None => d.hidden,
                };
                Ok(ModelSpec::Mlp(MlpConfig {
                    hidden,
                    learning_rate: self.num(s, "lr")?.unwrap_or(d.learning_rate),
                    epochs: self.num(s, "epochs")?.unwrap_or(d.epochs),
                    batch_size: self.num(s, "batch_size")?.unwrap_or(d.batch_size),
                    seed: self.seed()?,
                }))
            }
            "constant" => Ok(ModelSpec::Constant(self.num(s, "constant")?.unwrap_or(0.5))),
            other => Err(config_err(
                model.map_or(0, |e| e.line),
                format!("unknown model {other:?}; use logreg, mlp or constant"),
            )),
        }
    }

    pub fn protocol(&self) -> Result<EvalProtocol> {
        let d = EvalProtocol::default();
        let p = EvalProtocol {
            test_fraction: self.num("eval", "test_fraction")?.unwrap_or(d.test_fraction),
            repeats: self.num("eval", "repeats")?.unwrap_or(d.repeats),
            seed: self.seed()?,
            standardize: self.flag("eval", "standardize")?.unwrap_or(d.standardize),
            threshold: self.num("eval", "threshold")?.unwrap_or(d.threshold),
        };
        p.validate()?;
        Ok(p)
    }

    fn neep_config_over(&self, base: TrainConfig) -> Result<TrainConfig> {
        let s = "neep";
        Ok(TrainConfig {
            learning_rate: self.num(s, "lr")?.unwrap_or(base.learning_rate),
            epochs: self.num(s, "epochs")?.unwrap_or(base.epochs),
            batch_size: self.num(s, "batch_size")?.unwrap_or(base.batch_size),
            seed: self.seed()?,
            hidden: self.num(s, "hidden")?.unwrap_or(base.hidden),
            embed_dim: self.num(s, "embed_dim")?.unwrap_or(base.embed_dim),
            holdout: self.num(s, "holdout")?.unwrap_or(base.holdout),
            max_grad_norm: self.num(s, "max_grad_norm")?.unwrap_or(base.max_grad_norm),
        })
    }

    pub fn neep_config(&self) -> Result<TrainConfig> {
        let c = self.neep_config_over(TrainConfig::default())?;
        c.validate()?;
        Ok(c)
    }

    /// Numeric or string value from `[synth]`.
    pub fn synth_value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.num("synth", key)
    }

    /// Required `[synth]` string with its line number for error reporting.
    pub fn synth_required(&self, key: &str) -> Result<(String, usize)> {
        let e = self.required("synth", key)?;
        Ok((e.value.clone(), e.line))
    }

    pub fn synth_raw(&self, key: &str) -> Option<(String, usize)> {
        self.get("synth", key).map(|e| (e.value.clone(), e.line))
    }
}
