use entropy_kit::data::numbered_alphabet;
use entropy_kit::eval::{repeated_holdout, EvalProtocol, LogRegConfig, ModelSpec};
use entropy_kit::extract::{extract_events, extract_signals, EventSettings, MarkovFeature};
use entropy_kit::io::*;
use entropy_kit::sigent::{EntropyParams, SignalFeature};
use entropy_kit::synth::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn signal_rows(a: SignalSpec, b: SignalSpec, per_class: usize) -> Vec<SignalRow> {
    gen_labeled_corpus(&a, &b, per_class)
        .unwrap()
        .into_iter()
        .map(|s| SignalRow {
            id: s.id,
            label: Some(s.label.to_string()),
            signal: s.signal,
        })
        .collect()
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt())
}

#[test]
fn sine_and_noise_apen_separate() {
    let sine = SignalSpec::new(
        SignalKind::Sine {
            amplitude: 1.0,
            frequency: 0.02,
            phase: 0.0,
        },
        500,
        1,
    )
    .with_noise(0.05);
    let noise = SignalSpec::new(SignalKind::WhiteNoise, 500, 2);
    let rows = signal_rows(sine, noise, 15);
    let table = extract_signals(&rows, &[SignalFeature::ApEn], &EntropyParams::default()).unwrap();
    let by_class = |c: &str| -> Vec<f64> {
        table
            .rows
            .iter()
            .zip(&table.labels)
            .filter(|(_, l)| l.as_str() == c)
            .map(|(r, _)| r[0])
            .collect()
    };
    let (m0, s0) = mean_sd(&by_class("0"));
    let (m1, s1) = mean_sd(&by_class("1"));
    let pooled = ((s0 * s0 + s1 * s1) / 2.0).sqrt();
    assert!((m1 - m0) > 3.0 * pooled, "{m0} {m1} {pooled}");
}

#[test]
fn identical_classes_score_near_chance() {
    let spec = SignalSpec::new(SignalKind::Ar1 { coef: 0.7 }, 200, 3);
    let rows = signal_rows(spec, spec.with_seed(1_000_000), 60);
    let table = extract_signals(&rows, &[SignalFeature::ApEn, SignalFeature::PhEn], &EntropyParams::default()).unwrap();
    let (m, _, _) = table.to_matrix().unwrap();
    let report = repeated_holdout(&m, &ModelSpec::LogReg(LogRegConfig::default()), &EvalProtocol::default()).unwrap();
    assert!((report.accuracy().mean - 0.5).abs() < 0.1);
}

#[test]
fn ep_feature_separates_reversible_from_ring() {
    let reversible = DMatrix::from_row_slice(3, 3, &[0.5, 0.3, 0.2, 0.3, 0.4, 0.3, 0.2, 0.3, 0.5]);
    let ring = DMatrix::from_fn(3, 3, |i, j| match (j + 3 - i) % 3 {
        1 => 0.7,
        2 => 0.2,
        _ => 0.1,
    });
    let corpus = gen_chain_corpus(&ChainSpec::new(reversible, 501, 1), &ChainSpec::new(ring, 501, 9_999), 10).unwrap();
    let table = EventTable {
        alphabet: numbered_alphabet(3),
        series: corpus
            .into_iter()
            .map(|c| EventSeries {
                id: c.id,
                events: trajectory_to_events(&c.trajectory, 0, 60),
                label: Some(c.label.to_string()),
            })
            .collect(),
    };
    let mut settings = EventSettings::new(60, 500);
    settings.features = vec![MarkovFeature::Ep];
    let out = extract_events(&table, &settings).unwrap();
    let ep = |label: &str| -> Vec<f64> {
        out.rows
            .iter()
            .zip(&out.labels)
            .filter(|(_, l)| l.as_str() == label)
            .map(|(r, _)| r[0])
            .collect()
    };
    let rev = ep("0");
    let irr = ep("1");
    let worst_ring = irr.iter().cloned().fold(f64::INFINITY, f64::min);
    let best_rev = rev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(worst_ring > best_rev, "{rev:?} {irr:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn feature_table_round_trips(values in prop::collection::vec(prop::collection::vec(-1e6..1e6f64, 3), 1..20)) {
        let mut t = FeatureTable::new(vec!["a".into(), "b".into(), "c".into()]);
        for (k, row) in values.iter().enumerate() {
            t.push(format!("r{k}"), k as u64 * 10, row.clone(), if k % 2 == 0 { "x" } else { "y" });
        }
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        let back = FeatureTable::read(buf.as_slice()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn event_table_round_trips(states in prop::collection::vec(0usize..4, 1..60), seed in any::<u64>()) {
        let traj = entropy_kit::data::StateTrajectory::from_indices(4, states).unwrap();
        let table = EventTable {
            alphabet: numbered_alphabet(4),
            series: vec![EventSeries { id: format!("s{seed}"), events: trajectory_to_events(&traj, seed % 1000, 30), label: None }],
        };
        let mut buf = Vec::new();
        write_events(&table, &mut buf).unwrap();
        let back = read_events(buf.as_slice()).unwrap();
        let used: std::collections::BTreeSet<usize> = traj.states().iter().copied().collect();
        // only states that occur are recoverable from the file
        prop_assert_eq!(back.alphabet.len(), used.len());
        let names: Vec<&str> = back.series[0].events.iter().map(|e| back.alphabet[e.state].as_str()).collect();
        let expected: Vec<String> = traj.states().iter().map(|&s| s.to_string()).collect();
        prop_assert_eq!(names, expected.iter().map(String::as_str).collect::<Vec<_>>());
    }
}
