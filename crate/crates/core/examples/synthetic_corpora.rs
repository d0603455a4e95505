//! Builds a labeled chain corpus and a labeled signal corpus and writes both
//! in the CSV formats the command line reads.

use entropy_kit::data::numbered_alphabet;
use entropy_kit::io::{write_events, write_signals, EventSeries, EventTable, SignalRow};
use entropy_kit::synth::{gen_chain_corpus, gen_labeled_corpus, parse_matrix, trajectory_to_events, ChainSpec, SignalKind, SignalSpec};

fn main() -> entropy_kit::Result<()> {
    let stable = ChainSpec::new(parse_matrix("0.8 0.1 0.1; 0.1 0.8 0.1; 0.1 0.1 0.8")?, 48, 1);
    let busy = ChainSpec::new(parse_matrix("0.2 0.4 0.4; 0.4 0.2 0.4; 0.4 0.4 0.2")?, 48, 100);
    let chains = gen_chain_corpus(&stable, &busy, 2)?;
    let table = EventTable {
        alphabet: numbered_alphabet(3),
        series: chains
            .into_iter()
            .map(|c| EventSeries {
                id: c.id,
                events: trajectory_to_events(&c.trajectory, 0, 1800),
                label: Some(c.label.to_string()),
            })
            .collect(),
    };
    let mut events = Vec::new();
    write_events(&table, &mut events)?;
    let text = String::from_utf8_lossy(&events);
    for line in text.lines().take(6) {
        println!("{line}");
    }
    println!("... {} event lines\n", text.lines().count() - 1);

    let a = SignalSpec::new(SignalKind::Sine { amplitude: 1.0, frequency: 0.1, phase: 0.0 }, 8, 1).with_noise(0.1);
    let b = SignalSpec::new(SignalKind::Ar1 { coef: 0.6 }, 8, 2);
    let rows: Vec<SignalRow> = gen_labeled_corpus(&a, &b, 2)?
        .into_iter()
        .map(|s| SignalRow {
            id: s.id,
            label: Some(s.label.to_string()),
            signal: s.signal,
        })
        .collect();
    let mut signals = Vec::new();
    write_signals(&rows, &mut signals)?;
    print!("{}", String::from_utf8_lossy(&signals));
    Ok(())
}
