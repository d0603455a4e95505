//! Trains the entropy-production estimator on a biased 3-state ring and on a
//! reversible chain, and compares both with the analytic value.

use std::time::Instant;

use entropy_kit::markov::{analytic_entropy_production, stationary_distribution};
use entropy_kit::neep::{train_neep, TrainConfig};
use entropy_kit::synth::{gen_chain, parse_matrix, ChainSpec};

fn main() -> entropy_kit::Result<()> {
    let chains = [
        ("biased ring", "0.1 0.7 0.2; 0.2 0.1 0.7; 0.7 0.2 0.1"),
        ("reversible", "0.5 0.3 0.2; 0.3 0.4 0.3; 0.2 0.3 0.5"),
    ];
    let config = TrainConfig::default();
    for (name, spec) in chains {
        let t = parse_matrix(spec)?;
        let pi = stationary_distribution(&t, None)?.pi;
        let sigma = analytic_entropy_production(&pi, &t)?.sigma;
        let traj = gen_chain(&ChainSpec::new(t, 100_000, 1))?;
        let start = Instant::now();
        let fit = train_neep(&traj, &config)?;
        println!(
            "{name:12} analytic {sigma:.6}  estimate {:.6}  final J/step {:.6}  ({:.1?})",
            fit.estimate()?,
            fit.curve.last().unwrap(),
            start.elapsed()
        );
    }
    Ok(())
}
