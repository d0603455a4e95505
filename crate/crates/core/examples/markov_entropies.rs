//! Stationary distribution, entropy rate and analytic entropy production of a
//! small chain, then the same quantities estimated from a sampled trajectory.

use entropy_kit::markov::{
    analytic_entropy_production, entropy_rate, estimate_transition_matrix, shannon_entropy, stationary_distribution,
};
use entropy_kit::synth::{gen_chain, parse_matrix, ChainSpec};

fn main() -> entropy_kit::Result<()> {
    let t = parse_matrix("0.9 0.1; 0.5 0.5")?;
    let pi = stationary_distribution(&t, None)?.pi;
    println!("pi            {pi:.6?}");
    println!("shannon H(pi) {:.6}", shannon_entropy(&pi)?);
    println!("entropy rate  {:.6}", entropy_rate(&pi, &t)?);

    let ring = parse_matrix("0.1 0.7 0.2; 0.2 0.1 0.7; 0.7 0.2 0.1")?;
    let ring_pi = stationary_distribution(&ring, None)?.pi;
    let ep = analytic_entropy_production(&ring_pi, &ring)?;
    println!("ring EP       {:.6}", ep.sigma);

    let traj = gen_chain(&ChainSpec::new(ring, 20_000, 3))?;
    let est = estimate_transition_matrix(traj.states(), 3)?;
    let est_pi = stationary_distribution(&est, None)?.pi;
    println!("estimated EP  {:.6}", analytic_entropy_production(&est_pi, &est)?.sigma);
    println!("estimated h   {:.6}", entropy_rate(&est_pi, &est)?);
    Ok(())
}
