//! Von Neumann entropy of daily route vectors: a household with a fixed
//! routine against one whose days are shuffled at random.

use entropy_kit::data::{EventRecord, Timezone};
use entropy_kit::markov::{density_operator, pearson_matrix, vne, vne_mercator, vne_windows, RouteMode};
use entropy_kit::rng::Rng;

const DAY: u64 = 86_400;

fn household(days: u64, noise: f64, seed: u64) -> Vec<EventRecord> {
    let mut rng = Rng::new(seed);
    let routine = [(7, 1), (8, 2), (12, 0), (18, 3), (22, 1)];
    let mut events = Vec::new();
    for d in 0..days {
        for &(hour, state) in &routine {
            let state = if rng.uniform() < noise { rng.below(4) } else { state };
            events.push(EventRecord::new(d * DAY + hour * 3600, state));
        }
    }
    events
}

fn main() -> entropy_kit::Result<()> {
    for (name, noise) in [("routine", 0.05), ("erratic", 0.8)] {
        let events = household(28, noise, 11);
        let windows = vne_windows(&events, 4, 7, RouteMode::Frequency, Timezone::UTC)?;
        let values: Vec<String> = windows.iter().map(|w| format!("{:.4}", w.value)).collect();
        println!("{name:8} weekly VNE {}", values.join(" "));
    }

    // vectors longer than their count keep rho full rank, which the series needs
    let mut rng = Rng::new(2);
    let vectors: Vec<Vec<f64>> = (0..4).map(|_| (0..50).map(|_| rng.normal()).collect()).collect();
    let rho = density_operator(&pearson_matrix(&vectors)?)?;
    println!("eigen route    {:.10}", vne(&rho));
    println!("mercator route {:.10}", vne_mercator(&rho, 5000, 1e-13)?);
    Ok(())
}
