//! Mutual-information ranking with a correlation cap on a table that holds
//! two informative features, a near copy of one of them and pure noise.

use entropy_kit::rng::Rng;
use entropy_kit::select::{select_features, FeatureMatrix, SelectionConfig};

fn main() -> entropy_kit::Result<()> {
    let mut rng = Rng::new(5);
    let n = 600;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let y = (i % 2) as u8;
        let strong = y as f64 + 0.4 * rng.normal();
        let weak = 0.5 * y as f64 + rng.normal();
        rows.push(vec![strong, strong + 0.01 * rng.normal(), weak, rng.normal(), rng.normal()]);
        labels.push(y);
    }
    let names = ["strong", "strong_echo", "weak", "noise_a", "noise_b"].map(String::from).to_vec();
    let matrix = FeatureMatrix::new(names, rows, labels)?;
    let report = select_features(&matrix, SelectionConfig { k: 3, tau: 0.9, bins: 10 })?;
    print!("{}", report.rationale());
    Ok(())
}
