//! Repeated stratified holdout of logistic regression and a small MLP on two
//! overlapping Gaussian classes and on a ring-shaped problem.

use entropy_kit::eval::{repeated_holdout, EvalProtocol, LogRegConfig, MlpConfig, ModelSpec};
use entropy_kit::rng::Rng;
use entropy_kit::select::FeatureMatrix;

fn blobs(rng: &mut Rng) -> (Vec<Vec<f64>>, Vec<u8>) {
    (0..300)
        .map(|i| {
            let y = (i % 2) as u8;
            let c = 1.5 * y as f64;
            (vec![c + rng.normal(), c + rng.normal()], y)
        })
        .unzip()
}

fn rings(rng: &mut Rng) -> (Vec<Vec<f64>>, Vec<u8>) {
    (0..300)
        .map(|i| {
            let y = (i % 2) as u8;
            let r = 1.0 + 1.5 * y as f64 + 0.2 * rng.normal();
            let a = 2.0 * std::f64::consts::PI * rng.uniform();
            (vec![r * a.cos(), r * a.sin()], y)
        })
        .unzip()
}

fn main() -> entropy_kit::Result<()> {
    let mut rng = Rng::new(9);
    let models = [
        ModelSpec::LogReg(LogRegConfig::default()),
        ModelSpec::Mlp(MlpConfig {
            hidden: vec![16],
            epochs: 200,
            ..MlpConfig::default()
        }),
    ];
    let protocol = EvalProtocol {
        repeats: 10,
        ..EvalProtocol::default()
    };
    for (name, (rows, labels)) in [("blobs", blobs(&mut rng)), ("rings", rings(&mut rng))] {
        let m = FeatureMatrix::new(vec!["x".into(), "y".into()], rows, labels)?;
        for model in &models {
            let report = repeated_holdout(&m, model, &protocol)?;
            let (acc, auc) = (report.accuracy(), report.auc());
            println!(
                "{name:6} {:7} accuracy {:.3} +- {:.3}  auc {:.3}",
                report.model, acc.mean, acc.std, auc.mean
            );
        }
    }
    Ok(())
}
