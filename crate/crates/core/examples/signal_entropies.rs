//! Every signal entropy on a sine, a noisy AR(1) process, white noise and the
//! chaotic logistic map.

use entropy_kit::sigent::{EntropyParams, SignalFeature};
use entropy_kit::synth::{gen_signal, SignalKind, SignalSpec};

fn main() -> entropy_kit::Result<()> {
    let params = EntropyParams::default();
    let signals = [
        ("sine", SignalKind::Sine { amplitude: 1.0, frequency: 0.03, phase: 0.0 }),
        ("ar1 0.8", SignalKind::Ar1 { coef: 0.8 }),
        ("white", SignalKind::WhiteNoise),
        ("logistic", SignalKind::LogisticMap { r: 3.9, x0: 0.2 }),
    ];
    print!("{:10}", "");
    for f in SignalFeature::ALL {
        print!("{:>9}", f.name());
    }
    println!();
    for (name, kind) in signals {
        let s = gen_signal(&SignalSpec::new(kind, 1000, 7))?;
        print!("{name:10}");
        for f in SignalFeature::ALL {
            match f.compute(s.values(), &params) {
                Ok(v) => print!("{v:9.4}"),
                Err(_) => print!("{:>9}", "-"),
            }
        }
        println!();
    }
    Ok(())
}
