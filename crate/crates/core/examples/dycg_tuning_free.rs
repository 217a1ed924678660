//! DyCG: two Christoffel models of degree 2 and 6, decision by the sign of
//! the score slope. Nothing to tune.
//!
//!     cargo run --release --example dycg_tuning_free

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use dycf::detectors::Dycg;
use dycf::moments::MomentConfig;
use dycf::streamgen::{three_setups, StreamGenerator};

fn main() -> dycf::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cloud: Vec<Vec<f64>> = (0..5000)
        .map(|_| vec![rng.sample(StandardNormal), rng.sample(StandardNormal)])
        .collect();
    let model = Dycg::fit_batch(&cloud, 2, 6, MomentConfig::default())?;

    println!(
        "{:>6} {:>10} {:>10} {:>10}",
        "radius", "S_2", "S_6", "slope"
    );
    for r in [0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 10.0] {
        let x = [r, 0.0];
        println!(
            "{r:>6.1} {:>10.3e} {:>10.3e} {:>10.3e}{}",
            model.low().score(&x)?,
            model.high().score(&x)?,
            model.score(&x)?,
            if model.is_outlier(&x)? {
                "  outlier"
            } else {
                ""
            }
        );
    }

    let cfg = &three_setups(0)[0];
    let mut stream = StreamGenerator::new(cfg, 0)?;
    let init: Vec<Vec<f64>> = stream.by_ref().take(2000).map(|s| s.x).collect();
    let mut model = Dycg::fit_batch(&init, 2, 6, MomentConfig::default())?;
    let (mut tp, mut fp, mut outliers) = (0, 0, 0);
    for s in stream.take(18_000) {
        let flagged = model.is_outlier(&s.x)?;
        model.learn(&s.x)?;
        let outlier = s.label.unwrap().is_outlier();
        outliers += outlier as usize;
        match (flagged, outlier) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            _ => {}
        }
    }
    println!(
        "stream: {} flagged, {tp} of {outliers} outliers caught, {fp} false alarms",
        tp + fp
    );
    Ok(())
}
