//! Excess-mass and mass-volume areas of three scoring functions on a
//! Gaussian sample: the density itself, DyCF, and a score that ignores x.
//!
//!     cargo run --release --example em_mv_metrics

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use dycf::detectors::Dycf;
use dycf::metrics::{em_auc, mv_auc, DEFAULT_VOLUME_BUDGET};
use dycf::moments::MomentConfig;

fn main() -> dycf::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let xs: Vec<Vec<f64>> = (0..3000)
        .map(|_| (0..2).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let cf = Dycf::fit_batch(&xs, 6, MomentConfig::default())?;

    // Larger is more normal for EM/MV.
    let density = |x: &[f64]| Ok((-0.5 * (x[0] * x[0] + x[1] * x[1])).exp());
    let christoffel = |x: &[f64]| Ok(-cf.score(x)?);
    let constant = |_: &[f64]| Ok(0.0);

    println!("{:<10} {:>10} {:>10}", "score", "EM (↑)", "MV (↓)");
    let budget = DEFAULT_VOLUME_BUDGET;
    println!(
        "{:<10} {:>10.4} {:>10.4}",
        "density",
        em_auc(density, &xs, None, budget, 1)?,
        mv_auc(density, &xs, None, budget, 1)?
    );
    println!(
        "{:<10} {:>10.4} {:>10.4}",
        "DyCF",
        em_auc(christoffel, &xs, None, budget, 1)?,
        mv_auc(christoffel, &xs, None, budget, 1)?
    );
    println!(
        "{:<10} {:>10.4} {:>10.4}",
        "constant",
        em_auc(constant, &xs, None, budget, 1)?,
        mv_auc(constant, &xs, None, budget, 1)?
    );
    Ok(())
}
