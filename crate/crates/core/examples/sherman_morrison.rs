//! Direct Cholesky refresh against Sherman–Morrison rank-one updates of the
//! inverse moment matrix: accuracy and speed.
//!
//!     cargo run --release --example sherman_morrison

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use dycf::basis::MonomialBasis;
use dycf::moments::{spd_inverse, InverseMode, MomentConfig, MomentModel};

fn main() -> dycf::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xs: Vec<Vec<f64>> = (0..6000)
        .map(|_| (0..2).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();

    for (p, d) in [(2, 3), (2, 6)] {
        for (name, mode, refresh) in [
            ("direct", InverseMode::Direct, 100),
            ("SM, refresh 100", InverseMode::ShermanMorrison, 100),
            ("SM, never refresh", InverseMode::ShermanMorrison, u32::MAX),
        ] {
            let mut config = MomentConfig::default().with_inverse_mode(mode);
            config.refresh_period = refresh;
            let mut m = MomentModel::fit_batch(&xs[..1000], MonomialBasis::new(p, d)?, config)?;
            let t = Instant::now();
            for x in &xs[1000..] {
                m.update(x)?;
            }
            let per_point = t.elapsed().as_secs_f64() / 5000.0;
            let reference = spd_inverse(m.matrix(), m.epsilon())?;
            let err = (m.inverse() - &reference).abs().max() / reference.abs().max();
            println!("p={p} d={d} {name:<18} {per_point:.2e} s/update, relative error {err:.1e}");
        }
    }
    Ok(())
}
