//! Saves a DyCF model mid-stream, restores it and checks that both copies
//! keep scoring identically. The snapshot size does not grow with n.
//!
//!     cargo run --release --example snapshot

use dycf::detectors::Dycf;
use dycf::moments::MomentConfig;
use dycf::streamgen::{three_setups, StreamGenerator};

fn main() -> dycf::Result<()> {
    let cfg = &three_setups(0)[0];
    let xs: Vec<Vec<f64>> = StreamGenerator::new(cfg, 0)?
        .take(20_000)
        .map(|s| s.x)
        .collect();
    let mut model = Dycf::fit_batch(&xs[..1000], 6, MomentConfig::default())?;
    for x in &xs[1000..10_000] {
        model.learn(x)?;
    }

    let path = std::env::temp_dir().join("dycf_snapshot.bin");
    let bytes = model.to_bytes();
    std::fs::write(&path, &bytes)?;
    let mut restored = Dycf::from_bytes(&std::fs::read(&path)?)?;
    println!(
        "saved n = {} in {} bytes to {}",
        model.n(),
        bytes.len(),
        path.display()
    );

    let mut worst: f64 = 0.0;
    for x in &xs[10_000..] {
        let (a, b) = (model.score(x)?, restored.score(x)?);
        worst = worst.max((a - b).abs() / a.max(1e-300));
        model.learn(x)?;
        restored.learn(x)?;
    }
    println!(
        "after {} more points: max relative score gap {worst:.1e}",
        xs.len() - 10_000
    );
    println!(
        "snapshot size at n = {}: {} bytes",
        model.n(),
        model.to_bytes().len()
    );
    Ok(())
}
