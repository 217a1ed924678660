//! Score-then-learn over one sub-stream of the mean-shift setup.
//!
//!     cargo run --release --example streaming_dycf

use dycf::detectors::Dycf;
use dycf::metrics::{auroc, average_precision};
use dycf::moments::MomentConfig;
use dycf::streamgen::{three_setups, Label, StreamGenerator};

fn main() -> dycf::Result<()> {
    let cfg = &three_setups(0)[0];
    let mut stream = StreamGenerator::new(cfg, 0)?;

    let init: Vec<Vec<f64>> = stream.by_ref().take(2000).map(|s| s.x).collect();
    let mut model = Dycf::fit_batch(&init, 6, MomentConfig::default())?;

    let mut scores = Vec::new();
    let mut labels = Vec::new();
    let mut counts = [[0usize; 2]; 3];
    for s in stream.take(18_000) {
        let score = model.score(&s.x)?;
        model.learn(&s.x)?;
        let label = s.label.unwrap();
        let row = match label {
            Label::Normal => 0,
            Label::Type1 => 1,
            Label::Type2 => 2,
        };
        counts[row][(score >= 1.0) as usize] += 1;
        scores.push(score);
        labels.push(label.is_outlier());
        if s.index % 4000 == 0 {
            println!(
                "index {:>5}: n = {}, last score {score:.3}",
                s.index,
                model.n()
            );
        }
    }

    println!(
        "AUROC {:.4}  AP {:.4}",
        auroc(&scores, &labels)?,
        average_precision(&scores, &labels)?
    );
    for (label, [kept, flagged]) in [Label::Normal, Label::Type1, Label::Type2]
        .iter()
        .zip(counts)
    {
        println!("{label:>7}: {flagged:>5} flagged of {}", kept + flagged);
    }
    Ok(())
}
