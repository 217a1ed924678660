//! Sliding, landmark and damped KDE windows on the global-offset setup.
//!
//!     cargo run --release --example kde_baseline

use dycf::kde::{Bandwidth, KdeWindow, Kernel, Windowing};
use dycf::metrics::{auroc, average_precision};
use dycf::streamgen::{three_setups, StreamGenerator};

fn main() -> dycf::Result<()> {
    let cfg = &three_setups(0)[1];
    let data: Vec<_> = StreamGenerator::new(cfg, 0)?.take(8000).collect();
    let init: Vec<Vec<f64>> = data[..800].iter().map(|s| s.x.clone()).collect();
    let labels: Vec<bool> = data[800..]
        .iter()
        .map(|s| s.label.unwrap().is_outlier())
        .collect();

    let windows = [
        ("sliding 500", Windowing::Sliding(500), Kernel::Gaussian),
        ("sliding 1000", Windowing::Sliding(1000), Kernel::Gaussian),
        (
            "damped 500",
            Windowing::Damped { half_life: 500.0 },
            Kernel::Gaussian,
        ),
        ("landmark", Windowing::Landmark, Kernel::Gaussian),
        (
            "epanechnikov",
            Windowing::Sliding(1000),
            Kernel::Epanechnikov,
        ),
    ];
    println!("{:<14} {:>8} {:>8} {:>8}", "window", "AUROC", "AP", "kept");
    for (name, windowing, kernel) in windows {
        let mut kde = KdeWindow::new(2, windowing, kernel, Bandwidth::Scott)?;
        kde.fit(&init)?;
        let mut scores = Vec::with_capacity(labels.len());
        for s in &data[800..] {
            scores.push(kde.outlier_score(&s.x)?);
            kde.learn(&s.x)?;
        }
        println!(
            "{name:<14} {:>8.4} {:>8.4} {:>8}",
            auroc(&scores, &labels)?,
            average_precision(&scores, &labels)?,
            kde.len()
        );
    }
    Ok(())
}
