//! DyCF and DyCG through the evaluation harness on the three shipped
//! setups, ten sub-streams each.
//!
//!     cargo run --release --example evaluate_setups

use dycf::harness::{self, DataSource, DetectorSpec, Metric, RunSpec};
use dycf::moments::MomentConfig;
use dycf::streamgen::three_setups;

fn main() -> dycf::Result<()> {
    let detectors = [
        DetectorSpec::Dycf {
            degree: 6,
            c: 1.0,
            moments: MomentConfig::default(),
        },
        DetectorSpec::Dycg {
            degrees: (2, 6),
            moments: MomentConfig::default(),
        },
    ];
    for (i, cfg) in three_setups(0).into_iter().enumerate() {
        for detector in &detectors {
            let spec = RunSpec {
                detector: detector.clone(),
                data: DataSource::Generated(cfg.clone()),
                init_fraction: RunSpec::DEFAULT_INIT_FRACTION,
                init_normal_only: false,
                learn_flagged: true,
                metrics: vec![Metric::Auroc, Metric::Ap],
                volume_budget: 10_000,
                seed: 0,
                output: None,
            };
            let report = harness::run(&spec)?;
            let auroc = report.aggregate("auroc").unwrap();
            let ap = report.aggregate("ap").unwrap();
            let spp = report.aggregate("seconds_per_point").unwrap();
            println!(
                "setup {} {:<5} AUROC {:.3} ({:.3})  AP {:.3} ({:.3})  {:.2e} s/pt",
                i + 1,
                report.detector,
                auroc.mean,
                auroc.std,
                ap.mean,
                ap.std,
                spp.mean
            );
        }
    }
    Ok(())
}
