//! Builds a stream configuration in code, writes it and a labeled CSV,
//! then reads the CSV back.
//!
//!     cargo run --example generate_stream -- [out_dir]

use std::fs::File;
use std::path::PathBuf;

use dycf::streamgen::{
    generate, read_csv, Alteration, AlterationKind, Distribution, Label, ModeSpec, Shape,
    StreamConfig, TransitionSpec, Type1Spec, Type2Spec,
};

fn main() -> dycf::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let cfg = StreamConfig {
        p: 2,
        seed: 42,
        substreams: 1,
        length: 5000,
        modes: vec![
            ModeSpec {
                distribution: Distribution::Normal {
                    mean: vec![0.0, 0.0],
                    std: vec![0.5, 0.5],
                },
                dwell: 0.998,
            },
            ModeSpec {
                distribution: Distribution::Uniform {
                    low: vec![3.0, -1.0],
                    high: vec![4.0, 1.0],
                },
                dwell: 0.995,
            },
        ],
        transitions: vec![
            TransitionSpec {
                from: 0,
                to: 1,
                probability: 0.002,
                shape: Shape::Logarithmic,
                duration: 50,
            },
            TransitionSpec {
                from: 1,
                to: 0,
                probability: 0.005,
                shape: Shape::Exponential,
                duration: 30,
            },
        ],
        type1: Type1Spec {
            probability: 0.01,
            half_width: vec![4.0, 4.0],
        },
        type2: Type2Spec {
            appear: 0.002,
            last: 0.8,
            offset: vec![2.0, 2.0],
        },
        alterations: vec![Alteration {
            at: 2500,
            kind: AlterationKind::MeanShift {
                mode: 0,
                delta: vec![0.0, 2.0],
            },
        }],
    };
    cfg.validate()?;

    let cfg_path = dir.join("example_stream.cfg");
    std::fs::write(&cfg_path, cfg.to_text())?;
    let samples = generate(&cfg, cfg.length)?;
    let csv_path = dir.join("example_stream.csv");
    dycf::streamgen::write_csv(File::create(&csv_path)?, &samples)?;

    let back = read_csv(&csv_path)?;
    assert_eq!(back, samples);
    assert_eq!(StreamConfig::read(&cfg_path)?, cfg);
    let count = |l| back.iter().filter(|s| s.label == Some(l)).count();
    println!("{}", cfg.to_text());
    println!(
        "wrote {} ({} normal, {} type1, {} type2) and {}",
        csv_path.display(),
        count(Label::Normal),
        count(Label::Type1),
        count(Label::Type2),
        cfg_path.display()
    );
    Ok(())
}
