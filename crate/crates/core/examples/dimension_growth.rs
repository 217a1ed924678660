//! Per-point cost of DyCF d=6 as the dimension grows with the size of the
//! moment matrix.
//!
//!     cargo run --release --example dimension_growth -- [p_max]

use dycf::harness::{run_bench, BenchSpec};

fn main() -> dycf::Result<()> {
    let p_max = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4);
    let report = run_bench(&BenchSpec {
        p_max,
        ..BenchSpec::default()
    })?;
    print!("{}", report.summary());
    for w in report.rows.windows(2) {
        println!(
            "p {} -> {}: s^2 x{:.1}, time x{:.1}",
            w[0].p,
            w[1].p,
            w[1].s_squared as f64 / w[0].s_squared as f64,
            w[1].seconds_per_point / w[0].seconds_per_point
        );
    }
    Ok(())
}
