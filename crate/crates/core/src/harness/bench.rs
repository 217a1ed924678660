use std::fmt::Write as _;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::basis_size;
use crate::detectors::Dycf;
use crate::error::Result;
use crate::harness::BenchSpec;
use crate::metrics::measure_seconds_per_point;
use crate::moments::MomentConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub p: usize,
    /// Basis size `s_p(d)`.
    pub s: usize,
    /// Number of moment-matrix entries, `s²`.
    pub s_squared: u128,
    pub seconds_per_point: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub degree: usize,
    pub points: usize,
    pub rows: Vec<BenchRow>,
}

/// Times DyCF score + learn on uniform points in `[0, 1]^p` for each
/// `p = 1..=p_max`. Each repetition refits on fresh initialization points;
/// the fastest repetition is kept.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchReport> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.p_max);
    for p in 1..=spec.p_max {
        let s = basis_size(p, spec.degree)?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(p as u64);
        let mut draw = |n: usize| -> Vec<Vec<f64>> {
            (0..n)
                .map(|_| (0..p).map(|_| rng.random::<f64>()).collect())
                .collect()
        };
        let mut best = f64::INFINITY;
        for _ in 0..spec.repeats {
            let init = draw(spec.init_points);
            let stream = draw(spec.points);
            let mut dycf = Dycf::fit_batch(&init, spec.degree, MomentConfig::default())?;
            best = best.min(measure_seconds_per_point(&mut dycf, &stream)?);
        }
        rows.push(BenchRow {
            p,
            s,
            s_squared: (s as u128) * (s as u128),
            seconds_per_point: best,
        });
    }
    Ok(BenchReport {
        degree: spec.degree,
        points: spec.points,
        rows,
    })
}

impl BenchReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "s", "s_squared", "seconds_per_point"])?;
        for r in &self.rows {
            w.write_record([
                r.p.to_string(),
                r.s.to_string(),
                r.s_squared.to_string(),
                r.seconds_per_point.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "DyCF d={} over {} points per dimension\n{:>3} {:>6} {:>10} {:>14}\n",
            self.degree, self.points, "p", "s", "s^2", "s/point"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>3} {:>6} {:>10} {:>14.4e}",
                r.p, r.s, r.s_squared, r.seconds_per_point
            );
        }
        s
    }
}
