use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SubstreamResult {
    pub substream: usize,
    /// Number of inference points.
    pub points: usize,
    pub auroc: Option<f64>,
    pub ap: Option<f64>,
    pub em: Option<f64>,
    pub mv: Option<f64>,
    pub seconds_per_point: f64,
    /// Fraction of inference points the detector's own rule flagged, when
    /// it has one.
    pub flagged: Option<f64>,
}

/// Mean and population standard deviation over the rows that carry the
/// metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Aggregate {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Some(Aggregate {
            mean,
            std: var.sqrt(),
            count: v.len(),
        })
    }
}

const COLUMNS: [&str; 8] = [
    "substream",
    "points",
    "auroc",
    "ap",
    "em",
    "mv",
    "seconds_per_point",
    "flagged",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub detector: String,
    pub rows: Vec<SubstreamResult>,
}

type Field = fn(&SubstreamResult) -> Option<f64>;

const METRICS: [(&str, Field); 6] = [
    ("auroc", |r| r.auroc),
    ("ap", |r| r.ap),
    ("em", |r| r.em),
    ("mv", |r| r.mv),
    ("seconds_per_point", |r| Some(r.seconds_per_point)),
    ("flagged", |r| r.flagged),
];

impl EvalReport {
    pub fn new(detector: impl Into<String>, mut rows: Vec<SubstreamResult>) -> Self {
        rows.sort_by_key(|r| r.substream);
        EvalReport {
            detector: detector.into(),
            rows,
        }
    }

    /// Aggregate of the named column (`auroc`, `ap`, `em`, `mv`,
    /// `seconds_per_point` or `flagged`).
    pub fn aggregate(&self, metric: &str) -> Option<Aggregate> {
        let (_, f) = METRICS.iter().find(|(name, _)| *name == metric)?;
        Aggregate::of(self.rows.iter().filter_map(f))
    }

    /// One row per substream, then a `mean` and a `std` row. Missing
    /// metrics are empty cells.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(COLUMNS)?;
        let cell = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        for r in &self.rows {
            let mut rec = vec![r.substream.to_string(), r.points.to_string()];
            rec.extend(METRICS.iter().map(|(_, f)| cell(f(r))));
            w.write_record(&rec)?;
        }
        let aggs: Vec<Option<Aggregate>> = METRICS
            .iter()
            .map(|(name, _)| self.aggregate(name))
            .collect();
        let total: usize = self.rows.iter().map(|r| r.points).sum();
        for (label, pick) in [("mean", 0), ("std", 1)] {
            let mut rec = vec![label.to_string(), total.to_string()];
            rec.extend(
                aggs.iter()
                    .map(|a| cell(a.map(|a| if pick == 0 { a.mean } else { a.std }))),
            );
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the per-substream rows of [`write_csv`](Self::write_csv)
    /// output; aggregate rows are skipped.
    pub fn read_csv<R: Read>(input: R, detector: impl Into<String>) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().ne(COLUMNS) {
            return Err(Error::MalformedCsv {
                row: 0,
                message: format!("expected header {}", COLUMNS.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = i + 1;
            let bad = |m: String| Error::MalformedCsv { row, message: m };
            let Ok(substream) = rec[0].parse::<usize>() else {
                continue;
            };
            let num = |k: usize| -> Result<Option<f64>> {
                match &rec[k] {
                    "" => Ok(None),
                    v => v
                        .parse()
                        .map(Some)
                        .map_err(|_| bad(format!("{} = `{v}`", COLUMNS[k]))),
                }
            };
            rows.push(SubstreamResult {
                substream,
                points: rec[1].parse().map_err(|_| bad("points".into()))?,
                auroc: num(2)?,
                ap: num(3)?,
                em: num(4)?,
                mv: num(5)?,
                seconds_per_point: num(6)?
                    .ok_or_else(|| bad("missing seconds_per_point".into()))?,
                flagged: num(7)?,
            });
        }
        Ok(EvalReport::new(detector, rows))
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let total: usize = self.rows.iter().map(|r| r.points).sum();
        let _ = writeln!(
            s,
            "{}: {} substreams, {} inference points",
            self.detector,
            self.rows.len(),
            total
        );
        for (name, _) in METRICS {
            if let Some(a) = self.aggregate(name) {
                let _ = writeln!(s, "  {name:<18} {:>12.6e} ± {:.3e}", a.mean, a.std);
            }
        }
        s
    }
}
