//! Evaluation pipeline: split a source into sub-streams, initialize a
//! detector on the head of each one, then score and learn the rest point
//! by point.

mod bench;
mod spec;

pub use bench::{run_bench, BenchReport, BenchRow};
pub use spec::{BenchSpec, DataSource, DetectorSpec, Metric, RunSpec};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::detectors::Detector;
use crate::error::{Error, Result};
use crate::metrics::{auroc, average_precision, EvalReport, LevelSets, SubstreamResult};
use crate::metrics::{default_alpha_grid, default_t_grid};
use crate::streamgen::{CsvReader, Label, LabeledSample, StreamGenerator, TwoDisks};

type SampleIter = Box<dyn Iterator<Item = Result<LabeledSample>>>;

/// Sub-stream layout of a [`DataSource`]; each sub-stream can be reopened
/// and read again from its start.
struct Layout {
    p: usize,
    lengths: Vec<usize>,
}

fn layout(data: &DataSource) -> Result<Layout> {
    match data {
        DataSource::Generated(cfg) => {
            if cfg.length < 2 {
                return Err(Error::config(
                    "stream.length",
                    "need at least 2 points per sub-stream",
                ));
            }
            Ok(Layout {
                p: cfg.p,
                lengths: vec![cfg.length; cfg.substreams],
            })
        }
        DataSource::TwoDisks { .. } => {
            let g = TwoDisks::default();
            Ok(Layout {
                p: 2,
                lengths: vec![g.small_count + g.large_count + g.outlier_count],
            })
        }
        DataSource::Csv {
            path,
            substream_length,
        } => {
            let mut reader = CsvReader::open(path)?;
            let p = reader.dim();
            let mut total = 0usize;
            while reader.next_sample()?.is_some() {
                total += 1;
            }
            let len = substream_length.unwrap_or(total).max(1);
            let mut lengths = vec![len; total / len];
            if !total.is_multiple_of(len) {
                lengths.push(total % len);
            }
            if lengths.is_empty() {
                return Err(Error::MalformedCsv {
                    row: 0,
                    message: format!("{} has no data rows", path.display()),
                });
            }
            Ok(Layout { p, lengths })
        }
    }
}

fn open_substream(data: &DataSource, k: usize, layout: &Layout) -> Result<SampleIter> {
    let len = layout.lengths[k];
    Ok(match data {
        DataSource::Generated(cfg) => {
            Box::new(StreamGenerator::new(cfg, k as u64)?.take(len).map(Ok))
        }
        DataSource::TwoDisks { seed } => {
            Box::new(TwoDisks::default().generate(*seed).into_iter().map(Ok))
        }
        DataSource::Csv { path, .. } => {
            let skip: usize = layout.lengths[..k].iter().sum();
            Box::new(CsvReader::open(path)?.skip(skip).take(len))
        }
    })
}

/// Outcome of [`step`] for one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub score: f64,
    /// Decision of the detector's own rule, when it has one.
    pub flagged: Option<bool>,
    pub learned: bool,
}

/// Scores `x`, takes the decision, then learns `x` unless it was flagged
/// and `learn_flagged` is false.
pub fn step<D: Detector + ?Sized>(
    detector: &mut D,
    x: &[f64],
    learn_flagged: bool,
) -> Result<Step> {
    let score = detector.score(x)?;
    let flagged = detector.threshold().map(|t| score >= t);
    let learned = learn_flagged || flagged != Some(true);
    if learned {
        detector.learn(x)?;
    }
    Ok(Step {
        score,
        flagged,
        learned,
    })
}

/// Number of initialization points for a sub-stream of `len` points.
pub fn init_size(len: usize, init_fraction: f64) -> usize {
    ((len as f64 * init_fraction).round() as usize).clamp(1, len.saturating_sub(1).max(1))
}

/// Runs the full evaluation described by `spec`.
///
/// For each sub-stream the detector is batch-fitted on the first
/// `init_fraction` of the points. Every remaining point is scored before
/// it is learned, so no point influences its own score. EM and MV are
/// computed afterwards over the inference points with the end-of-run
/// model.
pub fn run(spec: &RunSpec) -> Result<EvalReport> {
    spec.validate()?;
    let layout = layout(&spec.data)?;
    let rows = (0..layout.lengths.len())
        .map(|k| run_substream(spec, &layout, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::new(spec.detector.name(), rows))
}

fn label_of(s: &LabeledSample, what: &str) -> Result<Label> {
    s.label.ok_or_else(|| {
        Error::config(
            what.to_string(),
            format!("requires labeled data, point {} has no label", s.index),
        )
    })
}

fn run_substream(spec: &RunSpec, layout: &Layout, k: usize) -> Result<SubstreamResult> {
    let len = layout.lengths[k];
    let n_init = init_size(len, spec.init_fraction);
    let mut points = open_substream(&spec.data, k, layout)?;

    let mut init = Vec::with_capacity(n_init);
    for s in points.by_ref().take(n_init) {
        let s = s?;
        if spec.init_normal_only && label_of(&s, "run.init_normal_only")? != Label::Normal {
            continue;
        }
        init.push(s.x);
    }
    let mut detector = spec.detector.build(layout.p)?;
    detector.fit(&init)?;
    drop(init);

    let supervised = spec.metrics.iter().any(|m| m.requires_labels());
    let has_threshold = detector.threshold().is_some();
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    let mut flagged = 0usize;
    let mut inference = 0usize;
    let mut elapsed = 0.0;
    for s in points {
        let s = s?;
        let start = Instant::now();
        let outcome = step(&mut detector, &s.x, spec.learn_flagged)?;
        elapsed += start.elapsed().as_secs_f64();
        inference += 1;
        flagged += (outcome.flagged == Some(true)) as usize;
        if supervised {
            labels.push(label_of(&s, "run.metrics")?.is_outlier());
            scores.push(outcome.score);
        }
    }
    if inference == 0 {
        return Err(Error::config(
            "run.init_fraction",
            format!("sub-stream {k} has no inference points"),
        ));
    }

    let mut row = SubstreamResult {
        substream: k,
        points: inference,
        auroc: None,
        ap: None,
        em: None,
        mv: None,
        seconds_per_point: elapsed.max(f64::MIN_POSITIVE) / inference as f64,
        flagged: has_threshold.then(|| flagged as f64 / inference as f64),
    };
    if spec.metrics.contains(&Metric::Auroc) {
        row.auroc = Some(auroc(&scores, &labels)?);
    }
    if spec.metrics.contains(&Metric::Ap) {
        row.ap = Some(average_precision(&scores, &labels)?);
    }
    let want_em = spec.metrics.contains(&Metric::Em);
    let want_mv = spec.metrics.contains(&Metric::Mv);
    if want_em || want_mv {
        let sample = open_substream(&spec.data, k, layout)?
            .skip(n_init)
            .map(|s| s.map(|s| s.x))
            .collect::<Result<Vec<_>>>()?;
        let seed = spec.seed.wrapping_add(k as u64);
        let sets = LevelSets::new(
            |x| detector.score(x).map(|s| -s),
            &sample,
            spec.volume_budget,
            seed,
        )?;
        if want_em {
            let t = default_t_grid(sets.box_volume());
            row.em = Some(sets.em_area(&t));
        }
        if want_mv {
            let a = default_alpha_grid();
            row.mv = Some(sets.mv_area(&a));
        }
    }
    Ok(row)
}

impl RunSpec {
    /// Replaces the run seed and the seed of generated data.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        match &mut self.data {
            DataSource::Generated(cfg) => cfg.seed = seed,
            DataSource::TwoDisks { seed: s } => *s = seed,
            DataSource::Csv { .. } => {}
        }
        self
    }
}

/// Path of the text summary written next to a CSV report.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("txt")
}

/// Writes `csv` and its text summary next to it.
pub fn write_outputs(
    csv: &Path,
    write: impl FnOnce(&mut dyn Write) -> Result<()>,
    summary: &str,
) -> Result<()> {
    let failed = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Write { path, source }
    };
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(failed(dir))?;
    }
    let mut out = BufWriter::new(File::create(csv).map_err(failed(csv))?);
    write(&mut out)?;
    out.flush().map_err(failed(csv))?;
    let txt = summary_path(csv);
    std::fs::write(&txt, summary).map_err(failed(&txt))?;
    Ok(())
}
