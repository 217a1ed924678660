//! [`RunSpec`] and [`BenchSpec`] files.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::detectors::{Detector, Dycf, Dycg};
use crate::error::{Error, Result};
use crate::kde::{Bandwidth, KdeWindow, Kernel, Windowing};
use crate::kv::{Document, Section};
use crate::moments::{InverseMode, MomentConfig, Regularization};
use crate::streamgen::StreamConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum DetectorSpec {
    Dycf {
        degree: usize,
        c: f64,
        moments: MomentConfig,
    },
    Dycg {
        degrees: (usize, usize),
        moments: MomentConfig,
    },
    Kde {
        windowing: Windowing,
        kernel: Kernel,
        /// Isotropic bandwidth `h` (so `H = h² I`); `None` for Scott's rule.
        bandwidth: Option<f64>,
    },
}

impl DetectorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DetectorSpec::Dycf { .. } => "DyCF",
            DetectorSpec::Dycg { .. } => "DyCG",
            DetectorSpec::Kde { .. } => "KDE",
        }
    }

    /// An unfitted detector for dimension `p`.
    pub fn build(&self, p: usize) -> Result<Box<dyn Detector>> {
        Ok(match self {
            DetectorSpec::Dycf { degree, c, moments } => {
                Box::new(Dycf::new(p, *degree, *moments)?.with_c(*c)?)
            }
            DetectorSpec::Dycg { degrees, moments } => {
                Box::new(Dycg::new(p, degrees.0, degrees.1, *moments)?)
            }
            DetectorSpec::Kde {
                windowing,
                kernel,
                bandwidth,
            } => {
                let bw = match bandwidth {
                    None => Bandwidth::Scott,
                    Some(h) => Bandwidth::Fixed(DMatrix::identity(p, p) * (h * h)),
                };
                Box::new(KdeWindow::new(p, *windowing, *kernel, bw)?)
            }
        })
    }

    fn parse(section: &Section) -> Result<Self> {
        let kind = section.require("kind")?;
        match kind {
            "dycf" | "dycg" => {
                let mut known = vec![
                    "kind",
                    "regularization",
                    "inverse",
                    "refresh_period",
                    "scaling",
                ];
                // c rescales both DyCG scores alike and cannot move the sign.
                known.extend_from_slice(if kind == "dycf" {
                    &["degree", "c"]
                } else {
                    &["degrees"]
                });
                section.only(&known)?;
                let mut moments = MomentConfig::default();
                if let Some(r) = section.get("regularization") {
                    moments.regularization = match r {
                        "auto" => Regularization::Auto,
                        v => Regularization::Fixed(v.parse().map_err(|_| {
                            Error::config("detector.regularization", "expected `auto` or a number")
                        })?),
                    };
                }
                if let Some(m) = section.get("inverse") {
                    moments.inverse_mode = match m {
                        "direct" => InverseMode::Direct,
                        "sherman_morrison" => InverseMode::ShermanMorrison,
                        _ => {
                            return Err(Error::config(
                                "detector.inverse",
                                "expected `direct` or `sherman_morrison`",
                            ))
                        }
                    };
                }
                if let Some(r) = section.parse_value("refresh_period")? {
                    moments.refresh_period = r;
                }
                if let Some(s) = section.parse_value("scaling")? {
                    moments.scaling = s;
                }
                moments.validate()?;
                if kind == "dycf" {
                    Ok(DetectorSpec::Dycf {
                        degree: section
                            .parse_value("degree")?
                            .unwrap_or(Dycf::DEFAULT_DEGREE),
                        c: section.parse_value("c")?.unwrap_or(1.0),
                        moments,
                    })
                } else {
                    let degrees = match section.parse_list("degrees")? {
                        None => Dycg::DEFAULT_DEGREES,
                        Some(v)
                            if v.len() == 2 && v.iter().all(|d| d.fract() == 0.0 && *d >= 0.0) =>
                        {
                            (v[0] as usize, v[1] as usize)
                        }
                        Some(_) => {
                            return Err(Error::config(
                                "detector.degrees",
                                "expected `d_min, d_max`",
                            ))
                        }
                    };
                    Ok(DetectorSpec::Dycg { degrees, moments })
                }
            }
            "kde" => {
                section.only(&[
                    "kind",
                    "windowing",
                    "window",
                    "half_life",
                    "kernel",
                    "bandwidth",
                ])?;
                let windowing = match section.get("windowing").unwrap_or("sliding") {
                    "sliding" => Windowing::Sliding(
                        section
                            .parse_value("window")?
                            .unwrap_or(KdeWindow::DEFAULT_WINDOW),
                    ),
                    "landmark" => Windowing::Landmark,
                    "damped" => Windowing::Damped {
                        half_life: section.require_value("half_life")?,
                    },
                    other => {
                        return Err(Error::config(
                            "detector.windowing",
                            format!("unknown windowing `{other}`"),
                        ))
                    }
                };
                let kernel = match section.get("kernel").unwrap_or("gaussian") {
                    "gaussian" => Kernel::Gaussian,
                    "epanechnikov" => Kernel::Epanechnikov,
                    other => {
                        return Err(Error::config(
                            "detector.kernel",
                            format!("unknown kernel `{other}`"),
                        ))
                    }
                };
                let bandwidth = match section.get("bandwidth").unwrap_or("scott") {
                    "scott" => None,
                    v => Some(v.parse::<f64>().ok().filter(|h| *h > 0.0).ok_or_else(|| {
                        Error::config(
                            "detector.bandwidth",
                            "expected `scott` or a positive number",
                        )
                    })?),
                };
                Ok(DetectorSpec::Kde {
                    windowing,
                    kernel,
                    bandwidth,
                })
            }
            other => Err(Error::config(
                "detector.kind",
                format!("unknown detector `{other}` (expected dycf, dycg or kde)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Every sub-stream of a generator configuration.
    Generated(StreamConfig),
    /// The two-disks dataset as a single sub-stream.
    TwoDisks { seed: u64 },
    /// A stream CSV cut into consecutive sub-streams of `substream_length`
    /// rows (the whole file when `None`).
    Csv {
        path: PathBuf,
        substream_length: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Auroc,
    Ap,
    Em,
    Mv,
}

impl Metric {
    pub fn requires_labels(self) -> bool {
        matches!(self, Metric::Auroc | Metric::Ap)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub detector: DetectorSpec,
    pub data: DataSource,
    /// Fraction of each sub-stream used to initialize the detector.
    pub init_fraction: f64,
    /// Initialize only on the `normal`-labeled points of the
    /// initialization prefix.
    pub init_normal_only: bool,
    /// When false, points the detector flags are scored but not learned.
    pub learn_flagged: bool,
    pub metrics: Vec<Metric>,
    pub volume_budget: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl RunSpec {
    pub const DEFAULT_INIT_FRACTION: f64 = 0.1;

    pub fn read(path: &Path) -> Result<Self> {
        let doc = Document::read(path)?;
        Self::from_document(&doc, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parses a spec; relative paths are resolved against `base`.
    pub fn parse(text: &str, origin: &str, base: &Path) -> Result<Self> {
        Self::from_document(&Document::parse(text, origin)?, base)
    }

    fn from_document(doc: &Document, base: &Path) -> Result<Self> {
        for s in &doc.sections {
            if !["detector", "data", "run"].contains(&s.name.as_str()) {
                return Err(Error::config(s.name.clone(), "unknown section"));
            }
        }
        let detector = DetectorSpec::parse(
            doc.section("detector")
                .ok_or_else(|| Error::config("detector", "missing section"))?,
        )?;
        let data = doc
            .section("data")
            .ok_or_else(|| Error::config("data", "missing section"))?;
        data.only(&["source", "config", "path", "substream_length", "seed"])?;
        let resolve = |p: &str| base.join(p);
        let data = match data.require("source")? {
            "generated" => {
                let mut cfg = StreamConfig::read(&resolve(data.require("config")?))?;
                if let Some(seed) = data.parse_value("seed")? {
                    cfg.seed = seed;
                }
                DataSource::Generated(cfg)
            }
            "two_disks" => DataSource::TwoDisks {
                seed: data.parse_value("seed")?.unwrap_or(0),
            },
            "csv" => DataSource::Csv {
                path: resolve(data.require("path")?),
                substream_length: data.parse_value("substream_length")?,
            },
            other => {
                return Err(Error::config(
                    "data.source",
                    format!("unknown source `{other}` (expected generated, two_disks or csv)"),
                ))
            }
        };

        let empty = Section {
            name: "run".into(),
            line: 0,
            entries: Vec::new(),
        };
        let run = doc.section("run").unwrap_or(&empty);
        run.only(&[
            "init_fraction",
            "init_normal_only",
            "learn_flagged",
            "metrics",
            "volume_budget",
            "seed",
            "output",
        ])?;
        let metrics = match run.get("metrics") {
            None => vec![Metric::Auroc, Metric::Ap],
            Some(list) => list
                .split(',')
                .map(|m| match m.trim() {
                    "auroc" => Ok(Metric::Auroc),
                    "ap" => Ok(Metric::Ap),
                    "em" => Ok(Metric::Em),
                    "mv" => Ok(Metric::Mv),
                    other => Err(Error::config(
                        "run.metrics",
                        format!("unknown metric `{other}`"),
                    )),
                })
                .collect::<Result<_>>()?,
        };
        let spec = RunSpec {
            detector,
            data,
            init_fraction: run
                .parse_value("init_fraction")?
                .unwrap_or(Self::DEFAULT_INIT_FRACTION),
            init_normal_only: run.parse_value("init_normal_only")?.unwrap_or(false),
            learn_flagged: run.parse_value("learn_flagged")?.unwrap_or(true),
            metrics,
            volume_budget: run
                .parse_value("volume_budget")?
                .unwrap_or(crate::metrics::DEFAULT_VOLUME_BUDGET),
            seed: run.parse_value("seed")?.unwrap_or(0),
            output: run.get("output").map(resolve),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.init_fraction > 0.0 && self.init_fraction < 1.0) {
            return Err(Error::config("run.init_fraction", "must lie in (0, 1)"));
        }
        if self.volume_budget == 0 {
            return Err(Error::config("run.volume_budget", "must be positive"));
        }
        if !self.learn_flagged && matches!(self.detector, DetectorSpec::Kde { .. }) {
            return Err(Error::config(
                "run.learn_flagged",
                "KDE has no decision rule, so every point must be learned",
            ));
        }
        if let DataSource::Csv {
            substream_length: Some(0),
            ..
        } = self.data
        {
            return Err(Error::config("data.substream_length", "must be at least 1"));
        }
        Ok(())
    }
}

/// Dimension-growth benchmark: DyCF timing for `p = 1..=p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub p_max: usize,
    pub degree: usize,
    /// Uniform points used to initialize each model.
    pub init_points: usize,
    /// Uniform points timed through score + learn.
    pub points: usize,
    /// Repetitions per dimension; the fastest is reported.
    pub repeats: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            p_max: 5,
            degree: 6,
            init_points: 500,
            points: 500,
            repeats: 3,
            seed: 0,
            output: None,
        }
    }
}

impl BenchSpec {
    pub fn read(path: &Path) -> Result<Self> {
        let doc = Document::read(path)?;
        Self::from_document(&doc, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn parse(text: &str, origin: &str, base: &Path) -> Result<Self> {
        Self::from_document(&Document::parse(text, origin)?, base)
    }

    fn from_document(doc: &Document, base: &Path) -> Result<Self> {
        let mut spec = BenchSpec::default();
        for s in &doc.sections {
            if s.name != "bench" {
                return Err(Error::config(s.name.clone(), "unknown section"));
            }
        }
        if let Some(s) = doc.section("bench") {
            s.only(&[
                "p_max",
                "degree",
                "init_points",
                "points",
                "repeats",
                "seed",
                "output",
            ])?;
            spec.p_max = s.parse_value("p_max")?.unwrap_or(spec.p_max);
            spec.degree = s.parse_value("degree")?.unwrap_or(spec.degree);
            spec.init_points = s.parse_value("init_points")?.unwrap_or(spec.init_points);
            spec.points = s.parse_value("points")?.unwrap_or(spec.points);
            spec.repeats = s.parse_value("repeats")?.unwrap_or(spec.repeats);
            spec.seed = s.parse_value("seed")?.unwrap_or(spec.seed);
            spec.output = s.get("output").map(|p| base.join(p));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("bench.p_max", self.p_max),
            ("bench.degree", self.degree),
            ("bench.init_points", self.init_points),
            ("bench.points", self.points),
            ("bench.repeats", self.repeats),
        ] {
            if v == 0 {
                return Err(Error::config(field, "must be at least 1"));
            }
        }
        Ok(())
    }
}
