//! [`StreamConfig`] and its text format.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kv::{format_list, parse_f64_list, Document, Section};

/// Distribution of normal points while the chain sits in a mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    /// Independent normal coordinates.
    Normal { mean: Vec<f64>, std: Vec<f64> },
    /// Uniform on the box `[low, high]`.
    Uniform { low: Vec<f64>, high: Vec<f64> },
}

impl Distribution {
    pub fn center(&self) -> Vec<f64> {
        match self {
            Distribution::Normal { mean, .. } => mean.clone(),
            Distribution::Uniform { low, high } => {
                low.iter().zip(high).map(|(l, h)| 0.5 * (l + h)).collect()
            }
        }
    }

    pub(crate) fn shift(&mut self, delta: &[f64]) {
        let add = |v: &mut Vec<f64>| v.iter_mut().zip(delta).for_each(|(a, b)| *a += b);
        match self {
            Distribution::Normal { mean, .. } => add(mean),
            Distribution::Uniform { low, high } => {
                add(low);
                add(high);
            }
        }
    }

    fn dim(&self) -> usize {
        match self {
            Distribution::Normal { mean, .. } => mean.len(),
            Distribution::Uniform { low, .. } => low.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpec {
    pub distribution: Distribution,
    /// Probability of staying in the mode at each step.
    pub dwell: f64,
}

/// Path followed by the mode center during a transition, as a map of
/// `[0, 1]` onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `ln(1 + 9t) / ln 10`: fast start, slow finish.
    Logarithmic,
    Linear,
    /// `(10^t − 1) / 9`: slow start, fast finish.
    Exponential,
}

impl Shape {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Shape::Linear => t,
            Shape::Logarithmic => (1.0 + 9.0 * t).ln() / 10f64.ln(),
            Shape::Exponential => (10f64.powf(t) - 1.0) / 9.0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Shape::Logarithmic => "logarithmic",
            Shape::Linear => "linear",
            Shape::Exponential => "exponential",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSpec {
    pub from: usize,
    pub to: usize,
    pub probability: f64,
    pub shape: Shape,
    /// Number of points emitted while moving between the two centers.
    pub duration: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Type1Spec {
    pub probability: f64,
    /// Per-coordinate half-width of the uniform envelope around the
    /// current center.
    pub half_width: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Type2Spec {
    pub appear: f64,
    pub last: f64,
    pub offset: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlterationKind {
    /// Moves one mode by `delta`.
    MeanShift { mode: usize, delta: Vec<f64> },
    /// Adds `delta` to every emitted point from the trigger on.
    GlobalOffset { delta: Vec<f64> },
    /// Makes a dormant mode reachable. Modes named by an `add_mode`
    /// alteration are unreachable before their trigger.
    AddMode { mode: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alteration {
    pub at: usize,
    pub kind: AlterationKind,
}

/// Full description of a synthetic labeled stream.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub p: usize,
    pub seed: u64,
    /// Number of independent sub-streams produced by
    /// [`generate_substreams`](super::generate_substreams).
    pub substreams: usize,
    /// Points per sub-stream.
    pub length: usize,
    pub modes: Vec<ModeSpec>,
    pub transitions: Vec<TransitionSpec>,
    pub type1: Type1Spec,
    pub type2: Type2Spec,
    pub alterations: Vec<Alteration>,
}

const ROW_TOLERANCE: f64 = 1e-12;

impl StreamConfig {
    pub fn validate(&self) -> Result<()> {
        let p = self.p;
        if p == 0 {
            return Err(Error::config("stream.p", "must be at least 1"));
        }
        if self.modes.is_empty() {
            return Err(Error::config("mode", "at least one mode is required"));
        }
        let prob = |field: String, v: f64| -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(field, format!("{v} is not a probability")))
            }
        };
        let dim = |field: String, len: usize| -> Result<()> {
            if len == p {
                Ok(())
            } else {
                Err(Error::config(
                    field,
                    format!("has {len} values, expected {p}"),
                ))
            }
        };
        for (i, m) in self.modes.iter().enumerate() {
            prob(format!("mode.{i}.dwell"), m.dwell)?;
            dim(format!("mode.{i}"), m.distribution.dim())?;
            match &m.distribution {
                Distribution::Normal { std, .. } => {
                    dim(format!("mode.{i}.std"), std.len())?;
                    if std.iter().any(|s| s.is_nan() || *s < 0.0) {
                        return Err(Error::config(
                            format!("mode.{i}.std"),
                            "must be non-negative",
                        ));
                    }
                }
                Distribution::Uniform { low, high } => {
                    dim(format!("mode.{i}.high"), high.len())?;
                    if low
                        .iter()
                        .zip(high)
                        .any(|(l, h)| l.is_nan() || h.is_nan() || l > h)
                    {
                        return Err(Error::config(format!("mode.{i}.high"), "must be ≥ low"));
                    }
                }
            }
        }
        let k = self.modes.len();
        let mut rows = vec![0.0; k];
        for t in &self.transitions {
            let field = format!("transition.{}.{}", t.from, t.to);
            if t.from >= k || t.to >= k {
                return Err(Error::config(field, "refers to an undefined mode"));
            }
            if t.from == t.to {
                return Err(Error::config(
                    field,
                    "self-transitions are given by the mode's dwell",
                ));
            }
            prob(format!("{field}.probability"), t.probability)?;
            if t.duration == 0 {
                return Err(Error::config(
                    format!("{field}.duration"),
                    "must be at least 1",
                ));
            }
            rows[t.from] += t.probability;
        }
        for (i, m) in self.modes.iter().enumerate() {
            let sum = rows[i] + m.dwell;
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::config(
                    format!("mode.{i}"),
                    format!("dwell plus outgoing transition probabilities is {sum}, expected 1"),
                ));
            }
        }
        prob("outliers.type1_probability".into(), self.type1.probability)?;
        prob("outliers.type2_appear".into(), self.type2.appear)?;
        prob("outliers.type2_last".into(), self.type2.last)?;
        if self.type1.probability > 0.0 {
            dim(
                "outliers.type1_half_width".into(),
                self.type1.half_width.len(),
            )?;
        }
        if self.type2.appear > 0.0 {
            dim("outliers.type2_offset".into(), self.type2.offset.len())?;
        }
        let mut last_at = None;
        for a in &self.alterations {
            let field = format!("alterations.{}", a.at);
            if last_at.is_some_and(|l| a.at <= l) {
                return Err(Error::config(
                    field,
                    "trigger indices must be strictly increasing",
                ));
            }
            last_at = Some(a.at);
            match &a.kind {
                AlterationKind::MeanShift { mode, delta } => {
                    if *mode >= k {
                        return Err(Error::config(field, "refers to an undefined mode"));
                    }
                    dim(field, delta.len())?;
                }
                AlterationKind::GlobalOffset { delta } => dim(field, delta.len())?,
                AlterationKind::AddMode { mode } => {
                    if *mode >= k {
                        return Err(Error::config(field, "refers to an undefined mode"));
                    }
                    if *mode == 0 {
                        return Err(Error::config(field, "mode 0 is the initial mode"));
                    }
                }
            }
        }
        if self.substreams == 0 {
            return Err(Error::config("stream.substreams", "must be at least 1"));
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_document(&Document::read(path)?)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        Self::from_document(&Document::parse(text, origin)?)
    }

    pub fn from_document(doc: &Document) -> Result<Self> {
        let stream = doc
            .section("stream")
            .ok_or_else(|| Error::config("stream", "missing section"))?;
        stream.only(&["p", "seed", "substreams", "length"])?;
        let p: usize = stream.require_value("p")?;

        let mut modes = Vec::new();
        let mut transitions = Vec::new();
        let mut type1 = Type1Spec::default();
        let mut type2 = Type2Spec::default();
        let mut alterations = Vec::new();
        let mut mode_ids = Vec::new();

        for section in &doc.sections {
            let name = section.name.as_str();
            if name == "stream" {
                continue;
            } else if let Some(id) = name.strip_prefix("mode.") {
                let id: usize = id
                    .parse()
                    .map_err(|_| Error::config(name, "mode id must be a non-negative integer"))?;
                mode_ids.push(id);
                modes.push((id, parse_mode(section)?));
            } else if let Some(rest) = name.strip_prefix("transition.") {
                let (from, to) = rest
                    .split_once('.')
                    .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                    .ok_or_else(|| Error::config(name, "expected transition.<from>.<to>"))?;
                transitions.push(parse_transition(section, from, to)?);
            } else if name == "outliers" {
                section.only(&[
                    "type1_probability",
                    "type1_half_width",
                    "type2_appear",
                    "type2_last",
                    "type2_offset",
                ])?;
                type1.probability = section.parse_value("type1_probability")?.unwrap_or(0.0);
                type1.half_width = broadcast(section.parse_list("type1_half_width")?, p);
                type2.appear = section.parse_value("type2_appear")?.unwrap_or(0.0);
                type2.last = section.parse_value("type2_last")?.unwrap_or(0.0);
                type2.offset = section.parse_list("type2_offset")?.unwrap_or_default();
            } else if name == "alterations" {
                for e in &section.entries {
                    let at: usize = e.key.parse().map_err(|_| {
                        Error::config(format!("alterations.{}", e.key), "trigger must be an index")
                    })?;
                    alterations.push(Alteration {
                        at,
                        kind: parse_alteration(&e.value)
                            .map_err(|m| Error::config(format!("alterations.{at}"), m))?,
                    });
                }
            } else {
                return Err(Error::config(name, "unknown section"));
            }
        }

        modes.sort_by_key(|(id, _)| *id);
        for (expected, (id, _)) in modes.iter().enumerate() {
            if *id != expected {
                return Err(Error::config(
                    format!("mode.{id}"),
                    "mode ids must be 0, 1, 2, … without gaps",
                ));
            }
        }
        let cfg = StreamConfig {
            p,
            seed: stream.parse_value("seed")?.unwrap_or(0),
            substreams: stream.parse_value("substreams")?.unwrap_or(1),
            length: stream.parse_value("length")?.unwrap_or(0),
            modes: modes.into_iter().map(|(_, m)| m).collect(),
            transitions,
            type1,
            type2,
            alterations,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Renders the configuration in the text format read by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[stream]");
        let _ = writeln!(s, "p = {}", self.p);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "substreams = {}", self.substreams);
        let _ = writeln!(s, "length = {}", self.length);
        for (i, m) in self.modes.iter().enumerate() {
            let _ = writeln!(s, "\n[mode.{i}]");
            match &m.distribution {
                Distribution::Normal { mean, std } => {
                    let _ = writeln!(s, "distribution = normal");
                    let _ = writeln!(s, "mean = {}", format_list(mean));
                    let _ = writeln!(s, "std = {}", format_list(std));
                }
                Distribution::Uniform { low, high } => {
                    let _ = writeln!(s, "distribution = uniform");
                    let _ = writeln!(s, "low = {}", format_list(low));
                    let _ = writeln!(s, "high = {}", format_list(high));
                }
            }
            let _ = writeln!(s, "dwell = {}", m.dwell);
        }
        for t in &self.transitions {
            let _ = writeln!(s, "\n[transition.{}.{}]", t.from, t.to);
            let _ = writeln!(s, "probability = {}", t.probability);
            let _ = writeln!(s, "shape = {}", t.shape.name());
            let _ = writeln!(s, "duration = {}", t.duration);
        }
        let _ = writeln!(s, "\n[outliers]");
        let _ = writeln!(s, "type1_probability = {}", self.type1.probability);
        if !self.type1.half_width.is_empty() {
            let _ = writeln!(
                s,
                "type1_half_width = {}",
                format_list(&self.type1.half_width)
            );
        }
        let _ = writeln!(s, "type2_appear = {}", self.type2.appear);
        let _ = writeln!(s, "type2_last = {}", self.type2.last);
        if !self.type2.offset.is_empty() {
            let _ = writeln!(s, "type2_offset = {}", format_list(&self.type2.offset));
        }
        if !self.alterations.is_empty() {
            let _ = writeln!(s, "\n[alterations]");
            for a in &self.alterations {
                let v = match &a.kind {
                    AlterationKind::MeanShift { mode, delta } => {
                        format!("mean_shift {mode} {}", format_list(delta))
                    }
                    AlterationKind::GlobalOffset { delta } => {
                        format!("global_offset {}", format_list(delta))
                    }
                    AlterationKind::AddMode { mode } => format!("add_mode {mode}"),
                };
                let _ = writeln!(s, "{} = {v}", a.at);
            }
        }
        s
    }
}

fn broadcast(v: Option<Vec<f64>>, p: usize) -> Vec<f64> {
    match v {
        Some(v) if v.len() == 1 => vec![v[0]; p],
        Some(v) => v,
        None => Vec::new(),
    }
}

fn parse_mode(section: &Section) -> Result<ModeSpec> {
    let kind = section.require("distribution")?;
    let distribution = match kind {
        "normal" => {
            section.only(&["distribution", "mean", "std", "dwell"])?;
            Distribution::Normal {
                mean: section.require_list("mean")?,
                std: section.require_list("std")?,
            }
        }
        "uniform" => {
            section.only(&["distribution", "low", "high", "dwell"])?;
            Distribution::Uniform {
                low: section.require_list("low")?,
                high: section.require_list("high")?,
            }
        }
        other => {
            return Err(Error::config(
                format!("{}.distribution", section.name),
                format!("unknown distribution `{other}`"),
            ))
        }
    };
    Ok(ModeSpec {
        distribution,
        dwell: section.require_value("dwell")?,
    })
}

fn parse_transition(section: &Section, from: usize, to: usize) -> Result<TransitionSpec> {
    section.only(&["probability", "shape", "duration"])?;
    let shape = match section.get("shape").unwrap_or("linear") {
        "logarithmic" => Shape::Logarithmic,
        "linear" => Shape::Linear,
        "exponential" => Shape::Exponential,
        other => {
            return Err(Error::config(
                format!("{}.shape", section.name),
                format!("unknown shape `{other}`"),
            ))
        }
    };
    Ok(TransitionSpec {
        from,
        to,
        probability: section.require_value("probability")?,
        shape,
        duration: section.parse_value("duration")?.unwrap_or(1),
    })
}

fn parse_alteration(v: &str) -> std::result::Result<AlterationKind, String> {
    let (kind, rest) = v.split_once(char::is_whitespace).unwrap_or((v, ""));
    let rest = rest.trim();
    match kind {
        "mean_shift" => {
            let (mode, delta) = rest
                .split_once(char::is_whitespace)
                .ok_or("expected `mean_shift <mode> <delta>`")?;
            Ok(AlterationKind::MeanShift {
                mode: mode.parse().map_err(|_| format!("bad mode id `{mode}`"))?,
                delta: parse_f64_list(delta)?,
            })
        }
        "global_offset" => Ok(AlterationKind::GlobalOffset {
            delta: parse_f64_list(rest)?,
        }),
        "add_mode" => Ok(AlterationKind::AddMode {
            mode: rest.parse().map_err(|_| format!("bad mode id `{rest}`"))?,
        }),
        other => Err(format!("unknown alteration `{other}`")),
    }
}
