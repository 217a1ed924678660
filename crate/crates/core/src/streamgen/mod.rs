//! Labeled synthetic data streams.
//!
//! A stream is driven by a Markov chain over operating modes. While the
//! chain dwells in a mode, points are drawn from the mode's distribution;
//! a transition moves the center from one mode to the next over a fixed
//! number of points along a shaped path. Type-I outliers replace single
//! points with uniform draws around the current center, type-II outliers
//! add a persistent offset to consecutive points, and timed alterations
//! change the process mid-stream.

mod config;
mod csv_io;
mod datasets;

pub use config::{
    Alteration, AlterationKind, Distribution, ModeSpec, Shape, StreamConfig, TransitionSpec,
    Type1Spec, Type2Spec,
};
pub use csv_io::{read_csv, write_csv, CsvReader};
pub use datasets::{generate_two_disks, three_setups, OutlierRegion, TwoDisks};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Normal,
    Type1,
    Type2,
}

impl Label {
    pub fn is_outlier(self) -> bool {
        self != Label::Normal
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Normal => "normal",
            Label::Type1 => "type1",
            Label::Type2 => "type2",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "normal" => Ok(Label::Normal),
            "type1" => Ok(Label::Type1),
            "type2" => Ok(Label::Type2),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub x: Vec<f64>,
    pub index: u64,
    /// `None` for unlabeled data.
    pub label: Option<Label>,
}

/// Where the Markov chain is before the next point is emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeState {
    Mode(usize),
    Transition { from: usize, to: usize },
}

#[derive(Debug, Clone, Copy)]
enum State {
    Mode(usize),
    Transition { from: usize, to: usize, step: usize },
}

/// Point-by-point generator for one (sub-)stream.
///
/// Sub-stream `k` draws from the ChaCha stream `k` of the configured seed,
/// so sub-streams are independent and each is reproducible on its own.
#[derive(Debug, Clone)]
pub struct StreamGenerator {
    modes: Vec<ModeSpec>,
    active: Vec<bool>,
    /// Outgoing edges per mode, in configuration order.
    edges: Vec<Vec<TransitionSpec>>,
    type1: Type1Spec,
    type2: Type2Spec,
    alterations: Vec<Alteration>,
    next_alteration: usize,
    offset: Vec<f64>,
    state: State,
    type2_active: bool,
    index: u64,
    rng: ChaCha8Rng,
}

impl StreamGenerator {
    pub fn new(config: &StreamConfig, substream: u64) -> Result<Self> {
        config.validate()?;
        let k = config.modes.len();
        let mut active = vec![true; k];
        for a in &config.alterations {
            if let AlterationKind::AddMode { mode } = a.kind {
                active[mode] = false;
            }
        }
        let mut edges = vec![Vec::new(); k];
        for t in &config.transitions {
            edges[t.from].push(t.clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(substream);
        Ok(StreamGenerator {
            modes: config.modes.clone(),
            active,
            edges,
            type1: config.type1.clone(),
            type2: config.type2.clone(),
            alterations: config.alterations.clone(),
            next_alteration: 0,
            offset: vec![0.0; config.p],
            state: State::Mode(0),
            type2_active: false,
            index: 0,
            rng,
        })
    }

    pub fn state(&self) -> ModeState {
        match self.state {
            State::Mode(k) => ModeState::Mode(k),
            State::Transition { from, to, .. } => ModeState::Transition { from, to },
        }
    }

    /// Index of the next point.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn next_sample(&mut self) -> LabeledSample {
        self.apply_alterations();
        if let State::Mode(k) = self.state {
            if let Some(to) = self.choose_next(k) {
                self.state = State::Transition {
                    from: k,
                    to,
                    step: 0,
                };
            }
        }
        let (center, spread_mode) = self.current_center();
        let normal = self.draw_normal(&center, spread_mode);
        let (mut x, label) = self.inject_outliers(normal, &center);
        for (xi, o) in x.iter_mut().zip(&self.offset) {
            *xi += o;
        }
        self.advance_transition();
        let sample = LabeledSample {
            x,
            index: self.index,
            label: Some(label),
        };
        self.index += 1;
        sample
    }

    fn apply_alterations(&mut self) {
        while let Some(a) = self.alterations.get(self.next_alteration) {
            if a.at as u64 != self.index {
                break;
            }
            match &a.kind {
                AlterationKind::MeanShift { mode, delta } => {
                    self.modes[*mode].distribution.shift(delta)
                }
                AlterationKind::GlobalOffset { delta } => {
                    self.offset.iter_mut().zip(delta).for_each(|(o, d)| *o += d)
                }
                AlterationKind::AddMode { mode } => self.active[*mode] = true,
            }
            self.next_alteration += 1;
        }
    }

    /// One Markov step out of mode `k`. Mass on edges into dormant modes
    /// stays in `k`.
    fn choose_next(&mut self, k: usize) -> Option<usize> {
        let u: f64 = self.rng.random();
        let mut acc = self.modes[k].dwell;
        if u < acc {
            return None;
        }
        for e in &self.edges[k] {
            acc += e.probability;
            if u < acc {
                return self.active[e.to].then_some(e.to);
            }
        }
        None
    }

    fn current_center(&self) -> (Vec<f64>, usize) {
        match self.state {
            State::Mode(k) => (self.modes[k].distribution.center(), k),
            State::Transition { from, to, step } => {
                let edge = self.edges[from].iter().find(|e| e.to == to).unwrap();
                let t = edge.shape.eval((step + 1) as f64 / edge.duration as f64);
                let a = self.modes[from].distribution.center();
                let b = self.modes[to].distribution.center();
                let c = a.iter().zip(&b).map(|(a, b)| a + t * (b - a)).collect();
                (c, to)
            }
        }
    }

    fn draw_normal(&mut self, center: &[f64], mode: usize) -> Vec<f64> {
        match &self.modes[mode].distribution {
            Distribution::Normal { std, .. } => center
                .iter()
                .zip(std)
                .map(|(c, s)| c + s * self.rng.sample::<f64, _>(StandardNormal))
                .collect(),
            Distribution::Uniform { low, high } => center
                .iter()
                .zip(low.iter().zip(high))
                .map(|(c, (l, h))| c + (h - l) * (self.rng.random::<f64>() - 0.5))
                .collect(),
        }
    }

    fn inject_outliers(&mut self, normal: Vec<f64>, center: &[f64]) -> (Vec<f64>, Label) {
        if self.type2_active {
            if self.rng.random::<f64>() < self.type2.last {
                return (self.with_type2_offset(normal), Label::Type2);
            }
            self.type2_active = false;
        }
        if self.type1.probability > 0.0 && self.rng.random::<f64>() < self.type1.probability {
            let x = center
                .iter()
                .zip(&self.type1.half_width)
                .map(|(c, w)| c + w * (2.0 * self.rng.random::<f64>() - 1.0))
                .collect();
            return (x, Label::Type1);
        }
        if self.type2.appear > 0.0 && self.rng.random::<f64>() < self.type2.appear {
            self.type2_active = true;
            return (self.with_type2_offset(normal), Label::Type2);
        }
        (normal, Label::Normal)
    }

    fn with_type2_offset(&self, mut x: Vec<f64>) -> Vec<f64> {
        x.iter_mut()
            .zip(&self.type2.offset)
            .for_each(|(a, b)| *a += b);
        x
    }

    fn advance_transition(&mut self) {
        if let State::Transition { from, to, step } = self.state {
            let duration = self.edges[from]
                .iter()
                .find(|e| e.to == to)
                .unwrap()
                .duration;
            self.state = if step + 1 >= duration {
                State::Mode(to)
            } else {
                State::Transition {
                    from,
                    to,
                    step: step + 1,
                }
            };
        }
    }
}

impl Iterator for StreamGenerator {
    type Item = LabeledSample;

    fn next(&mut self) -> Option<LabeledSample> {
        Some(self.next_sample())
    }
}

/// First `n` points of sub-stream 0.
pub fn generate(config: &StreamConfig, n: usize) -> Result<Vec<LabeledSample>> {
    if n == 0 {
        return Err(Error::config("n", "must be at least 1"));
    }
    Ok(StreamGenerator::new(config, 0)?.take(n).collect())
}

/// `config.substreams` independent sub-streams of `config.length` points.
pub fn generate_substreams(config: &StreamConfig) -> Result<Vec<Vec<LabeledSample>>> {
    if config.length == 0 {
        return Err(Error::config("stream.length", "must be at least 1"));
    }
    (0..config.substreams as u64)
        .map(|k| {
            Ok(StreamGenerator::new(config, k)?
                .take(config.length)
                .collect())
        })
        .collect()
}
