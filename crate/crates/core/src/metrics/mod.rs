//! Evaluation of scoring functions.
//!
//! [`auroc`] and [`average_precision`] rank outlier scores against labels.
//! [`em_auc`] and [`mv_auc`] need no labels: they compare the superlevel
//! sets of a normality score with the sample they are evaluated on.

mod report;
mod volume;

pub use report::{Aggregate, EvalReport, SubstreamResult};
pub use volume::{
    default_alpha_grid, default_t_grid, em_auc, mv_auc, LevelSets, DEFAULT_VOLUME_BUDGET,
};

use std::cmp::Ordering;
use std::time::Instant;

use crate::detectors::Detector;
use crate::error::{Error, Result};

fn check_ranking_input(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::UndefinedMetric(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::UndefinedMetric(format!("score {i} is NaN")));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedMetric(format!(
            "need both classes, got {pos} outliers and {neg} inliers"
        )));
    }
    Ok((pos, neg))
}

/// Area under the ROC curve: the probability that a random outlier
/// (`labels[i] == true`) scores above a random inlier, ties counting ½.
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check_ranking_input(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Sum of mid-ranks (1-based) of the outliers.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let mid_rank = (i + 1 + j) as f64 / 2.0;
        let outliers = order[i..j].iter().filter(|&&k| labels[k]).count();
        rank_sum += mid_rank * outliers as f64;
        i = j;
    }
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

/// `Σ_k (R_k − R_{k−1}) P_k` over the ranking by decreasing score; equal
/// scores keep their input order.
pub fn average_precision(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, _) = check_ranking_input(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));
    let mut hits = 0usize;
    let mut ap = 0.0;
    for (k, &i) in order.iter().enumerate() {
        if labels[i] {
            hits += 1;
            ap += hits as f64 / (k + 1) as f64;
        }
    }
    Ok(ap / pos as f64)
}

/// Mean wall-clock time of scoring then learning each point of `stream`.
pub fn measure_seconds_per_point<D: Detector + ?Sized>(
    detector: &mut D,
    stream: &[Vec<f64>],
) -> Result<f64> {
    if stream.is_empty() {
        return Err(Error::Contract("cannot time an empty stream".into()));
    }
    let start = Instant::now();
    for x in stream {
        std::hint::black_box(detector.score(x)?);
        detector.learn(x)?;
    }
    let total = start.elapsed().as_secs_f64();
    Ok(total.max(f64::MIN_POSITIVE) / stream.len() as f64)
}
