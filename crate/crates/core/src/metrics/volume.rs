use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_VOLUME_BUDGET: usize = 10_000;

/// 100 logarithmically spaced levels over `[0.01 / V, 100 / V]`.
pub fn default_t_grid(box_volume: f64) -> Vec<f64> {
    let (lo, hi) = ((0.01 / box_volume).ln(), (100.0 / box_volume).ln());
    (0..100)
        .map(|i| (lo + (hi - lo) * i as f64 / 99.0).exp())
        .collect()
}

/// 50 masses evenly spaced over `[0.90, 0.999]`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..50).map(|i| 0.90 + 0.099 * i as f64 / 49.0).collect()
}

/// Superlevel sets `{s ≥ u}` of a normality score `s`, measured by the
/// empirical mass of a sample and by Monte Carlo volume over the sample's
/// bounding box. Thresholds range over the observed sample scores.
#[derive(Debug, Clone)]
pub struct LevelSets {
    /// Sample scores, decreasing.
    data: Vec<f64>,
    /// Scores of uniform draws in the box, decreasing.
    uniform: Vec<f64>,
    box_volume: f64,
}

impl LevelSets {
    pub fn new<F>(mut score: F, samples: &[Vec<f64>], budget: usize, seed: u64) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let first = samples
            .first()
            .ok_or_else(|| Error::UndefinedMetric("empty sample".into()))?;
        if budget == 0 {
            return Err(Error::UndefinedMetric(
                "volume budget must be positive".into(),
            ));
        }
        let p = first.len();
        let mut lo = first.clone();
        let mut hi = first.clone();
        for x in samples {
            if x.len() != p {
                return Err(Error::Dimension {
                    expected: p,
                    got: x.len(),
                });
            }
            for k in 0..p {
                lo[k] = lo[k].min(x[k]);
                hi[k] = hi[k].max(x[k]);
            }
        }
        let box_volume: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
        if !(box_volume > 0.0 && box_volume.is_finite()) {
            return Err(Error::UndefinedMetric(format!(
                "bounding box volume is {box_volume}"
            )));
        }
        let mut data = samples
            .iter()
            .map(|x| score(x))
            .collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = vec![0.0; p];
        let mut uniform = Vec::with_capacity(budget);
        for _ in 0..budget {
            for k in 0..p {
                u[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
            }
            uniform.push(score(&u)?);
        }
        if data.iter().chain(&uniform).any(|s| s.is_nan()) {
            return Err(Error::UndefinedMetric("score function returned NaN".into()));
        }
        data.sort_by(|a, b| b.total_cmp(a));
        uniform.sort_by(|a, b| b.total_cmp(a));
        Ok(LevelSets {
            data,
            uniform,
            box_volume,
        })
    }

    pub fn box_volume(&self) -> f64 {
        self.box_volume
    }

    /// `(mass, volume)` of `{s ≥ u}` for every distinct sample score `u`,
    /// from the smallest set to the largest.
    fn nested_sets(&self) -> Vec<(f64, f64)> {
        let n = self.data.len() as f64;
        let m = self.uniform.len() as f64;
        let mut out = Vec::new();
        let mut j = 0;
        let mut i = 0;
        while i < self.data.len() {
            let u = self.data[i];
            while i < self.data.len() && self.data[i] >= u {
                i += 1;
            }
            while j < self.uniform.len() && self.uniform[j] >= u {
                j += 1;
            }
            out.push((i as f64 / n, self.box_volume * j as f64 / m));
        }
        out
    }

    /// `EM(t) = max_u mass(u) − t · volume(u)`, including the empty set.
    pub fn em_curve(&self, t_grid: &[f64]) -> Vec<f64> {
        let sets = self.nested_sets();
        t_grid
            .iter()
            .map(|&t| {
                sets.iter()
                    .map(|(mass, vol)| mass - t * vol)
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Trapezoidal area under [`em_curve`](Self::em_curve).
    pub fn em_area(&self, t_grid: &[f64]) -> f64 {
        trapezoid(t_grid, &self.em_curve(t_grid))
    }

    /// Trapezoidal area under [`mv_curve`](Self::mv_curve).
    pub fn mv_area(&self, alpha_grid: &[f64]) -> f64 {
        trapezoid(alpha_grid, &self.mv_curve(alpha_grid))
    }

    /// `MV(α)`: volume of the smallest superlevel set with mass ≥ α.
    pub fn mv_curve(&self, alpha_grid: &[f64]) -> Vec<f64> {
        let sets = self.nested_sets();
        alpha_grid
            .iter()
            .map(|&a| {
                sets.iter()
                    .find(|(mass, _)| *mass >= a)
                    .map_or(self.box_volume, |(_, vol)| *vol)
            })
            .collect()
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
        .sum()
}

fn check_grid(grid: &[f64], name: &str, valid: impl Fn(f64) -> bool) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::UndefinedMetric(format!(
            "{name} needs at least two levels"
        )));
    }
    if !grid.iter().all(|&v| valid(v)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::UndefinedMetric(format!(
            "{name} must be increasing and in range"
        )));
    }
    Ok(())
}

/// Area under the excess-mass curve of the normality score `score`
/// (higher means more normal). `t_grid = None` selects
/// [`default_t_grid`] for the sample's bounding box. Higher is better.
pub fn em_auc<F>(
    score: F,
    samples: &[Vec<f64>],
    t_grid: Option<&[f64]>,
    volume_budget: usize,
    seed: u64,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let sets = LevelSets::new(score, samples, volume_budget, seed)?;
    let grid = t_grid.map_or_else(|| default_t_grid(sets.box_volume()), <[f64]>::to_vec);
    check_grid(&grid, "t_grid", |t| t > 0.0)?;
    Ok(sets.em_area(&grid))
}

/// Area under the mass-volume curve of the normality score `score`.
/// `alpha_grid = None` selects [`default_alpha_grid`]. Lower is better.
pub fn mv_auc<F>(
    score: F,
    samples: &[Vec<f64>],
    alpha_grid: Option<&[f64]>,
    volume_budget: usize,
    seed: u64,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let sets = LevelSets::new(score, samples, volume_budget, seed)?;
    let grid = alpha_grid.map_or_else(default_alpha_grid, <[f64]>::to_vec);
    check_grid(&grid, "alpha_grid", |a| a > 0.0 && a < 1.0)?;
    Ok(sets.mv_area(&grid))
}
