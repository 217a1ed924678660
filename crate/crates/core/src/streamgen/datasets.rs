use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::streamgen::{Label, LabeledSample, StreamConfig};

/// Where the two-disks outliers are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutlierRegion {
    /// Uniform in a ring of the given width around each disk, half of the
    /// outliers per ring.
    Annuli { width: f64 },
    /// Uniform in the disks' bounding box grown by `margin`, with both
    /// disks cut out.
    Box { margin: f64 },
}

/// Geometry of the static two-disks dataset: a dense small disk, a sparse
/// large disk, and uniform outliers around them.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoDisks {
    pub small_center: [f64; 2],
    pub small_radius: f64,
    pub small_count: usize,
    pub large_center: [f64; 2],
    pub large_radius: f64,
    pub large_count: usize,
    pub outlier_count: usize,
    pub outliers: OutlierRegion,
}

impl Default for TwoDisks {
    fn default() -> Self {
        TwoDisks {
            small_center: [0.0, 0.0],
            small_radius: 1.0,
            small_count: 5000,
            large_center: [6.0, 0.0],
            large_radius: 3.0,
            large_count: 1000,
            outlier_count: 50,
            outliers: OutlierRegion::Annuli { width: 0.75 },
        }
    }
}

impl TwoDisks {
    /// `[x_min, x_max, y_min, y_max]` of the disks grown by `margin`.
    pub fn bounding_box(&self, margin: f64) -> [f64; 4] {
        let disks = [
            (self.small_center, self.small_radius),
            (self.large_center, self.large_radius),
        ];
        let lo = |k: usize| {
            disks
                .iter()
                .map(|(c, r)| c[k] - r)
                .fold(f64::INFINITY, f64::min)
        };
        let hi = |k: usize| {
            disks
                .iter()
                .map(|(c, r)| c[k] + r)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        [
            lo(0) - margin,
            hi(0) + margin,
            lo(1) - margin,
            hi(1) + margin,
        ]
    }

    pub fn in_small(&self, x: &[f64]) -> bool {
        dist2(x, &self.small_center) <= self.small_radius * self.small_radius
    }

    pub fn in_large(&self, x: &[f64]) -> bool {
        dist2(x, &self.large_center) <= self.large_radius * self.large_radius
    }

    /// Points in shuffled order with indices `0..n`.
    pub fn generate(&self, seed: u64) -> Vec<LabeledSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points =
            Vec::with_capacity(self.small_count + self.large_count + self.outlier_count);
        for _ in 0..self.small_count {
            points.push((
                disk_point(&mut rng, self.small_center, self.small_radius),
                Label::Normal,
            ));
        }
        for _ in 0..self.large_count {
            points.push((
                disk_point(&mut rng, self.large_center, self.large_radius),
                Label::Normal,
            ));
        }
        match self.outliers {
            OutlierRegion::Annuli { width } => {
                let n_large = self.outlier_count / 2;
                let rings = [
                    (
                        self.small_center,
                        self.small_radius,
                        self.outlier_count - n_large,
                    ),
                    (self.large_center, self.large_radius, n_large),
                ];
                for (c, r, n) in rings {
                    for _ in 0..n {
                        points.push((annulus_point(&mut rng, c, r, r + width), Label::Type1));
                    }
                }
            }
            OutlierRegion::Box { margin } => {
                let [x0, x1, y0, y1] = self.bounding_box(margin);
                let mut outliers = 0;
                while outliers < self.outlier_count {
                    let x = vec![rng.random_range(x0..x1), rng.random_range(y0..y1)];
                    if !self.in_small(&x) && !self.in_large(&x) {
                        points.push((x, Label::Type1));
                        outliers += 1;
                    }
                }
            }
        }
        points.shuffle(&mut rng);
        points
            .into_iter()
            .enumerate()
            .map(|(i, (x, label))| LabeledSample {
                x,
                index: i as u64,
                label: Some(label),
            })
            .collect()
    }
}

fn dist2(x: &[f64], c: &[f64; 2]) -> f64 {
    (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)
}

fn disk_point(rng: &mut ChaCha8Rng, c: [f64; 2], r: f64) -> Vec<f64> {
    annulus_point(rng, c, 0.0, r)
}

/// Uniform in `r0 ≤ |x − c| ≤ r1`.
fn annulus_point(rng: &mut ChaCha8Rng, c: [f64; 2], r0: f64, r1: f64) -> Vec<f64> {
    let rho = (r0 * r0 + (r1 * r1 - r0 * r0) * rng.random::<f64>()).sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    vec![c[0] + rho * theta.cos(), c[1] + rho * theta.sin()]
}

/// The default two-disks dataset: 6050 points in the plane, 50 of them
/// labeled `type1`.
pub fn generate_two_disks(seed: u64) -> Vec<LabeledSample> {
    TwoDisks::default().generate(seed)
}

const SETUPS: [(&str, &str); 3] = [
    ("setup1.cfg", include_str!("../../configs/setup1.cfg")),
    ("setup2.cfg", include_str!("../../configs/setup2.cfg")),
    ("setup3.cfg", include_str!("../../configs/setup3.cfg")),
];

/// The three shipped evaluation setups, reseeded with `seed`:
///
/// 1. bivariate, one mode's mean shifts mid-stream;
/// 2. bivariate, a global offset is applied mid-stream;
/// 3. trivariate, a new mode appears mid-stream.
pub fn three_setups(seed: u64) -> Vec<StreamConfig> {
    SETUPS
        .iter()
        .map(|(name, text)| {
            let mut cfg = StreamConfig::parse(text, name).expect("shipped setup is valid");
            cfg.seed = seed;
            cfg
        })
        .collect()
}
