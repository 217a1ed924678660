//! Windowed multivariate kernel density estimation, the comparison baseline.
//!
//! `f(x) = Σ w_i K_H(x − x_i) / Σ w_i` over the buffered points, with
//! `K_H(u) = |H|^{-1/2} K(H^{-1/2} u)`. Weights are 1 except under a damped
//! window. In automatic mode `H` is diagonal and follows Scott's rule,
//! `H_ii = (σ_i · m^{-1/(p+4)})²`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::detectors::Detector;
use crate::error::{Error, Result};

/// Standard deviations below this are clamped so `H` stays non-singular.
pub const SIGMA_FLOOR: f64 = 1e-6;

/// Damped-window points whose weight falls below this are evicted.
pub const DAMPED_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Gaussian,
    Epanechnikov,
}

/// Which past points the estimator keeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Windowing {
    /// The last `W` points.
    Sliding(usize),
    /// Every point since the landmark (the last [`KdeWindow::set_landmark`]
    /// call, or the start of the stream).
    Landmark,
    /// Every point, weighted by `0.5^{age / half_life}`; points lighter than
    /// [`DAMPED_CUTOFF`] are dropped.
    Damped { half_life: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Bandwidth {
    /// Diagonal Scott's rule recomputed from the buffer after every change.
    Scott,
    /// A fixed symmetric positive-definite `p × p` matrix.
    Fixed(DMatrix<f64>),
}

#[derive(Debug, Clone)]
enum Precision {
    Diagonal(Vec<f64>),
    // lower Cholesky factor of H, column-major
    Full(DMatrix<f64>),
}

/// FIFO buffer of points stored contiguously.
#[derive(Debug, Clone)]
struct Ring {
    p: usize,
    data: Vec<f64>,
    arrivals: Vec<u64>,
    head: usize,
    len: usize,
}

impl Ring {
    fn new(p: usize, cap: usize) -> Self {
        let cap = cap.max(1);
        Ring {
            p,
            data: vec![0.0; cap * p],
            arrivals: vec![0; cap],
            head: 0,
            len: 0,
        }
    }

    fn cap(&self) -> usize {
        self.arrivals.len()
    }

    fn push(&mut self, x: &[f64], arrival: u64) {
        if self.len == self.cap() {
            let mut grown = Ring::new(self.p, 2 * self.cap());
            for (y, a) in self.iter() {
                grown.push(y, a);
            }
            *self = grown;
        }
        let i = (self.head + self.len) % self.cap();
        self.data[i * self.p..(i + 1) * self.p].copy_from_slice(x);
        self.arrivals[i] = arrival;
        self.len += 1;
    }

    fn pop_front(&mut self) {
        if self.len > 0 {
            self.head = (self.head + 1) % self.cap();
            self.len -= 1;
        }
    }

    fn front_arrival(&self) -> Option<u64> {
        (self.len > 0).then(|| self.arrivals[self.head])
    }

    fn clear(&mut self) {
        self.head = 0;
        self.len = 0;
    }

    fn iter(&self) -> impl Iterator<Item = (&[f64], u64)> + '_ {
        let cap = self.cap();
        (0..self.len).map(move |k| {
            let i = (self.head + k) % cap;
            (&self.data[i * self.p..(i + 1) * self.p], self.arrivals[i])
        })
    }
}

/// Windowed kernel density estimator.
#[derive(Debug, Clone)]
pub struct KdeWindow {
    p: usize,
    windowing: Windowing,
    kernel: Kernel,
    bandwidth: Bandwidth,
    buffer: Ring,
    seen: u64,
    precision: Precision,
    // |H|^{-1/2} times the kernel's normalizing constant
    norm: f64,
}

impl KdeWindow {
    pub const DEFAULT_WINDOW: usize = 1000;

    pub fn new(
        p: usize,
        windowing: Windowing,
        kernel: Kernel,
        bandwidth: Bandwidth,
    ) -> Result<Self> {
        if p == 0 {
            return Err(Error::config("p", "must be at least 1"));
        }
        match windowing {
            Windowing::Sliding(0) => return Err(Error::config("window", "must be at least 1")),
            Windowing::Damped { half_life } if !(half_life > 0.0 && half_life.is_finite()) => {
                return Err(Error::config("half_life", "must be positive"))
            }
            _ => {}
        }
        let initial_cap = match windowing {
            Windowing::Sliding(w) => w,
            _ => 64,
        };
        let mut kde = KdeWindow {
            p,
            windowing,
            kernel,
            bandwidth,
            buffer: Ring::new(p, initial_cap),
            seen: 0,
            precision: Precision::Diagonal(vec![1.0; p]),
            norm: 1.0,
        };
        if let Bandwidth::Fixed(h) = &kde.bandwidth {
            kde.set_full_precision(h.clone())?;
        }
        Ok(kde)
    }

    /// Gaussian kernel, Scott's rule, sliding window of `capacity` points.
    pub fn sliding(p: usize, capacity: usize) -> Result<Self> {
        Self::new(
            p,
            Windowing::Sliding(capacity),
            Kernel::Gaussian,
            Bandwidth::Scott,
        )
    }

    /// Gaussian kernel, Scott's rule, no eviction.
    pub fn unbounded(p: usize) -> Result<Self> {
        Self::new(p, Windowing::Landmark, Kernel::Gaussian, Bandwidth::Scott)
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.buffer.len
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.len == 0
    }

    pub fn windowing(&self) -> Windowing {
        self.windowing
    }

    /// Buffered points, oldest first.
    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.buffer.iter().map(|(x, _)| x)
    }

    /// Current bandwidth matrix `H`.
    pub fn bandwidth_matrix(&self) -> DMatrix<f64> {
        match &self.precision {
            Precision::Diagonal(inv) => {
                DMatrix::from_diagonal(&inv.iter().map(|v| 1.0 / v).collect::<Vec<_>>().into())
            }
            Precision::Full(l) => l * l.transpose(),
        }
    }

    /// Drops every buffered point: the landmark moves to "now".
    pub fn set_landmark(&mut self) {
        self.buffer.clear();
    }

    /// Appends `x`, applies the window's eviction rule and refreshes the
    /// automatic bandwidth.
    pub fn learn(&mut self, x: &[f64]) -> Result<()> {
        self.push(x)?;
        self.refresh_bandwidth();
        Ok(())
    }

    /// Replaces the buffer with `points` (subject to the window) and
    /// refreshes the bandwidth once.
    pub fn fit(&mut self, points: &[Vec<f64>]) -> Result<()> {
        self.buffer.clear();
        self.seen = 0;
        for x in points {
            self.push(x)?;
        }
        self.refresh_bandwidth();
        Ok(())
    }

    fn push(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.p {
            return Err(Error::Dimension {
                expected: self.p,
                got: x.len(),
            });
        }
        if let Windowing::Sliding(w) = self.windowing {
            while self.buffer.len >= w {
                self.buffer.pop_front();
            }
        }
        self.buffer.push(x, self.seen);
        self.seen += 1;
        if let Windowing::Damped { .. } = self.windowing {
            while let Some(a) = self.buffer.front_arrival() {
                if self.weight(a) >= DAMPED_CUTOFF {
                    break;
                }
                self.buffer.pop_front();
            }
        }
        Ok(())
    }

    fn weight(&self, arrival: u64) -> f64 {
        match self.windowing {
            Windowing::Damped { half_life } => {
                let age = (self.seen - 1 - arrival) as f64;
                0.5f64.powf(age / half_life)
            }
            _ => 1.0,
        }
    }

    fn refresh_bandwidth(&mut self) {
        if self.bandwidth != Bandwidth::Scott || self.buffer.len == 0 {
            return;
        }
        let p = self.p;
        let mut wsum = 0.0;
        let mut w2sum = 0.0;
        let mut mean = vec![0.0; p];
        for (x, a) in self.buffer.iter() {
            let w = self.weight(a);
            wsum += w;
            w2sum += w * w;
            for i in 0..p {
                mean[i] += w * x[i];
            }
        }
        mean.iter_mut().for_each(|m| *m /= wsum);
        let mut var = vec![0.0; p];
        for (x, a) in self.buffer.iter() {
            let w = self.weight(a);
            for i in 0..p {
                let dx = x[i] - mean[i];
                var[i] += w * dx * dx;
            }
        }
        // effective sample size; equals m for unit weights
        let m_eff = wsum * wsum / w2sum;
        let factor = m_eff.powf(-1.0 / (p as f64 + 4.0));
        let mut inv_h = Vec::with_capacity(p);
        let mut det = 1.0;
        for v in var {
            // unbiased (reliability-weighted) variance
            let sigma = if m_eff > 1.0 {
                (v / (wsum - w2sum / wsum)).sqrt()
            } else {
                0.0
            };
            let sigma = if sigma.is_finite() {
                sigma.max(SIGMA_FLOOR)
            } else {
                SIGMA_FLOOR
            };
            let h = (sigma * factor).powi(2);
            det *= h;
            inv_h.push(1.0 / h);
        }
        self.norm = self.kernel_constant() / det.sqrt();
        self.precision = Precision::Diagonal(inv_h);
    }

    fn set_full_precision(&mut self, h: DMatrix<f64>) -> Result<()> {
        if h.nrows() != self.p || h.ncols() != self.p {
            return Err(Error::config(
                "bandwidth",
                format!("must be {0}×{0}", self.p),
            ));
        }
        if (h.clone() - h.transpose()).amax() > 1e-12 * h.amax() {
            return Err(Error::config("bandwidth", "must be symmetric"));
        }
        let chol = h
            .cholesky()
            .ok_or_else(|| Error::config("bandwidth", "must be positive definite"))?;
        let l = chol.unpack();
        let det_sqrt: f64 = l.diagonal().iter().product();
        self.norm = self.kernel_constant() / det_sqrt;
        self.precision = Precision::Full(l);
        Ok(())
    }

    fn kernel_constant(&self) -> f64 {
        let p = self.p as f64;
        match self.kernel {
            Kernel::Gaussian => (2.0 * PI).powf(-p / 2.0),
            Kernel::Epanechnikov => (p + 2.0) / (2.0 * unit_ball_volume(self.p)),
        }
    }

    fn profile(&self, r2: f64) -> f64 {
        match self.kernel {
            Kernel::Gaussian => (-0.5 * r2).exp(),
            Kernel::Epanechnikov => (1.0 - r2).max(0.0),
        }
    }

    /// Kernel density estimate at `x`.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        if self.buffer.len == 0 {
            return Err(Error::NotFitted);
        }
        if x.len() != self.p {
            return Err(Error::Dimension {
                expected: self.p,
                got: x.len(),
            });
        }
        let damped = matches!(self.windowing, Windowing::Damped { .. });
        let mut acc = 0.0;
        let mut wsum = 0.0;
        match &self.precision {
            Precision::Diagonal(inv_h) => {
                for (y, a) in self.buffer.iter() {
                    let r2: f64 = x
                        .iter()
                        .zip(y)
                        .zip(inv_h)
                        .map(|((xi, yi), ih)| (xi - yi) * (xi - yi) * ih)
                        .sum();
                    let w = if damped { self.weight(a) } else { 1.0 };
                    acc += w * self.profile(r2);
                    wsum += w;
                }
            }
            Precision::Full(l) => {
                let mut z = vec![0.0; self.p];
                for (y, a) in self.buffer.iter() {
                    for i in 0..self.p {
                        z[i] = x[i] - y[i];
                    }
                    let r2 = whitened_norm2(l, &mut z);
                    let w = if damped { self.weight(a) } else { 1.0 };
                    acc += w * self.profile(r2);
                    wsum += w;
                }
            }
        }
        Ok(self.norm * acc / wsum)
    }

    /// Negated density, so larger means more outlying.
    pub fn outlier_score(&self, x: &[f64]) -> Result<f64> {
        Ok(-self.density(x)?)
    }
}

// ‖L⁻¹ z‖² by forward substitution; overwrites z.
fn whitened_norm2(l: &DMatrix<f64>, z: &mut [f64]) -> f64 {
    let p = z.len();
    let mut out = 0.0;
    for i in 0..p {
        let mut v = z[i];
        for k in 0..i {
            v -= l[(i, k)] * z[k];
        }
        v /= l[(i, i)];
        z[i] = v;
        out += v * v;
    }
    out
}

/// Volume of the unit ball in `R^p`.
pub fn unit_ball_volume(p: usize) -> f64 {
    // V_p = V_{p-2} · 2π / p
    let (mut v, start) = if p.is_multiple_of(2) {
        (1.0, 2)
    } else {
        (2.0, 3)
    };
    let mut k = start;
    while k <= p {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

impl Detector for KdeWindow {
    fn name(&self) -> &'static str {
        "KDE"
    }

    fn dim(&self) -> usize {
        self.p
    }

    fn fit(&mut self, init: &[Vec<f64>]) -> Result<()> {
        KdeWindow::fit(self, init)
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        self.outlier_score(x)
    }

    fn threshold(&self) -> Option<f64> {
        None
    }

    fn is_outlier(&self, _x: &[f64]) -> Result<Option<bool>> {
        Ok(None)
    }

    fn learn(&mut self, x: &[f64]) -> Result<()> {
        KdeWindow::learn(self, x)
    }
}
