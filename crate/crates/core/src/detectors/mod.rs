//! Streaming outlier detectors sharing a learn / score / decide contract.
//!
//! Every detector orients its score so that larger means more outlying.

mod dycf;
mod dycg;

pub use dycf::Dycf;
pub use dycg::Dycg;

use crate::error::Result;

/// Uniform interface over the streaming detectors used by the harness.
pub trait Detector {
    fn name(&self) -> &'static str;

    /// Input dimension `p`.
    fn dim(&self) -> usize;

    /// Initializes the model from a batch of points, discarding any state.
    fn fit(&mut self, init: &[Vec<f64>]) -> Result<()>;

    /// Outlierness of `x`; larger is more outlying. Does not modify the model.
    fn score(&self, x: &[f64]) -> Result<f64>;

    /// Score at and above which the detector declares an outlier, or
    /// `None` when it has no intrinsic threshold.
    fn threshold(&self) -> Option<f64>;

    /// Decision rule of the detector, or `None` when it has no intrinsic
    /// threshold.
    fn is_outlier(&self, x: &[f64]) -> Result<Option<bool>>;

    /// Ingests one point.
    fn learn(&mut self, x: &[f64]) -> Result<()>;
}

impl<D: Detector + ?Sized> Detector for Box<D> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn fit(&mut self, init: &[Vec<f64>]) -> Result<()> {
        (**self).fit(init)
    }
    fn score(&self, x: &[f64]) -> Result<f64> {
        (**self).score(x)
    }
    fn threshold(&self) -> Option<f64> {
        (**self).threshold()
    }
    fn is_outlier(&self, x: &[f64]) -> Result<Option<bool>> {
        (**self).is_outlier(x)
    }
    fn learn(&mut self, x: &[f64]) -> Result<()> {
        (**self).learn(x)
    }
}

/// `d^{3p/2}`, evaluated exactly when `3p` is even.
pub fn gamma_dp(d: usize, p: usize) -> f64 {
    let d = d as f64;
    let three_p = 3 * p as i32;
    if three_p % 2 == 0 {
        d.powi(three_p / 2)
    } else {
        d.powi(three_p / 2) * d.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_dp(6, 2), 216.0);
        assert_eq!(gamma_dp(2, 2), 8.0);
        assert_eq!(gamma_dp(4, 1), 8.0);
        assert!((gamma_dp(2, 1) - 2f64.powf(1.5)).abs() < 1e-15);
        assert!((gamma_dp(6, 3) / 6f64.powf(4.5) - 1.0).abs() < 1e-15);
    }
}
