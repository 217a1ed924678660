use crate::basis::MonomialBasis;
use crate::detectors::{gamma_dp, Detector};
use crate::error::{Error, Result};
use crate::moments::{InputScaling, MomentConfig, MomentModel};
use crate::snapshot::{RecordReader, RecordWriter};

/// Dynamic Christoffel Function detector.
///
/// Scores a point by `S(x) = Q(x) / γ` with `γ = c · d^{3p/2}` and flags it
/// as an outlier when `S(x) ≥ 1`. The single modelling knob is the degree
/// `d`; `c` defaults to 1.
#[derive(Debug, Clone)]
pub struct Dycf {
    moments: MomentModel,
    c: f64,
    gamma: f64,
}

impl Dycf {
    pub const DEFAULT_DEGREE: usize = 6;

    /// Empty detector of dimension `p` and degree `d ≥ 1`.
    pub fn new(p: usize, d: usize, config: MomentConfig) -> Result<Self> {
        Self::from_moments(MomentModel::new(basis(p, d)?, config)?)
    }

    /// Detector batch-fitted on `samples`.
    pub fn fit_batch(samples: &[Vec<f64>], d: usize, config: MomentConfig) -> Result<Self> {
        let p = samples.first().map(Vec::len).ok_or(Error::NotFitted)?;
        Self::from_moments(MomentModel::fit_batch(samples, basis(p, d)?, config)?)
    }

    pub(crate) fn fit_batch_scaled(
        samples: &[Vec<f64>],
        d: usize,
        config: MomentConfig,
        scaling: Option<InputScaling>,
    ) -> Result<Self> {
        let p = samples.first().map(Vec::len).ok_or(Error::NotFitted)?;
        Self::from_moments(MomentModel::fit_batch_scaled(
            samples,
            basis(p, d)?,
            config,
            scaling,
        )?)
    }

    pub fn from_moments(moments: MomentModel) -> Result<Self> {
        let d = moments.basis().degree();
        if d == 0 {
            return Err(Error::InvalidBasis("DyCF needs degree d ≥ 1".into()));
        }
        let gamma = gamma_dp(d, moments.basis().dim());
        Ok(Dycf {
            moments,
            c: 1.0,
            gamma,
        })
    }

    pub fn with_c(mut self, c: f64) -> Result<Self> {
        self.set_c(c)?;
        Ok(self)
    }

    pub fn set_c(&mut self, c: f64) -> Result<()> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::config("c", "must be a positive finite number"));
        }
        self.c = c;
        self.gamma = c * gamma_dp(self.degree(), self.moments.basis().dim());
        Ok(())
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Level-set threshold `γ = c · d^{3p/2}`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn degree(&self) -> usize {
        self.moments.basis().degree()
    }

    pub fn n(&self) -> u64 {
        self.moments.n()
    }

    pub fn moments(&self) -> &MomentModel {
        &self.moments
    }

    /// Fewer samples than monomials have been seen; scores rely on the
    /// regularization term.
    pub fn is_underdetermined(&self) -> bool {
        self.moments.is_underdetermined()
    }

    /// `S(x) = Q(x) / γ`.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        Ok(self.moments.score_q(x)? / self.gamma)
    }

    /// `S(x) ≥ 1`, equivalently `Q(x) ≥ γ`.
    pub fn is_outlier(&self, x: &[f64]) -> Result<bool> {
        Ok(self.moments.score_q(x)? >= self.gamma)
    }

    pub fn learn(&mut self, x: &[f64]) -> Result<()> {
        self.moments.update(x)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = RecordWriter::new();
        w.bytes(b"DYCF");
        w.u8(1);
        w.f64(self.c);
        self.moments.write_record(&mut w);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = RecordReader::new(bytes);
        r.expect(b"DYCF")?;
        let version = r.u8()?;
        if version != 1 {
            return Err(Error::Snapshot(format!(
                "unsupported DyCF version {version}"
            )));
        }
        let c = r.f64()?;
        let moments = MomentModel::read_record(&mut r)?;
        r.finish()?;
        Self::from_moments(moments)?.with_c(c)
    }
}

fn basis(p: usize, d: usize) -> Result<MonomialBasis> {
    if d == 0 {
        return Err(Error::InvalidBasis("DyCF needs degree d ≥ 1".into()));
    }
    MonomialBasis::new(p, d)
}

impl Detector for Dycf {
    fn name(&self) -> &'static str {
        "DyCF"
    }

    fn dim(&self) -> usize {
        self.moments.basis().dim()
    }

    fn fit(&mut self, init: &[Vec<f64>]) -> Result<()> {
        let refit = Dycf::fit_batch(init, self.degree(), *self.moments.config())?;
        *self = refit.with_c(self.c)?;
        Ok(())
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        Dycf::score(self, x)
    }

    fn threshold(&self) -> Option<f64> {
        Some(1.0)
    }

    fn is_outlier(&self, x: &[f64]) -> Result<Option<bool>> {
        Dycf::is_outlier(self, x).map(Some)
    }

    fn learn(&mut self, x: &[f64]) -> Result<()> {
        Dycf::learn(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_pair() -> Vec<Vec<f64>> {
        vec![vec![-1.0], vec![1.0]]
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(Dycf::new(2, 0, MomentConfig::default()).is_err());
    }

    #[test]
    fn gamma_follows_c() {
        let mut det = Dycf::new(2, 6, MomentConfig::default()).unwrap();
        assert_eq!(det.gamma(), 216.0);
        det.set_c(2.0).unwrap();
        assert_eq!(det.gamma(), 432.0);
        assert!(det.set_c(0.0).is_err());
        assert!(det.set_c(f64::NAN).is_err());
    }

    #[test]
    fn score_is_q_over_gamma() {
        // d = 1 on {-1, 1}: M = I, Q(x) = 1 + x², γ = 1
        let det = Dycf::fit_batch(&symmetric_pair(), 1, MomentConfig::exact()).unwrap();
        assert_eq!(det.gamma(), 1.0);
        assert_eq!(det.score(&[2.0]).unwrap(), 5.0);
        assert!(det.is_outlier(&[0.0]).unwrap());
        let det = det.with_c(5.0).unwrap();
        // boundary: Q = γ exactly is outlying
        assert!(det.is_outlier(&[2.0]).unwrap());
        assert!(!det.is_outlier(&[1.9]).unwrap());
    }

    #[test]
    fn learn_from_empty() {
        let mut det = Dycf::new(1, 2, MomentConfig::default()).unwrap();
        assert!(det.score(&[0.0]).is_err());
        for x in [-1.0, 0.0, 1.0, 0.5] {
            det.learn(&[x]).unwrap();
        }
        assert_eq!(det.n(), 4);
        assert!(!det.is_underdetermined());
        assert!(det.score(&[0.2]).unwrap() > 0.0);
    }

    #[test]
    fn snapshot_round_trip() {
        let data: Vec<Vec<f64>> = (0..200)
            .map(|i| vec![(i as f64 * 0.1).sin(), (i as f64 * 0.07).cos()])
            .collect();
        let det = Dycf::fit_batch(&data, 4, MomentConfig::default())
            .unwrap()
            .with_c(1.5)
            .unwrap();
        let bytes = det.to_bytes();
        let back = Dycf::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.c(), 1.5);
        let x = [0.3, 0.4];
        assert_eq!(back.score(&x).unwrap(), det.score(&x).unwrap());
        assert!(Dycf::from_bytes(b"DYCG").is_err());
    }
}
