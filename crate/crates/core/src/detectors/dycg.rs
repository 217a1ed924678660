use crate::detectors::{Detector, Dycf};
use crate::error::{Error, Result};
use crate::moments::{InputScaling, MomentConfig};
use crate::snapshot::{RecordReader, RecordWriter};

/// Dynamic Christoffel Growth detector.
///
/// Maintains two [`Dycf`] models of degrees `d_min < d_max` over the same
/// stream and scores by the slope
/// `S'(x) = (S_{d_max}(x) − S_{d_min}(x)) / (d_max − d_min)`; a point is
/// outlying when `S'(x) ≥ 0`. Inside the support the normalized score
/// shrinks with the degree, outside it grows exponentially, so the sign
/// needs no threshold tuning.
#[derive(Debug, Clone)]
pub struct Dycg {
    low: Dycf,
    high: Dycf,
}

impl Dycg {
    pub const DEFAULT_DEGREES: (usize, usize) = (2, 6);

    pub fn new(p: usize, d_min: usize, d_max: usize, config: MomentConfig) -> Result<Self> {
        check_degrees(d_min, d_max)?;
        Ok(Dycg {
            low: Dycf::new(p, d_min, config)?,
            high: Dycf::new(p, d_max, config)?,
        })
    }

    /// Fits both sub-models on `samples`. With scaling enabled, a single
    /// input map is fitted and shared so both scores live in the same
    /// coordinates.
    pub fn fit_batch(
        samples: &[Vec<f64>],
        d_min: usize,
        d_max: usize,
        config: MomentConfig,
    ) -> Result<Self> {
        check_degrees(d_min, d_max)?;
        let scaling = if config.scaling {
            Some(InputScaling::fit(samples)?)
        } else {
            None
        };
        Ok(Dycg {
            low: Dycf::fit_batch_scaled(samples, d_min, config, scaling.clone())?,
            high: Dycf::fit_batch_scaled(samples, d_max, config, scaling)?,
        })
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.low.degree(), self.high.degree())
    }

    pub fn low(&self) -> &Dycf {
        &self.low
    }

    pub fn high(&self) -> &Dycf {
        &self.high
    }

    pub fn n(&self) -> u64 {
        self.low.n()
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if self.low.n() != self.high.n() {
            return Err(Error::Contract(format!(
                "DyCG sub-models have seen {} and {} samples",
                self.low.n(),
                self.high.n()
            )));
        }
        let (d_min, d_max) = self.degrees();
        Ok((self.high.score(x)? - self.low.score(x)?) / (d_max - d_min) as f64)
    }

    /// `S'(x) ≥ 0`.
    pub fn is_outlier(&self, x: &[f64]) -> Result<bool> {
        Ok(self.score(x)? >= 0.0)
    }

    /// Learns `x` into both sub-models. If the second update fails the
    /// first is rolled back, so both always hold the same sample count.
    pub fn learn(&mut self, x: &[f64]) -> Result<()> {
        let backup = self.low.clone();
        self.low.learn(x)?;
        if let Err(e) = self.high.learn(x) {
            self.low = backup;
            return Err(e);
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = RecordWriter::new();
        w.bytes(b"DYCG");
        w.u8(1);
        w.f64(self.low.c());
        let (d_min, d_max) = self.degrees();
        w.u32(d_min as u32);
        w.u32(d_max as u32);
        self.low.moments().write_record(&mut w);
        self.high.moments().write_record(&mut w);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = RecordReader::new(bytes);
        r.expect(b"DYCG")?;
        let version = r.u8()?;
        if version != 1 {
            return Err(Error::Snapshot(format!(
                "unsupported DyCG version {version}"
            )));
        }
        let c = r.f64()?;
        let d_min = r.u32()? as usize;
        let d_max = r.u32()? as usize;
        let low = Dycf::from_moments(crate::moments::MomentModel::read_record(&mut r)?)?;
        let high = Dycf::from_moments(crate::moments::MomentModel::read_record(&mut r)?)?;
        r.finish()?;
        if (low.degree(), high.degree()) != (d_min, d_max) {
            return Err(Error::Snapshot(
                "sub-model degrees disagree with header".into(),
            ));
        }
        if low.moments().scaling() != high.moments().scaling() {
            return Err(Error::Snapshot(
                "sub-models use different input maps".into(),
            ));
        }
        Ok(Dycg {
            low: low.with_c(c)?,
            high: high.with_c(c)?,
        })
    }
}

fn check_degrees(d_min: usize, d_max: usize) -> Result<()> {
    if d_min == 0 || d_min >= d_max {
        return Err(Error::config(
            "degrees",
            format!("need 1 ≤ d_min < d_max, got ({d_min}, {d_max})"),
        ));
    }
    Ok(())
}

impl Detector for Dycg {
    fn name(&self) -> &'static str {
        "DyCG"
    }

    fn dim(&self) -> usize {
        Detector::dim(&self.low)
    }

    fn fit(&mut self, init: &[Vec<f64>]) -> Result<()> {
        let (d_min, d_max) = self.degrees();
        let config = *self.low.moments().config();
        *self = Dycg::fit_batch(init, d_min, d_max, config)?;
        Ok(())
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        Dycg::score(self, x)
    }

    fn threshold(&self) -> Option<f64> {
        Some(0.0)
    }

    fn is_outlier(&self, x: &[f64]) -> Result<Option<bool>> {
        Dycg::is_outlier(self, x).map(Some)
    }

    fn learn(&mut self, x: &[f64]) -> Result<()> {
        Dycg::learn(self, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Vec<Vec<f64>> {
        (0..300)
            .map(|i| vec![(i as f64 * 0.13).sin(), (i as f64 * 0.29).cos()])
            .collect()
    }

    #[test]
    fn degree_validation() {
        assert!(Dycg::new(2, 6, 2, MomentConfig::default()).is_err());
        assert!(Dycg::new(2, 3, 3, MomentConfig::default()).is_err());
        assert!(Dycg::new(2, 0, 3, MomentConfig::default()).is_err());
    }

    #[test]
    fn shared_scaling() {
        let g = Dycg::fit_batch(&data(), 2, 6, MomentConfig::default()).unwrap();
        assert!(g.low().moments().scaling().is_some());
        assert_eq!(g.low().moments().scaling(), g.high().moments().scaling());
    }

    #[test]
    fn learn_keeps_counts_equal() {
        let mut g = Dycg::new(2, 2, 4, MomentConfig::default()).unwrap();
        for x in data().iter().take(25) {
            g.learn(x).unwrap();
        }
        assert_eq!(g.low().n(), 25);
        assert_eq!(g.high().n(), 25);
        // dimension error on learn leaves both untouched
        assert!(g.learn(&[1.0]).is_err());
        assert_eq!((g.low().n(), g.high().n()), (25, 25));
    }

    #[test]
    fn score_is_slope() {
        let g = Dycg::fit_batch(&data(), 2, 6, MomentConfig::default()).unwrap();
        let x = [0.1, 0.2];
        let expected = (g.high().score(&x).unwrap() - g.low().score(&x).unwrap()) / 4.0;
        assert_eq!(g.score(&x).unwrap(), expected);
    }

    #[test]
    fn snapshot_round_trip() {
        let g = Dycg::fit_batch(&data(), 2, 5, MomentConfig::default()).unwrap();
        let bytes = g.to_bytes();
        let back = Dycg::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.degrees(), (2, 5));
        assert_eq!(
            back.score(&[0.5, 0.5]).unwrap(),
            g.score(&[0.5, 0.5]).unwrap()
        );
    }
}
