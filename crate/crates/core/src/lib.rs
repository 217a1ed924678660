//! Streaming outlier detection with the Christoffel function.
//!
//! The inverse Christoffel function `Q(x) = v(x)ᵀ M⁻¹ v(x)` of the empirical
//! moment matrix `M` is small on the support of the data and grows fast
//! away from it. [`detectors::Dycf`] flags `x` when `Q(x) ≥ c·d^{3p/2}`;
//! [`detectors::Dycg`] compares two degrees and needs no threshold. Both
//! keep a fixed-size state and learn one point at a time.
//!
//! Also here: a sliding-window KDE baseline ([`kde`]), a labeled stream
//! generator ([`streamgen`]), AUROC / AP / EM / MV ([`metrics`]) and the
//! evaluation pipeline behind the `dycf` binary ([`harness`]).
//!
//! ```
//! use dycf::detectors::Dycf;
//! use dycf::moments::MomentConfig;
//!
//! let init: Vec<Vec<f64>> = (0..500)
//!     .map(|i| vec![(i as f64 * 0.1).sin(), (i as f64 * 0.37).cos()])
//!     .collect();
//! let mut model = Dycf::fit_batch(&init, 4, MomentConfig::default())?;
//! assert!(!model.is_outlier(&[0.1, 0.2])?);
//! assert!(model.is_outlier(&[5.0, 5.0])?);
//! model.learn(&[0.3, -0.2])?;
//! # Ok::<(), dycf::Error>(())
//! ```

pub mod basis;
pub mod detectors;
pub mod error;
pub mod harness;
pub mod kde;
pub mod kv;
pub mod metrics;
pub mod moments;
mod snapshot;
pub mod streamgen;

pub use error::{Error, Result};
