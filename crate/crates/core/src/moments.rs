//! Empirical moment matrices and the inverse Christoffel function.
//!
//! A [`MomentModel`] holds `M_d(μ_n) = (1/n) Σ v_d(x_i) v_d(x_i)ᵀ` for the
//! samples seen so far together with a regularized inverse, and evaluates
//! `Q(x) = v_d(x)ᵀ (M + εI)⁻¹ v_d(x)`. The model never stores samples: its
//! footprint depends only on `(p, d)`.

use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::basis::MonomialBasis;
use crate::error::{Error, Result};
use crate::snapshot::{RecordReader, RecordWriter};

/// Relative scale of the automatic Tikhonov term, `ε = AUTO_EPSILON · tr(M)/s`.
pub const AUTO_EPSILON: f64 = 1e-10;

/// Sherman–Morrison denominators below this trigger a direct refresh.
pub const SHERMAN_MORRISON_TOLERANCE: f64 = 1e-12;

/// How the Tikhonov term `ε` added to the moment matrix is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    /// `ε = 1e-10 · tr(M)/s`, recomputed at every direct factorization.
    Auto,
    /// A fixed `ε`; `Fixed(0.0)` disables regularization.
    Fixed(f64),
}

/// How the inverse is maintained after each update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseMode {
    /// Re-factorize after every update.
    Direct,
    /// Rank-one Sherman–Morrison updates with a direct refresh every
    /// `refresh_period` updates.
    ShermanMorrison,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentConfig {
    pub regularization: Regularization,
    pub inverse_mode: InverseMode,
    pub refresh_period: u32,
    /// Fit an affine map of the inputs onto `[-1, 1]^p` on the first batch.
    pub scaling: bool,
}

impl Default for MomentConfig {
    fn default() -> Self {
        MomentConfig {
            regularization: Regularization::Auto,
            inverse_mode: InverseMode::Direct,
            refresh_period: 100,
            scaling: true,
        }
    }
}

impl MomentConfig {
    /// No regularization and no input scaling: the exact textbook quantities.
    pub fn exact() -> Self {
        MomentConfig {
            regularization: Regularization::Fixed(0.0),
            scaling: false,
            ..Default::default()
        }
    }

    pub fn with_inverse_mode(mut self, mode: InverseMode) -> Self {
        self.inverse_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Regularization::Fixed(e) = self.regularization {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::config("epsilon", "must be finite and non-negative"));
            }
        }
        if self.refresh_period == 0 {
            return Err(Error::config("refresh_period", "must be at least 1"));
        }
        Ok(())
    }
}

/// Per-coordinate affine map `x ↦ (x − center) / half_range`, frozen once
/// fitted.
#[derive(Debug, Clone, PartialEq)]
pub struct InputScaling {
    center: Vec<f64>,
    half_range: Vec<f64>,
}

impl InputScaling {
    /// Maps the per-coordinate `[min, max]` of `samples` onto `[-1, 1]`.
    /// Constant coordinates are only centered.
    pub fn fit(samples: &[Vec<f64>]) -> Result<Self> {
        let first = samples.first().ok_or(Error::NotFitted)?;
        let p = first.len();
        let mut lo = first.clone();
        let mut hi = first.clone();
        for x in samples {
            check_dim(p, x)?;
            for i in 0..p {
                lo[i] = lo[i].min(x[i]);
                hi[i] = hi[i].max(x[i]);
            }
        }
        let center = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
        let half_range = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| {
                let r = 0.5 * (h - l);
                if r > 0.0 {
                    r
                } else {
                    1.0
                }
            })
            .collect();
        Ok(InputScaling { center, half_range })
    }

    pub fn from_parts(center: Vec<f64>, half_range: Vec<f64>) -> Result<Self> {
        if center.len() != half_range.len() {
            return Err(Error::Dimension {
                expected: center.len(),
                got: half_range.len(),
            });
        }
        if half_range.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::config("scaling", "half ranges must be positive"));
        }
        Ok(InputScaling { center, half_range })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn half_range(&self) -> &[f64] {
        &self.half_range
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            out[i] = (x[i] - self.center[i]) / self.half_range[i];
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.apply_into(x, &mut out);
        out
    }
}

/// Running empirical moment matrix with its regularized inverse.
///
/// After a direct refresh the inverse is held as the Cholesky factor `L` of
/// `M + εI` and `Q(x)` is evaluated as `‖L⁻¹v‖²`; the explicit inverse is
/// materialized on demand. Sherman–Morrison steps work on the explicit
/// inverse.
#[derive(Debug, Clone)]
pub struct MomentModel {
    basis: MonomialBasis,
    config: MomentConfig,
    scaling: Option<InputScaling>,
    n: u64,
    matrix: DMatrix<f64>,
    factor: Option<Cholesky<f64, Dyn>>,
    inverse: OnceLock<DMatrix<f64>>,
    epsilon: f64,
    updates_since_refresh: u32,
}

impl MomentModel {
    /// Empty model (`n = 0`). The first [`update`](Self::update) makes it
    /// usable; no input scaling is fitted on this path.
    pub fn new(basis: MonomialBasis, config: MomentConfig) -> Result<Self> {
        config.validate()?;
        let s = basis.len();
        s.checked_mul(s).ok_or(Error::BasisTooLarge {
            p: basis.dim(),
            d: basis.degree(),
        })?;
        Ok(MomentModel {
            basis,
            config,
            scaling: None,
            n: 0,
            matrix: DMatrix::zeros(s, s),
            factor: None,
            inverse: OnceLock::new(),
            epsilon: 0.0,
            updates_since_refresh: 0,
        })
    }

    /// Batch fit: `M = (1/n) Σ v(x_i) v(x_i)ᵀ`, then a direct inversion.
    /// Fits the input scaling first when `config.scaling` is set.
    pub fn fit_batch(
        samples: &[Vec<f64>],
        basis: MonomialBasis,
        config: MomentConfig,
    ) -> Result<Self> {
        let scaling = if config.scaling {
            Some(InputScaling::fit(samples)?)
        } else {
            None
        };
        Self::fit_batch_scaled(samples, basis, config, scaling)
    }

    /// Batch fit with an explicit, already-fitted input scaling (or none).
    pub fn fit_batch_scaled(
        samples: &[Vec<f64>],
        basis: MonomialBasis,
        config: MomentConfig,
        scaling: Option<InputScaling>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Contract(
                "fit_batch needs at least one sample".into(),
            ));
        }
        let mut model = Self::new(basis, config)?;
        if let Some(sc) = &scaling {
            check_dim(model.basis.dim(), sc.center())?;
        }
        model.scaling = scaling;
        let s = model.basis.len();
        let mut v = vec![0.0; s];
        let mut acc = DMatrix::<f64>::zeros(s, s);
        for x in samples {
            model.features_into(x, &mut v)?;
            add_outer_lower(&mut acc, &v);
        }
        let n = samples.len();
        acc /= n as f64;
        mirror_lower(&mut acc);
        model.matrix = acc;
        model.n = n as u64;
        model.refresh_inverse()?;
        Ok(model)
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn config(&self) -> &MomentConfig {
        &self.config
    }

    pub fn scaling(&self) -> Option<&InputScaling> {
        self.scaling.as_ref()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `M_d(μ_n)` (without the regularization term).
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `(M_d(μ_n) + εI)⁻¹`; all zeros before the first sample.
    pub fn inverse(&self) -> &DMatrix<f64> {
        self.inverse.get_or_init(|| match &self.factor {
            Some(chol) => inverse_from_factor(chol),
            None => DMatrix::zeros(self.basis.len(), self.basis.len()),
        })
    }

    /// The `ε` the current inverse was computed with.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Fewer samples than monomials: the unregularized matrix is singular
    /// and scores rely on the Tikhonov term.
    pub fn is_underdetermined(&self) -> bool {
        (self.n as usize) < self.basis.len()
    }

    /// `v_d` of the (scaled) point.
    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut v = vec![0.0; self.basis.len()];
        self.features_into(x, &mut v)?;
        Ok(v)
    }

    fn features_into(&self, x: &[f64], v: &mut [f64]) -> Result<()> {
        match &self.scaling {
            Some(sc) => {
                check_dim(self.basis.dim(), x)?;
                let mut y = [0.0; 16];
                if x.len() <= y.len() {
                    sc.apply_into(x, &mut y[..x.len()]);
                    self.basis.eval_into(&y[..x.len()], v)
                } else {
                    self.basis.eval_into(&sc.apply(x), v)
                }
            }
            None => self.basis.eval_into(x, v),
        }
    }

    /// Ingests one point: `M ← (n·M + v vᵀ)/(n + 1)`, then refreshes the
    /// inverse according to the configured [`InverseMode`].
    pub fn update(&mut self, x: &[f64]) -> Result<()> {
        let v = self.features(x)?;
        let use_rank_one = self.config.inverse_mode == InverseMode::ShermanMorrison
            && self.n > 0
            && self.updates_since_refresh + 1 < self.config.refresh_period;
        let rank_one = if use_rank_one {
            match self.sherman_morrison_step(&v) {
                Ok(inv) => Some(inv),
                Err(Error::IllConditioned { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };

        let n = self.n as f64;
        let s = self.basis.len();
        // v_i·v_j == v_j·v_i exactly, so the full sweep stays symmetric.
        for (j, col) in self.matrix.as_mut_slice().chunks_exact_mut(s).enumerate() {
            let vj = v[j];
            for (m, vi) in col.iter_mut().zip(&v) {
                *m = (n * *m + vi * vj) / (n + 1.0);
            }
        }
        self.n += 1;

        match rank_one {
            Some(scaled_inverse) => {
                // ((n+1)M' + nεI)⁻¹ · (n+1) = (M' + ε·n/(n+1)·I)⁻¹
                self.factor = None;
                self.inverse = OnceLock::from(scaled_inverse * (n + 1.0));
                self.epsilon *= n / (n + 1.0);
                self.updates_since_refresh += 1;
                Ok(())
            }
            None => self.refresh_inverse(),
        }
    }

    /// The Sherman–Morrison step for ingesting `x`: returns
    /// `((n+1) M_d(μ_{n+1}))⁻¹` computed from the current inverse. The
    /// stored inverse of `M_d(μ_{n+1})` is this result times `n + 1`.
    /// Does not modify the model.
    pub fn rank_one_inverse_update(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let v = self.features(x)?;
        self.sherman_morrison_step(&v)
    }

    fn sherman_morrison_step(&self, v: &[f64]) -> Result<DMatrix<f64>> {
        if self.n == 0 {
            return Err(Error::NotFitted);
        }
        // (n·M)⁻¹ = M⁻¹ / n
        let a_inv = self.inverse() / self.n as f64;
        sherman_morrison(&a_inv, &DVector::from_column_slice(v))
    }

    /// Recomputes the inverse by direct factorization, choosing `ε` from
    /// the configured [`Regularization`].
    pub fn refresh_inverse(&mut self) -> Result<()> {
        let eps = match self.config.regularization {
            Regularization::Fixed(e) => e,
            Regularization::Auto => AUTO_EPSILON * self.mean_diagonal(),
        };
        self.refresh_inverse_with(eps, true)
    }

    fn mean_diagonal(&self) -> f64 {
        self.matrix.trace() / self.basis.len() as f64
    }

    fn refresh_inverse_with(&mut self, eps: f64, escalate: bool) -> Result<()> {
        match spd_factor(&self.matrix, eps) {
            Ok(chol) => {
                self.factor = Some(chol);
                self.epsilon = eps;
            }
            Err(first) if escalate => {
                let retry = (10.0 * eps).max(10.0 * AUTO_EPSILON * self.mean_diagonal());
                match spd_factor(&self.matrix, retry) {
                    Ok(chol) => {
                        self.factor = Some(chol);
                        self.epsilon = retry;
                    }
                    Err(Error::Singular { .. }) => {
                        return Err(Error::Singular {
                            epsilon: retry,
                            min_pivot: smallest_eigenvalue(&self.matrix) + retry,
                        })
                    }
                    Err(_) => return Err(first),
                }
            }
            Err(e) => return Err(e),
        }
        self.inverse = OnceLock::new();
        self.updates_since_refresh = 0;
        Ok(())
    }

    /// Inverse Christoffel function `Q(x) = v(x)ᵀ (M + εI)⁻¹ v(x)`.
    pub fn score_q(&self, x: &[f64]) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::NotFitted);
        }
        let mut v = self.features(x)?;
        Ok(match &self.factor {
            Some(chol) => {
                forward_substitute(chol.l_dirty(), &mut v);
                v.iter().map(|y| y * y).sum()
            }
            None => quadratic_form(self.inverse(), &DVector::from_vec(v)),
        })
    }

    /// Christoffel–Darboux kernel `K(x, y) = v(x)ᵀ (M + εI)⁻¹ v(y)`.
    pub fn cd_kernel(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::NotFitted);
        }
        let vx = DVector::from_vec(self.features(x)?);
        let vy = DVector::from_vec(self.features(y)?);
        Ok(vx.dot(&(self.inverse() * vy)))
    }

    /// Serializes the model (see the crate README for the layout). The
    /// byte length depends only on `(p, d)` and whether scaling is set.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = RecordWriter::new();
        self.write_record(&mut w);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = RecordReader::new(bytes);
        let model = Self::read_record(&mut r)?;
        r.finish()?;
        Ok(model)
    }

    pub(crate) fn write_record(&self, w: &mut RecordWriter) {
        w.bytes(b"MOMT");
        w.u32(self.basis.dim() as u32);
        w.u32(self.basis.degree() as u32);
        w.u64(self.n);
        match self.config.regularization {
            Regularization::Fixed(_) => w.u8(0),
            Regularization::Auto => w.u8(1),
        }
        w.f64(self.epsilon);
        w.u8(match self.config.inverse_mode {
            InverseMode::Direct => 0,
            InverseMode::ShermanMorrison => 1,
        });
        w.u32(self.config.refresh_period);
        match &self.scaling {
            None => w.u8(0),
            Some(sc) => {
                w.u8(1);
                for (c, h) in sc.center.iter().zip(&sc.half_range) {
                    w.f64(*c);
                    w.f64(*h);
                }
            }
        }
        let s = self.basis.len();
        for i in 0..s {
            for j in 0..=i {
                w.f64(self.matrix[(i, j)]);
            }
        }
    }

    pub(crate) fn read_record(r: &mut RecordReader<'_>) -> Result<Self> {
        r.expect(b"MOMT")?;
        let p = r.u32()? as usize;
        let d = r.u32()? as usize;
        let n = r.u64()?;
        let auto = match r.u8()? {
            0 => false,
            1 => true,
            k => return Err(Error::Snapshot(format!("unknown regularization tag {k}"))),
        };
        let epsilon = r.f64()?;
        let inverse_mode = match r.u8()? {
            0 => InverseMode::Direct,
            1 => InverseMode::ShermanMorrison,
            k => return Err(Error::Snapshot(format!("unknown inverse mode tag {k}"))),
        };
        let refresh_period = r.u32()?;
        let scaling = match r.u8()? {
            0 => None,
            1 => {
                let mut center = Vec::with_capacity(p);
                let mut half = Vec::with_capacity(p);
                for _ in 0..p {
                    center.push(r.f64()?);
                    half.push(r.f64()?);
                }
                Some(InputScaling::from_parts(center, half)?)
            }
            k => return Err(Error::Snapshot(format!("unknown scaling tag {k}"))),
        };
        let basis = MonomialBasis::new(p, d)?;
        let config = MomentConfig {
            regularization: if auto {
                Regularization::Auto
            } else {
                Regularization::Fixed(epsilon)
            },
            inverse_mode,
            refresh_period,
            scaling: scaling.is_some(),
        };
        let mut model = Self::new(basis, config)?;
        model.scaling = scaling;
        let s = model.basis.len();
        for i in 0..s {
            for j in 0..=i {
                let m = r.f64()?;
                model.matrix[(i, j)] = m;
                model.matrix[(j, i)] = m;
            }
        }
        model.n = n;
        if n > 0 {
            model.refresh_inverse_with(epsilon, false)?;
        }
        Ok(model)
    }
}

fn check_dim(p: usize, x: &[f64]) -> Result<()> {
    if x.len() != p {
        return Err(Error::Dimension {
            expected: p,
            got: x.len(),
        });
    }
    Ok(())
}

fn add_outer_lower(acc: &mut DMatrix<f64>, v: &[f64]) {
    let s = v.len();
    for j in 0..s {
        let vj = v[j];
        if vj == 0.0 {
            continue;
        }
        let col = &mut acc.column_mut(j);
        for i in j..s {
            col[i] += v[i] * vj;
        }
    }
}

fn mirror_lower(m: &mut DMatrix<f64>) {
    let s = m.nrows();
    for j in 0..s {
        for i in j + 1..s {
            m[(j, i)] = m[(i, j)];
        }
    }
}

fn quadratic_form(a: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(a * v))
}

/// Cholesky factorization of `matrix + εI`. Fails with [`Error::Singular`]
/// when the shifted matrix is not numerically positive definite.
pub fn spd_factor(matrix: &DMatrix<f64>, epsilon: f64) -> Result<Cholesky<f64, Dyn>> {
    let mut a = matrix.clone();
    for i in 0..a.nrows() {
        a[(i, i)] += epsilon;
    }
    let singular = || Error::Singular {
        epsilon,
        min_pivot: smallest_eigenvalue(matrix) + epsilon,
    };
    let chol = a.cholesky().ok_or_else(singular)?;
    let l = chol.l_dirty();
    if (0..l.nrows()).any(|i| !(l[(i, i)] > 0.0 && l[(i, i)].is_finite())) {
        return Err(singular());
    }
    Ok(chol)
}

/// `(matrix + εI)⁻¹` via [`spd_factor`].
pub fn spd_inverse(matrix: &DMatrix<f64>, epsilon: f64) -> Result<DMatrix<f64>> {
    spd_factor(matrix, epsilon).map(|chol| inverse_from_factor(&chol))
}

// (L Lᵀ)⁻¹ = L⁻ᵀ L⁻¹
fn inverse_from_factor(chol: &Cholesky<f64, Dyn>) -> DMatrix<f64> {
    let s = chol.l_dirty().nrows();
    let mut l_inv = DMatrix::identity(s, s);
    for j in 0..s {
        forward_substitute(chol.l_dirty(), l_inv.column_mut(j).as_mut_slice());
    }
    l_inv.tr_mul(&l_inv)
}

// Solves L y = b in place, reading only the lower triangle of `l`
// (column-major, so each elimination step walks a contiguous column).
fn forward_substitute(l: &DMatrix<f64>, b: &mut [f64]) {
    let s = l.nrows();
    let data = l.as_slice();
    for k in 0..s {
        let col = &data[k * s..(k + 1) * s];
        let yk = b[k] / col[k];
        b[k] = yk;
        if yk != 0.0 {
            for i in k + 1..s {
                b[i] -= col[i] * yk;
            }
        }
    }
}

fn smallest_eigenvalue(matrix: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(matrix.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Sherman–Morrison: given `A⁻¹` (symmetric) and `u`, returns
/// `(A + u uᵀ)⁻¹ = A⁻¹ − A⁻¹u uᵀA⁻¹ / (1 + uᵀA⁻¹u)`.
pub fn sherman_morrison(a_inv: &DMatrix<f64>, u: &DVector<f64>) -> Result<DMatrix<f64>> {
    let w = a_inv * u;
    let denominator = 1.0 + u.dot(&w);
    if denominator.is_nan() || denominator <= SHERMAN_MORRISON_TOLERANCE || !denominator.is_finite()
    {
        return Err(Error::IllConditioned { denominator });
    }
    let mut out = a_inv.clone();
    out.ger(-1.0 / denominator, &w, &w, 1.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(p: usize, d: usize) -> MonomialBasis {
        MonomialBasis::new(p, d).unwrap()
    }

    fn pts(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn fit_single_point_at_origin() {
        let m = MomentModel::fit_batch(&pts(&[0.0]), basis(1, 1), MomentConfig::default());
        // singular without regularization; the automatic term makes it invertible
        let m = m.unwrap();
        assert_eq!(m.matrix().as_slice(), &[1.0, 0.0, 0.0, 0.0]);
        assert!(m.is_underdetermined());
    }

    #[test]
    fn fit_symmetric_pair() {
        let m =
            MomentModel::fit_batch(&pts(&[-1.0, 1.0]), basis(1, 1), MomentConfig::exact()).unwrap();
        assert_eq!(m.matrix(), &DMatrix::identity(2, 2));
        assert_eq!(m.score_q(&[0.0]).unwrap(), 1.0);
        assert_eq!(m.score_q(&[2.0]).unwrap(), 5.0);
        assert!(!m.is_underdetermined());
    }

    #[test]
    fn update_from_empty() {
        let mut m = MomentModel::new(basis(2, 1), MomentConfig::default()).unwrap();
        assert!(matches!(m.score_q(&[0.0, 0.0]), Err(Error::NotFitted)));
        m.update(&[2.0, 3.0]).unwrap();
        assert_eq!(m.n(), 1);
        let expected = [1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 3.0, 6.0, 9.0];
        assert_eq!(m.matrix().as_slice(), &expected);
        assert!(m.score_q(&[2.0, 3.0]).unwrap() > 0.0);
    }

    #[test]
    fn update_matches_batch() {
        let data: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()])
            .collect();
        let cfg = MomentConfig::exact();
        let mut inc = MomentModel::fit_batch(&data[..30], basis(2, 3), cfg).unwrap();
        for x in &data[30..] {
            inc.update(x).unwrap();
        }
        let batch = MomentModel::fit_batch(&data, basis(2, 3), cfg).unwrap();
        let diff = (inc.matrix() - batch.matrix()).amax();
        assert!(diff < 1e-12, "diff {diff}");
    }

    #[test]
    fn sherman_morrison_identity_case() {
        let a_inv = DMatrix::<f64>::identity(2, 2);
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        let out = sherman_morrison(&a_inv, &e1).unwrap();
        assert_eq!(out, DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn sherman_morrison_rejects_tiny_denominator() {
        let a_inv = -DMatrix::<f64>::identity(1, 1);
        let u = DVector::from_vec(vec![1.0]);
        assert!(matches!(
            sherman_morrison(&a_inv, &u),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn rank_one_update_on_empty_model_is_not_fitted() {
        let m = MomentModel::new(basis(1, 2), MomentConfig::default()).unwrap();
        assert!(matches!(
            m.rank_one_inverse_update(&[1.0]),
            Err(Error::NotFitted)
        ));
    }

    #[test]
    fn singular_matrix_is_rescued_by_escalation() {
        let m = MomentModel::fit_batch(
            &pts(&[0.5, 0.5, 0.5]),
            basis(1, 2),
            MomentConfig {
                regularization: Regularization::Fixed(0.0),
                scaling: false,
                ..Default::default()
            },
        );
        // escalation gives 10·1e-10·tr/s, which rescues an exactly singular matrix
        let m = m.unwrap();
        assert!(m.epsilon() > 0.0);
    }

    #[test]
    fn indefinite_matrix_fails_factorization() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match spd_inverse(&m, 0.0) {
            Err(Error::Singular { min_pivot, .. }) => assert!((min_pivot + 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch() {
        let m =
            MomentModel::fit_batch(&pts(&[-1.0, 1.0]), basis(1, 1), MomentConfig::exact()).unwrap();
        assert!(matches!(
            m.score_q(&[0.0, 1.0]),
            Err(Error::Dimension {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn invalid_config() {
        let cfg = MomentConfig {
            refresh_period: 0,
            ..Default::default()
        };
        assert!(MomentModel::new(basis(1, 1), cfg).is_err());
        let cfg = MomentConfig {
            regularization: Regularization::Fixed(-1.0),
            ..Default::default()
        };
        assert!(MomentModel::new(basis(1, 1), cfg).is_err());
    }

    #[test]
    fn scaling_maps_box_to_unit_cube() {
        let s = InputScaling::fit(&[vec![0.0, 5.0], vec![4.0, 5.0]]).unwrap();
        assert_eq!(s.apply(&[0.0, 5.0]), vec![-1.0, 0.0]);
        assert_eq!(s.apply(&[4.0, 7.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn cd_kernel_diagonal_is_q() {
        let data: Vec<Vec<f64>> = (0..50)
            .map(|i| vec![(i as f64).sin(), (i as f64 * 0.3).cos()])
            .collect();
        let m = MomentModel::fit_batch(&data, basis(2, 2), MomentConfig::default()).unwrap();
        let x = [0.3, -0.2];
        let k = m.cd_kernel(&x, &x).unwrap();
        assert!((k - m.score_q(&x).unwrap()).abs() < 1e-9 * k);
    }

    #[test]
    fn snapshot_round_trip() {
        let data: Vec<Vec<f64>> = (0..50)
            .map(|i| vec![(i as f64).sin(), (i as f64 * 0.3).cos()])
            .collect();
        let m = MomentModel::fit_batch(&data, basis(2, 3), MomentConfig::default()).unwrap();
        let bytes = m.to_bytes();
        let back = MomentModel::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.inverse(), m.inverse());
        assert!(MomentModel::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
}
