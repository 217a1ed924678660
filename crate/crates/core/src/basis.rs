//! Monomial bases in graded lexicographic order.
//!
//! A [`MonomialBasis`] of dimension `p` and degree `d` lists every exponent
//! vector `α ∈ ℕ^p` with `|α| ≤ d`, sorted by total degree and then
//! lexicographically with the first variable most significant. For `p = 2`,
//! `d = 2` this yields `1, X1, X2, X1², X1·X2, X2²`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Exponent vector of a single monomial `X1^α1 ⋯ Xp^αp`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise sum, the index of the product of two monomials.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Evaluates `Π x_i^{α_i}` with plain powers. Used by oracles and
    /// diagnostics; [`MonomialBasis::eval`] is the fast path.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Number of monomials of degree at most `d` in `p` variables,
/// `binomial(p + d, d)`.
pub fn basis_size(p: usize, d: usize) -> Result<usize> {
    if p == 0 {
        return Err(Error::InvalidBasis("dimension p must be at least 1".into()));
    }
    // binomial(p + d, k) built up as a running product; every prefix is
    // itself a binomial coefficient, so each division is exact.
    let mut acc: u128 = 1;
    for i in 1..=d as u128 {
        acc = acc
            .checked_mul(p as u128 + i)
            .ok_or(Error::BasisTooLarge { p, d })?
            / i;
    }
    usize::try_from(acc).map_err(|_| Error::BasisTooLarge { p, d })
}

/// Ordered set of multi-indices defining the vector of monomials `v_d(X)`.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    p: usize,
    d: usize,
    indices: Vec<MultiIndex>,
    // For every index j > 0: monomial j = monomial parent[j] * x[var[j]].
    parent: Vec<usize>,
    var: Vec<usize>,
}

impl MonomialBasis {
    /// Enumerates all multi-indices of total degree `≤ d` in graded
    /// lexicographic order.
    pub fn new(p: usize, d: usize) -> Result<Self> {
        let size = basis_size(p, d)?;
        let mut indices = Vec::with_capacity(size);
        let mut current = vec![0u32; p];
        for degree in 0..=d as u32 {
            push_compositions(degree, 0, &mut current, &mut indices);
        }
        debug_assert_eq!(indices.len(), size);

        let position: HashMap<&MultiIndex, usize> =
            indices.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let mut parent = vec![0; size];
        let mut var = vec![0; size];
        for (j, alpha) in indices.iter().enumerate().skip(1) {
            let i = alpha.0.iter().position(|&a| a > 0).expect("non-constant");
            let mut lower = alpha.clone();
            lower.0[i] -= 1;
            parent[j] = position[&lower];
            var[j] = i;
        }

        Ok(MonomialBasis {
            p,
            d,
            indices,
            parent,
            var,
        })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// `s_p(d)`, the length of `v_d(x)`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Evaluates `v_d(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// Evaluates `v_d(x)` into a caller-provided buffer of length `s_p(d)`.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.p {
            return Err(Error::Dimension {
                expected: self.p,
                got: x.len(),
            });
        }
        assert_eq!(out.len(), self.len(), "output buffer has wrong length");
        out[0] = 1.0;
        for j in 1..out.len() {
            out[j] = out[self.parent[j]] * x[self.var[j]];
        }
        Ok(())
    }
}

// Appends every exponent vector with the given remaining degree spread over
// positions `pos..p`, largest leading exponent first.
fn push_compositions(
    remaining: u32,
    pos: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
) {
    let p = current.len();
    if pos == p - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        current[pos] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        push_compositions(remaining - a, pos + 1, current, out);
    }
    current[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exps(basis: &MonomialBasis) -> Vec<Vec<u32>> {
        basis
            .indices()
            .iter()
            .map(|a| a.exponents().to_vec())
            .collect()
    }

    #[test]
    fn sizes() {
        assert_eq!(basis_size(2, 2).unwrap(), 6);
        assert_eq!(basis_size(5, 0).unwrap(), 1);
        assert_eq!(basis_size(3, 6).unwrap(), 84);
        assert_eq!(basis_size(2, 6).unwrap(), 28);
        assert_eq!(basis_size(5, 6).unwrap(), 462);
    }

    #[test]
    fn size_overflow_is_an_error() {
        assert!(matches!(
            basis_size(1000, 1000),
            Err(Error::BasisTooLarge { .. })
        ));
        assert!(basis_size(0, 3).is_err());
    }

    #[test]
    fn graded_lex_order_p2_d2() {
        let b = MonomialBasis::new(2, 2).unwrap();
        assert_eq!(
            exps(&b),
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn univariate_and_linear() {
        let b = MonomialBasis::new(1, 3).unwrap();
        assert_eq!(exps(&b), vec![vec![0], vec![1], vec![2], vec![3]]);
        let b = MonomialBasis::new(3, 1).unwrap();
        assert_eq!(
            exps(&b),
            vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );
    }

    #[test]
    fn eval_examples() {
        let b = MonomialBasis::new(2, 2).unwrap();
        assert_eq!(
            b.eval(&[0.0, 0.0]).unwrap(),
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            b.eval(&[2.0, 3.0]).unwrap(),
            vec![1.0, 2.0, 3.0, 4.0, 6.0, 9.0]
        );
        let b = MonomialBasis::new(3, 4).unwrap();
        assert!(b.eval(&[1.0; 3]).unwrap().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn eval_rejects_wrong_dimension() {
        let b = MonomialBasis::new(2, 2).unwrap();
        assert!(matches!(
            b.eval(&[1.0]),
            Err(Error::Dimension {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn recurrence_matches_direct_powers() {
        let b = MonomialBasis::new(3, 5).unwrap();
        let x = [0.7, -1.3, 2.1];
        let v = b.eval(&x).unwrap();
        for (alpha, vj) in b.indices().iter().zip(&v) {
            let direct = alpha.eval(&x);
            assert!((direct - vj).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn display() {
        assert_eq!(MultiIndex::new(vec![1, 0, 2]).to_string(), "(1,0,2)");
    }
}
