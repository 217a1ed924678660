#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn normal_samples(n: usize, p: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (0..p)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect()
}

pub fn uniform_samples(n: usize, p: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..p).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

pub fn max_abs_diff(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Gauss–Jordan inverse with partial pivoting, independent of the
/// library's Cholesky path.
pub fn gauss_jordan_inverse(m: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
    let n = m.nrows();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| m[(i, j)]).collect();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            let f = row[col];
            if r != col && f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
    }
    nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][n + j])
}

/// Exponent vectors of all monomials of degree ≤ d in p variables, by
/// brute-force enumeration over the box `[0, d]^p`.
pub fn brute_force_exponents(p: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let total = (d + 1).pow(p as u32);
    for code in 0..total {
        let mut c = code;
        let e: Vec<u32> = (0..p)
            .map(|_| {
                let v = (c % (d + 1)) as u32;
                c /= d + 1;
                v
            })
            .collect();
        if e.iter().sum::<u32>() as usize <= d {
            out.push(e);
        }
    }
    out
}

pub fn monomial(x: &[f64], e: &[u32]) -> f64 {
    x.iter().zip(e).map(|(x, &k)| x.powi(k as i32)).product()
}
