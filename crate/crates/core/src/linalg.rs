//! Dense Hermitian positive-definite factorization for the small systems
//! (a few hundred unknowns at most) that MMSE combining produces.
//!
//! Matrices are square, row-major `Vec<Complex64>`. Only the lower triangle
//! of an input matrix is read.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

/// Lower-triangular Cholesky factor `L` with `A = L Lᴴ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<Complex64>,
}

impl Cholesky {
    /// Factors the Hermitian matrix `a` (row-major, `n × n`).
    pub fn factor(a: &[Complex64], n: usize) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: n * n,
                actual: a.len(),
            });
        }
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let d = a[j * n + j].re
                - l[j * n..j * n + j].iter().map(|v| v.norm_sqr()).sum::<f64>();
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let ljj = libm::sqrt(d);
            l[j * n + j] = Complex64::new(ljj, 0.0);

            for i in j + 1..n {
                let s = l[i * n..i * n + j]
                    .iter()
                    .zip(&l[j * n..j * n + j])
                    .fold(a[i * n + j], |s, (x, y)| s - x * y.conj());
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Factor of `d · I`.
    pub fn scaled_identity(n: usize, d: f64) -> Result<Self> {
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::NotPositiveDefinite { pivot: 0 });
        }
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        let s = libm::sqrt(d);
        for i in 0..n {
            l[i * n + i] = Complex64::new(s, 0.0);
        }
        Ok(Cholesky { n, l })
    }

    /// Turns the factor of `A` into the factor of `A + x xᴴ` by plane
    /// rotations, without forming `A`. Accumulating `σ² I + Σ x_i x_iᴴ` this
    /// way loses accuracy with `√cond` of the result instead of `cond`.
    pub fn rank_one_update(&mut self, x: &[Complex64]) -> Result<()> {
        self.check_len(x.len())?;
        let n = self.n;
        let mut x = x.to_vec();
        for k in 0..n {
            let xk = x[k];
            if xk == Complex64::new(0.0, 0.0) {
                continue;
            }
            let lkk = self.l[k * n + k].re;
            let r = libm::hypot(lkk, xk.norm());
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::NotPositiveDefinite { pivot: k });
            }
            self.l[k * n + k] = Complex64::new(r, 0.0);
            let (a, b) = (lkk / r, xk / r);
            for (i, xi) in x.iter_mut().enumerate().skip(k + 1) {
                let li = self.l[i * n + k];
                self.l[i * n + k] = li * a + b.conj() * *xi;
                *xi = *xi * a - b * li;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L w = b`.
    pub fn forward(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(b.len())?;
        let n = self.n;
        let mut w = b.to_vec();
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let mut s = w[i];
            for (x, y) in row.iter().zip(&w[..i]) {
                s -= x * y;
            }
            w[i] = s / self.l[i * n + i].re;
        }
        Ok(w)
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut x = self.forward(b)?;
        for i in (0..n).rev() {
            let mut s = x[i];
            for (k, xk) in x.iter().enumerate().skip(i + 1) {
                s -= self.l[k * n + i].conj() * xk;
            }
            x[i] = s / self.l[i * n + i].re;
        }
        Ok(x)
    }

    /// `bᴴ A⁻¹ b`, computed as `‖L⁻¹ b‖²`. Real and non-negative.
    pub fn inverse_quadratic_form(&self, b: &[Complex64]) -> Result<f64> {
        Ok(self.forward(b)?.iter().map(|v| v.norm_sqr()).sum())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::ShapeMismatch {
                expected: self.n,
                actual: len,
            });
        }
        Ok(())
    }
}

/// Row-major `n × n` matrix-vector product, used by tests and validation paths.
pub fn mat_vec(a: &[Complex64], n: usize, x: &[Complex64]) -> Vec<Complex64> {
    (0..n)
        .map(|i| a[i * n..(i + 1) * n].iter().zip(x).map(|(a, x)| a * x).sum())
        .collect()
}

/// `xᴴ y`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}
