//! Minimal banded linear algebra: storage, matrix-vector product, and LU
//! factorization without pivoting.
//!
//! No pivoting is deliberate: the collocation matrices are assembled so that
//! their diagonal carries the dominant mass/identity terms, and without row
//! exchanges the factorization produces no fill outside the original band.
//! A pivot-magnitude guard turns the one failure mode into a typed error
//! instead of silent garbage.

use crate::scalar::Scalar;
use crate::{GardnerError, Result};

/// Dense-in-band storage for an `n x n` matrix with `kl` subdiagonals and
/// `ku` superdiagonals.  Entry `(i, j)` with `-kl <= j - i <= ku` lives at
/// `data[i*(kl + ku + 1) + (j - i + kl)]` (row-major bands).
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix<T> {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandedMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![T::zero(); n * (kl + ku + 1)],
        }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i_, j_) = (i as isize, j as isize);
        let off = j_ - i_ + self.kl as isize;
        if j >= self.n || i >= self.n || off < 0 || off >= (self.kl + self.ku + 1) as isize {
            None
        } else {
            Some(i * (self.kl + self.ku + 1) + off as usize)
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.data[s])
    }

    /// Sets `(i, j)`; panics if the entry falls outside the band (callers
    /// assemble only in-band patterns by construction).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band"));
        self.data[s] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band"));
        self.data[s] += v;
    }

    pub fn fill_zero(&mut self) {
        for v in &mut self.data {
            *v = T::zero();
        }
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut acc = T::zero();
            for j in lo..=hi {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Dense copy, row-major `n x n` (test/diagnostic helper).
    pub fn to_dense(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.n * self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for j in lo..=hi {
                d[i * self.n + j] = self.get(i, j);
            }
        }
        d
    }

    /// LU factorization in place without pivoting.  Returns the factors
    /// packed in the same band (L strictly below the diagonal, unit
    /// diagonal implicit).  Fails when a pivot falls below `1e-14` times
    /// the max magnitude of its row at factorization time.
    pub fn lu_factor(mut self) -> Result<BandedLu<T>> {
        let n = self.n;
        let tol = T::lit(1e-14);
        for k in 0..n {
            let piv = self.get(k, k);
            let hi = (k + self.ku).min(n - 1);
            let mut row_scale = T::zero();
            for j in k..=hi {
                row_scale = row_scale.max(self.get(k, j).abs());
            }
            if piv.abs() < tol * row_scale || piv == T::zero() {
                return Err(GardnerError::NumericalBreakdown {
                    step: 0,
                    row: k,
                    pivot: piv.to64(),
                });
            }
            let ilim = (k + self.kl).min(n - 1);
            for i in (k + 1)..=ilim {
                let l = self.get(i, k) / piv;
                self.set(i, k, l);
                for j in (k + 1)..=hi {
                    let v = self.get(i, j) - l * self.get(k, j);
                    self.set(i, j, v);
                }
            }
        }
        Ok(BandedLu { mat: self })
    }
}

/// Banded LU factors; solves by forward/back substitution.
#[derive(Clone, Debug)]
pub struct BandedLu<T> {
    mat: BandedMatrix<T>,
}

impl<T: Scalar> BandedLu<T> {
    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = self.mat.n;
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        // L y = rhs (unit diagonal)
        for i in 0..n {
            let lo = i.saturating_sub(self.mat.kl);
            let mut acc = x[i];
            for j in lo..i {
                acc -= self.mat.get(i, j) * x[j];
            }
            x[i] = acc;
        }
        // U x = y
        for i in (0..n).rev() {
            let hi = (i + self.mat.ku).min(n - 1);
            let mut acc = x[i];
            for j in (i + 1)..=hi {
                acc -= self.mat.get(i, j) * x[j];
            }
            x[i] = acc / self.mat.get(i, i);
        }
        x
    }
}

/// Solves a tridiagonal system given the three diagonals (`lower[0]` and
/// `upper[n-1]` unused), via the banded LU above.
pub fn solve_tridiagonal<T: Scalar>(
    lower: &[T],
    diag: &[T],
    upper: &[T],
    rhs: &[T],
) -> Result<Vec<T>> {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    let mut m = BandedMatrix::zeros(n, 1, 1);
    for i in 0..n {
        if i > 0 {
            m.set(i, i - 1, lower[i]);
        }
        m.set(i, i, diag[i]);
        if i + 1 < n {
            m.set(i, i + 1, upper[i]);
        }
    }
    let lu = m
        .lu_factor()
        .map_err(|e| match e {
            GardnerError::NumericalBreakdown { row, .. } => {
                GardnerError::SingularInitialization { row }
            }
            other => other,
        })?;
    Ok(lu.solve(rhs))
}
