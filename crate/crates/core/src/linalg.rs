//! Small dense square matrices. Dimensions here are `d + m`, rarely above four.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    /// Row-major entries.
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "matrix row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_row_major(dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![T::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = T::one();
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, col: usize) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, col)).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.get(i, j);
            }
        }
        Self { dim: n, data }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul_int_vec(&self, v: &[i64]) -> Vec<T> {
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * T::from_int(b))
            })
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + self.get(i, k) * other.get(k, j);
                }
                data[i * n + j] = acc;
            }
        }
        Self { dim: n, data }
    }

    /// Product of column norms; the Hadamard bound on `|det|`.
    pub fn hadamard_scale(&self) -> T {
        (0..self.dim)
            .map(|j| {
                (0..self.dim)
                    .fold(T::zero(), |acc, i| acc + self.get(i, j) * self.get(i, j))
                    .sqrt()
            })
            .fold(T::one(), |acc, c| acc * c)
    }

    fn lu(&self) -> Option<(Vec<T>, Vec<usize>, T)> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&p, &q| {
                    a[p * n + k]
                        .abs()
                        .partial_cmp(&a[q * n + k].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(k);
            if a[pivot * n + k] == T::zero() {
                return None;
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                perm.swap(k, pivot);
                sign = -sign;
            }
            for i in (k + 1)..n {
                let f = a[i * n + k] / a[k * n + k];
                a[i * n + k] = f;
                for j in (k + 1)..n {
                    a[i * n + j] = a[i * n + j] - f * a[k * n + j];
                }
            }
        }
        Some((a, perm, sign))
    }

    pub fn determinant(&self) -> T {
        if self.dim == 0 {
            return T::one();
        }
        match self.lu() {
            None => T::zero(),
            Some((a, _, sign)) => (0..self.dim).fold(sign, |acc, i| acc * a[i * self.dim + i]),
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim;
        let (a, perm, _) = self.lu()?;
        let mut inv = vec![T::zero(); n * n];
        for col in 0..n {
            // Solve L U x = P e_col.
            let mut x: Vec<T> = (0..n)
                .map(|i| if perm[i] == col { T::one() } else { T::zero() })
                .collect();
            for i in 0..n {
                for k in 0..i {
                    x[i] = x[i] - a[i * n + k] * x[k];
                }
            }
            for i in (0..n).rev() {
                for k in (i + 1)..n {
                    x[i] = x[i] - a[i * n + k] * x[k];
                }
                x[i] = x[i] / a[i * n + i];
            }
            for i in 0..n {
                inv[i * n + col] = x[i];
            }
        }
        Some(Self { dim: n, data: inv })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}
