//! Small square matrices over a [`Scalar`] field.
//!
//! Dimensions here are tiny (k ≤ 4 for symbols, k² for automorphism
//! matrices), so a dense row-major layout with Gauss–Jordan inversion is
//! all that is needed. Pivots are selected by approximate magnitude,
//! which keeps float mode stable and costs exact mode nothing.

use crate::error::CoreError;
use crate::scalar::Scalar;
use serde_json::Value;

#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    k: usize,
    entries: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zero(k: usize) -> Self {
        Mat {
            k,
            entries: vec![S::zero(); k * k],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Mat::zero(k);
        for i in 0..k {
            m.set(i, i, S::one());
        }
        m
    }

    /// Single matrix unit `E_{rc}` (1 in row `r`, column `c`).
    pub fn unit(k: usize, r: usize, c: usize) -> Self {
        let mut m = Mat::zero(k);
        m.set(r, c, S::one());
        m
    }

    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                entries.push(f(i, j));
            }
        }
        Mat { k, entries }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, CoreError> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(CoreError::DimensionMismatch(
                "matrix rows must all have length k".into(),
            ));
        }
        Ok(Mat {
            k,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diag(values: Vec<S>) -> Self {
        let k = values.len();
        let mut m = Mat::zero(k);
        for (i, v) in values.into_iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.k + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.entries[i * self.k + j] = v;
    }

    /// Row-major vectorization, the convention used for automorphism
    /// matrices acting on Mat(k).
    pub fn vectorize(&self) -> Vec<S> {
        self.entries.clone()
    }

    pub fn from_vec(k: usize, entries: Vec<S>) -> Result<Self, CoreError> {
        if entries.len() != k * k {
            return Err(CoreError::DimensionMismatch(format!(
                "expected {} entries for a {k}×{k} matrix, got {}",
                k * k,
                entries.len()
            )));
        }
        Ok(Mat { k, entries })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k, "matrix dimension mismatch");
        Mat {
            k: self.k,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k, "matrix dimension mismatch");
        Mat {
            k: self.k,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Mat {
            k: self.k,
            entries: self.entries.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Mat {
            k: self.k,
            entries: self.entries.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k, "matrix dimension mismatch");
        let k = self.k;
        Mat::from_fn(k, |i, j| {
            let mut acc = S::zero();
            for l in 0..k {
                acc = acc + self.get(i, l).clone() * other.get(l, j).clone();
            }
            acc
        })
    }

    /// Apply this matrix to a vector (used for vectorized automorphisms).
    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.k, "vector length mismatch");
        (0..self.k)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.k {
                    acc = acc + self.get(i, j).clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.k, |i, j| self.get(j, i).clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Mat::from_fn(self.k, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> S {
        let mut acc = S::zero();
        for i in 0..self.k {
            acc = acc + self.get(i, i).clone();
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Largest entry modulus (approximate in exact mode).
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.abs()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.k == other.k && self.sub(other).max_abs() <= tol
    }

    /// Gauss–Jordan inverse; `None` when singular (exact zero pivot).
    pub fn try_inverse(&self) -> Option<Self> {
        let k = self.k;
        let mut a = self.clone();
        let mut inv = Mat::identity(k);
        for col in 0..k {
            let pivot_row = (col..k).max_by(|&r1, &r2| {
                a.get(r1, col)
                    .abs()
                    .partial_cmp(&a.get(r2, col).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if a.get(pivot_row, col).is_zero() {
                return None;
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let pinv = a.get(col, col).try_inv()?;
            a.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            for row in 0..k {
                if row != col && !a.get(row, col).is_zero() {
                    let factor = a.get(row, col).clone();
                    a.row_sub_scaled(row, col, &factor);
                    inv.row_sub_scaled(row, col, &factor);
                }
            }
        }
        Some(inv)
    }

    /// Determinant by elimination (exact over a field).
    pub fn det(&self) -> S {
        let k = self.k;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..k {
            let pivot_row = match (col..k).max_by(|&r1, &r2| {
                a.get(r1, col)
                    .abs()
                    .partial_cmp(&a.get(r2, col).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            }) {
                Some(r) => r,
                None => return S::zero(),
            };
            if a.get(pivot_row, col).is_zero() {
                return S::zero();
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                det = -det;
            }
            let pivot = a.get(col, col).clone();
            det = det * pivot.clone();
            let pinv = pivot.try_inv().expect("nonzero pivot");
            for row in col + 1..k {
                if !a.get(row, col).is_zero() {
                    let factor = a.get(row, col).clone() * pinv.clone();
                    a.row_sub_scaled(row, col, &factor);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for j in 0..self.k {
            self.entries.swap(r1 * self.k + j, r2 * self.k + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: &S) {
        for j in 0..self.k {
            let v = self.get(r, j).clone() * s.clone();
            self.set(r, j, v);
        }
    }

    /// row_r ← row_r − factor · row_src
    fn row_sub_scaled(&mut self, r: usize, src: usize, factor: &S) {
        for j in 0..self.k {
            let v = self.get(r, j).clone() - factor.clone() * self.get(src, j).clone();
            self.set(r, j, v);
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.k)
                .map(|i| {
                    Value::Array((0..self.k).map(|j| self.get(i, j).to_json()).collect())
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value, pointer: &str) -> Result<Self, CoreError> {
        let rows = v
            .as_array()
            .ok_or_else(|| CoreError::parse(pointer, "expected an array of rows"))?;
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for (i, row) in rows.iter().enumerate() {
            let cols = row.as_array().ok_or_else(|| {
                CoreError::parse(format!("{pointer}/{i}"), "expected an array of scalars")
            })?;
            if cols.len() != k {
                return Err(CoreError::parse(
                    format!("{pointer}/{i}"),
                    format!("expected {k} columns, got {}", cols.len()),
                ));
            }
            for (j, c) in cols.iter().enumerate() {
                entries.push(S::from_json(c).map_err(|e| {
                    CoreError::parse(format!("{pointer}/{i}/{j}"), e)
                })?);
            }
        }
        Ok(Mat { k, entries })
    }
}

impl<S: std::fmt::Debug> std::fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat{}[", self.k)?;
        for i in 0..self.k {
            write!(f, "  ")?;
            for j in 0..self.k {
                write!(f, "{:?}  ", self.entries[i * self.k + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gauss_int, ExactScalar};

    fn m2(a: i64, b: i64, c: i64, d: i64) -> Mat<ExactScalar> {
        Mat::from_rows(vec![
            vec![gauss_int(a, 0), gauss_int(b, 0)],
            vec![gauss_int(c, 0), gauss_int(d, 0)],
        ])
        .unwrap()
    }

    #[test]
    fn matrix_unit_products() {
        let e12: Mat<ExactScalar> = Mat::unit(2, 0, 1);
        let e21: Mat<ExactScalar> = Mat::unit(2, 1, 0);
        assert_eq!(e12.mul(&e21), Mat::unit(2, 0, 0));
        assert_eq!(e21.mul(&e12), Mat::unit(2, 1, 1));
        assert!(e12.mul(&e12).is_zero());
    }

    #[test]
    fn exact_inverse() {
        let m = m2(1, 2, 3, 5);
        let inv = m.try_inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(2));
        assert_eq!(inv.mul(&m), Mat::identity(2));
        // det = -1
        assert_eq!(m.det(), gauss_int(-1, 0));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = m2(1, 2, 2, 4);
        assert!(m.try_inverse().is_none());
        assert_eq!(m.det(), gauss_int(0, 0));
    }

    #[test]
    fn conj_transpose_is_involutive() {
        let m = Mat::from_rows(vec![
            vec![gauss_int::<ExactScalar>(1, 2), gauss_int(0, -3)],
            vec![gauss_int(4, 0), gauss_int(-1, 1)],
        ])
        .unwrap();
        assert_eq!(m.conj_transpose().conj_transpose(), m);
    }

    #[test]
    fn json_round_trip() {
        let m = m2(1, -2, 0, 7);
        let v = m.to_json();
        let back = Mat::<ExactScalar>::from_json(&v, "/m").unwrap();
        assert_eq!(back, m);
    }
}
