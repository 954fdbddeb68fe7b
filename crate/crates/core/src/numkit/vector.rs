use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Dense real vector. Iterates, gradients and anchors all live here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseVector<T> {
    data: Vec<T>,
}

impl<T: Real> DenseVector<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![T::zero(); dim] }
    }

    pub fn from_vec(data: Vec<T>) -> Self {
        Self { data }
    }

    pub fn from_f64(values: &[f64]) -> Self {
        Self { data: values.iter().map(|&v| T::lit(v)).collect() }
    }

    /// Standard basis vector `e_index` (0-based).
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = T::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.as_f64()).collect()
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, got: self.dim() })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn norm_inf(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn dist_sq(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum()
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: T, x: &Self) {
        debug_assert_eq!(self.dim(), x.dim());
        for (s, &v) in self.data.iter_mut().zip(&x.data) {
            *s += alpha * v;
        }
    }

    pub fn scale_mut(&mut self, alpha: T) {
        for s in &mut self.data {
            *s *= alpha;
        }
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self { data: self.data.iter().map(|&v| alpha * v).collect() }
    }

    /// `a * x + b * y`
    pub fn lincomb(a: T, x: &Self, b: T, y: &Self) -> Self {
        debug_assert_eq!(x.dim(), y.dim());
        Self {
            data: x.data.iter().zip(&y.data).map(|(&u, &v)| a * u + b * v).collect(),
        }
    }

    /// Largest 1-based index whose entry exceeds `threshold` in magnitude; 0 for a (numerically) zero vector.
    pub fn support_end(&self, threshold: T) -> usize {
        self.data
            .iter()
            .rposition(|v| v.abs() > threshold)
            .map_or(0, |i| i + 1)
    }

    pub fn cast<U: Real>(&self) -> DenseVector<U> {
        DenseVector { data: self.data.iter().map(|&v| U::lit(v.as_f64())).collect() }
    }
}

impl<T> Index<usize> for DenseVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for DenseVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}

impl<T: Real> Add for &DenseVector<T> {
    type Output = DenseVector<T>;
    fn add(self, rhs: Self) -> DenseVector<T> {
        DenseVector::lincomb(T::one(), self, T::one(), rhs)
    }
}

impl<T: Real> Sub for &DenseVector<T> {
    type Output = DenseVector<T>;
    fn sub(self, rhs: Self) -> DenseVector<T> {
        DenseVector::lincomb(T::one(), self, -T::one(), rhs)
    }
}

impl<T: Real> Mul<T> for &DenseVector<T> {
    type Output = DenseVector<T>;
    fn mul(self, rhs: T) -> DenseVector<T> {
        self.scaled(rhs)
    }
}

impl<T: Real> Neg for &DenseVector<T> {
    type Output = DenseVector<T>;
    fn neg(self) -> DenseVector<T> {
        self.scaled(-T::one())
    }
}

impl<T: Real> AddAssign<&DenseVector<T>> for DenseVector<T> {
    fn add_assign(&mut self, rhs: &DenseVector<T>) {
        self.axpy(T::one(), rhs);
    }
}

impl<T: Real> SubAssign<&DenseVector<T>> for DenseVector<T> {
    fn sub_assign(&mut self, rhs: &DenseVector<T>) {
        self.axpy(-T::one(), rhs);
    }
}

impl<T: Real> FromIterator<T> for DenseVector<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Self { data: iter.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_end_counts_from_one() {
        let v = DenseVector::<f64>::from_f64(&[1.0, 0.0, 2.0, 0.0]);
        assert_eq!(v.support_end(1e-13), 3);
        assert_eq!(DenseVector::<f64>::zeros(4).support_end(1e-13), 0);
    }

    #[test]
    fn lincomb_and_ops_agree() {
        let x = DenseVector::<f64>::from_f64(&[1.0, 2.0]);
        let y = DenseVector::<f64>::from_f64(&[3.0, -1.0]);
        assert_eq!(&x + &y, DenseVector::lincomb(1.0, &x, 1.0, &y));
        assert_eq!((&x - &y).as_slice(), &[-2.0, 3.0]);
        assert_eq!(x.dot(&y), 1.0);
    }
}
