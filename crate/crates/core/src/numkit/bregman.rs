use super::DenseVector;
use crate::{Error, Real, Result};

/// Bregman divergence `D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>`.
pub fn bregman<T, H, G>(h_value: H, h_grad: G, x: &DenseVector<T>, y: &DenseVector<T>) -> Result<T>
where
    T: Real,
    H: Fn(&DenseVector<T>) -> T,
    G: Fn(&DenseVector<T>) -> DenseVector<T>,
{
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: y.dim(), got: x.dim() });
    }
    let gy = h_grad(y);
    gy.check_dim(y.dim())?;
    Ok(h_value(x) - h_value(y) - gy.dot(&(x - y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_sq(x: &DenseVector<f64>) -> f64 {
        0.5 * x.norm_sq()
    }

    #[test]
    fn zero_on_diagonal() {
        let x = DenseVector::from_f64(&[0.3, -1.2, 4.0]);
        assert_eq!(bregman(half_sq, |v| v.clone(), &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn half_squared_norm_gives_half_distance() {
        let x = DenseVector::from_f64(&[1.0, 0.0]);
        let y = DenseVector::from_f64(&[0.0, 0.0]);
        assert_eq!(bregman(half_sq, |v| v.clone(), &x, &y).unwrap(), 0.5);
    }

    #[test]
    fn dimension_mismatch() {
        let x = DenseVector::from_f64(&[1.0, 0.0]);
        let y = DenseVector::from_f64(&[0.0]);
        assert!(bregman(half_sq, |v| v.clone(), &x, &y).is_err());
    }
}
