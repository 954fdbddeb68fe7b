use crate::numkit::{DenseMatrix, DenseVector};
use crate::oracle::{ComponentOracle, QuadraticComponent};
use crate::{Error, Real, Result};

/// `f(x) = ½ ||Zᵀx - y||² + (μ/2) ||x||²` with `Z` of shape `d × m`.
#[derive(Clone)]
pub struct RidgeComponent<T: Real> {
    z: DenseMatrix<T>,
    y: DenseVector<T>,
    mu: T,
    quad: QuadraticComponent<T>,
    smoothness: T,
}

impl<T: Real> RidgeComponent<T> {
    pub fn new(z: DenseMatrix<T>, y: DenseVector<T>, mu: T) -> Result<Self> {
        y.check_dim(z.cols())?;
        if !(mu >= T::zero()) {
            return Err(Error::InvalidParameter(format!("mu must be nonnegative, got {mu}")));
        }
        if !z.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite("ridge data"));
        }
        let gram = z.gram_rows().add_diag(mu);
        // exact symmetry; the product accumulates in different orders
        let hessian = gram.add(&gram.transpose()).scaled(T::lit(0.5));
        let linear = z.matvec(&y);
        let quad = QuadraticComponent::new(hessian, linear, T::lit(0.5) * y.norm_sq())?;
        let zn = z.spectral_norm()?;
        Ok(Self { z, y, mu, quad, smoothness: zn * zn + mu })
    }

    pub fn features(&self) -> &DenseMatrix<T> {
        &self.z
    }

    pub fn labels(&self) -> &DenseVector<T> {
        &self.y
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// `Z Zᵀ + μI`.
    pub fn hessian_matrix(&self) -> DenseMatrix<T> {
        self.quad.hessian().expect("quadratic")
    }
}

impl<T: Real> ComponentOracle<T> for RidgeComponent<T> {
    fn dim(&self) -> usize {
        self.z.rows()
    }

    fn value(&self, x: &DenseVector<T>) -> T {
        let r = &self.z.tmatvec(x) - &self.y;
        T::lit(0.5) * (r.norm_sq() + self.mu * x.norm_sq())
    }

    fn gradient(&self, x: &DenseVector<T>) -> DenseVector<T> {
        let r = &self.z.tmatvec(x) - &self.y;
        let mut g = self.z.matvec(&r);
        g.axpy(self.mu, x);
        g
    }

    fn prox(&self, x: &DenseVector<T>, gamma: T) -> Result<DenseVector<T>> {
        self.quad.prox(x, gamma)
    }

    fn has_closed_prox(&self) -> bool {
        true
    }

    fn hessian(&self) -> Option<DenseMatrix<T>> {
        self.quad.hessian()
    }

    fn smoothness(&self) -> Option<T> {
        Some(self.smoothness)
    }
}

/// `[Z Zᵀ + (μ + 1/θ) I]⁻¹ (Z y + x0/θ)`.
pub fn ridge_prox<T: Real>(comp: &RidgeComponent<T>, x0: &DenseVector<T>, theta: T) -> Result<DenseVector<T>> {
    if !(theta > T::zero()) {
        return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    x0.check_dim(comp.dim())?;
    comp.prox(x0, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::SeededRng;
    use crate::oracle::prox_residual;

    fn random_component(rng: &mut SeededRng, d: usize, m: usize, mu: f64) -> RidgeComponent<f64> {
        let data: Vec<f64> = (0..d * m).map(|_| rng.normal()).collect();
        let z = DenseMatrix::from_row_major(d, m, data).unwrap();
        RidgeComponent::new(z, rng.normal_vector(m), mu).unwrap()
    }

    #[test]
    fn zero_data_is_shrinkage() {
        let c = RidgeComponent::<f64>::new(DenseMatrix::zeros(3, 2), DenseVector::zeros(2), 0.5).unwrap();
        let x0 = DenseVector::from_f64(&[1.0, -2.0, 4.0]);
        let u = ridge_prox(&c, &x0, 0.2).unwrap();
        let want = x0.scaled(1.0 / 1.1);
        assert!(u.dist_sq(&want).sqrt() < 1e-14);
    }

    #[test]
    fn prox_is_stationary() {
        let mut rng = SeededRng::new(11);
        let c = random_component(&mut rng, 6, 4, 0.1);
        for theta in [1e-4, 0.3, 20.0] {
            let x0: DenseVector<f64> = rng.normal_vector(6);
            let u = ridge_prox(&c, &x0, theta).unwrap();
            let mut r = c.gradient(&u);
            r.axpy(1.0 / theta, &(&u - &x0));
            assert!(r.norm() <= 1e-9 * (1.0 + x0.norm() / theta), "theta {theta}: {}", r.norm());
            let (res, tol) = prox_residual(&c, &x0, theta, &u);
            assert!(res <= tol);
        }
    }

    #[test]
    fn small_step_barely_moves() {
        let mut rng = SeededRng::new(3);
        let c = random_component(&mut rng, 5, 5, 0.1);
        let x0: DenseVector<f64> = rng.normal_vector(5);
        let theta = 1e-7;
        let u = ridge_prox(&c, &x0, theta).unwrap();
        let bound = theta * c.gradient(&x0).norm();
        assert!(u.dist_sq(&x0).sqrt() <= 1.01 * bound);
    }

    #[test]
    fn rejects_bad_theta() {
        let mut rng = SeededRng::new(3);
        let c = random_component(&mut rng, 2, 2, 0.1);
        assert!(ridge_prox(&c, &DenseVector::zeros(2), 0.0).is_err());
        assert!(ridge_prox(&c, &DenseVector::zeros(2), -1.0).is_err());
    }

    #[test]
    fn value_matches_quadratic_form() {
        let mut rng = SeededRng::new(5);
        let c = random_component(&mut rng, 4, 7, 0.3);
        let x: DenseVector<f64> = rng.normal_vector(4);
        let via_quad = c.quad.value(&x);
        assert!((c.value(&x) - via_quad).abs() < 1e-10 * (1.0 + via_quad.abs()));
        assert_eq!(c.gradient(&x).dim(), 4);
    }
}
