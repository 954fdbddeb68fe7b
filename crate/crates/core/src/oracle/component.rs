use std::sync::{Arc, Mutex};

use crate::numkit::{Cholesky, DenseMatrix, DenseVector};
use crate::{Error, Real, Result};

/// Proximal incremental first-order oracle for one component `f_i`:
/// value, gradient and `prox_{f_i}^γ(x) = argmin_u f_i(u) + ||x - u||² / (2γ)`.
pub trait ComponentOracle<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &DenseVector<T>) -> T;

    fn gradient(&self, x: &DenseVector<T>) -> DenseVector<T>;

    fn prox(&self, _x: &DenseVector<T>, _gamma: T) -> Result<DenseVector<T>> {
        Err(Error::NoProx(usize::MAX))
    }

    fn has_closed_prox(&self) -> bool {
        false
    }

    /// Constant Hessian, for quadratic components.
    fn hessian(&self) -> Option<DenseMatrix<T>> {
        None
    }

    /// Gradient Lipschitz constant, when known.
    fn smoothness(&self) -> Option<T> {
        None
    }
}

/// Small cache of `(H + I/γ)` factorizations keyed by `γ`.
///
/// Solvers use one or two step sizes per run, so a handful of entries suffice.
pub(crate) struct ProxFactorCache<T> {
    entries: Mutex<Vec<(T, Arc<Cholesky<T>>)>>,
}

impl<T: Real> ProxFactorCache<T> {
    const CAPACITY: usize = 8;

    pub(crate) fn new() -> Self {
        Self { entries: Mutex::new(Vec::new()) }
    }

    pub(crate) fn get_or_factor(&self, gamma: T, hessian: &DenseMatrix<T>) -> Result<Arc<Cholesky<T>>> {
        {
            let entries = self.entries.lock().expect("prox cache poisoned");
            if let Some((_, f)) = entries.iter().find(|(g, _)| *g == gamma) {
                return Ok(Arc::clone(f));
            }
        }
        let factor = Arc::new(hessian.add_diag(T::one() / gamma).cholesky()?);
        let mut entries = self.entries.lock().expect("prox cache poisoned");
        if entries.len() >= Self::CAPACITY {
            entries.remove(0);
        }
        entries.push((gamma, Arc::clone(&factor)));
        Ok(factor)
    }
}

impl<T: Real> Clone for ProxFactorCache<T> {
    fn clone(&self) -> Self {
        Self::new()
    }
}

/// `f(x) = ½ xᵀHx - bᵀx + c` with symmetric `H`.
#[derive(Clone)]
pub struct QuadraticComponent<T: Real> {
    hessian: DenseMatrix<T>,
    linear: DenseVector<T>,
    constant: T,
    cache: ProxFactorCache<T>,
}

impl<T: Real> QuadraticComponent<T> {
    pub fn new(hessian: DenseMatrix<T>, linear: DenseVector<T>, constant: T) -> Result<Self> {
        hessian.check_symmetric()?;
        linear.check_dim(hessian.rows())?;
        Ok(Self { hessian, linear, constant, cache: ProxFactorCache::new() })
    }

    pub fn linear(&self) -> &DenseVector<T> {
        &self.linear
    }
}

impl<T: Real> ComponentOracle<T> for QuadraticComponent<T> {
    fn dim(&self) -> usize {
        self.hessian.rows()
    }

    fn value(&self, x: &DenseVector<T>) -> T {
        T::lit(0.5) * x.dot(&self.hessian.matvec(x)) - self.linear.dot(x) + self.constant
    }

    fn gradient(&self, x: &DenseVector<T>) -> DenseVector<T> {
        &self.hessian.matvec(x) - &self.linear
    }

    fn prox(&self, x: &DenseVector<T>, gamma: T) -> Result<DenseVector<T>> {
        if !(gamma > T::zero()) {
            return Err(Error::InvalidParameter(format!("prox step must be positive, got {gamma}")));
        }
        let factor = self.cache.get_or_factor(gamma, &self.hessian)?;
        let rhs = DenseVector::lincomb(T::one(), &self.linear, T::one() / gamma, x);
        Ok(factor.solve(&rhs))
    }

    fn has_closed_prox(&self) -> bool {
        true
    }

    fn hessian(&self) -> Option<DenseMatrix<T>> {
        Some(self.hessian.clone())
    }

    fn smoothness(&self) -> Option<T> {
        self.hessian.spectral_norm().ok()
    }
}

/// Stationarity residual of a prox output:
/// `||grad f(u) + (u - x)/γ||` against the tolerance `1e-8 (1 + ||x||/γ)`.
pub fn prox_residual<T: Real>(
    oracle: &dyn ComponentOracle<T>,
    x: &DenseVector<T>,
    gamma: T,
    u: &DenseVector<T>,
) -> (T, T) {
    let mut r = oracle.gradient(u);
    r.axpy(T::one() / gamma, &(u - x));
    let tol = T::lit(1e-8) * (T::one() + x.norm() / gamma);
    (r.norm(), tol)
}
