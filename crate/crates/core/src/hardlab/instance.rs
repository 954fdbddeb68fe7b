use std::sync::Arc;

use serde::Serialize;

use super::PartitionTable;
use crate::numkit::{DenseMatrix, DenseVector};
use crate::oracle::{ComponentOracle, Optimum, Problem, ProblemDescriptor, SharedComponent};
use crate::{Error, Real, Result};

/// Largest supported dimension of the hard instance.
pub const MAX_M: usize = 4096;

/// Parameters shared by all components: `f_i(x) = λ r_i(x/β)` with
/// `r_i(x) = (c/2)||x||² - [i = 1] n x_1 + (n/2) Σ_{l ∈ ℒ_i} (b_lᵀx)²`.
#[derive(Clone, Debug, Serialize)]
pub struct HardParams {
    pub n: usize,
    pub m: usize,
    pub zeta: f64,
    pub c: f64,
    pub lambda: f64,
    pub beta: f64,
    /// Present for the scaled instance only.
    pub scaled: Option<ScaledParams>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScaledParams {
    pub delta: f64,
    pub mu: f64,
    pub gap0: f64,
    pub rho: f64,
    pub q: f64,
}

impl ScaledParams {
    /// `ρ = sqrt(2(δ/μ)/sqrt(2n+1) + 1)`.
    pub fn rho(n: usize, delta: f64, mu: f64) -> f64 {
        (2.0 * (delta / mu) / (2.0 * n as f64 + 1.0).sqrt() + 1.0).sqrt()
    }

    pub fn q(n: usize, delta: f64, mu: f64) -> f64 {
        let rho = Self::rho(n, delta, mu);
        (rho - 1.0) / (rho + 1.0)
    }
}

impl HardParams {
    /// `ξ = λ/β²`, the curvature scale of the data term.
    pub fn xi(&self) -> f64 {
        self.lambda / (self.beta * self.beta)
    }
}

/// `B(m, ζ)`: upper bidiagonal with unit diagonal, `-1` superdiagonal and `ζ` in the corner.
pub fn build_b<T: Real>(m: usize, zeta: T) -> DenseMatrix<T> {
    let mut b = DenseMatrix::zeros(m, m);
    for l in 0..m {
        if l + 1 < m {
            b[(l, l)] = T::one();
            b[(l, l + 1)] = -T::one();
        } else {
            b[(l, l)] = zeta;
        }
    }
    b
}

/// `A(m, ζ) = BᵀB`, tridiagonal.
pub fn build_a<T: Real>(m: usize, zeta: T) -> DenseMatrix<T> {
    let mut a = DenseMatrix::zeros(m, m);
    for l in 0..m {
        a[(l, l)] = a_diag(l, m, zeta);
        if l + 1 < m {
            a[(l, l + 1)] = -T::one();
            a[(l + 1, l)] = -T::one();
        }
    }
    a
}

/// Diagonal entry `l` (0-based) of `A(m, ζ)`.
fn a_diag<T: Real>(l: usize, m: usize, zeta: T) -> T {
    let own = if l + 1 < m { T::one() } else { zeta * zeta };
    let above = if l > 0 { T::one() } else { T::zero() };
    own + above
}

/// `b_lᵀx` for 1-based row `l`.
#[inline]
fn b_dot<T: Real>(x: &[T], l: usize, zeta: T) -> T {
    let m = x.len();
    if l < m {
        x[l - 1] - x[l]
    } else {
        zeta * x[m - 1]
    }
}

/// `y += s · b_l`.
#[inline]
fn add_b<T: Real>(y: &mut [T], l: usize, zeta: T, s: T) {
    let m = y.len();
    if l < m {
        y[l - 1] += s;
        y[l] -= s;
    } else {
        y[m - 1] += zeta * s;
    }
}

#[inline]
fn b_norm_sq<T: Real>(l: usize, m: usize, zeta: T) -> T {
    if l < m {
        T::lit(2.0)
    } else {
        zeta * zeta
    }
}

/// Solves the symmetric tridiagonal system with constant off-diagonal `off`.
fn solve_tridiagonal<T: Real>(diag: &[T], off: T, rhs: &[T]) -> Result<Vec<T>> {
    let k = diag.len();
    let mut c = vec![T::zero(); k];
    let mut d = vec![T::zero(); k];
    let mut denom = diag[0];
    if !(denom > T::zero()) {
        return Err(Error::NotPositiveDefinite);
    }
    c[0] = off / denom;
    d[0] = rhs[0] / denom;
    for i in 1..k {
        denom = diag[i] - off * c[i - 1];
        if !(denom > T::zero()) {
            return Err(Error::NotPositiveDefinite);
        }
        c[i] = off / denom;
        d[i] = (rhs[i] - off * d[i - 1]) / denom;
    }
    let mut x = vec![T::zero(); k];
    x[k - 1] = d[k - 1];
    for i in (0..k - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

/// One component `f_i = λ r_i(·/β)` with closed-form gradient and prox.
#[derive(Clone, Debug)]
pub struct HardComponent<T: Real> {
    index: usize,
    params: Arc<HardParams>,
    rows: Vec<usize>,
    zeta: T,
    c: T,
    n: T,
    lambda: T,
    beta: T,
}

impl<T: Real> HardComponent<T> {
    fn new(index: usize, params: Arc<HardParams>, rows: Vec<usize>) -> Self {
        Self {
            index,
            zeta: T::lit(params.zeta),
            c: T::lit(params.c),
            n: T::from_usize_lossy(params.n),
            lambda: T::lit(params.lambda),
            beta: T::lit(params.beta),
            params,
            rows,
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    fn r_value(&self, v: &[T]) -> T {
        let mut s = T::lit(0.5) * self.c * v.iter().map(|&a| a * a).sum::<T>();
        if self.index == 0 {
            s -= self.n * v[0];
        }
        for &l in &self.rows {
            let b = b_dot(v, l, self.zeta);
            s += T::lit(0.5) * self.n * b * b;
        }
        s
    }

    fn r_gradient(&self, v: &[T]) -> Vec<T> {
        let mut g: Vec<T> = v.iter().map(|&a| self.c * a).collect();
        if self.index == 0 {
            g[0] -= self.n;
        }
        for &l in &self.rows {
            let b = b_dot(v, l, self.zeta);
            add_b(&mut g, l, self.zeta, self.n * b);
        }
        g
    }

    /// `prox_{r_i}^γ(v)`. The rows of one node are pairwise orthogonal, so
    /// `(cγ+1)I + nγ Σ b_l b_lᵀ` inverts row by row.
    fn r_prox(&self, v: &[T], gamma: T) -> Vec<T> {
        let m = v.len();
        let a = self.c * gamma + T::one();
        let mut w: Vec<T> = v.to_vec();
        if self.index == 0 {
            w[0] += self.n * gamma;
        }
        let mut u = w.clone();
        for &l in &self.rows {
            let d = T::one() / (a / (self.n * gamma) + b_norm_sq(l, m, self.zeta));
            let b = b_dot(&w, l, self.zeta);
            add_b(&mut u, l, self.zeta, -d * b);
        }
        u.iter_mut().for_each(|x| *x /= a);
        u
    }
}

impl<T: Real> ComponentOracle<T> for HardComponent<T> {
    fn dim(&self) -> usize {
        self.params.m
    }

    fn value(&self, x: &DenseVector<T>) -> T {
        let v: Vec<T> = x.iter().map(|&a| a / self.beta).collect();
        self.lambda * self.r_value(&v)
    }

    fn gradient(&self, x: &DenseVector<T>) -> DenseVector<T> {
        let v: Vec<T> = x.iter().map(|&a| a / self.beta).collect();
        let s = self.lambda / self.beta;
        self.r_gradient(&v).into_iter().map(|g| s * g).collect()
    }

    fn prox(&self, x: &DenseVector<T>, gamma: T) -> Result<DenseVector<T>> {
        if !(gamma > T::zero()) {
            return Err(Error::InvalidParameter(format!("prox step must be positive, got {gamma}")));
        }
        x.check_dim(self.params.m)?;
        let v: Vec<T> = x.iter().map(|&a| a / self.beta).collect();
        let xi = self.lambda / (self.beta * self.beta);
        Ok(self.r_prox(&v, gamma * xi).into_iter().map(|u| self.beta * u).collect())
    }

    fn has_closed_prox(&self) -> bool {
        true
    }

    fn hessian(&self) -> Option<DenseMatrix<T>> {
        let m = self.params.m;
        let xi = self.lambda / (self.beta * self.beta);
        let mut h = DenseMatrix::<T>::identity(m).scaled(self.c);
        let bmat = build_b(m, self.zeta);
        for &l in &self.rows {
            let row = bmat.row(l - 1);
            for i in 0..m {
                for j in 0..m {
                    h[(i, j)] += self.n * row[i] * row[j];
                }
            }
        }
        Some(h.scaled(xi))
    }

    fn smoothness(&self) -> Option<T> {
        // ||b_l||² ≤ 2 and rows of one node are orthogonal
        let m = self.params.m;
        let worst = self.rows.iter().map(|&l| b_norm_sq(l, m, self.zeta)).fold(T::zero(), |a, b| a.max(b));
        Some(self.lambda / (self.beta * self.beta) * (self.c + self.n * worst))
    }
}

/// The lower-bound instance with its partition and closed-form optimum.
#[derive(Clone, Debug)]
pub struct HardInstance {
    params: Arc<HardParams>,
    partition: PartitionTable,
}

impl HardInstance {
    /// `r(·; m, ζ, c)` with `λ = β = 1`.
    pub fn unscaled(n: usize, m: usize, zeta: f64, c: f64) -> Result<Self> {
        Self::check_common(n, m, zeta)?;
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        let params = HardParams { n, m, zeta, c, lambda: 1.0, beta: 1.0, scaled: None };
        Ok(Self { params: Arc::new(params), partition: PartitionTable::new(n, m)? })
    }

    /// Rescaled instance with strong convexity `mu`, similarity `delta` and
    /// initial gap `gap0` at the origin.
    pub fn scaled(n: usize, delta: f64, mu: f64, gap0: f64, m: usize) -> Result<Self> {
        if !(mu > 0.0 && delta >= mu && gap0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need delta >= mu > 0 and gap0 > 0 (delta={delta}, mu={mu}, gap0={gap0})"
            )));
        }
        let rho = ScaledParams::rho(n, delta, mu);
        let q = (rho - 1.0) / (rho + 1.0);
        let lambda = 4.0 * gap0 / (rho - 1.0);
        let beta = 4.0 / (rho - 1.0) * (gap0 / (mu * (rho + 1.0))).sqrt();
        let zeta = (2.0 / (1.0 + rho)).sqrt();
        let c = 4.0 / (rho * rho - 1.0);
        Self::check_common(n, m, zeta)?;
        let scaled = ScaledParams { delta, mu, gap0, rho, q };
        let params = HardParams { n, m, zeta, c, lambda, beta, scaled: Some(scaled) };
        Ok(Self { params: Arc::new(params), partition: PartitionTable::new(n, m)? })
    }

    /// Scaled instance with `m = ⌊log(Δ/(9ε)) / (2 log(1/q)) + 2⌋`; requires `ε ≤ Δq³/9`.
    pub fn scaled_for_eps(n: usize, delta: f64, mu: f64, gap0: f64, eps: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("need n >= 3, got {n}")));
        }
        let q = ScaledParams::q(n, delta, mu);
        if !(eps > 0.0 && eps <= gap0 * q.powi(3) / 9.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} exceeds gap0 q^3 / 9 = {}", gap0 * q.powi(3) / 9.0)));
        }
        let m = ((gap0 / (9.0 * eps)).ln() / (2.0 * (1.0 / q).ln()) + 2.0).floor() as usize;
        Self::scaled(n, delta, mu, gap0, m)
    }

    fn check_common(n: usize, m: usize, zeta: f64) -> Result<()> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("need n >= 3, got {n}")));
        }
        if !(3..=MAX_M).contains(&m) {
            return Err(Error::InvalidParameter(format!("m must lie in 3..={MAX_M}, got {m}")));
        }
        if !(zeta > 0.0 && zeta <= 2f64.sqrt() + 1e-15) {
            return Err(Error::InvalidParameter(format!("zeta must lie in (0, sqrt 2], got {zeta}")));
        }
        Ok(())
    }

    /// Replaces the row assignment (for negative tests).
    pub fn with_partition(mut self, partition: PartitionTable) -> Result<Self> {
        if partition.n() != self.params.n || partition.m() != self.params.m {
            return Err(Error::InvalidParameter("partition shape does not match the instance".into()));
        }
        self.partition = partition;
        Ok(self)
    }

    pub fn params(&self) -> &HardParams {
        &self.params
    }

    pub fn partition(&self) -> &PartitionTable {
        &self.partition
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn components<T: Real>(&self) -> Vec<HardComponent<T>> {
        (0..self.params.n)
            .map(|i| HardComponent::new(i, Arc::clone(&self.params), self.partition.rows(i).to_vec()))
            .collect()
    }

    /// Strong convexity of the average: `λc/β²`.
    pub fn mu(&self) -> f64 {
        self.params.xi() * self.params.c
    }

    /// Proven similarity modulus: `ξ sqrt(8n + 4)`.
    pub fn delta_bound(&self) -> f64 {
        self.params.xi() * (8.0 * self.params.n as f64 + 4.0).sqrt()
    }

    /// Diagonal of `H = ξA + μI` and its constant off-diagonal.
    fn hessian_tridiagonal(&self, k: usize) -> (Vec<f64>, f64) {
        let xi = self.params.xi();
        let mu = self.mu();
        let m = self.params.m;
        let diag = (0..k).map(|l| xi * a_diag(l, m, self.params.zeta) + mu).collect();
        (diag, -xi)
    }

    /// Right-hand side scale: `∇f(0) = -ξβ e_1`.
    fn linear_coef(&self) -> f64 {
        self.params.xi() * self.params.beta
    }

    /// Minimizer over the leading `k` coordinates, by a `k × k` tridiagonal solve.
    pub fn restricted_minimizer(&self, k: usize) -> Result<DenseVector<f64>> {
        let m = self.params.m;
        if k > m {
            return Err(Error::InvalidParameter(format!("k = {k} exceeds m = {m}")));
        }
        let mut x = vec![0.0; m];
        if k > 0 {
            let (diag, off) = self.hessian_tridiagonal(k);
            let mut rhs = vec![0.0; k];
            rhs[0] = self.linear_coef();
            let sol = solve_tridiagonal(&diag, off, &rhs)?;
            x[..k].copy_from_slice(&sol);
        }
        Ok(DenseVector::from_vec(x))
    }

    /// Exact minimizer from the full solve.
    pub fn minimizer_numeric(&self) -> Result<DenseVector<f64>> {
        self.restricted_minimizer(self.params.m)
    }

    /// `β(ρ+1)/2 · (q, q², …, q^m)`; scaled instances only.
    pub fn minimizer_closed_form(&self) -> Option<DenseVector<f64>> {
        let s = self.params.scaled?;
        let scale = self.params.beta * (s.rho + 1.0) / 2.0;
        Some((1..=self.params.m).map(|j| scale * s.q.powi(j as i32)).collect())
    }

    pub fn minimizer(&self) -> Result<DenseVector<f64>> {
        match self.minimizer_closed_form() {
            Some(x) => Ok(x),
            None => self.minimizer_numeric(),
        }
    }

    /// `f(x) = (ξ/2) xᵀAx + (μ/2)||x||² - ξβ x_1`.
    pub fn value(&self, x: &DenseVector<f64>) -> f64 {
        let xi = self.params.xi();
        let s = x.as_slice();
        let a_form: f64 = (1..=s.len()).map(|l| b_dot(s, l, self.params.zeta).powi(2)).sum();
        0.5 * xi * a_form + 0.5 * self.mu() * x.norm_sq() - self.linear_coef() * s[0]
    }

    /// `f(x) - f(x*)` as `½ eᵀHe`, free of cancellation.
    pub fn gap(&self, x: &DenseVector<f64>) -> Result<f64> {
        x.check_dim(self.params.m)?;
        let e = x - &self.minimizer()?;
        let s = e.as_slice();
        let a_form: f64 = (1..=s.len()).map(|l| b_dot(s, l, self.params.zeta).powi(2)).sum();
        Ok(0.5 * self.params.xi() * a_form + 0.5 * self.mu() * e.norm_sq())
    }

    /// `(min_{x ∈ 𝔽_k} f(x) - f(x*), min_{x ∈ 𝔽_k} ||x - x*||²)` for `0 ≤ k ≤ m-1`.
    pub fn subspace_gap(&self, k: usize) -> Result<(f64, f64)> {
        let m = self.params.m;
        if k >= m {
            return Err(Error::InvalidParameter(format!("k = {k} must be below m = {m}")));
        }
        let xk = self.restricted_minimizer(k)?;
        let xs = self.minimizer()?;
        let gap = self.gap(&xk)?;
        // the closest point of 𝔽_k keeps the leading coordinates of x*
        let dist: f64 = xs.as_slice()[k..].iter().map(|v| v * v).sum();
        Ok((gap, dist))
    }

    /// `(Δ q^{2k}, 4Δ/(μ(ρ+1)) q^{2k})`; scaled instances only.
    pub fn subspace_floor(&self, k: usize) -> Option<(f64, f64)> {
        let s = self.params.scaled?;
        let q2k = s.q.powi(2 * k as i32);
        Some((s.gap0 * q2k, 4.0 * s.gap0 / (s.mu * (s.rho + 1.0)) * q2k))
    }

    /// `Δ(1+q) q^{2k} / (1 + q^{2k+1})`; scaled instances only.
    pub fn subspace_gap_closed_form(&self, k: usize) -> Option<f64> {
        let s = self.params.scaled?;
        let q = s.q;
        Some(s.gap0 * (1.0 + q) * q.powi(2 * k as i32) / (1.0 + q.powi(2 * k as i32 + 1)))
    }

    /// The instance as a [`Problem`] with declared moduli and known optimum.
    pub fn problem(&self) -> Result<Problem<f64>> {
        let comps: Vec<SharedComponent<f64>> =
            self.components::<f64>().into_iter().map(|c| Arc::new(c) as SharedComponent<f64>).collect();
        let (mu, delta) = match self.params.scaled {
            Some(s) => (s.mu, s.delta),
            None => (self.mu(), self.delta_bound()),
        };
        let x = self.minimizer()?;
        let value = self.value(&x);
        let descriptor = ProblemDescriptor {
            kind: if self.params.scaled.is_some() { "hard_scaled" } else { "hard" }.into(),
            d: self.params.m,
            n: self.params.n,
            mu,
            delta_paper: Some(delta),
            delta_exact: None,
            smoothness: None,
            seed: None,
        };
        Problem::new(comps, mu, delta)?
            .with_optimum(Optimum { x, value, mean_hessian: None })
            .map(|p| p.with_descriptor(descriptor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::prox_residual;

    #[test]
    fn b_small_case() {
        let b = build_b(2, 2.0_f64);
        assert_eq!(b.as_slice(), &[1.0, -1.0, 0.0, 2.0]);
    }

    #[test]
    fn a_is_b_transpose_b() {
        for (m, z) in [(1, 0.7), (2, 2.0), (6, 0.5), (9, 2f64.sqrt())] {
            let b = build_b(m, z);
            assert_eq!(build_a(m, z), b.transpose().matmul(&b));
        }
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let diag = [4.0, 5.0, 3.0, 6.0];
        let rhs = [1.0, -2.0, 0.5, 3.0];
        let x = solve_tridiagonal(&diag, -1.0, &rhs).unwrap();
        let mut a = DenseMatrix::from_diag(&diag);
        for i in 0..3 {
            a[(i, i + 1)] = -1.0;
            a[(i + 1, i)] = -1.0;
        }
        let y = a.cholesky().unwrap().solve(&DenseVector::from_f64(&rhs));
        for i in 0..4 {
            assert!((x[i] - y[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn master_oracles_at_origin() {
        let inst = HardInstance::unscaled(5, 9, 1.0, 1.0).unwrap();
        let comps = inst.components::<f64>();
        let zero = DenseVector::zeros(9);
        assert_eq!(comps[0].gradient(&zero), DenseVector::basis(9, 0).scaled(-5.0));
        let gamma = 0.3;
        let u = comps[0].prox(&zero, gamma).unwrap();
        assert_eq!(u, DenseVector::basis(9, 0).scaled(5.0 / (1.0 / gamma + 1.0)));
    }

    #[test]
    fn closed_prox_is_stationary() {
        let inst = HardInstance::scaled(5, 50.0, 1.0, 2.0, 12).unwrap();
        let x: DenseVector<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
        for c in inst.components::<f64>() {
            for gamma in [1e-3, 0.2, 7.0] {
                let u = c.prox(&x, gamma).unwrap();
                let (res, tol) = prox_residual(&c, &x, gamma, &u);
                assert!(res <= tol, "node {} gamma {gamma}: {res} > {tol}", c.index());
            }
        }
    }

    #[test]
    fn average_matches_tridiagonal_form() {
        let inst = HardInstance::unscaled(4, 10, 0.8, 1.0).unwrap();
        let p = inst.problem().unwrap();
        let a = build_a(10, 0.8);
        let x: DenseVector<f64> = (0..10).map(|i| (i as f64).cos()).collect();
        let want = 0.5 * x.dot(&a.matvec(&x)) + 0.5 * x.norm_sq() - x[0];
        assert!((p.full_value(&x).unwrap() - want).abs() < 1e-12);
        assert_eq!(p.full_value(&DenseVector::zeros(10)).unwrap(), 0.0);
    }

    #[test]
    fn scaled_minimizer_and_gap() {
        let inst = HardInstance::scaled(6, 200.0, 1.0, 3.0, 20).unwrap();
        let closed = inst.minimizer_closed_form().unwrap();
        let numeric = inst.minimizer_numeric().unwrap();
        assert!(closed.dist_sq(&numeric).sqrt() <= 1e-10 * closed.norm());
        let gap0 = inst.value(&DenseVector::zeros(20)) - inst.value(&closed);
        assert!((gap0 - 3.0).abs() < 1e-9 * 3.0);
        let (g0, d0) = inst.subspace_gap(0).unwrap();
        assert!((g0 - 3.0).abs() < 1e-9 * 3.0);
        assert!((d0 - closed.norm_sq()).abs() < 1e-12 * d0);
    }

    #[test]
    fn subspace_gaps_respect_floors() {
        let inst = HardInstance::scaled(5, 400.0, 1.0, 1.0, 20).unwrap();
        for k in 0..20 {
            let (g, d) = inst.subspace_gap(k).unwrap();
            let (gf, df) = inst.subspace_floor(k).unwrap();
            let exact = inst.subspace_gap_closed_form(k).unwrap();
            assert!((g - exact).abs() <= 1e-8 * exact, "k={k}: {g} vs {exact}");
            assert!(g >= gf && d >= df, "k={k}");
        }
        assert!(inst.subspace_gap(20).is_err());
    }

    #[test]
    fn eps_precondition_and_m() {
        let q = ScaledParams::q(5, 100.0, 1.0);
        assert!(HardInstance::scaled_for_eps(5, 100.0, 1.0, 1.0, q.powi(3)).is_err());
        let eps = 1e-6;
        let inst = HardInstance::scaled_for_eps(5, 100.0, 1.0, 1.0, eps).unwrap();
        let want = ((1.0 / (9.0 * eps)).ln() / (2.0 * (1.0 / q).ln()) + 2.0).floor() as usize;
        assert_eq!(inst.m(), want);
    }

    #[test]
    fn scaled_moduli() {
        let inst = HardInstance::scaled(7, 30.0, 0.5, 1.0, 10).unwrap();
        assert!((inst.mu() - 0.5).abs() < 1e-12);
        assert!((inst.delta_bound() - 30.0).abs() < 1e-9);
    }
}
