//! Cross-checks against code paths that share nothing with the crate:
//! nalgebra factorizations, central finite differences and conjugate gradients.

use nalgebra::{DMatrix, DVector};
use svrs_core::hardlab::HardInstance;
use svrs_core::numkit::{DenseMatrix, DenseVector, SeededRng};
use svrs_core::oracle::{exact_avess_quadratic, ComponentOracle};
use svrs_core::problems::{gen_synthetic, ridge_prox, RidgeComponent, SyntheticSpec};

fn to_na(m: &DenseMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn random_matrix(rng: &mut SeededRng, r: usize, c: usize) -> DenseMatrix<f64> {
    let data = (0..r * c).map(|_| rng.normal()).collect();
    DenseMatrix::from_row_major(r, c, data).unwrap()
}

fn random_spd(rng: &mut SeededRng, d: usize) -> DenseMatrix<f64> {
    let g = random_matrix(rng, d, d + 2);
    g.gram_rows().add_diag(0.1)
}

/// Plain conjugate gradients on `A u = b`.
fn cg(apply: impl Fn(&DVector<f64>) -> DVector<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    let mut x = DVector::zeros(b.len());
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = r.dot(&r);
    for _ in 0..10 * b.len() + 100 {
        if rs.sqrt() <= tol * (1.0 + b.norm()) {
            break;
        }
        let ap = apply(&p);
        let a = rs / p.dot(&ap);
        x += a * &p;
        r -= a * &ap;
        let rs_new = r.dot(&r);
        p = &r + (rs_new / rs) * &p;
        rs = rs_new;
    }
    x
}

fn finite_difference(f: &dyn ComponentOracle<f64>, x: &DenseVector<f64>) -> DenseVector<f64> {
    let h = 1e-5;
    (0..x.dim())
        .map(|j| {
            let mut up = x.clone();
            let mut dn = x.clone();
            up.as_mut_slice()[j] += h;
            dn.as_mut_slice()[j] -= h;
            (f.value(&up) - f.value(&dn)) / (2.0 * h)
        })
        .collect()
}

#[test]
fn eigenvalues_match_nalgebra() {
    let mut rng = SeededRng::new(1);
    for d in [1, 2, 5, 17, 40] {
        let g = random_matrix(&mut rng, d, d);
        let s = g.add(&g.transpose());
        let ours = s.symmetric_eigen().unwrap();
        let mut theirs: Vec<f64> = nalgebra::SymmetricEigen::new(to_na(&s)).eigenvalues.iter().copied().collect();
        theirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let scale = theirs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in ours.values.iter().zip(&theirs) {
            assert!((a - b).abs() <= 1e-10 * scale, "d={d}: {a} vs {b}");
        }
        let svd = nalgebra::SVD::new(to_na(&g), false, false);
        let top = svd.singular_values.max();
        assert!((g.spectral_norm().unwrap() - top).abs() <= 1e-10 * top);
    }
}

#[test]
fn cholesky_solve_matches_nalgebra() {
    let mut rng = SeededRng::new(2);
    for d in [1, 3, 12, 30] {
        let a = random_spd(&mut rng, d);
        let b: DenseVector<f64> = rng.normal_vector(d);
        let ours = a.cholesky().unwrap().solve(&b);
        let theirs = to_na(&a).cholesky().unwrap().solve(&DVector::from_column_slice(b.as_slice()));
        for (x, y) in ours.iter().zip(theirs.iter()) {
            assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
    }
}

#[test]
fn exact_avess_matches_nalgebra() {
    let mut rng = SeededRng::new(3);
    let hs: Vec<DenseMatrix<f64>> = (0..6).map(|_| random_spd(&mut rng, 7)).collect();
    let mean = hs.iter().fold(DMatrix::zeros(7, 7), |acc, h| acc + to_na(h)) / 6.0;
    let acc = hs.iter().fold(DMatrix::zeros(7, 7), |acc, h| {
        let dev = to_na(h) - &mean;
        acc + &dev * &dev
    }) / 6.0;
    let top = nalgebra::SymmetricEigen::new(acc).eigenvalues.max();
    let ours = exact_avess_quadratic(&hs).unwrap();
    assert!((ours - top.sqrt()).abs() <= 1e-10 * top.sqrt());
}

#[test]
fn ridge_gradients_match_finite_differences() {
    let spec = SyntheticSpec { d: 8, n: 4, base_norm: 3.0, perturb_norm: 0.5, mu: 0.1, seed: 4, ..Default::default() };
    let p = gen_synthetic::<f64>(&spec).unwrap();
    let mut rng = SeededRng::new(4);
    for i in 0..p.n() {
        let x: DenseVector<f64> = rng.normal_vector(8);
        let g = p.component(i).gradient(&x);
        let fd = finite_difference(p.component(i), &x);
        assert!(g.dist_sq(&fd).sqrt() <= 1e-5 * (1.0 + g.norm()));
    }
}

#[test]
fn hard_gradients_match_finite_differences() {
    let inst = HardInstance::scaled(5, 2.0, 0.1, 1.0, 9).unwrap();
    let mut rng = SeededRng::new(5);
    for c in inst.components::<f64>() {
        let x: DenseVector<f64> = rng.normal_vector(9);
        let g = c.gradient(&x);
        let fd = finite_difference(&c, &x);
        assert!(g.dist_sq(&fd).sqrt() <= 1e-5 * (1.0 + g.norm()));
    }
}

#[test]
fn ridge_prox_matches_conjugate_gradients() {
    let mut rng = SeededRng::new(6);
    for trial in 0..100 {
        let d = 2 + trial % 9;
        let m = 1 + trial % 5;
        let z = random_matrix(&mut rng, d, m);
        let y: DenseVector<f64> = rng.normal_vector(m);
        let mu = 0.05;
        let comp = RidgeComponent::new(z.clone(), y.clone(), mu).unwrap();
        let x0: DenseVector<f64> = rng.normal_vector(d);
        let theta = 10f64.powf(rng.uniform() * 4.0 - 2.0);
        let ours = ridge_prox(&comp, &x0, theta).unwrap();
        // (Z Zᵀ + (μ + 1/θ) I) u = Z y + x0/θ
        let zn = to_na(&z);
        let shift = mu + 1.0 / theta;
        let rhs = &zn * DVector::from_column_slice(y.as_slice()) + DVector::from_column_slice(x0.as_slice()) / theta;
        let u = cg(|v| &zn * (zn.transpose() * v) + shift * v, &rhs, 1e-14);
        let err = (DVector::from_column_slice(ours.as_slice()) - &u).norm() / (1.0 + u.norm());
        assert!(err <= 1e-8, "trial {trial}: {err}");
    }
}

#[test]
fn hard_prox_matches_conjugate_gradients() {
    let inst = HardInstance::unscaled(5, 9, 0.8, 1.0).unwrap();
    let comps = inst.components::<f64>();
    let mut rng = SeededRng::new(7);
    for trial in 0..100 {
        let c = &comps[trial % 5];
        let h = to_na(&c.hessian().unwrap());
        let lin = c.gradient(&DenseVector::zeros(9));
        let x: DenseVector<f64> = rng.normal_vector(9);
        let gamma = 10f64.powf(rng.uniform() * 4.0 - 2.0);
        // (H + I/γ) u = x/γ - ∇f(0)
        let rhs = DVector::from_column_slice(x.as_slice()) / gamma - DVector::from_column_slice(lin.as_slice());
        let u = cg(|v| &h * v + v / gamma, &rhs, 1e-14);
        let ours = c.prox(&x, gamma).unwrap();
        let err = (DVector::from_column_slice(ours.as_slice()) - &u).norm() / (1.0 + u.norm());
        assert!(err <= 1e-9, "trial {trial}: {err}");
    }
}

#[test]
fn hard_minimizer_matches_dense_solve() {
    for (n, ratio, gap0, m) in [(3, 10.0, 1.0, 12), (5, 100.0, 0.5, 40), (8, 1e3, 3.0, 64)] {
        let mu = 0.2;
        let inst = HardInstance::scaled(n, ratio * mu, mu, gap0, m).unwrap();
        let xi = inst.params().xi();
        let beta = inst.params().beta;
        let a = to_na(&svrs_core::hardlab::build_a::<f64>(m, inst.params().zeta));
        let system = a * xi + DMatrix::identity(m, m) * mu;
        let mut rhs = DVector::zeros(m);
        rhs[0] = xi * beta;
        let dense = system.lu().solve(&rhs).unwrap();
        let closed = inst.minimizer_closed_form().unwrap();
        let err = (DVector::from_column_slice(closed.as_slice()) - &dense).norm() / dense.norm();
        assert!(err <= 1e-10, "{err}");
        let drop = -inst.value(&closed);
        assert!((drop - gap0).abs() <= 1e-9 * gap0);
    }
}
