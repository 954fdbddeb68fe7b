use statrs::distribution::{ChiSquared, ContinuousCDF};
use svrs_core::netsim::{CountingMode, NetProblem};
use svrs_core::numkit::{chi_square_geometric, chi_square_two_sample, ks_distance_geometric, DenseVector, SeededRng};
use svrs_core::problems::{gen_synthetic, DeltaSource, SyntheticSpec};
use svrs_core::solvers::{default_svrs_hyper, loopless_svrs, svrs, InnerSolveSpec, RunOptions};

fn p_value(stat: f64, dof: usize) -> f64 {
    1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat)
}

#[test]
fn sampler_matches_geometric_cdf() {
    let mut rng = SeededRng::new(1);
    for p in [0.5, 1.0 / 20.0, 1.0 / 400.0] {
        let draws: Vec<u64> = (0..1_000_000).map(|_| rng.geometric(p).unwrap()).collect();
        let ks = ks_distance_geometric(&draws, p);
        assert!(ks <= 0.005, "p={p}: {ks}");
        let mean = draws.iter().sum::<u64>() as f64 / draws.len() as f64;
        assert!((mean * p - 1.0).abs() < 0.01);
    }
}

#[test]
fn loopless_anchor_gaps_are_geometric() {
    let spec = SyntheticSpec { d: 2, n: 10, base_norm: 1.0, perturb_norm: 0.1, mu: 0.5, seed: 2, delta_source: DeltaSource::Exact };
    let p = gen_synthetic::<f64>(&spec).unwrap();
    let hyper = default_svrs_hyper(&p).unwrap();
    let inner = InnerSolveSpec::exact(&p).unwrap();
    let mut np = NetProblem::new(&p, CountingMode::Paper).with_event_log();
    loopless_svrs(&mut np, &DenseVector::zeros(2), &hyper, &inner, &RunOptions::iters(100_000), &mut SeededRng::new(3)).unwrap();
    let gaps = np.ledger().anchor_gaps().unwrap();
    assert!(gaps.len() > 9000);
    let (stat, dof) = chi_square_geometric(&gaps, hyper.p, 5.0);
    assert!(p_value(stat, dof) > 0.01, "chi2 {stat} on {dof}");

    // epoch lengths of the two-loop method, read off the same way
    let mut np = NetProblem::new(&p, CountingMode::Paper).with_event_log();
    svrs(&mut np, &DenseVector::zeros(2), &hyper, &inner, &RunOptions::iters(10_000), &mut SeededRng::new(4)).unwrap();
    let epochs = np.ledger().anchor_gaps().unwrap();
    let (stat, dof) = chi_square_two_sample(&gaps, &epochs, 20);
    assert!(p_value(stat, dof) > 0.01, "two-sample chi2 {stat} on {dof}");
}
