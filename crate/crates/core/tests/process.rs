use ppok::combinatorics::{PoKParams, ZetaWeights};
use ppok::process::{ppok_corr, ppok_cov, ppok_mean, ppok_var, simulate_ppok, simulate_ppok_superposed};
use ppok::rng::{replicate, RngStream};
use ppok::stats::{chi_square_gof, chi_square_two_sample};

const ALPHA: f64 = 1e-3;

#[test]
fn superposed_and_compound_constructions_agree_in_law() {
    let params = PoKParams::new(3, 0.8).unwrap();
    let direct = replicate(RngStream::new(7, 1), 40_000, |_, rng| simulate_ppok(&params, 4.0, rng).unwrap().terminal());
    let superposed =
        replicate(RngStream::new(7, 2), 40_000, |_, rng| simulate_ppok_superposed(&params, 4.0, rng).unwrap().terminal());
    let test = chi_square_two_sample(&direct, &superposed, 5.0);
    assert!(test.passes(ALPHA), "{test:?}");
}

#[test]
fn terminal_counts_follow_the_pmf() {
    let params = PoKParams::new(4, 0.5).unwrap();
    let counts = replicate(RngStream::new(8, 0), 50_000, |_, rng| simulate_ppok(&params, 3.0, rng).unwrap().terminal());
    let probs = ZetaWeights::new(4, 80).unwrap().pmf_table(0.5, 3.0);
    let test = chi_square_gof(&counts, &probs, 5.0);
    assert!(test.passes(ALPHA), "{test:?}");
}

#[test]
fn paths_are_consistent_step_functions() {
    let params = PoKParams::new(5, 2.0).unwrap();
    let mut rng = RngStream::new(9, 0).rng();
    for _ in 0..50 {
        let path = simulate_ppok(&params, 6.0, &mut rng).unwrap();
        assert!(path.jump_times().windows(2).all(|w| w[0] < w[1]));
        assert!(path.jump_sizes().iter().all(|&s| (1..=5).contains(&s)));
        let total: u64 = path.jump_sizes().iter().map(|&s| s as u64).sum();
        assert_eq!(total, path.terminal());
        assert_eq!(path.value_at(0.0), 0);
        let mut prev = 0;
        for i in 0..=60 {
            let v = path.value_at(i as f64 * 0.1);
            assert!(v >= prev);
            prev = v;
        }
    }
}

#[test]
fn moment_formulas_are_consistent() {
    let params = PoKParams::new(3, 1.2).unwrap();
    assert!((ppok_mean(&params, 10.0) - 72.0).abs() < 1e-12);
    assert!((ppok_var(&params, 10.0) - 168.0).abs() < 1e-12);
    assert!((ppok_cov(&params, 2.0, 10.0) - ppok_var(&params, 2.0)).abs() < 1e-12);
    assert!((ppok_corr(4.0, 16.0) - 0.5).abs() < 1e-15);
}

#[test]
fn non_positive_horizon_is_rejected() {
    let params = PoKParams::new(2, 1.0).unwrap();
    let mut rng = RngStream::new(1, 0).rng();
    assert!(simulate_ppok(&params, 0.0, &mut rng).is_err());
    assert!(simulate_ppok(&params, -1.0, &mut rng).is_err());
}
