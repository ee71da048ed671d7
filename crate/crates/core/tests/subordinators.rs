use ppok::rng::{replicate, RngStream};
use ppok::stats::McEstimate;
use ppok::subordinator::SubordinatorSpec;

fn families() -> Vec<SubordinatorSpec> {
    vec![
        SubordinatorSpec::drift(2.0).unwrap(),
        SubordinatorSpec::gamma(3.0, 4.0).unwrap(),
        SubordinatorSpec::tempered_stable(0.6, 1.0).unwrap(),
        SubordinatorSpec::inverse_gaussian(1.0, 1.0).unwrap(),
    ]
}

#[test]
fn forward_paths_start_at_zero_and_never_decrease() {
    let mut rng = RngStream::new(11, 0).rng();
    for sub in families() {
        let path = sub.simulate_path(5.0, 0.01, &mut rng).unwrap();
        assert_eq!(path.values[0], 0.0);
        assert!(path.is_non_decreasing(), "{}", sub.name());
    }
}

#[test]
fn inverse_paths_start_at_zero_and_never_decrease() {
    let mut rng = RngStream::new(12, 0).rng();
    for sub in families() {
        let path = sub.inverse_path(5.0, 0.01, 1_000_000, &mut rng).unwrap();
        assert_eq!(path.values[0], 0.0);
        assert!(path.is_non_decreasing(), "{}", sub.name());
        assert_eq!(sub.inverse_at(0.0, 0.01, 1_000_000, &mut rng).unwrap(), 0.0);
    }
}

#[test]
fn inverse_of_a_drift_is_linear_up_to_one_step() {
    let sub = SubordinatorSpec::drift(2.0).unwrap();
    let h = 1e-3;
    let mut rng = RngStream::new(13, 0).rng();
    for t in [0.1, 1.0, 3.7] {
        let e = sub.inverse_at(t, h, 1_000_000, &mut rng).unwrap();
        assert!(e >= t / 2.0 && e <= t / 2.0 + h * (1.0 + 1e-9), "t={t} E={e}");
    }
}

#[test]
fn increment_means_and_variances() {
    for (i, sub) in families().into_iter().enumerate().skip(1) {
        let draws = replicate(RngStream::new(14, i as u64), 100_000, |_, rng| sub.sample_increment(2.0, rng).unwrap());
        let mean = McEstimate::from_samples(&draws);
        assert!(mean.within(sub.mean(2.0).unwrap(), 3.5, 0.0), "{} {mean:?}", sub.name());
    }
}

#[test]
fn gamma_inverse_mean_grows_linearly() {
    // E[E(t)] ~ t / E[D(1)] for large t.
    let sub = SubordinatorSpec::gamma(3.0, 4.0).unwrap();
    let draws = replicate(RngStream::new(15, 0), 4_000, |_, rng| sub.inverse_at(200.0, 0.05, 10_000_000, rng).unwrap());
    let mean = McEstimate::from_samples(&draws).value;
    let slope = 200.0 / sub.mean(1.0).unwrap();
    assert!((mean / slope - 1.0).abs() < 0.02, "mean {mean} vs {slope}");
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(SubordinatorSpec::gamma(1.0, -1.0).is_err());
    assert!(SubordinatorSpec::tempered_stable(0.0, 1.0).is_err());
    assert!(SubordinatorSpec::inverse_gaussian(0.0, 1.0).is_err());
    let mut rng = RngStream::new(1, 0).rng();
    assert!(SubordinatorSpec::gamma(1.0, 1.0).unwrap().sample_increment(0.0, &mut rng).is_err());
}
