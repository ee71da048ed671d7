use ppok::combinatorics::PoKParams;
use ppok::io::write_ruin_csv;
use ppok::rng::{replicate, RngStream};
use ppok::ruin::{
    aggregate_claim_cdf, premium_loading, simulate_ladders, simulate_ruin, solve_g_jump_law, solve_g_k1, ClaimDist, RiskModel,
};
use ppok::subordinator::SubordinatorSpec;
use ppok::time_change::TimeChangedSpec;

fn model(k: u32, sub: SubordinatorSpec, c: f64) -> RiskModel {
    let arrivals = TimeChangedSpec::direct(PoKParams::new(k, 1.0).unwrap(), sub).unwrap();
    RiskModel::new(c, 0.0, ClaimDist::exponential(1.0).unwrap(), arrivals).unwrap()
}

#[test]
fn normalized_aggregate_cdf_matches_simulated_batches() {
    let claim = ClaimDist::erlang(2, 1.5).unwrap();
    let agg = aggregate_claim_cdf(&claim, 3).unwrap();
    // B₁ is the law of the sum of a uniform number in {1, 2, 3} of claims.
    let draws = replicate(RngStream::new(31, 0), 100_000, |_, rng| {
        use rand::Rng;
        let i = rng.random_range(1..=3u32);
        claim.sample_sum(i, rng)
    });
    for x in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let emp = draws.iter().filter(|&&d| d <= x).count() as f64 / draws.len() as f64;
        let se = (emp * (1.0 - emp) / draws.len() as f64).sqrt();
        assert!((emp - agg.b1(x)).abs() <= 3.5 * se + 1e-12, "x={x}: {emp} vs {}", agg.b1(x));
    }
    assert!(agg.b1(f64::INFINITY) > 1.0 - 1e-15);
}

#[test]
fn large_deficit_limit_recovers_the_ruin_probability() {
    let m = model(2, SubordinatorSpec::gamma(3.0, 4.0).unwrap(), 4.5);
    let at_inf = solve_g_jump_law(&m, f64::INFINITY, 6.0, 1e-2).unwrap();
    let at_40 = solve_g_jump_law(&m, 40.0, 6.0, 1e-2).unwrap();
    // With unit exponential claims the deficit tail beyond y is at most e^{-y}.
    let bound = (-40.0f64).exp() + at_inf.richardson_error + at_40.richardson_error;
    for (a, b) in at_inf.g.iter().zip(&at_40.g) {
        assert!((a - b).abs() <= bound && *b <= a + 1e-12);
    }
}

#[test]
fn heavy_loading_makes_ruin_negligible() {
    let c = 5000.0;
    let m = model(2, SubordinatorSpec::gamma(3.0, 4.0).unwrap(), c);
    assert!(premium_loading(&m).unwrap() > 100.0);
    let curve = solve_g_jump_law(&m, f64::INFINITY, 2.0, 1e-2).unwrap();
    assert!(curve.g.iter().all(|&g| g <= 1e-3), "ψ(0) = {}", curve.g[0]);
    // ψ(0) is the mean claim outflow per unit time over c: 3·(3/4)·1 / c.
    assert!((curve.g[0] - 2.25 / c).abs() <= curve.richardson_error + 1e-12);
    let mc = simulate_ruin(&m, &[0.0], &[f64::INFINITY], 50.0, 20_000, RngStream::new(32, 0)).unwrap();
    assert!(mc.psi[0].value <= 1e-3);
}

#[test]
fn solver_curves_are_monotone() {
    let m = model(2, SubordinatorSpec::gamma(3.0, 4.0).unwrap(), 4.5);
    let ys = [0.5, 1.0, 2.0, f64::INFINITY];
    let curves: Vec<_> = ys.iter().map(|&y| solve_g_jump_law(&m, y, 5.0, 1e-2).unwrap()).collect();
    for c in &curves {
        assert!(c.g.windows(2).all(|w| w[1] <= w[0] + 1e-12), "G(·, {}) not decreasing in u", c.y);
    }
    for pair in curves.windows(2) {
        assert!(pair[0].g.iter().zip(&pair[1].g).all(|(a, b)| a <= &(b + 1e-12)));
    }
}

#[test]
fn classical_solver_matches_closed_form_deficit_law() {
    // Exp(1) claims, c = 2: G(u, y) = ψ(u)(1 − e^{−y}) with ψ(u) = e^{−u/2}/2.
    let m = model(1, SubordinatorSpec::drift(1.0).unwrap(), 2.0);
    let curve = solve_g_k1(&m, 1.5, 4.0, 1e-2).unwrap();
    for u in [0.0, 1.0, 2.5, 4.0] {
        let exact = 0.5 * (-u / 2.0f64).exp() * (1.0 - (-1.5f64).exp());
        assert!((curve.value_at(u) - exact).abs() < 1e-6, "u={u}");
    }
}

#[test]
fn monte_carlo_surface_is_monotone_in_deficit() {
    let m = model(2, SubordinatorSpec::gamma(3.0, 4.0).unwrap(), 4.5);
    let us = [0.0, 1.0, 2.0];
    let ys = [0.25, 0.5, 1.0, 2.0];
    let est = simulate_ruin(&m, &us, &ys, 200.0, 20_000, RngStream::new(33, 0)).unwrap();
    let mut buf = Vec::new();
    write_ruin_csv(&mut buf, &est).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,y,G,stderr"));
    let rows: Vec<(f64, f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), us.len() * (ys.len() + 1));
    for u in us {
        let g: Vec<f64> = rows.iter().filter(|r| r.0 == u).map(|r| r.2).collect();
        assert!(g.windows(2).all(|w| w[0] <= w[1]), "u={u}: {g:?}");
    }
}

#[test]
fn ladder_sample_reuses_paths_across_capitals() {
    let m = model(1, SubordinatorSpec::drift(1.0).unwrap(), 2.0);
    let sample = simulate_ladders(&m, 3.0, 100.0, 5_000, RngStream::new(34, 0)).unwrap();
    let est = sample.estimate(&[0.0, 1.0, 2.0, 3.0], &[f64::INFINITY]).unwrap();
    assert!(est.psi.windows(2).all(|w| w[1].value <= w[0].value));
    assert!(sample.estimate(&[4.0], &[1.0]).is_err());
}

#[test]
fn unsupported_configurations_are_rejected() {
    let pok = PoKParams::new(2, 1.0).unwrap();
    let inverse = TimeChangedSpec::inverse(pok, SubordinatorSpec::gamma(3.0, 4.0).unwrap()).unwrap();
    assert!(RiskModel::new(4.5, 0.0, ClaimDist::exponential(1.0).unwrap(), inverse).is_err());
    let m = model(2, SubordinatorSpec::gamma(3.0, 4.0).unwrap(), 4.5);
    assert!(solve_g_k1(&m, 1.0, 5.0, 1e-2).is_err());
    assert!(ClaimDist::exponential(-1.0).is_err());
}
