//! Analytic-versus-simulation validation suites behind `ppok validate`.
//!
//! Every check records the statistic it computed, the threshold it was held
//! to and where the reference value came from. Reports contain no timing or
//! thread information, so a fixed seed gives the same report on any pool.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::combinatorics::{enumerate_partitions, pok_pgf, pok_pmf, truncation_point, PoKParams, ZetaWeights};
use crate::error::{Error, Result};
use crate::governing::{residual_report, Equation, DEFAULT_STEPS};
use crate::quadrature::{integrate_pieces, integrate_to_infinity, Tolerance};
use crate::process::{ppok_corr, sample_count, simulate_ppok};
use crate::rng::{replicate, RngStream};
use crate::ruin::{
    premium_loading, simulate_ladders, solve_g_fixed_point, solve_g_jump_law, solve_g_k1, g_ode_residual, ClaimDist,
    GKernel, RiskModel,
};
use crate::special::ln_gamma;
use crate::stats::{chi_square_gof, correlation, least_squares, McEstimate, Moments};
use crate::subordinator::SubordinatorSpec;
use crate::time_change::{
    arrival_jump_law, tc_mean, tc_var, tcppok1_pmf_table, tcppok2_asymptotic_mean, tcppok2_mean_mc, McBudget, PmfMethod,
    Regime, TemperedReading, TimeChangedSpec,
};

/// Standard errors allowed for a Monte Carlo check.
pub const Z_MC: f64 = 3.5;
/// Significance level for chi-square checks.
pub const CHI_SQUARE_ALPHA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Combinatorics,
    Ppok,
    Subordinators,
    Timechange,
    Dde,
    Ruin,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Combinatorics, Suite::Ppok, Suite::Subordinators, Suite::Timechange, Suite::Dde, Suite::Ruin];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Combinatorics => "combinatorics",
            Suite::Ppok => "ppok",
            Suite::Subordinators => "subordinators",
            Suite::Timechange => "timechange",
            Suite::Dde => "dde",
            Suite::Ruin => "ruin",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::All].iter().chain(Suite::EACH.iter()).find(|x| x.name() == s).copied().ok_or_else(|| {
            Error::Config(format!("unknown suite '{s}' (combinatorics|ppok|subordinators|timechange|dde|ruin|all)"))
        })
    }
}

/// Where a reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// A closed-form expression.
    Analytic,
    /// An independent numerical computation (recursion, quadrature, solver).
    Numerical,
    /// A structural identity such as normalisation or monotonicity.
    Identity,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Numerical => "numerical",
            Provenance::Identity => "identity",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
    /// Only mandatory checks decide the overall verdict.
    pub mandatory: bool,
    pub provenance: Provenance,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub suite: Suite,
    pub seed: u64,
    pub fault_injected: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.mandatory && !c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Simulate with `2λ` while keeping the reference values at `λ`.
    pub inject_fault: bool,
}

/// Run one suite (or all of them in a fixed order).
pub fn run(suite: Suite, opts: ValidateOptions) -> ValidationReport {
    let mut checks = Vec::new();
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in suites {
        let mut ctx = Ctx { suite: s, opts, checks: Vec::new() };
        let outcome = match s {
            Suite::Combinatorics => combinatorics(&mut ctx),
            Suite::Ppok => ppok(&mut ctx),
            Suite::Subordinators => subordinators(&mut ctx),
            Suite::Timechange => timechange(&mut ctx),
            Suite::Dde => dde(&mut ctx),
            Suite::Ruin => ruin(&mut ctx),
            Suite::All => unreachable!(),
        };
        if let Err(e) = outcome {
            ctx.push("suite ran to completion", f64::NAN, 0.0, Comparison::AtMost, Provenance::Identity, true, e.to_string());
        }
        checks.extend(ctx.checks);
    }
    let passed = checks.iter().all(|c| c.passed || !c.mandatory);
    ValidationReport { suite, seed: opts.seed, fault_injected: opts.inject_fault, checks, passed }
}

struct Ctx {
    suite: Suite,
    opts: ValidateOptions,
    checks: Vec<Check>,
}

impl Ctx {
    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        name: impl Into<String>,
        statistic: f64,
        threshold: f64,
        comparison: Comparison,
        provenance: Provenance,
        mandatory: bool,
        detail: impl Into<String>,
    ) {
        let passed = match comparison {
            Comparison::AtMost => statistic <= threshold,
            Comparison::AtLeast => statistic >= threshold,
        };
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            statistic,
            threshold,
            comparison,
            passed,
            mandatory,
            provenance,
            detail: detail.into(),
        });
    }

    fn at_most(&mut self, name: impl Into<String>, statistic: f64, threshold: f64, provenance: Provenance) {
        self.push(name, statistic, threshold, Comparison::AtMost, provenance, true, "");
    }

    /// `|estimate − target| / stderr ≤ Z_MC`.
    fn mc(&mut self, name: impl Into<String>, est: &McEstimate, target: f64, provenance: Provenance) {
        let detail = format!("estimate {:.6} ± {:.2e}, reference {:.6}", est.value, est.stderr, target);
        self.push(name, est.z_score(target).abs(), Z_MC, Comparison::AtMost, provenance, true, detail);
    }

    fn stream(&self, id: u64) -> RngStream {
        RngStream::new(self.opts.seed, (self.suite as u64) << 32 | id)
    }

    /// The rate handed to simulators; doubled under fault injection.
    fn sim_params(&self, params: &PoKParams) -> PoKParams {
        if self.opts.inject_fault {
            PoKParams::new(params.k(), 2.0 * params.lambda()).expect("doubling keeps λ valid")
        } else {
            *params
        }
    }
}

/// `P[N(t) = n]` by the compound-Poisson (Panjer) recursion
/// `p_n = (λt/n) Σ_{j ≤ min(n,k)} j·p_{n−j}`.
pub fn panjer_pmf(params: &PoKParams, t: f64, n_max: u32) -> Vec<f64> {
    let lt = params.lambda() * t;
    let mut p = vec![(-params.event_rate() * t).exp()];
    for n in 1..=n_max as usize {
        let s: f64 = (1..=n.min(params.k() as usize)).map(|j| j as f64 * p[n - j]).sum();
        p.push(lt / n as f64 * s);
    }
    p
}

fn combinatorics(ctx: &mut Ctx) -> Result<()> {
    let mut count_gap: u64 = 0;
    let mut pmf_gap = 0.0f64;
    let mut zeta_gap = 0.0f64;
    let mut norm_gap = 0.0f64;
    let mut pgf_gap = 0.0f64;
    for k in 1..=5u32 {
        let params = PoKParams::new(k, 1.2)?;
        let oracle = panjer_pmf(&params, 2.0, 30);
        let weights = ZetaWeights::new(k, 30)?;
        for n in 0..=30u32 {
            let parts = enumerate_partitions(k, n)?;
            let by_count = partitions_by_recursion(k, n);
            count_gap = count_gap.max((parts.len() as u64).abs_diff(by_count));
            let p = pok_pmf(&params, 2.0, n);
            pmf_gap = pmf_gap.max((p - oracle[n as usize]).abs());
            zeta_gap = zeta_gap.max((weights.pmf(1.2, 2.0, n) - p).abs());
        }
        let t = 10.0;
        let n_star = truncation_point(&params, t, 1e-12);
        let table = panjer_pmf(&params, t, n_star);
        let total: f64 = table.iter().sum();
        norm_gap = norm_gap.max(1.0 - total);
        let s: f64 = 0.7;
        let series: f64 = table.iter().enumerate().map(|(n, p)| p * s.powi(n as i32)).sum();
        pgf_gap = pgf_gap.max((series - pok_pgf(&params, t, s)).abs());
    }
    ctx.at_most("|Ω(k,n)| equals the restricted-partition count, k ≤ 5, n ≤ 30", count_gap as f64, 0.0, Provenance::Numerical);
    ctx.at_most("partition-sum pmf vs compound-Poisson recursion", pmf_gap, 1e-12, Provenance::Numerical);
    ctx.at_most("grouped ζ-weight pmf vs partition-sum pmf", zeta_gap, 1e-12, Provenance::Numerical);
    ctx.at_most("1 − Σ pmf up to the truncation point (t = 10)", norm_gap, 1e-10, Provenance::Identity);
    ctx.at_most("Σ sⁿ pₙ vs closed-form pgf at s = 0.7", pgf_gap, 1e-12, Provenance::Analytic);
    Ok(())
}

/// Number of vectors in `Ω(k, n)`, counted by the coin-change recursion.
fn partitions_by_recursion(k: u32, n: u32) -> u64 {
    let mut ways = vec![0u64; n as usize + 1];
    ways[0] = 1;
    for part in 1..=k as usize {
        for m in part..=n as usize {
            ways[m] += ways[m - part];
        }
    }
    ways[n as usize]
}

fn ppok(ctx: &mut Ctx) -> Result<()> {
    let n_paths = 20_000;
    let horizon = 10.0;
    for (i, k) in [1u32, 3, 5].into_iter().enumerate() {
        let params = PoKParams::new(k, 1.2)?;
        let sim = ctx.sim_params(&params);
        let counts: Vec<u64> = replicate(ctx.stream(i as u64), n_paths, |_, rng| sample_count(&sim, horizon, rng));
        let xs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        let m = Moments::from_samples(&xs);
        let mean = McEstimate::from_samples(&xs);
        ctx.mc(format!("E[N(10)], k = {k}"), &mean, params.mean_rate() * horizon, Provenance::Analytic);
        ctx.mc(format!("Var[N(10)], k = {k}"), &m.variance_estimate(), params.variance_rate() * horizon, Provenance::Analytic);
        let n_star = truncation_point(&params, horizon, 1e-9);
        let probs = ZetaWeights::new(k, n_star)?.pmf_table(params.lambda(), horizon);
        let test = chi_square_gof(&counts, &probs, 5.0);
        ctx.push(
            format!("chi-square of N(10) against the order-k pmf, k = {k}"),
            test.p_value,
            CHI_SQUARE_ALPHA,
            Comparison::AtLeast,
            Provenance::Analytic,
            true,
            format!("statistic {:.3} on {} dof", test.statistic, test.dof),
        );
    }

    let params = PoKParams::new(3, 1.2)?;
    let sim = ctx.sim_params(&params);
    let times = [8.0, 16.0, 32.0, 64.0];
    let paths = replicate(ctx.stream(10), n_paths, |_, rng| simulate_ppok(&sim, 64.0, rng))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let base: Vec<f64> = paths.iter().map(|p| p.value_at(2.0) as f64).collect();
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for &t in &times {
        let at: Vec<f64> = paths.iter().map(|p| p.value_at(t) as f64).collect();
        let r = correlation(&base, &at, 50);
        ctx.mc(format!("Corr[N(2), N({t})]"), &r, ppok_corr(2.0, t), Provenance::Analytic);
        lx.push(t.ln());
        ly.push(r.value.ln());
    }
    let (slope, _) = least_squares(&lx, &ly);
    ctx.push(
        "log-log slope of Corr[N(2), N(t)], t ∈ {8..64}",
        (slope + 0.5).abs(),
        0.1,
        Comparison::AtMost,
        Provenance::Analytic,
        true,
        format!("slope {slope:.4}, reference −0.5"),
    );
    Ok(())
}

fn subordinator_cases() -> Result<Vec<SubordinatorSpec>> {
    Ok(vec![
        SubordinatorSpec::drift(1.5)?,
        SubordinatorSpec::gamma(3.0, 4.0)?,
        SubordinatorSpec::tempered_stable(0.6, 1.0)?,
        SubordinatorSpec::inverse_gaussian(1.0, 1.0)?,
    ])
}

fn subordinators(ctx: &mut Ctx) -> Result<()> {
    let n = 20_000;
    let t = 1.0;
    for (i, sub) in subordinator_cases()?.into_iter().enumerate() {
        let draws = replicate(ctx.stream(i as u64), n, |_, rng| sub.sample_increment(t, rng))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        for s in [0.25, 1.0, 4.0] {
            let lt: Vec<f64> = draws.iter().map(|d| (-s * d).exp()).collect();
            let est = McEstimate::from_samples(&lt);
            let name = format!("E[exp(−{s}·D(1))], {}", sub.name());
            if sub.name() == "drift" {
                let gap = (est.value - sub.laplace_transform(s, t)).abs();
                ctx.at_most(name, gap, 1e-14, Provenance::Analytic);
            } else {
                ctx.mc(name, &est, sub.laplace_transform(s, t), Provenance::Analytic);
            }
        }
        if let (Ok(mean), false) = (sub.mean(t), sub.name() == "drift") {
            ctx.mc(format!("E[D(1)], {}", sub.name()), &McEstimate::from_samples(&draws), mean, Provenance::Analytic);
        }
        let mut rng = ctx.stream(100 + i as u64).rng();
        let path = sub.simulate_path(5.0, 0.01, &mut rng)?;
        ctx.push(
            format!("sample path is non-decreasing, {}", sub.name()),
            if path.is_non_decreasing() { 1.0 } else { 0.0 },
            1.0,
            Comparison::AtLeast,
            Provenance::Identity,
            true,
            "",
        );
    }
    // E(t) for a drift b is t/b, up to one grid step.
    let drift = SubordinatorSpec::drift(2.0)?;
    let mut rng = ctx.stream(200).rng();
    let e = drift.inverse_at(3.0, 1e-3, 10_000_000, &mut rng)?;
    ctx.at_most("inverse of a drift: |E(3) − 3/b| within one grid step", (e - 1.5).abs(), 1e-3 * (1.0 + 1e-6), Provenance::Analytic);
    Ok(())
}

/// Negative binomial pmf of `N(G(t))` for `k = 1` and a gamma subordinator.
pub fn negative_binomial_pmf(lambda: f64, p: f64, alpha: f64, t: f64, n: u32) -> f64 {
    let r = p * t;
    let nf = n as f64;
    (ln_gamma(r + nf) - ln_gamma(r) - ln_gamma(nf + 1.0) + r * (alpha / (alpha + lambda)).ln()
        + nf * (lambda / (alpha + lambda)).ln())
    .exp()
}

fn timechange(ctx: &mut Ctx) -> Result<()> {
    let gamma = SubordinatorSpec::gamma(3.0, 4.0)?;
    let t = 1.5;
    let n_max = 15;

    let spec = TimeChangedSpec::direct(PoKParams::new(2, 1.0)?, gamma)?;
    let closed = tcppok1_pmf_table(&spec, t, n_max, PmfMethod::Closed, None)?;
    let quad = tcppok1_pmf_table(&spec, t, n_max, PmfMethod::Quadrature, None)?;
    let sim_spec = TimeChangedSpec::direct(ctx.sim_params(&spec.pok), gamma)?;
    let mc = tcppok1_pmf_table(&sim_spec, t, n_max, PmfMethod::MonteCarlo, Some(McBudget::new(20_000, ctx.stream(0))))?;
    let gap = closed.iter().zip(&quad).map(|(a, b)| (a.value() - b.value()).abs()).fold(0.0, f64::max);
    ctx.at_most("TCPPoK-I pmf: closed form vs quadrature, k = 2, n ≤ 15", gap, 1e-8, Provenance::Numerical);
    let worst = closed
        .iter()
        .zip(&mc)
        .map(|(a, b)| (a.value() - b.value()).abs() / b.uncertainty().max(1e-300))
        .fold(0.0, f64::max);
    ctx.push(
        "TCPPoK-I pmf: Monte Carlo vs closed form, worst |z| over n ≤ 15",
        worst,
        Z_MC,
        Comparison::AtMost,
        Provenance::Analytic,
        true,
        "",
    );

    let (p, alpha) = (3.0, 4.0);
    let k1 = TimeChangedSpec::direct(PoKParams::new(1, 1.0)?, gamma)?;
    let nb_gap = tcppok1_pmf_table(&k1, t, n_max, PmfMethod::Closed, None)?
        .iter()
        .enumerate()
        .map(|(n, v)| (v.value() - negative_binomial_pmf(1.0, p, alpha, t, n as u32)).abs())
        .fold(0.0, f64::max);
    ctx.at_most("k = 1 gamma route vs negative binomial pmf", nb_gap, 1e-12, Provenance::Analytic);

    let spec3 = TimeChangedSpec::direct(PoKParams::new(3, 1.2)?, gamma)?;
    let sim3 = TimeChangedSpec::direct(ctx.sim_params(&spec3.pok), gamma)?;
    let tt = 10.0;
    let counts: Vec<f64> = replicate(ctx.stream(1), 20_000, |_, rng| {
        let d = gamma.sample_increment(tt, rng)?;
        Ok(sample_count(&sim3.pok, d, rng) as f64)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let m = Moments::from_samples(&counts);
    ctx.mc("E[Q(10)], k = 3, λ = 1.2, Gamma(3, 4)", &McEstimate::from_samples(&counts), tc_mean(&spec3, tt)?, Provenance::Analytic);
    ctx.mc("Var[Q(10)], k = 3, λ = 1.2, Gamma(3, 4)", &m.variance_estimate(), tc_var(&spec3, tt)?, Provenance::Analytic);
    let var_est = m.variance_estimate();
    let lower = (var_est.value - 2.326 * var_est.stderr) / m.mean;
    ctx.push(
        "index of dispersion, one-sided 99% lower bound",
        lower,
        1.0,
        Comparison::AtLeast,
        Provenance::Analytic,
        true,
        format!("estimate {:.3}", var_est.value / m.mean),
    );

    let law = arrival_jump_law(&spec3.pok, &gamma, 1e-12)?;
    let mut levy_gap = 0.0f64;
    for i in 1..=6u32 {
        let quad = levy_jump_rate(&spec3.pok, &gamma, i)?;
        levy_gap = levy_gap.max((law.total_rate * law.probs[i as usize - 1] - quad).abs() / quad);
    }
    ctx.at_most("jump law of Q vs Lévy-measure quadrature, sizes 1..6 (relative)", levy_gap, 1e-8, Provenance::Numerical);
    ctx.at_most(
        "jump law of Q: rate·mean size equals E[Q(1)]",
        (law.total_rate * law.mean_size() - tc_mean(&spec3, 1.0)?).abs() / tc_mean(&spec3, 1.0)?,
        1e-8,
        Provenance::Analytic,
    );

    let ig = TimeChangedSpec::inverse(PoKParams::new(2, 1.0)?, SubordinatorSpec::inverse_gaussian(1.0, 1.0)?)?;
    let sim_ig = TimeChangedSpec::inverse(ctx.sim_params(&ig.pok), ig.sub)?;
    let (coef, _) = tcppok2_asymptotic_mean(&ig, Regime::LargeT, TemperedReading::Tempering)?;
    let lo = tcppok2_mean_mc(&sim_ig, 100.0, 4_000, ctx.stream(2), None)?;
    let hi = tcppok2_mean_mc(&sim_ig, 400.0, 4_000, ctx.stream(3), None)?;
    let growth = McEstimate {
        value: (hi.value - lo.value) / 300.0,
        stderr: (hi.stderr.powi(2) + lo.stderr.powi(2)).sqrt() / 300.0,
        n_reps: hi.n_reps,
    };
    ctx.push(
        "TCPPoK-II inverse Gaussian: large-t growth rate of E[Q] vs asymptote",
        (growth.value / coef - 1.0).abs(),
        0.1,
        Comparison::AtMost,
        Provenance::Analytic,
        true,
        format!("growth {:.4} ± {:.4}, asymptote {coef:.4}", growth.value, growth.stderr),
    );
    Ok(())
}

/// Rate of jumps of size `i` as `∫ P[N(x) = i] ν(dx)`, with `ν` the Lévy
/// measure of `sub`.
pub fn levy_jump_rate(pok: &PoKParams, sub: &SubordinatorSpec, i: u32) -> Result<f64> {
    let density = |x: f64| if x > 0.0 { pok_pmf(pok, x, i) * sub.levy_density(x).unwrap_or(0.0) } else { 0.0 };
    let scale = 1.0 / pok.event_rate();
    let body = integrate_pieces(&density, &[0.0, scale, 10.0 * scale], Tolerance { abs: 0.0, rel: 1e-12, max_intervals: 4000 })?;
    let tail = integrate_to_infinity(density, 10.0 * scale, scale, Tolerance { abs: 0.0, rel: 1e-12, max_intervals: 4000 })?;
    Ok(body.value + tail.value)
}

fn dde(ctx: &mut Ctx) -> Result<()> {
    let params = PoKParams::new(3, 1.2)?;
    for (equation, label) in [(Equation::PpokFirstOrder, "first-order"), (Equation::PpokSecondOrder, "second-order")] {
        let mut worst = f64::INFINITY;
        for m in [0u32, 2, 5] {
            let report = residual_report(equation, &params, None, m, 1.0, &DEFAULT_STEPS)?;
            worst = worst.min(report.observed_order.unwrap_or(f64::INFINITY));
        }
        ctx.push(
            format!("PPoK {label} equation: observed order under step halving"),
            worst,
            1.9,
            Comparison::AtLeast,
            Provenance::Identity,
            true,
            "",
        );
    }
    let ig = SubordinatorSpec::inverse_gaussian(1.0, 1.0)?;
    let pk = PoKParams::new(2, 1.0)?;
    let mut worst1 = 0.0f64;
    for m in 0..=5 {
        worst1 = worst1.max(residual_report(Equation::PoissonInverseGaussian, &pk, Some(&ig), m, 1.0, &[5e-3])?.max_residual());
    }
    ctx.at_most("N(G(t)) inverse Gaussian equation residual, h = 5e-3, m ≤ 5", worst1, 1e-3, Provenance::Numerical);
    let mut worst2 = 0.0f64;
    for m in 0..=3 {
        worst2 = worst2.max(residual_report(Equation::InverseInverseGaussian, &pk, Some(&ig), m, 1.0, &[5e-3])?.max_residual());
    }
    ctx.at_most("N(E(t)) inverse Gaussian equation residual at t = 1, m ≤ 3", worst2, 1e-3, Provenance::Numerical);
    Ok(())
}

fn ruin(ctx: &mut Ctx) -> Result<()> {
    let exp1 = ClaimDist::exponential(1.0)?;
    let classical_arrivals = TimeChangedSpec::direct(PoKParams::new(1, 1.0)?, SubordinatorSpec::drift(1.0)?)?;
    let classical = RiskModel::new(2.0, 0.0, exp1, classical_arrivals)?;
    let sim_classical = RiskModel::new(
        2.0,
        0.0,
        exp1,
        TimeChangedSpec::direct(ctx.sim_params(&classical_arrivals.pok), classical_arrivals.sub)?,
    )?;
    ctx.at_most("premium loading of the classical model", (premium_loading(&classical)? - 1.0).abs(), 1e-12, Provenance::Analytic);

    let sample = simulate_ladders(&sim_classical, 2.0, 300.0, 20_000, ctx.stream(0))?;
    let est = sample.estimate(&[0.0, 1.0, 2.0], &[1.0, f64::INFINITY])?;
    for (i, u) in [0.0f64, 1.0, 2.0].into_iter().enumerate() {
        let oracle = 0.5 * (-0.5 * u).exp();
        let psi = est.psi[i];
        let bias = est.late_ruin[i];
        let detail = format!("estimate {:.5} ± {:.5}, reference {oracle:.5}, horizon allowance {bias:.2e}", psi.value, psi.stderr);
        ctx.push(
            format!("classical ψ({u}) vs Cramér–Lundberg"),
            (psi.value - oracle).abs(),
            Z_MC * psi.stderr + bias,
            Comparison::AtMost,
            Provenance::Analytic,
            true,
            detail,
        );
    }
    ctx.push(
        "ruin-time mass in the last 10% of the horizon below 1%",
        if est.horizon_too_short { 1.0 } else { 0.0 },
        0.0,
        Comparison::AtMost,
        Provenance::Identity,
        true,
        "",
    );
    let monotone = est.g.iter().zip(&est.psi).all(|(row, psi)| {
        row.windows(2).all(|w| w[0].value <= w[1].value) && row.last().is_none_or(|g| g.value <= psi.value + 1e-15)
    }) && est.psi.windows(2).all(|w| w[1].value <= w[0].value);
    ctx.push("G(u, y) non-decreasing in y and ψ non-increasing in u", monotone as u8 as f64, 1.0, Comparison::AtLeast, Provenance::Identity, true, "");

    let k1 = solve_g_k1(&classical, 1.0, 5.0, 5e-3)?;
    ctx.at_most("solver G(0, 1) vs (1 − e^{−1})/2", (k1.g[0] - (1.0 - (-1.0f64).exp()) / 2.0).abs(), 1e-12, Provenance::Analytic);
    let k1_inf = solve_g_k1(&classical, f64::INFINITY, 5.0, 5e-3)?;
    let gap = [0.0, 1.0, 2.0, 5.0]
        .iter()
        .map(|&u| (k1_inf.value_at(u) - 0.5 * (-0.5 * u).exp()).abs())
        .fold(0.0, f64::max);
    ctx.at_most("solver G(u, ∞) vs Cramér–Lundberg ψ(u), u ≤ 5", gap, 1e-6, Provenance::Analytic);

    let arrivals = TimeChangedSpec::direct(PoKParams::new(2, 1.0)?, SubordinatorSpec::gamma(3.0, 4.0)?)?;
    let model = RiskModel::new(4.5, 0.0, exp1, arrivals)?;
    let sim_model = RiskModel::new(4.5, 0.0, exp1, TimeChangedSpec::direct(ctx.sim_params(&arrivals.pok), arrivals.sub)?)?;
    let y = 1.0;
    let du = 0.05;
    let u_eval: Vec<f64> = (1..=10).map(|i| i as f64 * 0.5).collect();
    let sample = simulate_ladders(&sim_model, 5.0 + du, 300.0, 20_000, ctx.stream(1))?;
    let jump_law = solve_g_jump_law(&model, y, 10.0, 5e-3)?;
    let field = g_ode_residual(&model, &sample, &jump_law, GKernel::JumpLaw, y, du, &u_eval)?;
    let worst = field.iter().map(|p| p.residual.value.abs() / p.budget).fold(0.0, f64::max);
    ctx.at_most("G equation with the arrival jump-law kernel: worst |residual| / budget, u ≤ 5", worst, 1.0, Provenance::Numerical);
    let est = sample.estimate(&u_eval, &[y])?;
    let worst_curve = u_eval
        .iter()
        .zip(&est.g)
        .map(|(&u, row)| row[0].z_score(jump_law.value_at(u)).abs())
        .fold(0.0, f64::max);
    ctx.push(
        "jump-law solver vs Monte Carlo G(u, 1), worst |z|, u ≤ 5",
        worst_curve,
        Z_MC,
        Comparison::AtMost,
        Provenance::Numerical,
        true,
        "",
    );

    let displayed = solve_g_fixed_point(&model, y, 10.0, 5e-3, 200, 1e-10)?;
    let field = g_ode_residual(&model, &sample, &displayed, GKernel::Displayed, y, du, &u_eval)?;
    let worst = field.iter().map(|p| p.residual.value.abs() / p.budget).fold(0.0, f64::max);
    ctx.push(
        "G equation with the k·B₁ kernel: worst |residual| / budget, u ≤ 5",
        worst,
        1.0,
        Comparison::AtMost,
        Provenance::Numerical,
        false,
        "the k·B₁ kernel has mass k and is exact only for k = 1 with a drift",
    );
    ctx.push(
        "k·B₁ fixed point determined by its boundary condition",
        displayed.degenerate as u8 as f64,
        0.0,
        Comparison::AtMost,
        Provenance::Identity,
        false,
        format!("G(0, 1) = {:.4} from ∫G = 0; Monte Carlo gives {:.4}", displayed.g[0], jump_law.g[0]),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.iter().chain([Suite::All].iter()) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn panjer_matches_poisson_for_k1() {
        let p = PoKParams::new(1, 0.8).unwrap();
        let table = panjer_pmf(&p, 2.5, 10);
        for (n, v) in table.iter().enumerate() {
            let poisson = (-2.0f64).exp() * 2f64.powi(n as i32) / (1..=n).map(|i| i as f64).product::<f64>();
            assert!((v - poisson).abs() < 1e-15);
        }
    }

    #[test]
    fn combinatorics_suite_passes() {
        let report = run(Suite::Combinatorics, ValidateOptions::default());
        assert!(report.passed, "{:#?}", report.checks);
    }
}
