//! Acceptance criteria, one test each. Every test writes a single
//! `[PASS]`/`[FAIL]` line straight to stdout (bypassing libtest capture) and
//! then asserts.

use bwopt_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::Write;
use std::time::{Duration, Instant};

fn report(id: u32, title: &str, failures: &[String], elapsed: Duration) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut line = format!("[{status}] criterion {id}: {title} ({:.2} s)", elapsed.as_secs_f64());
    if !failures.is_empty() {
        line.push_str(" -- ");
        line.push_str(&failures.join("; "));
    }
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
    assert!(failures.is_empty(), "{line}");
}

fn within(value: f64, target: f64, rel: f64, abs: f64) -> bool {
    (value - target).abs() <= (rel * target.abs()).max(abs)
}

fn market() -> MarketModel {
    MarketModel::reference()
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// Divergence of each preset strategy from the preset benchmark.
fn table_row(preset: &Preset, generator: &BregmanGenerator) -> ToleranceSelection {
    let m = market();
    let benchmark = preset.benchmark_curve(&m, 1.0).unwrap();
    let curves = preset.strategy_curves(&m, 1.0).unwrap();
    select_tolerance(&curves, &benchmark, generator, &quad()).unwrap()
}

fn check_table(
    preset: &Preset,
    rows: &[(BregmanGenerator, [f64; 3])],
    rel: f64,
    abs: f64,
    failures: &mut Vec<String>,
) -> Vec<ToleranceSelection> {
    let mut out = Vec::new();
    for (g, expected) in rows {
        let sel = table_row(preset, g);
        for (k, (&got, &want)) in sel.divergences.iter().zip(expected).enumerate() {
            if !within(got, want, rel, abs) {
                failures.push(format!("{} strategy {}: {got:.6e} vs {want}", g.tag(), k + 1));
            }
        }
        out.push(sel);
    }
    out
}

#[test]
fn criterion_1_pointwise_bregman_values() {
    const TOL: f64 = 5e-5;
    let start = Instant::now();
    let q = BregmanGenerator::quadratic();
    let e = BregmanGenerator::entropic().with_regularization(0.0).unwrap();
    let cases = [
        ("quadratic (1.5, 0.8)", q.divergence(1.5, 0.8).unwrap(), 0.49),
        ("entropic (1.5, 0.8)", e.divergence(1.5, 0.8).unwrap(), 0.2429),
        ("entropic (0.8, 1.5)", e.divergence(0.8, 1.5).unwrap(), 0.1971),
    ];
    let failures: Vec<String> = cases
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > TOL)
        .map(|(name, got, want)| format!("{name}: {got} vs {want}"))
        .collect();
    report(1, "pointwise Bregman values", &failures, start.elapsed());
}

#[test]
fn criterion_2_table1() {
    const REL: f64 = 0.02;
    const ABS: f64 = 2e-5;
    const RUNTIME: Duration = Duration::from_secs(5);
    let start = Instant::now();
    let rows = [
        (BregmanGenerator::quadratic(), [0.003673, 0.003717, 0.000526]),
        (BregmanGenerator::entropic(), [0.001785, 0.001799, 0.000272]),
    ];
    let mut failures = Vec::new();
    let sel = check_table(&Preset::example1(), &rows, REL, ABS, &mut failures);
    for (s, (g, _)) in sel.iter().zip(&rows) {
        let max = s.divergences.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if s.epsilon.to_bits() != max.to_bits() {
            failures.push(format!("{} chosen ε {} is not the row maximum {max}", g.tag(), s.epsilon));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > RUNTIME {
        failures.push(format!("runtime {elapsed:?}"));
    }
    report(2, "Table 1 reproduction", &failures, elapsed);
}

#[test]
fn criterion_3_table2() {
    const REL: f64 = 0.05;
    const ABS: f64 = 2e-6;
    const ZERO: f64 = 1e-7;
    const RUNTIME: Duration = Duration::from_secs(10);
    let start = Instant::now();
    let t = |b, a| BregmanGenerator::thresholded(b, a).unwrap();
    let rows = [
        (t(BaseGenerator::Quadratic, 1.0), [0.000088, 0.000065, 0.000500]),
        (t(BaseGenerator::Entropic, 1.0), [0.000045, 0.000033, 0.000259]),
        (t(BaseGenerator::Quadratic, 0.95), [0.000002, 0.0, 0.000125]),
        (t(BaseGenerator::Entropic, 0.95), [0.000001, 0.0, 0.000067]),
    ];
    let mut failures = Vec::new();
    let sel = check_table(&Preset::example1(), &rows, REL, ABS, &mut failures);
    for (s, (g, _)) in sel.iter().zip(&rows).skip(2) {
        if s.divergences[1].abs() > ZERO {
            failures.push(format!("{} strategy 2 is {:.3e}, not 0 within {ZERO}", g.tag(), s.divergences[1]));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > RUNTIME {
        failures.push(format!("runtime {elapsed:?}"));
    }
    report(3, "Table 2 reproduction", &failures, elapsed);
}

#[test]
fn criterion_4_table3() {
    const REL: f64 = 0.05;
    const ABS: f64 = 2e-5;
    const RUNTIME: Duration = Duration::from_secs(10);
    let start = Instant::now();
    let t = |b, a| BregmanGenerator::thresholded(b, a).unwrap();
    let rows = [
        (BregmanGenerator::quadratic(), [0.000506, 0.001179, 0.086821]),
        (BregmanGenerator::entropic(), [0.001785, 0.000367, 0.032795]),
        (t(BaseGenerator::Quadratic, 1.0), [0.000007, 0.000009, 0.001108]),
        (t(BaseGenerator::Entropic, 1.0), [0.000004, 0.000005, 0.000630]),
        (t(BaseGenerator::Quadratic, 0.95), [0.000007, 0.000007, 0.001023]),
        (t(BaseGenerator::Entropic, 0.95), [0.000004, 0.000004, 0.000586]),
    ];
    let mut failures = Vec::new();
    check_table(&Preset::example2(), &rows, REL, ABS, &mut failures);
    let elapsed = start.elapsed();
    if elapsed > RUNTIME {
        failures.push(format!("runtime {elapsed:?}"));
    }
    report(4, "Table 3 reproduction", &failures, elapsed);
}

#[test]
fn criterion_5_merton_recovery() {
    const REL: f64 = 1e-6;
    let start = Instant::now();
    let m = market();
    let mut failures = Vec::new();
    for gamma in [1.0, 1.5] {
        let spec = ProblemSpec::new(
            m,
            UtilitySpec::crra(gamma).unwrap(),
            BregmanGenerator::quadratic(),
            QuantileCurve::constant(1.0).unwrap(),
            1.0,
            f64::INFINITY,
        )
        .unwrap();
        let sol = solve(&spec).unwrap();
        // E[ξ^{1−1/γ}] for lognormal ξ, then λ from the budget identity.
        let a = 1.0 - 1.0 / gamma;
        let moment = (a * m.spd_location() + 0.5 * a * a * m.spd_scale().powi(2)).exp();
        let lambda = moment.powf(gamma);
        if (sol.multipliers.lambda / lambda - 1.0).abs() > REL {
            failures.push(format!("γ={gamma}: λ* {} vs {lambda}", sol.multipliers.lambda));
        }
        for k in 1..=100 {
            let t = k as f64 / 101.0;
            let node = Node::from_t(t).unwrap();
            let xi = (m.spd_location() - m.spd_scale() * node.z).exp();
            let exact = (lambda * xi).powf(-1.0 / gamma);
            let got = sol.curve.eval_node(&node);
            if (got / exact - 1.0).abs() > REL {
                failures.push(format!("γ={gamma} t={t:.4}: {got} vs {exact}"));
                break;
            }
        }
    }
    report(5, "Merton recovery", &failures, start.elapsed());
}

#[test]
fn criterion_6_example1_statistics() {
    const TOP: (f64, f64) = (1.06, 1.09);
    const CROSS: (f64, f64) = (0.03, 0.07);
    const RUNTIME: Duration = Duration::from_secs(30);
    let start = Instant::now();
    let m = market();
    let preset = Preset::example1();
    let benchmark = preset.benchmark_curve(&m, 1.0).unwrap();
    let mut failures = Vec::new();
    for g in [BregmanGenerator::quadratic(), BregmanGenerator::entropic()] {
        let eps = table_row(&preset, &g).epsilon;
        let spec = ProblemSpec::new(m, UtilitySpec::log(), g, benchmark.clone(), 1.0, eps).unwrap();
        let sol = solve(&spec).unwrap();
        let top = sol.curve.evaluate(1.0 - 1e-6).unwrap();
        // P(F̆* < 1) = sup{t : F̆*(t) < 1}, by bisection on the monotone curve.
        let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if sol.curve.evaluate(mid).unwrap() < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if !(TOP.0..=TOP.1).contains(&top) {
            failures.push(format!("{}: F̆*(1-1e-6) = {top}", g.tag()));
        }
        if !(CROSS.0..=CROSS.1).contains(&lo) {
            failures.push(format!("{}: P(F̆* < 1) = {lo}", g.tag()));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > RUNTIME {
        failures.push(format!("runtime {elapsed:?}"));
    }
    report(6, "Example-1 summary statistics", &failures, elapsed);
}

/// Bregman cost written out independently of the library.
fn bregman_oracle(entropic: bool, x: f64, y: f64) -> f64 {
    if entropic {
        x * x.ln() - y * y.ln() - (1.0 + y.ln()) * (x - y)
    } else {
        (x - y) * (x - y)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn atoms_curve(mut atoms: Vec<f64>) -> QuantileCurve {
    atoms.sort_by(f64::total_cmp);
    let n = atoms.len();
    let breaks = (1..n).map(|k| k as f64 / n as f64).collect();
    QuantileCurve::step(atoms, breaks).unwrap()
}

#[test]
fn criterion_7_discrete_transport_oracle() {
    const TOL: f64 = 1e-10;
    const PAIRS: usize = 50;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let perms: Vec<Vec<Vec<usize>>> = (0..=8).map(permutations).collect();
    for pair in 0..PAIRS {
        let n = rng.gen_range(1..=8);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..3.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..3.0)).collect();
        for (entropic, g) in [
            (false, BregmanGenerator::quadratic()),
            (true, BregmanGenerator::entropic().with_regularization(0.0).unwrap()),
        ] {
            let brute = perms[n]
                .iter()
                .map(|p| p.iter().enumerate().map(|(i, &j)| bregman_oracle(entropic, x[i], y[j])).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
                / n as f64;
            let bw = bw_divergence(&atoms_curve(x.clone()), &atoms_curve(y.clone()), &g, &quad()).unwrap();
            if (bw - brute).abs() > TOL {
                failures.push(format!("pair {pair} (n={n}, {}): {bw} vs {brute}", g.tag()));
            }
        }
    }
    report(7, "discrete OT oracle", &failures, start.elapsed());
}

mod properties {
    use super::*;

    pub const INSTANCES: usize = 100;

    pub fn coarse() -> QuadratureSpec {
        QuadratureSpec::new(32, 4, 1e-15).unwrap()
    }

    pub fn random_generator(rng: &mut ChaCha8Rng) -> BregmanGenerator {
        let all = strategies::table3_generators();
        all[rng.gen_range(0..all.len())]
    }

    pub fn random_strategy(rng: &mut ChaCha8Rng) -> StrategySpec {
        match rng.gen_range(0..3) {
            0 => StrategySpec::ConstantMix { w: rng.gen_range(0.0..1.0) },
            1 => StrategySpec::BuyAndHold { w: rng.gen_range(0.0..1.0) },
            _ => StrategySpec::Digital {
                low: rng.gen_range(0.5..0.95),
                q: rng.gen_range(0.02..0.3),
                breakpoint: DigitalBreakpoint::PhysicalProbability,
            },
        }
    }

    pub fn random_problem(rng: &mut ChaCha8Rng) -> ProblemSpec {
        let m = market();
        let benchmark = random_strategy(rng).quantile(&m, 1.0).unwrap();
        ProblemSpec::new(
            m,
            UtilitySpec::crra(rng.gen_range(0.5..3.0)).unwrap(),
            random_generator(rng),
            benchmark,
            rng.gen_range(0.9..1.1),
            f64::INFINITY,
        )
        .unwrap()
        .with_quadrature(coarse())
        .unwrap()
    }

    /// A tolerance strictly above `ε_min`, log-uniform on a wide range.
    pub fn random_tolerance(rng: &mut ChaCha8Rng, spec: &ProblemSpec) -> f64 {
        let floor = epsilon_min(spec).unwrap();
        floor * 1.05 + 10f64.powf(rng.gen_range(-5.0..-1.5))
    }

    pub fn rng(i: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0x5eed_0000 + i as u64)
    }
}

#[test]
fn criterion_8_property_suites() {
    use properties::*;
    const KKT: f64 = 1e-6;
    const DECOMPOSITION: f64 = 1e-10;
    const SMALL_ALPHA: f64 = 1e-6;
    const LARGE_ALPHA_REL: f64 = 1e-9;
    let start = Instant::now();
    let m = market();

    // Pointwise minimizer non-decreasing in t.
    let monotone: Vec<String> = (0..INSTANCES)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = rng(i);
            let spec = random_problem(&mut rng);
            let mult = Multipliers::new(10f64.powf(rng.gen_range(-2.0..1.0)), 10f64.powf(rng.gen_range(-2.0..2.0))).unwrap();
            let ys: Vec<f64> = (1..500)
                .map(|k| pointwise_minimizer(&spec, mult, k as f64 / 500.0).unwrap())
                .collect();
            (!ys.windows(2).all(|w| w[1] >= w[0])).then(|| format!("monotonicity instance {i}"))
        })
        .collect();

    // KKT residuals on every solve.
    let kkt: Vec<String> = (0..INSTANCES)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = rng(1000 + i);
            let mut spec = random_problem(&mut rng);
            if rng.gen_bool(0.9) {
                spec.tolerance = random_tolerance(&mut rng, &spec);
            }
            let sol = match solve(&spec) {
                Ok(s) => s,
                Err(e) => return Some(format!("KKT instance {i}: {e}")),
            };
            let (s_budget, s_div) = sol.slackness();
            let primal = sol.residuals.budget.max(0.0).max(sol.residuals.divergence.max(0.0));
            // Stationarity of h_t at the returned curve.
            let mut stationarity: f64 = 0.0;
            for k in 1..20 {
                let node = Node::from_t(k as f64 / 20.0).unwrap();
                let y = sol.curve.eval_node(&node);
                let b = spec.benchmark.eval_node(&node);
                let g = &spec.generator;
                let mu = sol.multipliers.mu;
                let d = -spec.utility.marginal(y).unwrap()
                    + mu * (g.derivative(y).unwrap() - g.derivative(b).unwrap())
                    + sol.multipliers.lambda * m.spd_reflected(&node);
                stationarity = stationarity.max(d.abs() / spec.utility.marginal(y).unwrap());
            }
            let worst = s_budget.abs().max(s_div.abs()).max(primal).max(stationarity);
            (worst >= KKT).then(|| format!("KKT instance {i}: residual {worst:e}"))
        })
        .collect();

    // Expected utility non-increasing as ε shrinks.
    let tightening: Vec<String> = (0..INSTANCES)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = rng(2000 + i);
            let spec = random_problem(&mut rng);
            let floor = epsilon_min(&spec).unwrap();
            let hi = floor + 10f64.powf(rng.gen_range(-3.0..-1.0));
            let lo = floor * 1.05 + 1e-6;
            let mut last = f64::INFINITY;
            for k in 0..10 {
                let eps = hi * (lo / hi).powf(k as f64 / 9.0);
                let eu = match solve(&spec.clone().with_tolerance(eps).unwrap()) {
                    Ok(s) => s.expected_utility,
                    Err(e) => return Some(format!("tightening instance {i}, ε={eps:e}: {e}")),
                };
                if eu > last + 1e-10 * last.abs().max(1.0) {
                    return Some(format!("tightening instance {i}: utility rose to {eu} at ε={eps:e}"));
                }
                last = eu;
            }
            None
        })
        .collect();

    // Threshold monotonicity and limits; regularization decomposition.
    let mut divergences = Vec::new();
    for i in 0..INSTANCES {
        let mut rng = rng(3000 + i);
        let a = random_strategy(&mut rng).quantile(&m, 1.0).unwrap();
        let b = random_strategy(&mut rng).quantile(&m, 1.0).unwrap();
        let q = coarse();
        for base in [BaseGenerator::Quadratic, BaseGenerator::Entropic] {
            let plain = BregmanGenerator::thresholded(base, 1.0).unwrap().without_threshold();
            let plain = plain.with_regularization(0.0).unwrap();
            let mut last = 0.0;
            for k in 0..30 {
                let alpha = 0.05 * 1.2f64.powi(k);
                let g = BregmanGenerator::thresholded(base, alpha).unwrap().with_regularization(0.0).unwrap();
                let v = bw_divergence(&a, &b, &g, &q).unwrap();
                if v < last - 1e-15 {
                    divergences.push(format!("α-monotonicity instance {i} {base:?} at α={alpha}"));
                    break;
                }
                last = v;
            }
            let tiny = BregmanGenerator::thresholded(base, 1e-4).unwrap().with_regularization(0.0).unwrap();
            let v = bw_divergence(&a, &b, &tiny, &q).unwrap();
            if v >= SMALL_ALPHA {
                divergences.push(format!("small-α limit instance {i} {base:?}: {v:e}"));
            }
            let huge = BregmanGenerator::thresholded(base, 1e6).unwrap().with_regularization(0.0).unwrap();
            let (h, p) = (bw_divergence(&a, &b, &huge, &q).unwrap(), bw_divergence(&a, &b, &plain, &q).unwrap());
            if (h - p).abs() > LARGE_ALPHA_REL * p.max(1e-300) {
                divergences.push(format!("large-α limit instance {i} {base:?}: {h} vs {p}"));
            }
            let reg = rng.gen_range(1e-3..1.0);
            let with = bw_divergence(&a, &b, &plain.with_regularization(reg).unwrap(), &q).unwrap();
            let mut breaks = a.breakpoints();
            breaks.extend(b.breakpoints());
            let l2 = q
                .grid_with_breakpoints(&breaks)
                .unwrap()
                .integrate(|n| Ok((a.eval_node(n) - b.eval_node(n)).powi(2)))
                .unwrap();
            if (with - p - 0.5 * reg * l2).abs() > DECOMPOSITION {
                divergences.push(format!("decomposition instance {i} {base:?}"));
            }
        }
    }

    // Payoff map non-decreasing in the stock price.
    let mut payoffs = Vec::new();
    for i in 0..INSTANCES {
        let mut rng = rng(4000 + i);
        let spec = random_problem(&mut rng);
        let mult = Multipliers::new(rng.gen_range(0.0..3.0), 10f64.powf(rng.gen_range(-2.0..2.0))).unwrap();
        let curve = OptimalCurve::new(&spec, mult).into_curve();
        let strat = random_strategy(&mut rng).quantile(&m, 1.0).unwrap();
        for (name, c) in [("optimal", &curve), ("strategy", &strat)] {
            let values: Vec<f64> = (0..400)
                .map(|k| {
                    let s = 0.05 + (2.5 - 0.05) * k as f64 / 399.0;
                    m.payoff_from_quantile(c, s).unwrap()
                })
                .collect();
            if !values.windows(2).all(|w| w[1] >= w[0]) {
                payoffs.push(format!("payoff instance {i} ({name})"));
            }
        }
    }

    let failures: Vec<String> = [monotone, kkt, tightening, divergences, payoffs].concat();
    report(8, "property suites", &failures, start.elapsed());
}

/// Projection of a constant benchmark onto the budget set with the curve
/// restricted to `cells` probit cells (uniform on [-4.5, 4.5] plus two tail
/// cells), solved through its one-dimensional dual.
fn projection_oracle(m: &MarketModel, level: f64, budget: f64, cells: usize) -> f64 {
    use bwopt_core::normal::cdf;
    let edges: Vec<f64> = std::iter::once(f64::NEG_INFINITY)
        .chain((0..=cells - 2).map(|k| -4.5 + 9.0 * k as f64 / (cells - 2) as f64))
        .chain(std::iter::once(f64::INFINITY))
        .collect();
    // Reflected-density cell averages: E[ξ; Z ∈ (a, b)] with ξ = exp(μ_φ − σ_φ Z).
    let (mu, sigma) = (m.spd_location(), m.spd_scale());
    let scale = (mu + 0.5 * sigma * sigma).exp();
    let cells: Vec<(f64, f64)> = edges
        .windows(2)
        .map(|w| {
            let p = cdf(w[1]) - cdf(w[0]);
            let mass = scale * (cdf(w[1] + sigma) - cdf(w[0] + sigma));
            (p, mass / p)
        })
        .collect();
    let g = |tau: f64| -> Vec<f64> { cells.iter().map(|(_, xi)| (level - tau * xi).max(0.0)).collect() };
    let cost = |v: &[f64]| -> f64 { cells.iter().zip(v).map(|((p, xi), g)| p * xi * g).sum() };
    let (mut lo, mut hi) = (0.0, 1.0);
    while cost(&g(hi)) > budget {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cost(&g(mid)) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = g(hi);
    cells.iter().zip(&v).map(|((p, _), g)| p * (g - level).powi(2)).sum()
}

#[test]
fn criterion_9_epsilon_min() {
    const TOL: f64 = 1e-4;
    let start = Instant::now();
    let m = market();
    let mut failures = Vec::new();
    let affordable = [
        QuantileCurve::constant(1.0).unwrap(),
        QuantileCurve::constant(0.7).unwrap(),
        StrategySpec::ConstantMix { w: 0.8 }.quantile(&m, 1.0).unwrap(),
        StrategySpec::Digital {
            low: 0.9,
            q: 0.05,
            breakpoint: DigitalBreakpoint::PricingProbability,
        }
        .quantile(&m, 1.0)
        .unwrap(),
    ];
    for g in strategies::table3_generators() {
        for b in &affordable {
            let v = minimal_divergence(&m, &g, b, 1.0, &quad()).unwrap().epsilon_min;
            if v != 0.0 {
                failures.push(format!("{} affordable benchmark gave {v}", g.tag()));
            }
        }
    }
    const REFINED_TOL: f64 = 1e-8;
    let g = BregmanGenerator::quadratic();
    for level in [1.05, 1.2, 1.3, 1.5] {
        let b = QuantileCurve::constant(level).unwrap();
        let got = minimal_divergence(&m, &g, &b, 1.0, &quad()).unwrap().epsilon_min;
        // The 64-cell oracle's own discretization error grows with the gap
        // between benchmark and budget; beyond 1.3 it exceeds the tolerance,
        // so there only the refined oracle is compared.
        if level <= 1.3 {
            let oracle = projection_oracle(&m, level, 1.0, 64);
            if (got - oracle).abs() > TOL {
                failures.push(format!("level {level}: {got} vs 64-cell oracle {oracle}"));
            }
        }
        let refined = projection_oracle(&m, level, 1.0, 16384);
        if (got - refined).abs() > REFINED_TOL {
            failures.push(format!("level {level}: {got} vs refined oracle {refined}"));
        }
    }
    report(9, "epsilon_min", &failures, start.elapsed());
}
