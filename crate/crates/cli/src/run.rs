//! One experiment: for every (generator, γ) pair choose ε, solve, and dump
//! the optimal quantile curve, the payoff against the stock and a summary row.

use crate::config::{Experiment, Tolerance};
use crate::output::{gamma_tag, num, text_table, write_csv};
use anyhow::Result;
use bwopt_core::{
    epsilon_min, solve, strategies, BaseGenerator, BregmanGenerator, Node, OptimalSolution, ProblemSpec, QuantileCurve,
    UtilitySpec, DEFAULT_REGULARIZATION,
};
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub generator: String,
    pub gamma: f64,
    pub epsilon: f64,
    pub epsilon_min: f64,
    pub lambda: f64,
    pub mu: f64,
    pub case: String,
    pub expected_utility: f64,
    pub cost: f64,
    pub divergence: f64,
    /// `F̆*(1 − 10⁻⁶)`, a proxy for the essential supremum.
    pub top_quantile: f64,
    /// `P(X̂ < X_b)`, the measure of levels where the optimum is below the
    /// benchmark.
    pub shortfall_probability: f64,
    pub outer_iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunFailure {
    pub generator: String,
    pub gamma: f64,
    pub error: String,
}

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub runs: Vec<RunSummary>,
    pub failures: Vec<RunFailure>,
}

impl Report {
    pub fn extend(&mut self, other: Report) {
        self.runs.extend(other.runs);
        self.failures.extend(other.failures);
    }
}

/// File-name tag; the regularization is spelled out only when it differs
/// from the generator's default.
pub fn file_tag(g: &BregmanGenerator) -> String {
    let default = match (g.base(), g.threshold()) {
        (BaseGenerator::Quadratic, None) => 0.0,
        _ => DEFAULT_REGULARIZATION,
    };
    if g.regularization() == default {
        g.tag()
    } else {
        format!("{}-theta{:e}", g.tag(), g.regularization())
    }
}

/// Lebesgue measure of `{t : a(t) < b(t)}`, from sign changes on a probit
/// grid refined by bisection.
pub fn shortfall_measure(a: &QuantileCurve, b: &QuantileCurve) -> f64 {
    let diff = |z: f64| {
        let n = Node::from_z(z);
        a.eval_node(&n) - b.eval_node(&n)
    };
    let refine = |mut lo: f64, mut hi: f64| {
        let below_lo = diff(lo) < 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (diff(mid) < 0.0) == below_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    const N: usize = 4000;
    let zs: Vec<f64> = (0..=N).map(|k| -8.0 + 16.0 * k as f64 / N as f64).collect();
    let mut total = 0.0;
    let mut start = if diff(zs[0]) < 0.0 { Some(f64::NEG_INFINITY) } else { None };
    for w in zs.windows(2) {
        let (below0, below1) = (diff(w[0]) < 0.0, diff(w[1]) < 0.0);
        if below0 != below1 {
            let z = refine(w[0], w[1]);
            if below1 {
                start = Some(z);
            } else if let Some(s) = start.take() {
                total += Node::from_z(z).t - if s.is_finite() { Node::from_z(s).t } else { 0.0 };
            }
        }
    }
    if let Some(s) = start {
        total += 1.0 - if s.is_finite() { Node::from_z(s).t } else { 0.0 };
    }
    total
}

fn tolerance_for(exp: &Experiment, g: &BregmanGenerator) -> bwopt_core::Result<f64> {
    match exp.tolerance {
        Tolerance::Explicit(e) => Ok(e),
        Tolerance::Infinite => Ok(f64::INFINITY),
        Tolerance::Select => {
            let curves = exp.strategy_curves()?;
            strategies::select_tolerance(&curves, &exp.benchmark, g, &exp.quadrature).map(|s| s.epsilon)
        }
    }
}

fn solve_one(exp: &Experiment, g: BregmanGenerator, gamma: f64) -> bwopt_core::Result<(ProblemSpec, OptimalSolution)> {
    let eps = tolerance_for(exp, &g)?;
    let spec = ProblemSpec::new(exp.market, UtilitySpec::crra(gamma)?, g, exp.benchmark.clone(), exp.budget, eps)?
        .with_quadrature(exp.quadrature)?;
    let sol = solve(&spec)?;
    Ok((spec, sol))
}

fn write_curves(exp: &Experiment, dir: &Path, stem: &str, sol: &OptimalSolution) -> Result<()> {
    let n = exp.quantile_points;
    let rows = (1..=n).map(|k| {
        let t = k as f64 / (n as f64 + 1.0);
        let node = Node::from_t(t).expect("interior level");
        vec![num(t), num(sol.curve.eval_node(&node)), num(exp.benchmark.eval_node(&node))]
    });
    write_csv(&dir.join(format!("quantile_{stem}.csv")), &["t", "optimal", "benchmark"], rows)?;
    let mut rows = Vec::new();
    for s in exp.stock_grid.levels() {
        let opt = exp.market.payoff_from_quantile(&sol.curve, s)?;
        let bench = exp.market.payoff_from_quantile(&exp.benchmark, s)?;
        rows.push(vec![num(s), num(opt), num(bench)]);
    }
    write_csv(&dir.join(format!("payoff_{stem}.csv")), &["s", "optimal", "benchmark"], rows)?;
    Ok(())
}

/// Runs every pair; solver failures are recorded, not propagated.
pub fn run(exp: &Experiment, dir: &Path) -> Result<Report> {
    std::fs::create_dir_all(dir)?;
    let pairs: Vec<(Option<BregmanGenerator>, f64)> = match exp.tolerance {
        // Without the divergence constraint the generator is irrelevant.
        Tolerance::Infinite => exp.gammas.iter().map(|&g| (None, g)).collect(),
        _ => exp
            .generators
            .iter()
            .flat_map(|g| exp.gammas.iter().map(move |&gamma| (Some(*g), gamma)))
            .collect(),
    };
    let results: Vec<Result<std::result::Result<RunSummary, RunFailure>>> = pairs
        .par_iter()
        .map(|&(g, gamma)| {
            let generator = g.unwrap_or_else(BregmanGenerator::quadratic);
            let name = g.map(|g| file_tag(&g)).unwrap_or_else(|| "unconstrained".into());
            let (spec, sol) = match solve_one(exp, generator, gamma) {
                Ok(x) => x,
                Err(e) => {
                    return Ok(Err(RunFailure {
                        generator: name,
                        gamma,
                        error: e.to_string(),
                    }))
                }
            };
            let stem = format!("{name}_{}", gamma_tag(gamma));
            write_curves(exp, dir, &stem, &sol)?;
            let eps_min = if spec.tolerance.is_finite() { epsilon_min(&spec)? } else { 0.0 };
            Ok(Ok(RunSummary {
                generator: name,
                gamma,
                epsilon: spec.tolerance,
                epsilon_min: eps_min,
                lambda: sol.multipliers.lambda,
                mu: sol.multipliers.mu,
                case: serde_json::to_value(sol.case)?.as_str().unwrap_or_default().to_string(),
                expected_utility: sol.expected_utility,
                cost: sol.cost,
                divergence: sol.divergence,
                top_quantile: sol.curve.evaluate(1.0 - 1e-6)?,
                shortfall_probability: shortfall_measure(&sol.curve, &exp.benchmark),
                outer_iterations: sol.diagnostics.outer_iterations,
            }))
        })
        .collect();
    let mut report = Report::default();
    for r in results {
        match r? {
            Ok(s) => report.runs.push(s),
            Err(f) => report.failures.push(f),
        }
    }
    Ok(report)
}

pub fn write_summary(report: &Report, dir: &Path) -> Result<String> {
    let header = [
        "generator",
        "gamma",
        "epsilon",
        "epsilon_min",
        "lambda",
        "mu",
        "case",
        "expected_utility",
        "cost",
        "divergence",
        "top_quantile",
        "shortfall_probability",
    ];
    let rows: Vec<Vec<String>> = report
        .runs
        .iter()
        .map(|r| {
            vec![
                r.generator.clone(),
                format!("{}", r.gamma),
                num(r.epsilon),
                num(r.epsilon_min),
                num(r.lambda),
                num(r.mu),
                r.case.clone(),
                num(r.expected_utility),
                num(r.cost),
                num(r.divergence),
                num(r.top_quantile),
                num(r.shortfall_probability),
            ]
        })
        .collect();
    write_csv(&dir.join("summary.csv"), &header, rows.clone())?;
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(report)? + "\n")?;

    let short = |v: f64| if v.is_finite() { format!("{v:.6}") } else { format!("{v}") };
    let text_rows: Vec<Vec<String>> = report
        .runs
        .iter()
        .map(|r| {
            vec![
                r.generator.clone(),
                format!("{}", r.gamma),
                short(r.epsilon),
                format!("{:.6}", r.lambda),
                format!("{:.6}", r.mu),
                r.case.clone(),
                format!("{:.6}", r.expected_utility),
                format!("{:.4}", r.top_quantile),
                format!("{:.4}", r.shortfall_probability),
            ]
        })
        .collect();
    let head = ["generator", "gamma", "epsilon", "lambda", "mu", "case", "E[u]", "F*(1-1e-6)", "P(X<Xb)"]
        .map(String::from);
    let mut text = text_table(&head, &text_rows);
    for f in &report.failures {
        text.push_str(&format!("FAILED {} gamma={}: {}\n", f.generator, f.gamma, f.error));
    }
    std::fs::write(dir.join("summary.txt"), &text)?;
    Ok(text)
}
