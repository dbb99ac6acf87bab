//! Subcommands other than `solve`.

use crate::config::{Experiment, StockGrid, Tolerance};
use crate::output::{num, text_table, write_csv};
use crate::run::{file_tag, run, write_summary, Report};
use anyhow::Result;
use bwopt_core::{
    minimal_divergence, strategies, BaseGenerator, BregmanGenerator, MarketModel, Node, Preset, QuadratureSpec,
    QuantileCurve,
};
use std::path::Path;

/// Divergence of every strategy from the benchmark, per generator, and the
/// resulting tolerance.
pub fn divergence(exp: &Experiment, dir: &Path) -> bwopt_core::Result<String> {
    let curves = exp.strategy_curves()?;
    divergence_table(&curves, &exp.benchmark, &exp.generators, &exp.quadrature, &dir.join("divergences.csv"), 10)
}

fn divergence_table(
    curves: &[QuantileCurve],
    benchmark: &QuantileCurve,
    generators: &[BregmanGenerator],
    quad: &QuadratureSpec,
    path: &Path,
    text_decimals: usize,
) -> bwopt_core::Result<String> {
    let mut header: Vec<String> = vec!["generator".into()];
    header.extend((1..=curves.len()).map(|k| format!("strategy{k}")));
    header.push("epsilon".into());
    let mut rows = Vec::new();
    let mut text_rows = Vec::new();
    for g in generators {
        let sel = strategies::select_tolerance(curves, benchmark, g, quad)?;
        let mut row = vec![file_tag(g)];
        let mut text = vec![file_tag(g)];
        for d in sel.divergences.iter().chain(std::iter::once(&sel.epsilon)) {
            row.push(num(*d));
            text.push(format!("{d:.text_decimals$}"));
        }
        rows.push(row);
        text_rows.push(text);
    }
    let head: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(path, &head, rows).map_err(|e| bwopt_core::Error::InvalidParameter(e.to_string()))?;
    Ok(text_table(&header, &text_rows))
}

pub fn epsilon_min(exp: &Experiment, dir: &Path) -> bwopt_core::Result<String> {
    let mut rows = Vec::new();
    let mut text = Vec::new();
    for g in &exp.generators {
        let m = minimal_divergence(&exp.market, g, &exp.benchmark, exp.budget, &exp.quadrature)?;
        let eta = m.eta.map(num).unwrap_or_else(|| "none".into());
        rows.push(vec![file_tag(g), num(m.epsilon_min), eta.clone()]);
        text.push(vec![file_tag(g), format!("{:.10}", m.epsilon_min), eta]);
    }
    write_csv(&dir.join("epsilon_min.csv"), &["generator", "epsilon_min", "eta"], rows)
        .map_err(|e| bwopt_core::Error::InvalidParameter(e.to_string()))?;
    Ok(text_table(&["generator".into(), "epsilon_min".into(), "eta".into()], &text))
}

/// Quantile curves and payoffs of the benchmark and each strategy.
pub fn payoff(exp: &Experiment, dir: &Path) -> Result<String> {
    let curves = exp.strategy_curves()?;
    let mut header = vec!["benchmark".to_string()];
    header.extend(exp.strategies.iter().map(|s| s.label().replace(' ', "_")));
    write_strategy_curves(&exp.market, &exp.benchmark, &curves, &header, exp.quantile_points, &exp.stock_grid, dir)?;
    Ok(format!(
        "wrote strategies_quantile.csv and strategies_payoff.csv for {} strategies\n",
        curves.len()
    ))
}

fn write_strategy_curves(
    market: &MarketModel,
    benchmark: &QuantileCurve,
    curves: &[QuantileCurve],
    labels: &[String],
    quantile_points: usize,
    grid: &StockGrid,
    dir: &Path,
) -> Result<()> {
    let all: Vec<&QuantileCurve> = std::iter::once(benchmark).chain(curves).collect();
    let mut head = vec!["t"];
    head.extend(labels.iter().map(String::as_str));
    let n = quantile_points;
    let rows = (1..=n).map(|k| {
        let t = k as f64 / (n as f64 + 1.0);
        let node = Node::from_t(t).expect("interior level");
        std::iter::once(num(t)).chain(all.iter().map(|c| num(c.eval_node(&node)))).collect()
    });
    write_csv(&dir.join("strategies_quantile.csv"), &head, rows)?;
    head[0] = "s";
    let mut rows = Vec::new();
    for s in grid.levels() {
        let mut row = vec![num(s)];
        for c in &all {
            row.push(num(market.payoff_from_quantile(c, s)?));
        }
        rows.push(row);
    }
    write_csv(&dir.join("strategies_payoff.csv"), &head, rows)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Artifact {
    Table1,
    Table2,
    Table3,
    #[value(name = "example1-figs")]
    Example1Figs,
    #[value(name = "example2-figs")]
    Example2Figs,
}

/// Outcome of a reproduction: printable text and any failed solves.
pub struct Reproduction {
    pub text: String,
    pub report: Report,
}

pub fn reproduce(artifact: Artifact, base: &Experiment, dir: &Path) -> Result<Reproduction> {
    let (preset, generators, name) = match artifact {
        Artifact::Table1 => (Preset::example1(), strategies::table1_generators(), "table1"),
        Artifact::Table2 => (Preset::example1(), strategies::table2_generators(), "table2"),
        Artifact::Table3 => (Preset::example2(), strategies::table3_generators(), "table3"),
        Artifact::Example1Figs => return figures(Preset::example1(), base, dir, true),
        Artifact::Example2Figs => return figures(Preset::example2(), base, dir, false),
    };
    let benchmark = preset.benchmark_curve(&base.market, base.budget)?;
    let curves = preset.strategy_curves(&base.market, base.budget)?;
    let text = divergence_table(
        &curves,
        &benchmark,
        &generators,
        &base.quadrature,
        &dir.join(format!("{name}.csv")),
        6,
    )?;
    std::fs::write(dir.join(format!("{name}.txt")), &text)?;
    Ok(Reproduction {
        text,
        report: Report::default(),
    })
}

fn preset_experiment(preset: &Preset, base: &Experiment) -> Result<Experiment> {
    Ok(Experiment {
        benchmark: preset.benchmark_curve(&base.market, base.budget)?,
        strategies: preset.strategies.clone(),
        gammas: vec![1.0, 1.5],
        generators: strategies::table3_generators(),
        tolerance: Tolerance::Select,
        ..base.clone()
    })
}

/// The curves behind the figures of one example: the acceptable strategies,
/// the unconstrained optimum and the constrained optima for every generator;
/// for the first example also a sweep over the regularization weight.
fn figures(preset: Preset, base: &Experiment, dir: &Path, theta_sweep: bool) -> Result<Reproduction> {
    let exp = preset_experiment(&preset, base)?;
    let mut labels = vec!["benchmark".to_string()];
    labels.extend(exp.strategies.iter().map(|s| s.label().replace(' ', "_")));
    let strat_dir = dir.join("strategies");
    std::fs::create_dir_all(&strat_dir)?;
    write_strategy_curves(
        &exp.market,
        &exp.benchmark,
        &exp.strategy_curves()?,
        &labels,
        exp.quantile_points,
        &exp.stock_grid,
        &strat_dir,
    )?;

    let mut report = Report::default();
    let free = Experiment {
        tolerance: Tolerance::Infinite,
        ..exp.clone()
    };
    report.extend(run(&free, &dir.join("unconstrained"))?);
    report.extend(run(&exp, &dir.join("constrained"))?);
    if theta_sweep {
        let mut sweep = Vec::new();
        for theta in [1e-2, 1e-4, 1e-6] {
            for base in [BaseGenerator::Quadratic, BaseGenerator::Entropic] {
                sweep.push(BregmanGenerator::thresholded(base, 1.0)?.with_regularization(theta)?);
            }
        }
        let theta = Experiment {
            generators: sweep,
            gammas: vec![1.0],
            ..exp.clone()
        };
        report.extend(run(&theta, &dir.join("theta-sweep"))?);
    }
    let text = write_summary(&report, dir)?;
    Ok(Reproduction { text, report })
}
