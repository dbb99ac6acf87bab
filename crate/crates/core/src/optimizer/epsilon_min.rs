use super::ProblemSpec;
use crate::bregman::BregmanGenerator;
use crate::error::{Error, Result};
use crate::market::MarketModel;
use crate::quadrature::QuadratureSpec;
use crate::quantile::QuantileCurve;
use crate::roots::{brent, expand_positive_bracket, Tolerance};

/// The smallest divergence from the benchmark among affordable curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalDivergence {
    pub epsilon_min: f64,
    /// Multiplier of the budget in the projection; `None` when the benchmark
    /// itself is affordable.
    pub eta: Option<f64>,
}

/// `ε_min` for the problem's market, generator, benchmark and budget.
pub fn epsilon_min(spec: &ProblemSpec) -> Result<f64> {
    minimal_divergence(&spec.market, &spec.generator, &spec.benchmark, spec.budget, &spec.quadrature)
        .map(|m| m.epsilon_min)
}

/// Projects the benchmark onto the budget set: the minimizer is
/// `G_η = max(0, (φ′)⁻¹(φ′(F̆_b(t)) − η F̆_φ(1−t)))` with `η` fixed by the
/// budget.
pub fn minimal_divergence(
    market: &MarketModel,
    generator: &BregmanGenerator,
    benchmark: &QuantileCurve,
    budget: f64,
    quad: &QuadratureSpec,
) -> Result<MinimalDivergence> {
    let grid = quad.grid_with_breakpoints(&benchmark.breakpoints())?;
    let mut bench = Vec::with_capacity(grid.len());
    for n in grid.nodes() {
        let b = benchmark.eval_node(n);
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Integration { t: n.t, value: b });
        }
        bench.push(b);
    }
    let spd: Vec<f64> = grid.nodes().iter().map(|n| market.spd_reflected(n)).collect();
    let w = grid.weights();
    let cost_b: f64 = w.iter().zip(&bench).zip(&spd).map(|((w, b), xi)| w * b * xi).sum();
    if cost_b <= budget {
        return Ok(MinimalDivergence {
            epsilon_min: 0.0,
            eta: None,
        });
    }
    let slopes: Vec<f64> = bench.iter().map(|&b| generator.derivative_unchecked(b)).collect();
    let project = |eta: f64| -> Vec<f64> {
        slopes
            .iter()
            .zip(&spd)
            .map(|(s, xi)| generator.generalized_inverse(s - eta * xi))
            .collect()
    };
    let mut residual = |eta: f64| -> Result<f64> {
        let g = project(eta);
        Ok(w.iter().zip(&g).zip(&spd).map(|((w, g), xi)| w * g * xi).sum::<f64>() - budget)
    };
    let tol = Tolerance {
        xtol: 1e-15,
        ftol: 1e-13 * budget,
        max_iter: 200,
    };
    let (lo, _, hi, _) = expand_positive_bracket("projection multiplier", &mut residual, 1.0, false, (1e-30, 1e30))?;
    let eta = if lo == hi {
        lo
    } else {
        brent("projection multiplier", |s: f64| residual(s.exp()), lo.ln(), hi.ln(), tol)?
            .x
            .exp()
    };
    let g = project(eta);
    let value = w
        .iter()
        .zip(&g)
        .zip(&bench)
        .map(|((w, &g), &b)| w * generator.divergence_unchecked(g, b))
        .sum();
    Ok(MinimalDivergence {
        epsilon_min: value,
        eta: Some(eta),
    })
}
