use super::epsilon_min::epsilon_min;
use super::pointwise::{Argmin, PointwiseSolver};
use super::wellposed::check_wellposedness;
use super::{BindingCase, Diagnostics, Multipliers, OptimalCurve, OptimalSolution, ProblemSpec, Residuals};
use crate::error::{Error, Result};
use crate::quadrature::Grid;
use crate::roots::{brent, expand_positive_bracket, Tolerance};
use rayon::prelude::*;
use std::cell::Cell;

/// Relative tolerance on `c(G*) − x0`.
pub(crate) const BUDGET_RTOL: f64 = 1e-10;
/// Relative tolerance on `BW(G*, F̆_b) − ε`.
pub(crate) const DIVERGENCE_RTOL: f64 = 1e-9;
const BUDGET_MAX_ITER: usize = 200;
const DIVERGENCE_MAX_ITER: usize = 100;
/// Stand-in for an infinite residual so that Brent's interpolation stays
/// finite; any unbounded argmin maps here.
const HUGE: f64 = 1e100;

/// The problem sampled on the quadrature grid.
pub(crate) struct Discretized<'a> {
    spec: &'a ProblemSpec,
    pub grid: Grid,
    spd: Vec<f64>,
    bench: Vec<f64>,
    bench_slope: Vec<f64>,
}

impl<'a> Discretized<'a> {
    pub fn new(spec: &'a ProblemSpec) -> Result<Self> {
        let grid = spec.quadrature.grid_with_breakpoints(&spec.benchmark.breakpoints())?;
        let spd = grid.nodes().iter().map(|n| spec.market.spd_reflected(n)).collect();
        let mut bench = Vec::with_capacity(grid.len());
        for n in grid.nodes() {
            let b = spec.benchmark.eval_node(n);
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::Integration { t: n.t, value: b });
            }
            bench.push(b);
        }
        let bench_slope = bench.iter().map(|&b| spec.generator.derivative_unchecked(b)).collect();
        Ok(Self {
            spec,
            grid,
            spd,
            bench,
            bench_slope,
        })
    }

    pub fn curve(&self, lambda: f64, mu: f64) -> Result<Vec<f64>> {
        let solver = PointwiseSolver {
            utility: &self.spec.utility,
            generator: &self.spec.generator,
            lambda,
            mu,
        };
        let out: Vec<Argmin> = self
            .spd
            .par_iter()
            .zip(self.bench_slope.par_iter())
            .map(|(&xi, &slope)| solver.solve(xi, slope))
            .collect();
        out.into_iter()
            .zip(self.grid.nodes())
            .map(|(a, n)| match a {
                Argmin::Finite(y) => Ok(y),
                Argmin::Unbounded => Err(Error::UnboundedArgmin { t: n.t }),
            })
            .collect()
    }

    pub fn cost(&self, values: &[f64]) -> f64 {
        weighted(self.grid.weights(), values.iter().zip(&self.spd).map(|(y, xi)| y * xi))
    }

    pub fn divergence(&self, values: &[f64]) -> f64 {
        let g = &self.spec.generator;
        weighted(
            self.grid.weights(),
            values.iter().zip(&self.bench).map(|(&y, &b)| g.divergence_unchecked(y, b)),
        )
    }

    pub fn expected_utility(&self, values: &[f64]) -> f64 {
        let u = &self.spec.utility;
        weighted(self.grid.weights(), values.iter().map(|&y| u.utility_unchecked(y)))
    }
}

fn weighted(weights: &[f64], values: impl Iterator<Item = f64>) -> f64 {
    weights.iter().zip(values).map(|(w, v)| w * v).sum()
}

/// Maps an unbounded argmin to a huge positive residual; other errors pass.
fn or_huge(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::UnboundedArgmin { .. }) => Ok(HUGE),
        Ok(v) if v.is_nan() => Ok(HUGE),
        Ok(v) => Ok(v.min(HUGE)),
        other => other,
    }
}

struct Counters {
    outer: Cell<usize>,
    inner: Cell<usize>,
}

/// `λ(μ)`: the budget multiplier making the budget bind, or 0 if the budget
/// is slack at `λ = 0`. `warm` seeds the bracket search.
fn budget_multiplier(d: &Discretized, mu: f64, warm: f64, counters: &Counters) -> Result<f64> {
    let x0 = d.spec.budget;
    let residual = |lambda: f64| -> Result<f64> {
        counters.inner.set(counters.inner.get() + 1);
        or_huge(d.curve(lambda, mu).map(|v| d.cost(&v) - x0))
    };
    if mu > 0.0 && residual(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    // c(G_{λ,μ}) is decreasing in λ.
    let mut f = residual;
    let (lo, _, hi, _) = expand_positive_bracket("budget multiplier", &mut f, warm, false, (1e-30, 1e30))?;
    if lo == hi {
        return Ok(lo);
    }
    let tol = Tolerance {
        xtol: 1e-15,
        ftol: 0.01 * BUDGET_RTOL * x0,
        max_iter: BUDGET_MAX_ITER,
    };
    let root = brent("budget multiplier", |s: f64| f(s.exp()), lo.ln(), hi.ln(), tol)?;
    Ok(root.x.exp())
}

pub fn solve(spec: &ProblemSpec) -> Result<OptimalSolution> {
    spec.validate()?;
    let report = check_wellposedness(spec);
    if !report.holds() {
        return Err(Error::NotWellPosed(report.to_string()));
    }
    let x0 = spec.budget;
    let eps = spec.tolerance;
    if eps.is_finite() {
        let eps_min = epsilon_min(spec)?;
        if eps <= eps_min {
            return Err(Error::Infeasible {
                epsilon: eps,
                epsilon_min: eps_min,
            });
        }
    }

    let d = Discretized::new(spec)?;
    let counters = Counters {
        outer: Cell::new(0),
        inner: Cell::new(0),
    };
    let mut monotone = true;

    // Budget binding alone (the Merton problem).
    let lambda0 = budget_multiplier(&d, 0.0, 1.0, &counters)?;
    let values0 = d.curve(lambda0, 0.0)?;
    let (multipliers, case) = if !eps.is_finite() || d.divergence(&values0) <= eps {
        (Multipliers { lambda: lambda0, mu: 0.0 }, BindingCase::BudgetOnly)
    } else {
        let div_tol = Tolerance {
            xtol: 1e-15,
            ftol: 0.1 * DIVERGENCE_RTOL * eps,
            max_iter: DIVERGENCE_MAX_ITER,
        };
        // Divergence binding alone.
        let mut bw_only = |mu: f64| -> Result<f64> {
            counters.inner.set(counters.inner.get() + 1);
            or_huge(d.curve(0.0, mu).map(|v| d.divergence(&v) - eps))
        };
        let (lo, _, hi, _) = expand_positive_bracket("divergence multiplier", &mut bw_only, 1.0, false, (1e-12, 1e12))?;
        let mu1 = if lo == hi {
            lo
        } else {
            brent("divergence multiplier", |s: f64| bw_only(s.exp()), lo.ln(), hi.ln(), div_tol)?
                .x
                .exp()
        };
        let values1 = d.curve(0.0, mu1)?;
        if d.cost(&values1) <= x0 * (1.0 + BUDGET_RTOL) {
            (Multipliers { lambda: 0.0, mu: mu1 }, BindingCase::DivergenceOnly)
        } else {
            // Both binding: root of BW(G_{λ(μ),μ}) − ε in μ.
            let warm = Cell::new(lambda0);
            let mut samples: Vec<(f64, f64)> = Vec::new();
            let mut both = |mu: f64| -> Result<f64> {
                counters.outer.set(counters.outer.get() + 1);
                let lambda = budget_multiplier(&d, mu, warm.get().max(1e-12), &counters)?;
                if lambda > 0.0 {
                    warm.set(lambda);
                }
                let r = or_huge(d.curve(lambda, mu).map(|v| d.divergence(&v) - eps))?;
                samples.push((mu, r));
                Ok(r)
            };
            let (lo, _, hi, _) = expand_positive_bracket("divergence multiplier", &mut both, mu1, false, (1e-12, 1e12))?;
            let mu = if lo == hi {
                lo
            } else {
                brent("divergence multiplier", |s: f64| both(s.exp()), lo.ln(), hi.ln(), div_tol)?
                    .x
                    .exp()
            };
            samples.sort_by(|a, b| a.0.total_cmp(&b.0));
            let slack = DIVERGENCE_RTOL * eps;
            monotone = samples.windows(2).all(|w| w[1].1 <= w[0].1 + slack);
            let lambda = budget_multiplier(&d, mu, warm.get().max(1e-12), &counters)?;
            (Multipliers { lambda, mu }, BindingCase::Both)
        }
    };

    let values = d.curve(multipliers.lambda, multipliers.mu)?;
    let cost = d.cost(&values);
    let divergence = d.divergence(&values);
    let residuals = Residuals {
        budget: cost - x0,
        divergence: divergence - eps,
    };
    let budget_tolerance = BUDGET_RTOL * x0;
    let divergence_tolerance = if eps.is_finite() { DIVERGENCE_RTOL * eps } else { f64::INFINITY };
    let budget_ok = if multipliers.lambda > 0.0 {
        residuals.budget.abs() <= budget_tolerance
    } else {
        residuals.budget <= budget_tolerance
    };
    let divergence_ok = if multipliers.mu > 0.0 {
        residuals.divergence.abs() <= divergence_tolerance
    } else {
        residuals.divergence <= divergence_tolerance
    };
    if !budget_ok {
        return Err(Error::NonConvergence {
            what: "budget constraint",
            iterations: counters.inner.get(),
            residual: residuals.budget,
        });
    }
    if !divergence_ok {
        return Err(Error::NonConvergence {
            what: "divergence constraint",
            iterations: counters.outer.get(),
            residual: residuals.divergence,
        });
    }

    Ok(OptimalSolution {
        curve: OptimalCurve::new(spec, multipliers).into_curve(),
        multipliers,
        case,
        residuals,
        cost,
        divergence,
        expected_utility: d.expected_utility(&values),
        diagnostics: Diagnostics {
            outer_iterations: counters.outer.get(),
            inner_iterations: counters.inner.get(),
            budget_tolerance,
            divergence_tolerance,
            residual_monotone: monotone,
            nodes: d.grid.len(),
            tail_mass: d.grid.tail_mass(),
        },
    })
}
