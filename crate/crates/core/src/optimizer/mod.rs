//! The constrained expected-utility problem
//!
//! maximize `∫u(G)` over quantile curves `G ≥ 0` subject to
//! `c(G) ≤ x0` and `BW_φ(G, F̆_b) ≤ ε`,
//!
//! solved through its Lagrangian dual: for multipliers `(λ, μ)` the optimal
//! curve is the pointwise argmin of
//! `h_t(y) = −u(y) + μ B_φ(y, F̆_b(t)) + λ y F̆_φ(1−t)`,
//! and the multipliers are fixed by complementary slackness.

mod epsilon_min;
mod pointwise;
mod solve;
mod wellposed;

pub use epsilon_min::{epsilon_min, minimal_divergence, MinimalDivergence};
pub use solve::solve;
pub use wellposed::{check_wellposedness, WellPosedness};

use crate::bregman::BregmanGenerator;
use crate::error::{invalid, Error, Result};
use crate::market::MarketModel;
use crate::preferences::UtilitySpec;
use crate::quadrature::{Node, QuadratureSpec};
use crate::quantile::{ClosedFormCurve, QuantileCurve};
use pointwise::{Argmin, PointwiseSolver};
use serde::Serialize;
use std::sync::Arc;

/// Everything that defines one instance of the problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub market: MarketModel,
    pub utility: UtilitySpec,
    pub generator: BregmanGenerator,
    pub benchmark: QuantileCurve,
    pub budget: f64,
    /// `f64::INFINITY` drops the divergence constraint.
    pub tolerance: f64,
    pub quadrature: QuadratureSpec,
}

impl ProblemSpec {
    pub fn new(
        market: MarketModel,
        utility: UtilitySpec,
        generator: BregmanGenerator,
        benchmark: QuantileCurve,
        budget: f64,
        tolerance: f64,
    ) -> Result<Self> {
        let spec = Self {
            market,
            utility,
            generator,
            benchmark,
            budget,
            tolerance,
            quadrature: QuadratureSpec::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_quadrature(mut self, quadrature: QuadratureSpec) -> Result<Self> {
        quadrature.validate()?;
        self.quadrature = quadrature;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return Err(invalid(format!("budget must be positive and finite, got {}", self.budget)));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(invalid(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        self.quadrature.validate()
    }

    pub fn is_constrained(&self) -> bool {
        self.tolerance.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Multipliers {
    /// Budget multiplier `λ ≥ 0`.
    pub lambda: f64,
    /// Divergence multiplier `μ ≥ 0`.
    pub mu: f64,
}

impl Multipliers {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda >= 0.0 && mu >= 0.0 && lambda.is_finite() && mu.is_finite()) {
            return Err(invalid(format!("multipliers must be finite and non-negative, got ({lambda}, {mu})")));
        }
        if lambda == 0.0 && mu == 0.0 {
            return Err(invalid("at least one multiplier must be positive"));
        }
        Ok(Self { lambda, mu })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BindingCase {
    BudgetOnly,
    DivergenceOnly,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `c(G*) − x0`
    pub budget: f64,
    /// `BW(G*, F̆_b) − ε`; `−∞` when unconstrained.
    pub divergence: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub budget_tolerance: f64,
    pub divergence_tolerance: f64,
    /// Whether the sampled divergence residual was non-increasing in `μ`.
    pub residual_monotone: bool,
    pub nodes: usize,
    pub tail_mass: f64,
}

#[derive(Debug, Clone)]
pub struct OptimalSolution {
    pub curve: QuantileCurve,
    pub multipliers: Multipliers,
    pub case: BindingCase,
    pub residuals: Residuals,
    pub cost: f64,
    pub divergence: f64,
    pub expected_utility: f64,
    pub diagnostics: Diagnostics,
}

impl OptimalSolution {
    /// `(λ·(c − x0), μ·(BW − ε))`, with a zero multiplier giving zero.
    pub fn slackness(&self) -> (f64, f64) {
        let prod = |m: f64, r: f64| if m == 0.0 { 0.0 } else { m * r };
        (
            prod(self.multipliers.lambda, self.residuals.budget),
            prod(self.multipliers.mu, self.residuals.divergence),
        )
    }
}

/// `argmin_y h_t(y)` at level `t`.
pub fn pointwise_minimizer(spec: &ProblemSpec, multipliers: Multipliers, t: f64) -> Result<f64> {
    let node = Node::from_t(t)?;
    pointwise_at(spec, multipliers, &node)
}

pub fn pointwise_at(spec: &ProblemSpec, multipliers: Multipliers, node: &Node) -> Result<f64> {
    let b = spec.benchmark.eval_node(node);
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::Domain { what: "benchmark quantile", value: b });
    }
    let solver = PointwiseSolver {
        utility: &spec.utility,
        generator: &spec.generator,
        lambda: multipliers.lambda,
        mu: multipliers.mu,
    };
    let slope = if multipliers.mu > 0.0 { spec.generator.derivative_unchecked(b) } else { 0.0 };
    match solver.solve(spec.market.spd_reflected(node), slope) {
        Argmin::Finite(y) => Ok(y),
        Argmin::Unbounded => Err(Error::UnboundedArgmin { t: node.t }),
    }
}

/// The optimal quantile curve `t ↦ argmin h_t` for fixed multipliers.
#[derive(Debug, Clone)]
pub struct OptimalCurve {
    market: MarketModel,
    utility: UtilitySpec,
    generator: BregmanGenerator,
    benchmark: QuantileCurve,
    multipliers: Multipliers,
}

impl OptimalCurve {
    pub fn new(spec: &ProblemSpec, multipliers: Multipliers) -> Self {
        Self {
            market: spec.market,
            utility: spec.utility,
            generator: spec.generator,
            benchmark: spec.benchmark.clone(),
            multipliers,
        }
    }

    pub fn multipliers(&self) -> Multipliers {
        self.multipliers
    }

    pub fn into_curve(self) -> QuantileCurve {
        QuantileCurve::closed_form(Arc::new(self))
    }
}

impl ClosedFormCurve for OptimalCurve {
    fn eval_node(&self, node: &Node) -> f64 {
        let Multipliers { lambda, mu } = self.multipliers;
        let solver = PointwiseSolver {
            utility: &self.utility,
            generator: &self.generator,
            lambda,
            mu,
        };
        let slope = if mu > 0.0 {
            self.generator.derivative_unchecked(self.benchmark.eval_node(node))
        } else {
            0.0
        };
        match solver.solve(self.market.spd_reflected(node), slope) {
            Argmin::Finite(y) => y,
            Argmin::Unbounded => f64::INFINITY,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.benchmark.breakpoints()
    }
}
