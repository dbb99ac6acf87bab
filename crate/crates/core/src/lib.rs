//! Expected-utility maximization under a Bregman–Wasserstein divergence
//! constraint to a benchmark, in a Black–Scholes market.
//!
//! Payoffs are represented by their quantile curves; the cheapest payoff with
//! a given law is anti-monotone in the state-price density, so the problem
//! reduces to optimizers over non-decreasing curves on `(0, 1)`.

pub mod bregman;
pub mod error;
pub mod market;
pub mod normal;
pub mod optimizer;
pub mod preferences;
pub mod quadrature;
pub mod quantile;
pub mod roots;
pub mod strategies;

pub use bregman::{bw_divergence, BaseGenerator, BregmanGenerator, DEFAULT_REGULARIZATION};
pub use error::{Error, Result};
pub use market::{MarketModel, MarketParams};
pub use optimizer::{
    check_wellposedness, epsilon_min, minimal_divergence, pointwise_at, pointwise_minimizer, solve, BindingCase,
    Diagnostics, MinimalDivergence, Multipliers, OptimalCurve, OptimalSolution, ProblemSpec, Residuals,
    WellPosedness,
};
pub use preferences::UtilitySpec;
pub use quadrature::{Grid, Node, QuadratureSpec};
pub use quantile::{cost_functional, expected_utility, ClosedFormCurve, QuantileCurve};
pub use strategies::{select_tolerance, DigitalBreakpoint, Preset, StrategySpec, ToleranceSelection};
