//! Quantile curves and the functionals evaluated on them.

use crate::error::{invalid, Error, Result};
use crate::market::MarketModel;
use crate::preferences::UtilitySpec;
use crate::quadrature::{Node, QuadratureSpec};
use std::fmt;
use std::sync::Arc;

/// A quantile curve whose values come from an external evaluator, such as
/// the optimizer's pointwise minimizer.
pub trait ClosedFormCurve: Send + Sync + fmt::Debug {
    fn eval_node(&self, node: &Node) -> f64;

    /// Probability levels where the curve may jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// A non-decreasing, left-continuous map from `(0, 1)` to terminal wealth.
#[derive(Debug, Clone)]
pub enum QuantileCurve {
    Constant(f64),
    /// `exp(location + scale·Φ̆(t))`
    Lognormal { location: f64, scale: f64 },
    /// `weight·exp(location + scale·Φ̆(t)) + shift`
    AffineLognormal {
        weight: f64,
        location: f64,
        scale: f64,
        shift: f64,
    },
    /// `levels[k]` on `(breakpoints[k-1], breakpoints[k]]`.
    Step {
        levels: Vec<f64>,
        breakpoints: Vec<f64>,
    },
    /// Piecewise linear through `(t_k, v_k)`, constant outside the nodes.
    Tabulated { nodes: Vec<f64>, values: Vec<f64> },
    ClosedForm(Arc<dyn ClosedFormCurve>),
}

impl QuantileCurve {
    pub fn constant(level: f64) -> Result<Self> {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(invalid(format!("constant level must be non-negative, got {level}")));
        }
        Ok(Self::Constant(level))
    }

    pub fn lognormal(location: f64, scale: f64) -> Result<Self> {
        if !(location.is_finite() && scale >= 0.0 && scale.is_finite()) {
            return Err(invalid(format!(
                "lognormal parameters ({location}, {scale}) invalid"
            )));
        }
        Ok(Self::Lognormal { location, scale })
    }

    pub fn affine_lognormal(weight: f64, location: f64, scale: f64, shift: f64) -> Result<Self> {
        if !(weight >= 0.0 && shift >= 0.0 && scale >= 0.0 && location.is_finite())
            || !(weight.is_finite() && shift.is_finite() && scale.is_finite())
        {
            return Err(invalid("affine lognormal needs non-negative weight, scale and shift"));
        }
        Ok(Self::AffineLognormal {
            weight,
            location,
            scale,
            shift,
        })
    }

    pub fn step(levels: Vec<f64>, breakpoints: Vec<f64>) -> Result<Self> {
        if levels.len() != breakpoints.len() + 1 {
            return Err(invalid("step curve needs one more level than breakpoints"));
        }
        if levels.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("step levels must be non-negative and finite"));
        }
        if levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("step levels must be non-decreasing"));
        }
        if breakpoints.iter().any(|b| !(*b > 0.0 && *b < 1.0))
            || breakpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(invalid("step breakpoints must be strictly increasing in (0, 1)"));
        }
        Ok(Self::Step { levels, breakpoints })
    }

    /// Rejects (does not repair) nodes or values that break monotonicity.
    pub fn tabulated(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(invalid("tabulated curve needs matching, non-empty node and value lists"));
        }
        if nodes.iter().any(|t| !(*t > 0.0 && *t < 1.0)) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("tabulated nodes must be strictly increasing in (0, 1)"));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || values.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("tabulated values must be non-negative and non-decreasing"));
        }
        Ok(Self::Tabulated { nodes, values })
    }

    pub fn closed_form(curve: Arc<dyn ClosedFormCurve>) -> Self {
        Self::ClosedForm(curve)
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let node = Node::from_t(t)?;
        Ok(self.eval_node(&node))
    }

    pub fn eval_node(&self, node: &Node) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Lognormal { location, scale } => (location + scale * node.z).exp(),
            Self::AffineLognormal {
                weight,
                location,
                scale,
                shift,
            } => weight * (location + scale * node.z).exp() + shift,
            Self::Step { levels, breakpoints } => {
                // left-continuous: a breakpoint takes the lower level
                let k = breakpoints.partition_point(|b| *b < node.t);
                levels[k]
            }
            Self::Tabulated { nodes, values } => {
                let t = node.t;
                let k = nodes.partition_point(|x| *x < t);
                if k == 0 {
                    values[0]
                } else if k == nodes.len() {
                    values[k - 1]
                } else {
                    let (t0, t1) = (nodes[k - 1], nodes[k]);
                    let (v0, v1) = (values[k - 1], values[k]);
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
            Self::ClosedForm(curve) => curve.eval_node(node),
        }
    }

    /// Probability levels where the curve jumps or kinks.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Step { breakpoints, .. } => breakpoints.clone(),
            Self::Tabulated { nodes, .. } => nodes.clone(),
            Self::ClosedForm(curve) => curve.breakpoints(),
            _ => Vec::new(),
        }
    }

    /// Whether the curve is bounded on `(0, 1)`.
    pub fn is_bounded(&self) -> bool {
        match self {
            Self::Constant(_) | Self::Step { .. } | Self::Tabulated { .. } => true,
            Self::Lognormal { scale, .. } => *scale == 0.0,
            Self::AffineLognormal { weight, scale, .. } => *weight == 0.0 || *scale == 0.0,
            Self::ClosedForm(_) => false,
        }
    }

    /// `∫₀¹ F̆(t)² dt`, in closed form where available.
    pub fn second_moment(&self, quad: &QuadratureSpec) -> Result<f64> {
        match self {
            Self::Lognormal { location, scale } => Ok((2.0 * location + 2.0 * scale * scale).exp()),
            Self::AffineLognormal {
                weight,
                location,
                scale,
                shift,
            } => {
                let m1 = (location + 0.5 * scale * scale).exp();
                let m2 = (2.0 * location + 2.0 * scale * scale).exp();
                Ok(weight * weight * m2 + 2.0 * weight * shift * m1 + shift * shift)
            }
            _ => {
                let grid = quad.grid_with_breakpoints(&self.breakpoints())?;
                grid.integrate(|n| Ok(self.eval_node(n).powi(2)))
            }
        }
    }

    /// `∫₀¹ F̆(t) dt` on the grid.
    pub fn mean(&self, quad: &QuadratureSpec) -> Result<f64> {
        let grid = quad.grid_with_breakpoints(&self.breakpoints())?;
        grid.integrate(|n| Ok(self.eval_node(n)))
    }

    /// Samples for plotting on `points` equally spaced levels `k/(points+1)`.
    pub fn sample(&self, points: usize) -> Vec<(f64, f64)> {
        (1..=points)
            .map(|k| {
                let t = k as f64 / (points as f64 + 1.0);
                let node = Node::from_t(t).expect("interior level");
                (t, self.eval_node(&node))
            })
            .collect()
    }
}

/// Cost of the cheapest payoff with quantile curve `curve`:
/// `∫₀¹ F̆(t)·F̆_φ(1 − t) dt`.
pub fn cost_functional(curve: &QuantileCurve, market: &MarketModel, quad: &QuadratureSpec) -> Result<f64> {
    let grid = quad.grid_with_breakpoints(&curve.breakpoints())?;
    grid.integrate(|node| Ok(curve.eval_node(node) * market.spd_reflected(node)))
}

/// `∫₀¹ u(F̆(t)) dt`.
pub fn expected_utility(curve: &QuantileCurve, utility: &UtilitySpec, quad: &QuadratureSpec) -> Result<f64> {
    let grid = quad.grid_with_breakpoints(&curve.breakpoints())?;
    grid.integrate(|node| {
        let x = curve.eval_node(node);
        if x < 0.0 {
            return Err(Error::Integration { t: node.t, value: x });
        }
        Ok(utility.utility_unchecked(x))
    })
}
