//! Bregman generators, pointwise Bregman divergences and the
//! Bregman–Wasserstein divergence between quantile curves.
//!
//! All generators live on `[0, ∞)`. A threshold `α` linearises the base
//! generator above `α`; a regularization weight `ϑ` adds `ϑ/2·x²`.

use crate::error::{invalid, Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::quantile::QuantileCurve;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Regularization applied by default to generators that are not strongly
/// convex on their own.
pub const DEFAULT_REGULARIZATION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseGenerator {
    /// `x²`
    Quadratic,
    /// `x ln x`, extended by 0 at the origin
    Entropic,
}

impl BaseGenerator {
    fn value(self, x: f64) -> f64 {
        match self {
            Self::Quadratic => x * x,
            Self::Entropic => {
                if x == 0.0 {
                    0.0
                } else {
                    x * x.ln()
                }
            }
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            Self::Quadratic => 2.0 * x,
            Self::Entropic => x.ln() + 1.0,
        }
    }

    fn second_derivative(self, x: f64) -> f64 {
        match self {
            Self::Quadratic => 2.0,
            Self::Entropic => 1.0 / x,
        }
    }

    fn divergence(self, z1: f64, z2: f64) -> f64 {
        match self {
            Self::Quadratic => (z1 - z2) * (z1 - z2),
            Self::Entropic => {
                if z1 == z2 {
                    0.0
                } else if z1 == 0.0 {
                    z2
                } else if z2 == 0.0 {
                    f64::INFINITY
                } else {
                    (z1 * (z1 / z2).ln() - z1 + z2).max(0.0)
                }
            }
        }
    }

    /// Solves `base′(x) + ϑx = slope` on the region where it is invertible.
    fn regularized_inverse(self, slope: f64, reg: f64) -> f64 {
        match self {
            Self::Quadratic => slope / (2.0 + reg),
            Self::Entropic => {
                let target = slope - 1.0;
                if reg == 0.0 {
                    return target.exp();
                }
                // v + ϑ e^v = target in v = ln x; convex increasing, so Newton
                // started from an upper bound decreases monotonically to the root.
                let mut v = if target > 0.0 {
                    target.min((target / reg).ln())
                } else {
                    target
                };
                for _ in 0..100 {
                    let ev = v.exp();
                    let f = v + reg * ev - target;
                    let step = f / (1.0 + reg * ev);
                    v -= step;
                    if step.abs() <= 1e-15 * v.abs().max(1.0) {
                        break;
                    }
                }
                v.exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BregmanGenerator {
    base: BaseGenerator,
    threshold: Option<f64>,
    regularization: f64,
}

impl BregmanGenerator {
    /// `φ₁(x) = x²` with no regularization.
    pub fn quadratic() -> Self {
        Self {
            base: BaseGenerator::Quadratic,
            threshold: None,
            regularization: 0.0,
        }
    }

    /// `φ₂(x) = x ln x` with the default regularization.
    pub fn entropic() -> Self {
        Self {
            base: BaseGenerator::Entropic,
            threshold: None,
            regularization: DEFAULT_REGULARIZATION,
        }
    }

    /// `φ̃(·; α)` built on `base`, with the default regularization.
    pub fn thresholded(base: BaseGenerator, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("threshold must be positive and finite, got {alpha}")));
        }
        Ok(Self {
            base,
            threshold: Some(alpha),
            regularization: DEFAULT_REGULARIZATION,
        })
    }

    pub fn with_regularization(mut self, reg: f64) -> Result<Self> {
        if !(reg >= 0.0 && reg.is_finite()) {
            return Err(invalid(format!("regularization must be non-negative, got {reg}")));
        }
        self.regularization = reg;
        Ok(self)
    }

    pub fn base(&self) -> BaseGenerator {
        self.base
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    /// Same generator with the threshold removed.
    pub fn without_threshold(&self) -> Self {
        Self {
            threshold: None,
            ..*self
        }
    }

    /// Largest `ϑ` with `φ″ ≥ ϑ` everywhere on `(0, ∞)`.
    pub fn strong_convexity_modulus(&self) -> f64 {
        match (self.base, self.threshold) {
            (BaseGenerator::Quadratic, None) => 2.0 + self.regularization,
            _ => self.regularization,
        }
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.threshold.is_none() || self.regularization > 0.0
    }

    /// Short identifier used in file names and tables.
    pub fn tag(&self) -> String {
        let base = match self.base {
            BaseGenerator::Quadratic => "quadratic",
            BaseGenerator::Entropic => "entropic",
        };
        match self.threshold {
            Some(a) => format!("{base}-a{a}"),
            None => base.to_string(),
        }
    }

    fn check(x: f64, what: &'static str) -> Result<()> {
        if x >= 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain { what, value: x })
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Self::check(x, "generator value")?;
        Ok(self.value_unchecked(x))
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        Self::check(x, "generator derivative")?;
        Ok(self.derivative_unchecked(x))
    }

    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        Self::check(x, "generator curvature")?;
        Ok(self.second_derivative_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: f64) -> f64 {
        let reg = 0.5 * self.regularization * x * x;
        match self.threshold {
            Some(a) if x > a => {
                self.base.derivative(a) * (x - a) + self.base.value(a) + reg
            }
            _ => self.base.value(x) + reg,
        }
    }

    pub(crate) fn derivative_unchecked(&self, x: f64) -> f64 {
        let reg = self.regularization * x;
        match self.threshold {
            Some(a) if x > a => self.base.derivative(a) + reg,
            _ => self.base.derivative(x) + reg,
        }
    }

    pub(crate) fn second_derivative_unchecked(&self, x: f64) -> f64 {
        match self.threshold {
            Some(a) if x > a => self.regularization,
            _ => self.base.second_derivative(x) + self.regularization,
        }
    }

    /// Closure of the range of `φ′` on `[0, ∞)`.
    pub fn derivative_range(&self) -> (f64, f64) {
        let lo = self.derivative_unchecked(0.0);
        let hi = match self.threshold {
            Some(a) if self.regularization == 0.0 => self.derivative_unchecked(a),
            _ => f64::INFINITY,
        };
        (lo, hi)
    }

    /// `(φ′)⁻¹(slope)`. On the flat piece of an unregularized thresholded
    /// generator the left endpoint `α` is returned.
    pub fn derivative_inverse(&self, slope: f64) -> Result<f64> {
        let (lo, hi) = self.derivative_range();
        if slope.is_nan() || slope < lo || slope > hi {
            return Err(Error::Range { slope, lo, hi });
        }
        Ok(self.generalized_inverse(slope))
    }

    /// `inf{x ≥ 0 : φ′(x) ≥ slope}`, clamped to 0 below the range and
    /// `+∞` above it.
    pub(crate) fn generalized_inverse(&self, slope: f64) -> f64 {
        let (lo, hi) = self.derivative_range();
        if slope <= lo {
            return 0.0;
        }
        if slope > hi {
            return f64::INFINITY;
        }
        let reg = self.regularization;
        match self.threshold {
            Some(a) => {
                let kink = self.derivative_unchecked(a);
                if slope >= kink {
                    if reg == 0.0 {
                        a
                    } else {
                        ((slope - self.base.derivative(a)) / reg).max(a)
                    }
                } else {
                    self.base.regularized_inverse(slope, reg).min(a)
                }
            }
            None => self.base.regularized_inverse(slope, reg),
        }
    }

    /// `B_φ(z1, z2) = φ(z1) − φ(z2) − φ′(z2)(z1 − z2)`.
    pub fn divergence(&self, z1: f64, z2: f64) -> Result<f64> {
        Self::check(z1, "Bregman divergence")?;
        Self::check(z2, "Bregman divergence")?;
        Ok(self.divergence_unchecked(z1, z2))
    }

    pub(crate) fn divergence_unchecked(&self, z1: f64, z2: f64) -> f64 {
        let base = match self.threshold {
            None => self.base.divergence(z1, z2),
            Some(a) => match (z1 <= a, z2 <= a) {
                (true, true) => self.base.divergence(z1, z2),
                (true, false) => self.base.divergence(z1, a),
                (false, true) => {
                    let slope_gap = (self.base.derivative(a) - self.base.derivative(z2)).max(0.0);
                    self.base.divergence(a, z2) + slope_gap * (z1 - a)
                }
                (false, false) => 0.0,
            },
        };
        if self.regularization > 0.0 {
            base + 0.5 * self.regularization * (z1 - z2) * (z1 - z2)
        } else {
            base
        }
    }
}

impl fmt::Display for BregmanGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.base {
            BaseGenerator::Quadratic => "x^2",
            BaseGenerator::Entropic => "x ln x",
        };
        match self.threshold {
            Some(a) => write!(f, "{base} (threshold {a})")?,
            None => write!(f, "{base}")?,
        }
        if self.regularization > 0.0 {
            write!(f, " + {:e}/2 x^2", self.regularization)?;
        }
        Ok(())
    }
}

/// `∫₀¹ B_φ(F̆₁(t), F̆₂(t)) dt`, the divergence along the comonotone coupling.
pub fn bw_divergence(
    first: &QuantileCurve,
    second: &QuantileCurve,
    generator: &BregmanGenerator,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let mut breaks = first.breakpoints();
    breaks.extend(second.breakpoints());
    let grid = quad.grid_with_breakpoints(&breaks)?;
    grid.integrate(|node| {
        let a = first.eval_node(node);
        let b = second.eval_node(node);
        if !(a >= 0.0 && b >= 0.0) {
            return Err(Error::Integration { t: node.t, value: a.min(b) });
        }
        Ok(generator.divergence_unchecked(a, b))
    })
}
