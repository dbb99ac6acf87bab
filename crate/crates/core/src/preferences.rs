//! CRRA expected-utility preferences.

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

/// Constant relative risk aversion utility
/// `u(x) = (x^{1−γ} − 1)/(1 − γ)`, with `u(x) = ln x` at `γ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilitySpec {
    gamma: f64,
}

impl UtilitySpec {
    pub fn crra(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("risk aversion must be positive, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    pub fn log() -> Self {
        Self { gamma: 1.0 }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn is_log(&self) -> bool {
        // exact parameter test; the log branch is not reached as a limit
        self.gamma == 1.0
    }

    fn check(x: f64, what: &'static str) -> Result<()> {
        if x > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain { what, value: x })
        }
    }

    pub fn utility(&self, x: f64) -> Result<f64> {
        Self::check(x, "utility")?;
        Ok(self.utility_unchecked(x))
    }

    pub fn marginal(&self, x: f64) -> Result<f64> {
        Self::check(x, "marginal utility")?;
        Ok(self.marginal_unchecked(x))
    }

    /// `I = (u′)⁻¹`.
    pub fn inverse_marginal(&self, y: f64) -> Result<f64> {
        Self::check(y, "inverse marginal utility")?;
        Ok(self.inverse_marginal_unchecked(y))
    }

    /// Value on `x > 0`; `−∞` (or the finite CRRA limit for γ < 1) at zero.
    pub(crate) fn utility_unchecked(&self, x: f64) -> f64 {
        if self.is_log() {
            x.ln()
        } else {
            let e = 1.0 - self.gamma;
            (x.powf(e) - 1.0) / e
        }
    }

    pub(crate) fn marginal_unchecked(&self, x: f64) -> f64 {
        if self.is_log() {
            1.0 / x
        } else {
            x.powf(-self.gamma)
        }
    }

    pub(crate) fn curvature_unchecked(&self, x: f64) -> f64 {
        // u''(x) = −γ x^{−γ−1}
        if self.is_log() {
            -1.0 / (x * x)
        } else {
            -self.gamma * x.powf(-self.gamma - 1.0)
        }
    }

    pub(crate) fn inverse_marginal_unchecked(&self, y: f64) -> f64 {
        if self.is_log() {
            1.0 / y
        } else {
            y.powf(-1.0 / self.gamma)
        }
    }
}
