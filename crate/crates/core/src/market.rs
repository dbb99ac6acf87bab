//! Black–Scholes market with a lognormal state-price density.

use crate::error::{invalid, Error, Result};
use crate::normal;
use crate::quadrature::Node;
use crate::quantile::QuantileCurve;
use serde::{Deserialize, Serialize};

/// Geometric Brownian motion stock and a risk-free account.
///
/// The state-price density is `φ_T = exp(−(r + θ²/2)T − θW_T)` with market
/// price of risk `θ = (μ_s − r)/σ_s`, so `ln φ_T ~ N(μ_φ, σ_φ²)` with
/// `μ_φ = −(r + θ²/2)T` and `σ_φ = θ√T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MarketParams", into = "MarketParams")]
pub struct MarketModel {
    rate: f64,
    drift: f64,
    volatility: f64,
    horizon: f64,
    spot: f64,
    theta: f64,
    spd_location: f64,
    spd_scale: f64,
}

/// Raw market parameters as they appear in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    pub r: f64,
    pub mu_s: f64,
    pub sigma_s: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "S0")]
    pub s0: f64,
}

impl TryFrom<MarketParams> for MarketModel {
    type Error = Error;
    fn try_from(p: MarketParams) -> Result<Self> {
        MarketModel::new(p.r, p.mu_s, p.sigma_s, p.horizon, p.s0)
    }
}

impl From<MarketModel> for MarketParams {
    fn from(m: MarketModel) -> Self {
        Self {
            r: m.rate,
            mu_s: m.drift,
            sigma_s: m.volatility,
            horizon: m.horizon,
            s0: m.spot,
        }
    }
}

impl MarketModel {
    pub fn new(rate: f64, drift: f64, volatility: f64, horizon: f64, spot: f64) -> Result<Self> {
        for (name, v) in [("r", rate), ("mu_s", drift), ("sigma_s", volatility), ("T", horizon), ("S0", spot)] {
            if !v.is_finite() {
                return Err(invalid(format!("market parameter {name} is not finite")));
            }
        }
        if volatility <= 0.0 {
            return Err(invalid("stock volatility must be positive"));
        }
        if horizon <= 0.0 {
            return Err(invalid("horizon must be positive"));
        }
        if spot <= 0.0 {
            return Err(invalid("initial stock price must be positive"));
        }
        let theta = (drift - rate) / volatility;
        if theta <= 0.0 {
            return Err(invalid(format!(
                "market price of risk must be positive (mu_s > r), got {theta}"
            )));
        }
        Ok(Self {
            rate,
            drift,
            volatility,
            horizon,
            spot,
            theta,
            spd_location: -(rate + 0.5 * theta * theta) * horizon,
            spd_scale: theta * horizon.sqrt(),
        })
    }

    /// `T = 5, r = 0, μ_s = 0.05, σ_s = 0.1, S₀ = 1`.
    pub fn reference() -> Self {
        Self::new(0.0, 0.05, 0.1, 5.0, 1.0).expect("valid reference market")
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
    pub fn drift(&self) -> f64 {
        self.drift
    }
    pub fn volatility(&self) -> f64 {
        self.volatility
    }
    pub fn horizon(&self) -> f64 {
        self.horizon
    }
    pub fn spot(&self) -> f64 {
        self.spot
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn spd_location(&self) -> f64 {
        self.spd_location
    }
    pub fn spd_scale(&self) -> f64 {
        self.spd_scale
    }

    /// `e^{−rT}`, the price of one unit paid at the horizon.
    pub fn discount(&self) -> f64 {
        (-self.rate * self.horizon).exp()
    }

    pub fn spd_quantile(&self, t: f64) -> Result<f64> {
        let node = Node::from_t(t)?;
        Ok((self.spd_location + self.spd_scale * node.z).exp())
    }

    pub fn spd_cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x <= 0.0 {
            return Err(Error::Domain { what: "state-price density cdf", value: x });
        }
        Ok(normal::cdf((x.ln() - self.spd_location) / self.spd_scale))
    }

    /// `F̆_φ(1 − t)` at a node, without forming `1 − t`.
    pub fn spd_reflected(&self, node: &Node) -> f64 {
        (self.spd_location - self.spd_scale * node.z).exp()
    }

    /// State-price density as a function of the terminal stock price.
    pub fn spd_of_stock(&self, s: f64) -> Result<f64> {
        let w = self.brownian_from_stock(s)?;
        Ok((-(self.rate + 0.5 * self.theta * self.theta) * self.horizon - self.theta * w).exp())
    }

    fn brownian_from_stock(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain { what: "stock price", value: s });
        }
        let drift = (self.drift - 0.5 * self.volatility * self.volatility) * self.horizon;
        Ok(((s / self.spot).ln() - drift) / self.volatility)
    }

    /// Probability level `1 − F_φ(φ_T(s)) = P(S_T ≤ s)` in probit form.
    pub fn stock_level(&self, s: f64) -> Result<Node> {
        let w = self.brownian_from_stock(s)?;
        Ok(Node::from_z(w / self.horizon.sqrt()))
    }

    /// Terminal stock price at physical probability level `node`.
    pub fn stock_quantile(&self, node: &Node) -> f64 {
        let drift = (self.drift - 0.5 * self.volatility * self.volatility) * self.horizon;
        self.spot * (drift + self.volatility * self.horizon.sqrt() * node.z).exp()
    }

    /// The cost-efficient payoff `F̆(1 − F_φ(φ_T))` written as a function of `S_T`.
    pub fn payoff_from_quantile(&self, curve: &QuantileCurve, s: f64) -> Result<f64> {
        let node = self.stock_level(s)?;
        Ok(curve.eval_node(&node))
    }

    /// `q ↦ P(S_T < c)` where `c` solves `Q(S_T < c) = q`.
    pub fn physical_from_pricing_probability(&self, q: f64) -> Result<f64> {
        let node = Node::from_t(q)?;
        Ok(normal::cdf(node.z - self.theta * self.horizon.sqrt()))
    }

    /// Strike `c` with `Q(S_T < c) = q`.
    pub fn pricing_quantile_of_stock(&self, q: f64) -> Result<f64> {
        let node = Node::from_t(q)?;
        let drift = (self.rate - 0.5 * self.volatility * self.volatility) * self.horizon;
        Ok(self.spot * (drift + self.volatility * self.horizon.sqrt() * node.z).exp())
    }
}
