//! Acceptable strategies and tolerance selection.
//!
//! A tolerance `ε` is chosen as the largest divergence, from the benchmark,
//! among strategies the investor would accept anyway.

use crate::bregman::{bw_divergence, BregmanGenerator, BaseGenerator};
use crate::error::{invalid, Result};
use crate::market::MarketModel;
use crate::quadrature::QuadratureSpec;
use crate::quantile::QuantileCurve;
use serde::{Deserialize, Serialize};

/// Where the digital payoff's step sits on the probability axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DigitalBreakpoint {
    /// `α_c = P(S_T < c)`. The payoff then costs exactly the budget.
    #[default]
    PhysicalProbability,
    /// `α_c = q = Q(S_T < c)`, the convention behind the reference tables.
    PricingProbability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StrategySpec {
    /// Everything in the riskless asset.
    Riskless,
    /// Constant fraction `w` of wealth in the stock, rebalanced continuously.
    ConstantMix { w: f64 },
    /// `w` of the initial budget in the stock, never rebalanced.
    BuyAndHold { w: f64 },
    /// Pays `low` when `S_T < c` and a budget-matching high level otherwise,
    /// with `c` set by `Q(S_T < c) = q`.
    Digital {
        low: f64,
        q: f64,
        #[serde(default)]
        breakpoint: DigitalBreakpoint,
    },
}

impl StrategySpec {
    pub fn constant_mix(w: f64) -> Result<Self> {
        let s = Self::ConstantMix { w };
        s.validate()?;
        Ok(s)
    }

    pub fn buy_and_hold(w: f64) -> Result<Self> {
        let s = Self::BuyAndHold { w };
        s.validate()?;
        Ok(s)
    }

    pub fn digital(low: f64, q: f64, breakpoint: DigitalBreakpoint) -> Result<Self> {
        let s = Self::Digital { low, q, breakpoint };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Riskless => Ok(()),
            Self::ConstantMix { w } | Self::BuyAndHold { w } => {
                if (0.0..=1.0).contains(&w) {
                    Ok(())
                } else {
                    Err(invalid(format!("stock fraction must lie in [0, 1], got {w}")))
                }
            }
            Self::Digital { low, q, .. } => {
                if !(q > 0.0 && q < 1.0) {
                    return Err(invalid(format!("digital probability must lie in (0, 1), got {q}")));
                }
                if !(low >= 0.0 && low.is_finite()) {
                    return Err(invalid(format!("digital low level must be non-negative, got {low}")));
                }
                Ok(())
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Self::Riskless => "riskless".into(),
            Self::ConstantMix { w } => format!("constant-mix {w}"),
            Self::BuyAndHold { w } => format!("buy-and-hold {w}"),
            Self::Digital { low, q, .. } => format!("digital {low}/{q}"),
        }
    }

    /// The quantile curve of the terminal wealth bought with `budget`.
    pub fn quantile(&self, market: &MarketModel, budget: f64) -> Result<QuantileCurve> {
        self.validate()?;
        if !(budget > 0.0 && budget.is_finite()) {
            return Err(invalid(format!("budget must be positive, got {budget}")));
        }
        let r = market.rate();
        let t = market.horizon();
        let sigma = market.volatility();
        let riskless = budget * (r * t).exp();
        match *self {
            Self::Riskless => QuantileCurve::constant(riskless),
            Self::ConstantMix { w } => {
                let growth = (r + (market.drift() - r) * w - 0.5 * w * w * sigma * sigma) * t;
                QuantileCurve::lognormal(budget.ln() + growth, w * sigma * t.sqrt())
            }
            Self::BuyAndHold { w } => {
                let location = (market.drift() - 0.5 * sigma * sigma) * t;
                QuantileCurve::affine_lognormal(w * budget, location, sigma * t.sqrt(), (1.0 - w) * riskless)
            }
            Self::Digital { low, q, breakpoint } => {
                if low >= riskless {
                    return Err(invalid(format!(
                        "digital low level {low} must be below the riskless payoff {riskless}"
                    )));
                }
                let high = (riskless - low * q) / (1.0 - q);
                let alpha = match breakpoint {
                    DigitalBreakpoint::PhysicalProbability => market.physical_from_pricing_probability(q)?,
                    DigitalBreakpoint::PricingProbability => q,
                };
                QuantileCurve::step(vec![low, high], vec![alpha])
            }
        }
    }
}

/// The chosen tolerance and the divergence of each strategy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceSelection {
    pub epsilon: f64,
    pub divergences: Vec<f64>,
}

/// `ε = max_k BW_φ(F̆_k, F̆_b)`.
pub fn select_tolerance(
    strategies: &[QuantileCurve],
    benchmark: &QuantileCurve,
    generator: &BregmanGenerator,
    quad: &QuadratureSpec,
) -> Result<ToleranceSelection> {
    if strategies.is_empty() {
        return Err(invalid("tolerance selection needs at least one strategy"));
    }
    let divergences = strategies
        .iter()
        .map(|s| bw_divergence(s, benchmark, generator, quad))
        .collect::<Result<Vec<_>>>()?;
    let epsilon = divergences.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ToleranceSelection { epsilon, divergences })
}

/// A benchmark with its acceptable strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub benchmark: StrategySpec,
    pub strategies: Vec<StrategySpec>,
}

impl Preset {
    /// Riskless benchmark; conservative strategies.
    pub fn example1() -> Self {
        Self {
            name: "example1".into(),
            benchmark: StrategySpec::Riskless,
            strategies: vec![
                StrategySpec::ConstantMix { w: 0.175 },
                StrategySpec::BuyAndHold { w: 0.15 },
                StrategySpec::Digital {
                    low: 0.9,
                    q: 0.05,
                    breakpoint: DigitalBreakpoint::PricingProbability,
                },
            ],
        }
    }

    /// 80/20 constant-mix benchmark; aggressive strategies.
    pub fn example2() -> Self {
        Self {
            name: "example2".into(),
            benchmark: StrategySpec::ConstantMix { w: 0.8 },
            strategies: vec![
                StrategySpec::ConstantMix { w: 0.75 },
                StrategySpec::BuyAndHold { w: 0.85 },
                StrategySpec::Digital {
                    low: 0.8,
                    q: 0.1,
                    breakpoint: DigitalBreakpoint::PricingProbability,
                },
            ],
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "example1" => Some(Self::example1()),
            "example2" => Some(Self::example2()),
            _ => None,
        }
    }

    pub fn benchmark_curve(&self, market: &MarketModel, budget: f64) -> Result<QuantileCurve> {
        self.benchmark.quantile(market, budget)
    }

    pub fn strategy_curves(&self, market: &MarketModel, budget: f64) -> Result<Vec<QuantileCurve>> {
        self.strategies.iter().map(|s| s.quantile(market, budget)).collect()
    }
}

/// Plain quadratic and entropic generators.
pub fn table1_generators() -> Vec<BregmanGenerator> {
    vec![BregmanGenerator::quadratic(), BregmanGenerator::entropic()]
}

/// Thresholded generators at `α = 1` and `α = 0.95`.
pub fn table2_generators() -> Vec<BregmanGenerator> {
    let mut out = Vec::new();
    for alpha in [1.0, 0.95] {
        for base in [BaseGenerator::Quadratic, BaseGenerator::Entropic] {
            out.push(BregmanGenerator::thresholded(base, alpha).expect("valid threshold"));
        }
    }
    out
}

pub fn table3_generators() -> Vec<BregmanGenerator> {
    let mut out = table1_generators();
    out.extend(table2_generators());
    out
}
