//! Experiment configuration: a TOML file, resolved against presets.

use anyhow::{anyhow, bail, Context, Result};
use bwopt_core::{
    BaseGenerator, BregmanGenerator, DigitalBreakpoint, MarketModel, Preset, QuadratureSpec, QuantileCurve,
    StrategySpec, UtilitySpec,
};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub market: Option<MarketModel>,
    pub utility: Option<UtilityBlock>,
    pub generators: Option<Vec<GeneratorBlock>>,
    pub benchmark: Option<BenchmarkBlock>,
    pub budget: Option<f64>,
    pub tolerance: Option<ToleranceBlock>,
    pub strategies: Option<Vec<StrategySpec>>,
    pub output: Option<OutputBlock>,
    pub quadrature: Option<QuadratureSpec>,
    pub stock_grid: Option<StockGrid>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityBlock {
    pub gammas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorBlock {
    pub kind: BaseGenerator,
    pub alpha: Option<f64>,
    /// Regularization weight ϑ; defaults to 0 for the plain quadratic and
    /// 1e-8 otherwise.
    pub theta: Option<f64>,
}

impl GeneratorBlock {
    pub fn build(&self) -> bwopt_core::Result<BregmanGenerator> {
        let g = match (self.kind, self.alpha) {
            (BaseGenerator::Quadratic, None) => BregmanGenerator::quadratic(),
            (BaseGenerator::Entropic, None) => BregmanGenerator::entropic(),
            (base, Some(a)) => BregmanGenerator::thresholded(base, a)?,
        };
        match self.theta {
            Some(t) => g.with_regularization(t),
            None => Ok(g),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BenchmarkBlock {
    Constant { level: f64 },
    Riskless,
    ConstantMix { w: f64 },
    BuyAndHold { w: f64 },
    Digital {
        low: f64,
        q: f64,
        #[serde(default)]
        breakpoint: DigitalBreakpoint,
    },
}

impl BenchmarkBlock {
    fn curve(&self, market: &MarketModel, budget: f64) -> bwopt_core::Result<QuantileCurve> {
        match *self {
            Self::Constant { level } => QuantileCurve::constant(level),
            Self::Riskless => StrategySpec::Riskless.quantile(market, budget),
            Self::ConstantMix { w } => StrategySpec::ConstantMix { w }.quantile(market, budget),
            Self::BuyAndHold { w } => StrategySpec::BuyAndHold { w }.quantile(market, budget),
            Self::Digital { low, q, breakpoint } => StrategySpec::Digital { low, q, breakpoint }.quantile(market, budget),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ToleranceMode {
    Explicit,
    Select,
    Infinite,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceBlock {
    pub mode: ToleranceMode,
    pub value: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<PathBuf>,
    pub quantile_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StockGrid {
    pub points: usize,
    pub min: f64,
    pub max: f64,
}

impl Default for StockGrid {
    fn default() -> Self {
        Self {
            points: 400,
            min: 0.05,
            max: 2.5,
        }
    }
}

impl StockGrid {
    pub fn levels(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| self.min + (self.max - self.min) * k as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Explicit(f64),
    Select,
    Infinite,
}

/// A fully resolved experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub market: MarketModel,
    pub gammas: Vec<f64>,
    pub generators: Vec<BregmanGenerator>,
    pub benchmark: QuantileCurve,
    pub budget: f64,
    pub tolerance: Tolerance,
    pub strategies: Vec<StrategySpec>,
    pub out: PathBuf,
    pub quadrature: QuadratureSpec,
    pub stock_grid: StockGrid,
    pub quantile_points: usize,
}

impl Experiment {
    pub fn strategy_curves(&self) -> bwopt_core::Result<Vec<QuantileCurve>> {
        self.strategies.iter().map(|s| s.quantile(&self.market, self.budget)).collect()
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub quad_panels: Option<usize>,
    pub grid: Option<usize>,
}

pub fn load(path: Option<&Path>) -> Result<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        bail!("{name} must be finite, got {v}")
    }
}

pub fn resolve(file: ConfigFile, overrides: &Overrides) -> Result<Experiment> {
    let preset = match &file.preset {
        Some(name) => Some(Preset::by_name(name).ok_or_else(|| anyhow!("unknown preset `{name}`"))?),
        None => None,
    };
    let market = file.market.unwrap_or_else(MarketModel::reference);
    let budget = finite("budget", file.budget.unwrap_or(1.0))?;
    if budget <= 0.0 {
        bail!("budget must be positive, got {budget}");
    }

    let gammas = file.utility.map(|u| u.gammas).unwrap_or_else(|| vec![1.0]);
    if gammas.is_empty() {
        bail!("utility.gammas must not be empty");
    }
    for &g in &gammas {
        UtilitySpec::crra(finite("gamma", g)?).map_err(|e| anyhow!("utility: {e}"))?;
    }

    let generators = match file.generators {
        Some(list) => list
            .iter()
            .map(|g| g.build().map_err(|e| anyhow!("generator: {e}")))
            .collect::<Result<Vec<_>>>()?,
        None => bwopt_core::strategies::table1_generators(),
    };
    if generators.is_empty() {
        bail!("at least one generator is required");
    }

    let benchmark = match (file.benchmark, &preset) {
        (Some(b), _) => b.curve(&market, budget),
        (None, Some(p)) => p.benchmark_curve(&market, budget),
        (None, None) => StrategySpec::Riskless.quantile(&market, budget),
    }
    .map_err(|e| anyhow!("benchmark: {e}"))?;

    let strategies = match (file.strategies, &preset) {
        (Some(s), _) => s,
        (None, Some(p)) => p.strategies.clone(),
        (None, None) => Preset::example1().strategies,
    };
    for s in &strategies {
        s.quantile(&market, budget).map_err(|e| anyhow!("strategy {}: {e}", s.label()))?;
    }

    let tolerance = match file.tolerance {
        None => Tolerance::Select,
        Some(ToleranceBlock { mode: ToleranceMode::Explicit, value: Some(v) }) => {
            if finite("tolerance.value", v)? <= 0.0 {
                bail!("tolerance.value must be positive, got {v}");
            }
            Tolerance::Explicit(v)
        }
        Some(ToleranceBlock { mode: ToleranceMode::Explicit, value: None }) => {
            bail!("tolerance mode `explicit` needs a value")
        }
        Some(ToleranceBlock { mode: ToleranceMode::Select, .. }) => Tolerance::Select,
        Some(ToleranceBlock { mode: ToleranceMode::Infinite, .. }) => Tolerance::Infinite,
    };
    if tolerance == Tolerance::Select && strategies.is_empty() {
        bail!("tolerance mode `select` needs at least one strategy");
    }

    let mut quadrature = file.quadrature.unwrap_or_default();
    if let Some(p) = overrides.quad_panels {
        quadrature.panels = p;
    }
    quadrature.validate().map_err(|e| anyhow!("quadrature: {e}"))?;

    let mut stock_grid = file.stock_grid.unwrap_or_default();
    if let Some(n) = overrides.grid {
        stock_grid.points = n;
    }
    if stock_grid.points < 2 || !(stock_grid.min > 0.0 && stock_grid.max > stock_grid.min) || !stock_grid.max.is_finite() {
        bail!("stock_grid needs at least 2 points and 0 < min < max");
    }

    let (dir, quantile_points) = match file.output {
        Some(o) => (o.dir, o.quantile_points.unwrap_or(1000)),
        None => (None, 1000),
    };
    if quantile_points < 2 {
        bail!("output.quantile_points must be at least 2");
    }
    let out = overrides.out.clone().or(dir).unwrap_or_else(|| PathBuf::from("out"));

    Ok(Experiment {
        market,
        gammas,
        generators,
        benchmark,
        budget,
        tolerance,
        strategies,
        out,
        quadrature,
        stock_grid,
        quantile_points,
    })
}

/// Creates the output directory and checks it accepts files.
pub fn prepare_output(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let probe = dir.join(".write-test");
    std::fs::write(&probe, b"").with_context(|| format!("{} is not writable", dir.display()))?;
    std::fs::remove_file(&probe).ok();
    Ok(())
}
