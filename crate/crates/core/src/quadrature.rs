//! Composite Gauss–Legendre quadrature over the open unit interval.
//!
//! Integrals of the form `∫₀¹ f(t) dt` are taken in the probit coordinate
//! `z = Φ̆(t)`, so that `dt = ϕ(z) dz`. Panels are uniform in `z` on
//! `[Φ̆(δ), Φ̆(1−δ)]`, which concentrates nodes where lognormal quantile
//! curves bend. Each clipped tail of mass `δ` is covered by a single node
//! at its conditional median, so the weights sum to one.
//!
//! Jump points of piecewise curves are passed as breakpoints and become
//! panel edges; Gauss–Legendre then integrates each smooth piece.

use crate::error::{invalid, Error, Result};
use crate::normal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub nodes_per_panel: usize,
    /// Endpoint clip δ in (0, 0.01). Each tail `(0, δ)`, `(1−δ, 1)` gets a
    /// single node; the state-price density is heavy enough in its upper
    /// tail that δ has to be tiny for 1e-12 accuracy.
    pub clip: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels: 256,
            nodes_per_panel: 4,
            clip: 1e-15,
        }
    }
}

impl QuadratureSpec {
    pub fn new(panels: usize, nodes_per_panel: usize, clip: f64) -> Result<Self> {
        let spec = Self {
            panels,
            nodes_per_panel,
            clip,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.clip > 0.0 && self.clip < 0.01) {
            return Err(invalid(format!("quadrature clip {} not in (0, 0.01)", self.clip)));
        }
        if self.panels == 0 || self.nodes_per_panel == 0 {
            return Err(invalid("quadrature needs at least one panel and one node"));
        }
        if self.panels * self.nodes_per_panel < 64 {
            return Err(invalid(format!(
                "quadrature has {} nodes, at least 64 required",
                self.panels * self.nodes_per_panel
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::build(self, &[])
    }

    pub fn grid_with_breakpoints(&self, breakpoints: &[f64]) -> Result<Grid> {
        Grid::build(self, breakpoints)
    }
}

/// A probability level carried in three coordinates: `t`, `1 − t` and
/// `z = Φ̆(t)`. Keeping `tc` and `z` avoids losing precision near the
/// endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub t: f64,
    pub tc: f64,
    pub z: f64,
}

impl Node {
    pub fn from_z(z: f64) -> Self {
        Self {
            t: normal::cdf(z),
            tc: normal::cdf(-z),
            z,
        }
    }

    pub fn from_t(t: f64) -> Result<Self> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Domain {
                what: "probability level",
                value: t,
            });
        }
        Ok(Self {
            t,
            tc: 1.0 - t,
            z: normal::quantile(t),
        })
    }

    /// The node at probability `1 − t`.
    pub fn reflect(&self) -> Self {
        Self {
            t: self.tc,
            tc: self.t,
            z: -self.z,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Grid {
    nodes: Vec<Node>,
    weights: Vec<f64>,
    tail_mass: f64,
}

impl Grid {
    fn build(spec: &QuadratureSpec, breakpoints: &[f64]) -> Result<Self> {
        spec.validate()?;
        let z_hi = -normal::quantile(spec.clip);
        let z_lo = -z_hi;
        let h = (z_hi - z_lo) / spec.panels as f64;

        let mut edges: Vec<f64> = (0..=spec.panels).map(|k| z_lo + h * k as f64).collect();
        for &b in breakpoints {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::Domain {
                    what: "quadrature breakpoint",
                    value: b,
                });
            }
            let zb = normal::quantile(b);
            if zb > z_lo && zb < z_hi {
                edges.push(zb);
            }
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let (abscissae, gl_weights) = gauss_legendre(spec.nodes_per_panel);
        let mut nodes = Vec::with_capacity(edges.len() * spec.nodes_per_panel + 2);
        let mut weights = Vec::with_capacity(nodes.capacity());

        let lower_tail = Node::from_z(normal::quantile(0.5 * spec.clip));
        nodes.push(lower_tail);
        weights.push(spec.clip);
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in abscissae.iter().zip(&gl_weights) {
                let z = mid + half * x;
                nodes.push(Node::from_z(z));
                weights.push(half * w * normal::pdf(z));
            }
        }
        nodes.push(lower_tail.reflect());
        weights.push(spec.clip);

        Ok(Self {
            nodes,
            weights,
            tail_mass: 2.0 * spec.clip,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Probability mass covered by the one-point tail rules rather than by
    /// Gauss–Legendre panels.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `∫₀¹ f(t) dt`, failing on the first non-finite integrand value.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&Node) -> Result<f64>,
    {
        let mut acc = 0.0;
        for (node, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(node)?;
            if !v.is_finite() {
                return Err(Error::Integration { t: node.t, value: v });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Weighted sum of integrand values already evaluated on `nodes()`.
    pub fn integrate_values(&self, values: &[f64]) -> Result<f64> {
        debug_assert_eq!(values.len(), self.nodes.len());
        let mut acc = 0.0;
        for ((node, w), v) in self.nodes.iter().zip(&self.weights).zip(values) {
            if !v.is_finite() {
                return Err(Error::Integration { t: node.t, value: *v });
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

/// Gauss–Legendre abscissae and weights on [-1, 1], by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut root = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre(n, root);
            deriv = dp;
            let step = p / dp;
            root -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, root);
        if dp != 0.0 {
            deriv = dp;
        }
        let weight = 2.0 / ((1.0 - root * root) * deriv * deriv);
        x[i] = -root;
        x[n - 1 - i] = root;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    (x, w)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
