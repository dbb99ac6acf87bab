//! Pointwise minimization of the Lagrangian integrand
//! `h_t(y) = −u(y) + μφ(y) + λ y F̆_φ(1−t) − μ φ′(F̆_b(t)) y`.

use crate::bregman::BregmanGenerator;
use crate::preferences::UtilitySpec;
use crate::roots::safeguarded_newton;

const Y_FLOOR: f64 = 1e-12;
const Y_CEILING: f64 = 1e12;
const RTOL: f64 = 1e-14;
const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Argmin {
    Finite(f64),
    /// `∂h/∂y < 0` for every `y` up to the bracket ceiling.
    Unbounded,
}

/// The per-node solve of `∂h_t/∂y = 0`, i.e.
/// `−u′(y) + μφ′(y) = −λξ + μφ′(b)` with `ξ = F̆_φ(1−t)`, `b = F̆_b(t)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PointwiseSolver<'a> {
    pub utility: &'a UtilitySpec,
    pub generator: &'a BregmanGenerator,
    pub lambda: f64,
    pub mu: f64,
}

impl PointwiseSolver<'_> {
    /// `∂h/∂y` and `∂²h/∂y²`.
    #[inline]
    fn slope(&self, y: f64, target: f64) -> (f64, f64) {
        let u = self.utility;
        let g = self.generator;
        let d = -u.marginal_unchecked(y) + self.mu * g.derivative_unchecked(y) - target;
        let dd = -u.curvature_unchecked(y) + self.mu * g.second_derivative_unchecked(y);
        (d, dd)
    }

    /// `spd` is `F̆_φ(1−t)`, `bench_slope` is `φ′(F̆_b(t))`.
    pub fn solve(&self, spd: f64, bench_slope: f64) -> Argmin {
        if self.mu == 0.0 {
            return Argmin::Finite(self.utility.inverse_marginal_unchecked(self.lambda * spd));
        }
        let target = -self.lambda * spd + self.mu * bench_slope;

        // Inada: the slope is negative near zero; push the floor down if the
        // root sits below it.
        let mut lo = Y_FLOOR;
        while self.slope(lo, target).0 >= 0.0 {
            if lo < 1e-290 {
                return Argmin::Finite(lo);
            }
            lo *= 1e-8;
        }
        let mut hi = 1.0f64.max(2.0 * lo);
        loop {
            let (d, _) = self.slope(hi, target);
            if d >= 0.0 {
                break;
            }
            lo = hi;
            hi *= 2.0;
            if hi > Y_CEILING {
                return Argmin::Unbounded;
            }
        }
        let root = safeguarded_newton(|y| self.slope(y, target), lo, hi, RTOL, MAX_ITER);
        Argmin::Finite(root.x)
    }
}
