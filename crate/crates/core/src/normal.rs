//! Standard normal distribution helpers.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Φ(z), accurate in both tails.
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Φ̆(p) for p in (0, 1). Two Newton steps on top of `erfc_inv` bring the
/// round trip to a few ulps.
pub fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut z = -SQRT_2 * erfc_inv(2.0 * p);
    // Refine on whichever tail is better conditioned.
    for _ in 0..2 {
        let dens = pdf(z);
        if dens <= 0.0 {
            break;
        }
        let step = if z < 0.0 {
            (cdf(z) - p) / dens
        } else {
            (cdf(-z) - (1.0 - p)) / -dens
        };
        if step.is_finite() {
            z -= step;
        }
    }
    z
}
