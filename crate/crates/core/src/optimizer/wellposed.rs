use super::ProblemSpec;
use serde::Serialize;
use std::fmt;

/// Which sufficient condition for a finite optimal value holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WellPosedness {
    /// (i) `ess inf φ_T > 0`; never true for a lognormal density.
    pub spd_bounded_below: bool,
    /// (ii) strongly convex generator and square-integrable benchmark.
    pub strongly_convex_square_integrable: bool,
    /// (iii) strictly convex generator and bounded benchmark.
    pub strictly_convex_bounded: bool,
}

impl WellPosedness {
    pub fn holds(&self) -> bool {
        self.spd_bounded_below || self.strongly_convex_square_integrable || self.strictly_convex_bounded
    }
}

impl fmt::Display for WellPosedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut cases = Vec::new();
        if self.spd_bounded_below {
            cases.push("i");
        }
        if self.strongly_convex_square_integrable {
            cases.push("ii");
        }
        if self.strictly_convex_bounded {
            cases.push("iii");
        }
        if cases.is_empty() {
            write!(
                f,
                "no condition holds (i: lognormal density has ess inf 0; ii: generator not strongly convex \
                 or benchmark not square integrable; iii: generator not strictly convex or benchmark unbounded)"
            )
        } else {
            write!(f, "case {}", cases.join(" and "))
        }
    }
}

pub fn check_wellposedness(spec: &ProblemSpec) -> WellPosedness {
    let generator = &spec.generator;
    let square_integrable = spec
        .benchmark
        .second_moment(&spec.quadrature)
        .map(|m| m.is_finite())
        .unwrap_or(false);
    WellPosedness {
        spd_bounded_below: false,
        strongly_convex_square_integrable: generator.strong_convexity_modulus() > 0.0 && square_integrable,
        strictly_convex_bounded: generator.is_strictly_convex() && spec.benchmark.is_bounded(),
    }
}
