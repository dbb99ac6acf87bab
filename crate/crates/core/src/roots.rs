//! Bracketed scalar root finding.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Absolute tolerance on the abscissa.
    pub xtol: f64,
    /// Absolute tolerance on the residual.
    pub ftol: f64,
    pub max_iter: usize,
}

/// Brent's method on `[a, b]`, which must bracket a sign change.
///
/// `f` may fail; the error is propagated unchanged.
pub fn brent<F>(what: &'static str, mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    brent_with_values(what, &mut f, a, fa, b, fb, tol)
}

pub fn brent_with_values<F>(
    what: &'static str,
    f: &mut F,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    tol: Tolerance,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { what, lo: a, hi: b, f_lo: fa, f_hi: fb });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= tol.ftol {
            return Ok(Root { x: b, fx: fb, iterations: iter });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Err(Error::NonConvergence { what, iterations: tol.max_iter, residual: fb })
}

/// Grows `[lo, hi]` geometrically (both positive) until `f` changes sign.
/// `f` is assumed monotone; the side to grow is chosen from the sign at `lo`
/// and `increasing`.
pub fn expand_positive_bracket<F>(
    what: &'static str,
    f: &mut F,
    start: f64,
    increasing: bool,
    limits: (f64, f64),
) -> Result<(f64, f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let factor = 4.0;
    let mut x = start;
    let fx = f(x)?;
    if fx == 0.0 {
        return Ok((x, fx, x, fx));
    }
    // Root lies above x if the function still has to climb (increasing, fx < 0)
    // or descend (decreasing, fx > 0).
    let go_up = (fx < 0.0) == increasing;
    let (mut prev, mut fprev) = (x, fx);
    loop {
        x = if go_up { x * factor } else { x / factor };
        if x > limits.1 || x < limits.0 {
            let (lo, f_lo, hi, f_hi) = if go_up {
                (start, fx, prev, fprev)
            } else {
                (prev, fprev, start, fx)
            };
            return Err(Error::Bracket { what, lo, hi, f_lo, f_hi });
        }
        let fnew = f(x)?;
        if fnew == 0.0 || fnew.signum() != fprev.signum() {
            return Ok(if go_up {
                (prev, fprev, x, fnew)
            } else {
                (x, fnew, prev, fprev)
            });
        }
        prev = x;
        fprev = fnew;
    }
}

/// Newton's method safeguarded by bisection on a bracket `[lo, hi]` with
/// `f(lo) < 0 < f(hi)` for a strictly increasing `f`. `fdf` returns the
/// value and derivative. Bisection is geometric while the bracket spans
/// more than a factor of four, which suits roots spread over many decades.
pub fn safeguarded_newton<F>(mut fdf: F, mut lo: f64, mut hi: f64, rtol: f64, max_iter: usize) -> Root
where
    F: FnMut(f64) -> (f64, f64),
{
    let mut x = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
    let (mut fx, mut dfx) = fdf(x);
    for iter in 1..=max_iter {
        if fx == 0.0 {
            return Root { x, fx, iterations: iter };
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else if lo > 0.0 && hi > 4.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        (fx, dfx) = fdf(x);
        if step <= rtol * x.abs() || hi - lo <= rtol * x.abs() {
            return Root { x, fx, iterations: iter };
        }
    }
    Root { x, fx, iterations: max_iter }
}
