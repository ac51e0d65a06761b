//! Inverse-CDF root finding.

use crate::error::{Error, Result};

/// Tolerance on `|F(x) - u|`.
pub const CDF_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 200;

/// Solve `F(x) = u` on `[lo, hi]` for nondecreasing `F`.
///
/// Regula falsi with the Illinois modification, falling back to a bisection
/// step whenever the bracket fails to halve. Returns as soon as
/// `|F(x) - u| <= 1e-10` or the bracket collapses to adjacent floats.
///
/// ```
/// use contdpp::numerics::{invert_monotone_cdf, norm_cdf};
/// let x = invert_monotone_cdf(norm_cdf, -10.0, 10.0, 0.975).unwrap();
/// assert!((x - 1.959964).abs() < 1e-5);
/// ```
pub fn invert_monotone_cdf<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, u: f64) -> Result<f64> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("bad bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a) - u;
    let mut fb = f(b) - u;
    if fa > 0.0 || fb < 0.0 {
        return Err(Error::Bracket { f_lo: fa + u, f_hi: fb + u, target: u });
    }
    if fa.abs() <= CDF_TOL && fa.abs() <= fb.abs() {
        return Ok(a);
    }
    if fb.abs() <= CDF_TOL {
        return Ok(b);
    }
    // side of the last update: -1 = a moved, +1 = b moved
    let mut side = 0i8;
    let mut width = b - a;
    let mut best = (f64::INFINITY, a);
    for it in 0..MAX_ITER {
        let mut x = if fb != fa { (a * fb - b * fa) / (fb - fa) } else { 0.5 * (a + b) };
        // bisect every third step unless the bracket is shrinking fast
        if !(x > a && x < b) || (it % 3 == 2 && b - a > 0.5 * width) {
            x = 0.5 * (a + b);
        }
        if it % 3 == 2 {
            width = b - a;
        }
        let fx = f(x) - u;
        if fx.abs() < best.0 {
            best = (fx.abs(), x);
        }
        if fx.abs() <= CDF_TOL {
            return Ok(x);
        }
        if fx < 0.0 {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // no float strictly between: F jumps across u (flat density gap)
            return Ok(best.1);
        }
    }
    Err(Error::RootNotFound { iterations: MAX_ITER, residual: best.0 })
}
