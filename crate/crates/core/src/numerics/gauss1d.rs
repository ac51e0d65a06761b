//! One-dimensional integrals of `exp(c - p s^2 / 2 + b s)` and of polynomials
//! against the same weight, in closed form through `erfcx` and the Faddeeva
//! function.

use super::faddeeva::faddeeva;
use super::special::erfcx;
use num_complex::Complex64;
use std::f64::consts::PI;

#[inline]
fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

// (e^z - 1)/z
fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 2..9 {
            term = term * z / n as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `exp(c) ∫_lo^hi exp(-p s²/2 + b s) ds` for real `c`, `b` and `p > 0`.
/// Infinite limits are allowed.
pub fn gauss_integral_real(c: f64, p: f64, b: f64, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    if p == 0.0 {
        return flat_integral(Complex64::new(c, 0.0), Complex64::new(b, 0.0), lo, hi).re;
    }
    let mu = b / p;
    let r = (0.5 * p).sqrt();
    let pre = (PI / (2.0 * p)).sqrt();
    // lower tail ∫_{-inf}^t, stable for t <= mu
    let lower = |t: f64| -> f64 {
        if t == f64::NEG_INFINITY {
            0.0
        } else {
            pre * (c - 0.5 * p * t * t + b * t).exp() * erfcx(-r * (t - mu))
        }
    };
    // upper tail ∫_t^{inf}, stable for t >= mu
    let upper = |t: f64| -> f64 {
        if t == f64::INFINITY {
            0.0
        } else {
            pre * (c - 0.5 * p * t * t + b * t).exp() * erfcx(r * (t - mu))
        }
    };
    if hi <= mu {
        lower(hi) - lower(lo)
    } else if lo >= mu {
        upper(lo) - upper(hi)
    } else {
        let total = 2.0 * pre * (c + 0.5 * b * mu).exp();
        total - lower(lo) - upper(hi)
    }
}

/// `∫_lo^hi exp(c + b s) ds` on a finite interval.
pub fn flat_integral(c: Complex64, b: Complex64, lo: f64, hi: f64) -> Complex64 {
    let w = hi - lo;
    if !(w > 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    if b.re > 0.0 {
        (c + b * hi).exp() * w * exprel(-b * w)
    } else {
        (c + b * lo).exp() * w * exprel(b * w)
    }
}

/// `exp(c) ∫_lo^hi exp(-p s²/2 + b s) ds` for complex `c`, `b` and `p >= 0`
/// (`p = 0` needs finite limits).
pub fn gauss_integral(c: Complex64, p: f64, b: Complex64, lo: f64, hi: f64) -> Complex64 {
    if !(hi > lo) {
        return Complex64::new(0.0, 0.0);
    }
    if p == 0.0 {
        return flat_integral(c, b, lo, hi);
    }
    if b.im == 0.0 {
        return gauss_integral_real(c.re, p, b.re, lo, hi) * cis(c.im);
    }
    let mu = b / p;
    let r = (0.5 * p).sqrt();
    let pre = (PI / (2.0 * p)).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let lower = |t: f64| -> Complex64 {
        if t == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            let u = r * (t - mu);
            pre * (c - 0.5 * p * t * t + b * t).exp() * faddeeva(-i * u)
        }
    };
    let upper = |t: f64| -> Complex64 {
        if t == f64::INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            let u = r * (t - mu);
            pre * (c - 0.5 * p * t * t + b * t).exp() * faddeeva(i * u)
        }
    };
    if hi <= mu.re {
        lower(hi) - lower(lo)
    } else if lo >= mu.re {
        upper(lo) - upper(hi)
    } else {
        let total = 2.0 * pre * (c + 0.5 * b * mu).exp();
        total - lower(lo) - upper(hi)
    }
}

/// Upper bound on `ln |exp(c) ∫_lo^hi exp(-p s²/2 + b s) ds|` using only
/// the real parts of `c` and `b`.
pub fn log_magnitude_bound(c_re: f64, p: f64, b_re: f64, lo: f64, hi: f64) -> f64 {
    if p > 0.0 {
        let mu = b_re / p;
        // peak of the envelope over [lo, hi]
        let t = mu.clamp(lo, hi);
        let peak = c_re - 0.5 * p * t * t + b_re * t;
        peak + (2.0 * PI / p).sqrt().min(hi - lo).ln()
    } else {
        c_re + (b_re * lo).max(b_re * hi) + (hi - lo).ln()
    }
}

/// Moments `M_m = exp(c) ∫_lo^hi s^m exp(-p s²/2 + b s) ds` for
/// `m = 0..=max_m`, real parameters. With `p = 0` only `b = 0` on a finite
/// interval is supported.
pub fn poly_moments(c: f64, p: f64, b: f64, lo: f64, hi: f64, max_m: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_m + 1];
    if !(hi > lo) {
        return out;
    }
    if p == 0.0 {
        assert!(b == 0.0 && lo.is_finite() && hi.is_finite(), "flat moments need b = 0 on a finite interval");
        let ec = c.exp();
        for (m, o) in out.iter_mut().enumerate() {
            let k = (m + 1) as i32;
            *o = ec * (hi.powi(k) - lo.powi(k)) / k as f64;
        }
        return out;
    }
    let mu = b / p;
    let a = lo - mu;
    let bb = hi - mu;
    // boundary weights e^{-p u²/2}, zero at infinite endpoints
    let ea = if a.is_finite() { (-0.5 * p * a * a).exp() } else { 0.0 };
    let eb = if bb.is_finite() { (-0.5 * p * bb * bb).exp() } else { 0.0 };
    let mut j = vec![0.0; max_m + 1];
    j[0] = gauss_integral_real(0.0, p, 0.0, a, bb);
    if max_m >= 1 {
        j[1] = (ea - eb) / p;
    }
    // u^{n-1} at the endpoints, zero where the weight is zero
    let mut apow = 1.0;
    let mut bpow = 1.0;
    for n in 2..=max_m {
        apow = if ea > 0.0 { apow * a } else { 0.0 };
        bpow = if eb > 0.0 { bpow * bb } else { 0.0 };
        j[n] = (apow * ea - bpow * eb) / p + (n - 1) as f64 / p * j[n - 2];
    }
    let scale = (c + 0.5 * b * mu).exp();
    for m in 0..=max_m {
        let mut s = 0.0;
        let mut binom = 1.0;
        for jj in 0..=m {
            s += binom * mu.powi((m - jj) as i32) * j[jj];
            binom = binom * (m - jj) as f64 / (jj + 1) as f64;
        }
        out[m] = scale * s;
    }
    out
}
