//! Faddeeva function `w(z) = exp(-z^2) erfc(-iz)` and the complex error
//! function built on it.
//!
//! Upper half plane: Laplace continued fraction for large |z|, otherwise the
//! exponentially convergent sums of Zaghloul & Ali (ACM TOMS 916). The lower
//! half plane follows from `w(z) = 2 exp(-z^2) - w(-z)`.

use super::special::erfcx;
use crate::error::{Error, Result};
use num_complex::Complex64;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
// a = pi / sqrt(-ln(eps/2)), c = 2a/pi
const A: f64 = 0.518_321_480_430_085_9;
const A2: f64 = 0.268_657_157_075_235_94;
const CC: f64 = 0.329_973_702_884_629_07;

#[inline]
fn sinc(x: f64, sinx: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - 0.166_666_666_666_666_66 * x * x
    } else {
        sinx / x
    }
}

#[inline]
fn sinh_taylor(x: f64) -> f64 {
    x * (1.0 + (x * x) * (0.166_666_666_666_666_66 + 0.008_333_333_333_333_333 * (x * x)))
}

/// Continued fraction, valid for `im >= 0` and |z| not small.
fn w_continued_fraction(xs: f64, y: f64) -> Complex64 {
    let x = xs.abs();
    if x + y > 1e7 {
        // w ~ i / (sqrt(pi) z), scaled to avoid overflow
        if x > y {
            let yax = y / xs;
            let denom = FRAC_1_SQRT_PI / (xs + yax * y);
            Complex64::new(denom * yax, denom)
        } else {
            let xya = xs / y;
            let denom = FRAC_1_SQRT_PI / (xya * xs + y);
            Complex64::new(denom, denom * xya)
        }
    } else if x + y > 4000.0 {
        // w ~ i z / (sqrt(pi) (z^2 - 1/2))
        let dr = xs * xs - y * y - 0.5;
        let di = 2.0 * xs * y;
        let denom = FRAC_1_SQRT_PI / (dr * dr + di * di);
        Complex64::new(denom * (xs * di - y * dr), denom * (xs * dr + y * di))
    } else {
        let nu = (3.9 + 11.398 / (0.08254 * x + 0.1421 * y + 0.2023)).floor();
        let mut wr = xs;
        let mut wi = y;
        let mut nu = 0.5 * (nu - 1.0);
        while nu > 0.4 {
            let denom = nu / (wr * wr + wi * wi);
            wr = xs - wr * denom;
            wi = y + wi * denom;
            nu -= 0.5;
        }
        let denom = FRAC_1_SQRT_PI / (wr * wr + wi * wi);
        Complex64::new(denom * wi, denom * wr)
    }
}

/// Series of algorithm 916 for `0 <= x < 10`, `y >= 0`.
fn w_series(xs: f64, y: f64) -> Complex64 {
    let x = xs.abs();
    let mut sum1 = 0.0;
    let mut sum2 = 0.0;
    let mut sum3 = 0.0;
    let mut sum4 = 0.0;
    let mut sum5 = 0.0;
    let mut prod2ax = 1.0;
    let mut prodm2ax = 1.0;
    let exp2ax = (2.0 * A * x).exp();
    let expm2ax = 1.0 / exp2ax;
    let expx2;
    if x < 5e-4 {
        let x2 = x * x;
        expx2 = 1.0 - x2 * (1.0 - 0.5 * x2);
        let mut n = 1.0f64;
        loop {
            let coef = (-A2 * n * n).exp() * expx2 / (A2 * n * n + y * y);
            prod2ax *= exp2ax;
            prodm2ax *= expm2ax;
            sum1 += coef;
            sum2 += coef * prodm2ax;
            sum3 += coef * prod2ax;
            // accumulates sum5 - sum4 directly
            sum5 += coef * (2.0 * A) * n * sinh_taylor((2.0 * A) * n * x);
            if coef * prod2ax < f64::EPSILON * sum3 {
                break;
            }
            n += 1.0;
        }
    } else {
        expx2 = (-x * x).exp();
        let mut n = 1.0f64;
        loop {
            let coef = (-A2 * n * n).exp() * expx2 / (A2 * n * n + y * y);
            prod2ax *= exp2ax;
            prodm2ax *= expm2ax;
            sum1 += coef;
            sum2 += coef * prodm2ax;
            sum4 += coef * prodm2ax * (A * n);
            sum3 += coef * prod2ax;
            sum5 += coef * prod2ax * (A * n);
            if coef * prod2ax * (A * n) < f64::EPSILON * sum5 {
                break;
            }
            n += 1.0;
        }
    }
    let expx2erfcxy = expx2 * erfcx(y);
    let ret = if y > 5.0 {
        let sinxy = (x * y).sin();
        Complex64::new(
            (expx2erfcxy - CC * y * sum1) * (2.0 * x * y).cos()
                + (CC * x * expx2) * sinxy * sinc(x * y, sinxy),
            0.0,
        )
    } else {
        let sinxy = (xs * y).sin();
        let sin2xy = (2.0 * xs * y).sin();
        let cos2xy = (2.0 * xs * y).cos();
        let coef1 = expx2erfcxy - CC * y * sum1;
        let coef2 = CC * xs * expx2;
        Complex64::new(
            coef1 * cos2xy + coef2 * sinxy * sinc(xs * y, sinxy),
            coef2 * sinc(2.0 * xs * y, sin2xy) - coef1 * sin2xy,
        )
    };
    ret + Complex64::new(
        0.5 * CC * y * (sum2 + sum3),
        0.5 * CC * (sum5 - sum4).copysign(xs),
    )
}

/// Faddeeva function `w(z) = exp(-z^2) erfc(-iz)`.
///
/// Accurate to roughly machine precision in the upper half plane; in the
/// lower half plane the result grows like `exp(y^2 - x^2)` and overflows
/// once that does.
pub fn faddeeva(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        let e = Complex64::new((z.im - z.re) * (z.im + z.re), -2.0 * z.re * z.im).exp();
        return 2.0 * e - faddeeva(-z);
    }
    let x = z.re.abs();
    let y = z.im;
    if z.re == 0.0 {
        return Complex64::new(erfcx(y), 0.0);
    }
    if y > 7.0 || (x > 6.0 && y > 0.1) || x > 8.0 {
        w_continued_fraction(z.re, y)
    } else {
        w_series(z.re, y)
    }
}

/// Largest |Im z| accepted by [`erf_complex`].
pub const ERF_COMPLEX_MAX_IM: f64 = 30.0;

/// Complex error function.
///
/// Fails with [`Error::Domain`] when `|Im z| > 30`, where `erf` grows like
/// `exp(Im(z)^2)` and the relative accuracy contract no longer holds.
///
/// ```
/// use num_complex::Complex64;
/// let v = contdpp::numerics::erf_complex(Complex64::new(0.0, 1.0)).unwrap();
/// assert!((v.im - 1.6504257587975428).abs() < 1e-14);
/// ```
pub fn erf_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("erf of non-finite argument {z}")));
    }
    if z.im.abs() > ERF_COMPLEX_MAX_IM {
        return Err(Error::Domain(format!(
            "erf_complex requires |Im z| <= {ERF_COMPLEX_MAX_IM}, got {}",
            z.im
        )));
    }
    if z.im == 0.0 {
        return Ok(Complex64::new(super::special::erf(z.re), 0.0));
    }
    if z.norm() < 1.0 {
        // Maclaurin series, converges fast in the unit disc
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        for n in 1..60 {
            let nf = n as f64;
            term = -term * z2 / nf;
            let add = term / (2.0 * nf + 1.0);
            sum += add;
            if add.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        return Ok(sum * (2.0 * FRAC_1_SQRT_PI));
    }
    let (zz, sign) = if z.re >= 0.0 { (z, 1.0) } else { (-z, -1.0) };
    // erfc(z) = exp(-z^2) w(iz); Im(iz) = Re z >= 0 keeps w in its stable half
    let erfc = (-zz * zz).exp() * faddeeva(Complex64::new(-zz.im, zz.re));
    Ok(sign * (1.0 - erfc))
}
