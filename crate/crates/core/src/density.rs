//! Unnormalized densities that are signed sums of Gaussian-exponential
//! terms `c · exp(lc - x^T P x / 2 + h^T x)` (complex `c`, `h`) plus an
//! optional `polynomial × diagonal Gaussian` part, on R^d or on a box.
//!
//! Every sampling density in the crate has this shape (Phase-2 densities of
//! both feature maps, the Schur-complement Gibbs conditional, the tilted
//! mixture conditional). The density is always read as the real part of the
//! sum; callers listing Hermitian pairs once must double the off-diagonal
//! coefficients.
//!
//! Sampling is sequential: axis `l` is drawn from its conditional given axes
//! `0..l`, with axes `l+1..d` integrated out in closed form (Schur
//! complements on R^d, per-axis erf integrals on a box).

use crate::error::{Error, Result};
use crate::kernel::Domain;
use crate::numerics::gauss1d::{gauss_integral, log_magnitude_bound, poly_moments};
use crate::numerics::linalg::{cholesky, ln_det_spd};
use crate::numerics::{invert_monotone_cdf, RngStream};
use crate::poly::Poly;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Terms whose magnitude bound falls this far (in log units) below the
/// largest one are dropped from axis conditionals.
const PRUNE_LOG: f64 = 46.0;
/// Mass allowed outside the sampling bracket on unbounded axes.
const OUTSIDE_MASS: f64 = 1e-12;

#[derive(Clone, Debug)]
struct AxisSchur {
    // Schur complement of P_RR in P restricted to rows/cols 0..=l
    s: DMatrix<f64>,
    // P_{0..=l, R} P_RR^{-1}
    g: DMatrix<f64>,
    prr_inv: DMatrix<f64>,
    // ln ∫ exp(-y^T P_RR y / 2) dy
    log_norm: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Precision {
    p: DMatrix<f64>,
    diag: Option<Vec<f64>>,
    schur: Vec<AxisSchur>,
}

#[derive(Clone, Debug)]
pub(crate) struct GaussTerm {
    pub coef: Complex64,
    pub lc: f64,
    pub prec: usize,
    pub h: Vec<Complex64>,
}

/// `exp(lc - Σ p_m x_m²/2 + Σ h_m x_m) · poly(x)`.
#[derive(Clone, Debug)]
pub(crate) struct PolyPart {
    pub poly: Poly,
    pub lc: f64,
    pub p: Vec<f64>,
    pub h: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct TermDensity {
    dim: usize,
    domain: Domain,
    precisions: Vec<Precision>,
    terms: Vec<GaussTerm>,
    poly: Option<PolyPart>,
}

fn is_diag(m: &DMatrix<f64>) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == 0.0))
}

impl TermDensity {
    pub(crate) fn new(dim: usize, domain: Domain) -> Self {
        TermDensity { dim, domain, precisions: vec![], terms: vec![], poly: None }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len() + usize::from(self.poly.is_some())
    }

    pub(crate) fn add_precision(&mut self, p: DMatrix<f64>) -> Result<usize> {
        let d = self.dim;
        if p.nrows() != d || p.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.nrows() });
        }
        if let Some(i) = self.precisions.iter().position(|q| q.p == p) {
            return Ok(i);
        }
        let diag = is_diag(&p).then(|| p.diagonal().iter().copied().collect::<Vec<f64>>());
        let mut schur = vec![];
        match &self.domain {
            Domain::Box { .. } => {
                let dg = diag.as_ref().ok_or_else(|| {
                    Error::Unsupported("box domains need axis-aligned (diagonal) covariances".into())
                })?;
                if dg.iter().any(|v| !(*v >= 0.0)) {
                    return Err(Error::InvalidParameter("negative precision".into()));
                }
            }
            Domain::Full => {
                cholesky(&p, "term precision")?;
                for l in 0..d {
                    let r = d - l - 1;
                    let pff = p.view((0, 0), (l + 1, l + 1)).into_owned();
                    if r == 0 {
                        schur.push(AxisSchur {
                            s: pff,
                            g: DMatrix::zeros(l + 1, 0),
                            prr_inv: DMatrix::zeros(0, 0),
                            log_norm: 0.0,
                        });
                        continue;
                    }
                    let prr = p.view((l + 1, l + 1), (r, r)).into_owned();
                    let pfr = p.view((0, l + 1), (l + 1, r)).into_owned();
                    let prr_inv = cholesky(&prr, "term precision block")?.inverse();
                    let g = &pfr * &prr_inv;
                    let s = pff - &g * pfr.transpose();
                    let log_norm = 0.5 * r as f64 * (2.0 * std::f64::consts::PI).ln() - 0.5 * ln_det_spd(&prr);
                    schur.push(AxisSchur { s, g, prr_inv, log_norm });
                }
            }
        }
        self.precisions.push(Precision { p, diag, schur });
        Ok(self.precisions.len() - 1)
    }

    pub(crate) fn push(&mut self, t: GaussTerm) {
        if t.coef != Complex64::new(0.0, 0.0) && t.lc > f64::NEG_INFINITY {
            self.terms.push(t);
        }
    }

    pub(crate) fn set_poly(&mut self, part: PolyPart) -> Result<()> {
        if part.p.len() != self.dim || part.h.len() != self.dim || part.poly.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: part.p.len() });
        }
        for (m, &pm) in part.p.iter().enumerate() {
            let (lo, hi) = self.domain.bounds(m);
            let finite = lo.is_finite() && hi.is_finite();
            if pm < 0.0 || (pm == 0.0 && !(finite && part.h[m] == 0.0)) {
                return Err(Error::Unsupported("polynomial terms need a Gaussian weight on unbounded axes".into()));
            }
        }
        self.poly = Some(part);
        Ok(())
    }

    /// Multiply every term by `exp(lc - x^T P x / 2 + h^T x)`.
    pub(crate) fn tilt(&self, p_add: &DMatrix<f64>, h_add: &[f64], lc_add: f64) -> Result<TermDensity> {
        let mut out = TermDensity::new(self.dim, self.domain.clone());
        for t in &self.terms {
            let p = &self.precisions[t.prec].p + p_add;
            let prec = out.add_precision(p)?;
            out.push(GaussTerm {
                coef: t.coef,
                lc: t.lc + lc_add,
                prec,
                h: t.h.iter().zip(h_add).map(|(a, b)| a + b).collect(),
            });
        }
        if let Some(pp) = &self.poly {
            if !is_diag(p_add) {
                return Err(Error::Unsupported("non-diagonal tilt of a polynomial density".into()));
            }
            out.set_poly(PolyPart {
                poly: pp.poly.clone(),
                lc: pp.lc + lc_add,
                p: pp.p.iter().enumerate().map(|(i, v)| v + p_add[(i, i)]).collect(),
                h: pp.h.iter().zip(h_add).map(|(a, b)| a + b).collect(),
            })?;
        }
        Ok(out)
    }

    /// Unnormalized density at `x` (zero outside a box domain).
    pub fn value(&self, x: &[f64]) -> f64 {
        self.value_and_scale(x).0
    }

    /// Density and the sum of term magnitudes at `x`.
    pub fn value_and_scale(&self, x: &[f64]) -> (f64, f64) {
        if !self.domain.contains(x) {
            return (0.0, 0.0);
        }
        let xv = DVector::from_column_slice(x);
        let quad: Vec<f64> = self.precisions.iter().map(|p| xv.dot(&(&p.p * &xv))).collect();
        let mut v = 0.0;
        let mut a = 0.0;
        for t in &self.terms {
            let lin: Complex64 = t.h.iter().zip(x).map(|(h, xi)| h * xi).sum();
            let z = t.coef * (Complex64::new(t.lc - 0.5 * quad[t.prec], 0.0) + lin).exp();
            v += z.re;
            a += z.norm();
        }
        if let Some(pp) = &self.poly {
            let e: f64 = pp.lc + x.iter().enumerate().map(|(m, &xm)| -0.5 * pp.p[m] * xm * xm + pp.h[m] * xm).sum::<f64>();
            let w = e.exp();
            let pv = pp.poly.eval(x);
            v += w * pv;
            a += w * pp.poly.terms().map(|(ex, c)| (c * ex.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>()).abs()).sum::<f64>();
        }
        (v, a)
    }

    /// Conditional of axis `axis` given `prefix` (values of axes `0..axis`),
    /// with later axes integrated out.
    pub fn axis_conditional(&self, axis: usize, prefix: &[f64]) -> Result<AxisConditional> {
        let (raw, poly) = self.raw_conditional(axis, prefix)?;
        let (lo, hi) = self.domain.bounds(axis);
        AxisConditional::assemble(raw, poly, lo, hi)
    }

    /// Complex integral of the unsymmetrized term sum over the domain.
    pub(crate) fn integral_complex(&self) -> Result<Complex64> {
        let (raw, poly) = self.raw_conditional(0, &[])?;
        let (lo, hi) = self.domain.bounds(0);
        let mut s: Complex64 = raw.iter().map(|t| gauss_integral(t.lc, t.p, t.b, lo, hi)).sum();
        if let Some(pp) = &poly {
            let m = poly_moments(pp.lc, pp.p, pp.b, lo, hi, pp.coefs.len() - 1);
            s += pp.coefs.iter().zip(&m).map(|(c, v)| c * v).sum::<f64>();
        }
        Ok(s)
    }

    fn raw_conditional(&self, axis: usize, prefix: &[f64]) -> Result<(Vec<Term1>, Option<Poly1>)> {
        if axis >= self.dim || prefix.len() != axis {
            return Err(Error::DimensionMismatch { expected: axis, got: prefix.len() });
        }
        let mut raw: Vec<Term1> = Vec::with_capacity(self.terms.len());
        match &self.domain {
            Domain::Full => {
                for t in &self.terms {
                    let sc = &self.precisions[t.prec].schur[axis];
                    let r = self.dim - axis - 1;
                    let hr = &t.h[axis + 1..];
                    // ½ h_R^T P_RR^{-1} h_R, no conjugation
                    let mut q = Complex64::new(0.0, 0.0);
                    for i in 0..r {
                        let mut row = Complex64::new(0.0, 0.0);
                        for j in 0..r {
                            row += sc.prr_inv[(i, j)] * hr[j];
                        }
                        q += hr[i] * row;
                    }
                    q *= 0.5;
                    // h' = h_{0..=l} - G h_R
                    let mut hp = Vec::with_capacity(axis + 1);
                    for i in 0..=axis {
                        let mut v = t.h[i];
                        for j in 0..r {
                            v -= sc.g[(i, j)] * hr[j];
                        }
                        hp.push(v);
                    }
                    let mut b = hp[axis];
                    let mut c2 = Complex64::new(0.0, 0.0);
                    for m in 0..axis {
                        b -= sc.s[(axis, m)] * prefix[m];
                        c2 += hp[m] * prefix[m];
                        let mut srow = 0.0;
                        for n in 0..axis {
                            srow += sc.s[(m, n)] * prefix[n];
                        }
                        c2 -= 0.5 * prefix[m] * srow;
                    }
                    let lc = t.coef.ln() + (t.lc + sc.log_norm) + q + c2;
                    raw.push(Term1 { lc, p: sc.s[(axis, axis)], b });
                }
            }
            Domain::Box { lo: blo, hi: bhi } => {
                for t in &self.terms {
                    let dg = self.precisions[t.prec].diag.as_ref().expect("box precisions are diagonal");
                    let mut lc = t.coef.ln() + t.lc;
                    let mut dead = false;
                    for m in axis + 1..self.dim {
                        let f = gauss_integral(Complex64::new(0.0, 0.0), dg[m], t.h[m], blo[m], bhi[m]);
                        if f == Complex64::new(0.0, 0.0) {
                            dead = true;
                            break;
                        }
                        lc += f.ln();
                    }
                    if dead {
                        continue;
                    }
                    for m in 0..axis {
                        lc += -0.5 * dg[m] * prefix[m] * prefix[m] + t.h[m] * prefix[m];
                    }
                    raw.push(Term1 { lc, p: dg[axis], b: t.h[axis] });
                }
            }
        }
        let poly = self.poly.as_ref().map(|pp| self.poly_conditional(pp, axis, prefix));
        Ok((raw, poly))
    }

    fn poly_conditional(&self, pp: &PolyPart, axis: usize, prefix: &[f64]) -> Poly1 {
        let maxe = pp.poly.max_exponents();
        let moments: Vec<Vec<f64>> = (0..self.dim)
            .map(|m| {
                if m > axis {
                    let (lo, hi) = self.domain.bounds(m);
                    poly_moments(0.0, pp.p[m], pp.h[m], lo, hi, maxe[m] as usize)
                } else {
                    vec![]
                }
            })
            .collect();
        let mut coefs = vec![0.0; maxe[axis] as usize + 1];
        for (ex, c) in pp.poly.terms() {
            let mut v = *c;
            for m in 0..self.dim {
                if m < axis {
                    v *= prefix[m].powi(ex[m] as i32);
                } else if m > axis {
                    v *= moments[m][ex[m] as usize];
                }
            }
            coefs[ex[axis] as usize] += v;
        }
        let mut lc = pp.lc;
        for m in 0..axis {
            lc += -0.5 * pp.p[m] * prefix[m] * prefix[m] + pp.h[m] * prefix[m];
        }
        Poly1 { coefs, lc, p: pp.p[axis], b: pp.h[axis] }
    }

    /// Integral of the density over the whole domain.
    pub fn total(&self) -> Result<f64> {
        Ok(self.axis_conditional(0, &[])?.total_unshifted())
    }

    /// Draw one point by sequential conditioning.
    pub fn sample_point(&self, rng: &mut RngStream) -> Result<Vec<f64>> {
        let mut x = Vec::with_capacity(self.dim);
        for l in 0..self.dim {
            let cond = self.axis_conditional(l, &x)?;
            let u = rng.uniform_open();
            x.push(cond.sample_with(u)?);
        }
        Ok(x)
    }
}

#[derive(Clone, Debug)]
struct Term1 {
    lc: Complex64,
    p: f64,
    b: Complex64,
}

#[derive(Clone, Debug)]
struct Poly1 {
    coefs: Vec<f64>,
    lc: f64,
    p: f64,
    b: f64,
}

/// One-dimensional conditional: a signed sum of Gaussian-exponential terms
/// (and possibly a polynomial-Gaussian term) on `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct AxisConditional {
    terms: Vec<Term1>,
    poly: Option<Poly1>,
    lo: f64,
    hi: f64,
    // log of the common factor removed from every term
    shift: f64,
    // integral over [lo, hi] after the shift
    total: f64,
}

impl AxisConditional {
    fn assemble(raw: Vec<Term1>, poly: Option<Poly1>, lo: f64, hi: f64) -> Result<Self> {
        let bounds: Vec<f64> = raw.iter().map(|t| log_magnitude_bound(t.lc.re, t.p, t.b.re, lo, hi)).collect();
        let poly_bound = poly.as_ref().map(|pp| {
            let n = pp.coefs.len();
            let m = poly_moments(0.0, pp.p, pp.b, lo, hi, 2 * n);
            let s: f64 = pp.coefs.iter().enumerate().map(|(e, c)| c.abs() * (m[2 * e].max(0.0) * m[0].max(0.0)).sqrt()).sum();
            pp.lc + s.ln()
        });
        let shift = bounds.iter().copied().chain(poly_bound).fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(Error::Numerical("conditional density vanishes identically".into()));
        }
        let terms: Vec<Term1> = raw
            .into_iter()
            .zip(&bounds)
            .filter(|(_, &b)| b > shift - PRUNE_LOG)
            .map(|(mut t, _)| {
                t.lc -= shift;
                t
            })
            .collect();
        let poly = poly.map(|mut pp| {
            pp.lc -= shift;
            pp
        });
        let mut c = AxisConditional { terms, poly, lo, hi, shift, total: 0.0 };
        c.total = c.integral(lo, hi);
        if !(c.total > 0.0) || !c.total.is_finite() {
            return Err(Error::Numerical(format!("conditional normalizer is {:e}", c.total)));
        }
        Ok(c)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Number of terms kept after pruning.
    pub fn n_terms(&self) -> usize {
        self.terms.len() + usize::from(self.poly.is_some())
    }

    /// `∫_a^b` of the (shifted) density.
    fn integral(&self, a: f64, b: f64) -> f64 {
        let mut s = 0.0;
        for t in &self.terms {
            s += gauss_integral(t.lc, t.p, t.b, a, b).re;
        }
        if let Some(pp) = &self.poly {
            let m = poly_moments(pp.lc, pp.p, pp.b, a, b, pp.coefs.len() - 1);
            s += pp.coefs.iter().zip(&m).map(|(c, v)| c * v).sum::<f64>();
        }
        s
    }

    /// Complex integral over the whole axis, including the shift; only
    /// meaningful for densities that are not pre-symmetrized.
    pub fn total_complex(&self) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            s += gauss_integral(t.lc, t.p, t.b, self.lo, self.hi);
        }
        if let Some(pp) = &self.poly {
            let m = poly_moments(pp.lc, pp.p, pp.b, self.lo, self.hi, pp.coefs.len() - 1);
            s += pp.coefs.iter().zip(&m).map(|(c, v)| c * v).sum::<f64>();
        }
        s * self.shift.exp()
    }

    /// Normalizing constant in the caller's units.
    pub fn total_unshifted(&self) -> f64 {
        self.total * self.shift.exp()
    }

    /// Normalized CDF at `t`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= self.lo {
            return 0.0;
        }
        if t >= self.hi {
            return 1.0;
        }
        self.integral(self.lo, t) / self.total
    }

    /// Normalized density at `t`.
    pub fn pdf(&self, t: f64) -> f64 {
        self.pdf_and_scale(t).0
    }

    /// Normalized density and the normalized sum of term magnitudes at `t`.
    pub fn pdf_and_scale(&self, t: f64) -> (f64, f64) {
        if t < self.lo || t > self.hi {
            return (0.0, 0.0);
        }
        let mut v = 0.0;
        let mut a = 0.0;
        for term in &self.terms {
            let z = (term.lc - 0.5 * term.p * t * t + term.b * t).exp();
            v += z.re;
            a += z.norm();
        }
        if let Some(pp) = &self.poly {
            let w = (pp.lc - 0.5 * pp.p * t * t + pp.b * t).exp();
            let mut pv = 0.0;
            let mut pa = 0.0;
            let mut tp = 1.0;
            for c in &pp.coefs {
                pv += c * tp;
                pa += (c * tp).abs();
                tp *= t;
            }
            v += w * pv;
            a += w * pa;
        }
        (v / self.total, a / self.total)
    }

    /// Bracket containing all but `1e-12` of the mass.
    pub fn bracket(&self) -> (f64, f64) {
        if self.lo.is_finite() && self.hi.is_finite() {
            return (self.lo, self.hi);
        }
        let mut a = f64::INFINITY;
        let mut b = f64::NEG_INFINITY;
        let mut grow = |c: f64, sd: f64| {
            a = a.min(c - 17.0 * sd);
            b = b.max(c + 17.0 * sd);
        };
        for t in &self.terms {
            if t.p > 0.0 && t.lc.re > -30.0 - 0.5 * t.b.re * t.b.re / t.p {
                grow(t.b.re / t.p, 1.0 / t.p.sqrt());
            }
        }
        if let Some(pp) = &self.poly {
            if pp.p > 0.0 {
                let deg = pp.coefs.len() as f64;
                grow(pp.b / pp.p, (1.0 + deg.sqrt()) / pp.p.sqrt());
            }
        }
        if !a.is_finite() {
            a = -1.0;
            b = 1.0;
        }
        a = a.max(self.lo);
        b = b.min(self.hi);
        let mut w = (b - a).max(1e-8);
        if self.lo == f64::NEG_INFINITY {
            while self.cdf(a) > OUTSIDE_MASS && a.is_finite() {
                a -= w;
                w *= 2.0;
            }
        }
        let mut w = (b - a).max(1e-8);
        if self.hi == f64::INFINITY {
            while 1.0 - self.cdf(b) > OUTSIDE_MASS && b.is_finite() {
                b += w;
                w *= 2.0;
            }
        }
        (a, b)
    }

    /// Inverse-CDF draw for a given uniform `u`.
    pub fn sample_with(&self, u: f64) -> Result<f64> {
        let (a, b) = self.bracket();
        let fa = self.cdf(a);
        let fb = self.cdf(b);
        let u = u.clamp(fa, fb);
        invert_monotone_cdf(|t| self.cdf(t), a, b, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_gaussian_full() {
        // N(1, 0.5) in 1-d
        let mut d = TermDensity::new(1, Domain::Full);
        let p = d.add_precision(DMatrix::from_element(1, 1, 2.0)).unwrap();
        d.push(GaussTerm { coef: c(1.0, 0.0), lc: -1.0, prec: p, h: vec![c(2.0, 0.0)] });
        let cond = d.axis_conditional(0, &[]).unwrap();
        assert!((cond.total_unshifted() - (std::f64::consts::PI).sqrt()).abs() < 1e-14);
        assert!((cond.cdf(1.0) - 0.5).abs() < 1e-15);
        let x = cond.sample_with(0.975).unwrap();
        assert!((x - (1.0 + 1.959_963_984_540_054 * 0.5f64.sqrt())).abs() < 1e-8);
    }

    #[test]
    fn correlated_gaussian_conditionals() {
        // N(0, S) with S = [[1, .8], [.8, 2]]: marginal of x0 is N(0,1),
        // x1 | x0 ~ N(.8 x0, 2 - .64)
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.8, 0.8, 2.0]);
        let pmat = s.clone().try_inverse().unwrap();
        let mut d = TermDensity::new(2, Domain::Full);
        let p = d.add_precision(pmat).unwrap();
        d.push(GaussTerm { coef: c(1.0, 0.0), lc: 0.0, prec: p, h: vec![c(0.0, 0.0); 2] });
        let m0 = d.axis_conditional(0, &[]).unwrap();
        assert!((m0.cdf(1.0) - crate::numerics::norm_cdf(1.0)).abs() < 1e-14);
        let m1 = d.axis_conditional(1, &[0.5]).unwrap();
        let sd = (2.0f64 - 0.64).sqrt();
        assert!((m1.cdf(0.4 + sd) - crate::numerics::norm_cdf(1.0)).abs() < 1e-14);
        let tot = 2.0 * std::f64::consts::PI * s.determinant().sqrt();
        assert!((d.total().unwrap() - tot).abs() < 1e-12 * tot);
    }

    #[test]
    fn box_constant_density() {
        let dom = Domain::Box { lo: vec![-0.5, 0.0], hi: vec![0.5, 2.0] };
        let mut d = TermDensity::new(2, dom);
        let p = d.add_precision(DMatrix::zeros(2, 2)).unwrap();
        d.push(GaussTerm { coef: c(3.0, 0.0), lc: 0.0, prec: p, h: vec![c(0.0, 0.0); 2] });
        assert!((d.total().unwrap() - 6.0).abs() < 1e-14);
        let m = d.axis_conditional(0, &[]).unwrap();
        assert!((m.cdf(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(m.bracket(), (-0.5, 0.5));
    }

    #[test]
    fn signed_mixture_cdf_monotone() {
        // N(0,1) minus 0.5 N(0, 0.25)-shaped bump: still nonnegative
        let mut d = TermDensity::new(1, Domain::Full);
        let p1 = d.add_precision(DMatrix::from_element(1, 1, 1.0)).unwrap();
        let p2 = d.add_precision(DMatrix::from_element(1, 1, 4.0)).unwrap();
        d.push(GaussTerm { coef: c(1.0, 0.0), lc: 0.0, prec: p1, h: vec![c(0.0, 0.0)] });
        d.push(GaussTerm { coef: c(-0.9, 0.0), lc: 0.0, prec: p2, h: vec![c(0.0, 0.0)] });
        let m = d.axis_conditional(0, &[]).unwrap();
        let mut prev = 0.0;
        for i in 0..=400 {
            let t = -10.0 + 0.05 * i as f64;
            let f = m.cdf(t);
            assert!(f >= prev - 1e-14);
            prev = f;
        }
        assert!((m.cdf(0.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn poly_part_moments() {
        // x² e^{-x²/2} on R: total sqrt(2 pi)
        let mut d = TermDensity::new(1, Domain::Full);
        let mut poly = Poly::zero(1);
        poly.add_term(vec![2], 1.0);
        d.set_poly(PolyPart { poly, lc: 0.0, p: vec![1.0], h: vec![0.0] }).unwrap();
        let t = d.total().unwrap();
        assert!((t - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-13);
        let m = d.axis_conditional(0, &[]).unwrap();
        assert!((m.cdf(0.0) - 0.5).abs() < 1e-14);
    }
}
