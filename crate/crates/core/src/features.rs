//! Low-rank feature maps `B: Ω → C^D` with `L̃(x, y) = B(x)* B(y)`, their
//! dual matrices `C = ∫ B B* dx` and the Phase-2 sampling densities.

use crate::density::{GaussTerm, PolyPart, TermDensity};
use crate::error::{Error, Result};
use crate::kernel::{Domain, KernelSpec, Point, QualitySpec, SimilaritySpec};
use crate::numerics::linalg::{symmetric_eig, CMatrix, CVector};
use crate::numerics::RngStream;
use crate::poly::Poly;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which low-rank approximation to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rff,
    Nystrom,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Rff => "rff",
            Method::Nystrom => "nystrom",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rff" => Ok(Method::Rff),
            "nystrom" | "nyström" => Ok(Method::Nystrom),
            _ => Err(Error::InvalidParameter(format!("unknown method `{s}` (rff|nystrom)"))),
        }
    }
}

/// Random Fourier features: `B_j(x) = q(x) exp(i ω_j^T x) / sqrt(D)`.
#[derive(Clone, Debug)]
pub struct RffMap {
    kernel: KernelSpec,
    freqs: Vec<Vec<f64>>,
}

/// Nyström features: `B_j(x) = Σ_k W_jk L(z_k, x)`, `W = L_Z^{-1/2}`.
#[derive(Clone, Debug)]
pub struct NystromMap {
    kernel: KernelSpec,
    landmarks: Vec<Point>,
    w: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub enum FeatureMap {
    Rff(RffMap),
    Nystrom(NystromMap),
}

/// `q(x)² = exp(lc - x^T P x / 2 + h^T x)`.
pub(crate) fn quality_square(kernel: &KernelSpec) -> (DMatrix<f64>, DVector<f64>, f64) {
    let d = kernel.dim();
    match (kernel.quality(), kernel.gamma_inv()) {
        (QualitySpec::Gaussian { center, .. }, Some(gi)) => {
            let a = DVector::from_column_slice(center);
            let gia = gi * &a;
            (gi * 2.0, &gia * 2.0, -a.dot(&gia))
        }
        _ => (DMatrix::zeros(d, d), DVector::zeros(d), 0.0),
    }
}

/// Draw frequencies from the spectral density of a translation-invariant
/// similarity.
fn draw_frequency(kernel: &KernelSpec, rng: &mut RngStream) -> Result<Vec<f64>> {
    let d = kernel.dim();
    match kernel.similarity() {
        SimilaritySpec::Gaussian { .. } => {
            let si = kernel.sigma_inv().expect("validated");
            rng.mvn(&vec![0.0; d], si)
        }
        SimilaritySpec::Laplacian { scale } => scale.iter().map(|b| rng.cauchy(1.0 / b)).collect::<Result<Vec<_>>>(),
        SimilaritySpec::Cauchy { scale } => scale.iter().map(|c| rng.laplace(1.0 / c)).collect::<Result<Vec<_>>>(),
        _ => Err(rff_rejection(kernel)),
    }
}

fn rff_rejection(kernel: &KernelSpec) -> Error {
    Error::Unsupported(format!(
        "random Fourier features need a translation-invariant similarity k(x,y) = k(x-y); \
         `{}` similarity is not translation invariant (use the nystrom method)",
        kernel.similarity().kind()
    ))
}

/// Sample `D` frequencies for an RFF map.
pub fn build_rff(kernel: &KernelSpec, rank: usize, rng: &mut RngStream) -> Result<RffMap> {
    if !kernel.similarity().is_translation_invariant() {
        return Err(rff_rejection(kernel));
    }
    if rank == 0 {
        return Err(Error::InvalidParameter("rank must be positive".into()));
    }
    let freqs = (0..rank).map(|_| draw_frequency(kernel, rng)).collect::<Result<Vec<_>>>()?;
    Ok(RffMap { kernel: kernel.clone(), freqs })
}

/// Landmarks drawn i.i.d. from the normalized quality (uniform on the box for
/// constant quality).
pub fn build_nystrom(kernel: &KernelSpec, rank: usize, rng: &mut RngStream) -> Result<NystromMap> {
    if rank == 0 {
        return Err(Error::InvalidParameter("rank must be positive".into()));
    }
    let mut zs = Vec::with_capacity(rank);
    for _ in 0..rank {
        let z = match kernel.quality() {
            QualitySpec::Gaussian { center, cov } => rng.mvn(center, cov)?,
            QualitySpec::Constant => match kernel.domain() {
                Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| rng.uniform_range(*l, *h)).collect(),
                Domain::Full => unreachable!("validated at construction"),
            },
        };
        zs.push(z);
    }
    NystromMap::from_landmarks(kernel, zs)
}

impl RffMap {
    pub fn from_frequencies(kernel: &KernelSpec, freqs: Vec<Vec<f64>>) -> Result<Self> {
        if !kernel.similarity().is_translation_invariant() {
            return Err(rff_rejection(kernel));
        }
        if freqs.is_empty() || freqs.iter().any(|w| w.len() != kernel.dim()) {
            return Err(Error::InvalidParameter("frequencies must be nonempty with length d".into()));
        }
        Ok(RffMap { kernel: kernel.clone(), freqs })
    }

    pub fn frequencies(&self) -> &[Vec<f64>] {
        &self.freqs
    }
}

impl NystromMap {
    /// Build from given landmarks; `W` is the pseudo-inverse square root of
    /// `L_Z` with eigenvalues below `1e-10 λ_max` treated as zero.
    pub fn from_landmarks(kernel: &KernelSpec, landmarks: Vec<Point>) -> Result<Self> {
        if landmarks.is_empty() {
            return Err(Error::InvalidParameter("need at least one landmark".into()));
        }
        let lz = kernel.kernel_matrix(&landmarks)?;
        let (vals, vecs) = symmetric_eig(&lz)?;
        let top = vals[0];
        if !(top > 0.0) {
            return Err(Error::RankDeficient("all landmarks degenerate: L_Z is numerically zero".into()));
        }
        let n = vals.len();
        let inv_sqrt = DVector::from_iterator(n, vals.iter().map(|&l| if l > 1e-10 * top { 1.0 / l.sqrt() } else { 0.0 }));
        let w = &vecs * DMatrix::from_diagonal(&inv_sqrt) * vecs.transpose();
        Ok(NystromMap { kernel: kernel.clone(), landmarks, w })
    }

    pub fn landmarks(&self) -> &[Point] {
        &self.landmarks
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }
}

/// `∫ exp(lc - x^T P x / 2 + h^T x) dx` over R^d (P SPD).
fn gaussian_integral_full(p: &DMatrix<f64>, h: &[Complex64], lc: f64) -> Result<Complex64> {
    let d = p.nrows();
    let ch = crate::numerics::linalg::cholesky(p, "precision")?;
    let pinv = ch.inverse();
    let mut q = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            q += h[i] * pinv[(i, j)] * h[j];
        }
    }
    let ln_det: f64 = 2.0 * ch.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    Ok((Complex64::new(lc + 0.5 * d as f64 * (2.0 * PI).ln() - 0.5 * ln_det, 0.0) + 0.5 * q).exp())
}

/// `∫_Ω exp(lc - x^T P x / 2 + h^T x) dx` for the kernel's domain.
fn gaussian_integral_domain(domain: &Domain, p: &DMatrix<f64>, h: &[Complex64], lc: f64) -> Result<Complex64> {
    match domain {
        Domain::Full => gaussian_integral_full(p, h, lc),
        Domain::Box { .. } => {
            let mut dens = TermDensity::new(p.nrows(), domain.clone());
            let prec = dens.add_precision(p.clone())?;
            dens.push(GaussTerm { coef: Complex64::new(1.0, 0.0), lc, prec, h: h.to_vec() });
            dens.integral_complex()
        }
    }
}

fn real_c(v: &DVector<f64>) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Density `c0 q(x)² + Σ_mn G_mn L(z_m, x) L(z_n, x)` for symmetric real `G`.
pub(crate) fn pair_density(kernel: &KernelSpec, zs: &[Point], g: &DMatrix<f64>, c0: f64) -> Result<TermDensity> {
    let d = kernel.dim();
    let n = zs.len();
    let (pq, hq, lcq) = quality_square(kernel);
    let mut dens = TermDensity::new(d, kernel.domain().clone());
    let lnq: Vec<f64> = zs.iter().map(|z| kernel.ln_quality(z)).collect();
    match kernel.similarity() {
        SimilaritySpec::Gaussian { .. } => {
            let si = kernel.sigma_inv().expect("validated");
            if c0 != 0.0 {
                let prec = dens.add_precision(pq.clone())?;
                dens.push(GaussTerm { coef: Complex64::new(c0, 0.0), lc: lcq, prec, h: real_c(&hq) });
            }
            if n > 0 {
                let prec = dens.add_precision(&pq + si * 2.0)?;
                let zv: Vec<DVector<f64>> = zs.iter().map(|z| DVector::from_column_slice(z)).collect();
                let siz: Vec<DVector<f64>> = zv.iter().map(|z| si * z).collect();
                let zsz: Vec<f64> = zv.iter().zip(&siz).map(|(z, s)| z.dot(s)).collect();
                for m in 0..n {
                    for k in m..n {
                        let gmk = if m == k { g[(m, m)] } else { g[(m, k)] + g[(k, m)] };
                        if gmk == 0.0 {
                            continue;
                        }
                        let h = &hq + &siz[m] + &siz[k];
                        let lc = lcq + lnq[m] + lnq[k] - 0.5 * (zsz[m] + zsz[k]);
                        dens.push(GaussTerm { coef: Complex64::new(gmk, 0.0), lc, prec, h: real_c(&h) });
                    }
                }
            }
        }
        SimilaritySpec::Linear | SimilaritySpec::Polynomial { .. } => {
            let (deg, off) = kernel.similarity().as_polynomial().expect("dot-product kind");
            if (0..d).any(|i| (0..d).any(|j| i != j && pq[(i, j)] != 0.0)) {
                return Err(Error::Unsupported(
                    "polynomial similarity needs an axis-aligned (diagonal) quality covariance".into(),
                ));
            }
            let mut r = Poly::sq_norm_plus(d, off).pow(deg).scale(c0);
            let qs: Vec<Poly> = zs
                .iter()
                .zip(&lnq)
                .map(|(z, lq)| Poly::affine(z, off).pow(deg).scale(lq.exp()))
                .collect();
            for m in 0..n {
                let mut s = Poly::zero(d);
                for k in 0..n {
                    if g[(m, k)] != 0.0 {
                        s.add_scaled(&qs[k], g[(m, k)]);
                    }
                }
                r.add_scaled(&qs[m].mul(&s), 1.0);
            }
            dens.set_poly(PolyPart { poly: r, lc: lcq, p: pq.diagonal().iter().copied().collect(), h: hq.iter().copied().collect() })?;
        }
        other => {
            return Err(Error::Unsupported(format!(
                "closed-form integrals are available for gaussian, linear and polynomial similarity, not `{}`",
                other.kind()
            )))
        }
    }
    Ok(dens)
}

impl FeatureMap {
    pub fn kernel(&self) -> &KernelSpec {
        match self {
            FeatureMap::Rff(m) => &m.kernel,
            FeatureMap::Nystrom(m) => &m.kernel,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            FeatureMap::Rff(m) => m.freqs.len(),
            FeatureMap::Nystrom(m) => m.landmarks.len(),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            FeatureMap::Rff(_) => Method::Rff,
            FeatureMap::Nystrom(_) => Method::Nystrom,
        }
    }

    pub fn build(kernel: &KernelSpec, method: Method, rank: usize, rng: &mut RngStream) -> Result<Self> {
        Ok(match method {
            Method::Rff => FeatureMap::Rff(build_rff(kernel, rank, rng)?),
            Method::Nystrom => FeatureMap::Nystrom(build_nystrom(kernel, rank, rng)?),
        })
    }

    /// `B(x)`.
    pub fn eval_b(&self, x: &[f64]) -> CVector {
        match self {
            FeatureMap::Rff(m) => {
                let amp = m.kernel.eval_quality(x) / (m.freqs.len() as f64).sqrt();
                CVector::from_iterator(
                    m.freqs.len(),
                    m.freqs.iter().map(|w| Complex64::from_polar(amp, w.iter().zip(x).map(|(a, b)| a * b).sum())),
                )
            }
            FeatureMap::Nystrom(m) => {
                let lz = DVector::from_iterator(m.landmarks.len(), m.landmarks.iter().map(|z| m.kernel.l(z, x)));
                let b = &m.w * lz;
                CVector::from_iterator(b.len(), b.iter().map(|&v| Complex64::new(v, 0.0)))
            }
        }
    }

    /// `L̃(x, y) = B(x)* B(y)`; real for Nyström, Hermitian for RFF.
    pub fn l_tilde(&self, x: &[f64], y: &[f64]) -> Complex64 {
        self.eval_b(x).dotc(&self.eval_b(y))
    }

    /// `L̃_X` as a Hermitian matrix.
    pub fn kernel_matrix(&self, xs: &[Point]) -> CMatrix {
        let bs: Vec<CVector> = xs.iter().map(|x| self.eval_b(x)).collect();
        CMatrix::from_fn(xs.len(), xs.len(), |i, j| bs[i].dotc(&bs[j]))
    }

    /// `C = ∫_Ω B(x) B(x)* dx` in closed form.
    pub fn dual_matrix(&self) -> Result<CMatrix> {
        match self {
            FeatureMap::Rff(m) => {
                let k = &m.kernel;
                let dd = m.freqs.len();
                let (pq, hq, lcq) = quality_square(k);
                let mut c = CMatrix::zeros(dd, dd);
                for j in 0..dd {
                    for l in j..dd {
                        let h: Vec<Complex64> = (0..k.dim())
                            .map(|i| Complex64::new(hq[i], m.freqs[j][i] - m.freqs[l][i]))
                            .collect();
                        let v = match (k.domain(), k.quality()) {
                            (Domain::Full, QualitySpec::Gaussian { center, cov }) => {
                                // π^{d/2} |Γ|^{1/2} exp(i a^T Δω - Δω^T Γ Δω / 4)
                                let dw = DVector::from_iterator(k.dim(), (0..k.dim()).map(|i| m.freqs[j][i] - m.freqs[l][i]));
                                let a = DVector::from_column_slice(center);
                                let ln_amp = 0.5 * k.dim() as f64 * PI.ln()
                                    + 0.5 * crate::numerics::linalg::ln_det_spd(cov)
                                    - 0.25 * dw.dot(&(cov * &dw));
                                Complex64::from_polar(ln_amp.exp(), a.dot(&dw))
                            }
                            _ => gaussian_integral_domain(k.domain(), &pq, &h, lcq)?,
                        } / dd as f64;
                        c[(j, l)] = v;
                        c[(l, j)] = v.conj();
                    }
                }
                Ok(c)
            }
            FeatureMap::Nystrom(m) => {
                let a = nystrom_gram(&m.kernel, &m.landmarks)?;
                let c = &m.w * a * &m.w;
                Ok(CMatrix::from_fn(c.nrows(), c.ncols(), |i, j| Complex64::new(0.5 * (c[(i, j)] + c[(j, i)]), 0.0)))
            }
        }
    }

    /// Phase-2 density `f(x) = (1/|V|) Σ_v |v* B(x)|²`.
    pub fn phase2_density(&self, vs: &[CVector]) -> Result<TermDensity> {
        if vs.is_empty() {
            return Err(Error::InvalidParameter("empty eigenvector set".into()));
        }
        let dd = self.rank();
        // K_jk = (1/|V|) Σ_v conj(v_j) v_k, so f = Σ_jk K_jk B_j conj(B_k)
        let mut kk = CMatrix::zeros(dd, dd);
        for v in vs {
            if v.len() != dd {
                return Err(Error::DimensionMismatch { expected: dd, got: v.len() });
            }
            kk += v.conjugate() * v.transpose();
        }
        kk.unscale_mut(vs.len() as f64);
        match self {
            FeatureMap::Rff(m) => {
                let k = &m.kernel;
                let (pq, hq, lcq) = quality_square(k);
                let mut dens = TermDensity::new(k.dim(), k.domain().clone());
                let prec = dens.add_precision(pq)?;
                let lc = lcq - (dd as f64).ln();
                for j in 0..dd {
                    for l in j..dd {
                        let coef = if j == l { Complex64::new(kk[(j, j)].re, 0.0) } else { kk[(j, l)] * 2.0 };
                        let h = (0..k.dim()).map(|i| Complex64::new(hq[i], m.freqs[j][i] - m.freqs[l][i])).collect();
                        dens.push(GaussTerm { coef, lc, prec, h });
                    }
                }
                Ok(dens)
            }
            FeatureMap::Nystrom(m) => {
                // f = Σ_mn Re(W K W)_mn L(z_m, x) L(z_n, x)
                let re = DMatrix::from_fn(dd, dd, |i, j| kk[(i, j)].re);
                let g = &m.w * re * &m.w;
                pair_density(&m.kernel, &m.landmarks, &g, 0.0)
            }
        }
    }

    /// CDF of the Phase-2 density along `axis`, earlier axes fixed at
    /// `prefix`, later axes integrated out.
    pub fn phase2_cdf(&self, vs: &[CVector], axis: usize, prefix: &[f64], t: f64) -> Result<f64> {
        Ok(self.phase2_density(vs)?.axis_conditional(axis, prefix)?.cdf(t))
    }

    /// Serializable form (frequencies, or landmarks plus `W`).
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            FeatureMap::Rff(m) => serde_json::json!({
                "method": "rff",
                "frequencies": m.freqs,
            }),
            FeatureMap::Nystrom(m) => serde_json::json!({
                "method": "nystrom",
                "landmarks": m.landmarks,
                "w": (0..m.w.nrows()).map(|i| m.w.row(i).iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
        }
    }
}

/// `A_mn = ∫_Ω L(z_m, x) L(z_n, x) dx`.
fn nystrom_gram(kernel: &KernelSpec, zs: &[Point]) -> Result<DMatrix<f64>> {
    let n = zs.len();
    let mut a = DMatrix::zeros(n, n);
    match kernel.similarity() {
        SimilaritySpec::Gaussian { .. } if !kernel.domain().is_box() => {
            let si = kernel.sigma_inv().expect("validated");
            let (pq, hq, lcq) = quality_square(kernel);
            let p = &pq + si * 2.0;
            for m in 0..n {
                for k in m..n {
                    let zm = DVector::from_column_slice(&zs[m]);
                    let zk = DVector::from_column_slice(&zs[k]);
                    let h = &hq + si * (&zm + &zk);
                    let lc = lcq + kernel.ln_quality(&zs[m]) + kernel.ln_quality(&zs[k])
                        - 0.5 * (zm.dot(&(si * &zm)) + zk.dot(&(si * &zk)));
                    let v = gaussian_integral_full(&p, &real_c(&h), lc)?.re;
                    a[(m, k)] = v;
                    a[(k, m)] = v;
                }
            }
        }
        _ => {
            for m in 0..n {
                for k in m..n {
                    let mut g = DMatrix::zeros(n, n);
                    g[(m, k)] = 1.0;
                    // off-diagonal entries can be negative for dot-product similarities
                    let v = pair_density(kernel, zs, &g, 0.0)?.integral_complex()?.re;
                    a[(m, k)] = v;
                    a[(k, m)] = v;
                }
            }
        }
    }
    Ok(a)
}
