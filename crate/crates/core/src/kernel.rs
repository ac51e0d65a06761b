//! Decomposed kernels `L(x, y) = q(x) k(x, y) q(y)` and the exact spectrum of
//! the isotropic Gaussian/Gaussian kernel.

use crate::error::{Error, Result};
use crate::numerics::linalg::cholesky;
use nalgebra::{DMatrix, DVector};
use serde_json::{json, Map, Value};

/// Point in R^d.
pub type Point = Vec<f64>;
/// Finite ordered point set.
pub type SampleSet = Vec<Point>;

/// Support of the process.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Full,
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Domain {
    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        match self {
            Domain::Full => (f64::NEG_INFINITY, f64::INFINITY),
            Domain::Box { lo, hi } => (lo[axis], hi[axis]),
        }
    }

    pub fn is_box(&self) -> bool {
        matches!(self, Domain::Box { .. })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Full => x.iter().all(|v| v.is_finite()),
            Domain::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| *v >= *l && *v <= *h),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Domain::Full => f64::INFINITY,
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
        }
    }
}

/// Quality function `q`.
#[derive(Clone, Debug)]
pub enum QualitySpec {
    /// `q(x) = exp(-(x-a)^T Γ^{-1} (x-a) / 2)`, peak value 1.
    Gaussian { center: Vec<f64>, cov: DMatrix<f64> },
    /// `q ≡ 1`; only meaningful on a box.
    Constant,
}

/// Similarity kernel `k`.
#[derive(Clone, Debug)]
pub enum SimilaritySpec {
    /// `exp(-(x-y)^T Σ^{-1} (x-y) / 2)`.
    Gaussian { cov: DMatrix<f64> },
    /// `exp(-Σ_l |x_l - y_l| / b_l)`.
    Laplacian { scale: Vec<f64> },
    /// `Π_l 1 / (1 + (x_l - y_l)² / c_l²)`.
    Cauchy { scale: Vec<f64> },
    /// `x^T y`.
    Linear,
    /// `(x^T y + offset)^degree`.
    Polynomial { degree: u32, offset: f64 },
}

impl SimilaritySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SimilaritySpec::Gaussian { .. } => "gaussian",
            SimilaritySpec::Laplacian { .. } => "laplacian",
            SimilaritySpec::Cauchy { .. } => "cauchy",
            SimilaritySpec::Linear => "linear",
            SimilaritySpec::Polynomial { .. } => "polynomial",
        }
    }

    pub fn is_translation_invariant(&self) -> bool {
        matches!(
            self,
            SimilaritySpec::Gaussian { .. } | SimilaritySpec::Laplacian { .. } | SimilaritySpec::Cauchy { .. }
        )
    }

    /// `(degree, offset)` for the dot-product kinds.
    pub fn as_polynomial(&self) -> Option<(u32, f64)> {
        match self {
            SimilaritySpec::Linear => Some((1, 0.0)),
            SimilaritySpec::Polynomial { degree, offset } => Some((*degree, *offset)),
            _ => None,
        }
    }
}

/// A validated kernel with cached inverses.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    dim: usize,
    quality: QualitySpec,
    similarity: SimilaritySpec,
    domain: Domain,
    gamma_inv: Option<DMatrix<f64>>,
    sigma_inv: Option<DMatrix<f64>>,
}

fn check_spd(m: &DMatrix<f64>, d: usize, what: &str) -> Result<DMatrix<f64>> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: m.nrows() });
    }
    if (m - m.transpose()).amax() > 1e-12 * m.amax() {
        return Err(Error::InvalidParameter(format!("{what} is not symmetric")));
    }
    Ok(cholesky(m, what)?.inverse())
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == 0.0))
}

impl KernelSpec {
    pub fn new(dim: usize, quality: QualitySpec, similarity: SimilaritySpec, domain: Domain) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let gamma_inv = match &quality {
            QualitySpec::Gaussian { center, cov } => {
                if center.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: center.len() });
                }
                Some(check_spd(cov, dim, "quality covariance")?)
            }
            QualitySpec::Constant => {
                if !domain.is_box() {
                    return Err(Error::Unsupported(
                        "constant quality needs a bounded box domain (q² is not integrable on R^d)".into(),
                    ));
                }
                None
            }
        };
        let sigma_inv = match &similarity {
            SimilaritySpec::Gaussian { cov } => Some(check_spd(cov, dim, "similarity covariance")?),
            SimilaritySpec::Laplacian { scale } | SimilaritySpec::Cauchy { scale } => {
                if scale.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: scale.len() });
                }
                if scale.iter().any(|s| !(*s > 0.0)) {
                    return Err(Error::InvalidParameter("similarity scales must be positive".into()));
                }
                None
            }
            SimilaritySpec::Linear => None,
            SimilaritySpec::Polynomial { degree, offset } => {
                if *degree == 0 || !(*offset >= 0.0) {
                    return Err(Error::InvalidParameter("polynomial similarity needs degree >= 1 and offset >= 0".into()));
                }
                None
            }
        };
        if let Domain::Box { lo, hi } = &domain {
            if lo.len() != dim || hi.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: lo.len().min(hi.len()) });
            }
            if lo.iter().zip(hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
                return Err(Error::InvalidParameter("box bounds must be finite with lo < hi".into()));
            }
        }
        Ok(KernelSpec { dim, quality, similarity, domain, gamma_inv, sigma_inv })
    }

    /// Gaussian quality `N(a, Γ)`-shaped and Gaussian similarity on R^d.
    pub fn gaussian(center: Vec<f64>, gamma: DMatrix<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        let d = center.len();
        KernelSpec::new(
            d,
            QualitySpec::Gaussian { center, cov: gamma },
            SimilaritySpec::Gaussian { cov: sigma },
            Domain::Full,
        )
    }

    /// Isotropic Gaussian/Gaussian kernel centered at the origin,
    /// `Γ = ρ² I`, `Σ = σ² I`.
    pub fn isotropic(d: usize, rho2: f64, sigma2: f64) -> Result<Self> {
        KernelSpec::gaussian(
            vec![0.0; d],
            DMatrix::identity(d, d) * rho2,
            DMatrix::identity(d, d) * sigma2,
        )
    }

    /// Constant quality on a box with isotropic Gaussian similarity.
    pub fn uniform_box(lo: Vec<f64>, hi: Vec<f64>, sigma2: f64) -> Result<Self> {
        let d = lo.len();
        KernelSpec::new(
            d,
            QualitySpec::Constant,
            SimilaritySpec::Gaussian { cov: DMatrix::identity(d, d) * sigma2 },
            Domain::Box { lo, hi },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn quality(&self) -> &QualitySpec {
        &self.quality
    }
    pub fn similarity(&self) -> &SimilaritySpec {
        &self.similarity
    }
    pub fn domain(&self) -> &Domain {
        &self.domain
    }
    pub(crate) fn gamma_inv(&self) -> Option<&DMatrix<f64>> {
        self.gamma_inv.as_ref()
    }
    pub(crate) fn sigma_inv(&self) -> Option<&DMatrix<f64>> {
        self.sigma_inv.as_ref()
    }

    pub fn quality_center(&self) -> Option<&[f64]> {
        match &self.quality {
            QualitySpec::Gaussian { center, .. } => Some(center),
            QualitySpec::Constant => None,
        }
    }

    pub fn quality_cov(&self) -> Option<&DMatrix<f64>> {
        match &self.quality {
            QualitySpec::Gaussian { cov, .. } => Some(cov),
            QualitySpec::Constant => None,
        }
    }

    /// Whether all covariance matrices involved are diagonal.
    pub fn is_axis_aligned(&self) -> bool {
        let q = match &self.quality {
            QualitySpec::Gaussian { cov, .. } => is_diagonal(cov),
            QualitySpec::Constant => true,
        };
        let s = match &self.similarity {
            SimilaritySpec::Gaussian { cov } => is_diagonal(cov),
            _ => true,
        };
        q && s
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// `ln q(x)`.
    pub fn ln_quality(&self, x: &[f64]) -> f64 {
        match (&self.quality, &self.gamma_inv) {
            (QualitySpec::Gaussian { center, .. }, Some(gi)) => {
                let r = DVector::from_iterator(self.dim, x.iter().zip(center).map(|(a, b)| a - b));
                -0.5 * r.dot(&(gi * &r))
            }
            _ => 0.0,
        }
    }

    pub fn eval_quality(&self, x: &[f64]) -> f64 {
        self.ln_quality(x).exp()
    }

    pub fn eval_similarity(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.similarity {
            SimilaritySpec::Gaussian { .. } => {
                let si = self.sigma_inv.as_ref().expect("validated");
                let r = DVector::from_iterator(self.dim, x.iter().zip(y).map(|(a, b)| a - b));
                (-0.5 * r.dot(&(si * &r))).exp()
            }
            SimilaritySpec::Laplacian { scale } => {
                (-x.iter().zip(y).zip(scale).map(|((a, b), s)| (a - b).abs() / s).sum::<f64>()).exp()
            }
            SimilaritySpec::Cauchy { scale } => x
                .iter()
                .zip(y)
                .zip(scale)
                .map(|((a, b), s)| 1.0 / (1.0 + ((a - b) / s).powi(2)))
                .product(),
            SimilaritySpec::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            SimilaritySpec::Polynomial { degree, offset } => {
                (x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + offset).powi(*degree as i32)
            }
        }
    }

    /// `L(x, y)` without dimension checks.
    pub fn l(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.ln_quality(x) + self.ln_quality(y)).exp() * self.eval_similarity(x, y)
    }

    /// `L(x, y) = q(x) k(x, y) q(y)`.
    ///
    /// ```
    /// use contdpp::kernel::KernelSpec;
    /// let k = KernelSpec::isotropic(1, 1.0, 1.0).unwrap();
    /// let v = k.eval_l(&[0.0], &[1.0]).unwrap();
    /// assert!((v - (-1.0f64).exp()).abs() < 1e-15);
    /// ```
    pub fn eval_l(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.l(x, y))
    }

    /// `(L_X)_{ij} = L(x_i, x_j)`.
    pub fn kernel_matrix(&self, xs: &[Point]) -> Result<DMatrix<f64>> {
        for x in xs {
            self.check_dim(x)?;
        }
        let n = xs.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.l(&xs[i], &xs[j]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Parse the flat JSON form.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::InvalidParameter("kernel spec must be a JSON object".into()))?;
        let get = |k: &str| obj.get(k).ok_or_else(|| Error::InvalidParameter(format!("missing key `{k}`")));
        let dim = get("dim")?
            .as_u64()
            .ok_or_else(|| Error::InvalidParameter("`dim` must be a positive integer".into()))? as usize;
        let quality = match get("quality.kind")?.as_str() {
            Some("gaussian") => QualitySpec::Gaussian {
                center: match obj.get("quality.center") {
                    Some(c) => vec_of(c, dim, "quality.center")?,
                    None => vec![0.0; dim],
                },
                cov: matrix_of(get("quality.cov")?, dim, "quality.cov")?,
            },
            Some("constant") => QualitySpec::Constant,
            other => return Err(Error::InvalidParameter(format!("unknown quality.kind {other:?}"))),
        };
        let empty = Value::Object(Map::new());
        let params = obj.get("similarity.params").unwrap_or(&empty);
        let param = |k: &str| params.get(k).ok_or_else(|| Error::InvalidParameter(format!("missing similarity.params.{k}")));
        let similarity = match get("similarity.kind")?.as_str() {
            Some("gaussian") => SimilaritySpec::Gaussian { cov: matrix_of(param("cov")?, dim, "similarity.params.cov")? },
            Some("laplacian") => SimilaritySpec::Laplacian { scale: scale_of(param("scale")?, dim)? },
            Some("cauchy") => SimilaritySpec::Cauchy { scale: scale_of(param("scale")?, dim)? },
            Some("linear") => SimilaritySpec::Linear,
            Some("polynomial") => SimilaritySpec::Polynomial {
                degree: param("degree")?
                    .as_u64()
                    .ok_or_else(|| Error::InvalidParameter("degree must be a positive integer".into()))? as u32,
                offset: params.get("offset").and_then(Value::as_f64).unwrap_or(1.0),
            },
            other => return Err(Error::InvalidParameter(format!("unknown similarity.kind {other:?}"))),
        };
        let domain = match obj.get("domain") {
            None => Domain::Full,
            Some(Value::String(s)) if s == "full" => Domain::Full,
            Some(Value::Object(b)) => Domain::Box {
                lo: vec_of(b.get("lo").unwrap_or(&Value::Null), dim, "domain.lo")?,
                hi: vec_of(b.get("hi").unwrap_or(&Value::Null), dim, "domain.hi")?,
            },
            Some(other) => return Err(Error::InvalidParameter(format!("bad domain {other}"))),
        };
        KernelSpec::new(dim, quality, similarity, domain)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        KernelSpec::from_json(&serde_json::from_str(s)?)
    }

    /// Flat JSON form; covariances are written as full matrices.
    pub fn to_json(&self) -> Value {
        let mat = |m: &DMatrix<f64>| -> Value {
            Value::Array((0..m.nrows()).map(|i| json!((0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>())).collect())
        };
        let mut o = Map::new();
        o.insert("dim".into(), json!(self.dim));
        match &self.quality {
            QualitySpec::Gaussian { center, cov } => {
                o.insert("quality.kind".into(), json!("gaussian"));
                o.insert("quality.center".into(), json!(center));
                o.insert("quality.cov".into(), mat(cov));
            }
            QualitySpec::Constant => {
                o.insert("quality.kind".into(), json!("constant"));
            }
        }
        o.insert("similarity.kind".into(), json!(self.similarity.kind()));
        let params = match &self.similarity {
            SimilaritySpec::Gaussian { cov } => json!({ "cov": mat(cov) }),
            SimilaritySpec::Laplacian { scale } | SimilaritySpec::Cauchy { scale } => json!({ "scale": scale }),
            SimilaritySpec::Linear => json!({}),
            SimilaritySpec::Polynomial { degree, offset } => json!({ "degree": degree, "offset": offset }),
        };
        o.insert("similarity.params".into(), params);
        o.insert(
            "domain".into(),
            match &self.domain {
                Domain::Full => json!("full"),
                Domain::Box { lo, hi } => json!({ "lo": lo, "hi": hi }),
            },
        );
        Value::Object(o)
    }
}

fn vec_of(v: &Value, dim: usize, what: &str) -> Result<Vec<f64>> {
    let a = v.as_array().ok_or_else(|| Error::InvalidParameter(format!("`{what}` must be an array")))?;
    let out: Option<Vec<f64>> = a.iter().map(Value::as_f64).collect();
    let out = out.ok_or_else(|| Error::InvalidParameter(format!("`{what}` must hold numbers")))?;
    if out.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: out.len() });
    }
    Ok(out)
}

fn scale_of(v: &Value, dim: usize) -> Result<Vec<f64>> {
    match v.as_f64() {
        Some(s) => Ok(vec![s; dim]),
        None => vec_of(v, dim, "similarity.params.scale"),
    }
}

// number = isotropic, flat list = diagonal, nested list = full matrix
fn matrix_of(v: &Value, dim: usize, what: &str) -> Result<DMatrix<f64>> {
    if let Some(s) = v.as_f64() {
        return Ok(DMatrix::identity(dim, dim) * s);
    }
    let rows = v.as_array().ok_or_else(|| Error::InvalidParameter(format!("`{what}` must be a number or array")))?;
    if rows.iter().all(Value::is_number) {
        let d = vec_of(v, dim, what)?;
        return Ok(DMatrix::from_diagonal(&DVector::from_vec(d)));
    }
    if rows.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: rows.len() });
    }
    let mut m = DMatrix::zeros(dim, dim);
    for (i, r) in rows.iter().enumerate() {
        let r = vec_of(r, dim, what)?;
        for (j, x) in r.into_iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    Ok(m)
}

/// One eigenvalue of the isotropic Gaussian kernel with its multi-index
/// (1-based per axis).
#[derive(Clone, Debug, PartialEq)]
pub struct MultiIndexEigenvalue {
    pub index: Vec<usize>,
    pub value: f64,
}

/// Spectrum of `L(x,y) = exp(-|x|²/2ρ²) exp(-|x-y|²/2σ²) exp(-|y|²/2ρ²)`
/// on R^d.
///
/// Per axis `λ_n = A r^{n-1}` with
/// `β = (1 + 2ρ²/σ²)^{1/4}`, `c₁ = β² + 1`, `c₂ = ρ²/σ²`,
/// `A = sqrt(πρ² / (c₁/2 + c₂/2))` and `r = c₂ / (c₁ + c₂)`.
/// In d dimensions the spectrum is the tensor product, so eigenvalues only
/// depend on the total degree `s = Σ(n_j - 1)`.
#[derive(Clone, Copy, Debug)]
pub struct GaussianSpectrum {
    pub a: f64,
    pub r: f64,
    pub d: usize,
}

impl GaussianSpectrum {
    pub fn new(rho2: f64, sigma2: f64, d: usize) -> Result<Self> {
        if !(rho2 > 0.0 && sigma2 > 0.0) || d == 0 {
            return Err(Error::InvalidParameter("need rho2 > 0, sigma2 > 0, d >= 1".into()));
        }
        let c2 = rho2 / sigma2;
        let beta2 = (1.0 + 2.0 * c2).sqrt();
        let c1 = beta2 + 1.0;
        let a = (std::f64::consts::PI * rho2 / (0.5 * c1 + 0.5 * c2)).sqrt();
        let r = c2 / (c1 + c2);
        Ok(GaussianSpectrum { a, r, d })
    }

    /// From a kernel, which must be isotropic Gaussian/Gaussian centered
    /// anywhere on R^d.
    pub fn from_kernel(k: &KernelSpec) -> Result<Self> {
        let (rho2, sigma2) = isotropic_params(k)?;
        GaussianSpectrum::new(rho2, sigma2, k.dim())
    }

    /// 1-d eigenvalue `λ_n`, `n >= 1`.
    pub fn value_1d(&self, n: usize) -> f64 {
        self.a * self.r.powi(n as i32 - 1)
    }

    /// Eigenvalue at total degree `s`.
    pub fn level_value(&self, s: usize) -> f64 {
        self.a.powi(self.d as i32) * self.r.powi(s as i32)
    }

    /// Number of multi-indices with total degree `s`, `C(s+d-1, d-1)`.
    pub fn level_multiplicity(&self, s: usize) -> f64 {
        let mut m = 1.0;
        for i in 1..self.d {
            m = m * (s + i) as f64 / i as f64;
        }
        m
    }

    /// `Σ λ = (A / (1 - r))^d`.
    pub fn trace(&self) -> f64 {
        (self.a / (1.0 - self.r)).powi(self.d as i32)
    }

    /// `ln e_k` over the whole (infinite) spectrum.
    ///
    /// Levels are folded in as `(1 + λ_s t)^{m_s}` until they no longer
    /// change the coefficients at double precision.
    pub fn ln_esp(&self, k: usize) -> f64 {
        // scaled coefficients: e_j = coef[j] * exp(ln_scale)
        let mut coef = vec![0.0; k + 1];
        coef[0] = 1.0;
        let mut ln_scale = 0.0f64;
        let mut s = 0usize;
        loop {
            let lam = self.level_value(s);
            let m = self.level_multiplicity(s);
            if lam == 0.0 {
                break;
            }
            // binomial factors C(m, j) λ^j, j <= k
            let mut f = vec![0.0; k + 1];
            f[0] = 1.0;
            for j in 1..=k {
                f[j] = if (j as f64) <= m { f[j - 1] * (m - (j - 1) as f64) * lam / j as f64 } else { 0.0 };
            }
            let mut next = vec![0.0; k + 1];
            for i in 0..=k {
                if coef[i] == 0.0 {
                    continue;
                }
                for j in 0..=(k - i) {
                    next[i + j] += coef[i] * f[j];
                }
            }
            let mx = next.iter().cloned().fold(0.0, f64::max);
            if mx > 1e200 || (mx < 1e-200 && mx > 0.0) {
                for v in next.iter_mut() {
                    *v /= mx;
                }
                ln_scale += mx.ln();
            }
            let mass = m * lam;
            let tail_small = s > 0
                && mass < 1e-18 * self.trace()
                && self.level_multiplicity(s + 1) * self.level_value(s + 1) < mass;
            coef = next;
            s += 1;
            if tail_small || s > 100_000 {
                break;
            }
        }
        if coef[k] > 0.0 {
            coef[k].ln() + ln_scale
        } else {
            f64::NEG_INFINITY
        }
    }

    /// All eigenvalues with every index in `1..=count_per_dim`, descending.
    pub fn eigenvalues(&self, count_per_dim: usize) -> Result<Vec<MultiIndexEigenvalue>> {
        let total = (count_per_dim as f64).powi(self.d as i32);
        if total > 2e7 {
            return Err(Error::InvalidParameter(format!("{total:e} multi-indices requested")));
        }
        let one: Vec<f64> = (1..=count_per_dim).map(|n| self.value_1d(n)).collect();
        let mut out = Vec::with_capacity(total as usize);
        let mut idx = vec![1usize; self.d];
        loop {
            let value = idx.iter().map(|&n| one[n - 1]).product();
            out.push(MultiIndexEigenvalue { index: idx.clone(), value });
            let mut ax = 0;
            loop {
                if ax == self.d {
                    out.sort_by(|a, b| b.value.total_cmp(&a.value));
                    return Ok(out);
                }
                idx[ax] += 1;
                if idx[ax] <= count_per_dim {
                    break;
                }
                idx[ax] = 1;
                ax += 1;
            }
        }
    }

    /// Eigenvalues (without indices) down to `rel_tol * λ_max`, expanded with
    /// multiplicity. Errors if that would exceed `max_len` values.
    pub fn truncated_values(&self, rel_tol: f64, max_len: usize) -> Result<Vec<f64>> {
        let top = self.level_value(0);
        let mut out = Vec::new();
        let mut s = 0;
        while self.level_value(s) >= rel_tol * top {
            let m = self.level_multiplicity(s);
            if out.len() as f64 + m > max_len as f64 {
                return Err(Error::InvalidParameter(format!(
                    "truncated spectrum exceeds {max_len} eigenvalues"
                )));
            }
            out.extend(std::iter::repeat(self.level_value(s)).take(m as usize));
            s += 1;
        }
        Ok(out)
    }
}

/// `(ρ², σ²)` of an isotropic Gaussian/Gaussian kernel on R^d.
pub fn isotropic_params(k: &KernelSpec) -> Result<(f64, f64)> {
    let iso = |m: &DMatrix<f64>| -> Option<f64> {
        let v = m[(0, 0)];
        let ok = (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| m[(i, j)] == if i == j { v } else { 0.0 }));
        ok.then_some(v)
    };
    let rho2 = match k.quality() {
        QualitySpec::Gaussian { cov, .. } => iso(cov),
        _ => None,
    };
    let sigma2 = match k.similarity() {
        SimilaritySpec::Gaussian { cov } => iso(cov),
        _ => None,
    };
    match (rho2, sigma2, k.domain()) {
        (Some(r), Some(s), Domain::Full) => Ok((r, s)),
        _ => Err(Error::Unsupported(
            "exact eigenvalues need isotropic gaussian quality and similarity on R^d".into(),
        )),
    }
}

/// Eigenvalue list of the isotropic Gaussian kernel, all multi-indices in
/// `{1..count_per_dim}^d`, sorted descending.
pub fn gaussian_eigenvalues(rho2: f64, sigma2: f64, d: usize, count_per_dim: usize) -> Result<Vec<MultiIndexEigenvalue>> {
    GaussianSpectrum::new(rho2, sigma2, d)?.eigenvalues(count_per_dim)
}
