//! Seedable, splittable random streams.

use crate::error::{Error, Result};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Cauchy, Distribution, Gamma, StandardNormal};

/// A ChaCha20 stream keyed by `(seed, stream_id)`.
///
/// The seed picks the key, the stream id picks one of 2^64 independent
/// keystreams under that key, so replicate `r` of an experiment can use
/// stream `r` and stay reproducible whatever order replicates run in.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha20Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RngStream { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Independent child stream, a pure function of `(seed, stream_id, index)`.
    pub fn substream(&self, index: u64) -> RngStream {
        let id = splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)));
        RngStream::new(self.seed, id)
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u = self.uniform();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Normal with independent coordinates, `var[i]` the variances.
    pub fn mvn_diag(&mut self, mean: &[f64], var: &[f64]) -> Result<Vec<f64>> {
        if mean.len() != var.len() {
            return Err(Error::DimensionMismatch { expected: mean.len(), got: var.len() });
        }
        if var.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter("negative variance".into()));
        }
        Ok(mean.iter().zip(var).map(|(m, v)| m + v.sqrt() * self.normal()).collect())
    }

    /// Normal with covariance `L L^T`, `chol_l` the lower Cholesky factor.
    pub fn mvn_chol(&mut self, mean: &[f64], chol_l: &nalgebra::DMatrix<f64>) -> Result<Vec<f64>> {
        let d = mean.len();
        if chol_l.nrows() != d || chol_l.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: chol_l.nrows() });
        }
        let z = nalgebra::DVector::from_fn(d, |_, _| self.normal());
        let x = chol_l * z;
        Ok(mean.iter().zip(x.iter()).map(|(m, v)| m + v).collect())
    }

    /// Normal with full covariance.
    pub fn mvn(&mut self, mean: &[f64], cov: &nalgebra::DMatrix<f64>) -> Result<Vec<f64>> {
        let ch = super::linalg::cholesky(cov, "covariance")?;
        self.mvn_chol(mean, &ch.l())
    }

    /// Gamma with shape `k` and scale `theta`.
    pub fn gamma(&mut self, shape: f64, scale: f64) -> Result<f64> {
        let g = Gamma::new(shape, scale)
            .map_err(|e| Error::InvalidParameter(format!("gamma({shape}, {scale}): {e}")))?;
        Ok(g.sample(&mut self.inner))
    }

    /// Inverse gamma with shape `a` and scale `b` (density ∝ x^{-a-1} e^{-b/x}).
    pub fn inverse_gamma(&mut self, shape: f64, scale: f64) -> Result<f64> {
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!("inverse gamma scale {scale}")));
        }
        Ok(1.0 / self.gamma(shape, 1.0 / scale)?)
    }

    /// Dirichlet draw via normalized gammas.
    pub fn dirichlet(&mut self, alpha: &[f64]) -> Result<Vec<f64>> {
        if alpha.is_empty() {
            return Err(Error::InvalidParameter("empty Dirichlet parameter".into()));
        }
        let mut g = Vec::with_capacity(alpha.len());
        for &a in alpha {
            g.push(self.gamma(a, 1.0)?);
        }
        let s: f64 = g.iter().sum();
        if !(s > 0.0) {
            // every gamma underflowed (tiny alpha); put the mass on the largest alpha
            let i = alpha.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            return Ok((0..alpha.len()).map(|j| if j == i { 1.0 } else { 0.0 }).collect());
        }
        Ok(g.into_iter().map(|x| x / s).collect())
    }

    /// Categorical draw; probabilities must sum to one within `1e-12`.
    pub fn categorical(&mut self, probs: &[f64]) -> Result<usize> {
        let s: f64 = probs.iter().sum();
        if probs.iter().any(|p| !(*p >= 0.0)) || (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {s}")));
        }
        Ok(self.pick(probs, s))
    }

    /// Categorical draw from nonnegative, unnormalized weights.
    pub fn categorical_weights(&mut self, w: &[f64]) -> Result<usize> {
        let s: f64 = w.iter().sum();
        if w.iter().any(|p| !(*p >= 0.0)) || !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid categorical weights (sum {s})")));
        }
        Ok(self.pick(w, s))
    }

    fn pick(&mut self, w: &[f64], total: f64) -> usize {
        let u = self.uniform() * total;
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in w.iter().enumerate() {
            if p > 0.0 {
                last = i;
                acc += p;
                if u < acc {
                    return i;
                }
            }
        }
        last
    }

    pub fn cauchy(&mut self, scale: f64) -> Result<f64> {
        let c = Cauchy::new(0.0, scale)
            .map_err(|e| Error::InvalidParameter(format!("cauchy scale {scale}: {e}")))?;
        Ok(c.sample(&mut self.inner))
    }

    /// Laplace(0, scale) by inversion.
    pub fn laplace(&mut self, scale: f64) -> Result<f64> {
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!("laplace scale {scale}")));
        }
        let u = self.uniform_open() - 0.5;
        Ok(-scale * u.signum() * (1.0 - 2.0 * u.abs()).ln())
    }

    /// Fisher-Yates shuffle of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.index(i + 1);
            p.swap(i, j);
        }
        p
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
