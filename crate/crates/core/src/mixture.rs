//! Bayesian 1-d Gaussian mixture with an i.i.d. normal or a k-DPP prior on
//! the component means.

use crate::error::{Error, Result};
use crate::density::TermDensity;
use crate::gibbs::full_conditional;
use crate::kernel::{Domain, KernelSpec, QualitySpec, SimilaritySpec};
use crate::numerics::RngStream;
use nalgebra::DMatrix;
use pathfinding::prelude::{kuhn_munkres, Matrix};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorKind {
    Iid,
    Dpp,
}

impl std::str::FromStr for PriorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iid" => Ok(PriorKind::Iid),
            "dpp" => Ok(PriorKind::Dpp),
            _ => Err(Error::InvalidParameter(format!("unknown prior `{s}` (iid|dpp)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureModelSpec {
    pub n_components: usize,
    pub alpha: f64,
    pub a_sigma: f64,
    pub b_sigma: f64,
    pub mu0: f64,
    pub sigma0_sq: f64,
    pub prior: PriorKind,
    /// Similarity bandwidth: `k(μ, μ') = exp(-(μ - μ')² / γ₀²)`.
    pub gamma0_sq: f64,
}

impl Default for MixtureModelSpec {
    fn default() -> Self {
        MixtureModelSpec {
            n_components: 6,
            alpha: 1.0 / 3.0,
            a_sigma: 2.0,
            b_sigma: 1.0,
            mu0: 0.0,
            sigma0_sq: 1.0,
            prior: PriorKind::Iid,
            gamma0_sq: 1.0,
        }
    }
}

impl MixtureModelSpec {
    pub fn with_prior(prior: PriorKind) -> Self {
        MixtureModelSpec { prior, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [self.alpha, self.a_sigma, self.b_sigma, self.sigma0_sq, self.gamma0_sq];
        if self.n_components == 0 || pos.iter().any(|v| !(*v > 0.0) || !v.is_finite()) || !self.mu0.is_finite() {
            return Err(Error::InvalidParameter("mixture hyperparameters must be positive".into()));
        }
        Ok(())
    }

    /// Kernel of the k-DPP prior: quality `N(μ₀, 2σ₀²)`, Gaussian similarity
    /// with covariance `γ₀²/2`.
    pub fn dpp_kernel(&self) -> Result<KernelSpec> {
        KernelSpec::new(
            1,
            QualitySpec::Gaussian { center: vec![self.mu0], cov: DMatrix::from_element(1, 1, 2.0 * self.sigma0_sq) },
            SimilaritySpec::Gaussian { cov: DMatrix::from_element(1, 1, 0.5 * self.gamma0_sq) },
            Domain::Full,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureState {
    pub pi: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub z: Vec<usize>,
}

/// Affine map to zero mean and unit variance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: f64,
    pub sd: f64,
}

impl Standardizer {
    pub fn fit(y: &[f64]) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::Empty("need at least two observations".into()));
        }
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let sd = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        if !(sd > 0.0) {
            return Err(Error::ZeroVariance);
        }
        Ok(Standardizer { mean, sd })
    }

    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        y.iter().map(|v| (v - self.mean) / self.sd).collect()
    }
}

fn ln_normal(y: f64, mu: f64, s2: f64) -> f64 {
    -0.5 * (2.0 * PI * s2).ln() - 0.5 * (y - mu).powi(2) / s2
}

fn log_normalize(w: &mut [f64]) {
    let m = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in w.iter_mut() {
        *v = (*v - m).exp();
        s += *v;
    }
    for v in w.iter_mut() {
        *v /= s;
    }
}

/// Draw the initial state: means and variances from their priors, uniform
/// weights, assignments from the implied responsibilities.
pub fn init_state(data: &[f64], spec: &MixtureModelSpec, rng: &mut RngStream) -> Result<MixtureState> {
    spec.validate()?;
    let kk = spec.n_components;
    let mu = (0..kk).map(|_| spec.mu0 + spec.sigma0_sq.sqrt() * rng.normal()).collect();
    let sigma2 = (0..kk).map(|_| rng.inverse_gamma(spec.a_sigma, spec.b_sigma)).collect::<Result<_>>()?;
    let mut st = MixtureState { pi: vec![1.0 / kk as f64; kk], mu, sigma2, z: vec![0; data.len()] };
    sample_assignments(&mut st, data, rng)?;
    Ok(st)
}

fn sample_assignments(st: &mut MixtureState, data: &[f64], rng: &mut RngStream) -> Result<()> {
    let kk = st.pi.len();
    let mut w = vec![0.0; kk];
    for (i, &y) in data.iter().enumerate() {
        for k in 0..kk {
            w[k] = st.pi[k].ln() + ln_normal(y, st.mu[k], st.sigma2[k]);
        }
        log_normalize(&mut w);
        st.z[i] = rng.categorical_weights(&w)?;
    }
    Ok(())
}

/// Unnormalized full conditional of mean `index` under the DPP prior: the
/// one-point DPP conditional tilted by `exp(-prec/2 x^2 + h x)`.
pub fn mean_conditional(kernel: &KernelSpec, mu: &[f64], index: usize, prec: f64, h: f64) -> Result<TermDensity> {
    let pts: Vec<Vec<f64>> = mu.iter().map(|&m| vec![m]).collect();
    full_conditional(kernel, &pts, index)?.tilt(&DMatrix::from_element(1, 1, prec), &[h], 0.0)
}

/// One full Gibbs scan: assignments, weights, variances, means, then a
/// uniform random relabeling.
pub fn gibbs_step_mog(
    st: &mut MixtureState,
    data: &[f64],
    spec: &MixtureModelSpec,
    kernel: Option<&KernelSpec>,
    rng: &mut RngStream,
) -> Result<()> {
    let kk = spec.n_components;
    sample_assignments(st, data, rng)?;
    let mut count = vec![0usize; kk];
    let mut sum = vec![0.0; kk];
    for (&z, &y) in st.z.iter().zip(data) {
        count[z] += 1;
        sum[z] += y;
    }
    let conc: Vec<f64> = count.iter().map(|&n| spec.alpha + n as f64).collect();
    st.pi = rng.dirichlet(&conc)?;
    for k in 0..kk {
        let ss: f64 = st.z.iter().zip(data).filter(|(z, _)| **z == k).map(|(_, y)| (y - st.mu[k]).powi(2)).sum();
        st.sigma2[k] = rng.inverse_gamma(spec.a_sigma + 0.5 * count[k] as f64, spec.b_sigma + 0.5 * ss)?;
    }
    for k in 0..kk {
        let prec_lik = count[k] as f64 / st.sigma2[k];
        let h_lik = sum[k] / st.sigma2[k];
        st.mu[k] = match spec.prior {
            PriorKind::Iid => {
                let v = 1.0 / (1.0 / spec.sigma0_sq + prec_lik);
                let m = v * (spec.mu0 / spec.sigma0_sq + h_lik);
                m + v.sqrt() * rng.normal()
            }
            PriorKind::Dpp => {
                let kernel = kernel.ok_or_else(|| Error::InvalidParameter("dpp prior needs its kernel".into()))?;
                let dens = mean_conditional(kernel, &st.mu, k, prec_lik, h_lik)?;
                let x = dens.sample_point(rng)?;
                let (v, scale) = dens.value_and_scale(&x);
                if v < -1e-8 * scale {
                    return Err(Error::NegativeDensity { value: v, location: x });
                }
                x[0]
            }
        };
    }
    let perm = rng.permutation(kk);
    let old = st.clone();
    for (new, &o) in perm.iter().enumerate() {
        st.pi[new] = old.pi[o];
        st.mu[new] = old.mu[o];
        st.sigma2[new] = old.sigma2[o];
    }
    let mut inv = vec![0; kk];
    for (new, &o) in perm.iter().enumerate() {
        inv[o] = new;
    }
    for z in st.z.iter_mut() {
        *z = inv[*z];
    }
    Ok(())
}

/// Run the sampler; keeps every `thin`-th state after `burn_in` iterations.
pub fn run_mog(
    data: &[f64],
    spec: &MixtureModelSpec,
    n_iter: usize,
    burn_in: usize,
    thin: usize,
    rng: &mut RngStream,
) -> Result<Vec<MixtureState>> {
    if data.is_empty() {
        return Err(Error::Empty("no observations".into()));
    }
    if thin == 0 || burn_in > n_iter {
        return Err(Error::InvalidParameter("need thin >= 1 and burn_in <= n_iter".into()));
    }
    let kernel = match spec.prior {
        PriorKind::Dpp => Some(spec.dpp_kernel()?),
        PriorKind::Iid => None,
    };
    let mut st = init_state(data, spec, rng)?;
    let mut out = Vec::with_capacity((n_iter - burn_in) / thin);
    for it in 1..=n_iter {
        gibbs_step_mog(&mut st, data, spec, kernel.as_ref(), rng)?;
        if it > burn_in && (it - burn_in) % thin == 0 {
            out.push(st.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureMetrics {
    pub membership_entropy: f64,
    pub clustering_error: Option<f64>,
    pub heldout_loglik: Option<f64>,
}

/// Mean over draws and points of the entropy of `p(z_i = k | y_i, θ)`.
pub fn membership_entropy(chain: &[MixtureState], data: &[f64]) -> f64 {
    let mut total = 0.0;
    for st in chain {
        let mut w = vec![0.0; st.pi.len()];
        for &y in data {
            for k in 0..w.len() {
                w[k] = st.pi[k].ln() + ln_normal(y, st.mu[k], st.sigma2[k]);
            }
            log_normalize(&mut w);
            total -= w.iter().filter(|p| **p > 0.0).map(|p| p * p.ln()).sum::<f64>();
        }
    }
    total / (chain.len() * data.len()).max(1) as f64
}

/// Fraction of points misassigned after the best one-to-one matching of
/// true labels to components.
pub fn matched_error(z: &[usize], truth: &[usize], n_components: usize) -> Result<f64> {
    if z.len() != truth.len() || z.is_empty() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: z.len() });
    }
    let n_true = truth.iter().max().map_or(0, |m| m + 1);
    let cols = n_components.max(n_true);
    let mut counts = Matrix::new(n_true, cols, 0i64);
    for (&a, &t) in z.iter().zip(truth) {
        counts[(t, a)] += 1;
    }
    let (matched, _) = kuhn_munkres(&counts);
    Ok(1.0 - matched as f64 / z.len() as f64)
}

/// Log-likelihood of `heldout` under the posterior-mean mixture density.
pub fn heldout_loglik(chain: &[MixtureState], heldout: &[f64]) -> f64 {
    heldout
        .iter()
        .map(|&y| {
            let f: f64 = chain
                .iter()
                .map(|st| (0..st.pi.len()).map(|k| st.pi[k] * ln_normal(y, st.mu[k], st.sigma2[k]).exp()).sum::<f64>())
                .sum::<f64>()
                / chain.len() as f64;
            f.ln()
        })
        .sum()
}

pub fn compute_metrics(
    chain: &[MixtureState],
    data: &[f64],
    true_labels: Option<&[usize]>,
    heldout: Option<&[f64]>,
) -> Result<MixtureMetrics> {
    if chain.is_empty() {
        return Err(Error::Empty("empty chain".into()));
    }
    let clustering_error = match true_labels {
        Some(t) => {
            let mut s = 0.0;
            for st in chain {
                s += matched_error(&st.z, t, st.pi.len())?;
            }
            Some(s / chain.len() as f64)
        }
        None => None,
    };
    Ok(MixtureMetrics {
        membership_entropy: membership_entropy(chain, data),
        clustering_error,
        heldout_loglik: heldout.map(|h| heldout_loglik(chain, h)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_error() {
        assert_eq!(matched_error(&[3, 3, 1, 1], &[0, 0, 1, 1], 6).unwrap(), 0.0);
        assert_eq!(matched_error(&[3, 3, 3, 1], &[0, 0, 1, 1], 6).unwrap(), 0.25);
    }

    #[test]
    fn entropy_limits() {
        let one = MixtureState { pi: vec![1.0], mu: vec![0.0], sigma2: vec![1.0], z: vec![0, 0] };
        assert_eq!(membership_entropy(&[one], &[0.1, -0.4]), 0.0);
        let two = MixtureState { pi: vec![0.5, 0.5], mu: vec![0.0, 0.0], sigma2: vec![1.0, 1.0], z: vec![0, 1] };
        assert!((membership_entropy(&[two], &[0.3]) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn chain_length_and_determinism() {
        let mut rng = RngStream::new(5, 0);
        let data = crate::datasets::poor_sep(30, &mut rng).y;
        for prior in [PriorKind::Iid, PriorKind::Dpp] {
            let spec = MixtureModelSpec::with_prior(prior);
            let a = run_mog(&data, &spec, 40, 10, 3, &mut RngStream::new(1, 2)).unwrap();
            let b = run_mog(&data, &spec, 40, 10, 3, &mut RngStream::new(1, 2)).unwrap();
            assert_eq!(a.len(), 10);
            assert_eq!(a, b);
        }
    }
}
