//! Normalized k-DPP probabilities and the sampling estimate of the total
//! variation between the exact and approximated processes.

use crate::dual::{DualRepresentation, EspTable};
use crate::error::{Error, Result};
use crate::features::{FeatureMap, Method};
use crate::kernel::{isotropic_params, GaussianSpectrum, KernelSpec, SampleSet};
use crate::numerics::linalg::{ln_det_hpd, ln_det_spd};
use crate::numerics::RngStream;
use serde::{Deserialize, Serialize};

/// Ratios above this are treated as overflow and excluded.
pub const RATIO_CAP: f64 = 1e6;

/// Where `L_X` comes from.
#[derive(Clone, Copy, Debug)]
pub enum KernelSource<'a> {
    Exact(&'a KernelSpec),
    Approx(&'a FeatureMap),
}

impl KernelSource<'_> {
    /// `ln det L_X`, `-inf` when singular.
    pub fn ln_det(&self, xs: &SampleSet) -> Result<f64> {
        Ok(match self {
            KernelSource::Exact(k) => ln_det_spd(&k.kernel_matrix(xs)?),
            KernelSource::Approx(m) => ln_det_hpd(&m.kernel_matrix(xs)),
        })
    }
}

/// `ln e_k(λ)`.
pub fn ln_esp(lambda: &[f64], k: usize) -> Result<f64> {
    if k > lambda.len() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(EspTable::new(lambda, k)?.ln_value(k, lambda.len()))
}

/// `ln det L_X - ln e_k(λ)` with `k = |X|`; `-inf` for singular `L_X`.
pub fn kdpp_log_prob(lambda: &[f64], xs: &SampleSet, src: KernelSource<'_>) -> Result<f64> {
    let ld = src.ln_det(xs)?;
    if ld == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(ld - ln_esp(lambda, xs.len())?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvConfig {
    pub method: Method,
    pub rank: usize,
    pub k: usize,
    pub sigma2: f64,
    pub rho2: f64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    /// Samples whose ratio overflowed or was not finite.
    pub n_excluded: usize,
    pub config: TvConfig,
}

/// Draw `n_samples` sets from the approximated k-DPP and average
/// `½|P_L(X)/P_L̃(X) - 1|`.
pub fn estimate_tv(
    kernel: &KernelSpec,
    method: Method,
    rank: usize,
    k: usize,
    n_samples: usize,
    rng: &mut RngStream,
) -> Result<TvEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be positive".into()));
    }
    let (rho2, sigma2) = isotropic_params(kernel)?;
    let spectrum = GaussianSpectrum::from_kernel(kernel)?;
    let ln_ek = spectrum.ln_esp(k);
    let dual = DualRepresentation::build(kernel, method, rank, rng)?;
    let lam: Vec<f64> = dual.eigenvalues().iter().map(|l| l.max(0.0)).collect();
    let ln_ek_tilde = ln_esp(&lam, k)?;
    if ln_ek_tilde == f64::NEG_INFINITY {
        return Err(Error::InsufficientRank { k });
    }
    let exact = KernelSource::Exact(kernel);
    let approx = KernelSource::Approx(dual.map());
    let mut vals = Vec::with_capacity(n_samples);
    let mut excluded = 0;
    for _ in 0..n_samples {
        let xs = dual.sample_kdpp(k, rng)?;
        let ln_r = (exact.ln_det(&xs)? - ln_ek) - (approx.ln_det(&xs)? - ln_ek_tilde);
        let r = ln_r.exp();
        if ln_r.is_nan() || !(r <= RATIO_CAP) {
            excluded += 1;
            continue;
        }
        vals.push(0.5 * (r - 1.0).abs());
    }
    let n = vals.len();
    let (mean, se) = if n == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let m = vals.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        (m, (var / n as f64).sqrt())
    };
    Ok(TvEstimate {
        mean: mean.clamp(0.0, 1.0),
        std_error: se,
        n_samples: n,
        n_excluded: excluded,
        config: TvConfig { method, rank, k, sigma2, rho2, dim: kernel.dim() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k1_log_prob_is_quality_over_trace() {
        let k = KernelSpec::isotropic(1, 1.0, 0.5).unwrap();
        let sp = GaussianSpectrum::from_kernel(&k).unwrap();
        let lam = sp.truncated_values(1e-16, 10_000).unwrap();
        let x = vec![vec![0.7]];
        let lp = kdpp_log_prob(&lam, &x, KernelSource::Exact(&k)).unwrap();
        let want = k.l(&x[0], &x[0]).ln() - lam.iter().sum::<f64>().ln();
        assert!((lp - want).abs() < 1e-12);
        assert!((lam.iter().sum::<f64>() - sp.trace()).abs() < 1e-10);
    }

    #[test]
    fn duplicated_point_is_neg_infinity() {
        let k = KernelSpec::isotropic(1, 1.0, 0.5).unwrap();
        let x = vec![vec![0.2], vec![0.2]];
        assert_eq!(kdpp_log_prob(&[1.0, 0.5], &x, KernelSource::Exact(&k)).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn tv_estimate_is_bounded() {
        let k = KernelSpec::isotropic(1, 1.0, 0.5).unwrap();
        let mut rng = RngStream::new(9, 0);
        let est = estimate_tv(&k, Method::Nystrom, 20, 3, 40, &mut rng).unwrap();
        assert!(est.mean >= 0.0 && est.mean <= 1.0 && est.std_error >= 0.0);
        assert_eq!(est.n_samples + est.n_excluded, 40);
    }
}
