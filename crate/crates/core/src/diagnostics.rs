//! Mixing diagnostics for Gibbs chains and the coverage-rate metric.

use crate::error::{Error, Result};
use crate::kernel::{Domain, KernelSpec, Point, QualitySpec, SampleSet, SimilaritySpec};
use crate::numerics::RngStream;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// `m = 1/(T-1) · 1/k · Σ_t Σ_i |x_i^{t+1} - x_i^t|²` with stable indexing.
pub fn average_movement(chain: &[SampleSet]) -> Result<f64> {
    if chain.len() < 2 {
        return Err(Error::InvalidParameter("average movement needs at least two cycles".into()));
    }
    let k = chain[0].len();
    if k == 0 || chain.iter().any(|s| s.len() != k) {
        return Err(Error::InvalidParameter("all sets must have the same nonzero size".into()));
    }
    let mut s = 0.0;
    for w in chain.windows(2) {
        for (a, b) in w[0].iter().zip(&w[1]) {
            s += a.iter().zip(b).map(|(x, y)| (y - x).powi(2)).sum::<f64>();
        }
    }
    Ok(s / ((chain.len() - 1) * k) as f64)
}

/// Sort each 1-d set so that i.i.d. baselines can be matched across cycles.
pub fn sort_sets(chain: &[SampleSet]) -> Vec<SampleSet> {
    chain
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
            s
        })
        .collect()
}

/// Where to stop summing autocorrelations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    /// First δ ≥ 1 with `ρ_{2δ} + ρ_{2δ+1} > 0`; sum lags `1..=2δ+1`.
    #[default]
    Verbatim,
    /// Geyer's initial positive sequence: stop before the first pair with
    /// `ρ_{2δ} + ρ_{2δ+1} <= 0`; sum lags `1..=2δ-1`.
    Geyer,
}

impl std::str::FromStr for Truncation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "verbatim" => Ok(Truncation::Verbatim),
            "geyer" => Ok(Truncation::Geyer),
            _ => Err(Error::InvalidParameter(format!("unknown truncation `{s}` (verbatim|geyer)"))),
        }
    }
}

/// Autocorrelation at lags `0..=max_lag` with the biased `1/T` normalization.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let t = x.len();
    let mean = x.iter().sum::<f64>() / t as f64;
    let c0 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / t as f64;
    if !(c0 > 1e-300) {
        return Err(Error::ZeroVariance);
    }
    Ok((0..=max_lag.min(t - 1))
        .map(|s| (0..t - s).map(|i| (x[i] - mean) * (x[i + s] - mean)).sum::<f64>() / t as f64 / c0)
        .collect())
}

/// Effective-sample-size factor `α = 1 / (1 + 2 Σ ρ̄_s)`, autocorrelations
/// averaged over points and coordinates, clamped to `(0, 1]`.
pub fn ess_alpha(chain: &[SampleSet], trunc: Truncation) -> Result<f64> {
    let t = chain.len();
    if t < 10 {
        return Err(Error::InvalidParameter("ESS needs a chain of length at least 10".into()));
    }
    let k = chain[0].len();
    let d = chain[0].first().map_or(0, |p| p.len());
    if k == 0 || chain.iter().any(|s| s.len() != k) {
        return Err(Error::InvalidParameter("all sets must have the same nonzero size".into()));
    }
    let max_lag = t - 1;
    let mut rho = vec![0.0; max_lag + 1];
    let mut n = 0usize;
    for i in 0..k {
        for c in 0..d {
            let series: Vec<f64> = chain.iter().map(|s| s[i][c]).collect();
            let r = autocorrelation(&series, max_lag)?;
            for (acc, v) in rho.iter_mut().zip(&r) {
                *acc += v;
            }
            n += 1;
        }
    }
    for v in rho.iter_mut() {
        *v /= n as f64;
    }
    Ok(alpha_from_rho(&rho, trunc))
}

/// α from averaged autocorrelations `rho[0..]` (`rho[0] = 1`).
pub fn alpha_from_rho(rho: &[f64], trunc: Truncation) -> f64 {
    let pair = |m: usize| rho.get(2 * m).copied().unwrap_or(0.0) + rho.get(2 * m + 1).copied().unwrap_or(0.0);
    let n_pairs = rho.len() / 2;
    let last = match trunc {
        Truncation::Verbatim => (1..n_pairs).find(|&m| pair(m) > 0.0).map_or(rho.len() - 1, |m| 2 * m + 1),
        Truncation::Geyer => (1..n_pairs).find(|&m| pair(m) <= 0.0).map_or(rho.len() - 1, |m| 2 * m - 1),
    };
    let s: f64 = rho[1..=last.min(rho.len() - 1)].iter().sum();
    let den = 1.0 + 2.0 * s;
    if den <= 1.0 {
        1.0
    } else {
        1.0 / den
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Distance from each reference point to its nearest candidate.
pub fn nearest_distances(reference: &[Point], candidates: &[Point]) -> Result<Vec<f64>> {
    if reference.is_empty() || candidates.is_empty() {
        return Err(Error::Empty("coverage needs nonempty reference and candidate sets".into()));
    }
    let d = reference[0].len();
    if reference.iter().chain(candidates).any(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: candidates[0].len() });
    }
    Ok(reference
        .iter()
        .map(|r| candidates.iter().map(|c| dist(r, c)).fold(f64::INFINITY, f64::min))
        .collect())
}

/// Fraction of reference points with a candidate within `eps`.
pub fn coverage_rate(reference: &[Point], candidates: &[Point], eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let nd = nearest_distances(reference, candidates)?;
    Ok(nd.iter().filter(|&&v| v <= eps).count() as f64 / nd.len() as f64)
}

/// Smallest ε at which the coverage reaches `target`.
pub fn epsilon_for_coverage(reference: &[Point], candidates: &[Point], target: f64) -> Result<f64> {
    let mut nd = nearest_distances(reference, candidates)?;
    nd.sort_by(f64::total_cmp);
    let need = ((target * nd.len() as f64).ceil() as usize).clamp(1, nd.len());
    Ok(nd[need - 1])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverageCurves {
    pub epsilon: Vec<f64>,
    pub dpp: Vec<f64>,
    pub iid: Vec<f64>,
}

/// Gaussian fitted to a sample (mean, covariance diagonally loaded with
/// `1e-8` when singular).
pub fn fit_gaussian(xs: &[Point]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if xs.is_empty() {
        return Err(Error::Empty("cannot fit a Gaussian to an empty sample".into()));
    }
    let d = xs[0].len();
    let n = xs.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| xs.iter().map(|x| x[j]).sum::<f64>() / n).collect();
    let mut cov = DMatrix::zeros(d, d);
    for x in xs {
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] += (x[i] - mean[i]) * (x[j] - mean[j]) / n;
            }
        }
    }
    if cov.clone().cholesky().is_none() {
        for i in 0..d {
            cov[(i, i)] += 1e-8;
        }
    }
    Ok((mean, cov))
}

/// Kernel for diverse perturbations of a reference set: quality centered at
/// the reference mean, quality and similarity covariances both equal to the
/// reference covariance.
pub fn reference_kernel(reference: &[Point]) -> Result<KernelSpec> {
    let (mean, cov) = fit_gaussian(reference)?;
    KernelSpec::new(
        mean.len(),
        QualitySpec::Gaussian { center: mean, cov: cov.clone() },
        SimilaritySpec::Gaussian { cov },
        Domain::Full,
    )
}

/// Coverage curves of DPP samples against variance-matched i.i.d. Gaussian
/// samples of equal size, averaged over runs, on a common ε grid.
pub fn coverage_experiment(
    reference: &[Point],
    dpp_samples: &[SampleSet],
    n_grid: usize,
    rng: &mut RngStream,
) -> Result<CoverageCurves> {
    if dpp_samples.is_empty() || dpp_samples.iter().any(|s| s.is_empty()) {
        return Err(Error::Empty("coverage experiment needs nonempty DPP samples".into()));
    }
    let mut dpp_nd = Vec::new();
    let mut iid_nd = Vec::new();
    for s in dpp_samples {
        let (mean, cov) = fit_gaussian(s)?;
        let iid: Vec<Point> = (0..s.len()).map(|_| rng.mvn(&mean, &cov)).collect::<Result<_>>()?;
        dpp_nd.push(nearest_distances(reference, s)?);
        iid_nd.push(nearest_distances(reference, &iid)?);
    }
    let top = dpp_nd.iter().chain(&iid_nd).flatten().copied().fold(0.0, f64::max);
    let n_grid = n_grid.max(2);
    let epsilon: Vec<f64> = (0..n_grid).map(|i| top * i as f64 / (n_grid - 1) as f64).collect();
    let curve = |all: &[Vec<f64>]| -> Vec<f64> {
        epsilon
            .iter()
            .map(|&e| {
                all.iter().map(|nd| nd.iter().filter(|&&v| v <= e).count() as f64 / nd.len() as f64).sum::<f64>()
                    / all.len() as f64
            })
            .collect()
    };
    Ok(CoverageCurves { dpp: curve(&dpp_nd), iid: curve(&iid_nd), epsilon })
}
