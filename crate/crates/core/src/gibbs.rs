//! Gibbs sampler for continuous k-DPPs using the Schur-complement full
//! conditional `p(x_k | rest) ∝ L(x,x) - Σ_ij M_ij L(x_i,x) L(x_j,x)`.

use crate::density::TermDensity;
use crate::error::{Error, Result};
use crate::features::pair_density;
use crate::kernel::{KernelSpec, Point, SampleSet};
use crate::numerics::linalg::sym_inverse_jittered;
use crate::numerics::RngStream;
use nalgebra::DMatrix;

const NEG_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct GibbsKdppState {
    pub points: SampleSet,
    pub sweep: usize,
}

impl GibbsKdppState {
    /// `k` i.i.d. draws from the density proportional to `q²`.
    pub fn init(kernel: &KernelSpec, k: usize, rng: &mut RngStream) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        let base = pair_density(kernel, &[], &DMatrix::zeros(0, 0), 1.0)?;
        let points = (0..k).map(|_| base.sample_point(rng)).collect::<Result<Vec<_>>>()?;
        Ok(GibbsKdppState { points, sweep: 0 })
    }

    pub fn from_points(kernel: &KernelSpec, points: SampleSet) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        for p in &points {
            if p.len() != kernel.dim() {
                return Err(Error::DimensionMismatch { expected: kernel.dim(), got: p.len() });
            }
            if !kernel.domain().contains(p) {
                return Err(Error::Domain(format!("point {p:?} outside the domain")));
            }
        }
        Ok(GibbsKdppState { points, sweep: 0 })
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }
}

/// Unnormalized full conditional of point `index` given the others.
pub fn full_conditional(kernel: &KernelSpec, points: &[Point], index: usize) -> Result<TermDensity> {
    if index >= points.len() {
        return Err(Error::InvalidParameter(format!("index {index} out of range")));
    }
    let others: Vec<Point> = points.iter().enumerate().filter(|(i, _)| *i != index).map(|(_, p)| p.clone()).collect();
    let m = if others.is_empty() {
        DMatrix::zeros(0, 0)
    } else {
        sym_inverse_jittered(&kernel.kernel_matrix(&others)?)?
    };
    pair_density(kernel, &others, &(-m), 1.0)
}

/// CDF of the full conditional of point `index` along `axis`, earlier axes
/// fixed at `prefix` and later axes integrated out.
pub fn full_conditional_cdf(
    kernel: &KernelSpec,
    state: &GibbsKdppState,
    index: usize,
    axis: usize,
    prefix: &[f64],
    t: f64,
) -> Result<f64> {
    let dens = full_conditional(kernel, &state.points, index)?;
    let cond = dens.axis_conditional(axis, prefix)?;
    check_nonnegative(cond.pdf_and_scale(t), &[t])?;
    Ok(cond.cdf(t))
}

fn check_nonnegative((v, scale): (f64, f64), at: &[f64]) -> Result<()> {
    if v < -NEG_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NegativeDensity { value: v, location: at.to_vec() });
    }
    Ok(())
}

/// One systematic scan over indices `0..k`.
pub fn gibbs_sweep(kernel: &KernelSpec, state: &mut GibbsKdppState, rng: &mut RngStream) -> Result<()> {
    for i in 0..state.k() {
        let dens = full_conditional(kernel, &state.points, i)?;
        let x = dens.sample_point(rng)?;
        check_nonnegative(dens.value_and_scale(&x), &x)?;
        state.points[i] = x;
    }
    state.sweep += 1;
    Ok(())
}

/// Run a chain and keep every `thin`-th state after `burn_in` cycles.
pub fn run_gibbs_kdpp(
    kernel: &KernelSpec,
    k: usize,
    n_cycles: usize,
    burn_in: usize,
    thin: usize,
    rng: &mut RngStream,
) -> Result<Vec<SampleSet>> {
    let state = GibbsKdppState::init(kernel, k, rng)?;
    run_from(kernel, state, n_cycles, burn_in, thin, rng)
}

/// As [`run_gibbs_kdpp`] from a given starting state.
pub fn run_from(
    kernel: &KernelSpec,
    mut state: GibbsKdppState,
    n_cycles: usize,
    burn_in: usize,
    thin: usize,
    rng: &mut RngStream,
) -> Result<Vec<SampleSet>> {
    if thin == 0 {
        return Err(Error::InvalidParameter("thin must be at least 1".into()));
    }
    if burn_in > n_cycles {
        return Err(Error::InvalidParameter("burn-in exceeds the number of cycles".into()));
    }
    let mut out = Vec::with_capacity((n_cycles - burn_in) / thin);
    for c in 1..=n_cycles {
        gibbs_sweep(kernel, &mut state, rng)?;
        if c > burn_in && (c - burn_in) % thin == 0 {
            out.push(state.points.clone());
        }
    }
    Ok(out)
}
