//! Dual sampler for low-rank continuous DPPs and k-DPPs.

use crate::error::{Error, Result};
use crate::features::{FeatureMap, Method};
use crate::kernel::{KernelSpec, Point, SampleSet};
use crate::numerics::linalg::{c_inner, gram_schmidt_c, hermitian_eig, CMatrix, CVector};
use crate::numerics::RngStream;

/// Elementary symmetric polynomials `e[k][n]` of the first `n` eigenvalues,
/// stored as logarithms.
#[derive(Clone, Debug)]
pub struct EspTable {
    ln_e: Vec<Vec<f64>>,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

impl EspTable {
    pub fn new(lambda: &[f64], kmax: usize) -> Result<Self> {
        if lambda.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParameter("eigenvalues must be finite and nonnegative".into()));
        }
        let d = lambda.len();
        let mut ln_e = vec![vec![f64::NEG_INFINITY; d + 1]; kmax + 1];
        for n in 0..=d {
            ln_e[0][n] = 0.0;
        }
        for n in 1..=d {
            let ln_l = lambda[n - 1].ln();
            for k in 1..=kmax {
                ln_e[k][n] = log_add(ln_e[k][n - 1], ln_l + ln_e[k - 1][n - 1]);
            }
        }
        Ok(EspTable { ln_e })
    }

    pub fn kmax(&self) -> usize {
        self.ln_e.len() - 1
    }

    pub fn len(&self) -> usize {
        self.ln_e[0].len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `ln e_k` of the first `n` values.
    pub fn ln_value(&self, k: usize, n: usize) -> f64 {
        self.ln_e[k][n]
    }

    /// `e_k` of the first `n` values (may overflow to `inf`).
    pub fn value(&self, k: usize, n: usize) -> f64 {
        self.ln_e[k][n].exp()
    }
}

/// Feature map together with its eigendecomposed dual matrix.
#[derive(Clone, Debug)]
pub struct DualRepresentation {
    map: FeatureMap,
    c: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

/// Negative eigenvalues of `C` down to `-DUAL_CLAMP * λ_max` are roundoff.
pub const DUAL_CLAMP: f64 = 1e-8;

impl DualRepresentation {
    pub fn new(map: FeatureMap) -> Result<Self> {
        let c = map.dual_matrix()?;
        let (mut eigenvalues, eigenvectors) = hermitian_eig(&c)?;
        // Nyström's pseudo-inverse amplifies roundoff in the null directions
        let top = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        for l in eigenvalues.iter_mut() {
            if *l < 0.0 {
                if *l < -DUAL_CLAMP * top {
                    return Err(Error::Numerical(format!("dual matrix has eigenvalue {l:e} (largest {top:e})")));
                }
                *l = 0.0;
            }
        }
        Ok(DualRepresentation { map, c, eigenvalues, eigenvectors })
    }

    pub fn build(kernel: &KernelSpec, method: Method, rank: usize, rng: &mut RngStream) -> Result<Self> {
        Self::new(FeatureMap::build(kernel, method, rank, rng)?)
    }

    pub fn map(&self) -> &FeatureMap {
        &self.map
    }

    pub fn dual_matrix(&self) -> &CMatrix {
        &self.c
    }

    /// Eigenvalues of `C`, descending; these are the nonzero eigenvalues of
    /// the approximate kernel operator.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `v_n / sqrt(v_n* C v_n)`.
    fn normalized(&self, n: usize) -> CVector {
        let v = self.eigenvectors.column(n).into_owned();
        let nrm = c_inner(&v, &self.c, &v).re.sqrt();
        v.unscale(nrm)
    }

    /// Independent Bernoulli(λ/(λ+1)) selection.
    pub fn phase1_dpp(&self, rng: &mut RngStream) -> Vec<CVector> {
        let mut out = Vec::new();
        for (n, &l) in self.eigenvalues.iter().enumerate() {
            if l > 0.0 && rng.uniform() < l / (l + 1.0) {
                out.push(self.normalized(n));
            }
        }
        out
    }

    /// Exactly `k` eigenvectors, chosen with probability proportional to the
    /// product of their eigenvalues.
    pub fn phase1_kdpp(&self, k: usize, rng: &mut RngStream) -> Result<Vec<CVector>> {
        let idx = select_k(&self.eigenvalues, k, rng)?;
        Ok(idx.into_iter().map(|n| self.normalized(n)).collect())
    }

    pub fn phase2(&self, vs: Vec<CVector>, rng: &mut RngStream) -> Result<SampleSet> {
        phase2_sample(&self.map, &self.c, vs, rng)
    }

    pub fn sample_dpp(&self, rng: &mut RngStream) -> Result<SampleSet> {
        let vs = self.phase1_dpp(rng);
        self.phase2(vs, rng)
    }

    pub fn sample_kdpp(&self, k: usize, rng: &mut RngStream) -> Result<SampleSet> {
        let vs = self.phase1_kdpp(k, rng)?;
        self.phase2(vs, rng)
    }
}

/// Indices chosen by the sequential ESP-ratio rule, scanning `n = D..1`.
pub fn select_k(lambda: &[f64], k: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
    let d = lambda.len();
    if k > d {
        return Err(Error::InsufficientRank { k });
    }
    let table = EspTable::new(lambda, k)?;
    if table.ln_value(k, d) == f64::NEG_INFINITY {
        return Err(Error::InsufficientRank { k });
    }
    let mut out = Vec::with_capacity(k);
    let mut rem = k;
    for n in (1..=d).rev() {
        if rem == 0 {
            break;
        }
        let p = if rem == n {
            1.0
        } else {
            let ln_p = lambda[n - 1].ln() + table.ln_value(rem - 1, n - 1) - table.ln_value(rem, n);
            ln_p.exp()
        };
        if rng.uniform() < p {
            out.push(n - 1);
            rem -= 1;
        }
    }
    if rem != 0 {
        return Err(Error::InsufficientRank { k });
    }
    out.reverse();
    Ok(out)
}

/// Sequential point sampling with the subspace update.
pub fn phase2_sample(map: &FeatureMap, c: &CMatrix, vs: Vec<CVector>, rng: &mut RngStream) -> Result<SampleSet> {
    let mut vs = vs;
    let mut out = Vec::with_capacity(vs.len());
    while !vs.is_empty() {
        let (x, next) = phase2_step(map, c, &vs, rng)?;
        vs = next;
        out.push(x);
    }
    Ok(out)
}

/// One Phase-2 step: draw a point from the current density, then return it
/// with the C-orthonormal basis of the subspace orthogonal to `B(x)`.
pub fn phase2_step(map: &FeatureMap, c: &CMatrix, vs: &[CVector], rng: &mut RngStream) -> Result<(Point, Vec<CVector>)> {
    let dens = map.phase2_density(vs)?;
    let x = dens.sample_point(rng)?;
    let bx = map.eval_b(&x);
    let s: Vec<_> = vs.iter().map(|v| v.dotc(&bx)).collect();
    let (i0, s0) = s
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, v)| (i, *v))
        .expect("nonempty");
    let vmax = vs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(s0.norm() > 1e-12 * bx.norm() * vmax) {
        return Err(Error::Numerical(format!(
            "all |v*B(x)| vanish at a sampled point (max {:e})",
            s0.norm()
        )));
    }
    let v0 = &vs[i0];
    let next: Vec<CVector> = vs
        .iter()
        .zip(&s)
        .enumerate()
        .filter(|(i, _)| *i != i0)
        .map(|(_, (v, si))| v - v0 * (si / s0).conj())
        .collect();
    Ok((x, gram_schmidt_c(&next, c)?))
}

/// Build the map, then draw one DPP sample.
pub fn sample_dpp(kernel: &KernelSpec, method: Method, rank: usize, rng: &mut RngStream) -> Result<SampleSet> {
    DualRepresentation::build(kernel, method, rank, rng)?.sample_dpp(rng)
}

/// Build the map, then draw one k-DPP sample.
pub fn sample_kdpp(kernel: &KernelSpec, method: Method, rank: usize, k: usize, rng: &mut RngStream) -> Result<SampleSet> {
    DualRepresentation::build(kernel, method, rank, rng)?.sample_kdpp(k, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn esp_small() {
        let t = EspTable::new(&[1.0, 2.0, 3.0], 3).unwrap();
        assert_eq!(t.value(0, 3), 1.0);
        assert!((t.value(1, 3) - 6.0).abs() < 1e-12);
        assert!((t.value(2, 3) - 11.0).abs() < 1e-12);
        assert!((t.value(3, 3) - 6.0).abs() < 1e-12);
        assert_eq!(t.value(3, 2), 0.0);
    }

    #[test]
    fn esp_rescales_without_losing_ratios() {
        let lam = vec![1e200; 6];
        let t = EspTable::new(&lam, 4).unwrap();
        // e_4 = C(6,4) 1e800
        let want = 15f64.ln() + 800.0 * 10f64.ln();
        assert!((t.ln_value(4, 6) - want).abs() < 1e-9 * want);
    }

    #[test]
    fn select_k_forced_and_ratio() {
        let mut rng = RngStream::new(11, 0);
        assert_eq!(select_k(&[0.5, 0.2, 0.1], 3, &mut rng).unwrap(), vec![0, 1, 2]);
        let mut first = 0;
        for _ in 0..20000 {
            if select_k(&[3.0, 1.0], 1, &mut rng).unwrap() == vec![0] {
                first += 1;
            }
        }
        let p = first as f64 / 20000.0;
        assert!((p - 0.75).abs() < 4.0 * (0.75 * 0.25 / 20000f64).sqrt());
        assert!(matches!(select_k(&[1.0, 0.0], 2, &mut rng), Err(Error::InsufficientRank { .. })));
    }

    #[test]
    fn kdpp_returns_k_points_and_is_deterministic() {
        let k = KernelSpec::isotropic(2, 1.0, 0.3).unwrap();
        for method in [Method::Rff, Method::Nystrom] {
            let a = sample_kdpp(&k, method, 12, 4, &mut RngStream::new(7, 1)).unwrap();
            let b = sample_kdpp(&k, method, 12, 4, &mut RngStream::new(7, 1)).unwrap();
            assert_eq!(a.len(), 4);
            assert_eq!(a, b);
        }
    }
}
