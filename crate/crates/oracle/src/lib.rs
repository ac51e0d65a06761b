//! Independent reference computations for tests: adaptive Gauss-Kronrod
//! quadrature, brute-force elementary symmetric polynomials and the
//! discrete-grid DPP.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("enumeration of {0} subsets exceeds the budget")]
    Budget(u128),
    #[error("quadrature did not converge (estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive G7-K15 on `[a, b]`; infinite limits are mapped with
/// `x = t / (1 - t²)`.
pub fn integrate(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, rel_tol).map(|v| -v);
    }
    if a.is_infinite() || b.is_infinite() {
        let ta = if a.is_infinite() { -1.0 } else { map_inv(a) };
        let tb = if b.is_infinite() { 1.0 } else { map_inv(b) };
        let mut g = |t: f64| {
            let den = 1.0 - t * t;
            if den <= 0.0 {
                return 0.0;
            }
            let x = t / den;
            let v = f(x) * (1.0 + t * t) / (den * den);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        return adapt(&mut g, ta, tb, rel_tol);
    }
    adapt(f, a, b, rel_tol)
}

fn map_inv(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (-1.0 + (1.0 + 4.0 * x * x).sqrt()) / (2.0 * x)
    }
}

fn adapt(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let mut segs = vec![{
        let (v, e) = gk15(f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..5000 {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        let scale: f64 = segs.iter().map(|s| s.2.abs()).sum();
        if err <= rel_tol * scale.max(1e-300) || err < 1e-300 {
            return Ok(total);
        }
        let (i, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = segs.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(OracleError::Quadrature { estimate: total, error: err });
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        segs.push((lo, mid, v1, e1));
        segs.push((mid, hi, v2, e2));
    }
    let total: f64 = segs.iter().map(|s| s.2).sum();
    let err: f64 = segs.iter().map(|s| s.3).sum();
    Err(OracleError::Quadrature { estimate: total, error: err })
}

/// Nested adaptive quadrature over a product of intervals, `d <= 3`.
pub fn integrate_nd(f: &mut dyn FnMut(&[f64]) -> f64, bounds: &[(f64, f64)], rel_tol: f64) -> Result<f64> {
    if bounds.len() > 3 || bounds.is_empty() {
        return Err(OracleError::Invalid("nested quadrature supports 1 to 3 dimensions".into()));
    }
    let mut x = vec![0.0; bounds.len()];
    nested(f, bounds, &mut x, 0, rel_tol)
}

fn nested(f: &mut dyn FnMut(&[f64]) -> f64, bounds: &[(f64, f64)], x: &mut Vec<f64>, axis: usize, tol: f64) -> Result<f64> {
    let (a, b) = bounds[axis];
    let mut err = None;
    let v = {
        let mut g = |t: f64| {
            x[axis] = t;
            if axis + 1 == bounds.len() {
                f(x)
            } else {
                match nested(f, bounds, &mut x.clone(), axis + 1, tol) {
                    Ok(v) => v,
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            }
        };
        integrate(&mut g, a, b, tol)?
    };
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Conditional CDF along `axis`: earlier axes fixed at `prefix`, later axes
/// integrated over `bounds`.
pub fn conditional_cdf(
    f: &mut dyn FnMut(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    prefix: &[f64],
    t: f64,
    rel_tol: f64,
) -> Result<f64> {
    let axis = prefix.len();
    let d = bounds.len();
    if axis >= d {
        return Err(OracleError::Invalid("prefix too long".into()));
    }
    let mut g = |rest: &[f64]| {
        let mut x = prefix.to_vec();
        x.extend_from_slice(rest);
        f(&x)
    };
    let tail = &bounds[axis..];
    let mut cut = tail.to_vec();
    cut[0].1 = t.min(tail[0].1);
    if cut[0].1 <= cut[0].0 {
        return Ok(0.0);
    }
    let num = integrate_nd(&mut g, &cut, rel_tol)?;
    let den = integrate_nd(&mut g, tail, rel_tol)?;
    Ok(num / den)
}

/// `e_k(λ)` by enumerating all `k`-subsets.
pub fn brute_esp(lambda: &[f64], k: usize) -> f64 {
    let n = lambda.len();
    if k > n {
        return 0.0;
    }
    let mut total = 0.0;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        total += idx.iter().map(|&i| lambda[i]).product::<f64>();
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    total
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Determinant by partial-pivot elimination.
pub fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).expect("nonempty");
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for j in c..n {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    d
}

/// Exact k-DPP over a grid of cells.
#[derive(Clone, Debug)]
pub struct GridOracle {
    pub centers: Vec<Vec<f64>>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub bins: usize,
    /// `(sorted cell indices, probability)` for every k-subset.
    pub table: Vec<(Vec<usize>, f64)>,
}

impl GridOracle {
    /// Cell index of a point (row-major over axes).
    pub fn cell(&self, x: &[f64]) -> usize {
        let mut idx = 0;
        for (a, &xa) in x.iter().enumerate() {
            let w = (self.hi[a] - self.lo[a]) / self.bins as f64;
            let i = (((xa - self.lo[a]) / w).floor() as isize).clamp(0, self.bins as isize - 1) as usize;
            idx = idx * self.bins + i;
        }
        idx
    }
}

/// Bin the box, scale the midpoint kernel matrix by the cell volume and
/// enumerate all `k`-subsets with probability `det(L_S) / e_k`.
pub fn discrete_grid_oracle(
    l: &dyn Fn(&[f64], &[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    bins: usize,
    k: usize,
) -> Result<GridOracle> {
    let d = lo.len();
    if d == 0 || d > 2 || hi.len() != d || bins == 0 {
        return Err(OracleError::Invalid("grid oracle supports d = 1 or 2".into()));
    }
    let n = bins.pow(d as u32);
    let count = binom(n as u128, k as u128);
    if count > 10_000_000 {
        return Err(OracleError::Budget(count));
    }
    let widths: Vec<f64> = (0..d).map(|a| (hi[a] - lo[a]) / bins as f64).collect();
    let vol: f64 = widths.iter().product();
    let centers: Vec<Vec<f64>> = (0..n)
        .map(|c| {
            let mut rem = c;
            let mut x = vec![0.0; d];
            for a in (0..d).rev() {
                x[a] = lo[a] + (rem % bins) as f64 * widths[a] + 0.5 * widths[a];
                rem /= bins;
            }
            x
        })
        .collect();
    let km: Vec<Vec<f64>> = centers.iter().map(|x| centers.iter().map(|y| vol * l(x, y)).collect()).collect();
    let mut table = Vec::with_capacity(count as usize);
    let mut total = 0.0;
    if k == 0 {
        table.push((vec![], 1.0));
    } else {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let sub: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| km[i][j]).collect()).collect();
            let p = det(&sub).max(0.0);
            total += p;
            table.push((idx.clone(), p));
            if !next_combination(&mut idx, n) {
                break;
            }
        }
        for e in table.iter_mut() {
            e.1 /= total;
        }
    }
    Ok(GridOracle { centers, lo: lo.to_vec(), hi: hi.to_vec(), bins, table })
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_gaussian() {
        let v = integrate(&mut |x| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let w = integrate_nd(&mut |x| (-(x[0] * x[0] + x[1] * x[1])).exp(), &[(0.0, 1.0), (-1.0, 2.0)], 1e-11).unwrap();
        let e1 = 0.746824132812427;
        let e2 = 0.5 * std::f64::consts::PI.sqrt() * (0.842700792949715 + 0.995322265018953);
        assert!((w - e1 * e2).abs() < 1e-12);
    }

    #[test]
    fn esp_enumeration() {
        assert_eq!(brute_esp(&[1.0, 2.0, 3.0], 2), 11.0);
        assert_eq!(brute_esp(&[1.0; 6], 3), 20.0);
    }

    #[test]
    fn grid_sums_to_one() {
        let l = |x: &[f64], y: &[f64]| (-(x[0] - y[0]).powi(2) / 0.02).exp();
        let g = discrete_grid_oracle(&l, &[0.0], &[1.0], 30, 2).unwrap();
        let s: f64 = g.table.iter().map(|e| e.1).sum();
        assert!((s - 1.0).abs() < 1e-10);
        assert_eq!(g.cell(&[0.999]), 29);
    }
}
