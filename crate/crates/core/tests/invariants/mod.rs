//! Randomized invariant checks shared by the proptest suite and the
//! acceptance runner. Each check takes a seed and derives its inputs from it.

use contdpp::diagnostics::{average_movement, coverage_rate};
use contdpp::dual::{phase2_step, select_k, DualRepresentation, EspTable};
use contdpp::features::{FeatureMap, Method, NystromMap};
use contdpp::gibbs::{full_conditional, full_conditional_cdf, GibbsKdppState};
use contdpp::kernel::{Domain, GaussianSpectrum, KernelSpec, Point, QualitySpec, SimilaritySpec};
use contdpp::numerics::linalg::{c_inner, ln_det_spd, CMatrix, CVector};
use contdpp::numerics::{erf, erf_complex, gram_schmidt_c, hermitian_eig, invert_monotone_cdf, norm_cdf, RngStream};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type Check = fn(u64) -> Result<(), String>;

/// `(name, check, cases)`.
pub const ALL: &[(&str, Check, u32)] = &[
    ("erf_complex_matches_real_axis", erf_complex_real_axis, 64),
    ("erf_matches_quadrature", erf_quadrature, 64),
    ("hermitian_eig_reconstructs", hermitian_reconstruction, 12),
    ("gram_schmidt_orthonormal", gram_schmidt_orthonormal, 64),
    ("inverse_cdf_roundtrip", inverse_cdf_roundtrip, 64),
    ("kernel_matrix_psd", kernel_matrix_psd, 64),
    ("spectrum_tensor_product", spectrum_tensor_product, 16),
    ("esp_recursion", esp_recursion, 64),
    ("select_k_returns_distinct_sorted", select_k_shape, 64),
    ("phase2_keeps_c_orthonormal", phase2_orthonormal, 16),
    ("schur_identity", schur_identity, 32),
    ("conditional_nonnegative", conditional_nonnegative, 32),
    ("cdf_monotone_with_limits", cdf_monotone_limits, 16),
    ("nystrom_exact_on_finite_rank", nystrom_exact_finite_rank, 32),
    ("movement_translation_invariant", movement_translation, 64),
    ("coverage_monotone", coverage_monotone, 64),
    ("seed_determinism", seed_determinism, 8),
];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_spd(d: usize, lo: f64, hi: f64, rng: &mut RngStream) -> DMatrix<f64> {
    // random rotation of a diagonal with eigenvalues in [lo, hi]
    let a = DMatrix::from_fn(d, d, |_, _| rng.normal());
    let q = a.qr().q();
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| rng.uniform_range(lo, hi)));
    let m = &q * diag * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Box domains need axis-aligned covariances.
fn random_cov(d: usize, lo: f64, hi: f64, diagonal: bool, rng: &mut RngStream) -> DMatrix<f64> {
    if diagonal {
        DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| rng.uniform_range(lo, hi)))
    } else {
        random_spd(d, lo, hi, rng)
    }
}

fn random_gaussian_kernel(d: usize, boxed: bool, rng: &mut RngStream) -> KernelSpec {
    let center: Vec<f64> = (0..d).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
    let domain = if boxed {
        Domain::Box {
            lo: center.iter().map(|c| c - rng.uniform_range(0.3, 2.0)).collect(),
            hi: center.iter().map(|c| c + rng.uniform_range(0.3, 2.0)).collect(),
        }
    } else {
        Domain::Full
    };
    KernelSpec::new(
        d,
        QualitySpec::Gaussian { center, cov: random_cov(d, 0.2, 1.5, boxed, rng) },
        SimilaritySpec::Gaussian { cov: random_cov(d, 0.05, 1.0, boxed, rng) },
        domain,
    )
    .expect("valid kernel")
}

fn random_points(kernel: &KernelSpec, n: usize, rng: &mut RngStream) -> Vec<Point> {
    let d = kernel.dim();
    (0..n)
        .map(|_| match kernel.domain() {
            Domain::Box { lo, hi } => (0..d).map(|i| rng.uniform_range(lo[i], hi[i])).collect(),
            Domain::Full => {
                let c = kernel.quality_center().expect("gaussian quality").to_vec();
                c.iter().map(|v| v + rng.normal()).collect()
            }
        })
        .collect()
}

pub fn erf_complex_real_axis(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    for _ in 0..32 {
        let x = rng.uniform_range(-6.0, 6.0);
        let z = erf_complex(Complex64::new(x, 0.0)).map_err(e2s)?;
        ensure((z.re - erf(x)).abs() <= 1e-12 && z.im.abs() <= 1e-12, || format!("x={x}: {z} vs {}", erf(x)))?;
    }
    Ok(())
}

pub fn erf_quadrature(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let c = 2.0 / std::f64::consts::PI.sqrt();
    for _ in 0..8 {
        let x = rng.uniform_range(-6.0, 6.0);
        let want = contdpp_oracle::integrate(&mut |t| c * (-t * t).exp(), 0.0, x, 1e-15).map_err(e2s)?;
        ensure((erf(x) - want).abs() <= 1e-14, || format!("erf({x}) = {} vs {want}", erf(x)))?;
    }
    Ok(())
}

pub fn hermitian_reconstruction(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let n = 1 + rng.index(200);
    let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.normal(), rng.normal()));
    let m = (&a + a.adjoint()).scale(0.5);
    let (vals, v) = hermitian_eig(&m).map_err(e2s)?;
    let lam = CMatrix::from_diagonal(&CVector::from_iterator(n, vals.iter().map(|&x| Complex64::new(x, 0.0))));
    let resid = (&v * lam * v.adjoint() - &m).norm();
    ensure(resid <= 1e-8 * m.norm(), || format!("n={n}: residual {resid:e}"))
}

pub fn gram_schmidt_orthonormal(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let n = 1 + rng.index(10);
    let m = 1 + rng.index(n);
    let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.normal(), rng.normal()));
    let c = &a * a.adjoint() + CMatrix::identity(n, n).scale(1e-3);
    let vs: Vec<CVector> = (0..m).map(|_| CVector::from_fn(n, |_, _| Complex64::new(rng.normal(), rng.normal()))).collect();
    let gram = CMatrix::from_fn(m, m, |i, j| c_inner(&vs[i], &c, &vs[j]));
    let (gv, _) = hermitian_eig(&gram).map_err(e2s)?;
    if gv[m - 1] <= 0.0 || gv[0] / gv[m - 1] > 1e8 {
        return Ok(());
    }
    let out = gram_schmidt_c(&vs, &c).map_err(e2s)?;
    for i in 0..m {
        for j in 0..m {
            let want = if i == j { 1.0 } else { 0.0 };
            let got = c_inner(&out[i], &c, &out[j]);
            ensure((got - want).norm() <= 1e-8, || format!("<{i},{j}>_C = {got}"))?;
        }
    }
    Ok(())
}

pub fn inverse_cdf_roundtrip(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let mu = rng.uniform_range(-3.0, 3.0);
    let s = rng.uniform_range(0.1, 3.0);
    let w = rng.uniform();
    // two-component normal mixture with a near-flat gap
    let f = |x: f64| w * norm_cdf((x - mu) / s) + (1.0 - w) * norm_cdf((x - mu - 8.0 * s) / s);
    for _ in 0..8 {
        let x = mu + s * rng.uniform_range(-4.0, 12.0);
        let u = f(x);
        if !(u > 1e-6 && u < 1.0 - 1e-6) {
            continue;
        }
        let back = invert_monotone_cdf(f, mu - 20.0 * s, mu + 30.0 * s, u).map_err(e2s)?;
        ensure((f(back) - u).abs() <= 1e-8, || format!("F(F^-1({u})) = {}", f(back)))?;
    }
    Ok(())
}

pub fn kernel_matrix_psd(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let d = 1 + rng.index(2);
    let k = random_gaussian_kernel(d, rng.uniform() < 0.5, &mut rng);
    let n = 1 + rng.index(12);
    let xs = random_points(&k, n, &mut rng);
    let m = k.kernel_matrix(&xs).map_err(e2s)?;
    let det = m.clone().determinant();
    ensure(det >= -1e-10, || format!("det = {det:e}"))?;
    ensure((&m - m.transpose()).amax() == 0.0, || "kernel matrix not symmetric".into())
}

pub fn spectrum_tensor_product(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let sp1 = GaussianSpectrum::new(rng.uniform_range(0.2, 3.0), rng.uniform_range(0.05, 3.0), 1).map_err(e2s)?;
    let d = 2 + rng.index(2);
    let spd = GaussianSpectrum { d, ..sp1 };
    let one = sp1.eigenvalues(8).map_err(e2s)?;
    for e in spd.eigenvalues(8).map_err(e2s)? {
        let want: f64 = e.index.iter().map(|&n| one.iter().find(|o| o.index[0] == n).unwrap().value).product();
        ensure(e.value == want, || format!("{:?}: {} vs {want}", e.index, e.value))?;
    }
    Ok(())
}

pub fn esp_recursion(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let n = 1 + rng.index(30);
    let lam: Vec<f64> = (0..n).map(|_| (4.0 * rng.normal()).exp()).collect();
    let t = EspTable::new(&lam, n).map_err(e2s)?;
    for m in 0..=n {
        ensure(t.value(0, m) == 1.0, || format!("e_0({m}) != 1"))?;
    }
    for k in 1..=n {
        for m in 1..=n {
            let got = t.value(k, m);
            let want = t.value(k, m - 1) + lam[m - 1] * t.value(k - 1, m - 1);
            if k > m {
                ensure(got == 0.0, || format!("e_{k}({m}) = {got} for k > n"))?;
            } else {
                ensure((got - want).abs() <= 1e-12 * want, || format!("e_{k}({m}): {got} vs {want}"))?;
            }
        }
    }
    Ok(())
}

pub fn select_k_shape(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let n = 1 + rng.index(20);
    let k = rng.index(n + 1);
    let lam: Vec<f64> = (0..n).map(|_| rng.uniform_range(0.01, 10.0)).collect();
    let idx = select_k(&lam, k, &mut rng).map_err(e2s)?;
    ensure(idx.len() == k && idx.windows(2).all(|w| w[0] < w[1]) && idx.iter().all(|&i| i < n), || {
        format!("bad selection {idx:?} for k={k}, D={n}")
    })
}

pub fn phase2_orthonormal(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let d = 1 + rng.index(2);
    let k = random_gaussian_kernel(d, rng.uniform() < 0.5, &mut rng);
    let method = if rng.uniform() < 0.5 { Method::Rff } else { Method::Nystrom };
    let dual = DualRepresentation::build(&k, method, 4 + rng.index(7), &mut rng).map_err(e2s)?;
    let kk = 1 + rng.index(3);
    let mut vs = match dual.phase1_kdpp(kk, &mut rng) {
        Ok(v) => v,
        Err(_) => return Ok(()),
    };
    let c = dual.dual_matrix();
    while !vs.is_empty() {
        let before = vs.len();
        let (_, next) = phase2_step(dual.map(), c, &vs, &mut rng).map_err(e2s)?;
        ensure(next.len() + 1 == before, || "basis did not shrink by one".into())?;
        for i in 0..next.len() {
            for j in 0..next.len() {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = c_inner(&next[i], c, &next[j]);
                ensure((got - want).norm() <= 1e-8, || format!("<{i},{j}>_C = {got}"))?;
            }
        }
        vs = next;
    }
    Ok(())
}

pub fn schur_identity(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let d = 1 + rng.index(2);
    let k = random_gaussian_kernel(d, rng.uniform() < 0.5, &mut rng);
    let n = 2 + rng.index(5);
    let xs = random_points(&k, n, &mut rng);
    let lx = k.kernel_matrix(&xs).map_err(e2s)?;
    let full = ln_det_spd(&lx);
    // floating-point agreement is bounded by cond(L_X) * eps
    let (ev, _) = contdpp::numerics::linalg::symmetric_eig(&lx).map_err(e2s)?;
    if !full.is_finite() || !(ev[n - 1] > 0.0) || ev[0] / ev[n - 1] > 1e4 {
        return Ok(());
    }
    let i = rng.index(n);
    let others: Vec<Point> = xs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
    let rest = ln_det_spd(&k.kernel_matrix(&others).map_err(e2s)?);
    let cond = full_conditional(&k, &xs, i).map_err(e2s)?.value(&xs[i]);
    let got = rest + cond.ln();
    ensure((got - full).abs() <= 1e-10, || format!("ln det {full} vs {got}"))
}

pub fn conditional_nonnegative(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let d = 1 + rng.index(2);
    let k = random_gaussian_kernel(d, rng.uniform() < 0.5, &mut rng);
    let xs = random_points(&k, 2 + rng.index(6), &mut rng);
    let dens = full_conditional(&k, &xs, 0).map_err(e2s)?;
    for y in random_points(&k, 64, &mut rng) {
        let (v, scale) = dens.value_and_scale(&y);
        ensure(v >= -1e-8 * scale, || format!("density {v:e} at {y:?}"))?;
    }
    Ok(())
}

fn check_cdf(what: &str, f: &mut dyn FnMut(f64) -> Result<f64, String>, lo: f64, hi: f64) -> Result<(), String> {
    let a = f(lo)?;
    let b = f(hi)?;
    ensure(a.abs() <= 1e-8 && (b - 1.0).abs() <= 1e-8, || format!("{what}: limits {a:e}, {b}"))?;
    let mut prev = a;
    for i in 1..=64 {
        let t = lo + (hi - lo) * i as f64 / 64.0;
        let v = f(t)?;
        ensure(v >= prev - 1e-8, || format!("{what}: cdf decreases at {t}: {prev} -> {v}"))?;
        prev = v;
    }
    Ok(())
}

fn cdf_window(k: &KernelSpec, axis: usize) -> (f64, f64) {
    match k.domain() {
        Domain::Box { lo, hi } => (lo[axis], hi[axis]),
        Domain::Full => {
            let c = k.quality_center().unwrap()[axis];
            let s = k.quality_cov().unwrap()[(axis, axis)].sqrt();
            (c - 14.0 * s, c + 14.0 * s)
        }
    }
}

pub fn cdf_monotone_limits(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let d = 1 + rng.index(2);
    let k = random_gaussian_kernel(d, rng.uniform() < 0.5, &mut rng);
    let method = if rng.uniform() < 0.5 { Method::Rff } else { Method::Nystrom };
    let dual = DualRepresentation::build(&k, method, 6, &mut rng).map_err(e2s)?;
    let vs = dual.phase1_kdpp(2, &mut rng).map_err(e2s)?;
    let prefix: Vec<f64> = random_points(&k, 1, &mut rng)[0][..d - 1].to_vec();
    let axis = d - 1;
    let (lo, hi) = cdf_window(&k, axis);
    check_cdf("phase 2", &mut |t| dual.map().phase2_cdf(&vs, axis, &prefix, t).map_err(e2s), lo, hi)?;
    let state = GibbsKdppState::from_points(&k, random_points(&k, 4, &mut rng)).map_err(e2s)?;
    check_cdf("Gibbs", &mut |t| full_conditional_cdf(&k, &state, 1, axis, &prefix, t).map_err(e2s), lo, hi)
}

pub fn nystrom_exact_finite_rank(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let d = 1 + rng.index(2);
    let center: Vec<f64> = (0..d).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
    let gamma = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| rng.uniform_range(0.3, 2.0)));
    let k = KernelSpec::new(
        d,
        QualitySpec::Gaussian { center, cov: gamma },
        SimilaritySpec::Polynomial { degree: 1, offset: rng.uniform_range(0.5, 2.0) },
        Domain::Full,
    )
    .map_err(e2s)?;
    // rank d + 1: the landmarks only need to span
    let zs = random_points(&k, d + 1, &mut rng);
    let map = FeatureMap::Nystrom(NystromMap::from_landmarks(&k, zs).map_err(e2s)?);
    for p in random_points(&k, 6, &mut rng).chunks(2) {
        let (x, y) = (&p[0], &p[1]);
        let want = k.l(x, y);
        let got = map.l_tilde(x, y);
        let scale = (k.l(x, x) * k.l(y, y)).sqrt().max(1e-300);
        ensure((got.re - want).abs() <= 1e-8 * scale && got.im.abs() <= 1e-8 * scale, || {
            format!("L̃ {got} vs L {want}")
        })?;
    }
    Ok(())
}

pub fn movement_translation(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let k = 1 + rng.index(5);
    let chain: Vec<Vec<Point>> = (0..10).map(|_| (0..k).map(|_| vec![rng.normal()]).collect()).collect();
    let shift = rng.uniform_range(-100.0, 100.0);
    let moved: Vec<Vec<Point>> = chain.iter().map(|s| s.iter().map(|p| vec![p[0] + shift]).collect()).collect();
    let a = average_movement(&chain).map_err(e2s)?;
    let b = average_movement(&moved).map_err(e2s)?;
    ensure((a - b).abs() <= 1e-9 * a.max(1.0), || format!("{a} vs {b}"))
}

pub fn coverage_monotone(seed: u64) -> Result<(), String> {
    let mut rng = RngStream::new(seed, 0);
    let d = 1 + rng.index(3);
    let reference: Vec<Point> = (0..40).map(|_| (0..d).map(|_| rng.normal()).collect()).collect();
    let cands: Vec<Point> = (0..8).map(|_| (0..d).map(|_| rng.normal()).collect()).collect();
    let (e1, e2) = (rng.uniform_range(0.0, 2.0), rng.uniform_range(0.0, 2.0));
    let (lo, hi) = (e1.min(e2), e1.max(e2));
    let a = coverage_rate(&reference, &cands, lo).map_err(e2s)?;
    let b = coverage_rate(&reference, &cands, hi).map_err(e2s)?;
    let c = coverage_rate(&reference, &cands[..4], hi).map_err(e2s)?;
    ensure(a <= b && c <= b, || format!("coverage not monotone: {a} {b} {c}"))
}

pub fn seed_determinism(seed: u64) -> Result<(), String> {
    let k = KernelSpec::isotropic(2, 1.0, 0.3).map_err(e2s)?;
    let draw = |s: u64| -> Result<Vec<Point>, String> {
        let mut rng = RngStream::new(s, 0);
        let dual = DualRepresentation::build(&k, Method::Nystrom, 10, &mut rng).map_err(e2s)?;
        dual.sample_kdpp(3, &mut rng).map_err(e2s)
    };
    let a = draw(seed)?;
    let b = draw(seed)?;
    let bits = |v: &Vec<Point>| v.iter().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
    ensure(bits(&a) == bits(&b), || "same seed gave different samples".into())
}
