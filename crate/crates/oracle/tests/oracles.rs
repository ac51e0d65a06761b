use contdpp_oracle::{brute_esp, conditional_cdf, det, discrete_grid_oracle, integrate, integrate_nd};

#[test]
fn gaussian_integral() {
    let v = integrate(&mut |x: f64| (-x * x).exp(), -10.0, 10.0, 1e-12).unwrap();
    assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
}

#[test]
fn separable_2d_integral() {
    let v = integrate_nd(&mut |x: &[f64]| x[0] * x[1] * x[1], &[(0.0, 1.0), (0.0, 2.0)], 1e-12).unwrap();
    assert!((v - 0.5 * 8.0 / 3.0).abs() < 1e-12);
}

#[test]
fn cdf_of_uniform_square() {
    let f = conditional_cdf(&mut |_: &[f64]| 1.0, &[(0.0, 1.0), (0.0, 1.0)], &[], 0.25, 1e-12).unwrap();
    assert!((f - 0.25).abs() < 1e-12);
    let g = conditional_cdf(&mut |x: &[f64]| x[1], &[(0.0, 1.0), (0.0, 1.0)], &[0.3], 0.5, 1e-12).unwrap();
    assert!((g - 0.25).abs() < 1e-12);
}

#[test]
fn esp_small_cases() {
    let l = [1.0, 2.0, 3.0];
    assert_eq!(brute_esp(&l, 0), 1.0);
    assert_eq!(brute_esp(&l, 1), 6.0);
    assert_eq!(brute_esp(&l, 2), 11.0);
    assert_eq!(brute_esp(&l, 3), 6.0);
    assert_eq!(brute_esp(&l, 4), 0.0);
}

#[test]
fn determinant_with_pivoting() {
    let m = vec![vec![0.0, 2.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 3.0]];
    assert!((det(&m) - -5.0).abs() < 1e-14);
}

#[test]
fn grid_oracle_normalized_and_repulsive() {
    let l = |x: &[f64], y: &[f64]| (-(x[0] - y[0]).powi(2) / 0.02).exp();
    let g = discrete_grid_oracle(&l, &[0.0], &[1.0], 20, 2).unwrap();
    assert_eq!(g.table.len(), 190);
    let total: f64 = g.table.iter().map(|e| e.1).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let p = |a: usize, b: usize| g.table.iter().find(|e| e.0 == [a, b]).unwrap().1;
    assert!(p(0, 1) < p(0, 19));
    assert_eq!(g.cell(&[0.999]), 19);
}
