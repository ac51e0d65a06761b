#[allow(dead_code)] // `ALL` is only read by the acceptance binary
mod invariants;

use proptest::prelude::*;

fn run(check: invariants::Check, seed: u64) -> Result<(), TestCaseError> {
    check(seed).map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn erf_complex_matches_real_axis(seed in any::<u64>()) { run(invariants::erf_complex_real_axis, seed)?; }
    #[test]
    fn erf_matches_quadrature(seed in any::<u64>()) { run(invariants::erf_quadrature, seed)?; }
    #[test]
    fn gram_schmidt_orthonormal(seed in any::<u64>()) { run(invariants::gram_schmidt_orthonormal, seed)?; }
    #[test]
    fn inverse_cdf_roundtrip(seed in any::<u64>()) { run(invariants::inverse_cdf_roundtrip, seed)?; }
    #[test]
    fn kernel_matrix_psd(seed in any::<u64>()) { run(invariants::kernel_matrix_psd, seed)?; }
    #[test]
    fn spectrum_tensor_product(seed in any::<u64>()) { run(invariants::spectrum_tensor_product, seed)?; }
    #[test]
    fn esp_recursion(seed in any::<u64>()) { run(invariants::esp_recursion, seed)?; }
    #[test]
    fn select_k_shape(seed in any::<u64>()) { run(invariants::select_k_shape, seed)?; }
    #[test]
    fn schur_identity(seed in any::<u64>()) { run(invariants::schur_identity, seed)?; }
    #[test]
    fn conditional_nonnegative(seed in any::<u64>()) { run(invariants::conditional_nonnegative, seed)?; }
    #[test]
    fn nystrom_exact_on_finite_rank(seed in any::<u64>()) { run(invariants::nystrom_exact_finite_rank, seed)?; }
    #[test]
    fn movement_translation_invariant(seed in any::<u64>()) { run(invariants::movement_translation, seed)?; }
    #[test]
    fn coverage_monotone(seed in any::<u64>()) { run(invariants::coverage_monotone, seed)?; }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 4, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn hermitian_eig_reconstructs(seed in any::<u64>()) { run(invariants::hermitian_reconstruction, seed)?; }
    #[test]
    fn phase2_keeps_c_orthonormal(seed in any::<u64>()) { run(invariants::phase2_orthonormal, seed)?; }
    #[test]
    fn cdf_monotone_with_limits(seed in any::<u64>()) { run(invariants::cdf_monotone_limits, seed)?; }
    #[test]
    fn seed_determinism(seed in any::<u64>()) { run(invariants::seed_determinism, seed)?; }
}
