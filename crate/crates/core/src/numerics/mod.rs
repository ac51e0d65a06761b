//! Special functions, dense linear algebra, root finding and random streams.

mod faddeeva;
pub mod gauss1d;
pub mod linalg;
mod roots;
pub mod rng;
mod special;

pub use faddeeva::{erf_complex, faddeeva, ERF_COMPLEX_MAX_IM};
pub use linalg::{gram_schmidt_c, hermitian_eig, CMatrix, CVector};
pub use rng::RngStream;
pub use roots::{invert_monotone_cdf, CDF_TOL};
pub use special::{erf, erfc, erfcx, ln_binomial, ln_gamma, norm_cdf};

/// `erf` on the real line (alias kept for symmetry with [`erf_complex`]).
pub fn erf_real(x: f64) -> f64 {
    erf(x)
}
