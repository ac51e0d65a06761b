pub mod datasets;
pub mod density;
pub mod diagnostics;
pub mod dual;
pub mod error;
pub mod exact;
pub mod features;
pub mod gibbs;
pub mod kernel;
pub mod mixture;
pub mod numerics;
pub mod poly;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/dual-sampling.md")]
    mod dual_sampling {}
    #[doc = include_str!("../../../book/src/gibbs.md")]
    mod gibbs {}
    #[doc = include_str!("../../../book/src/mixtures.md")]
    mod mixtures {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
