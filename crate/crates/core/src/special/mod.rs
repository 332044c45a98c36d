//! Gamma, digamma and Mittag-Leffler functions, plus the large-argument
//! leading terms of `E_{beta,2}`, `E_{beta,1}` and `E_{alpha,1}`.

mod asymptotic;
mod gamma;
mod mittag_leffler;

pub use asymptotic::*;
pub use gamma::{cos_pi, digamma, euler_gamma, gamma, ln_gamma, rgamma, sin_pi};
pub use mittag_leffler::{mittag_leffler, ml, MlParams};
