//! Forward and inverse solvers for a mixed-type time-fractional problem:
//! subdiffusion of order `alpha` in `(0, 1)` for `t > 0` glued at `t = 0`
//! to a fractional wave equation of order `beta` in `(1, 2)` on `(-T, 0)`.
//!
//! The forward solution is an eigenfunction series in Mittag-Leffler
//! functions; the inverse solver recovers `(alpha, beta)` from one Fourier
//! coefficient observed at `-t2` and the squared L2 norm observed at `t1`.

pub mod caputo;
pub mod error;
pub mod export;
pub mod forward;
pub mod inverse;
pub mod quadrature;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
