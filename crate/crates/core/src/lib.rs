//! Balanced numbers and small gaps between almost prime powers.
//!
//! The crate is organised bottom-up:
//!
//! * [`sieve`] builds windowed smallest-prime-factor tables and the arithmetic
//!   functions (Möbius, Euler φ, offset logarithmic integral) every other
//!   module consumes.
//! * [`balanced`] classifies ε-balanced integers and counts the star sets
//!   `P*_{r,ε}(N)` over windows `[N, 2N)`.
//! * [`density`] evaluates the density constant `C₀(r, ε)` with closed form,
//!   adaptive quadrature and Monte Carlo routes.
//! * [`tuples`] covers admissible tuples, the singular series and the
//!   positivity calculus used to pick `k` and `l`.
//! * [`weights`] evaluates the truncated divisor-sum weight `Λ_R(n; H, l)` and
//!   the empirical second moments it is measured against.
//! * [`equidist`] computes Bombieri–Vinogradov style discrepancy sums.
//!
//! All logarithms are natural logarithms.

pub mod balanced;
pub mod density;
pub mod equidist;
mod error;
pub mod quad;
pub mod sieve;
pub mod tuples;
pub mod weights;

pub use error::{Error, Result};
pub use sieve::{
    build_factor_table, euler_phi, log_integral, mobius, FactorTable, Factorization,
};
