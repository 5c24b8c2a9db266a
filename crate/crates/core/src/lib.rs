//! Certified computation of the Omega constant `Ω` (the real root of
//! `x e^x = 1`), the Lambert W power series, the Artin–Hasse exponential and
//! the p-adic Omega constants `Ω_p = W_p(p)`, plus continued-fraction
//! diagnostics for rational approximations of `Ω`.

pub mod artin_hasse;
pub mod ball;
pub mod cli;
pub mod diophantine;
pub mod error;
pub mod exact;
pub mod lambert;
pub mod omega_real;
pub mod padic;
pub mod padic_omega;
pub mod powser;

pub use ball::BallReal;
pub use error::{Error, Result};
pub use exact::Rational;
