//! Numerical building blocks: root finding, quadrature, ODE stepping and
//! finite differences.

pub mod fd;
pub mod ode;
pub mod quadrature;
pub mod roots;

pub use fd::Grid2;
pub use ode::Dopri5;
pub use quadrature::{integrate, Integral, QuadOptions};
pub use roots::{brent, BrentOptions, Root};
