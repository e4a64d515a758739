//! Complex linear algebra, adaptive integration and quadrature.

mod matrix;
mod ode;
mod quadrature;

pub use matrix::Complex2x2;
pub use ode::{integrate_ode, integrate_ode_piecewise, integrate_with_monitor, IntegratorConfig, Trajectory};
pub use quadrature::{quadrature_arc, quadrature_arc_lifted, quadrature_real, ArcPath};

pub use num_complex::Complex64;

/// The imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Real number lifted into the complex plane.
#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `e^{i theta}` for real theta.
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}
