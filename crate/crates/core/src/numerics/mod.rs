//! Numerical fractional calculus: Grünwald–Letnikov and L1 approximations
//! of the left and right Riemann–Liouville derivatives, the Mittag-Leffler
//! function, grid residuals, invariance checks and the `J` quadrature.

mod checks;
mod grid;
mod quad;
mod rl;
mod special;

pub use checks::{invariance_check, residual_on_grid, InvarianceReport, ResidualReport};
pub use grid::{Axis, GridFunction};
pub use quad::{j_quadrature, j_quadrature_fn, left_integral, right_integral, DEFAULT_NODES};
pub use rl::{
    gl_at, gl_weights, rl_derivative_grid, rl_derivative_series, right_rl_derivative_grid,
    right_rl_derivative_series, Direction, FracDerivSpec, RlOperator, Scheme,
};
pub use special::{gamma, ln_gamma, mittag_leffler, power_rule, rgamma};
