//! Dense linear algebra and numerical analysis primitives.

mod calculus;
mod expm;
mod matrix;
mod rank;

pub use calculus::{
    default_mixed_step, directional_derivative, gauss_legendre8, matrix_derivative, mixed_partials,
    mixed_partials_with, newton_solve, rk4_pair_flow, rk4_steps, NewtonOptions, Stencil,
    DEFAULT_STEP,
};
pub use expm::{mat_exp, mat_log, mat_sqrt};
pub use matrix::{add, basis_vector, dot, max_abs, norm2, scaled, sub, Lu, Matrix, Vector};
pub use rank::{
    column_space, least_squares, orthonormal_basis, project_out, projection_residual, rank,
    rank_and_kernel, Tolerance,
};
