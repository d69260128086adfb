//! Fractional calculus of radial functions over a non-Archimedean local
//! field, at desk scale.
//!
//! A radial function depends on a point only through its normalized absolute
//! value, which ranges over the levels `q^n` for integer `n`; computationally
//! it is a complex sequence on a finite level window with explicit extension
//! models on both sides. On such functions this crate provides:
//!
//! * the closed-form ball/sphere/sector integrals of the level structure,
//!   each paired with a brute-force sphere-decomposition quadrature
//!   ([`local_field`]);
//! * the hypersingular fractional derivative `D^alpha` and its right inverse
//!   `I^alpha` (normalized by `I^alpha u (0) = 0`), including the logarithmic
//!   kernel branch at `alpha = 1` ([`riesz`]);
//! * a solver for the Cauchy problem `D^alpha u + a u = f`, `u(0) = u0`,
//!   reduced to a level-triangular integral equation and swept level by
//!   level, with a Picard-iteration cross-check, spectral-condition and
//!   decay diagnostics, and matrix-valued/vector-valued generalizations
//!   ([`cauchy`], [`matrix`]);
//! * a self-contained verification suite asserting the identities the whole
//!   construction rests on ([`verify`]).
//!
//! The numerical core is generic over the real scalar through [`scalar::Scalar`]
//! (`f32` or `f64`); the `*64` aliases below fix `f64`, which all shipped
//! tolerances assume.

pub mod cauchy;
pub mod error;
pub mod io;
pub mod local_field;
pub mod matrix;
pub mod radial;
pub mod riesz;
pub mod scalar;
pub mod verify;

pub use cauchy::{
    check_decay_hypothesis, check_spectral_condition, residual, solve_direct, solve_picard,
    CauchyProblem, DecayReport, PicardStats, ResidualReport, SolveReport, SpectralReport,
};
pub use error::{Error, Result};
pub use local_field::{oracle_ball_sum_adaptive, oracle_radial_sum, FieldParams};
pub use matrix::{
    check_spectral_condition_matrix, solve_matrix, MatrixCauchyProblem, MatrixSolveReport,
};
pub use radial::{
    BlockTailModel, Level, LevelGrid, MatrixRadialFunction, RadialFunction, TailModel,
    VectorRadialFunction,
};
pub use riesz::{
    apply_d, apply_i, constants, d_zero_stabilization, gamma_k, moment_integral_closed,
    riesz_potential_at_zero, verify_inverse_identity, AlphaOrder, InverseIdentityReport,
    RieszConstants,
};
pub use scalar::Scalar;

/// Complex value over `f64`.
pub type C64 = num_complex::Complex<f64>;
/// Radial function over `f64`.
pub type Radial64 = RadialFunction<f64>;
/// Vector-valued radial function over `f64`.
pub type VectorRadial64 = VectorRadialFunction<f64>;
/// Matrix-valued radial function over `f64`.
pub type MatrixRadial64 = MatrixRadialFunction<f64>;
/// Fractional order over `f64`.
pub type Alpha64 = AlphaOrder<f64>;
/// Scalar Cauchy problem over `f64`.
pub type Problem64 = CauchyProblem<f64>;
