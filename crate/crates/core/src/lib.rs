//! Meso-scale asymptotic approximation of scalar transmission problems.
//!
//! A body (a ball of radius `R`, or the whole space) made of a matrix with
//! shear modulus `mu_O` contains a cluster of `N` small spherical inclusions
//! with moduli `mu_I`. The solution is approximated by
//!
//! ```text
//! u_N(x) ~ w_f(x) + sum_k C_k . ( D_k(x) - P_k grad_y H(x, O_k) )
//! ```
//!
//! where `w_f` solves the unperturbed problem, `D_k` and `P_k` are the dipole
//! field and polarization tensor of inclusion `k`, `H` is the regular part of
//! the Green's function and the vectors `C_k` solve a `3N x 3N` interaction
//! system.
//!
//! Module map:
//!
//! * [`geometry`]: materials, inclusions, clouds, metrics, the periodic
//!   spherical cluster generator and the cluster file format.
//! * [`kernels`]: closed-form model fields (unperturbed solution, Green's
//!   function of the ball, dipole fields, polarization tensors).
//! * [`system`]: assembly and solution of the interaction system.
//! * [`evaluator`]: evaluation of the approximation and its gradient.
//! * [`homog`]: effective-medium limit for large periodic clusters.
//! * [`validation`]: residual diagnostics of the constructed approximation.
//! * [`io`]: CSV formats shared by the command line tool.
//!
//! Units: moduli are in GPa and lengths in domain units. `u` carries units
//! length³/GPa for the radial source `max(r_f - |x|, 0)` and length/GPa for
//! the linear far field `x_1 / mu_O`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evaluator;
pub mod geometry;
pub mod homog;
pub mod io;
pub mod kernels;
pub mod system;
pub mod validation;

pub use error::{Error, Result};

/// Point or vector in three dimensions.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Real 3x3 matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
