//! Closed-form model fields.
//!
//! * [`w_f_eval`]: the unperturbed solution for a radial source in a ball or a
//!   linear far field in the whole space.
//! * [`GreenBall`], [`greens_ball`], [`grad_y_H`], [`hessian_G`]: the Green's
//!   function of the Dirichlet ball, built from the image point
//!   `R^2 y / |y|^2`, and its free-space counterpart.
//! * [`dipole_field_sphere`], [`polarization_sphere`]: dipole fields and
//!   polarization tensors of spheres.

mod background;
mod dipole;
mod green;

pub use background::{w_f_eval, BackgroundField, ScalarField};
pub use dipole::{contrast_ratio, dipole_field_sphere, polarization_sphere, Definiteness, DipoleEval, PolarizationTensor};
pub use green::{
    free_space, free_space_mixed_hessian, grad_y_H, greens_ball, hessian_G, BallGreenEval, GreenBall, Kernel, KernelEval,
};
