use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::Inclusion;
use crate::{Mat3, Vec3};

/// `(mu_I - mu_O) / (mu_I + 2 mu_O)`.
pub fn contrast_ratio(mu_o: f64, mu_i: f64) -> f64 {
    (mu_i - mu_o) / (mu_i + 2.0 * mu_o)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    Negative,
    Positive,
    Zero,
    Indefinite,
}

impl Definiteness {
    /// Classifies a symmetric matrix by the signs of its eigenvalues.
    pub fn of(m: &Mat3) -> Self {
        let ev = m.symmetric_eigenvalues();
        if ev.iter().all(|&l| l == 0.0) {
            Definiteness::Zero
        } else if ev.iter().all(|&l| l < 0.0) {
            Definiteness::Negative
        } else if ev.iter().all(|&l| l > 0.0) {
            Definiteness::Positive
        } else {
            Definiteness::Indefinite
        }
    }
}

/// Polarization tensor of one inclusion, in units of `mu * length^3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationTensor {
    pub matrix: Mat3,
    pub definiteness: Definiteness,
}

impl PolarizationTensor {
    pub fn new(matrix: Mat3) -> Self {
        Self {
            definiteness: Definiteness::of(&matrix),
            matrix,
        }
    }
}

/// `4 pi a^3 mu_O (mu_I - mu_O) / (mu_I + 2 mu_O) I`.
pub fn polarization_sphere(radius: f64, mu_o: f64, mu_i: f64) -> PolarizationTensor {
    let p = 4.0 * PI * radius.powi(3) * mu_o * contrast_ratio(mu_o, mu_i);
    let definiteness = if p < 0.0 {
        Definiteness::Negative
    } else if p > 0.0 {
        Definiteness::Positive
    } else {
        Definiteness::Zero
    };
    PolarizationTensor {
        matrix: Mat3::identity() * p,
        definiteness,
    }
}

/// Vector dipole field `D(x)` of a sphere, component `i` answering the
/// linear background `x_i`, and its Jacobian `gradient[(i, l)] = dD_i / dx_l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DipoleEval {
    pub field: Vec3,
    pub gradient: Mat3,
}

/// Dipole field of a spherical inclusion.
///
/// With `rho = x - O` and `k` the contrast ratio, `D = k a^3 rho / |rho|^3`
/// outside and `D = k rho` inside. Points on the sphere use the exterior
/// branch.
pub fn dipole_field_sphere(x: &Vec3, inclusion: &Inclusion, mu_o: f64) -> DipoleEval {
    let k = contrast_ratio(mu_o, inclusion.mu_i());
    let rho = x - inclusion.center;
    let r2 = rho.norm_squared();
    let a = inclusion.radius;
    if r2 < a * a {
        return DipoleEval {
            field: rho * k,
            gradient: Mat3::identity() * k,
        };
    }
    let r = r2.sqrt();
    let c = k * a.powi(3) / (r2 * r);
    DipoleEval {
        field: rho * c,
        gradient: Mat3::identity() * c - rho * rho.transpose() * (3.0 * c / r2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catalog, Material};
    use approx::assert_relative_eq;

    #[test]
    fn void_tensor() {
        let p = polarization_sphere(0.5, 3.0, 0.0);
        assert_relative_eq!(p.matrix, Mat3::identity() * (-2.0 * PI * 0.125 * 3.0), max_relative = 1e-15);
        assert_eq!(p.definiteness, Definiteness::Negative);
    }

    #[test]
    fn aluminum_in_steel() {
        let (mu_o, mu_i) = (catalog::structural_steel().shear_modulus, catalog::aluminum().shear_modulus);
        assert_relative_eq!(contrast_ratio(mu_o, mu_i), -13.0 / 47.0, max_relative = 1e-14);
        let p = polarization_sphere(0.24, mu_o, mu_i);
        // 4 pi (0.24)^3 (200/2.66) (-13/47), evaluated independently.
        assert_relative_eq!(p.matrix[(0, 0)], -3.612746113978108, max_relative = 1e-14);
        assert_eq!(p.matrix[(0, 1)], 0.0);
    }

    #[test]
    fn matched_materials_give_zero() {
        let p = polarization_sphere(0.3, 5.0, 5.0);
        assert_eq!(p.matrix, Mat3::zeros());
        assert_eq!(p.definiteness, Definiteness::Zero);
        assert_eq!(PolarizationTensor::new(Mat3::from_diagonal(&Vec3::new(1.0, -1.0, 1.0))).definiteness, Definiteness::Indefinite);
    }

    #[test]
    fn center_and_surface() {
        let inc = Inclusion::new(Vec3::new(1.0, 2.0, 3.0), 0.3, Material::void()).unwrap();
        assert_eq!(dipole_field_sphere(&inc.center, &inc, 2.0).field, Vec3::zeros());
        let k = contrast_ratio(2.0, 0.0);
        let n = Vec3::new(0.6, 0.0, 0.8);
        let x = inc.center + n * 0.3;
        let outer = dipole_field_sphere(&x, &inc, 2.0).field;
        assert_relative_eq!(outer, n * 0.3 * k, max_relative = 1e-15);
    }
}
