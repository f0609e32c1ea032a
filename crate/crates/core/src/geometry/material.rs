use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shear modulus from Young's modulus and Poisson's ratio, `E / (2(1 + nu))`.
pub fn shear_modulus(youngs_modulus: f64, poisson_ratio: f64) -> Result<f64> {
    if !(youngs_modulus.is_finite() && youngs_modulus > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Young's modulus must be positive, got {youngs_modulus}"
        )));
    }
    if !(poisson_ratio > -1.0 && poisson_ratio < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "Poisson's ratio must lie in (-1, 0.5), got {poisson_ratio}"
        )));
    }
    Ok(youngs_modulus / (2.0 * (1.0 + poisson_ratio)))
}

/// An isotropic material described by its shear modulus (GPa).
///
/// A shear modulus of zero denotes a void.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    pub youngs_modulus: Option<f64>,
    pub poisson_ratio: Option<f64>,
    pub shear_modulus: f64,
}

impl Material {
    pub fn from_engineering(name: impl Into<String>, youngs_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            youngs_modulus: Some(youngs_modulus),
            poisson_ratio: Some(poisson_ratio),
            shear_modulus: shear_modulus(youngs_modulus, poisson_ratio)?,
        })
    }

    pub fn from_shear_modulus(name: impl Into<String>, shear_modulus: f64) -> Result<Self> {
        if !(shear_modulus.is_finite() && shear_modulus >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shear modulus must be finite and non-negative, got {shear_modulus}"
            )));
        }
        Ok(Self {
            name: name.into(),
            youngs_modulus: None,
            poisson_ratio: None,
            shear_modulus,
        })
    }

    pub fn void() -> Self {
        Self {
            name: "void".to_string(),
            youngs_modulus: None,
            poisson_ratio: None,
            shear_modulus: 0.0,
        }
    }

    pub fn is_void(&self) -> bool {
        self.shear_modulus == 0.0
    }
}

/// Engineering constants of the materials used in the benchmark computations.
pub mod catalog {
    use super::Material;

    /// (name, E in GPa, Poisson's ratio)
    pub const TABLE: [(&str, f64, f64); 6] = [
        ("Cast Iron", 140.0, 0.25),
        ("Steel AISI 4340", 205.0, 0.28),
        ("Aluminum", 70.0, 0.33),
        ("Copper", 110.0, 0.35),
        ("Iron", 200.0, 0.29),
        ("Structural Steel", 200.0, 0.33),
    ];

    pub fn all() -> Vec<Material> {
        TABLE
            .iter()
            .map(|&(name, e, nu)| Material::from_engineering(name, e, nu).expect("catalog entries are valid"))
            .collect()
    }

    /// Case-insensitive lookup; `"void"` and `"none"` resolve to a void.
    pub fn by_name(name: &str) -> Option<Material> {
        if name.eq_ignore_ascii_case("void") || name.eq_ignore_ascii_case("none") {
            return Some(Material::void());
        }
        all().into_iter().find(|m| m.name.eq_ignore_ascii_case(name))
    }

    pub fn structural_steel() -> Material {
        by_name("Structural Steel").unwrap()
    }

    pub fn aluminum() -> Material {
        by_name("Aluminum").unwrap()
    }
}
