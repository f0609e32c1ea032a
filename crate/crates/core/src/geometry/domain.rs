use serde::{Deserialize, Serialize};

use super::Material;
use crate::{Error, Result, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DomainKind {
    /// Ball of the given radius centred at the origin, homogeneous Dirichlet data.
    Ball { radius: f64 },
    FullSpace,
}

/// The ambient body and its matrix material.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub matrix: Material,
}

impl DomainSpec {
    pub fn ball(radius: f64, matrix: Material) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        Self::checked(DomainKind::Ball { radius }, matrix)
    }

    pub fn full_space(matrix: Material) -> Result<Self> {
        Self::checked(DomainKind::FullSpace, matrix)
    }

    fn checked(kind: DomainKind, matrix: Material) -> Result<Self> {
        if !(matrix.shear_modulus > 0.0 && matrix.shear_modulus.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "matrix shear modulus must be positive, got {}",
                matrix.shear_modulus
            )));
        }
        Ok(Self { kind, matrix })
    }

    pub fn mu_o(&self) -> f64 {
        self.matrix.shear_modulus
    }

    pub fn radius(&self) -> Option<f64> {
        match self.kind {
            DomainKind::Ball { radius } => Some(radius),
            DomainKind::FullSpace => None,
        }
    }

    /// Closed domain membership (the boundary sphere belongs to the ball).
    pub fn contains(&self, x: &Vec3) -> bool {
        match self.kind {
            DomainKind::Ball { radius } => x.norm() <= radius,
            DomainKind::FullSpace => x.iter().all(|c| c.is_finite()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            DomainKind::Ball { .. } => "ball",
            DomainKind::FullSpace => "full_space",
        }
    }
}
