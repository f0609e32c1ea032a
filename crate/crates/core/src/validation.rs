//! Computable residuals of the approximation.
//!
//! The approximation satisfies the governing equations away from the
//! interfaces exactly; what is left over is a boundary trace `psi` on the
//! outer sphere and, on each inclusion surface, a continuity gap and a flux
//! jump `phi_j = mu_O du/dn|+ - mu_I du/dn|-`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::evaluator::{Approximation, Side};
use crate::geometry::{Cloud, DomainKind};
use crate::kernels::Kernel;
use crate::system::{CoefficientSet, InteractionSystem};
use crate::{Error, Result, Vec3};

/// Default number of sample directions per inclusion.
pub const DEFAULT_SAMPLES: usize = 200;

/// `n` quasi-uniform unit vectors on a Fibonacci spiral.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vec3::new(rho * phi.cos(), rho * phi.sin(), z)
        })
        .collect()
}

/// Interface residuals of one inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionResidual {
    /// `sup |u+ - u-|`
    pub continuity_sup: f64,
    /// `sup |mu_O du/dn|+ - mu_I du/dn|-|`
    pub flux_jump_sup: f64,
    /// `sup |u|` on the interface.
    pub value_scale: f64,
    /// `sup max(mu_O |grad u+|, mu_I |grad u-|)` on the interface.
    pub flux_scale: f64,
}

impl InclusionResidual {
    pub fn relative_continuity(&self) -> f64 {
        relative(self.continuity_sup, self.value_scale)
    }

    pub fn relative_flux_jump(&self) -> f64 {
        relative(self.flux_jump_sup, self.flux_scale)
    }
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        value / scale
    } else {
        value
    }
}

/// Boundary trace of the approximation on the outer sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResidual {
    /// `sup |u - 0|` over the samples.
    pub sup: f64,
    /// `sup_x sum_k a_k^4 |C_k| / |x - O_k|^3` over the same samples.
    pub envelope: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub inclusions: Vec<InclusionResidual>,
    pub samples_per_inclusion: usize,
    /// Present for bounded domains.
    pub boundary: Option<BoundaryResidual>,
}

impl ResidualReport {
    pub fn max_flux_jump(&self) -> f64 {
        self.inclusions.iter().map(|r| r.flux_jump_sup).fold(0.0, f64::max)
    }

    pub fn max_continuity(&self) -> f64 {
        self.inclusions.iter().map(|r| r.continuity_sup).fold(0.0, f64::max)
    }

    pub fn max_relative_flux_jump(&self) -> f64 {
        self.inclusions.iter().map(|r| r.relative_flux_jump()).fold(0.0, f64::max)
    }

    pub fn max_relative_continuity(&self) -> f64 {
        self.inclusions.iter().map(|r| r.relative_continuity()).fold(0.0, f64::max)
    }
}

fn one_inclusion(approx: &Approximation<'_>, index: usize, directions: &[Vec3]) -> Result<InclusionResidual> {
    let inc = &approx.cloud().inclusions()[index];
    let (mu_o, mu_i) = (approx.domain().mu_o(), inc.mu_i());
    let mut out = InclusionResidual {
        continuity_sup: 0.0,
        flux_jump_sup: 0.0,
        value_scale: 0.0,
        flux_scale: 0.0,
    };
    for n in directions {
        let x = inc.center + n * inc.radius;
        let plus = approx.field_one_sided(&x, index, Side::Exterior)?;
        let minus = approx.field_one_sided(&x, index, Side::Interior)?;
        out.continuity_sup = out.continuity_sup.max((plus.value - minus.value).abs());
        let jump = mu_o * plus.gradient.dot(n) - mu_i * minus.gradient.dot(n);
        out.flux_jump_sup = out.flux_jump_sup.max(jump.abs());
        out.value_scale = out.value_scale.max(plus.value.abs()).max(minus.value.abs());
        out.flux_scale = out
            .flux_scale
            .max(mu_o * plus.gradient.norm())
            .max(mu_i * minus.gradient.norm());
    }
    Ok(out)
}

/// Continuity gaps and flux jumps on every inclusion surface, sampled at
/// `samples` Fibonacci directions, plus the boundary trace for a ball.
pub fn interface_residuals(approx: &Approximation<'_>, samples: usize) -> Result<ResidualReport> {
    let directions = fibonacci_sphere(samples);
    let inclusions = (0..approx.cloud().len())
        .into_par_iter()
        .map(|j| one_inclusion(approx, j, &directions))
        .collect::<Result<Vec<_>>>()?;
    let boundary = match approx.domain().kind {
        DomainKind::Ball { .. } => Some(boundary_residual(approx, samples.max(1000))?),
        DomainKind::FullSpace => None,
    };
    Ok(ResidualReport {
        inclusions,
        samples_per_inclusion: samples,
        boundary,
    })
}

/// Boundary trace `psi = u - 0` on the outer sphere and the envelope
/// `sum_k a_k^4 |C_k| / |x - O_k|^3`.
pub fn boundary_residual(approx: &Approximation<'_>, samples: usize) -> Result<BoundaryResidual> {
    let radius = approx
        .domain()
        .radius()
        .ok_or_else(|| Error::InvalidParameter("the whole space has no boundary".into()))?;
    let coeffs = approx.coefficients();
    let rows = fibonacci_sphere(samples)
        .into_par_iter()
        .map(|n| {
            let x = n * radius;
            let u = approx.value(&x)?;
            let env: f64 = approx
                .cloud()
                .inclusions()
                .iter()
                .zip(coeffs)
                .map(|(inc, c)| inc.radius.powi(4) * c.norm() / (x - inc.center).norm().powi(3))
                .sum();
            Ok((u.abs(), env))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryResidual {
        sup: rows.iter().map(|r| r.0).fold(0.0, f64::max),
        envelope: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        samples,
    })
}

/// Largest Laplacian defect found by [`harmonicity_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicityReport {
    /// `max |sum_i delta_i| / sum_i |delta_i|`, with `delta_i` the second
    /// difference along axis `i`. Points whose second differences are
    /// indistinguishable from rounding noise contribute zero.
    pub max_relative: f64,
    /// `max |7-point Laplacian|`.
    pub max_absolute: f64,
    pub points: usize,
}

/// 7-point Laplacian of `field` with step `step` at each point.
pub fn harmonicity_check<F>(points: &[Vec3], field: F, step: f64) -> Result<HarmonicityReport>
where
    F: Fn(&Vec3) -> Result<f64> + Sync,
{
    let rows = points
        .par_iter()
        .map(|x| {
            let f0 = field(x)?;
            let mut deltas = [0.0; 3];
            let mut magnitude = 6.0 * f0.abs();
            for (i, delta) in deltas.iter_mut().enumerate() {
                let mut e = Vec3::zeros();
                e[i] = step;
                let (fp, fm) = (field(&(x + e))?, field(&(x - e))?);
                magnitude += fp.abs() + fm.abs();
                *delta = fp + fm - 2.0 * f0;
            }
            let sum: f64 = deltas.iter().sum();
            let spread: f64 = deltas.iter().map(|d| d.abs()).sum();
            let noise = 16.0 * f64::EPSILON * magnitude;
            let rel = if spread > 100.0 * noise { sum.abs() / spread } else { 0.0 };
            Ok((rel, sum.abs() / (step * step)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HarmonicityReport {
        max_relative: rows.iter().map(|r| r.0).fold(0.0, f64::max),
        max_absolute: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        points: points.len(),
    })
}

/// Both sides of the inner-product bound for the interaction operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixCheck {
    /// `<T P C, Q C>`
    pub numerator: f64,
    /// `d^-3 <Q C, Q C>`
    pub denominator: f64,
    pub ratio: f64,
}

/// Evaluates `<T P C, Q C>` and `d^-3 <Q C, Q C>` for a whole-space system,
/// where `Q` is the block-diagonal matrix of `|P_k|` (the absolute value of
/// each polarization tensor).
pub fn appendix_identity_check(system: &InteractionSystem, cloud: &Cloud, coeffs: &CoefficientSet) -> Result<AppendixCheck> {
    if !matches!(system.kernel(), Kernel::FullSpace { .. }) {
        return Err(Error::InvalidParameter("the inner-product check is defined for the whole space only".into()));
    }
    if system.n() < 2 {
        return Err(Error::InvalidParameter("the inner-product check needs at least two inclusions".into()));
    }
    if coeffs.len() != system.n() {
        return Err(Error::CoefficientMismatch {
            expected: system.n(),
            found: coeffs.len(),
        });
    }
    let qc: Vec<Vec3> = system
        .polarization()
        .iter()
        .zip(&coeffs.vectors)
        .map(|(p, c)| {
            let eig = p.symmetric_eigen();
            let abs = eig.eigenvectors * nalgebra::Matrix3::from_diagonal(&eig.eigenvalues.map(f64::abs)) * eig.eigenvectors.transpose();
            abs * c
        })
        .collect();
    let tpc = system.apply_interaction(&coeffs.vectors);
    let numerator: f64 = tpc.iter().zip(&qc).map(|(a, b)| a.dot(b)).sum();
    let qq: f64 = qc.iter().map(|v| v.norm_squared()).sum();
    let denominator = qq / cloud.d().powi(3);
    Ok(AppendixCheck {
        numerator,
        denominator,
        ratio: numerator / denominator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_points_are_unit_and_balanced() {
        let pts = fibonacci_sphere(200);
        assert_eq!(pts.len(), 200);
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-15));
        let mean: Vec3 = pts.iter().sum::<Vec3>() / 200.0;
        assert!(mean.norm() < 1e-2);
    }

    #[test]
    fn harmonic_and_non_harmonic_fields() {
        let pts = [Vec3::new(0.3, 0.2, 0.1), Vec3::new(1.0, -1.0, 2.0)];
        let harmonic = harmonicity_check(&pts, |x| Ok(x.x * x.x - x.y * x.y + 3.0 * x.z), 1e-3).unwrap();
        assert!(harmonic.max_relative < 1e-6);
        let bowl = harmonicity_check(&pts, |x| Ok(x.norm_squared()), 1e-3).unwrap();
        assert!((bowl.max_relative - 1.0).abs() < 1e-6);
        assert!((bowl.max_absolute - 6.0).abs() < 1e-4);
        let linear = harmonicity_check(&pts, |x| Ok(2.0 * x.x + 1.0), 1e-3).unwrap();
        assert_eq!(linear.max_relative, 0.0);
    }
}
