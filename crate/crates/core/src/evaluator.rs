//! Evaluation of the approximation
//! `u(x) = w_f(x) + sum_k C_k . (D_k(x) - P_k grad_y H(x, O_k))`
//! and its gradient.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Cloud, DomainKind, DomainSpec};
use crate::kernels::{
    contrast_ratio, dipole_field_sphere, polarization_sphere, w_f_eval, BackgroundField, DipoleEval, Kernel, ScalarField,
};
use crate::system::CoefficientSet;
use crate::{Error, Mat3, Result, Vec3};

/// Which material a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Matrix,
    Inclusion(usize),
}

impl Region {
    /// `-1` for the matrix, the inclusion index otherwise.
    pub fn code(self) -> i64 {
        match self {
            Region::Matrix => -1,
            Region::Inclusion(i) => i as i64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    pub position: Vec3,
    pub u: f64,
    pub grad: Vec3,
    pub grad_norm: f64,
    pub region: Region,
}

/// Branch selection for the inclusion a point sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

/// The approximation built from a cloud and its coefficients.
pub struct Approximation<'a> {
    cloud: &'a Cloud,
    coeffs: &'a [Vec3],
    domain: &'a DomainSpec,
    background: &'a BackgroundField,
    kernel: Kernel,
    /// `P_k^T C_k`
    pc: Vec<Vec3>,
}

impl<'a> Approximation<'a> {
    pub fn new(cloud: &'a Cloud, coeffs: &'a CoefficientSet, domain: &'a DomainSpec, background: &'a BackgroundField) -> Result<Self> {
        Self::from_vectors(cloud, &coeffs.vectors, domain, background)
    }

    pub fn from_vectors(cloud: &'a Cloud, coeffs: &'a [Vec3], domain: &'a DomainSpec, background: &'a BackgroundField) -> Result<Self> {
        if coeffs.len() != cloud.len() {
            return Err(Error::CoefficientMismatch {
                expected: cloud.len(),
                found: coeffs.len(),
            });
        }
        background.check(domain)?;
        let mu_o = domain.mu_o();
        let pc = cloud
            .inclusions()
            .iter()
            .zip(coeffs)
            .map(|(inc, c)| {
                let p: Mat3 = polarization_sphere(inc.radius, mu_o, inc.mu_i()).matrix;
                p.transpose() * c
            })
            .collect();
        Ok(Self {
            cloud,
            coeffs,
            domain,
            background,
            kernel: Kernel::from_domain(domain),
            pc,
        })
    }

    pub fn cloud(&self) -> &Cloud {
        self.cloud
    }

    pub fn domain(&self) -> &DomainSpec {
        self.domain
    }

    pub fn coefficients(&self) -> &[Vec3] {
        self.coeffs
    }

    fn check_inside(&self, x: &Vec3) -> Result<()> {
        if let DomainKind::Ball { radius } = self.domain.kind {
            if !(x.norm() <= radius * (1.0 + 1e-12)) {
                return Err(Error::outside(x));
            }
        }
        Ok(())
    }

    /// Background field `w_f` at `x`.
    pub fn background(&self, x: &Vec3) -> Result<ScalarField> {
        w_f_eval(x, self.background, self.domain)
    }

    /// The sum over inclusions, value and gradient. Inclusion `forced.0`
    /// uses the branch `forced.1`; all others pick the branch from geometry.
    fn correction(&self, x: &Vec3, forced: Option<(usize, Side)>) -> ScalarField {
        let mu_o = self.domain.mu_o();
        let mut value = 0.0;
        let mut gradient = Vec3::zeros();
        for (k, ((inc, c), pc)) in self.cloud.inclusions().iter().zip(self.coeffs).zip(&self.pc).enumerate() {
            let d = match forced {
                Some((j, side)) if j == k => {
                    let ratio = contrast_ratio(mu_o, inc.mu_i());
                    match side {
                        Side::Interior => DipoleEval {
                            field: (x - inc.center) * ratio,
                            gradient: Mat3::identity() * ratio,
                        },
                        Side::Exterior => exterior_dipole(x, inc.center, inc.radius, ratio),
                    }
                }
                _ => dipole_field_sphere(x, inc, mu_o),
            };
            value += c.dot(&d.field);
            gradient += d.gradient.transpose() * c;
            if let Kernel::Ball(_) = self.kernel {
                value -= pc.dot(&self.kernel.grad_y_regular(x, &inc.center));
                gradient -= self.kernel.mixed_hessian_regular_apply(x, &inc.center, pc);
            }
        }
        ScalarField { value, gradient }
    }

    /// `u(x) - w_f(x)` and its gradient.
    pub fn correction_at(&self, x: &Vec3) -> Result<ScalarField> {
        self.check_inside(x)?;
        Ok(self.correction(x, None))
    }

    /// Value and gradient of the approximation at `x`.
    pub fn field(&self, x: &Vec3) -> Result<ScalarField> {
        self.check_inside(x)?;
        let w = self.background(x)?;
        let c = self.correction(x, None);
        Ok(ScalarField {
            value: w.value + c.value,
            gradient: w.gradient + c.gradient,
        })
    }

    /// Like [`Approximation::field`] but with inclusion `index` forced onto
    /// one branch of its dipole field. Used for one-sided traces on an
    /// interface.
    pub fn field_one_sided(&self, x: &Vec3, index: usize, side: Side) -> Result<ScalarField> {
        self.check_inside(x)?;
        let w = self.background(x)?;
        let c = self.correction(x, Some((index, side)));
        Ok(ScalarField {
            value: w.value + c.value,
            gradient: w.gradient + c.gradient,
        })
    }

    pub fn value(&self, x: &Vec3) -> Result<f64> {
        Ok(self.field(x)?.value)
    }

    pub fn gradient(&self, x: &Vec3) -> Result<Vec3> {
        Ok(self.field(x)?.gradient)
    }

    pub fn region(&self, x: &Vec3) -> Region {
        match self.cloud.locate(x) {
            Some(i) => Region::Inclusion(i),
            None => Region::Matrix,
        }
    }

    pub fn sample(&self, x: &Vec3) -> Result<FieldSample> {
        let f = self.field(x)?;
        Ok(FieldSample {
            position: *x,
            u: f.value,
            grad: f.gradient,
            grad_norm: f.gradient.norm(),
            region: self.region(x),
        })
    }
}

/// Exterior branch of a sphere's dipole field, valid at any `x != center`.
fn exterior_dipole(x: &Vec3, center: Vec3, radius: f64, k: f64) -> DipoleEval {
    let rho = x - center;
    let r2 = rho.norm_squared();
    let r = r2.sqrt();
    let c = k * radius.powi(3) / (r2 * r);
    DipoleEval {
        field: rho * c,
        gradient: Mat3::identity() * c - rho * rho.transpose() * (3.0 * c / r2),
    }
}

/// Value of the approximation at `x`.
pub fn eval_u(x: &Vec3, cloud: &Cloud, coeffs: &CoefficientSet, domain: &DomainSpec, background: &BackgroundField) -> Result<f64> {
    Approximation::new(cloud, coeffs, domain, background)?.value(x)
}

/// Gradient of the approximation at `x`.
pub fn eval_grad_u(x: &Vec3, cloud: &Cloud, coeffs: &CoefficientSet, domain: &DomainSpec, background: &BackgroundField) -> Result<Vec3> {
    Approximation::new(cloud, coeffs, domain, background)?.gradient(x)
}

/// One grid point of a sampled plane or line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridPoint {
    Field(FieldSample),
    /// Outside a bounded domain.
    Outside(Vec3),
}

impl GridPoint {
    pub fn position(&self) -> Vec3 {
        match self {
            GridPoint::Field(s) => s.position,
            GridPoint::Outside(p) => *p,
        }
    }

    pub fn sample(&self) -> Option<&FieldSample> {
        match self {
            GridPoint::Field(s) => Some(s),
            GridPoint::Outside(_) => None,
        }
    }
}

/// Axis-aligned rectangle in a coordinate plane.
///
/// `bounds[0]` and `bounds[1]` span the two in-plane axes in increasing
/// order (for `axis = 2`: `x` then `y`); `resolution` counts grid points
/// along them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneSpec {
    pub axis: usize,
    pub offset: f64,
    pub bounds: [(f64, f64); 2],
    pub resolution: (usize, usize),
}

impl PlaneSpec {
    pub fn in_plane_axes(&self) -> [usize; 2] {
        match self.axis {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        }
    }

    fn check(&self) -> Result<()> {
        if self.axis > 2 {
            return Err(Error::InvalidParameter(format!("plane normal axis must be 0, 1 or 2, got {}", self.axis)));
        }
        if self.resolution.0 < 2 || self.resolution.1 < 2 {
            return Err(Error::InvalidParameter("plane resolution must be at least 2 per side".into()));
        }
        let finite = self.offset.is_finite() && self.bounds.iter().all(|(a, b)| a.is_finite() && b.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("plane bounds must be finite".into()));
        }
        Ok(())
    }

    /// Grid points in row-major order: the first in-plane axis varies fastest.
    pub fn points(&self) -> Vec<Vec3> {
        let [a, b] = self.in_plane_axes();
        let (n, m) = self.resolution;
        let lerp = |(lo, hi): (f64, f64), i: usize, count: usize| lo + (hi - lo) * i as f64 / (count - 1) as f64;
        let mut out = Vec::with_capacity(n * m);
        for j in 0..m {
            for i in 0..n {
                let mut p = Vec3::zeros();
                p[self.axis] = self.offset;
                p[a] = lerp(self.bounds[0], i, n);
                p[b] = lerp(self.bounds[1], j, m);
                out.push(p);
            }
        }
        out
    }
}

fn sample_points(approx: &Approximation<'_>, points: Vec<Vec3>) -> Result<Vec<GridPoint>> {
    points
        .into_par_iter()
        .map(|p| {
            let inside = match approx.domain().kind {
                DomainKind::Ball { radius } => p.norm() <= radius,
                DomainKind::FullSpace => true,
            };
            if inside {
                approx.sample(&p).map(GridPoint::Field)
            } else {
                Ok(GridPoint::Outside(p))
            }
        })
        .collect()
}

/// Samples the approximation on a rectangular grid in a coordinate plane.
pub fn sample_plane(plane: &PlaneSpec, approx: &Approximation<'_>) -> Result<Vec<GridPoint>> {
    plane.check()?;
    if let DomainKind::Ball { radius } = approx.domain().kind {
        if plane.offset.abs() >= radius {
            return Err(Error::InvalidParameter(format!(
                "plane at offset {} misses the ball of radius {radius}",
                plane.offset
            )));
        }
    }
    sample_points(approx, plane.points())
}

/// Samples the approximation at `samples` equally spaced points from `from`
/// to `to`, both included.
pub fn sample_line(from: Vec3, to: Vec3, samples: usize, approx: &Approximation<'_>) -> Result<Vec<GridPoint>> {
    if samples < 2 {
        return Err(Error::InvalidParameter("a line needs at least 2 samples".into()));
    }
    if !(from.iter().chain(to.iter()).all(|c| c.is_finite())) {
        return Err(Error::InvalidParameter("line end points must be finite".into()));
    }
    let points = (0..samples)
        .map(|i| from + (to - from) * (i as f64 / (samples - 1) as f64))
        .collect();
    sample_points(approx, points)
}
