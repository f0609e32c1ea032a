use serde::{Deserialize, Serialize};

use crate::geometry::{DomainKind, DomainSpec};
use crate::{Error, Result, Vec3};

/// Loading that drives the unperturbed problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BackgroundField {
    /// Radially symmetric source supported in `|x| < r_f`, zero Dirichlet
    /// data on the ball. The closed-form `w_f` solves
    /// `mu_O * laplace(w_f) = (r_f - |x|)` inside the support.
    RadialSource { r_f: f64 },
    /// No source, `w_f = x_1 / mu_O` in the whole space.
    LinearX,
}

/// A scalar field value and its gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarField {
    pub value: f64,
    pub gradient: Vec3,
}

impl BackgroundField {
    pub fn label(&self) -> &'static str {
        match self {
            BackgroundField::RadialSource { .. } => "radial_source",
            BackgroundField::LinearX => "linear_x",
        }
    }

    /// Checks that the background can be paired with the domain.
    pub fn check(&self, domain: &DomainSpec) -> Result<()> {
        let incompatible = || Error::IncompatibleBackground {
            background: self.label(),
            domain: domain.label(),
        };
        match (*self, domain.kind) {
            (BackgroundField::RadialSource { r_f }, DomainKind::Ball { radius }) => {
                if r_f > 0.0 && r_f < radius {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "source radius r_f = {r_f} must lie in (0, {radius})"
                    )))
                }
            }
            (BackgroundField::LinearX, DomainKind::FullSpace) => Ok(()),
            _ => Err(incompatible()),
        }
    }

    /// Right-hand side `mu_O * laplace(w_f)` at `x`.
    pub fn source(&self, x: &Vec3) -> f64 {
        match *self {
            BackgroundField::RadialSource { r_f } => (r_f - x.norm()).max(0.0),
            BackgroundField::LinearX => 0.0,
        }
    }
}

/// Unperturbed solution `w_f` and its analytic gradient.
pub fn w_f_eval(x: &Vec3, background: &BackgroundField, domain: &DomainSpec) -> Result<ScalarField> {
    background.check(domain)?;
    let mu = domain.mu_o();
    match (*background, domain.kind) {
        (BackgroundField::RadialSource { r_f }, DomainKind::Ball { radius }) => {
            let r = x.norm();
            if r > radius * (1.0 + 1e-12) {
                return Err(Error::outside(x));
            }
            Ok(radial_source(x, r, r_f, radius, mu))
        }
        _ => Ok(ScalarField {
            value: x.x / mu,
            gradient: Vec3::x() / mu,
        }),
    }
}

fn radial_source(x: &Vec3, r: f64, r_f: f64, big_r: f64, mu: f64) -> ScalarField {
    if r < r_f {
        let value = (-0.5 * r.powi(3) + r_f * r * r - r_f.powi(3) * (2.0 * big_r - r_f) / (2.0 * big_r)) / (6.0 * mu);
        // w'(r) / r, regular at the origin.
        let slope = (2.0 * r_f - 1.5 * r) / (6.0 * mu);
        ScalarField {
            value,
            gradient: x * slope,
        }
    } else {
        let c = r_f.powi(4) / (12.0 * mu);
        ScalarField {
            value: c * (1.0 / big_r - 1.0 / r),
            gradient: x * (c / r.powi(3)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;
    use approx::assert_relative_eq;

    fn ball() -> DomainSpec {
        DomainSpec::ball(7.0, catalog::structural_steel()).unwrap()
    }

    #[test]
    fn value_at_origin() {
        let dom = ball();
        let mu = dom.mu_o();
        let w = w_f_eval(&Vec3::zeros(), &BackgroundField::RadialSource { r_f: 1.5 }, &dom).unwrap();
        assert_relative_eq!(w.value * mu, -1.5f64.powi(3) * 12.5 / (12.0 * 7.0), max_relative = 1e-15);
        assert!((w.value * mu + 0.502232).abs() < 1e-6);
        assert_eq!(w.gradient, Vec3::zeros());
    }

    #[test]
    fn vanishes_on_the_boundary() {
        let dom = ball();
        let x = Vec3::new(3.0, 2.0, 6.0);
        let w = w_f_eval(&x, &BackgroundField::RadialSource { r_f: 1.5 }, &dom).unwrap();
        assert!(w.value.abs() < 1e-18);
    }

    #[test]
    fn exterior_gradient() {
        let dom = ball();
        let mu = dom.mu_o();
        let x = Vec3::new(2.5, 2.5, 2.5);
        let w = w_f_eval(&x, &BackgroundField::RadialSource { r_f: 1.5 }, &dom).unwrap();
        let expected = x.normalize() * (0.0225 / mu);
        assert_relative_eq!(w.gradient, expected, max_relative = 1e-14);
    }

    #[test]
    fn branches_match_at_source_radius() {
        let dom = ball();
        let mu = dom.mu_o();
        let (r_f, big_r) = (1.5, 7.0);
        let dir = Vec3::new(1.0, -2.0, 0.5).normalize();
        let x = dir * r_f;
        let inner = radial_source(&x, r_f * (1.0 - 1e-16), r_f, big_r, mu);
        let outer = radial_source(&x, r_f, r_f, big_r, mu);
        assert_relative_eq!(inner.value, outer.value, max_relative = 1e-13);
        assert_relative_eq!(inner.gradient.dot(&dir), outer.gradient.dot(&dir), max_relative = 1e-13);
    }

    #[test]
    fn linear_background() {
        let dom = DomainSpec::full_space(catalog::structural_steel()).unwrap();
        let w = w_f_eval(&Vec3::new(2.0, 5.0, -1.0), &BackgroundField::LinearX, &dom).unwrap();
        assert_eq!(w.value, 2.0 / dom.mu_o());
        assert_eq!(w.gradient, Vec3::x() / dom.mu_o());
    }

    #[test]
    fn pairing_is_checked() {
        let ball = ball();
        let full = DomainSpec::full_space(catalog::structural_steel()).unwrap();
        assert!(w_f_eval(&Vec3::zeros(), &BackgroundField::LinearX, &ball).is_err());
        assert!(w_f_eval(&Vec3::zeros(), &BackgroundField::RadialSource { r_f: 1.0 }, &full).is_err());
        assert!(BackgroundField::RadialSource { r_f: 8.0 }.check(&ball).is_err());
        assert!(w_f_eval(&Vec3::new(8.0, 0.0, 0.0), &BackgroundField::RadialSource { r_f: 1.0 }, &ball).is_err());
    }
}
