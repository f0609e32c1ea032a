use std::f64::consts::PI;

use crate::geometry::{DomainKind, DomainSpec};
use crate::{Error, Mat3, Result, Vec3};

/// Relative slack used when deciding whether a point lies in the closed ball.
const BOUNDARY_SLACK: f64 = 1e-12;

/// A kernel value with its `y`-gradient and mixed `(z, w)` Hessian.
///
/// `hessian_zw[(i, j)]` is the derivative with respect to the `i`-th
/// component of the first argument and the `j`-th component of the second.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelEval {
    pub value: f64,
    pub gradient_y: Vec3,
    pub hessian_zw: Mat3,
}

/// Green's function `G` of the ball together with its regular part `H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallGreenEval {
    pub g: KernelEval,
    pub h: KernelEval,
}

/// Free-space fundamental solution `1 / (4 pi mu |x - y|)` with its
/// `y`-gradient and mixed Hessian.
pub fn free_space(x: &Vec3, y: &Vec3, mu_o: f64) -> KernelEval {
    let r = x - y;
    let d = r.norm();
    let c = 1.0 / (4.0 * PI * mu_o);
    KernelEval {
        value: c / d,
        gradient_y: r * (c / d.powi(3)),
        hessian_zw: free_space_mixed_hessian(x, y, mu_o),
    }
}

/// `(grad_z (x) grad_w) 1 / (4 pi mu |z - w|) = (I / r^3 - 3 r r^T / r^5) / (4 pi mu)`.
pub fn free_space_mixed_hessian(z: &Vec3, w: &Vec3, mu_o: f64) -> Mat3 {
    let r = z - w;
    let d2 = r.norm_squared();
    let d = d2.sqrt();
    let c = 1.0 / (4.0 * PI * mu_o * d2 * d);
    Mat3::identity() * c - r * r.transpose() * (3.0 * c / d2)
}

#[inline]
fn free_space_mixed_apply(z: &Vec3, w: &Vec3, v: &Vec3, mu_o: f64) -> Vec3 {
    let r = z - w;
    let d2 = r.norm_squared();
    let d = d2.sqrt();
    let c = 1.0 / (4.0 * PI * mu_o * d2 * d);
    v * c - r * (3.0 * c * r.dot(v) / d2)
}

/// Regular part `H` of the Dirichlet Green's function of the ball of radius
/// `R` centred at the origin.
///
/// With `Phi(x, y) = |x|^2 |y|^2 - 2 R^2 x.y + R^4` the image formula reads
/// `H = R / (4 pi mu sqrt(Phi))`. This form is symmetric in `x` and `y` and
/// smooth at `y = 0`, where it reduces to `1 / (4 pi mu R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenBall {
    pub radius: f64,
    pub mu_o: f64,
}

struct ImageParts {
    /// `Phi^(-1/2)`
    inv_sqrt: f64,
    /// `Phi^(-1)`
    inv: f64,
    /// `|x|^2 y - R^2 x`, half the `y`-gradient of `Phi`.
    gy: Vec3,
    /// `|y|^2 x - R^2 y`, half the `x`-gradient of `Phi`.
    gx: Vec3,
}

impl GreenBall {
    pub fn new(radius: f64, mu_o: f64) -> Self {
        Self { radius, mu_o }
    }

    fn scale(&self) -> f64 {
        self.radius / (4.0 * PI * self.mu_o)
    }

    #[inline]
    fn parts(&self, x: &Vec3, y: &Vec3) -> ImageParts {
        let r2 = self.radius * self.radius;
        let (xx, yy) = (x.norm_squared(), y.norm_squared());
        let phi = xx * yy - 2.0 * r2 * x.dot(y) + r2 * r2;
        let inv = 1.0 / phi;
        ImageParts {
            inv_sqrt: inv.sqrt(),
            inv,
            gy: y * xx - x * r2,
            gx: x * yy - y * r2,
        }
    }

    /// `H(x, y)`.
    pub fn regular(&self, x: &Vec3, y: &Vec3) -> f64 {
        self.scale() * self.parts(x, y).inv_sqrt
    }

    /// `grad_y H(x, y) = -c Phi^(-3/2) (|x|^2 y - R^2 x)`.
    pub fn grad_y_regular(&self, x: &Vec3, y: &Vec3) -> Vec3 {
        let p = self.parts(x, y);
        -p.gy * (self.scale() * p.inv_sqrt * p.inv)
    }

    /// `grad_x H(x, y)`.
    pub fn grad_x_regular(&self, x: &Vec3, y: &Vec3) -> Vec3 {
        let p = self.parts(x, y);
        -p.gx * (self.scale() * p.inv_sqrt * p.inv)
    }

    /// Mixed Hessian `d^2 H / dx_i dy_j`.
    pub fn mixed_hessian_regular(&self, x: &Vec3, y: &Vec3) -> Mat3 {
        let p = self.parts(x, y);
        let r2 = self.radius * self.radius;
        let c3 = self.scale() * p.inv_sqrt * p.inv;
        let c5 = 3.0 * c3 * p.inv;
        p.gx * p.gy.transpose() * c5 - (x * y.transpose() * 2.0 - Mat3::identity() * r2) * c3
    }

    /// Mixed Hessian of `H` applied to `v`, without forming the matrix.
    #[inline]
    pub fn mixed_hessian_regular_apply(&self, x: &Vec3, y: &Vec3, v: &Vec3) -> Vec3 {
        let p = self.parts(x, y);
        let r2 = self.radius * self.radius;
        let c3 = self.scale() * p.inv_sqrt * p.inv;
        let c5 = 3.0 * c3 * p.inv;
        p.gx * (c5 * p.gy.dot(v)) - (x * (2.0 * y.dot(v)) - v * r2) * c3
    }

    fn check(&self, x: &Vec3, y: &Vec3) -> Result<()> {
        let limit = self.radius * (1.0 + BOUNDARY_SLACK);
        for p in [x, y] {
            if !(p.norm() <= limit) {
                return Err(Error::outside(p));
            }
        }
        if x == y {
            return Err(Error::CoincidentPoints);
        }
        Ok(())
    }

    /// Full evaluation of `G` and `H` at a pair of distinct points of the
    /// closed ball.
    pub fn eval(&self, x: &Vec3, y: &Vec3) -> Result<BallGreenEval> {
        self.check(x, y)?;
        let h = KernelEval {
            value: self.regular(x, y),
            gradient_y: self.grad_y_regular(x, y),
            hessian_zw: self.mixed_hessian_regular(x, y),
        };
        let gamma = free_space(x, y, self.mu_o);
        let g = KernelEval {
            value: gamma.value - h.value,
            gradient_y: gamma.gradient_y - h.gradient_y,
            hessian_zw: gamma.hessian_zw - h.hessian_zw,
        };
        Ok(BallGreenEval { g, h })
    }
}

/// Green's function of the ball of radius `radius` and its regular part.
pub fn greens_ball(x: &Vec3, y: &Vec3, radius: f64, mu_o: f64) -> Result<BallGreenEval> {
    GreenBall::new(radius, mu_o).eval(x, y)
}

/// `grad_y H(x, y)` for the ball; identically zero in the whole space.
#[allow(non_snake_case)]
pub fn grad_y_H(x: &Vec3, y: &Vec3, domain: &DomainSpec) -> Result<Vec3> {
    match Kernel::from_domain(domain) {
        Kernel::Ball(ball) => {
            ball.check(x, y)?;
            Ok(ball.grad_y_regular(x, y))
        }
        Kernel::FullSpace { .. } => {
            if x == y {
                return Err(Error::CoincidentPoints);
            }
            Ok(Vec3::zeros())
        }
    }
}

/// Mixed Hessian `(grad_z (x) grad_w) G(z, w)` of the domain's Green's function.
#[allow(non_snake_case)]
pub fn hessian_G(z: &Vec3, w: &Vec3, domain: &DomainSpec) -> Result<Mat3> {
    match Kernel::from_domain(domain) {
        Kernel::Ball(ball) => Ok(ball.eval(z, w)?.g.hessian_zw),
        Kernel::FullSpace { mu_o } => {
            if z == w {
                return Err(Error::CoincidentPoints);
            }
            Ok(free_space_mixed_hessian(z, w, mu_o))
        }
    }
}

/// The Green's function of a domain, dispatched once per solve.
///
/// These methods skip argument checks; callers guarantee distinct points
/// inside the domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    Ball(GreenBall),
    FullSpace { mu_o: f64 },
}

impl Kernel {
    pub fn from_domain(domain: &DomainSpec) -> Self {
        match domain.kind {
            DomainKind::Ball { radius } => Kernel::Ball(GreenBall::new(radius, domain.mu_o())),
            DomainKind::FullSpace => Kernel::FullSpace { mu_o: domain.mu_o() },
        }
    }

    pub fn mu_o(&self) -> f64 {
        match self {
            Kernel::Ball(b) => b.mu_o,
            Kernel::FullSpace { mu_o } => *mu_o,
        }
    }

    /// `(grad_z (x) grad_w) G(z, w)`.
    pub fn mixed_hessian(&self, z: &Vec3, w: &Vec3) -> Mat3 {
        let free = free_space_mixed_hessian(z, w, self.mu_o());
        match self {
            Kernel::Ball(b) => free - b.mixed_hessian_regular(z, w),
            Kernel::FullSpace { .. } => free,
        }
    }

    /// `(grad_z (x) grad_w) G(z, w) v`.
    #[inline]
    pub fn mixed_hessian_apply(&self, z: &Vec3, w: &Vec3, v: &Vec3) -> Vec3 {
        match self {
            Kernel::Ball(b) => free_space_mixed_apply(z, w, v, b.mu_o) - b.mixed_hessian_regular_apply(z, w, v),
            Kernel::FullSpace { mu_o } => free_space_mixed_apply(z, w, v, *mu_o),
        }
    }

    /// `grad_y H(x, y)`.
    pub fn grad_y_regular(&self, x: &Vec3, y: &Vec3) -> Vec3 {
        match self {
            Kernel::Ball(b) => b.grad_y_regular(x, y),
            Kernel::FullSpace { .. } => Vec3::zeros(),
        }
    }

    /// `d^2 H / dx_i dy_j` applied to `v`.
    pub fn mixed_hessian_regular_apply(&self, x: &Vec3, y: &Vec3, v: &Vec3) -> Vec3 {
        match self {
            Kernel::Ball(b) => b.mixed_hessian_regular_apply(x, y, v),
            Kernel::FullSpace { .. } => Vec3::zeros(),
        }
    }
}
