//! Effective-medium limit of a large periodic cluster of spheres.
//!
//! When a ball `omega` of radius `r` is filled periodically with spheres of
//! radius `b d` on a lattice of spacing `d`, the cluster behaves in the limit
//! `d -> 0` like a single inclusion with stiffness `mu_O I - Q`, where
//! `Q = 4 pi b^3 mu_O k I` and `k` is the contrast ratio.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::evaluator::Approximation;
use crate::geometry::Cloud;
use crate::kernels::{contrast_ratio, ScalarField};
use crate::system::{CoefficientSet, InteractionSystem, SolveMethod};
use crate::{Error, Mat3, Result, Vec3};

/// Centers with `|O| <= INTERIOR_RADIUS` count as bulk inclusions of the
/// unit-diameter cluster.
pub const INTERIOR_RADIUS: f64 = 0.35;

/// Regime indicators above this value get a warning.
pub const REGIME_WARNING: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveMedium {
    pub q: Mat3,
    /// `mu_O I - Q`
    pub effective_stiffness: Mat3,
    /// Isotropic effective shear modulus of the cluster.
    pub effective_shear: f64,
    pub b: f64,
    pub mu_o: f64,
    pub mu_i: f64,
    /// `4 pi b^3 |k|`
    pub regime_indicator: f64,
}

impl EffectiveMedium {
    /// Whether the entries of `Q` are small enough for the limit to be
    /// trusted, judged against [`REGIME_WARNING`].
    pub fn in_regime(&self) -> bool {
        self.regime_indicator <= REGIME_WARNING
    }
}

/// Effective medium for spheres of radius `b d` with modulus `mu_i` in a
/// matrix `mu_o`.
pub fn effective_medium(b: f64, mu_o: f64, mu_i: f64) -> Result<EffectiveMedium> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("b must be positive, got {b}")));
    }
    if !(mu_o > 0.0 && mu_o.is_finite() && mu_i >= 0.0 && mu_i.is_finite()) {
        return Err(Error::InvalidParameter(format!("invalid moduli mu_O = {mu_o}, mu_I = {mu_i}")));
    }
    let k = contrast_ratio(mu_o, mu_i);
    let s = 4.0 * PI * b.powi(3) * k;
    let q = Mat3::identity() * (mu_o * s);
    Ok(EffectiveMedium {
        q,
        effective_stiffness: Mat3::identity() * mu_o - q,
        effective_shear: mu_o * (1.0 - s),
        b,
        mu_o,
        mu_i,
        regime_indicator: s.abs(),
    })
}

/// Solution `u_hat` of the homogenised problem for the ball `|x| < r` with
/// modulus `mu_hat` in a matrix `mu_o` under the far field `x_1 / mu_o`.
///
/// With `A = (mu_hat - mu_o) / (mu_o (mu_hat + 2 mu_o))`,
/// `u_hat = x_1 / mu_o - A r^3 x_1 / |x|^3` outside and
/// `u_hat = 3 x_1 / (mu_hat + 2 mu_o)` inside.
pub fn u_hat_sphere(x: &Vec3, r: f64, mu_o: f64, mu_hat: f64) -> ScalarField {
    let a = (mu_hat - mu_o) / (mu_o * (mu_hat + 2.0 * mu_o));
    let d2 = x.norm_squared();
    if d2 < r * r {
        let slope = 3.0 / (mu_hat + 2.0 * mu_o);
        return ScalarField {
            value: x.x * slope,
            gradient: Vec3::x() * slope,
        };
    }
    let d = d2.sqrt();
    let c = a * r.powi(3) / (d2 * d);
    ScalarField {
        value: x.x / mu_o - c * x.x,
        gradient: Vec3::x() / mu_o - (Vec3::x() * c - x * (3.0 * c * x.x / d2)),
    }
}

/// Coefficients `C_j = -grad u_hat(O_j)` for a cluster occupying the ball
/// of radius `r`.
///
/// The recorded residual is `NaN` until [`with_residual`] is applied.
pub fn coeffs_from_homog(cloud: &Cloud, medium: &EffectiveMedium, r: f64) -> CoefficientSet {
    let vectors = cloud
        .inclusions()
        .iter()
        .map(|inc| -u_hat_sphere(&inc.center, r, medium.mu_o, medium.effective_shear).gradient)
        .collect();
    CoefficientSet {
        vectors,
        method: SolveMethod::Homog,
        iterations: 0,
        residual: f64::NAN,
    }
}

/// `u - w_f` of a solved cluster next to `u_hat - x_1 / mu_O` along the
/// `x_1` axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisComparison {
    pub x1: Vec<f64>,
    pub system: Vec<f64>,
    pub homog: Vec<f64>,
    /// `max_i |system_i - homog_i|`
    pub sup_gap: f64,
}

/// Samples both corrections at `samples` equally spaced points of
/// `x_1 in [from, to]` on the axis `x_2 = x_3 = 0`.
pub fn compare_on_axis(approx: &Approximation<'_>, medium: &EffectiveMedium, r: f64, from: f64, to: f64, samples: usize) -> Result<AxisComparison> {
    if samples < 2 || !(from.is_finite() && to.is_finite()) {
        return Err(Error::InvalidParameter("the comparison needs at least 2 samples on a finite interval".into()));
    }
    let x1: Vec<f64> = (0..samples)
        .map(|i| from + (to - from) * i as f64 / (samples - 1) as f64)
        .collect();
    let system = x1
        .par_iter()
        .map(|&x| approx.correction_at(&Vec3::new(x, 0.0, 0.0)).map(|f| f.value))
        .collect::<Result<Vec<_>>>()?;
    let homog: Vec<f64> = x1
        .iter()
        .map(|&x| u_hat_sphere(&Vec3::new(x, 0.0, 0.0), r, medium.mu_o, medium.effective_shear).value - x / medium.mu_o)
        .collect();
    let sup_gap = system.iter().zip(&homog).map(|(s, h)| (s - h).abs()).fold(0.0, f64::max);
    Ok(AxisComparison {
        x1,
        system,
        homog,
        sup_gap,
    })
}

/// Fills in the residual of a coefficient set against a system.
pub fn with_residual(mut coeffs: CoefficientSet, system: &InteractionSystem) -> CoefficientSet {
    coeffs.residual = system.residual(&coeffs.vectors);
    coeffs
}
