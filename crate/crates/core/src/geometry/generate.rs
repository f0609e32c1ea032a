use std::f64::consts::PI;

use super::{Cloud, DomainSpec, Inclusion, Material, MetricConvention};
use crate::{Error, Result, Vec3};

/// A periodic spherical cluster together with its construction parameters.
#[derive(Clone, Debug)]
pub struct PeriodicCluster {
    pub cloud: Cloud,
    pub cells_per_side: usize,
    pub n1: usize,
    pub beta: f64,
    /// `epsilon / d`.
    pub b: f64,
    /// Cell side `d = 1 / cells_per_side`.
    pub spacing: f64,
}

/// Integer cube root, if `n1` is a perfect cube.
pub fn perfect_cube_root(n1: usize) -> Option<usize> {
    let guess = (n1 as f64).cbrt().round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&n| n.checked_pow(3) == Some(n1))
}

/// Center coordinate of cell `i` along one axis, in units of `1 / (2n)`.
fn half_units(i: usize, n: usize) -> i64 {
    2 * i as i64 + 1 - n as i64
}

/// Whether the cube of side `1/n` around the given center (in units of
/// `1/(2n)`) lies inside the open ball of radius 1/2 about the origin.
///
/// The farthest corner sits one unit further from zero along every axis, so
/// the test is exact in integer arithmetic.
fn cube_inside(c: [i64; 3], n: usize) -> bool {
    let far: i64 = c.iter().map(|&x| (x.abs() + 1).pow(2)).sum();
    far < (n as i64).pow(2)
}

/// Centers of the retained cells of an `n x n x n` grid on the unit cube
/// centred at the origin, in lexicographic `(i, j, k)` order.
pub fn retained_cell_centers(n: usize) -> Vec<Vec3> {
    let scale = 1.0 / (2 * n) as f64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = [half_units(i, n), half_units(j, n), half_units(k, n)];
                if cube_inside(c, n) {
                    out.push(Vec3::new(c[0] as f64 * scale, c[1] as f64 * scale, c[2] as f64 * scale));
                }
            }
        }
    }
    out
}

/// Number of retained cells for `n1 = n^3` grid cells.
pub fn retained_cell_count(n1: usize) -> Result<usize> {
    let n = perfect_cube_root(n1)
        .ok_or_else(|| Error::InvalidParameter(format!("N1 = {n1} is not a perfect cube")))?;
    Ok(retained_cell_centers(n).len())
}

/// Builds the periodic spherical cluster in the ball of radius 1/2.
///
/// The unit cube is split into `n1` cells of side `d = n1^(-1/3)`; every cell
/// lying inside the ball receives a sphere of radius `b d` at its center,
/// with `b = (3 n1 beta / (4 pi N))^(1/3)` and `N` the number of retained
/// cells. The cloud metrics use [`MetricConvention::Separation`], so
/// `epsilon / d = b`.
pub fn generate_periodic_spherical_cluster(n1: usize, beta: f64, material: Material, domain: &DomainSpec) -> Result<PeriodicCluster> {
    let n = perfect_cube_root(n1)
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("N1 = {n1} is not a positive perfect cube")))?;
    let centers = retained_cell_centers(n);
    if centers.is_empty() {
        return Err(Error::InvalidParameter(format!("no cell of the {n}^3 grid fits inside the cluster ball")));
    }
    let count = centers.len() as f64;
    let beta_max = 4.0 * PI * count / (3.0 * n1 as f64);
    if !(beta > 0.0 && beta < beta_max) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in (0, {beta_max:.6}) for N1 = {n1}, got {beta}"
        )));
    }
    let b = (3.0 * n1 as f64 * beta / (4.0 * PI * count)).cbrt();
    let spacing = 1.0 / n as f64;
    let radius = b * spacing;
    let inclusions = centers
        .into_iter()
        .map(|c| Inclusion::new(c, radius, material.clone()))
        .collect::<Result<Vec<_>>>()?;
    let cloud = Cloud::with_convention(inclusions, domain, MetricConvention::Separation)?;
    Ok(PeriodicCluster {
        cloud,
        cells_per_side: n,
        n1,
        beta,
        b,
        spacing,
    })
}
