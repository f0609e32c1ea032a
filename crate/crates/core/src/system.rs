//! The interaction system `C + T P C = -Lambda`.
//!
//! For inclusions `j != k` the block `T_jk` is the mixed Hessian
//! `(grad_z (x) grad_w) G(O_j, O_k)`, the diagonal blocks vanish, `P` is the
//! block-diagonal matrix of polarization tensors and `Lambda_j = grad w_f(O_j)`.
//! The right-hand side is stored as `b = -Lambda`.

use std::fmt;
use std::str::FromStr;

use faer::prelude::*;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{validate_cloud, Cloud, DomainSpec, DEFAULT_RATIO_THRESHOLD};
use crate::kernels::{polarization_sphere, w_f_eval, BackgroundField, Kernel};
use crate::{Error, Mat3, Result, Vec3};

/// Largest number of unknowns `3N` accepted by [`solve_direct`].
pub const DEFAULT_DIRECT_CAP: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Direct,
    Neumann,
    /// Coefficients read off the homogenised solution.
    Homog,
    /// `C_j = -grad w_f(O_j)`, interactions ignored.
    Uncoupled,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::Direct => "direct",
            SolveMethod::Neumann => "neumann",
            SolveMethod::Homog => "homog",
            SolveMethod::Uncoupled => "uncoupled",
        }
    }
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolveMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(SolveMethod::Direct),
            "neumann" => Ok(SolveMethod::Neumann),
            "homog" => Ok(SolveMethod::Homog),
            "uncoupled" => Ok(SolveMethod::Uncoupled),
            other => Err(Error::Parse(format!("unknown solve method `{other}`"))),
        }
    }
}

/// Solved coefficient vectors with solver metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    pub vectors: Vec<Vec3>,
    pub method: SolveMethod,
    /// Factorisations for `direct`, operator applications for `neumann`.
    pub iterations: usize,
    /// `|C + T P C + Lambda|_2` at the time of solving.
    pub residual: f64,
}

impl CoefficientSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Stacked components `(C_1x, C_1y, C_1z, C_2x, ...)`.
    pub fn flat(&self) -> Vec<f64> {
        flatten(&self.vectors)
    }
}

fn flatten(v: &[Vec3]) -> Vec<f64> {
    v.iter().flat_map(|c| [c.x, c.y, c.z]).collect()
}

fn norm(v: &[Vec3]) -> f64 {
    v.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt()
}

/// The assembled interaction system.
///
/// The operator is applied matrix-free; [`InteractionSystem::dense_matrix`]
/// materialises it for small systems.
#[derive(Clone, Debug)]
pub struct InteractionSystem {
    kernel: Kernel,
    centers: Vec<Vec3>,
    polarization: Vec<Mat3>,
    active: Vec<bool>,
    rhs: Vec<Vec3>,
}

impl InteractionSystem {
    /// Assembles the system for a cloud in a domain under a background field.
    ///
    /// Fails if the background does not fit the domain or the cloud has
    /// overlapping inclusions or inclusions outside the domain.
    pub fn assemble(cloud: &Cloud, domain: &DomainSpec, background: &BackgroundField) -> Result<Self> {
        background.check(domain)?;
        let report = validate_cloud(cloud, domain, DEFAULT_RATIO_THRESHOLD);
        if report.has_hard_violations() {
            return Err(Error::Validation(Box::new(report)));
        }
        let mu_o = domain.mu_o();
        let centers: Vec<Vec3> = cloud.inclusions().iter().map(|i| i.center).collect();
        let polarization: Vec<Mat3> = cloud
            .inclusions()
            .iter()
            .map(|i| polarization_sphere(i.radius, mu_o, i.mu_i()).matrix)
            .collect();
        let active = polarization.iter().map(|p| *p != Mat3::zeros()).collect();
        let rhs = centers
            .iter()
            .map(|c| w_f_eval(c, background, domain).map(|w| -w.gradient))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kernel: Kernel::from_domain(domain),
            centers,
            polarization,
            active,
            rhs,
        })
    }

    /// Number of inclusions.
    pub fn n(&self) -> usize {
        self.centers.len()
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn centers(&self) -> &[Vec3] {
        &self.centers
    }

    pub fn polarization(&self) -> &[Mat3] {
        &self.polarization
    }

    /// `b = -Lambda`, one vector per inclusion.
    pub fn rhs(&self) -> &[Vec3] {
        &self.rhs
    }

    pub fn rhs_norm(&self) -> f64 {
        norm(&self.rhs)
    }

    /// `T v`, skipping sources with zero polarization when `masked`.
    fn apply_t(&self, v: &[Vec3], masked: bool) -> Vec<Vec3> {
        let sources: Vec<(Vec3, Vec3)> = self
            .centers
            .iter()
            .zip(v)
            .zip(&self.active)
            .filter(|(_, &on)| !masked || on)
            .map(|((c, q), _)| (*c, *q))
            .filter(|(_, q)| *q != Vec3::zeros())
            .collect();
        let kernel = self.kernel;
        self.centers
            .par_iter()
            .map(|z| {
                let mut acc = Vec3::zeros();
                for (w, q) in &sources {
                    if w != z {
                        acc += kernel.mixed_hessian_apply(z, w, q);
                    }
                }
                acc
            })
            .collect()
    }

    fn apply_p(&self, v: &[Vec3]) -> Vec<Vec3> {
        self.polarization.iter().zip(v).map(|(p, c)| p * c).collect()
    }

    /// `T P v`.
    pub fn apply_interaction(&self, v: &[Vec3]) -> Vec<Vec3> {
        self.apply_t(&self.apply_p(v), true)
    }

    /// `(T P)^T v = P T v`.
    pub fn apply_interaction_transpose(&self, v: &[Vec3]) -> Vec<Vec3> {
        self.apply_p(&self.apply_t(v, false))
    }

    /// `v + T P v`.
    pub fn apply(&self, v: &[Vec3]) -> Vec<Vec3> {
        self.apply_interaction(v).into_iter().zip(v).map(|(t, c)| c + t).collect()
    }

    /// `|C + T P C - b|_2`.
    pub fn residual(&self, c: &[Vec3]) -> f64 {
        let ac = self.apply(c);
        ac.iter().zip(&self.rhs).map(|(a, b)| (a - b).norm_squared()).sum::<f64>().sqrt()
    }

    /// The 3x3 block `T_jk P_k` of the operator.
    pub fn block(&self, j: usize, k: usize) -> Mat3 {
        if j == k || !self.active[k] {
            return Mat3::zeros();
        }
        self.kernel.mixed_hessian(&self.centers[j], &self.centers[k]) * self.polarization[k]
    }

    /// Column-major entries of `I + T P`.
    fn dense_column_major(&self) -> Vec<f64> {
        let m = 3 * self.n();
        let mut data = vec![0.0; m * m];
        data.par_chunks_mut(3 * m).enumerate().for_each(|(k, cols)| {
            for j in 0..self.n() {
                let b = self.block(j, k);
                for c in 0..3 {
                    for r in 0..3 {
                        cols[c * m + 3 * j + r] = b[(r, c)];
                    }
                }
            }
            for c in 0..3 {
                cols[c * m + 3 * k + c] += 1.0;
            }
        });
        data
    }

    /// `I + T P` as a dense matrix.
    pub fn dense_matrix(&self) -> DMatrix<f64> {
        let m = 3 * self.n();
        DMatrix::from_vec(m, m, self.dense_column_major())
    }

    /// Coefficients with all interactions dropped, `C_j = b_j`.
    pub fn uncoupled(&self) -> CoefficientSet {
        let vectors = self.rhs.clone();
        let residual = self.residual(&vectors);
        CoefficientSet {
            vectors,
            method: SolveMethod::Uncoupled,
            iterations: 0,
            residual,
        }
    }
}

fn unflatten(v: impl Iterator<Item = f64>) -> Vec<Vec3> {
    let flat: Vec<f64> = v.collect();
    flat.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect()
}

/// Dense LU solve with the default size cap.
pub fn solve_direct(system: &InteractionSystem) -> Result<CoefficientSet> {
    solve_direct_capped(system, DEFAULT_DIRECT_CAP)
}

/// Dense LU solve with partial pivoting followed by up to two steps of
/// iterative refinement against the matrix-free operator.
pub fn solve_direct_capped(system: &InteractionSystem, cap: usize) -> Result<CoefficientSet> {
    let m = 3 * system.n();
    if m > cap {
        return Err(Error::TooLarge { unknowns: m, cap });
    }
    let data = system.dense_column_major();
    let a = faer::mat::from_column_major_slice::<f64, _, _>(&data, m, m);
    let lu = a.partial_piv_lu();
    drop(data);

    let b_flat = flatten(system.rhs());
    let solve = |rhs: &[f64]| -> Vec<Vec3> {
        let col = faer::Col::<f64>::from_fn(m, |i| rhs[i]);
        let x = lu.solve(&col);
        unflatten((0..m).map(|i| x[i]))
    };

    let b_norm = system.rhs_norm();
    let mut c = solve(&b_flat);
    let mut residual = f64::INFINITY;
    for _ in 0..3 {
        if !c.iter().all(|v| v.iter().all(|x| x.is_finite())) {
            return Err(Error::SingularSystem);
        }
        let ac = system.apply(&c);
        let r: Vec<Vec3> = system.rhs().iter().zip(&ac).map(|(b, a)| b - a).collect();
        residual = norm(&r);
        if residual <= 1e-14 * b_norm {
            break;
        }
        let delta = solve(&flatten(&r));
        let next: Vec<Vec3> = c.iter().zip(&delta).map(|(x, d)| x + d).collect();
        let next_residual = system.residual(&next);
        if !(next_residual < residual) {
            break;
        }
        c = next;
        residual = next_residual;
    }
    if !(residual <= 1e-6 * b_norm.max(f64::MIN_POSITIVE)) && b_norm > 0.0 {
        return Err(Error::SingularSystem);
    }
    Ok(CoefficientSet {
        vectors: c,
        method: SolveMethod::Direct,
        iterations: 1,
        residual,
    })
}

/// Fixed-point iteration `C_{m+1} = b - T P C_m` from `C_0 = b`.
///
/// Stops once `|C + T P C - b| <= tol |b|`. Three consecutive residual
/// increases are reported as [`Error::Divergence`].
pub fn solve_neumann(system: &InteractionSystem, tol: f64, max_iter: usize) -> Result<CoefficientSet> {
    let b = system.rhs();
    let target = tol * system.rhs_norm();
    let mut c = b.to_vec();
    let mut previous = f64::INFINITY;
    let mut rising = 0;
    for sweep in 1..=max_iter.max(1) {
        let tpc = system.apply_interaction(&c);
        let residual = c
            .iter()
            .zip(&tpc)
            .zip(b)
            .map(|((c, t), b)| (c + t - b).norm_squared())
            .sum::<f64>()
            .sqrt();
        if !residual.is_finite() {
            return Err(Error::Divergence {
                sweeps: sweep,
                ratio: f64::INFINITY,
                residual,
            });
        }
        if residual <= target {
            return Ok(CoefficientSet {
                vectors: c,
                method: SolveMethod::Neumann,
                iterations: sweep,
                residual,
            });
        }
        if residual > previous {
            rising += 1;
            if rising >= 3 {
                return Err(Error::Divergence {
                    sweeps: sweep,
                    ratio: residual / previous,
                    residual,
                });
            }
        } else {
            rising = 0;
        }
        previous = residual;
        if sweep == max_iter.max(1) {
            return Err(Error::MaxIterations {
                sweeps: sweep,
                relative_residual: residual / system.rhs_norm(),
            });
        }
        c = b.iter().zip(&tpc).map(|(b, t)| b - t).collect();
    }
    unreachable!("loop returns on its last sweep")
}

/// Power-iteration estimate of the spectral norm of `T P`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionEstimate {
    pub norm: f64,
    pub iterations: usize,
}

/// Estimates `|T P|_2` by power iteration on `(T P)^T (T P)`, stopping when
/// successive estimates agree to `1e-10` relative or after `iters` steps.
pub fn contraction_norm(system: &InteractionSystem, iters: usize) -> ContractionEstimate {
    let n = system.n();
    let mut v: Vec<Vec3> = (0..n)
        .map(|j| {
            let t = j as f64 * 0.754_877_666_246_692_7;
            Vec3::new(1.0 + 0.5 * t.sin(), 1.0 + 0.5 * (1.3 * t).cos(), 1.0 + 0.5 * (0.7 * t + 1.0).sin())
        })
        .collect();
    let mut estimate = 0.0;
    let mut done = 0;
    for it in 1..=iters.max(1) {
        done = it;
        let s = norm(&v);
        if s == 0.0 {
            return ContractionEstimate { norm: 0.0, iterations: it };
        }
        v.iter_mut().for_each(|x| *x /= s);
        let w = system.apply_interaction_transpose(&system.apply_interaction(&v));
        let lambda: f64 = v.iter().zip(&w).map(|(a, b)| a.dot(b)).sum();
        let next = lambda.max(0.0).sqrt();
        let converged = (next - estimate).abs() <= 1e-10 * next;
        estimate = next;
        v = w;
        if converged || next == 0.0 {
            break;
        }
    }
    ContractionEstimate {
        norm: estimate,
        iterations: done,
    }
}

/// `K = sum |C_j|^2 / sum |grad w_f(O_j)|^2`, or `None` if the background
/// gradient vanishes at every center.
pub fn stability_ratio(coeffs: &CoefficientSet, system: &InteractionSystem) -> Option<f64> {
    let den: f64 = system.rhs().iter().map(|b| b.norm_squared()).sum();
    if den == 0.0 {
        return None;
    }
    let num: f64 = coeffs.vectors.iter().map(|c| c.norm_squared()).sum();
    Some(num / den)
}
