use serde::{Deserialize, Serialize};

use super::{DomainKind, DomainSpec, Material};
use crate::{Error, Result, Vec3};

/// One small spherical inclusion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inclusion {
    pub center: Vec3,
    pub radius: f64,
    pub material: Material,
}

impl Inclusion {
    pub fn new(center: Vec3, radius: f64, material: Material) -> Result<Self> {
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter(format!("inclusion center {center:?} is not finite")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("inclusion radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius, material })
    }

    pub fn mu_i(&self) -> f64 {
        self.material.shear_modulus
    }

    /// Closed-ball membership.
    pub fn contains(&self, x: &Vec3) -> bool {
        (x - self.center).norm() <= self.radius
    }
}

/// How the smallness parameters are normalised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricConvention {
    /// `epsilon = max a / R`, `d = min |O_j - O_k| / R`.
    BallNormalized,
    /// `epsilon = max a`, `d = min |O_j - O_k| / 2`.
    HalfSeparation,
    /// `epsilon = max a`, `d = min |O_j - O_k|` (the lattice spacing of a periodic cluster).
    Separation,
}

impl MetricConvention {
    pub fn default_for(domain: &DomainSpec) -> Self {
        match domain.kind {
            DomainKind::Ball { .. } => Self::BallNormalized,
            DomainKind::FullSpace => Self::HalfSeparation,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::BallNormalized => "ball_normalized",
            Self::HalfSeparation => "half_separation",
            Self::Separation => "separation",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ball_normalized" => Some(Self::BallNormalized),
            "half_separation" => Some(Self::HalfSeparation),
            "separation" => Some(Self::Separation),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterMetrics {
    pub epsilon: f64,
    /// `f64::INFINITY` for a single inclusion.
    pub d: f64,
    pub n: usize,
    pub convention: MetricConvention,
}

impl ClusterMetrics {
    pub fn eps_over_d(&self) -> f64 {
        self.epsilon / self.d
    }
}

/// Smallest distance between two centers, `+inf` for fewer than two.
pub(crate) fn min_center_distance(inclusions: &[Inclusion]) -> f64 {
    let mut best = f64::INFINITY;
    for (j, a) in inclusions.iter().enumerate() {
        for b in &inclusions[j + 1..] {
            best = best.min((a.center - b.center).norm());
        }
    }
    best
}

/// Metrics with the default convention of the domain.
pub fn cluster_metrics(inclusions: &[Inclusion], domain: &DomainSpec) -> Result<ClusterMetrics> {
    cluster_metrics_with(inclusions, domain, MetricConvention::default_for(domain))
}

pub fn cluster_metrics_with(
    inclusions: &[Inclusion],
    domain: &DomainSpec,
    convention: MetricConvention,
) -> Result<ClusterMetrics> {
    if inclusions.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let max_radius = inclusions.iter().map(|i| i.radius).fold(0.0, f64::max);
    let min_dist = min_center_distance(inclusions);
    let (epsilon, d) = match convention {
        MetricConvention::BallNormalized => {
            let r = domain.radius().ok_or_else(|| {
                Error::InvalidParameter("ball-normalised metrics need a bounded ball".into())
            })?;
            (max_radius / r, min_dist / r)
        }
        MetricConvention::HalfSeparation => (max_radius, 0.5 * min_dist),
        MetricConvention::Separation => (max_radius, min_dist),
    };
    Ok(ClusterMetrics {
        epsilon,
        d,
        n: inclusions.len(),
        convention,
    })
}

/// An ordered collection of inclusions together with its metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cloud {
    inclusions: Vec<Inclusion>,
    metrics: ClusterMetrics,
}

impl Cloud {
    pub fn new(inclusions: Vec<Inclusion>, domain: &DomainSpec) -> Result<Self> {
        let convention = MetricConvention::default_for(domain);
        Self::with_convention(inclusions, domain, convention)
    }

    pub fn with_convention(
        inclusions: Vec<Inclusion>,
        domain: &DomainSpec,
        convention: MetricConvention,
    ) -> Result<Self> {
        let metrics = cluster_metrics_with(&inclusions, domain, convention)?;
        Ok(Self { inclusions, metrics })
    }

    pub fn inclusions(&self) -> &[Inclusion] {
        &self.inclusions
    }

    pub fn len(&self) -> usize {
        self.inclusions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inclusions.is_empty()
    }

    pub fn metrics(&self) -> &ClusterMetrics {
        &self.metrics
    }

    pub fn epsilon(&self) -> f64 {
        self.metrics.epsilon
    }

    pub fn d(&self) -> f64 {
        self.metrics.d
    }

    /// Index of the inclusion containing `x`, if any. Interface points count
    /// as exterior.
    pub fn locate(&self, x: &Vec3) -> Option<usize> {
        self.inclusions
            .iter()
            .position(|inc| (x - inc.center).norm() < inc.radius)
    }

    /// Same cloud with every radius multiplied by `gamma`, centers fixed.
    pub fn scaled_radii(&self, gamma: f64, domain: &DomainSpec) -> Result<Self> {
        let inclusions = self
            .inclusions
            .iter()
            .map(|inc| Inclusion::new(inc.center, inc.radius * gamma, inc.material.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::with_convention(inclusions, domain, self.metrics.convention)
    }

    /// Same cloud with the inclusions reordered so that entry `i` is the
    /// old inclusion `order[i]`.
    pub fn permuted(&self, order: &[usize], domain: &DomainSpec) -> Result<Self> {
        let inclusions = order.iter().map(|&i| self.inclusions[i].clone()).collect();
        Self::with_convention(inclusions, domain, self.metrics.convention)
    }

    /// Same cloud with every inclusion given the matrix material.
    pub fn with_uniform_material(&self, material: &Material, domain: &DomainSpec) -> Result<Self> {
        let inclusions = self
            .inclusions
            .iter()
            .map(|inc| Inclusion {
                material: material.clone(),
                ..inc.clone()
            })
            .collect();
        Self::with_convention(inclusions, domain, self.metrics.convention)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;

    fn steel() -> Material {
        catalog::structural_steel()
    }

    #[test]
    fn single_inclusion_in_ball() {
        let dom = DomainSpec::ball(7.0, steel()).unwrap();
        let inc = Inclusion::new(Vec3::new(1.0, 0.0, 0.0), 0.24, catalog::aluminum()).unwrap();
        let m = cluster_metrics(&[inc], &dom).unwrap();
        assert_eq!(m.epsilon, 0.24 / 7.0);
        assert!(m.d.is_infinite());
        assert_eq!(m.n, 1);
    }

    #[test]
    fn unit_separated_pair_in_full_space() {
        let dom = DomainSpec::full_space(steel()).unwrap();
        let incs = vec![
            Inclusion::new(Vec3::zeros(), 0.1, Material::void()).unwrap(),
            Inclusion::new(Vec3::new(0.0, 1.0, 0.0), 0.1, Material::void()).unwrap(),
        ];
        let m = cluster_metrics(&incs, &dom).unwrap();
        assert_eq!(m.d, 0.5);
        assert_eq!(m.convention, MetricConvention::HalfSeparation);
        let m = cluster_metrics_with(&incs, &dom, MetricConvention::Separation).unwrap();
        assert_eq!(m.d, 1.0);
    }

    #[test]
    fn empty_cloud_is_an_error() {
        let dom = DomainSpec::full_space(steel()).unwrap();
        assert!(matches!(cluster_metrics(&[], &dom), Err(Error::EmptyCloud)));
        assert!(cluster_metrics_with(&[], &dom, MetricConvention::BallNormalized).is_err());
    }

    #[test]
    fn ball_convention_needs_a_ball() {
        let dom = DomainSpec::full_space(steel()).unwrap();
        let inc = Inclusion::new(Vec3::zeros(), 0.1, Material::void()).unwrap();
        assert!(cluster_metrics_with(&[inc], &dom, MetricConvention::BallNormalized).is_err());
    }

    #[test]
    fn inclusion_rejects_bad_input() {
        assert!(Inclusion::new(Vec3::zeros(), 0.0, Material::void()).is_err());
        assert!(Inclusion::new(Vec3::new(f64::NAN, 0.0, 0.0), 1.0, Material::void()).is_err());
    }

    #[test]
    fn locate_treats_interface_as_exterior() {
        let dom = DomainSpec::full_space(steel()).unwrap();
        let cloud = Cloud::new(vec![Inclusion::new(Vec3::zeros(), 0.5, Material::void()).unwrap()], &dom).unwrap();
        assert_eq!(cloud.locate(&Vec3::new(0.25, 0.0, 0.0)), Some(0));
        assert_eq!(cloud.locate(&Vec3::new(0.5, 0.0, 0.0)), None);
    }
}
