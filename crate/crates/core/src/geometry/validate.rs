use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Cloud, DomainKind, DomainSpec};

/// Default admissibility threshold for `epsilon / d`.
pub const DEFAULT_RATIO_THRESHOLD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `|O_first - O_second| - a_first - a_second <= 0`.
    Overlap { first: usize, second: usize, gap: f64 },
    /// The inclusion is not strictly inside the domain.
    OutsideDomain { index: usize },
    RatioBreach { ratio: f64, threshold: f64 },
}

impl Violation {
    /// Overlaps and inclusions outside the domain make the geometry unusable;
    /// a ratio breach only leaves the asymptotic regime.
    pub fn is_hard(&self) -> bool {
        !matches!(self, Violation::RatioBreach { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap { first, second, gap } => {
                write!(f, "inclusions {first} and {second} overlap (surface gap {gap:.3e})")
            }
            Violation::OutsideDomain { index } => {
                write!(f, "inclusion {index} is not strictly inside the domain")
            }
            Violation::RatioBreach { ratio, threshold } => {
                write!(f, "epsilon/d = {ratio:.4} exceeds the threshold {threshold}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub eps_over_d: f64,
    pub admissible: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn hard_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.is_hard())
    }

    pub fn has_hard_violations(&self) -> bool {
        self.hard_violations().next().is_some()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eps/d = {:.4}", self.eps_over_d)?;
        for v in &self.violations {
            write!(f, "; {v}")?;
        }
        Ok(())
    }
}

/// Checks pairwise separation, containment in the domain and the
/// `epsilon / d` ratio. Findings are returned as data.
pub fn validate_cloud(cloud: &Cloud, domain: &DomainSpec, ratio_threshold: f64) -> ValidationReport {
    let incs = cloud.inclusions();
    let mut violations = Vec::new();

    for (j, a) in incs.iter().enumerate() {
        for (k, b) in incs.iter().enumerate().skip(j + 1) {
            let gap = (a.center - b.center).norm() - a.radius - b.radius;
            if gap <= 0.0 {
                violations.push(Violation::Overlap { first: j, second: k, gap });
            }
        }
    }

    if let DomainKind::Ball { radius } = domain.kind {
        for (index, inc) in incs.iter().enumerate() {
            if inc.center.norm() + inc.radius >= radius {
                violations.push(Violation::OutsideDomain { index });
            }
        }
    }

    let ratio = cloud.metrics().eps_over_d();
    if ratio > ratio_threshold {
        violations.push(Violation::RatioBreach {
            ratio,
            threshold: ratio_threshold,
        });
    }

    ValidationReport {
        eps_over_d: ratio,
        admissible: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catalog, Inclusion, Material};
    use crate::Vec3;

    fn ball() -> DomainSpec {
        DomainSpec::ball(7.0, catalog::structural_steel()).unwrap()
    }

    fn inc(x: f64, y: f64, z: f64, a: f64) -> Inclusion {
        Inclusion::new(Vec3::new(x, y, z), a, Material::void()).unwrap()
    }

    #[test]
    fn overlapping_pair_is_reported() {
        let dom = ball();
        let cloud = Cloud::new(vec![inc(0.0, 0.0, 0.0, 0.3), inc(0.5, 0.0, 0.0, 0.3)], &dom).unwrap();
        let rep = validate_cloud(&cloud, &dom, 10.0);
        assert!(!rep.admissible);
        assert!(matches!(rep.violations[0], Violation::Overlap { first: 0, second: 1, .. }));
    }

    #[test]
    fn center_on_boundary_is_outside() {
        let dom = ball();
        let cloud = Cloud::new(vec![inc(0.0, 0.0, 0.0, 0.1), inc(7.0, 0.0, 0.0, 0.1)], &dom).unwrap();
        let rep = validate_cloud(&cloud, &dom, 0.5);
        assert_eq!(rep.violations, vec![Violation::OutsideDomain { index: 1 }]);
        assert!(rep.has_hard_violations());
    }

    #[test]
    fn ratio_breach_is_soft() {
        let dom = ball();
        let cloud = Cloud::new(vec![inc(0.0, 0.0, 0.0, 0.3), inc(0.7, 0.0, 0.0, 0.3)], &dom).unwrap();
        let rep = validate_cloud(&cloud, &dom, 0.3);
        assert!(!rep.admissible);
        assert!(!rep.has_hard_violations());
        assert!(validate_cloud(&cloud, &dom, 0.5).admissible);
    }

    #[test]
    fn duplicate_centers_overlap() {
        let dom = ball();
        let cloud = Cloud::new(vec![inc(1.0, 1.0, 1.0, 0.1), inc(1.0, 1.0, 1.0, 0.1)], &dom).unwrap();
        let rep = validate_cloud(&cloud, &dom, 0.5);
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::Overlap { .. })));
    }
}
