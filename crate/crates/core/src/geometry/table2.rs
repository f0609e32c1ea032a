//! The 27-inclusion benchmark cluster in a steel ball of radius 7.

use super::{catalog, Cloud, ClusterFile, DomainSpec, Inclusion, Material};
use crate::kernels::BackgroundField;
use crate::Vec3;

pub const BALL_RADIUS: f64 = 7.0;
pub const SOURCE_RADIUS: f64 = 1.5;

/// `(center, radius, material)` rows; `"void"` marks an empty inclusion.
#[allow(clippy::approx_constant)]
pub const ROWS: [([f64; 3], f64, &str); 27] = [
    ([2.56, 2.5, 1.83], 0.24, "void"),
    ([1.83, 2.48, 3.16], 0.15, "void"),
    ([2.49, 3.19, 3.16], 0.17, "void"),
    ([1.82, 2.52, 1.83], 0.21, "Cast Iron"),
    ([2.43, 3.18, 1.83], 0.17, "Cast Iron"),
    ([2.49, 3.19, 2.5], 0.2, "Cast Iron"),
    ([2.53, 2.49, 3.16], 0.17, "Cast Iron"),
    ([3.13, 2.47, 1.83], 0.16, "Steel AISI 4340"),
    ([2.45, 1.86, 3.16], 0.22, "Steel AISI 4340"),
    ([3.12, 3.15, 3.16], 0.2, "Steel AISI 4340"),
    ([1.78, 2.48, 2.5], 0.15, "Aluminum"),
    ([1.84, 3.18, 2.5], 0.17, "Aluminum"),
    ([2.54, 2.51, 2.5], 0.24, "Aluminum"),
    ([3.11, 1.83, 3.16], 0.2, "Aluminum"),
    ([3.11, 2.51, 3.16], 0.16, "Aluminum"),
    ([1.77, 3.19, 1.83], 0.14, "Copper"),
    ([3.22, 1.85, 1.83], 0.24, "Copper"),
    ([1.8, 1.86, 2.5], 0.18, "Copper"),
    ([3.13, 1.8, 2.5], 0.24, "Copper"),
    ([3.15, 2.47, 2.5], 0.22, "Copper"),
    ([1.81, 1.82, 1.83], 0.18, "Iron"),
    ([2.48, 1.81, 1.83], 0.16, "Iron"),
    ([3.22, 3.19, 1.83], 0.19, "Iron"),
    ([2.44, 1.83, 2.5], 0.23, "Iron"),
    ([3.16, 3.16, 2.5], 0.18, "Iron"),
    ([1.83, 1.84, 3.16], 0.18, "Iron"),
    ([1.85, 3.14, 3.16], 0.23, "Iron"),
];

pub fn domain() -> DomainSpec {
    DomainSpec::ball(BALL_RADIUS, catalog::structural_steel()).expect("valid ball")
}

pub fn cloud() -> Cloud {
    let inclusions = ROWS
        .iter()
        .map(|&(c, a, name)| {
            let material: Material = catalog::by_name(name).expect("catalog material");
            Inclusion::new(Vec3::from(c), a, material).expect("valid inclusion")
        })
        .collect();
    Cloud::new(inclusions, &domain()).expect("non-empty cloud")
}

/// Cloud, ball and radial source of the benchmark.
pub fn cluster() -> ClusterFile {
    ClusterFile {
        domain: domain(),
        cloud: cloud(),
        background: BackgroundField::RadialSource { r_f: SOURCE_RADIUS },
    }
}
