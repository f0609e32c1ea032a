//! Inclusions, clusters and the ambient body.

mod cloud;
mod domain;
mod file;
mod generate;
mod material;
mod validate;

pub mod table2;

pub use cloud::{cluster_metrics, cluster_metrics_with, Cloud, ClusterMetrics, Inclusion, MetricConvention};
pub use domain::{DomainKind, DomainSpec};
pub use file::{cluster_to_string, load_cluster, parse_cluster, save_cluster, ClusterFile};
pub use generate::{generate_periodic_spherical_cluster, perfect_cube_root, retained_cell_centers, retained_cell_count, PeriodicCluster};
pub use material::{catalog, shear_modulus, Material};
pub use validate::{validate_cloud, ValidationReport, Violation, DEFAULT_RATIO_THRESHOLD};
