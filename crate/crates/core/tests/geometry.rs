use std::collections::BTreeSet;

use meso_core::geometry::{
    catalog, cluster_metrics, cluster_to_string, generate_periodic_spherical_cluster, load_cluster, parse_cluster,
    retained_cell_centers, retained_cell_count, save_cluster, table2, validate_cloud, Cloud, ClusterFile, DomainSpec,
    Inclusion, Material, MetricConvention, Violation, DEFAULT_RATIO_THRESHOLD,
};
use meso_core::kernels::BackgroundField;
use meso_core::{Error, Vec3};
use proptest::prelude::*;

fn full_space() -> DomainSpec {
    DomainSpec::full_space(catalog::structural_steel()).unwrap()
}

fn data_file(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn bundled_table2_matches_the_builtin_cluster() {
    let loaded = load_cluster(data_file("table2.json")).unwrap();
    assert_eq!(loaded, table2::cluster());
    let m = loaded.cloud.metrics();
    assert_eq!(m.n, 27);
    assert!((m.epsilon - 0.24 / 7.0).abs() < 1e-15);
    let report = validate_cloud(&loaded.cloud, &loaded.domain, DEFAULT_RATIO_THRESHOLD);
    assert!(!report.has_hard_violations());
    assert!(report.admissible, "{report}");
}

#[test]
fn metrics_survive_save_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let pc = generate_periodic_spherical_cluster(1000, 0.09, catalog::aluminum(), &full_space()).unwrap();
    let file = ClusterFile {
        domain: full_space(),
        cloud: pc.cloud.clone(),
        background: BackgroundField::LinearX,
    };
    for source in [file, table2::cluster()] {
        let path = dir.path().join("c.json");
        save_cluster(&source, &path).unwrap();
        let once = load_cluster(&path).unwrap();
        save_cluster(&once, &path).unwrap();
        let twice = load_cluster(&path).unwrap();
        assert_eq!(once.cloud.metrics(), source.cloud.metrics());
        assert_eq!(twice.cloud.metrics(), source.cloud.metrics());
        assert_eq!(cluster_to_string(&once).unwrap(), cluster_to_string(&twice).unwrap());
    }
}

#[test]
fn generator_counts_grow_with_the_grid() {
    assert_eq!(retained_cell_count(8).unwrap(), 0);
    let mut previous = 0;
    for n in 2..=24usize {
        let count = retained_cell_count(n * n * n).unwrap();
        assert!(count >= previous, "count fell at n = {n}: {count} < {previous}");
        // Without a cell on the symmetry planes, each octant holds the same number of cells.
        if n % 2 == 0 {
            assert_eq!(count % 8, 0, "n = {n}");
        }
        previous = count;
    }
    assert!(retained_cell_count(1001).is_err());
}

/// Exact `1/(2n)` lattice coordinates of the retained centers.
fn lattice_set(n: usize) -> BTreeSet<[i64; 3]> {
    retained_cell_centers(n)
        .iter()
        .map(|c| {
            let s = 2.0 * n as f64;
            [(c.x * s).round() as i64, (c.y * s).round() as i64, (c.z * s).round() as i64]
        })
        .collect()
}

#[test]
fn retained_cells_have_cube_symmetry() {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for n in [10, 13, 18] {
        let set = lattice_set(n);
        assert!(!set.is_empty());
        for p in perms {
            for signs in 0..8 {
                let image: BTreeSet<[i64; 3]> = set
                    .iter()
                    .map(|c| {
                        let mut out = [0; 3];
                        for (i, slot) in out.iter_mut().enumerate() {
                            let s = if signs >> i & 1 == 1 { -1 } else { 1 };
                            *slot = s * c[p[i]];
                        }
                        out
                    })
                    .collect();
                assert_eq!(image, set, "n = {n}, perm {p:?}, signs {signs}");
            }
        }
    }
}

#[test]
fn retained_cells_lie_inside_the_cluster_ball() {
    for n in [10usize, 13, 18] {
        let half = 0.5 / n as f64;
        for c in retained_cell_centers(n) {
            let far = Vec3::new(c.x.abs() + half, c.y.abs() + half, c.z.abs() + half);
            assert!(far.norm() < 0.5);
        }
    }
}

#[test]
fn validation_reports_each_kind_of_violation() {
    let dom = DomainSpec::ball(1.0, catalog::structural_steel()).unwrap();
    let al = catalog::aluminum();
    let incs = vec![
        Inclusion::new(Vec3::new(0.0, 0.0, 0.0), 0.1, al.clone()).unwrap(),
        Inclusion::new(Vec3::new(0.15, 0.0, 0.0), 0.1, al.clone()).unwrap(),
        Inclusion::new(Vec3::new(0.0, 0.0, 0.95), 0.1, al).unwrap(),
    ];
    let cloud = Cloud::new(incs, &dom).unwrap();
    let report = validate_cloud(&cloud, &dom, DEFAULT_RATIO_THRESHOLD);
    assert!(!report.admissible);
    assert!(report.violations.iter().any(|v| matches!(v, Violation::Overlap { first: 0, second: 1, .. })));
    assert!(report.violations.iter().any(|v| matches!(v, Violation::OutsideDomain { index: 2 })));
    assert!(report.violations.iter().any(|v| matches!(v, Violation::RatioBreach { .. })));
}

#[test]
fn ratio_breach_alone_is_soft() {
    let dom = full_space();
    let al = catalog::aluminum();
    let incs = vec![
        Inclusion::new(Vec3::zeros(), 0.4, al.clone()).unwrap(),
        Inclusion::new(Vec3::new(1.0, 0.0, 0.0), 0.4, al).unwrap(),
    ];
    let cloud = Cloud::new(incs, &dom).unwrap();
    let report = validate_cloud(&cloud, &dom, DEFAULT_RATIO_THRESHOLD);
    assert!(!report.admissible);
    assert!(!report.has_hard_violations());
    assert!((report.eps_over_d - 0.8).abs() < 1e-15);
}

#[test]
fn metric_conventions() {
    let dom = DomainSpec::ball(2.0, catalog::structural_steel()).unwrap();
    let al = catalog::aluminum();
    let incs = vec![
        Inclusion::new(Vec3::zeros(), 0.1, al.clone()).unwrap(),
        Inclusion::new(Vec3::new(0.6, 0.0, 0.0), 0.2, al).unwrap(),
    ];
    let ball = cluster_metrics(&incs, &dom).unwrap();
    assert_eq!(ball.convention, MetricConvention::BallNormalized);
    assert!((ball.epsilon - 0.1).abs() < 1e-15 && (ball.d - 0.3).abs() < 1e-15);
    let half = Cloud::with_convention(incs.clone(), &dom, MetricConvention::HalfSeparation).unwrap();
    assert!((half.epsilon() - 0.2).abs() < 1e-15 && (half.d() - 0.3).abs() < 1e-15);
    let sep = Cloud::with_convention(incs.clone(), &dom, MetricConvention::Separation).unwrap();
    assert!((sep.d() - 0.6).abs() < 1e-15);
    let single = cluster_metrics(&incs[..1], &dom).unwrap();
    assert!(single.d.is_infinite());
    assert!(matches!(cluster_metrics(&[], &dom), Err(Error::EmptyCloud)));
    assert!(Cloud::with_convention(incs, &full_space(), MetricConvention::BallNormalized).is_err());
}

#[test]
fn malformed_files_fail_with_context() {
    let err = parse_cluster("{\"domain\": {\"type\": \"ball\", \"radius\": 1.0, \"matrix_material\": \"Iron\"}, \"inclusions\": [], \"background\": {\"type\": \"linear_x\"}, \"extra\": 1}").unwrap_err();
    assert!(matches!(err, Error::Parse(_)), "{err}");
    let err = load_cluster("/nonexistent/cluster.json").unwrap_err();
    assert!(matches!(err, Error::Io(_)), "{err}");
}

#[test]
fn shear_only_material_round_trips() {
    let dom = DomainSpec::full_space(Material::from_shear_modulus("soft", 2.0).unwrap()).unwrap();
    let incs = vec![Inclusion::new(Vec3::zeros(), 0.1, Material::void()).unwrap()];
    let file = ClusterFile {
        cloud: Cloud::new(incs, &dom).unwrap(),
        domain: dom,
        background: BackgroundField::LinearX,
    };
    let text = cluster_to_string(&file).unwrap();
    assert_eq!(parse_cluster(&text).unwrap(), file);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_clusters_are_admissible(n in 10usize..=16, beta in 0.001f64..0.09) {
        let pc = generate_periodic_spherical_cluster(n * n * n, beta, catalog::aluminum(), &full_space()).unwrap();
        let report = validate_cloud(&pc.cloud, &full_space(), DEFAULT_RATIO_THRESHOLD);
        prop_assert!(report.admissible, "{}", report);
        prop_assert!(pc.b < 0.5);
        let volume = pc.cloud.len() as f64 * 4.0 / 3.0 * std::f64::consts::PI * pc.cloud.epsilon().powi(3);
        prop_assert!((volume - beta).abs() <= 1e-12 * beta);
        for inc in pc.cloud.inclusions() {
            prop_assert!(inc.center.norm() + inc.radius < 0.5);
        }
    }

    #[test]
    fn locate_agrees_with_brute_force(p in prop::array::uniform3(-3.6f64..3.6)) {
        let cloud = table2::cloud();
        let x = Vec3::new(p[0], p[1], p[2]) + Vec3::new(2.5, 2.5, 2.5);
        let expected = cloud.inclusions().iter().position(|inc| (x - inc.center).norm() < inc.radius);
        prop_assert_eq!(cloud.locate(&x), expected);
    }
}
