//! JSON cluster files.
//!
//! ```json
//! {
//!   "domain": {"type": "ball", "radius": 7.0, "matrix_material": "Structural Steel"},
//!   "materials": {"Structural Steel": {"E_gpa": 200.0, "nu": 0.33}, "Soft": {"mu_gpa": 1.0}},
//!   "inclusions": [{"center": [2.56, 2.5, 1.83], "radius": 0.24, "material": "void"}],
//!   "background": {"type": "radial_source", "r_f": 1.5}
//! }
//! ```
//!
//! Material names are looked up in `materials` first and then in the
//! built-in [`catalog`]. The optional `domain.d_convention` key
//! (`ball_normalized`, `half_separation` or `separation`) selects how `d` is
//! measured.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{catalog, validate_cloud, Cloud, DomainKind, DomainSpec, Inclusion, Material, MetricConvention, DEFAULT_RATIO_THRESHOLD};
use crate::kernels::BackgroundField;
use crate::{Error, Result, Vec3};

/// Everything a cluster file describes.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterFile {
    pub domain: DomainSpec,
    pub cloud: Cloud,
    pub background: BackgroundField,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    domain: RawDomain,
    #[serde(default)]
    materials: BTreeMap<String, RawMaterial>,
    inclusions: Vec<RawInclusion>,
    background: RawBackground,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    matrix_material: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_convention: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawMaterial {
    Engineering { #[serde(rename = "E_gpa")] e_gpa: f64, nu: f64 },
    Shear { mu_gpa: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInclusion {
    center: [f64; 3],
    radius: f64,
    material: String,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawBackground {
    RadialSource { r_f: f64 },
    LinearX,
}

fn resolve(name: &str, table: &BTreeMap<String, RawMaterial>) -> Result<Material> {
    if let Some(raw) = table.get(name) {
        return match *raw {
            RawMaterial::Engineering { e_gpa, nu } => Material::from_engineering(name, e_gpa, nu),
            RawMaterial::Shear { mu_gpa } => Material::from_shear_modulus(name, mu_gpa),
        }
        .map_err(|e| Error::Parse(format!("materials.{name}: {e}")));
    }
    catalog::by_name(name).ok_or_else(|| Error::UnknownMaterial(name.to_string()))
}

/// Parses and validates a cluster file held in memory.
///
/// Overlapping inclusions and inclusions outside the domain are rejected; a
/// large `epsilon / d` ratio is left for the caller to report.
pub fn parse_cluster(text: &str) -> Result<ClusterFile> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;

    let matrix = resolve(&raw.domain.matrix_material, &raw.materials)?;
    let domain = match raw.domain.kind.as_str() {
        "ball" => {
            let radius = raw
                .domain
                .radius
                .ok_or_else(|| Error::Parse("domain.radius is required for a ball".into()))?;
            DomainSpec::ball(radius, matrix)
        }
        "full_space" => DomainSpec::full_space(matrix),
        other => return Err(Error::Parse(format!("domain.type: unknown domain `{other}`"))),
    }
    .map_err(|e| Error::Parse(format!("domain: {e}")))?;

    let convention = match &raw.domain.d_convention {
        None => MetricConvention::default_for(&domain),
        Some(s) => MetricConvention::parse(s)
            .ok_or_else(|| Error::Parse(format!("domain.d_convention: unknown convention `{s}`")))?,
    };

    if raw.inclusions.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let inclusions = raw
        .inclusions
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let material = resolve(&r.material, &raw.materials)?;
            Inclusion::new(Vec3::from(r.center), r.radius, material)
                .map_err(|e| Error::Parse(format!("inclusions[{i}]: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let cloud = Cloud::with_convention(inclusions, &domain, convention)?;

    let background = match raw.background {
        RawBackground::RadialSource { r_f } => BackgroundField::RadialSource { r_f },
        RawBackground::LinearX => BackgroundField::LinearX,
    };
    background.check(&domain)?;

    let report = validate_cloud(&cloud, &domain, DEFAULT_RATIO_THRESHOLD);
    if report.has_hard_violations() {
        return Err(Error::Validation(Box::new(report)));
    }
    Ok(ClusterFile { domain, cloud, background })
}

pub fn load_cluster(path: impl AsRef<Path>) -> Result<ClusterFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_cluster(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn raw_material(m: &Material) -> RawMaterial {
    match (m.youngs_modulus, m.poisson_ratio) {
        (Some(e_gpa), Some(nu)) => RawMaterial::Engineering { e_gpa, nu },
        _ => RawMaterial::Shear { mu_gpa: m.shear_modulus },
    }
}

/// Serialises a cluster to the JSON schema read by [`parse_cluster`].
pub fn cluster_to_string(file: &ClusterFile) -> Result<String> {
    let mut materials = BTreeMap::new();
    let mut name_of = |m: &Material| -> String {
        if *m == Material::void() {
            return "void".to_string();
        }
        materials.entry(m.name.clone()).or_insert_with(|| raw_material(m));
        m.name.clone()
    };
    let matrix_material = name_of(&file.domain.matrix);
    let inclusions = file
        .cloud
        .inclusions()
        .iter()
        .map(|inc| RawInclusion {
            center: [inc.center.x, inc.center.y, inc.center.z],
            radius: inc.radius,
            material: name_of(&inc.material),
        })
        .collect();
    let (kind, radius) = match file.domain.kind {
        DomainKind::Ball { radius } => ("ball", Some(radius)),
        DomainKind::FullSpace => ("full_space", None),
    };
    let raw = RawFile {
        domain: RawDomain {
            kind: kind.to_string(),
            radius,
            matrix_material,
            d_convention: Some(file.cloud.metrics().convention.as_str().to_string()),
        },
        materials,
        inclusions,
        background: match file.background {
            BackgroundField::RadialSource { r_f } => RawBackground::RadialSource { r_f },
            BackgroundField::LinearX => RawBackground::LinearX,
        },
    };
    let mut s = serde_json::to_string_pretty(&raw)?;
    s.push('\n');
    Ok(s)
}

pub fn save_cluster(file: &ClusterFile, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, cluster_to_string(file)?)?;
    Ok(())
}
