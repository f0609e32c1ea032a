use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use meso_core::evaluator::{sample_line, sample_plane, Approximation, PlaneSpec};
use meso_core::geometry::{
    catalog, cluster_to_string, generate_periodic_spherical_cluster, load_cluster, validate_cloud, ClusterFile,
    DomainSpec, Material, DEFAULT_RATIO_THRESHOLD,
};
use meso_core::homog::{compare_on_axis, effective_medium};
use meso_core::io::{read_coefficients, write_coefficients, write_field_csv, write_homog_compare};
use meso_core::kernels::BackgroundField;
use meso_core::system::{
    solve_direct, solve_neumann, stability_ratio, CoefficientSet, InteractionSystem, DEFAULT_DIRECT_CAP,
};
use meso_core::validation::interface_residuals;
use meso_core::{Error, Result, Vec3};
use serde::Serialize;

use crate::args::{Bound, Command, Method, RunConfig};

/// Relative continuity gap above which `check` fails.
const CONTINUITY_LIMIT: f64 = 1e-9;
/// Relative solver residual above which `check` fails.
const SOLVER_RESIDUAL_LIMIT: f64 = 1e-8;

/// Runs a configuration. `Ok(false)` means the run completed but a checked
/// invariant failed.
pub fn execute(config: &RunConfig) -> Result<bool> {
    if let Some(threads) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("cannot start {threads} threads: {e}")))?;
    }
    match &config.command {
        Command::Metrics { file } => metrics(file),
        Command::Generate {
            n1,
            beta,
            material,
            matrix,
            output,
        } => generate(*n1, *beta, material, matrix, output.as_deref()),
        Command::Validate { file, ratio } => validate(file, *ratio),
        Command::Solve {
            file,
            method,
            tol,
            max_iter,
            output,
        } => solve(file, *method, *tol, *max_iter, output.as_deref()),
        Command::EvalPlane {
            cluster,
            coeffs,
            axis,
            offset,
            bounds,
            res,
            output,
        } => {
            let plane = plane_spec(axis.index(), *offset, bounds, (res.n, res.m))?;
            eval_plane(cluster, coeffs, &plane, output.as_deref())
        }
        Command::EvalLine {
            cluster,
            coeffs,
            from,
            to,
            samples,
            output,
        } => eval_line(cluster, coeffs, Vec3::from(from.0), Vec3::from(to.0), *samples, output.as_deref()),
        Command::HomogCompare {
            n1,
            beta,
            material,
            matrix,
            samples,
            output,
        } => homog_compare(*n1, *beta, material, matrix, *samples, output.as_deref()),
        Command::Check {
            cluster,
            coeffs,
            samples,
        } => check(cluster, coeffs, *samples),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| with_path(e, p))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn with_path(e: io::Error, path: &Path) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn material(name: &str) -> Result<Material> {
    catalog::by_name(name).ok_or_else(|| Error::UnknownMaterial(name.to_string()))
}

/// Loads a cluster file and warns on stderr if epsilon / d breaches the default threshold.
fn load(path: &Path) -> Result<ClusterFile> {
    let file = load_cluster(path)?;
    let report = validate_cloud(&file.cloud, &file.domain, DEFAULT_RATIO_THRESHOLD);
    if !report.admissible {
        eprintln!("warning: {}: {report}", path.display());
    }
    Ok(file)
}

fn load_coefficients(path: &Path, expected: usize) -> Result<CoefficientSet> {
    let file = File::open(path).map_err(|e| with_path(e, path))?;
    let coeffs = read_coefficients(io::BufReader::new(file)).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    if coeffs.len() != expected {
        return Err(Error::CoefficientMismatch {
            expected,
            found: coeffs.len(),
        });
    }
    Ok(coeffs)
}

/// Rounds to three significant figures for display.
fn three_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let digits = (2 - v.abs().log10().floor() as i32).max(0) as usize;
    format!("{v:.digits$}")
}

fn metrics(path: &Path) -> Result<bool> {
    let file = load(path)?;
    let m = file.cloud.metrics();
    println!("epsilon={} d={} N={}", three_sig(m.epsilon), three_sig(m.d), m.n);
    Ok(true)
}

fn generated(n1: usize, beta: f64, material_name: &str, matrix: &str) -> Result<(ClusterFile, f64)> {
    let domain = DomainSpec::full_space(material(matrix)?)?;
    let pc = generate_periodic_spherical_cluster(n1, beta, material(material_name)?, &domain)?;
    let file = ClusterFile {
        domain,
        cloud: pc.cloud,
        background: BackgroundField::LinearX,
    };
    Ok((file, pc.b))
}

fn generate(n1: usize, beta: f64, material_name: &str, matrix: &str, output: Option<&Path>) -> Result<bool> {
    let (file, b) = generated(n1, beta, material_name, matrix)?;
    let mut out = open_output(output)?;
    out.write_all(cluster_to_string(&file)?.as_bytes())?;
    out.flush()?;
    eprintln!("generated N={} inclusions, epsilon/d={}", file.cloud.len(), three_sig(b));
    Ok(true)
}

fn validate(path: &Path, ratio: f64) -> Result<bool> {
    let file = load_cluster(path)?;
    let report = validate_cloud(&file.cloud, &file.domain, ratio);
    println!("{report}");
    if !report.admissible {
        eprintln!("warning: epsilon/d exceeds {ratio}");
    }
    Ok(!report.has_hard_violations())
}

fn solve_cluster(file: &ClusterFile, method: Method, tol: f64, max_iter: usize) -> Result<(InteractionSystem, CoefficientSet)> {
    let system = InteractionSystem::assemble(&file.cloud, &file.domain, &file.background)?;
    let direct = match method {
        Method::Direct => true,
        Method::Neumann => false,
        Method::Auto => 3 * system.n() <= DEFAULT_DIRECT_CAP,
    };
    let coeffs = if direct {
        solve_direct(&system)?
    } else {
        solve_neumann(&system, tol, max_iter).map_err(|e| {
            if matches!(e, Error::Divergence { .. } | Error::MaxIterations { .. }) {
                eprintln!("hint: rerun with --method direct");
            }
            e
        })?
    };
    Ok((system, coeffs))
}

fn solve(path: &Path, method: Method, tol: f64, max_iter: usize, output: Option<&Path>) -> Result<bool> {
    let file = load(path)?;
    let (system, coeffs) = solve_cluster(&file, method, tol, max_iter)?;
    let mut out = open_output(output)?;
    write_coefficients(&mut out, &coeffs)?;
    out.flush()?;
    eprintln!(
        "solved N={} with {} ({} iterations), residual {:e} (relative {:e})",
        system.n(),
        coeffs.method,
        coeffs.iterations,
        coeffs.residual,
        coeffs.residual / system.rhs_norm()
    );
    Ok(true)
}

fn plane_spec(axis: usize, offset: f64, bounds: &[Bound], resolution: (usize, usize)) -> Result<PlaneSpec> {
    let mut ranges = [(0.0, 0.0); 2];
    let in_plane = PlaneSpec {
        axis,
        offset,
        bounds: ranges,
        resolution,
    }
    .in_plane_axes();
    for (slot, wanted) in ranges.iter_mut().zip(in_plane) {
        let bound = bounds
            .iter()
            .find(|b| b.axis.index() == wanted)
            .ok_or_else(|| Error::InvalidParameter(format!("--bounds needs a range for in-plane axis {}", ["x", "y", "z"][wanted])))?;
        *slot = (bound.low, bound.high);
    }
    Ok(PlaneSpec {
        axis,
        offset,
        bounds: ranges,
        resolution,
    })
}

fn eval_plane(cluster: &Path, coeffs: &Path, plane: &PlaneSpec, output: Option<&Path>) -> Result<bool> {
    let file = load(cluster)?;
    let coeffs = load_coefficients(coeffs, file.cloud.len())?;
    let approx = Approximation::new(&file.cloud, &coeffs, &file.domain, &file.background)?;
    let points = sample_plane(plane, &approx)?;
    let mut out = open_output(output)?;
    write_field_csv(&mut out, &points)?;
    out.flush()?;
    Ok(true)
}

fn eval_line(cluster: &Path, coeffs: &Path, from: Vec3, to: Vec3, samples: usize, output: Option<&Path>) -> Result<bool> {
    let file = load(cluster)?;
    let coeffs = load_coefficients(coeffs, file.cloud.len())?;
    let approx = Approximation::new(&file.cloud, &coeffs, &file.domain, &file.background)?;
    let points = sample_line(from, to, samples, &approx)?;
    let mut out = open_output(output)?;
    write_field_csv(&mut out, &points)?;
    out.flush()?;
    Ok(true)
}

fn homog_compare(n1: usize, beta: f64, material_name: &str, matrix: &str, samples: usize, output: Option<&Path>) -> Result<bool> {
    let (file, b) = generated(n1, beta, material_name, matrix)?;
    let (_, coeffs) = solve_cluster(&file, Method::Auto, 1e-12, 500)?;
    let medium = effective_medium(b, file.domain.mu_o(), material(material_name)?.shear_modulus)?;
    if !medium.in_regime() {
        eprintln!(
            "warning: 4 pi b^3 |k| = {} is large; the homogenised limit may be inaccurate",
            three_sig(medium.regime_indicator)
        );
    }
    let approx = Approximation::new(&file.cloud, &coeffs, &file.domain, &file.background)?;
    let cmp = compare_on_axis(&approx, &medium, 0.5, -1.5, 1.5, samples)?;
    let mut out = open_output(output)?;
    write_homog_compare(&mut out, &cmp.x1, &cmp.system, &cmp.homog, cmp.sup_gap)?;
    out.flush()?;
    if output.is_some() {
        println!("sup_gap={}", meso_core::io::format_f64(cmp.sup_gap));
    }
    Ok(true)
}

#[derive(Serialize)]
struct CheckReport {
    cluster: PathBuf,
    n: usize,
    samples_per_inclusion: usize,
    max_continuity: f64,
    max_relative_continuity: f64,
    max_flux_jump: f64,
    max_relative_flux_jump: f64,
    boundary_sup: Option<f64>,
    boundary_envelope: Option<f64>,
    solver_residual: f64,
    relative_solver_residual: f64,
    stability_ratio: Option<f64>,
    passed: bool,
}

fn check(cluster: &Path, coeffs_path: &Path, samples: usize) -> Result<bool> {
    if samples == 0 {
        return Err(Error::InvalidParameter("--samples must be positive".into()));
    }
    let file = load(cluster)?;
    let coeffs = load_coefficients(coeffs_path, file.cloud.len())?;
    let system = InteractionSystem::assemble(&file.cloud, &file.domain, &file.background)?;
    let approx = Approximation::new(&file.cloud, &coeffs, &file.domain, &file.background)?;
    let residuals = interface_residuals(&approx, samples)?;
    let solver_residual = system.residual(&coeffs.vectors);
    let relative_solver_residual = if system.rhs_norm() > 0.0 {
        solver_residual / system.rhs_norm()
    } else {
        solver_residual
    };
    let max_relative_continuity = residuals.max_relative_continuity();
    let passed = max_relative_continuity <= CONTINUITY_LIMIT && relative_solver_residual <= SOLVER_RESIDUAL_LIMIT;
    let report = CheckReport {
        cluster: cluster.to_path_buf(),
        n: system.n(),
        samples_per_inclusion: samples,
        max_continuity: residuals.max_continuity(),
        max_relative_continuity,
        max_flux_jump: residuals.max_flux_jump(),
        max_relative_flux_jump: residuals.max_relative_flux_jump(),
        boundary_sup: residuals.boundary.map(|b| b.sup),
        boundary_envelope: residuals.boundary.map(|b| b.envelope),
        solver_residual,
        relative_solver_residual,
        stability_ratio: stability_ratio(&coeffs, &system),
        passed,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if !passed {
        eprintln!(
            "check failed: relative continuity {max_relative_continuity:e} (limit {CONTINUITY_LIMIT:e}), \
             relative solver residual {relative_solver_residual:e} (limit {SOLVER_RESIDUAL_LIMIT:e})"
        );
    }
    Ok(passed)
}
