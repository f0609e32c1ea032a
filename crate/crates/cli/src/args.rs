use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use meso_core::{Error, Result};
use serde::{Deserialize, Serialize};

const UNITS: &str = "\
Units: lengths (centers, radii, ball radius, plane and line coordinates) are in
the length unit of the cluster file. Moduli are shear moduli in GPa, derived
from Young's modulus E [GPa] and Poisson's ratio nu as E / (2 (1 + nu)). The
background field is w_f = x1 / mu_O in the whole space, or the response to the
source max(r_f - |x|, 0) in a ball. u carries units of length / GPa for the
linear field and length^3 / GPa for the source; the coefficients C and
grad u carry one length unit less.

Exit codes: 0 success, 1 validation or solver failure, 2 I/O, parse or usage
error.";

#[derive(Parser, Debug)]
#[command(name = "meso", version, about = "Meso-scale approximations for clusters of spherical inclusions", after_help = UNITS)]
pub struct Cli {
    /// Worker threads (default: all available cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Print the effective run configuration as JSON and exit without running.
    #[arg(long, global = true)]
    pub dump_config: bool,

    /// Run the configuration stored in a JSON file written by --dump-config.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Print epsilon, d and N of a cluster file.
    Metrics {
        /// Cluster file (JSON).
        file: PathBuf,
    },
    /// Generate a periodic spherical cluster inside the ball |x| < 1/2 of the whole space.
    Generate {
        /// Number of grid cells of the unit cube; must be a perfect cube.
        #[arg(long)]
        n1: usize,
        /// Volume fraction of inclusions relative to the cube grid (dimensionless).
        #[arg(long)]
        beta: f64,
        /// Inclusion material: a catalog name or "void".
        #[arg(long)]
        material: String,
        /// Matrix material (catalog name).
        #[arg(long, default_value = "Structural Steel")]
        matrix: String,
        /// Output cluster file (standard output if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a cluster for overlaps, inclusions outside the domain and the epsilon / d ratio.
    Validate {
        file: PathBuf,
        /// Largest admissible epsilon / d (dimensionless).
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
    },
    /// Solve the interaction system for the coefficients C.
    Solve {
        file: PathBuf,
        /// Solver: auto picks direct up to 20000 unknowns and neumann beyond.
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Relative residual tolerance of the neumann iteration.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Sweep limit of the neumann iteration.
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Output coefficient CSV (standard output if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample u and grad u on a rectangle in a coordinate plane.
    EvalPlane {
        cluster: PathBuf,
        /// Coefficient CSV written by `solve`.
        coeffs: PathBuf,
        /// Normal axis of the plane.
        #[arg(long, value_enum)]
        axis: Axis,
        /// Plane position along the normal axis (length units).
        #[arg(long, allow_hyphen_values = true)]
        offset: f64,
        /// In-plane ranges as AXIS:LOW:HIGH, one per in-plane axis (length units).
        #[arg(long, num_args = 2, value_name = "AXIS:LOW:HIGH", allow_hyphen_values = true)]
        bounds: Vec<Bound>,
        /// Grid points per in-plane axis as NxM, in the order of the in-plane axes.
        #[arg(long, default_value = "200x200")]
        res: Resolution,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample u and grad u at equally spaced points of a segment.
    EvalLine {
        cluster: PathBuf,
        coeffs: PathBuf,
        /// Start point as X,Y,Z (length units).
        #[arg(long, allow_hyphen_values = true)]
        from: Point,
        /// End point as X,Y,Z (length units).
        #[arg(long, allow_hyphen_values = true)]
        to: Point,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare u - w_f of a generated cluster with the homogenised solution along the x1 axis.
    HomogCompare {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        material: String,
        #[arg(long, default_value = "Structural Steel")]
        matrix: String,
        /// Sample count on x1 in [-1.5, 1.5].
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report interface, boundary and solver residuals of a solved cluster.
    Check {
        cluster: PathBuf,
        coeffs: PathBuf,
        /// Sample directions per inclusion surface.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Auto,
    Direct,
    Neumann,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "x" => Some(Axis::X),
            "y" => Some(Axis::Y),
            "z" => Some(Axis::Z),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub axis: Axis,
    pub low: f64,
    pub high: f64,
}

impl FromStr for Bound {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("expected AXIS:LOW:HIGH, got `{s}`");
        if parts.len() != 3 {
            return Err(bad());
        }
        let axis = Axis::parse(parts[0]).ok_or_else(bad)?;
        let low = parts[1].parse().map_err(|_| bad())?;
        let high = parts[2].parse().map_err(|_| bad())?;
        Ok(Bound { axis, low, high })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub n: usize,
    pub m: usize,
}

impl FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("expected NxM, got `{s}`");
        let (n, m) = s.split_once('x').ok_or_else(bad)?;
        Ok(Resolution {
            n: n.parse().map_err(|_| bad())?,
            m: m.parse().map_err(|_| bad())?,
        })
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point(pub [f64; 3]);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("expected X,Y,Z, got `{s}`");
        let v: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let arr: [f64; 3] = v.try_into().map_err(|_| bad())?;
        Ok(Point(arr))
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub threads: Option<usize>,
    pub command: Command,
}

impl RunConfig {
    /// Builds the effective configuration. Returns `None` when the request
    /// was only to print it.
    pub fn from_cli(cli: Cli) -> Result<Option<Self>> {
        let mut config = match (&cli.config, cli.command) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
            }
            (Some(_), Some(_)) => return Err(Error::Parse("--config cannot be combined with a subcommand".into())),
            (None, Some(command)) => RunConfig { threads: None, command },
            (None, None) => return Err(Error::Parse("no subcommand given; see `meso --help`".into())),
        };
        if cli.threads.is_some() {
            config.threads = cli.threads;
        }
        if cli.dump_config {
            println!("{}", serde_json::to_string_pretty(&config)?);
            return Ok(None);
        }
        Ok(Some(config))
    }
}
