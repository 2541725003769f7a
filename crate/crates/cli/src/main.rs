//! `xp`: command line front end for `xp-core`.

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{envelope, exit_code, to_csv, Failure};

#[derive(Parser, Debug)]
#[command(name = "xp", version, about = "Exponential periods, rapid decay homology and volume representations")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Emit the JSON envelope (default).
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit `key,value` rows instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Absolute error target for numerical integration.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Integrate even when the convergence gate rejects the path.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exponential period integrals.
    #[command(subcommand)]
    Period(PeriodCmd),
    /// Rapid decay and chain-complex homology.
    #[command(subcommand)]
    Homology(HomologyCmd),
    /// Truncated twisted de Rham cohomology of (A¹, Y, f).
    Derham(DerhamArgs),
    /// Geometric simplicial complexes.
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Integrals as volumes.
    #[command(subcommand)]
    Volume(VolumeCmd),
    /// Consistency checks.
    #[command(subcommand)]
    Check(CheckCmd),
}

#[derive(Subcommand, Debug)]
pub enum PeriodCmd {
    /// ∫_path e^{-f} ω, optionally paired with values on marked points.
    Eval {
        #[arg(long)]
        f: String,
        #[arg(long)]
        omega: String,
        /// `ray:B:D`, `segment:A:B`, `poly:A:B:…` or `param:γ1(t),…`.
        #[arg(long)]
        path: String,
        /// Marked points Y for a relative pairing (comma separated).
        #[arg(long)]
        marked: Option<String>,
        /// Values of the cocycle on the marked points (comma separated).
        #[arg(long)]
        values: Option<String>,
    },
    /// Period matrix of (A¹, {0}, zⁿ).
    Matrix {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum HomologyCmd {
    /// Rapid decay homology of a genus-0 curve.
    Rd {
        /// `A1` (punctured at ∞), `P1` (no punctures), or a curve JSON file/literal.
        #[arg(long, default_value = "A1")]
        curve: String,
        /// Extra punctures (comma separated, `inf` for ∞).
        #[arg(long)]
        punctures: Option<String>,
        /// Marked points (comma separated Gaussian rationals).
        #[arg(long)]
        marked: Option<String>,
        #[arg(long)]
        f: Option<String>,
    },
    /// Homology of a chain complex, or of a simplicial pair (K, L).
    Chain {
        /// Chain complex JSON `{"dims":[…],"boundaries":[…]}`.
        #[arg(long = "in", conflicts_with = "complex")]
        input: Option<String>,
        /// Simplicial complex JSON.
        #[arg(long)]
        complex: Option<String>,
        /// Subcomplex for relative homology.
        #[arg(long, requires = "complex")]
        sub: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct DerhamArgs {
    #[arg(long)]
    pub f: String,
    /// Marked points (comma separated Gaussian rationals).
    #[arg(long)]
    pub marked: Option<String>,
    /// Truncation degree N (default 2·deg f).
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum ComplexCmd {
    /// Closed core of the barycentric subdivision.
    Core {
        #[arg(long = "in")]
        input: String,
    },
    /// Barycentric subdivision.
    Subdivide {
        #[arg(long = "in")]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum VolumeCmd {
    /// U± graph regions of a density domain and their volumes.
    Represent {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        density: String,
    },
    /// Signed combination of region volumes on a mesh.
    Combine {
        #[arg(long)]
        spec: String,
        /// Mesh size (rational); overrides `eps` in the spec.
        #[arg(long)]
        eps: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CheckCmd {
    /// Stokes residual on a triangle, or on random instances.
    Stokes {
        /// `x0,y0;x1,y1;x2,y2`.
        #[arg(long, requires_all = ["omega", "f"], conflicts_with = "random")]
        triangle: Option<String>,
        /// 1-form in x, y.
        #[arg(long)]
        omega: Option<String>,
        /// Function in x, y.
        #[arg(long)]
        f: Option<String>,
        /// Number of random instances (seeded by --seed).
        #[arg(long)]
        random: Option<usize>,
    },
    /// Properness verdict for f along a path.
    Proper {
        #[arg(long)]
        f: String,
        #[arg(long)]
        path: String,
    },
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("XP_THREADS") {
        let n: usize = v.parse().map_err(|_| Failure::Usage(format!("XP_THREADS=`{v}` is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    let result = configure_threads().and_then(|()| commands::dispatch(&cli));
    let (outcome, code) = match result {
        Ok(o) => {
            let code = exit_code(o.status);
            (o, code)
        }
        Err(f) => f.into_outcome(),
    };
    let text = if cli.global.csv {
        to_csv(&outcome)
    } else {
        serde_json::to_string_pretty(&envelope(&outcome)).expect("JSON value") + "\n"
    };
    let _ = std::io::stdout().write_all(text.as_bytes());
    ExitCode::from(code as u8)
}
