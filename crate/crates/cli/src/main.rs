use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_bounds_core::pipeline::{self, bounds_csv_rows, AnalyzeOptions, Report};
use dirac_bounds_core::{Family, ManifoldSpec, PairSearch};
use serde::Serialize;

/// Curvature invariants and Dirac eigenvalue lower bounds.
#[derive(Parser)]
#[command(name = "dirac-bounds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in manifolds and their parameters.
    Catalog {
        /// Machine-readable schema.
        #[arg(long)]
        json: bool,
    },
    /// Run the full analysis and write a report.
    Analyze {
        /// Manifold spec file (JSON).
        spec: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Analyze and check every property against the spectrum oracle.
    Verify {
        spec: PathBuf,
        /// Print the checks as JSON.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Tuning {
    /// Convergence tolerance of the pair-supremum search.
    #[arg(long, default_value_t = 1e-3)]
    tol_pair: f64,
    /// Relative tolerance of the Hermitian eigen solves.
    #[arg(long, default_value_t = 1e-10)]
    tol_eig: f64,
    /// Seed of the randomized pair search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Repeat lattice analyses at half spacing and report convergence.
    #[arg(long)]
    grid_refine: bool,
    /// Comma-separated family ids to evaluate (default: all).
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<String>>,
    /// Complex dimension of an asserted Kähler structure.
    #[arg(long)]
    kahler: Option<usize>,
}

impl Tuning {
    fn options(&self) -> anyhow::Result<AnalyzeOptions> {
        if [self.tol_pair, self.tol_eig].iter().any(|t| t.is_nan() || *t <= 0.0) {
            bail!("tolerances must be positive");
        }
        let families = match &self.families {
            None => None,
            Some(ids) => Some(
                ids.iter()
                    .map(|id| {
                        Family::from_id(id.trim()).with_context(|| {
                            let known: Vec<&str> = Family::ALL.iter().map(|f| f.id()).collect();
                            format!("unknown family `{id}` (known: {})", known.join(", "))
                        })
                    })
                    .collect::<anyhow::Result<Vec<_>>>()?,
            ),
        };
        Ok(AnalyzeOptions {
            pair: PairSearch {
                tolerance: self.tol_pair,
                seed: self.seed,
                ..PairSearch::default()
            },
            eig_tolerance: self.tol_eig,
            grid_refine: self.grid_refine,
            families,
            kahler_m: self.kahler,
        })
    }
}

/// Failure kinds, mapped to exit codes.
enum Failure {
    Input(anyhow::Error),
    Violation,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Catalog { json } => catalog(json).map_err(Failure::from),
        Command::Analyze {
            spec,
            out,
            format,
            tuning,
        } => analyze(&spec, out.as_deref(), format, &tuning),
        Command::Verify { spec, json, tuning } => verify(&spec, json, &tuning),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) -> anyhow::Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn read_spec(path: &Path) -> anyhow::Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing spec {}", path.display()))
}

fn run(spec_path: &Path, tuning: &Tuning) -> anyhow::Result<Report> {
    let spec = read_spec(spec_path)?;
    let opts = tuning.options()?;
    let base = spec_path.parent().filter(|p| !p.as_os_str().is_empty());
    Ok(pipeline::analyze(&spec, &opts, base)?)
}

fn analyze(spec_path: &Path, out: Option<&Path>, format: Format, tuning: &Tuning) -> Result<(), Failure> {
    let report = run(spec_path, tuning)?;
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in bounds_csv_rows(&report) {
                w.write_record(&row).context("writing CSV")?;
            }
            String::from_utf8(w.into_inner().context("writing CSV")?).context("CSV is UTF-8")?
        }
    };
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => emit(&text)?,
    }
    if report.identities.failures.is_empty() {
        Ok(())
    } else {
        eprintln!("identity checks above tolerance: {}", report.identities.failures.join(", "));
        Err(Failure::Violation)
    }
}

fn verify(spec_path: &Path, json: bool, tuning: &Tuning) -> Result<(), Failure> {
    let report = run(spec_path, tuning)?;
    let v = pipeline::verify(&report);
    let text = if json {
        serde_json::to_string_pretty(&v).context("serializing checks")? + "\n"
    } else {
        v.checks
            .iter()
            .map(|c| format!("{} {:<24} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect()
    };
    emit(&text)?;
    if v.passed() {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}

#[derive(Serialize)]
struct Param {
    name: &'static str,
    kind: &'static str,
    default: Option<&'static str>,
    description: &'static str,
}

#[derive(Serialize)]
struct Entry {
    kind: &'static str,
    description: &'static str,
    params: Vec<Param>,
    example: serde_json::Value,
}

fn param(name: &'static str, kind: &'static str, default: Option<&'static str>, description: &'static str) -> Param {
    Param {
        name,
        kind,
        default,
        description,
    }
}

fn catalog_entries() -> Vec<Entry> {
    use serde_json::json;
    let torus_spin = "\"trivial\", \"antiperiodic\", or {\"shifts\": [0 | 0.5, ...]}";
    vec![
        Entry {
            kind: "sphere",
            description: "round sphere S^n(r)",
            params: vec![
                param("n", "integer 2..=8", None, "dimension"),
                param("r", "number > 0", Some("1"), "radius"),
            ],
            example: json!({"kind": "sphere", "n": 4, "r": 1.0}),
        },
        Entry {
            kind: "torus",
            description: "flat torus R^n / (period Z)^n",
            params: vec![
                param("n", "integer 2..=8", None, "dimension"),
                param("period", "number > 0", Some("2 pi"), "lattice period"),
                param("spin", torus_spin, Some("\"trivial\""), "spin structure"),
            ],
            example: json!({"kind": "torus", "n": 3, "spin": "antiperiodic"}),
        },
        Entry {
            kind: "product",
            description: "Riemannian product of spheres and flat tori (one factor even-dimensional)",
            params: vec![param(
                "factors",
                "list of {\"kind\": \"sphere\" | \"torus\", ...}",
                None,
                "factors, parameters as for sphere and torus",
            )],
            example: json!({"kind": "product", "factors": [
                {"kind": "sphere", "n": 2, "r": 1.0},
                {"kind": "sphere", "n": 2, "r": 1.0}
            ]}),
        },
        Entry {
            kind: "conformal_torus",
            description: "exp(2 a sin x_1) times the flat metric, on a periodic lattice",
            params: vec![
                param("n", "integer 2..=8", None, "dimension"),
                param("amplitude", "number", Some("0.05"), "a"),
                param("nodes", "integer >= 5", Some("16"), "lattice points along x_1"),
                param("transverse", "integer >= 5", Some("5"), "lattice points along the other axes"),
            ],
            example: json!({"kind": "conformal_torus", "n": 4, "amplitude": 0.05, "nodes": 16}),
        },
        Entry {
            kind: "grid",
            description: "metric samples from a grid file",
            params: vec![param("path", "string", None, "grid file, relative to the spec file")],
            example: json!({"kind": "grid", "path": "metric.grid"}),
        },
    ]
}

fn catalog(json: bool) -> anyhow::Result<()> {
    use std::fmt::Write;
    let entries = catalog_entries();
    if json {
        return emit(&(serde_json::to_string_pretty(&entries)? + "\n"));
    }
    let mut out = String::new();
    for e in entries {
        writeln!(out, "{:<16} {}", e.kind, e.description)?;
        for p in e.params {
            let default = p.default.map(|d| format!(" (default {d})")).unwrap_or_default();
            writeln!(out, "    {:<12} {}: {}{}", p.name, p.kind, p.description, default)?;
        }
        writeln!(out, "    example      {}", e.example)?;
    }
    emit(&out)
}
