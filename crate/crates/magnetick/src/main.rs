//! Command-line front end: parses group/complex/twist/override files,
//! dispatches the analyses and renders tables or machine-readable reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use magnetick::ahss::{run_ahss, DifferentialOverride, ExtensionAssertion};
use magnetick::coeff::{periodicity, point_coefficients};
use magnetick::complex::GcwComplex;
use magnetick::corep::{classify_magnetic_irreps, twisted_irreps};
use magnetick::group::{build_group, CentralExtension, KernelCharacter, MagneticGroup, Twist};
use magnetick::report;
use magnetick::DEFAULT_MAX_ORDER;

#[derive(Parser)]
#[command(name = "magnetick", version, about = "corepresentations and K-theory of finite magnetic groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the irreducible corepresentations of a magnetic group.
    Irreps {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        twist: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Tabulate the K-theory coefficient groups of a point.
    Coefficients {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        twist: Option<PathBuf>,
        /// degree range, e.g. 0..-7
        #[arg(long)]
        degrees: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Decide 4- versus 8-periodicity via the pullback extension.
    Periodicity {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Run the Atiyah-Hirzebruch spectral sequence over a G-CW complex.
    Ahss {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        twist: Option<PathBuf>,
        #[arg(long)]
        overrides: Option<PathBuf>,
        #[arg(long)]
        assertions: Option<PathBuf>,
        /// degree range, e.g. 0..-3
        #[arg(long)]
        degrees: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

#[derive(Deserialize)]
struct GroupFile {
    order: usize,
    mult: Vec<Vec<usize>>,
    phi: Vec<u8>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct TwistFile {
    total: GroupFile,
    base: GroupFile,
    projection: Vec<usize>,
    character: Vec<i8>,
}

struct CliError {
    kind: String,
    message: String,
}

impl CliError {
    fn new(kind: &str, message: impl ToString) -> CliError {
        CliError {
            kind: kind.to_string(),
            message: message.to_string(),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::new(
            "ParseError",
            format!("{}: {}", path.display(), e),
        )
    })?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::new(
            "ParseError",
            format!("{}: line {}: {}", path.display(), e.line(), e),
        )
    })
}

fn load_group(path: &Path) -> Result<MagneticGroup, CliError> {
    let f: GroupFile = read_json(path)?;
    if f.mult.len() != f.order || f.phi.len() != f.order {
        return Err(CliError::new(
            "ParseError",
            format!("{}: order does not match table sizes", path.display()),
        ));
    }
    let mut mg = build_group(f.mult, f.phi)
        .map_err(|e| CliError::new(error_kind(&e.to_string()), e))?;
    mg.labels = f.labels;
    Ok(mg)
}

fn load_twist(path: &Path) -> Result<Twist, CliError> {
    let f: TwistFile = read_json(path)?;
    let total = magnetick::group::Group::from_table(f.total.mult)
        .map_err(|e| CliError::new("NotAGroup", e))?;
    let base = magnetick::group::Group::from_table(f.base.mult)
        .map_err(|e| CliError::new("NotAGroup", e))?;
    let ext = CentralExtension::new(total, f.total.phi, base, f.base.phi, f.projection)
        .map_err(|e| CliError::new("BadExtension", e))?;
    let character =
        KernelCharacter::new(&ext, f.character).map_err(|e| CliError::new("BadKernelCharacter", e))?;
    Ok(Twist { ext, character })
}

/// "0..-7" -> [0, -1, ..., -7]
fn parse_degrees(s: &str) -> Result<Vec<i64>, CliError> {
    let parts: Vec<&str> = s.split("..").collect();
    if parts.len() != 2 {
        return Err(CliError::new(
            "ParseError",
            format!("bad degree range '{}', expected like 0..-7", s),
        ));
    }
    let a: i64 = parts[0]
        .parse()
        .map_err(|_| CliError::new("ParseError", format!("bad degree '{}'", parts[0])))?;
    let b: i64 = parts[1]
        .parse()
        .map_err(|_| CliError::new("ParseError", format!("bad degree '{}'", parts[1])))?;
    let range: Vec<i64> = if a <= b {
        (a..=b).collect()
    } else {
        (b..=a).rev().collect()
    };
    if range.is_empty() {
        return Err(CliError::new("ParseError", "empty degree range"));
    }
    Ok(range)
}

fn error_kind(msg: &str) -> &'static str {
    // surface domain errors under the originating module's error name
    if msg.contains("not a group") {
        "NotAGroup"
    } else if msg.contains("phi is not a homomorphism") {
        "PhiNotHomomorphism"
    } else if msg.contains("phi is not surjective") {
        "PhiNotSurjective"
    } else {
        "Error"
    }
}

fn max_order() -> usize {
    std::env::var("MAGNETICK_MAX_ORDER")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
}

fn emit(report: serde_json::Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Format::Table => print!("{}", report::render_text(&report)),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Irreps {
            group,
            twist,
            format,
        } => {
            let mg = load_group(&group)?;
            let ring = match twist {
                None => classify_magnetic_irreps(&mg, max_order())
                    .map_err(|e| CliError::new("CorepError", e))?,
                Some(t) => {
                    let tw = load_twist(&t)?;
                    twisted_irreps(&tw, max_order())
                        .map_err(|e| CliError::new("CorepError", e))?
                }
            };
            emit(report::irreps_report(&ring), format);
            Ok(())
        }
        Cmd::Coefficients {
            group,
            twist,
            degrees,
            format,
        } => {
            let mg = load_group(&group)?;
            let tw = twist.map(|t| load_twist(&t)).transpose()?;
            let ring = match &tw {
                None => classify_magnetic_irreps(&mg, max_order())
                    .map_err(|e| CliError::new("CorepError", e))?,
                Some(tw) => {
                    twisted_irreps(tw, max_order()).map_err(|e| CliError::new("CorepError", e))?
                }
            };
            let degs = match degrees {
                Some(s) => parse_degrees(&s)?,
                None => {
                    let (p, _) = match &tw {
                        None => periodicity(&mg),
                        Some(tw) => {
                            let total = build_group(
                                magnetick::catalog::group_to_table(&tw.ext.total),
                                tw.ext.total_phi.clone(),
                            )
                            .map_err(|e| CliError::new("BadExtension", e))?;
                            periodicity(&total)
                        }
                    };
                    (0..p as i64).map(|q| -q).collect()
                }
            };
            let rows: Vec<_> = degs.iter().map(|&t| point_coefficients(&ring, t)).collect();
            emit(report::coefficients_report(&rows), format);
            Ok(())
        }
        Cmd::Periodicity { group, format } => {
            let mg = load_group(&group)?;
            let (p, section) = periodicity(&mg);
            emit(report::periodicity_report(p, &section), format);
            Ok(())
        }
        Cmd::Ahss {
            group,
            complex,
            twist,
            overrides,
            assertions,
            degrees,
            format,
        } => {
            let mg = load_group(&group)?;
            let x: GcwComplex = read_json(&complex)?;
            let tw = twist.map(|t| load_twist(&t)).transpose()?;
            let ovs: Vec<DifferentialOverride> = match overrides {
                Some(p) => read_json(&p)?,
                None => vec![],
            };
            let asserts: Vec<ExtensionAssertion> = match assertions {
                Some(p) => read_json(&p)?,
                None => vec![],
            };
            let degs = degrees.map(|s| parse_degrees(&s)).transpose()?;
            let run = run_ahss(&mg, &x, tw.as_ref(), &ovs, &asserts, degs, max_order())
                .map_err(|e| CliError::new("AhssError", e))?;
            emit(report::ahss_report(&run), format);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let obj = json!({"error": {"kind": e.kind, "message": e.message}});
            eprintln!("{}", serde_json::to_string(&obj).unwrap());
            ExitCode::FAILURE
        }
    }
}
