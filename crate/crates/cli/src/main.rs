//! Batch front end: reads JSON fixtures, runs the computations, prints
//! reports or writes derived fixtures.
//!
//! Exit codes: 0 success, 1 domain violation or detected inequality,
//! 2 input error (malformed file, bad flags).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use l2sheaf_core::complex::GammaComplex;
use l2sheaf_core::json;
use l2sheaf_core::l2::{atiyah_check_seeded, l2_betti_seeded};
use l2sheaf_core::sheaf::{subdivision_pullback, validate_sheaf, ConstructibleSheaf};
use l2sheaf_core::vn::{ns_probe, Mode, DEFAULT_SEED};
use l2sheaf_core::Error;

#[derive(Parser)]
#[command(name = "l2sheaf", version, about = "L2 cohomology of equivariant constructible sheaves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Exact summation over a finite group.
    Exact,
    /// Torus evaluation at a seeded generic point, free abelian groups.
    Generic,
    /// Finite quotient ladder approximation, free abelian groups.
    Quotient,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum OutputArg {
    #[default]
    Table,
    Json,
}

#[derive(Args)]
struct ModeFlags {
    /// Von Neumann rank computation; picked from the group kind when absent.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Quotient side length, required with --mode quotient.
    #[arg(long)]
    quotient_n: Option<usize>,
    /// Seed for generic evaluation points. L2SHEAF_SEED wins over this flag.
    #[arg(long)]
    seed: Option<u64>,
    /// Require the sheaf to have real entries.
    #[arg(long)]
    real: bool,
}

#[derive(Args)]
struct OutputFlag {
    #[arg(long, value_enum, default_value_t)]
    output: OutputArg,
}

#[derive(Subcommand)]
enum Command {
    /// Check a fixture: group axioms, face closure, sheaf functoriality.
    Validate { path: PathBuf },
    /// L2 Betti numbers of the sheaf on the complex.
    Betti {
        path: PathBuf,
        #[command(flatten)]
        flags: ModeFlags,
        #[command(flatten)]
        out: OutputFlag,
    },
    /// L2 Euler characteristic of the sheaf on the complex.
    Euler {
        path: PathBuf,
        #[command(flatten)]
        flags: ModeFlags,
        #[command(flatten)]
        out: OutputFlag,
    },
    /// Compare the L2 Euler characteristic with the quotient one.
    Atiyah {
        path: PathBuf,
        #[command(flatten)]
        flags: ModeFlags,
        #[command(flatten)]
        out: OutputFlag,
    },
    /// Write the dual complex of sheaves as a self contained JSON file.
    Dual {
        path: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate Betti numbers of the sheaf against those of its dual.
    DualityCheck {
        path: PathBuf,
        #[command(flatten)]
        flags: ModeFlags,
        #[command(flatten)]
        out: OutputFlag,
    },
    /// Near zero eigenvalue counting slopes on a ladder of quotient sizes.
    Ns {
        path: PathBuf,
        /// Quotient sizes, e.g. 64,128,256.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[command(flatten)]
        out: OutputFlag,
    },
    /// Write the barycentric subdivision as a new fixture.
    Subdivide {
        path: PathBuf,
        /// Output file; input path with a .subdivided.json suffix when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Writes a line to stdout, quitting quietly when the reader closed the pipe.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let mut so = std::io::stdout();
        if writeln!(so, $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

/// Failure carrying the process exit code.
struct Fail {
    code: u8,
    msg: String,
}

type CmdResult<T> = Result<T, Fail>;

fn input_err(msg: impl Into<String>) -> Fail {
    Fail { code: 2, msg: msg.into() }
}

fn domain_err(msg: impl Into<String>) -> Fail {
    Fail { code: 1, msg: msg.into() }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Json(_) | Error::ModeMismatch(_) => 2,
            _ => 1,
        };
        Fail { code, msg: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> CmdResult<()> {
    match cmd {
        Command::Validate { path } => cmd_validate(&path),
        Command::Betti { path, flags, out } => cmd_betti(&path, &flags, out.output, false),
        Command::Euler { path, flags, out } => cmd_betti(&path, &flags, out.output, true),
        Command::Atiyah { path, flags, out } => cmd_atiyah(&path, &flags, out.output),
        Command::Dual { path, out } => cmd_dual(&path, out.as_deref()),
        Command::DualityCheck { path, flags, out } => cmd_duality(&path, &flags, out.output),
        Command::Ns { path, sizes, out } => cmd_ns(&path, &sizes, out.output),
        Command::Subdivide { path, out } => cmd_subdivide(&path, out.as_deref()),
    }
}

fn read_text(path: &Path) -> CmdResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))
}

/// Loads and fully checks an instance; any defect is a domain failure, any
/// parse problem an input failure.
fn load_checked(path: &Path, flags: &ModeFlags) -> CmdResult<(GammaComplex, ConstructibleSheaf)> {
    let inst = json::parse_instance(&read_text(path)?)?;
    let (c, mut f) = json::load_instance(&inst)?;
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(domain_err(format!(
            "{} violation(s), first is {}",
            violations.len(),
            violations[0]
        )));
    }
    if flags.real {
        f.real = true;
    }
    validate_sheaf(&c, &f)?;
    Ok((c, f))
}

/// Resolves the rank computation mode against the group kind before any
/// work happens.
fn resolve_mode(c: &GammaComplex, flags: &ModeFlags) -> CmdResult<Mode> {
    let finite = c.group.is_finite();
    let mode = match (flags.mode, flags.quotient_n) {
        (Some(ModeArg::Quotient), Some(n)) if n >= 2 => Mode::QuotientApprox(n),
        (Some(ModeArg::Quotient), Some(_)) => {
            return Err(input_err("--quotient-n must be at least 2"))
        }
        (Some(ModeArg::Quotient), None) => {
            return Err(input_err("--mode quotient needs --quotient-n"))
        }
        (_, Some(_)) => return Err(input_err("--quotient-n only applies to --mode quotient")),
        (Some(ModeArg::Exact), None) => Mode::ExactFinite,
        (Some(ModeArg::Generic), None) => Mode::GenericRank,
        (None, None) => Mode::Auto,
    };
    match mode {
        Mode::ExactFinite if !finite => {
            Err(input_err("--mode exact needs a finite group"))
        }
        Mode::GenericRank | Mode::QuotientApprox(_) if finite => {
            Err(input_err("this mode needs a free abelian group"))
        }
        m => Ok(m),
    }
}

fn resolve_seed(flags: &ModeFlags) -> CmdResult<u64> {
    match std::env::var("L2SHEAF_SEED") {
        Ok(s) => s
            .parse()
            .map_err(|_| input_err(format!("L2SHEAF_SEED is not an integer: {s}"))),
        Err(_) => Ok(flags.seed.unwrap_or(DEFAULT_SEED)),
    }
}

fn emit_json<T: serde::Serialize>(value: &T) {
    out!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn cmd_validate(path: &Path) -> CmdResult<()> {
    let inst = json::parse_instance(&read_text(path)?)?;
    let (c, f) = json::load_instance(&inst)?;
    let violations = c.validate();
    if !violations.is_empty() {
        for v in &violations {
            out!("violation: {v}");
        }
        return Err(domain_err(format!("{} violation(s)", violations.len())));
    }
    validate_sheaf(&c, &f)?;
    out!("ok");
    Ok(())
}

fn cmd_betti(path: &Path, flags: &ModeFlags, out: OutputArg, euler_only: bool) -> CmdResult<()> {
    let (c, f) = load_checked(path, flags)?;
    let mode = resolve_mode(&c, flags)?;
    let report = l2_betti_seeded(&c, &f, mode, resolve_seed(flags)?)?;
    match out {
        OutputArg::Json => emit_json(&json::report_to_json(&report)),
        OutputArg::Table if euler_only => out!("chi_l2 = {}", report.euler),
        OutputArg::Table => {
            let mut line = String::new();
            for d in &report.degrees {
                if !line.is_empty() {
                    line.push(' ');
                }
                write!(line, "b{}={}", d.degree, d.betti).unwrap();
            }
            out!("{line}");
        }
    }
    Ok(())
}

fn cmd_atiyah(path: &Path, flags: &ModeFlags, out: OutputArg) -> CmdResult<()> {
    let (c, f) = load_checked(path, flags)?;
    let mode = resolve_mode(&c, flags)?;
    let report = atiyah_check_seeded(&c, &f, mode, resolve_seed(flags)?)?;
    match out {
        OutputArg::Json => emit_json(&json::atiyah_to_json(&report)),
        OutputArg::Table => {
            if report.equal {
                out!("chi_l2 = {} = chi_quotient OK", report.euler_l2);
            } else {
                out!(
                    "chi_l2 = {} chi_quotient = {} MISMATCH",
                    report.euler_l2, report.euler_quotient
                );
            }
        }
    }
    if report.equal {
        Ok(())
    } else {
        Err(domain_err("index equality fails"))
    }
}

fn cmd_dual(path: &Path, out: Option<&Path>) -> CmdResult<()> {
    let flags = ModeFlags { mode: None, quotient_n: None, seed: None, real: false };
    let (c, f) = load_checked(path, &flags)?;
    let build = l2sheaf_core::duality::verdier_dual(&c, &f)?;
    let file = json::sheaf_complex_file(&build.base, &build.dual);
    let text = serde_json::to_string_pretty(&file).expect("dual serializes") + "\n";
    match out {
        Some(p) => {
            std::fs::write(p, text)
                .map_err(|e| input_err(format!("cannot write {}: {e}", p.display())))?;
            out!("wrote {}", p.display());
        }
        None => out!("{}", text.trim_end()),
    }
    Ok(())
}

fn cmd_duality(path: &Path, flags: &ModeFlags, out: OutputArg) -> CmdResult<()> {
    let (c, f) = load_checked(path, flags)?;
    let mode = resolve_mode(&c, flags)?;
    let report =
        l2sheaf_core::duality::duality_check_seeded(&c, &f, mode, resolve_seed(flags)?)?;
    match out {
        OutputArg::Json => emit_json(&json::duality_to_json(&report)),
        OutputArg::Table => {
            out!("degree forward dual equal");
            for row in &report.rows {
                out!(
                    "{} {} {} {}",
                    row.degree,
                    row.forward,
                    row.dual,
                    if row.equal { "yes" } else { "NO" }
                );
            }
            out!("all equal: {}", if report.all_equal { "yes" } else { "NO" });
        }
    }
    if report.all_equal {
        Ok(())
    } else {
        Err(domain_err("duality table has unequal rows"))
    }
}

fn cmd_ns(path: &Path, sizes: &[usize], out: OutputArg) -> CmdResult<()> {
    let flags = ModeFlags { mode: None, quotient_n: None, seed: None, real: false };
    let (c, f) = load_checked(path, &flags)?;
    if c.group.is_finite() {
        return Err(input_err("ns needs a free abelian group"));
    }
    if sizes.len() < 2 || sizes.iter().any(|&n| n < 2) {
        return Err(input_err("need at least two quotient sizes, each at least 2"));
    }
    let build = l2sheaf_core::chain::build_cochain(&c, &f)?;
    let mut rows = Vec::new();
    for k in build.complex.lo..=build.complex.hi() {
        let lap = build.complex.laplacian(k, &build.base.group)?;
        rows.push((k, ns_probe(&lap, &build.base.group, sizes)?));
    }
    match out {
        OutputArg::Json => {
            let reports: Vec<_> = rows.iter().map(|(k, o)| json::ns_to_json(*k, o)).collect();
            emit_json(&reports);
        }
        OutputArg::Table => {
            for (k, o) in &rows {
                match o {
                    l2sheaf_core::vn::NsOutcome::Slope { slope, window, points } => out!(
                        "degree {k}: slope={slope:.4} window=({:.3e},{:.3e}) points={points}",
                        window.0, window.1
                    ),
                    l2sheaf_core::vn::NsOutcome::Gap => out!("degree {k}: spectral gap"),
                }
            }
        }
    }
    Ok(())
}

fn cmd_subdivide(path: &Path, out: Option<&Path>) -> CmdResult<()> {
    let inst = json::parse_instance(&read_text(path)?)?;
    let (c, f) = json::load_instance(&inst)?;
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(domain_err(format!(
            "{} violation(s), first is {}",
            violations.len(),
            violations[0]
        )));
    }
    validate_sheaf(&c, &f)?;
    let (sub, map) = c.barycentric_subdivision()?;
    let sheaf = if inst.sheaf.is_some() {
        let pulled = subdivision_pullback(&c, &f, &sub, &map)?;
        Some(json::sheaf_to_json_positions(&sub, &pulled))
    } else {
        None
    };
    let out_inst = json::InstanceJson {
        schema_version: Some(json::SCHEMA_VERSION),
        complex: json::complex_to_json(&sub),
        sheaf,
    };
    let target: PathBuf = match out {
        Some(p) => p.to_path_buf(),
        None => {
            let mut s = path.to_path_buf().into_os_string();
            s.push(".subdivided.json");
            PathBuf::from(s)
        }
    };
    let text = json::instance_to_string(&out_inst) + "\n";
    std::fs::write(&target, text)
        .map_err(|e| input_err(format!("cannot write {}: {e}", target.display())))?;
    out!("wrote {} with {} vertex orbits", target.display(), sub.n_vertex_orbits);
    Ok(())
}
