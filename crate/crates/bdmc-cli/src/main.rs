//! Command-line front end: analyze channel files, construct the classic
//! families, tabulate the bridge function, sample the achievable region,
//! and run the series certificates.
//!
//! Exit codes: 0 on success, 1 for usage or input problems, 2 when a
//! mathematical claim fails to verify (which indicates a bug, not bad
//! input, and is therefore kept distinct).

use bdmc::bounds::{bound_report, region_sample, BoundReport};
use bdmc::certify::{certify_lemma1, certify_lemma3, CertificateReport};
use bdmc::channel::{bec, bsc, Channel};
use bdmc::scalar::{self, UnitScalar};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bdmc", version, about = "Information measures of binary-input channels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute I, Z, the channel class, and the six inequality slacks for
    /// a channel JSON file.
    Analyze(AnalyzeArgs),
    /// Construct an erasure or symmetric channel and print its JSON.
    Make(MakeArgs),
    /// Tabulate phi (and optionally its derivatives) as CSV.
    PhiTable(PhiTableArgs),
    /// Sample (Z, 1 - I) points from random channels as CSV.
    Region(RegionArgs),
    /// Run the series certificates for the derivative comparison and the
    /// linear bounds.
    Certify(CertifyArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Channel JSON file ("-" reads standard input).
    path: String,
    /// Slack tolerance for the satisfied flags.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MakeArgs {
    /// Which family to construct.
    #[arg(value_enum)]
    family: Family,
    #[command(flatten)]
    param: FamilyParam,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FamilyParam {
    /// Family parameter: erasure probability or crossover probability.
    #[arg(long)]
    eps: Option<f64>,
    /// Pick the parameter hitting this Bhattacharyya value.
    #[arg(long)]
    z: Option<f64>,
    /// Pick the parameter hitting this capacity.
    #[arg(long)]
    capacity: Option<f64>,
}

#[derive(Args)]
struct PhiTableArgs {
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    #[arg(long, default_value_t = 1.0)]
    to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Add phi' and phi'' columns (phi'' prints inf at u = 0).
    #[arg(long)]
    with_derivatives: bool,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Outputs per sampled channel.
    #[arg(long, default_value_t = 3)]
    outputs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write points here; a companion "<out>.boundary.csv" traces the two
    /// region edges. Without --out, points go to standard output and no
    /// boundary file is written.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Grid points per certificate.
    #[arg(long, default_value_t = 999)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Bec,
    Bsc,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<bdmc::Error> for Failure {
    fn from(err: bdmc::Error) -> Self {
        Failure {
            code: exit_code_for(&err),
            message: err.to_string(),
        }
    }
}

/// Violated mathematics exits with 2; everything else wrong is the
/// caller's input and exits with 1.
fn exit_code_for(err: &bdmc::Error) -> u8 {
    match err {
        bdmc::Error::RegionViolation { .. } | bdmc::Error::PropositionViolation { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.cmd {
        Cmd::Analyze(args) => cmd_analyze(args),
        Cmd::Make(args) => cmd_make(args),
        Cmd::PhiTable(args) => cmd_phi_table(args),
        Cmd::Region(args) => cmd_region(args),
        Cmd::Certify(args) => cmd_certify(args),
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<ExitCode, Failure> {
    let text = if args.path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::input(format!("stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(&args.path)
            .map_err(|e| Failure::input(format!("{}: {e}", args.path)))?
    };
    let channel = Channel::from_json(&text)?;
    let report = bound_report(&channel, args.tol)?;
    let rendered = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .expect("report serialization cannot fail");
            s.push('\n');
            s
        }
        Format::Text => render_report(&report, &channel),
    };
    emit(args.out.as_deref(), &rendered)?;
    if report.all_satisfied() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: at least one inequality is violated beyond tol = {}", args.tol);
        Ok(ExitCode::from(2))
    }
}

fn render_report(report: &BoundReport, channel: &Channel) -> String {
    let mut s = String::new();
    s.push_str(&format!("outputs        {}\n", channel.num_outputs()));
    if !channel.pruned_labels().is_empty() {
        s.push_str(&format!(
            "pruned         {}\n",
            channel.pruned_labels().join(", ")
        ));
    }
    s.push_str(&format!("capacity       {}\n", report.capacity));
    s.push_str(&format!("bhattacharyya  {}\n", report.bhattacharyya));
    s.push_str(&format!("class          {}\n", report.class));
    s.push_str(&format!("tol            {}\n\n", report.tol));
    for e in &report.entries {
        let status = if !e.satisfied {
            "VIOLATED"
        } else if e.tight {
            "ok, tight"
        } else {
            "ok"
        };
        s.push_str(&format!(
            "{:<14} {:<9}  slack = {}\n",
            e.name, status, e.slack
        ));
    }
    s
}

fn cmd_make(args: MakeArgs) -> Result<ExitCode, Failure> {
    let channel = match args.family {
        Family::Bec => {
            let eps = if let Some(eps) = args.param.eps {
                eps
            } else if let Some(z) = args.param.z {
                z
            } else {
                let c = args.param.capacity.expect("clap enforces the group");
                check_unit("capacity", c)?;
                1.0 - c
            };
            bec(eps)?
        }
        Family::Bsc => {
            let eps = if let Some(eps) = args.param.eps {
                eps
            } else if let Some(z) = args.param.z {
                check_unit("z", z)?;
                scalar::bh_inv(UnitScalar::new(z).expect("checked above")).get()
            } else {
                let c = args.param.capacity.expect("clap enforces the group");
                check_unit("capacity", c)?;
                bsc_eps_for_capacity(c)
            };
            bsc(eps)?
        }
    };
    let mut json = channel.to_json();
    json.push('\n');
    emit(args.out.as_deref(), &json)?;
    Ok(ExitCode::SUCCESS)
}

fn check_unit(name: &'static str, value: f64) -> Result<(), Failure> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Failure::input(format!(
            "{name} must lie in [0, 1], got {value}"
        )))
    }
}

/// Inverts eps -> 1 - ent(eps) on [0, 1/2] by bisection; the function is
/// strictly decreasing, so the bracket shrinks to 1e-12.
fn bsc_eps_for_capacity(c: f64) -> f64 {
    let cap = |eps: f64| 1.0 - scalar::ent(UnitScalar::new(eps).expect("bracket stays in range"));
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if cap(mid) > c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_phi_table(args: PhiTableArgs) -> Result<ExitCode, Failure> {
    if args.steps < 2 {
        return Err(Failure::input(format!(
            "steps must be at least 2, got {}",
            args.steps
        )));
    }
    if !(0.0 <= args.from && args.from <= args.to && args.to <= 1.0) {
        return Err(Failure::input(format!(
            "need 0 <= from <= to <= 1, got from = {}, to = {}",
            args.from, args.to
        )));
    }
    let mut s = String::new();
    s.push_str(if args.with_derivatives {
        "u,phi,phi_d1,phi_d2\n"
    } else {
        "u,phi\n"
    });
    for k in 0..args.steps {
        let t = k as f64 / (args.steps - 1) as f64;
        let u = args.from + t * (args.to - args.from);
        let u = UnitScalar::new(u.clamp(0.0, 1.0)).expect("clamped");
        s.push_str(&csv_float(u.get()));
        s.push(',');
        s.push_str(&csv_float(scalar::phi(u)));
        if args.with_derivatives {
            s.push(',');
            s.push_str(&csv_float(scalar::phi_d1(u)));
            s.push(',');
            match scalar::phi_d2(u) {
                Ok(d2) => s.push_str(&csv_float(d2)),
                Err(_) => s.push_str("inf"),
            }
        }
        s.push('\n');
    }
    emit(args.out.as_deref(), &s)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_region(args: RegionArgs) -> Result<ExitCode, Failure> {
    let points = region_sample(args.samples, args.outputs, args.seed)?;
    let mut s = String::from("z,one_minus_i\n");
    for (z, omi) in &points {
        s.push_str(&csv_float(*z));
        s.push(',');
        s.push_str(&csv_float(*omi));
        s.push('\n');
    }
    emit(args.out.as_deref(), &s)?;
    if let Some(out) = &args.out {
        let mut boundary = String::from("z,upper,lower\n");
        for k in 0..256 {
            let z = k as f64 / 255.0;
            let phi_z = scalar::phi(UnitScalar::new(z).expect("grid stays in range"));
            boundary.push_str(&csv_float(z));
            boundary.push(',');
            boundary.push_str(&csv_float(z));
            boundary.push(',');
            boundary.push_str(&csv_float(phi_z));
            boundary.push('\n');
        }
        let mut companion = out.as_os_str().to_owned();
        companion.push(".boundary.csv");
        emit(Some(Path::new(&companion)), &boundary)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(args: CertifyArgs) -> Result<ExitCode, Failure> {
    let mut reports = vec![certify_lemma1(args.grid, 0.999)?];
    reports.extend(certify_lemma3(args.grid)?);
    let all_pass = reports.iter().all(|r| r.pass);
    let rendered = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&reports)
                .expect("report serialization cannot fail");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&render_certificate(r));
            }
            s.push_str(if all_pass {
                "all certificates pass\n"
            } else {
                "CERTIFICATION FAILED\n"
            });
            s
        }
    };
    emit(args.out.as_deref(), &rendered)?;
    if all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: a certificate reported a nonpositive slack");
        Ok(ExitCode::from(2))
    }
}

fn render_certificate(r: &CertificateReport) -> String {
    let v_max = r
        .v_max
        .map_or_else(|| "-".to_owned(), |v| v.to_string());
    format!(
        "lemma {:<3} {}  grid {}  v_max {}  mode {}  min_slack {:.3e} at {:.6}\n",
        r.lemma,
        if r.pass { "pass" } else { "FAIL" },
        r.grid,
        v_max,
        r.mode,
        r.min_slack,
        r.argmin,
    )
}
