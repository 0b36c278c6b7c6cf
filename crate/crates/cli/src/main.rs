use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use orthomoments::connect::{builtin_ribbon_pair, connection_table, rn_expansion, ribbon_check, Basis};
use orthomoments::io::{moment_file_json, rec_file_json, Mode, MomentFile, RecFile};
use orthomoments::linearize::linearization_table;
use orthomoments::moments::{make_moments, Family, FamilySpec, MomentSequence};
use orthomoments::polysys::{build_system, diagnostics, RecurrenceCoefficients};
use orthomoments::qkernel::{default_points, verify_pm, DEFAULT_TOL, PM_THRESHOLD};
use orthomoments::recurrence::{
    eta_table, moments_from_recurrence, random_recurrence, tau_table, verify_closed_forms, SUSPECT_CHECKS,
};
use orthomoments::scalar::{parse_rational, Scalar, Surd};
use orthomoments::Error;

const DEFAULT_FLOAT_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "orthomoments", version, about = "Orthogonal polynomial systems from moment sequences")]
struct Cli {
    /// Numeric backend; defaults to the mode recorded in the input file.
    #[arg(long, global = true)]
    mode: Option<ModeArg>,
    /// Comparison tolerance in float mode (series tolerance for verify-pm).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomly drawn inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Rational,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Float => Mode::Float,
            ModeArg::Rational => Mode::Rational,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Orthonormal,
    Monic,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Basis {
        match b {
            BasisArg::Orthonormal => Basis::Orthonormal,
            BasisArg::Monic => Basis::Monic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Cholesky factor, orthonormal coefficients and recurrence of a moment file.
    Decompose {
        /// Moment file {"mode": ..., "moments": [...]}.
        moments: PathBuf,
        /// Order n; needs moments m_0..m_2n.
        #[arg(short, long)]
        n: usize,
        /// Also report eigenvalue and inverse-matrix identities.
        #[arg(long)]
        diagnostics: bool,
    },
    /// Tables and checks driven by recurrence coefficients.
    Recurrence(RecurrenceArgs),
    /// Connection coefficients, ribbon check or Radon–Nikodym expansion.
    Connect(ConnectArgs),
    /// Linearization coefficients of p_n p_m.
    Linearize {
        moments: PathBuf,
        /// Degrees of the two factors; the system must reach order n + m.
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = BasisArg::Orthonormal)]
        basis: BasisArg,
    },
    /// Compare the Poisson–Mehler product with its series on a grid.
    VerifyPm {
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        /// Comma-separated x (and y) values; defaults to 0, ±1 and ±1.9/√(1−q).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Option<Vec<f64>>,
        /// Largest accepted |product − series|; exit 3 above it.
        #[arg(long, default_value_t = PM_THRESHOLD)]
        threshold: f64,
    },
    /// Write a moment file for a catalog family.
    Catalog {
        /// gaussian, uniform, semicircle, chebyshev1 or q-hermite.
        family: String,
        /// Number of moments m_0..m_{count-1}.
        #[arg(long)]
        count: usize,
        /// Parameter of q-hermite, e.g. 1/2.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
    },
}

#[derive(Args)]
struct RecurrenceArgs {
    /// Recurrence file {"a2": [...], "b": [...]}; a seeded random one when absent.
    rec: Option<PathBuf>,
    /// Moments m_0..m_{k-1}.
    #[arg(long, group = "what")]
    moments: Option<usize>,
    /// Power coefficients of the monic polynomials, rows 0..=n.
    #[arg(long, group = "what")]
    eta: Option<usize>,
    /// Monomials in the monic basis, rows 0..=n.
    #[arg(long, group = "what")]
    tau: Option<usize>,
    /// Closed-form identities against the recursions, rows 0..=n.
    #[arg(long, group = "what")]
    verify_closed_forms: Option<usize>,
    /// Size of the random recurrence when no file is given.
    #[arg(long, default_value_t = 16)]
    random_len: usize,
}

#[derive(Args)]
struct ConnectArgs {
    /// Moment file of the source measure α.
    alpha: Option<PathBuf>,
    /// Moment file of the target measure δ.
    delta: Option<PathBuf>,
    /// Order n of the table.
    #[arg(short, long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = BasisArg::Orthonormal)]
    basis: BasisArg,
    /// Fourier coefficients of dα/dδ up to this index instead of the table.
    #[arg(long)]
    rn: Option<usize>,
    /// ∫(dα/dδ)² dδ, for the Bessel residual.
    #[arg(long)]
    target: Option<f64>,
    /// Check that Π(α) M(δ) Π(α)ᵀ is an r-ribbon matrix.
    #[arg(long)]
    ribbon: Option<usize>,
    /// Use the built-in uniform / (1+x²)-weighted pair for the ribbon check.
    #[arg(long)]
    builtin_ribbon: bool,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_precondition() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

/// Output plus whether a verification inside it failed.
struct Outcome {
    value: Value,
    verified: bool,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome { value, verified: true }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_moments(path: &Path) -> Result<MomentFile, Failure> {
    Ok(MomentFile::parse(&read(path)?)?)
}

struct Ctx {
    mode: Option<Mode>,
    tol: Option<f64>,
    seed: u64,
}

impl Ctx {
    fn mode_or(&self, file: Mode) -> Mode {
        self.mode.unwrap_or(file)
    }

    fn tol<S: Scalar>(&self) -> f64 {
        if S::EXACT {
            0.0
        } else {
            self.tol.unwrap_or(DEFAULT_FLOAT_TOL)
        }
    }
}

fn decompose<S: Scalar>(file: &MomentFile, n: usize, diag: bool, ctx: &Ctx) -> Result<Outcome, Failure> {
    let m: MomentSequence<S> = file.sequence()?;
    let sys = build_system(&m, n)?;
    let a: Vec<S> = (0..=n).map(|k| sys.rec().a(k)).collect();
    let b: Vec<S> = (0..n).map(|k| sys.rec().b(k)).collect();
    let mut value = json!({
        "L": sys.l().rows(),
        "Pi": sys.pi().rows(),
        "Lambda": sys.lambda().rows(),
        "Delta": sys.hankel().deltas(),
        "a": a,
        "b": b,
    });
    let mut verified = true;
    if diag {
        let d = diagnostics(&sys, ctx.tol::<S>())?;
        verified = d.all_hold();
        value["diagnostics"] = serde_json::to_value(&d).expect("serializable");
    }
    Ok(Outcome { value, verified })
}

fn recurrence_cmd<S: Scalar>(args: &RecurrenceArgs, ctx: &Ctx) -> Result<Outcome, Failure> {
    let rec: RecurrenceCoefficients<S> = match &args.rec {
        Some(p) => RecFile::parse(&read(p)?)?.recurrence()?,
        None => random_recurrence(ctx.seed, args.random_len, false),
    };
    let source = json!({
        "file": args.rec.as_ref().map(|p| p.display().to_string()),
        "seed": if args.rec.is_none() { Some(ctx.seed) } else { None },
    });
    if let Some(k) = args.moments {
        let m = moments_from_recurrence(&rec, k)?;
        return Ok(Outcome::ok(json!({ "source": source, "moments": m.moments() })));
    }
    if let Some(n) = args.eta {
        return Ok(Outcome::ok(json!({ "source": source, "eta": eta_table(&rec, n)?.rows() })));
    }
    if let Some(n) = args.tau {
        return Ok(Outcome::ok(json!({ "source": source, "tau": tau_table(&rec, n)?.rows() })));
    }
    if let Some(n) = args.verify_closed_forms {
        let report = verify_closed_forms(&rec, n, ctx.tol::<S>())?;
        let verified = report.all_pass_except(&SUSPECT_CHECKS);
        return Ok(Outcome {
            value: json!({
                "source": source,
                "recurrence": rec_file_json(&rec.truncated(n)?),
                "order": report.order,
                "checks": report.checks,
                "suspect": SUSPECT_CHECKS,
            }),
            verified,
        });
    }
    Err(input_error("choose one of --moments, --eta, --tau, --verify-closed-forms"))
}

fn connect_cmd<S: Scalar>(args: &ConnectArgs) -> Result<Outcome, Failure> {
    let n = args.n;
    if args.builtin_ribbon {
        let r = args.ribbon.unwrap_or(2);
        let (alpha, delta) = builtin_ribbon_pair::<S>(n)?;
        let report = ribbon_check(&build_system(&alpha, n)?, &delta, r, n)?;
        return Ok(Outcome::ok(serde_json::to_value(&report).expect("serializable")));
    }
    let (Some(a_path), Some(d_path)) = (&args.alpha, &args.delta) else {
        return Err(input_error("connect needs ALPHA and DELTA moment files (or --builtin-ribbon)"));
    };
    let alpha: MomentSequence<S> = load_moments(a_path)?.sequence()?;
    let delta: MomentSequence<S> = load_moments(d_path)?.sequence()?;
    if let Some(big_n) = args.rn {
        let dsys = build_system(&delta, big_n)?;
        let rn = rn_expansion(&alpha, &dsys, big_n, args.target)?;
        return Ok(Outcome::ok(serde_json::to_value(&rn).expect("serializable")));
    }
    if let Some(r) = args.ribbon {
        let report = ribbon_check(&build_system(&alpha, n)?, &delta, r, n)?;
        return Ok(Outcome::ok(serde_json::to_value(&report).expect("serializable")));
    }
    let table = connection_table(&build_system(&delta, n)?, &build_system(&alpha, n)?, n, args.basis.into())?;
    Ok(Outcome::ok(json!({
        "target": table.target,
        "source": table.source,
        "basis": table.basis,
        "gamma": table.gamma.rows(),
    })))
}

fn linearize_cmd<S: Scalar>(file: &MomentFile, n: usize, m: usize, basis: Basis) -> Result<Outcome, Failure> {
    let seq: MomentSequence<S> = file.sequence()?;
    let sys = build_system(&seq, n + m)?;
    let t = linearization_table(&sys, n, m, basis)?;
    Ok(Outcome::ok(serde_json::to_value(&t).expect("serializable")))
}

fn catalog_cmd<S: Scalar>(family: &str, count: usize, q: Option<&str>, mode: Mode) -> Result<Outcome, Failure> {
    let q = q.map(parse_rational).transpose()?;
    let fam = Family::from_name(family, q)?;
    let m: MomentSequence<S> = make_moments(&FamilySpec::new(fam, count))?;
    Ok(Outcome::ok(moment_file_json(&m, mode)))
}

/// Calls `$f` with `S` bound to the backend selected by `$mode`.
macro_rules! dispatch {
    ($mode:expr, $f:ident ( $($arg:expr),* )) => {
        match $mode {
            Mode::Float => $f::<f64>($($arg),*),
            Mode::Rational => $f::<Surd>($($arg),*),
        }
    };
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let ctx = Ctx {
        mode: cli.mode.map(Mode::from),
        tol: cli.tol,
        seed: cli.seed,
    };
    if let Some(t) = cli.tol {
        if t.is_nan() || t <= 0.0 {
            return Err(input_error("--tol must be positive"));
        }
    }
    match &cli.command {
        Command::Decompose { moments, n, diagnostics } => {
            let file = load_moments(moments)?;
            dispatch!(ctx.mode_or(file.mode), decompose(&file, *n, *diagnostics, &ctx))
        }
        Command::Recurrence(args) => dispatch!(ctx.mode_or(Mode::Rational), recurrence_cmd(args, &ctx)),
        Command::Connect(args) => {
            let file_mode = match &args.alpha {
                Some(p) => load_moments(p)?.mode,
                None => Mode::Rational,
            };
            dispatch!(ctx.mode_or(file_mode), connect_cmd(args))
        }
        Command::Linearize { moments, n, m, basis } => {
            let file = load_moments(moments)?;
            let basis: Basis = (*basis).into();
            dispatch!(ctx.mode_or(file.mode), linearize_cmd(&file, *n, *m, basis))
        }
        Command::VerifyPm { q, rho, points, threshold } => {
            let tol = cli.tol.unwrap_or(DEFAULT_TOL);
            let report = match points {
                Some(p) => verify_pm(&[*q], &[*rho], |_| p.clone(), tol, *threshold),
                None => verify_pm(&[*q], &[*rho], default_points, tol, *threshold),
            }?;
            let verified = report.pass;
            Ok(Outcome {
                value: serde_json::to_value(&report).expect("serializable"),
                verified,
            })
        }
        Command::Catalog { family, count, q } => {
            let mode = ctx.mode_or(Mode::Rational);
            dispatch!(mode, catalog_cmd(family, *count, q.as_deref(), mode))
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Flattens JSON into `path,value,value,…` lines; arrays of scalars become
/// one line and nested arrays one line per row.
fn to_csv(v: &Value, path: &str, out: &mut Vec<String>) {
    let is_scalar = |x: &Value| !x.is_array() && !x.is_object();
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                to_csv(x, &p, out);
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let mut line = vec![csv_field(path)];
            line.extend(items.iter().map(|x| csv_field(&scalar_text(x))));
            out.push(line.join(","));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                to_csv(x, &format!("{path}[{i}]"), out);
            }
        }
        scalar => out.push(format!("{},{}", csv_field(path), csv_field(&scalar_text(scalar)))),
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
        Format::Csv => {
            let mut lines = Vec::new();
            to_csv(v, "", &mut lines);
            lines.join("\n") + "\n"
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let text = render(&outcome.value, cli.format);
    let written = match &cli.out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if !outcome.verified {
        eprintln!("verification failed");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
