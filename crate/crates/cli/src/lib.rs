//! Command-line front end: `solve`, `filter-grid`, `synth` and `fetch`.

pub mod fetch;
pub mod report;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use diskeig_core::deflation::PhiChoice;
use diskeig_core::drivers::{algorithm2, algorithm3, algorithm4, rsi, SolverConfig};
use diskeig_core::filter::{filter_grid, trapezoidal_rule, Disk, Grid};
use diskeig_core::hrr::EigenReport;
use diskeig_core::range::RangeFinderConfig;
use diskeig_core::sparse::{read_matrix_market, write_matrix_market, SparseMatrix, SparsePencil};
use diskeig_core::synth::{planted, MassKind, PlantedConfig};
use diskeig_core::{Error, C64};

use report::{ConfigEcho, JsonReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "diskeig", version, about = "Eigenvalues of sparse pencils inside a disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute every eigenpair of (A, M) inside a disk.
    Solve(SolveArgs),
    /// Tabulate |rho| of the trapezoidal filter on a grid.
    FilterGrid(GridArgs),
    /// Write a planted-spectrum test pencil.
    Synth(SynthArgs),
    /// Download a SuiteSparse matrix into the local cache.
    Fetch(FetchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Alg2,
    Alg3,
    Alg4,
    Rsi,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Alg2 => "alg2",
            Algorithm::Alg3 => "alg3",
            Algorithm::Alg4 => "alg4",
            Algorithm::Rsi => "rsi",
        }
    }
}

#[derive(Args, Debug)]
struct DiskArgs {
    /// Disk center as `re,im`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    center: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    radius: f64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    a: PathBuf,
    /// Mass matrix; the identity when omitted.
    #[arg(long)]
    m: Option<PathBuf>,
    #[command(flatten)]
    disk: DiskArgs,
    #[arg(long, value_enum, default_value_t = Algorithm::Alg3)]
    alg: Algorithm,
    #[arg(long, default_value_t = 16)]
    n_poles: usize,
    #[arg(long, default_value_t = 8)]
    parts: usize,
    #[arg(long, default_value_t = 1)]
    psi: usize,
    /// `auto` or a count of interior eigenvalues to deflate.
    #[arg(long, default_value = "auto")]
    phi: String,
    #[arg(long, default_value_t = 1e-12)]
    rf_tol: f64,
    #[arg(long, default_value_t = 400)]
    rf_maxit: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    spurious_tol: f64,
    #[arg(long, default_value_t = 32)]
    rsi_m: usize,
    #[arg(long, default_value_t = 1e-10)]
    rsi_tol: f64,
    #[arg(long, default_value_t = 50)]
    rsi_maxit: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value = "diskeig-out")]
    out: PathBuf,
    /// Also write the accepted eigenvectors.
    #[arg(long)]
    vectors: bool,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[command(flatten)]
    disk: DiskArgs,
    /// Rectangle `x0,x1,y0,y1`.
    #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
    r#box: String,
    /// Points per axis.
    #[arg(long, default_value_t = 200)]
    res: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mass {
    Identity,
    Diagonal,
    Tridiagonal,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Number of coupled blocks.
    #[arg(long, default_value_t = 5)]
    blocks: usize,
    #[arg(long, default_value_t = 12)]
    block_size: usize,
    /// Eigenvalues planted inside the disk (at most the block size).
    #[arg(long, default_value_t = 5)]
    inside: usize,
    /// Outside eigenvalues per block placed just beyond `2.5 r`.
    #[arg(long)]
    moderate: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mass::Identity)]
    mass: Mass,
    #[command(flatten)]
    disk: DiskArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FetchArgs {
    /// Matrix name, e.g. `utm1700b`.
    #[arg(long)]
    name: String,
    /// Collection group; looked up for a few known matrices when omitted.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::UnsupportedFormat(_)
            | Error::Io(_)
            | Error::InvalidConfig(_)
            | Error::InvalidRadius(_)
            | Error::InvalidOrder(_)
            | Error::InvalidParts(_)
            | Error::TooManyParts { .. }
            | Error::DimensionMismatch(_) => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn parse_list(s: &str, len: usize, what: &str) -> Result<Vec<f64>, Failure> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Config(format!("{what} must be {len} comma-separated numbers, got {s:?}")))?;
    if v.len() != len || v.iter().any(|x| !x.is_finite()) {
        return Err(Failure::Config(format!("{what} must be {len} comma-separated finite numbers, got {s:?}")));
    }
    Ok(v)
}

fn parse_disk(d: &DiskArgs) -> Result<Disk, Failure> {
    let c = parse_list(&d.center, 2, "--center")?;
    Ok(Disk::new(C64::new(c[0], c[1]), d.radius)?)
}

fn parse_phi(s: &str) -> Result<PhiChoice, Failure> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(PhiChoice::Auto);
    }
    s.parse::<usize>()
        .map(PhiChoice::Count)
        .map_err(|_| Failure::Config(format!("--phi must be `auto` or a count, got {s:?}")))
}

fn echo(args: &SolveArgs) -> ConfigEcho {
    let center = parse_list(&args.disk.center, 2, "").ok().map(|c| [c[0], c[1]]);
    ConfigEcho {
        command: "solve".into(),
        a: Some(args.a.display().to_string()),
        m: args.m.as_ref().map(|p| p.display().to_string()),
        center,
        radius: args.disk.radius,
        algorithm: args.alg.name().into(),
        n_poles: args.n_poles,
        parts: args.parts,
        psi: args.psi,
        phi: args.phi.clone(),
        rf_tol: args.rf_tol,
        rf_maxit: args.rf_maxit,
        seed: args.seed,
        spurious_tol: args.spurious_tol,
        rsi_m: args.rsi_m,
        rsi_tol: args.rsi_tol,
        rsi_maxit: args.rsi_maxit,
        threads: args.threads,
    }
}

fn solver_config(args: &SolveArgs) -> Result<SolverConfig, Failure> {
    let mut cfg = SolverConfig::new(parse_disk(&args.disk)?);
    cfg.n_poles = args.n_poles;
    cfg.parts = args.parts;
    cfg.psi = args.psi;
    cfg.phi = parse_phi(&args.phi)?;
    cfg.range = RangeFinderConfig { ratio_tol: args.rf_tol, max_iterations: args.rf_maxit, seed: args.seed };
    cfg.spurious_tol = args.spurious_tol;
    cfg.rsi_m = args.rsi_m;
    cfg.rsi_tol = args.rsi_tol;
    cfg.rsi_maxit = args.rsi_maxit;
    cfg.threads = args.threads;
    cfg.validate()?;
    Ok(cfg)
}

fn load_pencil(args: &SolveArgs, notes: &mut Vec<String>) -> Result<SparsePencil, Failure> {
    let a = read_matrix_market(&args.a)?;
    let m = match &args.m {
        Some(p) => read_matrix_market(p)?,
        None => {
            notes.push("no mass matrix given; M = I assumed".into());
            SparseMatrix::identity(a.rows())
        }
    };
    Ok(SparsePencil::new(a, m)?)
}

pub fn run_solver(alg: Algorithm, pencil: &SparsePencil, cfg: &SolverConfig) -> diskeig_core::Result<EigenReport> {
    match alg {
        Algorithm::Alg2 => algorithm2(pencil, cfg),
        Algorithm::Alg3 => algorithm3(pencil, cfg),
        Algorithm::Alg4 => algorithm4(pencil, cfg),
        Algorithm::Rsi => rsi(pencil, cfg, None),
    }
}

fn solve(args: &SolveArgs) -> i32 {
    let mut json = JsonReport::new(echo(args));
    let outcome = (|| {
        let cfg = solver_config(args)?;
        let pencil = load_pencil(args, &mut json.notes)?;
        json.n = Some(pencil.n);
        Ok::<_, Failure>(run_solver(args.alg, &pencil, &cfg)?)
    })();
    let (code, result) = match outcome {
        Ok(r) => {
            json.fill(&r);
            (EXIT_OK, Some(r))
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            json.error = Some(f.message().to_string());
            (f.code(), None)
        }
    };
    if let Err(e) = report::emit(&args.out, &json, result.as_ref(), args.vectors) {
        eprintln!("error: cannot write report to {}: {e}", args.out.display());
        return if code == EXIT_OK { EXIT_CONFIG } else { code };
    }
    code
}

fn grid(args: &GridArgs) -> Result<(), Failure> {
    let disk = parse_disk(&args.disk)?;
    let b = parse_list(&args.r#box, 4, "--box")?;
    let rule = trapezoidal_rule(disk, args.n)?;
    let g = Grid { x0: b[0], x1: b[1], y0: b[2], y1: b[3], nx: args.res, ny: args.res };
    let rows = filter_grid(&rule, &g)?;
    let mut s = String::with_capacity(40 * rows.len() + 64);
    let _ = writeln!(s, "# N={} center={},{} radius={}", args.n, disk.center.re, disk.center.im, disk.radius);
    for (x, y, v) in rows {
        let _ = writeln!(s, "{x}\t{y}\t{v:e}");
    }
    write_out(args.out.as_deref(), &s)
}

fn write_out(path: Option<&Path>, s: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, s).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn synth(args: &SynthArgs) -> Result<(), Failure> {
    if args.blocks == 0 || args.block_size == 0 || args.inside > args.block_size {
        return Err(Failure::Config("need blocks >= 1 and 0 <= inside <= block-size".into()));
    }
    let mut cfg = PlantedConfig::new(args.blocks, args.block_size, args.inside)
        .with_mass(match args.mass {
            Mass::Identity => MassKind::Identity,
            Mass::Diagonal => MassKind::Diagonal,
            Mass::Tridiagonal => MassKind::Tridiagonal,
        })
        .with_disk(parse_disk(&args.disk)?)
        .with_seed(args.seed);
    if let Some(k) = args.moderate {
        cfg = cfg.with_moderate(k);
    }
    let p = planted(&cfg)?;
    let dir = &args.out;
    std::fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
    write_matrix_market(dir.join("A.mtx"), &p.pencil.a)?;
    write_matrix_market(dir.join("M.mtx"), &p.pencil.m)?;
    let mut s = String::from("re(lambda),im(lambda),inside\n");
    for z in &p.eigenvalues {
        let _ = writeln!(s, "{:.17e},{:.17e},{}", z.re, z.im, u8::from(p.disk.contains(*z)));
    }
    write_out(Some(&dir.join("spectrum.csv")), &s)?;
    println!("wrote n = {} pencil with {} eigenvalues inside to {}", p.pencil.n, p.inside.len(), dir.display());
    Ok(())
}

fn fetch_cmd(args: &FetchArgs) -> Result<(), Failure> {
    if args.group.is_none() && fetch::known_group(&args.name).is_none() && !fetch::cached_path(&args.name).exists() {
        return Err(Failure::Config(format!("unknown collection group for {}; pass --group", args.name)));
    }
    let p = fetch::fetch(&args.name, args.group.as_deref()).map_err(Failure::Numerical)?;
    println!("{}", p.display());
    Ok(())
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns 0 on success, 2 on configuration errors, 3 on numerical failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let done = match &cli.command {
        Command::Solve(a) => return solve(a),
        Command::FilterGrid(a) => grid(a),
        Command::Synth(a) => synth(a),
        Command::Fetch(a) => fetch_cmd(a),
    };
    match done {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}
