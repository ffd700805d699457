use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use repgeo::config::{ConfigError, RunConfig, TargetConfig};
use repgeo::field::{FieldAutomorphism, FieldDescriptor};
use repgeo::geometry::{GeometryError, DEFAULT_DRAWS, DEFAULT_SEED};
use repgeo::report::{self, Report, ReportError};
use repgeo::term::parse_scalar;
use repgeo::verbal::{VerbalError, WordSystem};

/// Exact computations with free representations of Lie algebras.
///
/// Exit codes: 0 all checks passed, 1 a check failed, 2 configuration or
/// parse error, 3 certification inconclusive.
#[derive(Parser, Debug)]
#[command(name = "repgeo", version, about)]
struct Cli {
    /// Re-validate a report or certificate file and exit.
    #[arg(long, value_name = "FILE", global = true)]
    verify: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Variety configuration (TOML); defaults to x1*...*x6*v = 0.
    #[arg(long, value_name = "FILE")]
    variety: Option<PathBuf>,
    /// Field, e.g. "Q" or "Q(sqrt 2)"; overrides the configuration.
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sampled sort-1 draws for closures.
    #[arg(long)]
    draws: Option<usize>,
    /// Degree bound for membership certificates.
    #[arg(long)]
    degree_bound: Option<usize>,
    /// Write the JSON report here (and any certificate beside it, as *.cert.json).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the narrative.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug, Clone)]
struct Gens {
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct Word {
    /// Scalar a of the word system.
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Field automorphism: id or conj.
    #[arg(long, default_value = "id")]
    phi: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lyndon basis, Witt numbers and graded dimensions.
    Basis {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        gens: Gens,
    },
    /// Recover generator counts from F(n1, n2).
    Ibn {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        gens: Gens,
    },
    /// Build s_F : F -> F*_W and run its check battery.
    Twist {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        gens: Gens,
        #[command(flatten)]
        word: Word,
    },
    /// Decide whether the automorphism given by W = (a, phi) is inner.
    Inner {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        word: Word,
    },
    /// Describe the group of automorphisms modulo inner ones.
    Group {
        #[command(flatten)]
        common: Common,
    },
    /// Certified closure of a system of equations w.r.t. a target.
    Closure {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        gens: Gens,
        /// Equations, one per line.
        #[arg(long, value_name = "FILE")]
        system: PathBuf,
        /// Target representation (TOML).
        #[arg(long, value_name = "FILE")]
        target: PathBuf,
    },
    /// The separation example over Q(sqrt d).
    Separate {
        #[arg(long)]
        d: i64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DRAWS)]
        draws: usize,
        #[arg(long)]
        degree_bound: Option<usize>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Re-validate a report file.
    Verify { file: PathBuf },
}

enum Failure {
    Config(String),
    Check(String),
    Inconclusive(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Config(_) => 2,
            Failure::Inconclusive(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Check(m) | Failure::Inconclusive(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn from_geometry(e: GeometryError) -> Failure {
    match e {
        GeometryError::CertificationFailed { .. } => Failure::Inconclusive(format!(
            "{e}\nThe sampled upper bound could not be certified; rerun with a larger --degree-bound or more --draws."
        )),
        GeometryError::Term(_) | GeometryError::Parse(_) | GeometryError::FixedScalar(_) | GeometryError::Field(_) => {
            Failure::Config(e.to_string())
        }
        other => Failure::Check(other.to_string()),
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Config(c) => c.into(),
            ReportError::Geometry(g) => from_geometry(g),
            ReportError::Verbal(VerbalError::ZeroScalar) | ReportError::Verbal(VerbalError::Field(_)) => {
                Failure::Config(e.to_string())
            }
            ReportError::Json(_) | ReportError::Schema(_) => Failure::Config(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

fn load_config(common: &Common, gens: Option<&Gens>) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.variety {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::degree_six(FieldDescriptor::Rationals),
    };
    if let Some(f) = &common.field {
        cfg.field = f
            .parse()
            .map_err(|e: repgeo::field::FieldError| Failure::Config(e.to_string()))?;
    }
    if let Some(g) = gens {
        cfg.n1 = g.n1.unwrap_or(cfg.n1);
        cfg.n2 = g.n2.unwrap_or(cfg.n2);
    }
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    cfg.draws = common.draws.unwrap_or(cfg.draws);
    cfg.degree_bound = common.degree_bound.or(cfg.degree_bound);
    if let Some(o) = &common.out {
        cfg.output = Some(o.display().to_string());
    }
    Ok(cfg)
}

fn word_system(w: &Word) -> Result<WordSystem, Failure> {
    let a = parse_scalar(&w.a).map_err(|e| Failure::Config(format!("--a: {e}")))?;
    let phi: FieldAutomorphism = w.phi.parse().map_err(|e: repgeo::field::FieldError| Failure::Config(e.to_string()))?;
    WordSystem::new(a, phi).map_err(|e| Failure::Config(e.to_string()))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))
}

fn emit(r: &Report, out: Option<&str>, json: bool) -> Result<(), Failure> {
    if let Some(path) = out {
        write(Path::new(path), &r.to_json())?;
        if let Some(c) = r.certificate() {
            write(&cert_path(Path::new(path)), &c.to_json())?;
        }
    }
    if json {
        println!("{}", r.to_json());
    } else {
        print!("{}", r.narrative);
    }
    if r.passed {
        Ok(())
    } else {
        Err(Failure::Check(format!("{}: a check failed", r.command)))
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, format!("{text}\n")).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

/// `out/report.json` -> `out/report.cert.json`
fn cert_path(report: &Path) -> PathBuf {
    let stem = report.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    report.with_file_name(format!("{stem}.cert.json"))
}

fn verify(path: &Path) -> Result<(), Failure> {
    let what = report::verify_document(&read(path)?)?;
    println!("{}: {what} re-validated", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(p) = &cli.verify {
        return verify(p);
    }
    let Some(command) = cli.command else {
        return Err(Failure::Config("no command given; see --help".into()));
    };
    let (r, common) = match command {
        Command::Verify { file } => return verify(&file),
        Command::Basis { common, gens } => (report::basis(&load_config(&common, Some(&gens))?)?, common),
        Command::Ibn { common, gens } => (report::ibn(&load_config(&common, Some(&gens))?)?, common),
        Command::Twist { common, gens, word } => {
            let cfg = load_config(&common, Some(&gens))?;
            (report::twist(&cfg, &word_system(&word)?)?, common)
        }
        Command::Inner { common, word } => {
            let cfg = load_config(&common, None)?;
            (report::inner(&cfg, &word_system(&word)?)?, common)
        }
        Command::Group { common } => (report::group(&load_config(&common, None)?)?, common),
        Command::Closure {
            common,
            gens,
            system,
            target,
        } => {
            let cfg = load_config(&common, Some(&gens))?;
            let target = TargetConfig::load(&target)?;
            (report::closure_report(&cfg, &read(&system)?, &target)?, common)
        }
        Command::Separate {
            d,
            lambda,
            seed,
            draws,
            degree_bound,
            out,
            json,
        } => {
            let lambda = parse_scalar(&lambda).map_err(|e| Failure::Config(format!("--lambda: {e}")))?;
            let r = report::separate(d, lambda, seed, draws, degree_bound)?;
            let out = out.map(|p| p.display().to_string());
            return emit(&r, out.as_deref(), json);
        }
    };
    emit(&r, r.config.output.clone().as_deref(), common.json)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
