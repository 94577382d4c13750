use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use maxmod::classify::ClassifyError;
use maxmod::hunt::{hunt, FamilyRegistry, HuntConfig};
use maxmod::report::{self, Agreement, RunReport};
use maxmod::tracer::{self, MaximizerRegistry, TraceConfig, TraceError};
use maxmod::{classify, normalize, parse_poly, parse_poly_json, reciprocal, Polynomial};

const EXIT_PARSE: u8 = 2;
const EXIT_MONOMIAL: u8 = 3;
const EXIT_DISCREPANT: u8 = 4;
const EXIT_FLOOR: u8 = 5;
const EXIT_IO: u8 = 6;
const EXIT_OTHER: u8 = 1;

#[derive(Parser)]
#[command(
    name = "maxmod",
    version,
    about = "Maximum modulus sets of polynomials near the origin"
)]
struct Cli {
    /// Coefficients in ascending degree, e.g. "1,0,1,1i".
    #[arg(long, global = true, conflicts_with = "poly_file")]
    poly: Option<String>,
    /// JSON file {"coeffs": [[re, im], ...]}.
    #[arg(long, global = true)]
    poly_file: Option<PathBuf>,
    /// Machine output only; suppresses the human summary on stderr.
    #[arg(long, global = true)]
    json: bool,
    /// No diagnostics beyond errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the coefficient-level classification as JSON.
    Classify,
    /// Trace the maximum modulus set and compare with the classification.
    Trace(TraceArgs),
    /// Sample a polynomial family and record traced component counts.
    Hunt(HuntArgs),
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long, default_value_t = 1e-3)]
    rmin: f64,
    #[arg(long, default_value_t = 0.3)]
    rmax: f64,
    #[arg(long, default_value_t = 200)]
    radii: usize,
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    #[arg(long, default_value = "newton", value_parser = method_names())]
    method: String,
    /// Write samples as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write an SVG plot of the traced curves.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Trace near infinity, i.e. the normalized reciprocal near the origin.
    #[arg(long)]
    infinity: bool,
}

#[derive(Args)]
struct HuntArgs {
    #[arg(long, default_value = "cubic", value_parser = family_names())]
    family: String,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Findings file, appended to; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Share of samples placed on the exceptional locus.
    #[arg(long, default_value_t = 0.5)]
    locus_fraction: f64,
    #[arg(long, default_value_t = 1e-3)]
    rmin: f64,
    #[arg(long, default_value_t = 0.05)]
    rmax: f64,
}

fn method_names() -> clap::builder::PossibleValuesParser {
    clap::builder::PossibleValuesParser::new(MaximizerRegistry::default().names())
}

fn family_names() -> clap::builder::PossibleValuesParser {
    clap::builder::PossibleValuesParser::new(FamilyRegistry::default().names())
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("{}: {e}", path.display()))
}

fn read_poly(cli: &Cli) -> Result<Polynomial, Failure> {
    let parsed = match (&cli.poly, &cli.poly_file) {
        (Some(text), _) => parse_poly(text),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            parse_poly_json(&text)
        }
        (None, None) => {
            return Err(Failure::new(
                EXIT_PARSE,
                "one of --poly or --poly-file is required",
            ))
        }
    };
    parsed.map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))
}

fn classify_failure(e: ClassifyError) -> Failure {
    let code = match e {
        ClassifyError::ZeroPolynomial => EXIT_PARSE,
        ClassifyError::MonomialAllPlane => EXIT_MONOMIAL,
        _ => EXIT_OTHER,
    };
    Failure::new(code, e.to_string())
}

fn trace_failure(e: TraceError) -> Failure {
    let code = match e {
        TraceError::ZeroPolynomial
        | TraceError::InvalidConfig(_)
        | TraceError::UnknownMethod(_) => EXIT_PARSE,
        TraceError::Monomial => EXIT_MONOMIAL,
        TraceError::FloorViolation { .. } => EXIT_FLOOR,
        _ => EXIT_OTHER,
    };
    Failure::new(code, e.to_string())
}

fn cmd_classify(cli: &Cli) -> Result<u8, Failure> {
    let p = read_poly(cli)?;
    let c = classify(&p).map_err(classify_failure)?;
    if !cli.quiet {
        for w in &c.warnings {
            eprintln!("warning: {w}");
        }
    }
    print!("{}", report::canonical_json(&report::to_value(&c)));
    Ok(0)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn cmd_trace(cli: &Cli, args: &TraceArgs) -> Result<u8, Failure> {
    let p = read_poly(cli)?;
    let cfg = TraceConfig {
        r_min: args.rmin,
        r_max: args.rmax,
        n_radii: args.radii,
        grid: args.grid,
        method: args.method.clone(),
        ..TraceConfig::default()
    };
    // near infinity the prediction is the one for the reciprocal
    let target = if args.infinity {
        let q = reciprocal(&p).map_err(|e| trace_failure(e.into()))?;
        match normalize(&q).map_err(|e| trace_failure(e.into()))?.hayman() {
            Some(h) => h.tail,
            None => return Err(trace_failure(TraceError::Monomial)),
        }
    } else {
        p.clone()
    };
    let c = classify(&target).map_err(classify_failure)?;
    let t = if args.infinity {
        tracer::trace_at_infinity(&p, &cfg)
    } else {
        tracer::trace(&p, &cfg)
    }
    .map_err(trace_failure)?;

    let mut run = RunReport::new(p, c, cfg, t);
    if let Some(path) = &args.csv {
        write_file(path, &report::samples_csv(&run.trace))?;
        run.artifacts.csv = Some(path.display().to_string());
    }
    if let Some(path) = &args.svg {
        write_file(path, &report::samples_svg(&run.trace))?;
        run.artifacts.svg = Some(path.display().to_string());
    }
    print!("{}", report::canonical_json(&run.to_json()));
    if !cli.quiet && !cli.json {
        eprintln!(
            "{} component(s), predicted {}, {}",
            run.trace.n_components,
            serde_json::to_string(&run.classification.predicted_count).unwrap_or_default(),
            serde_json::to_string(&run.agreement).unwrap_or_default()
        );
    }
    Ok(if run.agreement == Agreement::Discrepant {
        EXIT_DISCREPANT
    } else {
        0
    })
}

fn cmd_hunt(cli: &Cli, args: &HuntArgs) -> Result<u8, Failure> {
    let family = FamilyRegistry::default()
        .get(&args.family)
        .ok_or_else(|| Failure::new(EXIT_PARSE, format!("unknown family {:?}", args.family)))?;
    let cfg = HuntConfig {
        samples: args.samples,
        seed: args.seed,
        locus_fraction: args.locus_fraction,
        trace: TraceConfig {
            r_min: args.rmin,
            r_max: args.rmax,
            ..TraceConfig::default()
        },
    };
    cfg.trace.validate().map_err(trace_failure)?;
    let records = hunt(family.as_ref(), &cfg);
    let mut text = String::new();
    for r in &records {
        text.push_str(&report::canonical_json_line(r));
        text.push('\n');
    }
    match &args.out {
        Some(path) => OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .and_then(|mut f| f.write_all(text.as_bytes()))
            .map_err(|e| io_failure(path, e))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?,
    }
    let violations = records
        .iter()
        .filter(|r| r["conjecture_holds"] == serde_json::Value::Bool(false))
        .count();
    let failed = records.iter().filter(|r| r.get("error").is_some()).count();
    if !cli.quiet && !cli.json {
        eprintln!(
            "{} samples, {} exceptional, {} violations, {} trace failures",
            records.len(),
            records.iter().filter(|r| r["exceptional"] == true).count(),
            violations,
            failed
        );
    }
    Ok(if violations > 0 { EXIT_DISCREPANT } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("MAXMOD_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let result = match &cli.command {
        Command::Classify => cmd_classify(&cli),
        Command::Trace(args) => cmd_trace(&cli, args),
        Command::Hunt(args) => cmd_hunt(&cli, args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
