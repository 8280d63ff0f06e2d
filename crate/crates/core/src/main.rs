//! Command-line entry point: scenario generation, polytope membership,
//! Clauser-Horne evaluation, quantum-oracle checks, and simulation.
//!
//! Exit codes: 0 success/inside/pass, 2 outside/violated, 3 simulation
//! mismatch, 64 input error.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use sha2::{Digest, Sha256};

use corrpoly::ch::evaluate_ch;
use corrpoly::oracle::{OracleSide, QuantumSetup};
use corrpoly::polytope::{membership, read_model, verify_certificate, write_report, Verdict};
use corrpoly::quantum::{joint_probability, read_scenario, Convention, EprScenario};
use corrpoly::rational::{format_rational, parse_rational, rational_to_f64};
use corrpoly::simulate::{
    compare, run_simulation, simulation_file, SimOptions, DEFAULT_Z_THRESHOLD, GENERATOR_NAME,
};
use corrpoly::vector::{read_vector, write_vector};
use corrpoly::{CorrelationVector, Error};

const EXIT_OK: i32 = 0;
const EXIT_OUTSIDE: i32 = 2;
const EXIT_SIM_MISMATCH: i32 = 3;
const EXIT_INPUT: i32 = 64;

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "CORRPOLY_OUT_DIR";

#[derive(Parser)]
#[command(name = "corrpoly", version, about = "Correlation polytopes and hidden-variable models for the EPR/Aspect scenario")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Paper,
    Standard,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Paper => Convention::Paper,
            ConventionArg::Standard => Convention::Standard,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate the 8-event EPR correlation vector from a scenario.
    EprVector(EprVectorArgs),
    /// Decide polytope membership; extract a model or a certificate.
    Membership(MembershipArgs),
    /// Evaluate the eight Clauser-Horne inequalities on a 4-event vector.
    Ch(ChArgs),
    /// Sample a deterministic universe from a hidden-variable model.
    Simulate(SimulateArgs),
    /// Compare the trace oracle against both closed-form joint laws.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct EprVectorArgs {
    /// Scenario file (JSON); defaults reproduce the paper's setup.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Direction angles in degrees: a,a',b,b'.
    #[arg(long)]
    angles: Option<String>,
    /// Switch distribution q(ab),q(ab'),q(a'b),q(a'b') as rationals.
    #[arg(long)]
    switch: Option<String>,
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    /// Output vector file (default: epr_vector.json in the output dir).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct MembershipArgs {
    /// Correlation-vector file to test.
    #[arg(long)]
    vector: PathBuf,
    /// Output report file (default: membership_report.json).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Vertex enumeration bound on n.
    #[arg(long, default_value_t = corrpoly::polytope::DEFAULT_VERTEX_BOUND)]
    vertex_bound: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ChArgs {
    /// 4-event Bell-scenario vector file.
    #[arg(long)]
    vector: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    /// Hidden-variable model file (a membership report with verdict inside).
    #[arg(long)]
    model: PathBuf,
    /// Target correlation-vector file; also supplies the event space.
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    shards: u32,
    #[arg(long, default_value_t = DEFAULT_Z_THRESHOLD)]
    z_threshold: f64,
    /// Output file (default: simulation.json).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write per-trial records (line-delimited JSON) next to the output.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    /// Relative angles in degrees; defaults to the paper's four pairs.
    #[arg(long)]
    angles: Option<String>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::EprVector(args) => cmd_epr_vector(args),
        Command::Membership(args) => cmd_membership(args),
        Command::Ch(args) => cmd_ch(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn out_path(explicit: Option<PathBuf>, default_name: &str) -> PathBuf {
    explicit.unwrap_or_else(|| {
        let dir = std::env::var(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|_| PathBuf::from("."));
        dir.join(default_name)
    })
}

fn open_in(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create_out(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn sha256_file(path: &Path) -> Result<String, Error> {
    let bytes =
        std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn parse_csv_f64(raw: &str, expect: usize) -> Result<Vec<f64>, Error> {
    let parts: Result<Vec<f64>, _> = raw.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let parts = parts.map_err(|e| Error::Parse(format!("bad angle list {raw:?}: {e}")))?;
    if parts.len() != expect {
        return Err(Error::Parse(format!(
            "expected {expect} comma-separated values, got {}",
            parts.len()
        )));
    }
    Ok(parts)
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_epr_vector(args: EprVectorArgs) -> Result<i32, Error> {
    let mut scenario = match &args.scenario {
        Some(path) => read_scenario(open_in(path)?)?,
        None => EprScenario::default(),
    };
    if let Some(raw) = &args.angles {
        let a = parse_csv_f64(raw, 4)?;
        scenario.angles = [a[0], a[1], a[2], a[3]];
    }
    if let Some(raw) = &args.switch {
        let parts: Vec<&str> = raw.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse("--switch needs four rationals".into()));
        }
        for (i, p) in parts.iter().enumerate() {
            scenario.switch_distribution[i] = parse_rational(p)?;
        }
    }
    if let Some(c) = args.convention {
        scenario.convention = c.into();
    }
    let vector = scenario.build_vector()?;
    let path = out_path(args.output, "epr_vector.json");
    write_vector(&vector, create_out(&path)?)?;
    match args.format {
        Format::Json => {
            let mut buf = Vec::new();
            write_vector(&vector, &mut buf)?;
            println!("{}", String::from_utf8_lossy(&buf));
        }
        Format::Table => {
            for (label, value) in vector
                .coordinate_labels()
                .into_iter()
                .zip(vector.flatten().iter())
            {
                println!("{label:>8}  {}", format_rational(value));
            }
        }
    }
    eprintln!("wrote {}", path.display());
    Ok(EXIT_OK)
}

fn meta_for(inputs: &[(&str, &Path)]) -> Result<serde_json::Value, Error> {
    let mut hashes = serde_json::Map::new();
    for (name, path) in inputs {
        hashes.insert(name.to_string(), json!(sha256_file(path)?));
    }
    Ok(json!({
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": hashes,
    }))
}

fn load_vector(path: &Path) -> Result<CorrelationVector, Error> {
    let (vector, warnings) = read_vector(open_in(path)?)?;
    print_warnings(&warnings);
    Ok(vector)
}

fn cmd_membership(args: MembershipArgs) -> Result<i32, Error> {
    let vector = load_vector(&args.vector)?;
    let report = membership(&vector, args.vertex_bound)?;
    let meta = meta_for(&[("vector", args.vector.as_path())])?;
    let path = out_path(args.output, "membership_report.json");
    write_report(&report, &vector, Some(meta), create_out(&path)?)?;
    match (&report.verdict, args.format) {
        (Verdict::Inside(model), Format::Table) => {
            println!("verdict: inside ({} atoms)", model.support_size());
            for (world, weight) in model.atoms() {
                println!("  {}  {}", world.bitstring(), format_rational(weight));
            }
        }
        (Verdict::Outside(cert), Format::Table) => {
            println!("verdict: outside");
            println!(
                "  violation: {}",
                format_rational(&cert.violation(&vector))
            );
        }
        (_, Format::Json) => {
            let mut buf = Vec::new();
            let meta = meta_for(&[("vector", args.vector.as_path())])?;
            write_report(&report, &vector, Some(meta), &mut buf)?;
            println!("{}", String::from_utf8_lossy(&buf));
        }
    }
    eprintln!("wrote {}", path.display());
    if report.is_inside() {
        Ok(EXIT_OK)
    } else {
        if let Verdict::Outside(cert) = &report.verdict {
            // sanity: never emit an unsound certificate
            if !verify_certificate(cert, &vector, args.vertex_bound)? {
                return Err(Error::Invalid("certificate failed verification".into()));
            }
        }
        Ok(EXIT_OUTSIDE)
    }
}

fn cmd_ch(args: ChArgs) -> Result<i32, Error> {
    let vector = load_vector(&args.vector)?;
    let results = evaluate_ch(&vector)?;
    let any_violated = results.iter().any(|(_, _, v)| *v);
    match args.format {
        Format::Table => {
            for (ineq, value, violated) in &results {
                println!(
                    "{:<20} {:>8}  {}",
                    ineq.label,
                    format_rational(value),
                    if *violated { "VIOLATED" } else { "ok" }
                );
            }
        }
        Format::Json => {
            let entries: Vec<serde_json::Value> = results
                .iter()
                .map(|(ineq, value, violated)| {
                    json!({
                        "label": ineq.label,
                        "value": format_rational(value),
                        "violated": violated,
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "inequalities": entries }))
                    .map_err(|e| Error::Io(e.to_string()))?
            );
        }
    }
    Ok(if any_violated { EXIT_OUTSIDE } else { EXIT_OK })
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32, Error> {
    let (model, warnings) = read_model(open_in(&args.model)?)?;
    print_warnings(&warnings);
    let target = load_vector(&args.target)?;
    if args.samples == 0 {
        return Err(Error::Invalid("--samples must be >= 1".into()));
    }
    let opts = SimOptions {
        samples: args.samples,
        seed: args.seed,
        shards: args.shards,
    };
    let out = out_path(args.output, "simulation.json");
    let mut trace_file = if args.trace {
        if args.samples > 100_000 {
            eprintln!(
                "warning: tracing {} trials writes a large per-trial log",
                args.samples
            );
        }
        let path = out.with_extension("trace.ndjson");
        Some(create_out(&path)?)
    } else {
        None
    };
    let summary = run_simulation(
        &model,
        &target.space,
        &target.pair_set,
        &opts,
        trace_file.as_mut().map(|f| f as &mut dyn Write),
    )?;
    let comparison = compare(&summary, &target, args.z_threshold)?;
    let pass = comparison.pass;
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": {
            "model": sha256_file(&args.model)?,
            "target": sha256_file(&args.target)?,
        },
        "generator": GENERATOR_NAME,
        "seed": args.seed,
    });
    let file = simulation_file(&summary, &opts, Some(comparison), Some(meta));
    serde_json::to_writer_pretty(create_out(&out)?, &file)
        .map_err(|e| Error::Io(e.to_string()))?;
    match args.format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&file).map_err(|e| Error::Io(e.to_string()))?
            );
        }
        Format::Table => {
            println!("samples: {}  seed: {}  generator: {}", args.samples, args.seed, GENERATOR_NAME);
            for entry in &file.comparison.as_ref().unwrap().entries {
                println!(
                    "{:>8}  target {:>8}  observed {:>12}  z {:>8.3}  {}",
                    entry.label,
                    entry.target,
                    entry.observed,
                    entry.z,
                    if entry.pass { "ok" } else { "FAIL" }
                );
            }
        }
    }
    eprintln!("wrote {}", out.display());
    Ok(if pass { EXIT_OK } else { EXIT_SIM_MISMATCH })
}

fn cmd_oracle(args: OracleArgs) -> Result<i32, Error> {
    let scenario = EprScenario::default();
    let angles: Vec<f64> = match &args.angles {
        Some(raw) => raw
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad angle list: {e}")))?,
        None => {
            // the paper's four setting pairs (a,b), (a,b'), (a',b), (a',b')
            let [a, ap, b, bp] = scenario.angles;
            vec![
                corrpoly::quantum::separation_degrees(a, b),
                corrpoly::quantum::separation_degrees(a, bp),
                corrpoly::quantum::separation_degrees(ap, b),
                corrpoly::quantum::separation_degrees(ap, bp),
            ]
        }
    };
    let setup = QuantumSetup::singlet();
    println!(
        "{:>8}  {:>18}  {:>18}  {:>18}",
        "theta", "trace oracle", "paper law", "standard law"
    );
    let mut all_match = true;
    for theta in angles {
        let oracle = setup.joint_trace(0.0, theta)?;
        let paper = joint_probability(Convention::Paper, theta);
        let standard = joint_probability(Convention::Standard, theta);
        let std_f = standard.to_f64();
        if (oracle - std_f).abs() > 1e-12 {
            all_match = false;
        }
        println!(
            "{theta:>8}  {oracle:>18.12}  {:>18}  {:>18}",
            fmt_joint(&paper),
            fmt_joint(&standard)
        );
    }
    // one-sided traces are 1/2 at every direction
    for side in [OracleSide::Left, OracleSide::Right] {
        let v = setup.single_trace(37.0, side)?;
        if (v - 0.5).abs() > 1e-12 {
            all_match = false;
        }
    }
    Ok(if all_match { EXIT_OK } else { EXIT_OUTSIDE })
}

fn fmt_joint(v: &corrpoly::quantum::JointValue) -> String {
    match v {
        corrpoly::quantum::JointValue::Exact(r) => {
            format!("{} ({:.6})", format_rational(r), rational_to_f64(r))
        }
        corrpoly::quantum::JointValue::Approx(x) => format!("{x:.12}"),
    }
}
