//! `sqgt`: build, verify and decode semi-quantitative group testing codes.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error, 3 decoding failure.

mod specs;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sqgt_core::bench::bench_decoders;
use sqgt_core::campaign::{run_campaign, CampaignConfig, CampaignErrors, DEFAULT_CASE_BUDGET};
use sqgt_core::channel::{inject_explicit, inject_random, syndrome};
use sqgt_core::codebook::{build, feasibility_report, verify_matrix_separable, DEFAULT_SEPARABILITY_BUDGET};
use sqgt_core::decoders::decode;
use sqgt_core::disjunct::verify_disjunct;
use sqgt_core::sequences::{
    base_recursive_superincreasing, base_strong_lex, check_sequence, greedy_generate, scaled_construction,
    strong_lex_search,
};
use sqgt_core::{BaseSequence, DefectiveSet, Error, HeadroomMode, Matrix, MultiplierSequence, SequenceKind};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::DecodingFailure(_)) => 3,
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::Usage(msg) => write!(f, "usage: {msg}"),
        }
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(name = "sqgt", version, about = "Semi-quantitative group testing codes")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for the parallel loops (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplier sequences.
    Seq {
        #[command(subcommand)]
        action: SeqAction,
    },
    /// Binary disjunct base codes.
    Base {
        #[command(subcommand)]
        action: BaseAction,
    },
    /// Full SQGT codes.
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Test results of a set of defective columns.
    Syndrome {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Defective columns, numbered from 1.
        #[arg(long)]
        defectives: String,
    },
    /// Changes entries of a result vector.
    Inject {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Clean result: a line of bins or outcome JSON.
        #[arg(long)]
        y: String,
        /// Random changes to make.
        #[arg(long, default_value_t = 0)]
        e: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Explicit `pos:value` changes (rows from 0); overrides `--e`.
        #[arg(long)]
        errors: Option<String>,
    },
    /// Recovers the defective columns from a result vector.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// A line of bins, outcome JSON, or `-` to read stdin.
        #[arg(long)]
        y: String,
    },
    /// Round-trip campaign over every defective set and error pattern.
    Simulate {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Errors per outcome (default: the code's e).
        #[arg(long)]
        injected: Option<usize>,
        #[arg(long, value_enum, default_value_t = Policy::Exhaustive)]
        policy: Policy,
        /// Random patterns per defective set.
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CASE_BUDGET)]
        budget: u128,
        /// Include wall time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Lower bounds and necessary conditions for a parameter set.
    Report {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: usize,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        h: usize,
        /// Alphabet size of the code matrix.
        #[arg(long)]
        q: u64,
        #[arg(long)]
        thresholds: PathBuf,
    },
    /// Decoder timings as CSV.
    Bench {
        /// Sequence lengths, comma separated.
        #[arg(long, default_value = "4,8,12,16")]
        ks: String,
        #[arg(long, default_value_t = 20_000)]
        calls: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Greedy,
    Scaled,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseKind {
    /// Recursive h-superincreasing.
    Recursive,
    /// Explicit strong-lex construction.
    StrongLex,
    /// Smallest strong-lex sequence found by search (K <= 12).
    StrongLexSearch,
    /// Powers of two.
    Powers,
}

#[derive(Args)]
struct SequenceInput {
    /// Sequence JSON as written by `seq gen --out`.
    #[arg(long, conflicts_with_all = ["values", "kind", "h"])]
    sequence: Option<PathBuf>,
    /// Explicit values, space or comma separated.
    #[arg(long, requires_all = ["kind", "h"])]
    values: Option<String>,
    #[arg(long)]
    kind: Option<SequenceKind>,
    #[arg(long)]
    h: Option<usize>,
}

#[derive(Subcommand)]
enum SeqAction {
    /// Generates a sequence and prints its values.
    Gen {
        #[arg(long)]
        kind: SequenceKind,
        #[arg(long)]
        h: usize,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        thresholds: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Greedy)]
        method: Method,
        /// Base for the scaled method (default follows the kind).
        #[arg(long, value_enum)]
        base: Option<BaseKind>,
        /// Threshold index bounding the scaled sequence (default: the top).
        #[arg(long)]
        s: Option<usize>,
        /// Also write the sequence JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a sequence against a kind; exits 1 if it fails.
    Check {
        #[arg(long)]
        thresholds: PathBuf,
        #[command(flatten)]
        input: SequenceInput,
    },
}

#[derive(Subcommand)]
enum BaseAction {
    /// Writes a base matrix in the `m n q` text format.
    Gen {
        /// `identity:N`, `ks:Q:K[:D]`, `random:M:N:D:E[:DENSITY]`.
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force disjunctness check; exits 1 if it fails.
    Verify {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        e: usize,
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum CodeAction {
    /// Builds a code and writes `<out>.txt` and `<out>.json`.
    Build {
        /// `identity:N`, `ks:Q:K[:D]`, `random:M:N:D:E[:DENSITY]`, `file:PATH:D:E`.
        #[arg(long)]
        base: String,
        #[command(flatten)]
        input: SequenceInput,
        /// Required with `--values`; otherwise taken from the sequence.
        #[arg(long)]
        thresholds: Option<PathBuf>,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = HeadroomMode::Strict)]
        mode: HeadroomMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Brute-force separability of a matrix; exits 1 if it fails.
    Verify {
        /// Smallest defective set size.
        #[arg(long, default_value_t = 1)]
        l: usize,
        /// Largest defective set size (default: the sidecar's d).
        #[arg(long)]
        u: Option<usize>,
        /// Errors to tolerate (default: the sidecar's e).
        #[arg(long)]
        e: Option<usize>,
        /// Thresholds (default: from the sidecar next to the matrix).
        #[arg(long)]
        thresholds: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEPARABILITY_BUDGET)]
        budget: u128,
        file: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let run = || dispatch(&cli.command, cli.json);
    let result = match cli.workers {
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))
            .and_then(|pool| pool.install(run)),
        None => run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
}

fn dispatch(command: &Command, as_json: bool) -> CliResult {
    match command {
        Command::Seq { action } => seq(action, as_json),
        Command::Base { action } => base(action, as_json),
        Command::Code { action } => code(action, as_json),
        Command::Syndrome { code, matrix, defectives } => {
            let code = specs::load_code(code, matrix.as_deref())?;
            let set = DefectiveSet::new(specs::columns(defectives)?, &code)?;
            let y = syndrome(&code, &set)?;
            if as_json {
                println!("{}", y.to_json());
            } else {
                println!("{}", y.to_line());
            }
            Ok(())
        }
        Command::Inject { code, matrix, y, e, seed, errors } => {
            let code = specs::load_code(code, matrix.as_deref())?;
            let clean = specs::outcome(y)?;
            if clean.y.len() != code.m() {
                return Err(Error::InvalidInput(format!("result has {} entries, code has {} rows", clean.y.len(), code.m())).into());
            }
            let bins = code.thresholds().bins();
            let out = match errors {
                Some(list) => inject_explicit(&clean, &specs::changes(list)?, bins)?,
                None => inject_random(&clean, *e, bins, *seed),
            };
            if as_json {
                println!("{}", out.to_json());
            } else {
                println!("{}", out.to_line());
            }
            Ok(())
        }
        Command::Decode { code, matrix, y } => {
            let code = specs::load_code(code, matrix.as_deref())?;
            let text = if y == "-" { specs::read(Path::new("-"))? } else { y.clone() };
            let result = decode(&specs::outcome(&text)?, &code)?;
            if let Some(w) = &result.warning {
                log::warn!("{w}");
            }
            if as_json {
                let supports: Vec<_> = result
                    .per_support
                    .iter()
                    .map(|s| json!({"base_column": s.base_column + 1, "strength": s.strength, "multipliers": s.multipliers}))
                    .collect();
                print_json(&json!({
                    "defectives": result.defectives.iter().map(|c| c + 1).collect::<Vec<_>>(),
                    "per_support": supports,
                    "warning": result.warning,
                }));
            } else {
                println!("{}", specs::one_based(&result.defectives));
            }
            Ok(())
        }
        Command::Simulate { code, matrix, injected, policy, samples, seed, budget, timing } => {
            let code = specs::load_code(code, matrix.as_deref())?;
            let config = CampaignConfig {
                injected: injected.unwrap_or(code.e()),
                errors: match policy {
                    Policy::Exhaustive => CampaignErrors::Exhaustive,
                    Policy::Random => CampaignErrors::Random { seed: *seed, samples: *samples },
                },
                budget: *budget,
                timing: *timing,
            };
            let summary = run_campaign(&code, &config)?;
            if as_json {
                print_json(&serde_json::to_value(&summary).expect("summary serializes"));
            } else {
                println!("cases      {}", summary.cases);
                println!("successes  {}", summary.successes);
                println!("failures   {}", summary.failures);
                println!("rate       {:.6}", summary.success_rate());
                if summary.truncated {
                    println!("truncated  budget of {budget} cases reached");
                }
                if !summary.within_contract {
                    println!("note       {} injected errors exceed e = {}", config.injected, code.e());
                }
                if let Some(f) = &summary.first_failure {
                    println!("first      {f}");
                }
                if let Some(ms) = summary.wall_time_ms {
                    println!("wall time  {ms:.1} ms");
                }
            }
            Ok(())
        }
        Command::Report { n, d, k, h, q, thresholds } => {
            let th = specs::thresholds(thresholds)?;
            let report = feasibility_report(*n, *d, *k, *h, *q, &th);
            if as_json {
                print_json(&serde_json::to_value(&report).expect("report serializes"));
            } else {
                println!("counting bound      {:.3}", report.counting_bound);
                match report.disjunct_bound {
                    Some(b) => println!("disjunct bound      {b:.3}"),
                    None => println!("disjunct bound      n/a (d < 2)"),
                }
                println!("cardinality         {} ({})", report.cardinality_feasible, report.cardinality_rule);
                println!("alphabet            {}", report.alphabet_feasible);
                for note in &report.notes {
                    println!("note                {note}");
                }
            }
            Ok(())
        }
        Command::Bench { ks, calls } => {
            let ks: Vec<usize> = specs::numbers(ks, "length")?;
            let report = bench_decoders(&ks, *calls)?;
            if as_json {
                print_json(&serde_json::to_value(&report).expect("report serializes"));
            } else {
                print!("{}", report.to_csv());
            }
            Ok(())
        }
    }
}

fn default_base(kind: SequenceKind) -> BaseKind {
    match kind {
        SequenceKind::QuantizedBh => BaseKind::Powers,
        SequenceKind::SqloS => BaseKind::Recursive,
        SequenceKind::SqloL => BaseKind::StrongLex,
    }
}

fn base_sequence(which: BaseKind, kind: SequenceKind, h: usize, k: usize) -> Result<BaseSequence, CliError> {
    let family = kind.base_family();
    Ok(match which {
        BaseKind::Recursive => base_recursive_superincreasing(h, k)?,
        BaseKind::StrongLex => base_strong_lex(h, k)?,
        BaseKind::StrongLexSearch => {
            // The explicit construction bounds the search.
            let bound = *base_strong_lex(h, k)?.values.last().expect("K >= 1");
            strong_lex_search(h, k, bound)?.ok_or_else(|| Error::InvalidInput(format!("no strong-lex sequence below {bound}")))?
        }
        BaseKind::Powers => BaseSequence::powers_of_two(k, family, h)?,
    })
}

fn read_sequence(input: &SequenceInput, thresholds: Option<&Path>) -> Result<MultiplierSequence, CliError> {
    if let Some(path) = &input.sequence {
        return Ok(MultiplierSequence::from_json(&specs::read(path)?)?);
    }
    let (Some(values), Some(kind), Some(h)) = (&input.values, input.kind, input.h) else {
        return Err(CliError::Usage("give --sequence, or --values with --kind and --h".into()));
    };
    let th = thresholds.ok_or_else(|| CliError::Usage("--values needs --thresholds".into()))?;
    Ok(MultiplierSequence::new(specs::numbers(values, "value")?, kind, h, specs::thresholds(th)?)?)
}

fn seq(action: &SeqAction, as_json: bool) -> CliResult {
    match action {
        SeqAction::Gen { kind, h, k, thresholds, method, base, s, out } => {
            let th = specs::thresholds(thresholds)?;
            let seq = match method {
                Method::Greedy => {
                    let seq = greedy_generate(&th, *h, *k, *kind)?;
                    if seq.len() < *k {
                        log::warn!("greedy search stopped after {} of {k} elements", seq.len());
                    }
                    seq
                }
                Method::Scaled => {
                    let which = base.unwrap_or_else(|| default_base(*kind));
                    let b = base_sequence(which, *kind, *h, *k)?;
                    if b.family != kind.base_family() {
                        return Err(CliError::Usage(format!("a {} base cannot back a {kind} sequence", b.family)));
                    }
                    scaled_construction(&b, &th, *h, s.unwrap_or(th.bins()))?
                }
            };
            if let Some(path) = out {
                specs::write(path, &seq.to_json())?;
            }
            if as_json {
                println!("{}", seq.to_json());
            } else {
                println!("{}", seq.to_line());
            }
            Ok(())
        }
        SeqAction::Check { thresholds, input } => {
            let th = specs::thresholds(thresholds)?;
            let (values, kind, h) = match &input.sequence {
                Some(path) => {
                    let seq = MultiplierSequence::from_json(&specs::read(path)?)?;
                    (seq.values().to_vec(), seq.kind(), seq.h())
                }
                None => {
                    let (Some(values), Some(kind), Some(h)) = (&input.values, input.kind, input.h) else {
                        return Err(CliError::Usage("give --sequence, or --values with --kind and --h".into()));
                    };
                    (specs::numbers(values, "value")?, kind, h)
                }
            };
            let report = check_sequence(&values, &th, h, kind)?;
            if as_json {
                print_json(&json!({"kind": kind, "h": h, "pass": report.pass, "violation": report.first_violation}));
            } else if report.pass {
                println!("pass: {kind} for h={h}");
            } else {
                println!("fail: {}", report.first_violation.as_deref().unwrap_or("unknown violation"));
            }
            if report.pass {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("not a {kind} sequence")).into())
            }
        }
    }
}

fn base(action: &BaseAction, as_json: bool) -> CliResult {
    match action {
        BaseAction::Gen { spec, seed, out } => {
            let b = specs::base(spec, *seed)?;
            let text = b.matrix().to_text();
            if let Some(path) = out {
                specs::write(path, &text)?;
            }
            if as_json {
                print_json(&json!({"m": b.m(), "n": b.n(), "d": b.d(), "e": b.e(), "provenance": b.provenance()}));
            } else if out.is_none() {
                print!("{text}");
            } else {
                println!("{}x{} base, d={}, e={}", b.m(), b.n(), b.d(), b.e());
            }
            Ok(())
        }
        BaseAction::Verify { d, e, file } => {
            let matrix = Matrix::from_text(&specs::read(file)?)?;
            let ok = matrix.is_binary() && verify_disjunct(&matrix, *d, *e);
            if as_json {
                print_json(&json!({"d": d, "e": e, "disjunct": ok}));
            } else {
                println!("{}", if ok { "disjunct" } else { "not disjunct" });
            }
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidBase(format!("matrix is not {d}-disjunct with {} private rows", 2 * e + 1)).into())
            }
        }
    }
}

fn code(action: &CodeAction, as_json: bool) -> CliResult {
    match action {
        CodeAction::Build { base, input, thresholds, d, mode, seed, out } => {
            let b = specs::base(base, *seed)?;
            let seq = read_sequence(input, thresholds.as_deref())?;
            let th = match thresholds {
                Some(path) => specs::thresholds(path)?,
                None => seq.thresholds().clone(),
            };
            let code = build(&b, &seq, &th, *d, *mode)?;
            if let Some(w) = code.warning() {
                log::warn!("{w}");
            }
            let matrix_path = out.with_extension("txt");
            let sidecar_path = out.with_extension("json");
            specs::write(&matrix_path, &code.matrix().to_text())?;
            specs::write(&sidecar_path, &code.sidecar_json())?;
            if as_json {
                print_json(&json!({
                    "m": code.m(), "n": code.n(), "q": code.q(), "d": code.d(), "e": code.e(),
                    "kind": code.kind(), "matrix": matrix_path, "sidecar": sidecar_path,
                }));
            } else {
                println!(
                    "{}x{} {} code over q={}, d={}, e={}: {} and {}",
                    code.m(),
                    code.n(),
                    code.kind(),
                    code.q(),
                    code.d(),
                    code.e(),
                    matrix_path.display(),
                    sidecar_path.display()
                );
            }
            Ok(())
        }
        CodeAction::Verify { l, u, e, thresholds, budget, file } => {
            let matrix = Matrix::from_text(&specs::read(file)?)?;
            let sidecar = file.with_extension("json");
            let meta: Option<serde_json::Value> = if sidecar.exists() && sidecar != *file {
                Some(serde_json::from_str(&specs::read(&sidecar)?).map_err(|err| Error::Parse(err.to_string()))?)
            } else {
                None
            };
            let from_meta = |key: &str| meta.as_ref().and_then(|m| m.get(key)).and_then(serde_json::Value::as_u64).map(|v| v as usize);
            let th = match (thresholds, &meta) {
                (Some(path), _) => specs::thresholds(path)?,
                (None, Some(m)) => serde_json::from_value(m["thresholds"].clone()).map_err(|err| Error::Parse(err.to_string()))?,
                (None, None) => return Err(CliError::Usage("no sidecar next to the matrix; pass --thresholds".into())),
            };
            let u = u.or_else(|| from_meta("d")).ok_or_else(|| CliError::Usage("pass --u".into()))?;
            let e = e.or_else(|| from_meta("e")).unwrap_or(0);
            let ok = verify_matrix_separable(&matrix, &th, *l, u, e, *budget)?;
            if as_json {
                print_json(&json!({"l": l, "u": u, "e": e, "separable": ok}));
            } else {
                println!("{}", if ok { "separable" } else { "not separable" });
            }
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("two sets of {l} to {u} columns are closer than {} coordinates", 2 * e + 1)).into())
            }
        }
    }
}
