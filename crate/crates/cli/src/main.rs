use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sperner_core::bounds::{bound_table, check_consistency, BoundValue, BoundsReport, Params};
use sperner_core::constructions::{
    double, general_wsat_construction, normalize, product_construction, sat66, LayerSpec,
};
use sperner_core::covering::default_layer_spec;
use sperner_core::flat::{
    construction_gen, flat_check, flat_construction_23, flat_construction_23_with, flat_min_bnb,
    flat_min_exact, lflat_bounds, Density, FlatFamily, FlatSearchMode, TuranDensity,
};
use sperner_core::format::serialize_family_with_k;
use sperner_core::reduction::{element_classes, is_primitive, reduce};
use sperner_core::search::{min_sat, SatMode, SearchOptions, SearchResult};
use sperner_core::{
    is_k_sperner, is_strongly_saturating, is_weakly_saturating, parse_family_file, Error,
    FamilyFile, SetFamily,
};

/// Writes to stdout; a closed pipe (`| head`) ends the process quietly.
fn write_out(args: std::fmt::Arguments) {
    if let Err(e) = io::stdout().lock().write_fmt(args) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write output: {e}");
        std::process::exit(2);
    }
}

macro_rules! out {
    ($($t:tt)*) => { write_out(format_args!($($t)*)) };
}

macro_rules! outln {
    ($($t:tt)*) => { write_out(format_args!("{}\n", format_args!($($t)*))) };
}

/// Saturating k-Sperner families and flat antichains on the Boolean lattice.
///
/// Families are read from `--family FILE` or stdin and written to stdout in
/// the family file format; diagnostics go to stderr.
///
/// Exit codes: 0 success or valid, 1 verified invalid (certificate on
/// stdout), 2 usage or input error, 3 capability or budget exceeded.
#[derive(Parser)]
#[command(name = "sperner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a family and print a certificate.
    Verify(VerifyArgs),
    /// Build a family.
    #[command(subcommand)]
    Construct(Construct),
    /// Exact minimum by search.
    #[command(subcommand)]
    Search(Search),
    /// Merge equivalent elements.
    Reduce(FamilyArg),
    /// Print the element equivalence classes.
    Classes(FamilyArg),
    /// Decide separating, duplicable and primitive.
    Primitive(PrimitiveArgs),
    /// Bound table for sat(n,k) and wsat(n,k), or for flat families.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct FamilyArg {
    /// Family file; stdin when absent.
    #[arg(long)]
    family: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Sperner,
    Weak,
    Strong,
    Flat,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: FamilyArg,
    /// Chain bound; defaults to the file's `k` header.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "strong")]
    mode: VerifyMode,
    /// Lower level for `--mode flat`; inferred from the smallest member.
    #[arg(long)]
    l: Option<usize>,
}

#[derive(Subcommand)]
enum Construct {
    /// The explicit 30-set family on [6] (k = 6).
    Sat66,
    /// 2^[k-2] x {empty, [n] \ [k-2]}.
    Product {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Doubling: F x {empty, {n+1}}, repeated.
    Double {
        #[command(flatten)]
        input: FamilyArg,
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Replace a minimal member by the empty set and a maximal one by [n].
    Normalize(FamilyArg),
    /// Layered weakly saturating construction.
    General {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Use full levels instead of greedy cover layers.
        #[arg(long)]
        full_levels: bool,
    },
    /// Extremal family on levels 2 and 3.
    Flat23 {
        #[arg(long)]
        n: usize,
        /// Part size; defaults to floor(n/4).
        #[arg(long)]
        a: Option<usize>,
    },
    /// General two-level construction on levels l and l+1.
    Flatgen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        a: usize,
    },
}

#[derive(Args)]
struct SearchCommon {
    /// Node cap; the best family found is reported when it runs out.
    #[arg(long)]
    budget: Option<u64>,
    /// Worker threads; witnesses are reproducible only with 1.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliSatMode {
    Weak,
    Strong,
}

#[derive(Subcommand)]
enum Search {
    /// Minimum saturating k-Sperner family on [n].
    Sat {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "strong")]
        mode: CliSatMode,
        #[command(flatten)]
        common: SearchCommon,
    },
    /// Minimum saturating antichain on levels 2 and 3 of [n].
    Flat {
        #[arg(long)]
        n: usize,
        /// Enumerate every graph (default for n <= 8).
        #[arg(long, conflicts_with = "bnb")]
        exhaustive: bool,
        /// Branch and bound (default for n > 8).
        #[arg(long)]
        bnb: bool,
        /// Stop branch and bound once the published lower bound is met.
        #[arg(long, requires = "bnb")]
        known_bound: bool,
        #[command(flatten)]
        common: SearchCommon,
    },
}

#[derive(Args)]
struct PrimitiveArgs {
    #[command(flatten)]
    input: FamilyArg,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct BoundsArgs {
    #[command(subcommand)]
    flat: Option<BoundsFlat>,
    #[arg(long, required = true)]
    n: Option<usize>,
    #[arg(long, required = true)]
    k: Option<usize>,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum BoundsFlat {
    /// Bounds for saturating antichains on levels l and l+1.
    Flat {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        /// Lower end of the Turán density interval (`p/q` or decimal).
        #[arg(long, requires = "t_high")]
        t_low: Option<String>,
        #[arg(long, requires = "t_low")]
        t_high: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Input(String),
    Capability(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capability(_) => Failure::Capability(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Capability(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Verify(args) => verify(args),
        Command::Construct(c) => construct(c),
        Command::Search(s) => search(s),
        Command::Reduce(input) => {
            let file = read_family(&input)?;
            out!("{}", serialize_family_with_k(&reduce(&file.family), file.k));
            Ok(ExitCode::SUCCESS)
        }
        Command::Classes(input) => {
            let file = read_family(&input)?;
            for class in element_classes(&file.family) {
                let items: Vec<String> = class.iter().map(|e| e.to_string()).collect();
                outln!("{{{}}}", items.join(","));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Primitive(args) => primitive(args),
        Command::Bounds(args) => bounds(args),
    }
}

fn read_family(arg: &FamilyArg) -> Result<FamilyFile, Failure> {
    let text = match &arg.family {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Input(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    Ok(parse_family_file(&text)?)
}

fn resolve_k(flag: Option<usize>, file: &FamilyFile) -> Result<usize, Failure> {
    flag.or(file.k)
        .ok_or_else(|| Failure::Input("no k given: pass --k or add a `k` header".into()))
}

fn verify(args: VerifyArgs) -> Outcome {
    let file = read_family(&args.input)?;
    let fam = &file.family;
    let (valid, text) = match args.mode {
        VerifyMode::Flat => {
            let flat = match args.l {
                Some(l) => FlatFamily::from_family(fam, l)?,
                None => FlatFamily::infer(fam)?,
            };
            let cert = flat_check(&flat);
            (cert.is_valid(), cert.to_string())
        }
        mode => {
            let k = resolve_k(args.k, &file)?;
            let cert = match mode {
                VerifyMode::Sperner => is_k_sperner(fam, k)?,
                VerifyMode::Weak => is_weakly_saturating(fam, k)?,
                _ => is_strongly_saturating(fam, k)?,
            };
            (cert.is_valid(), cert.to_string())
        }
    };
    outln!("{text}");
    Ok(if valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn emit(fam: &SetFamily, k: Option<usize>) -> Outcome {
    out!("{}", serialize_family_with_k(fam, k));
    Ok(ExitCode::SUCCESS)
}

fn construct(c: Construct) -> Outcome {
    match c {
        Construct::Sat66 => emit(&sat66(), Some(6)),
        Construct::Product { n, k } => emit(&product_construction(n, k)?, Some(k)),
        Construct::Double { input, times } => {
            let file = read_family(&input)?;
            let mut fam = file.family;
            for _ in 0..times {
                fam = double(&fam)?;
            }
            emit(&fam, file.k.map(|k| k + times))
        }
        Construct::Normalize(input) => {
            let file = read_family(&input)?;
            emit(&normalize(&file.family), file.k)
        }
        Construct::General { n, k, full_levels } => {
            let spec = if full_levels { LayerSpec::all_full(k)? } else { default_layer_spec(k)? };
            emit(&general_wsat_construction(n, k, &spec)?, Some(k))
        }
        Construct::Flat23 { n, a } => {
            let flat = match a {
                Some(a) => flat_construction_23_with(n, a)?,
                None => flat_construction_23(n)?,
            };
            emit(&flat.to_family(), None)
        }
        Construct::Flatgen { n, l, a } => emit(&construction_gen(n, l, a)?.to_family(), None),
    }
}

/// Report as `#` comment lines, then the witness; exit 3 if unfinished.
fn print_result(result: &SearchResult, k: Option<usize>, consistency: Option<BoundsReport>) -> Outcome {
    for line in result.to_string().lines() {
        outln!("# {line}");
    }
    if let Some(report) = consistency {
        let check = check_consistency(&report, result)?;
        for line in check.to_string().lines() {
            outln!("# {line}");
        }
    }
    out!("{}", serialize_family_with_k(&result.witness, k));
    if result.exhausted {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("budget exhausted: minimum is only an upper estimate");
        Ok(ExitCode::from(3))
    }
}

fn search(s: Search) -> Outcome {
    match s {
        Search::Sat { n, k, mode, common } => {
            let opts = SearchOptions { budget: common.budget, workers: common.workers };
            let mode = match mode {
                CliSatMode::Weak => SatMode::Weak,
                CliSatMode::Strong => SatMode::Strong,
            };
            let result = min_sat(n, k, mode, &opts)?;
            print_result(&result, Some(k), Some(bound_table(n, k)?))
        }
        Search::Flat { n, exhaustive, bnb, known_bound, common } => {
            let opts = SearchOptions { budget: common.budget, workers: common.workers };
            let use_bnb = bnb || (!exhaustive && n > sperner_core::flat::FLAT_EXHAUSTIVE_MAX_N);
            let result = if use_bnb {
                flat_min_bnb(n, &opts, known_bound)?
            } else {
                flat_min_exact(n, FlatSearchMode::Exhaustive, &opts)?
            };
            print_result(&result, None, Some(lflat_bounds(n, 2, None)?))
        }
    }
}

fn primitive(args: PrimitiveArgs) -> Outcome {
    let file = read_family(&args.input)?;
    let k = resolve_k(args.k, &file)?;
    let cert = is_strongly_saturating(&file.family, k)?;
    if !cert.is_valid() {
        outln!("{cert}");
        return Ok(ExitCode::from(1));
    }
    let p = is_primitive(&file.family, k)?;
    outln!("separating {}", p.separating);
    match p.duplicable.witness {
        Some(x) => outln!("duplicable {x}"),
        None => outln!("duplicable none"),
    }
    for (x, cert) in &p.duplicable.failures {
        for line in cert.to_string().lines() {
            outln!("x={x} {line}");
        }
    }
    outln!("primitive {}", p.primitive);
    Ok(ExitCode::SUCCESS)
}

fn bounds(args: BoundsArgs) -> Outcome {
    let (report, json) = match args.flat {
        Some(BoundsFlat::Flat { n, l, t_low, t_high, json }) => {
            let t = match (t_low, t_high) {
                (Some(lo), Some(hi)) => {
                    Some(TuranDensity::new(Density::parse(&lo)?, Density::parse(&hi)?)?)
                }
                _ => None,
            };
            (lflat_bounds(n, l, t)?, json)
        }
        None => {
            let (Some(n), Some(k)) = (args.n, args.k) else {
                return Err(Failure::Input("bounds needs --n and --k".into()));
            };
            (bound_table(n, k)?, args.json)
        }
    };
    if json {
        outln!("{}", serde_json::to_string_pretty(&report_json(&report)).expect("json"));
    } else {
        out!("{report}");
    }
    Ok(ExitCode::SUCCESS)
}

fn value_json(v: &BoundValue) -> Value {
    match v {
        BoundValue::Exact(r) => json!({
            "kind": "exact",
            "numer": r.numer().to_string(),
            "denom": r.denom().to_string(),
            "approx": v.approx(),
        }),
        BoundValue::Irrational(x) => json!({ "kind": "irrational", "approx": x }),
        BoundValue::Symbolic => json!({ "kind": "symbolic" }),
    }
}

fn report_json(report: &BoundsReport) -> Value {
    let params = match report.params {
        Params::Sperner { n, k } => json!({ "kind": "sperner", "n": n, "k": k }),
        Params::Flat { n, l } => json!({ "kind": "flat", "n": n, "l": l }),
    };
    let entries: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "direction": e.direction.to_string(),
                "quantity": e.quantity.to_string(),
                "status": e.status.to_string(),
                "applicable": e.applicable,
                "formula": e.formula,
                "value": value_json(&e.value),
                "integer": e.integer.as_ref().map(|i| i.to_string()),
                "coefficient": e.coefficient.as_ref().map(value_json),
                "note": e.note,
            })
        })
        .collect();
    json!({ "params": params, "entries": entries })
}
