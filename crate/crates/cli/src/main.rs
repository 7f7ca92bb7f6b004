//! `modcong`: expansions, identity checks and congruence scans from the
//! command line.
//!
//! Exit codes: 0 pass, 1 mathematical failure, 2 usage error, 3 budget or
//! computation error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modcong::congruence::{
    scan, CoefficientTable, CongruenceReport, CongruenceTask, FilterMode, PrimeSelection, SourceId, Verdict,
};
use modcong::expansion::{expand_entry, verify_differential_identity, IdentityVerdict};
use modcong::modforms::{Registry, RegistryEntry};
use modcong::selftest::run_all;
use modcong::sequences::{closed_form_range, ClosedFormId};
use modcong::Error;
use serde_json::json;

const OUT_DIR_VAR: &str = "MODCONG_OUT_DIR";

#[derive(Parser)]
#[command(name = "modcong", version, about = "Exact t-expansions and congruence scans for Apery-like sequences")]
struct Cli {
    /// TOML file overriding fields of the built-in registry.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Output file. Defaults to stdout, or to a file in $MODCONG_OUT_DIR.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Expand an entry's f in powers of its t.
    Expand {
        #[arg(long)]
        entry: String,
        #[arg(long = "maxN", alias = "max-n", default_value_t = 240)]
        max_n: usize,
    },
    /// Check f (q dt/dq) / t = M coefficient by coefficient.
    Verify {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        entry: Vec<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 300)]
        order: i64,
    },
    /// Scan A(n p^r) = A(n p^(r-1)) mod p^(s r).
    Check(CheckArgs),
    /// Run the acceptance suite.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
    /// Print closed-form values A(from..=to).
    Dump {
        #[arg(long = "closed-form")]
        closed_form: String,
        #[arg(long, default_value_t = 0)]
        from: u64,
        #[arg(long, default_value_t = 30)]
        to: u64,
    },
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, conflicts_with = "closed_form", required_unless_present = "closed_form")]
    entry: Option<String>,
    /// Scan a closed form instead of a t-expansion.
    #[arg(long = "closed-form")]
    closed_form: Option<String>,
    #[arg(long, value_delimiter = ',', conflicts_with = "prime_bound")]
    primes: Vec<u64>,
    /// Scan every prime up to this bound.
    #[arg(long = "prime-bound")]
    prime_bound: Option<u64>,
    #[arg(long, default_value_t = 1)]
    rmax: u32,
    #[arg(long, default_value_t = 10)]
    nmax: u64,
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// default, all_primes, or a character token such as chi7.
    #[arg(long, default_value = "default")]
    filter: String,
    /// Largest coefficient index computed.
    #[arg(long = "maxN", alias = "max-n", default_value_t = 240)]
    max_n: u64,
    /// Fail with exit 3 instead of skipping cells beyond the budget.
    #[arg(long)]
    strict: bool,
}

enum Failure {
    Math(String),
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownEntry(_)
            | Error::UnknownClosedForm(_)
            | Error::UnknownCharacter(_)
            | Error::Parse(_)
            | Error::Config(_)
            | Error::NotPrime(_)
            | Error::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Budget(e.to_string()),
        }
    }
}

/// Text to emit and whether the mathematical checks passed.
struct Output {
    body: String,
    passed: bool,
    failure: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let registry = match &cli.registry {
        Some(path) => Registry::with_override_file(path)?,
        None => Registry::builtin(),
    };
    let (name, out) = match &cli.command {
        Command::Expand { entry, max_n } => {
            let e = registry.lookup(entry)?;
            (format!("expand-{}", e.id), cmd_expand(e, *max_n, cli.format)?)
        }
        Command::Verify { entry, all, order } => {
            let entries: Vec<&RegistryEntry> = if *all {
                registry.entries().iter().collect()
            } else {
                entry.iter().map(|id| registry.lookup(id)).collect::<Result<_, _>>()?
            };
            if *order < 1 {
                return Err(Failure::Usage("--order must be positive".into()));
            }
            ("verify".to_string(), cmd_verify(&entries, *order, cli.format)?)
        }
        Command::Check(args) => {
            let (entry, source) = match (&args.entry, &args.closed_form) {
                (Some(id), _) => {
                    let e = registry.lookup(id)?;
                    (e, SourceId::Entry(e.id))
                }
                (None, Some(cf)) => {
                    let cf: ClosedFormId = cf.parse()?;
                    (registry.get(cf.entry()), SourceId::ClosedForm(cf))
                }
                (None, None) => unreachable!("clap requires one of --entry, --closed-form"),
            };
            (format!("check-{source}").replace(':', "-"), cmd_check(entry, source, args, cli.format)?)
        }
        Command::Selftest { quick } => ("selftest".to_string(), cmd_selftest(*quick, cli.format)),
        Command::Dump { closed_form, from, to } => {
            let cf: ClosedFormId = closed_form.parse()?;
            (format!("dump-{cf}"), cmd_dump(cf, *from, *to, cli.format)?)
        }
    };
    emit(cli, &name, &out.body)?;
    match (out.passed, out.failure) {
        (true, _) => Ok(()),
        (false, reason) => Err(Failure::Math(reason.unwrap_or_else(|| "check failed".into()))),
    }
}

fn emit(cli: &Cli, name: &str, body: &str) -> Result<(), Failure> {
    let path = match (&cli.output, std::env::var_os(OUT_DIR_VAR)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(Path::new(&dir).join(format!("{name}.{}", cli.format.extension()))),
        (None, None) => None,
    };
    match path {
        Some(p) => std::fs::write(&p, body).map_err(|e| Failure::Usage(format!("writing {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn json_body(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_body(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Budget(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Budget(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn cmd_expand(entry: &RegistryEntry, max_n: usize, format: Format) -> Result<Output, Failure> {
    let e = expand_entry(entry, max_n)?;
    let body = match format {
        Format::Json => json_body(&e.to_json()),
        Format::Csv => csv_body(
            &["entry", "n", "A"],
            e.coefficients.iter().enumerate().map(|(n, a)| vec![entry.id.to_string(), n.to_string(), a.to_string()]),
        )?,
        Format::Text => {
            let v: Vec<String> = e.coefficients.iter().map(|a| a.to_string()).collect();
            format!("{}\n", v.join(" "))
        }
    };
    Ok(Output { body, passed: true, failure: None })
}

fn cmd_verify(entries: &[&RegistryEntry], order: i64, format: Format) -> Result<Output, Failure> {
    let mut verdicts = Vec::new();
    for e in entries {
        verdicts.push((e.id, verify_differential_identity(e, order)?));
    }
    let failure = verdicts.iter().find_map(|(id, v)| match v {
        IdentityVerdict::Mismatch { exponent, .. } => Some(format!("{id}: identity fails at q^{exponent}")),
        IdentityVerdict::Pass { .. } => None,
    });
    let body = match format {
        Format::Json => json_body(&json!({
            "order": order,
            "results": verdicts.iter().map(|(id, v)| json!({"entry": id, "result": v})).collect::<Vec<_>>(),
        })),
        Format::Csv => csv_body(
            &["entry", "order", "verdict", "exponent", "lhs", "rhs"],
            verdicts.iter().map(|(id, v)| match v {
                IdentityVerdict::Pass { order } => {
                    vec![id.to_string(), order.to_string(), "pass".into(), String::new(), String::new(), String::new()]
                }
                IdentityVerdict::Mismatch { exponent, lhs, rhs } => vec![
                    id.to_string(),
                    order.to_string(),
                    "mismatch".into(),
                    exponent.to_string(),
                    lhs.clone(),
                    rhs.clone(),
                ],
            }),
        )?,
        Format::Text => verdicts
            .iter()
            .map(|(id, v)| match v {
                IdentityVerdict::Pass { order } => format!("{:>5}  pass through q^{order}\n", id.to_string()),
                IdentityVerdict::Mismatch { exponent, lhs, rhs } => {
                    format!("{:>5}  mismatch at q^{exponent}: lhs {lhs}, rhs {rhs}\n", id.to_string())
                }
            })
            .collect(),
    };
    Ok(Output { body, passed: failure.is_none(), failure })
}

fn cmd_check(entry: &RegistryEntry, source: SourceId, args: &CheckArgs, format: Format) -> Result<Output, Failure> {
    let primes = match (args.prime_bound, args.primes.is_empty()) {
        (Some(b), _) => PrimeSelection::UpTo(b),
        (None, false) => PrimeSelection::List(args.primes.clone()),
        (None, true) => return Err(Failure::Usage("give --primes or --prime-bound".into())),
    };
    if args.max_n == 0 || args.rmax == 0 || args.nmax == 0 {
        return Err(Failure::Usage("--maxN, --rmax and --nmax must be positive".into()));
    }
    let mut task = CongruenceTask::new(source, primes, args.rmax, args.nmax, args.s);
    task.filter_mode = args.filter.parse::<FilterMode>()?;
    task.clip = !args.strict;
    let needed = task.max_index().unwrap_or(u64::MAX);
    if args.strict && needed > args.max_n {
        return Err(Failure::Budget(format!(
            "grid needs A({needed}) but the budget is --maxN {}",
            args.max_n
        )));
    }
    let cap = needed.min(args.max_n) as usize;
    let table = match source {
        SourceId::Entry(_) => CoefficientTable::from_entry(entry, cap)?,
        SourceId::ClosedForm(cf) => CoefficientTable::from_closed_form(cf, cap)?,
    };
    let report = scan(&task, entry, &table)?;
    let failure = report
        .failures()
        .next()
        .map(|c| format!("{source}: congruence fails at p = {}, r = {}, n = {}", c.p, c.r, c.n));
    let body = match format {
        Format::Json => json_body(&report.to_json()),
        Format::Csv => report.to_csv()?,
        Format::Text => check_text(&report),
    };
    Ok(Output { body, passed: report.passed(), failure })
}

fn check_text(report: &CongruenceReport) -> String {
    let t = &report.task;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}: A(n p^r) = A(n p^(r-1)) mod p^({} r), filter {}, coefficients through A({})",
        t.source, t.s, t.filter_mode, report.index_cap
    );
    let _ = writeln!(s, "{:>5} {:>3} {:>5}  verdict", "p", "r", "n");
    for c in &report.cells {
        let detail = match &c.verdict {
            Verdict::Pass => "pass".to_string(),
            Verdict::Fail { residue_a, residue_b } => format!("FAIL  {residue_a} vs {residue_b}"),
            Verdict::Filtered { reason } => format!("filtered ({reason})"),
        };
        let _ = writeln!(s, "{:>5} {:>3} {:>5}  {detail}", c.p, c.r, c.n);
    }
    let m = &report.summary;
    let _ = writeln!(
        s,
        "pass {}, fail {}, filtered {}, beyond budget {}",
        m.pass, m.fail, m.filtered, m.beyond_budget
    );
    s
}

fn cmd_selftest(quick: bool, format: Format) -> Output {
    let outcomes = run_all(quick);
    let failure = outcomes
        .iter()
        .find(|o| !o.passed)
        .map(|o| format!("criterion {} ({}) failed: {}", o.number, o.title, o.detail));
    let body = match format {
        Format::Json => json_body(&json!(outcomes
            .iter()
            .map(|o| json!({
                "criterion": o.number,
                "title": o.title,
                "passed": o.passed,
                "detail": o.detail,
                "seconds": o.elapsed.as_secs_f64(),
            }))
            .collect::<Vec<_>>())),
        Format::Csv | Format::Text => outcomes.iter().map(|o| format!("{o}\n")).collect(),
    };
    Output { body, passed: failure.is_none(), failure }
}

fn cmd_dump(cf: ClosedFormId, from: u64, to: u64, format: Format) -> Result<Output, Failure> {
    if from > to {
        return Err(Failure::Usage("--from must not exceed --to".into()));
    }
    let values = closed_form_range(cf, to)?;
    let rows = (from..=to).map(|n| (n, &values[n as usize]));
    let body = match format {
        Format::Json => json_body(&json!({
            "closed_form": cf.token(),
            "from": from,
            "to": to,
            "values": rows.map(|(_, v)| v.to_string()).collect::<Vec<_>>(),
        })),
        Format::Csv => csv_body(&["closed_form", "n", "A"], rows.map(|(n, v)| vec![cf.to_string(), n.to_string(), v.to_string()]))?,
        Format::Text => {
            let v: Vec<String> = rows.map(|(_, v)| v.to_string()).collect();
            format!("{}\n", v.join(" "))
        }
    };
    Ok(Output { body, passed: true, failure: None })
}
