//! The `qcoeff` command-line tool.
//!
//! Exit codes: 0 success, 1 a check found counterexamples, 2 usage or parse
//! error, 3 non-invertible denominator, 4 residue mismatch, 5 internal
//! consistency failure (non-integral value or engines disagreeing).

use std::io::Write;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arith::{reduce_mod, Rational};
use crate::congruence::{scan_family, trace_proof_step, CongruenceFamily, MODULUS};
use crate::error::{Error, Result};
use crate::expand::{
    expand_lemma, expand_oracle, expand_sparse, partition_expansion, sparse_term_count, tau_values,
    verify_jacobi_identity, verify_lemma_identity, verify_sigma_identity,
    verify_tau_partition_identity, SeriesExpansion,
};
use crate::output::{Format, OutputRecord};
use crate::report::VerificationReport;

pub const MAX_ORDER_VAR: &str = "QCOEFF_MAX_ORDER";
pub const DEFAULT_MAX_ORDER: usize = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "qcoeff",
    version,
    about = "Exact coefficients of powers of the partition generating function"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "human")]
    pub format: Format,

    /// Omit the timestamp and wall-clock timings so output is reproducible.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print P_r(0..=order).
    Expand(ExpandArgs),
    /// Check a mod-5 congruence family for one exponent.
    Verify(VerifyArgs),
    /// Print Ramanujan's tau(1..=n_max).
    Tau(TauArgs),
    /// Decompose n P_r(n) into the terms of the sparse recurrence.
    Trace(TraceArgs),
    /// Check the convolution identities exactly.
    CheckIdentities(CheckArgs),
    /// Time the engines against each other.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Sparse,
    Lemma,
    Oracle,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Exponent, as an integer or a fraction a/b.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Rational,
    #[arg(long)]
    pub order: usize,
    /// Reduce every coefficient modulo this number.
    #[arg(long = "mod")]
    pub modulus: Option<u64>,
    #[arg(long, value_enum, default_value = "sparse")]
    pub engine: EngineChoice,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// One of 5m+4, 5m+1, 5m+2, 5m+3, or "all" to pick the family matching r.
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Rational,
    #[arg(long)]
    pub m_max: usize,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    #[arg(long)]
    pub n_max: u64,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    Lemma,
    Sigma,
    Taup,
    Jacobi,
    All,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub which: Identity,
    #[arg(long)]
    pub order: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub order: usize,
    #[arg(long, default_value_t = 1)]
    pub repeats: u32,
}

/// Exponent pairs `(r, s)` checked by `check-identities --which lemma`.
pub const LEMMA_PAIRS: [(&str, &str); 5] = [
    ("2", "1"),
    ("-24", "1"),
    ("1/2", "-3"),
    ("7/3", "5/2"),
    ("-5/6", "4"),
];

struct Context {
    format: Format,
    timestamps: bool,
    max_order: usize,
}

impl Context {
    fn check_order(&self, order: usize) -> Result<()> {
        if order > self.max_order {
            Err(Error::Domain(format!(
                "order {order} exceeds the cap {} (set {MAX_ORDER_VAR} to raise it)",
                self.max_order
            )))
        } else {
            Ok(())
        }
    }

    fn record(&self, title: &str, columns: &[&str]) -> OutputRecord {
        let mut rec = OutputRecord::new(title, columns);
        if self.timestamps {
            let now = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .unwrap_or_default();
            rec.meta("timestamp", now.as_secs());
        }
        rec
    }

    fn millis(&self, d: Duration) -> String {
        if self.timestamps {
            format!("{:.3}", d.as_secs_f64() * 1e3)
        } else {
            "-".into()
        }
    }
}

/// Reads the order cap from the environment.
pub fn max_order_from_env() -> std::result::Result<usize, String> {
    match std::env::var(MAX_ORDER_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{MAX_ORDER_VAR} must be a non-negative integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_MAX_ORDER),
    }
}

/// Parses `args` (including the program name), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, max_order: usize, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let ctx = Context {
        format: cli.format,
        timestamps: !cli.no_timestamp,
        max_order,
    };
    match dispatch(&ctx, &cli.command) {
        Ok((record, code)) => {
            if let Err(e) = record.write(ctx.format, out) {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(ctx: &Context, command: &Command) -> Result<(OutputRecord, i32)> {
    match command {
        Command::Expand(a) => cmd_expand(ctx, a).map(|r| (r, 0)),
        Command::Verify(a) => cmd_verify(ctx, a),
        Command::Tau(a) => cmd_tau(ctx, a).map(|r| (r, 0)),
        Command::Trace(a) => cmd_trace(ctx, a),
        Command::CheckIdentities(a) => cmd_check_identities(ctx, a),
        Command::Bench(a) => cmd_bench(ctx, a).map(|r| (r, 0)),
    }
}

fn expansion_for(r: &Rational, order: usize, engine: EngineChoice) -> Result<SeriesExpansion> {
    match engine {
        EngineChoice::Sparse => expand_sparse(r, order),
        EngineChoice::Lemma if r.is_zero() => expand_sparse(r, order),
        EngineChoice::Lemma => {
            expand_lemma(r, &Rational::one(), &partition_expansion(order), order)
        }
        EngineChoice::Oracle => expand_oracle(r, order),
    }
}

fn cmd_expand(ctx: &Context, args: &ExpandArgs) -> Result<OutputRecord> {
    ctx.check_order(args.order)?;
    if let Some(m) = args.modulus {
        if m < 2 {
            return Err(Error::Domain(format!("--mod must be at least 2, got {m}")));
        }
    }
    let expansion = expansion_for(&args.r, args.order, args.engine)?;
    let mut rec = ctx.record("expand", &["n", "value"]);
    rec.meta("engine", expansion.engine())
        .meta("r", &args.r)
        .meta("order", args.order);
    if let Some(m) = args.modulus {
        rec.meta("mod", m);
    }
    for (n, c) in expansion.coefficients().iter().enumerate() {
        let value = match args.modulus {
            Some(m) => reduce_mod(c, m).map_err(|e| e.at(n))?.value().to_string(),
            None => c.to_string(),
        };
        rec.row(vec![n.to_string(), value]);
    }
    Ok(rec)
}

fn verification_row(rec: &mut OutputRecord, report: &VerificationReport) {
    for c in &report.counterexamples {
        rec.row(vec![c.index.to_string(), c.observed.to_string()]);
    }
}

fn cmd_verify(ctx: &Context, args: &VerifyArgs) -> Result<(OutputRecord, i32)> {
    let family = if args.family == "all" {
        CongruenceFamily::for_exponent(&args.r)?.ok_or_else(|| Error::NoMatchingFamily {
            r: args.r.to_string(),
            r_residue: reduce_mod(&args.r, MODULUS)
                .map(|x| x.value())
                .unwrap_or_default(),
            modulus: MODULUS,
        })?
    } else {
        args.family.parse::<CongruenceFamily>()?
    };
    // Fail fast on a residue mismatch before paying for the expansion.
    let r_residue = reduce_mod(&args.r, family.modulus())?;
    if r_residue != family.r_residue() {
        return Err(Error::ResidueMismatch {
            r: args.r.to_string(),
            r_residue: r_residue.value(),
            required: family.r_residue().value(),
            modulus: family.modulus(),
        });
    }
    let order = family.modulus() as usize * args.m_max + family.n_residue().value() as usize;
    ctx.check_order(order)?;

    let start = Instant::now();
    let expansion = expand_sparse(&args.r, order)?;
    let report = scan_family(&family, &args.r, args.m_max, &expansion)?;
    let total = start.elapsed();

    let mut rec = ctx.record("verify", &["n", "residue"]);
    rec.meta("family", family.label())
        .meta("r", &args.r)
        .meta("r_residue", r_residue.value())
        .meta("m_max", args.m_max)
        .meta("engine", &report.engine);
    verification_row(&mut rec, &report);
    rec.summary(
        "checked",
        format!("m = {}..={}", report.range.0, report.range.1),
    )
    .summary("counterexamples", report.counterexamples.len())
    .summary("result", if report.passed() { "pass" } else { "FAIL" });
    if ctx.timestamps {
        rec.summary("elapsed_ms", ctx.millis(total));
    }
    Ok((rec, if report.passed() { 0 } else { 1 }))
}

fn cmd_tau(ctx: &Context, args: &TauArgs) -> Result<OutputRecord> {
    if args.n_max < 1 {
        return Err(Error::Domain("--n-max must be at least 1".into()));
    }
    ctx.check_order(args.n_max as usize - 1)?;
    let values = tau_values(args.n_max)?;
    let mut rec = ctx.record("tau", &["n", "tau"]);
    rec.meta("engine", "sparse").meta("n_max", args.n_max);
    for (i, v) in values.iter().enumerate() {
        rec.row(vec![(i + 1).to_string(), v.to_string()]);
    }
    Ok(rec)
}

fn cmd_trace(ctx: &Context, args: &TraceArgs) -> Result<(OutputRecord, i32)> {
    if args.n < 1 {
        return Err(Error::Domain("--n must be at least 1".into()));
    }
    ctx.check_order(args.n as usize)?;
    // Surface a bad denominator before expanding.
    reduce_mod(&args.r, MODULUS)?;
    let expansion = expand_sparse(&args.r, args.n as usize)?;
    let trace = trace_proof_step(args.n, &args.r, &expansion)?;

    let mut rec = ctx.record(
        "trace",
        &[
            "j",
            "T_j",
            "sign",
            "factor",
            "factor_mod5",
            "case",
            "argument",
        ],
    );
    rec.meta("n", args.n)
        .meta("r", &args.r)
        .meta("engine", expansion.engine());
    for t in &trace.terms {
        rec.row(vec![
            t.j.to_string(),
            t.triangular.to_string(),
            if t.sign > 0 { "+".into() } else { "-".into() },
            t.factor.to_string(),
            t.factor_residue.value().to_string(),
            t.case.to_string(),
            t.argument_index.to_string(),
        ]);
    }
    rec.summary(
        "n_P_r(n)",
        expansion.coefficient(args.n as usize).scale(&args.n.into()),
    )
    .summary(
        "reconstruction",
        if trace.reconstructs { "holds" } else { "FAILS" },
    );
    let classification_ok = trace.classification_holds != Some(false);
    rec.summary(
        "classification",
        match trace.classification_holds {
            Some(true) => "holds",
            Some(false) => "FAILS",
            None => "n/a",
        },
    );
    Ok((
        rec,
        if trace.reconstructs && classification_ok {
            0
        } else {
            1
        },
    ))
}

/// An integer exponent goes through the product oracle, anything else through
/// the sparse engine, so each side of the lemma check has its own route.
fn independent_expansion(r: &Rational, order: usize) -> Result<SeriesExpansion> {
    match r.to_integer() {
        Some(_) => expand_oracle(r, order),
        None => expand_sparse(r, order),
    }
}

fn cmd_check_identities(ctx: &Context, args: &CheckArgs) -> Result<(OutputRecord, i32)> {
    if args.order < 1 {
        return Err(Error::Domain("--order must be at least 1".into()));
    }
    ctx.check_order(args.order)?;
    let n = args.order;
    let run_lemma = || -> Result<Vec<(String, VerificationReport)>> {
        LEMMA_PAIRS
            .iter()
            .map(|(r, s)| {
                let (r, s): (Rational, Rational) = (r.parse()?, s.parse()?);
                let exp_r = expand_sparse(&r, n)?;
                let exp_s = independent_expansion(&s, n)?;
                Ok((
                    format!("lemma r={r} s={s}"),
                    verify_lemma_identity(&r, &s, &exp_r, &exp_s, n)?,
                ))
            })
            .collect()
    };
    let mut reports = Vec::new();
    let all = args.which == Identity::All;
    if all || args.which == Identity::Jacobi {
        reports.push(("jacobi".to_string(), verify_jacobi_identity(n)?));
    }
    if all || args.which == Identity::Lemma {
        reports.extend(run_lemma()?);
    }
    if all || args.which == Identity::Sigma {
        reports.push(("sigma".to_string(), verify_sigma_identity(n)?));
    }
    if all || args.which == Identity::Taup {
        reports.push(("taup".to_string(), verify_tau_partition_identity(n)?));
    }

    let mut rec = ctx.record(
        "check-identities",
        &["identity", "range", "counterexamples", "first", "result"],
    );
    rec.meta("which", format!("{:?}", args.which).to_lowercase())
        .meta("order", n);
    for (name, report) in &reports {
        rec.row(vec![
            name.clone(),
            format!("{}..={}", report.range.0, report.range.1),
            report.counterexamples.len().to_string(),
            report
                .counterexamples
                .first()
                .map(|c| c.index.to_string())
                .unwrap_or_else(|| "-".into()),
            if report.passed() {
                "pass".into()
            } else {
                "FAIL".into()
            },
        ]);
    }
    let passed = reports.iter().all(|(_, r)| r.passed());
    rec.summary("result", if passed { "pass" } else { "FAIL" });
    Ok((rec, if passed { 0 } else { 1 }))
}

fn first_disagreement(a: &SeriesExpansion, b: &SeriesExpansion) -> Result<()> {
    match a
        .coefficients()
        .iter()
        .zip(b.coefficients())
        .position(|(x, y)| x != y)
    {
        None => Ok(()),
        Some(i) => Err(Error::AgreementFailure {
            index: i,
            left: a.coefficient(i).to_string(),
            right: b.coefficient(i).to_string(),
            left_engine: a.engine().to_string(),
            right_engine: b.engine().to_string(),
        }),
    }
}

fn cmd_bench(ctx: &Context, args: &BenchArgs) -> Result<OutputRecord> {
    if args.order < 1 {
        return Err(Error::Domain("--order must be at least 1".into()));
    }
    ctx.check_order(args.order)?;
    let n = args.order;
    let one = Rational::one();
    let base = partition_expansion(n);

    let timed = |f: &dyn Fn() -> Result<SeriesExpansion>| -> Result<(SeriesExpansion, Duration)> {
        let mut best = Duration::MAX;
        let mut last = None;
        for _ in 0..args.repeats.max(1) {
            let start = Instant::now();
            let e = f()?;
            best = best.min(start.elapsed());
            last = Some(e);
        }
        Ok((last.expect("at least one repeat"), best))
    };
    let (sparse, t_sparse) = timed(&|| expand_sparse(&one, n))?;
    let (lemma, t_lemma) = timed(&|| expand_lemma(&one, &one, &base, n))?;
    let (oracle, t_oracle) = timed(&|| expand_oracle(&one, n))?;
    first_disagreement(&sparse, &lemma)?;
    first_disagreement(&sparse, &oracle)?;

    let expected_sparse = sparse_term_count(n);
    if sparse.terms() != expected_sparse {
        return Err(Error::Domain(format!(
            "sparse engine evaluated {} terms, expected {expected_sparse}",
            sparse.terms()
        )));
    }
    let naive = (n as u64) * (n as u64 + 1) / 2;

    let mut rec = ctx.record("bench", &["engine", "terms", "best_ms"]);
    rec.meta("r", 1)
        .meta("order", n)
        .meta("repeats", args.repeats.max(1));
    for (e, t) in [(&sparse, t_sparse), (&lemma, t_lemma), (&oracle, t_oracle)] {
        rec.row(vec![
            e.engine().to_string(),
            e.terms().to_string(),
            ctx.millis(t),
        ]);
    }
    rec.summary("agreement", "all engines agree")
        .summary("sparse_terms_expected", expected_sparse)
        .summary("naive_terms", naive)
        .summary(
            "sparse_over_naive",
            format!("{:.6}", expected_sparse as f64 / naive as f64),
        );
    Ok(rec)
}
