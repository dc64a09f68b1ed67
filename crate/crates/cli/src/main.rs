use std::io::{self, Write};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use ordwalk::base_change::{bump, bump_ord, bump_ord_omega, BumpCtx, BumpError, BumpTarget};
use ordwalk::fgh::{a_eval, EvalBudget, EvalOutcome, MemoContext, DEFAULT_MAX_CALLS};
use ordwalk::normal_forms::{nf_search, NfError, SearchConfig};
use ordwalk::ord_bachmann::{collapse_fs, f_descent, CollapseCtx};
use ordwalk::suites::{run, Bounds, Level, Suite, SuiteReport};
use ordwalk::terms_walks::{canonical_walk, g_of, WalkError, WalkTrace};
use ordwalk::{Nat, OrdBH, OrdE0};
use serde_json::{json, Value};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  invalid input (parse error, bad arguments, domain error)
  2  value exceeds --cutoff
  3  evaluation budget exhausted
  4  walk truncated before reaching 0
  5  verification suite failed";

#[derive(Parser)]
#[command(name = "ordwalk", version, about = "Ordinal notations, fast-growing functions and fast Goodstein walks", after_help = EXIT_CODES)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Maximum number of recursive evaluation calls per task.
    #[arg(long, global = true, env = "ORDWALK_BUDGET", default_value_t = DEFAULT_MAX_CALLS)]
    budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate A_k(ξ) for an ordinal below ε₀.
    Eval {
        #[arg(long)]
        base: u32,
        #[arg(long)]
        ordinal: String,
        /// Stop as soon as the value is known to exceed this bound.
        #[arg(long)]
        cutoff: Option<Nat>,
    },
    /// Run the canonical fast Goodstein walk from a number.
    Walk {
        #[arg(long)]
        start: Nat,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
        /// Output format for the trace; overrides --format.
        #[arg(long, value_enum)]
        emit: Option<Format>,
    },
    /// Normal-form sequence of a positive number in base k.
    Nf {
        #[arg(long)]
        base: u32,
        #[arg(long)]
        value: Nat,
        #[arg(long, default_value_t = 4)]
        height: usize,
    },
    /// Base change of a number, or of an ordinal with --ordinal.
    Bump {
        #[arg(long)]
        base: u32,
        /// Target base: a number above --base, or `w`.
        #[arg(long)]
        target: Target,
        #[arg(long, conflicts_with = "ordinal", required_unless_present = "ordinal")]
        value: Option<Nat>,
        #[arg(long)]
        ordinal: Option<String>,
    },
    /// Fundamental sequence ξ[0..=n]; with --collapse, [ξ]′1..=n on Bachmann notations.
    Fseq {
        #[arg(long)]
        ordinal: String,
        #[arg(long, default_value_t = 4)]
        n: u64,
        #[arg(long)]
        collapse: bool,
    },
    /// F(n): steps of the collapsing descent from B(Ω_n), with the trace.
    F {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1000)]
        max_steps: u64,
    },
    /// G(n): termination step of the walk from A_2(ω_n).
    G {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
    },
    /// Run a verification suite, or `all`.
    Verify {
        #[arg(long)]
        suite: SuiteArg,
        #[arg(long, default_value = "smoke")]
        level: Level,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check a seeded random subset of this many instances per suite.
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Clone, Copy)]
struct Target(BumpTarget);

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "w" | "omega" => Ok(Target(BumpTarget::Omega)),
            _ => s
                .parse()
                .map(|l| Target(BumpTarget::Finite(l)))
                .map_err(|_| format!("expected a base or `w`, got `{s}`")),
        }
    }
}

#[derive(Clone)]
enum SuiteArg {
    All,
    One(Suite),
}

impl FromStr for SuiteArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(SuiteArg::All);
        }
        s.parse().map(SuiteArg::One).map_err(|_| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            format!("unknown suite `{s}`; expected all, {}", names.join(", "))
        })
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl ToString) -> Self {
        Failure {
            code: 1,
            msg: msg.to_string(),
        }
    }
}

impl From<NfError> for Failure {
    fn from(e: NfError) -> Self {
        let code = if matches!(e, NfError::Budget(_)) {
            3
        } else {
            1
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<BumpError> for Failure {
    fn from(e: BumpError) -> Self {
        match e {
            BumpError::NormalForm(e) => e.into(),
            BumpError::Budget { .. } => Failure {
                code: 3,
                msg: e.to_string(),
            },
            e => Failure::input(e),
        }
    }
}

impl From<WalkError> for Failure {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Bump(e) => e.into(),
            WalkError::Budget(_) => Failure {
                code: 3,
                msg: e.to_string(),
            },
            e => Failure::input(e),
        }
    }
}

struct Out {
    format: Format,
    stdout: io::StdoutLock<'static>,
}

impl Out {
    fn json(&mut self, v: &Value) {
        let _ = writeln!(self.stdout, "{}", serde_json::to_string_pretty(v).unwrap());
    }

    fn line(&mut self, s: impl std::fmt::Display) {
        let _ = writeln!(self.stdout, "{s}");
    }

    fn csv(&mut self, header: &[&str], rows: &[Vec<String>]) {
        let mut w = csv::Writer::from_writer(&mut self.stdout);
        let _ = w.write_record(header);
        for r in rows {
            let _ = w.write_record(r);
        }
        let _ = w.flush();
    }

    /// Emits one record in the chosen format; `text` is used for plain output.
    fn record(&mut self, fields: &[(&str, String)], text: impl std::fmt::Display) {
        match self.format {
            Format::Text => self.line(text),
            Format::Json => {
                let obj: serde_json::Map<String, Value> = fields
                    .iter()
                    .map(|(k, v)| (k.to_string(), Value::from(v.as_str())))
                    .collect();
                self.json(&Value::Object(obj));
            }
            Format::Csv => {
                let header: Vec<&str> = fields.iter().map(|f| f.0).collect();
                self.csv(&header, &[fields.iter().map(|f| f.1.clone()).collect()]);
            }
        }
    }
}

fn parse_e0(text: &str) -> Result<OrdE0, Failure> {
    text.parse()
        .map_err(|e| Failure::input(format!("cannot parse ordinal `{text}`: {e}")))
}

fn check_base(k: u32) -> Result<(), Failure> {
    if k < 2 {
        return Err(Failure::input(format!("base must be at least 2, got {k}")));
    }
    Ok(())
}

fn search_config(budget: u64, height: usize) -> SearchConfig {
    SearchConfig {
        budget: EvalBudget::calls(budget),
        ..SearchConfig::default()
    }
    .with_height(height)
}

fn cmd_eval(
    out: &mut Out,
    budget: u64,
    k: u32,
    text: &str,
    cutoff: Option<Nat>,
) -> Result<(), Failure> {
    check_base(k)?;
    let xi = parse_e0(text)?;
    let mut b = EvalBudget::calls(budget);
    b.value_cutoff = cutoff.clone();
    let mut ctx = MemoContext::new();
    let outcome = a_eval(k, &xi, &mut ctx, &b);
    let calls = ctx.calls.to_string();
    let (kind, value) = match &outcome {
        EvalOutcome::Value(v) => ("value", v.to_string()),
        EvalOutcome::ExceedsCutoff => ("exceeds_cutoff", String::new()),
        EvalOutcome::BudgetExhausted => ("budget_exhausted", String::new()),
    };
    let text = match &outcome {
        EvalOutcome::Value(v) => v.to_string(),
        EvalOutcome::ExceedsCutoff => format!(
            "ExceedsCutoff: A_{k}({xi}) > {} ({calls} calls)",
            cutoff.unwrap()
        ),
        EvalOutcome::BudgetExhausted => format!("BudgetExhausted after {calls} calls"),
    };
    out.record(
        &[
            ("base", k.to_string()),
            ("ordinal", xi.to_string()),
            ("outcome", kind.to_owned()),
            ("value", value),
            ("calls", calls),
        ],
        text,
    );
    match outcome {
        EvalOutcome::Value(_) => Ok(()),
        EvalOutcome::ExceedsCutoff => Err(Failure {
            code: 2,
            msg: String::new(),
        }),
        EvalOutcome::BudgetExhausted => Err(Failure {
            code: 3,
            msg: String::new(),
        }),
    }
}

fn trace_rows(trace: &WalkTrace) -> Vec<Vec<String>> {
    trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                i.to_string(),
                s.base.to_string(),
                s.value.to_string(),
                s.term.as_ref().map(|t| t.to_string()).unwrap_or_default(),
                s.assigned
                    .as_ref()
                    .map(|o| o.to_string())
                    .unwrap_or_default(),
                s.calls.to_string(),
            ]
        })
        .collect()
}

fn cmd_walk(out: &mut Out, budget: u64, start: &Nat, max_steps: usize) -> Result<(), Failure> {
    let mut ctx = BumpCtx::new(search_config(budget, 4));
    let trace = canonical_walk(start, max_steps, &mut ctx);
    let header = ["step", "base", "value", "term", "ordinal", "calls"];
    match out.format {
        Format::Json => out.json(&trace.to_json()),
        Format::Csv => out.csv(&header, &trace_rows(&trace)),
        Format::Text => {
            for r in trace_rows(&trace) {
                out.line(format!(
                    "{:>4}  base {:<3} {:<12} {:<24} {}",
                    r[0], r[1], r[2], r[3], r[4]
                ));
            }
            if let Some(why) = &trace.stopped {
                out.line(format!("truncated: {why}"));
            }
        }
    }
    if trace.terminated {
        Ok(())
    } else {
        Err(Failure {
            code: 4,
            msg: String::new(),
        })
    }
}

fn cmd_nf(out: &mut Out, budget: u64, k: u32, m: &Nat, height: usize) -> Result<(), Failure> {
    check_base(k)?;
    let cert = nf_search(
        k,
        m,
        &search_config(budget, height),
        &mut MemoContext::new(),
    )?;
    let seq: Vec<String> = cert.sequence.iter().map(|x| x.to_string()).collect();
    match out.format {
        Format::Json => out.json(&cert.to_json()),
        Format::Csv => out.csv(
            &["index", "ordinal"],
            &seq.iter()
                .enumerate()
                .map(|(i, x)| vec![i.to_string(), x.clone()])
                .collect::<Vec<_>>(),
        ),
        Format::Text => out.line(seq.join(", ")),
    }
    Ok(())
}

fn cmd_bump(
    out: &mut Out,
    budget: u64,
    k: u32,
    target: BumpTarget,
    value: Option<&Nat>,
    ordinal: Option<&str>,
) -> Result<(), Failure> {
    check_base(k)?;
    let mut ctx = BumpCtx::new(search_config(budget, 4));
    let (input, result, json) = match (value, ordinal) {
        (Some(m), _) => {
            let r = bump(k, target, m, &mut ctx)?;
            (m.to_string(), r.to_string(), r.to_json())
        }
        (None, Some(text)) => {
            let xi = parse_e0(text)?;
            let r = match target {
                BumpTarget::Finite(l) => bump_ord(k, l, &xi, &mut ctx)?.to_string(),
                BumpTarget::Omega => bump_ord_omega(k, &xi, &mut ctx)?.to_string(),
            };
            (xi.to_string(), r.clone(), json!({ "ordinal": r }))
        }
        (None, None) => unreachable!("clap requires one of --value and --ordinal"),
    };
    match out.format {
        Format::Json => out.json(
            &json!({ "base": k, "target": target.to_string(), "input": input, "result": json }),
        ),
        Format::Csv => out.csv(
            &["base", "target", "input", "result"],
            &[vec![k.to_string(), target.to_string(), input, result]],
        ),
        Format::Text => out.line(result),
    }
    Ok(())
}

fn cmd_fseq(out: &mut Out, text: &str, n: u64, collapse: bool) -> Result<(), Failure> {
    let rows: Vec<(u64, String)> = if collapse {
        let xi: OrdBH = text
            .parse()
            .map_err(|e| Failure::input(format!("cannot parse `{text}`: {e}")))?;
        let mut ctx = CollapseCtx::new();
        (1..=n)
            .map(|i| collapse_fs(&xi, i, &mut ctx).map(|y| (i, y.to_string())))
            .collect::<Result<_, _>>()
            .map_err(Failure::input)?
    } else {
        let xi = parse_e0(text)?;
        (0..=n).map(|i| (i, xi.fund_seq_u(i).to_string())).collect()
    };
    match out.format {
        Format::Json => out.json(&json!({
            "ordinal": text,
            "collapse": collapse,
            "terms": rows.iter().map(|(i, x)| json!({ "n": i, "value": x })).collect::<Vec<_>>(),
        })),
        Format::Csv => out.csv(
            &["n", "value"],
            &rows
                .iter()
                .map(|(i, x)| vec![i.to_string(), x.clone()])
                .collect::<Vec<_>>(),
        ),
        Format::Text => {
            for (i, x) in rows {
                out.line(format!("{i}: {x}"));
            }
        }
    }
    Ok(())
}

fn cmd_f(out: &mut Out, n: u32, max_steps: u64) -> Result<(), Failure> {
    let d = f_descent(n, max_steps).map_err(Failure::input)?;
    let states: Vec<Vec<String>> = d
        .states
        .iter()
        .map(|s| vec![s.step_index.to_string(), s.current.to_string()])
        .collect();
    match out.format {
        Format::Json => out.json(&json!({
            "n": n,
            "value": d.value.map(|v| v.to_string()),
            "states": states.iter().map(|s| json!({ "i": s[0], "ordinal": s[1] })).collect::<Vec<_>>(),
        })),
        Format::Csv => out.csv(&["i", "ordinal"], &states),
        Format::Text => {
            match d.value {
                Some(v) => out.line(format!("F({n}) = {v}")),
                None => out.line(format!("F({n}) not reached within {max_steps} steps")),
            }
            for s in &states {
                out.line(format!("  {}: {}", s[0], s[1]));
            }
        }
    }
    if d.value.is_none() {
        return Err(Failure {
            code: 3,
            msg: String::new(),
        });
    }
    Ok(())
}

fn cmd_g(out: &mut Out, budget: u64, n: u32, max_steps: usize) -> Result<(), Failure> {
    let mut ctx = BumpCtx::new(search_config(budget, 4));
    let g = g_of(n, max_steps, &mut ctx)?;
    out.record(
        &[("n", n.to_string()), ("value", g.to_string())],
        format!("G({n}) = {g}"),
    );
    Ok(())
}

fn cmd_verify(
    out: &mut Out,
    budget: u64,
    suite: SuiteArg,
    level: Level,
    seed: u64,
    sample: Option<usize>,
) -> Result<(), Failure> {
    let mut bounds = Bounds::for_level(level);
    bounds.seed = seed;
    bounds.sample = sample;
    bounds.max_calls = bounds.max_calls.min(budget);
    let suites: Vec<Suite> = match suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::One(s) => vec![s],
    };
    let reports: Vec<SuiteReport> = suites.into_iter().map(|s| run(s, &bounds)).collect();
    match out.format {
        Format::Json => out.json(&Value::Array(
            reports.iter().map(SuiteReport::to_json).collect(),
        )),
        Format::Csv => out.csv(
            &["suite", "passed", "checked", "undecided", "failures"],
            &reports
                .iter()
                .map(|r| {
                    vec![
                        r.suite.to_string(),
                        r.passed().to_string(),
                        r.checked.to_string(),
                        r.undecided.to_string(),
                        r.failures.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Text => {
            for r in &reports {
                out.line(r);
            }
        }
    }
    if reports.iter().all(SuiteReport::passed) {
        Ok(())
    } else {
        Err(Failure {
            code: 5,
            msg: String::new(),
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut out = Out {
        format: cli.format,
        stdout: io::stdout().lock(),
    };
    let budget = cli.budget;
    let result = match cli.command {
        Command::Eval {
            base,
            ordinal,
            cutoff,
        } => cmd_eval(&mut out, budget, base, &ordinal, cutoff),
        Command::Walk {
            start,
            max_steps,
            emit,
        } => {
            if let Some(f) = emit {
                out.format = f;
            }
            cmd_walk(&mut out, budget, &start, max_steps)
        }
        Command::Nf {
            base,
            value,
            height,
        } => cmd_nf(&mut out, budget, base, &value, height),
        Command::Bump {
            base,
            target,
            value,
            ordinal,
        } => cmd_bump(
            &mut out,
            budget,
            base,
            target.0,
            value.as_ref(),
            ordinal.as_deref(),
        ),
        Command::Fseq {
            ordinal,
            n,
            collapse,
        } => cmd_fseq(&mut out, &ordinal, n, collapse),
        Command::F { n, max_steps } => cmd_f(&mut out, n, max_steps),
        Command::G { n, max_steps } => cmd_g(&mut out, budget, n, max_steps),
        Command::Verify {
            suite,
            level,
            seed,
            sample,
        } => cmd_verify(&mut out, budget, suite, level, seed, sample),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.msg.is_empty() {
                eprintln!("error: {}", f.msg);
            }
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets() {
        assert_eq!("w".parse::<Target>().unwrap().0, BumpTarget::Omega);
        assert_eq!("4".parse::<Target>().unwrap().0, BumpTarget::Finite(4));
        assert!("x".parse::<Target>().is_err());
    }

    #[test]
    fn suite_names() {
        assert!(matches!("all".parse::<SuiteArg>(), Ok(SuiteArg::All)));
        assert!(matches!(
            "ceil".parse::<SuiteArg>(),
            Ok(SuiteArg::One(Suite::Ceil))
        ));
        assert!("ceiling".parse::<SuiteArg>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
