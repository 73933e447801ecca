mod dump;

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gubs::logic::{LogicError, OracleBudget};
use gubs::semantics::{dependence_formula_set, interpret, normalize};
use gubs::syntax::{parse_program, render_program, ParseError, Program};
use gubs::synthesis::{
    check_derivation, check_inclusion, minimality_oracle, observability, synthesize,
    Derivation, Library, Mode, Observability, SearchBudget, SynthesisError, TableauBudgetSpec,
    Verdict,
};
use gubs::traces::{
    consistent_histories, rank_histories, render_timeline, ChronologicalDivision, Trace,
};

#[derive(Parser, Debug)]
#[command(name = "gubsc", version, about = "Check, compare and synthesize GUBS programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Decision procedure for semantic questions.
    #[arg(long, value_enum, default_value_t = ModeArg::Tableau, global = true)]
    mode: ModeArg,
    /// Largest model size tried by the oracle.
    #[arg(long, default_value_t = 3, global = true)]
    bound: usize,
    /// Work limit: tableau nodes, oracle conflicts or search options.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Output file (SVG for `trace`, derivation JSON for `synth`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a program and print its syntax tree.
    Parse { file: PathBuf },
    /// Print the formula a program stands for.
    Interpret { file: PathBuf },
    /// Decide whether some model validates the program.
    Check { file: PathBuf },
    /// Decide whether the first program is behaviourally included in the second.
    Include { smaller: PathBuf, larger: PathBuf },
    /// Select library components that implement a goal.
    Synth {
        goal: PathBuf,
        library: PathBuf,
        /// Also run the exhaustive search for the smallest assembly.
        #[arg(long)]
        minimal: bool,
    },
    /// Check a derivation node by node.
    Verify {
        derivation: PathBuf,
        library: PathBuf,
        goal: PathBuf,
    },
    /// Histories of a trace consistent with a program.
    Trace {
        trace: PathBuf,
        program: PathBuf,
        /// Observation spot the last period must satisfy.
        label: String,
        /// Report on this division only, e.g. `1,3,6,7`.
        #[arg(long, value_delimiter = ',')]
        division: Option<Vec<usize>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Tableau,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// What a command concluded; drives the exit code.
enum Outcome {
    Positive,
    Negative,
}

struct Ctx {
    mode: Mode,
    search: SearchBudget,
    format: Format,
    out: Option<PathBuf>,
    color: bool,
}

impl Ctx {
    fn from(cli: &Cli) -> Result<Ctx> {
        if cli.bound == 0 {
            bail!("--bound must be at least 1");
        }
        if cli.budget == Some(0) {
            bail!("--budget must be positive");
        }
        let mode = match cli.mode {
            ModeArg::Tableau => {
                let mut spec = TableauBudgetSpec::default();
                if let Some(n) = cli.budget {
                    spec.max_nodes = n;
                }
                Mode::Tableau(spec)
            }
            ModeArg::Oracle => Mode::Oracle {
                bound: cli.bound,
                max_conflicts: cli.budget.map_or(OracleBudget::default().max_conflicts, |n| n as u64),
            },
        };
        let mut search = SearchBudget::default();
        if let Some(n) = cli.budget {
            search.max_options = n;
        }
        Ok(Ctx {
            mode,
            search,
            format: cli.format,
            out: cli.out.clone(),
            color: std::env::var_os("GUBSC_NO_COLOR").is_none() && std::io::stdout().is_terminal(),
        })
    }

    fn verdict(&self, word: &str, good: bool) -> String {
        if !self.color {
            return word.to_string();
        }
        let code = if good { "32" } else { "31" };
        format!("\x1b[1;{code}m{word}\x1b[0m")
    }

    fn emit(&self, text: &str, value: Value) {
        match self.format {
            Format::Text => print!("{text}"),
            Format::Json => {
                println!("{}", serde_json::to_string_pretty(&value).expect("plain data"))
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_program(path: &Path) -> Result<Program> {
    let text = read(path)?;
    parse_program(&text).map_err(|e| match &e {
        ParseError::Syntax(s) => {
            anyhow::anyhow!("{}:{e}\n{}", path.display(), s.caret(&text))
        }
        _ => anyhow::anyhow!("{}: {e}", path.display()),
    })
}

fn load_library(path: &Path) -> Result<Library> {
    Library::from_json(&read(path)?).with_context(|| format!("library {}", path.display()))
}

fn cmd_parse(ctx: &Ctx, file: &Path) -> Result<Outcome> {
    let p = load_program(file)?;
    ctx.emit(&dump::tree(&p), serde_json::to_value(&p)?);
    Ok(Outcome::Positive)
}

fn cmd_interpret(ctx: &Ctx, file: &Path) -> Result<Outcome> {
    let p = load_program(file)?;
    let f = interpret(&p)?;
    let nf = normalize(&p);
    let deps: Vec<String> = dependence_formula_set(&p).iter().map(|f| f.canonical()).collect();
    ctx.emit(
        &format!("{}\n", f.canonical()),
        json!({
            "formula": f.canonical(),
            "dependences": deps,
            "warnings": nf.warnings,
        }),
    );
    for w in &nf.warnings {
        eprintln!("warning: {w}");
    }
    Ok(Outcome::Positive)
}

fn cmd_check(ctx: &Ctx, file: &Path) -> Result<Outcome> {
    let p = load_program(file)?;
    let (word, good, model) = match observability(&p, ctx.mode)? {
        Observability::Observable(m) => ("OBSERVABLE", true, Some(m)),
        Observability::Unobservable => ("UNOBSERVABLE", false, None),
        Observability::NoModelUpTo(_) => ("UNOBSERVABLE", false, None),
    };
    let bound = match ctx.mode {
        Mode::Oracle { bound, .. } => format!(" (no model with at most {bound} worlds)"),
        Mode::Tableau(_) => String::new(),
    };
    let mut text = format!("{}{}\n", ctx.verdict(word, good), if good { "" } else { &bound });
    if let Some(m) = &model {
        text.push_str(&m.dump());
    }
    ctx.emit(
        &text,
        json!({ "verdict": word, "model": model.as_ref().map(|m| m.dump()) }),
    );
    Ok(if good { Outcome::Positive } else { Outcome::Negative })
}

fn cmd_include(ctx: &Ctx, smaller: &Path, larger: &Path) -> Result<Outcome> {
    let p = load_program(smaller)?;
    let q = load_program(larger)?;
    let v = check_inclusion(&p, &q, ctx.mode)?;
    let good = !matches!(v, Verdict::NotIncluded(_));
    let model = match &v {
        Verdict::NotIncluded(m) => Some(m.dump()),
        _ => None,
    };
    let mut text = format!("{}\n", ctx.verdict(v.label(), good));
    if let Some(m) = &model {
        text.push_str("counterexample:\n");
        text.push_str(m);
    }
    ctx.emit(&text, json!({ "verdict": v.label(), "counterexample": model }));
    Ok(if good { Outcome::Positive } else { Outcome::Negative })
}

fn cmd_synth(ctx: &Ctx, goal: &Path, library: &Path, minimal: bool) -> Result<Outcome> {
    let goal = load_program(goal)?;
    let lib = load_library(library)?;
    let s = synthesize(&goal, &lib, ctx.search)?;
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    let smallest = if minimal {
        minimality_oracle(&goal, &lib, lib.len(), ctx.search)?
    } else {
        None
    };
    if let Some(out) = &ctx.out {
        std::fs::write(out, s.derivation.to_json() + "\n")
            .with_context(|| format!("cannot write {}", out.display()))?;
    }
    let mut text = format!(
        "assembly: {}\nsigma: {}\nprogram: {}\nderivation: {} nodes, {}\n",
        s.assembly.join(", "),
        s.sigma,
        render_program(&s.program),
        s.derivation.size(),
        ctx.verdict(if s.report.ok { "VERIFIED" } else { "REJECTED" }, s.report.ok),
    );
    if let Some(n) = smallest {
        text.push_str(&format!("smallest assembly: {n}\n"));
    }
    ctx.emit(
        &text,
        json!({
            "assembly": s.assembly,
            "sigma": s.sigma,
            "program": render_program(&s.program),
            "derivation": s.derivation,
            "verified": s.report.ok,
            "smallest": smallest,
            "warnings": s.warnings,
        }),
    );
    Ok(Outcome::Positive)
}

fn cmd_verify(ctx: &Ctx, derivation: &Path, library: &Path, goal: &Path) -> Result<Outcome> {
    let d = Derivation::from_json(&read(derivation)?)
        .with_context(|| format!("derivation {}", derivation.display()))?;
    let lib = load_library(library)?;
    let goal = load_program(goal)?;
    let r = check_derivation(&d, &lib, &goal);
    let nodes: Vec<Value> = r
        .nodes
        .iter()
        .map(|n| json!({ "path": n.path, "rule": n.rule, "ok": n.ok, "detail": n.detail }))
        .collect();
    let text = r.render().replace(
        if r.ok { "VERIFIED" } else { "REJECTED" },
        &ctx.verdict(if r.ok { "VERIFIED" } else { "REJECTED" }, r.ok),
    );
    ctx.emit(
        &format!("{}\n", text.trim_end()),
        json!({ "nodes": nodes, "root_matches_goal": r.root_matches_goal, "ok": r.ok }),
    );
    Ok(if r.ok { Outcome::Positive } else { Outcome::Negative })
}

fn cmd_trace(
    ctx: &Ctx,
    trace: &Path,
    program: &Path,
    label: &str,
    division: Option<Vec<usize>>,
) -> Result<Outcome> {
    let t = Trace::parse(&read(trace)?).with_context(|| format!("trace {}", trace.display()))?;
    let p = load_program(program)?;
    let consistent = consistent_histories(&t, &p, label)?;
    let (formulas, _) = rank_histories(&t, &p, label)?;
    let positive;
    let mut text = String::new();
    let mut rows = Vec::new();
    let shown: Vec<_> = match &division {
        Some(dates) => {
            let d = ChronologicalDivision::new(dates.clone());
            d.validate(&t)?;
            let hit = consistent.iter().find(|r| r.division == d).cloned();
            positive = hit.is_some();
            text.push_str(&format!(
                "{d}: {}\n",
                ctx.verdict(if positive { "CONSISTENT" } else { "INCONSISTENT" }, positive)
            ));
            hit.into_iter().collect()
        }
        None => {
            positive = !consistent.is_empty();
            consistent.clone()
        }
    };
    for r in &shown {
        let theory: Vec<String> = r.theory.iter().map(|&i| formulas[i].canonical()).collect();
        text.push_str(&format!("{} {}\n", r.division, r.history.render()));
        rows.push(json!({
            "division": r.division.dates(),
            "history": r.history.render(),
            "theory": theory,
        }));
    }
    if shown.is_empty() && division.is_none() {
        text.push_str(&format!("{}\n", ctx.verdict("NO CONSISTENT HISTORY", false)));
    }
    if let Some(out) = &ctx.out {
        let d = match (&division, shown.first()) {
            (Some(dates), _) => ChronologicalDivision::new(dates.clone()),
            (None, Some(r)) => r.division.clone(),
            (None, None) => ChronologicalDivision::new(vec![t.start, t.end() + 1]),
        };
        std::fs::write(out, render_timeline(&t, &d)?)
            .with_context(|| format!("cannot write {}", out.display()))?;
    }
    ctx.emit(&text, json!({ "consistent": positive, "histories": rows }));
    Ok(if positive { Outcome::Positive } else { Outcome::Negative })
}

fn run(cli: Cli) -> Result<Outcome> {
    let ctx = Ctx::from(&cli)?;
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("cannot start worker threads")?;
    }
    match cli.command {
        Command::Parse { file } => cmd_parse(&ctx, &file),
        Command::Interpret { file } => cmd_interpret(&ctx, &file),
        Command::Check { file } => cmd_check(&ctx, &file),
        Command::Include { smaller, larger } => cmd_include(&ctx, &smaller, &larger),
        Command::Synth {
            goal,
            library,
            minimal,
        } => cmd_synth(&ctx, &goal, &library, minimal),
        Command::Verify {
            derivation,
            library,
            goal,
        } => cmd_verify(&ctx, &derivation, &library, &goal),
        Command::Trace {
            trace,
            program,
            label,
            division,
        } => cmd_trace(&ctx, &trace, &program, &label, division),
    }
}

fn over_budget(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(c.downcast_ref::<LogicError>(), Some(LogicError::BudgetExceeded { .. }))
            || matches!(
                c.downcast_ref::<SynthesisError>(),
                Some(SynthesisError::Logic(LogicError::BudgetExceeded { .. }))
            )
    })
}

/// A goal the library cannot implement is a negative answer, not a usage error.
fn negative(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(
            c.downcast_ref::<SynthesisError>(),
            Some(SynthesisError::NoCover(_) | SynthesisError::ObservabilityFailed)
        )
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Positive) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if over_budget(&e) {
                3
            } else if negative(&e) {
                2
            } else {
                1
            })
        }
    }
}
