use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rbatl::checker::{resolve_coalition, Checker, Labelling, Semantics, StateSet};
use rbatl::formula::{parse_formula, translate_endowments, Formula};
use rbatl::io::{model_from_json, model_to_json};
use rbatl::model::Model;
use rbatl::oracle::{bounded_search, Goal, Query, Verdict};
use rbatl::petri::{parse_marking, NetDocument};
use rbatl::symbolic::rb_atl_label;
use rbatl::witness::certificate::{validate_query, Certificate};
use rbatl::witness::concretize::concretize;

/// Model checker for resource-bounded alternating-time temporal logic.
#[derive(Parser)]
#[command(name = "rbatl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label a formula over a model and report the satisfying states.
    Check(CheckArgs),
    /// Encode a Petri net coverability question as a model and formula.
    Petri(PetriArgs),
    /// Replace per-agent endowments by summed bounds.
    Translate {
        /// Formula with endowments, e.g. `<{a:1,0; b:2,1}> X p`.
        formula: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Tree,
    Symbolic,
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Model file (JSON).
    model: PathBuf,
    /// Formula text, or a file containing it.
    formula: String,
    /// Exit 0 if this state satisfies the formula, 1 otherwise.
    #[arg(long)]
    state: Option<String>,
    #[arg(long, default_value = "rbatl", value_parser = parse_semantics)]
    semantics: Semantics,
    #[arg(long, value_enum, default_value = "tree")]
    engine: Engine,
    /// Write a certificate for `--state` to this file.
    #[arg(long, value_name = "FILE")]
    witness: Option<PathBuf>,
    /// Cross-check `--state` with a depth-bounded search, e.g. `depth=8`.
    #[arg(long, value_name = "depth=N", value_parser = parse_oracle)]
    oracle: Option<usize>,
    /// Print search statistics.
    #[arg(long)]
    trace: bool,
    /// Print the labelling of every subformula.
    #[arg(long)]
    all: bool,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct PetriArgs {
    /// Net file (JSON).
    net: PathBuf,
    /// Target marking such as `p1=2,p3=1`; overrides the file's target.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, value_name = "FILE")]
    model_out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    formula_out: Option<PathBuf>,
    /// Also decide coverability directly with a coverability tree.
    #[arg(long)]
    coverable: bool,
}

fn parse_semantics(s: &str) -> Result<Semantics, String> {
    s.parse()
}

fn parse_oracle(s: &str) -> Result<usize, String> {
    let n = s.strip_prefix("depth=").unwrap_or(s);
    match n.parse::<usize>() {
        Ok(d) if d >= 1 => Ok(d),
        _ => Err(format!("expected depth=N with N >= 1, found `{s}`")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => check(args),
        Command::Petri(args) => petri(args).map(|()| true),
        Command::Translate { formula } => translate_endowments(&formula)
            .map(|f| {
                println!("{f}");
                true
            })
            .map_err(Into::into),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn names<'m>(m: &'m Model, set: &StateSet) -> Vec<&'m str> {
    set.iter().map(|&s| m.state_name(s)).collect()
}

fn load_formula(arg: &str) -> Result<Formula> {
    let path = Path::new(arg);
    let text = if path.is_file() { read(path)? } else { arg.to_string() };
    parse_formula(text.trim()).map_err(|e| anyhow!("formula: {e}"))
}

/// Returns whether `--state` (if any) satisfies the formula.
fn check(args: CheckArgs) -> Result<bool> {
    let model = model_from_json(&read(&args.model)?).with_context(|| format!("in {}", args.model.display()))?;
    let f = load_formula(&args.formula)?;
    let state = args
        .state
        .as_deref()
        .map(|s| model.state_id(s).ok_or_else(|| anyhow!("unknown state `{s}`")))
        .transpose()?;
    if (args.witness.is_some() || args.oracle.is_some()) && state.is_none() {
        bail!("--witness and --oracle need --state");
    }

    let mut checker = Checker::new(&model, args.semantics)?;
    let labels: Labelling = match args.engine {
        Engine::Tree => checker.label(&f)?,
        Engine::Symbolic => rb_atl_label(&model, &f, args.semantics)?,
    };
    let sat = labels.of(&f);
    let holds = state.map(|s| sat.contains(&s));

    let mut report = json!({
        "formula": f.to_string(),
        "semantics": args.semantics.to_string(),
        "engine": if args.engine == Engine::Tree { "tree" } else { "symbolic" },
        "satisfied": names(&model, sat),
    });
    let mut lines = vec![format!("formula: {f}"), format!("satisfied: {}", names(&model, sat).join(", "))];
    if let (Some(s), Some(h)) = (&args.state, holds) {
        report["state"] = json!(s);
        report["holds"] = json!(h);
        lines.push(format!("{s}: {h}"));
    }
    if args.all {
        let map: serde_json::Map<String, Value> =
            labels.iter().map(|(g, set)| (g.to_string(), json!(names(&model, set)))).collect();
        for (g, set) in labels.iter() {
            lines.push(format!("  [{}] {g}", names(&model, set).join(", ")));
        }
        report["labels"] = Value::Object(map);
    }
    if let Some(depth) = args.oracle {
        let verdict = oracle(&model, &f, &labels, args.semantics, state.unwrap(), depth)?;
        let text = if verdict == Verdict::True { "true" } else { "unknown" };
        report["oracle"] = json!({ "depth": depth, "verdict": text });
        lines.push(format!("oracle (depth {depth}): {text}"));
        if verdict == Verdict::True && holds == Some(false) {
            bail!("oracle found a strategy the checker missed");
        }
    }
    if let Some(path) = &args.witness {
        let s = state.unwrap();
        if holds == Some(true) {
            let w = checker.witness(&f, s)?.ok_or_else(|| anyhow!("no witness found"))?;
            let concrete = concretize(&mut checker, &f, &w)?;
            validate_query(&model, &f, s, &concrete.witness)?;
            let cert = Certificate::from_witness(&model, &concrete.witness);
            fs::write(path, cert.to_json() + "\n").with_context(|| format!("cannot write {}", path.display()))?;
            report["witness"] = json!({
                "file": path.display().to_string(),
                "nodes": concrete.witness.root.size(),
                "loop_repetitions": concrete.repetitions,
            });
            lines.push(format!(
                "witness: {} ({} nodes, {} loop repetitions)",
                path.display(),
                concrete.witness.root.size(),
                concrete.repetitions
            ));
        } else {
            lines.push("witness: none (state does not satisfy the formula)".into());
        }
    }
    if args.trace {
        let st = checker.stats();
        report["trace"] = json!({ "searches": st.searches, "nodes": st.nodes, "max_depth": st.max_depth });
        lines.push(format!("searches: {}, nodes: {}, max depth: {}", st.searches, st.nodes, st.max_depth));
    }

    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for l in lines {
            println!("{l}");
        }
    }
    Ok(holds.unwrap_or(true))
}

fn oracle(m: &Model, f: &Formula, labels: &Labelling, sem: Semantics, s: usize, depth: usize) -> Result<Verdict> {
    let goal = match f {
        Formula::Until { left, right, .. } => Goal::Until { phi: labels.of(left), psi: labels.of(right) },
        Formula::Always { body, .. } => Goal::Always { phi: labels.of(body) },
        _ => bail!("--oracle needs an until or always formula"),
    };
    let coalition = resolve_coalition(m, f.coalition().expect("modal formula"))?;
    let q = Query { model: m, semantics: sem, coalition: &coalition, goal };
    Ok(bounded_search(&q, f.bound().expect("modal formula"), s, depth))
}

fn petri(args: PetriArgs) -> Result<()> {
    let doc = NetDocument::from_json(&read(&args.net)?).with_context(|| format!("in {}", args.net.display()))?;
    let target = match (&args.target, &doc.target) {
        (Some(t), _) => parse_marking(&doc.net, t)?,
        (None, Some(t)) => t.clone(),
        (None, None) => bail!("no target marking: pass --target or add `target` to the net file"),
    };
    let (model, formula) = doc.net.reduce(&target)?;
    match &args.model_out {
        Some(p) => fs::write(p, model_to_json(&model)).with_context(|| format!("cannot write {}", p.display()))?,
        None if args.formula_out.is_none() && !args.coverable => print!("{}", model_to_json(&model)),
        None => {}
    }
    match &args.formula_out {
        Some(p) => fs::write(p, format!("{formula}\n")).with_context(|| format!("cannot write {}", p.display()))?,
        None => println!("{formula}"),
    }
    if args.coverable {
        println!("coverable: {}", doc.net.coverable(&target)?);
    }
    Ok(())
}
