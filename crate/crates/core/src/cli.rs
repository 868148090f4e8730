//! Command-line interface. Every command prints one JSON document.
//!
//! Exit codes: 0 for success or a positive verdict, 1 for a negative
//! verdict, 2 for usage and input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::algebra::{build_transition_algebra, AutomatonSpec, MonoidSpec, Recognizer};
use crate::corpus::{builtin, builtin_entry, parse_corpus, run_corpus, witness_names};
use crate::decide::{
    exhaustive_search, semantic_counterexample, Analysis, Lifted, Options, Order, SearchBounds,
    Witness,
};
use crate::logic::{
    classify_prenex, eval_context_formula, eval_sentence, formula_language_equal, parse_formula,
};
use crate::syntactic::{restrict_reachable, syntactic_quotient};
use crate::term::{parse_context, parse_forest};
use crate::word::{check_da, synth_sigma2_word, StratifiedMonoid, WordMorphism};

#[derive(Parser, Debug)]
#[command(
    name = "forest-delta",
    version,
    about = "Definability checks for regular forest languages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Automaton JSON, or a corpus entry containing one.
    #[arg(long, conflicts_with = "fixture")]
    spec: Option<PathBuf>,
    /// Name of a built-in corpus entry.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Args, Debug)]
struct Tuning {
    /// Close the piece relation under transitivity.
    #[arg(long)]
    pieces_transitive: bool,
    /// Analyse the input algebra as given instead of its syntactic quotient.
    #[arg(long)]
    no_minimize: bool,
}

impl Tuning {
    fn options(&self) -> Options {
        Options {
            minimize: !self.no_minimize,
            transitive_pieces: self.pieces_transitive,
        }
    }
}

#[derive(Args, Debug)]
struct Bounds {
    #[arg(long, default_value_t = 3)]
    max_n: usize,
    #[arg(long, default_value_t = 6)]
    max_nodes: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide definability for one signature.
    Decide {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "lex")]
        order: Order,
        #[command(flatten)]
        tuning: Tuning,
        /// Also search for a concrete counterexample.
        #[arg(long)]
        lift: bool,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Print the syntactic forest algebra.
    Syntactic {
        #[command(flatten)]
        input: Input,
    },
    /// Print the piece relation on forest and context types.
    Pieces {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Membership of a forest, or the type of a context.
    Member {
        #[command(flatten)]
        input: Input,
        #[arg(long, conflicts_with = "context", required_unless_present = "context")]
        forest: Option<String>,
        #[arg(long)]
        context: Option<String>,
    },
    /// Evaluate a formula on a term, or compare it with a language.
    Eval {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        forest: Option<String>,
        #[arg(long, conflicts_with = "forest")]
        context: Option<String>,
        /// Variable mapped to the hole of `--context`.
        #[arg(long, default_value = "x")]
        hole_var: String,
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 6)]
        max_nodes: usize,
    },
    /// Block expression for the words of one monoid element.
    SynthWord {
        /// Monoid JSON with a `letters` map, or a corpus entry containing one.
        #[arg(long, conflicts_with = "fixture")]
        monoid: Option<PathBuf>,
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long)]
        target: String,
    },
    /// Search for forests `r p^2n s` and `r p^n q p^n s` the language separates.
    Counterexample {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "lex")]
        order: Order,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        bounds: Bounds,
        /// Try every piece pair instead of the first violation only.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Work with the fixture corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusAction {
    /// Re-derive every expected verdict.
    Run {
        #[arg(long)]
        only: Option<String>,
        /// Corpus file to run instead of the built-in one.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// List the built-in entries.
    List,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn json(code: i32, value: Value) -> Self {
        Outcome {
            code,
            stdout: serde_json::to_string_pretty(&value).expect("serializable") + "\n",
            stderr: String::new(),
        }
    }

    fn error(message: impl std::fmt::Display) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

type Result<T> = std::result::Result<T, String>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn sub_document(text: &str, key: &str, path: &Path) -> Result<Value> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(match value.get(key) {
        Some(inner) => inner.clone(),
        None => value,
    })
}

fn load_spec(input: &Input) -> Result<AutomatonSpec> {
    match (&input.spec, &input.fixture) {
        (Some(path), _) => {
            let value = sub_document(&read(path)?, "automaton", path)?;
            serde_json::from_value(value).map_err(|e| format!("{}: {e}", path.display()))
        }
        (None, Some(name)) => builtin_entry(name)
            .and_then(|e| e.automaton)
            .ok_or_else(|| format!("no built-in automaton named `{name}`")),
        (None, None) => Err("one of --spec or --fixture is required".into()),
    }
}

fn load_recognizer(input: &Input) -> Result<Recognizer> {
    build_transition_algebra(&load_spec(input)?).map_err(|e| e.to_string())
}

fn witness_json(analysis: &Analysis, witness: Witness) -> Value {
    let alg = analysis.algebra();
    let names = witness_names(analysis, witness);
    match witness {
        Witness::Identity { v, w } => json!({
            "kind": "identity",
            "v": alg.v_name(v),
            "w": alg.v_name(w),
            "v_term": names[0],
            "w_term": names[1],
        }),
        Witness::Commutativity { g, h } => json!({
            "kind": "commutativity",
            "g": alg.h_name(g),
            "h": alg.h_name(h),
        }),
    }
}

fn lifted_json(lifted: &Lifted) -> Value {
    json!({
        "r": lifted.r.to_string(),
        "p": lifted.p.to_string(),
        "q": lifted.q.to_string(),
        "s": lifted.s.to_string(),
        "n": lifted.n,
        "doubled": lifted.doubled().to_string(),
        "replaced": lifted.replaced().to_string(),
        "doubled_member": lifted.doubled_member,
        "replaced_member": lifted.replaced_member,
    })
}

fn sizes(rec: &Recognizer) -> Value {
    json!({ "H": rec.algebra().h_len(), "V": rec.algebra().v_len() })
}

fn bounds_of(b: &Bounds) -> SearchBounds {
    SearchBounds {
        max_n: b.max_n,
        max_nodes: b.max_nodes,
    }
}

fn decide(
    input: &Input,
    order: Order,
    tuning: &Tuning,
    lift: bool,
    bounds: &Bounds,
) -> Result<Outcome> {
    let rec = load_recognizer(input)?;
    let analysis = Analysis::new(&rec, tuning.options());
    let verdict = if lift {
        analysis.decide_and_lift(order, bounds_of(bounds))
    } else {
        analysis.decide(order)
    };
    let mut out = json!({
        "order": order,
        "definable": verdict.definable,
        "algebra": sizes(&analysis.recognizer),
        "warnings": verdict.warnings,
        "witness": verdict.witness.map(|w| witness_json(&analysis, w)),
    });
    if lift {
        out["counterexample"] = verdict
            .lifted
            .as_ref()
            .map(lifted_json)
            .unwrap_or(Value::Null);
    }
    Ok(Outcome::json(if verdict.definable { 0 } else { 1 }, out))
}

fn syntactic(input: &Input) -> Result<Outcome> {
    let rec = load_recognizer(input)?;
    let restricted = restrict_reachable(&rec);
    let q = syntactic_quotient(&restricted.recognizer).map_err(|e| e.to_string())?;
    let alg = restricted.recognizer.algebra();
    let h_classes: serde_json::Map<String, Value> = alg
        .h()
        .elements()
        .map(|h| {
            (
                alg.h_name(h).to_string(),
                json!(q.quotient.algebra().h_name(q.h_class[h])),
            )
        })
        .collect();
    Ok(Outcome::json(
        0,
        json!({
            "input": sizes(&rec),
            "reachable": sizes(&restricted.recognizer),
            "syntactic": sizes(&q.quotient),
            "h_classes": h_classes,
            "automaton": q.quotient.to_spec(),
        }),
    ))
}

fn pieces(input: &Input, tuning: &Tuning) -> Result<Outcome> {
    let rec = load_recognizer(input)?;
    let analysis = Analysis::new(&rec, tuning.options());
    let alg = analysis.algebra();
    let v_term = |v: usize| analysis.witnesses.context(v).map(|t| t.to_string()).ok();
    let h_term = |h: usize| analysis.witnesses.forest(h).map(|t| t.to_string()).ok();
    let contexts: Vec<Value> = alg
        .v()
        .elements()
        .map(|v| json!({ "name": alg.v_name(v), "term": v_term(v) }))
        .collect();
    let forests: Vec<Value> = alg
        .h()
        .elements()
        .map(|h| json!({ "name": alg.h_name(h), "term": h_term(h) }))
        .collect();
    let v_pairs: Vec<Value> = analysis
        .pieces
        .v_pairs()
        .into_iter()
        .map(|(w, v)| json!([alg.v_name(w), alg.v_name(v)]))
        .collect();
    let h_pairs: Vec<Value> = analysis
        .pieces
        .h_pairs()
        .into_iter()
        .map(|(g, h)| json!([alg.h_name(g), alg.h_name(h)]))
        .collect();
    Ok(Outcome::json(
        0,
        json!({
            "forest_types": forests,
            "context_types": contexts,
            "h_pieces": h_pairs,
            "v_pieces": v_pairs,
            "rounds": analysis.pieces.rounds(),
            "transitive": analysis.pieces.is_transitive(),
            "warnings": analysis.warnings,
        }),
    ))
}

fn member(input: &Input, forest: Option<&str>, context: Option<&str>) -> Result<Outcome> {
    let rec = load_recognizer(input)?;
    let alg = rec.algebra();
    if let Some(text) = forest {
        let t = parse_forest(text, Some(rec.alphabet())).map_err(|e| e.to_string())?;
        let h = rec.eval_forest(&t).map_err(|e| e.to_string())?;
        let member = rec.is_accepting(h);
        return Ok(Outcome::json(
            if member { 0 } else { 1 },
            json!({ "forest": t.to_string(), "type": alg.h_name(h), "member": member }),
        ));
    }
    let text = context.ok_or("one of --forest or --context is required")?;
    let p = parse_context(text, Some(rec.alphabet())).map_err(|e| e.to_string())?;
    let v = rec.eval_context(&p).map_err(|e| e.to_string())?;
    Ok(Outcome::json(
        0,
        json!({ "context": p.to_string(), "type": alg.v_name(v) }),
    ))
}

fn eval(
    formula: &str,
    forest: Option<&str>,
    context: Option<&str>,
    hole_var: &str,
    input: &Input,
    max_nodes: usize,
) -> Result<Outcome> {
    let phi = parse_formula(formula).map_err(|e| e.to_string())?;
    let class = classify_prenex(&phi).map(|c| c.to_string()).ok();
    if let Some(text) = forest {
        let t = parse_forest(text, None).map_err(|e| e.to_string())?;
        let value = eval_sentence(&phi, &t).map_err(|e| e.to_string())?;
        return Ok(Outcome::json(
            if value { 0 } else { 1 },
            json!({ "formula": phi.to_string(), "class": class, "forest": t.to_string(), "value": value }),
        ));
    }
    if let Some(text) = context {
        let p = parse_context(text, None).map_err(|e| e.to_string())?;
        let value = eval_context_formula(&phi, hole_var, &p).map_err(|e| e.to_string())?;
        return Ok(Outcome::json(
            if value { 0 } else { 1 },
            json!({ "formula": phi.to_string(), "class": class, "context": p.to_string(), "value": value }),
        ));
    }
    if input.spec.is_none() && input.fixture.is_none() {
        return Err("one of --forest, --context, --spec or --fixture is required".into());
    }
    let rec = load_recognizer(input)?;
    let diff = formula_language_equal(&phi, &rec, max_nodes).map_err(|e| e.to_string())?;
    Ok(Outcome::json(
        if diff.is_none() { 0 } else { 1 },
        json!({
            "formula": phi.to_string(),
            "class": class,
            "max_nodes": max_nodes,
            "equal": diff.is_none(),
            "differs_at": diff.map(|t| t.to_string()),
        }),
    ))
}

fn load_monoid(path: Option<&Path>, fixture: Option<&str>) -> Result<MonoidSpec> {
    match (path, fixture) {
        (Some(path), _) => {
            let value = sub_document(&read(path)?, "monoid", path)?;
            serde_json::from_value(value).map_err(|e| format!("{}: {e}", path.display()))
        }
        (None, Some(name)) => builtin_entry(name)
            .and_then(|e| e.monoid)
            .ok_or_else(|| format!("no built-in monoid named `{name}`")),
        (None, None) => Err("one of --monoid or --fixture is required".into()),
    }
}

fn synth_word(path: Option<&Path>, fixture: Option<&str>, target: &str) -> Result<Outcome> {
    let spec = load_monoid(path, fixture)?;
    let mon = spec.to_monoid().map_err(|e| e.to_string())?;
    let letters = spec
        .letters
        .clone()
        .ok_or("the monoid has no `letters` map")?;
    let beta = WordMorphism::from_names(&mon, &letters).map_err(|e| e.to_string())?;
    let t = mon
        .index_of(target)
        .ok_or_else(|| format!("unknown monoid element `{target}`"))?;
    if let Some((m, n)) = check_da(&mon) {
        return Ok(Outcome::json(
            1,
            json!({ "da": false, "witness": [mon.name(m), mon.name(n)] }),
        ));
    }
    let strat = match &spec.pre {
        Some(pre) => StratifiedMonoid::new(mon.clone(), pre.clone()),
        None => Ok(StratifiedMonoid::trivial(mon.clone())),
    }
    .map_err(|e| e.to_string())?;
    let e = synth_sigma2_word(&beta, &strat, t).map_err(|e| e.to_string())?;
    Ok(Outcome::json(
        0,
        json!({ "da": true, "target": target, "blocks": e.to_json(), "text": e.to_string() }),
    ))
}

fn counterexample(
    input: &Input,
    order: Order,
    tuning: &Tuning,
    bounds: &Bounds,
    exhaustive: bool,
) -> Result<Outcome> {
    let rec = load_recognizer(input)?;
    let analysis = Analysis::new(&rec, tuning.options());
    let b = bounds_of(bounds);
    let found = if exhaustive {
        exhaustive_search(&analysis, b)
            .map(|(v, w, l)| (Some(witness_json(&analysis, Witness::Identity { v, w })), l))
    } else {
        match analysis.decide(order).witness {
            Some(w @ Witness::Identity { v, w: wi }) => {
                semantic_counterexample(&analysis, v, wi, b)
                    .map(|l| (Some(witness_json(&analysis, w)), l))
            }
            _ => None,
        }
    };
    let out = match &found {
        Some((witness, lifted)) => json!({
            "found": true,
            "witness": witness,
            "counterexample": lifted_json(lifted),
            "rechecked": lifted.recheck(&analysis.recognizer),
        }),
        None => json!({ "found": false, "max_n": b.max_n, "max_nodes": b.max_nodes }),
    };
    Ok(Outcome::json(if found.is_some() { 1 } else { 0 }, out))
}

fn corpus(action: &CorpusAction) -> Result<Outcome> {
    match action {
        CorpusAction::List => {
            let names: Vec<Value> = builtin()
                .iter()
                .map(|e| json!({ "name": e.name, "description": e.description }))
                .collect();
            Ok(Outcome::json(0, json!(names)))
        }
        CorpusAction::Run { only, file } => {
            let entries = match file {
                Some(path) => {
                    parse_corpus(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?
                }
                None => builtin(),
            };
            let report = run_corpus(&entries, only.as_deref()).map_err(|e| e.to_string())?;
            if report.rows.is_empty() {
                let mut out = Outcome::json(2, json!(report));
                out.stderr = "error: no corpus entries selected\n".into();
                return Ok(out);
            }
            let code = if report.all_match() { 0 } else { 1 };
            Ok(Outcome::json(code, json!(report)))
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Decide {
            input,
            order,
            tuning,
            lift,
            bounds,
        } => decide(input, *order, tuning, *lift, bounds),
        Command::Syntactic { input } => syntactic(input),
        Command::Pieces { input, tuning } => pieces(input, tuning),
        Command::Member {
            input,
            forest,
            context,
        } => member(input, forest.as_deref(), context.as_deref()),
        Command::Eval {
            formula,
            forest,
            context,
            hole_var,
            input,
            max_nodes,
        } => eval(
            formula,
            forest.as_deref(),
            context.as_deref(),
            hole_var,
            input,
            *max_nodes,
        ),
        Command::SynthWord {
            monoid,
            fixture,
            target,
        } => synth_word(monoid.as_deref(), fixture.as_deref(), target),
        Command::Counterexample {
            input,
            order,
            tuning,
            bounds,
            exhaustive,
        } => counterexample(input, *order, tuning, bounds, *exhaustive),
        Command::Corpus { action } => corpus(action),
    };
    result.unwrap_or_else(Outcome::error)
}
