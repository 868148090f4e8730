//! The built-in fixture languages and the runner that re-derives their
//! verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    build_transition_algebra, AlgebraError, AutomatonSpec, MonoidSpec, Recognizer,
};
use crate::decide::{Analysis, Options, Order, Witness};
use crate::logic::{formula_language_equal, parse_formula, LogicError};
use crate::word::{check_da, WordError};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus entry {name}: {source}")]
    Algebra { name: String, source: AlgebraError },
    #[error("corpus entry {name}: {source}")]
    Logic { name: String, source: LogicError },
    #[error("corpus entry {0} has neither an automaton nor a monoid")]
    NoInput(String),
    #[error("corpus entry {name}: check `{check}` does not fit its input")]
    CheckMismatch { name: String, check: String },
    #[error("corpus entry {name}: {source}")]
    Word { name: String, source: WordError },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Lex,
    Desc,
    Da,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    pub check: Check,
    pub definable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub formula: String,
    pub max_nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automaton: Option<AutomatonSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monoid: Option<MonoidSpec>,
    pub expected: Vec<Expectation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub formulas: Vec<FormulaCheck>,
}

const BUILTIN: &[&str] = &[
    include_str!("../corpus/f1.json"),
    include_str!("../corpus/f2.json"),
    include_str!("../corpus/f3.json"),
    include_str!("../corpus/f4.json"),
    include_str!("../corpus/f5.json"),
    include_str!("../corpus/f6.json"),
    include_str!("../corpus/f7.json"),
    include_str!("../corpus/f8.json"),
    include_str!("../corpus/f9.json"),
    include_str!("../corpus/f10.json"),
    include_str!("../corpus/f11.json"),
    include_str!("../corpus/f1_junk.json"),
    include_str!("../corpus/f1_dup.json"),
];

pub fn builtin() -> Vec<CorpusEntry> {
    BUILTIN
        .iter()
        .map(|text| serde_json::from_str(text).expect("built-in corpus entries parse"))
        .collect()
}

pub fn builtin_entry(name: &str) -> Option<CorpusEntry> {
    builtin().into_iter().find(|e| e.name == name)
}

/// Reads a corpus file: a single entry or an array of entries.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    Ok(if value.is_array() {
        serde_json::from_value(value)?
    } else {
        vec![serde_json::from_value(value)?]
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub entry: String,
    pub check: String,
    pub expected: serde_json::Value,
    pub actual: serde_json::Value,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }
}

impl CorpusEntry {
    pub fn recognizer(&self) -> Result<Option<Recognizer>, CorpusError> {
        self.automaton
            .as_ref()
            .map(build_transition_algebra)
            .transpose()
            .map_err(|source| CorpusError::Algebra {
                name: self.name.clone(),
                source,
            })
    }
}

fn verdict_json(definable: bool, witness: &Option<Vec<String>>) -> serde_json::Value {
    let mut m = BTreeMap::new();
    m.insert("definable", serde_json::Value::Bool(definable));
    if let Some(w) = witness {
        m.insert("witness", serde_json::json!(w));
    }
    serde_json::json!(m)
}

/// Names a witness the way corpus entries record it: smallest terms for
/// context types, names for forest types.
pub fn witness_names(analysis: &Analysis, witness: Witness) -> Vec<String> {
    match witness {
        Witness::Identity { v, w } => [v, w]
            .iter()
            .map(|&x| match analysis.witnesses.context(x) {
                Ok(t) => t.to_string(),
                Err(_) => analysis.algebra().v_name(x).to_string(),
            })
            .collect(),
        Witness::Commutativity { g, h } => vec![
            analysis.algebra().h_name(g).to_string(),
            analysis.algebra().h_name(h).to_string(),
        ],
    }
}

pub fn run_entry(entry: &CorpusEntry) -> Result<Vec<Row>, CorpusError> {
    let mut rows = Vec::new();
    let rec = entry.recognizer()?;
    let analysis = rec.as_ref().map(|r| Analysis::new(r, Options::default()));
    let monoid = entry
        .monoid
        .as_ref()
        .map(MonoidSpec::to_monoid)
        .transpose()
        .map_err(|source| CorpusError::Algebra {
            name: entry.name.clone(),
            source,
        })?;
    if analysis.is_none() && monoid.is_none() {
        return Err(CorpusError::NoInput(entry.name.clone()));
    }
    for exp in &entry.expected {
        let mismatch = || CorpusError::CheckMismatch {
            name: entry.name.clone(),
            check: format!("{:?}", exp.check).to_lowercase(),
        };
        let (definable, witness) = match exp.check {
            Check::Lex | Check::Desc => {
                let a = analysis.as_ref().ok_or_else(mismatch)?;
                let order = if exp.check == Check::Lex {
                    Order::Lex
                } else {
                    Order::Desc
                };
                let v = a.decide(order);
                (v.definable, v.witness.map(|w| witness_names(a, w)))
            }
            Check::Da => {
                let mon = monoid.as_ref().ok_or_else(mismatch)?;
                let w = check_da(mon);
                (
                    w.is_none(),
                    w.map(|(m, n)| vec![mon.name(m).to_string(), mon.name(n).to_string()]),
                )
            }
        };
        let matches = definable == exp.definable
            && exp
                .witness
                .as_ref()
                .is_none_or(|w| Some(w) == witness.as_ref());
        rows.push(Row {
            entry: entry.name.clone(),
            check: format!("{:?}", exp.check).to_lowercase(),
            expected: verdict_json(exp.definable, &exp.witness),
            actual: verdict_json(definable, &witness),
            matches,
        });
    }
    for f in &entry.formulas {
        let rec = rec.as_ref().ok_or_else(|| CorpusError::CheckMismatch {
            name: entry.name.clone(),
            check: "formula".into(),
        })?;
        let logic = |source| CorpusError::Logic {
            name: entry.name.clone(),
            source,
        };
        let phi = parse_formula(&f.formula).map_err(logic)?;
        let diff = formula_language_equal(&phi, rec, f.max_nodes).map_err(logic)?;
        rows.push(Row {
            entry: entry.name.clone(),
            check: format!("formula {}", f.formula),
            expected: serde_json::json!({ "equal": true }),
            actual: match &diff {
                None => serde_json::json!({ "equal": true }),
                Some(t) => serde_json::json!({ "equal": false, "differs_at": t.to_string() }),
            },
            matches: diff.is_none(),
        });
    }
    Ok(rows)
}

/// Runs `entries`, keeping only the one named `only` if given.
pub fn run_corpus(entries: &[CorpusEntry], only: Option<&str>) -> Result<Report, CorpusError> {
    let mut report = Report::default();
    for entry in entries.iter().filter(|e| only.is_none_or(|n| e.name == n)) {
        report.rows.extend(run_entry(entry)?);
    }
    Ok(report)
}
