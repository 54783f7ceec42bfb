//! WebAssembly bindings for the browser demo.
//!
//! Every export takes and returns strings; results are JSON objects and
//! failures come back as `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rbatl::checker::{model_check, Checker, Semantics};
use rbatl::fixtures;
use rbatl::formula::{parse_formula, Formula};
use rbatl::io::{model_from_json, model_to_json};
use rbatl::model::Model;
use rbatl::petri::{parse_marking, NetDocument};
use rbatl::vector::{Amount, BoundVec};
use rbatl::witness::concretize::concretize;

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&Failure { error }),
    }
    .expect("response serializes")
}

fn load(model_json: &str) -> Result<Model, String> {
    model_from_json(model_json).map_err(|e| e.to_string())
}

fn formula(text: &str) -> Result<Formula, String> {
    parse_formula(text).map_err(|e| format!("formula {e}"))
}

/// Canonical JSON of a built-in model: `shuttle`, `exchange`, `chain`,
/// `workshop` or `leaky_loop`.
#[wasm_bindgen]
pub fn sample_model(name: &str) -> String {
    let m = match name {
        "shuttle" => fixtures::shuttle(),
        "exchange" => fixtures::exchange(1),
        "chain" => fixtures::chain(),
        "workshop" => fixtures::workshop(),
        "leaky_loop" => fixtures::leaky_loop(),
        _ => return respond::<()>(Err(format!("no sample model `{name}`"))),
    };
    model_to_json(&m)
}

#[derive(Serialize)]
struct Checked {
    formula: String,
    satisfied: Vec<String>,
    labels: Vec<(String, Vec<String>)>,
    nodes: u64,
    /// Plays of a concrete strategy from `state`, when one was requested
    /// and exists.
    plays: Option<Vec<Vec<String>>>,
}

/// Labels `formula` over the model and, if `state` is non-empty and
/// satisfies a bounded until or always formula, lists the plays of a
/// concrete winning strategy.
#[wasm_bindgen]
pub fn check(model_json: &str, formula_text: &str, semantics: &str, state: &str) -> String {
    respond(check_inner(model_json, formula_text, semantics, state))
}

fn check_inner(model_json: &str, formula_text: &str, semantics: &str, state: &str) -> Result<Checked, String> {
    let m = load(model_json)?;
    let f = formula(formula_text)?;
    let sem: Semantics = semantics.parse()?;
    let mut c = Checker::new(&m, sem).map_err(|e| e.to_string())?;
    let labels = c.label(&f).map_err(|e| e.to_string())?;
    let names = |set: &rbatl::checker::StateSet| set.iter().map(|&s| m.state_name(s).to_string()).collect();
    let mut plays = None;
    if !state.is_empty() {
        let s = m.state_id(state).ok_or_else(|| format!("unknown state `{state}`"))?;
        let searchable = matches!(&f, Formula::Until { .. } | Formula::Always { .. });
        if searchable && labels.of(&f).contains(&s) {
            if let Some(w) = c.witness(&f, s).map_err(|e| e.to_string())? {
                let w = concretize(&mut c, &f, &w).map_err(|e| e.to_string())?.witness;
                plays = Some(
                    w.root
                        .plays()
                        .into_iter()
                        .map(|p| p.into_iter().map(|s| m.state_name(s).to_string()).collect())
                        .collect(),
                );
            }
        }
    }
    Ok(Checked {
        formula: f.to_string(),
        satisfied: names(labels.of(&f)),
        labels: labels.iter().map(|(g, set)| (g.to_string(), names(set))).collect(),
        nodes: c.stats().nodes,
        plays,
    })
}

#[derive(Serialize)]
struct Region {
    formula: String,
    /// `rows[y][x]` tells whether the bound `(x, y)` (or `(x)` for one
    /// resource) makes the formula true at the state.
    rows: Vec<Vec<bool>>,
}

/// Sweeps the bound of the outermost modality of `formula_text` over
/// `0..=max` in each of the first two resources (others are `inf`) and
/// reports where it holds at `state`.
#[wasm_bindgen]
pub fn bound_region(model_json: &str, formula_text: &str, semantics: &str, state: &str, max: u32) -> String {
    respond(bound_region_inner(model_json, formula_text, semantics, state, max.min(12) as u64))
}

fn bound_region_inner(model_json: &str, formula_text: &str, semantics: &str, state: &str, max: u64) -> Result<Region, String> {
    let m = load(model_json)?;
    let f = formula(formula_text)?;
    let sem: Semantics = semantics.parse()?;
    let s = m.state_id(state).ok_or_else(|| format!("unknown state `{state}`"))?;
    if !f.is_modal() {
        return Err("the outermost operator must be a coalition modality".into());
    }
    let r = m.resource_count();
    if r == 0 {
        return Err("the model has no resources".into());
    }
    let ys = if r >= 2 { max } else { 0 };
    let mut rows = Vec::new();
    for y in 0..=ys {
        let mut row = Vec::new();
        for x in 0..=max {
            let mut b = BoundVec::infinite(r);
            b.set(0, Amount::Finite(x));
            if r >= 2 {
                b.set(1, Amount::Finite(y));
            }
            let g = f.with_bound(b);
            let labels = model_check(&m, &g, sem).map_err(|e| e.to_string())?;
            row.push(labels.of(&g).contains(&s));
        }
        rows.push(row);
    }
    Ok(Region { formula: f.to_string(), rows })
}

#[derive(Serialize)]
struct Coverability {
    coverable: bool,
    /// The checker's answer on the encoded model, which must agree.
    checker: bool,
    formula: String,
    states: usize,
}

/// Decides whether `target` (e.g. `p1=2`, empty for the file's own target)
/// is coverable in the net, both directly and through the model checker.
#[wasm_bindgen]
pub fn petri_coverable(net_json: &str, target: &str) -> String {
    respond(petri_inner(net_json, target))
}

fn petri_inner(net_json: &str, target: &str) -> Result<Coverability, String> {
    let doc = NetDocument::from_json(net_json).map_err(|e| e.to_string())?;
    let target = if target.trim().is_empty() {
        doc.target.clone().ok_or("no target marking given")?
    } else {
        parse_marking(&doc.net, target).map_err(|e| e.to_string())?
    };
    let coverable = doc.net.coverable(&target).map_err(|e| e.to_string())?;
    let (m, f) = doc.net.reduce(&target).map_err(|e| e.to_string())?;
    let labels = model_check(&m, &f, Semantics::Rbatl).map_err(|e| e.to_string())?;
    Ok(Coverability {
        coverable,
        checker: labels.of(&f).contains(&m.state_id("s0").expect("encoded models start at s0")),
        formula: f.to_string(),
        states: m.state_count(),
    })
}
