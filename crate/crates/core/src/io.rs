//! The JSON model format.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "agents": ["a1", "a2"],
//!   "resources": ["r1", "r2"],
//!   "states": ["s_I", "s"],
//!   "total": true,
//!   "labels": { "p": ["s"] },
//!   "actions": { "s": { "a1": [{ "name": "idle", "cost": [0, 0] }] } },
//!   "transitions": [{ "from": "s", "joint": ["idle", "idle"], "to": "s" }]
//! }
//! ```
//!
//! Object keys of `labels` and `actions` are written in sorted order, every
//! state and agent appears in `actions` (with an empty list when nothing is
//! available), label sets follow the declared state order, and transitions
//! are sorted by source state (declared order) and then by the names in the
//! joint action. Writing a parsed canonical file reproduces it byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Model, ModelBuilder, ModelError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: u32,
    agents: Vec<String>,
    resources: Vec<String>,
    states: Vec<String>,
    #[serde(default = "yes")]
    total: bool,
    #[serde(default)]
    labels: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    actions: BTreeMap<String, BTreeMap<String, Vec<ActionEntry>>>,
    #[serde(default)]
    transitions: Vec<TransitionEntry>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionEntry {
    name: String,
    cost: Vec<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionEntry {
    from: String,
    joint: Vec<String>,
    to: String,
}

pub fn model_from_json(text: &str) -> Result<Model, ModelFileError> {
    let file: ModelFile = serde_json::from_str(text)?;
    if file.format_version != FORMAT_VERSION {
        return Err(ModelFileError::Version(file.format_version));
    }
    let mut b = ModelBuilder::new(file.agents, file.resources)
        .states(file.states)
        .total(file.total);
    for (p, states) in file.labels {
        b = b.proposition(p.clone());
        for s in states {
            b = b.label(p.clone(), s);
        }
    }
    for (s, per_agent) in &file.actions {
        for (a, entries) in per_agent {
            for e in entries {
                b = b.action(s, a, &e.name, e.cost.iter().copied());
            }
        }
    }
    for t in file.transitions {
        b = b.transition(&t.from, t.joint, &t.to);
    }
    Ok(b.build()?)
}

pub fn model_to_json(m: &Model) -> String {
    let name = |s: usize| m.state_name(s).to_string();
    let labels = m
        .labels()
        .iter()
        .map(|(p, set)| (p.clone(), set.iter().map(|&s| name(s)).collect()))
        .collect();
    let mut actions = BTreeMap::new();
    for s in 0..m.state_count() {
        let mut per_agent = BTreeMap::new();
        for a in 0..m.agent_count() {
            let entries = m
                .menu(s, a)
                .iter()
                .map(|e| ActionEntry { name: m.action_name(e.action).to_string(), cost: e.cost.components().to_vec() })
                .collect();
            per_agent.insert(m.agent_name(a).to_string(), entries);
        }
        actions.insert(name(s), per_agent);
    }
    let mut transitions = Vec::new();
    for s in 0..m.state_count() {
        let mut here: Vec<TransitionEntry> = m
            .transitions(s)
            .iter()
            .map(|(joint, &t)| TransitionEntry {
                from: name(s),
                joint: joint.iter().map(|&act| m.action_name(act).to_string()).collect(),
                to: name(t),
            })
            .collect();
        here.sort_by(|x, y| x.joint.cmp(&y.joint));
        transitions.extend(here);
    }
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        agents: m.agents().to_vec(),
        resources: m.resources().to_vec(),
        states: m.states().to_vec(),
        total: m.is_total(),
        labels,
        actions,
        transitions,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("model serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_round_trip() {
        for m in [
            fixtures::shuttle(),
            fixtures::exchange(2),
            fixtures::chain(),
            fixtures::workshop(),
            fixtures::leaky_loop(),
        ] {
            let text = model_to_json(&m);
            let back = model_from_json(&text).unwrap();
            assert_eq!(model_to_json(&back), text);
            assert_eq!(back.states(), m.states());
            assert_eq!(back.labels(), m.labels());
            assert_eq!(back.validate(), m.validate());
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(model_from_json("{"), Err(ModelFileError::Json(_))));
        let text = model_to_json(&fixtures::chain()).replace("\"format_version\": 1", "\"format_version\": 7");
        assert!(matches!(model_from_json(&text), Err(ModelFileError::Version(7))));
        let text = model_to_json(&fixtures::chain()).replace("\"to\": \"u1\"", "\"to\": \"nowhere\"");
        assert!(matches!(model_from_json(&text), Err(ModelFileError::Model(ModelError::UnknownState(_)))));
    }
}
