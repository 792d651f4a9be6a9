//! JSON formats for scenarios and weighted graphs.
//!
//! ```json
//! {"vertices": ["a", "b"], "hyperedges": [["a", "b"]]}
//! {"vertices": ["a", "b"], "weights": {"a": "1/2", "b": 1}}
//! ```
//!
//! A weighted graph file may carry explicit `"edges"`; otherwise its edges are
//! taken from the orthogonality graph of the scenario it is read against.
//! Missing weights default to 1.

use super::{ContextualityScenario, OrthoGraph, WeightedGraph};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioJson {
    pub vertices: Vec<String>,
    pub hyperedges: Vec<Vec<String>>,
}

impl From<&ContextualityScenario> for ScenarioJson {
    fn from(s: &ContextualityScenario) -> Self {
        ScenarioJson {
            vertices: s.vertices().to_vec(),
            hyperedges: (0..s.num_hyperedges()).map(|e| s.hyperedge_ids(e)).collect(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct WeightedGraphJson {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Option<Vec<(String, String)>>,
    #[serde(default)]
    pub weights: BTreeMap<String, serde_json::Value>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_scenario(text: &str) -> Result<ContextualityScenario> {
    let raw: ScenarioJson = serde_json::from_str(text).map_err(json_error)?;
    ContextualityScenario::new(raw.vertices, raw.hyperedges)
}

pub fn scenario_to_json(s: &ContextualityScenario) -> String {
    serde_json::to_string_pretty(&ScenarioJson::from(s)).expect("plain data serializes")
}

/// Reads a rational from a JSON string (`"p/q"`, `"0.5"`) or number.
pub fn rational_value(v: &serde_json::Value) -> Result<Rational> {
    let text = match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        other => return Err(Error::Parse(format!("expected a rational, got {other}"))),
    };
    rational::parse(&text).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses a weighted graph. Without explicit edges a parent O(Γ) is required.
pub fn parse_weighted_graph(text: &str, parent: Option<&OrthoGraph>) -> Result<WeightedGraph> {
    let raw: WeightedGraphJson = serde_json::from_str(text).map_err(json_error)?;
    for id in raw.weights.keys() {
        if !raw.vertices.contains(id) {
            return Err(Error::UnknownVertex(id.clone()));
        }
    }
    let weights = raw
        .vertices
        .iter()
        .map(|v| match raw.weights.get(v) {
            Some(w) => rational_value(w),
            None => Ok(rational::one()),
        })
        .collect::<Result<Vec<_>>>()?;
    match (raw.edges, parent) {
        (None, Some(parent)) => WeightedGraph::induced(parent, &raw.vertices, weights),
        (Some(edges), None) => WeightedGraph::new(OrthoGraph::new(raw.vertices, &edges)?, weights),
        (Some(edges), Some(parent)) => {
            let given = OrthoGraph::new(raw.vertices.clone(), &edges)?;
            let induced = WeightedGraph::induced(parent, &raw.vertices, weights)?;
            if &given != induced.graph() {
                return Err(Error::InvalidGraph(
                    "edge list differs from the orthogonality graph restricted to these vertices"
                        .into(),
                ));
            }
            Ok(induced)
        }
        (None, None) => Err(Error::InvalidGraph(
            "graph has no edge list and no parent scenario".into(),
        )),
    }
}
