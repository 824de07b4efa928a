//! JSON graph description.
//!
//! ```json
//! { "vertices": ["v", "a", "b", "w"],
//!   "edges": [ { "from": "v", "to": "a" }, { "from": "a", "to": "w", "directed": true, "intensity": 2.0 } ] }
//! ```
//! or a built-in family: `{ "builtin": "Kq", "params": { "q": 3 } }`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    calibrated_chain, complete, cycle, directed_edge, directed_path, path, paw, BaseGraph, DirectedLine,
    FiniteGraph, IntegerLine, RawEdge, VertexId,
};
use crate::error::{Error, Result};

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: VertexId,
    pub to: VertexId,
    #[serde(default)]
    pub directed: bool,
    #[serde(default = "one")]
    pub intensity: f64,
    #[serde(default = "one_u32")]
    pub multiplicity: u32,
}

/// Built-in graph families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", content = "params")]
pub enum BuiltinSpec {
    /// Undirected ℤ (oracle).
    Z,
    /// Directed ℤ (oracle).
    Zdir,
    Kq { q: usize },
    Path { k: usize },
    Cycle { n: usize },
    Paw,
    DirectedEdge,
    DirectedPath { l: usize, intensity: f64 },
    /// Directed path of length `l` calibrated to critical time `t_star`.
    Calibrated { l: usize, t_star: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Builtin(BuiltinSpec),
    Explicit { vertices: Vec<VertexId>, edges: Vec<EdgeSpec> },
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph spec serializes")
    }

    /// Validates the description and builds the graph.
    pub fn build(&self) -> Result<BaseGraph> {
        match self {
            GraphSpec::Builtin(b) => b.build(),
            GraphSpec::Explicit { vertices, edges } => {
                let lookup = |id: &VertexId| {
                    vertices.iter().position(|v| v == id).ok_or_else(|| Error::UnknownVertex(id.clone()))
                };
                let mut raw = Vec::with_capacity(edges.len());
                for e in edges {
                    if e.from == e.to {
                        return Err(Error::LoopEdge(e.from.clone()));
                    }
                    raw.push(RawEdge {
                        tail: lookup(&e.from)?,
                        head: lookup(&e.to)?,
                        oriented: e.directed,
                        intensity: e.intensity,
                        multiplicity: e.multiplicity,
                    });
                }
                Ok(FiniteGraph::new(vertices.clone(), raw)?.into())
            }
        }
    }

    /// Normalized description of an existing graph.
    pub fn describe(g: &BaseGraph) -> Result<Self> {
        match g {
            BaseGraph::Finite(f) => Ok(GraphSpec::Explicit {
                vertices: f.ids().to_vec(),
                edges: f
                    .edges()
                    .iter()
                    .map(|e| EdgeSpec {
                        from: f.id(e.tail).clone(),
                        to: f.id(e.head).clone(),
                        directed: e.oriented,
                        intensity: e.intensity,
                        multiplicity: e.multiplicity,
                    })
                    .collect(),
            }),
            BaseGraph::Oracle(o) => o.spec().map(GraphSpec::Builtin).ok_or_else(|| {
                Error::Spec(format!("oracle graph `{}` has no file representation", o.name()))
            }),
        }
    }
}

impl BuiltinSpec {
    pub fn build(&self) -> Result<BaseGraph> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Spec(format!("invalid parameters for builtin: {what}")))
            }
        };
        Ok(match *self {
            BuiltinSpec::Z => BaseGraph::Oracle(Arc::new(IntegerLine)),
            BuiltinSpec::Zdir => BaseGraph::Oracle(Arc::new(DirectedLine)),
            BuiltinSpec::Kq { q } => {
                need(q >= 2, "q ≥ 2")?;
                complete(q)
            }
            BuiltinSpec::Path { k } => {
                need(k >= 1, "k ≥ 1")?;
                path(k)
            }
            BuiltinSpec::Cycle { n } => {
                need(n >= 3, "n ≥ 3")?;
                cycle(n)
            }
            BuiltinSpec::Paw => paw(),
            BuiltinSpec::DirectedEdge => directed_edge(),
            BuiltinSpec::DirectedPath { l, intensity } => {
                need(l >= 1, "l ≥ 1")?;
                directed_path(l, intensity)?
            }
            BuiltinSpec::Calibrated { l, t_star } => calibrated_chain(l, t_star)?,
        })
    }
}

/// Parses and builds a graph file.
pub fn build_graph(spec: &GraphSpec) -> Result<BaseGraph> {
    spec.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paw_from_json() {
        let text = r#"{"vertices":["v","a","b","w"],
            "edges":[{"from":"v","to":"a"},{"from":"v","to":"b"},{"from":"a","to":"b"},{"from":"a","to":"w"}]}"#;
        let g = GraphSpec::from_json(text).unwrap().build().unwrap();
        let f = g.as_finite().unwrap();
        assert_eq!((f.len(), f.edges().len(), g.delta()), (4, 4, 3));
    }

    #[test]
    fn loop_in_file() {
        let text = r#"{"vertices":["x"],"edges":[{"from":"x","to":"x"}]}"#;
        let err = GraphSpec::from_json(text).unwrap().build().unwrap_err();
        assert_eq!(err, Error::LoopEdge("x".into()));
    }

    #[test]
    fn missing_endpoint() {
        let text = r#"{"vertices":["x","y"],"edges":[{"from":"x","to":"z"}]}"#;
        let err = GraphSpec::from_json(text).unwrap().build().unwrap_err();
        assert_eq!(err, Error::UnknownVertex("z".into()));
    }

    #[test]
    fn negative_intensity_in_file() {
        let text = r#"{"vertices":[0,1],"edges":[{"from":0,"to":1,"intensity":-1}]}"#;
        let err = GraphSpec::from_json(text).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::NonpositiveIntensity { .. }));
    }

    #[test]
    fn builtins_parse() {
        let g = GraphSpec::from_json(r#"{"builtin":"Kq","params":{"q":4}}"#).unwrap().build().unwrap();
        assert_eq!(g.as_finite().unwrap().len(), 4);
        let z = GraphSpec::from_json(r#"{"builtin":"Z"}"#).unwrap().build().unwrap();
        assert!(!z.is_finite());
        assert_eq!(GraphSpec::describe(&z).unwrap(), GraphSpec::Builtin(BuiltinSpec::Z));
        assert!(GraphSpec::from_json(r#"{"builtin":"Kq","params":{"q":1}}"#).unwrap().build().is_err());
    }

    #[test]
    fn round_trip_is_idempotent_after_normalization() {
        let text = r#"{"vertices":["p","q","r"],
            "edges":[{"from":"p","to":"q","multiplicity":2,"intensity":0.5},{"from":"q","to":"r","directed":true}]}"#;
        let first = GraphSpec::describe(&GraphSpec::from_json(text).unwrap().build().unwrap()).unwrap();
        let again = GraphSpec::describe(&GraphSpec::from_json(&first.to_json()).unwrap().build().unwrap()).unwrap();
        assert_eq!(first, again);
        let GraphSpec::Explicit { edges, .. } = &first else { panic!() };
        assert_eq!(edges[0].intensity, 1.0);
        assert_eq!(edges[0].multiplicity, 1);
    }
}
