//! Instance files: JSON documents describing the graph, both matroids and optionally a
//! leader strategy or a marginal vector.
//!
//! ```json
//! {
//!   "graph": { "vertices": 3, "edges": [[0, 1, 1.0], [1, 2, 2.5]] },
//!   "leader": { "kind": "uniform", "rank": 1 },
//!   "follower": { "kind": "partition", "blocks": [[0, 1], [2]], "caps": [1, 1] },
//!   "strategy": [ { "p": 0.5, "set": [0] }, { "p": 0.5, "set": [1] } ]
//! }
//! ```

use std::fs;
use std::path::Path;

use rmvci::{InterdictionStrategy, Matroid, VertexSet, WeightedGraph};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub graph: GraphSpec,
    pub leader: MatroidSpec,
    pub follower: MatroidSpec,
    #[serde(default)]
    pub strategy: Option<Vec<SupportEntry>>,
    #[serde(default)]
    pub marginals: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    /// Optional; defaults to one more than the largest endpoint.
    #[serde(default)]
    pub vertices: Option<usize>,
    pub edges: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidSpec {
    Uniform { rank: usize },
    Partition { blocks: Vec<Vec<usize>>, caps: Vec<usize> },
    /// Ground element `i` is edge `i` of a separate multigraph on `nodes` nodes.
    Graphic { nodes: usize, edges: Vec<(usize, usize)> },
    /// Generating sets; the family is their downward closure.
    Explicit { sets: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SupportEntry {
    pub p: f64,
    pub set: Vec<usize>,
}

/// A validated instance.
pub struct Instance {
    pub graph: WeightedGraph,
    pub leader: Matroid,
    pub follower: Matroid,
    pub strategy: Option<InterdictionStrategy>,
    pub marginals: Option<Vec<f64>>,
    pub digest: String,
}

fn input(field: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{field}: {err}"))
}

fn build_matroid(field: &str, n: usize, spec: MatroidSpec) -> Result<Matroid, CliError> {
    let m = match spec {
        MatroidSpec::Uniform { rank } => Matroid::uniform(n, rank),
        MatroidSpec::Partition { blocks, caps } => Matroid::partition(n, blocks, caps),
        MatroidSpec::Graphic { nodes, edges } => {
            if edges.len() != n {
                return Err(input(
                    &format!("{field}.edges"),
                    format!("graphic matroid has {} elements but the graph has {n} vertices", edges.len()),
                ));
            }
            Matroid::graphic(nodes, edges)
        }
        MatroidSpec::Explicit { sets } => {
            let sets: Vec<VertexSet> = sets.into_iter().map(VertexSet::from_ids).collect();
            Matroid::explicit(n, &sets)
        }
    };
    m.map_err(|e| input(field, e))
}

pub fn strategy_from_entries(
    field: &str,
    leader: &Matroid,
    entries: Vec<SupportEntry>,
) -> Result<InterdictionStrategy, CliError> {
    let support = entries
        .into_iter()
        .map(|e| (e.p, VertexSet::from_ids(e.set)))
        .collect();
    InterdictionStrategy::new(leader, support).map_err(|e| input(field, e))
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Parses JSON into `T`, naming the offending field on failure.
pub fn parse<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "document".to_string() } else { path };
        input(&field, e.into_inner())
    })
}

pub fn load(path: &Path) -> Result<Instance, CliError> {
    let bytes = read(path)?;
    let file: InstanceFile = parse(&bytes)?;
    let max_id = file.graph.edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
    let n = match file.graph.vertices {
        Some(n) if n < max_id => {
            return Err(input(
                "graph.vertices",
                format!("{n} vertices but an edge uses vertex {}", max_id - 1),
            ))
        }
        Some(n) => n,
        None => max_id,
    };
    let graph = WeightedGraph::new(n, file.graph.edges).map_err(|e| input("graph.edges", e))?;
    let leader = build_matroid("leader", n, file.leader)?;
    let follower = build_matroid("follower", n, file.follower)?;
    let strategy = file
        .strategy
        .map(|entries| strategy_from_entries("strategy", &leader, entries))
        .transpose()?;
    if let Some(q) = &file.marginals {
        if q.len() != n {
            return Err(input("marginals", format!("{} values for {n} vertices", q.len())));
        }
    }
    Ok(Instance {
        graph,
        leader,
        follower,
        strategy,
        marginals: file.marginals,
        digest: digest(&bytes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_instance(text: &str) -> Result<InstanceFile, CliError> {
        parse(text.as_bytes())
    }

    #[test]
    fn missing_field_is_named() {
        let err = parse_instance(r#"{"graph": {"edges": []}, "leader": {"kind": "uniform"}, "follower": {"kind": "uniform", "rank": 0}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("leader"), "{err}");
        assert!(err.to_string().contains("rank"), "{err}");
    }

    #[test]
    fn wrong_type_is_located() {
        let err = parse_instance(r#"{"graph": {"edges": [[0, 1, "heavy"]]}, "leader": {"kind": "uniform", "rank": 1}, "follower": {"kind": "uniform", "rank": 1}}"#)
            .unwrap_err();
        assert!(err.to_string().starts_with("invalid input: graph.edges[0]"), "{err}");
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            digest(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
