//! Plumbing graphs of spheres.
//!
//! Vertices carry integer framings (self-intersections), edges are single
//! transverse intersections. Every move returns a fresh graph. A vertex id,
//! once used, is never handed out again by the same graph lineage, so move
//! scripts can keep referring to vertices created by earlier moves.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::SymmetricForm;
use crate::numbers::{cf_eval, ContinuedFraction, LensSpace, NumberError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlumbingError {
    #[error("empty framing list")]
    EmptyInput,
    #[error("no edge between `{0}` and `{1}`")]
    MissingEdge(String, String),
    #[error("no vertex `{0}`")]
    MissingVertex(String),
    #[error("vertex `{0}` has framing {1}, not -1")]
    NotMinusOne(String, i64),
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("graph is not a linear chain")]
    NotLinear,
    #[error("vertex id `{0}` is already in use or retired")]
    IdInUse(String),
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error(transparent)]
    Number(#[from] NumberError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub framing: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlumbingGraph {
    vertices: Vec<Vertex>,
    edges: BTreeSet<(String, String)>,
    retired: BTreeSet<String>,
    next_fresh: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<Vertex>,
    edges: Vec<[String; 2]>,
}

fn edge_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl PlumbingGraph {
    pub fn empty() -> Self {
        PlumbingGraph { vertices: Vec::new(), edges: BTreeSet::new(), retired: BTreeSet::new(), next_fresh: 1 }
    }

    /// Builds a graph from explicit vertices and edges, rejecting loops,
    /// duplicate ids and edges to unknown vertices.
    pub fn from_parts(vertices: Vec<Vertex>, edges: &[(String, String)]) -> Result<Self, PlumbingError> {
        let mut g = PlumbingGraph::empty();
        for v in vertices {
            if g.has_vertex(&v.id) {
                return Err(PlumbingError::Invalid(format!("duplicate vertex `{}`", v.id)));
            }
            g.vertices.push(v);
        }
        for (a, b) in edges {
            if a == b {
                return Err(PlumbingError::Invalid(format!("loop at `{a}`")));
            }
            for end in [a, b] {
                if !g.has_vertex(end) {
                    return Err(PlumbingError::MissingVertex(end.clone()));
                }
            }
            if !g.edges.insert(edge_key(a, b)) {
                return Err(PlumbingError::Invalid(format!("multi-edge `{a}`-`{b}`")));
            }
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.vertices.iter().any(|v| v.id == id)
    }

    pub fn framing(&self, id: &str) -> Option<i64> {
        self.vertices.iter().find(|v| v.id == id).map(|v| v.framing)
    }

    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        self.edges.contains(&edge_key(a, b))
    }

    pub fn neighbors(&self, id: &str) -> Vec<String> {
        self.vertices.iter().filter(|v| v.id != id && self.adjacent(id, &v.id)).map(|v| v.id.clone()).collect()
    }

    /// Current ids followed by retired ones.
    pub fn used_ids(&self) -> Vec<String> {
        self.vertices.iter().map(|v| v.id.clone()).chain(self.retired.iter().cloned()).collect()
    }

    /// True if `id` is not present and has never been used.
    pub fn id_available(&self, id: &str) -> bool {
        !self.has_vertex(id) && !self.retired.contains(id)
    }

    /// Marks ids as used elsewhere so they are never generated here.
    pub fn reserve_ids<'a>(&mut self, ids: impl IntoIterator<Item = &'a str>) {
        for id in ids {
            if !self.has_vertex(id) {
                self.retired.insert(id.to_string());
            }
        }
    }

    fn fresh_id(&mut self) -> String {
        loop {
            let id = format!("e{}", self.next_fresh);
            self.next_fresh += 1;
            if self.id_available(&id) {
                return id;
            }
        }
    }

    fn claim_id(&mut self, requested: Option<&str>) -> Result<String, PlumbingError> {
        match requested {
            Some(id) if self.id_available(id) => Ok(id.to_string()),
            Some(id) => Err(PlumbingError::IdInUse(id.to_string())),
            None => Ok(self.fresh_id()),
        }
    }

    fn shift_framing(&mut self, id: &str, delta: i64) {
        if let Some(v) = self.vertices.iter_mut().find(|v| v.id == id) {
            v.framing += delta;
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let json = GraphJson {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|(a, b)| [a.clone(), b.clone()]).collect(),
        };
        serde_json::to_value(json).expect("graph json")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, PlumbingError> {
        let json: GraphJson =
            serde_json::from_value(value.clone()).map_err(|e| PlumbingError::Invalid(e.to_string()))?;
        let edges: Vec<(String, String)> = json.edges.into_iter().map(|[a, b]| (a, b)).collect();
        Self::from_parts(json.vertices, &edges)
    }
}

/// Path graph `s1 - s2 - ... - sk` with the given framings.
pub fn build_linear(framings: &[i64]) -> Result<PlumbingGraph, PlumbingError> {
    if framings.is_empty() {
        return Err(PlumbingError::EmptyInput);
    }
    let vertices: Vec<Vertex> =
        framings.iter().enumerate().map(|(i, &f)| Vertex { id: format!("s{}", i + 1), framing: f }).collect();
    let edges: Vec<(String, String)> = (1..framings.len()).map(|i| (format!("s{i}"), format!("s{}", i + 1))).collect();
    PlumbingGraph::from_parts(vertices, &edges)
}

/// Framings on the diagonal, 1 for each edge, basis in vertex order.
pub fn linking_matrix(g: &PlumbingGraph) -> SymmetricForm {
    let ids: Vec<&str> = g.vertices.iter().map(|v| v.id.as_str()).collect();
    let rows: Vec<Vec<i64>> = g
        .vertices
        .iter()
        .map(|u| {
            g.vertices
                .iter()
                .map(|v| {
                    if u.id == v.id {
                        u.framing
                    } else if g.adjacent(&u.id, &v.id) {
                        1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    SymmetricForm::from_integers(&ids, &rows).expect("plumbing linking matrix is symmetric")
}

/// Blows up the intersection point of an edge: a new `-1` sphere meets both
/// ends, each of which loses one from its framing.
pub fn blow_up_edge(g: &PlumbingGraph, a: &str, b: &str, new_id: Option<&str>) -> Result<PlumbingGraph, PlumbingError> {
    if !g.adjacent(a, b) {
        return Err(PlumbingError::MissingEdge(a.to_string(), b.to_string()));
    }
    let mut out = g.clone();
    let id = out.claim_id(new_id)?;
    out.edges.remove(&edge_key(a, b));
    out.shift_framing(a, -1);
    out.shift_framing(b, -1);
    out.vertices.push(Vertex { id: id.clone(), framing: -1 });
    out.edges.insert(edge_key(a, &id));
    out.edges.insert(edge_key(b, &id));
    Ok(out)
}

/// Blows up a generic point of a sphere: its framing drops by one and a new
/// `-1` leaf is attached.
pub fn blow_up_vertex(g: &PlumbingGraph, v: &str, new_id: Option<&str>) -> Result<PlumbingGraph, PlumbingError> {
    if !g.has_vertex(v) {
        return Err(PlumbingError::MissingVertex(v.to_string()));
    }
    let mut out = g.clone();
    let id = out.claim_id(new_id)?;
    out.shift_framing(v, -1);
    out.vertices.push(Vertex { id: id.clone(), framing: -1 });
    out.edges.insert(edge_key(v, &id));
    Ok(out)
}

/// Adds an isolated `-1` sphere (connected sum with a reversed CP^2).
pub fn blow_up_isolated(g: &PlumbingGraph, new_id: Option<&str>) -> Result<PlumbingGraph, PlumbingError> {
    let mut out = g.clone();
    let id = out.claim_id(new_id)?;
    out.vertices.push(Vertex { id, framing: -1 });
    Ok(out)
}

/// Blows down a `-1` sphere of valence at most two.
pub fn blow_down_vertex(g: &PlumbingGraph, v: &str) -> Result<PlumbingGraph, PlumbingError> {
    let framing = g.framing(v).ok_or_else(|| PlumbingError::MissingVertex(v.to_string()))?;
    if framing != -1 {
        return Err(PlumbingError::NotMinusOne(v.to_string(), framing));
    }
    let neighbors = g.neighbors(v);
    if neighbors.len() > 2 {
        return Err(PlumbingError::UnsupportedConfiguration(format!(
            "`{v}` has valence {}; blow it down at lattice level",
            neighbors.len()
        )));
    }
    if neighbors.len() == 2 && g.adjacent(&neighbors[0], &neighbors[1]) {
        return Err(PlumbingError::UnsupportedConfiguration(format!(
            "neighbours `{}` and `{}` of `{v}` already intersect; blowing down would create a multi-edge",
            neighbors[0], neighbors[1]
        )));
    }
    let mut out = g.clone();
    out.vertices.retain(|x| x.id != v);
    out.edges.retain(|(a, b)| a != v && b != v);
    out.retired.insert(v.to_string());
    for n in &neighbors {
        out.shift_framing(n, 1);
    }
    if let [a, b] = neighbors.as_slice() {
        out.edges.insert(edge_key(a, b));
    }
    Ok(out)
}

/// Vertex ids of a linear chain in order, starting from the end that comes
/// first in vertex order. `None` unless the graph is a nonempty path.
pub fn chain_order(g: &PlumbingGraph) -> Option<Vec<String>> {
    let n = g.vertices.len();
    if n == 0 || g.edges.len() != n - 1 {
        return None;
    }
    let degree = |id: &str| g.neighbors(id).len();
    if g.vertices.iter().any(|v| degree(&v.id) > 2) {
        return None;
    }
    let start = g.vertices.iter().find(|v| degree(&v.id) <= 1)?.id.clone();
    let mut order = vec![start];
    while order.len() < n {
        let last = order.last().expect("nonempty");
        let next = g.neighbors(last).into_iter().find(|x| !order.contains(x))?;
        order.push(next);
    }
    Some(order)
}

/// The lens space bounding a linear plumbing. The empty graph bounds `S^3`.
pub fn boundary_lens(g: &PlumbingGraph) -> Result<LensSpace, PlumbingError> {
    if g.vertices.is_empty() {
        return Ok(LensSpace::sphere());
    }
    let order = chain_order(g).ok_or(PlumbingError::NotLinear)?;
    let framings: Vec<i64> = order.iter().map(|id| g.framing(id).expect("vertex")).collect();
    let value = cf_eval(&ContinuedFraction(framings))?;
    Ok(LensSpace::from_surgery_coefficient(&value)?)
}

/// Every induced path reading `-n-2, -2, ..., -2` (n-1 vertices).
pub fn detect_cn_chain(g: &PlumbingGraph, n: i64) -> Vec<Vec<String>> {
    if n < 2 {
        return Vec::new();
    }
    let len = (n - 1) as usize;
    let mut found = Vec::new();
    for head in g.vertices.iter().filter(|v| v.framing == -n - 2) {
        let mut path = vec![head.id.clone()];
        extend_chain(g, len, &mut path, &mut found);
    }
    found
}

fn extend_chain(g: &PlumbingGraph, len: usize, path: &mut Vec<String>, found: &mut Vec<Vec<String>>) {
    if path.len() == len {
        found.push(path.clone());
        return;
    }
    let last = path.last().expect("nonempty").clone();
    for next in g.neighbors(&last) {
        if g.framing(&next) != Some(-2) || path.contains(&next) {
            continue;
        }
        // Induced: the new vertex meets nothing earlier than `last`.
        if path[..path.len() - 1].iter().any(|p| g.adjacent(p, &next)) {
            continue;
        }
        path.push(next);
        extend_chain(g, len, path, found);
        path.pop();
    }
}

/// Deterministic DOT rendering; nodes and edges sorted by id.
pub fn to_dot(g: &PlumbingGraph) -> String {
    let mut ids: Vec<&Vertex> = g.vertices.iter().collect();
    ids.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = String::from("graph plumbing {\n");
    for v in ids {
        writeln!(out, "  \"{}\" [label=\"{}\"];", v.id, v.framing).expect("write to string");
    }
    for (a, b) in &g.edges {
        writeln!(out, "  \"{a}\" -- \"{b}\";").expect("write to string");
    }
    out.push_str("}\n");
    out
}
