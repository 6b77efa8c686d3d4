//! Small labelled pattern graphs and the subgraph algebra used by the
//! decomposition: edge-subgraphs without isolated vertices, edge
//! complements, unions with vertex sets, order-preserving relabelling and
//! brute-force isomorphism.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest vertex label accepted anywhere.
pub const MAX_VERTICES: usize = 16;

/// Isomorphism is decided by exhaustive permutation search, capped here.
pub const ISOMORPHISM_CAP: usize = 8;

/// A simple undirected graph on an explicit set of positive vertex labels.
///
/// Pattern graphs `F` live on `[k] = {1, ..., k}`; subgraphs produced by
/// [`PatternGraph::edge_subgraphs`] keep the labels of `F`, so their vertex
/// set is an arbitrary subset of `[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternGraph {
    vertices: Vec<u8>,
    edges: Vec<(u8, u8)>,
}

/// A sorted, duplicate-free set of vertex labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexSubset(Vec<u8>);

impl VertexSubset {
    pub fn new(members: impl IntoIterator<Item = u8>) -> Self {
        let set: BTreeSet<u8> = members.into_iter().collect();
        VertexSubset(set.into_iter().collect())
    }

    pub fn empty() -> Self {
        VertexSubset(Vec::new())
    }

    pub fn members(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u8) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// All subsets of `[k]`, ordered by size then lexicographically.
    pub fn all_subsets(k: usize) -> Vec<VertexSubset> {
        let mut out: Vec<VertexSubset> = (0u32..(1 << k))
            .map(|mask| VertexSubset((0..k as u8).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()))
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

impl fmt::Display for VertexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

fn normalise_edge(v: u8, w: u8) -> Result<(u8, u8)> {
    if v == w {
        return Err(Error::invalid(format!("self-loop at vertex {v}")));
    }
    Ok(if v < w { (v, w) } else { (w, v) })
}

impl PatternGraph {
    /// Graph on the vertex set `[k]`.
    pub fn new(k: usize, edges: &[(u8, u8)]) -> Result<Self> {
        if k > MAX_VERTICES {
            return Err(Error::invalid(format!("pattern has {k} vertices, limit is {MAX_VERTICES}")));
        }
        Self::with_vertices((1..=k as u8).collect::<Vec<_>>(), edges)
    }

    /// Graph on an explicit vertex set.
    pub fn with_vertices(vertices: impl IntoIterator<Item = u8>, edges: &[(u8, u8)]) -> Result<Self> {
        let vset: BTreeSet<u8> = vertices.into_iter().collect();
        if vset.contains(&0) {
            return Err(Error::invalid("vertex labels start at 1"));
        }
        if vset.len() > MAX_VERTICES {
            return Err(Error::invalid(format!("pattern has {} vertices, limit is {MAX_VERTICES}", vset.len())));
        }
        let mut eset = BTreeSet::new();
        for &(v, w) in edges {
            let e = normalise_edge(v, w)?;
            if !vset.contains(&e.0) || !vset.contains(&e.1) {
                return Err(Error::invalid(format!("edge {}-{} leaves the vertex set", e.0, e.1)));
            }
            if !eset.insert(e) {
                return Err(Error::invalid(format!("duplicate edge {}-{}", e.0, e.1)));
            }
        }
        Ok(PatternGraph { vertices: vset.into_iter().collect(), edges: eset.into_iter().collect() })
    }

    /// The graph spanned by `edges`: its vertices are exactly their endpoints.
    pub fn from_edges(edges: &[(u8, u8)]) -> Result<Self> {
        let vertices: Vec<u8> = edges.iter().flat_map(|&(v, w)| [v, w]).collect();
        Self::with_vertices(vertices, edges)
    }

    /// The graph with no vertices and no edges.
    pub fn empty() -> Self {
        PatternGraph { vertices: Vec::new(), edges: Vec::new() }
    }

    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[u8] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(u8, u8)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn has_edge(&self, v: u8, w: u8) -> bool {
        let e = if v < w { (v, w) } else { (w, v) };
        self.edges.binary_search(&e).is_ok()
    }

    /// True when the vertex set is exactly `{1, ..., k}`.
    pub fn is_on_range(&self) -> bool {
        self.vertices.iter().enumerate().all(|(i, &v)| v as usize == i + 1)
    }

    pub fn degree(&self, v: u8) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.vertices.iter().map(|&v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }

    pub fn has_isolated_vertices(&self) -> bool {
        self.vertices.iter().any(|&v| self.degree(v) == 0)
    }

    /// Connected components, each keeping the original labels, ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<PatternGraph> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &self.vertices {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if !comp.insert(v) {
                    continue;
                }
                for &(a, b) in &self.edges {
                    if a == v && !comp.contains(&b) {
                        stack.push(b);
                    } else if b == v && !comp.contains(&a) {
                        stack.push(a);
                    }
                }
            }
            let edges: Vec<(u8, u8)> =
                self.edges.iter().copied().filter(|(a, _)| comp.contains(a)).collect();
            seen.extend(comp.iter().copied());
            out.push(PatternGraph { vertices: comp.into_iter().collect(), edges });
        }
        out
    }

    /// The empty graph counts as connected; so does a single vertex.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Every graph obtained from a subset of the edges, keeping only the
    /// endpoints of the chosen edges. Ordered by edge count, then by the
    /// lexicographic order of the edge list; the first entry is the empty
    /// graph.
    pub fn edge_subgraphs(&self) -> Vec<PatternGraph> {
        let e = self.edges.len();
        assert!(e < 32, "too many edges to enumerate subsets");
        let mut out: Vec<PatternGraph> = (0u32..(1u32 << e))
            .map(|mask| {
                let chosen: Vec<(u8, u8)> = (0..e).filter(|i| mask & (1 << i) != 0).map(|i| self.edges[i]).collect();
                PatternGraph::from_edges(&chosen).expect("subset of valid edges")
            })
            .collect();
        out.sort_by(|a, b| a.edges.len().cmp(&b.edges.len()).then_with(|| a.edges.cmp(&b.edges)));
        out
    }

    /// `H^c`: the edges of `self` missing from `h`, with the resulting
    /// isolated vertices dropped.
    pub fn edge_complement(&self, h: &PatternGraph) -> Result<PatternGraph> {
        if let Some(&(v, w)) = h.edges.iter().find(|&&(v, w)| !self.has_edge(v, w)) {
            return Err(Error::invalid(format!("edge {v}-{w} is not an edge of the ambient graph")));
        }
        let rest: Vec<(u8, u8)> = self.edges.iter().copied().filter(|&(v, w)| !h.has_edge(v, w)).collect();
        PatternGraph::from_edges(&rest)
    }

    /// `H ∪ A`: adds the vertices of `a` as isolated vertices.
    pub fn union_with_vertices(&self, a: &VertexSubset) -> PatternGraph {
        let vertices: BTreeSet<u8> = self.vertices.iter().chain(a.members()).copied().collect();
        PatternGraph { vertices: vertices.into_iter().collect(), edges: self.edges.clone() }
    }

    /// Position (0-based) of each vertex under the order-preserving map onto
    /// `{1, ..., |V|}`.
    pub fn position_of(&self, v: u8) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// The unique graph on `{1, ..., |V|}` isomorphic to `self` via the
    /// order-preserving relabelling of its vertices.
    pub fn canonical_relabel(&self) -> PatternGraph {
        let map = |v: u8| self.position_of(v).expect("edge endpoint in vertex set") as u8 + 1;
        let mut edges: Vec<(u8, u8)> = self.edges.iter().map(|&(v, w)| (map(v), map(w))).collect();
        edges.sort_unstable();
        PatternGraph { vertices: (1..=self.k() as u8).collect(), edges }
    }

    /// Edges as 0-based position pairs of the canonical relabelling.
    pub fn position_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(v, w)| (self.position_of(v).unwrap(), self.position_of(w).unwrap()))
            .collect()
    }

    /// Compact text form: `k=3; edges=1-2,2-3` on `[k]`, otherwise
    /// `v=2,5; edges=2-5`.
    pub fn to_compact(&self) -> String {
        let edges = self.edges.iter().map(|(v, w)| format!("{v}-{w}")).collect::<Vec<_>>().join(",");
        if self.is_on_range() {
            format!("k={}; edges={}", self.k(), edges)
        } else {
            let vs = self.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
            format!("v={vs}; edges={edges}")
        }
    }

    /// Built-in pattern by name.
    pub fn named(name: &str) -> Option<PatternGraph> {
        let (k, edges): (usize, &[(u8, u8)]) = match name {
            "K1" => (1, &[]),
            "K2" => (2, &[(1, 2)]),
            "K3" => (3, &[(1, 2), (1, 3), (2, 3)]),
            "P3" => (3, &[(1, 2), (2, 3)]),
            "P3c1" => (3, &[(1, 2), (1, 3)]),
            "P3c3" => (3, &[(1, 3), (2, 3)]),
            "C4" => (4, &[(1, 2), (2, 3), (3, 4), (1, 4)]),
            "K3plusedge" => (4, &[(1, 2), (1, 3), (2, 3), (3, 4)]),
            _ => return None,
        };
        Some(PatternGraph::new(k, edges).expect("built-in patterns are valid"))
    }

    /// Name of the built-in pattern equal to `self`, if any.
    pub fn builtin_name(&self) -> Option<&'static str> {
        ["K1", "K2", "K3", "P3", "P3c1", "P3c3", "C4", "K3plusedge"]
            .into_iter()
            .find(|n| PatternGraph::named(n).as_ref() == Some(self))
    }
}

impl fmt::Display for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.builtin_name() {
            Some(name) => f.write_str(name),
            None => f.write_str(&self.to_compact()),
        }
    }
}

impl FromStr for PatternGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(g) = PatternGraph::named(s) {
            return Ok(g);
        }
        let mut k: Option<usize> = None;
        let mut vertices: Option<Vec<u8>> = None;
        let mut edges = Vec::new();
        for part in s.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("expected key=value in pattern `{s}`")))?;
            let value = value.trim();
            match key.trim() {
                "k" => k = Some(value.parse().map_err(|_| Error::parse(format!("bad vertex count `{value}`")))?),
                "v" => {
                    vertices = Some(
                        value
                            .split(',')
                            .filter(|t| !t.trim().is_empty())
                            .map(|t| t.trim().parse::<u8>().map_err(|_| Error::parse(format!("bad vertex `{t}`"))))
                            .collect::<Result<_>>()?,
                    )
                }
                "edges" => {
                    for tok in value.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                        let (a, b) = tok
                            .split_once('-')
                            .ok_or_else(|| Error::parse(format!("bad edge `{tok}`, expected v-w")))?;
                        let a: u8 = a.trim().parse().map_err(|_| Error::parse(format!("bad edge `{tok}`")))?;
                        let b: u8 = b.trim().parse().map_err(|_| Error::parse(format!("bad edge `{tok}`")))?;
                        edges.push((a, b));
                    }
                }
                other => return Err(Error::parse(format!("unknown pattern key `{other}`"))),
            }
        }
        match (k, vertices) {
            (Some(k), None) => PatternGraph::new(k, &edges),
            (None, Some(v)) => PatternGraph::with_vertices(v, &edges),
            (None, None) => Err(Error::parse(format!("pattern `{s}` is neither a built-in name nor `k=..; edges=..`"))),
            (Some(_), Some(_)) => Err(Error::parse("give either k= or v=, not both")),
        }
    }
}

impl Serialize for PatternGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PatternGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Calls `f` on every permutation of `0..n` in lexicographic order.
pub(crate) fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        if !next_permutation(&mut p) {
            break;
        }
    }
}

/// Decides isomorphism by trying every bijection between the vertex sets.
pub fn are_isomorphic(a: &PatternGraph, b: &PatternGraph) -> Result<bool> {
    for g in [a, b] {
        if g.k() > ISOMORPHISM_CAP {
            return Err(Error::guard(format!(
                "isomorphism test limited to {ISOMORPHISM_CAP} vertices, got {}",
                g.k()
            )));
        }
    }
    if a.k() != b.k() || a.edge_count() != b.edge_count() || a.degree_sequence() != b.degree_sequence() {
        return Ok(false);
    }
    let pa = a.position_edges();
    let target: BTreeSet<(usize, usize)> = b.position_edges().into_iter().collect();
    let mut found = false;
    let mut p: Vec<usize> = (0..a.k()).collect();
    loop {
        if pa.iter().all(|&(v, w)| {
            let (x, y) = (p[v], p[w]);
            target.contains(&if x < y { (x, y) } else { (y, x) })
        }) {
            found = true;
            break;
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    Ok(found)
}
