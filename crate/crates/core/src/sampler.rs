//! Label schemes, conditional edge models and reproducible graph samples.

use std::fmt;
use std::io::{BufRead, Write};

use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::Graphon;
use crate::par::map_range;
use crate::rng::{domain, StreamKey};

const PROB_TOLERANCE: f64 = 1e-12;

/// A finitely supported law on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiscreteRepr", into = "DiscreteRepr")]
pub struct DiscreteLaw {
    atoms: Vec<f64>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DiscreteRepr {
    atoms: Vec<f64>,
    probs: Vec<f64>,
}

impl TryFrom<DiscreteRepr> for DiscreteLaw {
    type Error = Error;
    fn try_from(r: DiscreteRepr) -> Result<Self> {
        DiscreteLaw::new(r.atoms, r.probs)
    }
}

impl From<DiscreteLaw> for DiscreteRepr {
    fn from(d: DiscreteLaw) -> Self {
        DiscreteRepr { atoms: d.atoms, probs: d.probs }
    }
}

impl DiscreteLaw {
    pub fn new(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != probs.len() {
            return Err(Error::invalid("discrete law needs matching, non-empty atoms and probs"));
        }
        if atoms.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::invalid("discrete atoms must lie in [0, 1]"));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::invalid("discrete probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::invalid(format!("discrete probabilities sum to {total}, not 1")));
        }
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(DiscreteLaw { atoms, probs, cdf })
    }

    pub fn point(x: f64) -> Result<Self> {
        DiscreteLaw::new(vec![x], vec![1.0])
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Inverse-CDF draw from a uniform `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u);
        self.atoms[i.min(self.atoms.len() - 1)]
    }
}

/// Discrete label laws, shared by every vertex or given per vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DiscreteLabels {
    Shared(DiscreteLaw),
    PerVertex { per_vertex: Vec<DiscreteLaw> },
}

/// How the vertex labels `U_1, ..., U_n` are produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LabelScheme {
    IidUniform,
    Lattice,
    #[serde(rename = "discrete")]
    IndependentDiscrete(DiscreteLabels),
}

impl LabelScheme {
    pub fn discrete(law: DiscreteLaw) -> Self {
        LabelScheme::IndependentDiscrete(DiscreteLabels::Shared(law))
    }

    pub fn per_vertex(laws: Vec<DiscreteLaw>) -> Self {
        LabelScheme::IndependentDiscrete(DiscreteLabels::PerVertex { per_vertex: laws })
    }

    pub fn name(&self) -> &'static str {
        match self {
            LabelScheme::IidUniform => "iid_uniform",
            LabelScheme::Lattice => "lattice",
            LabelScheme::IndependentDiscrete(_) => "discrete",
        }
    }

    /// Checks the scheme can label `n` vertices.
    pub fn validate(&self, n: usize) -> Result<()> {
        if let LabelScheme::IndependentDiscrete(DiscreteLabels::PerVertex { per_vertex }) = self {
            if per_vertex.len() != n {
                return Err(Error::invalid(format!(
                    "per-vertex discrete scheme has {} laws for {n} vertices",
                    per_vertex.len()
                )));
            }
        }
        Ok(())
    }

    /// Law of vertex `v` (1-based) for discrete schemes.
    pub fn discrete_law(&self, v: usize) -> Option<&DiscreteLaw> {
        match self {
            LabelScheme::IndependentDiscrete(DiscreteLabels::Shared(l)) => Some(l),
            LabelScheme::IndependentDiscrete(DiscreteLabels::PerVertex { per_vertex }) => per_vertex.get(v - 1),
            _ => None,
        }
    }

    /// True when every label has the same law.
    pub fn identically_distributed(&self) -> bool {
        match self {
            LabelScheme::IidUniform | LabelScheme::IndependentDiscrete(DiscreteLabels::Shared(_)) => true,
            LabelScheme::Lattice => false,
            LabelScheme::IndependentDiscrete(DiscreteLabels::PerVertex { per_vertex }) => {
                per_vertex.windows(2).all(|w| w[0] == w[1])
            }
        }
    }

    /// A finite law for `U_v` that is exact for integrands constant on the
    /// cells of `partition`: cell midpoints weighted by width for iid
    /// uniform labels, the lattice point, or the discrete atoms.
    pub fn finite_law(&self, v: usize, n: usize, partition: &[f64]) -> Vec<(f64, f64)> {
        match self {
            LabelScheme::IidUniform => partition.windows(2).map(|w| (0.5 * (w[0] + w[1]), w[1] - w[0])).collect(),
            LabelScheme::Lattice => vec![(lattice_point(v, n), 1.0)],
            LabelScheme::IndependentDiscrete(_) => {
                let law = self.discrete_law(v).expect("validated discrete scheme");
                law.atoms.iter().copied().zip(law.probs.iter().copied()).collect()
            }
        }
    }
}

impl fmt::Display for LabelScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Conditional law of `Y_vw` given the labels; its mean is always `κ(U_v, U_w)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EdgeModel {
    Bernoulli,
    BoundedBeta { concentration: f64 },
}

impl EdgeModel {
    pub fn validate(&self) -> Result<()> {
        if let EdgeModel::BoundedBeta { concentration } = self {
            if !(*concentration > 0.0 && concentration.is_finite()) {
                return Err(Error::invalid("beta concentration must be positive and finite"));
            }
        }
        Ok(())
    }

    /// Draws `Y` with mean `p` from the key of one vertex pair.
    #[inline]
    pub fn draw(&self, p: f64, key: StreamKey) -> f64 {
        match *self {
            EdgeModel::Bernoulli => {
                if key.uniform() < p {
                    1.0
                } else {
                    0.0
                }
            }
            EdgeModel::BoundedBeta { concentration } => {
                if p <= 0.0 || p >= 1.0 {
                    return p;
                }
                let beta = Beta::new(concentration * p, concentration * (1.0 - p)).expect("positive beta parameters");
                beta.sample(&mut key.rng())
            }
        }
    }
}

#[inline]
fn lattice_point(v: usize, n: usize) -> f64 {
    v as f64 / n as f64
}

/// Position of the pair `v < w` (0-based) in the upper-triangular array.
#[inline]
pub fn pair_index(n: usize, v: usize, w: usize) -> usize {
    debug_assert!(v < w && w < n);
    v * (2 * n - v - 1) / 2 + (w - v - 1)
}

/// One realisation `(U, Y)` of the random graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSample {
    n: usize,
    labels: Vec<f64>,
    edges: Vec<f64>,
    scheme: LabelScheme,
    model: EdgeModel,
    seed: Option<u64>,
}

impl GraphSample {
    /// Builds a sample from explicit values; `edges` is the row-major upper
    /// triangle `(1,2), (1,3), ..., (n-1,n)`.
    pub fn from_parts(labels: Vec<f64>, edges: Vec<f64>, scheme: LabelScheme, model: EdgeModel) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::invalid("a sample needs at least one vertex"));
        }
        if edges.len() != n * (n - 1) / 2 {
            return Err(Error::invalid(format!("{n} vertices need {} edge values, got {}", n * (n - 1) / 2, edges.len())));
        }
        if labels.iter().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(Error::invalid("labels must lie in [0, 1]"));
        }
        if edges.iter().any(|y| !(0.0..=1.0).contains(y)) {
            return Err(Error::invalid("edge values must lie in [0, 1]"));
        }
        if model == EdgeModel::Bernoulli && edges.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::invalid("Bernoulli edge values must be 0 or 1"));
        }
        Ok(GraphSample { n, labels, edges, scheme, model, seed: None })
    }

    /// Bernoulli sample with the given adjacency (0-based pairs) and labels.
    pub fn from_adjacency(labels: Vec<f64>, pairs: &[(usize, usize)], scheme: LabelScheme) -> Result<Self> {
        let n = labels.len();
        let mut edges = vec![0.0; n * n.saturating_sub(1) / 2];
        for &(v, w) in pairs {
            if v == w || v >= n || w >= n {
                return Err(Error::invalid(format!("bad edge ({v}, {w}) for {n} vertices")));
            }
            edges[pair_index(n, v.min(w), v.max(w))] = 1.0;
        }
        GraphSample::from_parts(labels, edges, scheme, EdgeModel::Bernoulli)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Label of vertex `v`, 0-based.
    #[inline]
    pub fn label(&self, v: usize) -> f64 {
        self.labels[v]
    }

    pub fn edge_values(&self) -> &[f64] {
        &self.edges
    }

    pub fn scheme(&self) -> &LabelScheme {
        &self.scheme
    }

    pub fn model(&self) -> EdgeModel {
        self.model
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `Y_vw` for 0-based `v ≠ w`.
    #[inline]
    pub fn y(&self, v: usize, w: usize) -> f64 {
        if v < w {
            self.edges[pair_index(self.n, v, w)]
        } else {
            self.edges[pair_index(self.n, w, v)]
        }
    }

    pub fn is_binary(&self) -> bool {
        self.edges.iter().all(|&y| y == 0.0 || y == 1.0)
    }

    pub fn edge_sum(&self) -> f64 {
        crate::summation::pairwise_sum(&self.edges)
    }

    /// Writes the `n=.. scheme=.. seed=..` header and one `v w y` line per
    /// vertex pair (1-based).
    pub fn write_edge_list(&self, mut out: impl Write) -> Result<()> {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        writeln!(out, "n={} scheme={} seed={}", self.n, self.scheme.name(), seed)?;
        for v in 0..self.n {
            for w in v + 1..self.n {
                writeln!(out, "{} {} {}", v + 1, w + 1, self.y(v, w))?;
            }
        }
        Ok(())
    }

    pub fn write_labels(&self, mut out: impl Write) -> Result<()> {
        for (v, u) in self.labels.iter().enumerate() {
            writeln!(out, "{} {}", v + 1, u)?;
        }
        Ok(())
    }

    /// Reads an edge list and its label file. The scheme named in the header
    /// must agree with `scheme`; pairs missing from the list are `0`.
    pub fn read(edge_list: impl BufRead, labels: impl BufRead, scheme: LabelScheme, model: EdgeModel) -> Result<Self> {
        let parsed = EdgeList::read(edge_list)?;
        if let Some(name) = &parsed.scheme {
            if name != scheme.name() {
                return Err(Error::invalid(format!("sample has scheme '{name}' but '{}' was given", scheme.name())));
            }
        }
        let EdgeList { n, seed, edges, .. } = parsed;
        let mut label_values = vec![f64::NAN; n];
        for line in labels.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [v, u] = parts[..] else {
                return Err(Error::parse(format!("expected 'v u', got '{line}'")));
            };
            let v: usize = v.parse().map_err(|_| Error::parse(format!("bad vertex in '{line}'")))?;
            let u: f64 = u.parse().map_err(|_| Error::parse(format!("bad label in '{line}'")))?;
            if v == 0 || v > n {
                return Err(Error::invalid(format!("label vertex {v} out of range for n = {n}")));
            }
            label_values[v - 1] = u;
        }
        if label_values.iter().any(|u| u.is_nan()) {
            return Err(Error::parse("label file does not cover every vertex"));
        }
        let mut sample = GraphSample::from_parts(label_values, edges, scheme, model)?;
        sample.seed = seed;
        Ok(sample)
    }
}

/// The contents of an edge-list file: header fields and the upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeList {
    pub n: usize,
    pub scheme: Option<String>,
    pub seed: Option<u64>,
    /// Row-major upper triangle; pairs not listed are 0.
    pub edges: Vec<f64>,
}

impl EdgeList {
    pub fn read(edge_list: impl BufRead) -> Result<Self> {
        let mut lines = edge_list.lines();
        let header = lines.next().ok_or_else(|| Error::parse("empty edge list"))??;
        let mut n = None;
        let mut seed = None;
        let mut scheme = None;
        for field in header.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| Error::parse(format!("bad header field '{field}'")))?;
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| Error::parse(format!("bad vertex count '{value}'")))?),
                "scheme" => scheme = Some(value.to_string()),
                "seed" if value != "none" => {
                    seed = Some(value.parse::<u64>().map_err(|_| Error::parse(format!("bad seed '{value}'")))?)
                }
                _ => {}
            }
        }
        let n = n.ok_or_else(|| Error::parse("edge list header lacks n="))?;
        let mut edges = vec![0.0; n * n.saturating_sub(1) / 2];
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [v, w, y] = parts[..] else {
                return Err(Error::parse(format!("expected 'v w y', got '{line}'")));
            };
            let v: usize = v.parse().map_err(|_| Error::parse(format!("bad vertex in '{line}'")))?;
            let w: usize = w.parse().map_err(|_| Error::parse(format!("bad vertex in '{line}'")))?;
            let y: f64 = y.parse().map_err(|_| Error::parse(format!("bad edge value in '{line}'")))?;
            if v == w || v == 0 || w == 0 || v > n || w > n {
                return Err(Error::invalid(format!("edge ({v}, {w}) out of range for n = {n}")));
            }
            edges[pair_index(n, v.min(w) - 1, v.max(w) - 1)] = y;
        }
        Ok(EdgeList { n, scheme, seed, edges })
    }

    /// The observed graph with lattice labels `v/n`, for uses that ignore
    /// labels.
    pub fn into_lattice_sample(self) -> Result<GraphSample> {
        let labels = (1..=self.n).map(|v| lattice_point(v, self.n)).collect();
        let mut s = GraphSample::from_parts(labels, self.edges, LabelScheme::Lattice, EdgeModel::Bernoulli)?;
        s.seed = self.seed;
        Ok(s)
    }
}

/// Draws `U_1, ..., U_n` (returned 0-based).
pub fn sample_labels(scheme: &LabelScheme, n: usize, seed: u64) -> Result<Vec<f64>> {
    sample_labels_keyed(scheme, n, StreamKey::new(seed))
}

pub(crate) fn sample_labels_keyed(scheme: &LabelScheme, n: usize, key: StreamKey) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    scheme.validate(n)?;
    let key = key.derive(domain::LABELS);
    Ok(match scheme {
        LabelScheme::Lattice => (1..=n).map(|v| lattice_point(v, n)).collect(),
        LabelScheme::IidUniform => (1..=n).map(|v| key.derive(v as u64).uniform()).collect(),
        LabelScheme::IndependentDiscrete(_) => (1..=n)
            .map(|v| scheme.discrete_law(v).unwrap().quantile(key.derive(v as u64).uniform()))
            .collect(),
    })
}

/// Draws the edges given the labels. Pair `{v, w}` uses its own stream, so
/// the result does not depend on evaluation order or thread count.
pub fn sample_graph(
    kappa: &Graphon,
    labels: &[f64],
    scheme: &LabelScheme,
    model: EdgeModel,
    seed: u64,
) -> Result<GraphSample> {
    let mut sample = sample_graph_keyed(kappa, labels, scheme, model, StreamKey::new(seed))?;
    sample.seed = Some(seed);
    Ok(sample)
}

pub(crate) fn sample_graph_keyed(
    kappa: &Graphon,
    labels: &[f64],
    scheme: &LabelScheme,
    model: EdgeModel,
    key: StreamKey,
) -> Result<GraphSample> {
    model.validate()?;
    let n = labels.len();
    if labels.iter().any(|u| !(0.0..=1.0).contains(u)) {
        return Err(Error::invalid("labels must lie in [0, 1]"));
    }
    let key = key.derive(domain::EDGES);
    let cells: Vec<usize> = labels.iter().map(|&u| kappa.cell_of(u)).collect();
    let rows = map_range(n, |v| {
        (v + 1..n)
            .map(|w| model.draw(kappa.cell_value(cells[v], cells[w]), key.pair(v, w)))
            .collect::<Vec<f64>>()
    });
    let edges = rows.concat();
    Ok(GraphSample { n, labels: labels.to_vec(), edges, scheme: scheme.clone(), model, seed: None })
}

/// Labels and edges from one key; replication `r` of an experiment uses
/// `StreamKey::new(seed).derive(REPLICATION).derive(r)`.
pub(crate) fn sample_keyed(
    kappa: &Graphon,
    scheme: &LabelScheme,
    model: EdgeModel,
    n: usize,
    key: StreamKey,
) -> Result<GraphSample> {
    let labels = sample_labels_keyed(scheme, n, key)?;
    sample_graph_keyed(kappa, &labels, scheme, model, key)
}

/// Convenience: labels and edges from one seed.
pub fn sample(kappa: &Graphon, scheme: &LabelScheme, model: EdgeModel, n: usize, seed: u64) -> Result<GraphSample> {
    let mut s = sample_keyed(kappa, scheme, model, n, StreamKey::new(seed))?;
    s.seed = Some(seed);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_labels() {
        assert_eq!(sample_labels(&LabelScheme::Lattice, 4, 9).unwrap(), vec![0.25, 0.5, 0.75, 1.0]);
        assert!(sample_labels(&LabelScheme::Lattice, 0, 9).is_err());
        let l = sample_labels(&LabelScheme::Lattice, 7, 1).unwrap();
        for (i, u) in l.iter().enumerate() {
            assert_eq!(*u, (i + 1) as f64 / 7.0);
        }
    }

    #[test]
    fn uniform_label_mean() {
        let l = sample_labels(&LabelScheme::IidUniform, 10_000, 3).unwrap();
        let mean = l.iter().sum::<f64>() / l.len() as f64;
        assert!((mean - 0.5).abs() < 0.015, "{mean}");
        assert_eq!(l, sample_labels(&LabelScheme::IidUniform, 10_000, 3).unwrap());
        assert_ne!(l, sample_labels(&LabelScheme::IidUniform, 10_000, 4).unwrap());
    }

    #[test]
    fn point_mass_labels() {
        let s = LabelScheme::discrete(DiscreteLaw::point(0.3).unwrap());
        assert!(sample_labels(&s, 20, 5).unwrap().iter().all(|&u| u == 0.3));
    }

    #[test]
    fn discrete_law_checks() {
        assert!(DiscreteLaw::new(vec![0.2, 0.4], vec![0.5, 0.4]).is_err());
        assert!(DiscreteLaw::new(vec![1.2], vec![1.0]).is_err());
        let d = DiscreteLaw::new(vec![0.2, 0.4], vec![0.25, 0.75]).unwrap();
        assert_eq!(d.quantile(0.0), 0.2);
        assert_eq!(d.quantile(0.2499), 0.2);
        assert_eq!(d.quantile(0.25), 0.4);
        assert_eq!(d.quantile(0.9999), 0.4);
    }

    #[test]
    fn complete_and_half_graphs() {
        let c = Graphon::constant(1.0).unwrap();
        let g = sample(&c, &LabelScheme::IidUniform, EdgeModel::Bernoulli, 30, 1).unwrap();
        assert!(g.edge_values().iter().all(|&y| y == 1.0));
        let h = Graphon::constant(0.5).unwrap();
        let g = sample(&h, &LabelScheme::IidUniform, EdgeModel::Bernoulli, 200, 11).unwrap();
        let count = g.edge_sum();
        assert!((count - 9950.0).abs() < 3.0 * (19900.0f64 * 0.25).sqrt(), "{count}");
    }

    #[test]
    fn beta_edge_mean() {
        let kappa = Graphon::constant(0.3).unwrap();
        let model = EdgeModel::BoundedBeta { concentration: 10.0 };
        // 142 vertices give 10011 pairs
        let g = sample(&kappa, &LabelScheme::IidUniform, model, 142, 2).unwrap();
        let vals = g.edge_values();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let sd = (0.3f64 * 0.7 / 11.0).sqrt();
        assert!((mean - 0.3).abs() < 3.0 * sd / 100.0, "{mean}");
        assert!(vals.iter().all(|y| (0.0..=1.0).contains(y)));
    }

    #[test]
    fn beta_degenerate_means() {
        let model = EdgeModel::BoundedBeta { concentration: 3.0 };
        assert_eq!(model.draw(0.0, StreamKey::new(1)), 0.0);
        assert_eq!(model.draw(1.0, StreamKey::new(1)), 1.0);
        assert!(EdgeModel::BoundedBeta { concentration: 0.0 }.validate().is_err());
    }

    #[test]
    fn conditional_mean_over_edge_seeds() {
        let kappa = Graphon::two_block(0.5, 0.8, 0.2, 0.6).unwrap();
        let labels = [0.1, 0.7];
        let reps = 100_000;
        let mut acc = 0.0;
        for s in 0..reps {
            let g = sample_graph(&kappa, &labels, &LabelScheme::IidUniform, EdgeModel::Bernoulli, s).unwrap();
            acc += g.y(0, 1);
        }
        let mean = acc / reps as f64;
        assert!((mean - 0.2).abs() < 3.0 * (0.25f64 / reps as f64).sqrt(), "{mean}");
    }

    #[test]
    fn pair_index_is_row_major() {
        let n = 5;
        let mut i = 0;
        for v in 0..n {
            for w in v + 1..n {
                assert_eq!(pair_index(n, v, w), i);
                i += 1;
            }
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let kappa = Graphon::constant(0.4).unwrap();
        let g = sample(&kappa, &LabelScheme::IidUniform, EdgeModel::Bernoulli, 12, 8).unwrap();
        let mut e = Vec::new();
        let mut l = Vec::new();
        g.write_edge_list(&mut e).unwrap();
        g.write_labels(&mut l).unwrap();
        assert!(String::from_utf8_lossy(&e).starts_with("n=12 scheme=iid_uniform seed=8\n"));
        let back = GraphSample::read(&e[..], &l[..], LabelScheme::IidUniform, EdgeModel::Bernoulli).unwrap();
        assert_eq!(back, g);
        assert!(GraphSample::read(&e[..], &l[..], LabelScheme::Lattice, EdgeModel::Bernoulli).is_err());
    }

    #[test]
    fn scheme_json() {
        let s: LabelScheme = serde_json::from_str(r#"{"type":"lattice"}"#).unwrap();
        assert_eq!(s, LabelScheme::Lattice);
        let s: LabelScheme = serde_json::from_str(r#"{"type":"discrete","atoms":[0.2,0.8],"probs":[0.5,0.5]}"#).unwrap();
        assert!(s.identically_distributed());
        let s: LabelScheme = serde_json::from_str(
            r#"{"type":"discrete","per_vertex":[{"atoms":[0.2],"probs":[1]},{"atoms":[0.9],"probs":[1]}]}"#,
        )
        .unwrap();
        assert!(!s.identically_distributed());
        assert!(s.validate(3).is_err());
        let m: EdgeModel = serde_json::from_str(r#"{"type":"bounded_beta","concentration":4}"#).unwrap();
        assert_eq!(m, EdgeModel::BoundedBeta { concentration: 4.0 });
    }
}
