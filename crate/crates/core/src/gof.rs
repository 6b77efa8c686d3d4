//! Goodness-of-fit statistics for an observed 0/1 graph against a fixed
//! matrix of edge probabilities.
//!
//! Every statistic is a sum over increasing vertex tuples of products of
//! `Y_vw − p_vw` along the edges of a labelled pattern, divided by its exact
//! null standard deviation.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::graphon::Graphon;
use crate::pattern::PatternGraph;
use crate::rng::{domain, StreamKey};
use crate::sampler::{pair_index, EdgeModel, GraphSample, LabelScheme};
use crate::statistics::{binomial, TUPLE_GUARD};
use crate::tuples::{increasing_sum, PairFactor, SymMatrix};

/// Largest pattern accepted by [`higher_order_statistic`].
pub const MAX_PATTERN_VERTICES: usize = 4;

/// Edge probabilities `p_vw`, `v < w`, stored as a row-major upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl ProbabilityMatrix {
    pub fn new(n: usize, upper: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("a probability matrix needs n >= 2"));
        }
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::invalid(format!(
                "expected {} upper-triangular entries for n = {n}, got {}",
                n * (n - 1) / 2,
                upper.len()
            )));
        }
        if let Some(p) = upper.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(format!("edge probability {p} is outside [0, 1]")));
        }
        Ok(ProbabilityMatrix { n, upper })
    }

    pub fn constant(n: usize, p: f64) -> Result<Self> {
        ProbabilityMatrix::new(n, vec![p; n * n.saturating_sub(1) / 2])
    }

    /// `p_vw = κ(v/n, w/n)` for 1-based `v, w`.
    pub fn from_graphon_lattice(kappa: &Graphon, n: usize) -> Result<Self> {
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for v in 1..=n {
            for w in v + 1..=n {
                upper.push(kappa.value(v as f64 / n as f64, w as f64 / n as f64));
            }
        }
        ProbabilityMatrix::new(n, upper)
    }

    /// A dense `n × n` matrix, one row per line, comma or whitespace
    /// separated. Only the upper triangle is read; the lower triangle must
    /// agree with it.
    pub fn from_dense_csv(text: &str) -> Result<Self> {
        let rows: Vec<Vec<f64>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>().map_err(|e| Error::parse(format!("bad entry {s:?}: {e}"))))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::parse("probability matrix must be square"));
        }
        let mut upper = Vec::new();
        for v in 0..n {
            for w in v + 1..n {
                if (rows[v][w] - rows[w][v]).abs() > 1e-12 {
                    return Err(Error::parse(format!("probability matrix is not symmetric at ({}, {})", v + 1, w + 1)));
                }
                upper.push(rows[v][w]);
            }
        }
        ProbabilityMatrix::new(n, upper)
    }

    /// Reads either a dense CSV matrix or a graphon in JSON form, which is
    /// evaluated at the lattice points `v/n`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let p = if text.trim_start().starts_with('{') {
            let kappa: Graphon = serde_json::from_str(text)?;
            ProbabilityMatrix::from_graphon_lattice(&kappa, n)?
        } else {
            ProbabilityMatrix::from_dense_csv(text)?
        };
        if p.n != n {
            return Err(Error::invalid(format!("probability matrix has n = {}, the graph has n = {n}", p.n)));
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p_vw` for 0-based `v ≠ w`.
    pub fn get(&self, v: usize, w: usize) -> f64 {
        let (a, b) = if v < w { (v, w) } else { (w, v) };
        self.upper[pair_index(self.n, a, b)]
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Draws `Y_vw ~ Bernoulli(p_vw)` independently, with lattice labels.
    pub fn sample(&self, seed: u64) -> Result<GraphSample> {
        self.sample_keyed(StreamKey::new(seed))
    }

    pub(crate) fn sample_keyed(&self, key: StreamKey) -> Result<GraphSample> {
        let n = self.n;
        let key = key.derive(domain::EDGES);
        let mut edges = Vec::with_capacity(self.upper.len());
        for v in 0..n {
            for w in v + 1..n {
                edges.push(EdgeModel::Bernoulli.draw(self.get(v, w), key.pair(v, w)));
            }
        }
        let labels = (1..=n).map(|v| v as f64 / n as f64).collect();
        GraphSample::from_parts(labels, edges, LabelScheme::Lattice, EdgeModel::Bernoulli)
    }
}

/// One row of a goodness-of-fit report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestEntry {
    pub name: String,
    /// The raw centred sum.
    pub sum: f64,
    pub variance: f64,
    pub z: f64,
    /// Two-sided, against the standard normal.
    pub p_value: f64,
}

impl TestEntry {
    fn new(name: String, sum: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::Degenerate(format!(
                "{name}: null variance is zero (every relevant p_vw is 0 or 1)"
            )));
        }
        let z = sum / variance.sqrt();
        Ok(TestEntry { name, sum, variance, z, p_value: two_sided_p(z) })
    }
}

/// `P(|N(0,1)| ≥ |z|)`.
pub fn two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub entries: Vec<TestEntry>,
}

impl TestReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,statistic,variance,z,p_value\n");
        for e in &self.entries {
            out.push_str(&format!("{},{:.17e},{:.17e},{:.17e},{:.17e}\n", e.name, e.sum, e.variance, e.z, e.p_value));
        }
        out
    }
}

fn check_inputs(y: &GraphSample, p: &ProbabilityMatrix) -> Result<()> {
    if !y.is_binary() {
        return Err(Error::invalid("goodness-of-fit tests need a 0/1 observed graph"));
    }
    if y.n() != p.n() {
        return Err(Error::invalid(format!("graph has n = {}, probability matrix has n = {}", y.n(), p.n())));
    }
    Ok(())
}

/// `T_F`: `Σ_{a_1<...<a_k} ∏_{ij ∈ F} (Y − p)` over its exact null standard
/// deviation `(Σ_a ∏_{ij ∈ F} p(1 − p))^{1/2}`.
pub fn higher_order_statistic(y: &GraphSample, p: &ProbabilityMatrix, f: &PatternGraph) -> Result<TestEntry> {
    let name = f.builtin_name().map(str::to_string).unwrap_or_else(|| f.to_string());
    statistic_named(y, p, f, name)
}

fn statistic_named(y: &GraphSample, p: &ProbabilityMatrix, f: &PatternGraph, name: String) -> Result<TestEntry> {
    check_inputs(y, p)?;
    let k = f.k();
    if !f.is_connected() || f.edge_count() == 0 {
        return Err(Error::invalid("goodness-of-fit patterns must be connected with at least one edge"));
    }
    if !f.is_on_range() {
        return Err(Error::invalid("pattern vertices must be 1..k"));
    }
    if k > MAX_PATTERN_VERTICES {
        return Err(Error::Unsupported(format!("patterns are limited to {MAX_PATTERN_VERTICES} vertices")));
    }
    let n = y.n();
    if n < k {
        return Err(Error::invalid(format!("n = {n} is smaller than the pattern size {k}")));
    }
    let count = binomial(n, k);
    if count > TUPLE_GUARD {
        return Err(Error::guard(format!("binom({n}, {k}) = {count:.3e} tuples exceeds the limit of {TUPLE_GUARD:.0e}")));
    }
    let centred = SymMatrix::from_fn(n, |v, w| y.y(v, w) - p.get(v, w));
    let var = SymMatrix::from_fn(n, |v, w| {
        let q = p.get(v, w);
        q * (1.0 - q)
    });
    let ones = vec![1.0; n];
    let weights: Vec<&[f64]> = vec![&ones; k];
    let pos = f.position_edges();
    let sum_edges: Vec<PairFactor<'_>> = pos.iter().map(|&(a, b)| PairFactor::new(a, b, &centred)).collect();
    let var_edges: Vec<PairFactor<'_>> = pos.iter().map(|&(a, b)| PairFactor::new(a, b, &var)).collect();
    TestEntry::new(name, increasing_sum(&weights, &sum_edges), increasing_sum(&weights, &var_edges))
}

/// `T_edge = Σ_{v<w} (Y_vw − p_vw) / (Σ p_vw(1 − p_vw))^{1/2}`.
pub fn t_edge(y: &GraphSample, p: &ProbabilityMatrix) -> Result<TestEntry> {
    statistic_named(y, p, &PatternGraph::named("K2").unwrap(), "edge".into())
}

/// The two-star on ordered triples `i < j < k` whose shared endpoint is at
/// position `center` (1, 2 or 3). Centre 2 is `(Y_ij − p_ij)(Y_jk − p_jk)`.
pub fn t_twostar(y: &GraphSample, p: &ProbabilityMatrix, center: usize) -> Result<TestEntry> {
    let name = match center {
        1 => "P3c1",
        2 => "P3",
        3 => "P3c3",
        _ => return Err(Error::invalid(format!("two-star centre must be 1, 2 or 3, got {center}"))),
    };
    statistic_named(y, p, &PatternGraph::named(name).unwrap(), format!("twostar_c{center}"))
}

/// The edge statistic, the three two-star orientations and any extra
/// patterns, in that order.
pub fn gof_report(y: &GraphSample, p: &ProbabilityMatrix, extra: &[PatternGraph]) -> Result<TestReport> {
    let mut entries = vec![t_edge(y, p)?];
    if y.n() >= 3 {
        for c in 1..=3 {
            entries.push(t_twostar(y, p, c)?);
        }
    }
    for f in extra {
        entries.push(higher_order_statistic(y, p, f)?);
    }
    Ok(TestReport { entries })
}
