//! Subgraph counts and the centred, weighted statistics `W_i` with their
//! exact finite-`n` covariance matrix.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::{advance, Graphon};
use crate::pattern::PatternGraph;
use crate::sampler::{EdgeModel, GraphSample, LabelScheme};
use crate::summation::pairwise_sum;
use crate::tuples::{distinct_sum, for_each_increasing, increasing_sum, PairFactor, SymMatrix};
use crate::weights::{refine, WeightFunction};

/// Largest number of tuples (or maps) any enumeration may visit.
pub const TUPLE_GUARD: f64 = 1e9;
/// Largest number of label-law assignments summed for one expectation.
pub const LAW_GUARD: f64 = 1e8;

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}

/// `(n)_k = n (n-1) ... (n-k+1)`.
pub fn falling_factorial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| n.saturating_sub(i) as f64).product()
}

/// One coordinate of `W`: a connected pattern on `[k]` with weights `φ` on
/// the ordered simplex and `ψ` on label vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct StatisticSpec {
    pub id: Option<String>,
    pub pattern: PatternGraph,
    pub phi: WeightFunction,
    pub psi: WeightFunction,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    pattern: PatternGraph,
    #[serde(default = "WeightFunction::one")]
    phi: WeightFunction,
    #[serde(default = "WeightFunction::one")]
    psi: WeightFunction,
}

impl TryFrom<SpecRepr> for StatisticSpec {
    type Error = Error;
    fn try_from(r: SpecRepr) -> Result<Self> {
        let mut s = StatisticSpec::new(r.pattern, r.phi, r.psi)?;
        s.id = r.id;
        Ok(s)
    }
}

impl From<StatisticSpec> for SpecRepr {
    fn from(s: StatisticSpec) -> Self {
        SpecRepr { id: s.id, pattern: s.pattern, phi: s.phi, psi: s.psi }
    }
}

impl StatisticSpec {
    pub fn new(pattern: PatternGraph, phi: WeightFunction, psi: WeightFunction) -> Result<Self> {
        let k = pattern.k();
        if k == 0 {
            return Err(Error::invalid("a statistic needs a pattern with at least one vertex"));
        }
        if !pattern.is_on_range() {
            return Err(Error::invalid(format!("pattern {pattern} must have vertex set 1..={k}")));
        }
        if !pattern.is_connected() {
            return Err(Error::invalid(format!("pattern {pattern} is not connected")));
        }
        phi.validate(k)?;
        psi.validate(k)?;
        Ok(StatisticSpec { id: None, pattern, phi, psi })
    }

    /// Unweighted statistic `φ = ψ ≡ 1`.
    pub fn simple(pattern: PatternGraph) -> Result<Self> {
        StatisticSpec::new(pattern, WeightFunction::one(), WeightFunction::one())
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn k(&self) -> usize {
        self.pattern.k()
    }

    /// Identifier for tables: the explicit id, else the pattern.
    pub fn label(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.pattern.to_string())
    }
}

fn check_tuple_guard(n: usize, k: usize) -> Result<()> {
    let count = binomial(n, k);
    if count > TUPLE_GUARD {
        return Err(Error::guard(format!("binom({n}, {k}) = {count:.3e} tuples exceeds the limit of {TUPLE_GUARD:.0e}")));
    }
    Ok(())
}

fn require_binary(sample: &GraphSample) -> Result<()> {
    if !sample.is_binary() {
        return Err(Error::invalid("subgraph counts need a 0/1 (Bernoulli) sample"));
    }
    Ok(())
}

/// Number of maps `[k] → [n]`, injective or not, sending edges to edges.
pub fn hom_count(f: &PatternGraph, sample: &GraphSample) -> Result<u64> {
    require_binary(sample)?;
    let n = sample.n();
    let k = f.k();
    if (n as f64).powi(k as i32) > TUPLE_GUARD {
        return Err(Error::guard(format!("{n}^{k} maps exceed the limit of {TUPLE_GUARD:.0e}")));
    }
    if k == 0 {
        return Ok(1);
    }
    let mut back: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (v, w) in f.position_edges() {
        back[w].push(v);
    }
    fn walk(sample: &GraphSample, back: &[Vec<usize>], image: &mut Vec<usize>, pos: usize) -> u64 {
        if pos == back.len() {
            return 1;
        }
        let mut total = 0;
        for x in 0..sample.n() {
            if back[pos].iter().all(|&i| image[i] != x && sample.y(image[i], x) == 1.0) {
                image[pos] = x;
                total += walk(sample, back, image, pos + 1);
            }
        }
        total
    }
    let mut image = vec![0; k];
    Ok(walk(sample, &back, &mut image, 0))
}

/// `inj(F, G) / (n)_k`.
pub fn injective_density(f: &PatternGraph, sample: &GraphSample) -> Result<f64> {
    require_binary(sample)?;
    let n = sample.n();
    let k = f.k();
    if n < k {
        return Err(Error::invalid(format!("injective density needs n >= k, got n = {n}, k = {k}")));
    }
    check_tuple_guard(n, k)?;
    let adj = SymMatrix::from_fn(n, |v, w| sample.y(v, w));
    let ones = vec![1.0; n];
    let weights: Vec<&[f64]> = vec![&ones; k];
    let edges: Vec<PairFactor<'_>> = f.position_edges().into_iter().map(|(v, w)| PairFactor::new(v, w, &adj)).collect();
    Ok(distinct_sum(&weights, &edges) / falling_factorial(n, k))
}

/// `hom(F, G) / n^k`.
pub fn hom_density(f: &PatternGraph, sample: &GraphSample) -> Result<f64> {
    Ok(hom_count(f, sample)? as f64 / (sample.n() as f64).powi(f.k() as i32))
}

/// `∏_{vw ∈ F} (Y_{a_v a_w} − κ(U_{a_v}, U_{a_w}))` for a strictly increasing
/// 1-based tuple `a`; `1` when `F` has a single vertex.
pub fn centred_indicator(f: &PatternGraph, a: &[usize], sample: &GraphSample, kappa: &Graphon) -> Result<f64> {
    if a.len() != f.k() {
        return Err(Error::invalid(format!("tuple has {} entries for a {}-vertex pattern", a.len(), f.k())));
    }
    if a.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("tuple must be strictly increasing"));
    }
    if a.first() == Some(&0) || a.iter().any(|&v| v > sample.n()) {
        return Err(Error::invalid(format!("tuple entries must lie in 1..={}", sample.n())));
    }
    Ok(f.position_edges()
        .iter()
        .map(|&(v, w)| {
            let (x, y) = (a[v] - 1, a[w] - 1);
            sample.y(x, y) - kappa.value(sample.label(x), sample.label(y))
        })
        .product())
}

/// `Y − κ(U, U)` as a dense matrix.
pub fn centred_matrix(sample: &GraphSample, kappa: &Graphon) -> SymMatrix {
    let cells: Vec<usize> = sample.labels().iter().map(|&u| kappa.cell_of(u)).collect();
    SymMatrix::from_fn(sample.n(), |v, w| sample.y(v, w) - kappa.cell_value(cells[v], cells[w]))
}

/// Per-position vertex weights `φ_c(v/n) ψ_c(U_v)`.
pub(crate) fn vertex_weights(spec: &StatisticSpec, labels: &[f64]) -> Vec<Vec<f64>> {
    let n = labels.len();
    (0..spec.k())
        .map(|c| {
            (0..n)
                .map(|v| spec.phi.factor(c, (v + 1) as f64 / n as f64) * spec.psi.factor(c, labels[v]))
                .collect()
        })
        .collect()
}

/// `E g(U_v)` under the label scheme, exact for step functions `g`.
fn label_expectation(scheme: &LabelScheme, v: usize, n: usize, partition: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    scheme.finite_law(v, n, partition).iter().map(|&(u, p)| p * g(u)).sum()
}

fn single_vertex_statistic(spec: &StatisticSpec, sample: &GraphSample) -> f64 {
    let n = sample.n();
    let scheme = sample.scheme();
    let part = spec.psi.breakpoints(0);
    let identical = scheme.identically_distributed();
    let shared_mean = identical.then(|| label_expectation(scheme, 1, n, part, |u| spec.psi.factor(0, u)));
    let terms: Vec<f64> = (0..n)
        .map(|v| {
            let mean = shared_mean.unwrap_or_else(|| label_expectation(scheme, v + 1, n, part, |u| spec.psi.factor(0, u)));
            spec.phi.factor(0, (v + 1) as f64 / n as f64) * (spec.psi.factor(0, sample.label(v)) - mean)
        })
        .collect();
    pairwise_sum(&terms) / (n as f64).sqrt()
}

fn check_graphon(kappa: &Graphon) -> Result<()> {
    if kappa.is_degenerate() {
        return Err(Error::Degenerate("κ ≡ 0 or κ ≡ 1 makes every centred statistic vanish".into()));
    }
    Ok(())
}

/// The vector `W = (W_1, ..., W_d)` for one sample.
pub fn statistic_vector(specs: &[StatisticSpec], sample: &GraphSample, kappa: &Graphon) -> Result<Vec<f64>> {
    check_graphon(kappa)?;
    let n = sample.n();
    for s in specs {
        if n < s.k() {
            return Err(Error::invalid(format!("n = {n} is smaller than pattern size {}", s.k())));
        }
        check_tuple_guard(n, s.k())?;
    }
    let centred = specs.iter().any(|s| s.k() > 1).then(|| centred_matrix(sample, kappa));
    Ok(specs
        .iter()
        .map(|s| {
            if s.k() == 1 {
                return single_vertex_statistic(s, sample);
            }
            let m = centred.as_ref().unwrap();
            let w = vertex_weights(s, sample.labels());
            let wr: Vec<&[f64]> = w.iter().map(|v| v.as_slice()).collect();
            let edges: Vec<PairFactor<'_>> =
                s.pattern.position_edges().into_iter().map(|(a, b)| PairFactor::new(a, b, m)).collect();
            increasing_sum(&wr, &edges) / binomial(n, s.k()).sqrt()
        })
        .collect())
}

/// A symmetric covariance matrix with the identifiers of its coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    pub ids: Vec<String>,
    pub values: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(ids: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        let c = CovarianceMatrix { ids, values };
        c.check()?;
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.values.clone().symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Symmetric to `1e-12`, nonnegative diagonal and PSD to `1e-9`.
    pub fn check(&self) -> Result<()> {
        let d = self.dim();
        if self.values.ncols() != d || self.ids.len() != d {
            return Err(Error::invalid("covariance matrix must be square with one id per row"));
        }
        for i in 0..d {
            if self.values[(i, i)] < 0.0 {
                return Err(Error::invalid(format!("negative variance at {i}")));
            }
            for j in 0..i {
                if (self.values[(i, j)] - self.values[(j, i)]).abs() > 1e-12 {
                    return Err(Error::invalid(format!("covariance not symmetric at ({i}, {j})")));
                }
            }
        }
        let lambda = self.min_eigenvalue();
        if lambda < -1e-9 {
            return Err(Error::invalid(format!("covariance has eigenvalue {lambda} < -1e-9")));
        }
        Ok(())
    }

    /// CSV with a header row of identifiers; `tag`, when given, fills a
    /// leading `matrix` column.
    pub fn to_csv(&self, tag: Option<&str>, header: bool) -> String {
        let mut out = String::new();
        if header {
            if tag.is_some() {
                out.push_str("matrix,");
            }
            out.push_str("row,");
            out.push_str(&self.ids.join(","));
            out.push('\n');
        }
        for i in 0..self.dim() {
            if let Some(t) = tag {
                let _ = write!(out, "{t},");
            }
            out.push_str(&self.ids[i]);
            for j in 0..self.dim() {
                let _ = write!(out, ",{:e}", self.values[(i, j)]);
            }
            out.push('\n');
        }
        out
    }
}

/// The exact covariance of `W` at size `n` under Bernoulli edges.
pub fn covariance_matrix(
    specs: &[StatisticSpec],
    scheme: &LabelScheme,
    kappa: &Graphon,
    model: EdgeModel,
    n: usize,
) -> Result<CovarianceMatrix> {
    if let EdgeModel::BoundedBeta { .. } = model {
        return Err(Error::Unsupported(
            "exact covariances use the Bernoulli variance κ(1-κ); they are not available for the bounded beta edge model"
                .into(),
        ));
    }
    check_graphon(kappa)?;
    scheme.validate(n)?;
    let d = specs.len();
    let mut values = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v = covariance_entry(&specs[i], &specs[j], scheme, kappa, n)?;
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
    CovarianceMatrix::new(specs.iter().map(|s| s.label()).collect(), values)
}

/// One entry `σ_ij` of the exact covariance.
pub fn covariance_entry(si: &StatisticSpec, sj: &StatisticSpec, scheme: &LabelScheme, kappa: &Graphon, n: usize) -> Result<f64> {
    let (ki, kj) = (si.k(), sj.k());
    if ki == 1 && kj == 1 {
        return Ok(single_vertex_covariance(si, sj, scheme, n));
    }
    if si.pattern != sj.pattern {
        return Ok(0.0);
    }
    let k = ki;
    if n < k {
        return Err(Error::invalid(format!("n = {n} is smaller than pattern size {k}")));
    }
    check_tuple_guard(n, k)?;
    let edges = si.pattern.position_edges();
    let var = |x: f64, y: f64| {
        let p = kappa.value(x, y);
        p * (1.0 - p)
    };
    let norm = binomial(n, k);
    let phi_weights: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            (1..=n)
                .map(|v| {
                    let t = v as f64 / n as f64;
                    si.phi.factor(c, t) * sj.phi.factor(c, t)
                })
                .collect()
        })
        .collect();
    match scheme {
        LabelScheme::Lattice => {
            let m = SymMatrix::from_fn(n, |v, w| var((v + 1) as f64 / n as f64, (w + 1) as f64 / n as f64));
            let w: Vec<Vec<f64>> = phi_weights
                .iter()
                .enumerate()
                .map(|(c, pw)| {
                    pw.iter()
                        .enumerate()
                        .map(|(v, &x)| {
                            let t = (v + 1) as f64 / n as f64;
                            x * si.psi.factor(c, t) * sj.psi.factor(c, t)
                        })
                        .collect()
                })
                .collect();
            let wr: Vec<&[f64]> = w.iter().map(|v| v.as_slice()).collect();
            let pf: Vec<PairFactor<'_>> = edges.iter().map(|&(a, b)| PairFactor::new(a, b, &m)).collect();
            Ok(increasing_sum(&wr, &pf) / norm)
        }
        _ if scheme.identically_distributed() => {
            let partition = refine([si.psi.all_breakpoints().as_slice(), sj.psi.all_breakpoints().as_slice(), kappa.boundaries()]);
            let law = scheme.finite_law(1, n, &partition);
            let inner = tuple_expectation(&vec![law; k], &edges, si, sj, &var)?;
            let wr: Vec<&[f64]> = phi_weights.iter().map(|v| v.as_slice()).collect();
            Ok(inner * increasing_sum(&wr, &[]) / norm)
        }
        _ => {
            let laws: Vec<Vec<(f64, f64)>> = (1..=n).map(|v| scheme.finite_law(v, n, &[0.0, 1.0])).collect();
            let widest = laws.iter().map(|l| l.len()).max().unwrap_or(1) as f64;
            if norm * widest.powi(k as i32) > LAW_GUARD {
                return Err(Error::guard(format!(
                    "exact expectation over per-vertex label laws needs {:.3e} terms",
                    norm * widest.powi(k as i32)
                )));
            }
            let mut terms = Vec::new();
            let mut err = None;
            for_each_increasing(n, k, |a| {
                let phi: f64 = (0..k).map(|c| phi_weights[c][a[c]]).product();
                let tuple_laws: Vec<Vec<(f64, f64)>> = a.iter().map(|&v| laws[v].clone()).collect();
                match tuple_expectation(&tuple_laws, &edges, si, sj, &var) {
                    Ok(e) => terms.push(phi * e),
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            Ok(pairwise_sum(&terms) / norm)
        }
    }
}

/// `E[ψ_i ψ_j(U) ∏_{vw} V(U_v, U_w)]` for independent finite laws.
fn tuple_expectation(
    laws: &[Vec<(f64, f64)>],
    edges: &[(usize, usize)],
    si: &StatisticSpec,
    sj: &StatisticSpec,
    var: &impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    let k = laws.len();
    let terms: f64 = laws.iter().map(|l| l.len() as f64).product();
    if terms > LAW_GUARD {
        return Err(Error::guard(format!("exact label expectation needs {terms:.3e} terms")));
    }
    let mut idx = vec![0usize; k];
    let mut u = vec![0.0; k];
    let mut parts = Vec::new();
    loop {
        let mut p = 1.0;
        for c in 0..k {
            let (x, q) = laws[c][idx[c]];
            u[c] = x;
            p *= q;
        }
        let mut x = p * si.psi.eval(&u) * sj.psi.eval(&u);
        for &(a, b) in edges {
            x *= var(u[a], u[b]);
        }
        parts.push(x);
        let sizes_ok = advance_mixed(&mut idx, laws);
        if !sizes_ok {
            return Ok(pairwise_sum(&parts));
        }
    }
}

fn advance_mixed(idx: &mut [usize], laws: &[Vec<(f64, f64)>]) -> bool {
    if laws.iter().all(|l| l.len() == laws[0].len()) {
        return advance(idx, laws[0].len());
    }
    for c in (0..idx.len()).rev() {
        idx[c] += 1;
        if idx[c] < laws[c].len() {
            return true;
        }
        idx[c] = 0;
    }
    false
}

fn single_vertex_covariance(si: &StatisticSpec, sj: &StatisticSpec, scheme: &LabelScheme, n: usize) -> f64 {
    let partition = refine([si.psi.breakpoints(0), sj.psi.breakpoints(0)]);
    let cov_at = |v: usize| {
        let law = scheme.finite_law(v, n, &partition);
        let mi: f64 = law.iter().map(|&(u, p)| p * si.psi.factor(0, u)).sum();
        let mj: f64 = law.iter().map(|&(u, p)| p * sj.psi.factor(0, u)).sum();
        law.iter().map(|&(u, p)| p * (si.psi.factor(0, u) - mi) * (sj.psi.factor(0, u) - mj)).sum::<f64>()
    };
    let shared = scheme.identically_distributed().then(|| cov_at(1));
    let terms: Vec<f64> = (1..=n)
        .map(|v| {
            let t = v as f64 / n as f64;
            let c = match scheme {
                LabelScheme::Lattice => 0.0,
                _ => shared.unwrap_or_else(|| cov_at(v)),
            };
            si.phi.factor(0, t) * sj.phi.factor(0, t) * c
        })
        .collect();
    pairwise_sum(&terms) / n as f64
}
