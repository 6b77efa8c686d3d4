//! Orthogonal decomposition of the injective density `t^inj_F` into
//! centred subgraph sums weighted by projected label functions, and the
//! approximation of disconnected terms by products of connected ones.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphon::{advance, Graphon};
use crate::pattern::{PatternGraph, VertexSubset};
use crate::sampler::{GraphSample, LabelScheme};
use crate::statistics::{binomial, centred_matrix, falling_factorial, TUPLE_GUARD};
use crate::summation::pairwise_sum;
use crate::tuples::{distinct_sum, PairFactor, SymMatrix};

/// Largest pattern the decomposition handles.
pub const MAX_DECOMPOSITION_VERTICES: usize = 4;
/// Projections with max-norm at or below this are flagged as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;
const GRID_GUARD: usize = 1 << 20;

/// `ρ_{F,H}(u, y) = ∏_{H^c} κ(u_v, u_w) · ∏_H (y_vw − κ(u_v, u_w))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerm {
    pub h: PatternGraph,
    pub hc: PatternGraph,
}

impl ExpansionTerm {
    /// `u[v - 1]` is the label of vertex `v`; `y(v, w)` the edge value.
    pub fn evaluate(&self, kappa: &Graphon, u: &[f64], y: impl Fn(u8, u8) -> f64) -> f64 {
        let k = |v: u8, w: u8| kappa.value(u[v as usize - 1], u[w as usize - 1]);
        let fixed: f64 = self.hc.edges().iter().map(|&(v, w)| k(v, w)).product();
        let centred: f64 = self.h.edges().iter().map(|&(v, w)| y(v, w) - k(v, w)).product();
        fixed * centred
    }
}

/// The `2^{e(F)}` terms whose sum is `∏_{vw ∈ F} y_vw`, one per edge
/// subgraph `H` without isolated vertices.
pub fn expand_edge_product(f: &PatternGraph) -> Result<Vec<ExpansionTerm>> {
    if f.has_isolated_vertices() {
        return Err(Error::invalid(format!("pattern {f} has isolated vertices")));
    }
    f.edge_subgraphs()
        .into_iter()
        .map(|h| {
            let hc = f.edge_complement(&h)?;
            Ok(ExpansionTerm { h, hc })
        })
        .collect()
}

/// A finite label grid: cell (or atom) `c` has probability `probs[c]`, the
/// same for every coordinate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomGrid {
    pub probs: Vec<f64>,
}

impl AtomGrid {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::invalid("grid probabilities must be finite and nonnegative"));
        }
        if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("grid probabilities must sum to 1"));
        }
        Ok(AtomGrid { probs })
    }

    /// The law of `cell_of(U)` under `scheme`. Lattice labels are not random;
    /// their grid uses the cell widths, the law the lattice fills out.
    pub fn for_scheme(kappa: &Graphon, scheme: &LabelScheme) -> Result<Self> {
        match scheme {
            LabelScheme::IidUniform | LabelScheme::Lattice => AtomGrid::new(kappa.widths()),
            _ if scheme.identically_distributed() => {
                let law = scheme.discrete_law(1).expect("discrete scheme");
                let mut probs = vec![0.0; kappa.cells()];
                for (&x, &p) in law.atoms().iter().zip(law.probs()) {
                    probs[kappa.cell_of(x)] += p;
                }
                AtomGrid::new(probs)
            }
            _ => Err(Error::Unsupported(
                "the decomposition needs identically distributed labels; per-vertex laws differ".into(),
            )),
        }
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }
}

/// Replaces coordinate `c` of a `k`-dimensional table by its expectation.
fn marginalise(table: &[f64], k: usize, c: usize, grid: &AtomGrid) -> Vec<f64> {
    let m = grid.m();
    let stride = m.pow((k - 1 - c) as u32);
    let mut out = vec![0.0; table.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let digit = (idx / stride) % m;
        let base = idx - digit * stride;
        *o = (0..m).map(|x| grid.probs[x] * table[base + x * stride]).sum();
    }
    out
}

fn grid_size(m: usize, k: usize) -> Result<usize> {
    let size = (m as f64).powi(k as i32);
    if size > GRID_GUARD as f64 {
        return Err(Error::guard(format!("a {m}^{k} grid exceeds {GRID_GUARD} cells")));
    }
    Ok(m.pow(k as u32))
}

/// A projected component `ψ_A`, tabulated on the grid of its own
/// coordinates (the members of `A`, in increasing order).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectedWeight {
    pub a: VertexSubset,
    pub table: Vec<f64>,
    pub probs: Vec<f64>,
}

impl ProjectedWeight {
    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.table.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() <= ZERO_THRESHOLD
    }

    /// Value at the cells `c[i]` of the members of `A`.
    pub fn at(&self, cells: &[usize]) -> f64 {
        let m = self.m();
        self.table[cells.iter().fold(0, |idx, &c| idx * m + c)]
    }

    /// Largest `|E[ψ_A | U_B]|` over proper subsets `B ⊊ A`; zero exactly
    /// when `ψ_A` is orthogonal to every function of fewer coordinates.
    pub fn orthogonality_defect(&self) -> f64 {
        let r = self.a.len();
        let grid = AtomGrid { probs: self.probs.clone() };
        let mut worst: f64 = 0.0;
        for mask in 0..(1u32 << r) {
            if mask == (1 << r) - 1 {
                continue;
            }
            let mut t = self.table.clone();
            for c in 0..r {
                if mask & (1 << c) == 0 {
                    t = marginalise(&t, r, c, &grid);
                }
            }
            worst = t.iter().fold(worst, |w, x| w.max(x.abs()));
        }
        worst
    }
}

/// Splits a function tabulated on the `m^k` grid into its components
/// `ψ_A = Σ_{B ⊆ A} (−1)^{|A∖B|} E[ψ | U_B]`, one per `A ⊆ [k]`, ordered as
/// [`VertexSubset::all_subsets`].
pub fn hoeffding_project(psi: &[f64], k: usize, grid: &AtomGrid) -> Result<Vec<ProjectedWeight>> {
    let m = grid.m();
    let size = grid_size(m, k)?;
    if psi.len() != size {
        return Err(Error::invalid(format!("table has {} entries, a {m}^{k} grid needs {size}", psi.len())));
    }
    if psi.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("tabulated function must be finite"));
    }
    let full = (1u32 << k) - 1;
    // cond[mask] = E[ψ | U_B] for B = mask, as a full table
    let cond: Vec<Vec<f64>> = (0..=full)
        .map(|mask| {
            let mut t = psi.to_vec();
            for c in 0..k {
                if mask & (1 << c) == 0 {
                    t = marginalise(&t, k, c, grid);
                }
            }
            t
        })
        .collect();
    let mut out = Vec::new();
    for a in VertexSubset::all_subsets(k) {
        let amask: u32 = a.members().iter().map(|&v| 1u32 << (v - 1)).sum();
        let mut comp = vec![0.0; size];
        let mut b = amask;
        loop {
            let sign = if (amask & !b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            for (x, y) in comp.iter_mut().zip(&cond[b as usize]) {
                *x += sign * y;
            }
            if b == 0 {
                break;
            }
            b = (b - 1) & amask;
        }
        // restrict to the coordinates in A (other coordinates at cell 0)
        let r = a.len();
        let mut table = vec![0.0; m.pow(r as u32)];
        let mut cells = vec![0usize; r];
        let mut j = 0;
        loop {
            let mut idx = 0;
            for c in 0..k {
                let digit = a.members().iter().position(|&v| v as usize == c + 1).map_or(0, |i| cells[i]);
                idx = idx * m + digit;
            }
            table[j] = comp[idx];
            j += 1;
            if r == 0 || !advance(&mut cells, m) {
                break;
            }
        }
        out.push(ProjectedWeight { a, table, probs: grid.probs.clone() });
    }
    Ok(out)
}

/// One `(H, A)` term `r_{H,A}` of the decomposition of `t^inj_F`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionTerm {
    #[serde(serialize_with = "compact")]
    pub h: PatternGraph,
    pub a: VertexSubset,
    pub weight: ProjectedWeight,
    /// `|V(H) ∪ A|`.
    pub l: usize,
    pub zero: bool,
}

fn compact<S: serde::Serializer>(h: &PatternGraph, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&h.to_compact())
}

impl DecompositionTerm {
    /// `H ∪ A`, with the labels of `F`.
    pub fn support(&self) -> PatternGraph {
        self.h.union_with_vertices(&self.a)
    }
}

/// All `(H, A)` terms for `H ⊆' F` and `A ⊆ [k]`.
pub fn decompose_injective_density(f: &PatternGraph, kappa: &Graphon, scheme: &LabelScheme) -> Result<Vec<DecompositionTerm>> {
    let k = f.k();
    if k > MAX_DECOMPOSITION_VERTICES {
        return Err(Error::guard(format!("decomposition limited to {MAX_DECOMPOSITION_VERTICES} vertices, got {k}")));
    }
    if !f.is_on_range() {
        return Err(Error::invalid(format!("pattern {f} must have vertex set 1..={k}")));
    }
    let grid = AtomGrid::for_scheme(kappa, scheme)?;
    let m = grid.m();
    let size = grid_size(m, k)?;
    let mut out = Vec::new();
    for term in expand_edge_product(f)? {
        let hc_edges = term.hc.edges();
        let mut table = vec![0.0; size];
        let mut cells = vec![0usize; k];
        for entry in table.iter_mut() {
            *entry = hc_edges
                .iter()
                .map(|&(v, w)| kappa.cell_value(cells[v as usize - 1], cells[w as usize - 1]))
                .product();
            advance(&mut cells, m);
        }
        for weight in hoeffding_project(&table, k, &grid)? {
            let a = weight.a.clone();
            let l = term.h.union_with_vertices(&a).k();
            let zero = weight.is_zero();
            out.push(DecompositionTerm { h: term.h.clone(), a, weight, l, zero });
        }
    }
    Ok(out)
}

/// `(1/(n)_l) Σ_{distinct b} ψ_{H,A}(U_b at A) ∏_H (Y − κ)(b)`.
pub fn term_statistic(term: &DecompositionTerm, sample: &GraphSample, kappa: &Graphon) -> Result<f64> {
    let centred = (term.h.edge_count() > 0).then(|| centred_matrix(sample, kappa));
    term_statistic_with(term, sample, kappa, centred.as_ref())
}

/// Every term statistic of one sample, sharing the centred edge matrix.
pub fn term_statistics(terms: &[DecompositionTerm], sample: &GraphSample, kappa: &Graphon) -> Result<Vec<f64>> {
    let centred = terms.iter().any(|t| t.h.edge_count() > 0).then(|| centred_matrix(sample, kappa));
    terms.iter().map(|t| term_statistic_with(t, sample, kappa, centred.as_ref())).collect()
}

fn term_statistic_with(
    term: &DecompositionTerm,
    sample: &GraphSample,
    kappa: &Graphon,
    centred: Option<&SymMatrix>,
) -> Result<f64> {
    let n = sample.n();
    let l = term.l;
    if l == 0 {
        return Ok(term.weight.table[0]);
    }
    if n < l {
        return Err(Error::invalid(format!("n = {n} is smaller than the term size {l}")));
    }
    if binomial(n, l) > TUPLE_GUARD {
        return Err(Error::guard(format!("binom({n}, {l}) tuples exceed the limit of {TUPLE_GUARD:.0e}")));
    }
    if term.zero {
        return Ok(0.0);
    }
    let support = term.support();
    let edges: Vec<(usize, usize)> = support.position_edges();
    let a_pos: Vec<usize> = term.weight.a.members().iter().map(|&v| support.position_of(v).unwrap()).collect();
    let cells: Vec<usize> = sample.labels().iter().map(|&u| kappa.cell_of(u)).collect();
    let m = term.weight.m();
    let indicators: Vec<Vec<f64>> = (0..m).map(|c| cells.iter().map(|&x| if x == c { 1.0 } else { 0.0 }).collect()).collect();
    let ones = vec![1.0; n];
    let pf: Vec<PairFactor<'_>> = match centred {
        Some(mat) => edges.iter().map(|&(v, w)| PairFactor::new(v, w, mat)).collect(),
        None if edges.is_empty() => Vec::new(),
        None => return Err(Error::invalid("centred matrix missing for a term with edges")),
    };
    let r = a_pos.len();
    let mut parts = Vec::new();
    let mut idx = vec![0usize; r];
    for &value in &term.weight.table {
        if value != 0.0 {
            let mut w: Vec<&[f64]> = vec![&ones; l];
            for (i, &p) in a_pos.iter().enumerate() {
                w[p] = &indicators[idx[i]];
            }
            parts.push(value * distinct_sum(&w, &pf));
        }
        if r == 0 || !advance(&mut idx, m) {
            break;
        }
    }
    Ok(pairwise_sum(&parts) / falling_factorial(n, l))
}

/// One factor of a product term: a connected component `C'_j` relabelled
/// onto `[k_j]` and a separable weight, `vertex_functions[p][c]` being the
/// factor of position `p` on cell `c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentFactor {
    #[serde(serialize_with = "compact")]
    pub component: PatternGraph,
    pub vertex_functions: Vec<Vec<f64>>,
}

/// `scale · ∏_j (1/(n)_{k_j}) Σ_{distinct b} ψ_j(U_b) ∏_{C'_j} (Y − κ)(b)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductTerm {
    pub scale: f64,
    pub factors: Vec<ComponentFactor>,
}

/// Writes `ψ_{H,A}` in the tensor basis `h_c = 1[cell = c] − p_c`,
/// `c < m − 1`, whose coefficients are mixed finite differences against the
/// last cell, and distributes each basis product over the connected
/// components of `H ∪ A`. The expansion is exact on the grid, so only the
/// overlap between the component sums separates the result from `r_{H,A}`.
pub fn product_approximation(term: &DecompositionTerm) -> Result<Vec<ProductTerm>> {
    let support = term.support();
    let comps = support.components();
    if comps.len() < 2 {
        return Err(Error::invalid(format!("H ∪ A = {} is connected; no product approximation needed", support.to_compact())));
    }
    let m = term.weight.m();
    let r = term.a.len();
    let members = term.weight.a.members();
    let probs = &term.weight.probs;
    let basis = |c: usize| -> Vec<f64> { (0..m).map(|x| if x == c { 1.0 } else { 0.0 } - probs[c]).collect() };
    let mut out = Vec::new();
    if term.zero {
        return Ok(out);
    }
    let mut idx = vec![0usize; r];
    loop {
        // β_c = Σ_{T ⊆ A} (−1)^{|T|} ψ(c with T set to the last cell)
        let mut beta = 0.0;
        for mask in 0..(1u32 << r) {
            let cells: Vec<usize> = (0..r).map(|i| if mask & (1 << i) != 0 { m - 1 } else { idx[i] }).collect();
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            beta += sign * term.weight.at(&cells);
        }
        if beta.abs() > ZERO_THRESHOLD || r == 0 {
            let factors = comps
                .iter()
                .map(|comp| ComponentFactor {
                    component: comp.canonical_relabel(),
                    vertex_functions: comp
                        .vertices()
                        .iter()
                        .map(|&v| match members.iter().position(|&x| x == v) {
                            Some(i) => basis(idx[i]),
                            None => vec![1.0; m],
                        })
                        .collect(),
                })
                .collect();
            out.push(ProductTerm { scale: beta, factors });
        }
        if r == 0 || m == 1 || !advance(&mut idx, m - 1) {
            break;
        }
    }
    Ok(out)
}

/// Evaluates a sum of product terms on one sample.
pub fn product_statistic(products: &[ProductTerm], sample: &GraphSample, kappa: &Graphon) -> Result<f64> {
    let n = sample.n();
    let centred = centred_matrix(sample, kappa);
    let cells: Vec<usize> = sample.labels().iter().map(|&u| kappa.cell_of(u)).collect();
    let mut parts = Vec::new();
    for p in products {
        let mut value = p.scale;
        for f in &p.factors {
            let kj = f.component.k();
            if n < kj {
                return Err(Error::invalid(format!("n = {n} is smaller than a component of size {kj}")));
            }
            let w: Vec<Vec<f64>> = f.vertex_functions.iter().map(|g| cells.iter().map(|&c| g[c]).collect()).collect();
            let wr: Vec<&[f64]> = w.iter().map(|v| v.as_slice()).collect();
            let pf: Vec<PairFactor<'_>> =
                f.component.position_edges().into_iter().map(|(a, b)| PairFactor::new(a, b, &centred)).collect();
            value *= distinct_sum(&wr, &pf) / falling_factorial(n, kj);
        }
        parts.push(value);
    }
    Ok(pairwise_sum(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{sample, DiscreteLaw, EdgeModel};
    use crate::statistics::injective_density;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn named(s: &str) -> PatternGraph {
        PatternGraph::named(s).unwrap()
    }

    fn block() -> Graphon {
        Graphon::two_block(0.5, 0.8, 0.2, 0.8).unwrap()
    }

    #[test]
    fn edge_product_expansions() {
        let terms = expand_edge_product(&named("P3")).unwrap();
        assert_eq!(terms.len(), 4);
        assert!(terms[0].h.is_empty());
        assert_eq!(terms[0].hc, named("P3"));
        assert_eq!(terms[3].h, named("P3"));
        assert!(terms[3].hc.is_empty());
        assert_eq!(expand_edge_product(&named("K2")).unwrap().len(), 2);
        assert!(expand_edge_product(&PatternGraph::new(3, &[(1, 2)]).unwrap()).is_err());
    }

    #[test]
    fn edge_product_identity() {
        let kappa = Graphon::two_block(0.3, 0.9, 0.1, 0.6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for name in ["K2", "P3", "K3", "C4", "K3plusedge"] {
            let f = named(name);
            let terms = expand_edge_product(&f).unwrap();
            for _ in 0..200 {
                let u: Vec<f64> = (0..f.k()).map(|_| rng.random()).collect();
                let y: Vec<f64> = (0..16).map(|_| rng.random()).collect();
                let yv = |v: u8, w: u8| y[(v as usize - 1) * 4 + (w as usize - 1)];
                let prod: f64 = f.edges().iter().map(|&(v, w)| yv(v, w)).product();
                let sum: f64 = terms.iter().map(|t| t.evaluate(&kappa, &u, yv)).sum();
                assert!((sum - prod).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_of_constant_and_additive() {
        let grid = AtomGrid::new(vec![0.3, 0.7]).unwrap();
        let parts = hoeffding_project(&[2.0; 4], 2, &grid).unwrap();
        assert_eq!(parts[0].table, vec![2.0]);
        assert!(parts[1..].iter().all(|p| p.is_zero()));
        // ψ(u1, u2) = g(u1) + g(u2)
        let g = [1.0, 4.0];
        let mean = 0.3 * 1.0 + 0.7 * 4.0;
        let table: Vec<f64> = (0..4).map(|i| g[i / 2] + g[i % 2]).collect();
        let parts = hoeffding_project(&table, 2, &grid).unwrap();
        assert!((parts[0].table[0] - 2.0 * mean).abs() < 1e-12);
        for p in &parts[1..3] {
            for c in 0..2 {
                assert!((p.table[c] - (g[c] - mean)).abs() < 1e-12);
            }
        }
        assert!(parts[3].is_zero());
    }

    #[test]
    fn projection_components_reconstruct_and_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in [2usize, 3] {
            let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let grid = AtomGrid::new(raw.iter().map(|x| x / total).collect()).unwrap();
            for k in 1..=3 {
                let table: Vec<f64> = (0..m.pow(k as u32)).map(|_| rng.random_range(-1.0..1.0)).collect();
                let parts = hoeffding_project(&table, k, &grid).unwrap();
                let mut cells = vec![0usize; k];
                for &value in &table {
                    let sum: f64 = parts
                        .iter()
                        .map(|p| {
                            let sub: Vec<usize> = p.a.members().iter().map(|&v| cells[v as usize - 1]).collect();
                            p.at(&sub)
                        })
                        .sum();
                    assert!((sum - value).abs() < 1e-12);
                    advance(&mut cells, m);
                }
                assert!(parts.iter().all(|p| p.orthogonality_defect() < 1e-12));
            }
        }
    }

    #[test]
    fn k2_constant_graphon_terms() {
        let p = 0.3;
        let kappa = Graphon::constant(p).unwrap();
        let terms = decompose_injective_density(&named("K2"), &kappa, &LabelScheme::IidUniform).unwrap();
        let live: Vec<_> = terms.iter().filter(|t| !t.zero).collect();
        assert_eq!(live.len(), 2);
        assert_eq!(live[0].weight.table, vec![p]);
        assert_eq!(live[1].h, named("K2"));
        let g = sample(&kappa, &LabelScheme::IidUniform, EdgeModel::Bernoulli, 9, 3).unwrap();
        assert_eq!(term_statistic(live[0], &g, &kappa).unwrap(), p);
        let centred: f64 = g.edge_values().iter().map(|y| y - p).sum();
        let want = 2.0 * centred / (9.0 * 8.0);
        assert!((term_statistic(live[1], &g, &kappa).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn k2_block_graphon_vertex_terms() {
        let kappa = Graphon::two_block(0.5, 0.9, 0.2, 0.5).unwrap();
        let terms = decompose_injective_density(&named("K2"), &kappa, &LabelScheme::IidUniform).unwrap();
        let t = kappa.homomorphism_density(&named("K2"));
        let degree = [0.5 * 0.9 + 0.5 * 0.2, 0.5 * 0.2 + 0.5 * 0.5];
        for a in [VertexSubset::new([1]), VertexSubset::new([2])] {
            let term = terms.iter().find(|x| x.h.is_empty() && x.a == a).unwrap();
            assert!(!term.zero);
            for c in 0..2 {
                assert!((term.weight.table[c] - (degree[c] - t)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reconstruction_of_injective_density() {
        let kappa = block();
        let schemes = [
            LabelScheme::Lattice,
            LabelScheme::IidUniform,
            LabelScheme::discrete(DiscreteLaw::new(vec![0.25, 0.75], vec![0.4, 0.6]).unwrap()),
        ];
        for scheme in &schemes {
            for name in ["K2", "P3", "K3", "C4"] {
                let f = named(name);
                let terms = decompose_injective_density(&f, &kappa, scheme).unwrap();
                for seed in 0..3 {
                    let g = sample(&kappa, scheme, EdgeModel::Bernoulli, 14, seed).unwrap();
                    let total: f64 = term_statistics(&terms, &g, &kappa).unwrap().iter().sum();
                    let t = injective_density(&f, &g).unwrap();
                    assert!((total - t).abs() < 1e-10, "{name} {scheme}: {total} vs {t}");
                }
            }
        }
    }

    #[test]
    fn product_of_disjoint_edges() {
        let f = PatternGraph::new(4, &[(1, 2), (3, 4)]).unwrap();
        let kappa = Graphon::constant(0.4).unwrap();
        let terms = decompose_injective_density(&f, &kappa, &LabelScheme::IidUniform).unwrap();
        let term = terms.iter().find(|t| t.h == f && t.a.is_empty()).unwrap();
        let products = product_approximation(term).unwrap();
        assert_eq!(products.len(), 1);
        assert_eq!(products[0].factors.len(), 2);
        assert_eq!(products[0].factors[0].component, named("K2"));
        let connected = terms.iter().find(|t| t.h == PatternGraph::from_edges(&[(1, 2)]).unwrap() && t.a.is_empty()).unwrap();
        assert!(connected.support().is_connected());
        assert!(product_approximation(connected).is_err());
    }

    #[test]
    fn product_expansion_is_exact_without_edges() {
        // with H = ∅ the products differ from the term only through overlapping tuples
        let kappa = Graphon::two_block(0.4, 0.9, 0.3, 0.6).unwrap();
        let terms = decompose_injective_density(&named("P3"), &kappa, &LabelScheme::IidUniform).unwrap();
        let term = terms.iter().find(|t| t.h.is_empty() && t.a == VertexSubset::new([1, 3]) && !t.zero).unwrap();
        let products = product_approximation(term).unwrap();
        assert_eq!(products.len(), 1);
        // the tensor expansion reproduces the weight on the grid
        for c1 in 0..2 {
            for c3 in 0..2 {
                let p = &products[0];
                let v = p.scale * p.factors[0].vertex_functions[0][c1] * p.factors[1].vertex_functions[0][c3];
                assert!((v - term.weight.at(&[c1, c3])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_unsupported_inputs() {
        let laws = vec![DiscreteLaw::point(0.1).unwrap(), DiscreteLaw::point(0.9).unwrap()];
        assert!(decompose_injective_density(&named("K2"), &block(), &LabelScheme::per_vertex(laws)).is_err());
        let k5 = PatternGraph::new(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert!(decompose_injective_density(&k5, &block(), &LabelScheme::IidUniform).is_err());
        assert!(hoeffding_project(&[1.0, f64::NAN], 1, &AtomGrid::new(vec![0.5, 0.5]).unwrap()).is_err());
    }
}
