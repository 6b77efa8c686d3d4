//! The Stein coupling `(W, W', G)` for centred subgraph statistics, an exact
//! verifier of the coupling identity at tiny `n`, and the fourth-moment
//! experiment for a second-chaos statistic.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphon::Graphon;
use crate::par::map_range;
use crate::rng::{domain, StreamKey};
use crate::sampler::{EdgeModel, GraphSample, LabelScheme};
use crate::statistics::{binomial, covariance_matrix, statistic_vector, StatisticSpec};
use crate::summation::pairwise_sum;
use crate::tuples::{for_each_increasing, increasing_sum, PairFactor, SymMatrix};
use crate::weights::{simplex_integral, WeightFunction};

/// Largest number of vertex pairs the exact verifier enumerates over.
pub const MAX_EXACT_PAIRS: usize = 20;
/// Largest number of label configurations the exact verifier sums over.
pub const MAX_LABEL_CONFIGS: f64 = 4096.0;
const NEIGHBOURHOOD_GUARD: f64 = 1e7;

fn overlap(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|v| b.contains(v)).count()
}

/// `N^{i,a}_j`: the increasing `k_j`-tuples from `[n]` sharing at least
/// `min(2, k_i)` vertices with `a` (1-based).
pub fn neighborhood(a: &[usize], kj: usize, n: usize) -> Vec<Vec<usize>> {
    let ki = a.len();
    let need = ki.min(2);
    let mut out = Vec::new();
    if ki >= 2 && kj == 1 {
        return out;
    }
    for_each_increasing(n, kj, |b| {
        let b1: Vec<usize> = b.iter().map(|v| v + 1).collect();
        if overlap(a, &b1) >= need {
            out.push(b1);
        }
    });
    out
}

/// `E ψ(U_v)` for a one-vertex statistic, exact for step `ψ`.
fn vertex_mean(spec: &StatisticSpec, scheme: &LabelScheme, v: usize, n: usize) -> f64 {
    scheme.finite_law(v, n, spec.psi.breakpoints(0)).iter().map(|&(u, p)| p * spec.psi.factor(0, u)).sum()
}

/// `X_{i,a} = binom(n, k)^{-1/2} φ(a/n) Φ_{i,a} T_{i,a}` for a 1-based tuple.
fn x_value(spec: &StatisticSpec, a: &[usize], labels: &[f64], y: impl Fn(usize, usize) -> f64, kappa: &Graphon, scheme: &LabelScheme) -> f64 {
    let n = labels.len();
    let k = spec.k();
    let t: Vec<f64> = a.iter().map(|&v| v as f64 / n as f64).collect();
    let u: Vec<f64> = a.iter().map(|&v| labels[v - 1]).collect();
    let phi = spec.phi.eval(&t);
    let big_phi = if k == 1 { spec.psi.eval(&u) - vertex_mean(spec, scheme, a[0], n) } else { spec.psi.eval(&u) };
    let centred: f64 = spec
        .pattern
        .position_edges()
        .iter()
        .map(|&(p, q)| y(a[p] - 1, a[q] - 1) - kappa.value(u[p], u[q]))
        .product();
    phi * big_phi * centred / binomial(n, k).sqrt()
}

/// One draw of `(I, A)` and the resulting `W'`, `G` and `D = W' − W`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingRealisation {
    /// Spec index, 0-based.
    pub index: usize,
    /// Tuple, 1-based.
    pub tuple: Vec<usize>,
    pub w: Vec<f64>,
    pub w_prime: Vec<f64>,
    pub g: Vec<f64>,
    pub d: Vec<f64>,
}

/// The `r`-th increasing `k`-tuple of `[n]` in lexicographic order, 1-based.
fn unrank(mut r: u64, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut start = 1;
    for slot in 0..k {
        let left = k - slot - 1;
        let mut v = start;
        loop {
            let block = binomial(n - v, left) as u64;
            if r < block {
                break;
            }
            r -= block;
            v += 1;
        }
        out.push(v);
        start = v + 1;
    }
    out
}

/// Draws `I` uniformly from the specs and `A` uniformly from `I^n_{k_I}`.
pub fn draw_coupling(specs: &[StatisticSpec], sample: &GraphSample, kappa: &Graphon, seed: u64) -> Result<CouplingRealisation> {
    let d = specs.len();
    if d == 0 {
        return Err(Error::invalid("the coupling needs at least one statistic"));
    }
    let n = sample.n();
    for s in specs {
        if binomial(n, s.k()) > NEIGHBOURHOOD_GUARD {
            return Err(Error::guard(format!("binom({n}, {}) tuples are too many to scan for neighbourhoods", s.k())));
        }
    }
    let w = statistic_vector(specs, sample, kappa)?;
    let mut rng = StreamKey::new(seed).derive(domain::COUPLING).rng();
    let index = rng.random_range(0..d);
    let ki = specs[index].k();
    let tuple = unrank(rng.random_range(0..binomial(n, ki) as u64), n, ki);
    let labels = sample.labels();
    let y = |v: usize, u: usize| sample.y(v, u);
    let w_prime: Vec<f64> = specs
        .iter()
        .enumerate()
        .map(|(j, sj)| {
            let removed: Vec<f64> = neighborhood(&tuple, sj.k(), n)
                .iter()
                .map(|b| x_value(sj, b, labels, y, kappa, sample.scheme()))
                .collect();
            w[j] - pairwise_sum(&removed)
        })
        .collect();
    let mut g = vec![0.0; d];
    g[index] = -(d as f64) * binomial(n, ki) * x_value(&specs[index], &tuple, labels, y, kappa, sample.scheme());
    let diff = w_prime.iter().zip(&w).map(|(a, b)| a - b).collect();
    Ok(CouplingRealisation { index, tuple, w, w_prime, g, d: diff })
}

/// A coordinate monomial test function `g(w) = e_o · ∏ w_i^{α_i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Monomial {
    pub output: usize,
    pub powers: Vec<u32>,
}

impl Monomial {
    pub fn eval(&self, w: &[f64]) -> f64 {
        self.powers.iter().zip(w).map(|(&p, &x)| x.powi(p as i32)).product()
    }

    /// Every monomial of total degree at most `max_degree` in `d`
    /// variables, for each output coordinate.
    pub fn family(d: usize, max_degree: u32) -> Vec<Monomial> {
        let mut powers_list = Vec::new();
        let mut p = vec![0u32; d];
        loop {
            if p.iter().sum::<u32>() <= max_degree {
                powers_list.push(p.clone());
            }
            let mut i = d;
            loop {
                if i == 0 {
                    let mut out = Vec::new();
                    for output in 0..d {
                        for powers in &powers_list {
                            out.push(Monomial { output, powers: powers.clone() });
                        }
                    }
                    return out;
                }
                i -= 1;
                if p[i] < max_degree {
                    p[i] += 1;
                    break;
                }
                p[i] = 0;
            }
        }
    }

    pub fn describe(&self) -> String {
        let body: Vec<String> = self
            .powers
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0)
            .map(|(i, &p)| if p == 1 { format!("w{}", i + 1) } else { format!("w{}^{p}", i + 1) })
            .collect();
        let body = if body.is_empty() { "1".to_string() } else { body.join("*") };
        format!("e{}*{}", self.output + 1, body)
    }
}

/// Both sides of `E{Gᵗg(W') − Gᵗg(W)} = E{Wᵗg(W)}` for one test function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteinRow {
    pub g: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteinReport {
    pub n: usize,
    pub rows: Vec<SteinRow>,
    pub max_residual: f64,
    /// `E{G_i D_j}` by enumeration.
    pub gd: Vec<Vec<f64>>,
    /// The exact covariance it should reproduce.
    pub sigma: Vec<Vec<f64>>,
    pub gd_residual: f64,
}

/// Exact expectations over every edge configuration (and every label
/// configuration for discrete labels), averaged over `(I, A)`.
pub fn verify_stein_identity_exact(
    specs: &[StatisticSpec],
    kappa: &Graphon,
    scheme: &LabelScheme,
    n: usize,
    family: &[Monomial],
) -> Result<SteinReport> {
    let d = specs.len();
    if d == 0 {
        return Err(Error::invalid("the coupling needs at least one statistic"));
    }
    let pairs = n * n.saturating_sub(1) / 2;
    if pairs > MAX_EXACT_PAIRS {
        return Err(Error::guard(format!("{pairs} vertex pairs exceed the exact-enumeration limit of {MAX_EXACT_PAIRS}")));
    }
    if kappa.is_degenerate() {
        return Err(Error::Degenerate("κ ≡ 0 or κ ≡ 1".into()));
    }
    scheme.validate(n)?;
    for s in specs {
        if s.k() > n {
            return Err(Error::invalid(format!("n = {n} is smaller than pattern size {}", s.k())));
        }
    }
    if family.iter().any(|m| m.output >= d || m.powers.len() != d) {
        return Err(Error::invalid("test function dimensions do not match the specs"));
    }
    let label_configs = label_configurations(scheme, n)?;
    let tuples: Vec<Vec<Vec<usize>>> = specs
        .iter()
        .map(|s| {
            let mut t = Vec::new();
            for_each_increasing(n, s.k(), |a| t.push(a.iter().map(|v| v + 1).collect::<Vec<_>>()));
            t
        })
        .collect();
    // neighbourhoods as indices into the tuple lists
    let nbhd: Vec<Vec<Vec<Vec<usize>>>> = (0..d)
        .map(|i| {
            tuples[i]
                .iter()
                .map(|a| {
                    (0..d)
                        .map(|j| {
                            let need = specs[i].k().min(2);
                            if specs[i].k() >= 2 && specs[j].k() == 1 {
                                return Vec::new();
                            }
                            (0..tuples[j].len()).filter(|&b| overlap(a, &tuples[j][b]) >= need).collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let pair_list: Vec<(usize, usize)> = (0..n).flat_map(|v| (v + 1..n).map(move |w| (v, w))).collect();
    let rows = family.len();
    let mut lhs = vec![0.0; rows];
    let mut rhs = vec![0.0; rows];
    let mut gd = vec![vec![0.0; d]; d];
    let mut y = vec![vec![0.0; n]; n];
    for (labels, label_prob) in &label_configs {
        let probs: Vec<f64> = pair_list.iter().map(|&(v, w)| kappa.value(labels[v], labels[w])).collect();
        for mask in 0u32..(1u32 << pairs) {
            let mut prob = *label_prob;
            for (b, &(v, w)) in pair_list.iter().enumerate() {
                let on = mask >> b & 1 == 1;
                let val = if on { 1.0 } else { 0.0 };
                y[v][w] = val;
                y[w][v] = val;
                prob *= if on { probs[b] } else { 1.0 - probs[b] };
            }
            if prob == 0.0 {
                continue;
            }
            let x: Vec<Vec<f64>> = (0..d)
                .map(|i| tuples[i].iter().map(|a| x_value(&specs[i], a, labels, |p, q| y[p][q], kappa, scheme)).collect())
                .collect();
            let w: Vec<f64> = x.iter().map(|xi| pairwise_sum(xi)).collect();
            for (r, g) in family.iter().enumerate() {
                rhs[r] += prob * w[g.output] * g.eval(&w);
            }
            for i in 0..d {
                for (ai, &xa) in x[i].iter().enumerate() {
                    if xa == 0.0 {
                        continue;
                    }
                    let w_prime: Vec<f64> = (0..d)
                        .map(|j| w[j] - nbhd[i][ai][j].iter().map(|&b| x[j][b]).sum::<f64>())
                        .collect();
                    // P(I = i, A = a) · G_i = −X_{i,a}
                    for (r, g) in family.iter().enumerate() {
                        if g.output == i {
                            lhs[r] += prob * -xa * (g.eval(&w_prime) - g.eval(&w));
                        }
                    }
                    for j in 0..d {
                        gd[i][j] += prob * -xa * (w_prime[j] - w[j]);
                    }
                }
            }
        }
    }
    let rows: Vec<SteinRow> = family
        .iter()
        .zip(lhs.iter().zip(&rhs))
        .map(|(g, (&l, &r))| SteinRow { g: g.describe(), lhs: l, rhs: r, residual: (l - r).abs() })
        .collect();
    let max_residual = rows.iter().fold(0.0, |m: f64, r| m.max(r.residual));
    let cov = covariance_matrix(specs, scheme, kappa, EdgeModel::Bernoulli, n)?;
    let sigma: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| cov.get(i, j)).collect()).collect();
    let mut gd_residual: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            gd_residual = gd_residual.max((gd[i][j] - sigma[i][j]).abs());
        }
    }
    Ok(SteinReport { n, rows, max_residual, gd, sigma, gd_residual })
}

/// Every label vector with its probability: the lattice point, or the
/// product of the per-vertex discrete laws.
fn label_configurations(scheme: &LabelScheme, n: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    match scheme {
        LabelScheme::Lattice => Ok(vec![((1..=n).map(|v| v as f64 / n as f64).collect(), 1.0)]),
        LabelScheme::IidUniform => Err(Error::Unsupported(
            "exact verification needs lattice or discrete labels; uniform labels have no finite configuration set".into(),
        )),
        LabelScheme::IndependentDiscrete(_) => {
            let laws: Vec<_> = (1..=n).map(|v| scheme.discrete_law(v).unwrap()).collect();
            let count: f64 = laws.iter().map(|l| l.atoms().len() as f64).product();
            if count > MAX_LABEL_CONFIGS {
                return Err(Error::guard(format!("{count} label configurations exceed {MAX_LABEL_CONFIGS}")));
            }
            let mut out = vec![(Vec::new(), 1.0)];
            for law in laws {
                let mut next = Vec::new();
                for (prefix, p) in &out {
                    for (&x, &q) in law.atoms().iter().zip(law.probs()) {
                        if q == 0.0 {
                            continue;
                        }
                        let mut v: Vec<f64> = prefix.clone();
                        v.push(x);
                        next.push((v, p * q));
                    }
                }
                out = next;
            }
            Ok(out)
        }
    }
}

/// Result of the fourth-moment experiment at one `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourthMomentReport {
    pub n: usize,
    pub replications: usize,
    pub estimate: f64,
    pub se: f64,
    pub second_moment: f64,
    pub second_moment_se: f64,
    /// `Var F_n = n^{-3} Σ φ²`.
    pub variance: f64,
    /// Exact `E F_n⁴ = 3 Var² + 48 tr(B⁴)`.
    pub target: f64,
    /// `3 Var²`, the Gaussian part alone.
    pub gaussian_part: f64,
    pub second_moment_ok: bool,
}

/// `F_n = Σ_{i<j<k} √n φ(i/n, j/n, k/n) X_ij X_jk` with iid `X ~ N(0, n^{-2})`.
pub fn fourth_moment_experiment(n: usize, replications: usize, phi: &WeightFunction, seed: u64) -> Result<FourthMomentReport> {
    phi.validate(3)?;
    let norm = simplex_integral(&phi.all_breakpoints(), 3, |t| phi.eval(t).powi(2));
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("φ must satisfy ∫ φ² = 1 over the ordered simplex, got {norm}")));
    }
    if n < 3 {
        return Err(Error::invalid("the fourth-moment experiment needs n >= 3"));
    }
    if replications < 2 {
        return Err(Error::invalid("need at least two replications"));
    }
    let w: Vec<Vec<f64>> = (0..3).map(|c| (1..=n).map(|v| phi.factor(c, v as f64 / n as f64)).collect()).collect();
    let sigma = 1.0 / n as f64;
    let scale = (n as f64).sqrt();
    let key = StreamKey::new(seed).derive(domain::CHAOS);
    let values = map_range(replications, |r| {
        let mut rng = key.derive(r as u64).rng();
        let draws: Vec<f64> = (0..n * (n - 1) / 2).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect();
        let x = SymMatrix::from_upper(n, &draws);
        let wr: Vec<&[f64]> = w.iter().map(|v| v.as_slice()).collect();
        scale * increasing_sum(&wr, &[PairFactor::new(0, 1, &x), PairFactor::new(1, 2, &x)])
    });
    let r = replications as f64;
    let second: Vec<f64> = values.iter().map(|f| f * f).collect();
    let fourth: Vec<f64> = second.iter().map(|f| f * f).collect();
    let (m2, v2) = crate::summation::mean_and_variance(&second);
    let (m4, v4) = crate::summation::mean_and_variance(&fourth);
    let (variance, target) = exact_fourth_moment(n, phi);
    let second_moment_se = (v2 / r).sqrt();
    Ok(FourthMomentReport {
        n,
        replications,
        estimate: m4,
        se: (v4 / r).sqrt(),
        second_moment: m2,
        second_moment_se,
        variance,
        target,
        gaussian_part: 3.0 * variance * variance,
        second_moment_ok: (m2 - variance).abs() <= 3.0 * second_moment_se,
    })
}

/// `(Var F_n, E F_n⁴)` for the Gaussian quadratic form `F_n = Zᵗ B Z`,
/// `B_{ij,jk} = √n φ / (2 n²)`: `Var = 2 tr B²`, `E F⁴ = 3 Var² + 48 tr B⁴`.
pub fn exact_fourth_moment(n: usize, phi: &WeightFunction) -> (f64, f64) {
    let pairs = n * (n - 1) / 2;
    let idx = |v: usize, w: usize| crate::sampler::pair_index(n, v.min(w), v.max(w));
    let c = |i: usize, j: usize, k: usize| {
        (n as f64).sqrt() * phi.eval(&[(i + 1) as f64 / n as f64, (j + 1) as f64 / n as f64, (k + 1) as f64 / n as f64])
            / (n as f64 * n as f64)
    };
    // sparse rows of B: edge {v, w} pairs with {u, v} (u < v < w) and {w, z} (v < w < z)
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); pairs];
    let mut sum_sq = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let b = c(i, j, k) / 2.0;
                let (e1, e2) = (idx(i, j), idx(j, k));
                rows[e1].push((e2, b));
                rows[e2].push((e1, b));
                sum_sq.push(2.0 * b * b);
            }
        }
    }
    let variance = 2.0 * pairwise_sum(&sum_sq);
    // tr B⁴ = ‖B²‖_F², one row of B² at a time
    let traces = map_range(pairs, |e| {
        let mut acc = std::collections::BTreeMap::new();
        for &(f, b1) in &rows[e] {
            for &(g, b2) in &rows[f] {
                *acc.entry(g).or_insert(0.0) += b1 * b2;
            }
        }
        acc.values().map(|v: &f64| v * v).sum::<f64>()
    });
    let tr4 = pairwise_sum(&traces);
    (variance, 3.0 * variance * variance + 48.0 * tr4)
}
