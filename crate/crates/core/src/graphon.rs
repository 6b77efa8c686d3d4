//! Piecewise-constant graphons, homomorphism densities `t_F(κ)` and the
//! limiting covariance integrals for the iid-uniform and lattice label
//! schemes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::PatternGraph;
use crate::statistics::StatisticSpec;
use crate::weights::{cell_index, check_partition, refine, simplex_integral};

/// How a graphon was specified. Evaluation does not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphonKind {
    Constant,
    Step,
    Grid,
}

/// A symmetric kernel `κ: [0,1]² → [0,1]` that is constant on the products
/// of cells of a partition of `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graphon {
    kind: GraphonKind,
    boundaries: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum GraphonRepr {
    Constant { p: f64 },
    Step { boundaries: Vec<f64>, values: Vec<Vec<f64>> },
    Grid { values: Vec<Vec<f64>> },
}

impl Graphon {
    pub fn constant(p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Graphon { kind: GraphonKind::Constant, boundaries: vec![0.0, 1.0], values: vec![p] })
    }

    pub fn step(boundaries: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        check_partition(&boundaries)?;
        let m = boundaries.len() - 1;
        let flat = flatten_symmetric(&values, m)?;
        Ok(Graphon { kind: GraphonKind::Step, boundaries, values: flat })
    }

    /// Piecewise constant on the uniform `r × r` grid.
    pub fn grid(values: Vec<Vec<f64>>) -> Result<Self> {
        let r = values.len();
        if r == 0 {
            return Err(Error::invalid("grid graphon needs at least one cell"));
        }
        let boundaries: Vec<f64> = (0..=r).map(|i| i as f64 / r as f64).collect();
        let flat = flatten_symmetric(&values, r)?;
        Ok(Graphon { kind: GraphonKind::Grid, boundaries, values: flat })
    }

    /// The two-block graphon `[[a, b], [b, c]]` split at `split`.
    pub fn two_block(split: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        Graphon::step(vec![0.0, split, 1.0], vec![vec![a, b], vec![b, c]])
    }

    pub fn kind(&self) -> GraphonKind {
        self.kind
    }

    /// Number of cells `m` of the underlying partition.
    pub fn cells(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn widths(&self) -> Vec<f64> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    #[inline]
    pub fn cell_of(&self, x: f64) -> usize {
        cell_index(&self.boundaries, x)
    }

    /// Value on the product of cells `a × b`.
    #[inline]
    pub fn cell_value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.cells() + b]
    }

    /// `κ(x, y)`; coordinates outside `[0, 1]` are rejected.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::invalid(format!("graphon evaluated outside the unit square at ({x}, {y})")));
        }
        Ok(self.cell_value(self.cell_of(x), self.cell_of(y)))
    }

    /// Unchecked evaluation for labels already known to lie in `[0, 1]`.
    #[inline]
    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.cell_value(self.cell_of(x), self.cell_of(y))
    }

    /// True for `κ ≡ 0` or `κ ≡ 1`, which make every centred statistic vanish.
    pub fn is_degenerate(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0) || self.values.iter().all(|&v| v == 1.0)
    }

    pub fn value_matrix(&self) -> Vec<Vec<f64>> {
        let m = self.cells();
        (0..m).map(|a| (0..m).map(|b| self.cell_value(a, b)).collect()).collect()
    }

    /// `t_F(κ) = ∫ ∏_{v~w} κ(x_v, x_w) dx`, computed exactly as a weighted
    /// sum over all assignments of the vertices of `F` to cells.
    pub fn homomorphism_density(&self, f: &PatternGraph) -> f64 {
        let widths = self.widths();
        let k = f.k();
        let edges = f.position_edges();
        let m = self.cells();
        if k == 0 {
            return 1.0;
        }
        let mut cells = vec![0usize; k];
        let mut total = 0.0;
        loop {
            let weight: f64 = cells.iter().map(|&c| widths[c]).product();
            let prod: f64 = edges.iter().map(|&(v, w)| self.cell_value(cells[v], cells[w])).product();
            total += weight * prod;
            if !advance(&mut cells, m) {
                return total;
            }
        }
    }
}

/// Odometer increment over `[m]^k`; false once every assignment was seen.
pub(crate) fn advance(cells: &mut [usize], m: usize) -> bool {
    for c in cells.iter_mut().rev() {
        *c += 1;
        if *c < m {
            return true;
        }
        *c = 0;
    }
    false
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("graphon value {p} outside [0, 1]")));
    }
    Ok(())
}

fn flatten_symmetric(values: &[Vec<f64>], m: usize) -> Result<Vec<f64>> {
    if values.len() != m || values.iter().any(|row| row.len() != m) {
        return Err(Error::invalid(format!("graphon value matrix must be {m} x {m}")));
    }
    for a in 0..m {
        for b in 0..m {
            check_probability(values[a][b])?;
            if values[a][b] != values[b][a] {
                return Err(Error::invalid(format!("graphon value matrix is not symmetric at ({a}, {b})")));
            }
        }
    }
    Ok(values.iter().flatten().copied().collect())
}

impl TryFrom<GraphonRepr> for Graphon {
    type Error = Error;
    fn try_from(r: GraphonRepr) -> Result<Self> {
        match r {
            GraphonRepr::Constant { p } => Graphon::constant(p),
            GraphonRepr::Step { boundaries, values } => Graphon::step(boundaries, values),
            GraphonRepr::Grid { values } => Graphon::grid(values),
        }
    }
}

impl From<&Graphon> for GraphonRepr {
    fn from(g: &Graphon) -> Self {
        match g.kind {
            GraphonKind::Constant => GraphonRepr::Constant { p: g.values[0] },
            GraphonKind::Step => GraphonRepr::Step { boundaries: g.boundaries.clone(), values: g.value_matrix() },
            GraphonKind::Grid => GraphonRepr::Grid { values: g.value_matrix() },
        }
    }
}

impl Serialize for Graphon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphonRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graphon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphonRepr::deserialize(d)?;
        Graphon::try_from(repr).map_err(serde::de::Error::custom)
    }
}

/// `∫_{[0,1]^k} g(u) du` for `g` constant on products of the cells of
/// `partition`.
pub(crate) fn cube_integral(partition: &[f64], k: usize, mut g: impl FnMut(&[f64]) -> f64) -> f64 {
    let m = partition.len() - 1;
    let widths: Vec<f64> = partition.windows(2).map(|w| w[1] - w[0]).collect();
    let mids: Vec<f64> = partition.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    if k == 0 {
        return g(&[]);
    }
    let mut cells = vec![0usize; k];
    let mut point = vec![0.0; k];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for i in 0..k {
            point[i] = mids[cells[i]];
            w *= widths[cells[i]];
        }
        total += w * g(&point);
        if !advance(&mut cells, m) {
            return total;
        }
    }
}

fn edge_variance(kappa: &Graphon, pattern: &PatternGraph, u: &[f64]) -> f64 {
    pattern
        .position_edges()
        .iter()
        .map(|&(v, w)| {
            let p = kappa.value(u[v], u[w]);
            p * (1.0 - p)
        })
        .product()
}

/// Limit of `σ_ij` for iid-uniform labels, exactly as the integral is
/// written: `∫_{D_k} φ_i φ_j dt · ∫ ψ_i ψ_j ∏ κ(1-κ) du` when the labelled
/// patterns coincide, the centred label covariance when both have one
/// vertex, and `0` otherwise.
///
/// The finite-`n` covariance averages `φ_i φ_j` over the lattice points of
/// `D_k`, so it converges to `k!` times this value; see
/// [`limit_covariance_iid_normalised`].
pub fn limit_covariance_iid(si: &StatisticSpec, sj: &StatisticSpec, kappa: &Graphon) -> f64 {
    let (ki, kj) = (si.k(), sj.k());
    if ki == 1 && kj == 1 {
        let part = refine([si.phi.breakpoints(0), sj.phi.breakpoints(0), si.psi.breakpoints(0), sj.psi.breakpoints(0)]);
        let phi_part = cube_integral(&part, 1, |t| si.phi.eval(t) * sj.phi.eval(t));
        let mean_i = cube_integral(&part, 1, |u| si.psi.eval(u));
        let mean_j = cube_integral(&part, 1, |u| sj.psi.eval(u));
        let psi_part = cube_integral(&part, 1, |u| (si.psi.eval(u) - mean_i) * (sj.psi.eval(u) - mean_j));
        return phi_part * psi_part;
    }
    if si.pattern != sj.pattern {
        return 0.0;
    }
    let k = ki;
    let phi_part_grid = refine([si.phi.all_breakpoints().as_slice(), sj.phi.all_breakpoints().as_slice()]);
    let simplex = simplex_integral(&phi_part_grid, k, |t| si.phi.eval(t) * sj.phi.eval(t));
    let psi_grid = refine([
        si.psi.all_breakpoints().as_slice(),
        sj.psi.all_breakpoints().as_slice(),
        kappa.boundaries(),
    ]);
    let cube = cube_integral(&psi_grid, k, |u| si.psi.eval(u) * sj.psi.eval(u) * edge_variance(kappa, &si.pattern, u));
    simplex * cube
}

/// Limit of `σ_ij` for lattice labels `U_i = i/n`:
/// `∫_{D_k} φ_i φ_j ψ_i ψ_j ∏ κ(t_v, t_w)(1 - κ(t_v, t_w)) dt` for identical
/// labelled patterns, `0` otherwise (including the one-vertex case, where
/// lattice labels carry no randomness).
pub fn limit_covariance_lattice(si: &StatisticSpec, sj: &StatisticSpec, kappa: &Graphon) -> f64 {
    if si.k() == 1 || sj.k() == 1 || si.pattern != sj.pattern {
        return 0.0;
    }
    let grid = refine([
        si.phi.all_breakpoints().as_slice(),
        sj.phi.all_breakpoints().as_slice(),
        si.psi.all_breakpoints().as_slice(),
        sj.psi.all_breakpoints().as_slice(),
        kappa.boundaries(),
    ]);
    simplex_integral(&grid, si.k(), |t| {
        si.phi.eval(t) * sj.phi.eval(t) * si.psi.eval(t) * sj.psi.eval(t) * edge_variance(kappa, &si.pattern, t)
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// [`limit_covariance_iid`] rescaled to the simplex-mean convention the
/// finite-`n` covariance converges to.
pub fn limit_covariance_iid_normalised(si: &StatisticSpec, sj: &StatisticSpec, kappa: &Graphon) -> f64 {
    let raw = limit_covariance_iid(si, sj, kappa);
    if si.k() == 1 && sj.k() == 1 {
        raw
    } else {
        factorial(si.k()) * raw
    }
}

/// [`limit_covariance_lattice`] rescaled to the simplex-mean convention.
pub fn limit_covariance_lattice_normalised(si: &StatisticSpec, sj: &StatisticSpec, kappa: &Graphon) -> f64 {
    factorial(si.k()) * limit_covariance_lattice(si, sj, kappa)
}
