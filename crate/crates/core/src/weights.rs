//! Weight functions `φ` (on the ordered simplex) and `ψ` (on label vectors).
//!
//! Both are restricted to forms that are bounded and piecewise constant:
//! a constant, or a product of one step function per coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of the cell of `x` for a partition `0 = b_0 < ... < b_m = 1`.
///
/// A point on an interior breakpoint belongs to the cell on its left and
/// `0` belongs to the first cell.
#[inline]
pub fn cell_index(boundaries: &[f64], x: f64) -> usize {
    let m = boundaries.len() - 1;
    boundaries[1..m].partition_point(|&b| b < x)
}

pub(crate) fn check_partition(boundaries: &[f64]) -> Result<()> {
    if boundaries.len() < 2 {
        return Err(Error::invalid("a partition needs at least two breakpoints"));
    }
    if boundaries[0] != 0.0 || *boundaries.last().unwrap() != 1.0 {
        return Err(Error::invalid("breakpoints must start at 0 and end at 1"));
    }
    if boundaries.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("breakpoints must be strictly increasing"));
    }
    Ok(())
}

/// Common refinement of several partitions of `[0, 1]`.
pub fn refine<'a>(partitions: impl IntoIterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut all: Vec<f64> = vec![0.0, 1.0];
    for p in partitions {
        all.extend_from_slice(p);
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.dedup();
    all
}

/// A piecewise-constant function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr", into = "StepRepr")]
pub struct StepFunction {
    boundaries: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    boundaries: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<StepRepr> for StepFunction {
    type Error = Error;
    fn try_from(r: StepRepr) -> Result<Self> {
        StepFunction::new(r.boundaries, r.values)
    }
}

impl From<StepFunction> for StepRepr {
    fn from(s: StepFunction) -> Self {
        StepRepr { boundaries: s.boundaries, values: s.values }
    }
}

impl StepFunction {
    pub fn new(boundaries: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_partition(&boundaries)?;
        if values.len() + 1 != boundaries.len() {
            return Err(Error::invalid(format!(
                "step function has {} pieces but {} values",
                boundaries.len() - 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("step function values must be finite"));
        }
        Ok(StepFunction { boundaries, values })
    }

    pub fn constant(value: f64) -> Self {
        StepFunction { boundaries: vec![0.0, 1.0], values: vec![value] }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.values[cell_index(&self.boundaries, x)]
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫_0^1 f(x) dx`.
    pub fn integral(&self) -> f64 {
        self.boundaries.windows(2).zip(&self.values).map(|(b, v)| (b[1] - b[0]) * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `φ` or `ψ` of a statistic: a constant or a product of per-coordinate
/// step functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightFunction {
    Constant { value: f64 },
    SeparableStep { factors: Vec<StepFunction> },
}

impl WeightFunction {
    pub fn one() -> Self {
        WeightFunction::Constant { value: 1.0 }
    }

    pub fn constant(value: f64) -> Self {
        WeightFunction::Constant { value }
    }

    pub fn separable(factors: Vec<StepFunction>) -> Self {
        WeightFunction::SeparableStep { factors }
    }

    /// Checks the weight fits a `k`-dimensional domain.
    pub fn validate(&self, k: usize) -> Result<()> {
        match self {
            WeightFunction::Constant { value } if !value.is_finite() => {
                Err(Error::invalid("constant weight must be finite"))
            }
            WeightFunction::SeparableStep { factors } if factors.len() != k => Err(Error::invalid(format!(
                "separable weight has {} factors for a {k}-dimensional domain",
                factors.len()
            ))),
            _ => Ok(()),
        }
    }

    /// The factor acting on coordinate `coord` (0-based). A constant weight
    /// puts its value on the first coordinate.
    #[inline]
    pub fn factor(&self, coord: usize, x: f64) -> f64 {
        match self {
            WeightFunction::Constant { value } => {
                if coord == 0 {
                    *value
                } else {
                    1.0
                }
            }
            WeightFunction::SeparableStep { factors } => factors[coord].eval(x),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            WeightFunction::Constant { value } => *value,
            WeightFunction::SeparableStep { factors } => {
                factors.iter().zip(x).map(|(f, &xi)| f.eval(xi)).product()
            }
        }
    }

    /// Breakpoints of the coordinate factor (trivial for constants).
    pub fn breakpoints(&self, coord: usize) -> &[f64] {
        match self {
            WeightFunction::Constant { .. } => &[0.0, 1.0],
            WeightFunction::SeparableStep { factors } => factors[coord].boundaries(),
        }
    }

    pub fn all_breakpoints(&self) -> Vec<f64> {
        match self {
            WeightFunction::Constant { .. } => vec![0.0, 1.0],
            WeightFunction::SeparableStep { factors } => refine(factors.iter().map(|f| f.boundaries())),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            WeightFunction::Constant { value } => value.abs(),
            WeightFunction::SeparableStep { factors } => factors.iter().map(|f| f.max_abs()).product(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            WeightFunction::Constant { .. } => true,
            WeightFunction::SeparableStep { factors } => factors.iter().all(|f| f.values.windows(2).all(|w| w[0] == w[1])),
        }
    }
}

/// `∫_{D_k} f(t) dt` over `D_k = {t_1 ≤ ... ≤ t_k}` for an integrand that is
/// constant on products of the cells of `partition`.
///
/// Sums over non-decreasing cell assignments; a run of `r` coordinates in
/// the same cell of width `w` contributes `w^r / r!`.
pub fn simplex_integral(partition: &[f64], k: usize, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let m = partition.len() - 1;
    let widths: Vec<f64> = partition.windows(2).map(|w| w[1] - w[0]).collect();
    let mids: Vec<f64> = partition.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let mut cells = vec![0usize; k];
    let mut point = vec![0.0; k];
    let mut total = 0.0;
    loop {
        let mut vol = 1.0;
        let mut run = 1usize;
        for i in 0..k {
            point[i] = mids[cells[i]];
            if i > 0 && cells[i] == cells[i - 1] {
                run += 1;
                vol *= widths[cells[i]] / run as f64;
            } else {
                run = 1;
                vol *= widths[cells[i]];
            }
        }
        total += vol * f(&point);
        // next non-decreasing assignment
        let mut i = k;
        loop {
            if i == 0 {
                return total;
            }
            i -= 1;
            if cells[i] + 1 < m {
                cells[i] += 1;
                let c = cells[i];
                for c_j in cells.iter_mut().skip(i + 1) {
                    *c_j = c;
                }
                break;
            }
        }
    }
}
