//! Sums over strictly increasing vertex tuples of products of vertex weights
//! and pair matrices:
//!
//! `Σ_{a_1 < ... < a_k} ∏_i w_i(a_i) ∏_{(i,j) ∈ E} M_{ij}(a_i, a_j)`.
//!
//! Patterns on three vertices have closed forms that are quadratic in `n`
//! except the triangle; larger patterns fall back to a depth-first walk
//! whose innermost vertex is closed by a single loop.

use crate::par::map_range;
use crate::summation::pairwise_sum;

/// Dense symmetric `n × n` matrix with zero diagonal, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    /// Fills entry `(v, w)`, `v ≠ w`, from `f(v, w)` evaluated for `v < w`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for v in 0..n {
            for w in v + 1..n {
                let x = f(v, w);
                m.data[v * n + w] = x;
                m.data[w * n + v] = x;
            }
        }
        m
    }

    /// From the row-major upper triangle `(0,1), (0,2), ..., (n-2,n-1)`.
    pub fn from_upper(n: usize, upper: &[f64]) -> Self {
        assert_eq!(upper.len(), n * n.saturating_sub(1) / 2, "upper triangle has the wrong length");
        let mut m = SymMatrix::zeros(n);
        let mut it = upper.iter();
        for v in 0..n {
            for w in v + 1..n {
                let x = *it.next().unwrap();
                m.data[v * n + w] = x;
                m.data[w * n + v] = x;
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, v: usize, w: usize) -> f64 {
        self.data[v * self.n + w]
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.n..(v + 1) * self.n]
    }
}

/// One pattern edge between tuple positions `i < j`.
#[derive(Clone, Copy, Debug)]
pub struct PairFactor<'a> {
    pub i: usize,
    pub j: usize,
    pub m: &'a SymMatrix,
}

impl<'a> PairFactor<'a> {
    pub fn new(i: usize, j: usize, m: &'a SymMatrix) -> Self {
        if i < j {
            PairFactor { i, j, m }
        } else {
            PairFactor { i: j, j: i, m }
        }
    }
}

/// The increasing-tuple sum; `weights[i]` has length `n`.
pub fn increasing_sum(weights: &[&[f64]], edges: &[PairFactor<'_>]) -> f64 {
    let k = weights.len();
    assert!(k >= 1, "tuple sums need at least one position");
    let n = weights[0].len();
    debug_assert!(weights.iter().all(|w| w.len() == n));
    debug_assert!(edges.iter().all(|e| e.i < e.j && e.j < k && e.m.n() == n));
    if n < k {
        return 0.0;
    }
    match k {
        1 => pairwise_sum(weights[0]),
        2 => sum2(weights[0], weights[1], edges.first().map(|e| e.m)),
        3 => sum3(weights, edges),
        _ => sum_generic(weights, edges),
    }
}

/// The sum over ordered tuples of distinct vertices, obtained by summing the
/// increasing-tuple sum over every relabelling of the positions.
pub fn distinct_sum(weights: &[&[f64]], edges: &[PairFactor<'_>]) -> f64 {
    let k = weights.len();
    let mut parts = Vec::new();
    crate::pattern::for_each_permutation(k, |sigma| {
        // position i of the ordered tuple sits in sorted slot sigma[i]
        let mut w: Vec<&[f64]> = vec![&[]; k];
        for i in 0..k {
            w[sigma[i]] = weights[i];
        }
        let e: Vec<PairFactor<'_>> = edges.iter().map(|e| PairFactor::new(sigma[e.i], sigma[e.j], e.m)).collect();
        parts.push(increasing_sum(&w, &e));
    });
    pairwise_sum(&parts)
}

/// Direct enumeration of every increasing tuple; the reference the closed
/// forms are tested against.
pub fn brute_increasing_sum(weights: &[&[f64]], edges: &[PairFactor<'_>]) -> f64 {
    let k = weights.len();
    let n = weights[0].len();
    let mut total = 0.0;
    for_each_increasing(n, k, |a| {
        let mut x: f64 = (0..k).map(|i| weights[i][a[i]]).product();
        for e in edges {
            x *= e.m.get(a[e.i], a[e.j]);
        }
        total += x;
    });
    total
}

/// Calls `f` on each strictly increasing `k`-tuple from `0..n`, in
/// lexicographic order.
pub fn for_each_increasing(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut a: Vec<usize> = (0..k).collect();
    loop {
        f(&a);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if a[i] < n - k + i {
                a[i] += 1;
                for j in i + 1..k {
                    a[j] = a[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn sum2(w0: &[f64], w1: &[f64], m: Option<&SymMatrix>) -> f64 {
    let n = w0.len();
    match m {
        None => {
            let mut pre = 0.0;
            let terms: Vec<f64> = (0..n)
                .map(|b| {
                    let t = w1[b] * pre;
                    pre += w0[b];
                    t
                })
                .collect();
            pairwise_sum(&terms)
        }
        Some(m) => {
            let rows = map_range(n, |a| {
                let row = m.row(a);
                let mut s = 0.0;
                for b in a + 1..n {
                    s += row[b] * w1[b];
                }
                w0[a] * s
            });
            pairwise_sum(&rows)
        }
    }
}

/// `pre[b] = Σ_{a<b} w[a]`.
fn prefix_exclusive(w: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    w.iter()
        .map(|&x| {
            let p = acc;
            acc += x;
            p
        })
        .collect()
}

/// `suf[b] = Σ_{c>b} w[c]`.
fn suffix_exclusive(w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; w.len()];
    let mut acc = 0.0;
    for b in (0..w.len()).rev() {
        out[b] = acc;
        acc += w[b];
    }
    out
}

fn sum3(w: &[&[f64]], edges: &[PairFactor<'_>]) -> f64 {
    let (w0, w1, w2) = (w[0], w[1], w[2]);
    let n = w0.len();
    let mut ab = None;
    let mut ac = None;
    let mut bc = None;
    for e in edges {
        match (e.i, e.j) {
            (0, 1) => ab = Some(e.m),
            (0, 2) => ac = Some(e.m),
            (1, 2) => bc = Some(e.m),
            _ => unreachable!(),
        }
    }
    // L(b) = Σ_{a<b} w0(a) A(a,b) and R(b) = Σ_{c>b} C(b,c) w2(c)
    let left = |m: &SymMatrix, b: usize| -> f64 {
        let row = m.row(b);
        let mut s = 0.0;
        for a in 0..b {
            s += w0[a] * row[a];
        }
        s
    };
    let right = |m: &SymMatrix, b: usize| -> f64 {
        let row = m.row(b);
        let mut s = 0.0;
        for c in b + 1..n {
            s += row[c] * w2[c];
        }
        s
    };
    let terms: Vec<f64> = match (ab, ac, bc) {
        (None, None, None) => {
            let p0 = prefix_exclusive(w0);
            let s2 = suffix_exclusive(w2);
            (0..n).map(|b| w1[b] * p0[b] * s2[b]).collect()
        }
        (Some(a_m), None, None) => {
            let s2 = suffix_exclusive(w2);
            map_range(n, |b| w1[b] * s2[b] * left(a_m, b))
        }
        (None, None, Some(c_m)) => {
            let p0 = prefix_exclusive(w0);
            map_range(n, |b| w1[b] * p0[b] * right(c_m, b))
        }
        (None, Some(b_m), None) => {
            // Σ_{a<c} w0(a) B(a,c) w2(c) Σ_{a<b<c} w1(b)
            let p1 = prefix_exclusive(w1);
            map_range(n, |a| {
                let row = b_m.row(a);
                let base = p1[a] + w1[a];
                let mut s = 0.0;
                for c in a + 2..n {
                    s += row[c] * w2[c] * (p1[c] - base);
                }
                w0[a] * s
            })
        }
        (Some(a_m), None, Some(c_m)) => map_range(n, |b| w1[b] * left(a_m, b) * right(c_m, b)),
        (Some(a_m), Some(b_m), None) => map_range(n, |a| {
            let ra = a_m.row(a);
            let rb = b_m.row(a);
            let mut suffix = 0.0;
            let mut s = 0.0;
            for b in (a + 1..n).rev() {
                s += w1[b] * ra[b] * suffix;
                suffix += w2[b] * rb[b];
            }
            w0[a] * s
        }),
        (None, Some(b_m), Some(c_m)) => map_range(n, |c| {
            let rb = b_m.row(c);
            let rc = c_m.row(c);
            let mut prefix = 0.0;
            let mut s = 0.0;
            for b in 0..c {
                s += w1[b] * rc[b] * prefix;
                prefix += w0[b] * rb[b];
            }
            w2[c] * s
        }),
        (Some(a_m), Some(b_m), Some(c_m)) => map_range(n, |a| {
            let ra = a_m.row(a);
            let rac = b_m.row(a);
            let mut s = 0.0;
            for b in a + 1..n {
                let x = w1[b] * ra[b];
                if x == 0.0 {
                    continue;
                }
                let rbc = c_m.row(b);
                let mut inner = 0.0;
                for c in b + 1..n {
                    inner += rac[c] * rbc[c] * w2[c];
                }
                s += x * inner;
            }
            w0[a] * s
        }),
    };
    pairwise_sum(&terms)
}

fn sum_generic(w: &[&[f64]], edges: &[PairFactor<'_>]) -> f64 {
    let k = w.len();
    let n = w[0].len();
    // back[j] lists the edges (i, M) with i < j
    let mut back: Vec<Vec<(usize, &SymMatrix)>> = vec![Vec::new(); k];
    for e in edges {
        back[e.j].push((e.i, e.m));
    }
    let last = k - 1;
    let partials = map_range(n - k + 1, |a0| {
        let mut a = vec![0usize; k];
        a[0] = a0;
        let start = w[0][a0];
        if start == 0.0 {
            return 0.0;
        }
        dfs(w, &back, &mut a, 1, start, n, last)
    });
    pairwise_sum(&partials)
}

fn dfs(
    w: &[&[f64]],
    back: &[Vec<(usize, &SymMatrix)>],
    a: &mut [usize],
    pos: usize,
    acc: f64,
    n: usize,
    last: usize,
) -> f64 {
    let lo = a[pos - 1] + 1;
    let hi = n - (last - pos);
    let mut s = 0.0;
    if pos == last {
        let rows: Vec<&[f64]> = back[pos].iter().map(|&(i, m)| m.row(a[i])).collect();
        let wl = w[pos];
        for c in lo..hi {
            let mut x = wl[c];
            for r in &rows {
                x *= r[c];
            }
            s += x;
        }
        return acc * s;
    }
    for c in lo..hi {
        let mut x = acc * w[pos][c];
        for &(i, m) in &back[pos] {
            x *= m.get(a[i], c);
        }
        if x == 0.0 {
            continue;
        }
        a[pos] = c;
        s += dfs(w, back, a, pos + 1, x, n, last);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_setup(n: usize, k: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<SymMatrix>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = (0..k).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let ms = (0..3)
            .map(|_| {
                let vals: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
                SymMatrix::from_fn(n, |v, u| vals[v * n + u])
            })
            .collect();
        (w, ms)
    }

    fn all_edge_sets(k: usize) -> Vec<Vec<(usize, usize)>> {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        (0..1u32 << pairs.len())
            .map(|mask| pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect())
            .collect()
    }

    #[test]
    fn closed_forms_match_enumeration() {
        for k in 1..=4 {
            let n = 9;
            let (w, ms) = random_setup(n, k, k as u64);
            let wr: Vec<&[f64]> = w.iter().map(|v| v.as_slice()).collect();
            for set in all_edge_sets(k) {
                let edges: Vec<PairFactor<'_>> =
                    set.iter().enumerate().map(|(t, &(i, j))| PairFactor::new(i, j, &ms[t % 3])).collect();
                let fast = increasing_sum(&wr, &edges);
                let slow = brute_increasing_sum(&wr, &edges);
                assert!((fast - slow).abs() < 1e-10 * (1.0 + slow.abs()), "k={k} {set:?}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn five_vertex_path() {
        let n = 10;
        let (w, ms) = random_setup(n, 5, 77);
        let wr: Vec<&[f64]> = w.iter().map(|v| v.as_slice()).collect();
        let edges: Vec<_> = (0..4).map(|i| PairFactor::new(i, i + 1, &ms[0])).collect();
        let fast = increasing_sum(&wr, &edges);
        let slow = brute_increasing_sum(&wr, &edges);
        assert!((fast - slow).abs() < 1e-10 * (1.0 + slow.abs()));
    }

    #[test]
    fn distinct_sum_matches_enumeration() {
        let n = 7;
        let (w, ms) = random_setup(n, 3, 5);
        let wr: Vec<&[f64]> = w.iter().map(|v| v.as_slice()).collect();
        let edges = [PairFactor::new(0, 2, &ms[0]), PairFactor::new(1, 2, &ms[1])];
        let mut slow = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    slow += w[0][a] * w[1][b] * w[2][c] * ms[0].get(a, c) * ms[1].get(b, c);
                }
            }
        }
        let fast = distinct_sum(&wr, &edges);
        assert!((fast - slow).abs() < 1e-10 * (1.0 + slow.abs()));
    }

    #[test]
    fn counts_tuples() {
        let ones = vec![1.0; 10];
        let w: Vec<&[f64]> = vec![&ones; 4];
        assert_eq!(increasing_sum(&w, &[]), 210.0);
        let mut count = 0;
        for_each_increasing(6, 3, |_| count += 1);
        assert_eq!(count, 20);
        assert_eq!(increasing_sum(&vec![&ones[..3]; 4], &[]), 0.0);
    }
}
