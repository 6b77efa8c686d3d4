//! Browser bindings: draw a graph, histogram a centred statistic against its
//! normal limit, and tabulate the orthogonal decomposition of a pattern.
//!
//! Every entry point takes and returns JSON strings so the page needs no
//! glue beyond `JSON.parse`.

use graphon_clt::decomposition::decompose_injective_density;
use graphon_clt::harness::{kolmogorov_distance, replicate, ExperimentConfig, OutputPaths};
use graphon_clt::sampler::sample;
use graphon_clt::statistics::covariance_matrix;
use graphon_clt::{EdgeModel, Error, Graphon, LabelScheme, PatternGraph, Result, StatisticSpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_N: usize = 400;
const MAX_REPLICATIONS: usize = 20_000;

fn scheme(name: &str) -> Result<LabelScheme> {
    match name {
        "iid_uniform" => Ok(LabelScheme::IidUniform),
        "lattice" => Ok(LabelScheme::Lattice),
        other => Err(Error::Invalid(format!("unknown label scheme '{other}'"))),
    }
}

fn cap(what: &str, value: usize, max: usize) -> Result<()> {
    if value > max {
        return Err(Error::Invalid(format!("{what} = {value} is above the demo limit of {max}")));
    }
    Ok(())
}

fn js(r: Result<String>) -> std::result::Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[derive(Serialize)]
struct DrawnGraph {
    n: usize,
    labels: Vec<f64>,
    /// Vertex order sorted by label, for block-structured plots.
    order: Vec<usize>,
    /// Row-major upper triangle of 0/1 edges.
    edges: Vec<f64>,
    edge_density: f64,
}

pub fn draw_graph(kappa_json: &str, scheme_name: &str, n: usize, seed: u64) -> Result<String> {
    cap("n", n, MAX_N)?;
    let kappa: Graphon = serde_json::from_str(kappa_json)?;
    let s = sample(&kappa, &scheme(scheme_name)?, EdgeModel::Bernoulli, n, seed)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s.label(a).total_cmp(&s.label(b)));
    let pairs = (n * n.saturating_sub(1) / 2).max(1) as f64;
    Ok(serde_json::to_string(&DrawnGraph {
        n,
        labels: s.labels().to_vec(),
        order,
        edges: s.edge_values().to_vec(),
        edge_density: s.edge_sum() / pairs,
    })?)
}

#[derive(Serialize)]
struct Histogram {
    pattern: String,
    n: usize,
    replications: usize,
    sigma2: f64,
    mean: f64,
    variance: f64,
    ks: f64,
    lo: f64,
    width: f64,
    counts: Vec<u32>,
}

pub fn statistic_histogram(
    kappa_json: &str,
    scheme_name: &str,
    pattern: &str,
    n: usize,
    replications: usize,
    seed: u64,
    bins: usize,
) -> Result<String> {
    cap("n", n, MAX_N)?;
    cap("replications", replications, MAX_REPLICATIONS)?;
    if bins == 0 || replications < 2 {
        return Err(Error::Invalid("need at least one bin and two replications".into()));
    }
    let f: PatternGraph = pattern.parse()?;
    let config = ExperimentConfig {
        kappa: serde_json::from_str(kappa_json)?,
        scheme: scheme(scheme_name)?,
        model: EdgeModel::Bernoulli,
        statistics: vec![StatisticSpec::simple(f.clone())?],
        n_grid: vec![n],
        replications,
        seed: Some(seed),
        outputs: OutputPaths::default(),
    };
    config.validate()?;
    let sigma2 = covariance_matrix(&config.statistics, &config.scheme, &config.kappa, config.model, n)?.get(0, 0);
    if sigma2 <= 0.0 {
        return Err(Error::Degenerate(format!("{f} has zero variance here")));
    }
    let w: Vec<f64> = replicate(&config, n, seed)?.into_iter().map(|v| v[0]).collect();
    let r = w.len() as f64;
    let mean = w.iter().sum::<f64>() / r;
    let variance = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
    let sd = sigma2.sqrt();
    let (lo, hi) = (-4.0 * sd, 4.0 * sd);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u32; bins];
    for &x in &w {
        let b = ((x - lo) / width).floor();
        if b >= 0.0 && (b as usize) < bins {
            counts[b as usize] += 1;
        }
    }
    Ok(serde_json::to_string(&Histogram {
        pattern: f.to_string(),
        n,
        replications,
        sigma2,
        mean,
        variance,
        ks: kolmogorov_distance(&w, sd),
        lo,
        width,
        counts,
    })?)
}

#[derive(Serialize)]
struct TermRow {
    h: String,
    a: Vec<u8>,
    l: usize,
    zero: bool,
    max_abs: f64,
}

pub fn decomposition_table(kappa_json: &str, scheme_name: &str, pattern: &str) -> Result<String> {
    let kappa: Graphon = serde_json::from_str(kappa_json)?;
    let f: PatternGraph = pattern.parse()?;
    let rows: Vec<TermRow> = decompose_injective_density(&f, &kappa, &scheme(scheme_name)?)?
        .into_iter()
        .map(|t| TermRow {
            h: t.h.to_compact(),
            a: t.a.members().to_vec(),
            l: t.l,
            zero: t.zero,
            max_abs: t.weight.max_abs(),
        })
        .collect();
    Ok(serde_json::to_string(&rows)?)
}

#[wasm_bindgen(js_name = drawGraph)]
pub fn draw_graph_js(kappa_json: &str, scheme_name: &str, n: usize, seed: u64) -> std::result::Result<String, JsValue> {
    js(draw_graph(kappa_json, scheme_name, n, seed))
}

#[wasm_bindgen(js_name = statisticHistogram)]
pub fn statistic_histogram_js(
    kappa_json: &str,
    scheme_name: &str,
    pattern: &str,
    n: usize,
    replications: usize,
    seed: u64,
    bins: usize,
) -> std::result::Result<String, JsValue> {
    js(statistic_histogram(kappa_json, scheme_name, pattern, n, replications, seed, bins))
}

#[wasm_bindgen(js_name = decompositionTable)]
pub fn decomposition_table_js(kappa_json: &str, scheme_name: &str, pattern: &str) -> std::result::Result<String, JsValue> {
    js(decomposition_table(kappa_json, scheme_name, pattern))
}
