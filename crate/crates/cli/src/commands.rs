use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use graphon_clt::decomposition::{decompose_injective_density, term_statistics, DecompositionTerm};
use graphon_clt::gof::{gof_report, ProbabilityMatrix};
use graphon_clt::harness::{limit_covariance, run_clt_experiment, run_convergence_study};
use graphon_clt::par::map_range;
use graphon_clt::rng::{domain, StreamKey};
use graphon_clt::sampler::{sample as draw, EdgeList};
use graphon_clt::statistics::{covariance_matrix, hom_density, injective_density, statistic_vector};
use graphon_clt::stein::{fourth_moment_experiment, verify_stein_identity_exact, Monomial};
use graphon_clt::summation::mean_and_variance;
use graphon_clt::{Error, GraphSample, PatternGraph, Result, WeightFunction};
use serde::Serialize;

use crate::config::missing;
use crate::{Format, Globals, GraphInput};

fn need_seed(g: &Globals) -> Result<u64> {
    g.seed.ok_or_else(|| Error::Invalid("this command samples; pass --seed <u64>".into()))
}

fn emit(g: &Globals, bytes: &[u8]) -> Result<()> {
    match &g.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json(g: &Globals, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(g, text.as_bytes())
}

/// Paths from the config file are relative to the file itself.
fn config_path(g: &Globals, p: &Path) -> PathBuf {
    match &g.config_dir {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

fn parse_pattern(s: &str) -> Result<PatternGraph> {
    s.parse()
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

/// The graph named by `--edges/--labels` (or the config), or a fresh sample.
fn load_graph(g: &Globals, input: &GraphInput) -> Result<GraphSample> {
    let edges = input.edges.clone().or_else(|| g.config.edges.as_ref().map(|p| config_path(g, p)));
    let labels = input.labels.clone().or_else(|| g.config.labels.as_ref().map(|p| config_path(g, p)));
    match (edges, labels) {
        (Some(e), Some(l)) => GraphSample::read(open(&e)?, open(&l)?, g.config.scheme()?.clone(), g.config.model()),
        (Some(_), None) | (None, Some(_)) => Err(Error::Invalid("--edges and --labels go together".into())),
        (None, None) => {
            let n = input.n.or(g.config.n).ok_or_else(|| missing("n"))?;
            draw(g.config.kappa()?, g.config.scheme()?, g.config.model(), n, need_seed(g)?)
        }
    }
}

pub fn sample(g: &Globals, n: Option<usize>, labels: Option<PathBuf>) -> Result<()> {
    let n = n.or(g.config.n).ok_or_else(|| missing("n"))?;
    let s = draw(g.config.kappa()?, g.config.scheme()?, g.config.model(), n, need_seed(g)?)?;
    let mut edges = Vec::new();
    s.write_edge_list(&mut edges)?;
    emit(g, &edges)?;
    let labels = labels.or_else(|| {
        g.out.as_ref().map(|o| {
            let mut p = o.clone().into_os_string();
            p.push(".labels");
            PathBuf::from(p)
        })
    });
    if let Some(path) = labels {
        s.write_labels(File::create(path)?)?;
    }
    Ok(())
}

pub fn density(g: &Globals, input: &GraphInput, patterns: &[String]) -> Result<()> {
    let mut fs: Vec<PatternGraph> = patterns.iter().map(|p| parse_pattern(p)).collect::<Result<_>>()?;
    if fs.is_empty() {
        fs = g.config.patterns.clone();
    }
    if fs.is_empty() {
        fs = ["K2", "P3", "K3"].iter().map(|p| PatternGraph::named(p).unwrap()).collect();
    }
    let s = load_graph(g, input)?;
    let mut out = String::from("pattern,hom,injective,graphon\n");
    for f in &fs {
        let graphon = g.config.kappa.as_ref().map(|k| format!("{:e}", k.homomorphism_density(f))).unwrap_or_default();
        out.push_str(&format!("{},{:e},{:e},{}\n", f, hom_density(f, &s)?, injective_density(f, &s)?, graphon));
    }
    emit(g, out.as_bytes())
}

pub fn stat(g: &Globals, input: &GraphInput) -> Result<()> {
    let specs = g.config.statistics()?;
    let s = load_graph(g, input)?;
    let w = statistic_vector(specs, &s, g.config.kappa()?)?;
    let mut out = String::from("id,value\n");
    for (spec, v) in specs.iter().zip(w) {
        out.push_str(&format!("{},{:e}\n", spec.label(), v));
    }
    emit(g, out.as_bytes())
}

pub fn cov(g: &Globals, n: Option<usize>) -> Result<()> {
    let n = n.or(g.config.n).ok_or_else(|| missing("n"))?;
    let c = &g.config;
    let sigma = covariance_matrix(c.statistics()?, c.scheme()?, c.kappa()?, c.model(), n)?;
    let mut out = sigma.to_csv(Some("finite"), true);
    // limits exist for iid-uniform and lattice labels only
    if let Ok(limit) = limit_covariance(c.statistics()?, c.kappa()?, c.scheme()?) {
        for (id, row) in sigma.ids.iter().zip(&limit) {
            out.push_str("limit,");
            out.push_str(id);
            for v in row {
                out.push_str(&format!(",{v:e}"));
            }
            out.push('\n');
        }
    }
    emit(g, out.as_bytes())
}

#[derive(Serialize)]
struct MonteCarlo {
    n: usize,
    replications: usize,
    /// Empirical variance of each term statistic, in term order.
    variances: Vec<f64>,
}

#[derive(Serialize)]
struct DecomposeReport<'a> {
    pattern: String,
    terms: &'a [DecompositionTerm],
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<MonteCarlo>,
}

pub fn decompose(g: &Globals, pattern: Option<String>, n: Option<usize>, replications: Option<usize>) -> Result<()> {
    let f = match pattern {
        Some(p) => parse_pattern(&p)?,
        None => g.config.patterns.first().cloned().ok_or_else(|| missing("patterns"))?,
    };
    let (kappa, scheme) = (g.config.kappa()?, g.config.scheme()?);
    let terms = decompose_injective_density(&f, kappa, scheme)?;
    let monte_carlo = match (n, replications.or(g.config.replications)) {
        (Some(n), Some(r)) if r > 0 => {
            if r < 2 {
                return Err(Error::Invalid("variance estimates need at least two replications".into()));
            }
            let key = StreamKey::new(need_seed(g)?).derive(domain::REPLICATION);
            let draws = map_range(r, |i| {
                let s = draw(kappa, scheme, g.config.model(), n, key.derive(i as u64).raw())?;
                term_statistics(&terms, &s, kappa)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let variances = (0..terms.len())
                .map(|t| mean_and_variance(&draws.iter().map(|d| d[t]).collect::<Vec<_>>()).1)
                .collect();
            Some(MonteCarlo { n, replications: r, variances })
        }
        _ => None,
    };
    emit_json(g, &DecomposeReport { pattern: f.to_string(), terms: &terms, monte_carlo })
}

pub fn stein_check(g: &Globals, n: Option<usize>, max_degree: Option<u32>) -> Result<()> {
    let n = n.or(g.config.n).unwrap_or(4);
    let degree = max_degree.or(g.config.max_degree).unwrap_or(3);
    let specs = g.config.statistics()?;
    let scheme = g.config.scheme()?;
    let kappas: Vec<_> = g.config.kappa.iter().chain(&g.config.kappas).collect();
    if kappas.is_empty() {
        return Err(missing("kappa"));
    }
    let mut out = String::from("n,d,kappa,g,lhs,rhs,residual\n");
    for (ki, kappa) in kappas.iter().enumerate() {
        for d in 1..=specs.len().min(2) {
            let family = Monomial::family(d, degree);
            let report = verify_stein_identity_exact(&specs[..d], kappa, scheme, n, &family)?;
            for row in &report.rows {
                out.push_str(&format!("{n},{d},{ki},{},{:e},{:e},{:e}\n", row.g, row.lhs, row.rhs, row.residual));
            }
            out.push_str(&format!("{n},{d},{ki},E[G_i D_j]-sigma_ij,,,{:e}\n", report.gd_residual));
        }
    }
    emit(g, out.as_bytes())
}

pub fn chaos4(g: &Globals, n_grid: Vec<usize>, replications: Option<usize>) -> Result<()> {
    let grid = if n_grid.is_empty() { g.config.n_grid.clone() } else { n_grid };
    if grid.is_empty() {
        return Err(missing("n_grid"));
    }
    let r = replications.or(g.config.replications).ok_or_else(|| missing("replications"))?;
    let phi = match &g.config.phi {
        Some(p) => p.clone(),
        None => WeightFunction::constant(6f64.sqrt()),
    };
    let seed = need_seed(g)?;
    let mut out = String::from("n,replications,estimate,se,target,gaussian_part,variance,second_moment,second_moment_se\n");
    for n in grid {
        let rep = fourth_moment_experiment(n, r, &phi, seed)?;
        out.push_str(&format!(
            "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            rep.n, rep.replications, rep.estimate, rep.se, rep.target, rep.gaussian_part, rep.variance,
            rep.second_moment, rep.second_moment_se
        ));
    }
    emit(g, out.as_bytes())
}

pub fn gof(g: &Globals, edges: Option<PathBuf>, probabilities: Option<PathBuf>, patterns: &[String]) -> Result<()> {
    let edges = edges.or_else(|| g.config.edges.as_ref().map(|p| config_path(g, p))).ok_or_else(|| missing("edges"))?;
    let probs = probabilities
        .or_else(|| g.config.probabilities.as_ref().map(|p| config_path(g, p)))
        .ok_or_else(|| missing("probabilities"))?;
    let mut extra: Vec<PatternGraph> = patterns.iter().map(|p| parse_pattern(p)).collect::<Result<_>>()?;
    if extra.is_empty() {
        extra = g.config.patterns.clone();
    }
    let y = EdgeList::read(open(&edges)?)?.into_lattice_sample()?;
    let p = ProbabilityMatrix::parse(&std::fs::read_to_string(&probs)?, y.n())?;
    emit(g, gof_report(&y, &p, &extra)?.to_csv().as_bytes())
}

pub fn clt(g: &Globals, format: Format) -> Result<()> {
    let config = g.config.experiment()?;
    let report = run_clt_experiment(&config, need_seed(g)?)?;
    for row in &report.rows {
        eprintln!("n = {}: {:.3} s", row.n, row.elapsed_secs);
    }
    match format {
        Format::Json => emit_json(g, &report),
        Format::Csv => emit(g, report.to_csv().as_bytes()),
    }
}

pub fn converge(g: &Globals, format: Format) -> Result<()> {
    let config = g.config.experiment()?;
    let report = run_convergence_study(&config, g.seed)?;
    match format {
        Format::Json => emit_json(g, &report),
        Format::Csv => emit(g, report.to_csv().as_bytes()),
    }
}
