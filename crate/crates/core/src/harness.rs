//! Monte Carlo CLT experiments and finite-n to limit convergence studies.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::graphon::{limit_covariance_iid_normalised, limit_covariance_lattice_normalised, Graphon};
use crate::par::map_range;
use crate::rng::{domain, StreamKey};
use crate::sampler::{sample_keyed, EdgeModel, LabelScheme};
use crate::statistics::{covariance_matrix, statistic_vector, StatisticSpec};
use crate::summation::pairwise_sum;

/// Minimum replication count for any distributional check.
pub const MIN_REPLICATIONS: usize = 100;

/// Diagonal entries of the target covariance at or below this are treated
/// as zero.
pub const DEGENERATE_VARIANCE: f64 = 1e-14;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kappa: Graphon,
    pub scheme: LabelScheme,
    #[serde(default = "bernoulli")]
    pub model: EdgeModel,
    pub statistics: Vec<StatisticSpec>,
    pub n_grid: Vec<usize>,
    #[serde(default)]
    pub replications: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub outputs: OutputPaths,
}

fn bernoulli() -> EdgeModel {
    EdgeModel::Bernoulli
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    /// Checks everything except the replication count, which only matters
    /// for sampling.
    pub fn validate(&self) -> Result<()> {
        if self.statistics.is_empty() {
            return Err(Error::invalid("at least one statistic spec is required"));
        }
        if self.n_grid.is_empty() {
            return Err(Error::invalid("n_grid is empty"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("n_grid must be strictly increasing"));
        }
        self.model.validate()?;
        let kmax = self.statistics.iter().map(StatisticSpec::k).max().unwrap();
        for &n in &self.n_grid {
            if n < kmax.max(2) {
                return Err(Error::invalid(format!("n = {n} is smaller than the largest pattern ({kmax} vertices)")));
            }
            self.scheme.validate(n)?;
        }
        Ok(())
    }

    fn check_replications(&self) -> Result<()> {
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::invalid(format!(
                "distributional checks need at least {MIN_REPLICATIONS} replications, got {}",
                self.replications
            )));
        }
        Ok(())
    }

    pub fn ids(&self) -> Vec<String> {
        self.statistics.iter().map(StatisticSpec::label).collect()
    }
}

/// The result at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltRow {
    pub n: usize,
    pub replications: usize,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub target: Vec<Vec<f64>>,
    /// Kolmogorov distance of each coordinate to `N(0, σ_ii)`.
    pub ks: Vec<f64>,
    /// `max_{i≠j} |ĉ_ij − σ_ij| / se_ij`; zero when `d = 1`.
    pub max_cross_z: f64,
    /// `max_i |mean_i| / (σ_ii / R)^{1/2}`.
    pub max_mean_z: f64,
    /// Not serialised so reports stay byte-reproducible.
    #[serde(skip)]
    pub elapsed_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub ids: Vec<String>,
    pub seed: u64,
    pub rows: Vec<CltRow>,
}

impl CltReport {
    /// One line per `(n, coordinate)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,id,mean,variance,target,ks,max_mean_z,max_cross_z\n");
        for row in &self.rows {
            for (i, id) in self.ids.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                    row.n,
                    id,
                    row.mean[i],
                    row.covariance[i][i],
                    row.target[i][i],
                    row.ks[i],
                    row.max_mean_z,
                    row.max_cross_z
                ));
            }
        }
        out
    }
}

/// `sup_x |F_R(x) − Φ(x / sd)|` for the empirical CDF of `values`.
pub fn kolmogorov_distance(values: &[f64], sd: f64) -> f64 {
    let normal = Normal::new(0.0, sd).expect("positive standard deviation");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let r = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / r).max((i + 1) as f64 / r - f)
        })
        .fold(0.0, f64::max)
}

/// The replications of `W` at one `n`, in replication order.
pub fn replicate(config: &ExperimentConfig, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let base = StreamKey::new(seed).derive(domain::REPLICATION).derive(n as u64);
    map_range(config.replications, |r| {
        let sample = sample_keyed(&config.kappa, &config.scheme, config.model, n, base.derive(r as u64))?;
        statistic_vector(&config.statistics, &sample, &config.kappa)
    })
    .into_iter()
    .collect()
}

struct Moments {
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
}

fn moments(draws: &[Vec<f64>], d: usize) -> Moments {
    let r = draws.len() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|i| pairwise_sum(&draws.iter().map(|w| w[i]).collect::<Vec<_>>()) / r)
        .collect();
    let mut covariance = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let products: Vec<f64> = draws.iter().map(|w| (w[i] - mean[i]) * (w[j] - mean[j])).collect();
            let c = pairwise_sum(&products) / (r - 1.0);
            covariance[i][j] = c;
            covariance[j][i] = c;
        }
    }
    Moments { mean, covariance }
}

fn target_covariance(config: &ExperimentConfig, n: usize) -> Result<Vec<Vec<f64>>> {
    let sigma = covariance_matrix(&config.statistics, &config.scheme, &config.kappa, config.model, n)?;
    let d = sigma.dim();
    Ok((0..d).map(|i| (0..d).map(|j| sigma.get(i, j)).collect()).collect())
}

fn check_diagonal(ids: &[String], target: &[Vec<f64>], n: usize) -> Result<()> {
    for (i, row) in target.iter().enumerate() {
        if row[i] <= DEGENERATE_VARIANCE {
            return Err(Error::Degenerate(format!("σ_ii = {:.3e} for {} at n = {n}; nothing to standardise", row[i], ids[i])));
        }
    }
    Ok(())
}

fn clt_row(config: &ExperimentConfig, n: usize, seed: u64, target: Vec<Vec<f64>>) -> Result<CltRow> {
    let start = Instant::now();
    let d = config.statistics.len();
    let draws = replicate(config, n, seed)?;
    let Moments { mean, covariance } = moments(&draws, d);
    let r = draws.len() as f64;
    let ks = (0..d)
        .map(|i| kolmogorov_distance(&draws.iter().map(|w| w[i]).collect::<Vec<_>>(), target[i][i].sqrt()))
        .collect();
    let max_mean_z = (0..d).map(|i| mean[i].abs() / (target[i][i] / r).sqrt()).fold(0.0, f64::max);
    let mut max_cross_z: f64 = 0.0;
    for i in 0..d {
        for j in 0..i {
            // Gaussian standard error of a sample covariance
            let se = ((target[i][i] * target[j][j] + target[i][j] * target[i][j]) / r).sqrt();
            max_cross_z = max_cross_z.max((covariance[i][j] - target[i][j]).abs() / se);
        }
    }
    Ok(CltRow {
        n,
        replications: draws.len(),
        mean,
        covariance,
        target,
        ks,
        max_cross_z,
        max_mean_z,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// `R` replications of `W` at every `n` of the grid. Replication `r` at size
/// `n` draws from streams keyed by `(seed, n, r)`, so the report does not
/// depend on the number of worker threads.
pub fn run_clt_experiment(config: &ExperimentConfig, seed: u64) -> Result<CltReport> {
    config.validate()?;
    config.check_replications()?;
    let ids = config.ids();
    let targets = config
        .n_grid
        .iter()
        .map(|&n| {
            let t = target_covariance(config, n)?;
            check_diagonal(&ids, &t, n)?;
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = config
        .n_grid
        .iter()
        .zip(targets)
        .map(|(&n, t)| clt_row(config, n, seed, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(CltReport { ids, seed, rows })
}

/// `σ_ij(∞)` under the convention the finite-`n` covariance converges to.
pub fn limit_covariance(specs: &[StatisticSpec], kappa: &Graphon, scheme: &LabelScheme) -> Result<Vec<Vec<f64>>> {
    let limit: fn(&StatisticSpec, &StatisticSpec, &Graphon) -> f64 = match scheme {
        LabelScheme::IidUniform => limit_covariance_iid_normalised,
        LabelScheme::Lattice => limit_covariance_lattice_normalised,
        LabelScheme::IndependentDiscrete(_) => {
            return Err(Error::Unsupported("limit covariances are defined for iid-uniform and lattice labels".into()))
        }
    };
    Ok(specs.iter().map(|a| specs.iter().map(|b| limit(a, b, kappa)).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub sigma: Vec<Vec<f64>>,
    /// `|σ_ij(n) − σ_ij(∞)|`.
    pub gap: Vec<Vec<f64>>,
    pub max_gap: f64,
    /// Largest per-coordinate Kolmogorov distance, when sampling was run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ks: Option<f64>,
    /// `max_ij |ĉ_ij − σ_ij(n)|`, when sampling was run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub ids: Vec<String>,
    pub limit: Vec<Vec<f64>>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,max_gap,max_ks,empirical_gap\n");
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.17e}")).unwrap_or_default();
        for row in &self.rows {
            out.push_str(&format!("{},{:.17e},{},{}\n", row.n, row.max_gap, opt(row.max_ks), opt(row.empirical_gap)));
        }
        out
    }
}

/// Exact `σ(n)` against `σ(∞)` across the grid. With `seed` given and at
/// least [`MIN_REPLICATIONS`] replications configured, each row also gets
/// the sampled Kolmogorov distance and covariance gap.
pub fn run_convergence_study(config: &ExperimentConfig, seed: Option<u64>) -> Result<ConvergenceReport> {
    config.validate()?;
    let sampling = seed.is_some() && config.replications > 0;
    if sampling {
        config.check_replications()?;
    }
    let ids = config.ids();
    let limit = limit_covariance(&config.statistics, &config.kappa, &config.scheme)?;
    let d = ids.len();
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let sigma = target_covariance(config, n)?;
        let gap: Vec<Vec<f64>> =
            (0..d).map(|i| (0..d).map(|j| (sigma[i][j] - limit[i][j]).abs()).collect()).collect();
        let max_gap = gap.iter().flatten().copied().fold(0.0, f64::max);
        let (max_ks, empirical_gap) = match seed {
            Some(seed) if sampling => {
                check_diagonal(&ids, &sigma, n)?;
                let row = clt_row(config, n, seed, sigma.clone())?;
                let eg = (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i, j)))
                    .map(|(i, j)| (row.covariance[i][j] - sigma[i][j]).abs())
                    .fold(0.0, f64::max);
                (Some(row.ks.iter().copied().fold(0.0, f64::max)), Some(eg))
            }
            _ => (None, None),
        };
        rows.push(ConvergenceRow { n, sigma, gap, max_gap, max_ks, empirical_gap });
    }
    Ok(ConvergenceReport { ids, limit, rows })
}

/// Counts strict increases along `xs`; trend checks allow one.
pub fn non_monotone_steps(xs: &[f64]) -> usize {
    xs.windows(2).filter(|w| w[1] > w[0]).count()
}
