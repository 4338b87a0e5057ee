//! Trial harness: reference expectations for the edge count, seeded
//! Monte Carlo runs over an n grid, scaling ratios, and CSV/JSON
//! serialization of the results.
//!
//! Determinism contract: a config fixes every record byte. Trial seeds
//! derive from the master seed and the trial's position, trials run
//! concurrently, and records are sorted before emission. Wall time is
//! the one nondeterministic field and is recorded only on request.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graphs::{self, Graph};
use crate::points::PointSet;
use crate::processes::empty_box_census;
use crate::rng::trial_seed;
use crate::stats::{self, EdgeClassPolicy, IsStrategy};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "n,d,trial,seed,edges,max_degree,mean_degree,max_triangles_vertex,max_far_edges_vertex,dsatur_colors,greedy_is_size,caro_wei_bound,census_violations,wall_ms";

/// Which per-trial statistics to collect. The cheap selection keeps
/// only the degree block and zeroes the rest, letting the big-n grids
/// run in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatSelection {
    DegreesOnly,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub statistics: StatSelection,
    /// Off by default so reruns of one config are byte-identical.
    #[serde(default)]
    pub measure_wall_time: bool,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub d: usize,
    pub trial: usize,
    pub seed: u64,
    pub edges: u64,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub max_triangles_vertex: usize,
    pub max_far_edges_vertex: usize,
    pub dsatur_colors: usize,
    pub greedy_is_size: usize,
    pub caro_wei_bound: f64,
    pub census_violations: usize,
    pub wall_ms: u64,
}

fn validate(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.dim < 1 {
        return Err(Error::InvalidConfig("dimension must be at least 1".into()));
    }
    if cfg.n_grid.is_empty() {
        return Err(Error::InvalidConfig("n grid is empty".into()));
    }
    if cfg.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("n grid must be strictly increasing".into()));
    }
    if cfg.n_grid[0] < 2 {
        return Err(Error::InvalidConfig("n grid entries must be at least 2".into()));
    }
    if cfg.trials < 1 {
        return Err(Error::InvalidConfig("at least one trial per n".into()));
    }
    Ok(())
}

fn run_one(cfg: &ExperimentConfig, n: usize, trial: usize, seed: u64) -> TrialRecord {
    let start = std::time::Instant::now();
    let p = PointSet::sample_uniform(n, cfg.dim, seed);
    let mut record = TrialRecord {
        n,
        d: cfg.dim,
        trial,
        seed,
        edges: 0,
        max_degree: 0,
        mean_degree: 0.0,
        max_triangles_vertex: 0,
        max_far_edges_vertex: 0,
        dsatur_colors: 0,
        greedy_is_size: 0,
        caro_wei_bound: 0.0,
        census_violations: 0,
        wall_ms: 0,
    };
    let audit = n <= 200 && trial % 100 == 0;
    let graph: Option<Graph> =
        if cfg.statistics == StatSelection::DegreesOnly && cfg.dim == 2 && !audit {
            let (edges, degrees) = graphs::boxdel2d_degrees(&p);
            record.edges = edges;
            record.max_degree = degrees.iter().copied().max().unwrap_or(0) as usize;
            record.mean_degree = 2.0 * edges as f64 / n as f64;
            None
        } else {
            let g = graphs::build_boxdel(&p);
            if audit {
                let reference = graphs::build_boxdel_bruteforce(&p);
                assert_eq!(g.edges(), reference.edges(), "fast builder disagrees with oracle at n {n} seed {seed}");
            }
            let degrees = stats::degree_stats(&g);
            record.edges = g.edge_count() as u64;
            record.max_degree = degrees.max;
            record.mean_degree = degrees.mean;
            Some(g)
        };
    if cfg.statistics == StatSelection::Full {
        let g = graph.expect("full statistics build the graph");
        record.max_triangles_vertex = stats::triangles_per_vertex(&g).into_iter().max().unwrap_or(0);
        let policy = EdgeClassPolicy::new(cfg.dim, n as f64);
        let classes = stats::classify_edges(&p, &g, &policy);
        record.max_far_edges_vertex = classes.far_per_vertex.iter().copied().max().unwrap_or(0);
        record.dsatur_colors = stats::dsatur_coloring(&g).count;
        record.greedy_is_size = stats::independent_set(&g, IsStrategy::MinDegreeGreedy).size();
        record.caro_wei_bound = stats::caro_wei_bound(&g);
        record.census_violations = empty_box_census(&p, n as f64).claim_violations().len();
    }
    if cfg.measure_wall_time {
        record.wall_ms = start.elapsed().as_millis() as u64;
    }
    record
}

/// Runs the whole grid. Trials execute concurrently under derived
/// seeds; the result is sorted by (n, trial) and reruns of one config
/// are identical apart from wall time, which is zero unless measured.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    validate(cfg)?;
    let jobs: Vec<(usize, usize, u64)> = cfg
        .n_grid
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| {
            (0..cfg.trials)
                .map(move |t| (n, t, (i * cfg.trials + t) as u64))
        })
        .collect();
    let mut records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(n, trial, job)| run_one(cfg, n, trial, trial_seed(cfg.seed, job)))
        .collect();
    records.sort_by_key(|r| (r.n, r.trial));
    Ok(records)
}

/// Adaptive Simpson quadrature with an absolute tolerance on each
/// refinement step.
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    }
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, eps, 48)
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Leading-order reference for the expected edge count:
/// C(n,2) 2^d int_0^1 (1-u)^{n-2} ln(1/u)^{d-1}/(d-1)! du.
pub fn expected_edges_leading(n: usize, d: usize) -> f64 {
    assert!(n >= 2 && d >= 1);
    let exponent = (n - 2) as f64;
    let norm = ln_factorial(d - 1);
    // After u = exp(-v) the integrand is smooth on [0, inf) and
    // negligible beyond the Gamma-tail cutoff.
    let integrand = move |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let ln_weight = exponent * (-(-v).exp()).ln_1p() - v - norm;
        (ln_weight + (d as f64 - 1.0) * v.ln()).exp()
    };
    let upper = 80.0 + 4.0 * d as f64 + (n as f64).ln();
    let integral = integrate(integrand, 0.0, upper, 1e-12);
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    pairs * f64::powi(2.0, d as i32) * integral
}

/// Monte Carlo estimate and standard error of the exact expected edge
/// count C(n,2) E[(1 - prod |U_k - V_k|)^{n-2}].
pub fn expected_edges_oracle(n: usize, d: usize, samples: usize, seed: u64) -> (f64, f64) {
    assert!(n >= 2 && d >= 1);
    assert!(samples >= 10_000, "oracle needs at least 10^4 samples");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exponent = (n - 2) as f64;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..samples {
        let mut volume = 1.0f64;
        for _ in 0..d {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            volume *= (u - v).abs();
        }
        let x = (1.0 - volume).powf(exponent);
        sum += x;
        sum_sq += x * x;
    }
    let mean = sum / samples as f64;
    let variance = (sum_sq / samples as f64 - mean * mean).max(0.0);
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    (pairs * mean, pairs * (variance / samples as f64).sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub mean_edges: f64,
    pub se_edges: f64,
    pub oracle_edges: f64,
    pub oracle_se: f64,
    pub leading_edges: f64,
    /// mean_edges / leading_edges; drifts toward 1 as n grows.
    pub leading_ratio: f64,
    pub mean_max_degree: f64,
    /// mean max degree / (ln n)^{d-1}.
    pub max_degree_ratio: f64,
    /// mean degree / (2^d (ln n)^{d-1} / (d-1)!).
    pub mean_degree_ratio: f64,
    /// mean DSatur colors * ln ln n / (ln n)^{d-1}; zero when the
    /// records carry no coloring.
    pub coloring_ratio: f64,
    /// mean greedy IS size * (ln n)^{d-1} / (n ln ln n); zero when the
    /// records carry no independent set.
    pub is_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub schema_version: u32,
    pub rows: Vec<ScalingRow>,
}

/// Aggregates records into per-n ratio rows against the oracle and the
/// leading-order law. Natural logarithms throughout.
pub fn scaling_report(records: &[TrialRecord], oracle_samples: usize, seed: u64) -> Result<ScalingReport> {
    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::InsufficientGrid(ns.len()));
    }
    let d = records[0].d;
    if records.iter().any(|r| r.d != d) {
        return Err(Error::InvalidConfig("records mix dimensions".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let group: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
        let trials = group.len();
        let mean = |f: &dyn Fn(&TrialRecord) -> f64| -> f64 {
            group.iter().map(|r| f(r)).sum::<f64>() / trials as f64
        };
        let mean_edges = mean(&|r| r.edges as f64);
        let var_edges = mean(&|r| (r.edges as f64 - mean_edges).powi(2));
        let se_edges = if trials > 1 {
            (var_edges / (trials - 1) as f64).sqrt()
        } else {
            0.0
        };
        let (oracle_edges, oracle_se) =
            expected_edges_oracle(n, d, oracle_samples, trial_seed(seed, i as u64));
        let leading_edges = expected_edges_leading(n, d);
        let ln_n = (n as f64).ln();
        let poly = ln_n.powi(d as i32 - 1);
        let degree_norm = f64::powi(2.0, d as i32) * poly / ln_factorial(d - 1).exp();
        let mean_max_degree = mean(&|r| r.max_degree as f64);
        rows.push(ScalingRow {
            n,
            d,
            trials,
            mean_edges,
            se_edges,
            oracle_edges,
            oracle_se,
            leading_edges,
            leading_ratio: mean_edges / leading_edges,
            mean_max_degree,
            max_degree_ratio: mean_max_degree / poly,
            mean_degree_ratio: mean(&|r| r.mean_degree) / degree_norm,
            coloring_ratio: mean(&|r| r.dsatur_colors as f64) * ln_n.ln() / poly,
            is_ratio: mean(&|r| r.greedy_is_size as f64) * poly / (n as f64 * ln_n.ln()),
        });
    }
    Ok(ScalingReport { schema_version: 1, rows })
}

fn record_line(r: &TrialRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.n,
        r.d,
        r.trial,
        r.seed,
        r.edges,
        r.max_degree,
        r.mean_degree,
        r.max_triangles_vertex,
        r.max_far_edges_vertex,
        r.dsatur_colors,
        r.greedy_is_size,
        r.caro_wei_bound,
        r.census_violations,
        r.wall_ms
    )
}

pub fn records_to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&record_line(r));
        out.push('\n');
    }
    out
}

pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(records_to_csv(records).as_bytes())?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse { line: 1, msg: "missing or wrong header".into() });
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 14 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 14 fields, got {}", fields.len()),
            });
        }
        let parse_err = |what: &str| Error::Parse { line: i + 1, msg: format!("bad {what}") };
        records.push(TrialRecord {
            n: fields[0].parse().map_err(|_| parse_err("n"))?,
            d: fields[1].parse().map_err(|_| parse_err("d"))?,
            trial: fields[2].parse().map_err(|_| parse_err("trial"))?,
            seed: fields[3].parse().map_err(|_| parse_err("seed"))?,
            edges: fields[4].parse().map_err(|_| parse_err("edges"))?,
            max_degree: fields[5].parse().map_err(|_| parse_err("max_degree"))?,
            mean_degree: fields[6].parse().map_err(|_| parse_err("mean_degree"))?,
            max_triangles_vertex: fields[7].parse().map_err(|_| parse_err("max_triangles_vertex"))?,
            max_far_edges_vertex: fields[8].parse().map_err(|_| parse_err("max_far_edges_vertex"))?,
            dsatur_colors: fields[9].parse().map_err(|_| parse_err("dsatur_colors"))?,
            greedy_is_size: fields[10].parse().map_err(|_| parse_err("greedy_is_size"))?,
            caro_wei_bound: fields[11].parse().map_err(|_| parse_err("caro_wei_bound"))?,
            census_violations: fields[12].parse().map_err(|_| parse_err("census_violations"))?,
            wall_ms: fields[13].parse().map_err(|_| parse_err("wall_ms"))?,
        });
    }
    Ok(records)
}

pub fn emit_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}
