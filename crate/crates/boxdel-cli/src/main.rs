//! Command-line front end. Every subcommand is a thin adapter over the
//! library: parse flags, call one entry point, serialize the result.
//! Exit codes: 0 success, 1 invariant failure, 2 usage error, 3 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use boxdel::experiments::{
    self, ExperimentConfig, OutputFormat, StatSelection,
};
use boxdel::graphs;
use boxdel::points::PointSet;
use boxdel::processes::{self, PairsParams};
use boxdel::stats::{self, CliqueBound, EdgeClassPolicy, IsStrategy};
use boxdel::Error;

#[derive(Parser)]
#[command(name = "boxdel", version, about = "Box-Delaunay graphs of random point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Points to sample, or the single grid entry for experiments.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Dimension of sampled point sets.
    #[arg(long, global = true)]
    d: Option<usize>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Master seed; falls back to BOXDEL_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Existing point file to read instead of sampling.
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Boxdel,
    Hasse,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a uniform point set and write it to --out.
    Sample,
    /// Build a graph from a point file and report its size.
    Build {
        #[arg(long, value_enum, default_value_t = KindArg::Boxdel)]
        kind: KindArg,
        /// Use the cubic reference builder instead of the fast one.
        #[arg(long)]
        oracle: bool,
    },
    /// Degree, triangle, classification, clique, coloring, and
    /// independent-set statistics of the box-Delaunay graph.
    Stats,
    /// Corner exploration sweep plus the cover check.
    Sweep {
        /// Tuple entries run over 1..=cap; defaults to 2*ceil(3 log2 n).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Empty and viable dyadic boxes per weight class.
    Census,
    /// Recursive suitable-pairs search on a fresh sample.
    Pairs {
        /// Marked point count; defaults to n/4.
        #[arg(long)]
        k: Option<usize>,
        /// Number of labelling classes.
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 1.0)]
        boost: f64,
        /// Overlay radix override; omit for the defining formula.
        #[arg(long)]
        radix: Option<u32>,
    },
    /// Planar interval census over marked points.
    Intervals {
        /// Marking rate exponent; defaults to the desk-scale rule.
        #[arg(long)]
        r: Option<u32>,
    },
    /// Trial harness from a config file and/or flags.
    Experiment {
        /// JSON file mirroring the experiment config; flags override.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Io(_) | Error::Parse { .. } | Error::Json(_) => 3,
                Error::InvalidPointSet(_) | Error::InvalidGraph(_) => 1,
                Error::RecursionAborted { .. } => 1,
                Error::ParamsOutOfRange(_) | Error::InvalidConfig(_) | Error::InsufficientGrid(_) => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn usage(msg: &str) -> Error {
    Error::InvalidConfig(msg.into())
}

fn seed_of(cli: &Cli) -> u64 {
    cli.seed.unwrap_or_else(|| {
        std::env::var("BOXDEL_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0)
    })
}

fn load_or_sample(cli: &Cli) -> Result<PointSet, Error> {
    match &cli.input {
        Some(path) => PointSet::load(path),
        None => {
            let n = cli.n.ok_or_else(|| usage("need --n or --in"))?;
            let d = cli.d.ok_or_else(|| usage("need --d or --in"))?;
            Ok(PointSet::sample_uniform(n, d, seed_of(cli)))
        }
    }
}

fn fresh_sample(cli: &Cli, d_default: Option<usize>) -> Result<PointSet, Error> {
    if cli.input.is_some() {
        return Err(usage("this subcommand reveals digit streams and cannot start from --in; use --n"));
    }
    let n = cli.n.ok_or_else(|| usage("need --n"))?;
    let d = match (cli.d, d_default) {
        (Some(d), Some(fixed)) if d != fixed => {
            return Err(usage(&format!("this subcommand is fixed to --d {fixed}")));
        }
        (d, fixed) => d.or(fixed).ok_or_else(|| usage("need --d"))?,
    };
    Ok(PointSet::sample_uniform(n, d, seed_of(cli)))
}

fn write_out(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Sample => {
            let n = cli.n.ok_or_else(|| usage("need --n"))?;
            let d = cli.d.ok_or_else(|| usage("need --d"))?;
            let out = cli.out.clone().ok_or_else(|| usage("need --out"))?;
            let p = PointSet::sample_uniform(n, d, seed_of(&cli));
            p.save(&out)?;
            println!("n={} d={} seed={} file={}", p.len(), d, seed_of(&cli), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Build { kind, oracle } => {
            let p = load_or_sample(&cli)?;
            let g = match (kind, oracle) {
                (KindArg::Boxdel, false) => graphs::build_boxdel(&p),
                (KindArg::Boxdel, true) => graphs::build_boxdel_bruteforce(&p),
                (KindArg::Hasse, _) => graphs::build_hasse(&p, &vec![1i8; p.dim()]),
            };
            if let Some(out) = &cli.out {
                g.save(out)?;
            }
            let name = match kind {
                KindArg::Boxdel => "boxdel",
                KindArg::Hasse => "hasse",
            };
            println!("kind={} n={} m={}", name, g.len(), g.edge_count());
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats => {
            let p = load_or_sample(&cli)?;
            let g = graphs::build_boxdel(&p);
            let degrees = stats::degree_stats(&g);
            let triangles = stats::triangles_per_vertex(&g);
            let policy = EdgeClassPolicy::new(p.dim(), p.len() as f64);
            let classes = stats::classify_edges(&p, &g, &policy);
            let clique = match stats::max_clique_upto(&g, 8) {
                CliqueBound::Exact(k) => json!({ "exact": k }),
                CliqueBound::ExceedsCap => json!({ "exceeds_cap": 8 }),
            };
            let summary = json!({
                "n": g.len(),
                "edges": g.edge_count(),
                "max_degree": degrees.max,
                "mean_degree": degrees.mean,
                "max_triangles_vertex": triangles.iter().max().copied().unwrap_or(0),
                "far_edges": classes.far.len(),
                "close_edges": classes.close.len(),
                "max_far_edges_vertex": classes.far_per_vertex.iter().max().copied().unwrap_or(0),
                "clique_bound": clique,
                "dsatur_colors": stats::dsatur_coloring(&g).count,
                "greedy_is_size": stats::independent_set(&g, IsStrategy::MinDegreeGreedy).size(),
                "caro_wei_bound": stats::caro_wei_bound(&g),
            });
            write_out(&cli, &serde_json::to_string_pretty(&summary)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { cap } => {
            let p = load_or_sample(&cli)?;
            let cap = cap.unwrap_or_else(|| processes::default_cap(p.len().max(2) as f64));
            let trace = processes::sweep_exploration(&p, cap);
            let violations = processes::verify_cover_claim(&trace, &p);
            let breaches = trace.cap_breaches();
            let summary = json!({
                "n": p.len(),
                "d": p.dim(),
                "cap": cap,
                "witnesses": trace.witness_labels().len(),
                "cap_breaches": breaches.len(),
                "cover_violations": violations,
            });
            write_out(&cli, &serde_json::to_string_pretty(&summary)?)?;
            Ok(exit_unless(violations.is_empty()))
        }
        Command::Census => {
            let p = load_or_sample(&cli)?;
            let census = processes::empty_box_census(&p, p.len().max(2) as f64);
            let violations = census.claim_violations();
            let text = match cli.format {
                Some(FormatArg::Csv) => {
                    let mut text = String::from("weight,total,empty,viable,threshold\n");
                    for row in &census.rows {
                        text.push_str(&format!(
                            "{},{},{},{},{}\n",
                            row.weight, row.total, row.empty, row.viable, row.threshold
                        ));
                    }
                    text
                }
                _ => serde_json::to_string_pretty(&json!({
                    "n": p.len(),
                    "d": p.dim(),
                    "violations": violations,
                    "rows": census.rows.iter().map(|r| json!({
                        "weight": r.weight,
                        "total": r.total,
                        "empty": r.empty,
                        "viable": r.viable,
                        "threshold": r.threshold,
                    })).collect::<Vec<_>>(),
                }))?,
            };
            write_out(&cli, &text)?;
            Ok(exit_unless(violations.is_empty()))
        }
        Command::Pairs { k, q, boost, radix } => {
            let mut p = fresh_sample(&cli, None)?;
            let n = p.len();
            let k = k.unwrap_or(n / 4);
            if k > n {
                return Err(usage("--k exceeds --n"));
            }
            let marked: Vec<u32> = (1..=k as u32).collect();
            let f: Vec<u32> = (0..n as u32).map(|i| i % (*q).max(1) as u32).collect();
            let params = PairsParams { t_boost: *boost, l_override: *radix };
            let got = processes::suitable_pairs(&mut p, &f, &marked, &params)?;
            let bad = check_pairs(&mut p, &f, &marked, &got);
            let summary = json!({
                "pairs": got.pairs,
                "box_sizes": got.box_sizes,
                "success": got.success,
                "invariant_violations": bad,
                "transcript": serde_json::to_value(&got.transcript)?,
            });
            write_out(&cli, &serde_json::to_string_pretty(&summary)?)?;
            Ok(exit_unless(bad.is_empty()))
        }
        Command::Intervals { r } => {
            let mut p = fresh_sample(&cli, Some(2))?;
            let params = processes::interval_params(p.len());
            let r = r.unwrap_or(params.r);
            let mut by_x: Vec<u32> = p.labels().collect();
            by_x.sort_unstable_by(|&a, &b| {
                p.coord(a, 0).partial_cmp(&p.coord(b, 0)).unwrap()
            });
            let marked: Vec<u32> = by_x.into_iter().step_by(1 << r).collect();
            let census =
                processes::interval_census_2d(&mut p, &marked, r, params.t, r / 2);
            let k = marked.len() as u64;
            let deterministic_floor = 8 * census.interval_size(0) >= k * census.t as u64;
            let per_bit: Vec<_> = (0..=census.max_step())
                .map(|i| {
                    json!({
                        "step": i,
                        "counts": (0..=census.s).map(|l| census.count(l, i)).collect::<Vec<_>>(),
                        "score": census.score(i),
                    })
                })
                .collect();
            let summary = json!({
                "n": p.len(),
                "r": r,
                "k": k,
                "t": census.t,
                "s": census.s,
                "gammas": census.gammas,
                "level_zero_floor_holds": deterministic_floor,
                "bits": per_bit,
            });
            write_out(&cli, &serde_json::to_string_pretty(&summary)?)?;
            Ok(exit_unless(deterministic_floor))
        }
        Command::Experiment { config } => {
            let mut cfg: ExperimentConfig = match config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                None => ExperimentConfig {
                    dim: 2,
                    n_grid: Vec::new(),
                    trials: 1,
                    seed: 0,
                    statistics: StatSelection::Full,
                    measure_wall_time: false,
                    out: None,
                    format: OutputFormat::Csv,
                },
            };
            if let Some(n) = cli.n {
                cfg.n_grid = vec![n];
            }
            if let Some(d) = cli.d {
                cfg.dim = d;
            }
            if let Some(trials) = cli.trials {
                cfg.trials = trials;
            }
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(out) = &cli.out {
                cfg.out = Some(out.display().to_string());
            }
            match cli.format {
                Some(FormatArg::Csv) => cfg.format = OutputFormat::Csv,
                Some(FormatArg::Json) => cfg.format = OutputFormat::Json,
                None => {}
            }
            let records = experiments::run_trials(&cfg)?;
            let text = match cfg.format {
                OutputFormat::Csv => experiments::records_to_csv(&records),
                OutputFormat::Json => serde_json::to_string_pretty(&records)? + "\n",
            };
            match &cfg.out {
                Some(path) => std::fs::write(Path::new(path), &text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_unless(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Post-run invariant audit of a completed pairs search; returns
/// human-readable violation notes, normally empty.
fn check_pairs(
    p: &mut PointSet,
    f: &[u32],
    marked: &[u32],
    got: &boxdel::processes::SuitablePairs,
) -> Vec<String> {
    let mut bad = Vec::new();
    let marked_set: std::collections::HashSet<u32> = marked.iter().copied().collect();
    let mut seen = std::collections::HashSet::new();
    let dims = p.dim();
    for (&(a, b), &size) in got.pairs.iter().zip(&got.box_sizes) {
        if !seen.insert(a) || !seen.insert(b) {
            bad.push(format!("label reused in pair ({a}, {b})"));
        }
        if !marked_set.contains(&a) || !marked_set.contains(&b) {
            bad.push(format!("unmarked endpoint in pair ({a}, {b})"));
        }
        if !p.dominates_labels(a, b, dims) {
            bad.push(format!("pair ({a}, {b}) not dominance-ordered"));
        }
        match processes::box_f(p, f, a, b) {
            Ok(members) => {
                if members.len() != size {
                    bad.push(format!("box of ({a}, {b}) recounts to {}", members.len()));
                }
                if members.iter().any(|l| marked_set.contains(l)) {
                    bad.push(format!("marked label inside box of ({a}, {b})"));
                }
            }
            Err(e) => bad.push(format!("box of ({a}, {b}): {e}")),
        }
    }
    bad
}
