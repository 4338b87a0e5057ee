//! Acceptance gate: one test per release criterion, each printing a
//! PASS line with its headline numbers. Run them in order with
//! `cargo test -p boxdel-cli --test acceptance -- --nocapture --test-threads=1`.
//!
//! Criteria 6 and 7 share one frozen-seed degree study (seed 20260821,
//! 30 trials per n); its reference bands were calibrated from a pilot
//! run of the same seeds and are deterministic under rerun.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;
use std::time::Instant;

use boxdel::experiments::{
    expected_edges_leading, expected_edges_oracle, parse_csv, ExperimentConfig, OutputFormat,
    StatSelection, TrialRecord,
};
use boxdel::graphs::{
    build_boxdel, build_boxdel_bruteforce, build_boxdel_fast2d, build_hasse, is_edge_hasse,
    orientation_union_check, Graph,
};
use boxdel::points::{boxes_of_weight, PointSet};
use boxdel::processes::{
    box_f, default_cap, detect_edge_via_digits, empty_box_census, interval_census_2d,
    interval_params, suitable_pairs, sweep_exploration, verify_cover_claim, DetectOutcome,
    PairsParams, SuitablePairs,
};
use boxdel::stats::{
    caro_wei_bound, independent_set, max_clique_upto, neighborhood_edge_count,
    triangles_per_vertex, CliqueBound, IsStrategy,
};

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn labels_by_x(p: &PointSet) -> Vec<u32> {
    let mut by_x: Vec<u32> = p.labels().collect();
    by_x.sort_unstable_by(|&a, &b| p.coord(a, 0).partial_cmp(&p.coord(b, 0)).unwrap());
    by_x
}

fn edge_set(g: &Graph) -> HashSet<(u32, u32)> {
    g.edges().into_iter().collect()
}

/// Degree study shared by the oracle-tracking and max-degree criteria.
fn degree_study() -> &'static Vec<TrialRecord> {
    static STUDY: OnceLock<Vec<TrialRecord>> = OnceLock::new();
    STUDY.get_or_init(|| {
        let cfg = ExperimentConfig {
            dim: 2,
            n_grid: vec![4096, 8192, 16384, 32768, 65536, 131072],
            trials: 30,
            seed: 20260821,
            statistics: StatSelection::DegreesOnly,
            measure_wall_time: false,
            out: None,
            format: OutputFormat::Csv,
        };
        boxdel::experiments::run_trials(&cfg).expect("degree study runs")
    })
}

fn edges_by_n(records: &[TrialRecord]) -> BTreeMap<usize, Vec<f64>> {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in records {
        by_n.entry(r.n).or_default().push(r.edges as f64);
    }
    by_n
}

#[test]
fn criterion_01_small_instance_edge_means() {
    let started = Instant::now();
    let trials = 100_000u64;
    for (tag, d) in [(1u64, 2usize), (2, 3)] {
        for t in 0..trials {
            let p = PointSet::sample_uniform(2, d, (tag << 32) | t);
            assert_eq!(build_boxdel(&p).edge_count(), 1, "a pair is always an edge");
        }
    }
    let mut means = Vec::new();
    for (tag, d, want) in [(3u64, 2usize, 8.0 / 3.0), (4, 3, 26.0 / 9.0)] {
        let mut total = 0u64;
        for t in 0..trials {
            let p = PointSet::sample_uniform(3, d, (tag << 32) | t);
            total += build_boxdel(&p).edge_count() as u64;
        }
        let mean = total as f64 / trials as f64;
        assert!(
            (mean - want).abs() <= 0.01,
            "triangle mean {mean} is off the exact value {want} in dimension {d}"
        );
        means.push(mean);
    }
    println!(
        "criterion 01: PASS (n=2 exact, n=3 means {:.4}/{:.4} vs 2.6667/2.8889, {:.1}s)",
        means[0],
        means[1],
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_02_fast_planar_matches_bruteforce() {
    let started = Instant::now();
    let mut checked = 0usize;
    for (count, n, base) in [(500usize, 60usize, 0u64), (50, 300, 1 << 32)] {
        for s in 0..count as u64 {
            let p = PointSet::sample_uniform(n, 2, base | s);
            let fast = edge_set(&build_boxdel_fast2d(&p));
            let brute = edge_set(&build_boxdel_bruteforce(&p));
            assert_eq!(fast, brute, "edge sets differ at n={n} seed {}", base | s);
            checked += 1;
        }
    }
    println!(
        "criterion 02: PASS ({checked} instances, zero mismatches, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_03_order_diagram_sits_inside_the_graph() {
    let started = Instant::now();
    for d in [2usize, 3] {
        for s in 0..100u64 {
            let p = PointSet::sample_uniform(50, d, (d as u64) << 40 | s);
            let boxdel = edge_set(&build_boxdel(&p));
            let hasse = build_hasse(&p, &vec![1i8; d]);
            for e in hasse.edges() {
                assert!(boxdel.contains(&e), "cover edge {e:?} missing from the graph");
            }
            let check = orientation_union_check(&p);
            assert!(check.holds(), "orientation union mismatch: {check:?}");
            assert!(
                triangles_per_vertex(&hasse).iter().all(|&t| t == 0),
                "triangle in a cover relation"
            );
        }
    }
    for s in 0..100u64 {
        let p = PointSet::sample_uniform(50, 1, (9u64 << 40) | s);
        let g = build_boxdel(&p);
        assert_eq!(g.edge_count(), 49, "a line of 50 points has 49 edges");
        let by_x = labels_by_x(&p);
        let want: HashSet<(u32, u32)> = by_x
            .windows(2)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect();
        assert_eq!(edge_set(&g), want, "line graph is not the sorted path");
    }
    println!(
        "criterion 03: PASS (200 cover checks, 100 line paths, zero violations, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_04_neighbourhoods_stay_sparse() {
    let started = Instant::now();
    for s in 0..100u64 {
        let p = PointSet::sample_uniform(300, 2, (11u64 << 40) | s);
        let g = build_boxdel_fast2d(&p);
        for v in p.labels() {
            let inside = neighborhood_edge_count(&g, v);
            assert!(
                inside <= 3 * g.degree(v),
                "vertex {v} has {inside} edges among {} neighbours",
                g.degree(v)
            );
        }
    }
    println!(
        "criterion 04: PASS (100 instances, every neighbourhood within 3 deg, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_05_plane_graphs_have_no_five_clique() {
    let started = Instant::now();
    let mut largest = 0usize;
    for s in 0..50u64 {
        let p = PointSet::sample_uniform(200, 2, (13u64 << 40) | s);
        let g = build_boxdel_fast2d(&p);
        match max_clique_upto(&g, 4) {
            CliqueBound::Exact(size) => largest = largest.max(size),
            CliqueBound::ExceedsCap => panic!("five-clique at seed {s}"),
        }
    }
    println!(
        "criterion 05: PASS (50 instances, largest clique {largest}, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_06_edge_counts_track_the_oracle() {
    let started = Instant::now();
    // Ratio bands frozen from the seed-20260821 pilot, +-0.01 around
    // the observed mean/leading values.
    let bands = [
        (4096usize, 0.765, 0.786),
        (8192, 0.781, 0.802),
        (16384, 0.795, 0.816),
        (32768, 0.807, 0.828),
        (65536, 0.818, 0.839),
    ];
    let by_n = edges_by_n(degree_study());
    let mut last_ratio = 0.0;
    let mut lines = Vec::new();
    for (n, lo, hi) in bands {
        let (mean, se) = mean_se(&by_n[&n]);
        let (oracle, oracle_se) = expected_edges_oracle(n, 2, 10_000_000, 991);
        let combined = (se * se + oracle_se * oracle_se).sqrt();
        assert!(
            (mean - oracle).abs() <= 3.0 * combined,
            "n={n}: mean {mean:.1} vs oracle {oracle:.1} exceeds 3 x {combined:.1}"
        );
        let ratio = mean / expected_edges_leading(n, 2);
        assert!(ratio > last_ratio, "n={n}: ratio {ratio:.4} fails to increase");
        assert!(
            ratio > lo && ratio < hi,
            "n={n}: ratio {ratio:.4} leaves the band ({lo}, {hi})"
        );
        last_ratio = ratio;
        lines.push(format!("{n}:{ratio:.3}"));
    }
    println!(
        "criterion 06: PASS (all within 3 SE of the oracle, ratios {} rising, {:.1}s)",
        lines.join(" "),
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_07_max_degree_grows_like_log() {
    let started = Instant::now();
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in degree_study() {
        by_n.entry(r.n).or_default().push(r.max_degree as f64);
    }
    let mut ratios = BTreeMap::new();
    for (&n, degs) in &by_n {
        let (mean, _) = mean_se(degs);
        let ratio = mean / (n as f64).ln();
        // Pilot band for mean max degree over ln n across the grid.
        assert!(
            ratio > 5.4 && ratio < 6.5,
            "n={n}: max degree ratio {ratio:.3} leaves the pilot band (5.4, 6.5)"
        );
        ratios.insert(n, ratio);
    }
    let spread = ratios[&131072] / ratios[&4096];
    assert!(
        spread <= 1.5,
        "top-of-grid ratio {spread:.3} grows faster than a constant times log"
    );
    println!(
        "criterion 07: PASS (ratio {:.3} at 2^12 to {:.3} at 2^17, spread {:.3} <= 1.5, {:.1}s)",
        ratios[&4096],
        ratios[&131072],
        spread,
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_08_exploration_cover_claim_holds() {
    let started = Instant::now();
    let cap = default_cap(1e4);
    let mut breaches = 0usize;
    for d in [2usize, 3] {
        for s in 0..100u64 {
            let p = PointSet::sample_poissonised(1e4, d, (17u64 << 40) | (d as u64) << 32 | s);
            let trace = sweep_exploration(&p, cap);
            breaches += trace.cap_breaches().len();
            let violations = verify_cover_claim(&trace, &p);
            assert!(
                violations.is_empty(),
                "dimension {d} seed {s}: uncovered minima {violations:?}"
            );
        }
    }
    println!(
        "criterion 08: PASS (200 runs, zero uncovered minima, {breaches} cap breaches flagged, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_09_census_shift_identity_is_exact() {
    let started = Instant::now();
    for s in 0..100u64 {
        let p = PointSet::sample_poissonised(1e5, 2, (19u64 << 40) | s);
        let census = empty_box_census(&p, 1e5);
        let violations = census.claim_violations();
        assert!(violations.is_empty(), "seed {s}: crowded weights {violations:?}");
        let occupied: HashSet<Vec<u32>> =
            p.labels().map(|l| p.dyadic_index_of(l).exponents).collect();
        for row in &census.rows {
            let recount = boxes_of_weight(row.weight + 2, 2)
                .into_iter()
                .filter(|b| b.exponents.iter().all(|&e| e >= 2))
                .filter(|b| !occupied.contains(&b.exponents))
                .count() as u64;
            assert_eq!(
                row.viable, recount,
                "seed {s}: weight {} viable count disagrees with the shifted recount",
                row.weight
            );
        }
    }
    println!(
        "criterion 09: PASS (100 runs, zero crowded weights, shift identity exact, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

fn audit_pairs(
    p: &mut PointSet,
    f: &[u32],
    marked: &[u32],
    got: &SuitablePairs,
    size_cap: usize,
    strict: bool,
) -> Vec<String> {
    let mut bad = Vec::new();
    let marked_set: HashSet<u32> = marked.iter().copied().collect();
    let mut seen = HashSet::new();
    for (&(a, b), &size) in got.pairs.iter().zip(&got.box_sizes) {
        if !seen.insert(a) || !seen.insert(b) {
            bad.push(format!("label reused in ({a}, {b})"));
        }
        if !marked_set.contains(&a) || !marked_set.contains(&b) {
            bad.push(format!("unmarked endpoint in ({a}, {b})"));
        }
        if f[a as usize - 1] != f[b as usize - 1] {
            bad.push(format!("mixed classes in ({a}, {b})"));
        }
        if strict && size >= size_cap {
            bad.push(format!("box of ({a}, {b}) holds {size} >= {size_cap}"));
        }
        if !strict && size > size_cap {
            bad.push(format!("box of ({a}, {b}) holds {size} > {size_cap}"));
        }
        match box_f(p, f, a, b) {
            Ok(members) => {
                if members.len() != size {
                    bad.push(format!("box of ({a}, {b}) recounts to {}", members.len()));
                }
                if members.iter().any(|l| marked_set.contains(l)) {
                    bad.push(format!("marked point inside box of ({a}, {b})"));
                }
            }
            Err(e) => bad.push(format!("box of ({a}, {b}): {e}")),
        }
    }
    bad
}

#[test]
fn criterion_10_pair_selection_yields_and_respects_boxes() {
    let started = Instant::now();
    // One-axis base rule on a mix of random and adversarial markings.
    let n = 1024usize;
    for s in 0..1000u64 {
        let mut p = PointSet::sample_uniform(n, 1, (23u64 << 40) | s);
        let k = 16 + (s as usize % 64) * 8;
        let by_x = labels_by_x(&p);
        let marked: Vec<u32> = match s % 4 {
            0 => {
                // Pseudo-random spread: stride walk over the label space.
                (0..k).map(|i| ((i * 797 + s as usize) % n) as u32 + 1).collect::<HashSet<_>>()
                    .into_iter().collect()
            }
            1 => by_x.iter().step_by(n / k).take(k).copied().collect(),
            2 => by_x[..k].to_vec(),
            _ => by_x
                .chunks(8)
                .flat_map(|c| c.iter().take(2))
                .take(k)
                .copied()
                .collect(),
        };
        let k = marked.len();
        let q = 1 + (s as u32 % 4);
        let f: Vec<u32> = (0..n as u32).map(|i| i % q).collect();
        let got = suitable_pairs(&mut p, &f, &marked, &PairsParams {
            t_boost: 1.0,
            l_override: None,
        })
        .expect("one-axis selection runs");
        assert!(got.success, "seed {s}: base rule fell below its floor");
        assert!(8 * got.pairs.len() >= k, "seed {s}: {} pairs for k={k}", got.pairs.len());
        let bad = audit_pairs(&mut p, &f, &marked, &got, 8 * n / k, false);
        assert!(bad.is_empty(), "seed {s}: {bad:?}");
    }
    // Two-axis recursion at the frozen study shape.
    let (n, k, radix) = (4096usize, 512usize, 8u32);
    let size_cap = 8 * n / k;
    let mut successes = 0usize;
    for s in 0..200u64 {
        let mut p = PointSet::sample_uniform(n, 2, s);
        let f = vec![0u32; n];
        let marked: Vec<u32> = (1..=k as u32).collect();
        match suitable_pairs(&mut p, &f, &marked, &PairsParams {
            t_boost: 1.0,
            l_override: Some(radix),
        }) {
            Ok(got) if got.success => {
                successes += 1;
                let bad = audit_pairs(&mut p, &f, &marked, &got, size_cap, true);
                assert!(bad.is_empty(), "seed {s}: {bad:?}");
            }
            Ok(_) => {}
            Err(boxdel::Error::RecursionAborted { .. }) => {}
            Err(e) => panic!("seed {s}: {e}"),
        }
    }
    assert!(successes >= 180, "only {successes}/200 two-axis runs succeeded");
    println!(
        "criterion 10: PASS (1000 one-axis floors, {successes}/200 two-axis successes, zero box violations, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_11_interval_floor_is_deterministic() {
    let started = Instant::now();
    let n = 1 << 14;
    let params = interval_params(n);
    let (r, k, t, s_levels) = (params.r, params.k, params.t, params.s);
    assert_eq!((r, k, t), (2, 4096, 7), "r rule drifted at n=2^14");
    let floor = (k as u64 * t as u64).div_ceil(8);
    let mut smallest = u64::MAX;
    for s in 0..500u64 {
        let mut p = PointSet::sample_uniform(n, 2, (29u64 << 40) | s);
        let by_x = labels_by_x(&p);
        let marked: Vec<u32> = match s % 4 {
            0 | 1 => by_x.iter().step_by(1 << r).take(k).copied().collect(),
            2 => by_x[..k].to_vec(),
            _ => (0..k).map(|i| ((i * 613 + s as usize) % n) as u32 + 1).collect::<HashSet<_>>()
                .into_iter().collect(),
        };
        let census = interval_census_2d(&mut p, &marked, r, t, s_levels);
        let size = census.interval_size(0);
        let need = (marked.len() as u64 * t as u64).div_ceil(8);
        assert!(
            size >= need,
            "seed {s}: level-0 interval count {size} under the floor {need}"
        );
        if marked.len() == k {
            smallest = smallest.min(size);
        }
    }
    println!(
        "criterion 11: PASS (500 runs, smallest level-0 count {smallest} >= {floor}, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_12_digit_certificates_never_lie() {
    let started = Instant::now();
    let mut certified = 0usize;
    let mut seed = 1000u64;
    while certified < 10_000 && seed < 1100 {
        let mut p = PointSet::sample_uniform(512, 2, seed);
        let by_x = labels_by_x(&p);
        let marked: Vec<u32> = by_x.iter().step_by(2).copied().collect();
        let marked_set: HashSet<u32> = marked.iter().copied().collect();
        for i in 0..=6u32 {
            let mut levels: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
            for &label in &by_x {
                if marked_set.contains(&label) {
                    levels.entry(p.stream_mut(label, 1).prefix(i)).or_default().push(label);
                }
            }
            let pairs: Vec<(u32, u32)> = levels
                .values()
                .flat_map(|m| m.windows(2).map(|w| (w[0], w[1])))
                .collect();
            for (a, b) in pairs {
                if let DetectOutcome::Certified = detect_edge_via_digits(&mut p, &marked, a, b, i, 16)
                {
                    certified += 1;
                    assert!(
                        is_edge_hasse(&p, a, b),
                        "seed {seed}: certified non-edge ({a}, {b}) at step {i}"
                    );
                }
            }
        }
        seed += 1;
    }
    assert!(certified >= 10_000, "only {certified} certificates collected");
    println!(
        "criterion 12: PASS ({certified} certificates, zero false, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_13_random_order_beats_the_degree_bound() {
    let started = Instant::now();
    let p = PointSet::sample_uniform(500, 2, 777);
    let g = build_boxdel_fast2d(&p);
    let bound = caro_wei_bound(&g);
    let runs = 10_000u64;
    let sizes: Vec<f64> = (0..runs)
        .map(|s| independent_set(&g, IsStrategy::RandomPermutation { seed: s }).size() as f64)
        .collect();
    let (mean, se) = mean_se(&sizes);
    assert!(
        mean >= bound - 3.0 * se,
        "mean {mean:.2} falls 3 SE under the defect bound {bound:.2}"
    );
    println!(
        "criterion 13: PASS (mean {mean:.2} vs bound {bound:.2}, SE {se:.3}, {:.1}s)",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_14_study_reruns_are_byte_identical() {
    let started = Instant::now();
    let dir = std::env::temp_dir().join(format!("boxdel-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("study.json");
    std::fs::write(
        &config,
        r#"{ "dim": 2, "n_grid": [64, 128], "trials": 3, "seed": 5, "statistics": "full" }"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.join(format!("run{run}.csv"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_boxdel"))
            .args(["experiment", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "study run {run} failed");
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "reruns differ");
    let records = parse_csv(std::str::from_utf8(&outputs[0]).unwrap()).unwrap();
    assert_eq!(records.len(), 6, "expected 2 sizes x 3 trials");
    let by_n: HashMap<usize, usize> = records.iter().fold(HashMap::new(), |mut acc, r| {
        *acc.entry(r.n).or_default() += 1;
        acc
    });
    assert_eq!(by_n[&64], 3);
    assert_eq!(by_n[&128], 3);
    std::fs::remove_dir_all(&dir).ok();
    println!(
        "criterion 14: PASS (two runs, {} identical bytes, {:.1}s)",
        outputs[0].len(),
        started.elapsed().as_secs_f64()
    );
}
