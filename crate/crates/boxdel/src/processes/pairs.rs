//! Recursive search for suitable pairs: disjoint dominance-ordered
//! pairs of marked points, each with a provably small box between its
//! endpoints inside one class of the current labelling.
//!
//! On one axis the search is deterministic: pair off consecutive
//! marked points per class and keep the thin pairs. In dimension r it
//! runs M stages; stage m finds pairs among the first r-1 axes under
//! the labelling refined by m overlay digits of the last axis, then
//! keeps those pairs whose endpoints draw consecutive next digits in a
//! sparse part of their box's digit histogram. Overlay digits, once
//! revealed, become the order of that axis, so the kept pairs are
//! dominance-ordered and their full boxes shrink geometrically with
//! each revealed digit.

use std::collections::HashSet;

use serde::Serialize;

use crate::points::PointSet;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct PairsParams {
    /// Boost factor T, in 1..=sqrt(ln k).
    pub t_boost: f64,
    /// Fixed overlay radix; None evaluates the defining formula, which
    /// starves at desk scale.
    pub l_override: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    /// Qualified pairs returned by the stage recursion.
    pub found: usize,
    /// Pairs left after removing ones touching already-kept labels.
    pub pruned: usize,
    pub additions: usize,
    pub aborted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Transcript {
    pub dim: usize,
    pub n: usize,
    pub k: usize,
    pub classes: usize,
    pub t_boost: f64,
    pub radix: Option<u32>,
    pub radix_overridden: bool,
    pub stage_target: usize,
    pub stages: Vec<StageRecord>,
}

#[derive(Debug, Clone)]
pub struct SuitablePairs {
    /// Kept pairs (i, j), i dominated by j, disjoint as a label family.
    pub pairs: Vec<(u32, u32)>,
    /// |Box_f(i, j)| per pair, against the labelling the search ran on.
    pub box_sizes: Vec<usize>,
    /// Whether at least 8^{-r} k pairs were kept.
    pub success: bool,
    pub transcript: Transcript,
}

/// All labels of the class of i strictly between i and j in every one
/// of the first `dims` axes.
fn box_members(p: &mut PointSet, f: &[u32], i: u32, j: u32, dims: usize) -> Vec<u32> {
    let class = f[i as usize - 1];
    let mut out = Vec::new();
    for label in p.labels() {
        if label == i || label == j || f[label as usize - 1] != class {
            continue;
        }
        if p.dominates_labels(i, label, dims) && p.dominates_labels(label, j, dims) {
            out.push(label);
        }
    }
    out
}

/// Box of a level pair under labelling f: every label of f-class f(i)
/// strictly between i and j on all axes. Requires f(i) = f(j) and i
/// dominated by j.
pub fn box_f(p: &mut PointSet, f: &[u32], i: u32, j: u32) -> Result<Vec<u32>> {
    let n = p.len();
    if f.len() != n {
        return Err(Error::ParamsOutOfRange(format!(
            "labelling covers {} points, set has {n}",
            f.len()
        )));
    }
    if i == j || i < 1 || j < 1 || i as usize > n || j as usize > n {
        return Err(Error::ParamsOutOfRange(format!("bad pair ({i}, {j})")));
    }
    if f[i as usize - 1] != f[j as usize - 1] {
        return Err(Error::ParamsOutOfRange(format!("({i}, {j}) are not level-mates")));
    }
    let dims = p.dim();
    if !p.dominates_labels(i, j, dims) {
        return Err(Error::ParamsOutOfRange(format!("{i} does not precede {j}")));
    }
    Ok(box_members(p, f, i, j, dims))
}

/// Searches for suitable pairs among the marked points under the class
/// labelling f (one value per label, arbitrary codomain). Errors on
/// parameter violations and on stages that fall short of quota;
/// completed runs report success or failure in the result.
pub fn suitable_pairs(
    p: &mut PointSet,
    f: &[u32],
    marked: &[u32],
    params: &PairsParams,
) -> Result<SuitablePairs> {
    let n = p.len();
    let r = p.dim();
    if f.len() != n {
        return Err(Error::ParamsOutOfRange(format!(
            "labelling covers {} points, set has {n}",
            f.len()
        )));
    }
    let mut flags = vec![false; n];
    for &label in marked {
        if label < 1 || label as usize > n {
            return Err(Error::ParamsOutOfRange(format!("marked label {label} out of range")));
        }
        if std::mem::replace(&mut flags[label as usize - 1], true) {
            return Err(Error::ParamsOutOfRange(format!("marked label {label} repeated")));
        }
    }
    let k = marked.len();
    if k < 3 {
        return Err(Error::ParamsOutOfRange(format!("need at least 3 marked points, got {k}")));
    }
    let t = params.t_boost;
    if !(t >= 1.0 && t * t <= (k as f64).ln()) {
        return Err(Error::ParamsOutOfRange(format!("boost {t} outside 1..=sqrt(ln {k})")));
    }
    let mut values: Vec<u32> = f.to_vec();
    values.sort_unstable();
    values.dedup();
    let q = values.len();
    if q as f64 > (k as f64).powf(1.0 / r as f64) / 4.0 {
        return Err(Error::ParamsOutOfRange(format!(
            "{q} classes exceed k^(1/{r})/4 = {}",
            (k as f64).powf(1.0 / r as f64) / 4.0
        )));
    }
    let dense: Vec<u32> = f
        .iter()
        .map(|v| values.binary_search(v).unwrap() as u32)
        .collect();
    run(p, r, &dense, q, &flags, k, params)
}

fn run(
    p: &mut PointSet,
    dim: usize,
    f: &[u32],
    q: usize,
    marked: &[bool],
    k: usize,
    params: &PairsParams,
) -> Result<SuitablePairs> {
    let n = p.len();
    if dim == 1 {
        return Ok(base_case(p, f, q, marked, k, params));
    }
    let radix = match params.l_override {
        Some(l) => l,
        None => {
            let lnk = (k as f64).ln();
            (lnk / (8.0 * (dim * dim) as f64 * params.t_boost * lnk.ln())).floor() as u32
        }
    };
    if radix < 2 {
        return Err(Error::ParamsOutOfRange(format!(
            "overlay radix {radix} in dimension {dim} is unusable; override it"
        )));
    }
    let quota_bound = (k as f64).powf(1.0 / (dim - 1) as f64) / 4.0;
    let mut stage_target = 0usize;
    let mut classes = q as f64;
    while classes <= quota_bound {
        stage_target += 1;
        classes *= radix as f64;
    }
    let qual_bound = (8.0 * n as f64 / k as f64) * (8.0 / radix as f64).powi(dim as i32 - 2);
    p.set_axis_overlay(dim - 1, radix);

    let mut f_current = f.to_vec();
    let mut q_current = q;
    let mut used: HashSet<u32> = HashSet::new();
    let mut kept: Vec<(u32, u32)> = Vec::new();
    let mut stages = Vec::with_capacity(stage_target);
    for m in 0..stage_target {
        let aborted = |m: usize, dim: usize| Error::RecursionAborted { stage: m, dim };
        let inner = match run(p, dim - 1, &f_current, q_current, marked, k, params) {
            Ok(inner) if inner.success => inner,
            Ok(_) => return Err(aborted(m, dim)),
            Err(Error::RecursionAborted { .. }) => return Err(aborted(m, dim)),
            Err(e) => return Err(e),
        };
        let mut qualified: Vec<(u32, u32)> = inner
            .pairs
            .iter()
            .zip(&inner.box_sizes)
            .filter(|&(_, &size)| (size as f64) < qual_bound)
            .map(|(&pair, _)| pair)
            .collect();
        if qualified.len() as u64 * 8u64.pow(dim as u32 - 1) < k as u64 {
            return Err(aborted(m, dim));
        }
        qualified.sort_unstable_by_key(|&(a, b)| (f_current[a as usize - 1], a.min(b)));
        let found = qualified.len();
        qualified.retain(|&(a, b)| !used.contains(&a) && !used.contains(&b));
        let pruned = qualified.len();

        let digits: Vec<u32> = (1..=n as u32)
            .map(|label| p.stream_mut(label, dim - 1).lary_digit(radix, m + 1))
            .collect();
        let mut level_unmarked: Vec<Vec<u32>> = vec![Vec::new(); q_current];
        for label in 1..=n as u32 {
            if !marked[label as usize - 1] {
                level_unmarked[f_current[label as usize - 1] as usize].push(label);
            }
        }
        let mut additions = 0usize;
        for &(a, b) in &qualified {
            let class = f_current[a as usize - 1] as usize;
            let mut hist = vec![0u64; radix as usize];
            let mut size = 0u64;
            for idx in 0..level_unmarked[class].len() {
                let l = level_unmarked[class][idx];
                if p.dominates_labels(a, l, dim - 1) && p.dominates_labels(l, b, dim - 1) {
                    hist[digits[l as usize - 1] as usize] += 1;
                    size += 1;
                }
            }
            let sparse: Vec<bool> = hist
                .iter()
                .map(|&c| c * radix as u64 <= 4 * size)
                .collect();
            let da = digits[a as usize - 1] as usize;
            let db = digits[b as usize - 1] as usize;
            if db == da + 1 && da + 1 < radix as usize && sparse[da] && sparse[da + 1] {
                kept.push((a, b));
                used.insert(a);
                used.insert(b);
                additions += 1;
            }
        }
        stages.push(StageRecord { stage: m, found, pruned, additions, aborted: false });

        f_current = f_current
            .iter()
            .zip(&digits)
            .map(|(&c, &d)| c * radix + d)
            .collect();
        q_current *= radix as usize;
    }

    let success = kept.len() as u64 * 8u64.pow(dim as u32) >= k as u64;
    let box_sizes: Vec<usize> = kept
        .iter()
        .map(|&(a, b)| box_members(p, f, a, b, dim).len())
        .collect();
    Ok(SuitablePairs {
        pairs: kept,
        box_sizes,
        success,
        transcript: Transcript {
            dim,
            n,
            k,
            classes: q,
            t_boost: params.t_boost,
            radix: Some(radix),
            radix_overridden: params.l_override.is_some(),
            stage_target,
            stages,
        },
    })
}

/// One axis: per class, pair off consecutive marked points in axis
/// order and keep pairs with at most 8n/k class-mates between them.
/// Never fails.
fn base_case(
    p: &mut PointSet,
    f: &[u32],
    q: usize,
    marked: &[bool],
    k: usize,
    params: &PairsParams,
) -> SuitablePairs {
    let n = p.len();
    let threshold = 8.0 * n as f64 / k as f64;
    let mut levels: Vec<Vec<u32>> = vec![Vec::new(); q];
    let mut by_axis: Vec<u32> = p.labels().collect();
    by_axis.sort_unstable_by(|&a, &b| p.coord(a, 0).partial_cmp(&p.coord(b, 0)).unwrap());
    for &label in &by_axis {
        levels[f[label as usize - 1] as usize].push(label);
    }
    let mut pairs = Vec::new();
    let mut box_sizes = Vec::new();
    for members in &levels {
        let positions: Vec<usize> = (0..members.len())
            .filter(|&i| marked[members[i] as usize - 1])
            .collect();
        for duo in positions.chunks_exact(2) {
            let between = duo[1] - duo[0] - 1;
            if between as f64 <= threshold {
                pairs.push((members[duo[0]], members[duo[1]]));
                box_sizes.push(between);
            }
        }
    }
    SuitablePairs {
        pairs,
        box_sizes,
        success: true,
        transcript: Transcript {
            dim: 1,
            n,
            k,
            classes: q,
            t_boost: params.t_boost,
            radix: None,
            radix_overridden: false,
            stage_target: 0,
            stages: Vec::new(),
        },
    }
}
