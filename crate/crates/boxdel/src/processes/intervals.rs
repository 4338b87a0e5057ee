//! Interval census on a marked planar point set and the bit-revelation
//! edge detector built on it.
//!
//! Points sit on the i-level given by the first i bits of their second
//! coordinate's digit stream. Two marked points are consecutive at
//! step i when they share that level and no marked point lies between
//! them in first-coordinate order. A consecutive pair lands in the
//! level-l multiset when at most gamma_l unmarked points sit between
//! them, so the multisets are nested downward in l.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::points::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntervalParams {
    pub n: usize,
    pub r: u32,
    pub k: usize,
    pub t: u32,
    pub s: u32,
}

/// Marking rate rule for desk-scale runs: the largest r with
/// 2^r roughly log(n)/loglog(n), floored to keep k = n/2^r whole and
/// large. Derived values t = floor(log2(n)/2) and s = floor(r/2).
pub fn interval_params(n: usize) -> IntervalParams {
    assert!(n >= 16, "interval params need n >= 16");
    let ln = (n as f64).ln();
    let r = (ln / ln.ln()).log2().floor().max(1.0) as u32;
    IntervalParams {
        n,
        r,
        k: n >> r,
        t: ((n as f64).log2() / 2.0).floor() as u32,
        s: r / 2,
    }
}

/// gamma_l = (1 + 1/r)^l * 2^{2 + r - l}, decreasing in l for l <= r.
pub fn gamma(r: u32, level: u32) -> f64 {
    assert!(r >= 1 && level <= r);
    (1.0 + 1.0 / r as f64).powi(level as i32) * f64::powi(2.0, (2 + r - level) as i32)
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalCensus {
    pub r: u32,
    pub t: u32,
    pub s: u32,
    pub k: usize,
    pub gammas: Vec<f64>,
    /// counts[l][i] = number of step-i consecutive pairs with at most
    /// gamma_l unmarked points between them.
    pub counts: Vec<Vec<u64>>,
}

impl IntervalCensus {
    /// Largest bit step the census covers.
    pub fn max_step(&self) -> u32 {
        self.s + self.t / 2
    }

    pub fn count(&self, level: u32, step: u32) -> u64 {
        self.counts[level as usize][step as usize]
    }

    /// Size of the level-l interval multiset, summed over its step
    /// window l..=l+floor(t/2).
    pub fn interval_size(&self, level: u32) -> u64 {
        (level..=level + self.t / 2).map(|i| self.count(level, i)).sum()
    }

    /// Weighted score of one bit step across all levels.
    pub fn score(&self, step: u32) -> u64 {
        (0..=self.s).map(|l| self.count(l, step) << l).sum()
    }
}

/// Runs the census over bit steps 0..=s+floor(t/2). First coordinates
/// come from the materialized views; second coordinates are consumed
/// bit by bit from the streams.
pub fn interval_census_2d(
    p: &mut PointSet,
    marked: &[u32],
    r: u32,
    t: u32,
    s: u32,
) -> IntervalCensus {
    assert_eq!(p.dim(), 2, "interval census is planar");
    assert!(p.has_streams(), "census consumes digit streams");
    assert!(r >= 1 && s <= r);
    let k = marked.len();
    let marked_set: HashSet<u32> = marked.iter().copied().collect();
    assert_eq!(marked_set.len(), k, "marked labels must be distinct");
    let gammas: Vec<f64> = (0..=s).map(|l| gamma(r, l)).collect();
    let mut by_x: Vec<u32> = p.labels().collect();
    by_x.sort_unstable_by(|&a, &b| p.coord(a, 0).partial_cmp(&p.coord(b, 0)).unwrap());
    let max_step = s + t / 2;
    let mut counts = vec![vec![0u64; max_step as usize + 1]; s as usize + 1];
    for i in 0..=max_step {
        let mut levels: HashMap<u64, Vec<u32>> = HashMap::new();
        for &label in &by_x {
            let key = p.stream_mut(label, 1).prefix(i);
            levels.entry(key).or_default().push(label);
        }
        for members in levels.values() {
            let mut last_marked: Option<usize> = None;
            for (pos, &label) in members.iter().enumerate() {
                if !marked_set.contains(&label) {
                    continue;
                }
                if let Some(prev) = last_marked {
                    let between = (pos - prev - 1) as f64;
                    for l in 0..=s {
                        if between <= gammas[l as usize] {
                            counts[l as usize][i as usize] += 1;
                        }
                    }
                }
                last_marked = Some(pos);
            }
        }
    }
    IntervalCensus { r, t, s, k, gammas, counts }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectOutcome {
    Certified,
    NotCertified,
}

/// Decides from revealed bits alone whether the consecutive step-i
/// pair (a, b) is a dominance edge, reading only the streams of a, b,
/// and the unmarked points between them on the step-i level. Certifies
/// when some deeper level isolates the pair before the window splits
/// it, the pair lands on different levels by step i+window, and a sits
/// below b. A certified pair is an edge outright; the converse can
/// fail, so the caller treats NotCertified as unresolved.
pub fn detect_edge_via_digits(
    p: &mut PointSet,
    marked: &[u32],
    a: u32,
    b: u32,
    i: u32,
    window: u32,
) -> DetectOutcome {
    assert!(window >= 1 && i + window <= 64, "window out of range");
    assert_eq!(p.dim(), 2, "detection is planar");
    let marked_set: HashSet<u32> = marked.iter().copied().collect();
    assert!(marked_set.contains(&a) && marked_set.contains(&b) && a != b, "pair must be two marked points");
    let (xa, xb) = (p.coord(a, 0), p.coord(b, 0));
    assert!(xa < xb, "pair must be in first-coordinate order");
    let key = p.stream_mut(a, 1).prefix(i);
    assert_eq!(p.stream_mut(b, 1).prefix(i), key, "pair must share the step-i level");
    let mut candidates: Vec<u32> = Vec::new();
    for label in p.labels() {
        if label == a || label == b {
            continue;
        }
        let x = p.coord(label, 0);
        if x <= xa || x >= xb {
            continue;
        }
        if p.stream_mut(label, 1).prefix(i) != key {
            continue;
        }
        assert!(!marked_set.contains(&label), "pair is not consecutive: marked point between");
        candidates.push(label);
    }
    // First window depth at which the pair's levels split.
    let mut split = None;
    for j in 1..=window {
        let depth = i + j;
        if p.stream_mut(a, 1).prefix(depth) != p.stream_mut(b, 1).prefix(depth) {
            split = Some(j);
            break;
        }
    }
    let Some(split) = split else {
        return DetectOutcome::NotCertified;
    };
    let depth = i + split;
    if p.stream_mut(a, 1).prefix(depth) > p.stream_mut(b, 1).prefix(depth) {
        return DetectOutcome::NotCertified;
    }
    for j in 0..split {
        let depth = i + j;
        let shared = p.stream_mut(a, 1).prefix(depth);
        let isolated = candidates
            .iter()
            .all(|&z| p.stream_mut(z, 1).prefix(depth) != shared);
        if isolated {
            return DetectOutcome::Certified;
        }
    }
    DetectOutcome::NotCertified
}
