//! Box-Delaunay graphs and dominance Hasse diagrams: a cubic oracle,
//! optimized builders, and the orientation union identity.
//!
//! A pair pq is a box-Delaunay edge when the open rectangle they span
//! holds no third point; equivalently, in every orthant around p, the
//! neighbors are the minimal points under componentwise offset
//! dominance. The Hasse builders use the same minima scan on a single
//! orthant after reflecting axes per the orientation.

use std::collections::HashSet;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::points::{dominates, open_rect, rect_contains, PointSet};
use crate::{Error, Result};

/// Undirected graph on labels 1..n with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// adj[label] for label in 1..=n; slot 0 stays empty.
    adj: Vec<Vec<u32>>,
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        Graph { n, adj: vec![Vec::new(); n + 1] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Inserts the undirected edge, keeping adjacency sorted; ignores
    /// duplicates. Panics on self-loops or out-of-range labels.
    pub fn add_edge(&mut self, a: u32, b: u32) {
        assert!(a != b, "self-loop at {a}");
        assert!(self.in_range(a) && self.in_range(b), "label out of range");
        Self::insert_sorted(&mut self.adj[a as usize], b);
        Self::insert_sorted(&mut self.adj[b as usize], a);
    }

    fn insert_sorted(list: &mut Vec<u32>, v: u32) {
        if let Err(pos) = list.binary_search(&v) {
            list.insert(pos, v);
        }
    }

    fn in_range(&self, a: u32) -> bool {
        a >= 1 && a as usize <= self.n
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        assert!(self.in_range(a) && self.in_range(b), "label out of range");
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    pub fn neighbors(&self, a: u32) -> &[u32] {
        assert!(self.in_range(a), "label out of range");
        &self.adj[a as usize]
    }

    pub fn degree(&self, a: u32) -> usize {
        self.neighbors(a).len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// All edges (a, b) with a < b, lexicographically sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for a in 1..=self.n as u32 {
            for &b in &self.adj[a as usize] {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Re-verifies the structural invariants; used by loaders and tests.
    pub fn validate(&self) -> Result<()> {
        if self.adj.len() != self.n + 1 || !self.adj[0].is_empty() {
            return Err(Error::InvalidGraph("malformed adjacency table".into()));
        }
        for a in 1..=self.n as u32 {
            let list = &self.adj[a as usize];
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGraph(format!("adjacency of {a} unsorted")));
            }
            for &b in list {
                if b == a {
                    return Err(Error::InvalidGraph(format!("self-loop at {a}")));
                }
                if !self.in_range(b) {
                    return Err(Error::InvalidGraph(format!("label {b} out of range")));
                }
                if self.adj[b as usize].binary_search(&a).is_err() {
                    return Err(Error::InvalidGraph(format!("edge {a}-{b} not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// Writes the text dump: "n m" then one "a b" line per edge with
    /// a < b, sorted lexicographically.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut out = BufWriter::new(file);
        let edges = self.edges();
        writeln!(out, "{} {}", self.n, edges.len())?;
        for (a, b) in edges {
            writeln!(out, "{a} {b}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Graph> {
        let file = std::fs::File::open(path)?;
        let mut lines = std::io::BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })??;
        let mut head = header.split_whitespace();
        let n: usize = head
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse { line: 1, msg: "bad vertex count".into() })?;
        let m: usize = head
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse { line: 1, msg: "bad edge count".into() })?;
        let mut g = Graph::new(n);
        let mut read = 0usize;
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let bad = || Error::Parse { line: i + 2, msg: format!("bad edge line {line:?}") };
            let a: u32 = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            let b: u32 = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            if a >= b || !g.in_range(a) || !g.in_range(b) {
                return Err(Error::InvalidGraph(format!("edge {a}-{b} violates label order")));
            }
            g.add_edge(a, b);
            read += 1;
        }
        if read != m || g.edge_count() != m {
            return Err(Error::InvalidGraph(format!(
                "header promises {m} edges, file holds {read}"
            )));
        }
        g.validate()?;
        Ok(g)
    }
}

/// Panics unless no two points share a value on any axis. Builders
/// call this up front: ties would silently corrupt the minima scans.
fn assert_general_position(p: &PointSet) {
    for axis in 0..p.dim() {
        let mut bits: Vec<u64> = p.labels().map(|l| p.coord(l, axis).to_bits()).collect();
        bits.sort_unstable();
        assert!(
            bits.windows(2).all(|w| w[0] != w[1]),
            "general position violated on axis {axis}"
        );
    }
}

/// True iff no third point of P lies in the open rectangle of a and b.
pub fn is_edge_boxdel(p: &PointSet, a: u32, b: u32) -> bool {
    assert_ne!(a, b, "distinct labels required");
    let r = open_rect(p.point(a), p.point(b));
    p.labels().all(|c| c == a || c == b || !rect_contains(&r, p.point(c)))
}

/// True iff one endpoint dominates the other with no third point
/// strictly between under componentwise dominance.
pub fn is_edge_hasse(p: &PointSet, a: u32, b: u32) -> bool {
    assert_ne!(a, b, "distinct labels required");
    let (pa, pb) = (p.point(a), p.point(b));
    let (lo, hi) = if dominates(pa, pb) {
        (a, b)
    } else if dominates(pb, pa) {
        (b, a)
    } else {
        return false;
    };
    let (plo, phi) = (p.point(lo), p.point(hi));
    p.labels().all(|c| {
        c == a || c == b || !(dominates(plo, p.point(c)) && dominates(p.point(c), phi))
    })
}

/// Exact cubic oracle: tests every pair against every witness point.
pub fn build_boxdel_bruteforce(p: &PointSet) -> Graph {
    assert_general_position(p);
    let n = p.len();
    let mut g = Graph::new(n);
    for a in 1..=n as u32 {
        for b in a + 1..=n as u32 {
            if is_edge_boxdel(p, a, b) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// Shared scan of the two-dimensional builder. For each vertex in
/// x-order, walk the points to its right and keep, per y-side, the
/// running least |Δy| as a staircase frontier; a point is a neighbor
/// exactly when it tightens its side's frontier, which finds every
/// edge once from its left endpoint. y magnitudes compare as raw f64
/// bits (monotone for positive floats), complemented on the low side
/// so that closer always means smaller.
fn scan2d(p: &PointSet, mut emit: impl FnMut(u32, u32)) {
    assert_eq!(p.dim(), 2, "dimension must be 2");
    assert_general_position(p);
    let n = p.len();
    let mut order: Vec<u32> = (1..=n as u32).collect();
    order.sort_unstable_by(|&a, &b| p.coord(a, 0).partial_cmp(&p.coord(b, 0)).unwrap());
    let ybits: Vec<u64> = order.iter().map(|&l| p.coord(l, 1).to_bits()).collect();
    for i in 0..n {
        let vy = ybits[i];
        let mut frontier = [u64::MAX, u64::MAX];
        for j in i + 1..n {
            let uy = ybits[j];
            let side = (uy < vy) as usize;
            let key = uy ^ 0u64.wrapping_sub(side as u64);
            if key < frontier[side] {
                frontier[side] = key;
                emit(order[i], order[j]);
            }
        }
    }
}

/// Two-dimensional builder; identical edge set to the oracle in
/// O(n^2) after one sort.
pub fn build_boxdel_fast2d(p: &PointSet) -> Graph {
    let mut g = Graph::new(p.len());
    scan2d(p, |a, b| g.add_edge(a, b));
    g
}

/// Edge count and degree profile of the 2D graph without materializing
/// adjacency; the experiment harness uses this at sizes where lists
/// would dominate memory and time.
pub fn boxdel2d_degrees(p: &PointSet) -> (u64, Vec<u32>) {
    let mut degrees = vec![0u32; p.len()];
    let mut edges = 0u64;
    scan2d(p, |a, b| {
        degrees[a as usize - 1] += 1;
        degrees[b as usize - 1] += 1;
        edges += 1;
    });
    (edges, degrees)
}

/// General-dimension builder: per vertex, bucket the other points by
/// orthant of their offset and keep the minimal points under
/// componentwise |offset| dominance; those minima are exactly the
/// box-Delaunay neighbors.
pub fn build_boxdel(p: &PointSet) -> Graph {
    if p.dim() == 2 {
        return build_boxdel_fast2d(p);
    }
    assert_general_position(p);
    let n = p.len();
    let d = p.dim();
    let mut g = Graph::new(n);
    let mut buckets: Vec<Vec<(Vec<f64>, u32)>> = vec![Vec::new(); 1 << d];
    for a in 1..=n as u32 {
        for bucket in &mut buckets {
            bucket.clear();
        }
        let pa = p.point(a);
        for b in p.labels() {
            if b == a {
                continue;
            }
            let pb = p.point(b);
            let mut mask = 0usize;
            let mut offset = Vec::with_capacity(d);
            for k in 0..d {
                let delta = pb[k] - pa[k];
                if delta > 0.0 {
                    mask |= 1 << k;
                }
                offset.push(delta.abs());
            }
            buckets[mask].push((offset, b));
        }
        for bucket in &mut buckets {
            for b in orthant_minima(bucket) {
                if a < b {
                    g.add_edge(a, b);
                }
            }
        }
    }
    g
}

/// Minimal elements of a bucket under strict componentwise dominance
/// of the offset vectors. Sorting by the first component lets a single
/// pass test candidates against the minima found so far.
fn orthant_minima(bucket: &mut [(Vec<f64>, u32)]) -> Vec<u32> {
    bucket.sort_unstable_by(|x, y| x.0[0].partial_cmp(&y.0[0]).unwrap());
    let mut minima: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    'candidates: for i in 0..bucket.len() {
        for &m in &minima {
            if dominates(&bucket[m].0, &bucket[i].0) {
                continue 'candidates;
            }
        }
        minima.push(i);
        out.push(bucket[i].1);
    }
    out
}

/// Hasse diagram of the dominance order after reflecting every axis
/// with sign -1. Neighbors of a vertex are the minima of its oriented
/// upper set, found with the same minima scan.
pub fn build_hasse(p: &PointSet, orientation: &[i8]) -> Graph {
    assert_eq!(orientation.len(), p.dim(), "orientation length must match dimension");
    assert!(orientation.iter().all(|&s| s == 1 || s == -1), "orientation entries must be ±1");
    assert_general_position(p);
    let n = p.len();
    let d = p.dim();
    let mut g = Graph::new(n);
    let mut upper: Vec<(Vec<f64>, u32)> = Vec::new();
    for a in 1..=n as u32 {
        upper.clear();
        let pa = p.point(a);
        'others: for b in p.labels() {
            if b == a {
                continue;
            }
            let pb = p.point(b);
            let mut offset = Vec::with_capacity(d);
            for k in 0..d {
                let delta = (pb[k] - pa[k]) * orientation[k] as f64;
                if delta <= 0.0 {
                    continue 'others;
                }
                offset.push(delta);
            }
            upper.push((offset, b));
        }
        for b in orthant_minima(&mut upper) {
            g.add_edge(a, b);
        }
    }
    g
}

/// Outcome of comparing the union of all 2^d Hasse orientations with
/// the oracle box-Delaunay graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionCheck {
    /// Oracle edges the union misses.
    pub missing: Vec<(u32, u32)>,
    /// Union edges absent from the oracle.
    pub extra: Vec<(u32, u32)>,
}

impl UnionCheck {
    pub fn holds(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Checks that the union over all 2^d orientations of the Hasse
/// diagram is exactly the box-Delaunay graph, reporting the symmetric
/// difference when it is not.
pub fn orientation_union_check(p: &PointSet) -> UnionCheck {
    let d = p.dim();
    let mut union: HashSet<(u32, u32)> = HashSet::new();
    for mask in 0..1usize << d {
        let orientation: Vec<i8> =
            (0..d).map(|k| if mask >> k & 1 == 0 { 1 } else { -1 }).collect();
        union.extend(build_hasse(p, &orientation).edges());
    }
    let oracle: HashSet<(u32, u32)> = build_boxdel_bruteforce(p).edges().into_iter().collect();
    let mut missing: Vec<(u32, u32)> = oracle.difference(&union).copied().collect();
    let mut extra: Vec<(u32, u32)> = union.difference(&oracle).copied().collect();
    missing.sort_unstable();
    extra.sort_unstable();
    UnionCheck { missing, extra }
}
