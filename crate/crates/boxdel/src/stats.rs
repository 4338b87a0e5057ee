//! Local statistics of built graphs: degrees, triangles, bounded
//! clique search, far/close edge classification, and constructive
//! coloring and independent-set heuristics.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graphs::Graph;
use crate::points::{rect_volume, PointSet};

/// Far/close split of edges by spanned rectangle volume. The
/// reference size n is the ambient intensity, so Poissonised sets use
/// the intensity rather than the realized count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeClassPolicy {
    pub dim: usize,
    pub n: f64,
    pub zeta: f64,
}

impl EdgeClassPolicy {
    /// zeta = 2^{2d+1} * d * log2(log2 n) / n.
    pub fn new(dim: usize, n: f64) -> EdgeClassPolicy {
        assert!(dim >= 1 && n >= 2.0);
        let zeta = f64::powi(2.0, 2 * dim as i32 + 1) * dim as f64 * n.log2().log2() / n;
        EdgeClassPolicy { dim, n, zeta }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub max: usize,
    pub mean: f64,
    pub histogram: BTreeMap<usize, usize>,
}

/// Exact degree statistics; mean is 2|E|/n, zero on the empty graph.
pub fn degree_stats(g: &Graph) -> DegreeStats {
    let n = g.len();
    let mut histogram = BTreeMap::new();
    let mut max = 0;
    let mut total = 0usize;
    for v in 1..=n as u32 {
        let d = g.degree(v);
        *histogram.entry(d).or_insert(0) += 1;
        max = max.max(d);
        total += d;
    }
    let mean = if n == 0 { 0.0 } else { total as f64 / n as f64 };
    DegreeStats { max, mean, histogram }
}

/// Triangle count through every vertex, by sorted-adjacency
/// intersection over the edges; each triangle adds one at each of its
/// corners, so the graph total is sum / 3.
pub fn triangles_per_vertex(g: &Graph) -> Vec<usize> {
    let n = g.len();
    let mut counts = vec![0usize; n];
    for (a, b) in g.edges() {
        let na = g.neighbors(a);
        let nb = g.neighbors(b);
        let (mut i, mut j) = (0, 0);
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    counts[na[i] as usize - 1] += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    counts
}

/// Number of edges of G with both endpoints in N(v).
pub fn neighborhood_edge_count(g: &Graph, v: u32) -> usize {
    let nv = g.neighbors(v);
    let mut count = 0;
    for (i, &a) in nv.iter().enumerate() {
        let na = g.neighbors(a);
        for &b in &nv[i + 1..] {
            if na.binary_search(&b).is_ok() {
                count += 1;
            }
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeClassification {
    /// Edges with spanned volume strictly above zeta.
    pub far: Vec<(u32, u32)>,
    /// Everything else, volume exactly zeta included.
    pub close: Vec<(u32, u32)>,
    /// Far-edge count at each vertex, indexed by label - 1.
    pub far_per_vertex: Vec<usize>,
}

/// Exact far/close partition of the edges of a graph built on P.
pub fn classify_edges(p: &PointSet, g: &Graph, policy: &EdgeClassPolicy) -> EdgeClassification {
    assert_eq!(p.dim(), policy.dim, "policy dimension mismatch");
    assert_eq!(p.len(), g.len(), "graph not built on this point set");
    let mut far = Vec::new();
    let mut close = Vec::new();
    let mut far_per_vertex = vec![0usize; p.len()];
    for (a, b) in g.edges() {
        if rect_volume(p.point(a), p.point(b)) > policy.zeta {
            far.push((a, b));
            far_per_vertex[a as usize - 1] += 1;
            far_per_vertex[b as usize - 1] += 1;
        } else {
            close.push((a, b));
        }
    }
    EdgeClassification { far, close, far_per_vertex }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliqueBound {
    Exact(usize),
    ExceedsCap,
}

/// Branch-and-bound maximum clique, exact up to `cap` vertices; a
/// clique of cap + 1 stops the search and reports the budget breach.
/// The cap must stay at most 8.
pub fn max_clique_upto(g: &Graph, cap: usize) -> CliqueBound {
    assert!((1..=8).contains(&cap), "cap must lie in 1..=8");
    let n = g.len();
    if n == 0 {
        return CliqueBound::Exact(0);
    }
    let mut order: Vec<u32> = (1..=n as u32).collect();
    order.sort_unstable_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    let mut best = 1usize;
    for (i, &v) in order.iter().enumerate() {
        if g.degree(v) + 1 <= best {
            // Later vertices have no larger degree, so nothing improves.
            break;
        }
        let cand: Vec<u32> =
            order[i + 1..].iter().copied().filter(|&u| g.has_edge(v, u)).collect();
        if grow_clique(g, &cand, 1, cap, &mut best) {
            return CliqueBound::ExceedsCap;
        }
    }
    CliqueBound::Exact(best)
}

/// Extends a clique of the given size over the candidate set; returns
/// true as soon as any clique reaches cap + 1.
fn grow_clique(g: &Graph, cand: &[u32], size: usize, cap: usize, best: &mut usize) -> bool {
    if size > cap {
        return true;
    }
    if size > *best {
        *best = size;
    }
    if size + cand.len() <= *best {
        return false;
    }
    for (i, &v) in cand.iter().enumerate() {
        let next: Vec<u32> =
            cand[i + 1..].iter().copied().filter(|&u| g.has_edge(v, u)).collect();
        if grow_clique(g, &next, size + 1, cap, best) {
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringResult {
    /// Color of each vertex, indexed by label - 1.
    pub assignment: Vec<usize>,
    pub count: usize,
}

impl ColoringResult {
    pub fn color(&self, v: u32) -> usize {
        self.assignment[v as usize - 1]
    }

    /// True iff no edge is monochromatic.
    pub fn is_proper(&self, g: &Graph) -> bool {
        g.edges().iter().all(|&(a, b)| self.color(a) != self.color(b))
    }
}

/// Sequential coloring in the given order, smallest available color
/// first. Panics unless `order` is a permutation of the labels.
pub fn greedy_coloring(g: &Graph, order: &[u32]) -> ColoringResult {
    let n = g.len();
    assert_eq!(order.len(), n, "order must cover every label");
    let mut seen = vec![false; n + 1];
    for &v in order {
        assert!(v >= 1 && v as usize <= n && !seen[v as usize], "order is not a permutation");
        seen[v as usize] = true;
    }
    let mut assignment = vec![usize::MAX; n];
    let mut count = 0;
    let mut blocked = Vec::new();
    for &v in order {
        blocked.clear();
        blocked.resize(count + 1, false);
        for &u in g.neighbors(v) {
            let c = assignment[u as usize - 1];
            if c != usize::MAX {
                blocked[c] = true;
            }
        }
        let c = (0..).find(|&c| !blocked[c]).unwrap();
        assignment[v as usize - 1] = c;
        count = count.max(c + 1);
    }
    ColoringResult { assignment, count }
}

/// DSatur: color the vertex seeing the most distinct neighbor colors,
/// breaking ties by higher degree, then lower label.
pub fn dsatur_coloring(g: &Graph) -> ColoringResult {
    let n = g.len();
    let mut assignment = vec![usize::MAX; n];
    let mut neighbor_colors: Vec<std::collections::HashSet<usize>> =
        vec![std::collections::HashSet::new(); n];
    let mut count = 0;
    let mut blocked = Vec::new();
    for _ in 0..n {
        let v = (1..=n as u32)
            .filter(|&v| assignment[v as usize - 1] == usize::MAX)
            .max_by(|&a, &b| {
                let sat = neighbor_colors[a as usize - 1]
                    .len()
                    .cmp(&neighbor_colors[b as usize - 1].len());
                sat.then(g.degree(a).cmp(&g.degree(b))).then(b.cmp(&a))
            })
            .unwrap();
        blocked.clear();
        blocked.resize(count + 1, false);
        for &c in &neighbor_colors[v as usize - 1] {
            blocked[c] = true;
        }
        let c = (0..).find(|&c| !blocked[c]).unwrap();
        assignment[v as usize - 1] = c;
        count = count.max(c + 1);
        for &u in g.neighbors(v) {
            neighbor_colors[u as usize - 1].insert(c);
        }
    }
    ColoringResult { assignment, count }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsStrategy {
    MinDegreeGreedy,
    RandomPermutation { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentSetResult {
    /// Members, ascending by label.
    pub vertices: Vec<u32>,
}

impl IndependentSetResult {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_independent(&self, g: &Graph) -> bool {
        self.vertices.iter().enumerate().all(|(i, &a)| {
            self.vertices[i + 1..].iter().all(|&b| !g.has_edge(a, b))
        })
    }
}

/// Constructs an independent set. Min-degree-greedy repeatedly takes a
/// vertex of least residual degree (lowest label on ties) and deletes
/// its closed neighborhood. Random-permutation draws one uniform
/// permutation and keeps the vertices that precede all their neighbors.
pub fn independent_set(g: &Graph, strategy: IsStrategy) -> IndependentSetResult {
    let n = g.len();
    let mut vertices = Vec::new();
    match strategy {
        IsStrategy::MinDegreeGreedy => {
            let mut alive = vec![true; n + 1];
            let mut degree: Vec<usize> = (0..=n as u32)
                .map(|v| if v == 0 { 0 } else { g.degree(v) })
                .collect();
            let mut remaining = n;
            while remaining > 0 {
                let v = (1..=n as u32)
                    .filter(|&v| alive[v as usize])
                    .min_by_key(|&v| (degree[v as usize], v))
                    .unwrap();
                vertices.push(v);
                alive[v as usize] = false;
                remaining -= 1;
                for &u in g.neighbors(v) {
                    if alive[u as usize] {
                        alive[u as usize] = false;
                        remaining -= 1;
                        for &w in g.neighbors(u) {
                            if alive[w as usize] {
                                degree[w as usize] -= 1;
                            }
                        }
                    }
                }
            }
            vertices.sort_unstable();
        }
        IsStrategy::RandomPermutation { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<u32> = (1..=n as u32).collect();
            perm.shuffle(&mut rng);
            let mut position = vec![0usize; n + 1];
            for (i, &v) in perm.iter().enumerate() {
                position[v as usize] = i;
            }
            for v in 1..=n as u32 {
                let pv = position[v as usize];
                if g.neighbors(v).iter().all(|&u| pv < position[u as usize]) {
                    vertices.push(v);
                }
            }
        }
    }
    IndependentSetResult { vertices }
}

/// Caro-Wei lower bound on the independence number, the exact expected
/// size of the random-permutation construction.
pub fn caro_wei_bound(g: &Graph) -> f64 {
    (1..=g.len() as u32).map(|v| 1.0 / (g.degree(v) as f64 + 1.0)).sum()
}
