//! Shrinking-sweep exploration of the lower-left corner and the cover
//! check for its trace.
//!
//! For every exponent tuple (i_1..i_{d-1}) in {1..m}^{d-1}, the sweep
//! starts at S' = the largest S of any strictly preceding tuple and
//! looks for the point with least last coordinate inside the closed
//! prefix box [0,2^{-i_1}]x...x[0,2^{-i_{d-1}}] beyond S'. The cover
//! check confirms that every corner-visible point is either such a
//! witness or lies in one of the slabs (R(j-1) \ R(j)) x (S'(j), S(j)].

use std::collections::HashSet;

use crate::points::PointSet;

/// Sweep state over all index tuples: S', S, and the witness label.
/// T = S - S' is derived on demand.
#[derive(Debug, Clone)]
pub struct ExplorationTrace {
    dim: usize,
    cap: usize,
    s_prime: Vec<f64>,
    s: Vec<f64>,
    witness: Vec<Option<u32>>,
}

/// 2 * ceil(3 log2 n), the cap that exhausts the sweep with high
/// probability at intensity n.
pub fn default_cap(intensity: f64) -> usize {
    assert!(intensity >= 2.0);
    2 * (3.0 * intensity.log2()).ceil() as usize
}

/// 2^{-i} exactly.
fn exp2i(i: u32) -> f64 {
    f64::powi(0.5, i as i32)
}

impl ExplorationTrace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn strides(&self) -> Vec<usize> {
        let k = self.dim - 1;
        let mut strides = vec![1usize; k];
        for i in (0..k.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.cap;
        }
        strides
    }

    /// Flat index of a tuple with entries in 1..=cap.
    pub fn index(&self, tuple: &[u32]) -> usize {
        assert_eq!(tuple.len(), self.dim - 1, "tuple arity mismatch");
        assert!(tuple.iter().all(|&i| i >= 1 && i as usize <= self.cap), "tuple entry out of range");
        tuple.iter().fold(0usize, |acc, &i| acc * self.cap + (i as usize - 1))
    }

    /// All tuples in lexicographic order.
    pub fn tuples(&self) -> Vec<Vec<u32>> {
        let arity = self.dim - 1;
        let total = self.cap.pow(arity as u32);
        let mut out = Vec::with_capacity(total);
        let mut current = vec![1u32; arity];
        for _ in 0..total {
            out.push(current.clone());
            for k in (0..arity).rev() {
                if (current[k] as usize) < self.cap {
                    current[k] += 1;
                    break;
                }
                current[k] = 1;
            }
        }
        out
    }

    pub fn s(&self, tuple: &[u32]) -> f64 {
        self.s[self.index(tuple)]
    }

    pub fn s_prime(&self, tuple: &[u32]) -> f64 {
        self.s_prime[self.index(tuple)]
    }

    pub fn t(&self, tuple: &[u32]) -> f64 {
        let i = self.index(tuple);
        self.s[i] - self.s_prime[i]
    }

    pub fn witness(&self, tuple: &[u32]) -> Option<u32> {
        self.witness[self.index(tuple)]
    }

    pub fn witness_labels(&self) -> HashSet<u32> {
        self.witness.iter().flatten().copied().collect()
    }

    /// Tuples sitting at the cap on some axis whose sweep still found
    /// a point: evidence the cap was too small for this instance.
    pub fn cap_breaches(&self) -> Vec<Vec<u32>> {
        self.tuples()
            .into_iter()
            .filter(|t| {
                t.iter().any(|&i| i as usize == self.cap) && self.s(t) < 1.0
            })
            .collect()
    }
}

/// Runs the sweep over every tuple in lexicographic order. Requires
/// d >= 2 and cap >= 1; absent witnesses set S = 1.
pub fn sweep_exploration(p: &PointSet, cap: usize) -> ExplorationTrace {
    let d = p.dim();
    assert!(d >= 2, "sweep needs dimension at least 2");
    assert!(cap >= 1, "cap must be positive");
    let arity = d - 1;
    let total = cap
        .checked_pow(arity as u32)
        .filter(|&t| t <= 100_000_000)
        .expect("tuple space too large");
    let mut trace = ExplorationTrace {
        dim: d,
        cap,
        s_prime: vec![0.0; total],
        s: vec![1.0; total],
        witness: vec![None; total],
    };
    let strides = trace.strides();
    for (idx, tuple) in trace.tuples().iter().enumerate() {
        let mut sp = 0.0f64;
        for (k, &i) in tuple.iter().enumerate() {
            if i > 1 {
                sp = sp.max(trace.s[idx - strides[k]]);
            }
        }
        let mut best: Option<(f64, u32)> = None;
        'points: for label in p.labels() {
            let pt = p.point(label);
            for (k, &i) in tuple.iter().enumerate() {
                if pt[k] > exp2i(i) {
                    continue 'points;
                }
            }
            let last = pt[d - 1];
            if last > sp && best.map_or(true, |(b, _)| last < b) {
                best = Some((last, label));
            }
        }
        trace.s_prime[idx] = sp;
        match best {
            Some((value, label)) => {
                trace.s[idx] = value;
                trace.witness[idx] = Some(label);
            }
            None => {
                trace.s[idx] = 1.0;
                trace.witness[idx] = None;
            }
        }
    }
    trace
}

/// Labels of the corner-visible set X: points whose open box down to
/// the origin holds no other point, i.e. the dominance minima.
pub fn corner_visible(p: &PointSet) -> Vec<u32> {
    let d = p.dim();
    let mut order: Vec<u32> = p.labels().collect();
    order.sort_unstable_by(|&a, &b| p.coord(a, 0).partial_cmp(&p.coord(b, 0)).unwrap());
    let mut minima: Vec<u32> = Vec::new();
    'candidates: for &c in &order {
        for &m in &minima {
            if (0..d).all(|k| p.coord(m, k) < p.coord(c, k)) {
                continue 'candidates;
            }
        }
        minima.push(c);
    }
    minima.sort_unstable();
    minima
}

/// Returns the members of X that are neither sweep witnesses nor
/// inside the union of slabs (R(j-1) \ R(j)) x (S'(j), S(j)]; the
/// expected result is an empty list.
pub fn verify_cover_claim(trace: &ExplorationTrace, p: &PointSet) -> Vec<u32> {
    assert_eq!(trace.dim(), p.dim(), "trace built on another dimension");
    let d = p.dim();
    let arity = d - 1;
    let witnesses = trace.witness_labels();
    let mut violations = Vec::new();
    'members: for label in corner_visible(p) {
        if witnesses.contains(&label) {
            continue;
        }
        let x = p.point(label);
        // Largest admissible exponent per axis: x_k <= 2^{1-j_k}.
        let limits: Vec<u32> = (0..arity)
            .map(|k| {
                let mut j = 1u32;
                while x[k] <= exp2i(j) {
                    j += 1;
                }
                j.min(trace.cap() as u32)
            })
            .collect();
        let mut tuple = vec![1u32; arity];
        'search: loop {
            let outside_inner = (0..arity).any(|k| x[k] > exp2i(tuple[k]));
            if outside_inner {
                let idx = trace.index(&tuple);
                if trace.s_prime[idx] < x[d - 1] && x[d - 1] <= trace.s[idx] {
                    continue 'members;
                }
            }
            let mut k = arity;
            while k > 0 {
                k -= 1;
                if tuple[k] < limits[k] {
                    tuple[k] += 1;
                    continue 'search;
                }
                tuple[k] = 1;
            }
            violations.push(label);
            continue 'members;
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::PointSet;

    fn hand_instance() -> PointSet {
        PointSet::from_rows(
            2,
            &[vec![0.4, 0.2], vec![0.6, 0.1], vec![0.2, 0.5], vec![0.1, 0.9]],
        )
        .unwrap()
    }

    #[test]
    fn empty_set_sweeps_to_one_everywhere() {
        let p = PointSet::sample_uniform(0, 2, 3);
        let trace = sweep_exploration(&p, 5);
        for tuple in trace.tuples() {
            assert_eq!(trace.s(&tuple), 1.0);
            assert_eq!(trace.witness(&tuple), None);
        }
        assert!(trace.witness_labels().is_empty());
        assert!(verify_cover_claim(&trace, &p).is_empty());
    }

    #[test]
    fn hand_instance_sweep_values() {
        let p = hand_instance();
        let trace = sweep_exploration(&p, 4);
        assert_eq!(trace.s(&[1]), 0.2);
        assert_eq!(trace.s(&[2]), 0.5);
        assert_eq!(trace.s(&[3]), 0.9);
        assert_eq!(trace.s(&[4]), 1.0);
        assert_eq!(trace.witness(&[1]), Some(1));
        assert_eq!(trace.witness(&[2]), Some(3));
        assert_eq!(trace.witness(&[3]), Some(4));
        assert_eq!(trace.witness(&[4]), None);
        assert_eq!(trace.s_prime(&[1]), 0.0);
        assert_eq!(trace.s_prime(&[2]), 0.2);
        assert!((trace.t(&[2]) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn hand_instance_cover_holds() {
        let p = hand_instance();
        let trace = sweep_exploration(&p, 4);
        // All four points see the corner; label 2 is the only
        // non-witness and the first slab covers it.
        assert_eq!(corner_visible(&p), vec![1, 2, 3, 4]);
        assert!(verify_cover_claim(&trace, &p).is_empty());
    }

    #[test]
    fn s_is_monotone_and_bracketed() {
        for d in [2usize, 3] {
            let p = PointSet::sample_poissonised(500.0, d, 42 + d as u64);
            let cap = default_cap(500.0);
            let trace = sweep_exploration(&p, cap);
            let tuples = trace.tuples();
            assert_eq!(trace.s_prime(&vec![1; d - 1]), 0.0);
            for t in &tuples {
                let (sp, s) = (trace.s_prime(t), trace.s(t));
                assert!(0.0 <= sp && sp <= s && s <= 1.0);
                if trace.witness(t).is_none() {
                    assert_eq!(s, 1.0);
                }
            }
            for a in &tuples {
                for b in &tuples {
                    if a.iter().zip(b).all(|(x, y)| x <= y) {
                        assert!(trace.s(b) >= trace.s(a), "{a:?} {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn witness_boxes_are_empty_below_discovery() {
        let p = PointSet::sample_poissonised(800.0, 2, 7);
        let trace = sweep_exploration(&p, default_cap(800.0));
        for tuple in trace.tuples() {
            if let Some(w) = trace.witness(&tuple) {
                let wy = p.coord(w, 1);
                let sp = trace.s_prime(&tuple);
                for other in p.labels() {
                    if other == w {
                        continue;
                    }
                    let inside_prefix = (0..1).all(|k| p.coord(other, k) <= exp2i(tuple[k]));
                    let below = p.coord(other, 1) > sp && p.coord(other, 1) < wy;
                    assert!(!(inside_prefix && below), "witness {w} not minimal");
                }
            }
        }
    }

    #[test]
    fn cover_claim_holds_on_poissonised_trials() {
        for d in [2usize, 3] {
            for seed in 0..10 {
                let p = PointSet::sample_poissonised(1000.0, d, 100 + seed);
                let trace = sweep_exploration(&p, default_cap(1000.0));
                let violations = verify_cover_claim(&trace, &p);
                assert!(violations.is_empty(), "d {d} seed {seed}: {violations:?}");
            }
        }
    }

    #[test]
    fn tight_cap_is_flagged_not_fatal() {
        let p = PointSet::sample_uniform(200, 2, 9);
        let starved = sweep_exploration(&p, 1);
        assert!(!starved.cap_breaches().is_empty());
        let roomy = sweep_exploration(&p, default_cap(200.0));
        assert!(roomy.cap_breaches().is_empty());
    }

    #[test]
    fn default_cap_formula() {
        assert_eq!(default_cap(10_000.0), 80);
        assert_eq!(default_cap(65_536.0), 96);
    }
}
