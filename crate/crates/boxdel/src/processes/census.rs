//! Census of empty and viable dyadic boxes, one row per weight class.
//!
//! A box of index (i_1..i_d) is empty when no point falls in it and
//! viable when its shift (i_1+1..i_d+1) is empty. Each weight class I
//! carries the bound 2^{I+3} log2(n) / n on how many empty boxes a
//! typical instance may show; the census only counts, callers decide
//! what a violation means.

use std::collections::HashSet;

use crate::points::{boxes_of_weight, PointSet};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightClassRow {
    pub weight: u32,
    pub total: u64,
    pub empty: u64,
    pub viable: u64,
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct BoxCensus {
    pub dim: usize,
    pub intensity: f64,
    pub rows: Vec<WeightClassRow>,
}

/// C(n, k) without overflow for the small arguments used here.
fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

impl BoxCensus {
    pub fn row(&self, weight: u32) -> Option<&WeightClassRow> {
        self.rows.iter().find(|r| r.weight == weight)
    }

    /// Rows of weight at most log2(n) - 2 log2(log2(n)) whose empty
    /// count exceeds the threshold.
    pub fn claim_violations(&self) -> Vec<u32> {
        let bound = self.intensity.log2() - 2.0 * self.intensity.log2().log2();
        self.rows
            .iter()
            .filter(|r| (r.weight as f64) <= bound && (r.empty as f64) > r.threshold)
            .map(|r| r.weight)
            .collect()
    }
}

/// Buckets the points once by dyadic index and tallies every weight
/// class from d to ceil(log2 n) + 2d. The intensity is the sampling
/// rate, which for a fixed-size set is its cardinality.
pub fn empty_box_census(p: &PointSet, intensity: f64) -> BoxCensus {
    let d = p.dim();
    assert!(d >= 1, "census needs at least one axis");
    assert!(intensity >= 2.0, "intensity too small to set a weight range");
    let occupied: HashSet<Vec<u32>> = p
        .labels()
        .map(|l| p.dyadic_index_of(l).exponents)
        .collect();
    let top = intensity.log2().ceil() as u32 + 2 * d as u32;
    let log2n = intensity.log2();
    let mut rows = Vec::new();
    for weight in d as u32..=top {
        let total = binomial(weight as u64 - 1, d as u64 - 1);
        let mut empty = 0u64;
        let mut viable = 0u64;
        for index in boxes_of_weight(weight, d) {
            if !occupied.contains(&index.exponents) {
                empty += 1;
            }
            if !occupied.contains(&index.shifted_up().exponents) {
                viable += 1;
            }
        }
        let threshold = f64::powi(2.0, weight as i32 + 3) * log2n / intensity;
        rows.push(WeightClassRow { weight, total, empty, viable, threshold });
    }
    BoxCensus { dim: d, intensity, rows }
}
