//! Labeled point sets in the unit cube, their sampling, and the
//! geometric primitives of the model.
//!
//! Coordinates are prefixes of per-point per-axis digit streams; the
//! f64 views drive all geometry, while revelation processes extend the
//! streams bit by bit. General position is enforced at sampling time by
//! resampling any coordinate that collides with an earlier one on the
//! same axis, and points touching 0 or 1 are resampled the same way.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::rng::{coord_seed, mix64, DigitStream};
use crate::{Error, Result};

const POISSON_SALT: u64 = 0x706F_6973_736F_6E21;

/// Labeled points p_1..p_n in (0,1)^d. Labels are 1-based. Sampled
/// sets carry the digit streams behind every coordinate; sets built
/// from plain coordinates do not and cannot feed revelation processes.
#[derive(Debug, Clone)]
pub struct PointSet {
    dim: usize,
    /// Row-major coordinate views: values[(label-1)*dim + axis].
    values: Vec<f64>,
    streams: Option<Vec<DigitStream>>,
    /// Radix of the L-ary overlay ruling each axis order, if revealed.
    axis_overlay: Vec<Option<u32>>,
    seed: Option<u64>,
}

impl PointSet {
    /// Draws n points i.i.d. uniform on the cube, coordinates produced
    /// through the digit-stream mechanism, general position enforced.
    pub fn sample_uniform(n: usize, dim: usize, seed: u64) -> PointSet {
        assert!(dim >= 1, "dimension must be at least 1");
        let mut values = vec![0.0; n * dim];
        let mut streams = Vec::with_capacity(n * dim);
        let mut seen: Vec<HashSet<u64>> = vec![HashSet::new(); dim];
        for label in 1..=n as u32 {
            for axis in 0..dim {
                let mut attempt = 0;
                let stream = loop {
                    let s = DigitStream::new(coord_seed(seed, label, axis as u32, attempt));
                    let v = s.f64_view();
                    if v > 0.0 && v < 1.0 && seen[axis].insert(v.to_bits()) {
                        break s;
                    }
                    attempt += 1;
                    assert!(attempt < 256, "resampling never settled; defective seed mix");
                };
                values[(label as usize - 1) * dim + axis] = stream.f64_view();
                streams.push(stream);
            }
        }
        PointSet {
            dim,
            values,
            streams: Some(streams),
            axis_overlay: vec![None; dim],
            seed: Some(seed),
        }
    }

    /// Poissonised variant: the point count is Poisson(intensity) and,
    /// given the count, points are i.i.d. uniform.
    pub fn sample_poissonised(intensity: f64, dim: usize, seed: u64) -> PointSet {
        assert!(intensity >= 0.0 && intensity.is_finite(), "intensity must be finite and >= 0");
        let count = if intensity == 0.0 {
            0
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(mix64(seed ^ POISSON_SALT));
            Poisson::new(intensity).expect("valid intensity").sample(&mut rng) as usize
        };
        PointSet::sample_uniform(count, dim, seed)
    }

    /// Builds a set from explicit coordinates, re-verifying every
    /// invariant. The result carries no digit streams.
    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<PointSet> {
        if dim < 1 {
            return Err(Error::InvalidPointSet("dimension must be at least 1".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        let mut seen: Vec<HashSet<u64>> = vec![HashSet::new(); dim];
        for (row, point) in rows.iter().enumerate() {
            if point.len() != dim {
                return Err(Error::InvalidPointSet(format!(
                    "point {} has {} coordinates, expected {dim}",
                    row + 1,
                    point.len()
                )));
            }
            for (axis, &v) in point.iter().enumerate() {
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::InvalidPointSet(format!(
                        "coordinate {v} of point {} lies outside (0,1)",
                        row + 1
                    )));
                }
                if !seen[axis].insert(v.to_bits()) {
                    return Err(Error::InvalidPointSet(format!(
                        "two points share value {v} on axis {axis}"
                    )));
                }
                values.push(v);
            }
        }
        Ok(PointSet { dim, values, streams: None, axis_overlay: vec![None; dim], seed: None })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// All labels, ascending.
    pub fn labels(&self) -> impl Iterator<Item = u32> {
        1..=self.len() as u32
    }

    pub fn point(&self, label: u32) -> &[f64] {
        let i = self.offset(label);
        &self.values[i..i + self.dim]
    }

    pub fn coord(&self, label: u32, axis: usize) -> f64 {
        debug_assert!(axis < self.dim);
        self.values[self.offset(label) + axis]
    }

    fn offset(&self, label: u32) -> usize {
        assert!(label >= 1 && label as usize <= self.len(), "unknown label {label}");
        (label as usize - 1) * self.dim
    }

    pub fn has_streams(&self) -> bool {
        self.streams.is_some()
    }

    /// Mutable digit stream of one coordinate. Panics on sets built
    /// from plain coordinates; revelation needs sampled sets.
    pub fn stream_mut(&mut self, label: u32, axis: usize) -> &mut DigitStream {
        let i = self.offset(label) + axis;
        &mut self.streams.as_mut().expect("point set carries no digit streams")[i]
    }

    /// Declares that axis order is now read from L-ary overlay digits
    /// of the given radix rather than from the f64 views.
    pub fn set_axis_overlay(&mut self, axis: usize, radix: u32) {
        assert!(axis < self.dim);
        assert!(self.streams.is_some(), "overlays need digit streams");
        match self.axis_overlay[axis] {
            None => self.axis_overlay[axis] = Some(radix),
            Some(r) => assert_eq!(r, radix, "axis {axis} already ruled by radix {r}"),
        }
    }

    pub fn axis_overlay(&self, axis: usize) -> Option<u32> {
        self.axis_overlay[axis]
    }

    /// Order of two points along one axis: overlay digit order where an
    /// overlay has been revealed, f64 view order otherwise. Extends
    /// streams lazily until tied overlay digits separate.
    pub fn axis_cmp(&mut self, a: u32, b: u32, axis: usize) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        match self.axis_overlay[axis] {
            None => self.coord(a, axis).partial_cmp(&self.coord(b, axis)).unwrap(),
            Some(radix) => {
                let ia = self.offset(a) + axis;
                let ib = self.offset(b) + axis;
                let streams = self.streams.as_mut().unwrap();
                let (sa, sb) = pair_mut(streams, ia, ib);
                DigitStream::lary_cmp(sa, sb, radix)
            }
        }
    }

    /// Componentwise strict dominance of the first `dims` axes, under
    /// the per-axis order of `axis_cmp`.
    pub fn dominates_labels(&mut self, a: u32, b: u32, dims: usize) -> bool {
        debug_assert!(dims >= 1 && dims <= self.dim);
        (0..dims).all(|axis| self.axis_cmp(a, b, axis) == Ordering::Less)
    }

    pub fn dyadic_index_of(&self, label: u32) -> DyadicIndex {
        dyadic_index(self.point(label))
    }

    /// Writes the set in the text interchange format: a "d n" header,
    /// then one line of 17-significant-digit coordinates per point.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{} {}", self.dim, self.len())?;
        for label in 1..=self.len() as u32 {
            let row: Vec<String> =
                self.point(label).iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the text interchange format and re-verifies invariants.
    pub fn load(path: &Path) -> Result<PointSet> {
        let file = std::fs::File::open(path)?;
        let mut lines = std::io::BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })??;
        let mut parts = header.split_whitespace();
        let dim: usize = parse_field(&mut parts, 1, "dimension")?;
        let n: usize = parse_field(&mut parts, 1, "point count")?;
        let mut rows = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>().map_err(|e| Error::Parse {
                        line: i + 2,
                        msg: format!("bad coordinate {t:?}: {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::InvalidPointSet(format!(
                "header promises {n} points, file holds {}",
                rows.len()
            )));
        }
        PointSet::from_rows(dim, &rows)
    }
}

/// Two distinct mutable elements of one slice.
fn pair_mut<T>(slice: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    assert_ne!(i, j);
    if i < j {
        let (lo, hi) = slice.split_at_mut(j);
        (&mut lo[i], &mut hi[0])
    } else {
        let (lo, hi) = slice.split_at_mut(i);
        (&mut hi[0], &mut lo[j])
    }
}

fn parse_field<'a, T: std::str::FromStr>(
    parts: &mut impl Iterator<Item = &'a str>,
    line: usize,
    what: &str,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let token = parts
        .next()
        .ok_or_else(|| Error::Parse { line, msg: format!("missing {what}") })?;
    token
        .parse()
        .map_err(|e| Error::Parse { line, msg: format!("bad {what} {token:?}: {e}") })
}

/// Open axis-parallel box spanned by two points: the set of z with
/// min(x_k,y_k) < z_k < max(x_k,y_k) on every axis.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenRect {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

/// Spans the open rectangle of two points. Panics when dimensions
/// differ or the points share a value on some axis.
pub fn open_rect(x: &[f64], y: &[f64]) -> OpenRect {
    assert_eq!(x.len(), y.len(), "dimension mismatch");
    let mut lo = Vec::with_capacity(x.len());
    let mut hi = Vec::with_capacity(x.len());
    for (&a, &b) in x.iter().zip(y) {
        assert!(a != b, "degenerate spanning pair: equal value {a} on some axis");
        lo.push(a.min(b));
        hi.push(a.max(b));
    }
    OpenRect { lo, hi }
}

/// Strict-interior membership on every axis.
pub fn rect_contains(r: &OpenRect, z: &[f64]) -> bool {
    assert_eq!(r.lo.len(), z.len(), "dimension mismatch");
    z.iter().enumerate().all(|(k, &v)| r.lo[k] < v && v < r.hi[k])
}

/// Componentwise strict dominance p ≺ q.
pub fn dominates(p: &[f64], q: &[f64]) -> bool {
    assert_eq!(p.len(), q.len(), "dimension mismatch");
    p.iter().zip(q).all(|(&a, &b)| a < b)
}

/// Volume of the open rectangle of two points.
pub fn rect_volume(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "dimension mismatch");
    x.iter().zip(y).map(|(&a, &b)| (a - b).abs()).product()
}

/// Exponent tuple (i_1..i_d) of a dyadic box, all entries >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicIndex {
    pub exponents: Vec<u32>,
}

impl DyadicIndex {
    pub fn weight(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// Half-open box ∏_k [2^{-i_k}, 2^{-i_k+1}).
    pub fn contains(&self, x: &[f64]) -> bool {
        assert_eq!(x.len(), self.exponents.len(), "dimension mismatch");
        self.exponents
            .iter()
            .zip(x)
            .all(|(&i, &v)| exp2i(i) <= v && v < exp2i(i - 1))
    }

    /// The index shifted by +1 on every axis, whose emptiness decides
    /// viability of this box.
    pub fn shifted_up(&self) -> DyadicIndex {
        DyadicIndex { exponents: self.exponents.iter().map(|&i| i + 1).collect() }
    }
}

/// 2^{-i} exactly.
fn exp2i(i: u32) -> f64 {
    f64::powi(0.5, i as i32)
}

/// The unique exponent tuple with 2^{-i_k} <= x_k < 2^{-i_k+1} on every
/// axis. Panics when a coordinate leaves (0,1).
pub fn dyadic_index(x: &[f64]) -> DyadicIndex {
    let exponents = x
        .iter()
        .map(|&v| {
            assert!(v > 0.0 && v < 1.0, "coordinate {v} outside (0,1)");
            let mut i = (-v.log2()).ceil() as i64;
            i = i.max(1);
            while exp2i(i as u32) > v {
                i += 1;
            }
            while v >= exp2i(i as u32 - 1) {
                i -= 1;
            }
            debug_assert!(i >= 1);
            i as u32
        })
        .collect();
    DyadicIndex { exponents }
}

/// All exponent tuples with positive entries of total weight I, in
/// lexicographic order; empty when I < d.
pub fn boxes_of_weight(weight: u32, dim: usize) -> Vec<DyadicIndex> {
    assert!(dim >= 1);
    let mut out = Vec::new();
    let mut current = vec![0u32; dim];
    fill_compositions(weight, 0, &mut current, &mut out);
    out
}

fn fill_compositions(rest: u32, axis: usize, current: &mut Vec<u32>, out: &mut Vec<DyadicIndex>) {
    let dim = current.len();
    let remaining_axes = (dim - axis) as u32;
    if rest < remaining_axes {
        return;
    }
    if axis == dim - 1 {
        current[axis] = rest;
        out.push(DyadicIndex { exponents: current.clone() });
        return;
    }
    for v in 1..=rest - (remaining_axes - 1) {
        current[axis] = v;
        fill_compositions(rest - v, axis + 1, current, out);
    }
}
