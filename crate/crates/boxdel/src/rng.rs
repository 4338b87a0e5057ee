//! Seed derivation and lazily extendable per-coordinate digit streams.
//!
//! Every coordinate of every sampled point is a prefix of an endless
//! fair-bit stream produced by a ChaCha8 generator keyed by the point-set
//! seed, the point label, and the axis. The first 64 bits give the f64
//! view used by the geometric primitives; revelation processes read
//! further bits, or regrouped L-ary digits, without disturbing anything
//! already revealed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bijective 64-bit mixer (the SplitMix64 finalizer).
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of record for one trial of a multi-trial run.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    mix64(master ^ mix64(trial.wrapping_add(1)))
}

/// Seed for the digit stream backing coordinate `axis` of point `label`.
/// `attempt` bumps the stream when resampling restores general position.
pub fn coord_seed(set_seed: u64, label: u32, axis: u32, attempt: u32) -> u64 {
    debug_assert!(axis < 1 << 16 && attempt < 1 << 8);
    mix64(set_seed ^ mix64(((label as u64) << 24) | ((axis as u64) << 8) | attempt as u64))
}

/// One coordinate as an endless binary expansion 0.b_0 b_1 b_2 ...
/// materialized in 64-bit blocks on demand. Bit 0 is the most
/// significant fractional bit. An optional L-ary overlay regroups the
/// bits from index 64 on into uniform digits of a fixed radix.
#[derive(Debug, Clone)]
pub struct DigitStream {
    seed: u64,
    blocks: Vec<u64>,
    lary: Option<LaryDigits>,
}

#[derive(Debug, Clone)]
struct LaryDigits {
    radix: u32,
    digits: Vec<u32>,
    /// Index of the next unread bit, counted over the whole stream.
    cursor: u64,
}

/// First bit index available to L-ary overlays; bits below this belong
/// to the f64 view.
const LARY_BASE_BIT: u64 = 64;

impl DigitStream {
    pub fn new(seed: u64) -> Self {
        let mut s = DigitStream { seed, blocks: Vec::new(), lary: None };
        s.ensure_blocks(1);
        s
    }

    fn ensure_blocks(&mut self, count: usize) {
        if self.blocks.len() >= count {
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos((2 * self.blocks.len()) as u128);
        while self.blocks.len() < count {
            self.blocks.push(rng.next_u64());
        }
    }

    /// The coordinate rounded to f64, in [0, 1]. Rounding of the first
    /// block is monotone in the block value, so view order never
    /// contradicts stream order.
    pub fn f64_view(&self) -> f64 {
        self.blocks[0] as f64 * (1.0 / 18_446_744_073_709_551_616.0)
    }

    /// The first block verbatim; two streams have equal views of every
    /// prefix up to 64 bits iff these are equal.
    pub fn head_block(&self) -> u64 {
        self.blocks[0]
    }

    /// Binary digit at `index` (0-based from the radix point).
    pub fn bit(&mut self, index: u64) -> u32 {
        let block = (index / 64) as usize;
        self.ensure_blocks(block + 1);
        ((self.blocks[block] >> (63 - index % 64)) & 1) as u32
    }

    /// The first `count` bits packed into a u64, high bit first.
    /// `count` must be at most 64.
    pub fn prefix(&mut self, count: u32) -> u64 {
        assert!(count <= 64, "prefix wider than one block");
        if count == 0 {
            return 0;
        }
        self.ensure_blocks(1);
        self.blocks[0] >> (64 - count)
    }

    /// Digit `m` (1-based) of the L-ary overlay of radix `radix`.
    /// Digits are uniform on 0..radix: exact regrouping when the radix
    /// is a power of two, rejection sampling on ceil(log2 radix)-bit
    /// blocks otherwise. A stream keeps one overlay radix for life.
    pub fn lary_digit(&mut self, radix: u32, m: usize) -> u32 {
        assert!(radix >= 2, "radix must be at least 2");
        assert!(m >= 1, "digit positions are 1-based");
        if self.lary.is_none() {
            self.lary = Some(LaryDigits { radix, digits: Vec::new(), cursor: LARY_BASE_BIT });
        }
        let radix_seen = self.lary.as_ref().unwrap().radix;
        assert_eq!(radix_seen, radix, "stream already carries an overlay of another radix");
        let width = 32 - (radix - 1).leading_zeros();
        while self.lary.as_ref().unwrap().digits.len() < m {
            let cursor = self.lary.as_ref().unwrap().cursor;
            let mut value = 0u32;
            for offset in 0..width as u64 {
                value = value << 1 | self.bit(cursor + offset);
            }
            let lary = self.lary.as_mut().unwrap();
            lary.cursor += width as u64;
            if value < radix {
                lary.digits.push(value);
            }
        }
        self.lary.as_ref().unwrap().digits[m - 1]
    }

    /// Number of overlay digits materialized so far, with their radix.
    pub fn lary_len(&self) -> Option<(u32, usize)> {
        self.lary.as_ref().map(|l| (l.radix, l.digits.len()))
    }

    /// Compares the overlay digit sequences of two streams as infinite
    /// words, extending both lazily until they differ.
    pub fn lary_cmp(a: &mut DigitStream, b: &mut DigitStream, radix: u32) -> std::cmp::Ordering {
        for m in 1.. {
            let da = a.lary_digit(radix, m);
            let db = b.lary_digit(radix, m);
            if da != db {
                return da.cmp(&db);
            }
        }
        unreachable!()
    }
}
