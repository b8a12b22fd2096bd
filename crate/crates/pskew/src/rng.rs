//! Deterministic pseudorandom generation for validation suites.
//!
//! SplitMix64 (Steele, Lea, Flood 2014): `state += 0x9E3779B97F4A7C15`,
//! then two xor-shift-multiply mixing rounds. The algorithm is frozen here
//! so that a recorded seed reproduces every random instance byte for byte,
//! across releases and across reimplementations.

use crate::scalar::Rat;
use num_bigint::BigInt;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn i64_in(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// Small nonzero rational with numerator in `[-9, 9]` and denominator
    /// in `[1, 9]`.
    pub fn rat(&mut self) -> Rat {
        let mut num = self.i64_in(-9, 9);
        if num == 0 {
            num = 1;
        }
        let den = self.i64_in(1, 9);
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    /// Positive rational in `(0, 10)`.
    pub fn pos_rat(&mut self) -> Rat {
        let num = self.i64_in(1, 9);
        let den = self.i64_in(1, 9);
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    /// Strictly increasing positive rational nodes, pairwise distinct,
    /// none equal to 1 (some kernels divide by `1 - x`).
    pub fn nodes(&mut self, count: usize) -> Vec<Rat> {
        let mut acc = Vec::with_capacity(count);
        let mut last = Rat::new(BigInt::from(1), BigInt::from(7));
        for _ in 0..count {
            let step = Rat::new(BigInt::from(self.i64_in(1, 9)), BigInt::from(self.i64_in(1, 4)));
            last += step;
            if last == Rat::from_integer(BigInt::from(1)) {
                last += Rat::new(BigInt::from(1), BigInt::from(3));
            }
            acc.push(last.clone());
        }
        acc
    }

    pub fn f64_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}
