//! Self-contained pseudo-random generator for synthetic data and tests.
//!
//! The generator is xoshiro256++ seeded through SplitMix64, spelled out here
//! so that a given seed yields the same byte stream on every platform and in
//! any reimplementation of the fixtures (the algorithm is fully specified by
//! Blackman & Vigna's published reference code).

/// xoshiro256++ with SplitMix64 seeding.
#[derive(Debug, Clone)]
pub struct Xoshiro256 {
    state: [u64; 4],
}

impl Xoshiro256 {
    pub fn new(seed: u64) -> Self {
        // SplitMix64 expansion of the seed into the four state words.
        let mut sm = seed;
        let mut next_sm = || {
            sm = sm.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = sm;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        let state = [next_sm(), next_sm(), next_sm(), next_sm()];
        Xoshiro256 { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1): 53 high bits of the next word.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in [0, n). Uses rejection to avoid modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal via the inverse-CDF transform (one uniform per draw,
    /// which keeps the stream layout independent of the draw's value).
    pub fn normal(&mut self) -> f64 {
        // next_f64 is in [0, 1); shift to (0, 1) to stay in the quantile domain.
        let u = (self.next_u64() >> 11) as f64 + 0.5;
        crate::econ::special::normal_quantile(u * (1.0 / (1u64 << 53) as f64))
            .expect("u in (0,1)")
    }
}
