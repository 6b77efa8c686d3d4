//! Counter-based random streams.
//!
//! A [`StreamKey`] is a 64-bit key that can be refined by integer tags
//! (replication, vertex, vertex pair, ...). Every random quantity in the
//! crate is a pure function of its key path, so results never depend on
//! iteration order or on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey(splitmix64(seed ^ 0x6772_6170_686f_6e21))
    }

    /// Child key for `tag`.
    #[inline]
    pub fn derive(self, tag: u64) -> Self {
        StreamKey(splitmix64(self.0 ^ splitmix64(tag.wrapping_mul(GOLDEN).wrapping_add(1))))
    }

    /// Key for the unordered vertex pair `{v, w}`.
    #[inline]
    pub fn pair(self, v: usize, w: usize) -> Self {
        let (a, b) = if v < w { (v, w) } else { (w, v) };
        self.derive(((a as u64) << 32) | b as u64)
    }

    /// A uniform draw in `[0, 1)` determined by the key alone.
    #[inline]
    pub fn uniform(self) -> f64 {
        (splitmix64(self.0) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A full generator seeded from the key, for quantities needing many draws.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(splitmix64(self.0 ^ GOLDEN))
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

/// Named sub-streams so different consumers of one seed never collide.
pub mod domain {
    pub const LABELS: u64 = 1;
    pub const EDGES: u64 = 2;
    pub const COUPLING: u64 = 3;
    pub const CHAOS: u64 = 4;
    pub const REPLICATION: u64 = 5;
}
