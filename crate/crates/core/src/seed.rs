//! Counter-based seed derivation.
//!
//! Every random stream in the crate (optimizer restarts, simulation trials,
//! codebooks, bin assignments, channel noise) is keyed by a root seed plus a
//! path of integer tags, so the values drawn never depend on execution order
//! or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used under a trial seed.
pub mod tag {
    pub const TRIAL: u64 = 0x7472_6961_6c00_0001;
    pub const SOURCE: u64 = 0x736f_7572_6365_0002;
    pub const NOISE: u64 = 0x6e6f_6973_6500_0003;
    pub const CODEBOOK: u64 = 0x636f_6465_6200_0004;
    pub const BINS: u64 = 0x6269_6e73_0000_0005;
    pub const RESTART: u64 = 0x7265_7374_0000_0006;
    pub const WITNESS: u64 = 0x7769_746e_0000_0007;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `root` and a tag path.
pub fn derive(root: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(root), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

/// Deterministic RNG for a derived stream.
pub fn rng(root: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(root, path))
}
