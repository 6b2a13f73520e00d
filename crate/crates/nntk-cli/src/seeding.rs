//! Seed derivation for sweep cells: run `r` uses `seed0 ^ splitmix64(r+1)`,
//! so per-run streams are decorrelated while the whole sweep stays a pure
//! function of `seed0`.

/// The splitmix64 mixing function (Steele, Lea, Flood 2014): the standard
/// 64-bit finalizer used to expand one seed into decorrelated streams.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run index `run` under base seed `seed0`.
pub fn mix_seed(seed0: u64, run: u64) -> u64 {
    seed0 ^ splitmix64(run.wrapping_add(1))
}
