//! Seed splitting for independent, reproducible sampling streams.
//!
//! Stream `i` of master seed `s` is seeded with `splitmix64(s + i * GOLDEN)`,
//! where `GOLDEN` is the 64-bit golden-ratio increment. Experiments use
//! `2 * iteration` for the sampling stream and `2 * iteration + 1` for the
//! per-iteration Haar unitary.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn split_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_mul(GOLDEN)))
}

pub fn sampling_seed(master: u64, iteration: usize) -> u64 {
    split_seed(master, 2 * iteration as u64)
}

pub fn unitary_seed(master: u64, iteration: usize) -> u64 {
    split_seed(master, 2 * iteration as u64 + 1)
}
