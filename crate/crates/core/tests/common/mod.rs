//! Catalog builders shared by the integration suites.

use num::BigRational;
use rand::Rng;
use spir_core::catalog::{ratio, validate_catalog, MessageMeta};
use spir_core::Catalog;

pub fn build(n_databases: u16, messages: &[(u64, i64, i64)]) -> Catalog {
    let metas = messages
        .iter()
        .enumerate()
        .map(|(i, &(length_bits, num, den))| MessageMeta {
            id: format!("m{}", i + 1),
            length_bits,
            prior: ratio(num, den),
        })
        .collect();
    validate_catalog(metas, n_databases).unwrap()
}

/// Two messages of 1024 and 256 bits on two databases.
pub fn ex1() -> Catalog {
    build(2, &[(1024, 1, 2), (256, 1, 2)])
}

/// Three messages of 8192, 2048 and 512 bits on four databases.
pub fn ex2() -> Catalog {
    build(4, &[(8192, 1, 3), (2048, 1, 3), (512, 1, 3)])
}

/// Two messages of 3000 and 1800 bits on four databases.
pub fn ex3() -> Catalog {
    build(4, &[(3000, 1, 2), (1800, 1, 2)])
}

/// Three messages of 400, 300 and 100 bits on three databases.
pub fn ex4() -> Catalog {
    build(3, &[(400, 1, 3), (300, 1, 3), (100, 1, 3)])
}

/// Splittable deterministic seed stream for parallel test bodies.
pub fn mix_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn random_priors(rng: &mut impl Rng, count: usize) -> Vec<BigRational> {
    let weights: Vec<i64> = (0..count).map(|_| rng.gen_range(1..=20)).collect();
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| ratio(w, total)).collect()
}

fn assemble(n_databases: u16, lengths: Vec<u64>, priors: Vec<BigRational>) -> Catalog {
    let metas = lengths
        .into_iter()
        .zip(priors)
        .enumerate()
        .map(|(i, (length_bits, prior))| MessageMeta {
            id: format!("m{}", i + 1),
            length_bits,
            prior,
        })
        .collect();
    validate_catalog(metas, n_databases).unwrap()
}

/// Catalog with every length a multiple of N^K, as the deterministic scheme
/// requires: 2 ≤ N ≤ 5, 1 ≤ K ≤ 5, lengths up to 2^14 bits.
pub fn random_deterministic_catalog(rng: &mut impl Rng) -> Catalog {
    let n = rng.gen_range(2..=5u16);
    let k = rng.gen_range(1..=5u32);
    let unit = (n as u64).pow(k);
    let max_multiplier = (1u64 << 14) / unit;
    let lengths: Vec<u64> =
        (0..k).map(|_| unit * rng.gen_range(1..=max_multiplier)).collect();
    let priors = random_priors(rng, k as usize);
    assemble(n, lengths, priors)
}

/// Catalog with every length a multiple of N−1, as the stochastic scheme
/// requires: same size ranges as the deterministic generator.
pub fn random_stochastic_catalog(rng: &mut impl Rng) -> Catalog {
    let n = rng.gen_range(2..=5u16);
    let k = rng.gen_range(1..=5u32);
    let unit = n as u64 - 1;
    let max_multiplier = (1u64 << 14) / unit;
    let lengths: Vec<u64> =
        (0..k).map(|_| unit * rng.gen_range(1..=max_multiplier)).collect();
    let priors = random_priors(rng, k as usize);
    assemble(n, lengths, priors)
}

/// Catalog with arbitrary lengths (no divisibility), for rate arithmetic.
pub fn random_catalog(rng: &mut impl Rng) -> Catalog {
    let n = rng.gen_range(2..=5u16);
    let k = rng.gen_range(1..=5usize);
    let lengths: Vec<u64> = if rng.gen_ratio(1, 10) {
        vec![rng.gen_range(1..=1u64 << 14); k]
    } else {
        (0..k).map(|_| rng.gen_range(1..=1u64 << 14)).collect()
    };
    let priors = random_priors(rng, k);
    assemble(n, lengths, priors)
}
