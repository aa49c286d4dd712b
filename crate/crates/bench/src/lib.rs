//! Shared fixtures for the criterion benches: catalogs at a few scales and
//! seeded stores to run them against.

use num::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use spir_core::catalog::{validate_catalog, MessageMeta};
use spir_core::{Catalog, MessageStore};

pub fn uniform_catalog(n_databases: u16, lengths: &[u64]) -> Catalog {
    let k = lengths.len() as i64;
    let messages = lengths
        .iter()
        .enumerate()
        .map(|(i, &length_bits)| MessageMeta {
            id: format!("m{}", i + 1),
            length_bits,
            prior: BigRational::new(1.into(), k.into()),
        })
        .collect();
    validate_catalog(messages, n_databases).unwrap()
}

/// Two databases, a 1 KiB and a 256-bit message.
pub fn two_db_pair() -> Catalog {
    uniform_catalog(2, &[1024, 256])
}

/// Four databases, three messages spanning 512 bits to 1 KiB.
pub fn four_db_triple() -> Catalog {
    uniform_catalog(4, &[8192, 2048, 512])
}

/// Four databases, two block-partitioned messages.
pub fn four_db_blocks() -> Catalog {
    uniform_catalog(4, &[3000, 1800])
}

/// Two databases, five messages, 128 bits to 4 KiB: the deep end of the
/// deterministic scheme's recursion.
pub fn wide_deterministic() -> Catalog {
    uniform_catalog(2, &[1 << 15, 1 << 13, 1 << 11, 1 << 9, 1 << 7])
}

pub fn seeded_store(catalog: &Catalog, seed: u64) -> MessageStore {
    MessageStore::random(catalog, &mut ChaCha12Rng::seed_from_u64(seed))
}
