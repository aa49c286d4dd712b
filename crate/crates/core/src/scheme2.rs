//! Stochastic block retrieval.
//!
//! Every message is split into N−1 equal contiguous blocks. One retrieval
//! draws a query option uniformly from N^K equally likely choices: a cyclic
//! shift r plus, for each non-desired message, either "absent" or one of its
//! N−1 blocks. The chosen side blocks form a sum s that is mixed into every
//! downloaded entry; N−1 databases each serve one desired block XOR s, and one
//! database serves s alone so the client can cancel it. Shorter summands are
//! zero-padded on the left.
//!
//! Privacy comes from the option distribution: the multiset of queries a
//! single database can see is the same for every desired index, each with
//! probability 1/N^K.

use std::collections::BTreeMap;

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::bits::BitString;
use crate::catalog::Catalog;
use crate::plan::{EntryRef, PlanStep, ReconstructError, ReconstructionPlan};
use crate::query::{Answer, Query, QueryEntry, Segment};
use crate::util::checked_pow_u128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Scheme2Error {
    #[error("message {id:?} is {length_bits} bits; every length must be a multiple of N−1 = {required}")]
    LengthNotMultipleOfNMinus1 { id: String, length_bits: u64, required: u64 },
    #[error("message {id:?} has {block_bits}-bit blocks, beyond the 32-bit segment limit")]
    BlockTooLong { id: String, block_bits: u64 },
}

/// Per-message partition into N−1 contiguous equal blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    blocks_per_message: u16,
    block_bits: Vec<u64>,
}

impl BlockLayout {
    /// N−1.
    pub fn blocks_per_message(&self) -> u16 {
        self.blocks_per_message
    }

    /// Bits per block of the given message.
    pub fn block_bits(&self, message_index: u16) -> u64 {
        self.block_bits[message_index as usize - 1]
    }

    /// The segment covering block `block` (1-based) of a message.
    pub fn segment(&self, message_index: u16, block: u16) -> Segment {
        debug_assert!((1..=self.blocks_per_message).contains(&block));
        let width = self.block_bits(message_index);
        Segment::new(message_index, (block as u64 - 1) * width, width as u32)
    }
}

/// Computes the block partition, enforcing divisibility by N−1.
pub fn block_layout(catalog: &Catalog) -> Result<BlockLayout, Scheme2Error> {
    let blocks = catalog.n_databases() as u64 - 1;
    let mut block_bits = Vec::with_capacity(catalog.message_count());
    for m in catalog.messages() {
        if m.length_bits % blocks != 0 {
            return Err(Scheme2Error::LengthNotMultipleOfNMinus1 {
                id: m.id.clone(),
                length_bits: m.length_bits,
                required: blocks,
            });
        }
        let width = m.length_bits / blocks;
        if u32::try_from(width).is_err() {
            return Err(Scheme2Error::BlockTooLong { id: m.id.clone(), block_bits: width });
        }
        block_bits.push(width);
    }
    Ok(BlockLayout { blocks_per_message: blocks as u16, block_bits })
}

/// Per-message padding (bits) to reach divisibility by N−1. Reported only.
pub fn required_padding(catalog: &Catalog) -> Vec<u64> {
    let blocks = catalog.n_databases() as u64 - 1;
    catalog.messages().iter().map(|m| (blocks - m.length_bits % blocks) % blocks).collect()
}

/// One of the N^K equally likely query structures.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QueryOption {
    /// Cyclic placement: 0 puts the first desired block at database 1 and the
    /// side-only download at database N; larger shifts rotate right.
    pub shift: u16,
    /// Chosen side block per non-desired message; absent messages are omitted.
    pub side_combo: BTreeMap<u16, u16>,
}

impl QueryOption {
    /// Number of non-absent side messages.
    pub fn side_size(&self) -> usize {
        self.side_combo.len()
    }
}

/// Position of an option in the canonical enumeration: shift-major, then the
/// side combo read as a base-N number, digits over non-desired messages in
/// ascending message order (absent = 0, block b = b).
pub fn option_index(catalog: &Catalog, desired: u16, option: &QueryOption) -> u128 {
    let n = catalog.n_databases() as u128;
    let k = catalog.message_count() as u16;
    let mut combo: u128 = 0;
    for m in (1..=k).filter(|&m| m != desired) {
        let digit = option.side_combo.get(&m).copied().unwrap_or(0);
        combo = combo * n + digit as u128;
    }
    option.shift as u128 * n.pow(k as u32 - 1) + combo
}

/// Inverse of [`option_index`].
pub fn option_from_index(catalog: &Catalog, desired: u16, index: u128) -> QueryOption {
    let n = catalog.n_databases() as u128;
    let k = catalog.message_count() as u16;
    let combo_space = n.pow(k as u32 - 1);
    let shift = (index / combo_space) as u16;
    debug_assert!(shift < catalog.n_databases());
    let mut combo = index % combo_space;
    let mut side_combo = BTreeMap::new();
    for m in (1..=k).filter(|&m| m != desired).rev() {
        let digit = (combo % n) as u16;
        combo /= n;
        if digit != 0 {
            side_combo.insert(m, digit);
        }
    }
    QueryOption { shift, side_combo }
}

/// All N^K options in enumeration order.
pub fn enumerate_options(catalog: &Catalog, desired: u16) -> Result<Vec<QueryOption>, Scheme2Error> {
    block_layout(catalog)?;
    let total = option_count(catalog);
    let mut out = Vec::with_capacity(usize::try_from(total).expect("option space fits in memory"));
    for index in 0..total {
        out.push(option_from_index(catalog, desired, index));
    }
    Ok(out)
}

/// N^K.
pub fn option_count(catalog: &Catalog) -> u128 {
    checked_pow_u128(catalog.n_databases() as u64, catalog.message_count() as u32)
        .expect("option count fits in u128")
}

/// Draws one option uniformly; the seed fixes the draw.
pub fn sample_option(catalog: &Catalog, desired: u16, seed: u64) -> QueryOption {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let index = rng.gen_range(0..option_count(catalog));
    option_from_index(catalog, desired, index)
}

/// Materializes the N queries and decode plan for one option.
pub fn build_queries_for_option(
    catalog: &Catalog,
    desired: u16,
    option: &QueryOption,
) -> Result<(Vec<Query>, ReconstructionPlan), Scheme2Error> {
    let n = catalog.n_databases();
    let k = catalog.message_count() as u16;
    assert!((1..=k).contains(&desired), "desired index {desired} out of 1..={k}");
    assert!(option.shift < n, "shift {} out of 0..{n}", option.shift);
    for (&m, &b) in &option.side_combo {
        assert!(m != desired && (1..=k).contains(&m), "side message {m} invalid for desired {desired}");
        assert!((1..n).contains(&b), "block {b} out of 1..={}", n - 1);
    }
    let layout = block_layout(catalog)?;

    let side_segments: Vec<Segment> =
        option.side_combo.iter().map(|(&m, &b)| layout.segment(m, b)).collect();
    let mut entries: Vec<Vec<QueryEntry>> = vec![Vec::new(); n as usize];

    // The side-only download, if any, goes to the database the shift rotates
    // to position N.
    let side_db = (option.shift + n - 1) % n;
    let side_ref = if side_segments.is_empty() {
        None
    } else {
        entries[side_db as usize]
            .push(QueryEntry::new(side_segments.clone()).expect("side messages are distinct"));
        Some(EntryRef { database_index: side_db + 1, entry: 0 })
    };

    let width = layout.block_bits(desired);
    let mut steps = Vec::with_capacity(n as usize - 1);
    for m in 1..n {
        let db = (option.shift + m - 1) % n;
        let mut segs = side_segments.clone();
        segs.push(layout.segment(desired, m));
        entries[db as usize].push(QueryEntry::new(segs).expect("side combo excludes the desired message"));
        steps.push(PlanStep {
            dest_start: (m as u64 - 1) * width,
            dest_len: width as u32,
            main: EntryRef { database_index: db + 1, entry: 0 },
            side: side_ref,
        });
    }

    let queries = entries
        .into_iter()
        .enumerate()
        .map(|(db, ents)| Query::new(db as u16 + 1, ents))
        .collect();
    Ok((queries, ReconstructionPlan::new(desired, catalog.length_bits(desired), steps)))
}

/// Decodes the answers of one retrieval: each desired block is the main entry
/// with the side sum XOR-cancelled, right-aligned.
pub fn reconstruct(
    plan: &ReconstructionPlan,
    answers: &[Answer],
    desired: u16,
) -> Result<BitString, ReconstructError> {
    assert_eq!(plan.desired_index(), desired, "plan was built for a different message");
    plan.execute(answers)
}

/// Exact mean download over the option distribution: Σ_j L_j / N^(j−1).
/// Independent of the desired index.
pub fn expected_download(catalog: &Catalog) -> BigRational {
    let n = BigRational::from_integer(catalog.n_databases().into());
    let mut npow = BigRational::from_integer(1.into());
    let mut sum = BigRational::from_integer(0.into());
    for m in catalog.messages() {
        sum += BigRational::from_integer(m.length_bits.into()) / npow.clone();
        npow *= n.clone();
    }
    sum
}
