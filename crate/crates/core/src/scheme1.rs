//! Deterministic k-sum retrieval.
//!
//! The client recovers the desired message through α repetitions of one fixed
//! "subpacket" structure. Within a subpacket every database serves, for every
//! message m, υ_m fresh single bits, and for every subset S of t ≥ 2 messages,
//! (N−1)^(t−1)·υ_max(S) t-sums. Sums that include the desired message pair one
//! fresh desired bit with a (t−1)-sum already served verbatim by a different
//! database, so the desired bit falls out by XOR. Sums that avoid the desired
//! message burn fresh bits and exist purely so the per-database workload is
//! the same whichever message is wanted.
//!
//! Which bit positions count as "fresh" is hidden behind one uniform
//! permutation per message, drawn from the caller's seed; the α subpackets
//! walk consecutive ranges of the permuted pools.

use std::cmp::Ordering;
use std::collections::HashMap;

use itertools::Itertools;
use num::integer::gcd;
use num::{BigRational, BigUint};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::bits::BitString;
use crate::catalog::Catalog;
use crate::plan::{EntryRef, PlanStep, ReconstructError, ReconstructionPlan};
use crate::query::{Answer, Query, QueryEntry, Segment};
use crate::util::checked_pow_u128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Scheme1Error {
    #[error(
        "message {id:?} is {length_bits} bits; every length must be a multiple of N^K = {}",
        BigUint::from(*n_databases).pow(*message_count)
    )]
    LengthNotMultipleOfNK { id: String, length_bits: u64, n_databases: u16, message_count: u32 },
}

/// Stage counts and repetition structure for one catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetrievalParams {
    upsilon: Vec<u64>,
    alpha: u64,
    subpacketizations: Vec<u64>,
    d_sub: u64,
}

impl RetrievalParams {
    /// Per-message stage counts υ, non-increasing; gcd 1.
    pub fn upsilon(&self) -> &[u64] {
        &self.upsilon
    }

    /// Number of subpacket repetitions α; L_j = α·U_j.
    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    /// U_j: desired bits recovered per subpacket when message j is wanted.
    pub fn subpacketizations(&self) -> &[u64] {
        &self.subpacketizations
    }

    /// Bits downloaded per subpacket across all databases, independent of the
    /// desired index.
    pub fn d_sub(&self) -> u64 {
        self.d_sub
    }

    /// Total bits downloaded by a full retrieval: α·d_sub.
    pub fn download_bits(&self) -> u64 {
        self.alpha.checked_mul(self.d_sub).expect("total download fits in u64")
    }

    /// Exact retrieval rate for message j: U_j / d_sub.
    pub fn rate(&self, j: u16) -> BigRational {
        BigRational::new(self.subpacketizations[j as usize - 1].into(), self.d_sub.into())
    }
}

/// Solves the stage counts for a catalog.
///
/// The subpacketization system is upper-triangular in υ', so back-substitution
/// collapses to the closed form υ'_i = L_i/N^i − (N−1)·Σ_{j>i} L_j/N^j. The
/// common factor α = gcd(υ') is split off and U_j, d_sub derived from υ.
pub fn compute_params(catalog: &Catalog) -> Result<RetrievalParams, Scheme1Error> {
    let n = catalog.n_databases() as u64;
    let k = catalog.message_count();
    let lengths = catalog.lengths();

    let nk = checked_pow_u128(n, k as u32);
    for m in catalog.messages() {
        let divisible = nk.is_some_and(|nk| (m.length_bits as u128) % nk == 0);
        if !divisible {
            return Err(Scheme1Error::LengthNotMultipleOfNK {
                id: m.id.clone(),
                length_bits: m.length_bits,
                n_databases: catalog.n_databases(),
                message_count: k as u32,
            });
        }
    }

    let mut npow = vec![1u128; k + 1];
    for i in 1..=k {
        npow[i] = npow[i - 1] * n as u128;
    }

    let mut vprime = vec![0u128; k];
    for i in 1..=k {
        let head = lengths[i - 1] as u128 / npow[i];
        let tail: u128 =
            (n as u128 - 1) * (i + 1..=k).map(|j| lengths[j - 1] as u128 / npow[j]).sum::<u128>();
        // head − tail ≥ L_i/N^K ≥ 1 because lengths are sorted non-increasing.
        debug_assert!(head > tail);
        vprime[i - 1] = head - tail;
    }
    debug_assert!(vprime.windows(2).all(|w| w[0] >= w[1]));

    let alpha = vprime.iter().copied().fold(0u128, gcd);
    let upsilon: Vec<u128> = vprime.iter().map(|v| v / alpha).collect();

    let subpacketizations: Vec<u128> = (1..=k)
        .map(|j| {
            npow[j] * upsilon[j - 1]
                + (n as u128 - 1)
                    * (j + 1..=k).map(|i| npow[i - 1] * upsilon[i - 1]).sum::<u128>()
        })
        .collect();
    for j in 0..k {
        // Forward product of the subpacketization system: recovers L exactly.
        assert_eq!(alpha * subpacketizations[j], lengths[j] as u128, "stage-count solve is inconsistent");
    }
    let d_sub: u128 = (1..=k).map(|i| upsilon[i - 1] * npow[i]).sum();

    let to_u64 = |v: u128| u64::try_from(v).expect("parameter fits in u64");
    Ok(RetrievalParams {
        upsilon: upsilon.into_iter().map(to_u64).collect(),
        alpha: to_u64(alpha),
        subpacketizations: subpacketizations.into_iter().map(to_u64).collect(),
        d_sub: to_u64(d_sub),
    })
}

/// U_j, the useful bits recovered per subpacket for desired message j.
pub fn useful_bits(params: &RetrievalParams, j: u16) -> u64 {
    params.subpacketizations[j as usize - 1]
}

/// d_sub, the per-subpacket download; a full retrieval costs α·d_sub.
pub fn download_cost(params: &RetrievalParams) -> u64 {
    params.d_sub
}

/// Per-message padding (bits) that would make the catalog meet the N^K
/// divisibility requirement. Reported only; never applied.
pub fn required_padding(catalog: &Catalog) -> Vec<u64> {
    let nk = checked_pow_u128(catalog.n_databases() as u64, catalog.message_count() as u32)
        .expect("N^K fits in u128");
    catalog
        .messages()
        .iter()
        .map(|m| {
            let r = m.length_bits as u128 % nk;
            let pad = if r == 0 { 0 } else { nk - r };
            u64::try_from(pad).expect("padding fits in u64")
        })
        .collect()
}

/// Builds the N queries for one full retrieval plus the plan that decodes the
/// answers. The seed fixes the per-message position permutations and with them
/// the entire transcript.
pub fn build_queries(
    catalog: &Catalog,
    params: &RetrievalParams,
    desired: u16,
    seed: u64,
) -> Result<(Vec<Query>, ReconstructionPlan), Scheme1Error> {
    let check = compute_params(catalog)?;
    assert_eq!(&check, params, "params were not computed from this catalog");

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let perms = catalog
        .messages()
        .iter()
        .map(|m| {
            let mut positions: Vec<u64> = (0..m.length_bits).collect();
            positions.shuffle(&mut rng);
            positions
        })
        .collect();
    Ok(build_with_perms(catalog, params, desired, perms))
}

/// Decodes the answers of a full retrieval into the desired message.
pub fn reconstruct(plan: &ReconstructionPlan, answers: &[Answer]) -> Result<BitString, ReconstructError> {
    plan.execute(answers)
}

/// Per-message pools of permuted, not-yet-used bit positions.
struct FreshBits {
    perms: Vec<Vec<u64>>,
    cursors: Vec<usize>,
}

impl FreshBits {
    fn next(&mut self, message_index: u16) -> u64 {
        let m = message_index as usize - 1;
        let c = self.cursors[m];
        assert!(c < self.perms[m].len(), "bit pool of message {message_index} exhausted; stage accounting is broken");
        self.cursors[m] = c + 1;
        self.perms[m][c]
    }

    fn used(&self, message_index: u16) -> usize {
        self.cursors[message_index as usize - 1]
    }
}

/// Which already-emitted entries are available as side information within the
/// current subpacket, keyed by message subset and producing database.
///
/// Each consumer database reads its own cursor over a producer's pool, so an
/// entry is consumed at most once per consumer; the same entry may (and must)
/// serve all N−1 other databases.
struct SideInfoLedger {
    pools: HashMap<u64, Vec<Vec<u32>>>,
    consumed: HashMap<(u64, usize, usize), usize>,
    n_databases: usize,
}

impl SideInfoLedger {
    fn new(n_databases: usize) -> Self {
        Self { pools: HashMap::new(), consumed: HashMap::new(), n_databases }
    }

    fn reset(&mut self) {
        self.pools.clear();
        self.consumed.clear();
    }

    fn produce(&mut self, subset_mask: u64, database: usize, entry_index: u32) {
        let n = self.n_databases;
        self.pools.entry(subset_mask).or_insert_with(|| vec![Vec::new(); n])[database].push(entry_index);
    }

    /// Next `count` unconsumed entries of `(subset, producer)` as seen by
    /// `consumer`. Underflow is a defect: the per-round counting identity
    /// guarantees availability.
    fn consume(&mut self, subset_mask: u64, producer: usize, consumer: usize, count: usize) -> Vec<u32> {
        let pool = &self.pools[&subset_mask][producer];
        let cursor = self.consumed.entry((subset_mask, producer, consumer)).or_insert(0);
        assert!(*cursor + count <= pool.len(), "side information exhausted; stage accounting is broken");
        let taken = pool[*cursor..*cursor + count].to_vec();
        *cursor += count;
        taken
    }
}

fn build_with_perms(
    catalog: &Catalog,
    params: &RetrievalParams,
    desired: u16,
    perms: Vec<Vec<u64>>,
) -> (Vec<Query>, ReconstructionPlan) {
    let n = catalog.n_databases() as usize;
    let k = catalog.message_count();
    assert!((1..=k as u16).contains(&desired), "desired index {desired} out of 1..={k}");
    assert!(k <= 60, "subset enumeration is limited to 60 messages");

    let upsilon = params.upsilon();
    let per_db = (params.download_bits() / n as u64) as usize;
    let mut entries: Vec<Vec<QueryEntry>> = (0..n).map(|_| Vec::with_capacity(per_db)).collect();
    let mut steps: Vec<PlanStep> = Vec::with_capacity(catalog.length_bits(desired) as usize);
    let mut fresh = FreshBits { perms, cursors: vec![0; k] };
    let mut ledger = SideInfoLedger::new(n);
    let nm1 = n as u128 - 1;

    for _rep in 0..params.alpha() {
        ledger.reset();

        // Round 1: fresh singletons of every message at every database.
        for (db, db_entries) in entries.iter_mut().enumerate() {
            for m in 1..=k as u16 {
                for _ in 0..upsilon[m as usize - 1] {
                    let pos = fresh.next(m);
                    let idx = db_entries.len() as u32;
                    db_entries.push(QueryEntry::single(Segment::bit(m, pos)));
                    ledger.produce(1 << (m - 1), db, idx);
                    if m == desired {
                        steps.push(PlanStep {
                            dest_start: pos,
                            dest_len: 1,
                            main: EntryRef { database_index: db as u16 + 1, entry: idx },
                            side: None,
                        });
                    }
                }
            }
        }

        // Rounds t ≥ 2: t-sums for every message subset of size t.
        for t in 2..=k {
            for subset in (1..=k as u16).combinations(t) {
                let mask: u64 = subset.iter().map(|&m| 1u64 << (m - 1)).sum();
                let stage = upsilon[*subset.last().expect("t ≥ 2") as usize - 1] as u128;
                if subset.contains(&desired) {
                    // Pair fresh desired bits with side sums produced at the
                    // other databases, scanning producers cyclically.
                    let side_mask = mask & !(1 << (desired - 1));
                    let per_producer = (nm1.pow(t as u32 - 2) * stage) as usize;
                    for db in 0..n {
                        for off in 1..n {
                            let producer = (db + off) % n;
                            for side_idx in ledger.consume(side_mask, producer, db, per_producer) {
                                let mut segs = entries[producer][side_idx as usize].segments().to_vec();
                                let pos = fresh.next(desired);
                                segs.push(Segment::bit(desired, pos));
                                let idx = entries[db].len() as u32;
                                entries[db].push(QueryEntry::new(segs).expect("side sum avoids the desired message"));
                                steps.push(PlanStep {
                                    dest_start: pos,
                                    dest_len: 1,
                                    main: EntryRef { database_index: db as u16 + 1, entry: idx },
                                    side: Some(EntryRef { database_index: producer as u16 + 1, entry: side_idx }),
                                });
                            }
                        }
                    }
                } else {
                    // Fresh t-sums; they double as side information for the
                    // (t+1)-round subset that adds the desired message.
                    let count = nm1.pow(t as u32 - 1) * stage;
                    for (db, db_entries) in entries.iter_mut().enumerate() {
                        for _ in 0..count {
                            let segs = subset.iter().map(|&m| Segment::bit(m, fresh.next(m))).collect();
                            let idx = db_entries.len() as u32;
                            db_entries.push(QueryEntry::new(segs).expect("subset messages are distinct"));
                            ledger.produce(mask, db, idx);
                        }
                    }
                }
            }
        }
    }

    assert_eq!(
        fresh.used(desired) as u64,
        catalog.length_bits(desired),
        "every desired bit position must be drawn exactly once"
    );

    // Canonicalize entry order per database and remap the plan references.
    let mut queries = Vec::with_capacity(n);
    let mut remap: Vec<Vec<u32>> = Vec::with_capacity(n);
    for (db, ents) in entries.into_iter().enumerate() {
        debug_assert_eq!(ents.len(), per_db);
        let mut order: Vec<u32> = (0..ents.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| ents[a as usize].canonical_cmp(&ents[b as usize]));
        let mut new_index = vec![0u32; ents.len()];
        for (new_pos, &old) in order.iter().enumerate() {
            new_index[old as usize] = new_pos as u32;
        }
        let sorted: Vec<QueryEntry> = order.iter().map(|&o| ents[o as usize].clone()).collect();
        debug_assert!(
            sorted.windows(2).all(|w| w[0].canonical_cmp(&w[1]) == Ordering::Less),
            "entries within a query are pairwise distinct"
        );
        queries.push(Query::new(db as u16 + 1, sorted));
        remap.push(new_index);
    }
    for step in &mut steps {
        step.main.entry = remap[step.main.database_index as usize - 1][step.main.entry as usize];
        if let Some(side) = &mut step.side {
            side.entry = remap[side.database_index as usize - 1][side.entry as usize];
        }
    }

    (queries, ReconstructionPlan::new(desired, catalog.length_bits(desired), steps))
}
