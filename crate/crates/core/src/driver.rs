//! One retrieval end to end: build the queries, exchange them with every
//! replica concurrently, decode the answers.
//!
//! Transports are pluggable so the same driver runs against in-process stores
//! and remote databases; a transcript records the exchange either way.

use std::thread;

use num::integer::lcm;
use num::{BigInt, BigRational, BigUint, One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::analysis;
use crate::bits::BitString;
use crate::catalog::Catalog;
use crate::plan::ReconstructError;
use crate::query::{answer_query, Answer, Query, QueryError, Transcript};
use crate::scheme1::{self, Scheme1Error};
use crate::scheme2::{self, Scheme2Error};
use crate::store::{MessageStore, StoreError};
use crate::util::derive_seed;
use crate::wire::{encode_frame, Frame, WireError};
use crate::SchemeKind;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("database reported error {code}: {message}")]
    Remote { code: u16, message: String },
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error(transparent)]
    Answer(#[from] QueryError),
}

/// One replica as the driver sees it: a query goes in, an answer comes back.
pub trait DatabaseTransport: Send {
    fn exchange(&mut self, query: &Query) -> Result<Answer, TransportError>;
}

/// Answers queries directly against a borrowed store.
pub struct InProcessDatabase<'a> {
    store: &'a MessageStore,
}

impl<'a> InProcessDatabase<'a> {
    pub fn new(store: &'a MessageStore) -> Self {
        InProcessDatabase { store }
    }
}

impl DatabaseTransport for InProcessDatabase<'_> {
    fn exchange(&mut self, query: &Query) -> Result<Answer, TransportError> {
        Ok(answer_query(self.store, query)?)
    }
}

/// N replicas of one in-process store.
pub fn in_process_transports(
    store: &MessageStore,
    n_databases: u16,
) -> Vec<Box<dyn DatabaseTransport + '_>> {
    (0..n_databases)
        .map(|_| Box::new(InProcessDatabase::new(store)) as Box<dyn DatabaseTransport + '_>)
        .collect()
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Deterministic(#[from] Scheme1Error),
    #[error(transparent)]
    Stochastic(#[from] Scheme2Error),
    #[error("database {database_index}: {source}")]
    Transport { database_index: u16, source: TransportError },
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    #[error("retrieved copy of message {desired} differs from the store")]
    Mismatch { desired: u16 },
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone)]
pub struct RetrievalOutcome {
    pub message: BitString,
    pub transcript: Transcript,
    /// Which query option the stochastic scheme drew; absent for the
    /// deterministic scheme.
    pub option_index: Option<u128>,
}

/// Runs one full retrieval of `desired` over the given transports, one per
/// database, exchanging with all replicas concurrently.
pub fn retrieve(
    catalog: &Catalog,
    scheme: SchemeKind,
    desired: u16,
    seed: u64,
    transports: &mut [Box<dyn DatabaseTransport + '_>],
) -> Result<RetrievalOutcome, DriverError> {
    assert_eq!(
        transports.len(),
        catalog.n_databases() as usize,
        "one transport per database"
    );
    let (queries, plan, option_index) = match scheme {
        SchemeKind::Deterministic => {
            let params = scheme1::compute_params(catalog)?;
            let (queries, plan) = scheme1::build_queries(catalog, &params, desired, seed)?;
            (queries, plan, None)
        }
        SchemeKind::Stochastic => {
            let option = scheme2::sample_option(catalog, desired, seed);
            let index = scheme2::option_index(catalog, desired, &option);
            let (queries, plan) = scheme2::build_queries_for_option(catalog, desired, &option)?;
            (queries, plan, Some(index))
        }
    };

    let results: Vec<Result<Answer, TransportError>> = thread::scope(|scope| {
        let handles: Vec<_> = transports
            .iter_mut()
            .zip(&queries)
            .map(|(transport, query)| scope.spawn(move || transport.exchange(query)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("transport thread panicked"))
            .collect()
    });
    let mut answers = Vec::with_capacity(results.len());
    for (db, result) in results.into_iter().enumerate() {
        answers.push(result.map_err(|source| DriverError::Transport {
            database_index: db as u16 + 1,
            source,
        })?);
    }

    let message = plan.execute(&answers)?;
    let downloaded_bits = answers.iter().map(Answer::downloaded_bits).sum();
    let transcript = Transcript {
        desired_index: desired,
        queries,
        answers,
        downloaded_bits,
        useful_bits: catalog.length_bits(desired),
    };
    Ok(RetrievalOutcome { message, transcript, option_index })
}

/// Retrieval against local replicas of `store`.
pub fn retrieve_in_process(
    catalog: &Catalog,
    scheme: SchemeKind,
    desired: u16,
    seed: u64,
    store: &MessageStore,
) -> Result<RetrievalOutcome, DriverError> {
    store.check_catalog(catalog)?;
    let mut transports = in_process_transports(store, catalog.n_databases());
    retrieve(catalog, scheme, desired, seed, &mut transports)
}

/// Deterministic byte image of a transcript: per database, index, query frame,
/// answer frame. Equal transcripts over different transports must agree here
/// byte for byte.
pub fn transcript_bytes(transcript: &Transcript) -> Vec<u8> {
    let mut out = Vec::new();
    for (query, answer) in transcript.queries.iter().zip(&transcript.answers) {
        out.extend_from_slice(&query.database_index.to_be_bytes());
        out.extend_from_slice(&encode_frame(&Frame::Query(query.entries().to_vec())));
        out.extend_from_slice(&encode_frame(&Frame::Answer(answer.entry_answers.clone())));
    }
    out
}

/// Draws desired messages with probabilities exactly equal to the catalog
/// priors: integer weights over their common denominator, sampled by
/// rejection on whole random draws.
pub struct PriorSampler {
    cumulative: Vec<BigUint>,
    total: BigUint,
    draw_bytes: usize,
    top_mask: u8,
}

impl PriorSampler {
    pub fn new(catalog: &Catalog) -> Self {
        let denominator = catalog
            .messages()
            .iter()
            .fold(BigInt::one(), |acc, m| lcm(acc, m.prior.denom().clone()));
        let mut cumulative = Vec::with_capacity(catalog.message_count());
        let mut acc = BigInt::zero();
        for m in catalog.messages() {
            acc += (m.prior.clone() * &denominator).to_integer();
            cumulative.push(acc.to_biguint().expect("priors are positive"));
        }
        let total = denominator.to_biguint().expect("denominator is positive");
        assert_eq!(cumulative.last(), Some(&total), "priors sum to one");
        let bits = total.bits().max(1);
        let draw_bytes = bits.div_ceil(8) as usize;
        let excess = (draw_bytes as u64 * 8 - bits) as u32;
        PriorSampler { cumulative, total, draw_bytes, top_mask: 0xffu8 >> excess }
    }

    pub fn draw(&self, rng: &mut (impl RngCore + ?Sized)) -> u16 {
        let mut buf = vec![0u8; self.draw_bytes];
        let value = loop {
            rng.fill_bytes(&mut buf);
            buf[0] &= self.top_mask;
            let candidate = BigUint::from_bytes_be(&buf);
            if candidate < self.total {
                break candidate;
            }
        };
        for (i, bound) in self.cumulative.iter().enumerate() {
            if value < *bound {
                return i as u16 + 1;
            }
        }
        unreachable!("draw below the total is below the last bound")
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub trials: u64,
    pub desired_counts: Vec<u64>,
    pub total_useful_bits: u64,
    pub total_downloaded_bits: u64,
    /// Exact ratio of useful to downloaded bits over all trials.
    pub empirical_rate: BigRational,
    pub analytic_capacity: BigRational,
    /// One record per trial, in trial order.
    pub trial_records: Vec<TrialRecord>,
}

/// What a single bench trial retrieved and what it cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub desired_index: u16,
    pub downloaded_bits: u64,
    pub option_index: Option<u128>,
}

/// Runs `trials` in-process retrievals with desired messages drawn from the
/// priors, verifying every result bit for bit against the store.
pub fn run_bench(
    catalog: &Catalog,
    scheme: SchemeKind,
    trials: u64,
    seed: u64,
    store: &MessageStore,
) -> Result<BenchReport, DriverError> {
    store.check_catalog(catalog)?;
    let sampler = PriorSampler::new(catalog);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut desired_counts = vec![0u64; catalog.message_count()];
    let mut useful = 0u64;
    let mut downloaded = 0u64;
    let mut trial_records = Vec::with_capacity(trials.min(1 << 20) as usize);
    for trial in 0..trials {
        let desired = sampler.draw(&mut rng);
        let outcome = retrieve_in_process(
            catalog,
            scheme,
            desired,
            derive_seed(seed, desired as u64, trial),
            store,
        )?;
        if outcome.message != *store.message(desired) {
            return Err(DriverError::Mismatch { desired });
        }
        desired_counts[desired as usize - 1] += 1;
        useful += outcome.transcript.useful_bits;
        downloaded += outcome.transcript.downloaded_bits;
        trial_records.push(TrialRecord {
            desired_index: desired,
            downloaded_bits: outcome.transcript.downloaded_bits,
            option_index: outcome.option_index,
        });
    }
    let empirical_rate = if downloaded == 0 {
        BigRational::zero()
    } else {
        BigRational::new(useful.into(), downloaded.into())
    };
    Ok(BenchReport {
        trials,
        desired_counts,
        total_useful_bits: useful,
        total_downloaded_bits: downloaded,
        empirical_rate,
        analytic_capacity: analysis::semantic_capacity(catalog),
        trial_records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{meta, ratio, validate_catalog};
    use crate::query::realized_download;

    fn catalog_ex1() -> Catalog {
        validate_catalog(
            meta(&[(1024, ratio(3, 4)), (256, ratio(1, 4))]),
            2,
        )
        .unwrap()
    }

    fn catalog_ex3() -> Catalog {
        validate_catalog(
            meta(&[(3000, ratio(1, 2)), (1800, ratio(1, 2))]),
            4,
        )
        .unwrap()
    }

    #[test]
    fn both_schemes_retrieve_in_process() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let det = catalog_ex1();
        let store = MessageStore::random(&det, &mut rng);
        for desired in 1..=2u16 {
            let outcome =
                retrieve_in_process(&det, SchemeKind::Deterministic, desired, 9, &store).unwrap();
            assert_eq!(&outcome.message, store.message(desired));
            assert_eq!(outcome.option_index, None);
            assert_eq!(outcome.transcript.downloaded_bits, 1152);
            assert_eq!(realized_download(&outcome.transcript), 1152);
        }

        let stoch = catalog_ex3();
        let store = MessageStore::random(&stoch, &mut rng);
        for desired in 1..=2u16 {
            let outcome =
                retrieve_in_process(&stoch, SchemeKind::Stochastic, desired, 9, &store).unwrap();
            assert_eq!(&outcome.message, store.message(desired));
            assert!(outcome.option_index.unwrap() < 16);
        }
    }

    #[test]
    fn transcripts_are_seed_deterministic() {
        let cat = catalog_ex1();
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let store = MessageStore::random(&cat, &mut rng);
        let a = retrieve_in_process(&cat, SchemeKind::Deterministic, 1, 42, &store).unwrap();
        let b = retrieve_in_process(&cat, SchemeKind::Deterministic, 1, 42, &store).unwrap();
        let c = retrieve_in_process(&cat, SchemeKind::Deterministic, 1, 43, &store).unwrap();
        assert_eq!(transcript_bytes(&a.transcript), transcript_bytes(&b.transcript));
        assert_ne!(transcript_bytes(&a.transcript), transcript_bytes(&c.transcript));
        assert_eq!(a.message, c.message);
    }

    #[test]
    fn prior_sampling_is_exact_in_distribution() {
        let cat = validate_catalog(
            meta(&[(16, ratio(2, 3)), (8, ratio(1, 4)), (4, ratio(1, 12))]),
            2,
        )
        .unwrap();
        let sampler = PriorSampler::new(&cat);
        assert_eq!(sampler.total, 12u32.into());
        assert_eq!(sampler.cumulative, vec![8u32.into(), 11u32.into(), 12u32.into()]);

        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let mut counts = [0u64; 3];
        let trials = 60_000;
        for _ in 0..trials {
            counts[sampler.draw(&mut rng) as usize - 1] += 1;
        }
        // 5σ bands around the exact expectations.
        for (count, expected, sigma) in [
            (counts[0], 40_000.0, (60_000.0f64 * (2.0 / 3.0) * (1.0 / 3.0)).sqrt()),
            (counts[1], 15_000.0, (60_000.0f64 * 0.25 * 0.75).sqrt()),
            (counts[2], 5_000.0, (60_000.0f64 * (1.0 / 12.0) * (11.0 / 12.0)).sqrt()),
        ] {
            assert!((count as f64 - expected).abs() < 5.0 * sigma, "{count} vs {expected}");
        }
    }

    #[test]
    fn bench_rate_approaches_capacity() {
        let cat = catalog_ex1();
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let store = MessageStore::random(&cat, &mut rng);
        let report = run_bench(&cat, SchemeKind::Deterministic, 400, 3, &store).unwrap();
        assert_eq!(report.trials, 400);
        assert_eq!(report.desired_counts.iter().sum::<u64>(), 400);
        assert_eq!(report.total_downloaded_bits, 400 * 1152);
        // Every download costs 1152; the mix of useful bits tracks the priors.
        let c1 = report.desired_counts[0];
        assert_eq!(report.total_useful_bits, c1 * 1024 + (400 - c1) * 256);
        assert_eq!(report.analytic_capacity, ratio(8, 9) * ratio(3, 4) + ratio(2, 9) * ratio(1, 4));

        let stoch = catalog_ex3();
        let store = MessageStore::random(&stoch, &mut rng);
        let report = run_bench(&stoch, SchemeKind::Stochastic, 300, 3, &store).unwrap();
        assert_eq!(report.desired_counts.iter().sum::<u64>(), 300);
        assert!(report.empirical_rate > ratio(1, 2));
    }

    #[test]
    fn transport_failures_name_the_database() {
        struct Failing;
        impl DatabaseTransport for Failing {
            fn exchange(&mut self, _query: &Query) -> Result<Answer, TransportError> {
                Err(TransportError::Protocol("refused".into()))
            }
        }
        let cat = catalog_ex1();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let store = MessageStore::random(&cat, &mut rng);
        let mut transports: Vec<Box<dyn DatabaseTransport + '_>> =
            vec![Box::new(InProcessDatabase::new(&store)), Box::new(Failing)];
        let err = retrieve(&cat, SchemeKind::Deterministic, 1, 0, &mut transports).unwrap_err();
        match err {
            DriverError::Transport { database_index: 2, source: TransportError::Protocol(_) } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }
}
