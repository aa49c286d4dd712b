//! Privacy audits: do the queries one database receives betray which message
//! the user is after?
//!
//! The structural mode checks the whole query space exactly. The empirical
//! mode samples retrievals and tests the observed query distributions: total
//! variation between the per-database views under different desired messages,
//! plus chi-square uniformity checks on the scheme's randomness.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::catalog::Catalog;
use crate::query::Query;
use crate::scheme1::{self, Scheme1Error};
use crate::scheme2::{self, Scheme2Error};
use crate::util::derive_seed;
use crate::SchemeKind;

/// A segment as a database could describe it to an adversary. Single-bit
/// segments drop their position: those positions are the per-retrieval coin
/// flips, so every honest transcript randomizes them. Longer segments keep
/// their start, which is fixed block structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SegmentShape {
    pub message_index: u16,
    pub length_bits: u32,
    pub start_bit: Option<u64>,
}

/// The shapes of one entry's segments, sorted.
pub type EntryShape = Vec<SegmentShape>;

/// Canonical multiset of entry shapes in one database's query. Two queries
/// with equal signatures are indistinguishable to that database up to the
/// randomized bit positions.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuerySignature {
    entries: Vec<(EntryShape, u64)>,
}

impl QuerySignature {
    pub fn of(query: &Query) -> Self {
        let mut shapes: Vec<EntryShape> = query
            .entries()
            .iter()
            .map(|entry| {
                let mut shape: EntryShape = entry
                    .segments()
                    .iter()
                    .map(|s| SegmentShape {
                        message_index: s.message_index,
                        length_bits: s.length_bits,
                        start_bit: (s.length_bits > 1).then_some(s.start_bit),
                    })
                    .collect();
                shape.sort_unstable();
                shape
            })
            .collect();
        shapes.sort_unstable();

        let mut entries: Vec<(EntryShape, u64)> = Vec::new();
        for shape in shapes {
            match entries.last_mut() {
                Some((last, count)) if *last == shape => *count += 1,
                _ => entries.push((shape, 1)),
            }
        }
        QuerySignature { entries }
    }

    pub fn entry_shapes(&self) -> &[(EntryShape, u64)] {
        &self.entries
    }
}

/// Signature counts aggregated over retrievals (or over the full option space).
pub type SignatureMultiset = BTreeMap<QuerySignature, u64>;

pub fn multiset(signatures: impl IntoIterator<Item = QuerySignature>) -> SignatureMultiset {
    let mut out = SignatureMultiset::new();
    for sig in signatures {
        *out.entry(sig).or_insert(0) += 1;
    }
    out
}

/// `per_desired[d][db]` holds the signature multiset database `db` sees when
/// message `d` is retrieved. Returns, per database, whether every message
/// choice induces the same multiset.
pub fn per_database_match(per_desired: &[Vec<SignatureMultiset>]) -> Vec<bool> {
    let first = &per_desired[0];
    (0..first.len())
        .map(|db| per_desired.iter().all(|row| row[db] == first[db]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMode {
    Structural,
    Empirical,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatabaseVerdict {
    pub database_index: u16,
    pub indistinguishable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_total_variation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatisticVerdict {
    pub name: String,
    pub statistic: f64,
    pub critical_value: f64,
    pub degrees_of_freedom: u64,
    pub rejected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub mode: AuditMode,
    pub scheme: SchemeKind,
    pub pass: bool,
    pub databases: Vec<DatabaseVerdict>,
    pub statistics: Vec<StatisticVerdict>,
}

impl AuditReport {
    fn assemble(
        mode: AuditMode,
        scheme: SchemeKind,
        databases: Vec<DatabaseVerdict>,
        statistics: Vec<StatisticVerdict>,
    ) -> Self {
        let pass = databases.iter().all(|d| d.indistinguishable)
            && statistics.iter().all(|s| !s.rejected);
        AuditReport { mode, scheme, pass, databases, statistics }
    }
}

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("{samples} samples requested; the empirical audit needs at least {minimum}")]
    InsufficientSamples { samples: u64, minimum: u64 },
    #[error(transparent)]
    Deterministic(#[from] Scheme1Error),
    #[error(transparent)]
    Stochastic(#[from] Scheme2Error),
}

pub const MIN_EMPIRICAL_SAMPLES: u64 = 1000;
pub const DEFAULT_CHI2_ALPHA: f64 = 0.01;

/// Default tolerance on the pairwise total variation between two S-sample
/// draws of one distribution over `support` signatures. Two honest empirical
/// copies sit near √(support/(πS)), so √(support/S) plus a 4/√(2S) margin
/// stays above sampling noise while any dependence on the desired message
/// moves the distance by a constant.
pub fn default_tv_threshold(samples: u64, support: usize) -> f64 {
    (support as f64 / samples as f64).sqrt() + 4.0 / (2.0 * samples as f64).sqrt()
}

/// Exact check of the deterministic scheme: for every possible desired
/// message, every database must receive the same query signature.
pub fn audit_scheme1_structural(catalog: &Catalog) -> Result<AuditReport, AuditError> {
    let params = scheme1::compute_params(catalog)?;
    let k = catalog.message_count() as u16;
    let mut per_desired = Vec::with_capacity(k as usize);
    for desired in 1..=k {
        let (queries, _) = scheme1::build_queries(catalog, &params, desired, 0)?;
        per_desired.push(
            queries.iter().map(|q| multiset([QuerySignature::of(q)])).collect::<Vec<_>>(),
        );
    }
    Ok(structural_report(SchemeKind::Deterministic, &per_desired))
}

/// Exact check of the stochastic scheme: for every possible desired message,
/// the multiset of signatures a database sees across the full option space
/// must be the same.
pub fn audit_scheme2_structural(catalog: &Catalog) -> Result<AuditReport, AuditError> {
    let n = catalog.n_databases() as usize;
    let k = catalog.message_count() as u16;
    let mut per_desired = Vec::with_capacity(k as usize);
    for desired in 1..=k {
        let mut per_db = vec![SignatureMultiset::new(); n];
        for option in scheme2::enumerate_options(catalog, desired)? {
            let (queries, _) = scheme2::build_queries_for_option(catalog, desired, &option)?;
            for (db, query) in queries.iter().enumerate() {
                *per_db[db].entry(QuerySignature::of(query)).or_insert(0) += 1;
            }
        }
        per_desired.push(per_db);
    }
    Ok(structural_report(SchemeKind::Stochastic, &per_desired))
}

pub fn audit_structural(catalog: &Catalog, scheme: SchemeKind) -> Result<AuditReport, AuditError> {
    match scheme {
        SchemeKind::Deterministic => audit_scheme1_structural(catalog),
        SchemeKind::Stochastic => audit_scheme2_structural(catalog),
    }
}

fn structural_report(scheme: SchemeKind, per_desired: &[Vec<SignatureMultiset>]) -> AuditReport {
    let databases = per_database_match(per_desired)
        .into_iter()
        .enumerate()
        .map(|(db, ok)| DatabaseVerdict {
            database_index: db as u16 + 1,
            indistinguishable: ok,
            max_total_variation: None,
        })
        .collect();
    AuditReport::assemble(AuditMode::Structural, scheme, databases, Vec::new())
}

/// Sampled check of either scheme. Draws `samples` retrievals per desired
/// message from seeds derived off `seed`, then tests that the per-database
/// signature distributions agree across desired messages (total variation)
/// and that the scheme's randomness is uniform (chi-square).
pub fn audit_empirical(
    catalog: &Catalog,
    scheme: SchemeKind,
    samples: u64,
    seed: u64,
    tv_threshold: Option<f64>,
    chi2_alpha: Option<f64>,
) -> Result<AuditReport, AuditError> {
    if samples < MIN_EMPIRICAL_SAMPLES {
        return Err(AuditError::InsufficientSamples { samples, minimum: MIN_EMPIRICAL_SAMPLES });
    }
    let alpha = chi2_alpha.unwrap_or(DEFAULT_CHI2_ALPHA);
    match scheme {
        SchemeKind::Deterministic => empirical_scheme1(catalog, samples, seed, tv_threshold, alpha),
        SchemeKind::Stochastic => empirical_scheme2(catalog, samples, seed, tv_threshold, alpha),
    }
}

#[derive(Clone)]
struct DeterministicTally {
    per_db: Vec<SignatureMultiset>,
    /// Per message, how often each bit position appeared as a singleton entry.
    positions: Vec<Vec<u64>>,
}

impl DeterministicTally {
    fn empty(n: usize, lengths: &[u64]) -> Self {
        DeterministicTally {
            per_db: vec![SignatureMultiset::new(); n],
            positions: lengths.iter().map(|&l| vec![0u64; l as usize]).collect(),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (mine, theirs) in self.per_db.iter_mut().zip(other.per_db) {
            for (sig, count) in theirs {
                *mine.entry(sig).or_insert(0) += count;
            }
        }
        for (mine, theirs) in self.positions.iter_mut().zip(other.positions) {
            for (m, t) in mine.iter_mut().zip(theirs) {
                *m += t;
            }
        }
        self
    }
}

fn empirical_scheme1(
    catalog: &Catalog,
    samples: u64,
    seed: u64,
    tv_threshold: Option<f64>,
    alpha: f64,
) -> Result<AuditReport, AuditError> {
    let params = scheme1::compute_params(catalog)?;
    let n = catalog.n_databases() as usize;
    let k = catalog.message_count() as u16;
    let lengths = catalog.lengths().to_vec();

    let mut per_desired = Vec::with_capacity(k as usize);
    let mut positions = DeterministicTally::empty(n, &lengths).positions;
    for desired in 1..=k {
        let tally = (0..samples)
            .into_par_iter()
            .fold(
                || DeterministicTally::empty(n, &lengths),
                |mut acc, s| {
                    let sample_seed = derive_seed(seed, desired as u64, s);
                    let (queries, _) =
                        scheme1::build_queries(catalog, &params, desired, sample_seed)
                            .expect("params were just computed from this catalog");
                    for (db, query) in queries.iter().enumerate() {
                        *acc.per_db[db].entry(QuerySignature::of(query)).or_insert(0) += 1;
                        for entry in query.entries() {
                            if let [seg] = entry.segments() {
                                if seg.length_bits == 1 {
                                    acc.positions[seg.message_index as usize - 1]
                                        [seg.start_bit as usize] += 1;
                                }
                            }
                        }
                    }
                    acc
                },
            )
            .reduce(|| DeterministicTally::empty(n, &lengths), DeterministicTally::merge);
        for (total, extra) in positions.iter_mut().zip(tally.positions) {
            for (m, t) in total.iter_mut().zip(extra) {
                *m += t;
            }
        }
        per_desired.push(tally.per_db);
    }

    let mut statistics = Vec::new();
    for (i, counts) in positions.iter().enumerate() {
        let total: u64 = counts.iter().sum();
        let cells = counts.len() as u128;
        // The chi-square reference needs a reasonable expected count per cell.
        // Within one retrieval the positions are drawn without replacement, so
        // against the multinomial reference the test errs conservative.
        if total as u128 >= 5 * cells {
            let stat = uniform_chi_square(counts.iter().copied(), total, cells);
            statistics.push(statistic_verdict(
                format!("singleton positions of message {}", i + 1),
                stat,
                cells as u64 - 1,
                alpha,
            ));
        }
    }
    Ok(empirical_report(SchemeKind::Deterministic, &per_desired, statistics, tv_threshold, samples))
}

#[derive(Clone)]
struct StochasticTally {
    per_db: Vec<SignatureMultiset>,
    options: BTreeMap<u128, u64>,
}

impl StochasticTally {
    fn empty(n: usize) -> Self {
        StochasticTally { per_db: vec![SignatureMultiset::new(); n], options: BTreeMap::new() }
    }

    fn merge(mut self, other: Self) -> Self {
        for (mine, theirs) in self.per_db.iter_mut().zip(other.per_db) {
            for (sig, count) in theirs {
                *mine.entry(sig).or_insert(0) += count;
            }
        }
        for (index, count) in other.options {
            *self.options.entry(index).or_insert(0) += count;
        }
        self
    }
}

fn empirical_scheme2(
    catalog: &Catalog,
    samples: u64,
    seed: u64,
    tv_threshold: Option<f64>,
    alpha: f64,
) -> Result<AuditReport, AuditError> {
    scheme2::block_layout(catalog)?;
    let n = catalog.n_databases() as usize;
    let k = catalog.message_count() as u16;
    let cells = scheme2::option_count(catalog);

    let mut per_desired = Vec::with_capacity(k as usize);
    let mut statistics = Vec::new();
    for desired in 1..=k {
        let tally = (0..samples)
            .into_par_iter()
            .fold(
                || StochasticTally::empty(n),
                |mut acc, s| {
                    let sample_seed = derive_seed(seed, desired as u64, s);
                    let option = scheme2::sample_option(catalog, desired, sample_seed);
                    *acc.options
                        .entry(scheme2::option_index(catalog, desired, &option))
                        .or_insert(0) += 1;
                    let (queries, _) = scheme2::build_queries_for_option(catalog, desired, &option)
                        .expect("layout was just validated for this catalog");
                    for (db, query) in queries.iter().enumerate() {
                        *acc.per_db[db].entry(QuerySignature::of(query)).or_insert(0) += 1;
                    }
                    acc
                },
            )
            .reduce(|| StochasticTally::empty(n), StochasticTally::merge);
        if samples as u128 >= 5 * cells {
            let stat = uniform_chi_square(tally.options.values().copied(), samples, cells);
            statistics.push(statistic_verdict(
                format!("option frequencies with message {desired} desired"),
                stat,
                u64::try_from(cells - 1).expect("option space small enough to test"),
                alpha,
            ));
        }
        per_desired.push(tally.per_db);
    }
    Ok(empirical_report(SchemeKind::Stochastic, &per_desired, statistics, tv_threshold, samples))
}

fn statistic_verdict(name: String, statistic: f64, dof: u64, alpha: f64) -> StatisticVerdict {
    let critical_value = chi_square_critical(dof, alpha);
    StatisticVerdict {
        name,
        statistic,
        critical_value,
        degrees_of_freedom: dof,
        rejected: statistic > critical_value,
    }
}

fn empirical_report(
    scheme: SchemeKind,
    per_desired: &[Vec<SignatureMultiset>],
    statistics: Vec<StatisticVerdict>,
    tv_threshold: Option<f64>,
    samples: u64,
) -> AuditReport {
    let n = per_desired[0].len();
    let databases = (0..n)
        .map(|db| {
            let mut max_tv = 0.0f64;
            for a in 0..per_desired.len() {
                for b in a + 1..per_desired.len() {
                    max_tv = max_tv.max(total_variation(&per_desired[a][db], &per_desired[b][db]));
                }
            }
            let support: BTreeSet<&QuerySignature> =
                per_desired.iter().flat_map(|row| row[db].keys()).collect();
            let threshold =
                tv_threshold.unwrap_or_else(|| default_tv_threshold(samples, support.len()));
            DatabaseVerdict {
                database_index: db as u16 + 1,
                indistinguishable: max_tv <= threshold,
                max_total_variation: Some(max_tv),
            }
        })
        .collect();
    AuditReport::assemble(AuditMode::Empirical, scheme, databases, statistics)
}

/// Total variation distance between two empirical distributions given as
/// count maps; each map is normalized by its own total.
pub fn total_variation<T: Ord>(a: &BTreeMap<T, u64>, b: &BTreeMap<T, u64>) -> f64 {
    let ta: u64 = a.values().sum();
    let tb: u64 = b.values().sum();
    assert!(ta > 0 && tb > 0, "total variation of an empty sample");
    let keys: BTreeSet<&T> = a.keys().chain(b.keys()).collect();
    let mut sum = 0.0;
    for key in keys {
        let pa = a.get(key).copied().unwrap_or(0) as f64 / ta as f64;
        let pb = b.get(key).copied().unwrap_or(0) as f64 / tb as f64;
        sum += (pa - pb).abs();
    }
    sum / 2.0
}

/// Chi-square statistic of `total` draws against the uniform distribution
/// over `cells` outcomes. Σ(o−e)²/e telescopes to cells·Σo²/total − total,
/// so zero-count cells need not be supplied.
pub fn uniform_chi_square(
    nonzero_counts: impl IntoIterator<Item = u64>,
    total: u64,
    cells: u128,
) -> f64 {
    let sum_sq: u128 = nonzero_counts.into_iter().map(|c| c as u128 * c as u128).sum();
    cells as f64 * (sum_sq as f64) / total as f64 - total as f64
}

/// Upper critical value of the chi-square distribution: rejection happens
/// above this with probability `alpha` under the null.
pub fn chi_square_critical(dof: u64, alpha: f64) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("at least one degree of freedom")
        .inverse_cdf(1.0 - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{meta, ratio, validate_catalog};
    use crate::query::{Query, QueryEntry, Segment};
    use num::{BigRational, Signed};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn catalog(n: u16, lengths: &[u64]) -> Catalog {
        let k = lengths.len() as i64;
        let spec: Vec<(u64, BigRational)> =
            lengths.iter().map(|&l| (l, ratio(1, k))).collect();
        validate_catalog(meta(&spec), n).unwrap()
    }

    #[test]
    fn shapes_erase_bit_positions_but_keep_block_starts() {
        let q = Query::new(
            1,
            vec![
                QueryEntry::single(Segment::bit(1, 5)),
                QueryEntry::single(Segment::bit(1, 9)),
                QueryEntry::single(Segment::new(2, 100, 50)),
            ],
        );
        let sig = QuerySignature::of(&q);
        let shapes = sig.entry_shapes();
        assert_eq!(shapes.len(), 2);
        assert_eq!(
            shapes[0],
            (
                vec![SegmentShape { message_index: 1, length_bits: 1, start_bit: None }],
                2
            )
        );
        assert_eq!(
            shapes[1],
            (
                vec![SegmentShape { message_index: 2, length_bits: 50, start_bit: Some(100) }],
                1
            )
        );
    }

    #[test]
    fn deterministic_signatures_ignore_seed_and_desired() {
        let cat = catalog(2, &[16, 4]);
        let params = scheme1::compute_params(&cat).unwrap();
        let mut seen = Vec::new();
        for desired in 1..=2u16 {
            for seed in 0..4u64 {
                let (queries, _) = scheme1::build_queries(&cat, &params, desired, seed).unwrap();
                seen.push(queries.iter().map(QuerySignature::of).collect::<Vec<_>>());
            }
        }
        for row in &seen[1..] {
            assert_eq!(row, &seen[0]);
        }
    }

    #[test]
    fn structural_audits_pass_for_honest_builders() {
        for cat in [catalog(2, &[16, 4]), catalog(4, &[1024, 256, 64]), catalog(2, &[8])] {
            let report = audit_scheme1_structural(&cat).unwrap();
            assert!(report.pass, "{report:?}");
            assert_eq!(report.databases.len(), cat.n_databases() as usize);
            assert!(report.statistics.is_empty());
        }
        for cat in [catalog(4, &[3000, 1800]), catalog(3, &[400, 300, 100])] {
            let report = audit_scheme2_structural(&cat).unwrap();
            assert!(report.pass, "{report:?}");
        }
    }

    #[test]
    fn an_extra_desired_singleton_is_caught() {
        let cat = catalog(2, &[16, 4]);
        let params = scheme1::compute_params(&cat).unwrap();
        let mut per_desired = Vec::new();
        for desired in 1..=2u16 {
            let (queries, _) = scheme1::build_queries(&cat, &params, desired, 0).unwrap();
            let row: Vec<SignatureMultiset> = queries
                .iter()
                .map(|q| {
                    let mut entries = q.entries().to_vec();
                    if q.database_index == 1 {
                        entries.push(QueryEntry::single(Segment::bit(desired, 0)));
                    }
                    multiset([QuerySignature::of(&Query::new(q.database_index, entries))])
                })
                .collect();
            per_desired.push(row);
        }
        let verdicts = per_database_match(&per_desired);
        assert_eq!(verdicts, vec![false, true]);
    }

    #[test]
    fn a_placement_that_skips_one_rotation_is_caught() {
        let cat = catalog(4, &[3000, 1800]);
        let mut per_desired = Vec::new();
        for desired in 1..=2u16 {
            let mut per_db = vec![SignatureMultiset::new(); 4];
            for mut option in scheme2::enumerate_options(&cat, desired).unwrap() {
                if option.shift == 0 {
                    option.shift = 1;
                }
                let (queries, _) =
                    scheme2::build_queries_for_option(&cat, desired, &option).unwrap();
                for (db, q) in queries.iter().enumerate() {
                    *per_db[db].entry(QuerySignature::of(q)).or_insert(0) += 1;
                }
            }
            per_desired.push(per_db);
        }
        assert!(per_database_match(&per_desired).contains(&false));
    }

    #[test]
    fn empirical_audits_pass_for_honest_samplers() {
        let report =
            audit_empirical(&catalog(4, &[3000, 1800]), SchemeKind::Stochastic, 4000, 11, None, None)
                .unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.statistics.len(), 2);
        for db in &report.databases {
            assert!(db.max_total_variation.unwrap() <= default_tv_threshold(4000, 16));
        }

        let report =
            audit_empirical(&catalog(2, &[16, 4]), SchemeKind::Deterministic, 1200, 11, None, None)
                .unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.statistics.len(), 2);
        for db in &report.databases {
            assert_eq!(db.max_total_variation, Some(0.0));
        }
    }

    #[test]
    fn too_few_samples_are_refused() {
        let err = audit_empirical(&catalog(2, &[16, 4]), SchemeKind::Deterministic, 999, 0, None, None)
            .unwrap_err();
        assert!(matches!(
            err,
            AuditError::InsufficientSamples { samples: 999, minimum: MIN_EMPIRICAL_SAMPLES }
        ));
    }

    #[test]
    fn a_biased_option_sampler_is_caught() {
        // A sampler that picks option 0 half the time and spreads the rest
        // uniformly sits at total variation 1/2 − 1/N^K from uniform.
        let nk = 16i64;
        let uniform = ratio(1, nk);
        let mut tv_exact = (ratio(1, 2) - uniform.clone()).abs();
        tv_exact += (uniform.clone() - ratio(1, 2 * (nk - 1))).abs() * ratio(nk - 1, 1);
        tv_exact /= ratio(2, 1);
        assert_eq!(tv_exact, ratio(1, 2) - ratio(1, nk));

        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let mut counts: BTreeMap<u128, u64> = BTreeMap::new();
        let samples = 4000u64;
        for _ in 0..samples {
            let index = if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..nk as u128) };
            *counts.entry(index).or_insert(0) += 1;
        }
        let stat = uniform_chi_square(counts.values().copied(), samples, nk as u128);
        assert!(stat > chi_square_critical(nk as u64 - 1, 0.01));

        let flat: BTreeMap<u128, u64> = (0..nk as u128).map(|i| (i, 250)).collect();
        let tv = total_variation(&counts, &flat);
        assert!((tv - 0.4375).abs() < 0.05, "observed {tv}");
    }

    #[test]
    fn reports_serialize_with_stable_field_names() {
        let report = audit_scheme1_structural(&catalog(2, &[16, 4])).unwrap();
        let value = serde_json::to_value(&report).unwrap();
        assert_eq!(value["mode"], "structural");
        assert_eq!(value["scheme"], "deterministic");
        assert_eq!(value["pass"], true);
        assert_eq!(value["databases"][0]["database_index"], 1);
        assert!(value["databases"][0].get("max_total_variation").is_none());
    }
}
