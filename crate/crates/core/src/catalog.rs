//! Message catalogs: lengths, priors, and database count.
//!
//! A catalog fixes the parameters every other module works from. Messages are
//! kept sorted by non-increasing length (ties keep their input order), because
//! both retrieval schemes and the capacity formulas index messages in that
//! order. The original input positions are retained so callers can map results
//! back to whatever order their configuration listed.

use num::{BigRational, One, Zero};

/// One message's metadata: a caller-chosen identifier, its exact bit length,
/// and the prior probability that a retrieval targets it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageMeta {
    pub id: String,
    pub length_bits: u64,
    pub prior: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("catalog holds no messages")]
    EmptyCatalog,
    #[error("{n_databases} database(s) given; at least 2 non-colluding replicas are required")]
    TooFewDatabases { n_databases: u16 },
    #[error("message {id:?} has prior {prior} but priors must be strictly positive")]
    NonPositivePrior { id: String, prior: String },
    #[error("priors sum to {sum}, not 1")]
    PriorsDoNotSumToOne { sum: String },
    #[error("message {id:?} has zero length")]
    ZeroLength { id: String },
}

/// A validated catalog. Construct via [`validate_catalog`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    n_databases: u16,
    messages: Vec<MessageMeta>,
    input_positions: Vec<usize>,
}

impl Catalog {
    pub fn n_databases(&self) -> u16 {
        self.n_databases
    }

    /// Number of messages K.
    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    /// Messages sorted by non-increasing length.
    pub fn messages(&self) -> &[MessageMeta] {
        &self.messages
    }

    /// Metadata for a 1-based message index in sorted order.
    pub fn message(&self, message_index: u16) -> &MessageMeta {
        &self.messages[message_index as usize - 1]
    }

    pub fn length_bits(&self, message_index: u16) -> u64 {
        self.message(message_index).length_bits
    }

    /// Position the `sorted_index`-th message (0-based) held in the input that
    /// was validated.
    pub fn input_position(&self, sorted_index: usize) -> usize {
        self.input_positions[sorted_index]
    }

    /// 1-based sorted index of the first message with the given id.
    pub fn index_of_id(&self, id: &str) -> Option<u16> {
        self.messages.iter().position(|m| m.id == id).map(|i| i as u16 + 1)
    }

    /// Sorted lengths, longest first.
    pub fn lengths(&self) -> Vec<u64> {
        self.messages.iter().map(|m| m.length_bits).collect()
    }
}

/// Checks catalog invariants and returns the canonical (length-sorted) form.
///
/// Requirements: at least one message, every length positive, every prior
/// strictly positive, priors summing to exactly 1, and at least two databases.
pub fn validate_catalog(messages: Vec<MessageMeta>, n_databases: u16) -> Result<Catalog, CatalogError> {
    if messages.is_empty() {
        return Err(CatalogError::EmptyCatalog);
    }
    if n_databases < 2 {
        return Err(CatalogError::TooFewDatabases { n_databases });
    }
    for m in &messages {
        if m.length_bits == 0 {
            return Err(CatalogError::ZeroLength { id: m.id.clone() });
        }
        if m.prior <= BigRational::zero() {
            return Err(CatalogError::NonPositivePrior { id: m.id.clone(), prior: m.prior.to_string() });
        }
    }
    let sum: BigRational = messages.iter().map(|m| m.prior.clone()).sum();
    if !sum.is_one() {
        return Err(CatalogError::PriorsDoNotSumToOne { sum: sum.to_string() });
    }

    let mut order: Vec<usize> = (0..messages.len()).collect();
    // Stable sort: equal lengths keep input order.
    order.sort_by_key(|&i| std::cmp::Reverse(messages[i].length_bits));

    let mut sorted = Vec::with_capacity(messages.len());
    let mut slots: Vec<Option<MessageMeta>> = messages.into_iter().map(Some).collect();
    for &i in &order {
        sorted.push(slots[i].take().expect("each input position moves once"));
    }
    Ok(Catalog { n_databases, messages: sorted, input_positions: order })
}

/// Prior-weighted mean message length, exact.
pub fn expected_length(catalog: &Catalog) -> BigRational {
    catalog
        .messages()
        .iter()
        .map(|m| &m.prior * BigRational::from_integer(m.length_bits.into()))
        .sum()
}

/// Convenience constructor for exact rational priors.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Builds metadata with ids `m1, m2, ...`; handy for tests and fixtures.
pub fn meta(lengths_and_priors: &[(u64, BigRational)]) -> Vec<MessageMeta> {
    lengths_and_priors
        .iter()
        .enumerate()
        .map(|(i, (len, p))| MessageMeta { id: format!("m{}", i + 1), length_bits: *len, prior: p.clone() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(lengths: &[u64]) -> Vec<MessageMeta> {
        let k = lengths.len() as i64;
        meta(&lengths.iter().map(|&l| (l, ratio(1, k))).collect::<Vec<_>>())
    }

    #[test]
    fn sorts_longest_first_and_remembers_input_order() {
        let cat = validate_catalog(uniform(&[256, 1024, 512, 512]), 2).unwrap();
        assert_eq!(cat.lengths(), vec![1024, 512, 512, 256]);
        // Input positions of the sorted entries; the two 512s keep input order.
        assert_eq!((0..4).map(|i| cat.input_position(i)).collect::<Vec<_>>(), vec![1, 2, 3, 0]);
        assert_eq!(cat.index_of_id("m2"), Some(1));
        assert_eq!(cat.index_of_id("m1"), Some(4));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(validate_catalog(vec![], 2), Err(CatalogError::EmptyCatalog));
        assert_eq!(
            validate_catalog(uniform(&[8]), 1),
            Err(CatalogError::TooFewDatabases { n_databases: 1 })
        );
        let mut bad = uniform(&[8, 8]);
        bad[0].prior = ratio(0, 1);
        assert!(matches!(validate_catalog(bad, 2), Err(CatalogError::NonPositivePrior { .. })));
        let drift = meta(&[(8, ratio(1, 2)), (8, ratio(1, 3))]);
        assert!(matches!(validate_catalog(drift, 2), Err(CatalogError::PriorsDoNotSumToOne { .. })));
        let zero = meta(&[(0, ratio(1, 1))]);
        assert!(matches!(validate_catalog(zero, 2), Err(CatalogError::ZeroLength { .. })));
    }

    #[test]
    fn validation_is_idempotent() {
        let cat = validate_catalog(uniform(&[100, 300, 200]), 3).unwrap();
        let again = validate_catalog(cat.messages().to_vec(), cat.n_databases()).unwrap();
        assert_eq!(cat.messages(), again.messages());
        assert_eq!(again.input_positions, vec![0, 1, 2]);
    }

    #[test]
    fn expected_length_is_exact() {
        // 1024/3 + 256*2/3 = 512 exactly.
        let cat = validate_catalog(
            meta(&[(1024, ratio(1, 3)), (256, ratio(2, 3))]),
            2,
        )
        .unwrap();
        assert_eq!(expected_length(&cat), ratio(512, 1));
    }
}
