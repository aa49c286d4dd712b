//! Queries, answers, and the per-entry XOR evaluation a database performs.
//!
//! A query is a list of entries; each entry asks for the XOR of one bit range
//! from each of up to K distinct messages, right-aligned (shorter operands are
//! zero-extended on the left). Entries within a query are kept in a canonical
//! order that depends only on their structure, never on which message the
//! client actually wants.

use std::cmp::Ordering;

use crate::bits::BitString;
use crate::catalog::Catalog;
use crate::store::MessageStore;

/// One contiguous bit range of one message.
///
/// `message_index` is 1-based in the catalog's sorted order, matching the wire
/// encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub message_index: u16,
    pub start_bit: u64,
    pub length_bits: u32,
}

impl Segment {
    pub fn new(message_index: u16, start_bit: u64, length_bits: u32) -> Self {
        Self { message_index, start_bit, length_bits }
    }

    /// A single bit of one message.
    pub fn bit(message_index: u16, position: u64) -> Self {
        Self { message_index, start_bit: position, length_bits: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("segment of message {message_index} at [{start_bit}, {start_bit}+{length_bits}) exceeds its {message_length_bits}-bit length")]
    SegmentOutOfRange { message_index: u16, start_bit: u64, length_bits: u32, message_length_bits: u64 },
    #[error("entry must hold at least one segment")]
    EmptyEntry,
    #[error("entry references message {message_index} more than once")]
    DuplicateMessage { message_index: u16 },
    #[error("segment of message {message_index} has zero length")]
    EmptySegment { message_index: u16 },
}

/// One downloadable symbol: the XOR of the listed segments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QueryEntry {
    segments: Vec<Segment>,
}

impl QueryEntry {
    /// Builds an entry, sorting segments by message index. At most one segment
    /// per message, every segment non-empty.
    pub fn new(mut segments: Vec<Segment>) -> Result<Self, QueryError> {
        if segments.is_empty() {
            return Err(QueryError::EmptyEntry);
        }
        segments.sort_by_key(|s| s.message_index);
        for pair in segments.windows(2) {
            if pair[0].message_index == pair[1].message_index {
                return Err(QueryError::DuplicateMessage { message_index: pair[0].message_index });
            }
        }
        if let Some(s) = segments.iter().find(|s| s.length_bits == 0) {
            return Err(QueryError::EmptySegment { message_index: s.message_index });
        }
        Ok(Self { segments })
    }

    pub fn single(segment: Segment) -> Self {
        Self::new(vec![segment]).expect("one non-empty segment is always a valid entry")
    }

    /// Segments sorted by message index.
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Bit length of this entry's answer: the longest segment.
    pub fn answer_len(&self) -> u32 {
        self.segments.iter().map(|s| s.length_bits).max().expect("entries are non-empty")
    }

    /// Message indices touched by this entry, ascending.
    pub fn message_indices(&self) -> impl Iterator<Item = u16> + '_ {
        self.segments.iter().map(|s| s.message_index)
    }

    /// Structural comparison: segment count, then message-index tuple, then
    /// start offsets, then lengths.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.segments
            .len()
            .cmp(&other.segments.len())
            .then_with(|| self.message_indices().cmp(other.message_indices()))
            .then_with(|| {
                self.segments.iter().map(|s| s.start_bit).cmp(other.segments.iter().map(|s| s.start_bit))
            })
            .then_with(|| {
                self.segments.iter().map(|s| s.length_bits).cmp(other.segments.iter().map(|s| s.length_bits))
            })
    }
}

/// Everything one database is asked to answer for one retrieval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    /// 1-based index of the database this query is addressed to. Not part of
    /// the wire payload; kept for bookkeeping on the client side.
    pub database_index: u16,
    entries: Vec<QueryEntry>,
}

impl Query {
    /// Builds a query and puts its entries into canonical order.
    pub fn new(database_index: u16, mut entries: Vec<QueryEntry>) -> Self {
        entries.sort_by(QueryEntry::canonical_cmp);
        Self { database_index, entries }
    }

    pub fn entries(&self) -> &[QueryEntry] {
        &self.entries
    }

    /// Total bits the answer to this query will carry.
    pub fn answer_bits(&self) -> u64 {
        self.entries.iter().map(|e| e.answer_len() as u64).sum()
    }

    /// True if entries are in canonical order (they always are for queries
    /// built through [`Query::new`]; decoded queries are re-checked).
    pub fn is_canonical(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].canonical_cmp(&w[1]) != Ordering::Greater)
    }
}

/// Per-entry answers, in query entry order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub entry_answers: Vec<BitString>,
}

impl Answer {
    pub fn downloaded_bits(&self) -> u64 {
        self.entry_answers.iter().map(|a| a.len() as u64).sum()
    }
}

/// Validates a segment against the catalog.
pub fn check_segment(catalog: &Catalog, segment: &Segment) -> Result<(), QueryError> {
    let k = catalog.message_count() as u16;
    if segment.message_index == 0 || segment.message_index > k {
        return Err(QueryError::SegmentOutOfRange {
            message_index: segment.message_index,
            start_bit: segment.start_bit,
            length_bits: segment.length_bits,
            message_length_bits: 0,
        });
    }
    let len = catalog.length_bits(segment.message_index);
    if segment.start_bit + segment.length_bits as u64 > len {
        return Err(QueryError::SegmentOutOfRange {
            message_index: segment.message_index,
            start_bit: segment.start_bit,
            length_bits: segment.length_bits,
            message_length_bits: len,
        });
    }
    Ok(())
}

/// Evaluates a query against a replica's store: each entry's answer is the
/// right-aligned XOR of its segments' bits.
///
/// This is the entire database-side computation. It never sees, and cannot
/// depend on, which message the client wants.
pub fn answer_query(store: &MessageStore, query: &Query) -> Result<Answer, QueryError> {
    let mut entry_answers = Vec::with_capacity(query.entries().len());
    for entry in query.entries() {
        let out_len = entry.answer_len() as usize;
        let mut acc = BitString::zeros(out_len);
        for seg in entry.segments() {
            let msg = store
                .try_message(seg.message_index)
                .ok_or(QueryError::SegmentOutOfRange {
                    message_index: seg.message_index,
                    start_bit: seg.start_bit,
                    length_bits: seg.length_bits,
                    message_length_bits: 0,
                })?;
            let start = seg.start_bit as usize;
            let len = seg.length_bits as usize;
            if start + len > msg.len() {
                return Err(QueryError::SegmentOutOfRange {
                    message_index: seg.message_index,
                    start_bit: seg.start_bit,
                    length_bits: seg.length_bits,
                    message_length_bits: msg.len() as u64,
                });
            }
            acc.xor_from(out_len - len, msg, start, len);
        }
        entry_answers.push(acc);
    }
    Ok(Answer { entry_answers })
}

/// A full retrieval record: what was sent to and received from every replica.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    /// 1-based sorted index of the retrieved message.
    pub desired_index: u16,
    /// One query per database, index 1..=N in order.
    pub queries: Vec<Query>,
    /// Answers in the same database order.
    pub answers: Vec<Answer>,
    /// Total bits downloaded across all databases.
    pub downloaded_bits: u64,
    /// Bits of the desired message recovered (its full length on success).
    pub useful_bits: u64,
}

/// Recomputes the download cost of a transcript from its answers.
pub fn realized_download(transcript: &Transcript) -> u64 {
    transcript.answers.iter().map(Answer::downloaded_bits).sum()
}
