//! Replicated message stores and their on-disk container.
//!
//! Every database holds the same store. On disk the layout is:
//!
//! ```text
//! magic "SPIR" | version u16 | message count u16 | per-message length u64 ...
//! | per-message payload (MSB-first packed bits, byte-aligned per message) ...
//! ```
//!
//! All integers are big-endian. Readers reject unknown versions, truncated
//! payloads, trailing data, and nonzero padding bits, so a file that loads is
//! byte-identical to what a writer would produce for the same contents.

use std::io::{self, Read, Write};

use rand::Rng;

use crate::bits::{byte_len, BitString, PackingError};
use crate::catalog::Catalog;

pub const STORE_MAGIC: [u8; 4] = *b"SPIR";
pub const STORE_VERSION: u16 = 1;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store holds {got} messages but the catalog lists {expected}")]
    MessageCountMismatch { expected: usize, got: usize },
    #[error("message {index} holds {got} bits but the catalog lists {expected}")]
    LengthMismatch { index: u16, expected: u64, got: u64 },
}

#[derive(Debug, thiserror::Error)]
pub enum StoreFileError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic {0:02x?}; not a store file")]
    BadMagic([u8; 4]),
    #[error("unsupported store version {0}")]
    UnsupportedVersion(u16),
    #[error("message {index} payload is invalid: {source}")]
    BadPayload { index: u16, source: PackingError },
    #[error("file continues past the last message payload")]
    TrailingData,
    #[error("message length {0} bits does not fit in memory")]
    OversizedMessage(u64),
}

/// The K message payloads in catalog (sorted) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageStore {
    messages: Vec<BitString>,
}

impl MessageStore {
    /// Wraps payloads after checking them against the catalog.
    pub fn new(catalog: &Catalog, messages: Vec<BitString>) -> Result<Self, StoreError> {
        let store = Self { messages };
        store.check_catalog(catalog)?;
        Ok(store)
    }

    /// Wraps payloads without a catalog; lengths are self-describing.
    pub fn from_messages(messages: Vec<BitString>) -> Self {
        Self { messages }
    }

    /// Uniformly random contents matching the catalog.
    pub fn random<R: Rng + ?Sized>(catalog: &Catalog, rng: &mut R) -> Self {
        let messages = catalog
            .messages()
            .iter()
            .map(|m| BitString::random(m.length_bits as usize, rng))
            .collect();
        Self { messages }
    }

    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    /// Payload of a 1-based message index. Panics when out of range.
    pub fn message(&self, message_index: u16) -> &BitString {
        &self.messages[message_index as usize - 1]
    }

    pub fn try_message(&self, message_index: u16) -> Option<&BitString> {
        (1..=self.messages.len() as u16)
            .contains(&message_index)
            .then(|| self.message(message_index))
    }

    pub fn check_catalog(&self, catalog: &Catalog) -> Result<(), StoreError> {
        if self.messages.len() != catalog.message_count() {
            return Err(StoreError::MessageCountMismatch {
                expected: catalog.message_count(),
                got: self.messages.len(),
            });
        }
        for (i, (bits, meta)) in self.messages.iter().zip(catalog.messages()).enumerate() {
            if bits.len() as u64 != meta.length_bits {
                return Err(StoreError::LengthMismatch {
                    index: i as u16 + 1,
                    expected: meta.length_bits,
                    got: bits.len() as u64,
                });
            }
        }
        Ok(())
    }

    pub fn total_bits(&self) -> u64 {
        self.messages.iter().map(|m| m.len() as u64).sum()
    }
}

/// Serializes a store to the container format.
pub fn write_store<W: Write>(writer: &mut W, store: &MessageStore) -> Result<(), StoreFileError> {
    writer.write_all(&STORE_MAGIC)?;
    writer.write_all(&STORE_VERSION.to_be_bytes())?;
    writer.write_all(&(store.message_count() as u16).to_be_bytes())?;
    for i in 1..=store.message_count() as u16 {
        writer.write_all(&(store.message(i).len() as u64).to_be_bytes())?;
    }
    for i in 1..=store.message_count() as u16 {
        writer.write_all(store.message(i).as_bytes())?;
    }
    Ok(())
}

/// Reads a store, enforcing the format strictly.
pub fn read_store<R: Read>(reader: &mut R) -> Result<MessageStore, StoreFileError> {
    let mut magic = [0u8; 4];
    reader.read_exact(&mut magic)?;
    if magic != STORE_MAGIC {
        return Err(StoreFileError::BadMagic(magic));
    }
    let version = read_u16(reader)?;
    if version != STORE_VERSION {
        return Err(StoreFileError::UnsupportedVersion(version));
    }
    let count = read_u16(reader)? as usize;
    let mut lengths = Vec::with_capacity(count);
    for _ in 0..count {
        lengths.push(read_u64(reader)?);
    }
    let mut messages = Vec::with_capacity(count);
    for (i, &len) in lengths.iter().enumerate() {
        let len_usize = usize::try_from(len).map_err(|_| StoreFileError::OversizedMessage(len))?;
        let mut payload = vec![0u8; byte_len(len_usize)];
        reader.read_exact(&mut payload)?;
        let bits = BitString::from_packed(payload, len_usize)
            .map_err(|source| StoreFileError::BadPayload { index: i as u16 + 1, source })?;
        messages.push(bits);
    }
    let mut probe = [0u8; 1];
    if reader.read(&mut probe)? != 0 {
        return Err(StoreFileError::TrailingData);
    }
    Ok(MessageStore::from_messages(messages))
}

/// Exact size in bytes of the container for the given message lengths.
pub fn store_file_size(lengths: &[u64]) -> u64 {
    let header = 4 + 2 + 2 + 8 * lengths.len() as u64;
    header + lengths.iter().map(|&l| l.div_ceil(8)).sum::<u64>()
}

fn read_u16<R: Read>(reader: &mut R) -> io::Result<u16> {
    let mut b = [0u8; 2];
    reader.read_exact(&mut b)?;
    Ok(u16::from_be_bytes(b))
}

fn read_u64<R: Read>(reader: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    reader.read_exact(&mut b)?;
    Ok(u64::from_be_bytes(b))
}
