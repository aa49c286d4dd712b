//! Frame codec for the query/answer protocol.
//!
//! A frame is a big-endian u32 payload length, one type byte, then the
//! payload. Query payloads never carry the desired message index, only the
//! entries a single database is meant to answer.
//!
//! ```text
//! QUERY  0x01: entry_count u32, per entry: segment_count u16,
//!              per segment: message_index u16, start_bit u64, length_bits u32
//! ANSWER 0x02: entry_count u32, per entry: length_bits u32, packed bits
//! ERROR  0x03: code u16, UTF-8 message
//! PING   0x04 / PONG 0x05: empty payload
//! ```

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::bits::{byte_len, BitString};
use crate::query::{QueryEntry, Segment};

pub const FRAME_QUERY: u8 = 0x01;
pub const FRAME_ANSWER: u8 = 0x02;
pub const FRAME_ERROR: u8 = 0x03;
pub const FRAME_PING: u8 = 0x04;
pub const FRAME_PONG: u8 = 0x05;

pub const ERR_MALFORMED_FRAME: u16 = 1;
pub const ERR_UNKNOWN_FRAME_TYPE: u16 = 2;
pub const ERR_SEGMENT_OUT_OF_RANGE: u16 = 10;

/// Ceiling on accepted payloads; a reader drains anything larger and reports
/// it without falling out of frame sync.
pub const DEFAULT_MAX_PAYLOAD: u32 = 256 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    Query(Vec<QueryEntry>),
    Answer(Vec<BitString>),
    Error { code: u16, message: String },
    Ping,
    Pong,
}

#[derive(Debug, Error)]
pub enum WireError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("frame payload of {length} bytes exceeds the {limit}-byte limit")]
    Oversized { length: u32, limit: u32 },
    #[error("unknown frame type {0:#04x}")]
    UnknownType(u8),
    #[error("malformed {frame} payload: {detail}")]
    Malformed { frame: &'static str, detail: String },
}

impl WireError {
    /// True when the byte stream is still aligned on a frame boundary, so the
    /// connection can keep serving after an error report.
    pub fn is_recoverable(&self) -> bool {
        !matches!(self, WireError::Io(_))
    }

    /// Error code to report to the peer.
    pub fn code(&self) -> u16 {
        match self {
            WireError::UnknownType(_) => ERR_UNKNOWN_FRAME_TYPE,
            _ => ERR_MALFORMED_FRAME,
        }
    }
}

pub fn encode_payload(frame: &Frame) -> (u8, Vec<u8>) {
    match frame {
        Frame::Query(entries) => (FRAME_QUERY, encode_query_payload(entries)),
        Frame::Answer(answers) => (FRAME_ANSWER, encode_answer_payload(answers)),
        Frame::Error { code, message } => {
            let mut payload = code.to_be_bytes().to_vec();
            payload.extend_from_slice(message.as_bytes());
            (FRAME_ERROR, payload)
        }
        Frame::Ping => (FRAME_PING, Vec::new()),
        Frame::Pong => (FRAME_PONG, Vec::new()),
    }
}

pub fn decode_payload(frame_type: u8, payload: &[u8]) -> Result<Frame, WireError> {
    match frame_type {
        FRAME_QUERY => Ok(Frame::Query(decode_query_payload(payload)?)),
        FRAME_ANSWER => Ok(Frame::Answer(decode_answer_payload(payload)?)),
        FRAME_ERROR => {
            let mut r = Reader::new(payload, "error");
            let code = r.u16()?;
            let message = String::from_utf8(r.rest().to_vec())
                .map_err(|_| malformed("error", "message is not UTF-8"))?;
            Ok(Frame::Error { code, message })
        }
        FRAME_PING | FRAME_PONG => {
            if !payload.is_empty() {
                return Err(malformed("ping", "payload must be empty"));
            }
            Ok(if frame_type == FRAME_PING { Frame::Ping } else { Frame::Pong })
        }
        other => Err(WireError::UnknownType(other)),
    }
}

/// Full frame bytes: length, type, payload.
pub fn encode_frame(frame: &Frame) -> Vec<u8> {
    let (frame_type, payload) = encode_payload(frame);
    let length = u32::try_from(payload.len()).expect("payload fits a u32 length prefix");
    let mut out = Vec::with_capacity(5 + payload.len());
    out.extend_from_slice(&length.to_be_bytes());
    out.push(frame_type);
    out.extend_from_slice(&payload);
    out
}

pub fn write_frame(w: &mut impl Write, frame: &Frame) -> io::Result<()> {
    w.write_all(&encode_frame(frame))?;
    w.flush()
}

/// Reads one frame. An oversized payload is drained from the stream before
/// the error returns, keeping the reader usable.
pub fn read_frame(r: &mut impl Read, max_payload: u32) -> Result<Frame, WireError> {
    let mut header = [0u8; 5];
    r.read_exact(&mut header)?;
    let length = u32::from_be_bytes(header[..4].try_into().unwrap());
    let frame_type = header[4];
    if length > max_payload {
        io::copy(&mut r.take(length as u64), &mut io::sink())?;
        return Err(WireError::Oversized { length, limit: max_payload });
    }
    let mut payload = vec![0u8; length as usize];
    r.read_exact(&mut payload)?;
    decode_payload(frame_type, &payload)
}

/// Splits a query's entries into chunks whose encoded payloads stay within
/// `max_payload`. A single entry too large for the limit still travels alone.
pub fn split_query_entries(entries: &[QueryEntry], max_payload: u32) -> Vec<Vec<QueryEntry>> {
    let budget = max_payload.saturating_sub(4) as usize;
    let mut chunks = Vec::new();
    let mut current = Vec::new();
    let mut used = 0usize;
    for entry in entries {
        let size = 2 + entry.segments().len() * 14;
        if !current.is_empty() && used + size > budget {
            chunks.push(std::mem::take(&mut current));
            used = 0;
        }
        used += size;
        current.push(entry.clone());
    }
    if !current.is_empty() || chunks.is_empty() {
        chunks.push(current);
    }
    chunks
}

fn encode_query_payload(entries: &[QueryEntry]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&u32::try_from(entries.len()).expect("entry count fits u32").to_be_bytes());
    for entry in entries {
        let segments = entry.segments();
        out.extend_from_slice(&u16::try_from(segments.len()).expect("segment count fits u16").to_be_bytes());
        for seg in segments {
            out.extend_from_slice(&seg.message_index.to_be_bytes());
            out.extend_from_slice(&seg.start_bit.to_be_bytes());
            out.extend_from_slice(&seg.length_bits.to_be_bytes());
        }
    }
    out
}

fn decode_query_payload(payload: &[u8]) -> Result<Vec<QueryEntry>, WireError> {
    let mut r = Reader::new(payload, "query");
    let entry_count = r.u32()?;
    let mut entries = Vec::new();
    for _ in 0..entry_count {
        let segment_count = r.u16()?;
        let mut segments = Vec::with_capacity(segment_count as usize);
        for _ in 0..segment_count {
            let message_index = r.u16()?;
            let start_bit = r.u64()?;
            let length_bits = r.u32()?;
            segments.push(Segment::new(message_index, start_bit, length_bits));
        }
        entries.push(
            QueryEntry::new(segments).map_err(|e| malformed("query", &e.to_string()))?,
        );
    }
    r.finish()?;
    Ok(entries)
}

fn encode_answer_payload(answers: &[BitString]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&u32::try_from(answers.len()).expect("entry count fits u32").to_be_bytes());
    for bits in answers {
        out.extend_from_slice(&u32::try_from(bits.len()).expect("answer fits u32 bits").to_be_bytes());
        out.extend_from_slice(bits.as_bytes());
    }
    out
}

fn decode_answer_payload(payload: &[u8]) -> Result<Vec<BitString>, WireError> {
    let mut r = Reader::new(payload, "answer");
    let entry_count = r.u32()?;
    let mut answers = Vec::with_capacity(entry_count.min(1024) as usize);
    for _ in 0..entry_count {
        let length_bits = r.u32()? as usize;
        let bytes = r.bytes(byte_len(length_bits))?.to_vec();
        answers.push(
            BitString::from_packed(bytes, length_bits)
                .map_err(|e| malformed("answer", &e.to_string()))?,
        );
    }
    r.finish()?;
    Ok(answers)
}

fn malformed(frame: &'static str, detail: &str) -> WireError {
    WireError::Malformed { frame, detail: detail.to_string() }
}

struct Reader<'a> {
    rest: &'a [u8],
    frame: &'static str,
}

impl<'a> Reader<'a> {
    fn new(rest: &'a [u8], frame: &'static str) -> Self {
        Reader { rest, frame }
    }

    fn bytes(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.rest.len() < n {
            return Err(malformed(self.frame, "payload truncated"));
        }
        let (head, tail) = self.rest.split_at(n);
        self.rest = tail;
        Ok(head)
    }

    fn u16(&mut self) -> Result<u16, WireError> {
        Ok(u16::from_be_bytes(self.bytes(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_be_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_be_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    fn rest(&self) -> &'a [u8] {
        self.rest
    }

    fn finish(&self) -> Result<(), WireError> {
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(malformed(self.frame, "trailing bytes after payload"))
        }
    }
}
