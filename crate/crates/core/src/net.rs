//! TCP transport for the query protocol.
//!
//! The server answers frames statelessly, one thread per connection; nothing
//! about a retrieval spans requests. The client exchanges frames in lockstep,
//! writing one chunk and reading its answer before sending the next, so
//! neither side can deadlock on a full send buffer.

use std::io::{self, BufReader};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use crate::bits::BitString;
use crate::driver::{DatabaseTransport, TransportError};
use crate::query::{answer_query, Answer, Query, QueryEntry, QueryError};
use crate::store::MessageStore;
use crate::wire::{
    read_frame, split_query_entries, write_frame, Frame, WireError, DEFAULT_MAX_PAYLOAD,
    ERR_MALFORMED_FRAME, ERR_SEGMENT_OUT_OF_RANGE,
};

/// Serves `store` on the listener until the process exits.
pub fn serve(listener: TcpListener, store: Arc<MessageStore>) -> io::Result<()> {
    loop {
        match listener.accept() {
            Ok((stream, peer)) => {
                let store = Arc::clone(&store);
                thread::spawn(move || match handle_connection(stream, &store) {
                    Ok(()) => log::debug!("{peer} disconnected"),
                    Err(e) => log::debug!("{peer} dropped: {e}"),
                });
            }
            Err(e) => log::warn!("accept failed: {e}"),
        }
    }
}

/// Binds an ephemeral local port and serves `store` from a background thread.
pub fn serve_background(store: MessageStore) -> io::Result<(SocketAddr, thread::JoinHandle<()>)> {
    serve_background_on("127.0.0.1:0", store)
}

pub fn serve_background_on(
    addr: impl ToSocketAddrs,
    store: MessageStore,
) -> io::Result<(SocketAddr, thread::JoinHandle<()>)> {
    let listener = TcpListener::bind(addr)?;
    let local = listener.local_addr()?;
    let handle = thread::spawn(move || {
        let _ = serve(listener, Arc::new(store));
    });
    Ok((local, handle))
}

fn handle_connection(stream: TcpStream, store: &MessageStore) -> io::Result<()> {
    stream.set_nodelay(true).ok();
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = stream;
    loop {
        let frame = match read_frame(&mut reader, DEFAULT_MAX_PAYLOAD) {
            Ok(frame) => frame,
            Err(WireError::Io(e)) => {
                return if e.kind() == io::ErrorKind::UnexpectedEof { Ok(()) } else { Err(e) };
            }
            // The stream is still frame-aligned: report and keep serving.
            Err(recoverable) => {
                let reply =
                    Frame::Error { code: recoverable.code(), message: recoverable.to_string() };
                write_frame(&mut writer, &reply)?;
                continue;
            }
        };
        write_frame(&mut writer, &respond(store, frame))?;
    }
}

fn respond(store: &MessageStore, frame: Frame) -> Frame {
    match frame {
        Frame::Ping => Frame::Pong,
        Frame::Query(entries) => match answer_entries(store, &entries) {
            Ok(answers) => Frame::Answer(answers),
            Err(e) => Frame::Error { code: query_error_code(&e), message: e.to_string() },
        },
        Frame::Answer(_) | Frame::Error { .. } | Frame::Pong => Frame::Error {
            code: ERR_MALFORMED_FRAME,
            message: "unexpected frame from a client".into(),
        },
    }
}

fn query_error_code(e: &QueryError) -> u16 {
    match e {
        QueryError::SegmentOutOfRange { .. } => ERR_SEGMENT_OUT_OF_RANGE,
        _ => ERR_MALFORMED_FRAME,
    }
}

/// Answers entries one by one, preserving the order they arrived in.
fn answer_entries(
    store: &MessageStore,
    entries: &[QueryEntry],
) -> Result<Vec<BitString>, QueryError> {
    entries
        .iter()
        .map(|entry| {
            let mut answer = answer_query(store, &Query::new(1, vec![entry.clone()]))?;
            Ok(answer.entry_answers.remove(0))
        })
        .collect()
}

/// Client end of one database connection.
pub struct TcpDatabase {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    max_payload: u32,
}

impl TcpDatabase {
    pub fn connect(addr: &SocketAddr, timeout: Duration, max_payload: u32) -> io::Result<Self> {
        let stream = TcpStream::connect_timeout(addr, timeout)?;
        stream.set_read_timeout(Some(timeout))?;
        stream.set_write_timeout(Some(timeout))?;
        stream.set_nodelay(true).ok();
        Ok(TcpDatabase {
            reader: BufReader::new(stream.try_clone()?),
            writer: stream,
            max_payload,
        })
    }

    pub fn ping(&mut self) -> Result<(), TransportError> {
        write_frame(&mut self.writer, &Frame::Ping)?;
        match read_frame(&mut self.reader, self.max_payload)? {
            Frame::Pong => Ok(()),
            other => Err(unexpected("PONG", &other)),
        }
    }
}

impl DatabaseTransport for TcpDatabase {
    fn exchange(&mut self, query: &Query) -> Result<Answer, TransportError> {
        let mut entry_answers = Vec::with_capacity(query.entries().len());
        for chunk in split_query_entries(query.entries(), self.max_payload) {
            let expected = chunk.len();
            write_frame(&mut self.writer, &Frame::Query(chunk))?;
            match read_frame(&mut self.reader, self.max_payload)? {
                Frame::Answer(answers) if answers.len() == expected => {
                    entry_answers.extend(answers);
                }
                Frame::Answer(answers) => {
                    return Err(TransportError::Protocol(format!(
                        "{} answers to {expected} entries",
                        answers.len()
                    )));
                }
                Frame::Error { code, message } => {
                    return Err(TransportError::Remote { code, message });
                }
                other => return Err(unexpected("ANSWER", &other)),
            }
        }
        Ok(Answer { entry_answers })
    }
}

/// Connects one transport per endpoint, in database order.
pub fn tcp_transports(
    endpoints: &[SocketAddr],
    timeout: Duration,
    max_payload: u32,
) -> io::Result<Vec<Box<dyn DatabaseTransport>>> {
    endpoints
        .iter()
        .map(|addr| {
            let db = TcpDatabase::connect(addr, timeout, max_payload)?;
            Ok(Box::new(db) as Box<dyn DatabaseTransport>)
        })
        .collect()
}

fn unexpected(wanted: &str, got: &Frame) -> TransportError {
    let name = match got {
        Frame::Query(_) => "QUERY",
        Frame::Answer(_) => "ANSWER",
        Frame::Error { .. } => "ERROR",
        Frame::Ping => "PING",
        Frame::Pong => "PONG",
    };
    TransportError::Protocol(format!("expected {wanted}, got {name}"))
}
