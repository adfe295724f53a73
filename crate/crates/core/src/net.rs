//! Query/answer transport: length-prefixed canonical JSON over TCP.
//!
//! A frame is a 4-byte big-endian payload length followed by one UTF-8
//! JSON object with a `"type"` field. Payloads are canonical (sorted keys,
//! no whitespace), so equal messages encode to equal bytes. Each TCP
//! connection carries exactly one query frame and one reply frame.

use std::io::{self, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::error::Error;
use crate::gf::{is_prime, PrimeField};
use crate::matrix::Matrix;
use crate::protocols::{server_answer, Answer, Dataset, Model, ProtocolKind, Query};

pub const WIRE_VERSION: u32 = 1;
pub const DEFAULT_MAX_FRAME: usize = 64 * 1024 * 1024;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
pub const MAX_FRAME_ENV: &str = "PLT_MAX_FRAME";

#[derive(Debug, Error)]
pub enum NetError {
    #[error("frame of {len} bytes exceeds the maximum of {max}")]
    OversizeFrame { len: usize, max: usize },
    #[error("incomplete frame")]
    IncompleteFrame,
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("unexpected message: {0}")]
    UnexpectedMessage(String),
    #[error("server error {code}: {message}")]
    Remote { code: String, message: String },
    #[error("timed out")]
    Timeout,
    #[error("connection failed: {0}")]
    Connect(io::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Core(#[from] Error),
}

impl NetError {
    /// Stable wire code for this error.
    pub fn code(&self) -> &str {
        match self {
            NetError::OversizeFrame { .. } => "oversize_frame",
            NetError::IncompleteFrame => "incomplete_frame",
            NetError::MalformedJson(_) => "malformed_json",
            NetError::SchemaViolation(_) => "schema_violation",
            NetError::UnexpectedMessage(_) => "unexpected_message",
            NetError::Remote { code, .. } => code,
            NetError::Timeout => "timeout",
            NetError::Connect(_) => "connect_failed",
            NetError::Io(_) => "io_error",
            NetError::Core(Error::FieldMismatch { .. }) => "field_mismatch",
            NetError::Core(Error::Shape(_)) => "shape_mismatch",
            NetError::Core(_) => "invalid_request",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireQuery {
    pub version: u32,
    pub q: u64,
    pub k: usize,
    pub model: Model,
    pub g: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireAnswer {
    pub version: u32,
    pub y: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireError {
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum WireMessage {
    Query(WireQuery),
    Answer(WireAnswer),
    Error(WireError),
}

impl WireQuery {
    /// Only `G`, `q`, `K` and the model leave the client.
    pub fn from_query(query: &Query) -> Self {
        Self {
            version: WIRE_VERSION,
            q: query.field().modulus(),
            k: query.k,
            model: query.model,
            g: query.g.to_rows(),
        }
    }

    pub fn validate(&self) -> Result<(), NetError> {
        check_version(self.version)?;
        if self.q < 2 || self.q >= crate::gf::MAX_MODULUS || !is_prime(self.q) {
            return Err(NetError::SchemaViolation(format!("q = {} is not a supported prime", self.q)));
        }
        for (i, row) in self.g.iter().enumerate() {
            if row.len() != self.k {
                return Err(NetError::SchemaViolation(format!(
                    "row {i} of g has {} entries, expected k = {}",
                    row.len(),
                    self.k
                )));
            }
            if let Some(x) = row.iter().find(|&&x| x >= self.q) {
                return Err(NetError::SchemaViolation(format!("entry {x} in g is not below q = {}", self.q)));
            }
        }
        Ok(())
    }

    pub fn field(&self) -> Result<PrimeField, NetError> {
        PrimeField::new(self.q).map_err(|e| NetError::SchemaViolation(e.to_string()))
    }

    pub fn matrix(&self) -> Result<Matrix, NetError> {
        self.validate()?;
        Ok(Matrix::from_rows_with_cols(self.field()?, &self.g, self.k)?)
    }

    /// Rebuilds a [`Query`]; the protocol tag is not transmitted.
    pub fn to_query(&self, protocol: ProtocolKind) -> Result<Query, NetError> {
        Ok(Query { g: self.matrix()?, k: self.k, model: self.model, protocol })
    }
}

impl WireAnswer {
    pub fn from_answer(answer: &Answer) -> Self {
        Self { version: WIRE_VERSION, y: answer.y.to_rows() }
    }

    pub fn validate(&self) -> Result<(), NetError> {
        check_version(self.version)?;
        if let Some(first) = self.y.first() {
            if self.y.iter().any(|r| r.len() != first.len()) {
                return Err(NetError::SchemaViolation("rows of y have different lengths".into()));
            }
        }
        Ok(())
    }

    /// Interprets `y` over `field`; entries must be residues.
    pub fn to_answer(&self, field: PrimeField) -> Result<Answer, NetError> {
        self.validate()?;
        let y = Matrix::from_rows(field, &self.y)
            .map_err(|e| NetError::SchemaViolation(format!("answer: {e}")))?;
        Ok(Answer { y })
    }
}

fn check_version(v: u32) -> Result<(), NetError> {
    if v == WIRE_VERSION {
        Ok(())
    } else {
        Err(NetError::SchemaViolation(format!("unsupported version {v}")))
    }
}

impl WireMessage {
    pub fn validate(&self) -> Result<(), NetError> {
        match self {
            WireMessage::Query(q) => q.validate(),
            WireMessage::Answer(a) => a.validate(),
            WireMessage::Error(_) => Ok(()),
        }
    }

    pub fn error(code: &str, message: impl Into<String>) -> Self {
        WireMessage::Error(WireError { code: code.to_owned(), message: message.into() })
    }
}

/// Writes `value` with object keys sorted and no whitespace.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_canonical(value, &mut out);
    out
}

fn write_canonical(value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_canonical(&map[key], out);
            }
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

/// Canonical JSON payload of a message (no length prefix).
pub fn to_canonical_string<T: Serialize>(msg: &T) -> Result<String, NetError> {
    let value = serde_json::to_value(msg).map_err(|e| NetError::SchemaViolation(e.to_string()))?;
    Ok(canonical_json(&value))
}

/// Parses and validates one message payload.
pub fn parse_message(payload: &[u8]) -> Result<WireMessage, NetError> {
    let value: Value = serde_json::from_slice(payload).map_err(|e| NetError::MalformedJson(e.to_string()))?;
    match value.get("type") {
        Some(Value::String(_)) if value.is_object() => {}
        _ => return Err(NetError::SchemaViolation("expected an object with a string \"type\"".into())),
    }
    let msg: WireMessage = serde_json::from_value(value).map_err(|e| NetError::SchemaViolation(e.to_string()))?;
    msg.validate()?;
    Ok(msg)
}

pub fn encode_frame(msg: &WireMessage, max_frame: usize) -> Result<Vec<u8>, NetError> {
    let payload = to_canonical_string(msg)?.into_bytes();
    if payload.len() > max_frame || payload.len() > u32::MAX as usize {
        return Err(NetError::OversizeFrame { len: payload.len(), max: max_frame });
    }
    let mut out = Vec::with_capacity(4 + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.extend_from_slice(&payload);
    Ok(out)
}

/// Decodes one frame from the front of `bytes`; returns the message and the bytes consumed.
pub fn decode_frame(bytes: &[u8], max_frame: usize) -> Result<(WireMessage, usize), NetError> {
    if bytes.len() < 4 {
        return Err(NetError::IncompleteFrame);
    }
    let len = u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes")) as usize;
    if len > max_frame {
        return Err(NetError::OversizeFrame { len, max: max_frame });
    }
    let payload = bytes.get(4..4 + len).ok_or(NetError::IncompleteFrame)?;
    Ok((parse_message(payload)?, 4 + len))
}

pub fn read_frame<R: Read>(reader: &mut R, max_frame: usize) -> Result<WireMessage, NetError> {
    let mut prefix = [0u8; 4];
    read_all(reader, &mut prefix)?;
    let len = u32::from_be_bytes(prefix) as usize;
    if len > max_frame {
        return Err(NetError::OversizeFrame { len, max: max_frame });
    }
    let mut payload = vec![0u8; len];
    read_all(reader, &mut payload)?;
    parse_message(&payload)
}

fn read_all<R: Read>(reader: &mut R, buf: &mut [u8]) -> Result<(), NetError> {
    reader.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => NetError::IncompleteFrame,
        io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => NetError::Timeout,
        _ => NetError::Io(e),
    })
}

pub fn write_frame<W: Write>(writer: &mut W, msg: &WireMessage, max_frame: usize) -> Result<(), NetError> {
    let bytes = encode_frame(msg, max_frame)?;
    writer.write_all(&bytes)?;
    writer.flush()?;
    Ok(())
}

/// Reads the frame-size limit from `PLT_MAX_FRAME`, falling back to the default.
pub fn max_frame_from_env() -> usize {
    std::env::var(MAX_FRAME_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_FRAME)
}

/// The server's whole decision procedure: a pure function of the query and the dataset.
pub fn answer_wire_query(dataset: &Dataset, query: &WireQuery) -> WireMessage {
    let result = (|| -> Result<WireAnswer, NetError> {
        query.validate()?;
        if query.q != dataset.field().modulus() {
            return Err(Error::FieldMismatch { left: query.q, right: dataset.field().modulus() }.into());
        }
        if query.k != dataset.num_messages() {
            return Err(Error::Shape(format!(
                "query has k = {}, dataset has {} messages",
                query.k,
                dataset.num_messages()
            ))
            .into());
        }
        let q = query.to_query(ProtocolKind::Jplt1)?;
        Ok(WireAnswer::from_answer(&server_answer(&q, dataset)?))
    })();
    match result {
        Ok(a) => WireMessage::Answer(a),
        Err(e) => WireMessage::error(e.code(), e.to_string()),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ServerConfig {
    pub max_frame: usize,
    pub read_timeout: Option<Duration>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self { max_frame: DEFAULT_MAX_FRAME, read_timeout: Some(DEFAULT_TIMEOUT) }
    }
}

pub struct Server {
    listener: TcpListener,
    dataset: Arc<Dataset>,
    config: ServerConfig,
}

impl Server {
    pub fn bind<A: ToSocketAddrs>(addr: A, dataset: Dataset, config: ServerConfig) -> Result<Self, NetError> {
        let listener = TcpListener::bind(addr)?;
        Ok(Self { listener, dataset: Arc::new(dataset), config })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections forever, one thread per connection.
    pub fn serve(self) -> io::Result<()> {
        self.accept_loop(None)
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> io::Result<ServerHandle> {
        let addr = self.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let flag = Arc::clone(&stop);
        let thread = thread::spawn(move || {
            let _ = self.accept_loop(Some(flag));
        });
        Ok(ServerHandle { addr, stop, thread: Some(thread) })
    }

    fn accept_loop(self, stop: Option<Arc<AtomicBool>>) -> io::Result<()> {
        for conn in self.listener.incoming() {
            if stop.as_ref().is_some_and(|s| s.load(Ordering::SeqCst)) {
                break;
            }
            let Ok(stream) = conn else { continue };
            let dataset = Arc::clone(&self.dataset);
            let config = self.config;
            thread::spawn(move || {
                let _ = handle_connection(stream, &dataset, config);
            });
        }
        Ok(())
    }
}

/// Handle to a background server; shuts it down on drop.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn shutdown(mut self) {
        self.stop_now();
    }

    fn stop_now(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the accept loop so it observes the flag.
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_secs(1));
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        if self.thread.is_some() {
            self.stop_now();
        }
    }
}

/// Reads one query frame and writes one reply frame.
pub fn handle_connection(mut stream: TcpStream, dataset: &Dataset, config: ServerConfig) -> Result<(), NetError> {
    stream.set_read_timeout(config.read_timeout)?;
    let reply = match read_frame(&mut stream, config.max_frame) {
        Ok(WireMessage::Query(q)) => answer_wire_query(dataset, &q),
        Ok(other) => {
            let kind = match other {
                WireMessage::Answer(_) => "answer",
                _ => "error",
            };
            WireMessage::error("unexpected_message", format!("expected a query, got {kind}"))
        }
        Err(e) => WireMessage::error(e.code(), e.to_string()),
    };
    let written = write_frame(&mut stream, &reply, config.max_frame).or_else(|e| match e {
        // An answer too large for the frame limit is reported instead.
        NetError::OversizeFrame { .. } => {
            write_frame(&mut stream, &WireMessage::error(e.code(), e.to_string()), config.max_frame)
        }
        other => Err(other),
    });
    let _ = stream.shutdown(Shutdown::Both);
    written
}

#[derive(Clone, Copy, Debug)]
pub struct ClientConfig {
    pub timeout: Duration,
    pub max_frame: usize,
}

impl Default for ClientConfig {
    fn default() -> Self {
        Self { timeout: DEFAULT_TIMEOUT, max_frame: DEFAULT_MAX_FRAME }
    }
}

/// Sends one wire query and returns the server's answer.
pub fn request_wire(endpoint: &str, query: &WireQuery, config: ClientConfig) -> Result<WireAnswer, NetError> {
    let addrs: Vec<SocketAddr> = endpoint.to_socket_addrs().map_err(NetError::Connect)?.collect();
    let mut last = None;
    let mut stream = None;
    for addr in addrs {
        match TcpStream::connect_timeout(&addr, config.timeout) {
            Ok(s) => {
                stream = Some(s);
                break;
            }
            Err(e) if e.kind() == io::ErrorKind::TimedOut => last = Some(NetError::Timeout),
            Err(e) => last = Some(NetError::Connect(e)),
        }
    }
    let mut stream = stream.ok_or_else(|| {
        last.unwrap_or_else(|| NetError::Connect(io::Error::new(io::ErrorKind::NotFound, "no address")))
    })?;
    stream.set_read_timeout(Some(config.timeout))?;
    stream.set_write_timeout(Some(config.timeout))?;
    write_frame(&mut stream, &WireMessage::Query(query.clone()), config.max_frame)?;
    match read_frame(&mut stream, config.max_frame)? {
        WireMessage::Answer(a) => Ok(a),
        WireMessage::Error(WireError { code, message }) => Err(NetError::Remote { code, message }),
        WireMessage::Query(_) => Err(NetError::UnexpectedMessage("server replied with a query".into())),
    }
}

/// Sends `query.g` and returns the decoded answer, checked against the query shape.
pub fn request(endpoint: &str, query: &Query, config: ClientConfig) -> Result<Answer, NetError> {
    let wire = request_wire(endpoint, &WireQuery::from_query(query), config)?;
    let answer = wire.to_answer(query.field())?;
    if answer.y.rows() != query.g.rows() {
        return Err(NetError::SchemaViolation(format!(
            "answer has {} rows, query has {}",
            answer.y.rows(),
            query.g.rows()
        )));
    }
    Ok(answer)
}
