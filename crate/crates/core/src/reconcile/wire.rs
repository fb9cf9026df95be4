//! Frame codec for the reconciliation transport.
//!
//! Frame: `"TEQK"` | version `u8` | type `u8` | payload length `u32` BE | payload.
//! All integers are big-endian.
//!
//! | type | payload |
//! |------|---------|
//! | HELLO    | nonce `[u8; 8]`, resume-from block `u32` |
//! | PARAMS   | `n_bins u8`, `sigma f64`, code id as `u16` length + UTF-8 |
//! | SYNDROME | block index `u32`, syndrome symbols packed MSB-first |
//! | RESULT   | block index `u32`, status `u8` |
//! | BYE      | empty |

use crate::{Error, Result};
use std::io::{Read, Write};

pub const MAGIC: [u8; 4] = *b"TEQK";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
/// Largest payload a peer may announce.
pub const MAX_PAYLOAD: u32 = 1 << 20;

/// RESULT status values.
pub const STATUS_OK: u8 = 0;
pub const STATUS_FAILED: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    Hello { nonce: [u8; 8], resume_from: u32 },
    Params { n_bins: u8, sigma: f64, code_id: String },
    Syndrome { block_index: u32, syndrome: Vec<u8> },
    Result { block_index: u32, status: u8 },
    Bye,
}

impl Message {
    pub fn type_code(&self) -> u8 {
        match self {
            Message::Hello { .. } => 0,
            Message::Params { .. } => 1,
            Message::Syndrome { .. } => 2,
            Message::Result { .. } => 3,
            Message::Bye => 4,
        }
    }

    fn payload(&self) -> Result<Vec<u8>> {
        let mut p = Vec::new();
        match self {
            Message::Hello { nonce, resume_from } => {
                p.extend_from_slice(nonce);
                p.extend_from_slice(&resume_from.to_be_bytes());
            }
            Message::Params { n_bins, sigma, code_id } => {
                let len = u16::try_from(code_id.len())
                    .map_err(|_| Error::Config(format!("code id of {} bytes is too long", code_id.len())))?;
                p.push(*n_bins);
                p.extend_from_slice(&sigma.to_be_bytes());
                p.extend_from_slice(&len.to_be_bytes());
                p.extend_from_slice(code_id.as_bytes());
            }
            Message::Syndrome { block_index, syndrome } => {
                p.extend_from_slice(&block_index.to_be_bytes());
                p.extend_from_slice(syndrome);
            }
            Message::Result { block_index, status } => {
                p.extend_from_slice(&block_index.to_be_bytes());
                p.push(*status);
            }
            Message::Bye => {}
        }
        Ok(p)
    }

    /// The complete frame.
    pub fn encode(&self) -> Result<Vec<u8>> {
        let payload = self.payload()?;
        let len = u32::try_from(payload.len())
            .ok()
            .filter(|&l| l <= MAX_PAYLOAD)
            .ok_or_else(|| Error::Config(format!("payload of {} bytes exceeds {MAX_PAYLOAD}", payload.len())))?;
        let mut f = Vec::with_capacity(HEADER_LEN + payload.len());
        f.extend_from_slice(&MAGIC);
        f.push(VERSION);
        f.push(self.type_code());
        f.extend_from_slice(&len.to_be_bytes());
        f.extend_from_slice(&payload);
        Ok(f)
    }

    /// Parses one frame from the front of `bytes`, returning it and the bytes consumed.
    pub fn decode(bytes: &[u8]) -> Result<(Message, usize)> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::MalformedFrame(format!("header needs {HEADER_LEN} bytes, got {}", bytes.len())));
        }
        let (ty, len) = parse_header(bytes[..HEADER_LEN].try_into().expect("header slice"))?;
        let end = HEADER_LEN + len as usize;
        if bytes.len() < end {
            return Err(Error::MalformedFrame(format!(
                "payload truncated: {} of {len} bytes",
                bytes.len() - HEADER_LEN
            )));
        }
        Ok((parse_payload(ty, &bytes[HEADER_LEN..end])?, end))
    }
}

fn parse_header(h: &[u8; HEADER_LEN]) -> Result<(u8, u32)> {
    if h[..4] != MAGIC {
        return Err(Error::MalformedFrame("bad magic".into()));
    }
    if h[4] != VERSION {
        return Err(Error::VersionMismatch { expected: VERSION, received: h[4] });
    }
    let len = u32::from_be_bytes(h[6..10].try_into().expect("length bytes"));
    if len > MAX_PAYLOAD {
        return Err(Error::MalformedFrame(format!("payload length {len} exceeds {MAX_PAYLOAD}")));
    }
    Ok((h[5], len))
}

fn be_u32(b: &[u8]) -> u32 {
    u32::from_be_bytes(b.try_into().expect("four bytes"))
}

fn parse_payload(ty: u8, p: &[u8]) -> Result<Message> {
    let short = |need: usize| Error::MalformedFrame(format!("type {ty} payload needs {need} bytes, got {}", p.len()));
    match ty {
        0 => {
            if p.len() != 12 {
                return Err(short(12));
            }
            Ok(Message::Hello { nonce: p[..8].try_into().expect("nonce"), resume_from: be_u32(&p[8..]) })
        }
        1 => {
            if p.len() < 11 {
                return Err(short(11));
            }
            let sigma = f64::from_be_bytes(p[1..9].try_into().expect("sigma"));
            let len = u16::from_be_bytes([p[9], p[10]]) as usize;
            if p.len() != 11 + len {
                return Err(short(11 + len));
            }
            let code_id = String::from_utf8(p[11..].to_vec())
                .map_err(|_| Error::MalformedFrame("code id is not UTF-8".into()))?;
            Ok(Message::Params { n_bins: p[0], sigma, code_id })
        }
        2 => {
            if p.len() < 4 {
                return Err(short(4));
            }
            Ok(Message::Syndrome { block_index: be_u32(&p[..4]), syndrome: p[4..].to_vec() })
        }
        3 => {
            if p.len() != 5 {
                return Err(short(5));
            }
            Ok(Message::Result { block_index: be_u32(&p[..4]), status: p[4] })
        }
        4 => {
            if !p.is_empty() {
                return Err(short(0));
            }
            Ok(Message::Bye)
        }
        _ => Err(Error::MalformedFrame(format!("unknown message type {ty}"))),
    }
}

/// Maps a read error to the protocol's error kinds.
fn read_exact_mapped<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::MalformedFrame(format!("stream ended inside {what}")),
        std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut => Error::Timeout(format!("reading {what}")),
        _ => Error::Io(e),
    })
}

/// Reads one whole frame; `Ok(None)` on a clean end of stream before any byte.
pub fn read_message<R: Read>(r: &mut R) -> Result<Option<Message>> {
    let mut h = [0u8; HEADER_LEN];
    let mut got = 0;
    while got < HEADER_LEN {
        match r.read(&mut h[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(Error::MalformedFrame(format!("stream ended after {got} header bytes"))),
            Ok(k) => got += k,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) if matches!(e.kind(), std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut) => {
                return Err(Error::Timeout("waiting for a frame".into()))
            }
            Err(e) => return Err(Error::Io(e)),
        }
    }
    let (ty, len) = parse_header(&h)?;
    let mut payload = vec![0u8; len as usize];
    read_exact_mapped(r, &mut payload, "payload")?;
    parse_payload(ty, &payload).map(Some)
}

pub fn write_message<W: Write>(w: &mut W, msg: &Message) -> Result<()> {
    w.write_all(&msg.encode()?)?;
    w.flush()?;
    Ok(())
}

/// Packs `width`-bit symbols MSB-first, zero-padding the last byte.
pub fn pack_symbols(symbols: &[u16], width: u32) -> Vec<u8> {
    let mut out = vec![0u8; (symbols.len() * width as usize).div_ceil(8)];
    let mut pos = 0usize;
    for &s in symbols {
        for b in (0..width).rev() {
            if (s >> b) & 1 == 1 {
                out[pos / 8] |= 0x80 >> (pos % 8);
            }
            pos += 1;
        }
    }
    out
}

/// Inverse of [`pack_symbols`]; rejects a wrong length or non-zero padding.
pub fn unpack_symbols(bytes: &[u8], width: u32, count: usize) -> Result<Vec<u16>> {
    let bits = count * width as usize;
    if bytes.len() != bits.div_ceil(8) {
        return Err(Error::MalformedFrame(format!(
            "{count} symbols of {width} bits need {} bytes, got {}",
            bits.div_ceil(8),
            bytes.len()
        )));
    }
    let bit = |pos: usize| (bytes[pos / 8] >> (7 - pos % 8)) & 1;
    if (bits..bytes.len() * 8).any(|p| bit(p) != 0) {
        return Err(Error::MalformedFrame("non-zero padding bits".into()));
    }
    Ok((0..count)
        .map(|i| (0..width as usize).fold(0u16, |acc, b| (acc << 1) | bit(i * width as usize + b) as u16))
        .collect())
}
