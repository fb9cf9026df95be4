//! Two-party reconciliation over a byte stream.
//!
//! Alice connects and streams syndromes; Bob serves and answers each block
//! with a status. A session runs
//!
//! ```text
//! Alice                         Bob
//!   HELLO(nonce, 0)        ->
//!                          <-   HELLO(nonce, resume_from)
//!   PARAMS                 ->
//!   SYNDROME(i)            ->                 for i = resume_from..
//!                          <-   RESULT(i, status)
//!   BYE                    ->
//!                          <-   BYE
//! ```
//!
//! Bob commits a block to the session table only after it has been fully
//! read and decoded; a connection lost mid-session can be resumed by
//! presenting the same nonce. Both parties draw block `i` from the seeded
//! simulation stream, which stands in for an aligned sequence of valid
//! frames.

use super::sim::block_observations;
use super::wire::{pack_symbols, read_message, unpack_symbols, write_message, Message, STATUS_FAILED, STATUS_OK};
use super::{
    alice_emit, bob_reconcile_algebraic, bob_reconcile_soft_with, ldpc_word, photons_per_block, raw_word,
    SyndromeMessage,
};
use crate::channel::ChannelParams;
use crate::codes::{AppSource, BitDemapper, BpConfig, Code, CodeSpec};
use crate::{Error, Result};
use std::collections::HashMap;
use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::{Arc, Mutex};
use std::time::Duration;

/// Alice's side of a session.
#[derive(Debug, Clone)]
pub struct AliceConfig {
    pub params: ChannelParams,
    pub code: CodeSpec,
    pub blocks: u32,
    pub seed: u64,
}

/// Bob's side; channel and code arrive in PARAMS.
#[derive(Debug, Clone)]
pub struct BobConfig {
    pub seed: u64,
    pub app_mode: AppSource,
    /// Record bit errors against Alice's word, which the simulation knows.
    pub with_truth: bool,
}

/// Per-block statuses Alice received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliceReport {
    pub nonce: [u8; 8],
    pub resumed_from: u32,
    /// `(block, success)` in order.
    pub statuses: Vec<(u32, bool)>,
}

/// One block as Bob decoded it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockOutcome {
    pub index: u32,
    pub success: bool,
    pub recovered_word: Vec<u16>,
    pub residual_bit_errors: Option<usize>,
}

/// Bob's record of a finished session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BobReport {
    pub nonce: [u8; 8],
    pub code_id: String,
    pub blocks: Vec<BlockOutcome>,
}

#[derive(Debug, Default)]
struct SessionState {
    code_id: Option<String>,
    outcomes: Vec<BlockOutcome>,
}

/// Sessions Bob has seen, keyed by nonce, plus constructed codes by id.
#[derive(Debug, Default)]
pub struct SessionTable {
    sessions: Mutex<HashMap<[u8; 8], SessionState>>,
    codes: Mutex<HashMap<String, Arc<Code>>>,
}

impl SessionTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Blocks committed so far for `nonce`.
    pub fn committed(&self, nonce: &[u8; 8]) -> usize {
        self.sessions.lock().expect("session table poisoned").get(nonce).map_or(0, |s| s.outcomes.len())
    }

    fn code(&self, spec: &CodeSpec) -> Result<Arc<Code>> {
        let id = spec.to_string();
        if let Some(c) = self.codes.lock().expect("code cache poisoned").get(&id) {
            return Ok(Arc::clone(c));
        }
        let built = Arc::new(spec.build()?);
        self.codes.lock().expect("code cache poisoned").insert(id, Arc::clone(&built));
        Ok(built)
    }
}

fn bits_per_photon(params: &ChannelParams) -> Result<u32> {
    let n = params.n_bins();
    if !n.is_power_of_two() || n > 255 {
        return Err(Error::Config(format!("N = {n} must be a power of two below 256")));
    }
    Ok(n.trailing_zeros())
}

fn expect<S: Read>(s: &mut S) -> Result<Message> {
    read_message(s)?.ok_or_else(|| Error::MalformedFrame("connection closed mid-session".into()))
}

/// Alice's syndrome message for block `i`.
fn alice_block(cfg: &AliceConfig, code: &Code, m: u32, i: u32, nonce: [u8; 8]) -> Result<SyndromeMessage> {
    let photons = photons_per_block(code, m)?;
    let obs = block_observations(&cfg.params, photons, cfg.seed, i as u64);
    let bins: Vec<usize> = obs.iter().map(|o| o.alice_bin()).collect();
    let word = match code {
        Code::Ldpc(_) => ldpc_word(&bins, m),
        _ => raw_word(code, &bins, m)?,
    };
    alice_emit(&word, code, photons as u32, nonce)
}

/// Runs Alice's side over `stream`, resuming wherever Bob says.
pub fn alice_session<S: Read + Write>(stream: &mut S, cfg: &AliceConfig, nonce: [u8; 8]) -> Result<AliceReport> {
    let m = bits_per_photon(&cfg.params)?;
    let code = cfg.code.build()?;
    write_message(stream, &Message::Hello { nonce, resume_from: 0 })?;
    let resumed_from = match expect(stream)? {
        Message::Hello { nonce: echo, resume_from } if echo == nonce => resume_from,
        other => return Err(Error::MalformedFrame(format!("expected HELLO echo, got {other:?}"))),
    };
    write_message(
        stream,
        &Message::Params {
            n_bins: cfg.params.n_bins() as u8,
            sigma: cfg.params.sigma(),
            code_id: cfg.code.to_string(),
        },
    )?;
    let mut statuses = Vec::new();
    for i in resumed_from..cfg.blocks {
        let msg = alice_block(cfg, &code, m, i, nonce)?;
        let packed = pack_symbols(&msg.syndrome, msg.field_width);
        write_message(stream, &Message::Syndrome { block_index: i, syndrome: packed })?;
        match expect(stream)? {
            Message::Result { block_index, status } if block_index == i => statuses.push((i, status == STATUS_OK)),
            other => return Err(Error::MalformedFrame(format!("expected RESULT for block {i}, got {other:?}"))),
        }
    }
    write_message(stream, &Message::Bye)?;
    match expect(stream)? {
        Message::Bye => Ok(AliceReport { nonce, resumed_from, statuses }),
        other => Err(Error::MalformedFrame(format!("expected BYE, got {other:?}"))),
    }
}

/// Runs Bob's side of one connection.
pub fn bob_session<S: Read + Write>(stream: &mut S, cfg: &BobConfig, table: &SessionTable) -> Result<BobReport> {
    let nonce = match expect(stream)? {
        Message::Hello { nonce, .. } => nonce,
        other => return Err(Error::MalformedFrame(format!("expected HELLO, got {other:?}"))),
    };
    let resume_from = table.committed(&nonce) as u32;
    write_message(stream, &Message::Hello { nonce, resume_from })?;
    let (params, spec) = match expect(stream)? {
        Message::Params { n_bins, sigma, code_id } => {
            let params = ChannelParams::new(n_bins as usize, sigma)?;
            (params, code_id.parse::<CodeSpec>()?)
        }
        other => return Err(Error::MalformedFrame(format!("expected PARAMS, got {other:?}"))),
    };
    {
        let mut sessions = table.sessions.lock().expect("session table poisoned");
        let state = sessions.entry(nonce).or_default();
        match &state.code_id {
            Some(id) if *id != spec.to_string() => {
                return Err(Error::Config(format!("session resumed with {spec}, started with {id}")));
            }
            _ => state.code_id = Some(spec.to_string()),
        }
    }
    let m = bits_per_photon(&params)?;
    let code = table.code(&spec)?;
    let photons = photons_per_block(&code, m)?;
    let demapper = match &*code {
        Code::Ldpc(_) => Some(BitDemapper::new(&params, cfg.app_mode)?),
        _ => None,
    };
    let mut next = resume_from;
    loop {
        match expect(stream)? {
            Message::Syndrome { block_index, syndrome } => {
                if block_index != next {
                    return Err(Error::MalformedFrame(format!("block {block_index} arrived, expected {next}")));
                }
                let symbols = unpack_symbols(&syndrome, code.syndrome_symbol_bits(), code.syndrome_len())?;
                let msg = SyndromeMessage {
                    code_id: spec.to_string(),
                    field_width: code.syndrome_symbol_bits(),
                    syndrome: symbols,
                    frame_count: photons as u32,
                    session_nonce: nonce,
                };
                let obs = block_observations(&params, photons, cfg.seed, block_index as u64);
                let bob_bins: Vec<usize> = obs.iter().map(|o| o.bob_bin()).collect();
                let result = match (&*code, &demapper) {
                    (Code::Ldpc(c), Some(d)) => bob_reconcile_soft_with(&obs, &msg, c, d, &BpConfig::default())?,
                    _ => bob_reconcile_algebraic(&raw_word(&code, &bob_bins, m)?, &msg, &code)?,
                };
                let result = if cfg.with_truth {
                    let alice_bins: Vec<usize> = obs.iter().map(|o| o.alice_bin()).collect();
                    let alice = match &*code {
                        Code::Ldpc(_) => ldpc_word(&alice_bins, m),
                        _ => raw_word(&code, &alice_bins, m)?,
                    };
                    result.with_truth(&alice)
                } else {
                    result
                };
                let outcome = BlockOutcome {
                    index: block_index,
                    success: result.success,
                    recovered_word: result.recovered_word,
                    residual_bit_errors: result.residual_bit_errors,
                };
                let status = if outcome.success { STATUS_OK } else { STATUS_FAILED };
                table.sessions.lock().expect("session table poisoned").entry(nonce).or_default().outcomes.push(outcome);
                next += 1;
                write_message(stream, &Message::Result { block_index, status })?;
            }
            Message::Bye => {
                write_message(stream, &Message::Bye)?;
                let sessions = table.sessions.lock().expect("session table poisoned");
                let state = &sessions[&nonce];
                return Ok(BobReport { nonce, code_id: spec.to_string(), blocks: state.outcomes.clone() });
            }
            other => return Err(Error::MalformedFrame(format!("unexpected {other:?} mid-session"))),
        }
    }
}

fn configure(stream: &TcpStream, timeout: Duration) -> Result<()> {
    stream.set_read_timeout(Some(timeout))?;
    stream.set_write_timeout(Some(timeout))?;
    stream.set_nodelay(true)?;
    Ok(())
}

/// Connects to Bob and runs Alice's side.
pub fn connect<A: ToSocketAddrs>(addr: A, cfg: &AliceConfig, nonce: [u8; 8], timeout: Duration) -> Result<AliceReport> {
    let target = addr.to_socket_addrs()?.next().ok_or_else(|| Error::Config("address resolved to nothing".into()))?;
    let mut stream = TcpStream::connect_timeout(&target, timeout).map_err(|e| match e.kind() {
        std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock => {
            Error::Timeout(format!("connecting to {target}"))
        }
        _ => Error::Io(e),
    })?;
    configure(&stream, timeout)?;
    alice_session(&mut stream, cfg, nonce)
}

/// Accepts up to `max_sessions` connections (all, if `None`), one thread
/// each, and returns every session's outcome in arrival order.
pub fn serve(
    listener: &TcpListener,
    cfg: &BobConfig,
    table: &SessionTable,
    timeout: Duration,
    max_sessions: Option<usize>,
) -> Vec<Result<BobReport>> {
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for conn in listener.incoming().take(max_sessions.unwrap_or(usize::MAX)) {
            match conn {
                Ok(mut stream) => handles.push(scope.spawn(move || {
                    configure(&stream, timeout)?;
                    let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_default();
                    let out = bob_session(&mut stream, cfg, table);
                    match &out {
                        Ok(r) => log::info!("session from {peer} closed after {} blocks", r.blocks.len()),
                        Err(e) => log::warn!("session from {peer} aborted: {e}"),
                    }
                    out
                })),
                Err(e) => log::warn!("accept failed: {e}"),
            }
        }
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Config("session thread panicked".into()))))
            .collect()
    })
}
