//! Subcommand bodies. Each writes one CSV table; rows follow sweep order
//! whatever the worker count.

use crate::grid::SnrGrid;
use crate::output::{num, opt, plain, Table};
use crate::{AppMode, Axis, Cli, Command, MiMode};
use rayon::prelude::*;
use std::net::TcpListener;
use std::path::Path;
use std::time::Duration;
use teqkd::channel::{error_rate_closed_form, error_rate_monte_carlo_par, ChannelParams, McEstimate};
use teqkd::codes::{
    uncoded_bit_error_rate, union_bound_bch, union_bound_rs, AppSource, BitDemapper, BlockErrorModel, BpConfig, Code,
    CodeSpec,
};
use teqkd::rates::{
    gamma_for_capacity_db, mutual_info_hard, mutual_info_hard_circular, mutual_info_hard_highsnr,
    mutual_info_hard_truncated, mutual_info_soft, secrecy_capacity, shannon_limit_snr, CodeRate, DecodingMode,
};
use teqkd::reconcile::leakage;
use teqkd::reconcile::sim::{simulate_algebraic, simulate_ldpc, StopRule};
use teqkd::reconcile::transport::{connect, serve, AliceConfig, BobConfig, SessionTable};
use teqkd::{Error, Result};

pub fn run(cli: &Cli) -> Result<()> {
    let out = cli.global.out.as_deref();
    let seed = cli.global.seed;
    match &cli.command {
        Command::PeCurve { n_bins, snr, axis, events, max_trials } => {
            pe_curve(out, seed, &n_bins.0, snr, *axis, *events, *max_trials)
        }
        Command::MiCurve { n_bins, mode, snr, axis } => mi_curve(out, seed, &n_bins.0, *mode, snr, *axis),
        Command::Limits { rows, tol_db, backoff } => limits(out, seed, rows, *tol_db, &backoff.0),
        Command::SimulateCode { code, code_file, n_bins, snr, events, max_blocks, app, max_iter } => {
            let spec = code_spec(code.as_deref(), code_file.as_deref())?;
            simulate_code(out, seed, &spec, *n_bins, snr, StopRule::new(*events, *max_blocks)?, *app, *max_iter)
        }
        Command::Bound { code, n_bins, snr, two_bit_blocks } => {
            bound(out, seed, &code.parse()?, *n_bins, snr, *two_bit_blocks)
        }
        Command::ReconcileServe { listen, sessions, app, timeout_ms } => {
            reconcile_serve(out, seed, listen, *sessions, *app, Duration::from_millis(*timeout_ms))
        }
        Command::ReconcileConnect { connect, code, n_bins, snr_db, blocks, nonce, timeout_ms } => {
            let nonce = match nonce {
                Some(hex) => parse_nonce(hex)?,
                None => seed.to_be_bytes(),
            };
            let cfg = AliceConfig {
                params: ChannelParams::from_gamma_db(*n_bins, *snr_db)?,
                code: code.parse()?,
                blocks: *blocks,
                seed,
            };
            reconcile_connect(out, connect, &cfg, *snr_db, nonce, Duration::from_millis(*timeout_ms))
        }
    }
}

/// Independent master seed for sweep point `index`.
fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn params_at(n_bins: usize, db: f64, axis: Axis) -> Result<ChannelParams> {
    match axis {
        Axis::Gamma => ChannelParams::from_gamma_db(n_bins, db),
        Axis::GammaBar => ChannelParams::from_gamma_bar_db(n_bins, db),
    }
}

fn axis_column(axis: Axis) -> &'static str {
    match axis {
        Axis::Gamma => "gamma_db",
        Axis::GammaBar => "gamma_bar_db",
    }
}

fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn code_spec(id: Option<&str>, file: Option<&Path>) -> Result<CodeSpec> {
    match (id, file) {
        (Some(id), None) => id.parse(),
        (None, Some(path)) => CodeSpec::from_toml(&std::fs::read_to_string(path)?),
        _ => Err(Error::Config("give exactly one of --code and --code-file".into())),
    }
}

fn parse_nonce(hex: &str) -> Result<[u8; 8]> {
    let bad = || Error::Config(format!("nonce {hex:?} is not 16 hex digits"));
    if hex.len() != 16 || !hex.is_ascii() {
        return Err(bad());
    }
    let mut out = [0u8; 8];
    for (i, b) in out.iter_mut().enumerate() {
        *b = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).map_err(|_| bad())?;
    }
    Ok(out)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn app_source(app: AppMode) -> AppSource {
    match app {
        AppMode::Exact => AppSource::ExactSoft,
        AppMode::Simplified => AppSource::SimplifiedSoft,
        AppMode::Hard => AppSource::HardOutput,
    }
}

#[allow(clippy::too_many_arguments)]
fn pe_curve(
    out: Option<&Path>,
    seed: u64,
    n_bins: &[usize],
    snr: &SnrGrid,
    axis: Axis,
    events: u64,
    max_trials: u64,
) -> Result<()> {
    let points: Vec<(usize, f64)> = n_bins.iter().flat_map(|&n| snr.0.iter().map(move |&db| (n, db))).collect();
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(idx, &(n, db))| {
            let p = params_at(n, db, axis)?;
            let mc = match error_rate_monte_carlo_par(&p, events, max_trials, point_seed(seed, idx), false) {
                Ok(mc) => mc,
                // Report what the cap allowed; the events column shows the shortfall.
                Err(Error::BudgetExceeded { trials, events }) => McEstimate::from_counts(events, trials),
                Err(e) => return Err(e),
            };
            Ok(vec![
                n.to_string(),
                plain(db),
                num(error_rate_closed_form(&p)),
                num(mc.estimate),
                num(mc.std_error),
                mc.trials.to_string(),
                mc.events.to_string(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::create(
        out,
        "pe-curve",
        seed,
        &[
            ("n_bins", list(n_bins)),
            ("snr", list(&snr.0)),
            ("axis", axis_column(axis).into()),
            ("events", events.to_string()),
            ("max_trials", max_trials.to_string()),
        ],
        &[
            ("n_bins", "bins"),
            (axis_column(axis), "dB"),
            ("pe_closed_form", "probability"),
            ("pe_monte_carlo", "probability"),
            ("mc_std_err", "probability"),
            ("trials", "pairs"),
            ("events", "pairs"),
        ],
    )?;
    for r in &rows {
        t.row(r)?;
    }
    Ok(t.finish()?)
}

/// An approximation's value, blank where it leaves its domain of validity.
fn approximation(r: Result<f64>) -> Result<String> {
    match r {
        Ok(x) => Ok(num(x)),
        Err(Error::Domain(_)) => Ok(String::new()),
        Err(e) => Err(e),
    }
}

fn mi_curve(out: Option<&Path>, seed: u64, n_bins: &[usize], mode: MiMode, snr: &SnrGrid, axis: Axis) -> Result<()> {
    let hard = matches!(mode, MiMode::Hard | MiMode::Both);
    let soft = matches!(mode, MiMode::Soft | MiMode::Both);
    let points: Vec<(usize, f64)> = n_bins.iter().flat_map(|&n| snr.0.iter().map(move |&db| (n, db))).collect();
    let rows = points
        .par_iter()
        .map(|&(n, db)| {
            let p = params_at(n, db, axis)?;
            let mut row = vec![n.to_string(), plain(db)];
            if hard {
                row.push(num(mutual_info_hard(&p)?));
                row.push(approximation(mutual_info_hard_truncated(&p, 1))?);
                row.push(approximation(mutual_info_hard_highsnr(&p))?);
                row.push(approximation(mutual_info_hard_circular(&p))?);
            }
            if soft {
                row.push(num(mutual_info_soft(&p)?));
                row.push(num(secrecy_capacity(p.sigma_over_n())?));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![("n_bins", "bins"), (axis_column(axis), "dB")];
    if hard {
        columns.extend([
            ("hard", "bits/photon"),
            ("hard_truncated_d1", "bits/photon"),
            ("hard_highsnr", "bits/photon"),
            ("hard_circular", "bits/photon"),
        ]);
    }
    if soft {
        columns.extend([("soft", "bits/photon"), ("capacity_envelope", "bits/photon")]);
    }
    let mode_name = match mode {
        MiMode::Hard => "hard",
        MiMode::Soft => "soft",
        MiMode::Both => "both",
    };
    let mut t = Table::create(
        out,
        "mi-curve",
        seed,
        &[
            ("n_bins", list(n_bins)),
            ("mode", mode_name.into()),
            ("snr", list(&snr.0)),
            ("axis", axis_column(axis).into()),
        ],
        &columns,
    )?;
    for r in &rows {
        t.row(r)?;
    }
    Ok(t.finish()?)
}

fn parse_limit_rows(rows: &str) -> Result<Vec<(usize, CodeRate)>> {
    rows.split(',')
        .map(|r| {
            let (n, rate) =
                r.split_once(':').ok_or_else(|| Error::Config(format!("limit row {r:?} is not of the form N:k/n")))?;
            let n = n.trim().parse().map_err(|_| Error::Config(format!("limit row {r:?}: bad N")))?;
            Ok((n, rate.trim().parse()?))
        })
        .collect()
}

fn limits(out: Option<&Path>, seed: u64, rows: &str, tol_db: f64, backoff: &[usize]) -> Result<()> {
    let parsed = parse_limit_rows(rows)?;
    let results = parsed
        .par_iter()
        .map(|&(n, rate)| {
            let hard = shannon_limit_snr(n, rate, DecodingMode::Hard, tol_db)?;
            let soft = shannon_limit_snr(n, rate, DecodingMode::Soft, tol_db)?;
            let bits = rate.value() * (n as f64).log2();
            Ok(vec![
                "limit".to_string(),
                n.to_string(),
                rate.to_string(),
                plain(bits),
                plain(hard.snr_db),
                plain(hard.sigma_over_n),
                plain(soft.snr_db),
                plain(soft.sigma_over_n),
                plain(gamma_for_capacity_db(bits)),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::create(
        out,
        "limits",
        seed,
        &[("rows", rows.into()), ("tol_db", plain(tol_db)), ("backoff", list(backoff))],
        &[
            ("kind", "label"),
            ("n_bins", "bins"),
            ("rate", "k/n"),
            ("bits_per_photon", "bits"),
            ("hard_gamma_db", "dB"),
            ("hard_sigma_over_n", "ratio"),
            ("soft_gamma_db", "dB"),
            ("soft_sigma_over_n", "ratio"),
            ("capacity_gamma_db", "dB"),
        ],
    )?;
    for r in &results {
        t.row(r)?;
    }
    // A unit-frame channel operated `b` bits below capacity.
    for &b in backoff {
        let bits = -(b as f64);
        let mut r = vec!["backoff".to_string(), String::new(), String::new(), plain(bits)];
        r.extend(std::iter::repeat_n(String::new(), 4));
        r.push(plain(gamma_for_capacity_db(bits)));
        t.row(&r)?;
    }
    Ok(t.finish()?)
}

/// Field symbols per photon for an RS code over `2^w` at `m` bits per photon.
fn rs_photons_per_symbol(width: u32, m: u32) -> Result<usize> {
    if !width.is_multiple_of(m) {
        return Err(Error::Config(format!("{width}-bit symbols do not pack {m}-bit photons")));
    }
    Ok((width / m) as usize)
}

fn union_bound(params: &ChannelParams, code: &Code, model: BlockErrorModel) -> Result<f64> {
    match code {
        Code::Rs(c) => {
            union_bound_rs(params, c, rs_photons_per_symbol(c.field().width(), params.n_bins().trailing_zeros())?)
        }
        Code::Bch(c) => union_bound_bch(params, c, model),
        Code::Ldpc(_) => Err(Error::Config("no union bound for LDPC codes".into())),
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate_code(
    out: Option<&Path>,
    seed: u64,
    spec: &CodeSpec,
    n_bins: usize,
    snr: &SnrGrid,
    stop: StopRule,
    app: AppMode,
    max_iter: usize,
) -> Result<()> {
    ChannelParams::new(n_bins, 1.0)?;
    if !n_bins.is_power_of_two() {
        return Err(Error::Config(format!("Gray labelling needs N = 2^m, got {n_bins}")));
    }
    let m = n_bins.trailing_zeros();
    let code = spec.build()?;
    let key_rate = leakage(&code, m)?.key_rate;
    let cfg = BpConfig { max_iter, ..BpConfig::default() };
    let mut rows = Vec::with_capacity(snr.0.len());
    // Points run in order; each simulation fans its blocks out to the pool.
    for (idx, &db) in snr.0.iter().enumerate() {
        let p = ChannelParams::from_gamma_db(n_bins, db)?;
        let s = point_seed(seed, idx);
        let est = match &code {
            Code::Ldpc(c) => {
                let demapper = BitDemapper::new(&p, app_source(app))?;
                simulate_ldpc(&p, c, &demapper, &cfg, stop, s)?
            }
            _ => simulate_algebraic(&p, &code, stop, s)?,
        };
        let bound = match union_bound(&p, &code, BlockErrorModel::OneBit) {
            Ok(b) => Some(b),
            Err(Error::Domain(_) | Error::Config(_)) => None,
            Err(e) => return Err(e),
        };
        rows.push(vec![
            plain(db),
            num(est.ber()),
            num(est.ber_std_error()),
            num(est.bler()),
            est.blocks.to_string(),
            est.block_errors.to_string(),
            est.decode_failures.to_string(),
            est.bit_errors.to_string(),
            plain(est.mean_iterations()),
            opt(bound),
            plain(key_rate),
        ]);
    }
    let app_name = app_source(app).name();
    let mut t = Table::create(
        out,
        "simulate-code",
        seed,
        &[
            ("code", spec.to_string()),
            ("n_bins", n_bins.to_string()),
            ("snr", list(&snr.0)),
            ("events", stop.min_events.to_string()),
            ("max_blocks", stop.max_blocks.to_string()),
            ("app", app_name.into()),
            ("max_iter", max_iter.to_string()),
        ],
        &[
            ("gamma_db", "dB"),
            ("ber", "probability"),
            ("ber_std_err", "probability"),
            ("bler", "probability"),
            ("blocks", "blocks"),
            ("block_errors", "blocks"),
            ("decode_failures", "blocks"),
            ("bit_errors", "bits"),
            ("mean_iterations", "iterations"),
            ("union_bound", "probability"),
            ("key_rate", "bits/photon"),
        ],
    )?;
    for r in &rows {
        t.row(r)?;
    }
    Ok(t.finish()?)
}

fn bound(out: Option<&Path>, seed: u64, spec: &CodeSpec, n_bins: usize, snr: &SnrGrid, two_bit: bool) -> Result<()> {
    let code = spec.build()?;
    let model = if two_bit { BlockErrorModel::TwoBits } else { BlockErrorModel::OneBit };
    if two_bit && !matches!(code, Code::Bch(_)) {
        return Err(Error::Config("--two-bit-blocks applies to BCH codes only".into()));
    }
    let rows = snr
        .0
        .par_iter()
        .map(|&db| {
            let p = ChannelParams::from_gamma_db(n_bins, db)?;
            Ok(vec![plain(db), num(uncoded_bit_error_rate(&p)?), num(union_bound(&p, &code, model)?)])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::create(
        out,
        "bound",
        seed,
        &[
            ("code", spec.to_string()),
            ("n_bins", n_bins.to_string()),
            ("snr", list(&snr.0)),
            ("block_model", if two_bit { "two-bits" } else { "one-bit" }.into()),
        ],
        &[("gamma_db", "dB"), ("uncoded_ber", "probability"), ("bound_ber", "probability")],
    )?;
    for r in &rows {
        t.row(r)?;
    }
    Ok(t.finish()?)
}

const SERVE_COLUMNS: [(&str, &str); 5] =
    [("nonce", "hex"), ("code", "id"), ("block", "index"), ("success", "flag"), ("residual_bit_errors", "bits")];

fn reconcile_serve(
    out: Option<&Path>,
    seed: u64,
    listen: &str,
    sessions: Option<usize>,
    app: AppMode,
    timeout: Duration,
) -> Result<()> {
    let listener = TcpListener::bind(listen)?;
    eprintln!("listening on {}", listener.local_addr()?);
    let cfg = BobConfig { seed, app_mode: app_source(app), with_truth: true };
    let table = SessionTable::new();
    let mut t = Table::create(
        out,
        "reconcile-serve",
        seed,
        &[
            ("listen", listen.into()),
            ("sessions", sessions.map_or_else(|| "unlimited".into(), |s| s.to_string())),
            ("app", app_source(app).name().into()),
            ("timeout_ms", timeout.as_millis().to_string()),
        ],
        &SERVE_COLUMNS,
    )?;
    let mut failures = 0usize;
    let mut write = |t: &mut Table, results: Vec<Result<_>>| -> Result<()> {
        for r in results {
            match r {
                Ok(report) => {
                    let report: teqkd::reconcile::transport::BobReport = report;
                    for b in &report.blocks {
                        t.row(&[
                            hex(&report.nonce),
                            report.code_id.clone(),
                            b.index.to_string(),
                            u8::from(b.success).to_string(),
                            b.residual_bit_errors.map_or_else(String::new, |e| e.to_string()),
                        ])?;
                    }
                }
                Err(e) => {
                    eprintln!("session failed: {e}");
                    failures += 1;
                }
            }
        }
        t.flush()?;
        Ok(())
    };
    match sessions {
        Some(k) => write(&mut t, serve(&listener, &cfg, &table, timeout, Some(k)))?,
        // Unlimited: one session at a time so rows reach the file as they finish.
        None => loop {
            write(&mut t, serve(&listener, &cfg, &table, timeout, Some(1)))?;
        },
    }
    t.finish()?;
    if failures > 0 {
        return Err(Error::MalformedFrame(format!("{failures} session(s) aborted")));
    }
    Ok(())
}

fn reconcile_connect(
    out: Option<&Path>,
    addr: &str,
    cfg: &AliceConfig,
    snr_db: f64,
    nonce: [u8; 8],
    timeout: Duration,
) -> Result<()> {
    let report = connect(addr, cfg, nonce, timeout)?;
    let mut t = Table::create(
        out,
        "reconcile-connect",
        cfg.seed,
        &[
            ("connect", addr.into()),
            ("code", cfg.code.to_string()),
            ("n_bins", cfg.params.n_bins().to_string()),
            ("snr_db", plain(snr_db)),
            ("blocks", cfg.blocks.to_string()),
            ("nonce", hex(&nonce)),
            ("resumed_from", report.resumed_from.to_string()),
        ],
        &[("block", "index"), ("success", "flag")],
    )?;
    for (b, ok) in &report.statuses {
        t.row(&[b.to_string(), u8::from(*ok).to_string()])?;
    }
    Ok(t.finish()?)
}
