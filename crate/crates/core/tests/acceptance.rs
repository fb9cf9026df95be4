//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria in [`EXPECTED_FAIL`] are implemented as stated and do not hold for
//! the exact model; the process fails if any other criterion fails or if one
//! of them unexpectedly passes. `TEQKD_ACCEPTANCE=1,4,9` runs a subset and
//! `TEQKD_ACCEPTANCE_FULL=1` adds the long n=9999 run down to BER 1e-5.

use rand::Rng as _;
use std::time::Instant;
use teqkd::channel::{error_rate_closed_form, error_rate_monte_carlo_par, ChannelParams};
use teqkd::codes::{
    gray_code, uncoded_bit_error_rate, union_bound_bch, union_bound_rs, AppSource, BitDemapper, BlockErrorModel,
    BpConfig, Code, CodeSpec, LdpcCode,
};
use teqkd::rates::{
    app_bins, likelihood, mutual_info_hard, mutual_info_hard_circular, mutual_info_hard_highsnr,
    mutual_info_hard_truncated, mutual_info_soft, output_density, prior_alice_valid, prior_both_valid,
    secrecy_capacity, secrecy_capacity_highsnr, shannon_limit_snr, transition_matrix, CodeRate, DecodingMode,
    RateCurve, SnrAxis,
};
use teqkd::reconcile::sim::{simulate_algebraic, simulate_ldpc, BerEstimate, StopRule};
use teqkd::reconcile::wire::Message;
use teqkd::reconcile::{alice_emit, bob_reconcile_algebraic};
use teqkd::stream::rng_for;
use teqkd::Result;

/// Sub-criteria that fail for the exact model; the README explains each.
const EXPECTED_FAIL: &[&str] = &["4b"];

struct Verdict {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn verdict(id: &'static str, pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { id, pass, detail: detail.into() }
}

fn db(n: usize, g: f64) -> ChannelParams {
    ChannelParams::from_gamma_db(n, g).expect("valid channel")
}

fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    let k = ((b - a) / step + 1e-9).floor() as usize;
    (0..=k).map(|i| a + i as f64 * step).collect()
}

fn crossing(label: &str, points: &[(f64, f64)], target: f64) -> Option<f64> {
    RateCurve::new(label, SnrAxis::Gamma, points.to_vec()).ok()?.crossing_db(target)
}

fn show(points: &[(f64, f64)]) -> String {
    points.iter().map(|(g, b)| format!("{g}:{b:.2e}")).collect::<Vec<_>>().join(" ")
}

// 1. Alice-valid prior at N=8.
fn prior_rows() -> Result<Vec<Verdict>> {
    let rows: [(f64, [f64; 8], f64); 3] = [
        (10.0, [0.112796, 0.129062, 0.129071, 0.129071, 0.129071, 0.129071, 0.129062, 0.112796], 2.997655),
        (25.0, [0.122885, 0.125705, 0.125705, 0.125705, 0.125705, 0.125705, 0.125705, 0.122885], 2.999931),
        (40.0, [0.124626, 0.125125, 0.125125, 0.125125, 0.125125, 0.125125, 0.125125, 0.124626], 2.999998),
    ];
    let (mut dp, mut dh) = (0f64, 0f64);
    for (g, probs, h) in rows {
        let p = prior_alice_valid(&db(8, g))?;
        for (a, b) in p.probs.iter().zip(probs) {
            dp = dp.max((a - b).abs());
        }
        dh = dh.max((p.entropy() - h).abs());
    }
    Ok(vec![verdict(
        "1",
        dp <= 1e-5 && dh <= 1e-5,
        format!(
            "N=8 prior at 10/25/40 dB: 24 probabilities max dev {dp:.1e}, 3 entropies max dev {dh:.1e} bits (tol 1e-5)"
        ),
    )])
}

// 2. Shannon limits.
fn shannon_limits() -> Result<Vec<Verdict>> {
    let rows: [(usize, &str, f64, f64, f64, f64); 6] = [
        (8, "2/3", 12.61, 0.029269, 10.45, 0.037533),
        (16, "3/4", 13.29, 0.013532, 10.85, 0.017922),
        (32, "3/5", 3.88, 0.019992, 3.46, 0.020982),
        (32, "4/5", 13.61, 0.0065215, 11.04, 0.0087670),
        (64, "2/3", 4.01, 0.0098474, 3.58, 0.010347),
        (64, "5/6", 13.77, 0.0032012, 11.13, 0.0043383),
    ];
    let (mut ddb, mut dsn, mut ordered) = (0f64, 0f64, true);
    let mut found = Vec::new();
    for (n, rate, hdb, hsn, sdb, ssn) in rows {
        let rate: CodeRate = rate.parse()?;
        let hard = shannon_limit_snr(n, rate, DecodingMode::Hard, 0.005)?;
        let soft = shannon_limit_snr(n, rate, DecodingMode::Soft, 0.005)?;
        ddb = ddb.max((hard.snr_db - hdb).abs()).max((soft.snr_db - sdb).abs());
        dsn = dsn.max((hard.sigma_over_n - hsn).abs()).max((soft.sigma_over_n - ssn).abs());
        ordered &= hard.snr_db >= soft.snr_db;
        found.push(format!("{n}:{rate} {:.3}/{:.3}", hard.snr_db, soft.snr_db));
    }
    Ok(vec![verdict(
        "2",
        ddb <= 0.05 && dsn <= 2e-4 && ordered,
        format!(
            "six rows, max |dSNR| {ddb:.3} dB (tol 0.05), max |d sigma/N| {dsn:.1e} (tol 2e-4), hard >= soft {ordered}; hard/soft dB: {}",
            found.join(", ")
        ),
    )])
}

// 3. Monte Carlo against the closed-form symbol error rate.
fn closed_form_error_rate() -> Result<Vec<Verdict>> {
    const EVENTS: u64 = 100_000;
    let (mut lo, mut hi) = (f64::MAX, f64::MIN);
    let (mut clo, mut chi) = (f64::MAX, f64::MIN);
    for (k, n) in [2usize, 4, 8, 16].into_iter().enumerate() {
        for (j, g) in grid(20.0, 40.0, 1.0).into_iter().enumerate() {
            let p = db(n, g);
            let seed = 1000 + 100 * k as u64 + j as u64;
            let mc = error_rate_monte_carlo_par(&p, EVENTS, u64::MAX, seed, false)?;
            let r = mc.estimate / error_rate_closed_form(&p);
            lo = lo.min(r);
            hi = hi.max(r);
            // Conditioned on valid frames, against its own exact value.
            let cond = error_rate_monte_carlo_par(&p, EVENTS, u64::MAX, seed + 50, true)?;
            let c = cond.estimate / transition_matrix(&p)?.error_rate();
            clo = clo.min(c);
            chi = chi.max(c);
        }
    }
    Ok(vec![verdict(
        "3",
        lo >= 0.98 && hi <= 1.02,
        format!(
            "N in {{2,4,8,16}}, 20..40 dB, {EVENTS} events/point: MC/closed-form in [{lo:.4}, {hi:.4}] (window [0.98, 1.02]); \
             valid-frame MC/exact in [{clo:.4}, {chi:.4}]"
        ),
    )])
}

// 4. Approximation validity windows.
fn approximations() -> Result<Vec<Verdict>> {
    let mut worst_c = (0f64, 0f64);
    for g in grid(15.0, 60.0, 1.0) {
        let p = db(8, g);
        let e = (mutual_info_hard_highsnr(&p)? - mutual_info_hard(&p)?).abs();
        if e > worst_c.1 {
            worst_c = (g, e);
        }
    }
    let mut worst_d = (0f64, 0f64);
    for g in grid(10.0, 60.0, 1.0) {
        let p = db(8, g);
        let e = (mutual_info_hard_truncated(&p, 1)? - mutual_info_hard(&p)?).abs();
        if e > worst_d.1 {
            worst_d = (g, e);
        }
    }
    let circ = |n: usize| -> Result<(f64, f64)> {
        let mut w = (0f64, 0f64);
        for g in grid(10.0, 45.0, 1.0) {
            let p = db(n, g);
            let e = (mutual_info_hard_circular(&p)? - mutual_info_hard(&p)?).abs();
            if e > w.1 {
                w = (g, e);
            }
        }
        Ok(w)
    };
    let (c8, c16) = (circ(8)?, circ(16)?);
    Ok(vec![
        verdict(
            "4a",
            worst_c.1 <= 0.01,
            format!(
                "high-SNR closed form, N=8, 15..60 dB: max error {:.2e} bits at {} dB (tol 0.01)",
                worst_c.1, worst_c.0
            ),
        ),
        verdict(
            "4b",
            worst_d.1 <= 0.02,
            format!("D=1 truncation, N=8, 10..60 dB: max error {:.4} bits at {} dB (tol 0.02)", worst_d.1, worst_d.0),
        ),
        verdict(
            "4c",
            c16.1 < c8.1,
            format!(
                "circular law, 10..45 dB: max error {:.4} bits at {} dB for N=16 vs {:.4} at {} dB for N=8",
                c16.1, c16.0, c8.1, c8.0
            ),
        ),
    ])
}

// 5. Data processing.
fn data_processing() -> Result<Vec<Verdict>> {
    let (mut worst_hs, mut worst_sc, mut count) = (f64::MIN, f64::MIN, 0);
    for n in [4usize, 8, 16] {
        for g in grid(0.0, 45.0, 1.0) {
            let p = db(n, g);
            let (h, s, c) = (mutual_info_hard(&p)?, mutual_info_soft(&p)?, secrecy_capacity(p.sigma_over_n())?);
            worst_hs = worst_hs.max(h - s);
            worst_sc = worst_sc.max(s - c);
            count += 1;
        }
    }
    Ok(vec![verdict(
        "5",
        worst_hs <= 0.01 && worst_sc <= 0.01,
        format!("{count} points: max(hard - soft) {worst_hs:.2e}, max(soft - I(X;Y)) {worst_sc:.2e} bits (slack 0.01)"),
    )])
}

// 6. Logarithmic secrecy-capacity formula.
fn capacity_formula() -> Result<Vec<Verdict>> {
    let three_bits = 10.0 * (4.0 * std::f64::consts::PI * std::f64::consts::E * 64.0).log10();
    let mut worst = (0f64, 0f64);
    let start = (three_bits * 4.0).ceil() / 4.0;
    for g in grid(start, 70.0, 0.25) {
        let gamma_bar = 10f64.powf(g / 10.0);
        let formula = secrecy_capacity_highsnr(gamma_bar);
        assert!(formula >= 3.0);
        let e = (secrecy_capacity(gamma_bar.sqrt().recip())? - formula).abs();
        if e > worst.1 {
            worst = (g, e);
        }
    }
    Ok(vec![verdict(
        "6",
        worst.1 <= 0.05,
        format!(
            "gamma_bar {start}..70 dB (formula >= 3 bits): max error {:.2e} bits at {} dB (tol 0.05)",
            worst.1, worst.0
        ),
    )])
}

fn uncoded_db_at(ber: f64) -> f64 {
    // uncoded BER = c / sqrt(gamma) with c fixed by N; solve from one point.
    let c = uncoded_bit_error_rate(&db(8, 20.0)).expect("in range") * 10.0;
    20.0 * (c / ber).log10()
}

// 7. RS union bound against the full pipeline.
fn rs_pipeline() -> Result<Vec<Verdict>> {
    let code = CodeSpec::RS63_43.build()?;
    let Code::Rs(rs) = &code else { unreachable!() };
    let stop = StopRule::new(100, 4_000_000)?;
    let (mut lo, mut hi, mut used) = (f64::MAX, f64::MIN, 0);
    let mut mc = Vec::new();
    let mut ratios = Vec::new();
    for (i, g) in grid(20.0, 40.0, 1.0).into_iter().enumerate() {
        let p = db(8, g);
        let est = simulate_algebraic(&p, &code, stop, 7000 + i as u64)?;
        let ber = est.ber();
        mc.push((g, ber));
        if (1e-5..=1e-2).contains(&ber) {
            let r = union_bound_rs(&p, rs, 2)? / ber;
            ratios.push(format!("{g}:{r:.2}"));
            lo = lo.min(r);
            hi = hi.max(r);
            used += 1;
        }
        if ber < 1e-5 {
            break;
        }
    }
    let gain = crossing("rs", &mc, 1e-5).map(|x| uncoded_db_at(1e-5) - x);
    let gain_ok = gain.is_some_and(|x| (x - 58.0).abs() <= 2.0);
    Ok(vec![
        verdict(
            "7a",
            used >= 3 && lo >= 0.5 && hi <= 2.0,
            format!(
                "RS[63,43] N=8, {used} points with BER in [1e-5, 1e-2]: bound/MC {} (window [0.5, 2])",
                ratios.join(" ")
            ),
        ),
        verdict(
            "7b",
            gain_ok,
            format!(
                "coding gain at BER 1e-5: {} dB vs uncoded at {:.2} dB (target 58 +/- 2); MC {}",
                gain.map_or("n/a".into(), |x| format!("{x:.2}")),
                uncoded_db_at(1e-5),
                show(&mc)
            ),
        ),
    ])
}

fn bound_curve(f: impl Fn(&ChannelParams) -> Result<f64>, a: f64, b: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    grid(a, b, step).into_iter().map(|g| Ok((g, f(&db(8, g))?))).collect()
}

// 8. RS against BCH bounds.
fn bound_gaps() -> Result<Vec<Verdict>> {
    let rs = teqkd::codes::RsCode::rs63_43();
    let bch = teqkd::codes::BchCode::bch378_261();
    let rs_b = |p: &ChannelParams| union_bound_rs(p, &rs, 2);
    let bch_b = |p: &ChannelParams| union_bound_bch(p, &bch, BlockErrorModel::OneBit);
    let (r, b) = (bound_curve(rs_b, 10.0, 80.0, 0.01)?, bound_curve(bch_b, 10.0, 80.0, 0.01)?);
    let gap = |t: f64| Some(crossing("rs", &r, t)? - crossing("bch", &b, t)?);
    let (g5, g10) = (gap(1e-5).unwrap_or(f64::NAN), gap(1e-10).unwrap_or(f64::NAN));
    let slope = |f: &dyn Fn(&ChannelParams) -> Result<f64>| -> Result<f64> {
        let c = RateCurve::new("c", SnrAxis::Gamma, bound_curve(f, 90.0, 100.0, 0.5)?)?;
        teqkd::channel::diversity_order(&c)
    };
    let unc = slope(&|p| uncoded_bit_error_rate(p))?;
    let (srs, sbch) = (slope(&rs_b)?, slope(&bch_b)?);
    Ok(vec![
        verdict(
            "8a",
            (g5 - 3.0).abs() <= 0.3 && (g10 - 5.0).abs() <= 0.5,
            format!("BCH gain over RS: {g5:.2} dB at 1e-5 (3 +/- 0.3), {g10:.2} dB at 1e-10 (5 +/- 0.5)"),
        ),
        verdict(
            "8b",
            (unc - 0.5).abs() <= 0.2 && (srs - 5.5).abs() <= 0.2 && (sbch - 7.0).abs() <= 0.2,
            format!("diversity over 90..100 dB: uncoded {unc:.3}, RS {srs:.3}, BCH {sbch:.3} (0.5, 5.5, 7 +/- 0.2)"),
        ),
    ])
}

/// BER at rising SNR until it drops below `target`, logging each point.
fn ber_sweep(
    label: &str,
    start: f64,
    step: f64,
    stop_db: f64,
    target: f64,
    mut eval: impl FnMut(f64, u64) -> Result<BerEstimate>,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut g = start;
    let mut idx = 0;
    while g <= stop_db + 1e-9 {
        let t0 = Instant::now();
        let est = eval(g, idx)?;
        eprintln!(
            "  9 {label} {g:.2} dB: BER {:.3e}, {} of {} frames failed [{:.0} s]",
            est.ber(),
            est.block_errors,
            est.blocks,
            t0.elapsed().as_secs_f64()
        );
        out.push((g, est.ber()));
        if est.ber() < target {
            break;
        }
        g += step;
        idx += 1;
    }
    Ok(out)
}

fn ldpc_sweep(
    label: &str,
    code: &LdpcCode,
    source: AppSource,
    (start, step): (f64, f64),
    target: f64,
    stop: StopRule,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    ber_sweep(label, start, step, 40.0, target, |g, i| {
        let p = db(8, g);
        let d = BitDemapper::new(&p, source)?;
        simulate_ldpc(&p, code, &d, &BpConfig::default(), stop, seed + i)
    })
}

fn fmt_db(x: Option<f64>) -> String {
    x.map_or("n/a".into(), |v| format!("{v:.2}"))
}

// 9. LDPC at desk scale.
fn ldpc() -> Result<Vec<Verdict>> {
    let code = LdpcCode::construct(384, 3, 9, 1)?;
    let stop = StopRule::new(50, 200_000)?;
    let exact = ldpc_sweep("n=384 exact", &code, AppSource::ExactSoft, (14.5, 0.5), 1e-5, stop, 9100)?;
    let simplified = ldpc_sweep("n=384 simplified", &code, AppSource::SimplifiedSoft, (14.5, 0.5), 1e-4, stop, 9200)?;
    let hard = ldpc_sweep("n=384 hard", &code, AppSource::HardOutput, (22.0, 0.5), 1e-5, stop, 9300)?;
    let e4 = crossing("exact", &exact, 1e-4);
    let e5 = crossing("exact", &exact, 1e-5);
    let s4 = crossing("simplified", &simplified, 1e-4);
    let h5 = crossing("hard", &hard, 1e-5);
    let gap = e4.zip(s4).map(|(e, s)| s - e);
    let penalty = e5.zip(h5).map(|(e, h)| h - e);

    let long = LdpcCode::construct(9999, 3, 9, 1)?;
    let full = std::env::var("TEQKD_ACCEPTANCE_FULL").is_ok_and(|v| v == "1");
    let long_target = if full { 1e-5 } else { 1e-4 };
    let long_stop = if full { StopRule::new(50, 200_000)? } else { StopRule::new(30, 5_000)? };
    let long_curve =
        ldpc_sweep("n=9999 exact", &long, AppSource::ExactSoft, (11.75, 0.25), long_target, long_stop, 9400)?;
    let l = crossing("n9999", &long_curve, long_target);
    Ok(vec![
        verdict(
            "9a",
            e4.is_some_and(|x| x <= 23.0),
            format!("n=384 exact APP reaches BER 1e-4 at {} dB (<= 23); {}", fmt_db(e4), show(&exact)),
        ),
        verdict(
            "9b",
            gap.is_some_and(|x| x <= 0.3),
            format!(
                "simplified APP at BER 1e-4: {} dB, {} dB from exact (<= 0.3); {}",
                fmt_db(s4),
                fmt_db(gap),
                show(&simplified)
            ),
        ),
        verdict(
            "9c",
            penalty.is_some_and(|x| (x - 8.5).abs() <= 1.0),
            format!(
                "hard APP at BER 1e-5: {} dB vs exact {} dB, penalty {} dB (8.5 +/- 1); {}",
                fmt_db(h5),
                fmt_db(e5),
                fmt_db(penalty),
                show(&hard)
            ),
        ),
        verdict(
            "9d",
            l.is_some_and(|x| (x - 12.47).abs() <= 0.5),
            format!(
                "n=9999 exact APP reaches BER {long_target:.0e} at {} dB (12.47 +/- 0.5); {}",
                fmt_db(l),
                show(&long_curve)
            ),
        ),
    ])
}

// 10. Property suites.
fn properties() -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let mut rng = rng_for(10, 0);

    let mut failures = 0;
    for spec in [CodeSpec::RS63_43, CodeSpec::BCH378_261] {
        let code = spec.build()?;
        let (n, q, t) = match &code {
            Code::Rs(c) => (c.n(), 1u16 << c.field().width(), c.t()),
            Code::Bch(c) => (c.n(), 2, c.t()),
            Code::Ldpc(_) => unreachable!(),
        };
        for _ in 0..10_000 {
            let alice: Vec<u16> = (0..n).map(|_| rng.random_range(0..q)).collect();
            let mut bob = alice.clone();
            let w = rng.random_range(0..=t);
            for pos in rand::seq::index::sample(&mut rng, n, w) {
                bob[pos] ^= rng.random_range(1..q);
            }
            let msg = alice_emit(&alice, &code, 0, [0; 8])?;
            let r = bob_reconcile_algebraic(&bob, &msg, &code)?;
            failures += usize::from(!r.success || r.recovered_word != alice);
        }
    }
    out.push(verdict(
        "10a",
        failures == 0,
        format!("RS and BCH, 10^4 trials each with weight <= t: {failures} failures"),
    ));

    let (mut row, mut sym) = (0f64, 0f64);
    for n in [2usize, 8, 16] {
        for g in [5.0, 15.0, 30.0] {
            let m = transition_matrix(&db(n, g))?;
            for i in 0..n {
                row = row.max((m.p[i].iter().sum::<f64>() - 1.0).abs());
                for j in 0..n {
                    sym = sym.max((m.p[i][j] - m.p[n - 1 - i][n - 1 - j]).abs());
                }
            }
        }
    }
    out.push(verdict(
        "10b",
        row <= 1e-9 && sym <= 1e-9,
        format!("transition rows sum to 1 within {row:.1e}, reversal symmetry {sym:.1e}"),
    ));

    let (mut norm, mut bayes) = (0f64, 0f64);
    for g in [10.0, 20.0, 30.0] {
        let p = db(8, g);
        let prior = prior_both_valid(&p)?;
        for _ in 0..200 {
            let y = rng.random_range(0.0..8.0);
            let app = app_bins(&p, y)?;
            norm = norm.max((app.iter().sum::<f64>() - 1.0).abs());
            let dens = output_density(&p, y)?;
            for (i, a) in app.iter().enumerate() {
                let direct = prior.probs[i] * likelihood(&p, i, y)? / dens;
                bayes = bayes.max((a - direct).abs());
            }
        }
    }
    out.push(verdict(
        "10c",
        norm <= 1e-9 && bayes <= 1e-9,
        format!("APP normalization {norm:.1e}, Bayes factorization {bayes:.1e}"),
    ));

    let adjacent = (0..4095usize).all(|i| (gray_code(i) ^ gray_code(i + 1)).count_ones() == 1);
    out.push(verdict("10d", adjacent, "Gray labels of adjacent bins differ in one bit for 12-bit labels"));

    let mut mismatches = 0;
    for _ in 0..2000 {
        let mut nonce = [0u8; 8];
        rng.fill(&mut nonce);
        let len = rng.random_range(0..300);
        let msgs = [
            Message::Hello { nonce, resume_from: rng.random() },
            Message::Params { n_bins: rng.random(), sigma: rng.random(), code_id: "ldpc-384-3-9-s1".into() },
            Message::Syndrome { block_index: rng.random(), syndrome: (0..len).map(|_| rng.random()).collect() },
            Message::Result { block_index: rng.random(), status: rng.random_range(0..2) },
            Message::Bye,
        ];
        for m in msgs {
            let bytes = m.encode()?;
            let (back, used) = Message::decode(&bytes)?;
            mismatches += usize::from(back != m || used != bytes.len() || back.encode()? != bytes);
        }
    }
    out.push(verdict("10e", mismatches == 0, format!("wire round trip over 10^4 messages: {mismatches} mismatches")));
    Ok(out)
}

type Criterion = fn() -> Result<Vec<Verdict>>;

fn main() {
    let all: [(&str, Criterion); 10] = [
        ("1", prior_rows),
        ("2", shannon_limits),
        ("3", closed_form_error_rate),
        ("4", approximations),
        ("5", data_processing),
        ("6", capacity_formula),
        ("7", rs_pipeline),
        ("8", bound_gaps),
        ("9", ldpc),
        ("10", properties),
    ];
    let only: Option<Vec<String>> =
        std::env::var("TEQKD_ACCEPTANCE").ok().map(|s| s.split(',').map(|x| x.trim().to_string()).collect());
    let mut unexpected = Vec::new();
    for (id, run) in all {
        if only.as_ref().is_some_and(|o| !o.iter().any(|x| x == id)) {
            continue;
        }
        let t0 = Instant::now();
        let verdicts = run().unwrap_or_else(|e| vec![verdict(id, false, format!("error: {e}"))]);
        let secs = t0.elapsed().as_secs_f64();
        for v in verdicts {
            let expected = EXPECTED_FAIL.contains(&v.id);
            let tag = match (v.pass, expected) {
                (true, _) => "PASS",
                (false, true) => "FAIL (expected)",
                (false, false) => "FAIL",
            };
            println!("{tag} {}: {} [{secs:.1} s]", v.id, v.detail);
            if v.pass == expected {
                unexpected.push(v.id);
            }
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected outcome for: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
