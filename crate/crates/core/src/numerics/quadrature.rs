//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol * |I|)`. The refinement order depends
//! only on the integrand values, so results are bit-reproducible.

use crate::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Tolerances and work cap for [`integrate`] and friends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_subdivisions: 1 << 16 }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol >= 0.0) || max_subdivisions == 0 {
            return Err(Error::Config(format!(
                "quadrature spec needs abs_tol > 0, rel_tol >= 0, max_subdivisions >= 1 \
                 (got {abs_tol}, {rel_tol}, {max_subdivisions})"
            )));
        }
        Ok(Self { abs_tol, rel_tol, max_subdivisions })
    }

    /// Same cap, different tolerances.
    pub fn with_tol(self, abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..self }
    }
}

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

struct Panel {
    a: f64,
    b: f64,
    est: Vec<f64>,
    err: Vec<f64>,
    key: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties broken by position so the heap order is total.
        self.key.total_cmp(&other.key).then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One 21-point panel on `[a, b]` for a `dim`-valued integrand.
fn gk21<F: Fn(f64, &mut [f64])>(f: &F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut resk = vec![0.0; dim];
    let mut resg = vec![0.0; dim];
    let mut resabs = vec![0.0; dim];
    let mut vals = vec![0.0; 21 * dim];
    for (j, &x) in XGK.iter().enumerate() {
        let nodes: &[f64] = if j == 10 { &[0.0] } else { &[-1.0, 1.0] };
        for (s, sign) in nodes.iter().enumerate() {
            let slot = if j == 10 { 20 } else { 2 * j + s };
            f(c + sign * h * x, buf);
            vals[slot * dim..(slot + 1) * dim].copy_from_slice(buf);
            for d in 0..dim {
                let v = buf[d];
                resk[d] += WGK[j] * v;
                resabs[d] += WGK[j] * v.abs();
                if j % 2 == 1 {
                    resg[d] += WG[j / 2] * v;
                }
            }
        }
    }
    // Weight sum accumulated in node order, so constants integrate exactly.
    let mut wsum = 0.0;
    for (j, &w) in WGK.iter().enumerate() {
        wsum += w;
        if j != 10 {
            wsum += w;
        }
    }
    let mut est = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut key: f64 = 0.0;
    for d in 0..dim {
        let mean = 0.5 * resk[d];
        let mut resasc = 0.0;
        for (slot, v) in vals.iter().skip(d).step_by(dim).enumerate() {
            let j = if slot == 20 { 10 } else { slot / 2 };
            resasc += WGK[j] * (v - mean).abs();
        }
        let resasc = resasc * h.abs();
        let resabs = resabs[d] * h.abs();
        est[d] = resk[d] / wsum * 2.0 * h;
        let mut e = ((resk[d] - resg[d]) * h).abs();
        if resasc != 0.0 && e != 0.0 {
            e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            e = e.max(50.0 * f64::EPSILON * resabs);
        }
        err[d] = e;
        key = key.max(e);
    }
    Panel { a, b, est, err, key }
}

/// Integrates a `dim`-valued function over consecutive panels delimited by
/// `points` (sorted, at least two). Splitting is driven by the worst component.
pub fn integrate_vec<F: Fn(f64, &mut [f64])>(
    f: F,
    dim: usize,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    if points.len() < 2 || points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Domain(format!("integration limits must be sorted, got {points:?}")));
    }
    let mut buf = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Panel> = Vec::new();
    for w in points.windows(2) {
        if w[0] < w[1] {
            heap.push(gk21(&f, w[0], w[1], dim, &mut buf));
        }
    }
    let mut subdivisions = heap.len();
    loop {
        let mut total = vec![0.0; dim];
        let mut errs = vec![0.0; dim];
        for p in heap.iter().chain(done.iter()) {
            for d in 0..dim {
                total[d] += p.est[d];
                errs[d] += p.err[d];
            }
        }
        let converged = (0..dim).all(|d| errs[d] <= spec.abs_tol.max(spec.rel_tol * total[d].abs()));
        if converged || heap.is_empty() {
            return Ok(total);
        }
        if subdivisions >= spec.max_subdivisions {
            let worst = errs.iter().copied().fold(0.0, f64::max);
            return Err(Error::NonConvergence {
                a: points[0],
                b: points[points.len() - 1],
                subdivisions,
                error_estimate: worst,
            });
        }
        // Bisect a batch of the worst panels before re-summing.
        let batch = (heap.len() / 4).max(1);
        for _ in 0..batch {
            let Some(p) = heap.pop() else { break };
            let m = 0.5 * (p.a + p.b);
            if !(p.a < m && m < p.b) {
                // Panel at the resolution limit; its error estimate is final.
                done.push(p);
                continue;
            }
            heap.push(gk21(&f, p.a, m, dim, &mut buf));
            heap.push(gk21(&f, m, p.b, dim, &mut buf));
            subdivisions += 1;
        }
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if a > b {
        return Err(Error::Domain(format!("integration limits reversed: [{a}, {b}]")));
    }
    integrate_breaks(f, &[a, b], spec)
}

/// Integrates `f` over `[points[0], points[last]]`, starting with one panel
/// per gap so kinks or steep regions at `points` are resolved.
pub fn integrate_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    integrate_vec(|x, out| out[0] = f(x), 1, points, spec).map(|v| v[0])
}

/// [`integrate_breaks`] for an integrand that can fail; the first failure
/// aborts the integral and is returned.
pub fn integrate_fallible<F: Fn(f64) -> Result<f64>>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let failure = std::cell::RefCell::new(None);
    let v = integrate_breaks(
        |x| {
            if failure.borrow().is_some() {
                return 0.0;
            }
            f(x).unwrap_or_else(|e| {
                *failure.borrow_mut() = Some(e);
                0.0
            })
        },
        points,
        spec,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => v,
    }
}
