//! Weighted partial sums `Σ_{c ≤ x} S(m, n, c)/c` with a fixed reduction order.
//!
//! The range of `c` is cut into 1024-wide chunks. Chunks are evaluated in
//! parallel, and the per-`c` values are then folded into one compensated
//! accumulator in ascending `c`, so the result does not depend on the number
//! of worker threads or on completion order.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::exactsum::CompensatedSum;
use crate::kloosterman::cache::SumCache;
use crate::kloosterman::fast::{FastKernel, FastKind, Scratch};
use crate::kloosterman::{KloostermanQuery, SumKind};
use crate::special::TestFunctionParams;

/// Width of a work chunk in `c`.
pub const CHUNK: u64 = 1024;

/// Largest `c` evaluated through an exact multiset by default.
pub const DEFAULT_EXACT_CAP: u64 = 1000;

/// Where to record checkpoints.
#[derive(Clone, Debug, PartialEq)]
pub enum CheckpointGrid {
    /// `count` points spaced geometrically from `x_min` to `x_max`.
    LogSpaced { x_min: f64, count: usize },
    /// Powers of two up to `x_max`, then `x_max` itself.
    Dyadic,
    /// Given points; those above `x_max` are dropped.
    Explicit(Vec<f64>),
}

impl CheckpointGrid {
    pub fn points(&self, x_max: f64) -> Vec<f64> {
        let mut pts = match self {
            CheckpointGrid::LogSpaced { x_min, count } => {
                let count = (*count).max(1);
                let lo = x_min.max(1.0).min(x_max);
                if count == 1 || lo >= x_max {
                    vec![x_max]
                } else {
                    let step = (x_max / lo).ln() / (count - 1) as f64;
                    (0..count)
                        .map(|i| if i + 1 == count { x_max } else { lo * (step * i as f64).exp() })
                        .collect()
                }
            }
            CheckpointGrid::Dyadic => {
                let mut v = Vec::new();
                let mut x = 1.0;
                while x < x_max {
                    v.push(x);
                    x *= 2.0;
                }
                v.push(x_max);
                v
            }
            CheckpointGrid::Explicit(v) => v.iter().copied().filter(|&x| x <= x_max && x > 0.0).collect(),
        };
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite checkpoints"));
        pts.dedup();
        pts
    }
}

/// Evaluation settings shared by the partial-sum drivers.
#[derive(Clone, Debug)]
pub struct SumOptions {
    pub kind: SumKind,
    /// Sums with `c` up to this bound go through the exact multiset.
    pub exact_cap: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions { kind: SumKind::Eta, exact_cap: DEFAULT_EXACT_CAP, threads: None }
    }
}

/// Checkpointed accumulation of `Σ_{c ≤ x} S/c`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialSumSeries {
    pub m: i64,
    pub n: i64,
    pub kind: SumKind,
    pub checkpoints: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Neumaier residual at each checkpoint (already folded into `values`).
    pub compensation: Vec<Complex64>,
    /// Number of `c` summed up to each checkpoint.
    pub terms: Vec<u64>,
}

impl PartialSumSeries {
    /// Final accumulated value, 0 for an empty series.
    pub fn last_value(&self) -> Complex64 {
        self.values.last().copied().unwrap_or_default()
    }

    /// Little-endian bytes of every checkpoint, for byte-level comparisons.
    pub fn checkpoint_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.checkpoints.len() * 40);
        for i in 0..self.checkpoints.len() {
            out.extend_from_slice(&self.checkpoints[i].to_le_bytes());
            out.extend_from_slice(&self.values[i].re.to_le_bytes());
            out.extend_from_slice(&self.values[i].im.to_le_bytes());
            out.extend_from_slice(&self.terms[i].to_le_bytes());
        }
        out
    }

    /// CSV with header `x,re,im,abs,terms`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,re,im,abs,terms\n");
        for i in 0..self.checkpoints.len() {
            let v = self.values[i];
            s.push_str(&format!(
                "{},{:e},{:e},{:e},{}\n",
                self.checkpoints[i],
                v.re,
                v.im,
                v.norm(),
                self.terms[i]
            ));
        }
        s
    }
}

/// `S(m, n, c)` for one `c` as a double, using the exact path up to `exact_cap`.
/// Twisted kinds return 0 when `c` fails their congruence.
pub fn single_value(m: i64, n: i64, c: u64, opts: &SumOptions, scratch: &mut Scratch) -> Complex64 {
    match FastKind::from_sum_kind(opts.kind) {
        Some(fk) if c > opts.exact_cap => FastKernel::new(fk, m, n).sum_at(c, scratch),
        _ => match KloostermanQuery::new(m, n, c, opts.kind) {
            Ok(q) => q.compute().expect("validated query").evaluate(),
            Err(_) => Complex64::new(0.0, 0.0),
        },
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// `S(c)` for `c` in `[lo, hi]`, computed chunk-parallel, returned in ascending `c`.
pub fn values_in_range(m: i64, n: i64, lo: u64, hi: u64, opts: &SumOptions) -> Vec<Complex64> {
    if hi < lo {
        return Vec::new();
    }
    let starts: Vec<u64> = (lo..=hi).step_by(CHUNK as usize).collect();
    with_pool(opts.threads, || {
        starts
            .par_iter()
            .map(|&s| {
                let e = (s + CHUNK - 1).min(hi);
                let mut scratch = Scratch::default();
                (s..=e).map(|c| single_value(m, n, c, opts, &mut scratch)).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Fold ascending `S(c)` values (starting at `c = 1`) into checkpoints.
fn accumulate(m: i64, n: i64, kind: SumKind, points: Vec<f64>, values: &[Complex64]) -> PartialSumSeries {
    let mut acc = CompensatedSum::new();
    let mut series = PartialSumSeries {
        m,
        n,
        kind,
        checkpoints: Vec::with_capacity(points.len()),
        values: Vec::with_capacity(points.len()),
        compensation: Vec::with_capacity(points.len()),
        terms: Vec::with_capacity(points.len()),
    };
    let mut c = 0u64;
    for x in points {
        let upto = x.floor() as u64;
        while c < upto {
            c += 1;
            acc.add(values[(c - 1) as usize] / c as f64);
        }
        series.checkpoints.push(x);
        series.values.push(acc.value());
        series.compensation.push(acc.comp);
        series.terms.push(c);
    }
    series
}

/// Eta-kind partial sums with default options.
pub fn partial_sum(m: i64, n: i64, x_max: f64, grid: &CheckpointGrid) -> PartialSumSeries {
    partial_sum_with(m, n, x_max, grid, &SumOptions::default())
}

/// Partial sums with explicit kind, exact cap and thread count.
pub fn partial_sum_with(m: i64, n: i64, x_max: f64, grid: &CheckpointGrid, opts: &SumOptions) -> PartialSumSeries {
    if !(x_max >= 1.0) {
        return accumulate(m, n, opts.kind, Vec::new(), &[]);
    }
    let cmax = x_max.floor() as u64;
    let values = values_in_range(m, n, 1, cmax, opts);
    accumulate(m, n, opts.kind, grid.points(x_max), &values)
}

/// Partial sums that reuse and extend the on-disk cache for `(m, n, kind)`.
pub fn partial_sum_cached(
    m: i64,
    n: i64,
    x_max: f64,
    grid: &CheckpointGrid,
    opts: &SumOptions,
    cache_dir: &Path,
) -> Result<PartialSumSeries> {
    if !(x_max >= 1.0) {
        return Ok(accumulate(m, n, opts.kind, Vec::new(), &[]));
    }
    let cmax = x_max.floor() as u64;
    let cache = SumCache::new(cache_dir);
    let mut values = cache.load(m, n, opts.kind)?;
    let have = values.len() as u64;
    if have < cmax {
        values.extend(values_in_range(m, n, have + 1, cmax, opts));
        cache.store(m, n, opts.kind, &values)?;
    }
    Ok(accumulate(m, n, opts.kind, grid.points(x_max), &values[..cmax as usize]))
}

/// `Σ_{x ≤ c ≤ 2x} S(m, n, c)/c`.
pub fn windowed_sum(m: i64, n: i64, x: f64, opts: &SumOptions) -> Complex64 {
    let lo = x.ceil().max(1.0) as u64;
    let hi = (2.0 * x).floor() as u64;
    let mut acc = CompensatedSum::new();
    for (i, v) in values_in_range(m, n, lo, hi, opts).into_iter().enumerate() {
        acc.add(v / (lo + i as u64) as f64);
    }
    acc.value()
}

/// `a = 4π √(m̃ |ñ|)` for the eta kind, with `m̃ = m − 23/24`.
pub fn smoothing_scale(m: i64, n: i64) -> f64 {
    let mt = m as f64 - 23.0 / 24.0;
    let nt = n as f64 - 23.0 / 24.0;
    4.0 * std::f64::consts::PI * (mt * nt).abs().sqrt()
}

/// Range of `c` where `φ(a/c)` can be nonzero.
pub fn smoothed_range(phi: &TestFunctionParams) -> (u64, u64) {
    let (lo_t, hi_t) = phi.support();
    let c_lo = (phi.a / hi_t).floor().max(1.0) as u64;
    let c_hi = (phi.a / lo_t).ceil() as u64;
    (c_lo, c_hi)
}

/// `Σ_c S(m, n, c)/c · φ(a/c)` over the support of φ.
pub fn smoothed_sum(m: i64, n: i64, phi: &TestFunctionParams, opts: &SumOptions) -> Complex64 {
    let (lo, hi) = smoothed_range(phi);
    let mut acc = CompensatedSum::new();
    for (i, v) in values_in_range(m, n, lo, hi, opts).into_iter().enumerate() {
        let c = (lo + i as u64) as f64;
        let w = phi.eval(phi.a / c);
        if w != 0.0 {
            acc.add(v * (w / c));
        }
    }
    acc.value()
}
