//! Growth-exponent fits for partial sums, regime labels, and the named
//! split points used to choose scan windows.

use std::fmt;
use std::path::Path;

use crate::arith::{is_generalized_pentagonal, squarefree_decompose};
use crate::error::{Error, Result};
use crate::kloosterman::partial::{partial_sum_cached, partial_sum_with, CheckpointGrid, PartialSumSeries, SumOptions};

/// Magnitudes below this are clamped before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-15;

/// Least-squares line through `(ln x_i, ln |y_i|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

/// Fits `ln max(|y|, LOG_FLOOR)` against `ln x`; needs two distinct `x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<ExponentFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().max(LOG_FLOOR).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some(ExponentFit { slope, intercept: my - slope * mx, r_squared, window: (lo, hi) })
}

/// Fit of `|Σ|` over the upper half of the checkpoints.
pub fn fit_upper_half(series: &PartialSumSeries) -> Option<ExponentFit> {
    let k = series.checkpoints.len();
    let start = k / 2;
    let ys: Vec<f64> = series.values[start..].iter().map(|v| v.norm()).collect();
    fit_loglog(&series.checkpoints[start..], &ys)
}

/// Which growth the partial sums are expected to show.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `m − 1` and `n − 1` both generalized pentagonal: slope near 1/2.
    MainTerm,
    Cancellation,
}

impl Regime {
    pub fn of(m: i64, n: i64) -> Self {
        let pent = |k: i64| k >= 1 && is_generalized_pentagonal((k - 1) as u64);
        if pent(m) && pent(n) {
            Regime::MainTerm
        } else {
            Regime::Cancellation
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::MainTerm => f.write_str("main-term regime"),
            Regime::Cancellation => f.write_str("cancellation regime"),
        }
    }
}

/// A partial-sum run with its fit.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub series: PartialSumSeries,
    pub fit: Option<ExponentFit>,
    pub regime: Regime,
}

/// Inputs of a scan.
#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub m: i64,
    pub n: i64,
    pub x_min: f64,
    pub x_max: f64,
    pub grid: CheckpointGrid,
    pub options: SumOptions,
}

impl ScanConfig {
    /// Log-spaced checkpoints.
    pub fn log_spaced(m: i64, n: i64, x_min: f64, x_max: f64, count: usize) -> Self {
        ScanConfig {
            m,
            n,
            x_min,
            x_max,
            grid: CheckpointGrid::LogSpaced { x_min, count },
            options: SumOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min >= 1.0) || !(self.x_max >= self.x_min) || !self.x_max.is_finite() {
            return Err(Error::InvalidQuery(format!(
                "need 1 ≤ x_min ≤ x_max (got {}, {})",
                self.x_min, self.x_max
            )));
        }
        if let CheckpointGrid::LogSpaced { count, .. } = self.grid {
            if count < 2 {
                return Err(Error::InvalidQuery("at least two checkpoints are needed for a fit".into()));
            }
        }
        Ok(())
    }
}

/// Runs the partial sums (through the cache when a directory is given),
/// drops checkpoints below `x_min`, and fits the upper half.
pub fn scan(cfg: &ScanConfig, cache_dir: Option<&Path>) -> Result<ScanResult> {
    cfg.validate()?;
    let mut series = match cache_dir {
        Some(dir) => partial_sum_cached(cfg.m, cfg.n, cfg.x_max, &cfg.grid, &cfg.options, dir)?,
        None => partial_sum_with(cfg.m, cfg.n, cfg.x_max, &cfg.grid, &cfg.options),
    };
    // checkpoints are ascending
    let skip = series.checkpoints.partition_point(|&x| x < cfg.x_min);
    series.checkpoints.drain(..skip);
    series.values.drain(..skip);
    series.compensation.drain(..skip);
    series.terms.drain(..skip);
    let fit = fit_upper_half(&series);
    Ok(ScanResult { series, fit, regime: Regime::of(cfg.m, cfg.n) })
}

/// A named split point.
#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub value: f64,
    pub formula: &'static str,
}

fn shifted(k: i64) -> f64 {
    k as f64 - 23.0 / 24.0
}

/// `|m̃ñ|^{38/77}`: start of the dyadic range in the mixed-sign case.
pub fn mixed_sign_cutoff(m: i64, n: i64) -> f64 {
    (shifted(m) * shifted(n)).abs().powf(38.0 / 77.0)
}

/// `|m̃ñ|^{19/77}`: size of the initial segment below the mixed-sign cutoff.
pub fn initial_segment_size(m: i64, n: i64) -> f64 {
    (shifted(m) * shifted(n)).abs().powf(19.0 / 77.0)
}

/// `4π√(m̃ñ)` for `m, n > 0`.
pub fn positive_cutoff(m: i64, n: i64) -> f64 {
    4.0 * std::f64::consts::PI * (shifted(m) * shifted(n)).abs().sqrt()
}

/// Square-free parts `(s, t)` of `24m − 23` and `24n − 23` (`m, n ≥ 1`).
pub fn squarefree_parts(m: i64, n: i64) -> Result<(u64, u64)> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidQuery("square-free parts need m, n ≥ 1".into()));
    }
    let s = squarefree_decompose((24 * m - 23) as u64).core;
    let t = squarefree_decompose((24 * n - 23) as u64).core;
    Ok((s, t))
}

/// `(st)^{1/6} (mn)^{1/3}` for `m, n > 0`.
pub fn squarefree_cutoff(m: i64, n: i64) -> Result<f64> {
    let (s, t) = squarefree_parts(m, n)?;
    Ok(((s * t) as f64).powf(1.0 / 6.0) * ((m * n) as f64).powf(1.0 / 3.0))
}

/// `T = x^{2/3}`.
pub fn smoothing_width(x: f64) -> f64 {
    x.cbrt().powi(2)
}

/// Every split point that applies to `(m, n)` at scale `x`.
pub fn presets(m: i64, n: i64, x: f64) -> Vec<Preset> {
    let mut out = Vec::new();
    if (m > 0) != (n > 0) {
        out.push(Preset { name: "mixed_sign_cutoff", value: mixed_sign_cutoff(m, n), formula: "|m~n~|^(38/77)" });
        out.push(Preset {
            name: "initial_segment_size",
            value: initial_segment_size(m, n),
            formula: "|m~n~|^(19/77)",
        });
    }
    if m > 0 && n > 0 {
        out.push(Preset { name: "positive_cutoff", value: positive_cutoff(m, n), formula: "4*pi*sqrt(m~n~)" });
        if let Ok(v) = squarefree_cutoff(m, n) {
            out.push(Preset { name: "squarefree_cutoff", value: v, formula: "(st)^(1/6)*(mn)^(1/3)" });
        }
    }
    out.push(Preset { name: "smoothing_width", value: smoothing_width(x), formula: "x^(2/3)" });
    out
}
