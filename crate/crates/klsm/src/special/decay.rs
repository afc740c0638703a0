//! Decay-rate experiments for the transforms and the stability of the
//! holomorphic weight sum, each reduced to numbers that can be compared
//! against fixed exponents.

use crate::error::Result;
use crate::scan::fit_loglog;
use crate::special::testfn::TestFunctionParams;
use crate::special::transforms::{holomorphic_weight_sum, transform_hat, transform_phi, SpectralParam};

/// Added to every predicted exponent before comparing.
pub const SLOPE_SLACK: f64 = 0.1;

/// Largest `r` on the dyadic grids.
pub const R_MAX: f64 = 256.0;

/// `(a, x, T)` presets: `a/x` of 1/2, 16 and 64.
pub const DECAY_PRESETS: [(f64, f64, f64); 3] = [(5.0, 10.0, 3.0), (160.0, 10.0, 3.0), (640.0, 10.0, 3.0)];

/// Powers of two in `[lo, hi]`.
pub fn dyadic_grid(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = 1.0;
    while r <= hi {
        if r >= lo {
            out.push(r);
        }
        r *= 2.0;
    }
    out
}

/// One fitted exponent against its limit.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeCheck {
    pub label: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `None` when the grid has fewer than three points.
    pub slope: Option<f64>,
    /// Predicted exponent plus `SLOPE_SLACK`.
    pub limit: f64,
}

impl SlopeCheck {
    /// A check with too few grid points passes vacuously.
    pub fn passed(&self) -> bool {
        self.slope.map_or(true, |s| s <= self.limit)
    }

    fn build(label: String, grid: Vec<f64>, values: Vec<f64>, exponent: f64) -> Self {
        let slope = if grid.len() >= 3 { fit_loglog(&grid, &values).map(|f| f.slope) } else { None };
        SlopeCheck { label, grid, values, slope, limit: exponent + SLOPE_SLACK }
    }
}

fn hat_abs(p: &TestFunctionParams, rs: &[f64]) -> Result<Vec<f64>> {
    rs.iter().map(|&r| transform_hat(p, r).map(|v| v.value.norm())).collect()
}

fn phi_abs(p: &TestFunctionParams, rs: &[f64]) -> Result<Vec<f64>> {
    rs.iter().map(|&r| transform_phi(p, SpectralParam::Real(r)).map(|v| v.value.norm())).collect()
}

fn regime_starts(p: &TestFunctionParams) -> (f64, f64) {
    let lo = (p.a / p.x).max(1.0);
    (lo, lo.max(p.x / p.t))
}

/// The same-sign bounds: slope `−1` for `r ≥ 1` and for `r ≥ max(a/x, 1)`,
/// and slope `−2` once `r ≥ x/T` as well, where `r^{−2}x/T` is the smaller term.
pub fn hat_decay_checks(p: &TestFunctionParams) -> Result<Vec<SlopeCheck>> {
    let (lo, lo_t) = regime_starts(p);
    let all = dyadic_grid(1.0, R_MAX);
    let vals = hat_abs(p, &all)?;
    let pick = |start: f64| -> (Vec<f64>, Vec<f64>) {
        all.iter().zip(&vals).filter(|(r, _)| **r >= start).map(|(r, v)| (*r, *v)).unzip()
    };
    let mut out = Vec::new();
    let (g, v) = pick(1.0);
    out.push(SlopeCheck::build("hat r>=1 ~ r^-1".into(), g, v, -1.0));
    let (g, v) = pick(lo);
    out.push(SlopeCheck::build("hat r>=max(a/x,1) ~ r^-1".into(), g, v, -1.0));
    let (g, v) = pick(lo_t);
    out.push(SlopeCheck::build("hat r>=max(a/x,1,x/T) ~ r^-2 x/T".into(), g, v, -2.0));
    Ok(out)
}

/// The mixed-sign bounds past `max(a/x, 1)`: slope `−3/2`, and `−5/2`
/// once `r ≥ x/T` as well.
pub fn phi_decay_checks(p: &TestFunctionParams) -> Result<Vec<SlopeCheck>> {
    let (lo, lo_t) = regime_starts(p);
    let all = dyadic_grid(lo, R_MAX);
    let vals = phi_abs(p, &all)?;
    let mut out = Vec::new();
    out.push(SlopeCheck::build("Phi r>=max(a/x,1) ~ r^-3/2".into(), all.clone(), vals.clone(), -1.5));
    let (g, v): (Vec<f64>, Vec<f64>) = all.iter().zip(&vals).filter(|(r, _)| **r >= lo_t).map(|(r, v)| (*r, *v)).unzip();
    out.push(SlopeCheck::build("Phi r>=max(a/x,1,x/T) ~ r^-5/2 x/T".into(), g, v, -2.5));
    Ok(out)
}

/// `|Φ̌(r)| r^{3/2} e^{r/2}` at integer `r` in `[1, a/8x]`.
///
/// For fixed parameters `|Φ̌|` grows with `r` in this range (roughly like
/// `e^{πr − y₀}` with `y₀` the bottom of the support), so the bound can
/// only be compared as a bound: `ratio ≤ EXP_REGIME_LIMIT` at every point.
pub fn phi_exponential_ratios(p: &TestFunctionParams) -> Result<Vec<(f64, f64)>> {
    let top = p.a / (8.0 * p.x);
    let mut out = Vec::new();
    let mut r = 1.0;
    while r <= top {
        let v = transform_phi(p, SpectralParam::Real(r))?.value.norm();
        out.push((r, v * r.powf(1.5) * (r / 2.0).exp()));
        r += 1.0;
    }
    Ok(out)
}

pub const EXP_REGIME_LIMIT: f64 = 1.0;

/// `(m, n, x)` grid for the weight-sum check: `mn ∈ {10⁴, 10⁵, 10⁶}`,
/// `x ∈ {30, 100, 300}`, all with `x < 4π√(m̃ñ)`.
pub const WEIGHT_GRID_MN: [(i64, i64); 3] = [(100, 100), (100, 1000), (1000, 1000)];
pub const WEIGHT_GRID_X: [f64; 3] = [30.0, 100.0, 300.0];

/// Largest allowed factor between the fitted constant and any grid ratio.
pub const WEIGHT_STABILITY: f64 = 3.0;

/// One grid point of the weight-sum check.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSumPoint {
    pub m: i64,
    pub n: i64,
    pub x: f64,
    pub sum: f64,
    pub terms: usize,
    /// `sum / (1 + √(mn)/x)`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSumReport {
    pub points: Vec<WeightSumPoint>,
    /// `√(max·min)` of the ratios: the constant minimizing the worst factor.
    pub fitted_c: f64,
    /// Worst factor between `fitted_c` and a ratio.
    pub worst_factor: f64,
}

impl WeightSumReport {
    pub fn passed(&self) -> bool {
        self.worst_factor <= WEIGHT_STABILITY && self.points.iter().all(|p| p.sum.is_finite())
    }
}

/// `Σ_l (2l − 1/2)|φ̌(1/2 + 2l)|` with `a = 4π√(m̃ñ)` and `T = x^{2/3}`.
pub fn weight_sum_point(m: i64, n: i64, x: f64) -> Result<WeightSumPoint> {
    let a = crate::scan::positive_cutoff(m, n);
    let p = TestFunctionParams::new(a, x, crate::scan::smoothing_width(x))?;
    let (sum, terms) = holomorphic_weight_sum(&p)?;
    let ratio = sum / (1.0 + ((m * n) as f64).sqrt() / x);
    Ok(WeightSumPoint { m, n, x, sum, terms, ratio })
}

pub fn weight_sum_grid() -> Result<WeightSumReport> {
    let mut points = Vec::new();
    for &(m, n) in &WEIGHT_GRID_MN {
        for &x in &WEIGHT_GRID_X {
            points.push(weight_sum_point(m, n, x)?);
        }
    }
    let max = points.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let min = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    let fitted_c = (max * min).sqrt();
    let worst_factor = if min > 0.0 { (max / min).sqrt() } else { f64::INFINITY };
    Ok(WeightSumReport { points, fitted_c, worst_factor })
}
