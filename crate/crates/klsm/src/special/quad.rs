//! Adaptive Gauss–Kronrod (15-point Gauss, 31-point Kronrod) quadrature
//! for complex-valued integrands on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exactsum::CompensatedSum;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 16] = [
    0.99800229869339706028,
    0.98799251802048542848,
    0.96773907567913913425,
    0.93727339240070590430,
    0.89726453234408190088,
    0.84820658341042721620,
    0.79041850144246593296,
    0.72441773136017004741,
    0.65099674129741697053,
    0.57097217260853884753,
    0.48508186364023968069,
    0.39415134707756336989,
    0.29918000715316881216,
    0.20119409399743452230,
    0.10114206691871749902,
    0.00000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 8] = [
    0.03075324199611726835,
    0.07036604748810812470,
    0.10715922046717193501,
    0.13957067792615431444,
    0.16626920581699393355,
    0.18616100001556221102,
    0.19843148532711157645,
    0.20257824192556127288,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 16] = [
    0.00537747987292334898,
    0.01500794732931612253,
    0.02546084732671532018,
    0.03534636079137584622,
    0.04458975132476487660,
    0.05348152469092808726,
    0.06200956780067064028,
    0.06985412131872825870,
    0.07684968075772037889,
    0.08308050282313302103,
    0.08856444305621177064,
    0.09312659817082532122,
    0.09664272698362367850,
    0.09917359872179195933,
    0.10076984552387559504,
    0.10133000701479154901,
];

/// Integral estimate with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

/// One G15/K31 panel: Kronrod value and `|K − G|`.
pub fn gk31<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc * WGK[15];
    let mut gauss = fc * WG[7];
    for j in 0..15 {
        let dx = half * XGK[j];
        let s = f(centre - dx) + f(centre + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * half, ((kron - gauss) * half).norm())
}

/// Fixed composite rule with `panels` equal panels.
pub fn composite<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, panels: usize) -> QuadResult {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = CompensatedSum::new();
    let mut err = 0.0;
    for i in 0..panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == panels { b } else { lo + h };
        let (v, e) = gk31(f, lo, hi);
        acc.add(v);
        err += e;
    }
    QuadResult { value: acc.value(), error: err, intervals: panels }
}

/// Tolerances and limits for [`adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 20_000 }
    }
}

/// Adaptive bisection starting from the panels between consecutive
/// `breakpoints`. Panels are summed in left-to-right order.
pub fn adaptive<F: Fn(f64) -> Complex64>(f: &F, breakpoints: &[f64], cfg: &QuadConfig) -> Result<QuadResult> {
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup();
    let mut panels: Vec<(f64, f64, Complex64, f64)> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in pts.windows(2) {
        let (v, e) = gk31(f, w[0], w[1]);
        heap.push(ByError(e, panels.len()));
        panels.push((w[0], w[1], v, e));
        total += v;
        err += e;
    }
    if panels.is_empty() {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, intervals: 0 });
    }
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if err <= tol {
            break;
        }
        if panels.len() >= cfg.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "error {err:e} above tolerance {tol:e} after {} panels",
                panels.len()
            )));
        }
        let ByError(_, idx) = heap.pop().expect("non-empty");
        let (a, b, v, e) = panels[idx];
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            return Err(Error::QuadratureFailure(format!("interval [{a}, {b}] cannot be split further")));
        }
        let (v1, e1) = gk31(f, a, mid);
        let (v2, e2) = gk31(f, mid, b);
        total += v1 + v2 - v;
        err += e1 + e2 - e;
        panels[idx] = (a, mid, v1, e1);
        heap.push(ByError(e1, idx));
        heap.push(ByError(e2, panels.len()));
        panels.push((mid, b, v2, e2));
    }
    panels.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite"));
    let mut acc = CompensatedSum::new();
    let mut err = 0.0;
    for p in &panels {
        acc.add(p.2);
        err += p.3;
    }
    Ok(QuadResult { value: acc.value(), error: err, intervals: panels.len() })
}

struct ByError(f64, usize);

impl PartialEq for ByError {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for ByError {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0).then(o.1.cmp(&self.1))
    }
}

/// Real-valued convenience wrapper around [`adaptive`].
pub fn adaptive_real<F: Fn(f64) -> f64>(f: &F, breakpoints: &[f64], cfg: &QuadConfig) -> Result<(f64, f64)> {
    let g = |x: f64| Complex64::new(f(x), 0.0);
    let r = adaptive(&g, breakpoints, cfg)?;
    Ok((r.value.re, r.error))
}
