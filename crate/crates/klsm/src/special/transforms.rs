//! Bessel-kernel transforms of a weight `w` against `dy/y`:
//!
//! * `φ̌(r) = ∫ J_{r−1}(y) w(y) dy/y`
//! * `φ̂(r) = π² e^{3πi/4} ∫ (cos π(¼+ir) J_{2ir} − cos π(¼−ir) J_{−2ir}) w dy/y
//!   / (sh(πr) ch(2πr) Γ(¼+ir) Γ(¼−ir))`
//! * `Φ̌(r) = ch(πr) ∫ K_{2ir}(y) w(y) dy/y`
//!
//! Large exponential factors are carried as logarithms: the `J_{2ir}` values
//! are scaled by `e^{−πr}` before they enter the integrand.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::bessel::{bessel_k_imaginary_order, bessel_k_real, BesselGrid};
use crate::special::gamma::ln_gamma_complex;
use crate::special::quad::{adaptive, QuadConfig, QuadResult};
use crate::special::testfn::Weight;

/// Spectral parameter: real, or the exceptional point `i/4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralParam {
    Real(f64),
    QuarterI,
}

impl fmt::Display for SpectralParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralParam::Real(r) => write!(f, "{r}"),
            SpectralParam::QuarterI => f.write_str("i/4"),
        }
    }
}

/// A transform value with its quadrature error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformValue {
    pub r: SpectralParam,
    pub value: Complex64,
    pub quad_error: f64,
}

/// Which integrand is used for `φ̂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HatForm {
    /// `cos π(¼+ir) J_{2ir} − cos π(¼−ir) J_{−2ir}`
    Hat,
    /// `(1/√2)(cos(πir)(J_{2ir} − J_{−2ir}) − sin(πir)(J_{2ir} + J_{−2ir}))`
    Con,
}

fn quad_config() -> QuadConfig {
    QuadConfig { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 200_000 }
}

/// Breakpoints of the weight refined so that each panel spans at most
/// about π of kernel phase, with local frequency `omega(y)`.
fn split_points(bps: &[f64], omega: impl Fn(f64) -> f64) -> Vec<f64> {
    let lo = bps[0];
    let hi = *bps.last().expect("non-empty");
    let min_step = (hi - lo) * 1e-7;
    let mut pts = bps.to_vec();
    let mut y = lo;
    while y < hi {
        let w = omega(y.max(min_step)).max(1e-12);
        let dy = (PI / w).max(min_step);
        y += dy;
        if y < hi {
            pts.push(y);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup();
    pts
}

fn integrate(f: &dyn Fn(f64) -> Complex64, pts: &[f64]) -> Result<QuadResult> {
    adaptive(&f, pts, &quad_config())
}

/// `φ̌(r)` for real `r ≥ 1/2`.
pub fn transform_check(w: &dyn Weight, r: f64) -> Result<TransformValue> {
    if !(r >= 0.5) {
        return Err(Error::InadmissibleParams(format!("φ̌ needs r ≥ 1/2, got {r}")));
    }
    let bps = w.breakpoints();
    let zero = TransformValue { r: SpectralParam::Real(r), value: Complex64::new(0.0, 0.0), quad_error: 0.0 };
    if bps.len() < 2 {
        return Ok(zero);
    }
    let nu = r - 1.0;
    let hi = *bps.last().expect("non-empty");
    let grid = BesselGrid::j(Complex64::new(nu, 0.0), hi);
    let f = |y: f64| Complex64::new(grid.eval(y).re * w.value(y) / y, 0.0);
    let pts = split_points(&bps, |y| (1.0 - nu * nu / (y * y)).max(0.0).sqrt());
    let q = integrate(&f, &pts)?;
    Ok(TransformValue { r: SpectralParam::Real(r), value: q.value, quad_error: q.error })
}

/// The two forms of the `φ̂` integrand bracket at `y`, both multiplied by
/// `e^{−2πr}`, given `J_{2ir}(y)·e^{−πr}`.
pub fn hat_brackets(r: f64, j_scaled: Complex64) -> (Complex64, Complex64) {
    let e = (-2.0 * PI * r).exp();
    let jp = j_scaled;
    let jm = j_scaled.conj();
    let w8 = Complex64::from_polar(1.0, PI / 4.0);
    let c_plus = (w8 * e + w8.conj()) * 0.5;
    let c_minus = (w8 + w8.conj() * e) * 0.5;
    let hat = c_plus * jp - c_minus * jm;
    let ch = 0.5 * (1.0 + e);
    let sh = 0.5 * (1.0 - e);
    let con = ((jp - jm) * ch - Complex64::new(0.0, sh) * (jp + jm)) * FRAC_1_SQRT_2;
    (hat, con)
}

/// `ln` of `e^{2πr} / (sh(πr) ch(2πr) |Γ(¼+ir)|²)` for `r > 0`.
fn hat_log_prefactor(r: f64) -> Result<f64> {
    let e = (-2.0 * PI * r).exp();
    let ln_sh = PI * r + (-(-2.0 * PI * r).exp_m1() / 2.0).ln();
    let ln_ch2 = 2.0 * PI * r + ((1.0 + e * e) / 2.0).ln();
    let lg = ln_gamma_complex(Complex64::new(0.25, r))?.re;
    Ok(2.0 * PI * r - ln_sh - ln_ch2 - 2.0 * lg)
}

/// `φ̂(r)` through the `(con)` integrand.
pub fn transform_hat(w: &dyn Weight, r: f64) -> Result<TransformValue> {
    transform_hat_with(w, r, HatForm::Con)
}

/// `φ̂(r)` through the chosen integrand; `r = 0` uses the limit
/// `B(r)/sh(πr) → i√2 (Y_0 − J_0)`.
pub fn transform_hat_with(w: &dyn Weight, r: f64, form: HatForm) -> Result<TransformValue> {
    let r = r.abs();
    let bps = w.breakpoints();
    let zero = TransformValue { r: SpectralParam::Real(r), value: Complex64::new(0.0, 0.0), quad_error: 0.0 };
    if bps.len() < 2 {
        return Ok(zero);
    }
    let hi = *bps.last().expect("non-empty");
    let outer = Complex64::from_polar(PI * PI, 3.0 * PI / 4.0);
    if r == 0.0 {
        let jg = BesselGrid::j(Complex64::new(0.0, 0.0), hi);
        let yg = BesselGrid::y0(hi);
        let f = |y: f64| Complex64::new((yg.eval(y).re - jg.eval(y).re) * w.value(y) / y, 0.0);
        let pts = split_points(&bps, |_| 1.0);
        let q = integrate(&f, &pts)?;
        let g = ln_gamma_complex(Complex64::new(0.25, 0.0))?.re;
        let factor = outer * Complex64::new(0.0, SQRT_2) * (-2.0 * g).exp();
        return Ok(TransformValue { r: SpectralParam::Real(0.0), value: factor * q.value, quad_error: factor.norm() * q.error });
    }
    let grid = BesselGrid::j_imaginary(r, hi);
    let f = |y: f64| {
        let (hat, con) = hat_brackets(r, grid.eval_scaled(y, PI * r));
        let b = match form {
            HatForm::Hat => hat,
            HatForm::Con => con,
        };
        b * (w.value(y) / y)
    };
    let pts = split_points(&bps, |y| (1.0 + 4.0 * r * r / (y * y)).sqrt());
    let q = integrate(&f, &pts)?;
    let factor = outer * hat_log_prefactor(r)?.exp();
    Ok(TransformValue { r: SpectralParam::Real(r), value: factor * q.value, quad_error: factor.norm() * q.error })
}

/// `Φ̌(r)`; `r = i/4` becomes `cos(π/4) ∫ K_{1/2}(y) w(y) dy/y`.
pub fn transform_phi(w: &dyn Weight, r: SpectralParam) -> Result<TransformValue> {
    let bps = w.breakpoints();
    let zero = TransformValue { r, value: Complex64::new(0.0, 0.0), quad_error: 0.0 };
    if bps.len() < 2 {
        return Ok(zero);
    }
    let lo = bps[0];
    let hi = *bps.last().expect("non-empty");
    match r {
        SpectralParam::QuarterI => {
            let f = |y: f64| Complex64::new(bessel_k_real(0.5, y) * w.value(y) / y, 0.0);
            let q = integrate(&f, &split_points(&bps, |_| 1.0))?;
            let c = (PI / 4.0).cos();
            Ok(TransformValue { r, value: q.value * c, quad_error: q.error * c })
        }
        SpectralParam::Real(rr) => {
            let rr = rr.abs();
            let y_min = lo.max(1e-3 * hi);
            let grid = BesselGrid::k_imaginary(rr, y_min, hi);
            let ln_ch = PI * rr + ((1.0 + (-2.0 * PI * rr).exp()) / 2.0).ln();
            let f = |y: f64| {
                let k = if y >= y_min {
                    let (v, l) = grid.eval_parts(y);
                    v.re * (l + ln_ch).exp()
                } else {
                    bessel_k_imaginary_order(rr, y) * ln_ch.exp()
                };
                Complex64::new(k * w.value(y) / y, 0.0)
            };
            let mut pts = split_points(&bps, |y| (4.0 * rr * rr / (y * y) - 1.0).max(0.0).sqrt());
            if lo < y_min {
                pts.push(y_min);
                pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                pts.dedup();
            }
            let q = integrate(&f, &pts)?;
            Ok(TransformValue { r: SpectralParam::Real(rr), value: q.value, quad_error: q.error })
        }
    }
}

/// `Σ_{l ≥ 1} (2l − ½)|φ̌(½ + 2l)|`, summed until the terms are negligible
/// past the turning point of `J_{2l−½}` at the top of the support.
pub fn holomorphic_weight_sum(w: &dyn Weight) -> Result<(f64, usize)> {
    let bps = w.breakpoints();
    if bps.len() < 2 {
        return Ok((0.0, 0));
    }
    let hi = *bps.last().expect("non-empty");
    let mut total = 0.0;
    let mut l = 1usize;
    loop {
        let k = 0.5 + 2.0 * l as f64;
        let v = transform_check(w, k)?;
        let term = (k - 1.0) * v.value.norm();
        total += term;
        if k - 1.0 > hi + 10.0 && term <= 1e-16 * total.max(1e-300) {
            break;
        }
        l += 1;
        if l > 100_000 {
            return Err(Error::QuadratureFailure("holomorphic weight sum did not converge".into()));
        }
    }
    Ok((total, l))
}
