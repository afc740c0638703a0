//! Complex Γ via the Stirling series after an upward shift, with reflection
//! into the left half-plane.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `B_{2k} / (2k(2k−1))` for `k = 1..=8`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

const SHIFT_TO: f64 = 15.0;

/// Below this real part the reflection formula is used instead of shifting.
const REFLECT_BELOW: f64 = -10.0;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor()
}

/// `ln Γ(z)` as the Stirling series at `z + N` minus `Σ ln(z + k)`.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TO {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

/// `ln Γ(z)`; the imaginary part is continuous on `Re z > 0`.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::PoleAtNonPositiveInteger(z.re));
    }
    if z.re >= REFLECT_BELOW {
        Ok(ln_gamma_right(z))
    } else {
        let s = (z * PI).sin();
        Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_right(1.0 - z))
    }
}

/// `Γ(z)` for complex `z`.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::PoleAtNonPositiveInteger(z.re));
    }
    if z.re >= REFLECT_BELOW {
        Ok(ln_gamma_right(z).exp())
    } else {
        let s = (z * PI).sin();
        Ok(PI / (s * ln_gamma_right(1.0 - z).exp()))
    }
}

/// `Γ(x)` for real `x`.
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma_complex(Complex64::new(x, 0.0))?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn real_values() {
        assert!((gamma_real(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma_real(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_real(0.25).unwrap() - 3.625_609_908_221_908_3).abs() < 1e-13);
        let mut f = 1.0;
        for n in 1..30 {
            let g = gamma_real(n as f64).unwrap();
            assert!((g - f).abs() / f < 1e-13, "n={n}");
            f *= n as f64;
        }
        assert!((gamma_real(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn poles() {
        for z in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma_complex(Complex64::new(z, 0.0)), Err(Error::PoleAtNonPositiveInteger(_))));
        }
    }

    #[test]
    fn modulus_identities_on_vertical_lines() {
        for &y in &[0.1, 1.0, 3.7, 20.0, 100.0] {
            // |Γ(1/2 + iy)|² = π / cosh(πy)
            let g = gamma_complex(Complex64::new(0.5, y)).unwrap();
            let lhs = 2.0 * g.norm().ln();
            let rhs = PI.ln() - (PI * y).cosh().ln();
            assert!((lhs - rhs).abs() < 1e-12, "y={y}");
            // |Γ(1 + iy)|² = πy / sinh(πy)
            let lg = ln_gamma_complex(Complex64::new(1.0, y)).unwrap();
            let rhs = (PI * y).ln() - (PI * y).sinh().ln();
            assert!((2.0 * lg.re - rhs).abs() < 1e-12, "y={y}");
        }
    }

    #[test]
    fn recurrence_and_reflection() {
        for &(x, y) in &[(0.3, 0.7), (2.5, -4.0), (-3.2, 1.1), (10.0, 30.0), (0.25, 100.0)] {
            let z = Complex64::new(x, y);
            let g = gamma_complex(z).unwrap();
            let g1 = gamma_complex(z + 1.0).unwrap();
            assert!(rel(g1, g * z) < 1e-12, "{z}");
            let r = gamma_complex(1.0 - z).unwrap();
            assert!(rel(g * r, PI / (z * PI).sin()) < 1e-11, "{z}");
        }
    }

    #[test]
    fn quarter_line_asymptotic() {
        // 1/|Γ(1/4 + ir)|² ~ (√r / 2π) e^{πr}
        let r = 50.0;
        let lg = ln_gamma_complex(Complex64::new(0.25, r)).unwrap();
        let ratio = (-2.0 * lg.re - (r.sqrt() / (2.0 * PI)).ln() - PI * r).exp();
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
    }
}
