//! The eta multiplier χ and the theta multiplier ν_θ on explicit matrices,
//! together with numeric checks of the multiplier axioms and the
//! transformation laws of η and θ.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;

use crate::arith::{ext_gcd, gcd, kronecker};
use crate::error::{Error, Result};
use crate::exactsum::unit_root;

/// A root of unity `e(exponent/modulus)` with modulus 4, 8 or 24.
#[derive(Clone, Copy, Debug, Eq)]
pub struct MultiplierValue {
    modulus: u32,
    exponent: u32,
}

impl MultiplierValue {
    pub fn new(modulus: u32, exponent: i64) -> Self {
        assert!(
            matches!(modulus, 4 | 8 | 24),
            "multiplier modulus must be 4, 8 or 24"
        );
        MultiplierValue { modulus, exponent: exponent.rem_euclid(modulus as i64) as u32 }
    }

    pub fn one() -> Self {
        Self::new(4, 0)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Exponent in units of 1/24.
    pub fn exponent24(&self) -> u32 {
        self.exponent * (24 / self.modulus)
    }

    pub fn value(&self) -> Complex64 {
        unit_root(self.exponent as i64, self.modulus as u64)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.modulus, -(self.exponent as i64))
    }

    pub fn mul(&self, other: &Self) -> Self {
        // the moduli 4 | 8 | 24 form a chain, so the lcm is the max
        let m = self.modulus.max(other.modulus);
        let e = (self.exponent24() + other.exponent24()) as i64;
        Self::new(24, e).reduce_to(m)
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::new(self.modulus, self.exponent as i64 * k)
    }

    fn reduce_to(self, m: u32) -> Self {
        let e24 = self.exponent24();
        let f = 24 / m;
        Self::new(m, (e24 / f) as i64)
    }
}

impl PartialEq for MultiplierValue {
    fn eq(&self, other: &Self) -> bool {
        self.exponent24() == other.exponent24()
    }
}

impl std::hash::Hash for MultiplierValue {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.exponent24().hash(state)
    }
}

/// Integer matrix `(a b; c d)` with `ad − bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnimodularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(Error::NotUnimodular { a, b, c, d });
        }
        Ok(UnimodularMatrix { a, b, c, d })
    }

    pub fn identity() -> Self {
        UnimodularMatrix { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn translation(b: i64) -> Self {
        UnimodularMatrix { a: 1, b, c: 0, d: 1 }
    }

    pub fn inversion() -> Self {
        UnimodularMatrix { a: 0, b: -1, c: 1, d: 0 }
    }

    pub fn neg(&self) -> Self {
        UnimodularMatrix { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn mul(&self, o: &Self) -> Self {
        UnimodularMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Möbius action `(aτ + b)/(cτ + d)`.
    pub fn apply(&self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) / self.cz_plus_d(tau)
    }

    /// `cτ + d`, with an exactly zero imaginary part when `c = 0`.
    pub fn cz_plus_d(&self, tau: Complex64) -> Complex64 {
        if self.c == 0 {
            Complex64::new(self.d as f64, 0.0)
        } else {
            Complex64::new(self.c as f64 * tau.re + self.d as f64, self.c as f64 * tau.im)
        }
    }
}

/// Which multiplier system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MultiplierKind {
    Eta,
    EtaConjugate,
    Theta,
}

/// A multiplier system with its weight and cusp parameter α.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiplierSystem {
    pub kind: MultiplierKind,
    pub weight: Ratio<i64>,
    pub alpha: Ratio<i64>,
}

impl MultiplierSystem {
    pub fn eta() -> Self {
        MultiplierSystem { kind: MultiplierKind::Eta, weight: Ratio::new(1, 2), alpha: Ratio::new(23, 24) }
    }

    pub fn eta_conjugate() -> Self {
        MultiplierSystem {
            kind: MultiplierKind::EtaConjugate,
            weight: Ratio::new(-1, 2),
            alpha: Ratio::new(1, 24),
        }
    }

    pub fn theta() -> Self {
        MultiplierSystem { kind: MultiplierKind::Theta, weight: Ratio::new(1, 2), alpha: Ratio::new(0, 1) }
    }

    pub fn eval(&self, g: &UnimodularMatrix) -> Result<MultiplierValue> {
        match self.kind {
            MultiplierKind::Eta => eta_chi(g),
            MultiplierKind::EtaConjugate => Ok(eta_chi(g)?.conj()),
            MultiplierKind::Theta => theta_nu(g),
        }
    }

    /// Shifted index `n − α`.
    pub fn n_nu(&self, n: i64) -> Ratio<i64> {
        Ratio::from_integer(n) - self.alpha
    }

    /// Level of the group the system lives on.
    pub fn level(&self) -> i64 {
        match self.kind {
            MultiplierKind::Theta => 4,
            _ => 1,
        }
    }
}

/// The eta multiplier χ(γ) as a 24th root of unity.
///
/// For `c > 0` the exponent is computed mod 24 from the Knopp formula, with
/// the Kronecker sign contributing 0 or 12. Negative `c` uses χ(−γ) = iχ(γ),
/// and `c = 0` uses the translation rule with ν(−I) = −i.
pub fn eta_chi(g: &UnimodularMatrix) -> Result<MultiplierValue> {
    let g = UnimodularMatrix::new(g.a, g.b, g.c, g.d)?;
    if g.c < 0 {
        let pos = eta_chi(&g.neg())?;
        return Ok(pos.mul(&MultiplierValue::new(4, 1)));
    }
    if g.c == 0 {
        return Ok(if g.d == 1 {
            MultiplierValue::new(24, g.b)
        } else {
            MultiplierValue::new(24, -g.b - 6)
        });
    }
    Ok(MultiplierValue::new(24, eta_exponent_positive(g.a, g.b, g.c, g.d)))
}

/// Exponent of χ mod 24 for `c > 0`; inputs are the matrix entries.
pub fn eta_exponent_positive(a: i64, b: i64, c: i64, d: i64) -> i64 {
    let r = |x: i64| x.rem_euclid(24);
    let (a, b, c24, d24) = (r(a), r(b), r(c), r(d));
    if c % 2 == 1 {
        let sign = kronecker(d, c);
        let e = (a + d24) * c24 - b * d24 % 24 * ((c24 * c24 + 23) % 24) - 3 * c24;
        (e + if sign < 0 { 12 } else { 0 }).rem_euclid(24)
    } else {
        let sign = kronecker(c, d);
        let e = (a + d24) * c24 - b * d24 % 24 * ((c24 * c24 + 23) % 24) + 3 * d24 - 3 - 3 * c24 * d24;
        (e + if sign < 0 { 12 } else { 0 }).rem_euclid(24)
    }
}

/// The theta multiplier `(c/d) ε_d^{-1}` on Γ₀(4).
pub fn theta_nu(g: &UnimodularMatrix) -> Result<MultiplierValue> {
    let g = UnimodularMatrix::new(g.a, g.b, g.c, g.d)?;
    if g.c % 4 != 0 {
        return Err(Error::NotInGamma0Of4 { c: g.c });
    }
    let sign = kronecker(g.c, g.d);
    let eps_inv = if g.d.rem_euclid(4) == 1 { 0 } else { 3 };
    Ok(MultiplierValue::new(4, eps_inv + if sign < 0 { 2 } else { 0 }))
}

/// `exp(i·k·arg w)` with the principal argument in (−π, π].
fn phase_power(arg: f64, k: f64) -> Complex64 {
    Complex64::from_polar(1.0, k * arg)
}

fn principal_arg(w: Complex64) -> f64 {
    let a = w.im.atan2(w.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// Unimodular automorphy factor `(cτ+d)/|cτ+d|` raised to the weight `k`.
pub fn automorphy_unimodular(g: &UnimodularMatrix, tau: Complex64, k: f64) -> Complex64 {
    phase_power(principal_arg(g.cz_plus_d(tau)), k)
}

/// Principal square root of `cτ + d`.
pub fn sqrt_automorphy(g: &UnimodularMatrix, tau: Complex64) -> Complex64 {
    let w = g.cz_plus_d(tau);
    Complex64::from_polar(w.norm().sqrt(), principal_arg(w) / 2.0)
}

/// `|ν(γ₁γ₂)j(γ₁γ₂,τ)^k − ν(γ₁)ν(γ₂)j(γ₂,τ)^k j(γ₁,γ₂τ)^k|` with unimodular `j`.
///
/// The point `γ₂τ` enters only through `c₁γ₂τ + d₁ = (c₃τ + d₃)/(c₂τ + d₂)`,
/// where `(c₃, d₃)` is the bottom row of `γ₁γ₂`; this keeps the phase
/// accurate when `γ₂τ` sits close to the real axis.
pub fn cocycle_defect(
    nu: &MultiplierSystem,
    g1: &UnimodularMatrix,
    g2: &UnimodularMatrix,
    tau: Complex64,
) -> Result<f64> {
    let k = *nu.weight.numer() as f64 / *nu.weight.denom() as f64;
    let g3 = g1.mul(g2);
    let lhs = nu.eval(&g3)?.value() * automorphy_unimodular(&g3, tau, k);
    let arg12 = if g1.c == 0 {
        if g1.d == 1 {
            0.0
        } else {
            PI
        }
    } else {
        principal_arg(g3.cz_plus_d(tau) / g2.cz_plus_d(tau))
    };
    let rhs = nu.eval(g1)?.value()
        * nu.eval(g2)?.value()
        * automorphy_unimodular(g2, tau, k)
        * phase_power(arg12, k);
    Ok((lhs - rhs).norm())
}

/// Number of product factors needed so that the dropped tail of
/// `∏(1−qⁿ)` is below `1e-16` in relative terms.
pub fn eta_truncation(tau: Complex64) -> usize {
    let aq = (-2.0 * PI * tau.im).exp();
    let denom = (1.0 - aq).powi(2);
    // |log ∏_{n>N}(1−qⁿ)| ≤ |q|^{N+1}/(1−|q|)²
    let n = ((1e-16 * denom).ln() / aq.ln()).ceil();
    n.max(1.0) as usize
}

/// `q^{n}` for `q = e(τ)`.
fn q_power(tau: Complex64, n: f64) -> Complex64 {
    let phase = 2.0 * PI * (n * tau.re).rem_euclid(1.0);
    Complex64::from_polar((-2.0 * PI * n * tau.im).exp(), phase)
}

/// Dedekind η via the truncated product `q^{1/24} ∏_{n≤N}(1−qⁿ)`.
///
/// `Re τ` is first reduced by an integer `s` using `η(τ) = e(s/24)η(τ−s)`.
/// With `truncation = None` the length comes from [`eta_truncation`].
pub fn dedekind_eta(tau: Complex64, truncation: Option<usize>) -> Complex64 {
    let s = tau.re.round();
    let t = Complex64::new(tau.re - s, tau.im);
    let n_max = truncation.unwrap_or_else(|| eta_truncation(t));
    let mut prod = Complex64::new(1.0, 0.0);
    for n in 1..=n_max {
        prod *= Complex64::new(1.0, 0.0) - q_power(t, n as f64);
    }
    unit_root(s as i64, 24) * q_power(t, 1.0 / 24.0) * prod
}

/// Dedekind η via the pentagonal series `q^{1/24} Σ (−1)^k q^{k(3k−1)/2}`.
pub fn dedekind_eta_pentagonal(tau: Complex64) -> Complex64 {
    let s = tau.re.round();
    let t = Complex64::new(tau.re - s, tau.im);
    let cutoff = 40.0 / (2.0 * PI * t.im);
    let mut sum = Complex64::new(1.0, 0.0);
    let mut k = 1i64;
    loop {
        let e1 = (k * (3 * k - 1) / 2) as f64;
        if e1 > cutoff {
            break;
        }
        let e2 = (k * (3 * k + 1) / 2) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += (q_power(t, e1) + q_power(t, e2)) * sign;
        k += 1;
    }
    unit_root(s as i64, 24) * q_power(t, 1.0 / 24.0) * sum
}

/// Jacobi theta `θ(τ) = Σ_{n∈ℤ} q^{n²}`, tail below `1e-17`.
pub fn jacobi_theta(tau: Complex64) -> Complex64 {
    let t = Complex64::new(tau.re - tau.re.round(), tau.im);
    let cutoff = 40.0 / (2.0 * PI * t.im);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut n = 1i64;
    while ((n * n) as f64) <= cutoff {
        sum += q_power(t, (n * n) as f64);
        n += 1;
    }
    Complex64::new(1.0, 0.0) + sum * 2.0
}

/// `|η(γτ) − χ(γ)√(cτ+d) η(τ)|` with η from the truncated product.
pub fn eta_transform_residual(g: &UnimodularMatrix, tau: Complex64, truncation: Option<usize>) -> Result<f64> {
    let chi = eta_chi(g)?.value();
    let lhs = dedekind_eta(g.apply(tau), truncation);
    let rhs = chi * sqrt_automorphy(g, tau) * dedekind_eta(tau, truncation);
    Ok((lhs - rhs).norm())
}

/// `|θ(γτ) − ν_θ(γ)√(cτ+d) θ(τ)|`.
pub fn theta_transform_residual(g: &UnimodularMatrix, tau: Complex64) -> Result<f64> {
    let nu = theta_nu(g)?.value();
    let lhs = jacobi_theta(g.apply(tau));
    let rhs = nu * sqrt_automorphy(g, tau) * jacobi_theta(tau);
    Ok((lhs - rhs).norm())
}

/// Random matrix of SL₂(ℤ) with `level | c` and entries bounded by `bound`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, bound: i64, level: i64) -> UnimodularMatrix {
    assert!(bound >= 1 && level >= 1);
    loop {
        let c = level * rng.gen_range(-(bound / level)..=bound / level);
        let d = rng.gen_range(-bound..=bound);
        if gcd(c, d) != 1 {
            continue;
        }
        let (a, b) = if c == 0 {
            (d, rng.gen_range(-bound..=bound))
        } else {
            let (_, x, y) = ext_gcd(d, c);
            // x d + y c = 1, so (a, b) = (x, −y); shift a into (−|c|/2, |c|/2]
            let (mut a, mut b) = (x, -y);
            let t = (a as f64 / c as f64).round() as i64;
            a -= t * c;
            b -= t * d;
            (a, b)
        };
        if a.abs() <= bound && b.abs() <= bound {
            return UnimodularMatrix::new(a, b, c, d).expect("constructed with determinant one");
        }
    }
}
