//! Coefficient-level Hecke and Shimura operations.
//!
//! Holomorphic-side series are exact rationals; the weight-0 and Maass-side
//! maps involve `u^{1/2}` and run in double precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{kronecker, PrimeSieve};
use crate::error::{Error, Result};

/// Index convention of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Offset {
    /// `Σ a(n) e(nτ)`.
    Zero,
    /// `Σ a(n) e((n − 23/24)τ)`.
    EtaShift,
}

/// Coefficient storage; index `i` holds `a(i + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeffs {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// An arithmetic function `n ↦ a(n)` on `1..=len` with its metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSeries {
    pub offset: Offset,
    /// Weight as a fraction, e.g. `25/2`.
    pub weight: Ratio<i64>,
    pub character: String,
    pub coeffs: Coeffs,
    /// Set when an operation could not fill every index it was asked for.
    pub truncated: bool,
}

impl CoefficientSeries {
    pub fn exact(offset: Offset, weight: Ratio<i64>, character: &str, values: Vec<BigRational>) -> Self {
        CoefficientSeries { offset, weight, character: character.to_string(), coeffs: Coeffs::Exact(values), truncated: false }
    }

    pub fn float(offset: Offset, weight: Ratio<i64>, character: &str, values: Vec<f64>) -> Self {
        CoefficientSeries { offset, weight, character: character.to_string(), coeffs: Coeffs::Float(values), truncated: false }
    }

    pub fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(v) => v.len(),
            Coeffs::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exact coefficient `a(n)`, if stored exactly and `1 ≤ n ≤ len`.
    pub fn exact_at(&self, n: usize) -> Option<&BigRational> {
        match &self.coeffs {
            Coeffs::Exact(v) if n >= 1 => v.get(n - 1),
            _ => None,
        }
    }

    pub fn exact_values(&self) -> Option<&[BigRational]> {
        match &self.coeffs {
            Coeffs::Exact(v) => Some(v),
            Coeffs::Float(_) => None,
        }
    }

    /// Coefficients as doubles.
    pub fn to_f64(&self) -> Vec<f64> {
        match &self.coeffs {
            Coeffs::Exact(v) => v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
            Coeffs::Float(v) => v.clone(),
        }
    }

    /// CSV with header `n,value`; exact values print as `p` or `p/q`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,value\n");
        match &self.coeffs {
            Coeffs::Exact(v) => {
                for (i, x) in v.iter().enumerate() {
                    s.push_str(&format!("{},{}\n", i + 1, x));
                }
            }
            Coeffs::Float(v) => {
                for (i, x) in v.iter().enumerate() {
                    s.push_str(&format!("{},{:e}\n", i + 1, x));
                }
            }
        }
        s
    }

    /// Parse `n,value` rows with `n = 1, 2, …`. Values containing `.`, `e`
    /// or `inf`/`nan` make the whole series a float series.
    pub fn from_csv(text: &str, offset: Offset, weight: Ratio<i64>, character: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (ln == 0 && line.starts_with('n')) {
                continue;
            }
            let (n, v) = line
                .split_once(',')
                .ok_or_else(|| Error::InvalidQuery(format!("line {}: expected n,value", ln + 1)))?;
            let n: usize = n.trim().parse().map_err(|_| Error::InvalidQuery(format!("line {}: bad index", ln + 1)))?;
            if n != raw.len() + 1 {
                return Err(Error::InvalidQuery(format!("line {}: index {n} out of sequence", ln + 1)));
            }
            raw.push(v.trim().to_string());
        }
        let is_float = |s: &str| {
            let l = s.to_ascii_lowercase();
            l.contains('.') || l.contains('e') || l.contains("inf") || l.contains("nan")
        };
        if raw.iter().any(|s| is_float(s)) {
            let vals = raw
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| Error::InvalidQuery(format!("bad value '{s}'"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(Self::float(offset, weight, character, vals))
        } else {
            let vals = raw
                .iter()
                .map(|s| s.parse::<BigRational>().map_err(|_| Error::InvalidQuery(format!("bad value '{s}'"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(Self::exact(offset, weight, character, vals))
        }
    }
}

fn q(n: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn q_big(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// Coefficients of `∏_{k≥1} (1 − q^k)^e` up to `q^{len−1}`, via the
/// pentagonal expansion and `e` sparse multiplications in checked `i128`.
pub fn pentagonal_power(e: u32, len: usize) -> Result<Vec<i128>> {
    let mut pent: Vec<(usize, i128)> = Vec::new();
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let g = (kk * (3 * kk - 1) / 2) as usize;
            if g < len {
                pent.push((g, if kk.rem_euclid(2) == 0 { 1 } else { -1 }));
                any = true;
            }
        }
        if !any && k > 0 {
            break;
        }
        k += 1;
    }
    pent.sort_unstable();
    let mut acc = vec![0i128; len];
    if len > 0 {
        acc[0] = 1;
    }
    for _ in 0..e {
        let mut next = vec![0i128; len];
        for (i, &v) in acc.iter().enumerate() {
            if v == 0 {
                continue;
            }
            for &(g, s) in &pent {
                let j = i + g;
                if j >= len {
                    break;
                }
                next[j] = next[j]
                    .checked_add(v * s)
                    .ok_or_else(|| Error::InvalidQuery("coefficient overflow in product expansion".into()))?;
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// `η(τ) = Σ a(n) e((n − 23/24)τ)` with `a(n) = [q^{n−1}] ∏(1 − q^k)`.
pub fn eta_qexp(n: usize) -> CoefficientSeries {
    let vals = pentagonal_power(1, n).expect("coefficients are ±1");
    CoefficientSeries::exact(Offset::EtaShift, Ratio::new(1, 2), "chi", vals.into_iter().map(q).collect())
}

/// `ηΔ = q^{25/24} ∏(1 − q^k)^{25}` in the `n − 23/24` convention:
/// `a(1) = 0`, `a(n) = [q^{n−2}] ∏(1 − q^k)^{25}`.
pub fn eta_delta_qexp(n: usize) -> Result<CoefficientSeries> {
    let p = pentagonal_power(25, n.saturating_sub(1))?;
    let mut vals = Vec::with_capacity(n);
    if n >= 1 {
        vals.push(BigRational::zero());
    }
    vals.extend(p.into_iter().map(q));
    Ok(CoefficientSeries::exact(Offset::EtaShift, Ratio::new(25, 2), "chi", vals))
}

/// `L f(τ) = f(24τ)`: `c(24n − 23) = a(n)`, all other `c` zero.
pub fn dilate_l(f: &CoefficientSeries) -> Result<CoefficientSeries> {
    if f.offset != Offset::EtaShift {
        return Err(Error::BadOffset);
    }
    let n = f.len();
    let out_len = if n == 0 { 0 } else { 24 * n - 23 };
    let coeffs = match &f.coeffs {
        Coeffs::Exact(v) => {
            let mut out = vec![BigRational::zero(); out_len];
            for (i, x) in v.iter().enumerate() {
                out[24 * i] = x.clone();
            }
            Coeffs::Exact(out)
        }
        Coeffs::Float(v) => {
            let mut out = vec![0.0; out_len];
            for (i, x) in v.iter().enumerate() {
                out[24 * i] = *x;
            }
            Coeffs::Float(out)
        }
    };
    Ok(CoefficientSeries {
        offset: Offset::Zero,
        weight: f.weight,
        character: "chi12*theta".to_string(),
        coeffs,
        truncated: f.truncated,
    })
}

/// A multiplicative arithmetic function given on prime powers, with
/// exact rational values.
#[derive(Clone)]
pub struct MultiplicativeFunction {
    pub label: String,
    at_prime_power: Arc<dyn Fn(u64, u32) -> BigRational + Send + Sync>,
}

impl fmt::Debug for MultiplicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiplicativeFunction({})", self.label)
    }
}

impl MultiplicativeFunction {
    pub fn new(label: &str, at_prime_power: impl Fn(u64, u32) -> BigRational + Send + Sync + 'static) -> Self {
        MultiplicativeFunction { label: label.to_string(), at_prime_power: Arc::new(at_prime_power) }
    }

    /// A completely multiplicative function from its values at primes.
    pub fn completely(label: &str, at_prime: impl Fn(u64) -> BigRational + Send + Sync + 'static) -> Self {
        Self::new(label, move |p, e| num_traits::pow(at_prime(p), e as usize))
    }

    pub fn at_prime_power(&self, p: u64, e: u32) -> BigRational {
        if e == 0 {
            BigRational::one()
        } else {
            (self.at_prime_power)(p, e)
        }
    }

    pub fn eval(&self, n: u64) -> BigRational {
        crate::arith::factorize(n)
            .into_iter()
            .fold(BigRational::one(), |acc, (p, e)| acc * self.at_prime_power(p, e))
    }

    /// Values at `1..=n`.
    pub fn table(&self, n: usize) -> Vec<BigRational> {
        let sieve = PrimeSieve::new(n.max(1));
        (1..=n as u64)
            .map(|u| {
                sieve
                    .factorize(u)
                    .into_iter()
                    .fold(BigRational::one(), |acc, (p, e)| acc * self.at_prime_power(p, e))
            })
            .collect()
    }

    /// The Kronecker character `u ↦ (D/u)`.
    pub fn kronecker_character(d: i64) -> Self {
        Self::completely(&format!("({d}/.)"), move |p| q(kronecker(d, p as i64) as i128))
    }

    /// `Ψ_t(u)·u^{k−1}` with `Ψ_t(u) = Ψ(u)(−1/u)^k(t/u)` and `Ψ = (D/·)`.
    pub fn shimura_kernel(d: i64, t: i64, k: u32) -> Self {
        Self::completely(&format!("psi_t u^{}", k as i64 - 1), move |p| {
            let pi = p as i64;
            let mut s = kronecker(d, pi) * kronecker(t, pi);
            if k % 2 == 1 {
                s *= kronecker(-1, pi);
            }
            q(s as i128) * q_big(BigInt::from(p).pow(k - 1))
        })
    }

    /// `h(u) = u^{2l−1} (12t/u)`.
    pub fn h_holomorphic(l: u32, t: i64) -> Self {
        Self::completely(&format!("u^{} (12*{t}/u)", 2 * l - 1), move |p| {
            q(kronecker(12 * t, p as i64) as i128) * q_big(BigInt::from(p).pow(2 * l - 1))
        })
    }

    /// Closed-form inverse of [`Self::h_holomorphic`].
    pub fn h_holomorphic_inverse(l: u32, t: i64) -> Self {
        Self::new("h^-1", move |p, e| {
            if e == 1 {
                -q(kronecker(12 * t, p as i64) as i128) * q_big(BigInt::from(p).pow(2 * l - 1))
            } else {
                BigRational::zero()
            }
        })
    }

    /// `h(u) = u^{−1} (t/u)`.
    pub fn h_maass(t: i64) -> Self {
        Self::completely(&format!("u^-1 ({t}/u)"), move |p| {
            BigRational::new(BigInt::from(kronecker(t, p as i64)), BigInt::from(p))
        })
    }

    /// Closed-form inverse of [`Self::h_maass`].
    pub fn h_maass_inverse(t: i64) -> Self {
        Self::new("h^-1", move |p, e| {
            if e == 1 {
                BigRational::new(BigInt::from(-kronecker(t, p as i64)), BigInt::from(p))
            } else {
                BigRational::zero()
            }
        })
    }
}

/// Scalars that the convolution and Hecke formulas run over.
pub trait Scalar: Clone + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn from_rational(x: &BigRational) -> Self;
    fn recip(&self) -> Self;
}

impl Scalar for BigRational {
    fn from_rational(x: &BigRational) -> Self {
        x.clone()
    }
    fn recip(&self) -> Self {
        BigRational::recip(self)
    }
}

impl Scalar for f64 {
    fn from_rational(x: &BigRational) -> Self {
        x.to_f64().unwrap_or(f64::NAN)
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
}

/// `(f ∗ g)(n) = Σ_{d | n} f(d) g(n/d)` on `1..=min(len)`; index `i` is `n = i + 1`.
pub fn dirichlet_convolve<T: Scalar>(f: &[T], g: &[T]) -> Vec<T> {
    let n = f.len().min(g.len());
    let mut out = vec![T::zero(); n];
    for d in 1..=n {
        let fd = &f[d - 1];
        if fd.is_zero() {
            continue;
        }
        let mut m = d;
        let mut e = 1;
        while m <= n {
            let ge = &g[e - 1];
            if !ge.is_zero() {
                out[m - 1] = out[m - 1].clone() + fd.clone() * ge.clone();
            }
            m += d;
            e += 1;
        }
    }
    out
}

/// Dirichlet inverse on `1..=len`; requires `f(1) = 1`.
pub fn dirichlet_inverse<T: Scalar>(f: &[T]) -> Result<Vec<T>> {
    let n = f.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if f[0] != T::one() {
        return Err(Error::NotInvertibleFunction);
    }
    let mut inv = vec![T::zero(); n];
    inv[0] = T::one();
    // inv(m) = −Σ_{d | m, d > 1} f(d) inv(m/d), filled by sieving over d
    let mut acc = vec![T::zero(); n];
    for m in 1..=n {
        if m > 1 {
            inv[m - 1] = -acc[m - 1].clone();
        }
        let im = inv[m - 1].clone();
        if im.is_zero() {
            continue;
        }
        let mut d = 2;
        while d * m <= n {
            let fd = &f[d - 1];
            if !fd.is_zero() {
                acc[d * m - 1] = acc[d * m - 1].clone() + fd.clone() * im.clone();
            }
            d += 1;
        }
    }
    Ok(inv)
}

/// Dirichlet inverse of a multiplicative function on `1..=n`.
pub fn dirichlet_inverse_fn(h: &MultiplicativeFunction, n: usize) -> Result<Vec<BigRational>> {
    if !h.eval(1).is_one() {
        return Err(Error::NotInvertibleFunction);
    }
    dirichlet_inverse(&h.table(n))
}

fn kron_u(n: i128, p: u64) -> i32 {
    kronecker((n.rem_euclid(p as i128)) as i64, p as i64)
}

/// `a(p²n) + Ψ*(p)(n/p)p^{k−1}a(n) + Ψ(p²)p^{2k−1}a(n/p²)` with
/// `Ψ*(p) = Ψ(p)(−1/p)^k`.
///
/// For [`Offset::EtaShift`] series the formula acts on the true exponent
/// `N = 24n − 23`: `a(p²n)` is the coefficient at exponent `p²N`, and the
/// symbol is `(N/p)`; this is the form that commutes with [`dilate_l`].
pub fn hecke_tp2_half(f: &CoefficientSeries, p: u64, k: u32, psi: &MultiplicativeFunction) -> Result<CoefficientSeries> {
    if !crate::arith::is_prime(p) || p < 5 {
        return Err(Error::InvalidQuery(format!("T_p^2 needs a prime p ≥ 5, got {p}")));
    }
    let psi_p = psi.eval(p);
    let sign_k = if k % 2 == 1 { kronecker(-1, p as i64) } else { 1 };
    let psi_star = psi_p * q(sign_k as i128);
    let psi_p2 = psi.eval(p * p);
    let pk1 = q_big(BigInt::from(p).pow(k - 1));
    let p2k1 = q_big(BigInt::from(p).pow(2 * k - 1));
    let len = f.len() as u64;
    let p2 = p * p;

    // exponent of index n, and index of exponent e (None when absent)
    let (expo, index): (Box<dyn Fn(u64) -> u64>, Box<dyn Fn(u64) -> Option<u64>>) = match f.offset {
        Offset::Zero => (Box::new(|n| n), Box::new(|e| Some(e))),
        Offset::EtaShift => (
            Box::new(|n| 24 * n - 23),
            Box::new(|e| if e % 24 == 1 { Some((e + 23) / 24) } else { None }),
        ),
    };
    let out_len = (1..=len).take_while(|&n| index(p2 * expo(n)).is_some_and(|i| i <= len)).count();
    let c2 = Scalar2 { a: psi_star * pk1, b: psi_p2 * p2k1 };

    fn build<T: Scalar>(
        v: &[T],
        out_len: usize,
        p: u64,
        p2: u64,
        c2: &Scalar2,
        expo: &dyn Fn(u64) -> u64,
        index: &dyn Fn(u64) -> Option<u64>,
    ) -> Vec<T> {
        let a_mid = T::from_rational(&c2.a);
        let a_low = T::from_rational(&c2.b);
        (1..=out_len as u64)
            .map(|n| {
                let e = expo(n);
                let mut s = v[index(p2 * e).expect("within range") as usize - 1].clone();
                let sym = kron_u(e as i128, p);
                if sym != 0 {
                    let t = a_mid.clone() * v[n as usize - 1].clone();
                    s = if sym > 0 { s + t } else { s - t };
                }
                if e % p2 == 0 {
                    if let Some(i) = index(e / p2) {
                        s = s + a_low.clone() * v[i as usize - 1].clone();
                    }
                }
                s
            })
            .collect()
    }

    let coeffs = match &f.coeffs {
        Coeffs::Exact(v) => Coeffs::Exact(build(v, out_len, p, p2, &c2, &*expo, &*index)),
        Coeffs::Float(v) => Coeffs::Float(build(v, out_len, p, p2, &c2, &*expo, &*index)),
    };
    Ok(CoefficientSeries {
        offset: f.offset,
        weight: f.weight,
        character: f.character.clone(),
        coeffs,
        truncated: true,
    })
}

struct Scalar2 {
    a: BigRational,
    b: BigRational,
}

/// `T_{n²}` for `(n, 6) = 1`, multiplicative over coprime prime powers with
/// `T_{p^{2(v+1)}} = T_{p²}T_{p^{2v}} − Ψ(p²)p^{2k−1}T_{p^{2(v−1)}}`.
pub fn hecke_tn2_half(f: &CoefficientSeries, n: u64, k: u32, psi: &MultiplicativeFunction) -> Result<CoefficientSeries> {
    if n == 0 || crate::arith::gcd(n as i64, 6) != 1 {
        return Err(Error::InvalidQuery(format!("T_n^2 needs (n, 6) = 1, got {n}")));
    }
    let mut cur = f.clone();
    for (p, v) in crate::arith::factorize(n) {
        cur = hecke_prime_power(&cur, p, v, k, psi)?;
    }
    Ok(cur)
}

fn hecke_prime_power(f: &CoefficientSeries, p: u64, v: u32, k: u32, psi: &MultiplicativeFunction) -> Result<CoefficientSeries> {
    let mut prev = f.clone();
    let mut cur = hecke_tp2_half(f, p, k, psi)?;
    let scale = psi.eval(p * p) * q_big(BigInt::from(p).pow(2 * k - 1));
    for _ in 1..v {
        let next = hecke_tp2_half(&cur, p, k, psi)?;
        let m = next.len();
        let coeffs = match (&next.coeffs, &prev.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                Coeffs::Exact((0..m).map(|i| a[i].clone() - scale.clone() * b[i].clone()).collect())
            }
            _ => {
                let (a, b) = (next.to_f64(), prev.to_f64());
                let s = scale.to_f64().unwrap_or(f64::NAN);
                Coeffs::Float((0..m).map(|i| a[i] - s * b[i]).collect())
            }
        };
        prev = cur;
        cur = CoefficientSeries { coeffs, ..next };
    }
    Ok(cur)
}

/// Weight-0 `T_n`: `ρ′(m) = Σ_{d | (n, m)} (n/d²)^{1/2} ρ(nm/d²)`, on the
/// indices `m ≤ ⌊len/n⌋` where every term is available.
pub fn hecke_tn_weight0(rho: &[f64], n: u64) -> Vec<f64> {
    let n = n as usize;
    if n == 0 {
        return Vec::new();
    }
    let out_len = rho.len() / n;
    let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
    (1..=out_len)
        .map(|m| {
            let mut s = 0.0;
            for &d in &divisors {
                if m % d == 0 {
                    let idx = n * m / (d * d);
                    s += (n as f64 / (d * d) as f64).sqrt() * rho[idx - 1];
                }
            }
            s
        })
        .collect()
}

/// Weight-0 `T_p`: `ρ′(n) = p^{1/2}ρ(pn) + p^{−1/2}ρ(n/p)`.
pub fn hecke_tp_weight0(rho: &[f64], p: u64) -> Vec<f64> {
    let p = p as usize;
    let sp = (p as f64).sqrt();
    (1..=rho.len() / p)
        .map(|n| {
            let mut s = sp * rho[p * n - 1];
            if n % p == 0 {
                s += rho[n / p - 1] / sp;
            }
            s
        })
        .collect()
}

/// Lift data on `1..=n`: the sequence `a(tu²)` and its image.
#[derive(Clone, Debug, PartialEq)]
pub struct ShimuraLift<T> {
    pub t: u64,
    /// `u ↦ a(tu²)` (times any per-`u` weight of the lift).
    pub g: Vec<T>,
    pub b: Vec<T>,
    /// True when fewer than the requested `n` terms were available.
    pub truncated: bool,
}

fn check_squarefree(t: u64) -> Result<()> {
    if t == 0 || crate::arith::squarefree_decompose(t).root != 1 {
        return Err(Error::InvalidQuery(format!("t = {t} must be positive and square-free")));
    }
    Ok(())
}

/// Holomorphic lift `b_t = (Ψ_t(u)u^{k−1}) ∗ (a(tu²))` of an offset-0 series.
pub fn shimura_holo(a: &CoefficientSeries, t: u64, psi_t: &MultiplicativeFunction, n: usize) -> Result<ShimuraLift<BigRational>> {
    check_squarefree(t)?;
    if a.offset != Offset::Zero {
        return Err(Error::BadOffset);
    }
    let avail = (1..=n).take_while(|&u| (t as usize) * u * u <= a.len()).count();
    let g: Vec<BigRational> = (1..=avail)
        .map(|u| {
            a.exact_at(t as usize * u * u)
                .cloned()
                .ok_or_else(|| Error::InvalidQuery("lift needs an exact series".into()))
        })
        .collect::<Result<_>>()?;
    let h = psi_t.table(avail);
    let b = dirichlet_convolve(&h, &g);
    Ok(ShimuraLift { t, g, b, truncated: avail < n })
}

/// Recover `a(tu²)` from `b_t` with the inverse of the lift kernel.
pub fn shimura_holo_recover(b: &[BigRational], psi_t: &MultiplicativeFunction) -> Result<Vec<BigRational>> {
    let inv = dirichlet_inverse_fn(psi_t, b.len())?;
    Ok(dirichlet_convolve(&inv, b))
}

/// Maass lift `b_t = g ∗ h` with `g(u) = a(tu²)u^{1/2}(12/u)` and
/// `h(u) = u^{−1}(t/u)`, for `t ≡ 1 (mod 24)` square-free.
pub fn shimura_maass(a: &[f64], t: u64, n: usize) -> Result<ShimuraLift<f64>> {
    check_squarefree(t)?;
    if t % 24 != 1 {
        return Err(Error::InvalidQuery(format!("t = {t} must be ≡ 1 (mod 24)")));
    }
    let avail = (1..=n).take_while(|&u| (t as usize) * u * u <= a.len()).count();
    let g: Vec<f64> = (1..=avail)
        .map(|u| a[t as usize * u * u - 1] * (u as f64).sqrt() * kronecker(12, u as i64) as f64)
        .collect();
    let h: Vec<f64> = MultiplicativeFunction::h_maass(t as i64).table(avail).iter().map(f64::from_rational).collect();
    let b = dirichlet_convolve(&g, &h);
    Ok(ShimuraLift { t, g, b, truncated: avail < n })
}

/// Recover `g` from a Maass lift: `g = b_t ∗ h⁻¹`.
pub fn shimura_maass_recover(b: &[f64], t: u64) -> Vec<f64> {
    let inv: Vec<f64> =
        MultiplicativeFunction::h_maass_inverse(t as i64).table(b.len()).iter().map(f64::from_rational).collect();
    dirichlet_convolve(b, &inv)
}

/// `g(tn₀²) = a(t) Σ_{d | n₀} d^{−1/2} λ(d) h⁻¹(n₀/d)` for `n₀ ≤ len(λ)`,
/// the coefficient chain of an eigenform with eigenvalues `λ`.
pub fn eigen_chain(lambda: &[f64], a_t: f64, t: u64) -> Vec<f64> {
    let n = lambda.len();
    let b: Vec<f64> = (1..=n).map(|d| lambda[d - 1] / (d as f64).sqrt() * a_t).collect();
    shimura_maass_recover(&b, t)
}

/// The exponent `θ = 7/64`.
pub const THETA: f64 = 7.0 / 64.0;

/// Sum of the absolute values, for rough size checks.
pub fn l1_norm(v: &[BigRational]) -> BigRational {
    v.iter().fold(BigRational::zero(), |acc, x| acc + x.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{divisor_count, is_generalized_pentagonal};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qi(n: i64) -> BigRational {
        q(n as i128)
    }

    #[test]
    fn eta_support_is_pentagonal() {
        let e = eta_qexp(100);
        assert_eq!(e.exact_at(1), Some(&qi(1)));
        assert_eq!(e.exact_at(2), Some(&qi(-1)));
        for n in 1..=100usize {
            let v = e.exact_at(n).unwrap();
            assert_eq!(!v.is_zero(), is_generalized_pentagonal((n - 1) as u64), "n={n}");
            assert!(v.abs() <= qi(1));
        }
    }

    #[test]
    fn eta_matches_product_expansion() {
        // direct product ∏_{k<10}(1 − q^k) to q^9
        let mut p = vec![0i64; 10];
        p[0] = 1;
        for k in 1..10 {
            for i in (k..10).rev() {
                p[i] -= p[i - k];
            }
        }
        let e = eta_qexp(10);
        for (i, &v) in p.iter().enumerate() {
            assert_eq!(e.exact_at(i + 1), Some(&qi(v)));
        }
    }

    #[test]
    fn eta_delta_leading_terms() {
        // independent product expansion of ∏(1 − q^k)^25
        let f = eta_delta_qexp(9).unwrap();
        let want = [0, 1, -25, 275, -1700, 6050, -9405, -15550, 107525];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(f.exact_at(i + 1), Some(&qi(w)), "n={}", i + 1);
        }
    }

    #[test]
    fn dilation_indices() {
        let f = eta_qexp(10);
        let g = dilate_l(&f).unwrap();
        assert_eq!(g.exact_at(1), f.exact_at(1));
        assert_eq!(g.exact_at(25), f.exact_at(2));
        assert_eq!(g.exact_at(97), f.exact_at(5));
        assert!(g.exact_at(2).unwrap().is_zero());
        assert!(matches!(dilate_l(&g), Err(Error::BadOffset)));
    }

    #[test]
    fn tp2_on_delta_one() {
        let chi12 = MultiplicativeFunction::kronecker_character(12);
        let mut v = vec![BigRational::zero(); 400];
        v[0] = qi(1);
        let f = CoefficientSeries::exact(Offset::Zero, Ratio::new(25, 2), "chi12*theta", v);
        let p = 5u64;
        let out = hecke_tp2_half(&f, p, 12, &chi12).unwrap();
        assert_eq!(out.len(), 16);
        let star = qi(kronecker(12, 5) as i64) * q_big(BigInt::from(5).pow(11));
        assert_eq!(out.exact_at(1).unwrap(), &star);
        for n in 2..=16usize {
            assert!(out.exact_at(n).unwrap().is_zero(), "n={n}");
        }
        // a wider input exposes the p^{2k−1} term at n = p²
        let mut v = vec![BigRational::zero(); 700];
        v[0] = qi(1);
        let f = CoefficientSeries::exact(Offset::Zero, Ratio::new(25, 2), "chi12*theta", v);
        let out = hecke_tp2_half(&f, p, 12, &chi12).unwrap();
        assert_eq!(out.exact_at(25).unwrap(), &q_big(BigInt::from(5).pow(23)));
    }

    #[test]
    fn tp2_of_zero_is_zero() {
        let chi12 = MultiplicativeFunction::kronecker_character(12);
        let f = CoefficientSeries::exact(Offset::Zero, Ratio::new(25, 2), "x", vec![BigRational::zero(); 300]);
        let out = hecke_tp2_half(&f, 7, 12, &chi12).unwrap();
        assert!(out.exact_values().unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn commutation_small() {
        let chi12 = MultiplicativeFunction::kronecker_character(12);
        let f = eta_delta_qexp(600).unwrap();
        let lf = dilate_l(&f).unwrap();
        for p in [5u64, 7] {
            let left = dilate_l(&hecke_tp2_half(&f, p, 12, &chi12).unwrap()).unwrap();
            let right = hecke_tp2_half(&lf, p, 12, &chi12).unwrap();
            let m = left.len().min(right.len());
            assert!(m > 100);
            assert_eq!(left.exact_values().unwrap()[..m], right.exact_values().unwrap()[..m], "p={p}");
        }
    }

    #[test]
    fn convolution_basics() {
        let n = 200;
        let ones = vec![qi(1); n];
        let tau = dirichlet_convolve(&ones, &ones);
        for (i, v) in tau.iter().enumerate() {
            assert_eq!(v, &qi(divisor_count(i as u64 + 1) as i64));
        }
        let mut delta = vec![qi(0); n];
        delta[0] = qi(1);
        assert_eq!(dirichlet_convolve(&tau, &delta), tau);
        let mut rng = ChaCha8Rng::seed_from_u64(20821);
        let r = |rng: &mut ChaCha8Rng| (0..n).map(|_| qi(rng.gen_range(-9..=9))).collect::<Vec<_>>();
        let (a, b, c) = (r(&mut rng), r(&mut rng), r(&mut rng));
        assert_eq!(dirichlet_convolve(&a, &b), dirichlet_convolve(&b, &a));
        assert_eq!(
            dirichlet_convolve(&dirichlet_convolve(&a, &b), &c),
            dirichlet_convolve(&a, &dirichlet_convolve(&b, &c))
        );
    }

    #[test]
    fn holomorphic_h_inverse() {
        let n = 1000;
        let h = MultiplicativeFunction::h_holomorphic(1, 1);
        let inv = dirichlet_inverse_fn(&h, n).unwrap();
        let closed = MultiplicativeFunction::h_holomorphic_inverse(1, 1).table(n);
        assert_eq!(inv, closed);
        assert_eq!(inv[4], qi(5));
        let prod = dirichlet_convolve(&h.table(n), &inv);
        assert!(prod[0].is_one() && prod[1..].iter().all(Zero::is_zero));
        for (i, v) in inv.iter().enumerate() {
            assert!(v.abs() <= qi(i as i64 + 1));
        }
    }

    #[test]
    fn maass_h_inverse_float() {
        let n = 1000;
        let h: Vec<f64> = MultiplicativeFunction::h_maass(73).table(n).iter().map(f64::from_rational).collect();
        let inv: Vec<f64> =
            MultiplicativeFunction::h_maass_inverse(73).table(n).iter().map(f64::from_rational).collect();
        let prod = dirichlet_convolve(&h, &inv);
        assert!((prod[0] - 1.0).abs() < 1e-12);
        assert!(prod[1..].iter().all(|x| x.abs() < 1e-12));
        for (i, v) in inv.iter().enumerate() {
            assert!(v.abs() <= 1.0 / (i + 1) as f64 + 1e-15);
        }
    }

    #[test]
    fn inverse_requires_unit_at_one() {
        assert!(matches!(dirichlet_inverse(&[qi(2), qi(1)]), Err(Error::NotInvertibleFunction)));
        let delta = vec![qi(1), qi(0), qi(0)];
        assert_eq!(dirichlet_inverse(&delta).unwrap(), delta);
    }

    #[test]
    fn weight0_eigen_series() {
        let n = 2600;
        let rho: Vec<f64> = (1..=n).map(|m| divisor_count(m as u64) as f64 / (m as f64).sqrt()).collect();
        let out = hecke_tp_weight0(&rho, 5);
        assert!(out.len() >= 500);
        for m in 1..=500 {
            assert!((out[m - 1] - 2.0 * rho[m - 1]).abs() < 1e-12, "m={m}");
        }
        assert!(hecke_tp_weight0(&vec![0.0; 100], 5).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn weight0_general_matches_prime_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho: Vec<f64> = (0..3000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = hecke_tn_weight0(&rho, 7);
        let b = hecke_tp_weight0(&rho, 7);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn weight0_composition_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho: Vec<f64> = (0..20_000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lhs = hecke_tn_weight0(&hecke_tn_weight0(&rho, 25), 5);
        let t125 = hecke_tn_weight0(&rho, 125);
        let t5 = hecke_tn_weight0(&rho, 5);
        for m in 1..=lhs.len().min(t125.len()) {
            let rhs = t125[m - 1] + t5[m - 1];
            assert!((lhs[m - 1] - rhs).abs() < 1e-11, "m={m}");
        }
    }

    #[test]
    fn shimura_holo_small() {
        let f = eta_delta_qexp(4000).unwrap();
        let c = dilate_l(&f).unwrap();
        let t = 73;
        let psi_t = MultiplicativeFunction::shimura_kernel(12, t as i64, 12);
        let lift = shimura_holo(&c, t, &psi_t, 30).unwrap();
        assert_eq!(lift.b[0], c.exact_at(t as usize).unwrap().clone());
        let p = 5usize;
        let expect = c.exact_at(t as usize * p * p).unwrap().clone() + psi_t.eval(5) * c.exact_at(t as usize).unwrap().clone();
        assert_eq!(lift.b[p - 1], expect);
        assert_eq!(shimura_holo_recover(&lift.b, &psi_t).unwrap(), lift.g);
    }

    #[test]
    fn shimura_maass_expansion_and_recovery() {
        let t = 73u64;
        let mut rng = ChaCha8Rng::seed_from_u64(20821);
        let n = 100;
        let a: Vec<f64> = (0..t as usize * n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lift = shimura_maass(&a, t, n).unwrap();
        assert_eq!(lift.b[0], a[t as usize - 1]);
        let expect = a[25 * t as usize - 1] * 5f64.sqrt() * kronecker(12, 5) as f64
            + a[t as usize - 1] * kronecker(t as i64, 5) as f64 / 5.0;
        assert!((lift.b[4] - expect).abs() < 1e-14);
        let g = shimura_maass_recover(&lift.b, t);
        for (x, y) in g.iter().zip(&lift.g) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(shimura_maass(&a, 74, 10).is_err());
    }

    #[test]
    fn theta_chain_bound() {
        let t = 73u64;
        let n = 500;
        let mut rng = ChaCha8Rng::seed_from_u64(20821);
        let sieve = PrimeSieve::new(n);
        let mut lam = vec![1.0f64; n];
        let mut at_p = std::collections::HashMap::new();
        for d in 2..=n {
            lam[d - 1] = sieve
                .factorize(d as u64)
                .into_iter()
                .map(|(p, e)| {
                    let v = *at_p.entry(p).or_insert_with(|| (p as f64).powf(THETA) * rng.gen_range(-1.0..1.0));
                    v.powi(e as i32)
                })
                .product();
        }
        let a_t = 0.75;
        let g = eigen_chain(&lam, a_t, t);
        for n0 in 1..=n {
            let bound = a_t * (n0 as f64).powf(-0.5 + THETA) * divisor_count(n0 as u64) as f64;
            assert!(g[n0 - 1].abs() <= bound * (1.0 + 1e-12), "n0={n0}");
        }
    }
}
