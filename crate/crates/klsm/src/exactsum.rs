//! Exact finite sums of roots of unity `Σ_k c_k e(k/Q)`.
//!
//! Every Kloosterman sum in the crate is first built as one of these, so
//! symmetry identities can be checked multiplicity by multiplicity.

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

/// Default cap on moduli created by [`merge_modulus`].
pub const DEFAULT_MODULUS_CAP: u64 = 24_000_000;

/// Threshold for the numeric side of [`ExactExponentialSum::zero_check`].
pub const ZERO_TEST_THRESHOLD: f64 = 1e-9;

/// `e(k/q) = exp(2πik/q)`, reduced to the first octant so that quarter and
/// eighth turns come out exact up to the sine/cosine of a small angle.
pub fn unit_root(k: i64, q: u64) -> Complex64 {
    debug_assert!(q > 0);
    let r = (k as i128).rem_euclid(q as i128) as u128;
    let q128 = q as u128;
    let t = 8 * r;
    let octant = (t / q128) as u32;
    let rem = t % q128;
    let quarter = std::f64::consts::FRAC_PI_4;
    let beta = if octant % 2 == 0 {
        quarter * (rem as f64 / q as f64)
    } else {
        quarter * ((q128 - rem) as f64 / q as f64)
    };
    let (s, c) = beta.sin_cos();
    match octant {
        0 => Complex64::new(c, s),
        1 => Complex64::new(s, c),
        2 => Complex64::new(-s, c),
        3 => Complex64::new(-c, s),
        4 => Complex64::new(-c, -s),
        5 => Complex64::new(-s, -c),
        6 => Complex64::new(s, -c),
        _ => Complex64::new(c, -s),
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    pub sum: Complex64,
    pub comp: Complex64,
}

#[inline]
fn two_sum_step(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        two_sum_step(&mut self.sum.re, &mut self.comp.re, z.re);
        two_sum_step(&mut self.sum.im, &mut self.comp.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// `Σ_k mult[k]·e(k/Q)` stored as a dense multiplicity array.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactExponentialSum {
    modulus: u64,
    mult: Vec<i64>,
}

/// Outcome of a zero test: the exact verdict plus the numeric cross-check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroCheck {
    pub exact_zero: bool,
    pub numeric_zero: bool,
    pub magnitude: f64,
}

impl ZeroCheck {
    /// The exact and numeric verdicts disagree.
    pub fn flagged(&self) -> bool {
        self.exact_zero != self.numeric_zero
    }
}

impl ExactExponentialSum {
    /// Empty sum with modulus `q`.
    pub fn new(modulus: u64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        ExactExponentialSum { modulus, mult: vec![0; modulus as usize] }
    }

    pub fn from_exponents<I: IntoIterator<Item = i64>>(modulus: u64, ks: I) -> Self {
        let mut s = Self::new(modulus);
        for k in ks {
            s.push(k);
        }
        s
    }

    pub fn from_multiplicities(modulus: u64, mult: Vec<i64>) -> Self {
        assert_eq!(mult.len() as u64, modulus, "multiplicity array length must equal the modulus");
        ExactExponentialSum { modulus, mult }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn multiplicities(&self) -> &[i64] {
        &self.mult
    }

    #[inline]
    fn slot(&self, k: i64) -> usize {
        (k as i128).rem_euclid(self.modulus as i128) as usize
    }

    /// Increment the multiplicity of `e(k/Q)` in place.
    #[inline]
    pub fn push(&mut self, k: i64) {
        let i = self.slot(k);
        self.mult[i] += 1;
    }

    /// Add `count` copies of `e(k/Q)` in place.
    pub fn push_many(&mut self, k: i64, count: i64) {
        let i = self.slot(k);
        self.mult[i] += count;
    }

    /// Functional form of [`push`](Self::push).
    pub fn add_term(mut self, k: i64) -> Self {
        self.push(k);
        self
    }

    /// Number of terms counted with sign, `Σ|mult|`.
    pub fn term_count(&self) -> u64 {
        self.mult.iter().map(|m| m.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mult.iter().all(|&m| m == 0)
    }

    /// Move the multiplicity at `k` to `-k mod Q`.
    pub fn conjugate(&self) -> Self {
        let q = self.modulus as usize;
        let mut mult = vec![0; q];
        for (k, &m) in self.mult.iter().enumerate() {
            if m != 0 {
                mult[(q - k) % q] = m;
            }
        }
        ExactExponentialSum { modulus: self.modulus, mult }
    }

    /// Numeric value with first-octant roots and compensated summation.
    pub fn evaluate(&self) -> ComplexValue {
        let mut acc = CompensatedSum::new();
        for (k, &m) in self.mult.iter().enumerate() {
            if m != 0 {
                acc.add(unit_root(k as i64, self.modulus) * m as f64);
            }
        }
        acc.value()
    }

    /// Rewrite to modulus `new_modulus`, a multiple of the current modulus.
    pub fn embed(&self, new_modulus: u64) -> Result<Self> {
        if new_modulus % self.modulus != 0 {
            return Err(Error::InvalidQuery(format!(
                "cannot embed modulus {} into {}",
                self.modulus, new_modulus
            )));
        }
        let f = (new_modulus / self.modulus) as usize;
        let mut mult = vec![0; new_modulus as usize];
        for (k, &m) in self.mult.iter().enumerate() {
            mult[k * f] = m;
        }
        Ok(ExactExponentialSum { modulus: new_modulus, mult })
    }

    /// Reduce to the smallest modulus that represents the same multiset.
    pub fn canonical(&self) -> Self {
        let g = self
            .mult
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .fold(self.modulus, |g, (k, _)| g.gcd(&(k as u64)));
        if g <= 1 {
            return self.clone();
        }
        let q = self.modulus / g;
        let mut mult = vec![0; q as usize];
        for (k, &m) in self.mult.iter().enumerate() {
            if m != 0 {
                mult[k / g as usize] = m;
            }
        }
        ExactExponentialSum { modulus: q, mult }
    }

    /// Multiset equality after bringing both sums to a common modulus.
    pub fn exact_eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }

    /// `self - other` over the lcm modulus.
    pub fn difference(&self, other: &Self, cap: u64) -> Result<Self> {
        let (a, b) = merge_modulus(self, other, cap)?;
        let mult = a.mult.iter().zip(&b.mult).map(|(x, y)| x - y).collect();
        Ok(ExactExponentialSum { modulus: a.modulus, mult })
    }

    /// Exact zero test with a numeric cross-check at [`ZERO_TEST_THRESHOLD`].
    pub fn zero_check(&self) -> ZeroCheck {
        let magnitude = self.evaluate().norm();
        ZeroCheck {
            exact_zero: self.is_empty(),
            numeric_zero: magnitude < ZERO_TEST_THRESHOLD,
            magnitude,
        }
    }

    /// `(Q, [(run length, value)])` run-length encoding of the multiplicities.
    pub fn to_rle(&self) -> (u64, Vec<(u64, i64)>) {
        let mut runs: Vec<(u64, i64)> = Vec::new();
        for &m in &self.mult {
            match runs.last_mut() {
                Some((len, v)) if *v == m => *len += 1,
                _ => runs.push((1, m)),
            }
        }
        (self.modulus, runs)
    }

    pub fn from_rle(modulus: u64, runs: &[(u64, i64)]) -> Result<Self> {
        let mut mult = Vec::with_capacity(modulus as usize);
        for &(len, v) in runs {
            mult.extend(std::iter::repeat(v).take(len as usize));
        }
        if mult.len() as u64 != modulus {
            return Err(Error::CacheFormat(format!(
                "run lengths sum to {} but modulus is {}",
                mult.len(),
                modulus
            )));
        }
        Ok(ExactExponentialSum { modulus, mult })
    }

    /// Little-endian bytes: `Q: u64`, run count `u64`, then `(len: u64, value: i64)` pairs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let (q, runs) = self.to_rle();
        let mut out = Vec::with_capacity(16 + runs.len() * 16);
        out.extend_from_slice(&q.to_le_bytes());
        out.extend_from_slice(&(runs.len() as u64).to_le_bytes());
        for (len, v) in runs {
            out.extend_from_slice(&len.to_le_bytes());
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let word = |i: usize| -> Result<[u8; 8]> {
            bytes
                .get(i..i + 8)
                .map(|s| s.try_into().unwrap())
                .ok_or_else(|| Error::CacheFormat("truncated exact-sum record".into()))
        };
        let q = u64::from_le_bytes(word(0)?);
        let n = u64::from_le_bytes(word(8)?) as usize;
        let mut runs = Vec::with_capacity(n);
        for r in 0..n {
            let off = 16 + 16 * r;
            runs.push((u64::from_le_bytes(word(off)?), i64::from_le_bytes(word(off + 8)?)));
        }
        if q == 0 {
            return Err(Error::CacheFormat("zero modulus".into()));
        }
        Self::from_rle(q, &runs)
    }
}

/// Rewrite both sums over `lcm(Q1, Q2)`.
pub fn merge_modulus(
    s1: &ExactExponentialSum,
    s2: &ExactExponentialSum,
    cap: u64,
) -> Result<(ExactExponentialSum, ExactExponentialSum)> {
    let l = (s1.modulus as u128).lcm(&(s2.modulus as u128));
    if l > cap as u128 {
        return Err(Error::ModulusOverflow(l, cap));
    }
    let l = l as u64;
    Ok((s1.embed(l)?, s2.embed(l)?))
}
