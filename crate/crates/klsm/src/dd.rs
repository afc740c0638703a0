//! Double-double arithmetic (about 32 significant digits) for the few
//! places where a sum of size `10²¹` must be known to better than `1/2`.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };
    pub const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_i64(x: i64) -> Self {
        let hi = x as f64;
        let lo = (x - hi as i64) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = 1.0 / self.hi.sqrt();
        let y = Dd::new(self.hi * x);
        y + (self - y.sqr()).mul_f64(x * 0.5)
    }

    pub fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        Dd { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn exp(self) -> Self {
        if self.hi == 0.0 {
            return Dd::ONE;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = (self - Dd::LN2.mul_f64(k)).ldexp(-10);
        // Taylor series of e^r − 1 for |r| < 2^{-10}·ln2/2
        let mut term = r;
        let mut sum = r;
        for i in 2..30 {
            term = (term * r) / Dd::new(i as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        // (1 + s)² − 1 = s(2 + s), ten times
        for _ in 0..10 {
            sum = sum * (sum + Dd::new(2.0));
        }
        (sum + Dd::ONE).ldexp(k as i32)
    }

    /// `(sin x, cos x)` for `|x| ≤ π/4`.
    fn sin_cos_small(x: Dd) -> (Dd, Dd) {
        let x2 = x.sqr();
        let mut term = x;
        let mut s = x;
        let mut k = 1.0;
        loop {
            term = -(term * x2) / Dd::new((k + 1.0) * (k + 2.0));
            s = s + term;
            k += 2.0;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        let mut term = Dd::ONE;
        let mut c = Dd::ONE;
        let mut k = 0.0;
        loop {
            term = -(term * x2) / Dd::new((k + 1.0) * (k + 2.0));
            c = c + term;
            k += 2.0;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        (s, c)
    }

    /// `cos(2πk/q)` with the angle reduced exactly to the first octant.
    pub fn cos_two_pi_frac(k: i64, q: u64) -> Dd {
        let q128 = q as i128;
        let r = (k as i128).rem_euclid(q128);
        let t = 8 * r;
        let octant = (t / q128) as u32;
        let rem = t % q128;
        let num = if octant % 2 == 0 { rem } else { q128 - rem };
        let beta = (Dd::PI.ldexp(-2) * Dd::from_i64(num as i64)) / Dd::from_i64(q as i64);
        let (s, c) = Dd::sin_cos_small(beta);
        match octant {
            0 | 7 => c,
            1 | 6 => s,
            2 | 5 => -s,
            _ => -c,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_and_sqrt() {
        let two = Dd::new(2.0);
        let s = two.sqrt();
        let back = s * s - two;
        assert!(back.to_f64().abs() < 1e-31);
        let third = Dd::ONE / Dd::new(3.0);
        assert!((third.mul_f64(3.0) - Dd::ONE).to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_identities() {
        let e1 = Dd::ONE.exp();
        // e to 32 digits: 2.7182818284590452353602874713527
        let want = Dd { hi: 2.718_281_828_459_045, lo: 1.445_646_891_729_250_2e-16 };
        assert!((e1 - want).to_f64().abs() < 1e-30, "{:?}", e1);
        let a = Dd::new(37.25).exp();
        let b = Dd::new(-37.25).exp();
        assert!(((a * b) - Dd::ONE).to_f64().abs() < 1e-30);
        let x = Dd::new(0.3).exp() * Dd::new(0.45).exp();
        assert!((x - Dd::new(0.75).exp()).to_f64().abs() < 1e-30);
    }

    #[test]
    fn trig_identities() {
        for q in [7u64, 12, 240, 1201] {
            for k in 0..q as i64 {
                let c = Dd::cos_two_pi_frac(k, q);
                let s = Dd::cos_two_pi_frac(4 * k - q as i64, 4 * q);
                // cos(2π(4k − q)/(4q)) = cos(2πk/q − π/2) = sin(2πk/q)
                let one = c * c + s * s;
                assert!((one - Dd::ONE).to_f64().abs() < 1e-30, "k={k} q={q}");
                assert!((c.to_f64() - (2.0 * std::f64::consts::PI * k as f64 / q as f64).cos()).abs() < 1e-14);
            }
        }
        assert_eq!(Dd::cos_two_pi_frac(0, 5), Dd::ONE);
    }
}
