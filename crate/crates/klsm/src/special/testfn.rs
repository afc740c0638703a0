//! The smooth cutoff `φ_{a,x,T}`: 1 on `[a/2x, a/x]`, 0 outside
//! `[a/(2x+2T), a/(x−T)]`, with degree-9 polynomial ramps in between.

use std::fmt;

use crate::error::{Error, Result};

/// Ramp profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// `126u⁵ − 420u⁶ + 540u⁷ − 315u⁸ + 70u⁹`: four derivatives vanish at both ends.
    Smoothstep9,
}

impl Shape {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "smoothstep9" => Some(Shape::Smoothstep9),
            _ => None,
        }
    }

    #[inline]
    pub fn ramp(&self, u: f64) -> f64 {
        match self {
            Shape::Smoothstep9 => {
                let u = u.clamp(0.0, 1.0);
                let u5 = u * u * u * u * u;
                u5 * (126.0 + u * (-420.0 + u * (540.0 + u * (-315.0 + u * 70.0))))
            }
        }
    }

    #[inline]
    pub fn ramp_derivative(&self, u: f64) -> f64 {
        match self {
            Shape::Smoothstep9 => {
                if !(0.0..=1.0).contains(&u) {
                    return 0.0;
                }
                // 630 u⁴ (1 − u)⁴
                let v = u * (1.0 - u);
                630.0 * v * v * v * v
            }
        }
    }

    /// `max |ramp′|` on `[0, 1]`.
    pub fn max_slope(&self) -> f64 {
        match self {
            Shape::Smoothstep9 => 630.0 / 256.0,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Smoothstep9 => f.write_str("smoothstep9"),
        }
    }
}

/// Parameters of `φ_{a,x,T}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestFunctionParams {
    pub a: f64,
    pub x: f64,
    pub t: f64,
    pub shape: Shape,
}

/// A weight `w(y)` integrated against a Bessel kernel with `dy/y`.
pub trait Weight {
    fn value(&self, y: f64) -> f64;
    /// Sorted points covering the support, including any kinks; empty for
    /// an identically zero weight.
    fn breakpoints(&self) -> Vec<f64>;
}

impl TestFunctionParams {
    /// Checks `a, x, T > 0` and `T ≤ x/3`.
    pub fn new(a: f64, x: f64, t: f64) -> Result<Self> {
        Self::with_shape(a, x, t, Shape::Smoothstep9)
    }

    pub fn with_shape(a: f64, x: f64, t: f64, shape: Shape) -> Result<Self> {
        if !(a > 0.0 && x > 0.0 && t > 0.0) || !(a.is_finite() && x.is_finite() && t.is_finite()) {
            return Err(Error::InadmissibleParams(format!("a, x, T must be positive (got {a}, {x}, {t})")));
        }
        if t > x / 3.0 {
            return Err(Error::InadmissibleParams(format!("T = {t} exceeds x/3 = {}", x / 3.0)));
        }
        Ok(TestFunctionParams { a, x, t, shape })
    }

    /// `(a/(2x+2T), a/(x−T))`.
    pub fn support(&self) -> (f64, f64) {
        (self.a / (2.0 * self.x + 2.0 * self.t), self.a / (self.x - self.t))
    }

    /// `(a/2x, a/x)`.
    pub fn plateau(&self) -> (f64, f64) {
        (self.a / (2.0 * self.x), self.a / self.x)
    }

    /// `φ(t)`: exactly 1 on the plateau and exactly 0 off the support.
    pub fn eval(&self, y: f64) -> f64 {
        let (s0, s1) = self.support();
        let (p0, p1) = self.plateau();
        if y <= s0 || y >= s1 {
            0.0
        } else if y >= p0 && y <= p1 {
            1.0
        } else if y < p0 {
            self.shape.ramp((y - s0) / (p0 - s0))
        } else {
            self.shape.ramp((s1 - y) / (s1 - p1))
        }
    }

    /// `φ′(t)`.
    pub fn derivative(&self, y: f64) -> f64 {
        let (s0, s1) = self.support();
        let (p0, p1) = self.plateau();
        if y <= s0 || y >= s1 || (y >= p0 && y <= p1) {
            0.0
        } else if y < p0 {
            self.shape.ramp_derivative((y - s0) / (p0 - s0)) / (p0 - s0)
        } else {
            -self.shape.ramp_derivative((s1 - y) / (s1 - p1)) / (s1 - p1)
        }
    }

    /// The constant `10·x²/(aT)` bounding `|φ′|`.
    pub fn derivative_bound(&self) -> f64 {
        10.0 * self.x * self.x / (self.a * self.t)
    }
}

impl Weight for TestFunctionParams {
    fn value(&self, y: f64) -> f64 {
        self.eval(y)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let (s0, s1) = self.support();
        let (p0, p1) = self.plateau();
        vec![s0, p0, p1, s1]
    }
}

/// `φ(t)` for admissible parameters.
pub fn phi_eval(p: &TestFunctionParams, t: f64) -> f64 {
    p.eval(t)
}

/// A weight given by a plain function on `[lo, hi]`, used to substitute
/// integrands with known closed-form transforms.
#[derive(Clone, Copy)]
pub struct ForcedWeight {
    pub f: fn(f64) -> f64,
    pub lo: f64,
    pub hi: f64,
}

impl Weight for ForcedWeight {
    fn value(&self, y: f64) -> f64 {
        (self.f)(y)
    }

    fn breakpoints(&self) -> Vec<f64> {
        if self.hi > self.lo {
            vec![self.lo, self.hi]
        } else {
            Vec::new()
        }
    }
}
