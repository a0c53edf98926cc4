//! Certified interval arithmetic.
//!
//! Every operation returns an interval that contains the exact real image of
//! its operands. Directed rounding is emulated by nudging each computed
//! endpoint outward with `next_down`/`next_up`, so no global rounding mode is
//! touched and the code is safe on any thread.

mod binorm;
mod normal;
mod taylor;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use binorm::{
    iv_binorm_cdf, iv_binorm_cdf_with, iv_binorm_partials, BinormRule, IvBinormPartials,
};
pub use normal::{iv_std_cdf, iv_std_pdf};

/// Closed interval `[lo, hi]`. Endpoints may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[inline]
pub(crate) fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

#[inline]
pub(crate) fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

/// Product that treats 0·∞ as 0, as interval multiplication requires.
#[inline]
fn mul0(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.is_nan() {
        0.0
    } else {
        p
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Self> {
        if lo <= hi {
            Ok(Self { lo, hi })
        } else {
            domain(format!("invalid interval [{lo}, {hi}]"))
        }
    }

    /// Constructor for endpoints already known to be ordered.
    #[inline]
    fn raw(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    /// Smallest interval holding the real number that `x` approximates to
    /// within half an ulp, e.g. a decimal literal.
    pub fn around(x: f64) -> Self {
        Self::new(down(x), up(x))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Midpoint, finite whenever both endpoints are.
    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            0.5 * self.lo + 0.5 * self.hi
        }
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value in the interval.
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Clamp both endpoints into `[a, b]`.
    pub fn clamp_to(&self, a: f64, b: f64) -> Interval {
        Interval {
            lo: self.lo.clamp(a, b),
            hi: self.hi.clamp(a, b),
        }
    }

    /// Split at the midpoint.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (
            Interval { lo: self.lo, hi: m },
            Interval { lo: m, hi: self.hi },
        )
    }

    pub fn square(self) -> Interval {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.contains(0.0) {
            Interval::new(0.0, up(a.max(b)))
        } else {
            Interval::new(down(a.min(b)).max(0.0), up(a.max(b)))
        }
    }

    pub fn sqrt(self) -> Result<Interval> {
        if self.lo < 0.0 {
            return domain(format!("sqrt of [{}, {}]", self.lo, self.hi));
        }
        Ok(Interval::new(
            down(self.lo.sqrt()).max(0.0),
            up(self.hi.sqrt()),
        ))
    }

    pub fn exp(self) -> Interval {
        // the platform exp is faithful to within one ulp; two steps is slack
        let lo = down(down(self.lo.exp())).max(0.0);
        let hi = if self.hi == f64::INFINITY {
            f64::INFINITY
        } else {
            up(up(self.hi.exp()))
        };
        Interval::new(lo, hi)
    }

    pub fn recip(self) -> Result<Interval> {
        Interval::ONE.div(self)
    }

    pub fn div(self, rhs: Interval) -> Result<Interval> {
        if rhs.contains(0.0) {
            return domain(format!(
                "division by [{}, {}] which contains zero",
                rhs.lo, rhs.hi
            ));
        }
        let q = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        Ok(Interval::new(
            down(q.iter().copied().fold(f64::INFINITY, f64::min)),
            up(q.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        ))
    }

    /// Division by a nonzero scalar.
    pub fn div_f64(self, d: f64) -> Interval {
        assert!(d != 0.0 && !d.is_nan());
        let (a, b) = (self.lo / d, self.hi / d);
        Interval::raw(down(a.min(b)), up(a.max(b)))
    }

    /// Pointwise minimum of two intervals.
    pub fn min(self, other: Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    /// Pointwise maximum of two intervals.
    pub fn max(self, other: Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.max(other.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::raw(down(self.lo + rhs.lo), up(self.hi + rhs.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::raw(down(self.lo - rhs.hi), up(self.hi - rhs.lo))
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            mul0(self.lo, rhs.lo),
            mul0(self.lo, rhs.hi),
            mul0(self.hi, rhs.lo),
            mul0(self.hi, rhs.hi),
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // a zero factor gives an exact zero
        if self == Interval::ZERO || rhs == Interval::ZERO {
            return Interval::ZERO;
        }
        Interval::raw(down(lo), up(hi))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::raw(-self.hi, -self.lo)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl Add<Interval> for f64 {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::point(self) + rhs
    }
}

impl Sub<Interval> for f64 {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::point(self) - rhs
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        Interval::point(self) * rhs
    }
}

/// Elementary operations exposed through [`iv_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Sqrt,
    Exp,
    Square,
}

impl Op {
    pub fn is_binary(self) -> bool {
        matches!(self, Op::Add | Op::Sub | Op::Mul | Op::Div)
    }
}

/// Apply `op` to `a` (and `b` for binary operations).
pub fn iv_arith(op: Op, a: Interval, b: Option<Interval>) -> Result<Interval> {
    let rhs = || match b {
        Some(b) => Ok(b),
        None => domain(format!("{op:?} needs a second operand")),
    };
    match op {
        Op::Add => Ok(a + rhs()?),
        Op::Sub => Ok(a - rhs()?),
        Op::Mul => Ok(a * rhs()?),
        Op::Div => a.div(rhs()?),
        Op::Neg => Ok(-a),
        Op::Sqrt => a.sqrt(),
        Op::Exp => Ok(a.exp()),
        Op::Square => Ok(a.square()),
    }
}
