//! Rigorous enclosures of the standard normal density and distribution.

use super::Interval;

/// Enclosure of 1/√(2π).
pub(crate) fn inv_sqrt_2pi() -> Interval {
    Interval::around(crate::gauss::INV_SQRT_2PI)
}

/// Enclosure of 1/(2π).
pub(crate) fn inv_2pi() -> Interval {
    Interval::around(1.0 / (2.0 * std::f64::consts::PI))
}

/// Switch from the power series to the continued fraction.
const SERIES_LIMIT: f64 = 5.0;

/// Encloses {φ(x) : x ∈ t}.
pub fn iv_std_pdf(t: Interval) -> Interval {
    let e = (-(t.square() * 0.5)).exp();
    (inv_sqrt_2pi() * e).clamp_to(0.0, 1.0)
}

/// Encloses {Φ(x) : x ∈ t}. Φ is increasing, so only the endpoints matter.
pub fn iv_std_cdf(t: Interval) -> Interval {
    let lo = cdf_point(t.lo()).lo();
    let hi = cdf_point(t.hi()).hi();
    Interval::new(lo.max(0.0), hi.min(1.0))
}

/// Enclosure of Φ(x) at a single float.
pub(crate) fn cdf_point(x: f64) -> Interval {
    if x == f64::INFINITY {
        return Interval::ONE;
    }
    if x == f64::NEG_INFINITY {
        return Interval::ZERO;
    }
    if x.abs() <= SERIES_LIMIT {
        series(x)
    } else if x > 0.0 {
        (1.0 - upper_tail(x)).clamp_to(0.0, 1.0)
    } else {
        upper_tail(-x).clamp_to(0.0, 1.0)
    }
}

/// Φ(x) = 1/2 + φ(x)·Σ_{n≥0} x^{2n+1}/(2n+1)!!, all terms of one sign.
/// After term N the ratio of consecutive terms is x²/(2n+3) ≤ x²/(2N+3), so
/// the tail is bounded by a geometric series.
fn series(x: f64) -> Interval {
    let xi = Interval::point(x);
    let x2 = xi.square();
    let mut term = xi;
    let mut sum = xi;
    let mut n = 0u32;
    loop {
        n += 1;
        term = (term * x2).div_f64((2 * n + 1) as f64);
        sum = sum + term;
        let q = x2.hi() / (2 * n + 3) as f64;
        if q < 0.5 && term.mag() <= 1e-17 * sum.mig().max(1e-300) {
            // |tail| ≤ |term|·q/(1−q) ≤ 2|term|·q
            let rem = (term.mag() * 2.0 * q).next_up();
            sum = sum + Interval::new(-rem, rem);
            break;
        }
        if n > 200 {
            // unreachable inside the series range; keep a safe answer anyway
            return Interval::UNIT;
        }
    }
    let phi = inv_sqrt_2pi() * (-(x2 * 0.5)).exp();
    (Interval::point(0.5) + phi * sum).clamp_to(0.0, 1.0)
}

/// Encloses 1 − Φ(x) for x > 0 as φ(x)·R(x), where the Mills ratio has the
/// continued fraction R(x) = 1/(x + 1/(x + 2/(x + 3/(x + …)))). All partial
/// numerators and denominators are positive, so consecutive convergents
/// bracket R(x).
fn upper_tail(x: f64) -> Interval {
    debug_assert!(x > 0.0);
    let xi = Interval::point(x);
    // pick the depth in plain floats, then certify once at that depth
    let mut depth = 8;
    while depth < 4096 {
        let a = convergent_f64(x, depth);
        let b = convergent_f64(x, depth + 1);
        if (a - b).abs() <= 1e-17 * a {
            break;
        }
        depth *= 2;
    }
    let a = convergent(xi, depth);
    let b = convergent(xi, depth + 1);
    let mills = Interval::new(a.lo().min(b.lo()), a.hi().max(b.hi()));
    let phi = inv_sqrt_2pi() * (-(xi.square() * 0.5)).exp();
    (phi * mills).clamp_to(0.0, 1.0)
}

fn convergent_f64(x: f64, n: usize) -> f64 {
    let mut tail = x;
    for k in (1..=n).rev() {
        tail = x + k as f64 / tail;
    }
    1.0 / tail
}

/// The depth-`n` convergent 1/(x + 1/(x + … + n/x)), evaluated backwards.
fn convergent(x: Interval, n: usize) -> Interval {
    let mut tail = x;
    for k in (1..=n).rev() {
        tail = x + Interval::point(k as f64).div(tail).expect("tail > 0");
    }
    tail.recip().expect("tail > 0")
}
