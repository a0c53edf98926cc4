//! Interval Taylor coefficients of the Drezner–Wesolowsky integrand
//! g(r) = (1 − r²)^{−1/2}·exp(−(A − B·r)/(2(1 − r²))).
//!
//! Evaluating the coefficient recurrences with an interval base point yields
//! an enclosure of g⁽ᵏ⁾(ξ)/k! valid for every ξ in that interval, which bounds
//! the remainder of a quadrature rule of matching degree.

use super::Interval;

pub(crate) const MAX_ORDER: usize = 24;

/// Enclosure of g⁽ᵏ⁾(ξ)/k! over ξ ∈ `base`, with `a` = t1² + t2² and
/// `b` = 2·t1·t2. Requires `base` ⊂ (−1, 1).
pub(crate) fn dw_coefficient(
    base: Interval,
    a: Interval,
    b: Interval,
    k: usize,
) -> Option<Interval> {
    assert!(k <= MAX_ORDER);
    let s0 = (1.0 - base) * (1.0 + base);
    if s0.lo() <= 0.0 {
        return None;
    }
    // s = 1 − r², n = A − B·r, as truncated series in (r − base)
    let s = [s0, -(base * 2.0), Interval::point(-1.0)];
    let n0 = a - b * base;
    let n1 = -b;
    let inv_s0 = s0.recip().ok()?;

    let mut q = [Interval::ZERO; MAX_ORDER + 1];
    for i in 0..=k {
        let mut acc = match i {
            0 => n0,
            1 => n1,
            _ => Interval::ZERO,
        };
        if i >= 1 {
            acc = acc - s[1] * q[i - 1];
        }
        if i >= 2 {
            acc = acc - s[2] * q[i - 2];
        }
        q[i] = acc * inv_s0;
    }
    let mut e = [Interval::ZERO; MAX_ORDER + 1];
    for i in 0..=k {
        e[i] = q[i] * -0.5;
    }

    let mut x = [Interval::ZERO; MAX_ORDER + 1];
    let mut e0 = e[0];
    // the quadratic form is nonnegative, so the exponent never exceeds 0
    if e0.hi() > 0.0 {
        e0 = Interval::new(e0.lo().min(0.0), 0.0);
    }
    x[0] = e0.exp();
    for i in 1..=k {
        let mut acc = Interval::ZERO;
        for j in 1..=i {
            acc = acc + (e[j] * x[i - j]) * j as f64;
        }
        x[i] = acc.div_f64(i as f64);
    }

    // w = s^{−1/2}: w_i = 1/(i·s0)·Σ_j ((p+1)·j − i)·s_j·w_{i−j}, p = −1/2
    let mut w = [Interval::ZERO; MAX_ORDER + 1];
    w[0] = s0.sqrt().ok()?.recip().ok()?;
    for i in 1..=k {
        let mut acc = Interval::ZERO;
        for j in 1..=i.min(2) {
            let c = 0.5 * j as f64 - i as f64;
            acc = acc + (s[j] * w[i - j]) * c;
        }
        w[i] = (acc * inv_s0).div_f64(i as f64);
    }

    let mut g = Interval::ZERO;
    for j in 0..=k {
        g = g + w[j] * x[k - j];
    }
    Some(g)
}
