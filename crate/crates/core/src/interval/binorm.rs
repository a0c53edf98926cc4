//! Rigorous enclosures of the bivariate normal distribution Φ_ρ(t1, t2) and
//! its partial derivatives.
//!
//! The point enclosure integrates the Drezner–Wesolowsky integrand
//! g(r) = (1 − r²)^{−1/2}·exp(−(t1² − 2r·t1·t2 + t2²)/(2(1 − r²)))
//! over [0, ρ]. Box enclosures use that Φ_ρ(t1, t2) is nondecreasing in each
//! of t1, t2 and ρ, so the two extreme corners bound the whole box.

use super::normal::{inv_2pi, iv_std_cdf, iv_std_pdf};
use super::taylor::dw_coefficient;
use super::{up, Interval};
use crate::error::{domain, Result};

/// Integration rule for the Drezner–Wesolowsky term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BinormRule {
    /// Composite 6-point Gauss–Legendre with an interval Taylor bound on the
    /// remainder, adaptively refined.
    #[default]
    GaussTaylor,
    /// Uniform Riemann enclosure with `n` cells, doubled up to 16·n until the
    /// width drops below 1e−6.
    Riemann { n: usize },
}

/// The integral is cut off this close to |ρ| = 1 and the rest is bounded.
const EDGE: f64 = 1e-12;
/// Accepted remainder per unit length of a Gauss–Legendre panel.
const PANEL_TOL: f64 = 1e-13;
const MAX_PANEL_DEPTH: u32 = 24;
/// Target width of the Riemann rule before it stops doubling.
const RIEMANN_TARGET: f64 = 1e-6;

/// Number of Gauss–Legendre points per panel.
const GL_N: usize = 6;
const GL_NODES: [f64; GL_N / 2] = [
    0.238_619_186_083_196_908_630_501_721_680_7,
    0.661_209_386_466_264_513_661_399_595_019_9,
    0.932_469_514_203_152_027_812_301_554_493_99,
];
const GL_WEIGHTS: [f64; GL_N / 2] = [
    0.467_913_934_572_691_047_389_870_343_989_6,
    0.360_761_573_048_138_607_569_833_513_837_7,
    0.171_324_492_379_170_345_040_296_142_172_7,
];

/// Enclosure of {Φ_r(x, y) : x ∈ t1, y ∈ t2, r ∈ rho}.
pub fn iv_binorm_cdf(t1: Interval, t2: Interval, rho: Interval) -> Interval {
    iv_binorm_cdf_with(t1, t2, rho, BinormRule::default())
}

pub fn iv_binorm_cdf_with(t1: Interval, t2: Interval, rho: Interval, rule: BinormRule) -> Interval {
    let rho = rho.clamp_to(-1.0, 1.0);
    let p1 = iv_std_cdf(t1);
    let p2 = iv_std_cdf(t2);
    let frechet_hi = p1.hi().min(p2.hi());
    let frechet_lo = (p1 + p2 - 1.0).lo().max(0.0);

    let narrow = t1.width() + t2.width() <= 1e-9
        && t1.lo().is_finite()
        && t1.hi().is_finite()
        && t2.lo().is_finite()
        && t2.hi().is_finite();
    let raw = if rho.is_point() && (narrow || (t1.is_point() && t2.is_point())) {
        enclose(t1, t2, rho.lo(), rule)
    } else {
        let lo = enclose(
            Interval::point(t1.lo()),
            Interval::point(t2.lo()),
            rho.lo(),
            rule,
        );
        let hi = enclose(
            Interval::point(t1.hi()),
            Interval::point(t2.hi()),
            rho.hi(),
            rule,
        );
        Interval::new(lo.lo(), hi.hi().max(lo.lo()))
    };
    let lo = raw.lo().max(frechet_lo).clamp(0.0, 1.0);
    let hi = raw.hi().min(frechet_hi).clamp(0.0, 1.0);
    if lo <= hi {
        Interval::new(lo, hi)
    } else {
        // both bounds are rigorous, so this only guards against rounding
        Interval::new(hi, lo)
    }
}

/// Point-correlation enclosure for thresholds that are points or narrow
/// finite intervals.
fn enclose(t1: Interval, t2: Interval, rho: f64, rule: BinormRule) -> Interval {
    if t1.hi() == f64::NEG_INFINITY || t2.hi() == f64::NEG_INFINITY {
        return Interval::ZERO;
    }
    if t1.lo() == f64::INFINITY {
        return iv_std_cdf(t2);
    }
    if t2.lo() == f64::INFINITY {
        return iv_std_cdf(t1);
    }
    let p1 = iv_std_cdf(t1);
    let p2 = iv_std_cdf(t2);
    if rho == 0.0 {
        return p1 * p2;
    }
    if rho >= 1.0 {
        return iv_std_cdf(t1.min(t2));
    }
    if rho <= -1.0 {
        return (p1 + p2 - 1.0).max(Interval::ZERO);
    }
    // g(−r; t1, t2) = g(r; t1, −t2), so negative ρ integrates with −t2
    let (t2s, sign) = if rho > 0.0 { (t2, 1.0) } else { (-t2, -1.0) };
    let a = t1.square() + t2s.square();
    let b = t1 * t2s * 2.0;
    let floor = 0.5 * t1.mig().powi(2).max(t2s.mig().powi(2));
    let reach = rho.abs().min(1.0 - EDGE);
    let mut integral = match rule {
        BinormRule::GaussTaylor => gauss_taylor(reach, a, b, floor),
        BinormRule::Riemann { n } => riemann(reach, a, b, floor, n.max(1)),
    };
    if rho.abs() > reach {
        // ∫_R^1 (1 − r²)^{−1/2} dr = acos R ≤ (π/2)·√(1 − R), and 1/(2π) of that
        let tail = up(up((1.0 - reach).sqrt()) * 0.25);
        integral = integral * inv_2pi() + Interval::new(0.0, tail);
        return p1 * p2 + integral * sign;
    }
    p1 * p2 + integral * inv_2pi() * sign
}

/// g over an interval of r, with the exponent capped by its a-priori bounds
/// −(t1² − 2r·t1·t2 + t2²)/(2(1 − r²)) ≤ −max(t1², t2²)/2.
fn integrand(r: Interval, a: Interval, b: Interval, floor: f64) -> Interval {
    let s = (1.0 - r) * (1.0 + r);
    let num = a - b * r;
    let mut ex = -(num.div(s * 2.0).expect("r stays inside (-1, 1)"));
    let cap = -floor;
    if ex.hi() > cap {
        ex = Interval::new(ex.lo().min(cap), cap);
    }
    let root = s.sqrt().expect("s > 0");
    ex.exp().div(root).expect("s > 0")
}

fn gauss_taylor(reach: f64, a: Interval, b: Interval, floor: f64) -> Interval {
    let rem_const = remainder_constant();
    let mut total = Interval::ZERO;
    let mut lo = 0.0f64;
    while lo < reach {
        // pieces shrink geometrically toward the singular endpoint at 1
        let hi = (1.0 - (1.0 - lo) / 1.5).min(lo + 0.5).min(reach);
        let hi = if reach - hi < 1e-3 * (reach - lo) {
            reach
        } else {
            hi
        };
        total = total + panel(lo, hi, a, b, floor, rem_const, 0);
        lo = hi;
    }
    total
}

fn panel(
    lo: f64,
    hi: f64,
    a: Interval,
    b: Interval,
    floor: f64,
    rem_const: Interval,
    depth: u32,
) -> Interval {
    let span = Interval::point(hi) - Interval::point(lo);
    let rem = dw_coefficient(Interval::new(lo, hi), a, b, 2 * GL_N)
        .map(|gk| gk * rem_const * pow_int(span, 2 * GL_N + 1));
    let accept = match rem {
        Some(r) => r.mag() <= PANEL_TOL * (hi - lo) || depth >= MAX_PANEL_DEPTH,
        None => false,
    };
    if !accept && depth < MAX_PANEL_DEPTH {
        let mid = 0.5 * (lo + hi);
        if mid > lo && mid < hi {
            return panel(lo, mid, a, b, floor, rem_const, depth + 1)
                + panel(mid, hi, a, b, floor, rem_const, depth + 1);
        }
    }
    let Some(rem) = rem else {
        // cannot bound the remainder: fall back to a crude rectangle
        return integrand(Interval::new(lo, hi), a, b, floor) * span;
    };
    let half = span * 0.5;
    let centre = (Interval::point(lo) + Interval::point(hi)) * 0.5;
    let mut sum = Interval::ZERO;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        let off = half * Interval::around(*x);
        let w = Interval::around(*w);
        sum =
            sum + w * (integrand(centre - off, a, b, floor) + integrand(centre + off, a, b, floor));
    }
    let quad = half * sum + rem;
    // g > 0 on the panel, so the integral is positive
    Interval::new(quad.lo().max(0.0), quad.hi())
}

fn pow_int(x: Interval, n: usize) -> Interval {
    let mut acc = Interval::ONE;
    for _ in 0..n {
        acc = acc * x;
    }
    acc
}

/// (n!)⁴/((2n+1)·((2n)!)²), the n-point Gauss–Legendre error constant
/// expressed for the Taylor coefficient g⁽²ⁿ⁾/(2n)!.
fn remainder_constant() -> Interval {
    let fact = |m: usize| (1..=m).fold(Interval::ONE, |acc, k| acc * k as f64);
    let n_fact = fact(GL_N);
    let num = n_fact.square().square();
    let two_n_fact = fact(2 * GL_N);
    num.div(two_n_fact.square() * (2 * GL_N + 1) as f64)
        .expect("nonzero")
}

fn riemann(reach: f64, a: Interval, b: Interval, floor: f64, n: usize) -> Interval {
    let mut cells = n;
    loop {
        let mut total = Interval::ZERO;
        let mut prev = 0.0f64;
        for k in 1..=cells {
            let next = if k == cells {
                reach
            } else {
                reach * k as f64 / cells as f64
            };
            let span = Interval::point(next) - Interval::point(prev);
            let g = integrand(Interval::new(prev, next), a, b, floor);
            total = total + g * span;
            prev = next;
        }
        let total = Interval::new(total.lo().max(0.0), total.hi());
        if total.width() * inv_2pi().hi() <= RIEMANN_TARGET || cells >= 16 * n {
            return total;
        }
        cells *= 2;
    }
}

/// Interval enclosures of ∂Φ_ρ/∂ρ, ∂Φ_ρ/∂t1 and ∂Φ_ρ/∂t2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IvBinormPartials {
    pub d_rho: Interval,
    pub d_t1: Interval,
    pub d_t2: Interval,
}

pub fn iv_binorm_partials(t1: Interval, t2: Interval, rho: Interval) -> Result<IvBinormPartials> {
    if rho.lo() <= -1.0 || rho.hi() >= 1.0 {
        return domain(format!("correlation {rho} touches ±1"));
    }
    for t in [t1, t2] {
        if !t.lo().is_finite() || !t.hi().is_finite() {
            return domain(format!("threshold {t} is not finite"));
        }
    }
    let one_m = 1.0 - rho.square();
    let one_m = one_m
        .intersect(&((1.0 - rho) * (1.0 + rho)))
        .unwrap_or(one_m);
    if one_m.lo() <= 0.0 {
        return domain(format!("correlation {rho} too close to ±1"));
    }
    let root = one_m.sqrt()?;

    let quad = t1.square() - rho * t1 * t2 * 2.0 + t2.square();
    let mut ex = -(quad.div(one_m * 2.0)?);
    let cap = -0.5 * t1.mig().powi(2).max(t2.mig().powi(2));
    if ex.hi() > cap {
        ex = Interval::new(ex.lo().min(cap), cap);
    }
    let d_rho = (inv_2pi() * ex.exp()).div(root)?;

    let d_t1 = iv_std_pdf(t1) * iv_std_cdf((t2 - rho * t1).div(root)?);
    let d_t2 = iv_std_pdf(t2) * iv_std_cdf((t1 - rho * t2).div(root)?);
    Ok(IvBinormPartials {
        d_rho: d_rho.clamp_to(0.0, f64::INFINITY),
        d_t1: d_t1.clamp_to(0.0, 1.0),
        d_t2: d_t2.clamp_to(0.0, 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{binorm_cdf, binorm_partials};

    fn pt(x: f64) -> Interval {
        Interval::point(x)
    }

    #[test]
    fn independent_origin() {
        let e = iv_binorm_cdf(pt(0.0), pt(0.0), pt(0.0));
        assert!(e.contains(0.25) && e.width() <= 1e-8);
    }

    #[test]
    fn sheppard_values() {
        for &r in &[-0.99f64, -0.5, 0.3, 0.9, 0.999_999] {
            let exact = 0.25 + r.asin() / (2.0 * std::f64::consts::PI);
            let e = iv_binorm_cdf(pt(0.0), pt(0.0), pt(r));
            assert!(e.contains(exact), "{r}: {e} vs {exact}");
            assert!(e.width() < 1e-12, "{r}: {e}");
        }
    }

    #[test]
    fn grid_containment_and_width() {
        for i in -6..=6 {
            for j in -6..=6 {
                for k in -10..=10 {
                    let (t1, t2, r) = (0.5 * i as f64, 0.5 * j as f64, 0.0999 * k as f64);
                    let e = iv_binorm_cdf(pt(t1), pt(t2), pt(r));
                    let f = binorm_cdf(t1, t2, r);
                    assert!(e.contains(f), "({t1},{t2},{r}): {e} vs {f}");
                    assert!(e.width() <= 1e-6, "({t1},{t2},{r}): {e}");
                }
            }
        }
    }

    #[test]
    fn near_unit_correlation() {
        for &r in &[1.0 - 1e-13, -1.0 + 1e-13, 1.0, -1.0, 1.0 - 1e-9] {
            let e = iv_binorm_cdf(pt(0.3), pt(-0.2), pt(r));
            assert!(e.contains(binorm_cdf(0.3, -0.2, r)), "{r}: {e}");
            assert!(e.width() <= 1e-6, "{r}: {e}");
        }
    }

    #[test]
    fn riemann_rule_contains_and_agrees() {
        let rule = BinormRule::Riemann { n: 256 };
        let e = iv_binorm_cdf_with(pt(0.4), pt(-0.7), pt(-0.6), rule);
        let g = iv_binorm_cdf(pt(0.4), pt(-0.7), pt(-0.6));
        assert!(e.contains(binorm_cdf(0.4, -0.7, -0.6)));
        assert!(e.intersect(&g).is_some());
        // the plain rule converges only linearly in the cell count
        assert!(e.width() <= 1e-4);
    }

    #[test]
    fn box_enclosure() {
        let t1 = Interval::new(-0.2, 0.1);
        let t2 = Interval::new(0.3, 0.5);
        let r = Interval::new(-0.7, -0.4);
        let e = iv_binorm_cdf(t1, t2, r);
        for a in 0..=4 {
            for b in 0..=4 {
                for c in 0..=4 {
                    let x = -0.2 + 0.075 * a as f64;
                    let y = 0.3 + 0.05 * b as f64;
                    let z = -0.7 + 0.075 * c as f64;
                    assert!(e.contains(binorm_cdf(x, y, z)));
                }
            }
        }
    }

    #[test]
    fn infinite_thresholds() {
        let inf = f64::INFINITY;
        assert_eq!(iv_binorm_cdf(pt(-inf), pt(0.3), pt(0.5)), Interval::ZERO);
        let e = iv_binorm_cdf(pt(inf), pt(0.3), pt(-0.5));
        assert!(e.contains(crate::gauss::std_cdf(0.3)));
        let e = iv_binorm_cdf(Interval::ENTIRE, Interval::ENTIRE, Interval::new(-1.0, 1.0));
        assert_eq!(e, Interval::UNIT);
    }

    #[test]
    fn partials_at_origin_and_errors() {
        let p = iv_binorm_partials(pt(0.0), pt(0.0), pt(0.0)).unwrap();
        assert!((p.d_t1.mid() - 0.199_471_140_2).abs() < 1e-10 && p.d_t1.width() < 1e-14);
        assert!(p.d_rho.contains(1.0 / (2.0 * std::f64::consts::PI)));
        assert!(iv_binorm_partials(pt(0.0), pt(0.0), Interval::new(0.5, 1.0)).is_err());
        let q = binorm_partials(0.3, -0.8, 0.45).unwrap();
        let p = iv_binorm_partials(pt(0.3), pt(-0.8), pt(0.45)).unwrap();
        assert!(p.d_rho.contains(q.d_rho) && p.d_t1.contains(q.d_t1) && p.d_t2.contains(q.d_t2));
    }
}
