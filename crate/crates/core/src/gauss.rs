//! Floating-point evaluation of the standard normal and bivariate normal
//! distributions. Nothing here is certified; see [`crate::interval`] for the
//! rigorous counterparts.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_SQRT_PI, PI, SQRT_2};

use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::error::{domain, Result};

/// 1/√(2π)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Correlations within this distance of ±1 are evaluated with the degenerate
/// closed forms.
pub const RHO_EDGE: f64 = 1e-12;

/// Absolute tolerance of the adaptive quadrature behind [`binorm_cdf`].
pub const QUAD_TOL: f64 = 1e-12;

/// Relative tolerance of the same quadrature. It matters when Φ_ρ is tiny and
/// the integral nearly cancels Φ(t1)Φ(t2).
pub const QUAD_REL_TOL: f64 = 1e-13;

/// Arguments of the joint lower-tail probability `Pr[X ≤ t1, Y ≤ t2]` for a
/// standard bivariate normal pair with correlation `rho`. Thresholds may be
/// infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointTailQuery {
    pub t1: f64,
    pub t2: f64,
    pub rho: f64,
}

impl JointTailQuery {
    pub fn new(t1: f64, t2: f64, rho: f64) -> Result<Self> {
        if t1.is_nan() || t2.is_nan() {
            return domain("threshold is NaN");
        }
        if !(-1.0..=1.0).contains(&rho) {
            return domain(format!("correlation {rho} outside [-1, 1]"));
        }
        Ok(Self { t1, t2, rho })
    }

    pub fn cdf(&self) -> f64 {
        binorm_cdf(self.t1, self.t2, self.rho)
    }

    pub fn partials(&self) -> Result<BinormPartials> {
        binorm_partials(self.t1, self.t2, self.rho)
    }
}

pub fn std_pdf(t: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * t * t).exp()
}

/// Φ(t), with Φ(−∞) = 0 and Φ(+∞) = 1.
pub fn std_cdf(t: f64) -> f64 {
    if t == f64::INFINITY {
        1.0
    } else if t == f64::NEG_INFINITY {
        0.0
    } else {
        // x = −t/√2 carries a rounding error that erfc amplifies by about x²
        // in relative terms; undo it with one first-order correction
        let x = -t * FRAC_1_SQRT_2;
        let dx = (-t).mul_add(FRAC_1_SQRT_2, -x) - t * FRAC_1_SQRT_2_LO;
        let v = erfc(x);
        0.5 * (v - FRAC_2_SQRT_PI * (-x * x).exp() * dx)
    }
}

/// 1/√2 − FRAC_1_SQRT_2
const FRAC_1_SQRT_2_LO: f64 = -4.833_646_656_726_457e-17;

/// Φ⁻¹(p) for p ∈ (0, 1).
pub fn std_cdf_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("probability {p} outside (0, 1)"));
    }
    let mut x = -SQRT_2 * erfc_inv(2.0 * p);
    // one Newton step against the forward map tightens the far tails
    let dens = std_pdf(x);
    if dens > 0.0 {
        x -= (std_cdf(x) - p) / dens;
    }
    Ok(x)
}

/// Φ_ρ(t1, t2) = Pr[X ≤ t1, Y ≤ t2] with corr(X, Y) = ρ.
///
/// For interior correlations this is Φ(t1)Φ(t2) plus the Drezner–Wesolowsky
/// integral of the density derivative over [0, ρ]. The integral is taken in
/// the angle variable r = sin θ, which removes the 1/√(1−r²) endpoint blow-up,
/// and is evaluated by adaptive Gauss–Kronrod.
pub fn binorm_cdf(t1: f64, t2: f64, rho: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&rho), "rho = {rho}");
    if t1 == f64::NEG_INFINITY || t2 == f64::NEG_INFINITY {
        return 0.0;
    }
    if t1 == f64::INFINITY {
        return std_cdf(t2);
    }
    if t2 == f64::INFINITY {
        return std_cdf(t1);
    }
    let p1 = std_cdf(t1);
    let p2 = std_cdf(t2);
    let upper = p1.min(p2);
    let lower = (p1 + p2 - 1.0).max(0.0);
    if 1.0 - rho < RHO_EDGE {
        return upper;
    }
    if 1.0 + rho < RHO_EDGE {
        return lower;
    }
    if rho == 0.0 {
        return p1 * p2;
    }
    let a = t1 * t1 + t2 * t2;
    let b = 2.0 * t1 * t2;
    let integrand = |theta: f64| {
        let s = theta.sin();
        let c2 = (1.0 - s) * (1.0 + s);
        (-(a - b * s) / (2.0 * c2)).exp()
    };
    let integral = adaptive_gauss_kronrod(
        integrand,
        0.0,
        rho.asin(),
        QUAD_TOL * 2.0 * PI,
        QUAD_REL_TOL,
    );
    (p1 * p2 + integral / (2.0 * PI)).clamp(lower, upper)
}

/// The three first-order partial derivatives of Φ_ρ(t1, t2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinormPartials {
    pub d_rho: f64,
    pub d_t1: f64,
    pub d_t2: f64,
}

pub fn binorm_partials(t1: f64, t2: f64, rho: f64) -> Result<BinormPartials> {
    if !(rho.abs() < 1.0) {
        return domain(format!("partials need |rho| < 1, got {rho}"));
    }
    if !(t1.is_finite() && t2.is_finite()) {
        return domain("partials need finite thresholds");
    }
    let one_m = (1.0 - rho) * (1.0 + rho);
    let sq = one_m.sqrt();
    let d_rho =
        (-(t1 * t1 - 2.0 * rho * t1 * t2 + t2 * t2) / (2.0 * one_m)).exp() / (2.0 * PI * sq);
    let d_t1 = std_pdf(t1) * std_cdf((t2 - rho * t1) / sq);
    let d_t2 = std_pdf(t2) * std_cdf((t1 - rho * t2) / sq);
    Ok(BinormPartials { d_rho, d_t1, d_t2 })
}

// 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss–Kronrod integration of `f` over [a, b] until the
/// error estimate is below both `abs_tol` and `rel_tol` times the running
/// value, or the panel cap is hit. Works for b < a as well.
pub(crate) fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> f64 {
    const MAX_PANELS: usize = 200;
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.min(rel_tol * total.abs()) && panels.len() < MAX_PANELS {
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, pv, pe) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pdf_at_zero_and_symmetry() {
        assert_abs_diff_eq!(std_pdf(0.0), 0.398_942_280_4, epsilon = 1e-10);
        for &t in &[0.3, 1.7, 4.2] {
            assert_eq!(std_pdf(t), std_pdf(-t));
        }
    }

    #[test]
    fn pdf_matches_series_oracle_at_one() {
        // e^{-1/2} from its Taylor series
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for k in 1..40 {
            term *= -0.5 / k as f64;
            sum += term;
        }
        let oracle = sum / (2.0 * PI).sqrt();
        assert_abs_diff_eq!(std_pdf(1.0), oracle, epsilon = 1e-14);
    }

    #[test]
    fn cdf_limits() {
        assert_eq!(std_cdf(0.0), 0.5);
        assert_eq!(std_cdf(f64::INFINITY), 1.0);
        assert_eq!(std_cdf(f64::NEG_INFINITY), 0.0);
    }

    fn bisect_inverse(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0, 40.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if std_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn cdf_quantile_against_bisection() {
        assert_abs_diff_eq!(bisect_inverse(0.95), 1.644_853_627_0, epsilon = 1e-9);
        assert_abs_diff_eq!(std_cdf(1.644_853_627_0), 0.95, epsilon = 1e-10);
        assert_abs_diff_eq!(
            std_cdf_inv(0.975).unwrap(),
            bisect_inverse(0.975),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(std_cdf_inv(0.975).unwrap(), 1.959_963_984_5, epsilon = 1e-8);
        assert_eq!(std_cdf_inv(0.5).unwrap(), 0.0);
    }

    #[test]
    fn inverse_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(std_cdf_inv(p).is_err());
        }
    }

    #[test]
    fn binorm_simple_cases() {
        assert_abs_diff_eq!(binorm_cdf(0.0, 0.0, 0.0), 0.25, epsilon = 1e-15);
        for &t in &[-2.0, -0.3, 0.0, 0.7, 3.0] {
            // X = -Y almost surely: Pr[X <= t, -X <= -t] = Pr[X = t] = 0
            assert_eq!(binorm_cdf(t, -t, -1.0), 0.0);
            assert_eq!(binorm_cdf(t, t, 1.0), std_cdf(t));
        }
        // Sheppard: Φ_ρ(0,0) = 1/4 + asin(ρ)/(2π)
        for &r in &[-0.9, -0.3, 0.2, 0.95] {
            assert_abs_diff_eq!(
                binorm_cdf(0.0, 0.0, r),
                0.25 + f64::asin(r) / (2.0 * PI),
                epsilon = 1e-13
            );
        }
        assert_eq!(binorm_cdf(f64::NEG_INFINITY, 1.0, 0.3), 0.0);
        assert_eq!(binorm_cdf(f64::INFINITY, 0.4, -0.3), std_cdf(0.4));
        assert_eq!(binorm_cdf(f64::INFINITY, f64::INFINITY, -0.3), 1.0);
    }

    #[test]
    fn binorm_against_tensor_grid_oracle() {
        // brute-force 2-D composite Gauss–Legendre over [-12, t1] x [-12, t2]
        let (t1, t2, rho) = (0.5, -0.3, -0.7);
        let oracle = tensor_grid_cdf(t1, t2, rho);
        assert_abs_diff_eq!(binorm_cdf(t1, t2, rho), oracle, epsilon = 1e-9);
    }

    fn tensor_grid_cdf(t1: f64, t2: f64, rho: f64) -> f64 {
        const X: [f64; 5] = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        const W: [f64; 5] = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let cells = 400;
        let lo = -12.0;
        let det = 1.0 - rho * rho;
        let norm = 1.0 / (2.0 * PI * det.sqrt());
        let h1 = (t1 - lo) / cells as f64;
        let h2 = (t2 - lo) / cells as f64;
        let mut total = 0.0;
        for i in 0..cells {
            for (xi, wi) in X.iter().zip(W) {
                let x = lo + h1 * (i as f64 + 0.5 + 0.5 * xi);
                let mut inner = 0.0;
                for j in 0..cells {
                    for (yj, wj) in X.iter().zip(W) {
                        let y = lo + h2 * (j as f64 + 0.5 + 0.5 * yj);
                        let q = (x * x - 2.0 * rho * x * y + y * y) / det;
                        inner += wj * (-0.5 * q).exp();
                    }
                }
                total += wi * inner * 0.5 * h2;
            }
        }
        total * 0.5 * h1 * norm
    }

    #[test]
    fn partials_plug_in() {
        let p = binorm_partials(0.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(p.d_rho, 1.0 / (2.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(p.d_t1, 0.199_471_140_2, epsilon = 1e-10);
        assert_abs_diff_eq!(p.d_t2, 0.199_471_140_2, epsilon = 1e-10);
        assert!(binorm_partials(0.0, 0.0, 1.0).is_err());
        assert!(binorm_partials(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn query_validates_rho() {
        assert!(JointTailQuery::new(0.0, 0.0, 1.0 + 1e-9).is_err());
        assert!(JointTailQuery::new(f64::NAN, 0.0, 0.0).is_err());
        let q = JointTailQuery::new(f64::INFINITY, 0.0, 0.5).unwrap();
        assert_eq!(q.cdf(), 0.5);
    }
}
