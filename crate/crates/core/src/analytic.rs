//! Upper bounds for threshold rounding from explicit hard distributions.
//!
//! The symmetric family puts weight p1 on (−b, −b) and (b, b) at their
//! triangle boundary and p2 = 1 − 2p1 on (b, −b) with pairwise bias c. A
//! single threshold function only matters through t1 = f(−b) and t2 = f(b),
//! so its expected soundness is the surface s(t1, t2).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigDistribution, Configuration};
use crate::error::{domain, Error, Result};
use crate::game::threshold_partials;
use crate::gauss::{binorm_cdf, std_cdf, std_cdf_inv};
use crate::optim::projected_descent;
use crate::scheme::{ControlGrid, ThresholdFunction};

/// Bisection tolerance for the root of g.
pub const ROOT_TOL: f64 = 1e-12;
/// Finite thresholds are searched in [−CAP, CAP]; infinite ones come from
/// the corner enumeration.
const SEARCH_CAP: f64 = 8.0;
/// Corner patterns are enumerated up to this many free bias classes.
const MAX_ENUM_CLASSES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricFamily {
    pub b: f64,
    pub c: f64,
    pub p1: f64,
}

impl SymmetricFamily {
    pub fn new(b: f64, c: f64, p1: f64) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return domain(format!("bias {b} not in (0, 1)"));
        }
        if !(c > -1.0 && c < -b * b) {
            return domain(format!("pairwise bias {c} not in (-1, -b^2)"));
        }
        if !(p1 > 0.0 && p1 < 0.5) {
            return domain(format!("p1 = {p1} leaves no room for p2"));
        }
        Ok(Self { b, c, p1 })
    }

    /// The MAX DI-CUT family with the parameters of the best known bound.
    pub fn dicut() -> Self {
        Self {
            b: 0.1757079776,
            c: -0.6876930116,
            p1: 0.3770580295,
        }
    }

    pub fn p2(&self) -> f64 {
        1.0 - 2.0 * self.p1
    }

    /// The three configurations with their weights.
    pub fn distribution(&self) -> Result<ConfigDistribution> {
        let b = self.b;
        let edge = -1.0 + 2.0 * b;
        ConfigDistribution::new(vec![
            (Configuration::from_pairwise(-b, -b, edge)?, self.p1),
            (Configuration::from_pairwise(b, -b, self.c)?, self.p2()),
            (Configuration::from_pairwise(b, b, edge)?, self.p1),
        ])
    }

    /// p1·(1 − b) + p2·(1 + 2b − c)/4.
    pub fn completeness(&self) -> f64 {
        self.p1 * (1.0 - self.b) + self.p2() * (1.0 + 2.0 * self.b - self.c) / 4.0
    }
}

/// (ρ1, ρ2): relative pairwise biases of the edge and middle configurations.
pub fn family_rhos(fam: &SymmetricFamily) -> (f64, f64) {
    let b = fam.b;
    (-(1.0 - b) / (1.0 + b), (fam.c + b * b) / (1.0 - b * b))
}

/// s(t1, t2) = p1·Φ_{−ρ1}(t1, −t1) + p2·Φ_{−ρ2}(t2, −t1) + p1·Φ_{−ρ1}(t2, −t2).
pub fn s_value(fam: &SymmetricFamily, t1: f64, t2: f64) -> f64 {
    let (r1, r2) = family_rhos(fam);
    fam.p1 * binorm_cdf(t1, -t1, -r1)
        + fam.p2() * binorm_cdf(t2, -t1, -r2)
        + fam.p1 * binorm_cdf(t2, -t2, -r1)
}

fn require_p1_dominates(fam: &SymmetricFamily) -> Result<()> {
    if fam.p1 <= fam.p2() {
        return Err(Error::Precondition(format!(
            "p1 = {} must exceed p2 = {}",
            fam.p1,
            fam.p2()
        )));
    }
    Ok(())
}

/// g(t) = p1·(1 − 2Φ(√((1−ρ1)/(1+ρ1))·t)) − p2·Φ(−√((1+ρ2)/(1−ρ2))·t).
/// Its root on the negative axis gives the critical point (t, −t) of s.
pub fn g_value(fam: &SymmetricFamily, t: f64) -> f64 {
    let (r1, r2) = family_rhos(fam);
    let k1 = ((1.0 - r1) / (1.0 + r1)).sqrt();
    let k2 = ((1.0 + r2) / (1.0 - r2)).sqrt();
    fam.p1 * (1.0 - 2.0 * std_cdf(k1 * t)) - fam.p2() * std_cdf(-k2 * t)
}

/// (t0, s_max): bisection for the root of g on [−10, 0]; the critical point
/// is (−t0, t0).
pub fn critical_point(fam: &SymmetricFamily) -> Result<(f64, f64)> {
    require_p1_dominates(fam)?;
    let (mut lo, mut hi) = (-10.0, 0.0);
    if g_value(fam, lo) <= 0.0 {
        return domain("g has no sign change on [-10, 0]");
    }
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if g_value(fam, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    Ok((-root, s_value(fam, root, -root)))
}

/// (t*, s(−∞, t*)): the best threshold at b once f(−b) = −∞.
pub fn boundary_max(fam: &SymmetricFamily) -> Result<(f64, f64)> {
    require_p1_dominates(fam)?;
    let (r1, _) = family_rhos(fam);
    let q = (fam.p1 + fam.p2()) / (2.0 * fam.p1);
    let t = ((1.0 + r1) / (1.0 - r1)).sqrt() * std_cdf_inv(q)?;
    Ok((t, s_value(fam, f64::NEG_INFINITY, t)))
}

/// Where the maximum of s is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Argmax {
    Interior {
        t1: f64,
        t2: f64,
    },
    Boundary {
        t2: f64,
    },
    /// t1 = −∞, t2 = +∞: only the middle configuration is satisfied.
    Corner,
}

impl Argmax {
    /// (f(−b), f(b)).
    pub fn thresholds(&self) -> (f64, f64) {
        match *self {
            Argmax::Interior { t1, t2 } => (t1, t2),
            Argmax::Boundary { t2 } => (f64::NEG_INFINITY, t2),
            Argmax::Corner => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub ratio: f64,
    pub soundness: f64,
    pub completeness: f64,
    pub t0: f64,
    pub argmax: Argmax,
}

/// The best ratio any single threshold function reaches on the family.
pub fn family_upper_bound(fam: &SymmetricFamily) -> Result<UpperBound> {
    let (t0, s_max) = critical_point(fam)?;
    let (t_star, s_bd) = boundary_max(fam)?;
    let corner = fam.p2();
    let (soundness, argmax) = if s_max >= s_bd && s_max >= corner {
        (s_max, Argmax::Interior { t1: -t0, t2: t0 })
    } else if s_bd >= corner {
        (s_bd, Argmax::Boundary { t2: t_star })
    } else {
        (corner, Argmax::Corner)
    };
    let completeness = fam.completeness();
    Ok(UpperBound {
        ratio: soundness / completeness,
        soundness,
        completeness,
        t0,
        argmax,
    })
}

/// The threshold function with value t1 on [−1, −b] and t2 on [b, 1],
/// linear in between.
pub fn witness_function(fam: &SymmetricFamily, t1: f64, t2: f64) -> Result<ThresholdFunction> {
    let grid = ControlGrid::new(vec![-1.0, -fam.b, fam.b, 1.0])?;
    ThresholdFunction::new(grid, vec![t1, t1, t2, t2])
}

/// Samples s on a `n1` × `n2` grid over [t1lo, t1hi] × [t2lo, t2hi],
/// row-major in t1.
pub fn contour(
    fam: &SymmetricFamily,
    t1: (f64, f64),
    t2: (f64, f64),
    n1: usize,
    n2: usize,
) -> Vec<(f64, f64, f64)> {
    let at = |(lo, hi): (f64, f64), n: usize, i: usize| {
        if n <= 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        let x = at(t1, n1, i);
        for j in 0..n2 {
            let y = at(t2, n2, j);
            out.push((x, y, s_value(fam, x, y)));
        }
    }
    out
}

/// CSV with header `t1,t2,value`.
pub fn contour_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut s = String::from("t1,t2,value\n");
    for (a, b, v) in rows {
        s.push_str(&format!("{a},{b},{v}\n"));
    }
    s
}

/// A distribution whose configurations share a few distinct bias values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasClassDistribution {
    pub bias_values: Vec<f64>,
    /// (class of b1, class of b2, ρ, weight).
    pub entries: Vec<(usize, usize, f64, f64)>,
}

impl BiasClassDistribution {
    /// Groups biases that agree to within 1e−12.
    pub fn from_distribution(d: &ConfigDistribution) -> Self {
        let mut values: Vec<f64> = d.iter().flat_map(|(c, _)| [c.b1, c.b2]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        let class = |x: f64| {
            values
                .iter()
                .position(|v| (v - x).abs() <= 1e-12)
                .expect("bias collected above")
        };
        let entries = d
            .iter()
            .map(|(c, w)| {
                let rho = if c.b1.abs() >= 1.0 || c.b2.abs() >= 1.0 {
                    0.0
                } else {
                    c.rho
                };
                (class(c.b1), class(c.b2), rho, *w)
            })
            .collect();
        Self {
            bias_values: values,
            entries,
        }
    }

    pub fn completeness(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, rho, w)| {
                let c = Configuration {
                    b1: self.bias_values[i],
                    b2: self.bias_values[j],
                    rho,
                };
                w * c.completeness()
            })
            .sum()
    }

    /// Expected soundness with threshold `t[k]` at bias class k.
    pub fn soundness(&self, t: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, rho, w)| w * binorm_cdf(t[i], -t[j], -rho))
            .sum()
    }

    fn soundness_gradient(&self, t: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; t.len()];
        for &(i, j, rho, w) in &self.entries {
            let (d1, d2) = threshold_partials(t[i], -t[j], -rho);
            g[i] += w * d1;
            g[j] -= w * d2;
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub ratio: f64,
    pub soundness: f64,
    pub completeness: f64,
    /// (bias value, threshold) per class, thresholds possibly infinite.
    pub thresholds: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Finite,
    Pos,
    Neg,
}

/// Maps free parameters to one threshold per bias class. In odd mode the
/// parameters live on the positive biases and t(−b) = −t(b), t(0) = 0.
struct Layout {
    /// (parameter index, sign) per class; `None` pins the class at 0.
    map: Vec<Option<(usize, f64)>>,
    n_free: usize,
}

impl Layout {
    fn new(values: &[f64], odd: bool) -> Self {
        if !odd {
            return Self {
                map: (0..values.len()).map(|k| Some((k, 1.0))).collect(),
                n_free: values.len(),
            };
        }
        let mut mags: Vec<f64> = values
            .iter()
            .map(|v| v.abs())
            .filter(|v| *v > 1e-12)
            .collect();
        mags.sort_by(f64::total_cmp);
        mags.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        let map = values
            .iter()
            .map(|&v| {
                if v.abs() <= 1e-12 {
                    None
                } else {
                    let k = mags
                        .iter()
                        .position(|m| (m - v.abs()).abs() <= 1e-12)
                        .unwrap();
                    Some((k, v.signum()))
                }
            })
            .collect();
        Self {
            map,
            n_free: mags.len(),
        }
    }

    fn expand(&self, u: &[f64]) -> Vec<f64> {
        self.map
            .iter()
            .map(|m| match m {
                None => 0.0,
                Some((k, s)) => s * u[*k],
            })
            .collect()
    }

    fn pull_back(&self, g: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_free];
        for (gk, m) in g.iter().zip(&self.map) {
            if let Some((k, s)) = m {
                out[*k] += s * gk;
            }
        }
        out
    }
}

/// Local maximization of soundness over the finite slots of `pattern`,
/// from `start`. Returns the full parameter vector and its soundness.
fn climb(
    d: &BiasClassDistribution,
    layout: &Layout,
    pattern: &[Slot],
    start: &[f64],
) -> (Vec<f64>, f64) {
    let free: Vec<usize> = (0..pattern.len())
        .filter(|&k| pattern[k] == Slot::Finite)
        .collect();
    let fill = |x: &[f64]| -> Vec<f64> {
        let mut u: Vec<f64> = pattern
            .iter()
            .map(|s| match s {
                Slot::Pos => f64::INFINITY,
                Slot::Neg => f64::NEG_INFINITY,
                Slot::Finite => 0.0,
            })
            .collect();
        for (xi, &k) in x.iter().zip(&free) {
            u[k] = *xi;
        }
        u
    };
    let value = |x: &[f64]| -d.soundness(&layout.expand(&fill(x)));
    if free.is_empty() {
        let u = fill(&[]);
        let v = d.soundness(&layout.expand(&u));
        return (u, v);
    }
    let grad = |x: &[f64]| -> Vec<f64> {
        let u = fill(x);
        let g = layout.pull_back(&d.soundness_gradient(&layout.expand(&u)));
        free.iter().map(|&k| -g[k]).collect()
    };
    let x0: Vec<f64> = free.iter().map(|&k| start[k]).collect();
    let lower = vec![-SEARCH_CAP; free.len()];
    let upper = vec![SEARCH_CAP; free.len()];
    let (x, v) = projected_descent(value, grad, x0, &lower, &upper, 500);
    (fill(&x), -v)
}

fn patterns(n: usize) -> Vec<Vec<Slot>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                [Slot::Finite, Slot::Pos, Slot::Neg]
                    .into_iter()
                    .map(move |s| {
                        let mut q = p.clone();
                        q.push(s);
                        q
                    })
            })
            .collect();
    }
    out
}

/// Best ratio of a single threshold function on `d`: every assignment of
/// {finite, +∞, −∞} to the bias classes is tried (up to eight classes),
/// finite slots by local ascent from zero, plus `restarts` random starts
/// with all slots finite.
pub fn max_ratio_search(
    d: &ConfigDistribution,
    odd: bool,
    restarts: usize,
    seed: u64,
) -> Result<SearchResult> {
    let classes = BiasClassDistribution::from_distribution(d);
    let completeness = classes.completeness();
    if !(completeness > 0.0) {
        return domain("distribution has no completeness");
    }
    let layout = Layout::new(&classes.bias_values, odd);
    let n = layout.n_free;
    let all: Vec<Vec<Slot>> = if n <= MAX_ENUM_CLASSES {
        patterns(n)
    } else {
        let mut v = vec![vec![Slot::Finite; n]];
        v.push(vec![Slot::Pos; n]);
        v.push(vec![Slot::Neg; n]);
        v
    };
    let zero = vec![0.0; n];
    let mut jobs: Vec<(Vec<Slot>, Vec<f64>)> = all.into_iter().map(|p| (p, zero.clone())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let start: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        jobs.push((vec![Slot::Finite; n], start));
    }
    let best = jobs
        .par_iter()
        .map(|(p, s)| climb(&classes, &layout, p, s))
        .reduce_with(|a, b| if b.1 > a.1 { b } else { a })
        .expect("at least one pattern");
    let t = layout.expand(&best.0);
    Ok(SearchResult {
        ratio: best.1 / completeness,
        soundness: best.1,
        completeness,
        thresholds: classes.bias_values.iter().copied().zip(t).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{bundled, relative_bias};
    use crate::scheme::{ratio, scheme_soundness, ThreshScheme};

    #[test]
    fn rhos() {
        let fam = SymmetricFamily::new(0.5, -0.5, 0.4).unwrap();
        assert!((family_rhos(&fam).0 + 1.0 / 3.0).abs() < 1e-15);
        let (r1, r2) = family_rhos(&SymmetricFamily::dicut());
        let b: f64 = 0.1757079776;
        assert!((r1 - (-1.0 + 2.0 * b - b * b) / (1.0 - b * b)).abs() < 1e-15);
        assert!((r1 + 0.7011).abs() < 1e-4);
        assert!(r1 < 0.0 && r2 < 0.0);
        let c = SymmetricFamily::dicut().distribution().unwrap();
        let e = c.entries();
        assert!((relative_bias(e[0].0.b1, e[0].0.b2, e[0].0.pairwise_bias()) - r1).abs() < 1e-12);
        assert!((e[1].0.rho - r2).abs() < 1e-12);
        assert!(SymmetricFamily::new(0.5, -0.2, 0.4).is_err());
    }

    #[test]
    fn s_corners_and_consistency() {
        let fam = SymmetricFamily::dicut();
        let (inf, ninf) = (f64::INFINITY, f64::NEG_INFINITY);
        assert!((s_value(&fam, ninf, inf) - fam.p2()).abs() < 1e-15);
        for (a, b) in [(inf, inf), (ninf, ninf), (inf, ninf)] {
            assert!(s_value(&fam, a, b).abs() < 1e-15);
        }
        let d = fam.distribution().unwrap();
        for &(t1, t2) in &[(-0.3, 0.2), (0.1, 0.5), (-1.0, -0.4)] {
            let s = ThreshScheme::single(witness_function(&fam, t1, t2).unwrap());
            let direct: f64 = d.iter().map(|(c, w)| w * scheme_soundness(c, &s)).sum();
            assert!((direct - s_value(&fam, t1, t2)).abs() < 1e-12);
            // the family is closed under the flip
            assert!((s_value(&fam, t1, t2) - s_value(&fam, -t2, -t1)).abs() < 1e-14);
        }
    }

    #[test]
    fn g_shape() {
        let fam = SymmetricFamily::dicut();
        // Φ(0) = 1/2 leaves only the middle term
        assert!((g_value(&fam, 0.0) + 0.5 * fam.p2()).abs() < 1e-15);
        assert!(g_value(&fam, 0.0) < 0.0);
        assert!((g_value(&fam, -40.0) - (fam.p1 - fam.p2())).abs() < 1e-12);
        let mut changes = 0;
        let mut prev = g_value(&fam, -10.0);
        for k in 1..=10_000 {
            let v = g_value(&fam, -10.0 + 1e-3 * k as f64);
            if (v > 0.0) != (prev > 0.0) {
                changes += 1;
            }
            prev = v;
        }
        assert_eq!(changes, 1);
        let bad = SymmetricFamily::new(0.2, -0.5, 0.3).unwrap();
        assert!(matches!(critical_point(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn dicut_bound() {
        let fam = SymmetricFamily::dicut();
        let ub = family_upper_bound(&fam).unwrap();
        assert!((ub.t0 - 0.1887837358).abs() < 1e-8, "{}", ub.t0);
        assert!((ub.ratio - 0.8746024732).abs() < 1e-8, "{}", ub.ratio);
        assert!(ub.ratio <= 0.87461);
        assert!(ub.ratio >= fam.p2() / fam.completeness());
        let (t_star, s_bd) = boundary_max(&fam).unwrap();
        assert!(s_bd < ub.soundness);
        for k in -20..=20 {
            let t = t_star + 0.05 * k as f64;
            assert!(s_value(&fam, f64::NEG_INFINITY, t) <= s_bd + 1e-15);
        }
        let Argmax::Interior { t1, t2 } = ub.argmax else {
            panic!("interior maximum expected")
        };
        let s = ThreshScheme::single(witness_function(&fam, t1, t2).unwrap());
        let d = fam.distribution().unwrap();
        let via_scheme: f64 = d
            .iter()
            .map(|(c, w)| w * scheme_soundness(c, &s))
            .sum::<f64>()
            / d.completeness();
        assert!((via_scheme - ub.ratio).abs() < 1e-9);
        let _ = ratio;
        let moved = SymmetricFamily {
            b: fam.b + 0.01,
            ..fam
        };
        assert!((family_upper_bound(&moved).unwrap().ratio - ub.ratio).abs() > 1e-6);
        // the distribution's own completeness agrees with the closed form
        assert!((d.completeness() - fam.completeness()).abs() < 1e-12);
    }

    #[test]
    fn contour_peak_at_critical_point() {
        let fam = SymmetricFamily::dicut();
        let (t0, _) = critical_point(&fam).unwrap();
        let rows = contour(&fam, (-1.0, 1.0), (-1.0, 1.0), 201, 201);
        let best = rows
            .iter()
            .copied()
            .fold((0.0, 0.0, f64::MIN), |a, r| if r.2 > a.2 { r } else { a });
        assert!(
            (best.0 + t0).abs() <= 0.01 && (best.1 - t0).abs() <= 0.01,
            "{best:?}"
        );
        assert!(contour_csv(&rows[..2]).starts_with("t1,t2,value\n"));
    }

    #[test]
    fn search_matches_closed_form() {
        let d = bundled::by_name("dicut_pairs1").unwrap();
        let r = max_ratio_search(&d, false, 8, 1).unwrap();
        assert!((r.ratio - 0.8746025).abs() < 1e-6, "{}", r.ratio);
        let d = bundled::by_name("dicut_family").unwrap();
        let r = max_ratio_search(&d, false, 8, 1).unwrap();
        let ub = family_upper_bound(&SymmetricFamily::dicut()).unwrap();
        assert!(
            (r.ratio - ub.ratio).abs() < 1e-9,
            "{} vs {}",
            r.ratio,
            ub.ratio
        );
    }

    #[test]
    fn search_dominates_corners() {
        let d = bundled::by_name("dicut_pairs2").unwrap();
        let classes = BiasClassDistribution::from_distribution(&d);
        let r = max_ratio_search(&d, false, 4, 2).unwrap();
        let n = classes.bias_values.len();
        for mask in 0..(1u32 << n) {
            let t: Vec<f64> = (0..n)
                .map(|k| {
                    if mask >> k & 1 == 1 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect();
            assert!(r.soundness >= classes.soundness(&t) - 1e-15);
        }
    }
}
