//! Certified verification that a scheme reaches ratio α on every valid
//! configuration above a completeness floor.
//!
//! The margin E_f[soundness] − α·completeness is enclosed over boxes in
//! (b1, b2, ρ) space. Boxes with a nonnegative enclosure are done, boxes with
//! no valid point are skipped and the rest are split along their widest side.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{completeness, rho_range, ConfigBox, Configuration};
use crate::error::{domain, Error, Result};
use crate::interval::{down, iv_binorm_cdf, iv_binorm_partials, up, Interval};
use crate::scheme::{scheme_soundness, ThreshScheme};

/// Mean-value enclosures are only attempted when every |b| and |ρ| stays
/// below this.
const SMOOTH_LIMIT: f64 = 0.999;

/// Limits on the size of a verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_boxes: u64,
    pub max_depth: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_boxes: 10_000_000,
            max_depth: 60,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyJob {
    pub scheme: ThreshScheme,
    pub alpha: f64,
    pub floor: f64,
    pub region: ConfigBox,
    pub budget: Budget,
}

impl VerifyJob {
    pub fn new(
        scheme: ThreshScheme,
        alpha: f64,
        floor: f64,
        region: ConfigBox,
        budget: Budget,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return domain(format!("alpha {alpha} not in (0, 1)"));
        }
        if !(floor > 0.0) {
            return domain(format!("floor {floor} must be positive"));
        }
        let region = ConfigBox::new(region.b1, region.b2, region.rho)?;
        Ok(Self {
            scheme,
            alpha,
            floor,
            region,
            budget,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Counterexample,
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub b1: f64,
    pub b2: f64,
    pub rho: f64,
    pub ratio: f64,
}

impl Counterexample {
    pub fn config(&self) -> Configuration {
        Configuration {
            b1: self.b1,
            b2: self.b2,
            rho: self.rho,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub verdict: Verdict,
    pub alpha: f64,
    pub floor: f64,
    /// Boxes processed.
    pub boxes: u64,
    /// Deepest recursion level reached.
    pub depth: u32,
    pub seconds: f64,
    /// Boxes left undecided when the budget ran out.
    #[serde(default)]
    pub frontier: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Counterexample>,
}

/// Encloses √(min(p, q)/max(p, q)) for p ∈ `p`, q ∈ `q`, both nonnegative.
/// A 0/0 ratio counts as 1.
fn ratio_root(p: Interval, q: Interval) -> Interval {
    let (p, q) = (
        p.clamp_to(0.0, f64::INFINITY),
        q.clamp_to(0.0, f64::INFINITY),
    );
    let quot_lo = |a: f64, b: f64| if b > 0.0 { down(a / b) } else { f64::INFINITY };
    let quot_hi = |a: f64, b: f64| if b > 0.0 { up(a / b) } else { f64::INFINITY };
    let mut lo = quot_lo(p.lo(), q.hi())
        .min(quot_lo(q.lo(), p.hi()))
        .min(1.0);
    if p.hi() == 0.0 && q.hi() == 0.0 {
        lo = 1.0;
    }
    let hi = quot_hi(p.hi(), q.lo())
        .min(quot_hi(q.hi(), p.lo()))
        .min(1.0);
    Interval::new(down(lo.max(0.0).sqrt()).max(0.0), up(hi.sqrt()).min(1.0))
}

/// Enclosures of the upper and (negated) lower ends of the valid ρ range
/// over a bias box.
fn rho_band(b1: Interval, b2: Interval) -> (Interval, Interval) {
    let (m1, p1) = (1.0 - b1, 1.0 + b1);
    let (m2, p2) = (1.0 - b2, 1.0 + b2);
    let hi = ratio_root(m1 * p2, p1 * m2);
    let neg_lo = ratio_root(m1 * m2, p1 * p2);
    (hi, neg_lo)
}

/// The box with ρ cut down to the range that can be valid somewhere in it,
/// or `None` when nothing is left.
fn restrict(region: &ConfigBox) -> Option<ConfigBox> {
    let (hi, neg_lo) = rho_band(region.b1, region.b2);
    let rho = region
        .rho
        .intersect(&Interval::new(-neg_lo.hi(), hi.hi()))?;
    Some(ConfigBox { rho, ..*region })
}

/// Encloses √((1 − b1²)(1 − b2²)).
fn iv_scale(b1: Interval, b2: Interval) -> Interval {
    let prod = ((1.0 - b1) * (1.0 + b1) * (1.0 - b2) * (1.0 + b2)).clamp_to(0.0, 1.0);
    prod.sqrt().expect("nonnegative")
}

/// Encloses completeness ((1 + b1)(1 − b2) − ρ·s)/4 over the box.
pub fn iv_completeness(region: &ConfigBox) -> Interval {
    let s = iv_scale(region.b1, region.b2);
    (((1.0 + region.b1) * (1.0 - region.b2) - region.rho * s) * 0.25).clamp_to(0.0, 1.0)
}

/// Conservative: false only if the box certainly holds no valid
/// configuration with completeness at least `floor`.
pub fn box_has_valid(region: &ConfigBox, floor: f64) -> bool {
    match restrict(region) {
        None => false,
        Some(r) => iv_completeness(&r).hi() >= floor,
    }
}

/// True only if every point of the box satisfies the triangle inequalities.
pub fn box_all_valid(region: &ConfigBox) -> bool {
    let (hi, neg_lo) = rho_band(region.b1, region.b2);
    region.rho.hi() <= hi.lo() && -region.rho.lo() <= neg_lo.lo()
}

fn mix_weights(s: &ThreshScheme) -> (Interval, Interval) {
    let mix = Interval::point(s.independent_mix());
    (1.0 - mix, mix * 0.25)
}

/// Naive enclosure of the scheme soundness over a box.
fn iv_soundness(region: &ConfigBox, s: &ThreshScheme) -> Interval {
    let (keep, indep) = mix_weights(s);
    let neg_rho = -region.rho;
    let mut sum = Interval::ZERO;
    for (f, &p) in s.functions().iter().zip(s.probs()) {
        if p <= 0.0 {
            continue;
        }
        let t1 = f.eval_interval(region.b1);
        let t2 = -f.eval_interval(region.b2);
        sum = sum + iv_binorm_cdf(t1, t2, neg_rho) * p;
    }
    (keep * sum.clamp_to(0.0, 1.0) + indep).clamp_to(0.0, 1.0)
}

fn naive_margin(region: &ConfigBox, s: &ThreshScheme, alpha: f64) -> Interval {
    iv_soundness(region, s) - iv_completeness(region) * alpha
}

fn is_smooth(region: &ConfigBox) -> bool {
    [region.b1, region.b2, region.rho]
        .iter()
        .all(|iv| iv.mag() <= SMOOTH_LIMIT)
}

/// Enclosures of the partial derivatives of the margin in (b1, b2, ρ).
/// `None` near the edges of the cube, where they blow up.
pub fn margin_gradient(region: &ConfigBox, s: &ThreshScheme, alpha: f64) -> Option<[Interval; 3]> {
    if !is_smooth(region) {
        return None;
    }
    let (b1, b2, rho) = (region.b1, region.b2, region.rho);
    let (keep, _) = mix_weights(s);
    let mut g = [Interval::ZERO; 3];
    for (f, &p) in s.functions().iter().zip(s.probs()) {
        if p <= 0.0 || f.values()[0].is_infinite() {
            // constant infinite thresholds have constant soundness
            continue;
        }
        let t1 = f.eval_interval(b1);
        let t2 = -f.eval_interval(b2);
        let d = iv_binorm_partials(t1, t2, -rho).ok()?;
        g[0] = g[0] + d.d_t1 * f.slope_interval(b1) * p;
        g[1] = g[1] - d.d_t2 * f.slope_interval(b2) * p;
        g[2] = g[2] - d.d_rho * p;
    }
    for v in &mut g {
        *v = keep * *v;
    }
    let one1 = (1.0 - b1) * (1.0 + b1);
    let one2 = (1.0 - b2) * (1.0 + b2);
    let r21 = one2
        .div(one1)
        .ok()?
        .clamp_to(0.0, f64::INFINITY)
        .sqrt()
        .ok()?;
    let r12 = one1
        .div(one2)
        .ok()?
        .clamp_to(0.0, f64::INFINITY)
        .sqrt()
        .ok()?;
    let dc = [
        ((1.0 - b2) + rho * b1 * r21) * 0.25,
        (-(1.0 + b1) + rho * b2 * r12) * 0.25,
        -(iv_scale(b1, b2) * 0.25),
    ];
    for i in 0..3 {
        g[i] = g[i] - dc[i] * alpha;
    }
    Some(g)
}

/// Certified enclosure of E_f[soundness] − α·completeness over the valid
/// configurations in `region`.
pub fn margin(region: &ConfigBox, s: &ThreshScheme, alpha: f64) -> Interval {
    let Some(r) = restrict(region) else {
        // no valid point at all; any enclosure is vacuously correct
        return Interval::ZERO;
    };
    let naive = naive_margin(&r, s, alpha);
    if r.max_width() == 0.0 {
        return naive;
    }
    let Some(g) = margin_gradient(&r, s, alpha) else {
        return naive;
    };
    let c = r.center();
    let at_c = naive_margin(&ConfigBox::point(&c), s, alpha);
    let mut mv = at_c;
    for (gi, (iv, ci)) in g.iter().zip([(r.b1, c.b1), (r.b2, c.b2), (r.rho, c.rho)]) {
        mv = mv + *gi * (iv - ci);
    }
    naive.intersect(&mv).unwrap_or(naive)
}

/// Collapses every coordinate along which the margin is certified monotone
/// to its minimizing end. The box must be entirely valid.
pub fn prune_by_derivative(region: &ConfigBox, s: &ThreshScheme, alpha: f64) -> Result<ConfigBox> {
    if !box_all_valid(region) {
        return Err(Error::Precondition("box is not entirely valid".into()));
    }
    let Some(g) = margin_gradient(region, s, alpha) else {
        return Ok(*region);
    };
    let mut out = *region;
    for (axis, gi) in [
        crate::config::Axis::B1,
        crate::config::Axis::B2,
        crate::config::Axis::Rho,
    ]
    .into_iter()
    .zip(g)
    {
        let iv = region.get(axis);
        if gi.lo() >= 0.0 {
            out = out.with(axis, Interval::point(iv.lo()));
        } else if gi.hi() <= 0.0 {
            out = out.with(axis, Interval::point(iv.hi()));
        }
    }
    Ok(out)
}

/// Moves `c` onto the valid set above `floor` by clamping ρ, if possible.
fn project(c: Configuration, floor: f64) -> Option<Configuration> {
    let (lo, hi) = rho_range(c.b1, c.b2, floor)?;
    Some(Configuration {
        rho: c.rho.clamp(lo, hi),
        ..c
    })
}

/// A configuration in the box that is valid, above the floor and has a
/// certified negative margin.
fn certify_point(c: Configuration, job: &VerifyJob) -> Option<Counterexample> {
    let c = project(c, job.floor)?;
    if !job.region.contains(&c) || !c.is_valid() || completeness(&c) < job.floor {
        return None;
    }
    let float = scheme_soundness(&c, &job.scheme) - job.alpha * completeness(&c);
    if !(float < 0.0) {
        return None;
    }
    let m = margin(&ConfigBox::point(&c), &job.scheme, job.alpha);
    (m.hi() < 0.0).then(|| Counterexample {
        b1: c.b1,
        b2: c.b2,
        rho: c.rho,
        ratio: crate::scheme::ratio(&c, &job.scheme),
    })
}

fn witness_in(region: &ConfigBox, job: &VerifyJob) -> Option<Counterexample> {
    let c = region.center();
    let mut candidates = vec![c];
    for &b1 in &[region.b1.lo(), region.b1.hi()] {
        for &b2 in &[region.b2.lo(), region.b2.hi()] {
            for &rho in &[region.rho.lo(), region.rho.hi()] {
                candidates.push(Configuration { b1, b2, rho });
            }
        }
    }
    candidates.into_iter().find_map(|p| certify_point(p, job))
}

struct Shared<'a> {
    used: &'a AtomicU64,
    stop: &'a AtomicBool,
}

struct Outcome {
    verdict: Verdict,
    boxes: u64,
    depth: u32,
    frontier: u64,
    counterexample: Option<Counterexample>,
}

fn check_box(root: ConfigBox, job: &VerifyJob, shared: &Shared) -> Outcome {
    let mut out = Outcome {
        verdict: Verdict::Certified,
        boxes: 0,
        depth: 0,
        frontier: 0,
        counterexample: None,
    };
    let mut stack = vec![(root, 0u32)];
    while let Some((b, depth)) = stack.pop() {
        if shared.stop.load(Ordering::Relaxed) {
            out.verdict = Verdict::BudgetExhausted;
            out.frontier += 1 + stack.len() as u64;
            return out;
        }
        if shared.used.fetch_add(1, Ordering::Relaxed) >= job.budget.max_boxes {
            shared.stop.store(true, Ordering::Relaxed);
            out.verdict = Verdict::BudgetExhausted;
            out.frontier += 1 + stack.len() as u64;
            return out;
        }
        out.boxes += 1;
        out.depth = out.depth.max(depth);
        if !box_has_valid(&b, job.floor) {
            continue;
        }
        let mut b = restrict(&b).expect("box has valid points");
        if box_all_valid(&b) {
            b = prune_by_derivative(&b, &job.scheme, job.alpha).expect("checked valid");
        }
        let m = margin(&b, &job.scheme, job.alpha);
        if m.lo() >= 0.0 {
            continue;
        }
        if let Some(cx) = witness_in(&b, job) {
            shared.stop.store(true, Ordering::Relaxed);
            out.verdict = Verdict::Counterexample;
            out.counterexample = Some(cx);
            return out;
        }
        if depth >= job.budget.max_depth || b.max_width() == 0.0 {
            out.verdict = Verdict::BudgetExhausted;
            out.frontier += 1;
            continue;
        }
        let (x, y) = b.split();
        stack.push((y, depth + 1));
        stack.push((x, depth + 1));
    }
    out
}

fn report(job: &VerifyJob, outcomes: Vec<Outcome>, start: Instant) -> VerifyReport {
    let mut rep = VerifyReport {
        verdict: Verdict::Certified,
        alpha: job.alpha,
        floor: job.floor,
        boxes: 0,
        depth: 0,
        seconds: 0.0,
        frontier: 0,
        counterexample: None,
    };
    for o in outcomes {
        rep.boxes += o.boxes;
        rep.depth = rep.depth.max(o.depth);
        rep.frontier += o.frontier;
        match o.verdict {
            Verdict::Counterexample => {
                if rep.counterexample.is_none() {
                    rep.counterexample = o.counterexample;
                }
                rep.verdict = Verdict::Counterexample;
            }
            Verdict::BudgetExhausted if rep.verdict == Verdict::Certified => {
                rep.verdict = Verdict::BudgetExhausted;
            }
            _ => {}
        }
    }
    rep.seconds = start.elapsed().as_secs_f64();
    rep
}

/// Algorithm-3 style divide and conquer over the job's region, single
/// threaded.
pub fn check_ratio(job: &VerifyJob) -> VerifyReport {
    let start = Instant::now();
    let (used, stop) = (AtomicU64::new(0), AtomicBool::new(false));
    let shared = Shared {
        used: &used,
        stop: &stop,
    };
    let o = check_box(job.region, job, &shared);
    report(job, vec![o], start)
}

/// Splits the region into `top_split`³ boxes and checks them on `workers`
/// threads. The box budget is shared.
pub fn run_verification(job: &VerifyJob, workers: usize, top_split: usize) -> Result<VerifyReport> {
    use rayon::prelude::*;
    if workers == 0 {
        return domain("workers must be at least 1");
    }
    if top_split == 0 {
        return domain("top_split must be at least 1");
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let (used, stop) = (AtomicU64::new(0), AtomicBool::new(false));
    let boxes = job.region.grid(top_split);
    let outcomes: Vec<Outcome> = pool.install(|| {
        boxes
            .par_iter()
            .map(|b| {
                let shared = Shared {
                    used: &used,
                    stop: &stop,
                };
                check_box(*b, job, &shared)
            })
            .collect()
    });
    Ok(report(job, outcomes, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{rho_bounds, Axis};
    use crate::scheme::{bundled, ThresholdFunction};

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b)
    }

    fn cfg(b1: f64, b2: f64, rho: f64) -> Configuration {
        Configuration { b1, b2, rho }
    }

    #[test]
    fn band_encloses_float_bounds() {
        let mut k = 0;
        for i in -10..=10 {
            for j in -10..=10 {
                let (b1, b2) = (0.1 * i as f64, 0.1 * j as f64);
                let (lo, hi) = rho_bounds(b1, b2);
                let (h, n) = rho_band(Interval::point(b1), Interval::point(b2));
                assert!(h.contains(hi), "{b1} {b2}: {h} vs {hi}");
                assert!(n.contains(-lo), "{b1} {b2}: {n} vs {lo}");
                let boxed = rho_band(
                    iv(b1 - 0.03, b1 + 0.02).clamp_to(-1.0, 1.0),
                    iv(b2, b2 + 0.05).clamp_to(-1.0, 1.0),
                );
                assert!(boxed.0.contains(hi) && boxed.1.contains(-lo));
                k += 1;
            }
        }
        assert_eq!(k, 441);
    }

    #[test]
    fn validity_examples() {
        let point = ConfigBox::point(&cfg(0.2, -0.1, -0.3));
        assert!(box_has_valid(&point, 1e-3));
        assert!(box_has_valid(&ConfigBox::full(), 1e-6));
        let near_one =
            ConfigBox::new(Interval::point(0.3), Interval::point(0.3), iv(0.999, 1.0)).unwrap();
        assert!(!box_has_valid(&near_one, 1e-2));
        // ρ above every valid bound for these biases
        let outside = ConfigBox::new(iv(0.5, 0.6), iv(-0.6, -0.5), iv(0.9, 1.0)).unwrap();
        assert!(!box_has_valid(&outside, 1e-6));
        assert!(box_all_valid(
            &ConfigBox::new(iv(0.0, 0.1), iv(0.0, 0.1), iv(-0.2, 0.2)).unwrap()
        ));
        assert!(!box_all_valid(&ConfigBox::full()));
    }

    #[test]
    fn independent_margin_arithmetic() {
        let s = ThreshScheme::independent();
        // completeness of (b1, −b1, −1) is (1 + b1)²/4... choose a box with completeness in [0.9, 1]
        let b = ConfigBox::new(iv(0.9, 0.9), iv(-0.9, -0.9), iv(-1.0, -1.0)).unwrap();
        let c = iv_completeness(&b);
        assert!(c.lo() > 0.9 && c.hi() <= 1.0);
        let m = margin(&b, &s, 0.25);
        let want_lo = 0.25 - 0.25 * c.hi();
        assert!(m.lo() <= want_lo && m.lo() >= -1e-12, "{m}");
        assert!(m.hi() <= 0.025 + 1e-12);
    }

    #[test]
    fn point_margin_matches_float() {
        let s = bundled::dicut7();
        for c in [
            cfg(0.1757, 0.1757, -0.6),
            cfg(-0.3, 0.2, 0.1),
            cfg(0.5, -0.4, -0.2),
        ] {
            let float = scheme_soundness(&c, &s) - 0.87 * completeness(&c);
            let m = margin(&ConfigBox::point(&c), &s, 0.87);
            assert!(m.contains(float), "{c:?}: {m} vs {float}");
            assert!(m.width() < 1e-10, "{m}");
        }
    }

    #[test]
    fn box_margin_contains_samples() {
        use rand::{Rng, SeedableRng};
        let s = bundled::and3();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let (b1, b2, r) = (
                rng.random_range(-0.95..0.9),
                rng.random_range(-0.95..0.9),
                rng.random_range(-0.95..0.9),
            );
            let w = rng.random_range(0.001..0.05);
            let b = ConfigBox::new(iv(b1, b1 + w), iv(b2, b2 + w), iv(r, r + w)).unwrap();
            let m = margin(&b, &s, 0.874);
            for _ in 0..100 {
                let c = cfg(
                    b1 + w * rng.random::<f64>(),
                    b2 + w * rng.random::<f64>(),
                    r + w * rng.random::<f64>(),
                );
                let (lo, hi) = rho_bounds(c.b1, c.b2);
                if c.rho < lo || c.rho > hi {
                    continue;
                }
                let v = scheme_soundness(&c, &s) - 0.874 * completeness(&c);
                assert!(m.contains(v), "{b:?} {c:?}: {m} vs {v}");
            }
        }
    }

    #[test]
    fn gradient_encloses_finite_differences() {
        let s = bundled::dicut7();
        let b = ConfigBox::new(iv(0.15, 0.17), iv(0.12, 0.14), iv(-0.62, -0.6)).unwrap();
        let g = margin_gradient(&b, &s, 0.87).unwrap();
        let m = |c: Configuration| scheme_soundness(&c, &s) - 0.87 * completeness(&c);
        let c = b.center();
        let h = 1e-6;
        let fd = [
            (m(cfg(c.b1 + h, c.b2, c.rho)) - m(cfg(c.b1 - h, c.b2, c.rho))) / (2.0 * h),
            (m(cfg(c.b1, c.b2 + h, c.rho)) - m(cfg(c.b1, c.b2 - h, c.rho))) / (2.0 * h),
            (m(cfg(c.b1, c.b2, c.rho + h)) - m(cfg(c.b1, c.b2, c.rho - h))) / (2.0 * h),
        ];
        for i in 0..3 {
            assert!(
                g[i].lo() - 1e-6 <= fd[i] && fd[i] <= g[i].hi() + 1e-6,
                "{i}: {} vs {}",
                g[i],
                fd[i]
            );
        }
    }

    #[test]
    fn prune_monotone_and_straddling() {
        let s = ThreshScheme::independent();
        // soundness is constant, margin = 1/4 − α·C, and ∂C/∂b1 > 0 here
        let b = ConfigBox::new(iv(0.1, 0.2), iv(0.0, 0.05), iv(-0.1, 0.1)).unwrap();
        let p = prune_by_derivative(&b, &s, 0.5).unwrap();
        assert_eq!(p.b1, Interval::point(0.2));
        // ∂C/∂ρ = −s/4 < 0, so the margin increases in ρ
        assert_eq!(p.rho, Interval::point(-0.1));
        let f = ThresholdFunction::constant(0.0);
        let single = ThreshScheme::single(f);
        let wide = ConfigBox::new(iv(-0.1, 0.1), iv(-0.1, 0.1), iv(-0.1, 0.1)).unwrap();
        let q = prune_by_derivative(&wide, &single, 0.0).unwrap();
        assert_eq!(q.b1, wide.b1, "soundness of the zero function ignores b1");
        assert!(prune_by_derivative(&ConfigBox::full(), &s, 0.5).is_err());
        let _ = Axis::B1;
    }

    fn job(
        s: ThreshScheme,
        alpha: f64,
        floor: f64,
        region: ConfigBox,
        max_boxes: u64,
    ) -> VerifyJob {
        VerifyJob::new(
            s,
            alpha,
            floor,
            region,
            Budget {
                max_boxes,
                max_depth: 60,
            },
        )
        .unwrap()
    }

    #[test]
    fn infinite_threshold_counterexample() {
        let s = ThreshScheme::single(ThresholdFunction::constant(f64::INFINITY));
        let j = job(s, 0.5, 0.1, ConfigBox::full(), 100_000);
        let r = check_ratio(&j);
        assert_eq!(r.verdict, Verdict::Counterexample);
        let cx = r.counterexample.unwrap();
        let c = cx.config();
        assert!(c.is_valid() && completeness(&c) >= 0.1);
        assert!(margin(&ConfigBox::point(&c), &j.scheme, 0.5).hi() < 0.0);
    }

    #[test]
    fn point_region_certifies_quickly() {
        let b = 0.1757079776;
        let c = Configuration::from_pairwise(b, -b, -0.6876930116).unwrap();
        let j = job(bundled::dicut7(), 0.8744, 1e-3, ConfigBox::point(&c), 10);
        let r = check_ratio(&j);
        assert_eq!(r.verdict, Verdict::Certified);
        assert!(r.depth <= 1);
    }

    #[test]
    fn small_region_and_worker_independence() {
        let region = ConfigBox::new(iv(0.15, 0.2), iv(0.15, 0.2), iv(-0.75, -0.65)).unwrap();
        let j = job(bundled::dicut7(), 0.87, 0.05, region, 1_000_000);
        let one = check_ratio(&j);
        assert_eq!(one.verdict, Verdict::Certified);
        let a = run_verification(&j, 1, 2).unwrap();
        let b = run_verification(&j, 3, 2).unwrap();
        assert_eq!(a.verdict, Verdict::Certified);
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.boxes, b.boxes);
        let too_high = job(bundled::dicut7(), 0.88, 0.05, region, 1_000_000);
        assert_eq!(
            run_verification(&too_high, 2, 2).unwrap().verdict,
            Verdict::Counterexample
        );
        let tiny = job(bundled::dicut7(), 0.8745, 0.05, region, 5);
        assert_eq!(check_ratio(&tiny).verdict, Verdict::BudgetExhausted);
    }

    #[test]
    fn job_validation_and_json() {
        let s = ThreshScheme::independent();
        assert!(VerifyJob::new(s.clone(), 1.0, 0.1, ConfigBox::full(), Budget::default()).is_err());
        assert!(VerifyJob::new(s.clone(), 0.5, 0.0, ConfigBox::full(), Budget::default()).is_err());
        let r = check_ratio(
            &VerifyJob::new(s, 0.2, 0.1, ConfigBox::full(), Budget::default()).unwrap(),
        );
        assert_eq!(r.verdict, Verdict::Certified);
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"verdict\":\"certified\"") && !text.contains("counterexample"));
    }
}
