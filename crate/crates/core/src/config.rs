//! Configurations `(b1, b2, ρ)` of a single DI-CUT constraint, their
//! validity, completeness and flip symmetry, and weighted distributions of
//! configurations.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, parse_err, Error, Result};
use crate::interval::Interval;

/// Slack allowed on the triangle inequalities.
pub const VALID_TOL: f64 = 1e-12;

/// Weights whose sum is off by more than this are reported when normalized.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// SDP geometry of one constraint: the biases of its two variables and their
/// relative pairwise bias.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub b1: f64,
    pub b2: f64,
    pub rho: f64,
}

impl Configuration {
    pub fn new(b1: f64, b2: f64, rho: f64) -> Result<Self> {
        for (name, v) in [("b1", b1), ("b2", b2), ("rho", rho)] {
            if !(-1.0..=1.0).contains(&v) {
                return domain(format!("{name} = {v} outside [-1, 1]"));
            }
        }
        Ok(Self { b1, b2, rho })
    }

    /// Build from the pairwise bias b12 = v1·v2 instead of ρ.
    pub fn from_pairwise(b1: f64, b2: f64, b12: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&b12) {
            return domain(format!("b12 = {b12} outside [-1, 1]"));
        }
        let rho = relative_bias(b1, b2, b12);
        if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&rho) {
            return domain(format!(
                "b12 = {b12} is not realizable with b1 = {b1}, b2 = {b2} (rho = {rho})"
            ));
        }
        Self::new(b1, b2, rho.clamp(-1.0, 1.0))
    }

    pub fn pairwise_bias(&self) -> f64 {
        pairwise_bias(self)
    }

    pub fn completeness(&self) -> f64 {
        completeness(self)
    }

    pub fn is_valid(&self) -> bool {
        is_valid(self)
    }

    pub fn is_positive(&self) -> bool {
        is_positive(self)
    }

    pub fn flip(&self) -> Configuration {
        flip(self)
    }
}

/// √((1 − b1²)(1 − b2²)), the scale that turns ρ into b12 − b1·b2.
pub fn perp_scale(b1: f64, b2: f64) -> f64 {
    (((1.0 - b1) * (1.0 + b1)) * ((1.0 - b2) * (1.0 + b2)))
        .max(0.0)
        .sqrt()
}

/// b12 = b1·b2 + ρ·√((1 − b1²)(1 − b2²)).
pub fn pairwise_bias(c: &Configuration) -> f64 {
    if c.b1.abs() == 1.0 || c.b2.abs() == 1.0 {
        return c.b1 * c.b2;
    }
    c.b1 * c.b2 + c.rho * perp_scale(c.b1, c.b2)
}

/// ρ = (b12 − b1·b2)/√((1 − b1²)(1 − b2²)), and 0 when a bias is ±1.
pub fn relative_bias(b1: f64, b2: f64, b12: f64) -> f64 {
    let scale = perp_scale(b1, b2);
    if scale == 0.0 {
        0.0
    } else {
        (b12 - b1 * b2) / scale
    }
}

/// (1 + b1 − b2 − b12)/4, the SDP value of the constraint.
pub fn completeness(c: &Configuration) -> f64 {
    (1.0 + c.b1 - c.b2 - pairwise_bias(c)) / 4.0
}

/// The four triangle-inequality slacks (v0 ± v1)·(v0 ± v2) in the order
/// 1−b1−b2+b12, 1+b1−b2−b12, 1−b1+b2−b12, 1+b1+b2+b12.
pub fn triangle_slacks(b1: f64, b2: f64, b12: f64) -> [f64; 4] {
    [
        1.0 - b1 - b2 + b12,
        1.0 + b1 - b2 - b12,
        1.0 - b1 + b2 - b12,
        1.0 + b1 + b2 + b12,
    ]
}

pub fn is_valid(c: &Configuration) -> bool {
    triangle_slacks(c.b1, c.b2, pairwise_bias(c))
        .iter()
        .all(|&s| s >= -VALID_TOL)
}

/// Positive configurations have a nonpositive relative pairwise bias.
pub fn is_positive(c: &Configuration) -> bool {
    c.rho <= 0.0
}

/// Reversing the arc: (b1, b2, ρ) ↦ (−b2, −b1, ρ).
pub fn flip(c: &Configuration) -> Configuration {
    Configuration {
        b1: -c.b2,
        b2: -c.b1,
        rho: c.rho,
    }
}

/// The valid range of ρ at biases (b1, b2). Dividing the triangle
/// inequalities by √((1 − b1²)(1 − b2²)) gives
/// ρ ≤ √(min(p, q)/max(p, q)) with p = (1 − b1)(1 + b2), q = (1 + b1)(1 − b2),
/// and −ρ ≤ √(min(p', q')/max(p', q')) with p' = (1 − b1)(1 − b2),
/// q' = (1 + b1)(1 + b2). Both bounds shrink to 0 as a bias tends to ±1, in
/// line with ρ = 0 at degenerate biases. A 0/0 ratio leaves that side open.
pub fn rho_bounds(b1: f64, b2: f64) -> (f64, f64) {
    let side = |p: f64, q: f64| {
        let (p, q) = (p.max(0.0), q.max(0.0));
        if p == 0.0 && q == 0.0 {
            1.0
        } else {
            (p.min(q) / p.max(q)).sqrt()
        }
    };
    let hi = side((1.0 - b1) * (1.0 + b2), (1.0 + b1) * (1.0 - b2));
    let lo = -side((1.0 - b1) * (1.0 - b2), (1.0 + b1) * (1.0 + b2));
    (lo, hi)
}

/// The range of ρ for which (b1, b2, ρ) lies in [`rho_bounds`] and has
/// completeness at least `floor`, or `None` when empty. Completeness is
/// ((1 + b1)(1 − b2) − ρ·√((1 − b1²)(1 − b2²)))/4, so the floor only caps ρ
/// from above.
pub fn rho_range(b1: f64, b2: f64, floor: f64) -> Option<(f64, f64)> {
    let (lo, mut hi) = rho_bounds(b1, b2);
    let scale = perp_scale(b1, b2);
    let head = (1.0 + b1) * (1.0 - b2) - 4.0 * floor;
    if scale == 0.0 {
        if head < -VALID_TOL {
            return None;
        }
    } else {
        hi = hi.min(head / scale);
    }
    (lo <= hi).then_some((lo, hi))
}

/// A finite probability distribution over configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigDistribution {
    entries: Vec<(Configuration, f64)>,
}

impl ConfigDistribution {
    /// Weights must be nonnegative with a positive sum; they are normalized,
    /// with a warning if the sum is off by more than [`WEIGHT_SUM_TOL`].
    pub fn new(entries: Vec<(Configuration, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return domain("empty configuration distribution");
        }
        if let Some((_, w)) = entries.iter().find(|(_, w)| !(*w >= 0.0) || !w.is_finite()) {
            return domain(format!("invalid weight {w}"));
        }
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            return domain("weights sum to zero");
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            log::warn!("configuration weights sum to {total}; normalizing");
        }
        let entries = entries.into_iter().map(|(c, w)| (c, w / total)).collect();
        Ok(Self { entries })
    }

    pub fn single(c: Configuration) -> Self {
        Self {
            entries: vec![(c, 1.0)],
        }
    }

    pub fn entries(&self) -> &[(Configuration, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Configuration, f64)> {
        self.entries.iter()
    }

    pub fn completeness(&self) -> f64 {
        dist_completeness(self)
    }

    /// Parse the CSV format: a header `weight,b1,b2,rho` or
    /// `weight,b1,b2,b12`, one configuration per row, `#` comments.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(text.as_bytes());
        let header_line = text
            .lines()
            .position(|l| {
                let l = l.trim();
                !l.is_empty() && !l.starts_with('#')
            })
            .map_or(1, |i| i + 1);
        let headers = reader
            .headers()
            .map_err(|e| csv_error(e, header_line))?
            .clone();
        let names: Vec<&str> = headers.iter().collect();
        let pairwise = match names.as_slice() {
            ["weight", "b1", "b2", "rho"] => false,
            ["weight", "b1", "b2", "b12"] => true,
            _ => {
                return parse_err(
                    header_line,
                    format!("expected header weight,b1,b2,rho or weight,b1,b2,b12, got {names:?}"),
                )
            }
        };
        let mut entries = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| csv_error(e, header_line))?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let mut vals = [0.0f64; 4];
            for (i, field) in record.iter().enumerate() {
                vals[i] = field
                    .parse()
                    .or_else(|_| parse_err(line, format!("not a number: {field:?}")))?;
            }
            let [w, b1, b2, last] = vals;
            let c = if pairwise {
                Configuration::from_pairwise(b1, b2, last)
            } else {
                Configuration::new(b1, b2, last)
            }
            .or_else(|e| parse_err(line, e.to_string()))?;
            if !(w >= 0.0) {
                return parse_err(line, format!("negative weight {w}"));
            }
            entries.push((c, w));
        }
        if entries.is_empty() {
            return parse_err(header_line, "no configurations");
        }
        Self::new(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    /// Serialize in the `weight,b1,b2,rho` form with full precision.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("weight,b1,b2,rho\n");
        for (c, w) in &self.entries {
            let _ = writeln!(out, "{w:?},{:?},{:?},{:?}", c.b1, c.b2, c.rho);
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line() as usize);
    Error::Parse {
        line,
        msg: e.to_string(),
    }
}

/// Weighted mean completeness.
pub fn dist_completeness(d: &ConfigDistribution) -> f64 {
    d.entries.iter().map(|(c, w)| w * completeness(c)).sum()
}

/// Bundled configuration distributions.
pub mod bundled {
    use super::ConfigDistribution;

    const FILES: [(&str, &str); 8] = [
        ("dicut_family", include_str!("../assets/dicut_family.csv")),
        ("dicut_pairs1", include_str!("../assets/dicut_pairs1.csv")),
        ("dicut_pairs2", include_str!("../assets/dicut_pairs2.csv")),
        ("dicut_pairs3", include_str!("../assets/dicut_pairs3.csv")),
        ("dicut_pairs4", include_str!("../assets/dicut_pairs4.csv")),
        ("and_biases4", include_str!("../assets/and_biases4.csv")),
        ("and_pair", include_str!("../assets/and_pair.csv")),
        ("and_pair_flip", include_str!("../assets/and_pair_flip.csv")),
    ];

    /// Names accepted by [`by_name`].
    pub const NAMES: [&str; 8] = [
        "dicut_family",
        "dicut_pairs1",
        "dicut_pairs2",
        "dicut_pairs3",
        "dicut_pairs4",
        "and_biases4",
        "and_pair",
        "and_pair_flip",
    ];

    /// Looks up a bundled distribution, accepting an optional `.csv` suffix.
    pub fn by_name(name: &str) -> Option<ConfigDistribution> {
        let key = name.trim_end_matches(".csv");
        FILES.iter().find(|(n, _)| *n == key).map(|(_, text)| {
            ConfigDistribution::from_csv_str(text).expect("bundled distribution parses")
        })
    }
}

/// Axis of a [`ConfigBox`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    B1,
    B2,
    Rho,
}

/// A box of configurations, the unit of work of the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigBox {
    pub b1: Interval,
    pub b2: Interval,
    pub rho: Interval,
}

impl ConfigBox {
    pub fn new(b1: Interval, b2: Interval, rho: Interval) -> Result<Self> {
        for (name, iv) in [("b1", b1), ("b2", b2), ("rho", rho)] {
            if !iv.subset_of(&Interval::new(-1.0, 1.0)) {
                return domain(format!("{name} interval {iv} not within [-1, 1]"));
            }
        }
        Ok(Self { b1, b2, rho })
    }

    /// The whole cube [−1, 1]³.
    pub fn full() -> Self {
        let unit = Interval::new(-1.0, 1.0);
        Self {
            b1: unit,
            b2: unit,
            rho: unit,
        }
    }

    pub fn point(c: &Configuration) -> Self {
        Self {
            b1: Interval::point(c.b1),
            b2: Interval::point(c.b2),
            rho: Interval::point(c.rho),
        }
    }

    pub fn get(&self, axis: Axis) -> Interval {
        match axis {
            Axis::B1 => self.b1,
            Axis::B2 => self.b2,
            Axis::Rho => self.rho,
        }
    }

    pub fn with(&self, axis: Axis, iv: Interval) -> Self {
        let mut out = *self;
        match axis {
            Axis::B1 => out.b1 = iv,
            Axis::B2 => out.b2 = iv,
            Axis::Rho => out.rho = iv,
        }
        out
    }

    /// Widest axis, ties resolved in the order b1, b2, ρ.
    pub fn widest(&self) -> Axis {
        let mut best = Axis::B1;
        for axis in [Axis::B2, Axis::Rho] {
            if self.get(axis).width() > self.get(best).width() {
                best = axis;
            }
        }
        best
    }

    /// Split the widest interval into two equal halves.
    pub fn split(&self) -> (ConfigBox, ConfigBox) {
        let axis = self.widest();
        let (a, b) = self.get(axis).bisect();
        (self.with(axis, a), self.with(axis, b))
    }

    pub fn max_width(&self) -> f64 {
        self.b1.width().max(self.b2.width()).max(self.rho.width())
    }

    pub fn center(&self) -> Configuration {
        Configuration {
            b1: self.b1.mid(),
            b2: self.b2.mid(),
            rho: self.rho.mid(),
        }
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        self.b1.contains(c.b1) && self.b2.contains(c.b2) && self.rho.contains(c.rho)
    }

    /// Split every axis into `k` equal parts, in b1-major order.
    pub fn grid(&self, k: usize) -> Vec<ConfigBox> {
        let parts = |iv: Interval| -> Vec<Interval> {
            let w = iv.width() / k as f64;
            (0..k)
                .map(|i| {
                    let lo = if i == 0 {
                        iv.lo()
                    } else {
                        iv.lo() + w * i as f64
                    };
                    let hi = if i + 1 == k {
                        iv.hi()
                    } else {
                        iv.lo() + w * (i + 1) as f64
                    };
                    Interval::new(lo, hi)
                })
                .collect()
        };
        let (p1, p2, p3) = (parts(self.b1), parts(self.b2), parts(self.rho));
        let mut out = Vec::with_capacity(k * k * k);
        for &a in &p1 {
            for &b in &p2 {
                for &c in &p3 {
                    out.push(ConfigBox {
                        b1: a,
                        b2: b,
                        rho: c,
                    });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const B: f64 = 0.175_707_977_6;
    const C: f64 = -0.687_693_011_6;
    const P1: f64 = 0.377_058_029_5;

    fn cfg(b1: f64, b2: f64, rho: f64) -> Configuration {
        Configuration::new(b1, b2, rho).unwrap()
    }

    #[test]
    fn pairwise_bias_examples() {
        assert_eq!(pairwise_bias(&cfg(0.0, 0.0, 0.37)), 0.37);
        let rho1 = -(1.0 - B) / (1.0 + B);
        assert_abs_diff_eq!(
            pairwise_bias(&cfg(B, B, rho1)),
            -1.0 + 2.0 * B,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(-1.0 + 2.0 * B, -0.648_584_044_8, epsilon = 1e-10);
        assert_eq!(pairwise_bias(&cfg(1.0, 0.5, 0.3)), 0.5);
    }

    #[test]
    fn completeness_examples() {
        let rho1 = -(1.0 - B) / (1.0 + B);
        assert_abs_diff_eq!(
            completeness(&cfg(-B, -B, rho1)),
            (2.0 - 2.0 * B) / 4.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            completeness(&cfg(-B, -B, rho1)),
            0.412_146_011_2,
            epsilon = 1e-10
        );
        let c2 = Configuration::from_pairwise(B, -B, C).unwrap();
        assert_abs_diff_eq!(completeness(&c2), 0.509_777_241_7, epsilon = 1e-10);
        for &t in &[-0.7, 0.0, 0.4] {
            assert_abs_diff_eq!(completeness(&cfg(t, t, 1.0)), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid(&cfg(0.0, 0.0, -1.0)));
        let rho1 = -(1.0 - B) / (1.0 + B);
        let rho2 = (C + B * B) / (1.0 - B * B);
        for c in [cfg(-B, -B, rho1), cfg(B, -B, rho2), cfg(B, B, rho1)] {
            assert!(is_valid(&c), "{c:?}");
        }
        // (0.9, −0.9, ρ=1): b12 = −0.81 + 0.19 = −0.62
        let c = cfg(0.9, -0.9, 1.0);
        assert_abs_diff_eq!(pairwise_bias(&c), -0.62, epsilon = 1e-12);
        let s = triangle_slacks(0.9, -0.9, -0.62);
        let expected = [0.38, 3.42, -0.18, 0.38];
        for (a, b) in s.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert!(!is_valid(&c));
    }

    #[test]
    fn positivity_and_flip() {
        let rho2 = (C + B * B) / (1.0 - B * B);
        assert!(is_positive(&cfg(B, -B, rho2)));
        assert!(is_positive(&cfg(0.0, 0.0, 0.0)));
        assert!(!is_positive(&cfg(0.1, 0.2, 0.5)));
        assert_eq!(flip(&cfg(B, -B, rho2)), cfg(B, -B, rho2));
        let c = cfg(0.3, -0.1, 0.2);
        assert_eq!(flip(&flip(&c)), c);
    }

    #[test]
    fn distribution_completeness() {
        let rho1 = -(1.0 - B) / (1.0 + B);
        let rho2 = (C + B * B) / (1.0 - B * B);
        let p2 = 1.0 - 2.0 * P1;
        let d = ConfigDistribution::new(vec![
            (cfg(-B, -B, rho1), P1),
            (cfg(B, -B, rho2), p2),
            (cfg(B, B, rho1), P1),
        ])
        .unwrap();
        let formula = P1 * (1.0 - B) + p2 * (1.0 + 2.0 * B - C) / 4.0;
        assert_abs_diff_eq!(dist_completeness(&d), formula, epsilon = 1e-12);
        let c = cfg(0.2, -0.3, -0.4);
        assert_eq!(
            ConfigDistribution::single(c).completeness(),
            completeness(&c)
        );
        let m = ConfigDistribution::new(vec![(c, 0.5), (flip(&c), 0.5)]).unwrap();
        assert_abs_diff_eq!(m.completeness(), completeness(&c), epsilon = 1e-15);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let text = "# comment\nweight,b1,b2,b12\n0.5, 0.1, -0.1, -0.5\n# mid\n0.5,0,0,0\n";
        let d = ConfigDistribution::from_csv_str(text).unwrap();
        assert_eq!(d.len(), 2);
        assert_abs_diff_eq!(pairwise_bias(&d.entries()[0].0), -0.5, epsilon = 1e-12);
        let back = ConfigDistribution::from_csv_str(&d.to_csv_string()).unwrap();
        assert_eq!(back, d);

        let bad = "weight,b1,b2,rho\n1,0.1,0.2,0.3\n1,0.1,x,0.3\n";
        match ConfigDistribution::from_csv_str(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(ConfigDistribution::from_csv_str("w,b1,b2\n").is_err());
        assert!(ConfigDistribution::from_csv_str("weight,b1,b2,rho\n").is_err());
    }

    #[test]
    fn normalizes_weights() {
        let d = ConfigDistribution::new(vec![(cfg(0.0, 0.0, 0.0), 2.0), (cfg(0.1, 0.0, 0.0), 2.0)])
            .unwrap();
        assert_eq!(d.entries()[0].1, 0.5);
        assert!(ConfigDistribution::new(vec![]).is_err());
        assert!(ConfigDistribution::new(vec![(cfg(0.0, 0.0, 0.0), -1.0)]).is_err());
    }

    #[test]
    fn rho_range_matches_validity() {
        for &(b1, b2) in &[(0.1, -0.3), (0.8, 0.7), (-0.5, 0.5), (0.0, 0.0), (1.0, 0.2)] {
            let (lo, hi) = rho_range(b1, b2, 1e-3).unwrap();
            for k in 0..=20 {
                let rho = lo + (hi - lo) * k as f64 / 20.0;
                let c = cfg(b1, b2, rho);
                assert!(is_valid(&c) && completeness(&c) >= 1e-3 - 1e-12, "{c:?}");
            }
        }
        assert!(rho_range(0.9, -0.9, 0.96).is_none());
        assert_eq!(rho_range(1.0, 0.2, 1e-3), Some((0.0, 0.0)));
        assert_eq!(rho_bounds(-1.0, 0.5), (0.0, 0.0));
    }

    #[test]
    fn rho_bounds_agree_with_triangle_inequalities() {
        for i in 1..40 {
            for j in 1..40 {
                let (b1, b2) = (-1.0 + i as f64 * 0.05, -1.0 + j as f64 * 0.05);
                let (lo, hi) = rho_bounds(b1, b2);
                for k in 0..=80 {
                    let rho = -1.0 + k as f64 * 0.025;
                    let c = cfg(b1, b2, rho);
                    let inside = rho >= lo - 1e-9 && rho <= hi + 1e-9;
                    let clear = rho >= lo + 1e-9 && rho <= hi - 1e-9;
                    if clear {
                        assert!(is_valid(&c), "{c:?}");
                    } else if !inside {
                        assert!(!is_valid(&c), "{c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn box_split_widest_with_ties() {
        let b = ConfigBox::full();
        assert_eq!(b.widest(), Axis::B1);
        let (l, r) = b.split();
        assert_eq!(l.b1, Interval::new(-1.0, 0.0));
        assert_eq!(r.b1, Interval::new(0.0, 1.0));
        assert_eq!(l.widest(), Axis::B2);
        assert_eq!(b.grid(3).len(), 27);
        assert!(ConfigBox::new(Interval::new(-2.0, 0.0), Interval::ZERO, Interval::ZERO).is_err());
    }

    #[test]
    fn bundled_distributions_load() {
        for name in bundled::NAMES {
            let d = bundled::by_name(name).unwrap();
            assert!(d.iter().all(|(c, _)| is_valid(c)), "{name}");
            let total: f64 = d.iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-12, "{name}");
        }
        assert_eq!(bundled::by_name("dicut_pairs4.csv").unwrap().len(), 16);
        assert!(bundled::by_name("nope").is_none());
        // completeness p1(1 − b) + p2(1 + 2b − c)/4 of the symmetric family
        let (b, c, p1) = (0.1757079776, -0.6876930116, 0.3770580295);
        let want = p1 * (1.0 - b) + (1.0 - 2.0 * p1) * (1.0 + 2.0 * b - c) / 4.0;
        let d = bundled::by_name("dicut_family").unwrap();
        assert!((d.completeness() - want).abs() < 1e-12);
    }
}
