//! Applying schemes to concrete MAX DI-CUT instances.
//!
//! An instance is a weighted directed graph, a solution assigns a unit vector
//! to the truth direction v0 and to every vertex. Each arc then has a
//! configuration, and a scheme's expected cut is the weighted sum of its
//! soundness over arcs.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{completeness, relative_bias, triangle_slacks, Configuration};
use crate::error::{domain, parse_err, Result};
use crate::scheme::{scheme_soundness, ThreshScheme};

/// Tolerance on vector norms.
pub const UNIT_TOL: f64 = 1e-8;

/// A weighted directed graph with weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphInstance {
    n: usize,
    arcs: Vec<(usize, usize, f64)>,
}

impl GraphInstance {
    /// Normalizes the weights. Rejects self-loops, negative weights and
    /// vertex ids out of range.
    pub fn new(n: usize, arcs: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for &(t, h, w) in &arcs {
            if t >= n || h >= n {
                return domain(format!("arc ({t}, {h}) out of range for {n} vertices"));
            }
            if t == h {
                return domain(format!("self-loop at vertex {t}"));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return domain(format!("arc ({t}, {h}) has weight {w}"));
            }
            total += w;
        }
        if !(total > 0.0) {
            return domain("instance has no positive weight");
        }
        let arcs = arcs
            .into_iter()
            .map(|(t, h, w)| (t, h, w / total))
            .collect();
        Ok(Self { n, arcs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize, f64)] {
        &self.arcs
    }

    /// Lines `tail head weight`, 0-indexed, `#` comments. The vertex count
    /// is one more than the largest id unless a `vertices N` line is given.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut arcs = Vec::new();
        let mut largest = 0usize;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts[0] == "vertices" {
                match parts.get(1).and_then(|v| v.parse::<usize>().ok()) {
                    Some(v) if parts.len() == 2 => n = Some(v),
                    _ => return parse_err(k + 1, "expected `vertices N`"),
                }
                continue;
            }
            if parts.len() != 3 {
                return parse_err(k + 1, format!("expected `tail head weight`, got {line:?}"));
            }
            let (Ok(t), Ok(h), Ok(w)) = (
                parts[0].parse::<usize>(),
                parts[1].parse::<usize>(),
                parts[2].parse::<f64>(),
            ) else {
                return parse_err(k + 1, format!("cannot parse arc {line:?}"));
            };
            if t == h {
                return parse_err(k + 1, format!("self-loop at vertex {t}"));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return parse_err(k + 1, format!("weight {w} must be nonnegative"));
            }
            largest = largest.max(t).max(h);
            arcs.push((t, h, w));
        }
        if arcs.is_empty() {
            return parse_err(text.lines().count().max(1), "no arcs");
        }
        Self::new(n.unwrap_or(largest + 1), arcs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("vertices {}\n", self.n);
        for (t, h, w) in &self.arcs {
            let _ = writeln!(s, "{t} {h} {w}");
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Unit vectors for v0 and every vertex. `canonical` is false for
/// heuristic solutions that ignore the triangle inequalities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorSolution {
    pub dim: usize,
    pub v0: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub canonical: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(a: &mut [f64]) {
    let n = dot(a, a).sqrt();
    if n > 0.0 {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
}

impl VectorSolution {
    pub fn new(v0: Vec<f64>, v: Vec<Vec<f64>>, canonical: bool) -> Result<Self> {
        let dim = v0.len();
        for (k, x) in std::iter::once(&v0).chain(&v).enumerate() {
            if x.len() != dim {
                return domain(format!(
                    "vector {k} has dimension {} instead of {dim}",
                    x.len()
                ));
            }
            let norm = dot(x, x).sqrt();
            if (norm - 1.0).abs() > UNIT_TOL {
                return domain(format!("vector {k} has norm {norm}"));
            }
        }
        Ok(Self {
            dim,
            v0,
            v,
            canonical,
        })
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// Header `dim n` (optionally followed by `noncanonical`), then v0 and
    /// one row per vertex.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let Some((hl, header)) = lines.next() else {
            return parse_err(1, "missing `dim n` header");
        };
        let h: Vec<&str> = header.split_whitespace().collect();
        let (dim, n) = match (
            h.first().map(|v| v.parse::<usize>()),
            h.get(1).map(|v| v.parse::<usize>()),
        ) {
            (Some(Ok(d)), Some(Ok(n))) if d > 0 => (d, n),
            _ => return parse_err(hl, "expected `dim n`"),
        };
        let canonical = match h.get(2) {
            None => true,
            Some(&"noncanonical") => false,
            Some(other) => return parse_err(hl, format!("unknown header flag {other:?}")),
        };
        let mut rows = Vec::with_capacity(n + 1);
        for (k, line) in lines.by_ref().take(n + 1) {
            let row: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            match row {
                Ok(r) if r.len() == dim => {
                    let norm = dot(&r, &r).sqrt();
                    if (norm - 1.0).abs() > UNIT_TOL {
                        return parse_err(k, format!("vector has norm {norm}"));
                    }
                    rows.push(r);
                }
                Ok(r) => return parse_err(k, format!("expected {dim} entries, got {}", r.len())),
                Err(e) => return parse_err(k, e.to_string()),
            }
        }
        if rows.len() != n + 1 {
            return parse_err(
                text.lines().count(),
                format!("expected {} vectors, got {}", n + 1, rows.len()),
            );
        }
        if let Some((k, _)) = lines.next() {
            return parse_err(k, "trailing data after the last vector");
        }
        let v0 = rows.remove(0);
        Self::new(v0, rows, canonical)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {}{}\n",
            self.dim,
            self.n(),
            if self.canonical { "" } else { " noncanonical" }
        );
        for x in std::iter::once(&self.v0).chain(&self.v) {
            let row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Largest violation of the triangle inequalities over the arcs of
    /// `inst`, 0 if all hold.
    pub fn triangle_violation(&self, inst: &GraphInstance) -> f64 {
        inst.arcs
            .iter()
            .map(|&(t, h, _)| {
                let (b1, b2, b12) = (
                    dot(&self.v0, &self.v[t]),
                    dot(&self.v0, &self.v[h]),
                    dot(&self.v[t], &self.v[h]),
                );
                triangle_slacks(b1, b2, b12)
                    .iter()
                    .fold(0.0f64, |m, s| m.max(-s))
            })
            .fold(0.0, f64::max)
    }
}

fn check_compatible(inst: &GraphInstance, sol: &VectorSolution) -> Result<()> {
    if inst.n != sol.n() {
        return domain(format!(
            "instance has {} vertices, solution {}",
            inst.n,
            sol.n()
        ));
    }
    Ok(())
}

/// Configuration of the arc `tail → head`.
pub fn arc_configuration(sol: &VectorSolution, tail: usize, head: usize) -> Configuration {
    let b1 = dot(&sol.v0, &sol.v[tail]).clamp(-1.0, 1.0);
    let b2 = dot(&sol.v0, &sol.v[head]).clamp(-1.0, 1.0);
    let b12 = dot(&sol.v[tail], &sol.v[head]).clamp(-1.0, 1.0);
    Configuration {
        b1,
        b2,
        rho: relative_bias(b1, b2, b12).clamp(-1.0, 1.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutReport {
    /// Expected weight of the cut produced by the scheme.
    pub expected: f64,
    /// The SDP objective, Σ w·completeness.
    pub sdp_value: f64,
    pub ratio: f64,
}

pub fn expected_cut(
    inst: &GraphInstance,
    sol: &VectorSolution,
    s: &ThreshScheme,
) -> Result<CutReport> {
    check_compatible(inst, sol)?;
    let (expected, sdp_value) = inst
        .arcs
        .par_iter()
        .map(|&(t, h, w)| {
            let c = arc_configuration(sol, t, h);
            (w * scheme_soundness(&c, s), w * completeness(&c))
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let ratio = if sdp_value > 0.0 {
        expected / sdp_value
    } else {
        f64::INFINITY
    };
    Ok(CutReport {
        expected: expected.clamp(0.0, 1.0),
        sdp_value,
        ratio,
    })
}

/// Signs in {−1, +1}; −1 means true, so an arc is cut when its tail is +1
/// and its head −1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub signs: Vec<i8>,
}

pub fn cut_value(inst: &GraphInstance, a: &Assignment) -> Result<f64> {
    if a.signs.len() != inst.n {
        return domain(format!(
            "assignment has {} entries for {} vertices",
            a.signs.len(),
            inst.n
        ));
    }
    Ok(inst
        .arcs
        .iter()
        .filter(|&&(t, h, _)| a.signs[t] == 1 && a.signs[h] == -1)
        .map(|(_, _, w)| w)
        .sum())
}

/// One draw of the rounding: a Gaussian vector r and one function from the
/// scheme (or independent rounding with probability `independent_mix`).
/// Vertex i is set true (−1) iff r·v⊥_i ≥ f(v0·v_i).
pub fn sample_rounding(
    inst: &GraphInstance,
    sol: &VectorSolution,
    s: &ThreshScheme,
    seed: u64,
) -> Result<Assignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(round_with(inst, sol, s, &mut rng)?)
}

/// As [`sample_rounding`], drawing from a caller-owned generator.
pub fn round_with<R: Rng>(
    inst: &GraphInstance,
    sol: &VectorSolution,
    s: &ThreshScheme,
    rng: &mut R,
) -> Result<Assignment> {
    check_compatible(inst, sol)?;
    let u: f64 = rng.random();
    if u < s.independent_mix() || s.functions().is_empty() {
        let signs = (0..sol.n())
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        return Ok(Assignment { signs });
    }
    let mut pick: f64 = rng.random();
    let mut idx = s.functions().len() - 1;
    for (k, p) in s.probs().iter().enumerate() {
        if pick < *p {
            idx = k;
            break;
        }
        pick -= p;
    }
    let f = &s.functions()[idx];
    let r: Vec<f64> = (0..sol.dim).map(|_| rng.sample(StandardNormal)).collect();
    let r0 = dot(&r, &sol.v0);
    let signs = sol
        .v
        .iter()
        .map(|vi| {
            let b = dot(&sol.v0, vi).clamp(-1.0, 1.0);
            // r·(v_i − b·v0) with the norm of the perpendicular part
            let perp_norm = (dot(vi, vi) - b * b).max(0.0).sqrt();
            let x = if perp_norm > 1e-12 {
                (dot(&r, vi) - b * r0) / perp_norm
            } else {
                rng.sample(StandardNormal)
            };
            let t = f.eval(b).expect("bias within [-1, 1]");
            if x >= t {
                -1
            } else {
                1
            }
        })
        .collect();
    Ok(Assignment { signs })
}

/// Σ w·(1 + v0·v_t − v0·v_h − v_t·v_h)/4.
pub fn sdp_value(inst: &GraphInstance, sol: &VectorSolution) -> f64 {
    objective(inst, &sol.v0, &sol.v)
}

fn objective(inst: &GraphInstance, v0: &[f64], v: &[Vec<f64>]) -> f64 {
    inst.arcs
        .iter()
        .map(|&(t, h, w)| w * (1.0 + dot(v0, &v[t]) - dot(v0, &v[h]) - dot(&v[t], &v[h])) / 4.0)
        .sum()
}

/// Low-rank heuristic for the SDP without triangle inequalities: projected
/// gradient ascent over unit vectors in `rank` dimensions, halving the step
/// whenever a move would lower the objective. Returns the solution, flagged
/// non-canonical, and the objective after every iteration.
pub fn demo_sdp(
    inst: &GraphInstance,
    rank: usize,
    iterations: usize,
    seed: u64,
) -> Result<(VectorSolution, Vec<f64>)> {
    if rank < 2 {
        return domain(format!("rank {rank} must be at least 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = || {
        let mut x: Vec<f64> = (0..rank).map(|_| rng.sample(StandardNormal)).collect();
        normalize(&mut x);
        x
    };
    let mut v0 = unit();
    let mut v: Vec<Vec<f64>> = (0..inst.n).map(|_| unit()).collect();
    let mut value = objective(inst, &v0, &v);
    let mut trace = Vec::with_capacity(iterations);
    let mut step = 1.0;
    for _ in 0..iterations {
        let mut g0 = vec![0.0; rank];
        let mut g = vec![vec![0.0; rank]; inst.n];
        for &(t, h, w) in &inst.arcs {
            let q = w / 4.0;
            for k in 0..rank {
                g0[k] += q * (v[t][k] - v[h][k]);
                g[t][k] += q * (v0[k] - v[h][k]);
                g[h][k] += q * (-v0[k] - v[t][k]);
            }
        }
        loop {
            let mut n0: Vec<f64> = v0.iter().zip(&g0).map(|(a, b)| a + step * b).collect();
            normalize(&mut n0);
            let nv: Vec<Vec<f64>> = v
                .iter()
                .zip(&g)
                .map(|(x, gx)| {
                    let mut y: Vec<f64> = x.iter().zip(gx).map(|(a, b)| a + step * b).collect();
                    normalize(&mut y);
                    y
                })
                .collect();
            let nvalue = objective(inst, &n0, &nv);
            if nvalue >= value {
                v0 = n0;
                v = nv;
                value = nvalue;
                step = (step * 1.5).min(64.0);
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
        trace.push(value);
    }
    Ok((
        VectorSolution {
            dim: rank,
            v0,
            v,
            canonical: false,
        },
        trace,
    ))
}
