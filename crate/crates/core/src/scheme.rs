//! Piecewise-linear threshold functions and THRESH schemes built from them.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{completeness, rho_range, Configuration};
use crate::error::{domain, parse_err, Error, Result};
use crate::gauss::binorm_cdf;
use crate::interval::Interval;
use crate::optim::{nelder_mead, NelderMeadOptions};

/// Tolerance on probabilities summing to one.
pub const PROB_SUM_TOL: f64 = 1e-6;

/// Tolerance for grid symmetry checks.
const SYM_TOL: f64 = 1e-12;

/// The 17 default control points.
pub const DEFAULT_POINTS: [f64; 17] = [
    -1.0, -0.7, -0.45, -0.3, -0.25, -0.179515, -0.16472, -0.1, 0.0, 0.1, 0.16472, 0.179515, 0.25,
    0.3, 0.45, 0.7, 1.0,
];

/// Strictly increasing control points from −1 to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlGrid {
    points: Vec<f64>,
}

impl ControlGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return domain("control grid needs at least two points");
        }
        if points[0] != -1.0 || *points.last().unwrap() != 1.0 {
            return domain("control grid must start at -1 and end at 1");
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("control grid must be strictly increasing");
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether the grid is its own mirror image about 0.
    pub fn is_symmetric(&self) -> bool {
        let n = self.points.len();
        (0..n).all(|i| (self.points[i] + self.points[n - 1 - i]).abs() <= SYM_TOL)
    }

    /// Index `i` of the segment `[x_i, x_{i+1}]` holding `x`.
    fn segment(&self, x: f64) -> usize {
        let n = self.points.len();
        let k = self.points.partition_point(|&p| p <= x);
        k.clamp(1, n - 1) - 1
    }
}

impl Default for ControlGrid {
    fn default() -> Self {
        Self {
            points: DEFAULT_POINTS.to_vec(),
        }
    }
}

/// A threshold function given by its values at the control points.
///
/// Values are either all finite or all the same infinity, so linear
/// interpolation never mixes a finite and an infinite endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFunction {
    grid: ControlGrid,
    values: Vec<f64>,
}

impl ThresholdFunction {
    pub fn new(grid: ControlGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!(
                "{} values for {} control points",
                values.len(),
                grid.len()
            ));
        }
        if values.iter().any(|v| v.is_nan()) {
            return domain("threshold values must not be NaN");
        }
        for w in values.windows(2) {
            let mixed =
                w[0].is_finite() != w[1].is_finite() || (w[0].is_infinite() && w[0] != w[1]);
            if mixed {
                return domain("cannot interpolate between a finite and an infinite threshold");
            }
        }
        Ok(Self { grid, values })
    }

    /// The function equal to `v` at every point of the default grid.
    pub fn constant(v: f64) -> Self {
        let grid = ControlGrid::default();
        let values = vec![v; grid.len()];
        Self::new(grid, values).expect("constant function")
    }

    pub fn grid(&self) -> &ControlGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// f(x) for x in [−1, 1].
    pub fn eval(&self, x: f64) -> Result<f64> {
        eval_fn(self, x)
    }

    #[inline]
    fn eval_unchecked(&self, x: f64) -> f64 {
        let i = self.grid.segment(x);
        let (x0, x1) = (self.grid.points[i], self.grid.points[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        if x == x0 {
            return y0;
        }
        if x == x1 {
            return y1;
        }
        if y0.is_infinite() {
            return y0;
        }
        y0 + (x - x0) / (x1 - x0) * (y1 - y0)
    }

    /// Encloses {f(x) : x ∈ xs}. The extremes of a piecewise-linear function
    /// over an interval sit at its ends or at interior control points.
    pub fn eval_interval(&self, xs: Interval) -> Interval {
        let v0 = self.values[0];
        if v0.is_infinite() {
            return Interval::point(v0);
        }
        let lo = xs.lo().max(-1.0);
        let hi = xs.hi().min(1.0);
        let mut out = self.enclose_at(lo).hull(&self.enclose_at(hi));
        for (p, v) in self.grid.points.iter().zip(&self.values) {
            if *p > lo && *p < hi {
                out = out.hull(&Interval::point(*v));
            }
        }
        out
    }

    fn enclose_at(&self, x: f64) -> Interval {
        let i = self.grid.segment(x);
        let (x0, x1) = (self.grid.points[i], self.grid.points[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        if x == x0 {
            return Interval::point(y0);
        }
        if x == x1 {
            return Interval::point(y1);
        }
        let t = (Interval::point(x) - x0)
            .div(Interval::point(x1) - x0)
            .expect("segment has positive length");
        Interval::point(y0) + t * (Interval::point(y1) - y0)
    }

    /// Encloses the slopes of f over the segments meeting `xs`.
    pub fn slope_interval(&self, xs: Interval) -> Interval {
        if self.values[0].is_infinite() {
            return Interval::ZERO;
        }
        let lo = xs.lo().max(-1.0);
        let hi = xs.hi().min(1.0);
        let first = self.grid.segment(lo);
        let last = self.grid.segment(hi);
        let mut out: Option<Interval> = None;
        for i in first..=last {
            let (x0, x1) = (self.grid.points[i], self.grid.points[i + 1]);
            let s = (Interval::point(self.values[i + 1]) - self.values[i])
                .div(Interval::point(x1) - x0)
                .expect("segment has positive length");
            out = Some(out.map_or(s, |o| o.hull(&s)));
        }
        out.unwrap_or(Interval::ZERO)
    }

    /// The largest absolute segment slope.
    pub fn max_slope(&self) -> f64 {
        if self.values[0].is_infinite() {
            return 0.0;
        }
        self.grid
            .points
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max)
    }
}

/// f(x), with exact stored values at control points.
pub fn eval_fn(f: &ThresholdFunction, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return domain(format!("bias {x} outside [-1, 1]"));
    }
    Ok(f.eval_unchecked(x))
}

/// x ↦ −f(−x).
pub fn flip_fn(f: &ThresholdFunction) -> Result<ThresholdFunction> {
    if !f.grid.is_symmetric() {
        return domain("flip needs a grid symmetric about 0");
    }
    let values = f.values.iter().rev().map(|v| -v).collect();
    Ok(ThresholdFunction {
        grid: f.grid.clone(),
        values,
    })
}

/// Whether f(−x) = −f(x) at every control point, to within `tol`.
/// Always false on an asymmetric grid.
pub fn is_odd(f: &ThresholdFunction, tol: f64) -> bool {
    if !f.grid.is_symmetric() {
        return false;
    }
    let n = f.values.len();
    (0..n).all(|i| {
        let (a, b) = (f.values[i], f.values[n - 1 - i]);
        if a.is_infinite() || b.is_infinite() {
            a == -b
        } else {
            (a + b).abs() <= tol
        }
    })
}

/// Probability that f rounds x1 true and x2 false on configuration `c`.
/// When a bias is ±1 the relative pairwise bias is 0 by definition, whatever
/// `c.rho` holds.
pub fn soundness(c: &Configuration, f: &ThresholdFunction) -> f64 {
    let t1 = f.eval_unchecked(c.b1.clamp(-1.0, 1.0));
    let t2 = -f.eval_unchecked(c.b2.clamp(-1.0, 1.0));
    let rho = if c.b1.abs() >= 1.0 || c.b2.abs() >= 1.0 {
        0.0
    } else {
        c.rho
    };
    binorm_cdf(t1, t2, -rho)
}

/// A THRESH scheme: with probability `independent_mix` round every variable
/// independently and uniformly, otherwise draw function `i` with
/// probability `probs[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreshScheme {
    functions: Vec<ThresholdFunction>,
    probs: Vec<f64>,
    independent_mix: f64,
}

impl ThreshScheme {
    /// Builds a scheme. Probabilities within [`PROB_SUM_TOL`] of summing to
    /// one are renormalized.
    pub fn new(
        functions: Vec<ThresholdFunction>,
        probs: Vec<f64>,
        independent_mix: f64,
    ) -> Result<Self> {
        if functions.len() != probs.len() {
            return domain(format!(
                "{} functions but {} probabilities",
                functions.len(),
                probs.len()
            ));
        }
        if !(0.0..=1.0).contains(&independent_mix) {
            return domain(format!("independent mix {independent_mix} outside [0, 1]"));
        }
        if functions.is_empty() {
            if independent_mix != 1.0 {
                return domain("a scheme without functions must be fully independent");
            }
            return Ok(Self {
                functions,
                probs,
                independent_mix,
            });
        }
        if functions.iter().any(|f| f.grid != functions[0].grid) {
            return domain("all functions must share one control grid");
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return domain("probabilities must be nonnegative");
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return domain(format!("probabilities sum to {sum}, not 1"));
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Self {
            functions,
            probs,
            independent_mix,
        })
    }

    /// The scheme that always uses `f`.
    pub fn single(f: ThresholdFunction) -> Self {
        Self {
            functions: vec![f],
            probs: vec![1.0],
            independent_mix: 0.0,
        }
    }

    /// Uniform independent rounding.
    pub fn independent() -> Self {
        Self {
            functions: Vec::new(),
            probs: Vec::new(),
            independent_mix: 1.0,
        }
    }

    pub fn functions(&self) -> &[ThresholdFunction] {
        &self.functions
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn independent_mix(&self) -> f64 {
        self.independent_mix
    }

    /// The same scheme with independent rounding mixed in at rate `mix`.
    pub fn with_mix(&self, mix: f64) -> Result<Self> {
        Self::new(self.functions.clone(), self.probs.clone(), mix)
    }

    /// Every function replaced by its flip, probabilities unchanged.
    pub fn flipped(&self) -> Result<Self> {
        let functions = self.functions.iter().map(flip_fn).collect::<Result<_>>()?;
        Ok(Self {
            functions,
            probs: self.probs.clone(),
            independent_mix: self.independent_mix,
        })
    }

    pub fn grid(&self) -> Option<&ControlGrid> {
        self.functions.first().map(|f| &f.grid)
    }

    pub fn from_str_tsv(text: &str) -> Result<Self> {
        parse_scheme(text)
    }

    pub fn to_tsv_string(&self) -> String {
        write_scheme(self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        load_scheme(path)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        save_scheme(self, path)
    }
}

/// Expected probability that the scheme satisfies the arc on `c`.
pub fn scheme_soundness(c: &Configuration, s: &ThreshScheme) -> f64 {
    let mixed: f64 = s
        .functions
        .iter()
        .zip(&s.probs)
        .filter(|(_, p)| **p > 0.0)
        .map(|(f, p)| p * soundness(c, f))
        .sum();
    ((1.0 - s.independent_mix) * mixed + s.independent_mix * 0.25).clamp(0.0, 1.0)
}

/// Soundness over completeness. Configurations with no completeness count as
/// vacuously satisfied and give +∞.
pub fn ratio(c: &Configuration, s: &ThreshScheme) -> f64 {
    let comp = completeness(c);
    if comp <= 0.0 {
        return f64::INFINITY;
    }
    scheme_soundness(c, s) / comp
}

/// Number of worst grid cells handed to local refinement.
const SCAN_REFINE: usize = 8;

/// Scans a uniform grid of step `grid_step` over valid configurations with
/// completeness at least `floor`, then refines the worst cells by
/// Nelder–Mead. Returns the worst configuration found and its ratio.
pub fn min_ratio_scan(
    s: &ThreshScheme,
    grid_step: f64,
    floor: f64,
) -> Result<(Configuration, f64)> {
    let all = scan_local_minima(s, grid_step, floor)?;
    Ok(all[0])
}

/// The refined worst cells of [`min_ratio_scan`], sorted by ratio, the
/// global candidate first. Minima that refinement brought within 1e-4 of a
/// better one are dropped.
pub fn scan_local_minima(
    s: &ThreshScheme,
    grid_step: f64,
    floor: f64,
) -> Result<Vec<(Configuration, f64)>> {
    if !(grid_step > 0.0) || !(floor > 0.0) {
        return domain("grid step and completeness floor must be positive");
    }
    let k = (2.0 / grid_step).round().max(1.0) as usize;
    let biases: Vec<f64> = (0..=k)
        .map(|i| (i as f64 * 2.0 / k as f64 - 1.0).clamp(-1.0, 1.0))
        .collect();
    // thresholds at grid biases: t1 = f(b1) and t2 = −f(b2)
    let table: Vec<Vec<f64>> = s
        .functions
        .iter()
        .map(|f| biases.iter().map(|&b| f.eval_unchecked(b)).collect())
        .collect();

    let rows: Vec<Vec<(f64, Configuration)>> = (0..biases.len())
        .into_par_iter()
        .map(|i| {
            let mut worst: Vec<(f64, Configuration)> = Vec::new();
            for j in 0..biases.len() {
                let (b1, b2) = (biases[i], biases[j]);
                let Some((lo, hi)) = rho_range(b1, b2, floor) else {
                    continue;
                };
                let mut rhos: Vec<f64> = vec![lo];
                let first = ((lo + 1.0) / grid_step).ceil() as i64;
                let mut m = first;
                loop {
                    let r = m as f64 * grid_step - 1.0;
                    if r >= hi {
                        break;
                    }
                    if r > lo {
                        rhos.push(r);
                    }
                    m += 1;
                }
                if hi > lo {
                    rhos.push(hi);
                }
                for rho in rhos {
                    let c = Configuration { b1, b2, rho };
                    let comp = completeness(&c);
                    if comp < floor || comp <= 0.0 {
                        continue;
                    }
                    let mixed: f64 = table
                        .iter()
                        .zip(&s.probs)
                        .map(|(t, p)| p * binorm_cdf(t[i], -t[j], -rho))
                        .sum();
                    let sound = (1.0 - s.independent_mix) * mixed + s.independent_mix * 0.25;
                    push_worst(&mut worst, (sound / comp, c));
                }
            }
            worst
        })
        .collect();
    let mut worst = Vec::new();
    for row in rows {
        for item in row {
            push_worst(&mut worst, item);
        }
    }
    if worst.is_empty() {
        return domain("no valid configuration clears the completeness floor");
    }

    let objective = |x: &[f64]| -> f64 {
        match rho_range(x[0], x[1], floor) {
            Some((lo, hi)) => {
                let c = Configuration {
                    b1: x[0],
                    b2: x[1],
                    rho: (lo + x[2] * (hi - lo)).clamp(-1.0, 1.0),
                };
                if completeness(&c) < floor {
                    f64::INFINITY
                } else {
                    ratio(&c, s)
                }
            }
            None => f64::INFINITY,
        }
    };
    let refined: Vec<(f64, Configuration)> = worst
        .par_iter()
        .map(|(_, c)| {
            let (lo, hi) = rho_range(c.b1, c.b2, floor).unwrap_or((c.rho, c.rho));
            let u = if hi > lo {
                (c.rho - lo) / (hi - lo)
            } else {
                0.0
            };
            let step = [grid_step / 2.0, grid_step / 2.0, 0.05];
            let opts = NelderMeadOptions {
                max_evals: 600,
                ftol: 1e-12,
                xtol: 1e-9,
            };
            let (x, v) = nelder_mead(
                objective,
                &[c.b1, c.b2, u],
                &step,
                &[-1.0, -1.0, 0.0],
                &[1.0, 1.0, 1.0],
                opts,
            );
            let (lo, hi) = rho_range(x[0], x[1], floor).unwrap_or((c.rho, c.rho));
            let rc = Configuration {
                b1: x[0],
                b2: x[1],
                rho: (lo + x[2] * (hi - lo)).clamp(-1.0, 1.0),
            };
            (v, rc)
        })
        .collect();
    let mut out: Vec<(Configuration, f64)> = worst
        .iter()
        .zip(refined)
        .map(|(&(gv, gc), (v, c))| if v < gv { (c, v) } else { (gc, gv) })
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut distinct: Vec<(Configuration, f64)> = Vec::with_capacity(out.len());
    for (c, v) in out {
        let near = distinct.iter().any(|(d, _)| {
            (d.b1 - c.b1)
                .abs()
                .max((d.b2 - c.b2).abs())
                .max((d.rho - c.rho).abs())
                < 1e-4
        });
        if !near {
            distinct.push((c, v));
        }
    }
    Ok(distinct)
}

/// Keeps the `SCAN_REFINE` smallest ratios, at most one per (b1, b2) pair.
fn push_worst(worst: &mut Vec<(f64, Configuration)>, item: (f64, Configuration)) {
    if let Some(k) = worst
        .iter()
        .position(|(_, c)| c.b1 == item.1.b1 && c.b2 == item.1.b2)
    {
        if item.0 < worst[k].0 {
            worst[k] = item;
            worst.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        return;
    }
    if worst.len() < SCAN_REFINE || item.0 < worst.last().unwrap().0 {
        worst.push(item);
        worst.sort_by(|a, b| a.0.total_cmp(&b.0));
        worst.truncate(SCAN_REFINE);
    }
}

fn parse_values(line: usize, tokens: &[&str]) -> Result<Vec<f64>> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("not a number: {t:?}"),
            })
        })
        .collect()
}

fn parse_count(line: usize, tokens: &[&str], key: &str) -> Result<Vec<f64>> {
    let Some(n) = tokens.get(1).and_then(|t| t.parse::<usize>().ok()) else {
        return parse_err(line, format!("`{key}` needs a count"));
    };
    if tokens.len() != n + 2 {
        return parse_err(
            line,
            format!("`{key}` declares {n} values but has {}", tokens.len() - 2),
        );
    }
    parse_values(line, &tokens[2..])
}

/// Parses the scheme text format: `grid n points…`, `probs k values…`, an
/// optional `mix p`, then k rows of n threshold values. Blank lines and lines
/// starting with `#` are ignored.
pub fn parse_scheme(text: &str) -> Result<ThreshScheme> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, l) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty scheme file".into(),
    })?;
    let tokens: Vec<&str> = l.split_whitespace().collect();
    if tokens[0] != "grid" {
        return parse_err(ln, "expected `grid`");
    }
    let grid = ControlGrid::new(parse_count(ln, &tokens, "grid")?)
        .or_else(|e| parse_err(ln, e.to_string()))?;
    if !grid.is_symmetric() {
        return parse_err(ln, "control grid is not symmetric about 0");
    }

    let (ln, l) = lines.next().ok_or(Error::Parse {
        line: ln + 1,
        msg: "missing `probs` line".into(),
    })?;
    let tokens: Vec<&str> = l.split_whitespace().collect();
    if tokens[0] != "probs" {
        return parse_err(ln, "expected `probs`");
    }
    let probs = parse_count(ln, &tokens, "probs")?;
    let probs_line = ln;
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > PROB_SUM_TOL {
        return parse_err(
            ln,
            format!("probabilities must be nonnegative and sum to 1 (sum {sum})"),
        );
    }

    let mut mix = 0.0;
    let mut functions = Vec::with_capacity(probs.len());
    let mut last = ln;
    for (ln, l) in lines {
        last = ln;
        let tokens: Vec<&str> = l.split_whitespace().collect();
        if tokens[0] == "mix" {
            if !functions.is_empty() || tokens.len() != 2 {
                return parse_err(ln, "`mix p` must precede the value rows");
            }
            mix = parse_values(ln, &tokens[1..])?[0];
            if !(0.0..=1.0).contains(&mix) {
                return parse_err(ln, format!("mix {mix} outside [0, 1]"));
            }
            continue;
        }
        if functions.len() == probs.len() {
            return parse_err(ln, "more value rows than probabilities");
        }
        let values = parse_values(ln, &tokens)?;
        let f = ThresholdFunction::new(grid.clone(), values)
            .or_else(|e| parse_err(ln, e.to_string()))?;
        functions.push(f);
    }
    if functions.len() != probs.len() {
        return parse_err(
            last,
            format!(
                "expected {} value rows, found {}",
                probs.len(),
                functions.len()
            ),
        );
    }
    ThreshScheme::new(functions, probs, mix).or_else(|e| parse_err(probs_line, e.to_string()))
}

/// Writes the scheme text format. Floats print in shortest round-trip form.
pub fn write_scheme(s: &ThreshScheme) -> String {
    let mut out = String::new();
    let grid = s.grid().cloned().unwrap_or_default();
    write!(out, "grid\t{}", grid.len()).unwrap();
    for p in grid.points() {
        write!(out, "\t{p}").unwrap();
    }
    write!(out, "\nprobs\t{}", s.probs.len()).unwrap();
    for p in &s.probs {
        write!(out, "\t{p}").unwrap();
    }
    writeln!(out, "\nmix\t{}", s.independent_mix).unwrap();
    for f in &s.functions {
        let row: Vec<String> = f.values.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", row.join("\t")).unwrap();
    }
    out
}

pub fn load_scheme(path: impl AsRef<Path>) -> Result<ThreshScheme> {
    parse_scheme(&std::fs::read_to_string(path)?)
}

pub fn save_scheme(s: &ThreshScheme, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_scheme(s))?;
    Ok(())
}

/// Bundled schemes.
pub mod bundled {
    use super::{parse_scheme, ThreshScheme};

    pub const DICUT7: &str = include_str!("../assets/dicut7.scheme");
    pub const AND3: &str = include_str!("../assets/and3.scheme");
    pub const LLZ1: &str = include_str!("../assets/llz1.scheme");

    /// Names accepted by [`by_name`].
    pub const NAMES: [&str; 3] = ["dicut7", "and3", "llz1"];

    /// The seven-function MAX DI-CUT scheme.
    pub fn dicut7() -> ThreshScheme {
        parse_scheme(DICUT7).expect("bundled scheme parses")
    }

    /// The three-function odd MAX 2-AND scheme.
    pub fn and3() -> ThreshScheme {
        parse_scheme(AND3).expect("bundled scheme parses")
    }

    /// The leading function of the DI-CUT scheme on its own.
    pub fn llz1() -> ThreshScheme {
        parse_scheme(LLZ1).expect("bundled scheme parses")
    }

    /// Looks up a bundled scheme, accepting an optional `.scheme` suffix.
    pub fn by_name(name: &str) -> Option<ThreshScheme> {
        match name.trim_end_matches(".scheme") {
            "dicut7" => Some(dicut7()),
            "and3" => Some(and3()),
            "llz1" => Some(llz1()),
            _ => None,
        }
    }
}
