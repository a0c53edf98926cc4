//! The α-game between configurations and threshold functions, and the
//! discovery loops that grow a THRESH scheme from it.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{completeness, flip, is_valid, ConfigDistribution, Configuration};
use crate::error::{domain, Error, Result};
use crate::gauss::{binorm_cdf, binorm_partials, std_cdf_inv, std_pdf};
use crate::lp::{LinearProgram, Relation};
use crate::optim::{nelder_mead, projected_descent, NelderMeadOptions};
use crate::scheme::{
    flip_fn, min_ratio_scan, scan_local_minima, soundness, ControlGrid, ThreshScheme,
    ThresholdFunction,
};

/// Largest threshold magnitude the oracle searches over.
pub const THRESHOLD_CAP: f64 = 2.07;

/// Alice's payoff α·completeness(c) − soundness(c, f).
pub fn payoff(c: &Configuration, f: &ThresholdFunction, alpha: f64) -> f64 {
    alpha * completeness(c) - soundness(c, f)
}

/// Working sets of the game.
#[derive(Clone, Debug)]
pub struct GameInstance {
    pub configs: Vec<Configuration>,
    pub functions: Vec<ThresholdFunction>,
    pub alpha: f64,
}

impl GameInstance {
    pub fn new(configs: Vec<Configuration>, functions: Vec<ThresholdFunction>) -> Result<Self> {
        if configs.is_empty() || functions.is_empty() {
            return domain("a game needs at least one configuration and one function");
        }
        for c in &configs {
            if !is_valid(c) || completeness(c) <= 0.0 {
                return domain(format!(
                    "configuration {c:?} is invalid or has no completeness"
                ));
            }
        }
        Ok(Self {
            configs,
            functions,
            alpha: 0.0,
        })
    }

    /// soundness[i][j] for config i and function j, and the completeness of
    /// each config.
    pub fn matrix(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let s = self
            .configs
            .par_iter()
            .map(|c| self.functions.iter().map(|f| soundness(c, f)).collect())
            .collect();
        let comp = self.configs.iter().map(completeness).collect();
        (s, comp)
    }
}

/// Hardest distribution over the configurations: minimize α subject to
/// Σ_θ S(θ, f)·ŵ_θ ≤ α for every f and Σ_θ C(θ)·ŵ_θ = 1, then normalize ŵ.
pub fn solve_primal(g: &GameInstance) -> Result<(f64, ConfigDistribution)> {
    let (s, comp) = g.matrix();
    solve_primal_matrix(&g.configs, &s, &comp)
}

fn solve_primal_matrix(
    configs: &[Configuration],
    s: &[Vec<f64>],
    comp: &[f64],
) -> Result<(f64, ConfigDistribution)> {
    let m = configs.len();
    let k = s[0].len();
    let mut obj = vec![0.0; m + 1];
    obj[m] = -1.0;
    let mut lp = LinearProgram::new(obj);
    for j in 0..k {
        let mut row: Vec<f64> = (0..m).map(|i| s[i][j]).collect();
        row.push(-1.0);
        lp.add_row(row, Relation::Le, 0.0);
    }
    let mut row = comp.to_vec();
    row.push(0.0);
    lp.add_row(row, Relation::Eq, 1.0);
    let r = lp.solve().optimal()?;
    let total: f64 = r.x[..m].iter().sum();
    if !(total > 0.0) {
        return Err(Error::Lp("degenerate primal weights".into()));
    }
    let entries = configs
        .iter()
        .zip(&r.x[..m])
        .filter(|(_, w)| **w > 0.0)
        .map(|(c, w)| (*c, w / total))
        .collect();
    Ok((r.x[m], ConfigDistribution::new(entries)?))
}

/// Best mixture of the functions: maximize α subject to
/// Σ_f S(θ, f)·p_f ≥ α·C(θ) for every θ and Σ p_f = 1.
pub fn solve_dual(g: &GameInstance) -> Result<(f64, ThreshScheme)> {
    let (s, comp) = g.matrix();
    solve_dual_matrix(&g.functions, &s, &comp)
}

fn solve_dual_matrix(
    functions: &[ThresholdFunction],
    s: &[Vec<f64>],
    comp: &[f64],
) -> Result<(f64, ThreshScheme)> {
    let k = functions.len();
    let mut obj = vec![0.0; k + 1];
    obj[k] = 1.0;
    let mut lp = LinearProgram::new(obj);
    for (row_s, c) in s.iter().zip(comp) {
        let mut row: Vec<f64> = row_s.iter().map(|v| -v).collect();
        row.push(*c);
        lp.add_row(row, Relation::Le, 0.0);
    }
    let mut row = vec![1.0; k];
    row.push(0.0);
    lp.add_row(row, Relation::Eq, 1.0);
    let r = lp.solve().optimal()?;
    let support: Vec<(ThresholdFunction, f64)> = functions
        .iter()
        .zip(&r.x[..k])
        .filter(|(_, p)| **p > 1e-12)
        .map(|(f, p)| (f.clone(), *p))
        .collect();
    let total: f64 = support.iter().map(|(_, p)| p).sum();
    let (fs, ps): (Vec<_>, Vec<_>) = support.into_iter().map(|(f, p)| (f, p / total)).unzip();
    Ok((r.x[k], ThreshScheme::new(fs, ps, 0.0)?))
}

/// Settings for [`oracle_best_function`].
#[derive(Clone, Debug)]
pub struct OracleOptions {
    pub restarts: usize,
    pub max_evals: usize,
    pub seed: u64,
    pub grid: ControlGrid,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_evals: 3000,
            seed: 0,
            grid: ControlGrid::default(),
        }
    }
}

/// f(x) = 0.85·Φ⁻¹((1 + x)/2) clipped to the cap, a rough stand-in for the
/// single function of Lewin, Livnat and Zwick.
pub fn llz_like(grid: &ControlGrid) -> ThresholdFunction {
    let values = grid
        .points()
        .iter()
        .map(|&x| {
            let v = 0.85
                * std_cdf_inv((1.0 + x) / 2.0).unwrap_or(if x > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                });
            v.clamp(-THRESHOLD_CAP, THRESHOLD_CAP)
        })
        .collect();
    ThresholdFunction::new(grid.clone(), values).expect("finite values")
}

/// Weight of the pull toward [`llz_like`] in the oracle objective. Biases
/// strictly between control points pin only one combination of the two
/// neighbouring values, and the pull settles the remaining flat directions
/// on a smooth shape.
pub const ANCHOR_WEIGHT: f64 = 1e-6;

/// Where a bias sits on the grid: two point indices and the weight on the
/// second.
#[derive(Clone, Copy)]
struct Stencil {
    i: usize,
    j: usize,
    lambda: f64,
}

fn stencil(grid: &ControlGrid, x: f64) -> Stencil {
    let p = grid.points();
    if let Some(i) = p.iter().position(|&q| q == x) {
        return Stencil {
            i,
            j: i,
            lambda: 0.0,
        };
    }
    let j = p.partition_point(|&q| q < x).clamp(1, p.len() - 1);
    let i = j - 1;
    Stencil {
        i,
        j,
        lambda: (x - p[i]) / (p[j] - p[i]),
    }
}

impl Stencil {
    #[inline]
    fn eval(&self, v: &[f64]) -> f64 {
        if self.lambda == 0.0 {
            v[self.i]
        } else {
            v[self.i] + self.lambda * (v[self.j] - v[self.i])
        }
    }
}

/// Local search for the function maximizing expected soundness against `d`.
///
/// Only values at control points adjacent to a bias of `d` move; the rest are
/// copied from the incumbent, or from [`llz_like`] when there is none. In odd
/// mode the values on x ≥ 0 determine the rest and f(0) = 0.
pub fn oracle_best_function(
    d: &ConfigDistribution,
    odd: bool,
    opts: &OracleOptions,
    incumbent: Option<&ThresholdFunction>,
) -> ThresholdFunction {
    let grid = &opts.grid;
    let n = grid.len();
    let base: Vec<f64> = incumbent
        .filter(|f| f.grid() == grid && f.values().iter().all(|v| v.is_finite()))
        .map(|f| f.values().to_vec())
        .unwrap_or_else(|| llz_like(grid).values().to_vec());
    let base = if odd { oddify(&base) } else { base };

    let stencils: Vec<(Stencil, Stencil, f64, f64)> = d
        .iter()
        .map(|(c, w)| {
            let rho = if c.b1.abs() >= 1.0 || c.b2.abs() >= 1.0 {
                0.0
            } else {
                c.rho
            };
            (stencil(grid, c.b1), stencil(grid, c.b2), -rho, *w)
        })
        .collect();

    // free parameters: active points, folded onto x ≥ 0 in odd mode
    let rep = |k: usize| {
        if odd && grid.points()[k] < 0.0 {
            n - 1 - k
        } else {
            k
        }
    };
    let mut active: Vec<usize> = Vec::new();
    for (s1, s2, _, _) in &stencils {
        for k in [s1.i, s1.j, s2.i, s2.j] {
            let r = rep(k);
            let zero_pinned = odd && grid.points()[r] == 0.0;
            if !zero_pinned && !active.contains(&r) {
                active.push(r);
            }
        }
    }
    active.sort_unstable();
    if active.is_empty() {
        return ThresholdFunction::new(grid.clone(), base).expect("finite values");
    }

    let expand = |x: &[f64]| -> Vec<f64> {
        let mut v = base.clone();
        for (&k, &val) in active.iter().zip(x) {
            v[k] = val;
            if odd {
                v[n - 1 - k] = -val;
            }
        }
        v
    };
    let llz = llz_like(grid).values().to_vec();
    let objective = |x: &[f64]| -> f64 {
        let v = expand(x);
        let total: f64 = stencils
            .iter()
            .map(|(s1, s2, rho, w)| w * binorm_cdf(s1.eval(&v), -s2.eval(&v), *rho))
            .sum();
        let pull: f64 = active
            .iter()
            .zip(x)
            .map(|(&k, xv)| (xv - llz[k]).powi(2))
            .sum();
        -total + ANCHOR_WEIGHT * pull
    };

    let gradient = |x: &[f64]| -> Vec<f64> {
        let v = expand(x);
        let mut g = vec![0.0; n];
        for (s1, s2, rho, w) in &stencils {
            let (d1, d2) = threshold_partials(s1.eval(&v), -s2.eval(&v), *rho);
            // t1 = s1·v and t2 = −s2·v; the objective is minus the soundness
            for (k, c) in [(s1.i, 1.0 - s1.lambda), (s1.j, s1.lambda)] {
                g[k] -= w * d1 * c;
            }
            for (k, c) in [(s2.i, 1.0 - s2.lambda), (s2.j, s2.lambda)] {
                g[k] += w * d2 * c;
            }
        }
        active
            .iter()
            .zip(x)
            .map(|(&k, xv)| {
                let own = if odd && k != n - 1 - k {
                    g[k] - g[n - 1 - k]
                } else {
                    g[k]
                };
                own + 2.0 * ANCHOR_WEIGHT * (xv - llz[k])
            })
            .collect()
    };

    let dim = active.len();
    let lower = vec![-THRESHOLD_CAP; dim];
    let upper = vec![THRESHOLD_CAP; dim];
    let from = |v: &[f64]| {
        active
            .iter()
            .map(|&k| v[k].clamp(-THRESHOLD_CAP, THRESHOLD_CAP))
            .collect::<Vec<_>>()
    };
    let mut starts: Vec<Vec<f64>> = vec![from(&llz), vec![0.0; dim]];
    if incumbent.is_some() {
        starts.push(from(&base));
    }
    let nm = NelderMeadOptions {
        max_evals: opts.max_evals,
        ftol: 1e-14,
        xtol: 1e-9,
    };
    let restarts = opts.restarts.max(starts.len());
    let results: Vec<(Vec<f64>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = match starts.get(r) {
                Some(s) => s.clone(),
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(
                        opts.seed.wrapping_mul(1_000_003).wrapping_add(r as u64),
                    );
                    (0..dim)
                        .map(|_| rng.random_range(-THRESHOLD_CAP..=THRESHOLD_CAP))
                        .collect()
                }
            };
            let step = vec![0.2; dim];
            let (x, _) = nelder_mead(objective, &x0, &step, &lower, &upper, nm);
            projected_descent(objective, gradient, x, &lower, &upper, 400)
        })
        .collect();
    let best = results
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one restart");
    ThresholdFunction::new(grid.clone(), expand(&best.0)).expect("finite values")
}

/// ∂Φ_ρ/∂t1 and ∂Φ_ρ/∂t2, with the one-sided limits at ρ = ±1.
pub(crate) fn threshold_partials(t1: f64, t2: f64, rho: f64) -> (f64, f64) {
    if !(t1.is_finite() && t2.is_finite()) {
        return (0.0, 0.0);
    }
    if let Ok(p) = binorm_partials(t1, t2, rho) {
        return (p.d_t1, p.d_t2);
    }
    let step = |x: bool| if x { 1.0 } else { 0.0 };
    if rho > 0.0 {
        (std_pdf(t1) * step(t1 < t2), std_pdf(t2) * step(t2 < t1))
    } else {
        let s = step(t1 + t2 > 0.0);
        (std_pdf(t1) * s, std_pdf(t2) * s)
    }
}

fn oddify(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|k| 0.5 * (v[k] - v[n - 1 - k])).collect()
}

/// Default grid step of the configuration oracle.
pub const WORST_CONFIG_STEP: f64 = 0.02;

/// The configuration with completeness at least `floor` on which `s` does
/// worst, found by a grid scan and local refinement.
pub fn oracle_worst_config(s: &ThreshScheme, floor: f64) -> Result<(Configuration, f64)> {
    min_ratio_scan(s, WORST_CONFIG_STEP, floor)
}

/// One line of a discovery run log.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterationRecord {
    pub outer: usize,
    pub inner: usize,
    pub alpha: f64,
    /// Worst scanned ratio of the scheme after an outer step.
    pub worst_ratio: Option<f64>,
    pub configs: usize,
    pub functions: usize,
    pub elapsed_ms: f64,
}

/// Settings for the discovery loops.
#[derive(Clone, Debug)]
pub struct DiscoveryOptions {
    pub oracle: OracleOptions,
    /// Stop the inner loop early once α gains less than this over
    /// `plateau_rounds` rounds.
    pub plateau_tol: f64,
    pub plateau_rounds: usize,
    /// Configurations added per outer round of [`find_thresh_full`]: the
    /// worst one plus the next-worst distinct local minima of the scan.
    pub configs_per_round: usize,
}

impl Default for DiscoveryOptions {
    fn default() -> Self {
        Self {
            oracle: OracleOptions::default(),
            plateau_tol: 1e-6,
            plateau_rounds: 5,
            configs_per_round: 4,
        }
    }
}

/// Output of a discovery run.
#[derive(Clone, Debug)]
pub struct Discovery {
    pub scheme: ThreshScheme,
    /// Value of the final dual LP.
    pub alpha: f64,
    pub functions: Vec<ThresholdFunction>,
    pub configs: Vec<Configuration>,
    pub log: Vec<IterationRecord>,
}

/// Algorithm 1 with a fixed configuration set.
pub fn find_thresh(
    configs: &[Configuration],
    t: usize,
    odd: bool,
    opts: &DiscoveryOptions,
) -> Result<Discovery> {
    find_thresh_pooled(configs, Vec::new(), t, odd, opts, 0, Instant::now())
}

fn find_thresh_pooled(
    configs: &[Configuration],
    pool: Vec<ThresholdFunction>,
    t: usize,
    odd: bool,
    opts: &DiscoveryOptions,
    outer: usize,
    start: Instant,
) -> Result<Discovery> {
    if t == 0 {
        return domain("T must be at least 1");
    }
    if configs.is_empty() {
        return domain("need at least one configuration");
    }
    for c in configs {
        if !is_valid(c) || completeness(c) <= 0.0 {
            return domain(format!(
                "configuration {c:?} is invalid or has no completeness"
            ));
        }
    }
    let mut oracle = opts.oracle.clone();
    let comp: Vec<f64> = configs.iter().map(completeness).collect();
    let mut functions = pool;
    let mut s: Vec<Vec<f64>> = configs
        .par_iter()
        .map(|c| functions.iter().map(|f| soundness(c, f)).collect())
        .collect();
    let add =
        |f: ThresholdFunction, functions: &mut Vec<ThresholdFunction>, s: &mut Vec<Vec<f64>>| {
            if functions.contains(&f) {
                return;
            }
            for (row, c) in s.iter_mut().zip(configs) {
                row.push(soundness(c, &f));
            }
            functions.push(f);
        };

    let mut incumbent = None;
    if functions.is_empty() {
        let uniform = ConfigDistribution::new(
            configs
                .iter()
                .map(|c| (*c, 1.0 / configs.len() as f64))
                .collect(),
        )?;
        let f = oracle_best_function(&uniform, odd, &oracle, None);
        incumbent = Some(f.clone());
        add(f, &mut functions, &mut s);
    }

    let mut log = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    for inner in 1..t {
        let (alpha, hard) = solve_primal_matrix(configs, &s, &comp)?;
        if let Some(&prev) = alphas.last() {
            if alpha < prev - 1e-9 {
                log::warn!("primal value decreased from {prev} to {alpha}");
            }
        }
        alphas.push(alpha);
        log.push(IterationRecord {
            outer,
            inner,
            alpha,
            worst_ratio: None,
            configs: configs.len(),
            functions: functions.len(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        log::info!(
            "outer {outer} inner {inner}: alpha {alpha:.8} with {} functions",
            functions.len()
        );
        let r = opts.plateau_rounds;
        if r > 0 && alphas.len() > r && alpha - alphas[alphas.len() - 1 - r] < opts.plateau_tol {
            break;
        }
        oracle.seed = oracle.seed.wrapping_add(1);
        let f = oracle_best_function(&hard, odd, &oracle, incumbent.as_ref());
        if !odd {
            if let Ok(g) = flip_fn(&f) {
                add(g, &mut functions, &mut s);
            }
        }
        incumbent = Some(f.clone());
        add(f, &mut functions, &mut s);
    }
    let (alpha, scheme) = solve_dual_matrix(&functions, &s, &comp)?;
    Ok(Discovery {
        scheme,
        alpha,
        functions,
        configs: configs.to_vec(),
        log,
    })
}

/// Algorithm 2: alternate Algorithm 1 with the configuration oracle, adding
/// each worst configuration (and its flip outside odd mode) to the working
/// set. Functions in the support of each scheme seed the next inner run.
pub fn find_thresh_full(
    t: usize,
    t_prime: usize,
    seed_configs: &[Configuration],
    odd: bool,
    floor: f64,
    opts: &DiscoveryOptions,
) -> Result<Discovery> {
    if seed_configs.is_empty() {
        return domain("need at least one seed configuration");
    }
    if t_prime == 0 {
        return domain("T' must be at least 1");
    }
    let start = Instant::now();
    let mut configs = seed_configs.to_vec();
    let mut pool: Vec<ThresholdFunction> = Vec::new();
    let mut log = Vec::new();
    let mut opts = opts.clone();
    for outer in 1..t_prime {
        let run = find_thresh_pooled(&configs, pool, t, odd, &opts, outer, start)?;
        log.extend(run.log);
        let minima = scan_local_minima(&run.scheme, WORST_CONFIG_STEP, floor)?;
        let ratio = minima[0].1;
        log.push(IterationRecord {
            outer,
            inner: 0,
            alpha: run.alpha,
            worst_ratio: Some(ratio),
            configs: configs.len(),
            functions: run.scheme.functions().len(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        log::info!(
            "outer {outer}: dual alpha {:.8}, worst ratio {ratio:.8}",
            run.alpha
        );
        pool = run.scheme.functions().to_vec();
        let mut fresh = Vec::new();
        for (worst, _) in minima.iter().take(opts.configs_per_round.max(1)) {
            fresh.push(*worst);
            if !odd {
                fresh.push(flip(worst));
            }
        }
        for c in fresh {
            let known = configs.iter().any(|k| {
                (k.b1 - c.b1).abs() < 1e-12
                    && (k.b2 - c.b2).abs() < 1e-12
                    && (k.rho - c.rho).abs() < 1e-12
            });
            if !known && is_valid(&c) && completeness(&c) > 0.0 {
                configs.push(c);
            }
        }
        opts.oracle.seed = opts.oracle.seed.wrapping_add(7919);
    }
    let mut last = find_thresh_pooled(&configs, pool, t, odd, &opts, t_prime, start)?;
    log.append(&mut last.log);
    last.log = log;
    Ok(last)
}
