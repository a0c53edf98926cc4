//! `thresh`: evaluate, scan, certify and discover threshold rounding schemes.
//!
//! Every command prints a JSON object on stdout with the command name,
//! version, seed, the parameters it ran with and its result. `--human` adds a
//! short summary on stderr.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 counterexample found,
//! 3 verification budget exhausted.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use thresh_core::analytic::{
    contour, contour_csv, family_upper_bound, max_ratio_search, SymmetricFamily,
};
use thresh_core::config::{
    bundled as dists, rho_range, ConfigBox, ConfigDistribution, Configuration,
};
use thresh_core::engine::{
    cut_value, demo_sdp, expected_cut, round_with, GraphInstance, VectorSolution,
};
use thresh_core::game::{find_thresh_full, DiscoveryOptions};
use thresh_core::interval::Interval;
use thresh_core::scheme::{
    bundled as schemes, is_odd, load_scheme, min_ratio_scan, ratio, save_scheme, scan_local_minima,
    scheme_soundness, ThreshScheme,
};
use thresh_core::verify::{run_verification, Budget, Verdict, VerifyJob};

const EXIT_USAGE: u8 = 1;
const EXIT_COUNTEREXAMPLE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "thresh",
    version,
    about = "Threshold rounding schemes for MAX DI-CUT and MAX 2-AND"
)]
struct Cli {
    /// Also print a human-readable summary on stderr.
    #[arg(long, global = true)]
    human: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Soundness, completeness and ratio of a scheme on a distribution.
    Evaluate(EvaluateArgs),
    /// Grid scan for the worst configuration of a scheme.
    Scan(ScanArgs),
    /// Certify a ratio with interval arithmetic.
    Verify(VerifyArgs),
    /// Discover a scheme by the configuration/function game.
    Discover(DiscoverArgs),
    /// Best ratio of a single threshold function on a hard distribution.
    UpperBound(UpperBoundArgs),
    /// Round an instance with a scheme and report cut values.
    Round(RoundArgs),
    /// Contour data of the soundness surface or of a scheme's worst ratio.
    Contour(ContourArgs),
}

#[derive(Args, Serialize)]
struct EvaluateArgs {
    /// Scheme file or bundled name (dicut7, and3, llz1).
    #[arg(long)]
    scheme: String,
    /// Distribution CSV or bundled name (dicut_family, dicut_pairs1..4, and_biases4, and_pair, and_pair_flip).
    #[arg(long)]
    dist: String,
}

#[derive(Args, Serialize)]
struct ScanArgs {
    #[arg(long)]
    scheme: String,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = 1e-3)]
    floor: f64,
    /// Number of local minima to report.
    #[arg(long, default_value_t = 1)]
    minima: usize,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    scheme: String,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-6)]
    floor: f64,
    /// Sub-box b1lo,b1hi,b2lo,b2hi,rlo,rhi of the full cube.
    #[arg(long)]
    region: Option<String>,
    #[arg(long, default_value_t = 10_000_000)]
    budget_boxes: u64,
    #[arg(long, default_value_t = 60)]
    max_depth: u32,
    /// The region is first cut into this many parts per axis.
    #[arg(long, default_value_t = 4)]
    top_split: usize,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Dicut,
    #[value(name = "2and")]
    #[serde(rename = "2and")]
    TwoAnd,
}

#[derive(Args, Serialize)]
struct DiscoverArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Inner iterations (functions added per run of the fixed-set loop).
    #[arg(long = "T", default_value_t = 20)]
    t: usize,
    /// Outer iterations (rounds of adding worst configurations).
    #[arg(long = "T-prime", default_value_t = 20)]
    t_prime: usize,
    /// Restrict to odd functions; implied by --mode 2and.
    #[arg(long)]
    odd: bool,
    #[arg(long, default_value_t = 1e-3)]
    floor: f64,
    /// Seed configurations; defaults to dicut_family (dicut) or and_pair (2and).
    #[arg(long)]
    seed_dist: Option<String>,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 4)]
    configs_per_round: usize,
    /// Scheme output path.
    #[arg(long)]
    out: PathBuf,
    /// JSON-lines iteration log; defaults to the output path with `.log.jsonl`.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct UpperBoundArgs {
    /// Distribution CSV or bundled name; without it the symmetric family is used.
    #[arg(long)]
    table: Option<String>,
    #[arg(long, default_value_t = 0.1757079776)]
    b: f64,
    #[arg(long, default_value_t = -0.6876930116, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, default_value_t = 0.3770580295)]
    p1: f64,
    /// Tie t(−b) = −t(b) in the table search.
    #[arg(long)]
    odd: bool,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
}

#[derive(Args, Serialize)]
struct RoundArgs {
    /// Instance file with lines `tail head weight`.
    #[arg(long)]
    instance: PathBuf,
    /// Vector solution; without it a low-rank heuristic solution is used.
    #[arg(long)]
    vectors: Option<PathBuf>,
    #[arg(long)]
    scheme: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 3)]
    rank: usize,
    #[arg(long, default_value_t = 500)]
    iterations: usize,
}

#[derive(Args, Serialize)]
struct ContourArgs {
    /// Scheme: contour of its worst ratio over ρ on a (b1, b2) grid.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, default_value_t = 0.1757079776)]
    b: f64,
    #[arg(long, default_value_t = -0.6876930116, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, default_value_t = 0.3770580295)]
    p1: f64,
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    x: String,
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    y: String,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = 1e-3)]
    floor: f64,
    /// CSV output; stdout gets the JSON summary.
    #[arg(long)]
    out: PathBuf,
}

type Outcome = Result<(Value, String, u8), String>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, params, outcome) = match &cli.cmd {
        Cmd::Evaluate(a) => ("evaluate", echo(a), evaluate(a)),
        Cmd::Scan(a) => ("scan", echo(a), scan(a)),
        Cmd::Verify(a) => ("verify", echo(a), verify(a, &cli)),
        Cmd::Discover(a) => ("discover", echo(a), discover(a, &cli)),
        Cmd::UpperBound(a) => ("upper-bound", echo(a), upper_bound(a, &cli)),
        Cmd::Round(a) => ("round", echo(a), round(a, &cli)),
        Cmd::Contour(a) => ("contour", echo(a), contour_cmd(a)),
    };
    match outcome {
        Ok((result, summary, code)) => {
            let doc = json!({
                "command": name,
                "version": env!("CARGO_PKG_VERSION"),
                "seed": cli.seed,
                "workers": cli.workers,
                "params": params,
                "result": result,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializable")
            );
            if cli.human {
                eprintln!("{summary}");
            }
            ExitCode::from(code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn echo<T: Serialize>(a: &T) -> Value {
    serde_json::to_value(a).expect("serializable")
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn load_scheme_arg(arg: &str) -> Result<ThreshScheme, String> {
    if Path::new(arg).exists() {
        return load_scheme(arg).map_err(|e| format!("{arg}: {e}"));
    }
    schemes::by_name(arg).ok_or_else(|| {
        format!(
            "{arg}: no such file or bundled scheme ({})",
            schemes::NAMES.join(", ")
        )
    })
}

fn load_dist_arg(arg: &str) -> Result<ConfigDistribution, String> {
    if Path::new(arg).exists() {
        return ConfigDistribution::load(arg).map_err(|e| format!("{arg}: {e}"));
    }
    dists::by_name(arg).ok_or_else(|| {
        format!(
            "{arg}: no such file or bundled distribution ({})",
            dists::NAMES.join(", ")
        )
    })
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(err))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b] if a < b => Ok((a, b)),
        _ => Err(format!("expected `lo,hi` with lo < hi, got {s:?}")),
    }
}

fn parse_region(s: &str) -> Result<ConfigBox, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(err))
        .collect::<Result<_, _>>()?;
    if v.len() != 6 || v.chunks(2).any(|p| p[0] > p[1]) {
        return Err(format!(
            "region needs b1lo,b1hi,b2lo,b2hi,rlo,rhi, got {s:?}"
        ));
    }
    ConfigBox::new(
        Interval::new(v[0], v[1]),
        Interval::new(v[2], v[3]),
        Interval::new(v[4], v[5]),
    )
    .map_err(err)
}

fn config_json(c: &Configuration, r: f64) -> Value {
    json!({"b1": c.b1, "b2": c.b2, "rho": c.rho, "b12": c.pairwise_bias(), "completeness": c.completeness(), "ratio": r})
}

fn evaluate(a: &EvaluateArgs) -> Outcome {
    let s = load_scheme_arg(&a.scheme)?;
    let d = load_dist_arg(&a.dist)?;
    if d.is_empty() {
        return Err("distribution is empty".into());
    }
    let soundness: f64 = d.iter().map(|(c, w)| w * scheme_soundness(c, &s)).sum();
    let completeness = d.completeness();
    let r = if completeness > 0.0 {
        soundness / completeness
    } else {
        f64::INFINITY
    };
    let summary =
        format!("soundness {soundness:.10}, completeness {completeness:.10}, ratio {r:.10}");
    Ok((
        json!({"soundness": soundness, "completeness": completeness, "ratio": r}),
        summary,
        0,
    ))
}

fn scan(a: &ScanArgs) -> Outcome {
    let s = load_scheme_arg(&a.scheme)?;
    let minima = scan_local_minima(&s, a.step, a.floor).map_err(err)?;
    let list: Vec<Value> = minima
        .iter()
        .take(a.minima.max(1))
        .map(|(c, r)| config_json(c, *r))
        .collect();
    let (c, r) = minima[0];
    let summary = format!(
        "worst ratio {r:.8} at b1 {:.6}, b2 {:.6}, rho {:.6}",
        c.b1, c.b2, c.rho
    );
    Ok((
        json!({"worst_ratio": r, "worst": config_json(&c, r), "minima": list}),
        summary,
        0,
    ))
}

fn verify(a: &VerifyArgs, cli: &Cli) -> Outcome {
    let s = load_scheme_arg(&a.scheme)?;
    let region = match &a.region {
        Some(r) => parse_region(r)?,
        None => ConfigBox::full(),
    };
    let budget = Budget {
        max_boxes: a.budget_boxes,
        max_depth: a.max_depth,
    };
    let job = VerifyJob::new(s, a.alpha, a.floor, region, budget).map_err(err)?;
    let report = run_verification(&job, cli.workers, a.top_split).map_err(err)?;
    let value = serde_json::to_value(&report).map_err(err)?;
    if let Some(path) = &a.out {
        std::fs::write(path, serde_json::to_string_pretty(&value).map_err(err)?).map_err(err)?;
    }
    let code = match report.verdict {
        Verdict::Certified => 0,
        Verdict::Counterexample => EXIT_COUNTEREXAMPLE,
        Verdict::BudgetExhausted => EXIT_BUDGET,
    };
    let mut summary = format!(
        "{:?} at alpha {} (floor {}): {} boxes, depth {}, {:.1}s",
        report.verdict, report.alpha, report.floor, report.boxes, report.depth, report.seconds
    );
    if let Some(cx) = report.counterexample {
        summary.push_str(&format!(
            "; counterexample b1 {} b2 {} rho {} ratio {}",
            cx.b1, cx.b2, cx.rho, cx.ratio
        ));
    }
    Ok((value, summary, code))
}

fn discover(a: &DiscoverArgs, cli: &Cli) -> Outcome {
    let odd = a.odd || matches!(a.mode, Mode::TwoAnd);
    let seed_name = a.seed_dist.clone().unwrap_or_else(|| match a.mode {
        Mode::Dicut => "dicut_family".into(),
        Mode::TwoAnd => "and_pair".into(),
    });
    let d = load_dist_arg(&seed_name)?;
    let configs: Vec<Configuration> = d.iter().map(|(c, _)| *c).collect();
    let mut opts = DiscoveryOptions::default();
    opts.oracle.seed = cli.seed;
    opts.oracle.restarts = a.restarts;
    opts.configs_per_round = a.configs_per_round;
    let run = || find_thresh_full(a.t, a.t_prime, &configs, odd, a.floor, &opts);
    let found = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.max(1))
        .build()
        .map_err(err)?
        .install(run)
        .map_err(err)?;
    save_scheme(&found.scheme, &a.out).map_err(err)?;
    let log_path = a.log.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".log.jsonl");
        PathBuf::from(p)
    });
    let lines: Vec<String> = found
        .log
        .iter()
        .map(|r| serde_json::to_string(r).expect("serializable"))
        .collect();
    std::fs::write(&log_path, lines.join("\n") + "\n").map_err(err)?;
    let (worst, r) = min_ratio_scan(&found.scheme, 0.02, a.floor).map_err(err)?;
    let all_odd = found.scheme.functions().iter().all(|f| is_odd(f, 1e-12));
    let summary = format!(
        "dual alpha {:.8}, scanned worst ratio {r:.8}, {} functions, {} configurations -> {}",
        found.alpha,
        found.scheme.functions().len(),
        found.configs.len(),
        a.out.display()
    );
    Ok((
        json!({
            "alpha": found.alpha,
            "worst_ratio": r,
            "worst": config_json(&worst, r),
            "functions": found.scheme.functions().len(),
            "configs": found.configs.len(),
            "odd": all_odd,
            "scheme": a.out,
            "log": log_path,
        }),
        summary,
        0,
    ))
}

fn upper_bound(a: &UpperBoundArgs, cli: &Cli) -> Outcome {
    if let Some(name) = &a.table {
        let d = load_dist_arg(name)?;
        let r = max_ratio_search(&d, a.odd, a.restarts, cli.seed).map_err(err)?;
        let summary = format!(
            "{name}: best single-function ratio {:.10} (rigor: none)",
            r.ratio
        );
        let thresholds: Vec<Value> = r
            .thresholds
            .iter()
            .map(|(b, t)| json!({"bias": b, "threshold": finite_or_label(*t)}))
            .collect();
        return Ok((
            json!({"ratio": r.ratio, "soundness": r.soundness, "completeness": r.completeness, "thresholds": thresholds, "rigor": "none"}),
            summary,
            0,
        ));
    }
    let fam = SymmetricFamily::new(a.b, a.c, a.p1).map_err(err)?;
    let ub = family_upper_bound(&fam)
        .map_err(|e| format!("{e} (the critical point is unique only when p1 > p2)"))?;
    let (t1, t2) = ub.argmax.thresholds();
    let summary = format!("t0 {:.10}, ratio {:.10} (rigor: none)", ub.t0, ub.ratio);
    Ok((
        json!({
            "t0": ub.t0,
            "ratio": ub.ratio,
            "soundness": ub.soundness,
            "completeness": ub.completeness,
            "argmax": {"t1": finite_or_label(t1), "t2": finite_or_label(t2)},
            "rigor": "none",
        }),
        summary,
        0,
    ))
}

fn finite_or_label(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn round(a: &RoundArgs, cli: &Cli) -> Outcome {
    use rand::SeedableRng;
    let inst =
        GraphInstance::load(&a.instance).map_err(|e| format!("{}: {e}", a.instance.display()))?;
    let s = load_scheme_arg(&a.scheme)?;
    let sol = match &a.vectors {
        Some(p) => VectorSolution::load(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => {
            demo_sdp(&inst, a.rank, a.iterations, cli.seed)
                .map_err(err)?
                .0
        }
    };
    let closed = expected_cut(&inst, &sol, &s).map_err(err)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
    let (mut total, mut best) = (0.0, 0.0f64);
    for _ in 0..a.samples {
        let asg = round_with(&inst, &sol, &s, &mut rng).map_err(err)?;
        let v = cut_value(&inst, &asg).map_err(err)?;
        total += v;
        best = best.max(v);
    }
    let mean = if a.samples > 0 {
        total / a.samples as f64
    } else {
        f64::NAN
    };
    let summary = format!(
        "expected cut {:.6} (sampled mean {mean:.6}, best {best:.6}) vs SDP value {:.6}: ratio {:.6}{}",
        closed.expected,
        closed.sdp_value,
        closed.ratio,
        if sol.canonical { "" } else { " [heuristic solution, not canonical]" }
    );
    Ok((
        json!({
            "expected_cut": closed.expected,
            "sdp_value": closed.sdp_value,
            "ratio": closed.ratio,
            "sampled_mean": mean,
            "sampled_best": best,
            "samples": a.samples,
            "canonical": sol.canonical,
            "triangle_violation": sol.triangle_violation(&inst),
        }),
        summary,
        0,
    ))
}

fn contour_cmd(a: &ContourArgs) -> Outcome {
    let (x, y) = (parse_pair(&a.x)?, parse_pair(&a.y)?);
    if !(a.step > 0.0) {
        return Err("step must be positive".into());
    }
    let count = |(lo, hi): (f64, f64)| ((hi - lo) / a.step).round() as usize + 1;
    let (nx, ny) = (count(x), count(y));
    let rows: Vec<(f64, f64, f64)> = match &a.scheme {
        None => {
            let fam = SymmetricFamily::new(a.b, a.c, a.p1).map_err(err)?;
            let comp = fam.completeness();
            contour(&fam, x, y, nx, ny)
                .into_iter()
                .map(|(t1, t2, v)| (t1, t2, v / comp))
                .collect()
        }
        Some(name) => {
            let s = load_scheme_arg(name)?;
            let at = |(lo, hi): (f64, f64), n: usize, i: usize| {
                if n <= 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            };
            let mut out = Vec::with_capacity(nx * ny);
            for i in 0..nx {
                let b1 = at(x, nx, i).clamp(-1.0, 1.0);
                for j in 0..ny {
                    let b2 = at(y, ny, j).clamp(-1.0, 1.0);
                    let worst = rho_range(b1, b2, a.floor)
                        .map(|(lo, hi)| {
                            (0..=40)
                                .map(|k| {
                                    ratio(
                                        &Configuration {
                                            b1,
                                            b2,
                                            rho: lo + (hi - lo) * k as f64 / 40.0,
                                        },
                                        &s,
                                    )
                                })
                                .fold(f64::INFINITY, f64::min)
                        })
                        .unwrap_or(f64::NAN);
                    out.push((b1, b2, worst));
                }
            }
            out
        }
    };
    std::fs::write(&a.out, contour_csv(&rows)).map_err(err)?;
    let pick = |better: fn(f64, f64) -> bool| {
        rows.iter()
            .filter(|r| r.2.is_finite())
            .copied()
            .reduce(|p, q| if better(q.2, p.2) { q } else { p })
    };
    let extreme = if a.scheme.is_none() {
        pick(|a, b| a > b)
    } else {
        pick(|a, b| a < b)
    };
    let (ex, ey, ev) = extreme.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
    let label = if a.scheme.is_none() { "max" } else { "min" };
    let summary = format!(
        "{} points -> {}; {label} {ev:.10} at ({ex:.4}, {ey:.4})",
        rows.len(),
        a.out.display()
    );
    Ok((
        json!({"points": rows.len(), "nx": nx, "ny": ny, "csv": a.out, "extreme": {"kind": label, "x": ex, "y": ey, "value": ev}}),
        summary,
        0,
    ))
}
