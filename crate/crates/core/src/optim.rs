//! Box-constrained Nelder–Mead minimization.

/// Stopping rules for [`nelder_mead`].
#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop when the simplex spread in function value drops below this.
    pub ftol: f64,
    /// Stop when the simplex diameter drops below this.
    pub xtol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            ftol: 1e-13,
            xtol: 1e-10,
        }
    }
}

/// Minimize `f` starting at `x0` with initial simplex offsets `step`, keeping
/// every trial point inside `[lower, upper]` by clamping. Returns the best
/// point and its value.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: NelderMeadOptions,
) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(step.len() == n && lower.len() == n && upper.len() == n);
    let clamp = |x: &mut Vec<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut start = x0.to_vec();
    clamp(&mut start);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(&start, &mut evals);
    simplex.push((start.clone(), v0));
    for i in 0..n {
        let mut x = start.clone();
        x[i] += step[i];
        if x[i] > upper[i] {
            x[i] = start[i] - step[i];
        }
        clamp(&mut x);
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= opts.ftol && diameter <= opts.xtol.max(1e-3 * opts.xtol) {
            break;
        }
        if diameter <= opts.xtol {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for i in 0..n {
                centroid[i] += x[i] / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = (0..n)
                .map(|i| centroid[i] + t * (simplex[n].0[i] - centroid[i]))
                .collect();
            for i in 0..n {
                p[i] = p[i].clamp(lower[i], upper[i]);
            }
            p
        };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let best_x = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for i in 0..n {
                x[i] = best_x[i] + 0.5 * (x[i] - best_x[i]);
            }
            *v = eval(x, &mut evals);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v)
}

/// Projected gradient descent on a box with Barzilai–Borwein steps and
/// Armijo backtracking.
pub fn projected_descent<F, G>(
    f: F,
    grad: G,
    x0: Vec<f64>,
    lower: &[f64],
    upper: &[f64],
    iters: usize,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let project = |y: &mut Vec<f64>| {
        for (i, v) in y.iter_mut().enumerate() {
            *v = v.clamp(lower[i], upper[i]);
        }
    };
    let mut x = x0;
    let mut fx = f(&x);
    let mut g = grad(&x);
    let mut step = 1.0;
    for _ in 0..iters {
        let mut accepted = None;
        let mut t = step;
        while t > 1e-14 {
            let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            project(&mut y);
            let decrease: f64 = g
                .iter()
                .zip(x.iter().zip(&y))
                .map(|(gi, (a, b))| gi * (a - b))
                .sum();
            let fy = f(&y);
            if fy <= fx - 1e-4 * decrease {
                accepted = Some((y, fy));
                break;
            }
            t *= 0.5;
        }
        let Some((y, fy)) = accepted else {
            break;
        };
        let gy = grad(&y);
        let s: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        let moved = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let sy: f64 = s
            .iter()
            .zip(gy.iter().zip(&g))
            .map(|(si, (a, b))| si * (a - b))
            .sum();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        step = if sy > 0.0 {
            (ss / sy).clamp(1e-6, 1e3)
        } else {
            (2.0 * t).min(1e3)
        };
        let gain = fx - fy;
        x = y;
        fx = fy;
        g = gy;
        if moved < 1e-11 || gain < 1e-16 {
            break;
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            max_evals: 5000,
            ..Default::default()
        };
        let (x, v) = nelder_mead(
            f,
            &[-1.2, 1.0],
            &[0.1, 0.1],
            &[-5.0, -5.0],
            &[5.0, 5.0],
            opts,
        );
        assert!(v < 1e-12, "{x:?} {v}");
        assert!((x[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn respects_bounds() {
        let f = |x: &[f64]| x[0];
        let (x, _) = nelder_mead(
            f,
            &[0.5],
            &[0.1],
            &[0.2],
            &[1.0],
            NelderMeadOptions::default(),
        );
        assert_eq!(x[0], 0.2);
    }
}
