//! Dense two-phase simplex for small linear programs.
//!
//! Solves `maximize cᵀx` subject to rows `aᵀx {≤, ≥, =} b` and `x ≥ 0`.
//! Pricing is Dantzig's rule; after a run of degenerate pivots it falls back
//! to Bland's rule, which cannot cycle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-12;
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    /// Objective coefficients, maximized.
    pub objective: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Relation, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
}

impl LpResult {
    /// The result if optimal, else an [`Error::Lp`].
    pub fn optimal(self) -> Result<Self> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(Error::Lp("infeasible".into())),
            LpStatus::Unbounded => Err(Error::Lp("unbounded".into())),
        }
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(&self) -> LpResult {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    m: usize,
    n: usize,
    /// Columns: structural, slack/surplus, artificial, then the right-hand side.
    width: usize,
    first_art: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.objective.len();
        let m = lp.rows.len();
        let rows: Vec<(Vec<f64>, Relation, f64)> = lp
            .rows
            .iter()
            .map(|(a, rel, b)| {
                if *b < 0.0 {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a.iter().map(|v| -v).collect(), flipped, -b)
                } else {
                    (a.clone(), *rel, *b)
                }
            })
            .collect();
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let first_art = n + n_slack;
        let width = first_art + n_art + 1;
        let mut data = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let (mut s, mut a) = (n, first_art);
        for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
            let row = &mut data[i * width..(i + 1) * width];
            row[..n].copy_from_slice(coeffs);
            row[width - 1] = *rhs;
            match rel {
                Relation::Le => {
                    row[s] = 1.0;
                    basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -1.0;
                    s += 1;
                    row[a] = 1.0;
                    basis[i] = a;
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = 1.0;
                    basis[i] = a;
                    a += 1;
                }
            }
        }
        Self {
            m,
            n,
            width,
            first_art,
            data,
            basis,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn pivot(&mut self, r: usize, col: usize, cost: &mut [f64]) {
        let w = self.width;
        let p = self.at(r, col);
        for v in &mut self.data[r * w..(r + 1) * w] {
            *v /= p;
        }
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        let f = cost[col];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            cost[col] = 0.0;
        }
        self.basis[r] = col;
    }

    /// Reduced-cost row for maximizing `c` over the current basis. The last
    /// entry holds the objective value.
    fn pricing_row(&self, c: &[f64]) -> Vec<f64> {
        let mut cost = vec![0.0; self.width];
        for (j, cj) in c.iter().enumerate() {
            cost[j] = -cj;
        }
        for i in 0..self.m {
            let cb = c.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..self.width {
                    cost[j] += cb * self.at(i, j);
                }
            }
        }
        cost
    }

    /// Pivots until optimal over columns `< limit`. Returns false if unbounded.
    fn optimize(&mut self, cost: &mut [f64], limit: usize) -> bool {
        let mut degenerate = 0usize;
        let max_iter = 50 * (self.m + self.width) + 1000;
        for _ in 0..max_iter {
            let bland = degenerate >= DEGENERATE_RUN;
            let mut enter = None;
            let mut best = -COST_EPS;
            for (j, &cj) in cost[..limit].iter().enumerate() {
                if cj < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = cj;
                }
            }
            let Some(col) = enter else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, col);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    let better = match leave {
                        None => true,
                        Some((k, r)) => {
                            ratio < r - 1e-15
                                || (ratio <= r + 1e-15 && self.basis[i] < self.basis[k])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return false;
            };
            if ratio <= 1e-15 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, col, cost);
        }
        log::warn!("simplex iteration cap reached");
        true
    }

    fn run(mut self, c: &[f64]) -> LpResult {
        let infeasible = |n| LpResult {
            status: LpStatus::Infeasible,
            objective: f64::NAN,
            x: vec![0.0; n],
        };
        let n_total = self.width - 1;
        if self.first_art < n_total {
            // phase one: maximize −Σ artificials
            let mut c1 = vec![0.0; n_total];
            for v in &mut c1[self.first_art..] {
                *v = -1.0;
            }
            let mut cost = self.pricing_row(&c1);
            self.optimize(&mut cost, n_total);
            let scale = 1.0 + (0..self.m).map(|i| self.rhs(i).abs()).fold(0.0, f64::max);
            if cost[self.width - 1] < -1e-9 * scale {
                return infeasible(self.n);
            }
            // drive zero-level artificials out of the basis
            for i in 0..self.m {
                if self.basis[i] >= self.first_art {
                    let col = (0..self.first_art)
                        .filter(|&j| self.at(i, j).abs() > 1e-9)
                        .max_by(|&a, &b| self.at(i, a).abs().total_cmp(&self.at(i, b).abs()));
                    if let Some(col) = col {
                        self.pivot(i, col, &mut cost);
                    }
                }
            }
        }
        let mut cost = self.pricing_row(c);
        if !self.optimize(&mut cost, self.first_art) {
            return LpResult {
                status: LpStatus::Unbounded,
                objective: f64::INFINITY,
                x: vec![0.0; self.n],
            };
        }
        let mut x = vec![0.0; self.n];
        for i in 0..self.m {
            if self.basis[i] < self.n {
                x[self.basis[i]] = self.rhs(i).max(0.0);
            }
        }
        let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
        LpResult {
            status: LpStatus::Optimal,
            objective,
            x,
        }
    }
}
