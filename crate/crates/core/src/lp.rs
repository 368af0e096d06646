//! Exact rational feasibility linear programming.
//!
//! Finds `alpha` with `A alpha = b` and `alpha >= lower` componentwise using
//! a phase-1 simplex over rationals. Pivoting follows Bland's rule, so the
//! method terminates and the same problem always yields the same vertex.

use crate::arith::{rat_from_int, Int, Rat};
use crate::matrix::Matrix;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// `A alpha = b`, `alpha_i >= lower_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpFeasibilityProblem {
    pub a: Matrix,
    pub b: Vec<Int>,
    pub lower: Vec<Int>,
}

impl LpFeasibilityProblem {
    pub fn new(a: Matrix, b: Vec<Int>, lower: Vec<Int>) -> Result<Self, LpError> {
        if a.rows() != b.len() {
            return Err(LpError::DimensionMismatch(format!(
                "{} rows but {} right-hand sides",
                a.rows(),
                b.len()
            )));
        }
        if a.cols() != lower.len() {
            return Err(LpError::DimensionMismatch(format!(
                "{} columns but {} lower bounds",
                a.cols(),
                lower.len()
            )));
        }
        Ok(LpFeasibilityProblem { a, b, lower })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible(Vec<Rat>),
    Infeasible,
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[Rat]> {
        match self {
            LpOutcome::Feasible(p) => Some(p),
            LpOutcome::Infeasible => None,
        }
    }
}

struct Tableau {
    /// `m` constraint rows of width `cols + 1`; the last entry is the rhs.
    rows: Vec<Vec<Rat>>,
    /// Reduced costs, with the negated objective value in the last slot.
    cost: Vec<Rat>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * p;
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (v, p) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= &f * p;
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex to optimality with Bland's rule.
    fn optimize(&mut self) {
        loop {
            let Some(enter) = (0..self.cols).find(|&j| self.cost[j].is_negative()) else {
                return;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            // Phase 1 is bounded below by zero, so a leaving row always exists.
            let (r, _) = leave.expect("phase-1 objective is bounded");
            self.pivot(r, enter);
        }
    }
}

/// Any `alpha` with `A alpha = b` and `alpha >= lower`, as exact rationals;
/// [`LpOutcome::Infeasible`] iff none exists.
pub fn feasible_point(p: &LpFeasibilityProblem) -> LpOutcome {
    let (m, n) = (p.a.rows(), p.a.cols());
    // alpha = lower + alpha', alpha' >= 0.
    let shifted: Vec<Int> = p
        .a
        .mul_vec(&p.lower)
        .iter()
        .zip(&p.b)
        .map(|(al, b)| b - al)
        .collect();

    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = shifted[i].is_negative();
        let sign = |v: &Int| if flip { rat_from_int(&-v) } else { rat_from_int(v) };
        let mut row: Vec<Rat> = p.a.row(i).iter().map(sign).collect();
        row.extend((0..m).map(|k| if k == i { Rat::from_integer(1.into()) } else { Rat::zero() }));
        row.push(sign(&shifted[i]));
        rows.push(row);
    }
    let mut cost = vec![Rat::zero(); cols + 1];
    for row in &rows {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[cols] -= &row[cols];
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
        cols,
    };
    t.optimize();
    if !t.cost[cols].is_zero() {
        return LpOutcome::Infeasible;
    }

    let mut alpha: Vec<Rat> = p.lower.iter().map(rat_from_int).collect();
    for (i, &var) in t.basis.iter().enumerate() {
        if var < n {
            alpha[var] += &t.rows[i][cols];
        }
    }
    debug_assert!(residual_is_zero(p, &alpha));
    LpOutcome::Feasible(alpha)
}

fn residual_is_zero(p: &LpFeasibilityProblem, alpha: &[Rat]) -> bool {
    (0..p.a.rows()).all(|i| {
        let lhs: Rat = p
            .a
            .row(i)
            .iter()
            .zip(alpha)
            .map(|(a, x)| rat_from_int(a) * x)
            .sum();
        lhs == rat_from_int(&p.b[i])
    })
}

/// Solves a (possibly non-square) rational system `M y = c` by Gauss-Jordan
/// elimination, returning one solution (free variables set to zero) or
/// `None` when the system is inconsistent.
pub(crate) fn solve_rational(m: &[Vec<Rat>], c: &[Rat]) -> Option<Vec<Rat>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rat>> = m
        .iter()
        .zip(c)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| !aug[i][col].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let inv = aug[r][col].recip();
        for v in aug[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = aug[r].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    if aug[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut y = vec![Rat::zero(); cols];
    for (i, &col) in pivots.iter().enumerate() {
        y[col] = aug[i][cols].clone();
    }
    Some(y)
}
