//! Brute-force reference implementations.
//!
//! Nothing here calls the solvers, the lattice module or the LP module: the
//! point is to have a second, dumber opinion. Everything is bounded by a
//! [`SearchBudget`], and a search that ran out of box says so
//! ([`IntconeVerdict::NoSolutionInBox`]) instead of claiming infeasibility.
//! A verdict is only upgraded to [`IntconeVerdict::Infeasible`] when
//! sign-constant rows bound every enumerated variable inside the box.

use crate::arith::{gcd_all, Int, Rat};
use crate::instance::{IlpeInstance, Instance, Solution, UssInstance};
use crate::matrix::Matrix;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{HashSet, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    /// Cap on table entries or enumerated assignments.
    pub max_states: u64,
    /// Cap on each enumerated coordinate.
    pub max_coordinate: Int,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_states: 10_000_000,
            max_coordinate: Int::from(1_000),
        }
    }
}

impl SearchBudget {
    pub fn new(max_states: u64, max_coordinate: Int) -> Result<Self, OracleError> {
        if max_states == 0 || !max_coordinate.is_positive() {
            return Err(OracleError::InvalidArguments("budget limits must be positive".into()));
        }
        Ok(SearchBudget {
            max_states,
            max_coordinate,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("no non-negative solution exists")]
    NoSolution,
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("weights are not coprime; the Frobenius number is undefined")]
    NotCoprime,
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
}

fn over(what: impl Into<String>) -> OracleError {
    OracleError::BudgetExceeded(what.into())
}

/// Reachability table for `sum a_i x_i = v`, `0 <= v <= limit`, recording
/// for each reachable `v > 0` the index of one coin that reaches it.
fn coin_table(a: &[u64], limit: usize) -> Vec<Option<usize>> {
    let mut last: Vec<Option<usize>> = vec![None; limit + 1];
    let mut reached = vec![false; limit + 1];
    reached[0] = true;
    for v in 1..=limit {
        for (i, &c) in a.iter().enumerate() {
            let c = c as usize;
            if c <= v && reached[v - c] {
                reached[v] = true;
                last[v] = Some(i);
                break;
            }
        }
    }
    last
}

fn small_weights(a: &[Int]) -> Result<Vec<u64>, OracleError> {
    a.iter()
        .map(|v| {
            v.to_u64()
                .filter(|&x| x > 0)
                .ok_or_else(|| OracleError::InvalidArguments(format!("weight {v} is not a small positive integer")))
        })
        .collect()
}

/// Pseudopolynomial DP over `[0, b]` with witness reconstruction.
pub fn dp_uss(inst: &UssInstance, budget: &SearchBudget) -> Result<Solution, OracleError> {
    let b = inst.target();
    if b.is_negative() {
        return Err(OracleError::NoSolution);
    }
    let states = b.to_u64().filter(|&v| v < budget.max_states).ok_or_else(|| {
        over(format!("target {b} needs more than {} table entries", budget.max_states))
    })?;
    let limit = states as usize;
    let a = small_weights(inst.weights())?;
    let last = coin_table(&a, limit);
    if limit > 0 && last[limit].is_none() {
        return Err(OracleError::NoSolution);
    }
    let mut x = vec![0u64; a.len()];
    let mut v = limit;
    while v > 0 {
        let i = last[v].expect("every value on the witness path is reachable");
        x[i] += 1;
        v -= a[i] as usize;
    }
    let x: Vec<Int> = x.into_iter().map(Int::from).collect();
    Solution::checked(&Instance::Uss(inst.clone()), inst.lift(&x))
        .map_err(|e| OracleError::InvalidArguments(e.to_string()))
}

/// Largest target not representable by the coins, or `-1` when every
/// non-negative target is (some coin is `1`).
pub fn brute_frobenius(a: &[Int], budget: &SearchBudget) -> Result<Int, OracleError> {
    if a.is_empty() {
        return Err(OracleError::InvalidArguments("no coins".into()));
    }
    let mut coins = small_weights(a)?;
    coins.sort_unstable();
    coins.dedup();
    if !gcd_all(a).is_one() {
        return Err(OracleError::NotCoprime);
    }
    if coins[0] == 1 {
        return Ok(Int::from(-1));
    }
    // Every target >= a_1 a_n is representable, so scanning below it finds
    // the largest gap.
    let ceiling = coins[0]
        .checked_mul(*coins.last().expect("non-empty"))
        .filter(|&c| c < budget.max_states)
        .ok_or_else(|| over(format!("scan up to a_1 a_n exceeds {} entries", budget.max_states)))?;
    let last = coin_table(&coins, ceiling as usize);
    let gap = (1..=ceiling as usize)
        .rev()
        .find(|&v| last[v].is_none())
        .expect("a_1 - 1 >= 1 is never representable");
    Ok(Int::from(gap))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntconeVerdict {
    Solution(Solution),
    /// No solution with the enumerated coordinates inside the box.
    NoSolutionInBox,
    /// No solution at all: the box provably contains every candidate.
    Infeasible,
}

impl IntconeVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, IntconeVerdict::Solution(_))
    }
}

fn det_laplace(m: &[Vec<Int>]) -> Int {
    match m.len() {
        0 => Int::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        n => {
            let mut total = Int::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Int>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = &m[0][j] * det_laplace(&minor);
                if j % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            total
        }
    }
}

fn cofactor_adjugate(m: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = m.len();
    let mut adj = vec![vec![Int::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<Int>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let c = det_laplace(&minor);
            adj[j][i] = if (i + j) % 2 == 0 { c } else { -c };
        }
    }
    adj
}

/// Rank of a small integer matrix, by rational elimination.
fn rank_of(rows: &[Vec<Int>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|v| Rat::from_integer(v.clone())).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in c..cols {
                    let delta = &f * &m[r][k];
                    m[i][k] -= delta;
                }
            }
        }
        r += 1;
    }
    r
}

/// Upper bounds on each variable implied by rows whose coefficients all
/// share a sign; `Err(())` if such a row alone is unsatisfiable.
fn row_bounds(a: &Matrix, b: &[Int]) -> Result<Vec<Option<Int>>, ()> {
    let n = a.cols();
    let mut bounds: Vec<Option<Int>> = vec![None; n];
    for i in 0..a.rows() {
        let row = a.row(i);
        let (coeffs, rhs): (Vec<Int>, Int) = if row.iter().all(|v| !v.is_negative()) {
            (row.to_vec(), b[i].clone())
        } else if row.iter().all(|v| !v.is_positive()) {
            (row.iter().map(|v| -v).collect(), -&b[i])
        } else {
            continue;
        };
        if rhs.is_negative() {
            return Err(());
        }
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_positive() {
                let u = rhs.div_floor(c);
                bounds[j] = Some(match bounds[j].take() {
                    Some(old) if old < u => old,
                    _ => u,
                });
            }
        }
    }
    Ok(bounds)
}

struct Search<'a> {
    a: &'a Matrix,
    b: &'a [Int],
    pivots: Vec<usize>,
    rows: Vec<usize>,
    free: Vec<usize>,
    caps: Vec<Int>,
    adj: Vec<Vec<Int>>,
    det: Int,
    /// Rows with all coefficients non-negative, used for pruning.
    nonneg_rows: Vec<usize>,
    visited: u64,
    max_states: u64,
}

impl Search<'_> {
    fn run(&mut self, depth: usize, x: &mut Vec<Int>, partial: &mut Vec<Int>) -> Result<Option<Vec<Int>>, OracleError> {
        if depth == self.free.len() {
            self.visited += 1;
            if self.visited > self.max_states {
                return Err(over(format!("more than {} assignments", self.max_states)));
            }
            return Ok(self.complete(x));
        }
        let j = self.free[depth];
        let cap = self.caps[depth].clone();
        let mut v = Int::zero();
        while v <= cap {
            x[j] = v.clone();
            let mut pruned = false;
            for (slot, &i) in self.nonneg_rows.iter().enumerate() {
                partial[slot] += &self.a[(i, j)] * &v;
                if partial[slot] > self.b[i] {
                    pruned = true;
                }
            }
            let found = if pruned { None } else { self.run(depth + 1, x, partial)? };
            for (slot, &i) in self.nonneg_rows.iter().enumerate() {
                partial[slot] -= &self.a[(i, j)] * &v;
            }
            if found.is_some() {
                return Ok(found);
            }
            if pruned {
                break;
            }
            v += 1;
        }
        x[j] = Int::zero();
        Ok(None)
    }

    /// Solves for the pivot variables given the free ones.
    fn complete(&self, x: &mut [Int]) -> Option<Vec<Int>> {
        let rhs: Vec<Int> = self
            .rows
            .iter()
            .map(|&i| {
                let used: Int = self.free.iter().map(|&j| &self.a[(i, j)] * &x[j]).sum();
                &self.b[i] - used
            })
            .collect();
        for (k, &p) in self.pivots.iter().enumerate() {
            let num: Int = self.adj[k].iter().zip(&rhs).map(|(c, r)| c * r).sum();
            let (q, r) = num.div_rem(&self.det);
            if !r.is_zero() || q.is_negative() {
                for &p in &self.pivots {
                    x[p] = Int::zero();
                }
                return None;
            }
            x[p] = q;
        }
        let ok = (0..self.a.rows()).all(|i| {
            let lhs: Int = self.a.row(i).iter().zip(x.iter()).map(|(c, v)| c * v).sum();
            lhs == self.b[i]
        });
        let out = ok.then(|| x.to_vec());
        for &p in &self.pivots {
            x[p] = Int::zero();
        }
        out
    }
}

/// Decides `b in intcone(A)` by enumerating the variables outside a set of
/// independent pivot columns and solving for the pivots exactly.
pub fn brute_intcone(inst: &IlpeInstance, budget: &SearchBudget) -> Result<IntconeVerdict, OracleError> {
    let (a, b) = (&inst.a, &inst.b);
    let n = a.cols();
    let Ok(bounds) = row_bounds(a, b) else {
        return Ok(IntconeVerdict::Infeasible);
    };

    // Unbounded variables make the best pivots: they are never enumerated.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| match (&bounds[i], &bounds[j]) {
        (None, None) => i.cmp(&j),
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some(u), Some(v)) => v.cmp(u).then(i.cmp(&j)),
    });
    let columns: Vec<Vec<Int>> = (0..n).map(|j| a.column(j)).collect();
    let mut pivots: Vec<usize> = Vec::new();
    for &j in &order {
        let mut trial: Vec<Vec<Int>> = pivots.iter().map(|&p| columns[p].clone()).collect();
        trial.push(columns[j].clone());
        if rank_of(&trial) == trial.len() {
            pivots.push(j);
        }
    }
    let r = pivots.len();
    let mut rows: Vec<usize> = Vec::new();
    for i in 0..a.rows() {
        let mut trial: Vec<Vec<Int>> = rows.iter().map(|&k| pivots.iter().map(|&p| a[(k, p)].clone()).collect()).collect();
        trial.push(pivots.iter().map(|&p| a[(i, p)].clone()).collect());
        if rank_of(&trial) == trial.len() {
            rows.push(i);
        }
        if rows.len() == r {
            break;
        }
    }
    let square: Vec<Vec<Int>> = rows
        .iter()
        .map(|&i| pivots.iter().map(|&p| a[(i, p)].clone()).collect())
        .collect();
    let det = det_laplace(&square);
    let adj = cofactor_adjugate(&square);

    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    let mut complete_box = true;
    let caps: Vec<Int> = free
        .iter()
        .map(|&j| match &bounds[j] {
            Some(u) if u <= &budget.max_coordinate => u.clone(),
            _ => {
                complete_box = false;
                budget.max_coordinate.clone()
            }
        })
        .collect();
    let nonneg_rows: Vec<usize> = (0..a.rows())
        .filter(|&i| a.row(i).iter().all(|v| !v.is_negative()))
        .collect();
    let mut search = Search {
        a,
        b,
        pivots,
        rows,
        free,
        caps,
        adj,
        det,
        nonneg_rows: nonneg_rows.clone(),
        visited: 0,
        max_states: budget.max_states,
    };
    let mut x = vec![Int::zero(); n];
    let mut partial = vec![Int::zero(); nonneg_rows.len()];
    match search.run(0, &mut x, &mut partial)? {
        Some(x) => Solution::checked(&Instance::Ilpe(inst.clone()), x)
            .map(IntconeVerdict::Solution)
            .map_err(|e| OracleError::InvalidArguments(e.to_string())),
        None if complete_box => Ok(IntconeVerdict::Infeasible),
        None => Ok(IntconeVerdict::NoSolutionInBox),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagonalOutcome {
    /// Every checked point is in the integer cone (relative to the box).
    Holds { checked: u64 },
    /// A lattice point `A x` with real `x >= t` that is provably not in the
    /// integer cone.
    CounterexamplePoint(Vec<Int>),
    /// A point the bounded search could neither solve nor rule out.
    Unresolved(Vec<Int>),
}

/// Homogeneous inequalities `c . y <= 0` describing `cone(A)`, obtained by
/// Fourier-Motzkin elimination of `x` from `y = A x`, `x >= 0`.
fn cone_inequalities(a: &Matrix) -> Vec<Vec<Int>> {
    let (d, n) = (a.rows(), a.cols());
    // Variables: x_0..x_{n-1}, y_0..y_{d-1}.
    let mut system: Vec<Vec<Int>> = Vec::new();
    for i in 0..d {
        let mut row: Vec<Int> = a.row(i).to_vec();
        row.extend((0..d).map(|k| if k == i { -Int::one() } else { Int::zero() }));
        system.push(row.iter().map(|v| -v).collect());
        system.push(row);
    }
    for j in 0..n {
        let mut row = vec![Int::zero(); n + d];
        row[j] = -Int::one();
        system.push(row);
    }
    for k in 0..n {
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for row in system {
            if row[k].is_positive() {
                pos.push(row);
            } else if row[k].is_negative() {
                neg.push(row);
            } else {
                keep.push(row);
            }
        }
        let mut seen: HashSet<Vec<Int>> = keep.iter().cloned().collect();
        for p in &pos {
            for q in &neg {
                let (s, t) = (-&q[k], p[k].clone());
                let combined: Vec<Int> = p.iter().zip(q).map(|(u, v)| &s * u + &t * v).collect();
                let g = gcd_all(&combined);
                if g.is_zero() {
                    continue;
                }
                let reduced: Vec<Int> = combined.iter().map(|v| v / &g).collect();
                if seen.insert(reduced.clone()) {
                    keep.push(reduced);
                }
            }
        }
        system = keep;
    }
    system.into_iter().map(|row| row[n..].to_vec()).filter(|c| !c.iter().all(Zero::is_zero)).collect()
}

/// Residues modulo `m` reachable as integer combinations of the columns;
/// equals `L(A) mod m` whenever `m Z^d` is a sublattice of `L(A)`.
fn residue_classes(a: &Matrix, m: u64, max_states: u64) -> Result<HashSet<Vec<u64>>, OracleError> {
    let d = a.rows() as u32;
    let size = m.checked_pow(d).filter(|&s| s <= max_states);
    if size.is_none() {
        return Err(over(format!("residue table of {m}^{d} entries")));
    }
    let mi = Int::from(m);
    let cols: Vec<Vec<u64>> = (0..a.cols())
        .map(|j| a.column(j).iter().map(|v| v.mod_floor(&mi).to_u64().expect("reduced")).collect())
        .collect();
    let start = vec![0u64; a.rows()];
    let mut seen: HashSet<Vec<u64>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for c in &cols {
            let next: Vec<u64> = v.iter().zip(c).map(|(x, y)| (x + y) % m).collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

/// Checks that every lattice point `z = A x` with real `x >= t 1` and `z` in
/// the bounding box of `A [t, t + side]^n` lies in `intcone(A)`, where
/// `side = budget.max_coordinate`.
pub fn check_diagonal_property(a: &Matrix, t: &Int, budget: &SearchBudget) -> Result<DiagonalOutcome, OracleError> {
    let (d, n) = (a.rows(), a.cols());
    if (0..n).any(|j| a.column(j).iter().all(Zero::is_zero)) {
        return Err(OracleError::InvalidArguments("A has a zero column".into()));
    }
    let rows: Vec<Vec<Int>> = (0..d).map(|i| a.row(i).to_vec()).collect();
    if rank_of(&rows) < d {
        return Err(OracleError::InvalidArguments("A must have full row rank".into()));
    }
    let side = &budget.max_coordinate;
    let hi_t = t + side;

    // A sublattice m Z^d: |det| of any d independent columns.
    let columns: Vec<Vec<Int>> = (0..n).map(|j| a.column(j)).collect();
    let mut head: Vec<usize> = Vec::new();
    for j in 0..n {
        let mut trial: Vec<Vec<Int>> = head.iter().map(|&p| columns[p].clone()).collect();
        trial.push(columns[j].clone());
        if rank_of(&trial) == trial.len() {
            head.push(j);
        }
    }
    let square: Vec<Vec<Int>> = (0..d).map(|i| head.iter().map(|&p| a[(i, p)].clone()).collect()).collect();
    let m = det_laplace(&square).abs().to_u64().ok_or_else(|| over("determinant too large"))?;
    let classes = residue_classes(a, m, budget.max_states)?;
    let cone = cone_inequalities(a);

    let ranges: Vec<(Int, Int)> = (0..d)
        .map(|i| {
            a.row(i).iter().fold((Int::zero(), Int::zero()), |(lo, hi), c| {
                let (u, v) = (c * t, c * &hi_t);
                (lo + (&u).min(&v), hi + u.max(v))
            })
        })
        .collect();
    let total: Int = ranges.iter().map(|(lo, hi)| hi - lo + 1).product();
    if total > Int::from(budget.max_states) {
        return Err(over(format!("{total} candidate points")));
    }
    let shift: Vec<Int> = (0..d).map(|i| a.row(i).iter().map(|c| c * t).sum()).collect();
    let inner = SearchBudget {
        max_states: budget.max_states,
        max_coordinate: ranges.iter().map(|(lo, hi)| lo.abs().max(hi.abs())).sum::<Int>() + 1,
    };
    let mi = Int::from(m);

    let mut z: Vec<Int> = ranges.iter().map(|(lo, _)| lo.clone()).collect();
    let mut checked = 0u64;
    loop {
        let residue: Vec<u64> = z.iter().map(|v| v.mod_floor(&mi).to_u64().expect("reduced")).collect();
        let y: Vec<Int> = z.iter().zip(&shift).map(|(u, s)| u - s).collect();
        let in_cone = cone
            .iter()
            .all(|c| !c.iter().zip(&y).map(|(u, v)| u * v).sum::<Int>().is_positive());
        if in_cone && classes.contains(&residue) {
            checked += 1;
            let inst = IlpeInstance::new(a.clone(), z.clone())
                .map_err(|e| OracleError::InvalidArguments(e.to_string()))?;
            match brute_intcone(&inst, &inner)? {
                IntconeVerdict::Solution(_) => {}
                IntconeVerdict::Infeasible => return Ok(DiagonalOutcome::CounterexamplePoint(z)),
                IntconeVerdict::NoSolutionInBox => return Ok(DiagonalOutcome::Unresolved(z)),
            }
        }
        // Odometer step.
        let mut i = 0;
        loop {
            if i == d {
                return Ok(DiagonalOutcome::Holds { checked });
            }
            z[i] += 1;
            if z[i] <= ranges[i].1 {
                break;
            }
            z[i] = ranges[i].0.clone();
            i += 1;
        }
    }
}
