//! Integer programs with equality constraints in the total regime.
//!
//! For `A x = b` with the first `d` columns independent, let `V` bound the
//! volumes of the `(d-1)`-subsets of those columns and `Delta` the column
//! norms. If some real `alpha` with `A alpha = b` has head coordinates at
//! least `M = (n-d) V Delta` and tail coordinates at least `0`, and `b` is in
//! the lattice of `A`, then rounding `alpha` down and repairing the
//! fractional remainder with a short chain of congruences gives a
//! non-negative integer solution. [`solve_ilpe_total`] checks both
//! conditions and reports which one fails instead of assuming them.

use crate::arith::{floor, frac, isqrt_ceil, norm_sq, pow, rat_from_int, Int, Rat};
use crate::instance::{HilpInstance, IlpInstance, IlpeInstance, Instance, Solution};
use crate::lattice::{
    adjugate_det, determinant, gram_det, hnf_of_matrix, in_lattice, rank, solve_integral,
    volume_chain, LatticeError, VolumeChain,
};
use crate::lp::{feasible_point, solve_rational, LpFeasibilityProblem, LpOutcome};
use crate::matrix::Matrix;
use crate::modular::{crt_general, solve_scaled_congruence, CongruenceSystem};
use num_traits::{One, Signed, Zero};
use std::fmt;

/// State captured when an internal invariant fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    pub message: String,
    pub alpha: Vec<Rat>,
    pub betas: Vec<Int>,
    pub volumes: Vec<Int>,
}

impl Diagnostics {
    fn new(message: impl Into<String>) -> Self {
        Diagnostics {
            message: message.into(),
            alpha: Vec::new(),
            betas: Vec::new(),
            volumes: Vec::new(),
        }
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)?;
        if !self.alpha.is_empty() {
            let alpha: Vec<String> = self.alpha.iter().map(|r| r.to_string()).collect();
            write!(f, "; alpha = [{}]", alpha.join(", "))?;
        }
        if !self.betas.is_empty() {
            write!(f, "; betas = {:?}", self.betas.iter().map(|b| b.to_string()).collect::<Vec<_>>())?;
        }
        if !self.volumes.is_empty() {
            write!(f, "; volumes = {:?}", self.volumes.iter().map(|v| v.to_string()).collect::<Vec<_>>())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IlpeError {
    #[error("instance is outside the solver's regime: {0}")]
    NotInRegime(String),
    #[error("b is not in the lattice generated by the columns of A")]
    NotInLattice,
    #[error("the first {0} columns are linearly dependent; permute columns or reduce rank first")]
    DependentLeadingColumns(usize),
    #[error("A has {rows} rows but only {cols} columns; reduce rank first")]
    TooFewColumns { rows: usize, cols: usize },
    #[error("the equations are inconsistent: no real solution exists")]
    Inconsistent,
    #[error("no column choice certifies the instance as total")]
    NotFound,
    #[error("search budget of {0} candidates exhausted")]
    BudgetExceeded(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("internal invariant violated: {0}")]
    Internal(Box<Diagnostics>),
}

impl From<LatticeError> for IlpeError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::DependentLeadingColumns(d) => IlpeError::DependentLeadingColumns(d),
            other => IlpeError::Internal(Box::new(Diagnostics::new(other.to_string()))),
        }
    }
}

fn internal(message: impl Into<String>) -> IlpeError {
    IlpeError::Internal(Box::new(Diagnostics::new(message)))
}

/// `V`, `Delta` and the head threshold `M = (n-d) V Delta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VBoundedProfile {
    pub v: Int,
    pub delta: Int,
    pub m: Int,
}

/// The fractional repair: tail values `beta_{d+1}..beta_n` and head values
/// `beta_1..beta_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaChain {
    pub betas: Vec<Int>,
    pub head: Vec<Int>,
}

fn head_indices(d: usize) -> Vec<usize> {
    (0..d).collect()
}

fn check_shape(a: &Matrix) -> Result<(), IlpeError> {
    let (d, n) = (a.rows(), a.cols());
    if n < d {
        return Err(IlpeError::TooFewColumns { rows: d, cols: n });
    }
    if determinant(&a.select_columns(&head_indices(d)))?.is_zero() {
        return Err(IlpeError::DependentLeadingColumns(d));
    }
    Ok(())
}

/// `ceil(max_i ||a_i||)`.
pub fn max_column_norm(a: &Matrix) -> Int {
    a.columns()
        .iter()
        .map(|c| isqrt_ceil(&norm_sq(c)))
        .max()
        .unwrap_or_else(Int::zero)
}

pub fn compute_profile(inst: &IlpeInstance) -> Result<VBoundedProfile, IlpeError> {
    let a = &inst.a;
    check_shape(a)?;
    let (d, n) = (inst.d(), inst.n());
    let head = a.select_columns(&head_indices(d)).columns();
    let mut v = Int::one();
    for skip in 0..d {
        if d == 1 {
            break;
        }
        let subset: Vec<Vec<Int>> = head
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != skip)
            .map(|(_, c)| c.clone())
            .collect();
        v = v.max(isqrt_ceil(&gram_det(&subset)?));
    }
    let delta = max_column_norm(a);
    let m = Int::from(n - d) * &v * &delta;
    Ok(VBoundedProfile { v, delta, m })
}

/// The coarser head threshold `(n-d) Delta^d`, which dominates `M` because
/// every `(d-1)`-volume is at most `Delta^(d-1)`.
pub fn coarse_threshold(inst: &IlpeInstance) -> Int {
    let (d, n) = (inst.d(), inst.n());
    Int::from(n.saturating_sub(d)) * pow(&max_column_norm(&inst.a), d)
}

/// `beta_{d+1}..beta_n` (in index order) such that `w - sum beta_k a_k` lies
/// in the lattice of the head columns and `0 <= beta_k < V_{k-1}`.
pub fn beta_chain(a: &Matrix, w: &[Int], volumes: &VolumeChain) -> Result<Vec<Int>, IlpeError> {
    let (d, n) = (a.rows(), a.cols());
    check_shape(a)?;
    if w.len() != d {
        return Err(IlpeError::DimensionMismatch(format!("w has length {}, expected {d}", w.len())));
    }
    let mut rest = w.to_vec();
    let mut betas = vec![Int::zero(); n - d];
    // Column `k` (0-based) is peeled against the prefix `a_0..a_{k-1}`.
    for k in (d..n).rev() {
        let prefix: Vec<usize> = (0..k).collect();
        let basis = hnf_of_matrix(&a.select_columns(&prefix))?;
        let window = volumes
            .get(k)
            .ok_or_else(|| internal(format!("volume chain has no entry for prefix length {k}")))?;
        if in_lattice(&basis, &rest)?.is_some() {
            continue;
        }
        let (adj, det) = adjugate_det(basis.matrix())?;
        let det = det.abs();
        let xs = adj.mul_vec(&rest);
        let ys = adj.mul_vec(&a.column(k));
        let congruences = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| solve_scaled_congruence(x, y, &det))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| chain_failure(k, &e.to_string(), &betas, volumes))?;
        let system = CongruenceSystem::new(congruences)
            .map_err(|e| chain_failure(k, &e.to_string(), &betas, volumes))?;
        let gamma = crt_general(&system)
            .map_err(|e| chain_failure(k, &e.to_string(), &betas, volumes))?;
        let beta = gamma.residue() % window;
        if beta.is_negative() || &beta >= window {
            return Err(chain_failure(k, "beta left its window", &betas, volumes));
        }
        for (r, c) in rest.iter_mut().zip(a.column(k)) {
            *r -= &beta * c;
        }
        if cfg!(debug_assertions) && in_lattice(&basis, &rest)?.is_none() {
            return Err(chain_failure(k, "remainder left the prefix lattice", &betas, volumes));
        }
        betas[k - d] = beta;
    }
    Ok(betas)
}

fn chain_failure(k: usize, why: &str, betas: &[Int], volumes: &VolumeChain) -> IlpeError {
    IlpeError::Internal(Box::new(Diagnostics {
        message: format!("beta chain failed at column {}: {why}", k + 1),
        alpha: Vec::new(),
        betas: betas.to_vec(),
        volumes: volumes.values().to_vec(),
    }))
}

/// The integer `beta` with `(a_1..a_d) beta = w_star`.
pub fn finish_beta_head(a: &Matrix, w_star: &[Int]) -> Result<Vec<Int>, IlpeError> {
    let d = a.rows();
    if a.cols() < d {
        return Err(IlpeError::TooFewColumns { rows: d, cols: a.cols() });
    }
    solve_integral(&a.select_columns(&head_indices(d)), w_star).map_err(|e| match e {
        LatticeError::Singular => IlpeError::DependentLeadingColumns(d),
        LatticeError::NonIntegral => internal("w* is not in the lattice of the head columns"),
        other => other.into(),
    })
}

/// Solves `A x = b`, `x >= 0` integral when the instance is in the total
/// regime; otherwise says which hypothesis fails.
pub fn solve_ilpe_total(inst: &IlpeInstance) -> Result<Solution, IlpeError> {
    solve_with_chain(inst).map(|(s, _)| s)
}

/// [`solve_ilpe_total`] that also returns the repair values it used.
pub fn solve_with_chain(inst: &IlpeInstance) -> Result<(Solution, BetaChain), IlpeError> {
    let profile = compute_profile(inst).map_err(|e| match e {
        IlpeError::DependentLeadingColumns(d) => IlpeError::NotInRegime(format!(
            "the first {d} columns are linearly dependent, so A is not V-bounded in this column order"
        )),
        other => other,
    })?;
    let (a, b) = (&inst.a, &inst.b);
    let (d, n) = (inst.d(), inst.n());
    if d == n {
        return solve_square(inst);
    }

    let lower: Vec<Int> = (0..n)
        .map(|i| if i < d { profile.m.clone() } else { Int::zero() })
        .collect();
    let lp = LpFeasibilityProblem::new(a.clone(), b.clone(), lower)
        .map_err(|e| IlpeError::DimensionMismatch(e.to_string()))?;
    let alpha = match feasible_point(&lp) {
        LpOutcome::Feasible(alpha) => alpha,
        LpOutcome::Infeasible => {
            return Err(IlpeError::NotInRegime(format!(
                "no real alpha with A alpha = b, head >= M = {}, tail >= 0",
                profile.m
            )))
        }
    };

    let lattice = hnf_of_matrix(a)?;
    if in_lattice(&lattice, b)?.is_none() {
        return Err(IlpeError::NotInLattice);
    }

    let floors: Vec<Int> = alpha.iter().map(floor).collect();
    let v = a.mul_vec(&floors);
    let w: Vec<Int> = b.iter().zip(&v).map(|(bi, vi)| bi - vi).collect();
    debug_assert!({
        let fr: Vec<Rat> = alpha.iter().map(frac).collect();
        (0..d).all(|i| {
            let s: Rat = a.row(i).iter().zip(&fr).map(|(c, f)| rat_from_int(c) * f).sum();
            s == rat_from_int(&w[i])
        })
    });

    let with_alpha = |mut e: IlpeError| {
        if let IlpeError::Internal(diag) = &mut e {
            diag.alpha = alpha.clone();
        }
        e
    };

    let volumes = volume_chain(a)?;
    let betas = beta_chain(a, &w, &volumes).map_err(with_alpha)?;
    let mut w_star = w.clone();
    for (k, beta) in (d..n).zip(&betas) {
        for (r, c) in w_star.iter_mut().zip(a.column(k)) {
            *r -= beta * c;
        }
    }
    let head = finish_beta_head(a, &w_star).map_err(with_alpha)?;

    let fail = |message: String| {
        IlpeError::Internal(Box::new(Diagnostics {
            message,
            alpha: alpha.clone(),
            betas: head.iter().chain(&betas).cloned().collect(),
            volumes: volumes.values().to_vec(),
        }))
    };
    let neg_m = -&profile.m;
    if let Some(i) = head.iter().position(|h| h < &neg_m) {
        return Err(fail(format!("head beta_{} = {} is below -M = {neg_m}", i + 1, head[i])));
    }
    let x: Vec<Int> = floors
        .iter()
        .zip(head.iter().chain(&betas))
        .map(|(f, beta)| f + beta)
        .collect();
    if let Some(i) = x.iter().position(Signed::is_negative) {
        return Err(fail(format!("x_{} = {} is negative", i + 1, x[i])));
    }
    let solution = Solution::checked(&Instance::Ilpe(inst.clone()), x)
        .map_err(|e| fail(format!("solution failed verification: {e}")))?;
    Ok((solution, BetaChain { betas, head }))
}

/// `d = n`: the solution is unique if it exists.
fn solve_square(inst: &IlpeInstance) -> Result<(Solution, BetaChain), IlpeError> {
    let (adj, det) = adjugate_det(&inst.a)?;
    let num = adj.mul_vec(&inst.b);
    let alpha: Vec<Rat> = num.iter().map(|v| Rat::new(v.clone(), det.clone())).collect();
    if alpha.iter().any(Signed::is_negative) {
        return Err(IlpeError::NotInRegime(
            "the unique real solution has a negative coordinate".into(),
        ));
    }
    if !alpha.iter().all(|r| r.is_integer()) {
        return Err(IlpeError::NotInLattice);
    }
    let x: Vec<Int> = alpha.iter().map(|r| r.to_integer()).collect();
    let solution = Solution::checked(&Instance::Ilpe(inst.clone()), x)
        .map_err(|e| internal(format!("solution failed verification: {e}")))?;
    Ok((
        solution,
        BetaChain {
            betas: Vec::new(),
            head: vec![Int::zero(); inst.d()],
        },
    ))
}

/// Keeps a maximal independent set of rows, after checking that every
/// dropped row is consistent with the kept ones.
pub fn reduce_rank(inst: &IlpeInstance) -> Result<IlpeInstance, IlpeError> {
    let a = &inst.a;
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..a.rows() {
        let mut trial = kept.clone();
        trial.push(i);
        if rank(&a.select_rows(&trial)) == trial.len() {
            kept = trial;
        }
    }
    if kept.len() == a.rows() {
        return Ok(inst.clone());
    }
    if kept.is_empty() {
        // A = 0: consistent only for b = 0, and then there are no equations
        // left to keep.
        return if inst.b.iter().all(Zero::is_zero) {
            Err(IlpeError::DimensionMismatch("A is zero; every x >= 0 solves A x = 0".into()))
        } else {
            Err(IlpeError::Inconsistent)
        };
    }
    // Row i = sum_j mu_j row_{kept_j}; solve kept^T mu = row_i.
    let kept_t: Vec<Vec<Rat>> = (0..a.cols())
        .map(|c| kept.iter().map(|&r| rat_from_int(&a[(r, c)])).collect())
        .collect();
    for i in (0..a.rows()).filter(|i| !kept.contains(i)) {
        let row: Vec<Rat> = a.row(i).iter().map(rat_from_int).collect();
        let mu = solve_rational(&kept_t, &row)
            .ok_or_else(|| internal(format!("row {} is not in the span of the kept rows", i + 1)))?;
        let implied: Rat = mu
            .iter()
            .zip(&kept)
            .map(|(m, &r)| m * rat_from_int(&inst.b[r]))
            .sum();
        if implied != rat_from_int(&inst.b[i]) {
            return Err(IlpeError::Inconsistent);
        }
    }
    let b = kept.iter().map(|&r| inst.b[r].clone()).collect();
    IlpeInstance::new(a.select_rows(&kept), b).map_err(|e| internal(e.to_string()))
}

/// Limit on candidate head choices for [`permute_columns_search`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 100_000;

/// A column order `perm` (new position `i` holds old column `perm[i]`) whose
/// first `d` columns certify the instance as total.
pub fn permute_columns_search(inst: &IlpeInstance, budget: u64) -> Result<Vec<usize>, IlpeError> {
    let (d, n) = (inst.d(), inst.n());
    if n < d {
        return Err(IlpeError::TooFewColumns { rows: d, cols: n });
    }
    let mut combo: Vec<usize> = (0..d).collect();
    let mut tried = 0u64;
    loop {
        tried += 1;
        if tried > budget {
            return Err(IlpeError::BudgetExceeded(budget));
        }
        let perm: Vec<usize> = combo
            .iter()
            .copied()
            .chain((0..n).filter(|j| !combo.contains(j)))
            .collect();
        let candidate = permute(inst, &perm);
        if let Ok(profile) = compute_profile(&candidate) {
            let lower: Vec<Int> = (0..n)
                .map(|i| if i < d { profile.m.clone() } else { Int::zero() })
                .collect();
            let lp = LpFeasibilityProblem::new(candidate.a.clone(), candidate.b.clone(), lower)
                .map_err(|e| IlpeError::DimensionMismatch(e.to_string()))?;
            if matches!(feasible_point(&lp), LpOutcome::Feasible(_)) {
                return Ok(perm);
            }
        }
        if !next_combination(&mut combo, n) {
            return Err(IlpeError::NotFound);
        }
    }
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Reorders the columns: new column `i` is old column `perm[i]`.
pub fn permute(inst: &IlpeInstance, perm: &[usize]) -> IlpeInstance {
    IlpeInstance {
        a: inst.a.select_columns(perm),
        b: inst.b.clone(),
    }
}

/// Undoes [`permute`] on a solution vector.
pub fn unpermute(x: &[Int], perm: &[usize]) -> Vec<Int> {
    let mut out = vec![Int::zero(); x.len()];
    for (i, &p) in perm.iter().enumerate() {
        out[p] = x[i].clone();
    }
    out
}

/// Reduces rank, finds a certifying column order if the given one does not
/// work, and solves. The solution is in the original variable order.
pub fn solve_ilpe_auto(inst: &IlpeInstance, budget: u64) -> Result<Solution, IlpeError> {
    let reduced = reduce_rank(inst)?;
    let x = match solve_ilpe_total(&reduced) {
        Ok(s) => s.x,
        Err(IlpeError::NotInRegime(_)) => match permute_columns_search(&reduced, budget) {
            Ok(perm) => unpermute(&solve_ilpe_total(&permute(&reduced, &perm))?.x, &perm),
            Err(IlpeError::NotFound) => {
                return Err(IlpeError::NotInRegime(
                    "no choice of head columns certifies the instance as total".into(),
                ))
            }
            Err(e) => return Err(e),
        },
        Err(e) => return Err(e),
    };
    Solution::checked(&Instance::Ilpe(inst.clone()), x)
        .map_err(|e| internal(format!("solution failed verification: {e}")))
}

/// An equality instance with `slack` extra variables in front; solutions
/// project back by dropping them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub instance: IlpeInstance,
    pub slack: usize,
}

impl Reduction {
    /// Splits a solution of the reduced instance into `(slack, x)`.
    pub fn split(&self, z: &[Int]) -> (Vec<Int>, Vec<Int>) {
        (z[..self.slack].to_vec(), z[self.slack..].to_vec())
    }

    pub fn project(&self, z: &[Int]) -> Vec<Int> {
        z[self.slack..].to_vec()
    }

    /// Extends `x` by the slack it leaves, if it is feasible for the
    /// inequality rows.
    pub fn lift(&self, x: &[Int]) -> Option<Vec<Int>> {
        let a = &self.instance.a;
        let mut z = Vec::with_capacity(self.slack + x.len());
        for i in 0..self.slack {
            let used: Int = a.row(i)[self.slack..].iter().zip(x).map(|(c, v)| c * v).sum();
            let s = &self.instance.b[i] - used;
            if s.is_negative() {
                return None;
            }
            z.push(s);
        }
        z.extend_from_slice(x);
        Some(z)
    }
}

/// `A x <= b` as `[I | A] (y, x) = b`.
pub fn ilp_to_ilpe(a: &Matrix, b: &[Int]) -> Result<Reduction, IlpeError> {
    let d = a.rows();
    if b.len() != d {
        return Err(IlpeError::DimensionMismatch(format!("{d} rows but {} right-hand sides", b.len())));
    }
    let rows = (0..d)
        .map(|i| {
            let mut row: Vec<Int> = (0..d).map(|j| if i == j { Int::one() } else { Int::zero() }).collect();
            row.extend_from_slice(a.row(i));
            row
        })
        .collect();
    let instance = IlpeInstance::new(Matrix::from_rows(rows), b.to_vec())
        .map_err(|e| IlpeError::DimensionMismatch(e.to_string()))?;
    Ok(Reduction { instance, slack: d })
}

pub fn ilp_instance_to_ilpe(inst: &IlpInstance) -> Result<Reduction, IlpeError> {
    ilp_to_ilpe(&inst.a, &inst.b)
}

/// `A1 x <= b1, A2 x = b2` as `[[I, A1], [0, A2]] (y, x) = (b1, b2)`.
pub fn hilp_to_ilpe(inst: &HilpInstance) -> Result<Reduction, IlpeError> {
    let (d1, d2, n) = (inst.a1.rows(), inst.a2.rows(), inst.n());
    let mut rows = Vec::with_capacity(d1 + d2);
    for i in 0..d1 {
        let mut row: Vec<Int> = (0..d1).map(|j| if i == j { Int::one() } else { Int::zero() }).collect();
        row.extend_from_slice(inst.a1.row(i));
        rows.push(row);
    }
    for i in 0..d2 {
        let mut row = vec![Int::zero(); d1];
        row.extend_from_slice(inst.a2.row(i));
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(IlpeError::DimensionMismatch(format!("no constraints on {n} variables")));
    }
    let b: Vec<Int> = inst.b1.iter().chain(&inst.b2).cloned().collect();
    let instance = IlpeInstance::new(Matrix::from_rows(rows), b)
        .map_err(|e| IlpeError::DimensionMismatch(e.to_string()))?;
    Ok(Reduction { instance, slack: d1 })
}

/// Solves an inequality instance through the equality solver.
pub fn solve_ilp(inst: &IlpInstance, budget: u64) -> Result<Solution, IlpeError> {
    let red = ilp_instance_to_ilpe(inst)?;
    let z = solve_ilpe_auto(&red.instance, budget)?;
    Solution::checked(&Instance::Ilp(inst.clone()), red.project(&z.x))
        .map_err(|e| internal(format!("projected solution failed verification: {e}")))
}

pub fn solve_hilp(inst: &HilpInstance, budget: u64) -> Result<Solution, IlpeError> {
    let red = hilp_to_ilpe(inst)?;
    let z = solve_ilpe_auto(&red.instance, budget)?;
    Solution::checked(&Instance::Hilp(inst.clone()), red.project(&z.x))
        .map_err(|e| internal(format!("projected solution failed verification: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn inst(rows: &[&[i64]], b: &[i64]) -> IlpeInstance {
        IlpeInstance::from_i64(rows, b).unwrap()
    }

    #[test]
    fn profile_examples() {
        let p = compute_profile(&inst(&[&[1, 0, 1], &[0, 1, 1]], &[5, 5])).unwrap();
        assert_eq!((p.delta, p.v, p.m), (int(2), int(1), int(2)));
        let p = compute_profile(&inst(&[&[3, 0], &[0, 3]], &[0, 0])).unwrap();
        assert_eq!((p.delta, p.v, p.m), (int(3), int(3), int(0)));
        assert_eq!(
            compute_profile(&inst(&[&[0, 1, 0], &[0, 0, 1]], &[1, 1])),
            Err(IlpeError::DependentLeadingColumns(2))
        );
    }

    #[test]
    fn one_row_profile_has_unit_volume() {
        let p = compute_profile(&inst(&[&[3, 5, 7]], &[30])).unwrap();
        assert_eq!((p.v, p.delta, p.m), (int(1), int(7), int(14)));
        assert_eq!(coarse_threshold(&inst(&[&[3, 5, 7]], &[30])), int(14));
    }

    #[test]
    fn solve_examples() {
        let i = inst(&[&[1, 0, 1], &[0, 1, 1]], &[5, 5]);
        let s = solve_ilpe_total(&i).unwrap();
        assert!(s.is_verified());
        assert_eq!(i.a.mul_vec(&s.x), ints(&[5, 5]));

        let s = solve_ilpe_total(&inst(&[&[1, 0], &[0, 1]], &[2, 3])).unwrap();
        assert_eq!(s.x, ints(&[2, 3]));

        let cex = inst(&[&[9, 10, 9], &[0, 0, 1]], &[100, 100]);
        assert!(matches!(solve_ilpe_total(&cex), Err(IlpeError::NotInRegime(_))));
    }

    #[test]
    fn lattice_failure_is_reported() {
        let i = inst(&[&[2, 0, 2], &[0, 2, 2]], &[41, 40]);
        assert_eq!(solve_ilpe_total(&i), Err(IlpeError::NotInLattice));
        let sq = inst(&[&[2, 0], &[0, 2]], &[3, 4]);
        assert_eq!(solve_ilpe_total(&sq), Err(IlpeError::NotInLattice));
        let neg = inst(&[&[1, 0], &[0, 1]], &[-1, 4]);
        assert!(matches!(solve_ilpe_total(&neg), Err(IlpeError::NotInRegime(_))));
    }

    #[test]
    fn beta_chain_examples() {
        let a = Matrix::from_i64(&[&[2, 0, 1], &[0, 2, 1]]);
        let chain = volume_chain(&a).unwrap();
        assert_eq!(chain.get(2), Some(&int(4)));
        assert_eq!(beta_chain(&a, &ints(&[1, 1]), &chain).unwrap(), ints(&[1]));

        let a = Matrix::from_i64(&[&[3, 0, 1], &[0, 3, 1]]);
        let chain = volume_chain(&a).unwrap();
        assert_eq!(beta_chain(&a, &ints(&[2, 2]), &chain).unwrap(), ints(&[2]));

        // Already in the head lattice.
        assert_eq!(beta_chain(&a, &ints(&[3, -6]), &chain).unwrap(), ints(&[0]));
    }

    #[test]
    fn head_examples() {
        let id = Matrix::from_i64(&[&[1, 0, 5], &[0, 1, 5]]);
        assert_eq!(finish_beta_head(&id, &ints(&[0, 0])).unwrap(), ints(&[0, 0]));
        assert_eq!(finish_beta_head(&id, &ints(&[-1, 4])).unwrap(), ints(&[-1, 4]));
        let tri = Matrix::from_i64(&[&[2, 1], &[0, 1]]);
        assert_eq!(finish_beta_head(&tri, &ints(&[4, 2])).unwrap(), ints(&[1, 2]));
    }

    #[test]
    fn reduce_rank_examples() {
        let r = reduce_rank(&inst(&[&[1, 2], &[2, 4]], &[3, 6])).unwrap();
        assert_eq!(r, inst(&[&[1, 2]], &[3]));
        assert_eq!(reduce_rank(&inst(&[&[1, 2], &[2, 4]], &[3, 7])), Err(IlpeError::Inconsistent));
        let full = inst(&[&[1, 0, 1], &[0, 1, 1]], &[5, 5]);
        assert_eq!(reduce_rank(&full).unwrap(), full);
    }

    #[test]
    fn column_search_examples() {
        let i = inst(&[&[1, 0, 1, 2], &[0, 1, 1, 1]], &[500, 400]);
        assert_eq!(permute_columns_search(&i, DEFAULT_SEARCH_BUDGET).unwrap(), vec![0, 1, 2, 3]);

        let cex = inst(&[&[9, 10, 9], &[0, 0, 1]], &[100, 100]);
        assert_eq!(permute_columns_search(&cex, DEFAULT_SEARCH_BUDGET), Err(IlpeError::NotFound));

        let zero_first = inst(&[&[0, 1, 0, 1], &[0, 0, 1, 1]], &[300, 300]);
        let perm = permute_columns_search(&zero_first, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_ne!(perm[0], 0);
        assert_ne!(perm[1], 0);
        let s = solve_ilpe_auto(&zero_first, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(s.is_verified());
        assert_eq!(permute_columns_search(&zero_first, 1), Err(IlpeError::BudgetExceeded(1)));
    }

    #[test]
    fn ilp_reduction_examples() {
        let r = ilp_to_ilpe(&Matrix::from_i64(&[&[2]]), &ints(&[5])).unwrap();
        assert_eq!(r.instance, inst(&[&[1, 2]], &[5]));
        let r = ilp_to_ilpe(&Matrix::from_i64(&[&[1, 0], &[0, 1]]), &ints(&[3, 4])).unwrap();
        assert_eq!(r.instance.a, Matrix::from_i64(&[&[1, 0, 1, 0], &[0, 1, 0, 1]]));
        assert_eq!(r.split(&ints(&[1, 0, 2, 4])), (ints(&[1, 0]), ints(&[2, 4])));
    }

    #[test]
    fn hilp_reduction_examples() {
        let h = HilpInstance::new(
            Matrix::from_i64(&[&[1]]),
            ints(&[4]),
            Matrix::from_i64(&[&[2]]),
            ints(&[6]),
        )
        .unwrap();
        let r = hilp_to_ilpe(&h).unwrap();
        assert_eq!(r.instance, inst(&[&[1, 1], &[0, 2]], &[4, 6]));

        let eq_only = HilpInstance::new(
            Matrix::zeros(0, 2),
            vec![],
            Matrix::from_i64(&[&[1, 2]]),
            ints(&[7]),
        )
        .unwrap();
        let r = hilp_to_ilpe(&eq_only).unwrap();
        assert_eq!((r.slack, r.instance.clone()), (0, inst(&[&[1, 2]], &[7])));
    }

    #[test]
    fn ilp_and_hilp_solve_through_reduction() {
        let ilp = IlpInstance::new(Matrix::from_i64(&[&[2, 3], &[1, 1]]), ints(&[40, 15])).unwrap();
        assert!(solve_ilp(&ilp, DEFAULT_SEARCH_BUDGET).unwrap().is_verified());
        let h = HilpInstance::new(
            Matrix::from_i64(&[&[1, 1, 1]]),
            ints(&[200]),
            Matrix::from_i64(&[&[1, 2, 3]]),
            ints(&[300]),
        )
        .unwrap();
        assert!(solve_hilp(&h, DEFAULT_SEARCH_BUDGET).unwrap().is_verified());
    }

    fn small_matrix(d: usize, n: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-6i64..=6, d * n).prop_map(move |v| {
            Matrix::from_rows(v.chunks(n).map(|r| r.iter().map(|&x| int(x)).collect()).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn deep_targets_are_solved(a in small_matrix(2, 4), y in proptest::collection::vec(0i64..50, 4)) {
            let probe = IlpeInstance::new(a.clone(), vec![Int::zero(); 2]).unwrap();
            prop_assume!(compute_profile(&probe).is_ok());
            let m = compute_profile(&probe).unwrap().m;
            let y: Vec<Int> = y.iter().map(|&v| &m + int(v)).collect();
            let b = a.mul_vec(&y);
            let i = IlpeInstance::new(a, b).unwrap();
            let (s, chain) = solve_with_chain(&i).unwrap();
            prop_assert!(s.is_verified());
            let vols = volume_chain(&i.a).unwrap();
            for (k, beta) in chain.betas.iter().enumerate() {
                prop_assert!(!beta.is_negative());
                prop_assert!(beta < vols.get(k + 2).unwrap());
            }
        }

        #[test]
        fn ilp_lift_round_trips(a in small_matrix(2, 3), x in proptest::collection::vec(0i64..6, 3), b in proptest::collection::vec(-10i64..40, 2)) {
            let b: Vec<Int> = b.iter().map(|&v| int(v)).collect();
            let x: Vec<Int> = x.iter().map(|&v| int(v)).collect();
            let red = ilp_to_ilpe(&a, &b).unwrap();
            let ilp = Instance::Ilp(IlpInstance::new(a, b).unwrap());
            let feasible = ilp.verify(&x).unwrap();
            match red.lift(&x) {
                Some(z) => {
                    prop_assert!(feasible);
                    prop_assert!(Instance::Ilpe(red.instance.clone()).verify(&z).unwrap());
                    prop_assert_eq!(red.project(&z), x);
                }
                None => prop_assert!(!feasible),
            }
        }
    }
}
