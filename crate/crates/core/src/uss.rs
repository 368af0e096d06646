//! Unbounded subset sum in the total regime.
//!
//! When `gcd(a) | b` and `b (i - 1) >= a_i^2` for every `k < i <= n`, a
//! solution exists and [`solve_uss`] finds one by peeling off the largest
//! weight: with `d = gcd(a_1..a_{n-1})` it fixes `x_n = b * a_n^{-1} mod d`
//! so that `d | b - x_n a_n`, divides the rest of the instance by `d`, and
//! continues with one weight fewer. The remaining target never drops out of
//! the regime, so the loop only bottoms out in [`fallback_solve`] once at
//! most `k` weights remain.

use crate::arith::{gcd_all, modulo, Int};
use crate::instance::{Instance, Solution, UssInstance};
use crate::modular::mod_inverse;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UssError {
    #[error("k must be at least 1 (the bound a_i^2/(i-1) is undefined at i = 1)")]
    ZeroK,
    #[error("instance is outside the solver's regime: {0}")]
    NotInRegime(String),
    #[error("no non-negative solution exists")]
    NoSolution,
    #[error("search budget of {0} steps exhausted")]
    ResourceExceeded(u64),
    #[error("{0} and {1} are not coprime")]
    NotCoprime(Int, Int),
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Work limits for [`fallback_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FallbackBudget {
    /// Elementary steps (relaxations or search nodes).
    pub steps: u64,
    /// Largest smallest-weight for which the residue table is used.
    pub residue_table_limit: u64,
}

impl Default for FallbackBudget {
    fn default() -> Self {
        FallbackBudget {
            steps: 100_000_000,
            residue_table_limit: 1_000_000,
        }
    }
}

/// Which regime hypotheses an instance satisfies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegimeReport {
    /// Smallest `k >= 1` for which [`check_regime`] holds.
    pub k_min: Option<usize>,
    pub gcd_divides: bool,
    pub erdos_graham: bool,
}

fn gcd_divides(inst: &UssInstance) -> bool {
    let g = gcd_all(inst.weights());
    inst.target().is_multiple_of(&g)
}

/// `b (i - 1) >= a_i^2` for the 1-based index `i`.
fn deep_enough(b: &Int, a_i: &Int, i: usize) -> bool {
    b * Int::from(i - 1) >= a_i * a_i
}

/// True iff `gcd(a) | b` and `b (i - 1) >= a_i^2` for all `k < i <= n`.
pub fn check_regime(inst: &UssInstance, k: usize) -> Result<bool, UssError> {
    if k == 0 {
        return Err(UssError::ZeroK);
    }
    let b = inst.target();
    Ok(gcd_divides(inst)
        && inst
            .weights()
            .iter()
            .enumerate()
            .skip(k)
            .all(|(idx, a)| deep_enough(b, a, idx + 1)))
}

/// Enough for a solution to exist: `gcd(a) | b` and `b (n - 1) >= a_n^2`.
/// A single weight only needs to divide the target.
pub fn erdos_graham_holds(inst: &UssInstance) -> bool {
    if !gcd_divides(inst) {
        return false;
    }
    let n = inst.n();
    n == 1 || deep_enough(inst.target(), &inst.weights()[n - 1], n)
}

pub fn regime_report(inst: &UssInstance) -> RegimeReport {
    let divides = gcd_divides(inst);
    let k_min = divides.then(|| {
        let b = inst.target();
        let last_failure = inst
            .weights()
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(idx, a)| !deep_enough(b, a, idx + 1))
            .map(|(idx, _)| idx + 1)
            .max();
        last_failure.unwrap_or(1).max(1)
    });
    RegimeReport {
        k_min,
        gcd_divides: divides,
        erdos_graham: erdos_graham_holds(inst),
    }
}

/// `a1 a2 - a1 - a2`, the largest target two coprime coins cannot make.
pub fn sylvester_frobenius(a1: &Int, a2: &Int) -> Result<Int, UssError> {
    if !(a1 > &Int::one() && a1 < a2) {
        return Err(UssError::InvalidArguments(format!(
            "need 1 < a1 < a2, got ({a1}, {a2})"
        )));
    }
    if !a1.gcd(a2).is_one() {
        return Err(UssError::NotCoprime(a1.clone(), a2.clone()));
    }
    Ok(a1 * a2 - a1 - a2)
}

/// Solves a regime-valid instance. The returned solution is in the caller's
/// input weight order and has been verified exactly.
pub fn solve_uss(inst: &UssInstance, k: usize) -> Result<Solution, UssError> {
    solve_uss_with_budget(inst, k, FallbackBudget::default())
}

pub fn solve_uss_with_budget(
    inst: &UssInstance,
    k: usize,
    budget: FallbackBudget,
) -> Result<Solution, UssError> {
    if !check_regime(inst, k)? {
        return Err(UssError::NotInRegime(format!(
            "need gcd(a) | b and b(i-1) >= a_i^2 for all {k} < i <= {}",
            inst.n()
        )));
    }
    let x = peel(inst, k, budget, true)?;
    let lifted = inst.lift(&x);
    Solution::checked(&Instance::Uss(inst.clone()), lifted)
        .map_err(|e| UssError::Internal(format!("solution failed verification: {e}")))
}

/// Runs the peeling recursion without checking the regime first. Outside
/// the regime a step can leave a negative remainder, reported as
/// [`UssError::NoSolution`] even though the instance may be feasible.
pub fn solve_uss_unchecked(inst: &UssInstance, k: usize) -> Result<Solution, UssError> {
    if k == 0 {
        return Err(UssError::ZeroK);
    }
    if !gcd_divides(inst) {
        return Err(UssError::NoSolution);
    }
    let x = peel(inst, k, FallbackBudget::default(), false)?;
    Solution::checked(&Instance::Uss(inst.clone()), inst.lift(&x))
        .map_err(|e| UssError::Internal(format!("solution failed verification: {e}")))
}

/// The iterative form of the recursion over `n, n-1, ...`.
fn peel(
    inst: &UssInstance,
    k: usize,
    budget: FallbackBudget,
    in_regime: bool,
) -> Result<Vec<Int>, UssError> {
    let g = gcd_all(inst.weights());
    let mut a: Vec<Int> = inst.weights().iter().map(|v| v / &g).collect();
    let mut b = inst.target() / &g;
    let mut x = vec![Int::zero(); a.len()];
    let mut m = a.len();

    while m > k.max(1) {
        let d = gcd_all(&a[..m - 1]);
        let last = &a[m - 1];
        let xm = if d.is_one() {
            Int::zero()
        } else {
            let inv = mod_inverse(last, &d).map_err(|_| {
                UssError::Internal(format!("gcd({d}, {last}) != 1 after normalization"))
            })?;
            modulo(&(modulo(&b, &d) * inv), &d)
        };
        let rest = &b - &xm * last;
        if rest.is_negative() && !in_regime {
            return Err(UssError::NoSolution);
        }
        if rest.is_negative() || !rest.is_multiple_of(&d) {
            return Err(UssError::Internal(format!(
                "peeling weight {last} left remainder {rest} (d = {d}, x = {xm})"
            )));
        }
        b = rest / &d;
        for v in a[..m - 1].iter_mut() {
            *v /= &d;
        }
        x[m - 1] = xm;
        m -= 1;
        if cfg!(debug_assertions) && in_regime {
            let reduced = UssInstance::from_sorted(a[..m].to_vec(), b.clone());
            debug_assert!(
                check_regime(&reduced, k).unwrap_or(false),
                "reduced instance left the regime: {reduced:?}"
            );
        }
    }

    let base = fallback_vector(&a[..m], &b, budget).map_err(|e| match e {
        UssError::NoSolution if !in_regime => UssError::NoSolution,
        UssError::NoSolution => UssError::Internal(format!(
            "base case {:?} with target {b} is infeasible despite the regime",
            &a[..m]
        )),
        other => other,
    })?;
    x[..m].clone_from_slice(&base);
    Ok(x)
}

/// Exact feasibility decision with witness for small instances; the base
/// case of [`solve_uss`]. The solution is in input weight order.
pub fn fallback_solve(inst: &UssInstance) -> Result<Solution, UssError> {
    fallback_solve_with_budget(inst, FallbackBudget::default())
}

pub fn fallback_solve_with_budget(
    inst: &UssInstance,
    budget: FallbackBudget,
) -> Result<Solution, UssError> {
    let x = fallback_vector(inst.weights(), inst.target(), budget)?;
    Solution::checked(&Instance::Uss(inst.clone()), inst.lift(&x))
        .map_err(|e| UssError::Internal(format!("fallback witness failed verification: {e}")))
}

/// `a` strictly increasing and positive.
fn fallback_vector(a: &[Int], b: &Int, budget: FallbackBudget) -> Result<Vec<Int>, UssError> {
    if b.is_negative() {
        return Err(UssError::NoSolution);
    }
    let g = gcd_all(a);
    if !b.is_multiple_of(&g) {
        return Err(UssError::NoSolution);
    }
    if a.len() == 1 {
        return Ok(vec![b / &a[0]]);
    }
    match a[0].to_u64() {
        Some(a1) if a1 <= budget.residue_table_limit => residue_table(a, b, a1 as usize, budget),
        _ => branch_and_bound(a, b, budget),
    }
}

/// Shortest paths over residues modulo `a_1`: `dist[r]` is the smallest
/// value `= r (mod a_1)` representable by `a_2..a_n`. Then `b` is
/// representable iff `dist[b mod a_1] <= b`.
fn residue_table(a: &[Int], b: &Int, a1: usize, budget: FallbackBudget) -> Result<Vec<Int>, UssError> {
    let steps = a1 as u64 * (a.len() as u64 - 1);
    if steps > budget.steps {
        return Err(UssError::ResourceExceeded(budget.steps));
    }
    let modulus = Int::from(a1);
    let residues: Vec<usize> = a[1..]
        .iter()
        .map(|w| modulo(w, &modulus).to_usize().expect("residue below a_1"))
        .collect();

    let mut dist: Vec<Option<Int>> = vec![None; a1];
    let mut pred: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); a1];
    let mut done = vec![false; a1];
    let mut heap = BinaryHeap::new();
    dist[0] = Some(Int::zero());
    heap.push(Reverse((Int::zero(), 0usize)));
    while let Some(Reverse((value, r))) = heap.pop() {
        if done[r] {
            continue;
        }
        done[r] = true;
        for (j, (w, &wr)) in a[1..].iter().zip(&residues).enumerate() {
            let next = (r + wr) % a1;
            let candidate = &value + w;
            if dist[next].as_ref().is_none_or(|cur| candidate < *cur) {
                dist[next] = Some(candidate.clone());
                pred[next] = (r, j + 1);
                heap.push(Reverse((candidate, next)));
            }
        }
    }

    let target_r = modulo(b, &modulus).to_usize().expect("residue below a_1");
    let Some(best) = dist[target_r].clone() else {
        return Err(UssError::NoSolution);
    };
    if &best > b {
        return Err(UssError::NoSolution);
    }
    let mut x = vec![Int::zero(); a.len()];
    let mut r = target_r;
    while r != 0 {
        let (prev, j) = pred[r];
        x[j] += 1;
        r = prev;
    }
    x[0] = (b - best) / &a[0];
    Ok(x)
}

/// Depth-first search over `x_n, ..., x_2` (largest counts first), pruned by
/// the gcd of the weights still unassigned.
fn branch_and_bound(a: &[Int], b: &Int, budget: FallbackBudget) -> Result<Vec<Int>, UssError> {
    let n = a.len();
    // prefix_gcd[j] = gcd(a_1..a_j)
    let prefix_gcd: Vec<Int> = (0..=n).map(|j| gcd_all(&a[..j])).collect();
    let mut x = vec![Int::zero(); n];
    let mut steps = 0u64;

    fn go(
        level: usize,
        rest: Int,
        a: &[Int],
        prefix_gcd: &[Int],
        x: &mut [Int],
        steps: &mut u64,
        limit: u64,
    ) -> Result<bool, UssError> {
        *steps += 1;
        if *steps > limit {
            return Err(UssError::ResourceExceeded(limit));
        }
        if level == 0 {
            let (q, r) = rest.div_rem(&a[0]);
            if r.is_zero() {
                x[0] = q;
                return Ok(true);
            }
            return Ok(false);
        }
        let w = &a[level];
        let mut count = &rest / w;
        loop {
            let left = &rest - &count * w;
            if left.is_multiple_of(&prefix_gcd[level]) {
                x[level] = count.clone();
                if go(level - 1, left, a, prefix_gcd, x, steps, limit)? {
                    return Ok(true);
                }
            }
            if count.is_zero() {
                break;
            }
            count -= 1;
        }
        x[level] = Int::zero();
        Ok(false)
    }

    if go(n - 1, b.clone(), a, &prefix_gcd, &mut x, &mut steps, budget.steps)? {
        Ok(x)
    } else {
        Err(UssError::NoSolution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    fn uss(a: &[i64], b: i64) -> UssInstance {
        UssInstance::from_i64(a, b).unwrap()
    }

    /// Plain reachability table up to `b`; independent of both solver paths.
    fn representable(a: &[i64], b: i64) -> bool {
        let mut ok = vec![false; b as usize + 1];
        ok[0] = true;
        for v in 1..=b as usize {
            ok[v] = a.iter().any(|&w| w as usize <= v && ok[v - w as usize]);
        }
        ok[b as usize]
    }

    #[test]
    fn regime_examples() {
        assert!(check_regime(&uss(&[6, 10, 15], 120), 1).unwrap());
        assert!(!check_regime(&uss(&[3, 5], 7), 1).unwrap());
        assert!(!check_regime(&uss(&[2, 4], 7), 1).unwrap());
        assert_eq!(check_regime(&uss(&[3, 5], 7), 0), Err(UssError::ZeroK));
        // k >= n makes the depth condition vacuous.
        assert!(check_regime(&uss(&[3, 5], 7), 2).unwrap());
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve_uss(&uss(&[6, 10, 15], 120), 1).unwrap().x, ints(&[20, 0, 0]));
        assert_eq!(solve_uss(&uss(&[7], 21), 1).unwrap().x, ints(&[3]));
        // 8 < 25, so (3, 5) with target 8 sits outside the regime; the
        // recursion itself still goes through: x_2 = 8 * 5^-1 mod 3 = 1.
        assert!(matches!(solve_uss(&uss(&[3, 5], 8), 1), Err(UssError::NotInRegime(_))));
        let s = solve_uss_unchecked(&uss(&[3, 5], 8), 1).unwrap();
        assert_eq!(s.x, ints(&[1, 1]));
        assert!(s.is_verified());
        assert_eq!(solve_uss_unchecked(&uss(&[3, 5], 7), 1), Err(UssError::NoSolution));
        assert!(matches!(solve_uss(&uss(&[3, 5], 7), 1), Err(UssError::NotInRegime(_))));
    }

    #[test]
    fn solve_handles_common_factor_and_input_order() {
        // gcd 2 is divided out first; duplicates are merged.
        let inst = uss(&[20, 12, 12, 30], 1000);
        let s = solve_uss(&inst, 1).unwrap();
        assert_eq!(s.x.len(), 4);
        assert!(s.is_verified());
    }

    #[test]
    fn fallback_examples() {
        assert_eq!(fallback_solve(&uss(&[3, 5], 4)), Err(UssError::NoSolution));
        assert_eq!(fallback_solve(&uss(&[3, 5], 7)), Err(UssError::NoSolution));
        assert_eq!(fallback_solve(&uss(&[3, 5], 8)).unwrap().x, ints(&[1, 1]));
        assert_eq!(fallback_solve(&uss(&[4, 6], 9)), Err(UssError::NoSolution));
    }

    #[test]
    fn fallback_branch_and_bound_path() {
        let big = FallbackBudget {
            residue_table_limit: 0,
            ..FallbackBudget::default()
        };
        assert_eq!(fallback_solve_with_budget(&uss(&[3, 5], 7), big), Err(UssError::NoSolution));
        assert_eq!(fallback_solve_with_budget(&uss(&[3, 5], 8), big).unwrap().x, ints(&[1, 1]));
        let a1 = 2_000_003i64;
        let s = fallback_solve(&uss(&[a1, a1 + 1], 3 * a1 + 2 * (a1 + 1))).unwrap();
        assert_eq!(s.x, ints(&[3, 2]));
        let tiny = FallbackBudget {
            steps: 3,
            residue_table_limit: 0,
        };
        assert_eq!(
            fallback_solve_with_budget(&uss(&[7, 11, 13], 1000), tiny),
            Err(UssError::ResourceExceeded(3))
        );
    }

    #[test]
    fn erdos_graham_examples() {
        assert!(!erdos_graham_holds(&uss(&[3, 5], 13)));
        assert!(erdos_graham_holds(&uss(&[3, 5], 25)));
        assert!(!erdos_graham_holds(&uss(&[4, 6], 25)));
        assert!(erdos_graham_holds(&uss(&[7], 21)));
        assert!(!erdos_graham_holds(&uss(&[7], 20)));
    }

    #[test]
    fn sylvester_examples() {
        let s = |a: i64, b: i64| sylvester_frobenius(&Int::from(a), &Int::from(b));
        assert_eq!(s(3, 5).unwrap(), Int::from(7));
        assert_eq!(s(2, 3).unwrap(), Int::from(1));
        assert_eq!(s(5, 11).unwrap(), Int::from(39));
        assert!(matches!(s(4, 6), Err(UssError::NotCoprime(..))));
        assert!(matches!(s(5, 3), Err(UssError::InvalidArguments(_))));
    }

    #[test]
    fn regime_report_k_min() {
        let r = regime_report(&uss(&[1, 10, 11], 61));
        assert!(r.erdos_graham);
        assert_eq!(r.k_min, Some(2));
        let r = regime_report(&uss(&[2, 4], 7));
        assert_eq!(r.k_min, None);
        assert!(!r.gcd_divides);
        let r = regime_report(&uss(&[6, 10, 15], 120));
        assert_eq!(r.k_min, Some(1));
    }

    #[test]
    fn sylvester_gap_is_sharp() {
        for a1 in 2..12i64 {
            for a2 in a1 + 1..15 {
                if a1.gcd(&a2) != 1 {
                    continue;
                }
                let g = a1 * a2 - a1 - a2;
                assert!(fallback_solve(&uss(&[a1, a2], g)).is_err());
                for b in g + 1..=g + a1 * a2 {
                    assert!(fallback_solve(&uss(&[a1, a2], b)).is_ok(), "({a1},{a2}) b={b}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn fallback_agrees_with_table(
            mut a in proptest::collection::vec(1i64..30, 1..4),
            b in 0i64..300,
        ) {
            a.sort();
            a.dedup();
            let inst = uss(&a, b);
            let got = fallback_solve(&inst);
            prop_assert_eq!(got.is_ok(), representable(&a, b));
        }

        #[test]
        fn regime_solutions_verify(
            mut a in proptest::collection::vec(1i64..60, 2..6),
            extra in 0i64..5000,
        ) {
            a.sort();
            a.dedup();
            let n = a.len();
            let need = a.iter().enumerate().skip(1)
                .map(|(i, &w)| (w * w + i as i64 - 1) / i as i64)
                .max()
                .unwrap_or(0);
            let g = a.iter().fold(0i64, |acc, &w| acc.gcd(&w));
            let b = Integer::div_ceil(&(need + extra), &g) * g;
            let inst = uss(&a, b);
            prop_assume!(check_regime(&inst, 1).unwrap());
            let s = solve_uss(&inst, 1).unwrap();
            prop_assert!(s.is_verified());
            prop_assert_eq!(s.x.len(), n);
            prop_assert!(representable(&a, b));
        }
    }
}
