//! Solvers against the brute-force oracles.

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use totality::ilpe::{hilp_to_ilpe, solve_ilpe_total, IlpeError};
use totality::oracle::{brute_intcone, dp_uss, IntconeVerdict, OracleError, SearchBudget};
use totality::uss::{check_regime, fallback_solve, solve_uss, sylvester_frobenius, UssError};
use totality::{HilpInstance, IlpeInstance, Instance, Int, Matrix, UssInstance};

fn int(v: i64) -> Int {
    Int::from(v)
}

fn matrix(d: usize, n: usize, lo: i64, hi: i64) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(lo..=hi, d * n)
        .prop_map(move |v| Matrix::from_rows(v.chunks(n).map(|r| r.iter().map(|&x| int(x)).collect()).collect()))
}

#[test]
fn sylvester_boundary_for_fallback() {
    for a1 in 2..=12i64 {
        for a2 in a1 + 1..=30 {
            let Ok(g) = sylvester_frobenius(&int(a1), &int(a2)) else { continue };
            let g: i64 = g.try_into().unwrap();
            let none = UssInstance::from_i64(&[a1, a2], g).unwrap();
            assert_eq!(fallback_solve(&none), Err(UssError::NoSolution), "({a1}, {a2})");
            for b in g + 1..=g + a1 * a2 {
                let inst = UssInstance::from_i64(&[a1, a2], b).unwrap();
                assert!(fallback_solve(&inst).unwrap().is_verified(), "({a1}, {a2}), b = {b}");
            }
        }
    }
}

#[test]
fn lower_bound_family_is_infeasible_for_brute_search() {
    let g = totality::gen_lower_bound_instance(2).unwrap();
    let budget = SearchBudget::new(10_000_000, &g.p + 2).unwrap();
    assert_eq!(brute_intcone(&g.to_ilpe(), &budget).unwrap(), IntconeVerdict::Infeasible);
    // The fractional point is deep, yet the solver must not claim a solution.
    assert!(solve_ilpe_total(&g.to_ilpe()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dp_and_fallback_agree(a in proptest::collection::vec(1i64..60, 1..5), b in 0i64..3000) {
        let inst = UssInstance::from_i64(&a, b).unwrap();
        let budget = SearchBudget::default();
        match (dp_uss(&inst, &budget), fallback_solve(&inst)) {
            (Ok(x), Ok(y)) => prop_assert!(x.is_verified() && y.is_verified()),
            (Err(OracleError::NoSolution), Err(UssError::NoSolution)) => {}
            (x, y) => prop_assert!(false, "dp {:?} vs fallback {:?}", x, y),
        }
    }

    #[test]
    fn regime_solutions_match_dp(a in proptest::collection::vec(1i64..120, 1..6), extra in 0i64..5000) {
        let mut w = a.clone();
        w.sort_unstable();
        w.dedup();
        let g = w.iter().fold(0i64, |acc, &v| num_integer::gcd(acc, v));
        let need = (1..w.len()).map(|i| (w[i] * w[i] + i as i64 - 1) / i as i64).max().unwrap_or(0);
        let b = (need + extra + g - 1) / g * g;
        let inst = UssInstance::from_i64(&a, b).unwrap();
        prop_assume!(check_regime(&inst, 1).unwrap());
        prop_assert!(solve_uss(&inst, 1).unwrap().is_verified());
        prop_assert!(dp_uss(&inst, &SearchBudget::default()).is_ok());
    }

    #[test]
    fn ilpe_solutions_are_confirmed(
        shape in (1usize..=3).prop_flat_map(|d| (Just(d), d..=5usize)),
        seed in proptest::collection::vec(-4i64..=4, 15),
        b in proptest::collection::vec(-60i64..=400, 3),
    ) {
        let (d, n) = shape;
        let a = Matrix::from_rows((0..d).map(|i| (0..n).map(|j| int(seed[i * 5 + j])).collect()).collect());
        let b: Vec<Int> = b[..d].iter().map(|&v| int(v)).collect();
        let inst = IlpeInstance::new(a, b).unwrap();
        let budget = SearchBudget::new(200_000, int(400)).unwrap();
        match solve_ilpe_total(&inst) {
            Ok(s) => {
                prop_assert!(s.is_verified());
                match brute_intcone(&inst, &budget) {
                    Ok(IntconeVerdict::Infeasible) => prop_assert!(false, "oracle refutes a verified solution"),
                    Ok(IntconeVerdict::NoSolutionInBox) => {
                        // Only possible when the solution leaves the box.
                        prop_assert!(s.x.iter().any(|v| v > &int(400)));
                    }
                    _ => {}
                }
            }
            Err(IlpeError::Internal(diag)) => prop_assert!(false, "internal failure: {}", diag),
            Err(_) => {}
        }
    }

    #[test]
    fn hilp_reduction_is_sound_both_ways(
        a1 in matrix(1, 3, -3, 3),
        a2 in matrix(1, 3, -3, 3),
        x in proptest::collection::vec(0i64..5, 3),
        b1 in -5i64..20,
        b2 in -5i64..20,
    ) {
        let h = HilpInstance::new(a1, vec![int(b1)], a2, vec![int(b2)]).unwrap();
        let red = hilp_to_ilpe(&h).unwrap();
        let x: Vec<Int> = x.iter().map(|&v| int(v)).collect();
        let original = Instance::Hilp(h.clone()).verify(&x).unwrap();
        let lifted = red.lift(&x).map(|z| Instance::Ilpe(red.instance.clone()).verify(&z).unwrap());
        prop_assert_eq!(original, lifted == Some(true));
        // Conversely any solution of the reduced system projects to one of the original.
        let slack = red.lift(&x).map(|z| z[0].clone()).unwrap_or_else(Int::zero);
        let mut z = vec![slack];
        z.extend(x.iter().cloned());
        if !z[0].is_negative() && Instance::Ilpe(red.instance.clone()).verify(&z).unwrap() {
            prop_assert!(Instance::Hilp(h).verify(&red.project(&z)).unwrap());
        }
    }
}
