//! Instances that sit just outside the total regime.
//!
//! [`gen_lower_bound_instance`] builds, for each `d >= 2`, a `d x (d+1)`
//! system whose real solution is deep in the positive orthant (every
//! coordinate above `Delta^d / (20 sqrt d)`) and whose target lies in the
//! lattice, yet which has no non-negative integer solution. The reason is
//! purely modular: every row forces the last variable into one residue
//! class, and the smallest value in that class already overshoots the
//! target. [`certify_infeasible`] records that argument so it can be
//! replayed against the instance alone.

use crate::arith::{rat_from_int, Int, Rat};
use crate::instance::{decs, Dec, IlpeInstance};
use crate::matrix::Matrix;
use crate::modular::{crt_general, mod_inverse, Congruence, CongruenceSystem};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Largest upper end accepted by [`primes_in_range`].
pub const PRIME_SEARCH_LIMIT: u64 = 100_000_000;

/// Largest window width accepted by [`primes_in_range`].
pub const PRIME_WINDOW_LIMIT: u64 = 10_000_000;

/// How many values of `c` the generator tries before giving up.
pub const MAX_WINDOW_RETRIES: u64 = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HardnessError {
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("instance does not have the expected shape: {0}")]
    Shape(String),
    #[error("no certificate: {0}")]
    NotCertified(String),
    #[error("certificate does not replay: {0}")]
    Replay(String),
    #[error("generated instance failed validation: {0}")]
    Invalid(String),
}

fn to_u64(v: &Int, what: &str) -> Result<u64, HardnessError> {
    v.to_u64()
        .ok_or_else(|| HardnessError::BudgetExceeded(format!("{what} = {v} is out of range")))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// All primes in `[lo, hi]`, ascending, by trial division.
pub fn primes_in_range(lo: &Int, hi: &Int) -> Result<Vec<Int>, HardnessError> {
    if lo > hi {
        return Err(HardnessError::InvalidArguments(format!("empty range [{lo}, {hi}]")));
    }
    if hi < &Int::from(2) {
        return Ok(Vec::new());
    }
    let lo = if lo.is_negative() { Int::zero() } else { lo.clone() };
    let (lo, hi) = (to_u64(&lo, "lo")?, to_u64(hi, "hi")?);
    if hi > PRIME_SEARCH_LIMIT {
        return Err(HardnessError::BudgetExceeded(format!(
            "upper end {hi} exceeds {PRIME_SEARCH_LIMIT}"
        )));
    }
    if hi - lo >= PRIME_WINDOW_LIMIT {
        return Err(HardnessError::BudgetExceeded(format!(
            "window [{lo}, {hi}] is wider than {PRIME_WINDOW_LIMIT}"
        )));
    }
    Ok((lo..=hi).filter(|&n| is_prime(n)).map(Int::from).collect())
}

/// The generated system together with its fractional witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundInstance {
    pub d: usize,
    /// Window constant the primes were drawn with.
    pub c: u64,
    /// `p_1 > p_2 > ... > p_d`.
    pub primes: Vec<Int>,
    pub p_last: Int,
    /// Product of `primes`.
    pub p: Int,
    /// `max p_i`.
    pub delta: Int,
    pub a: Matrix,
    pub b: Vec<Int>,
    pub alpha: Vec<Rat>,
}

impl LowerBoundInstance {
    pub fn to_ilpe(&self) -> IlpeInstance {
        IlpeInstance::new(self.a.clone(), self.b.clone()).expect("generator builds a d x (d+1) system")
    }

    /// `alpha_i > Delta^d / (20 sqrt d)`, compared as
    /// `400 d alpha_i^2 > Delta^(2d)`.
    pub fn clears_threshold(&self, alpha: &Rat) -> bool {
        clears_threshold(alpha, &self.delta, self.d)
    }

    /// Checks every structural property the construction promises.
    pub fn validate(&self) -> Result<(), HardnessError> {
        let d = self.d;
        let bad = |m: String| Err(HardnessError::Invalid(m));
        if self.primes.len() != d || self.a.rows() != d || self.a.cols() != d + 1 {
            return bad(format!("expected {d} primes and a {d}x{} matrix", d + 1));
        }
        if !self.primes.windows(2).all(|w| w[0] > w[1]) {
            return bad("primes are not strictly decreasing".into());
        }
        if let Some(p) = self.primes.iter().chain([&self.p_last]).find(|p| !is_prime_int(p)) {
            return bad(format!("{p} is not prime"));
        }
        if self.primes.contains(&self.p_last) {
            return bad(format!("p_last = {} repeats a head prime", self.p_last));
        }
        if self.p != self.primes.iter().product::<Int>() || self.delta != self.primes[0] {
            return bad("P or Delta does not match the primes".into());
        }
        let (lo, hi) = prime_window(self.c, d);
        if self.primes.iter().any(|p| p < &lo || p > &hi) {
            return bad(format!("a head prime lies outside [{lo}, {hi}]"));
        }
        if !in_last_window(&self.p_last, &self.delta, d) {
            return bad(format!("p_last = {} is outside [Delta/(2 sqrt d), Delta/sqrt d]", self.p_last));
        }
        let expected = lower_bound_matrix(&self.primes, &self.p_last);
        if self.a != expected {
            return bad("matrix is not [p_i e_i | p_last 1]".into());
        }
        let target = lower_bound_target(&self.primes, &self.p_last, &self.p);
        if self.b != target {
            return bad("b_i != p_last (P - 1) - p_i".into());
        }
        for i in 0..d {
            let lhs: Rat = (0..=d).map(|j| rat_from_int(&self.a[(i, j)]) * &self.alpha[j]).sum();
            if lhs != rat_from_int(&self.b[i]) {
                return bad(format!("row {} of A alpha differs from b", i + 1));
            }
        }
        if let Some(i) = self.alpha.iter().position(|al| !self.clears_threshold(al)) {
            return bad(format!("alpha_{} = {} does not clear the threshold", i + 1, self.alpha[i]));
        }
        Ok(())
    }
}

fn is_prime_int(p: &Int) -> bool {
    p.to_u64().is_some_and(is_prime)
}

pub fn clears_threshold(alpha: &Rat, delta: &Int, d: usize) -> bool {
    if !alpha.is_positive() {
        return false;
    }
    let lhs = Rat::from_integer(Int::from(400 * d)) * alpha * alpha;
    lhs > rat_from_int(&num_traits::pow(delta.clone(), 2 * d))
}

/// `[c d (d-1), c d^2]`.
fn prime_window(c: u64, d: usize) -> (Int, Int) {
    let (c, d) = (Int::from(c), Int::from(d));
    (&c * &d * (&d - 1), &c * &d * &d)
}

/// `Delta / (2 sqrt d) <= p <= Delta / sqrt d`, squared.
fn in_last_window(p: &Int, delta: &Int, d: usize) -> bool {
    let d = Int::from(d);
    let p2 = p * p;
    let delta2 = delta * delta;
    &d * &p2 <= delta2 && Int::from(4) * &d * &p2 >= delta2
}

fn lower_bound_matrix(primes: &[Int], p_last: &Int) -> Matrix {
    let d = primes.len();
    let mut a = Matrix::zeros(d, d + 1);
    for (i, p) in primes.iter().enumerate() {
        a[(i, i)] = p.clone();
        a[(i, d)] = p_last.clone();
    }
    a
}

fn lower_bound_target(primes: &[Int], p_last: &Int, p: &Int) -> Vec<Int> {
    primes.iter().map(|pi| p_last * (p - 1) - pi).collect()
}

/// The hard instance for dimension `d`. Deterministic in `d`.
pub fn gen_lower_bound_instance(d: usize) -> Result<LowerBoundInstance, HardnessError> {
    if d < 2 {
        return Err(HardnessError::InvalidArguments(format!("need d >= 2, got {d}")));
    }
    for c in 5..5 + MAX_WINDOW_RETRIES {
        if let Some(inst) = try_window(c, d)? {
            inst.validate()?;
            return Ok(inst);
        }
    }
    Err(HardnessError::BudgetExceeded(format!(
        "no usable prime windows for c in [5, {})",
        5 + MAX_WINDOW_RETRIES
    )))
}

fn try_window(c: u64, d: usize) -> Result<Option<LowerBoundInstance>, HardnessError> {
    let (lo, hi) = prime_window(c, d);
    let window = primes_in_range(&lo, &hi)?;
    if window.len() < d {
        return Ok(None);
    }
    let primes: Vec<Int> = window.iter().rev().take(d).cloned().collect();
    let delta = primes[0].clone();
    // p_last <= Delta / sqrt d, so p_last <= floor(sqrt(Delta^2 / d)).
    let top = (&delta * &delta / Int::from(d)).sqrt();
    let candidates = primes_in_range(&Int::one(), &top)?;
    let Some(p_last) = candidates
        .iter()
        .rev()
        .find(|p| in_last_window(p, &delta, d) && !primes.contains(p))
        .cloned()
    else {
        return Ok(None);
    };
    let p: Int = primes.iter().product();
    let a = lower_bound_matrix(&primes, &p_last);
    let b = lower_bound_target(&primes, &p_last, &p);
    let pr = rat_from_int(&p);
    let pl = rat_from_int(&p_last);
    let mut alpha: Vec<Rat> = primes
        .iter()
        .map(|pi| {
            let pi = rat_from_int(pi);
            &pr * &pl / (Rat::from_integer(Int::from(2)) * &pi) - Rat::one() - &pl / &pi
        })
        .collect();
    alpha.push(&pr / Rat::from_integer(Int::from(2)));
    let inst = LowerBoundInstance {
        d,
        c,
        primes,
        p_last,
        p,
        delta,
        a,
        b,
        alpha,
    };
    Ok(inst.validate().is_ok().then_some(inst))
}

/// A replayable proof that `[p_i e_i | p_last 1] beta = b` has no
/// non-negative integer solution.
///
/// Row `i` reads `beta_i p_i + beta_last p_last = b_i`, so `beta_last` is
/// pinned modulo each `p_i`, hence modulo `P`, to the class of `r`. A
/// non-negative `beta_last` is then at least `r`, which leaves
/// `beta_i p_i <= b_i - r p_last < 0` for the recorded row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub primes: Vec<Int>,
    pub p_last: Int,
    /// `beta_last = b_i p_last^{-1} (mod p_i)` for each row.
    pub congruences: Vec<Congruence>,
    /// The combined class `beta_last = r (mod P)`.
    pub combined: Congruence,
    /// 0-based row whose residual is negative.
    pub row: usize,
    /// `b_row - r p_last`, an upper bound on `beta_row p_row`.
    pub residual: Int,
}

/// Reads `p_1..p_d` and `p_last` off an instance of the expected shape.
fn read_shape(inst: &IlpeInstance) -> Result<(Vec<Int>, Int), HardnessError> {
    let (d, n) = (inst.d(), inst.n());
    if n != d + 1 {
        return Err(HardnessError::Shape(format!("{d}x{n} matrix, expected {d}x{}", d + 1)));
    }
    let p_last = inst.a[(0, d)].clone();
    let primes: Vec<Int> = (0..d).map(|i| inst.a[(i, i)].clone()).collect();
    for i in 0..d {
        for j in 0..d {
            if i != j && !inst.a[(i, j)].is_zero() {
                return Err(HardnessError::Shape(format!("entry ({}, {}) is not zero", i + 1, j + 1)));
            }
        }
        if inst.a[(i, d)] != p_last {
            return Err(HardnessError::Shape("last column is not constant".into()));
        }
    }
    if primes.iter().chain([&p_last]).any(|p| p <= &Int::one()) {
        return Err(HardnessError::Shape("diagonal and last column must exceed 1".into()));
    }
    for (i, p) in primes.iter().enumerate() {
        if !p.gcd(&p_last).is_one() || primes[..i].iter().any(|q| !q.gcd(p).is_one()) {
            return Err(HardnessError::Shape("diagonal entries and p_last must be pairwise coprime".into()));
        }
    }
    Ok((primes, p_last))
}

fn forced_classes(
    primes: &[Int],
    p_last: &Int,
    b: &[Int],
) -> Result<(Vec<Congruence>, Congruence), HardnessError> {
    let congruences = primes
        .iter()
        .zip(b)
        .map(|(p, bi)| {
            let inv = mod_inverse(p_last, p).map_err(|e| HardnessError::Shape(e.to_string()))?;
            Congruence::new(bi * inv, p.clone()).map_err(|e| HardnessError::Shape(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let system = CongruenceSystem::new(congruences.clone()).map_err(|e| HardnessError::Shape(e.to_string()))?;
    let combined = crt_general(&system).map_err(|e| HardnessError::Shape(e.to_string()))?;
    Ok((congruences, combined))
}

/// Builds the certificate from the instance's `A` and `b` alone.
pub fn certify_instance(inst: &IlpeInstance) -> Result<InfeasibilityCertificate, HardnessError> {
    let (primes, p_last) = read_shape(inst)?;
    let (congruences, combined) = forced_classes(&primes, &p_last, &inst.b)?;
    let forced = combined.residue() * &p_last;
    let (row, residual) = inst
        .b
        .iter()
        .map(|bi| bi - &forced)
        .enumerate()
        .min_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)))
        .expect("at least one row");
    if !residual.is_negative() {
        return Err(HardnessError::NotCertified(format!(
            "smallest forced value {} of the last variable leaves every residual non-negative",
            combined.residue()
        )));
    }
    Ok(InfeasibilityCertificate {
        primes,
        p_last,
        congruences,
        combined,
        row,
        residual,
    })
}

pub fn certify_infeasible(inst: &LowerBoundInstance) -> Result<InfeasibilityCertificate, HardnessError> {
    certify_instance(&inst.to_ilpe())
}

impl InfeasibilityCertificate {
    /// Replays the argument against `inst`, using nothing but the
    /// certificate and the instance.
    pub fn verify(&self, inst: &IlpeInstance) -> Result<(), HardnessError> {
        let fail = |m: &str| Err(HardnessError::Replay(m.to_string()));
        let (primes, p_last) = read_shape(inst).map_err(|e| HardnessError::Replay(e.to_string()))?;
        if primes != self.primes || p_last != self.p_last {
            return fail("matrix does not match the certificate's primes");
        }
        for ((c, p), bi) in self.congruences.iter().zip(&primes).zip(&inst.b) {
            if c.modulus() != p {
                return fail("congruence modulus differs from the row prime");
            }
            // beta_last = r_i (mod p_i) must make b_i - beta_last p_last divisible by p_i.
            if !(bi - c.residue() * &p_last).is_multiple_of(p) {
                return fail("a row congruence is not forced by its row");
            }
        }
        if self.congruences.len() != primes.len() {
            return fail("wrong number of congruences");
        }
        let p: Int = primes.iter().product();
        if self.combined.modulus() != &p || self.congruences.iter().any(|c| !c.contains(self.combined.residue())) {
            return fail("combined class is not the CRT of the row congruences");
        }
        let Some(bi) = inst.b.get(self.row) else {
            return fail("row index out of range");
        };
        let residual = bi - self.combined.residue() * &p_last;
        if residual != self.residual {
            return fail("residual does not match");
        }
        if !residual.is_negative() {
            return fail("residual is not negative");
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = CertificateFile {
            kind: "modular-residual".into(),
            primes: decs(&self.primes),
            p_last: Dec(self.p_last.clone()),
            congruences: self
                .congruences
                .iter()
                .map(|c| CongruenceFile {
                    residue: Dec(c.residue().clone()),
                    modulus: Dec(c.modulus().clone()),
                })
                .collect(),
            combined: CongruenceFile {
                residue: Dec(self.combined.residue().clone()),
                modulus: Dec(self.combined.modulus().clone()),
            },
            row: self.row,
            residual: Dec(self.residual.clone()),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, HardnessError> {
        let f: CertificateFile =
            serde_json::from_str(text).map_err(|e| HardnessError::Replay(format!("bad certificate: {e}")))?;
        let cong = |c: CongruenceFile| {
            Congruence::new(c.residue.0, c.modulus.0).map_err(|e| HardnessError::Replay(e.to_string()))
        };
        Ok(InfeasibilityCertificate {
            primes: f.primes.into_iter().map(|d| d.0).collect(),
            p_last: f.p_last.0,
            congruences: f.congruences.into_iter().map(cong).collect::<Result<_, _>>()?,
            combined: cong(f.combined)?,
            row: f.row,
            residual: f.residual.0,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CongruenceFile {
    residue: Dec,
    modulus: Dec,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    kind: String,
    primes: Vec<Dec>,
    p_last: Dec,
    congruences: Vec<CongruenceFile>,
    combined: CongruenceFile,
    row: usize,
    residual: Dec,
}

/// `A = [[9, 10, 9], [0, 0, 1]]`, `b = (m, m)`: the lattice is all of
/// `Z^2` and `b` is deep in the cone for large `m`, yet row 2 forces
/// `x_3 = m` and row 1 is left with `9 x_1 + 10 x_2 = -8 m`.
pub fn intro_counterexample(m: &Int) -> Result<IlpeInstance, HardnessError> {
    if m < &Int::one() {
        return Err(HardnessError::InvalidArguments(format!("need M >= 1, got {m}")));
    }
    IlpeInstance::new(Matrix::from_i64(&[&[9, 10, 9], &[0, 0, 1]]), vec![m.clone(), m.clone()])
        .map_err(|e| HardnessError::InvalidArguments(e.to_string()))
}

/// `d (2 d ||A||_inf + 1)^d`, an upper bound on the diagonal Frobenius
/// number.
pub fn bach_bound(a: &Matrix) -> Int {
    let d = a.rows();
    let base = Int::from(2 * d) * a.max_abs() + 1;
    Int::from(d) * num_traits::pow(base, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::lattice::hnf_of_matrix;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn prime_examples() {
        assert_eq!(primes_in_range(&int(10), &int(20)).unwrap(), ints(&[11, 13, 17, 19]));
        assert!(primes_in_range(&int(24), &int(28)).unwrap().is_empty());
        assert_eq!(primes_in_range(&int(2), &int(2)).unwrap(), ints(&[2]));
        assert!(primes_in_range(&int(5), &int(4)).is_err());
        assert!(matches!(
            primes_in_range(&int(1), &int(1_000_000_000)),
            Err(HardnessError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn primes_match_a_sieve() {
        let n = 5000usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..=n {
            if sieve[i] {
                for j in (i * i..=n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        let expected: Vec<Int> = (0..=n).filter(|&i| sieve[i]).map(|i| int(i as i64)).collect();
        assert_eq!(primes_in_range(&int(0), &int(n as i64)).unwrap(), expected);
    }

    #[test]
    fn d2_instance() {
        let g = gen_lower_bound_instance(2).unwrap();
        assert_eq!(g.primes, ints(&[19, 17]));
        assert_eq!(g.p_last, int(13));
        assert_eq!(g.p, int(323));
        assert_eq!(g.delta, int(19));
        assert_eq!(g.b, ints(&[4167, 4169]));
        assert_eq!(g.alpha, vec![rat(4135, 38), rat(4139, 34), rat(323, 2)]);
        assert_eq!(g.alpha[0], rat(108, 1) + rat(31, 38));
        assert_eq!(g.alpha[1], rat(121, 1) + rat(25, 34));
    }

    #[test]
    fn d2_certificate() {
        let g = gen_lower_bound_instance(2).unwrap();
        let cert = certify_infeasible(&g).unwrap();
        assert_eq!(cert.combined.residue(), &int(322));
        assert_eq!(cert.combined.modulus(), &int(323));
        assert_eq!((cert.row, cert.residual.clone()), (0, int(-19)));
        cert.verify(&g.to_ilpe()).unwrap();
        let replayed = InfeasibilityCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(replayed, cert);
        replayed.verify(&g.to_ilpe()).unwrap();
    }

    #[test]
    fn tampered_target_is_not_certified() {
        let g = gen_lower_bound_instance(2).unwrap();
        let mut inst = g.to_ilpe();
        inst.b[0] += 1;
        assert!(matches!(certify_instance(&inst), Err(HardnessError::NotCertified(_))));
        let cert = certify_infeasible(&g).unwrap();
        assert!(cert.verify(&inst).is_err());
    }

    #[test]
    fn d3_and_d4_instances_validate() {
        for d in 3..=4 {
            let g = gen_lower_bound_instance(d).unwrap();
            assert_eq!(g.alpha[d], rat_from_int(&g.p) / Rat::from_integer(int(2)));
            g.validate().unwrap();
            certify_infeasible(&g).unwrap().verify(&g.to_ilpe()).unwrap();
            assert_eq!(hnf_of_matrix(&g.a).unwrap().volume(), Some(int(1)));
        }
        assert!(gen_lower_bound_instance(1).is_err());
    }

    #[test]
    fn counterexample_examples() {
        let inst = intro_counterexample(&int(100)).unwrap();
        assert_eq!(inst.b, ints(&[100, 100]));
        assert_eq!(hnf_of_matrix(&inst.a).unwrap().volume(), Some(int(1)));
        assert!(intro_counterexample(&int(0)).is_err());
    }

    #[test]
    fn bach_examples() {
        assert_eq!(bach_bound(&Matrix::from_i64(&[&[3, 1]])), int(7));
        assert_eq!(bach_bound(&Matrix::from_i64(&[&[1, 0, 1], &[0, -1, 1]])), int(50));
        assert_eq!(bach_bound(&Matrix::from_i64(&[&[10, 0], &[3, -2]])), int(3362));
    }
}
