//! Number-theoretic kernel: extended gcd, modular inverses and the Chinese
//! remainder theorem for moduli that need not be pairwise coprime.

use crate::arith::{modulo, Int};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModularError {
    #[error("{0} has no inverse modulo {1}")]
    NoInverse(Int, Int),
    #[error("congruence system has no solution")]
    NoSolution,
    #[error("modulus must be at least 1, got {0}")]
    InvalidModulus(Int),
    #[error("congruence system is empty")]
    EmptySystem,
}

/// `residue (mod modulus)` with `0 <= residue < modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Congruence {
    residue: Int,
    modulus: Int,
}

impl Congruence {
    /// Canonicalizes `residue` into `[0, modulus)`.
    pub fn new(residue: Int, modulus: Int) -> Result<Congruence, ModularError> {
        if modulus < Int::one() {
            return Err(ModularError::InvalidModulus(modulus));
        }
        Ok(Congruence {
            residue: modulo(&residue, &modulus),
            modulus,
        })
    }

    pub fn from_i64(residue: i64, modulus: i64) -> Result<Congruence, ModularError> {
        Self::new(Int::from(residue), Int::from(modulus))
    }

    pub fn residue(&self) -> &Int {
        &self.residue
    }

    pub fn modulus(&self) -> &Int {
        &self.modulus
    }

    pub fn contains(&self, v: &Int) -> bool {
        modulo(v, &self.modulus) == self.residue
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.residue, self.modulus)
    }
}

/// A non-empty list of simultaneous congruences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceSystem {
    items: Vec<Congruence>,
}

impl CongruenceSystem {
    pub fn new(items: Vec<Congruence>) -> Result<Self, ModularError> {
        if items.is_empty() {
            return Err(ModularError::EmptySystem);
        }
        Ok(CongruenceSystem { items })
    }

    pub fn items(&self) -> &[Congruence] {
        &self.items
    }
}

/// Returns `(g, u, v)` with `g = gcd(|a|, |b|)` and `u*a + v*b = g`.
///
/// The pair is the minimal one: for `b != 0`, `u` lies in
/// `(-|b|/(2g), |b|/(2g)]`.
pub fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (Int::one(), Int::zero());
    let (mut old_t, mut t) = (Int::zero(), Int::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    let (g, mut u, mut v) = if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    };
    if g.is_zero() {
        return (g, Int::zero(), Int::zero());
    }
    if !b.is_zero() {
        let step = b.abs() / &g;
        u = modulo(&u, &step);
        if &u * 2 > step {
            u -= &step;
        }
        v = (&g - &u * a) / b;
    }
    debug_assert_eq!(&u * a + &v * b, g);
    (g, u, v)
}

/// The `w` in `[0, m)` with `a*w = 1 (mod m)`. By convention `m = 1` gives 0.
pub fn mod_inverse(a: &Int, m: &Int) -> Result<Int, ModularError> {
    if m < &Int::one() {
        return Err(ModularError::InvalidModulus(m.clone()));
    }
    if m.is_one() {
        return Ok(Int::zero());
    }
    let (g, u, _) = ext_gcd(&modulo(a, m), m);
    if !g.is_one() {
        return Err(ModularError::NoInverse(a.clone(), m.clone()));
    }
    Ok(modulo(&u, m))
}

/// Solves `x = gamma * y (mod m)` for `gamma`.
///
/// With `g = gcd(y, m)` a solution exists iff `g | x`; the solution set is
/// then exactly one residue class modulo `m / g`.
pub fn solve_scaled_congruence(x: &Int, y: &Int, m: &Int) -> Result<Congruence, ModularError> {
    if m < &Int::one() {
        return Err(ModularError::InvalidModulus(m.clone()));
    }
    let g = y.gcd(m);
    if !x.is_multiple_of(&g) {
        return Err(ModularError::NoSolution);
    }
    let reduced_m = m / &g;
    let inv = mod_inverse(&(y / &g), &reduced_m)?;
    Congruence::new(inv * (x / &g), reduced_m)
}

/// Combines two congruences; `None` when they conflict.
pub fn crt_pair(a: &Congruence, b: &Congruence) -> Option<Congruence> {
    let (g, u, _) = ext_gcd(&a.modulus, &b.modulus);
    let diff = &b.residue - &a.residue;
    if !diff.is_multiple_of(&g) {
        return None;
    }
    let reduced = &b.modulus / &g;
    let lcm = &a.modulus * &reduced;
    // u * (m_a / g) = 1 (mod m_b / g)
    let t = modulo(&((diff / &g) * u), &reduced);
    Some(Congruence {
        residue: modulo(&(&a.residue + &a.modulus * t), &lcm),
        modulus: lcm,
    })
}

/// The unique residue class modulo the lcm of all moduli that satisfies
/// every congruence in the system.
pub fn crt_general(system: &CongruenceSystem) -> Result<Congruence, ModularError> {
    let mut items = system.items.iter();
    let first = items.next().expect("system is non-empty").clone();
    items.try_fold(first, |acc, c| crt_pair(&acc, c).ok_or(ModularError::NoSolution))
}
