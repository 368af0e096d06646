//! Exact solvers for unbounded subset sum and integer linear programs with
//! equality constraints when the target is deep enough that a non-negative
//! integer solution is guaranteed to exist, together with the lattice,
//! modular and linear-programming kernels they are built on, generators and
//! certifiers for matching hard instances, and brute-force oracles.
//!
//! All arithmetic is exact: integers are arbitrary precision and rationals
//! are always reduced.

pub mod arith;
pub mod hardness;
pub mod ilpe;
pub mod instance;
pub mod lattice;
pub mod lp;
pub mod matrix;
pub mod modular;
pub mod oracle;
pub mod uss;

pub use arith::{Int, Rat};
pub use instance::{
    normalize_uss, verify_solution, HilpInstance, IlpInstance, IlpeInstance, Instance, InstanceError,
    Solution, UssInstance,
};
pub use hardness::{certify_infeasible, gen_lower_bound_instance, InfeasibilityCertificate, LowerBoundInstance};
pub use ilpe::{compute_profile, solve_ilpe_total, IlpeError, VBoundedProfile};
pub use lattice::{hnf_basis, LatticeBasis};
pub use matrix::Matrix;
pub use modular::{crt_general, Congruence, CongruenceSystem};
pub use oracle::{SearchBudget, IntconeVerdict};
pub use uss::{solve_uss, UssError};
