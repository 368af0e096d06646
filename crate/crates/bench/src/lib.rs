//! Instance builders shared by the benchmarks.

use totality::{IlpeInstance, Int, Matrix, UssInstance};

/// USS instance with weights near `2^bits` and a target deep in the regime.
pub fn uss_instance(bits: u32, n: usize) -> UssInstance {
    let base = Int::from(1u8) << bits;
    let a: Vec<Int> = (0..n).map(|i| &base + Int::from(2 * i + 1)).collect();
    let top = a.iter().max().cloned().unwrap_or_default();
    let b = &top * &top + Int::from(7);
    UssInstance::new(a, b).expect("valid instance")
}

/// Dense `d x n` system with small entries and `b = A (M + 1, ..., M + 1)`.
pub fn ilpe_instance(d: usize, n: usize) -> IlpeInstance {
    let rows: Vec<Vec<Int>> = (0..d)
        .map(|i| (0..n).map(|j| Int::from(((i * 7 + j * 3 + i * j) % 5) as i64 + if i == j { 3 } else { 0 })).collect())
        .collect();
    let a = Matrix::from_rows(rows);
    let inst = IlpeInstance::new(a.clone(), vec![Int::from(0); d]).expect("valid shape");
    let depth = totality::compute_profile(&inst).map(|p| p.m).unwrap_or_default() + Int::from(1);
    let b = a.mul_vec(&vec![depth; n]);
    IlpeInstance::new(a, b).expect("valid instance")
}
