//! Exact integer lattice machinery.
//!
//! Bases are produced in column Hermite normal form: the basis matrix `H`
//! (`d x r`) is in column echelon form with positive pivots, column `j`
//! has its pivot in row `pivot_rows[j]`, rows above the pivot are zero, and
//! every entry to the left of a pivot lies in `[0, pivot)`. The form is
//! unique for a given lattice, which is what the golden tests rely on.
//!
//! Determinants, adjugates and integral solves all go through fraction-free
//! (Bareiss) elimination, so no rational arithmetic is needed here.

use crate::arith::Int;
use crate::matrix::Matrix;
use crate::modular::ext_gcd;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("all generators are zero; the zero lattice has no basis")]
    ZeroLattice,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("the first {0} columns are linearly dependent")]
    DependentLeadingColumns(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("system has no integral solution")]
    NonIntegral,
}

/// A lattice basis in column Hermite normal form, with a witness expressing
/// each basis column over the original generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    basis: Matrix,
    pivot_rows: Vec<usize>,
    transform: Matrix,
}

impl LatticeBasis {
    /// The `d x r` basis matrix.
    pub fn matrix(&self) -> &Matrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.pivot_rows
    }

    /// `r x n`: basis column `j` equals `sum_i transform[j][i] * generator_i`.
    pub fn transform(&self) -> &Matrix {
        &self.transform
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient_dim()
    }

    /// `|det|` of a full-rank basis (product of the pivots).
    pub fn volume(&self) -> Option<Int> {
        self.is_full_rank()
            .then(|| (0..self.rank()).map(|j| self.basis[(j, j)].clone()).product())
    }
}

/// Adds `factor * col(src)` to `col(dst)`.
fn add_column_multiple(m: &mut Matrix, dst: usize, src: usize, factor: &Int) {
    for i in 0..m.rows() {
        let delta = factor * &m[(i, src)];
        m[(i, dst)] += delta;
    }
}

/// Replaces columns `(p, q)` by `(u*p + v*q, s*p + t*q)`.
fn combine_columns(m: &mut Matrix, p: usize, q: usize, u: &Int, v: &Int, s: &Int, t: &Int) {
    for i in 0..m.rows() {
        let (x, y) = (m[(i, p)].clone(), m[(i, q)].clone());
        m[(i, p)] = u * &x + v * &y;
        m[(i, q)] = s * &x + t * &y;
    }
}

fn negate_column(m: &mut Matrix, j: usize) {
    for i in 0..m.rows() {
        let v = -std::mem::take(&mut m[(i, j)]);
        m[(i, j)] = v;
    }
}

/// Column Hermite normal form basis of the lattice generated by the given
/// vectors (all in `Z^d`).
pub fn hnf_basis(generators: &[Vec<Int>]) -> Result<LatticeBasis, LatticeError> {
    let dim = generators.first().map_or(0, Vec::len);
    if let Some(bad) = generators.iter().find(|g| g.len() != dim) {
        return Err(LatticeError::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    if generators.iter().all(|g| g.iter().all(Zero::is_zero)) {
        return Err(LatticeError::ZeroLattice);
    }
    hnf_of_matrix(&Matrix::from_columns(dim, generators))
}

/// Same as [`hnf_basis`] with the generators given as matrix columns.
pub fn hnf_of_matrix(a: &Matrix) -> Result<LatticeBasis, LatticeError> {
    if a.is_zero() {
        return Err(LatticeError::ZeroLattice);
    }
    let (d, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = Matrix::identity(n);
    let mut pivot_rows = Vec::new();
    let mut pc = 0;

    for row in 0..d {
        if pc == n {
            break;
        }
        for j in pc + 1..n {
            if h[(row, j)].is_zero() {
                continue;
            }
            if h[(row, pc)].is_zero() {
                h.swap_columns(pc, j);
                u.swap_columns(pc, j);
                continue;
            }
            let (a_val, b_val) = (h[(row, pc)].clone(), h[(row, j)].clone());
            let (g, s, t) = ext_gcd(&a_val, &b_val);
            // [[s, -b/g], [t, a/g]] has determinant 1.
            let (p, q) = (-(&b_val / &g), &a_val / &g);
            combine_columns(&mut h, pc, j, &s, &t, &p, &q);
            combine_columns(&mut u, pc, j, &s, &t, &p, &q);
            debug_assert!(h[(row, j)].is_zero());
        }
        if h[(row, pc)].is_zero() {
            continue;
        }
        if h[(row, pc)].is_negative() {
            negate_column(&mut h, pc);
            negate_column(&mut u, pc);
        }
        let pivot = h[(row, pc)].clone();
        for j in 0..pc {
            let q = h[(row, j)].div_floor(&pivot);
            if !q.is_zero() {
                add_column_multiple(&mut h, j, pc, &-&q);
                add_column_multiple(&mut u, j, pc, &-&q);
            }
        }
        pivot_rows.push(row);
        pc += 1;
    }

    let r = pc;
    let keep: Vec<usize> = (0..r).collect();
    let basis = h.select_columns(&keep);
    let transform = u.select_columns(&keep).transpose();
    Ok(LatticeBasis {
        basis,
        pivot_rows,
        transform,
    })
}

/// Integer coefficients `z` with `B z = w`, or `None` when `w` is not in the
/// lattice (including when it is outside the real span).
pub fn in_lattice(basis: &LatticeBasis, w: &[Int]) -> Result<Option<Vec<Int>>, LatticeError> {
    let d = basis.ambient_dim();
    if w.len() != d {
        return Err(LatticeError::DimensionMismatch {
            expected: d,
            got: w.len(),
        });
    }
    let b = &basis.basis;
    let mut rest = w.to_vec();
    let mut z = Vec::with_capacity(basis.rank());
    let mut row = 0;
    for (j, &p) in basis.pivot_rows.iter().enumerate() {
        // Rows skipped between pivots are zero in every remaining column.
        while row < p {
            if !rest[row].is_zero() {
                return Ok(None);
            }
            row += 1;
        }
        let (q, r) = rest[p].div_rem(&b[(p, j)]);
        if !r.is_zero() {
            return Ok(None);
        }
        for i in p..d {
            let delta = &q * &b[(i, j)];
            rest[i] -= delta;
        }
        z.push(q);
        row = p + 1;
    }
    if rest.iter().any(|v| !v.is_zero()) {
        return Ok(None);
    }
    Ok(Some(z))
}

/// Fraction-free forward elimination. Returns the echelon matrix, the number
/// of row swaps and the rank. For a square non-singular input the last pivot
/// is `+-det`.
fn bareiss_forward(mut m: Matrix) -> (Matrix, usize, usize) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = Int::one();
    let mut swaps = 0;
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let Some(p) = (rank..rows).find(|&i| !m[(i, col)].is_zero()) else {
            col += 1;
            continue;
        };
        if p != rank {
            for j in 0..cols {
                let tmp = m[(p, j)].clone();
                m[(p, j)] = m[(rank, j)].clone();
                m[(rank, j)] = tmp;
            }
            swaps += 1;
        }
        let pivot = m[(rank, col)].clone();
        for i in rank + 1..rows {
            let factor = m[(i, col)].clone();
            for j in col + 1..cols {
                let v = (&pivot * &m[(i, j)] - &factor * &m[(rank, j)]) / &prev;
                m[(i, j)] = v;
            }
            m[(i, col)] = Int::zero();
        }
        // Untouched columns left of `col` stay zero below the pivot row.
        prev = pivot;
        rank += 1;
        col += 1;
    }
    (m, swaps, rank)
}

/// Exact determinant of a square matrix via Bareiss elimination.
pub fn determinant(m: &Matrix) -> Result<Int, LatticeError> {
    if !m.is_square() {
        return Err(LatticeError::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Int::one());
    }
    let (e, swaps, rank) = bareiss_forward(m.clone());
    if rank < n {
        return Ok(Int::zero());
    }
    let det = e[(n - 1, n - 1)].clone();
    Ok(if swaps % 2 == 1 { -det } else { det })
}

/// Rank of an integer matrix.
pub fn rank(m: &Matrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    bareiss_forward(m.clone()).2
}

/// Gram determinant `det(V^T V)` of the given vectors: the square of the
/// volume of the parallelepiped they span. Zero iff they are dependent; an
/// empty family gives 1.
pub fn gram_det(vectors: &[Vec<Int>]) -> Result<Int, LatticeError> {
    let k = vectors.len();
    if k == 0 {
        return Ok(Int::one());
    }
    let dim = vectors[0].len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(LatticeError::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let mut g = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = crate::arith::dot(&vectors[i], &vectors[j]);
            g[(j, i)] = v.clone();
            g[(i, j)] = v;
        }
    }
    determinant(&g)
}

/// Returns `(adj(B), det(B))` with `adj(B) * B = det(B) * I`.
pub fn adjugate_det(b: &Matrix) -> Result<(Matrix, Int), LatticeError> {
    if !b.is_square() {
        return Err(LatticeError::NotSquare(b.rows(), b.cols()));
    }
    let n = b.rows();
    if n == 0 {
        return Ok((Matrix::zeros(0, 0), Int::one()));
    }
    if n == 1 {
        return Ok((Matrix::identity(1), b[(0, 0)].clone()));
    }
    let det = determinant(b)?;
    if det.is_zero() {
        return Ok((adjugate_by_minors(b)?, det));
    }

    // Forward-eliminate [B | I]; the right block then carries the same row
    // operations, so back substitution yields det * B^{-1} = adj(B) exactly.
    let mut aug = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = b[(i, j)].clone();
        }
        aug[(i, n + i)] = Int::one();
    }
    let (e, swaps, rank) = bareiss_forward(aug);
    debug_assert_eq!(rank, n);
    let elim_det = e[(n - 1, n - 1)].clone();
    let sign = if swaps % 2 == 1 { -Int::one() } else { Int::one() };
    debug_assert_eq!(&elim_det * &sign, det);

    let mut adj = Matrix::zeros(n, n);
    for c in 0..n {
        // y = elim_det * x where U x = rhs; every y_i is an integer.
        let mut y = vec![Int::zero(); n];
        for i in (0..n).rev() {
            let mut acc = &elim_det * &e[(i, n + c)];
            for j in i + 1..n {
                acc -= &e[(i, j)] * &y[j];
            }
            let (q, r) = acc.div_rem(&e[(i, i)]);
            debug_assert!(r.is_zero(), "Bareiss back substitution must divide exactly");
            y[i] = q;
        }
        for i in 0..n {
            adj[(i, c)] = &y[i] * &sign;
        }
    }
    Ok((adj, det))
}

/// Cofactor matrix transpose, each minor by Bareiss. Used for singular input
/// where the inverse route is unavailable.
fn adjugate_by_minors(b: &Matrix) -> Result<Matrix, LatticeError> {
    let n = b.rows();
    let mut adj = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = b.select_rows(&rows).select_columns(&cols);
            let m = determinant(&minor)?;
            adj[(j, i)] = if (i + j) % 2 == 1 { -m } else { m };
        }
    }
    Ok(adj)
}

/// The unique integer `z` with `B z = w` for a non-singular square `B`.
pub fn solve_integral(b: &Matrix, w: &[Int]) -> Result<Vec<Int>, LatticeError> {
    if w.len() != b.rows() {
        return Err(LatticeError::DimensionMismatch {
            expected: b.rows(),
            got: w.len(),
        });
    }
    let (adj, det) = adjugate_det(b)?;
    if det.is_zero() {
        return Err(LatticeError::Singular);
    }
    adj.mul_vec(w)
        .into_iter()
        .map(|v| {
            let (q, r) = v.div_rem(&det);
            if r.is_zero() {
                Ok(q)
            } else {
                Err(LatticeError::NonIntegral)
            }
        })
        .collect()
}

/// `V_i = |det L(a_1..a_i)|` for `i = d..n-1`, where `d` is the row count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumeChain {
    start: usize,
    values: Vec<Int>,
}

impl VolumeChain {
    /// `V_i` for `d <= i < n`.
    pub fn get(&self, i: usize) -> Option<&Int> {
        i.checked_sub(self.start).and_then(|k| self.values.get(k))
    }

    pub fn values(&self) -> &[Int] {
        &self.values
    }

    pub fn start(&self) -> usize {
        self.start
    }
}

/// Volume chain of the prefixes `a_1..a_i` of `A`'s columns.
pub fn volume_chain(a: &Matrix) -> Result<VolumeChain, LatticeError> {
    let (d, n) = (a.rows(), a.cols());
    if n < d || determinant(&a.select_columns(&(0..d).collect::<Vec<_>>()))?.is_zero() {
        return Err(LatticeError::DependentLeadingColumns(d));
    }
    let values = (d..n)
        .map(|i| {
            let cols: Vec<usize> = (0..i).collect();
            let basis = hnf_of_matrix(&a.select_columns(&cols))?;
            Ok(basis.volume().expect("prefix contains d independent columns"))
        })
        .collect::<Result<Vec<_>, LatticeError>>()?;
    Ok(VolumeChain { start: d, values })
}
