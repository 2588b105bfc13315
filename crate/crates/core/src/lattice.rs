//! Integer linear algebra: column-style Hermite Normal Form, matrix kernels,
//! and the lattice of relations attached to a family's exponent matrix.

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::exactmath::{ext_gcd, Int};
use crate::family::FamilyParams;
use crate::polyring::BinomialVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("vector has length {got}, matrix has {expected} columns")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix is not square")]
    NotSquare,
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Int::one();
        }
        m
    }

    pub fn from_rows<T: Into<Int> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows
                .iter()
                .flat_map(|row| row.iter().cloned().map(Into::into))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Int {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Int {
        &mut self.data[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<Int> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    *out.at_mut(r, c) += a * other.at(k, c);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c) * &v[c]).sum())
            .collect()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -self.at(r, c).clone();
            *self.at_mut(r, c) = v;
        }
    }

    /// col_a, col_b <- (s*col_a + t*col_b, u*col_a + v*col_b)
    fn combine_cols(&mut self, a: usize, b: usize, s: &Int, t: &Int, u: &Int, v: &Int) {
        for r in 0..self.rows {
            let x = self.at(r, a).clone();
            let y = self.at(r, b).clone();
            *self.at_mut(r, a) = s * &x + t * &y;
            *self.at_mut(r, b) = u * &x + v * &y;
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &Int) {
        if factor.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = self.at(r, target) + factor * self.at(r, source);
            *self.at_mut(r, target) = v;
        }
    }
}

/// Column-style Hermite Normal Form: returns `(H, U)` with `H = M * U`,
/// `U` unimodular. Pivots are positive, entries to the right of a pivot in
/// its row are zero, entries to the left lie in `[0, pivot)`, and trailing
/// columns of H are zero.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.cols());
    let mut pivot_col = 0usize;
    for r in 0..m.rows() {
        if pivot_col == m.cols() {
            break;
        }
        let Some(j0) = (pivot_col..m.cols()).find(|&j| !h.at(r, j).is_zero()) else {
            continue;
        };
        h.swap_cols(pivot_col, j0);
        u.swap_cols(pivot_col, j0);
        for j in pivot_col + 1..m.cols() {
            if h.at(r, j).is_zero() {
                continue;
            }
            let (g, s, t) = ext_gcd(h.at(r, pivot_col), h.at(r, j));
            let a = h.at(r, pivot_col) / &g;
            let b = h.at(r, j) / &g;
            // |det [[s, -b], [t, a]]| = s*a + t*b = 1
            h.combine_cols(pivot_col, j, &s, &t, &-&b, &a);
            u.combine_cols(pivot_col, j, &s, &t, &-&b, &a);
        }
        if h.at(r, pivot_col).is_negative() {
            h.negate_col(pivot_col);
            u.negate_col(pivot_col);
        }
        let pivot = h.at(r, pivot_col).clone();
        for j in 0..pivot_col {
            let q = num::Integer::div_floor(h.at(r, j), &pivot);
            if !q.is_zero() {
                h.add_col_multiple(j, pivot_col, &-&q);
                u.add_col_multiple(j, pivot_col, &-&q);
            }
        }
        pivot_col += 1;
    }
    (h, u)
}

/// Rank via HNF pivot count.
pub fn rank(m: &IntMatrix) -> usize {
    let (h, _) = hnf(m);
    (0..h.cols())
        .filter(|&j| (0..h.rows()).any(|r| !h.at(r, j).is_zero()))
        .count()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &IntMatrix) -> Result<Int, LatticeError> {
    if m.rows() != m.cols() {
        return Err(LatticeError::NotSquare);
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Int::one());
    }
    let mut a = m.clone();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a.at(k, k).is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !a.at(r, k).is_zero()) else {
                return Ok(Int::zero());
            };
            for c in 0..n {
                let i1 = k * n + c;
                let i2 = swap * n + c;
                a.data.swap(i1, i2);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                *a.at_mut(i, j) = num / &prev;
            }
        }
        prev = a.at(k, k).clone();
    }
    Ok(sign * a.at(n - 1, n - 1))
}

/// A Z-basis of the integer kernel `{v : M v = 0}` as raw vectors.
pub fn kernel_vectors(m: &IntMatrix) -> Vec<Vec<Int>> {
    let (h, u) = hnf(m);
    (0..h.cols())
        .filter(|&j| (0..h.rows()).all(|r| h.at(r, j).is_zero()))
        .map(|j| u.column(j))
        .collect()
}

/// The lattice of relations as binomial vectors; the matrix must have an
/// even number of columns (2n variables).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub vectors: Vec<BinomialVector>,
}

impl LatticeBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

pub fn kernel_basis(m: &IntMatrix) -> LatticeBasis {
    assert!(m.cols().is_multiple_of(2), "kernel_basis expects 2n columns");
    LatticeBasis {
        vectors: kernel_vectors(m)
            .into_iter()
            .map(|v| BinomialVector::from_flat(&v))
            .collect(),
    }
}

/// Solve `M x = rhs` over the integers, if a solution exists.
pub fn solve_integer(m: &IntMatrix, rhs: &[Int]) -> Option<Vec<Int>> {
    assert_eq!(rhs.len(), m.rows(), "dimension mismatch");
    let (h, u) = hnf(m);
    let mut residual: Vec<Int> = rhs.to_vec();
    let mut y = vec![Int::zero(); m.cols()];
    let pivots: Vec<(usize, usize)> = (0..h.cols())
        .filter_map(|j| {
            (0..h.rows())
                .find(|&r| !h.at(r, j).is_zero())
                .map(|r| (r, j))
        })
        .collect();
    for &(r, j) in &pivots {
        let pivot = h.at(r, j);
        let (q, rem) = num::Integer::div_rem(&residual[r], pivot);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (i, slot) in residual.iter_mut().enumerate() {
                *slot = &*slot - &q * h.at(i, j);
            }
        }
        y[j] = q;
    }
    if residual.iter().any(|v| !v.is_zero()) {
        return None;
    }
    Some(u.mul_vec(&y))
}

/// True exactly when `T(params) * v = 0`, i.e. v is a relation between the
/// semigroup generators.
pub fn check_relation(v: &BinomialVector, params: &FamilyParams) -> Result<bool, LatticeError> {
    let m = crate::family::exponent_matrix(params);
    let flat = v.flat();
    if flat.len() != m.cols() {
        return Err(LatticeError::LengthMismatch {
            expected: m.cols(),
            got: flat.len(),
        });
    }
    Ok(m.mul_vec(&flat).iter().all(Zero::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn hnf_identity() {
        let m = IntMatrix::identity(2);
        let (h, u) = hnf(&m);
        assert_eq!(h, IntMatrix::identity(2));
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_bezout_row() {
        let m = IntMatrix::from_rows(&[vec![2, 3]]);
        let (h, u) = hnf(&m);
        assert_eq!(h, IntMatrix::from_rows(&[vec![1, 0]]));
        assert_eq!(m.mul(&u), h);
        assert_eq!(det(&u).unwrap().abs(), Int::one());
    }

    #[test]
    fn hnf_already_diagonal() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let (h, u) = hnf(&m);
        assert_eq!(h, m);
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_postconditions_randomized() {
        // simple deterministic pseudo-random integers
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 19) as i64 - 9
        };
        for _ in 0..60 {
            let rows = 2 + (next().unsigned_abs() as usize % 3);
            let cols = 2 + (next().unsigned_abs() as usize % 4);
            let m = IntMatrix::from_rows(
                &(0..rows)
                    .map(|_| (0..cols).map(|_| next()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            );
            let (h, u) = hnf(&m);
            assert_eq!(m.mul(&u), h, "H = M*U");
            assert_eq!(det(&u).unwrap().abs(), Int::one(), "U unimodular");
            // echelon with positive pivots, left entries reduced
            let mut last_pivot_row = None;
            for j in 0..h.cols() {
                let pivot_row = (0..h.rows()).find(|&r| !h.at(r, j).is_zero());
                if let Some(r) = pivot_row {
                    if let Some(prev) = last_pivot_row {
                        assert!(r > prev, "pivot rows strictly increase");
                    }
                    last_pivot_row = Some(r);
                    assert!(h.at(r, j).is_positive(), "pivot positive");
                    for l in 0..j {
                        assert!(!h.at(r, l).is_negative() && h.at(r, l) < h.at(r, j));
                    }
                    for l in j + 1..h.cols() {
                        assert!(h.at(r, l).is_zero(), "right of pivot zero");
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_of_example_matrix() {
        // columns (2,0,0),(0,3,0),(0,0,1),(3,0,1),(0,5,1),(3,5,0)
        let m = IntMatrix::from_rows(&[
            vec![2, 0, 0, 3, 0, 3],
            vec![0, 3, 0, 0, 5, 5],
            vec![0, 0, 1, 1, 1, 0],
        ]);
        let basis = kernel_basis(&m);
        assert_eq!(basis.len(), 3);
        for v in &basis.vectors {
            let prod = m.mul_vec(&v.flat());
            assert!(prod.iter().all(Zero::is_zero), "kernel vector annihilated");
        }
        assert_eq!(rank(&m), 3);
        // the known relation (-3,0,-2,2,0,0) must be an integral combination
        let kernel_matrix = IntMatrix::from_rows(
            &(0..6)
                .map(|i| {
                    basis
                        .vectors
                        .iter()
                        .map(|v| v.flat()[i].clone())
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>(),
        );
        let target = ints(&[-3, 0, -2, 2, 0, 0]);
        assert!(solve_integer(&kernel_matrix, &target).is_some());
    }

    #[test]
    fn kernel_trivial_cases() {
        assert!(kernel_vectors(&IntMatrix::identity(2)).is_empty());
        let zero = IntMatrix::zeros(1, 2);
        let basis = kernel_vectors(&zero);
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn equation_vectors_lie_in_kernel_span() {
        use crate::family::{f_vector, fi_vector, g_vector, FamilyParams};
        let params = FamilyParams::example1();
        let m = crate::family::exponent_matrix(&params);
        let kernel = kernel_vectors(&m);
        // columns of this matrix are the kernel basis vectors
        let kernel_matrix = IntMatrix::from_rows(
            &(0..m.cols())
                .map(|i| kernel.iter().map(|v| v[i].clone()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        );
        let mut targets = vec![f_vector(&params), g_vector(&params).unwrap()];
        for i in 1..params.n() {
            targets.push(fi_vector(&params, i).unwrap());
        }
        for v in targets {
            assert!(
                solve_integer(&kernel_matrix, &v.flat()).is_some(),
                "equation vector outside the relation lattice"
            );
        }
    }

    #[test]
    fn solve_integer_cases() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(
            solve_integer(&m, &ints(&[4, 9])),
            Some(ints(&[2, 3]))
        );
        assert_eq!(solve_integer(&m, &ints(&[1, 0])), None);
    }

    #[test]
    fn det_examples() {
        let m = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(det(&m).unwrap(), Int::from(-2));
        let m = IntMatrix::from_rows(&[vec![2, 0, 1], vec![1, 1, 0], vec![0, 3, 1]]);
        // 2*(1*1-0*3) - 0 + 1*(1*3-1*0) = 2 + 3 = 5
        assert_eq!(det(&m).unwrap(), Int::from(5));
        let singular = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(det(&singular).unwrap(), Int::zero());
        assert!(det(&IntMatrix::zeros(2, 3)).is_err());
    }
}
