//! Exact linear algebra over a prime field GF(p).
//!
//! Everything downstream (cohomology, resolutions, derived functors) reduces to
//! rank/kernel/solve over GF(p). All outputs are deterministic: kernels come in
//! reduced column-echelon form and `solve` returns the echelon-canonical
//! solution, so dimension tables reproduce byte-for-byte across runs.

use std::fmt;

/// Default characteristic, the usual computer-algebra workhorse prime.
pub const DEFAULT_PRIME: u64 = 32003;

/// A prime field GF(p). Elements are bare `u64` residues in `[0, p)`;
/// the field value is carried alongside the data that uses it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Field {
    p: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(p: u64) -> Self {
        assert!(is_prime(p), "field characteristic {p} is not prime");
        assert!(p < (1u64 << 31), "characteristic too large for u64 products");
        Field { p }
    }

    pub fn default_field() -> Self {
        Field::new(DEFAULT_PRIME)
    }

    pub fn char(&self) -> u64 {
        self.p
    }

    /// Canonical residue of a signed integer.
    pub fn from_i64(&self, x: i64) -> u64 {
        let m = self.p as i64;
        (((x % m) + m) % m) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "division by zero in GF({})", self.p);
        self.pow(a, self.p - 2)
    }
}

/// Dense matrix over GF(p), row-major. Dimensions are fixed at construction.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over GF({})", self.rows, self.cols, self.field.p)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: Field, rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let data = entries.iter().map(|&x| field.from_i64(x)).collect();
        Matrix { field, rows, cols, data }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        debug_assert!(r < self.rows && c < self.cols);
        debug_assert!(v < self.field.p);
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn scale(&self, c: u64) -> Matrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = self.field.mul(*x, c);
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, &y) in out.data.iter_mut().zip(other.data.iter()) {
            *x = self.field.add(*x, y);
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        let f = self.field;
        let mut out = vec![0u64; self.rows];
        for i in 0..self.rows {
            let mut acc = 0u64;
            for j in 0..self.cols {
                acc = f.add(acc, f.mul(self.get(i, j), v[j]));
            }
            out[i] = acc;
        }
        out
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// In-place reduced row echelon form. Returns the pivot columns in order.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let mut pivot_row = None;
            for r in row..self.rows {
                if self.get(r, col) != 0 {
                    pivot_row = Some(r);
                    break;
                }
            }
            let Some(pr) = pivot_row else { continue };
            if pr != row {
                for c in 0..self.cols {
                    let t = self.get(row, c);
                    let u = self.get(pr, c);
                    self.set(row, c, u);
                    self.set(pr, c, t);
                }
            }
            let inv = f.inv(self.get(row, col));
            for c in col..self.cols {
                let v = f.mul(self.get(row, c), inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let v = f.sub(self.get(r, c), f.mul(factor, self.get(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Rank together with a kernel basis in reduced column-echelon form.
    ///
    /// The basis has exactly `cols - rank` vectors, one per free column of the
    /// reduced row echelon form, ordered by free column index.
    pub fn rank_and_kernel(&self) -> (usize, Vec<Vec<u64>>) {
        let f = self.field;
        let (r, pivots) = self.rref();
        let rank = pivots.len();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::with_capacity(self.cols - rank);
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = f.neg(r.get(prow, free));
            }
            basis.push(v);
        }
        (rank, basis)
    }

    /// Echelon-canonical solution of `self * v = target`, if one exists
    /// (free variables set to zero).
    pub fn solve(&self, target: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(target.len(), self.rows, "solve: target length mismatch");
        let mut aug = Matrix::zeros(self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, target[r] % self.field.p);
        }
        let pivots = aug.rref_in_place();
        if pivots.contains(&self.cols) {
            return None; // inconsistent system
        }
        let mut v = vec![0u64; self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            v[pcol] = aug.get(prow, self.cols);
        }
        Some(v)
    }

    /// Dimension of the span of the given row vectors.
    pub fn row_span_dim(field: Field, rows: &[Vec<u64>], cols: usize) -> usize {
        if rows.is_empty() {
            return 0;
        }
        let mut m = Matrix::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x % field.p);
            }
        }
        m.rank()
    }
}

/// Reduce `v` against an rref basis (rows of `r`, pivot columns `pivots`),
/// returning the normal form. Used to pick canonical coset representatives.
pub fn reduce_mod_rows(r: &Matrix, pivots: &[usize], v: &[u64]) -> Vec<u64> {
    let f = r.field();
    let mut out = v.to_vec();
    for (prow, &pcol) in pivots.iter().enumerate() {
        let c = out[pcol];
        if c == 0 {
            continue;
        }
        for j in 0..out.len() {
            out[j] = f.sub(out[j], f.mul(c, r.get(prow, j)));
        }
    }
    out
}

/// Representatives of a basis of `ker(outgoing) / im(incoming)`.
/// Deterministic: kernel vectors in echelon order, kept whenever they add a
/// new pivot over the span of the boundaries and the reps already taken.
pub fn homology_reps(incoming: &Matrix, outgoing: &Matrix) -> Vec<Vec<u64>> {
    let f = outgoing.field();
    let dim = outgoing.cols();
    debug_assert_eq!(incoming.rows(), dim);
    let (_, kernel) = outgoing.rank_and_kernel();
    // boundary vectors as rows, reduced
    let mut rows = Matrix::zeros(f, incoming.cols(), dim);
    for c in 0..incoming.cols() {
        for r in 0..dim {
            rows.set(c, r, incoming.get(r, c));
        }
    }
    let mut pivots = rows.rref_in_place();
    let mut reps = Vec::new();
    for k in kernel {
        let red = reduce_mod_rows(&rows, &pivots, &k);
        if let Some(p) = red.iter().position(|&x| x != 0) {
            reps.push(k);
            // absorb so later kernel vectors reduce against this rep too
            let inv = f.inv(red[p]);
            let mut grown = Matrix::zeros(f, rows.rows() + 1, dim);
            for r in 0..rows.rows() {
                for c in 0..dim {
                    grown.set(r, c, rows.get(r, c));
                }
            }
            for c in 0..dim {
                grown.set(rows.rows(), c, f.mul(inv, red[c]));
            }
            rows = grown;
            pivots.push(p);
        }
    }
    reps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Field {
        Field::new(7)
    }

    #[test]
    fn identity_has_full_rank_and_empty_kernel() {
        let m = Matrix::identity(Field::default_field(), 3);
        let (rank, ker) = m.rank_and_kernel();
        assert_eq!(rank, 3);
        assert!(ker.is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_standard_basis() {
        let m = Matrix::zeros(Field::default_field(), 2, 3);
        let (rank, ker) = m.rank_and_kernel();
        assert_eq!(rank, 0);
        assert_eq!(ker, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn dependent_rows_mod_7() {
        let m = Matrix::from_rows(f7(), 2, 2, &[1, 2, 2, 4]);
        let (rank, ker) = m.rank_and_kernel();
        assert_eq!(rank, 1);
        assert_eq!(ker, vec![vec![5, 1]]);
    }

    #[test]
    fn solve_identity() {
        let m = Matrix::identity(f7(), 3);
        assert_eq!(m.solve(&[1, 2, 3]), Some(vec![1, 2, 3]));
    }

    #[test]
    fn solve_zero_matrix() {
        let m = Matrix::zeros(f7(), 2, 2);
        assert_eq!(m.solve(&[0, 0]), Some(vec![0, 0]));
        assert_eq!(m.solve(&[1, 0]), None);
    }

    #[test]
    fn kernel_vectors_are_killed() {
        let m = Matrix::from_rows(f7(), 3, 4, &[1, 2, 3, 4, 2, 4, 6, 1, 0, 1, 1, 1]);
        let (rank, ker) = m.rank_and_kernel();
        assert_eq!(rank + ker.len(), 4);
        for v in &ker {
            assert!(m.mul_vec(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solve_roundtrip() {
        let m = Matrix::from_rows(f7(), 3, 3, &[1, 2, 0, 0, 1, 5, 2, 4, 0]);
        let target = vec![3u64, 1, 6];
        if let Some(v) = m.solve(&target) {
            assert_eq!(m.mul_vec(&v), target);
        }
    }

    #[test]
    fn field_inverse() {
        let f = Field::default_field();
        for a in 1..50u64 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }
}
