//! Exact dense linear algebra over a prime field GF(p).
//!
//! Every [`Matrix`] carries the [`Field`] it lives in; nothing about the
//! characteristic is implicit. Elimination always pivots on the first nonzero
//! entry in column order, so bases returned by [`Matrix::kernel_basis`] and
//! friends are reproducible across runs.

use std::fmt;

use crate::error::{Error, Result};

/// A residue `0 <= value < p`.
pub type FieldElem = u32;

/// The prime field GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
}

impl Field {
    /// GF(2), the default field.
    pub const GF2: Field = Field { p: 2 };

    /// Largest supported characteristic; keeps every product inside a `u64`.
    pub const MAX_PRIME: u32 = 65_521;

    pub fn new(p: u32) -> Result<Field> {
        if !(2..=Self::MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Field { p })
    }

    pub fn characteristic(self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary integer into `0..p`.
    pub fn elem(self, v: i64) -> FieldElem {
        v.rem_euclid(self.p as i64) as FieldElem
    }

    #[inline]
    pub fn add(self, a: FieldElem, b: FieldElem) -> FieldElem {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: FieldElem) -> FieldElem {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: FieldElem, b: FieldElem) -> FieldElem {
        ((a as u64 * b as u64) % self.p as u64) as FieldElem
    }

    /// Multiplicative inverse via Fermat. Panics on zero.
    pub fn inv(self, a: FieldElem) -> FieldElem {
        assert!(a != 0, "inverse of zero in GF({})", self.p);
        let mut base = a as u64;
        let mut exp = self.p - 2;
        let m = self.p as u64;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        acc as FieldElem
    }
}

impl Default for Field {
    fn default() -> Self {
        Field::GF2
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} over {} ", self.rows, self.cols, self.field)?;
        f.debug_list().entries(self.row_vecs()).finish()
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    ///
    /// All rows must have length `cols`; an empty row list gives a `0 x cols` matrix.
    pub fn from_rows(field: Field, cols: usize, rows: &[Vec<i64>]) -> Matrix {
        let mut m = Matrix::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged row {i}");
            for (j, &v) in r.iter().enumerate() {
                m.data[i * cols + j] = field.elem(v);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<FieldElem>]) -> Matrix {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v;
            }
        }
        m
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    /// Raw row-major entries.
    pub fn entries(&self) -> &[FieldElem] {
        &self.data
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElem>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<FieldElem>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.field, rhs.field, "field mismatch");
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b != 0 {
                        let idx = i * rhs.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(self.cols, v.len());
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(0, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j])))
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: FieldElem) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// `[self | rhs]`
    pub fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rows, rhs.rows);
        let mut out = Matrix::zeros(self.field, self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..rhs.cols {
                out.set(i, self.cols + j, rhs.get(i, j));
            }
        }
        out
    }

    /// `[self ; rhs]`
    pub fn vstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Matrix {
            field: self.field,
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block-diagonal matrix with the given blocks in order.
    pub fn block_diag(field: Field, blocks: &[Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j));
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c));
            for j in c..m.cols {
                let v = m.get(r, j);
                m.set(r, j, f.mul(v, inv));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space `{v : self * v = 0}`, one vector per free column,
    /// with the free variable set to 1.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldElem>> {
        let f = self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(row, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `self * x = b`. Returns a particular solution and a kernel basis,
    /// or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[FieldElem]) -> Option<(Vec<FieldElem>, Vec<Vec<FieldElem>>)> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&Matrix::from_columns(self.field, self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols);
        }
        Some((x, self.kernel_basis()))
    }

    /// Solves `self * X = rhs` column by column.
    pub fn solve_matrix(&self, rhs: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, rhs.rows);
        let mut cols = Vec::with_capacity(rhs.cols);
        for j in 0..rhs.cols {
            let (x, _) = self.solve(&rhs.column(j))?;
            cols.push(x);
        }
        Some(Matrix::from_columns(self.field, self.cols, &cols))
    }

    /// Columns forming a basis of the column space, chosen greedily left to right.
    pub fn column_space_basis(&self) -> Vec<Vec<FieldElem>> {
        let (_, pivots) = self.rref();
        pivots.iter().map(|&c| self.column(c)).collect()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(self.field, 0, 0));
        }
        let aug = self.hstack(&Matrix::identity(self.field, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

/// Incrementally maintained echelon basis of a subspace of `GF(p)^dim`.
///
/// Used for span-membership questions (radical complements, factorization
/// checks) without rebuilding a matrix each time.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    field: Field,
    dim: usize,
    rows: Vec<(usize, Vec<FieldElem>)>,
}

impl EchelonBasis {
    pub fn new(field: Field, dim: usize) -> EchelonBasis {
        EchelonBasis {
            field,
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let f = self.field;
        let mut w = v.to_vec();
        for (pivot, row) in &self.rows {
            let c = w[*pivot];
            if c != 0 {
                for (x, &r) in w.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[FieldElem]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns whether it was independent of the current span.
    pub fn insert(&mut self, v: &[FieldElem]) -> bool {
        assert_eq!(v.len(), self.dim);
        let f = self.field;
        let mut w = self.reduce(v);
        let Some(pivot) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[pivot]);
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot];
            if c != 0 {
                for (x, &r) in row.iter_mut().zip(&w) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        self.rows.push((pivot, w));
        true
    }

    /// The current (reduced) basis vectors.
    pub fn vectors(&self) -> Vec<Vec<FieldElem>> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }
}

/// Rank of a family of vectors of equal length `dim`.
pub fn rank_of(field: Field, dim: usize, vectors: &[Vec<FieldElem>]) -> usize {
    let mut b = EchelonBasis::new(field, dim);
    for v in vectors {
        b.insert(v);
    }
    b.rank()
}

/// Splits `GF(p)^n` as `image ⊕ complement`, where the complement is spanned by
/// standard basis vectors chosen left to right.
///
/// Returns `(q, s)`: `q` is the `c x n` quotient map killing the image and `s`
/// the `n x c` section with `q * s = 1`.
pub fn quotient_maps(field: Field, n: usize, image: &[Vec<FieldElem>]) -> (Matrix, Matrix) {
    let mut basis = EchelonBasis::new(field, n);
    let mut all = Vec::new();
    for v in image {
        if basis.insert(v) {
            all.push(v.clone());
        }
    }
    let image_rank = all.len();
    let mut complement = Vec::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        if basis.insert(&e) {
            all.push(e.clone());
            complement.push(e);
        }
    }
    let c = complement.len();
    let change = Matrix::from_columns(field, n, &all);
    let inv = change
        .inverse()
        .expect("image plus complement is a basis by construction");
    let mut q = Matrix::zeros(field, c, n);
    for i in 0..c {
        for j in 0..n {
            q.set(i, j, inv.get(image_rank + i, j));
        }
    }
    let s = Matrix::from_columns(field, n, &complement);
    (q, s)
}
