//! Dense exact matrices over a [`Ring`].
//!
//! Entries are stored reduced (over `Z/N` always in `[0, N)`), row-major.
//! A `rows x 0` or `0 x cols` matrix is legal and behaves as the identity
//! for block operations; empty products are zero matrices of the right
//! shape.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::Ring;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>, // row-major, always reduced
}

impl Matrix {
    pub fn zero(ring: Ring, rows: usize, cols: usize) -> Matrix {
        Matrix {
            ring,
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(ring: Ring, n: usize) -> Matrix {
        let mut m = Matrix::zero(ring, n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Diagonal matrix (not necessarily square): `d[i]` at `(i, i)`.
    pub fn diagonal(ring: Ring, rows: usize, cols: usize, d: &[BigInt]) -> Matrix {
        let mut m = Matrix::zero(ring, rows, cols);
        for (i, x) in d.iter().enumerate().take(rows.min(cols)) {
            m.set(i, i, x.clone());
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scalar(ring: Ring, n: usize, c: &BigInt) -> Matrix {
        let c = ring.reduce(c);
        Matrix::diagonal(ring, n, n, &vec![c; n])
    }

    pub fn from_rows(ring: Ring, data: &[Vec<i64>]) -> Matrix {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let mut m = Matrix::zero(ring, rows, cols);
        for (i, row) in data.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row data");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(*x));
            }
        }
        m
    }

    pub fn from_entries(ring: Ring, rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {rows}x{cols} = {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let entries = entries.into_iter().map(|x| ring.reduce(&x)).collect();
        Ok(Matrix {
            ring,
            rows,
            cols,
            entries,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.entries[i * self.cols + j] = self.ring.reduce(&x);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { BigInt::one() } else { BigInt::zero() };
                if *self.get(i, j) != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.ring.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    fn check_ring(&self, other: &Matrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                self.ring, other.ring
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "add {}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| self.ring.add(a, b))
            .collect();
        Ok(Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        let entries = self.entries.iter().map(|a| self.ring.neg(a)).collect();
        Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, c: &BigInt) -> Matrix {
        let entries = self.entries.iter().map(|a| self.ring.mul(c, a)).collect();
        Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "mul {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zero(self.ring.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = &out.entries[i * other.cols + j];
                    out.entries[i * other.cols + j] = self.ring.add(cur, &(a * b));
                }
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack {}x{} | {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zero(self.ring.clone(), self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * out.cols + j] = self.get(i, j).clone();
            }
            for j in 0..other.cols {
                out.entries[i * out.cols + self.cols + j] = other.get(i, j).clone();
            }
        }
        Ok(out)
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack {}x{} ; {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(Matrix {
            ring: self.ring.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    /// The submatrix of the listed columns, in order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zero(self.ring.clone(), self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out.entries[i * idx.len() + jj] = self.get(i, j).clone();
            }
        }
        out
    }

    /// The submatrix of the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zero(self.ring.clone(), idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                out.entries[ii * self.cols + j] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Rows `[lo, hi)` as a block.
    pub fn row_block(&self, lo: usize, hi: usize) -> Matrix {
        self.select_rows(&(lo..hi).collect::<Vec<_>>())
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Column vector from a slice.
    pub fn column_vector(ring: Ring, v: &[BigInt]) -> Matrix {
        Matrix::from_entries(ring, v.len(), 1, v.to_vec()).expect("length matches")
    }

    /// Block diagonal `[self 0; 0 other]`.
    pub fn block_diagonal(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        let top = self.hstack(&Matrix::zero(self.ring.clone(), self.rows, other.cols))?;
        let bot = Matrix::zero(self.ring.clone(), other.rows, self.cols).hstack(other)?;
        top.vstack(&bot)
    }

    /// Map entries through `Z -> Z/N` (or re-reduce).  The target ring must
    /// be modular or identical.
    pub fn change_ring(&self, ring: &Ring) -> Matrix {
        let entries = self.entries.iter().map(|x| ring.reduce(x)).collect();
        Matrix {
            ring: ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kronecker(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        let mut out = Matrix::zero(
            self.ring.clone(),
            self.rows * other.rows,
            self.cols * other.cols,
        );
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        let b = other.get(p, q);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i * other.rows + p, j * other.cols + q, a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Column-major flattening `vec(A)` as a column vector: columns stacked
    /// top to bottom.  Pairs with [`Matrix::kronecker`] via
    /// `vec(A X B) = (B^T ⊗ A) vec(X)`.
    pub fn vec_columns(&self) -> Matrix {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self.get(i, j).clone());
            }
        }
        Matrix::from_entries(self.ring.clone(), self.rows * self.cols, 1, v).expect("size")
    }

    /// Inverse of `vec_columns` with the given shape.
    pub fn from_vec_columns(ring: Ring, rows: usize, cols: usize, v: &Matrix) -> Result<Matrix> {
        if v.cols != 1 || v.rows != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "from_vec_columns wants {}x1, got {}x{}",
                rows * cols,
                v.rows,
                v.cols
            )));
        }
        let mut out = Matrix::zero(ring, rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                out.set(i, j, v.get(j * rows + i, 0).clone());
            }
        }
        Ok(out)
    }

    /// Copy `block` into position with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    /// Largest absolute value among entries (integer representatives).
    pub fn max_abs(&self) -> BigInt {
        self.entries
            .iter()
            .map(num_traits::Signed::abs)
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.ring)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

// Serialized form: dimensions as numbers, entries as decimal strings in a
// row-major nested array.  The ring is carried separately by the document.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl Matrix {
    fn to_wire(&self) -> MatrixWire {
        let entries = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(serializer)
    }
}

/// Matrices deserialize over `Z`; callers re-reduce with [`Matrix::change_ring`]
/// once the ambient ring is known.  This keeps wire bytes ring-independent.
impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Matrix, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        if wire.entries.len() != wire.rows {
            return Err(D::Error::custom(format!(
                "matrix declares {} rows but has {}",
                wire.rows,
                wire.entries.len()
            )));
        }
        let mut entries = Vec::with_capacity(wire.rows * wire.cols);
        for row in &wire.entries {
            if row.len() != wire.cols {
                return Err(D::Error::custom(format!(
                    "matrix declares {} cols but a row has {}",
                    wire.cols,
                    row.len()
                )));
            }
            for s in row {
                let x: BigInt = s
                    .parse()
                    .map_err(|e| D::Error::custom(format!("bad integer {s:?}: {e}")))?;
                entries.push(x);
            }
        }
        Matrix::from_entries(Ring::Int, wire.rows, wire.cols, entries)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}
