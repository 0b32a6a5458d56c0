use serde::{Deserialize, Serialize};

use super::zmod::Zm;
use crate::error::{Error, Result};

/// Dense row-major matrix over Z/m.
///
/// Linear maps act on row vectors from the right: `x ↦ x·A`, so a map
/// from R^a to R^b is an `a × b` matrix and composition `f` then `g` is `F·G`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: Zm,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    m: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            m: self.ring.modulus(),
            rows: self.rows,
            cols: self.cols,
            entries: self.data.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = MatrixJson::deserialize(d)?;
        let ring = Zm::new(j.m).map_err(D::Error::custom)?;
        if j.entries.len() != j.rows * j.cols {
            return Err(D::Error::custom("entry count does not match rows*cols"));
        }
        let data = j.entries.into_iter().map(|e| ring.reduce(e)).collect();
        Ok(Matrix {
            ring,
            rows: j.rows,
            cols: j.cols,
            data,
        })
    }
}

impl Matrix {
    pub fn zeros(ring: Zm, rows: usize, cols: usize) -> Self {
        Matrix {
            ring,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(ring: Zm, n: usize) -> Self {
        let mut a = Self::zeros(ring, n, n);
        for i in 0..n {
            a.set(i, i, 1);
        }
        a
    }

    pub fn scalar(ring: Zm, n: usize, c: u64) -> Self {
        let mut a = Self::zeros(ring, n, n);
        let c = ring.reduce(c);
        for i in 0..n {
            a.set(i, i, c);
        }
        a
    }

    pub fn from_vec(ring: Zm, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let data = data.into_iter().map(|e| ring.reduce(e)).collect();
        Ok(Matrix {
            ring,
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from rows of signed integers; all rows must have `cols` entries.
    pub fn from_rows_i64(ring: Zm, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut a = Self::zeros(ring, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                a.set(i, j, ring.from_i64(v));
            }
        }
        Ok(a)
    }

    pub fn from_rows(ring: Zm, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|&v| ring.reduce(v)));
        }
        Ok(Matrix {
            ring,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn row_vector(ring: Zm, v: &[u64]) -> Self {
        Matrix {
            ring,
            rows: 1,
            cols: v.len(),
            data: v.iter().map(|&e| ring.reduce(e)).collect(),
        }
    }

    #[inline]
    pub fn ring(&self) -> Zm {
        self.ring
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: u64) {
        let k = i * self.cols + j;
        self.data[k] = self.ring.add(self.data[k], v);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.row_iter().map(<[u64]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn check_ring(&self, other: &Matrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(
                self.ring.modulus(),
                other.ring.modulus(),
            ));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = self.ring;
        let m = r.modulus() as u128;
        let mut out = Matrix::zeros(r, self.rows, other.cols);
        let mut acc = vec![0u128; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let brow = other.row(k);
                for (slot, &b) in acc.iter_mut().zip(brow) {
                    *slot += a as u128 * b as u128;
                }
            }
            for (j, a) in acc.iter().enumerate() {
                out.set(i, j, (*a % m) as u64);
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows, "vector length vs matrix rows");
        let r = self.ring;
        let m = r.modulus() as u128;
        let mut acc = vec![0u128; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (slot, &b) in acc.iter_mut().zip(self.row(k)) {
                *slot += a as u128 * b as u128;
            }
        }
        acc.into_iter().map(|a| (a % m) as u64).collect()
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let r = self.ring;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| r.add(a, b))
            .collect();
        Ok(self.with_data(data))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        let r = self.ring;
        self.with_data(self.data.iter().map(|&a| r.neg(a)).collect())
    }

    pub fn scale(&self, c: u64) -> Matrix {
        let r = self.ring;
        self.with_data(self.data.iter().map(|&a| r.mul(a, c)).collect())
    }

    fn with_data(&self, data: Vec<u64>) -> Matrix {
        Matrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("power of a non-square matrix".into()));
        }
        let mut acc = Matrix::identity(self.ring, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts".into()));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Matrix {
            ring: self.ring,
            rows: self.rows,
            cols,
            data,
        })
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack column counts {} vs {}",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            ring: self.ring,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn push_row(&mut self, row: &[u64]) {
        assert_eq!(row.len(), self.cols, "row length");
        let r = self.ring;
        self.data.extend(row.iter().map(|&v| r.reduce(v)));
        self.rows += 1;
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            ring: self.ring,
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.ring, self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                out.set(i, jj, self.get(i, j));
            }
        }
        out
    }

    pub fn col_range(&self, start: usize, end: usize) -> Matrix {
        let idx: Vec<usize> = (start..end).collect();
        self.select_cols(&idx)
    }

    /// Block-diagonal sum.
    pub fn block_diag(ring: Zm, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(ring, rows, cols);
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

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        let r = self.ring;
        let mut out = Matrix::zeros(r, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, r.mul(a, other.get(k, l)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reduce every entry along a ring map Z/m -> Z/m' (m' | m).
    pub fn change_ring(&self, target: Zm) -> Result<Matrix> {
        if !self.ring.modulus().is_multiple_of(target.modulus()) {
            return Err(Error::NoRingMap {
                from: self.ring.modulus(),
                to: target.modulus(),
            });
        }
        Ok(Matrix {
            ring: target,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| target.reduce(a)).collect(),
        })
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let id = Matrix::identity(self.ring, n);
        let sol = super::solve::solve_many(self, &id).ok()??;
        // A one-sided inverse of a square matrix over a finite ring is two-sided.
        Some(sol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u64) -> Zm {
        Zm::new(m).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let a = Matrix::from_rows(z(4), 2, &[vec![1, 2], vec![3, 0]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"m":4,"rows":2,"cols":2,"entries":[1,2,3,0]}"#);
        let b: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<Matrix>(r#"{"m":4,"rows":2,"cols":2,"entries":[1]}"#).is_err());
    }

    #[test]
    fn multiply_and_kron() {
        let r = z(9);
        let a = Matrix::from_rows(r, 2, &[vec![1, 2], vec![3, 4]]).unwrap();
        let b = Matrix::from_rows(r, 2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(a.mul(&b).unwrap().to_rows(), vec![vec![2, 1], vec![4, 3]]);
        let k = a.kron(&Matrix::identity(r, 2)).unwrap();
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(2, 0), 3);
        assert_eq!(k.get(3, 1), 3);
    }

    #[test]
    fn inverse_exists_only_for_units() {
        let r = z(4);
        let a = Matrix::from_rows(r, 2, &[vec![1, 1], vec![0, 3]]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(r, 2));
        let b = Matrix::from_rows(r, 1, &[vec![2]]).unwrap();
        assert!(b.inverse().is_none());
    }
}
