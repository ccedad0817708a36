use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use super::{LinAlgError, Ring, Scalar};

/// A dense matrix over an exact field. `0 x n` and `n x 0` matrices are
/// legal and behave as maps to/from the zero space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> Matrix {
        Matrix {
            ring,
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: Ring, n: usize) -> Matrix {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m[(i, i)] = ring.one();
        }
        m
    }

    /// Builds a matrix from integer rows. All rows must have `cols` entries.
    pub fn from_i64_rows(ring: Ring, cols: usize, rows: &[Vec<i64>]) -> Matrix {
        let mut m = Matrix::zeros(ring, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row {i} has wrong length");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = ring.from_i64(*v);
            }
        }
        m
    }

    pub fn from_entries(
        ring: Ring,
        rows: usize,
        cols: usize,
        data: Vec<Scalar>,
    ) -> Result<Matrix, LinAlgError> {
        if data.len() != rows * cols {
            return Err(LinAlgError::DimensionMismatch {
                op: "from_entries",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        if let Some(bad) = data.iter().find(|s| s.ring() != ring) {
            return Err(LinAlgError::RingMismatch(ring, bad.ring()));
        }
        Ok(Matrix {
            ring,
            rows,
            cols,
            data,
        })
    }

    pub fn ring(&self) -> Ring {
        self.ring
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = &self[(i, j)];
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn checked_mul(&self, rhs: &Matrix) -> Result<Matrix, LinAlgError> {
        if self.cols != rhs.rows {
            return Err(LinAlgError::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        if self.ring != rhs.ring {
            return Err(LinAlgError::RingMismatch(self.ring, rhs.ring));
        }
        let mut out = Matrix::zeros(self.ring, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    let slot = &mut out[(i, j)];
                    *slot = &*slot + &prod;
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &Matrix) -> Result<Matrix, LinAlgError> {
        if self.shape() != rhs.shape() {
            return Err(LinAlgError::DimensionMismatch {
                op: "add",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Matrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&self.ring.from_i64(-1))
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix) -> Result<Matrix, LinAlgError> {
        Matrix::hconcat(self.ring, self.rows, &[self, rhs])
    }

    /// Vertical concatenation.
    pub fn vstack(&self, rhs: &Matrix) -> Result<Matrix, LinAlgError> {
        Matrix::vconcat(self.ring, self.cols, &[self, rhs])
    }

    /// Concatenates blocks side by side; `rows` fixes the height when the list is empty.
    pub fn hconcat(ring: Ring, rows: usize, blocks: &[&Matrix]) -> Result<Matrix, LinAlgError> {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(ring, rows, cols);
        let mut offset = 0;
        for b in blocks {
            if b.rows != rows {
                return Err(LinAlgError::DimensionMismatch {
                    op: "hconcat",
                    left: (rows, offset),
                    right: b.shape(),
                });
            }
            out.set_block(0, offset, b);
            offset += b.cols;
        }
        Ok(out)
    }

    /// Stacks blocks vertically; `cols` fixes the width when the list is empty.
    pub fn vconcat(ring: Ring, cols: usize, blocks: &[&Matrix]) -> Result<Matrix, LinAlgError> {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(ring, rows, cols);
        let mut offset = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(LinAlgError::DimensionMismatch {
                    op: "vconcat",
                    left: (offset, cols),
                    right: b.shape(),
                });
            }
            out.set_block(offset, 0, b);
            offset += b.rows;
        }
        Ok(out)
    }

    /// Block diagonal matrix.
    pub fn block_diag(ring: Ring, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(ring, rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Matrix {
        assert!(row + rows <= self.rows && col + cols <= self.cols, "block out of range");
        let mut out = Matrix::zeros(self.ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(row + i, col + j)].clone();
            }
        }
        out
    }

    pub fn set_block(&mut self, row: usize, col: usize, block: &Matrix) {
        assert!(
            row + block.rows <= self.rows && col + block.cols <= self.cols,
            "block out of range"
        );
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Reduced row echelon form and pivot columns. Pivots are taken as the
    /// first nonzero entry scanning columns left to right.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let delta = &factor * &m[(r, j)];
                    m[(i, j)] = &m[(i, j)] - &delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Columns form a basis of the right kernel.
    pub fn kernel_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.ring, self.cols, free.len());
        for (idx, &f) in free.iter().enumerate() {
            k[(f, idx)] = self.ring.one();
            for (row, &p) in pivots.iter().enumerate() {
                k[(p, idx)] = -&r[(row, f)];
            }
        }
        k
    }

    /// A particular solution `x` of `self * x = rhs` (any number of columns).
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix, LinAlgError> {
        if self.rows != rhs.rows {
            return Err(LinAlgError::DimensionMismatch {
                op: "solve",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let aug = self.hstack(rhs)?;
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return Err(LinAlgError::NoSolution);
        }
        let mut x = Matrix::zeros(self.ring, self.cols, rhs.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(p, j)] = r[(row, self.cols + j)].clone();
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::NotSquare(self.shape()));
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(self.ring, n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).any(|&p| p >= n) {
            return Err(LinAlgError::NotInvertible);
        }
        Ok(r.block(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    fn idx(&self, (i, j): (usize, usize)) -> usize {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {:?}", self.shape());
        i * self.cols + j
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;

    fn index(&self, at: (usize, usize)) -> &Scalar {
        &self.data[self.idx(at)]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, at: (usize, usize)) -> &mut Scalar {
        let i = self.idx(at);
        &mut self.data[i]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == 0 || self.cols == 0 {
            return write!(f, "[{}x{}]", self.rows, self.cols);
        }
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Ring = Ring::Rational;

    #[test]
    fn identity_has_full_rank_and_empty_kernel() {
        let id = Matrix::identity(Q, 3);
        assert_eq!(id.rank(), 3);
        assert_eq!(id.kernel_basis().shape(), (3, 0));
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn rank_one_kernel() {
        let m = Matrix::from_i64_rows(Q, 2, &[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel_basis();
        assert_eq!(k, Matrix::from_i64_rows(Q, 1, &[vec![-2], vec![1]]));
        assert!((&m * &k).is_zero());
        assert_eq!(m.inverse(), Err(LinAlgError::NotInvertible));
    }

    #[test]
    fn two_vanishes_over_f2() {
        let f2 = Ring::prime(2).unwrap();
        let m = Matrix::from_i64_rows(f2, 1, &[vec![2]]);
        assert_eq!(m.rank(), 0);
    }

    #[test]
    fn empty_shapes() {
        let a = Matrix::zeros(Q, 0, 3);
        let b = Matrix::zeros(Q, 3, 0);
        assert_eq!((&b * &a).shape(), (3, 3));
        assert!((&b * &a).is_zero());
        assert_eq!((&a * &b).shape(), (0, 0));
        assert_eq!(a.kernel_basis(), Matrix::identity(Q, 3));
        assert_eq!(Matrix::zeros(Q, 0, 0).inverse().unwrap().shape(), (0, 0));
    }

    #[test]
    fn solve_and_no_solution() {
        let a = Matrix::from_i64_rows(Q, 2, &[vec![1, 1], vec![1, -1]]);
        let b = Matrix::from_i64_rows(Q, 1, &[vec![3], vec![1]]);
        let x = a.solve(&b).unwrap();
        assert_eq!(&a * &x, b);
        let singular = Matrix::from_i64_rows(Q, 2, &[vec![1, 1], vec![1, 1]]);
        assert_eq!(singular.solve(&b), Err(LinAlgError::NoSolution));
        assert!(matches!(
            a.solve(&Matrix::zeros(Q, 3, 1)),
            Err(LinAlgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mul_dimension_mismatch() {
        let a = Matrix::zeros(Q, 2, 3);
        assert!(a.checked_mul(&a).is_err());
    }
}
