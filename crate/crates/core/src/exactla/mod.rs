//! Exact linear algebra over the rationals and prime fields.

mod matrix;
mod scalar;

pub use matrix::Matrix;
pub use scalar::{Ring, Scalar};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("matrix of shape {0:?} is not square")]
    NotSquare((usize, usize)),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("linear system has no solution")]
    NoSolution,
    #[error("block shape violation: {0}")]
    ShapeViolation(String),
    #[error("pair is not split: R*S is singular")]
    NotSplit,
    #[error("{0} is not a prime below 2^32")]
    BadModulus(u64),
    #[error("cannot parse scalar {0:?}")]
    BadScalar(String),
    #[error("cannot parse ring {0:?}, expected Q or Fp:p")]
    BadRing(String),
}

/// Inverts a block upper triangular matrix whose diagonal blocks are
/// invertible and whose blocks strictly below the diagonal vanish.
///
/// `blocks[i]` is the size of the i-th diagonal block; the same partition is
/// used for rows and columns. The shape is checked before inverting, and the
/// inverse is computed by block back substitution.
pub fn invert_unitriangular_block(m: &Matrix, blocks: &[usize]) -> Result<Matrix, LinAlgError> {
    if !m.is_square() {
        return Err(LinAlgError::NotSquare(m.shape()));
    }
    let n: usize = blocks.iter().sum();
    if n != m.rows() {
        return Err(LinAlgError::ShapeViolation(format!(
            "blocks sum to {n}, matrix has size {}",
            m.rows()
        )));
    }
    let offsets: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, &b| {
            let o = *acc;
            *acc += b;
            Some(o)
        })
        .collect();
    let blk = |i: usize, j: usize| m.block(offsets[i], offsets[j], blocks[i], blocks[j]);

    for i in 0..blocks.len() {
        for j in 0..i {
            if !blk(i, j).is_zero() {
                return Err(LinAlgError::ShapeViolation(format!(
                    "block ({i},{j}) below the diagonal is nonzero"
                )));
            }
        }
    }
    let diag_inv: Vec<Matrix> = (0..blocks.len())
        .map(|i| blk(i, i).inverse())
        .collect::<Result<_, _>>()?;

    let ring = m.ring();
    let mut inv = Matrix::zeros(ring, n, n);
    for j in 0..blocks.len() {
        inv.set_block(offsets[j], offsets[j], &diag_inv[j]);
        for i in (0..j).rev() {
            let mut acc = Matrix::zeros(ring, blocks[i], blocks[j]);
            for l in i + 1..=j {
                let w = inv.block(offsets[l], offsets[j], blocks[l], blocks[j]);
                acc = acc.checked_add(&(&blk(i, l) * &w))?;
            }
            inv.set_block(offsets[i], offsets[j], &(&diag_inv[i] * &acc).neg());
        }
    }
    Ok(inv)
}

/// Splits off the complement of a section-retraction pair.
///
/// `s: V -> X` and `r: X -> W` with `r*s` invertible. Returns `(incl, proj)`
/// where the columns of `incl` are a basis of `ker r`, and `proj` is the
/// coordinate block of `[s | incl]^-1` belonging to `incl`, so that
/// `proj*incl = 1` and `proj*s = 0`.
pub fn complement_of_split_pair(s: &Matrix, r: &Matrix) -> Result<(Matrix, Matrix), LinAlgError> {
    if r.cols() != s.rows() {
        return Err(LinAlgError::DimensionMismatch {
            op: "complement_of_split_pair",
            left: s.shape(),
            right: r.shape(),
        });
    }
    let rs = r.checked_mul(s)?;
    if !rs.is_invertible() {
        return Err(LinAlgError::NotSplit);
    }
    let incl = r.kernel_basis();
    let assembled = s.hstack(&incl)?;
    let inv = assembled.inverse().map_err(|_| LinAlgError::NotSplit)?;
    let proj = inv.block(s.cols(), 0, incl.cols(), inv.cols());
    Ok((incl, proj))
}
