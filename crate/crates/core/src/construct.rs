//! The closed-form family of real Hessenberg orthogonal matrices.
//!
//! With the sentinels `z₀ = z_n = 0`, the squared entries of the `n × n`
//! member with parameters `z₁ … z_{n−1}` are
//!
//! ```text
//! q(i, j) = 0                                                       j < i − 1
//! q(i, i−1) = z_{n−i+1}
//! q(i, j) = (1 − z_{n−i+1}) (1 − z_{n−j}) ∏_{k=n−j+1}^{n−i} z_k        j ≥ i
//! ```
//!
//! and the entry itself is `−√q` on the subdiagonal and `+√q` on and above
//! the diagonal. Row and column indices in this module's formula functions
//! are 1-based to match the formula; storage accessors are 0-based.

use std::ops::{Mul, Sub};

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{z_at, Mode, ParamError, ParamVector};
use crate::radical::{Radical, Sign};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("index ({i}, {j}) out of range for n = {n}")]
    IndexOutOfRange { n: usize, i: usize, j: usize },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("expected {expected} entries for a square matrix, got {got}")]
    NotSquare { expected: usize, got: usize },
    #[error("vertex bits must be 0 or 1")]
    BadVertexBit,
    #[error("exact mode needs rational parameters")]
    FloatParamsInExactMode,
}

/// Arithmetic needed to evaluate the closed form: rationals, floats and
/// polynomials all qualify.
pub trait Ring: Clone + Zero + One + Sub<Output = Self> + Mul<Output = Self> {}

impl<T> Ring for T where T: Clone + Zero + One + Sub<Output = T> + Mul<Output = T> {}

/// `q(i, j)` evaluated straight from the closed form over any [`Ring`].
///
/// `z` holds `z₁ … z_{n−1}`; indices are 1-based.
pub fn squared_entry_with<T: Ring>(z: &[T], i: usize, j: usize) -> Result<T, ConstructError> {
    let n = z.len() + 1;
    if i == 0 || j == 0 || i > n || j > n {
        return Err(ConstructError::IndexOutOfRange { n, i, j });
    }
    if j + 1 < i {
        return Ok(T::zero());
    }
    if j + 1 == i {
        return Ok(z_at(z, n - i + 1));
    }
    let mut q = (T::one() - z_at(z, n - i + 1)) * (T::one() - z_at(z, n - j));
    for k in (n - j + 1)..=(n - i) {
        q = q * z_at(z, k);
    }
    Ok(q)
}

/// Exact rational or floating scalar.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }
}

/// The squared entry `q(i, j)` of the `n × n` member with parameters `z`.
pub fn squared_entry(n: usize, i: usize, j: usize, z: &ParamVector) -> Result<Scalar, ConstructError> {
    if z.n() != n {
        return Err(ParamError::WrongCount {
            expected: n.saturating_sub(1),
            got: z.len(),
        }
        .into());
    }
    match z {
        ParamVector::Exact(v) => squared_entry_with(v, i, j).map(Scalar::Exact),
        ParamVector::Float(v) => squared_entry_with(v, i, j).map(Scalar::Float),
    }
}

/// Sign of entry `(i, j)`: `−1` on the subdiagonal, `0` below it, `+1` elsewhere.
pub fn entry_sign(i: usize, j: usize) -> i8 {
    if j + 1 == i {
        -1
    } else if j + 1 < i {
        0
    } else {
        1
    }
}

/// Which factors make up `q(i, j)`: `one_minus` lists `a` for each `(1 − z_a)`,
/// `plain` lists `k` for each `z_k`. Sentinel factors equal to 1 are omitted.
/// `None` for entries below the subdiagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryFactors {
    pub one_minus: Vec<usize>,
    pub plain: Vec<usize>,
}

pub fn entry_factors(n: usize, i: usize, j: usize) -> Option<EntryFactors> {
    if j + 1 < i {
        return None;
    }
    if j + 1 == i {
        return Some(EntryFactors {
            one_minus: vec![],
            plain: vec![n - i + 1],
        });
    }
    let one_minus = [n - i + 1, n - j]
        .into_iter()
        .filter(|&a| a >= 1 && a < n)
        .collect();
    Some(EntryFactors {
        one_minus,
        plain: ((n - j + 1)..=(n - i)).collect(),
    })
}

/// Dense row-major `n × n` real matrix, exact or floating.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Exact { n: usize, entries: Vec<Radical> },
    Float { n: usize, entries: Vec<f64> },
}

impl Matrix {
    pub fn from_exact(n: usize, entries: Vec<Radical>) -> Result<Self, ConstructError> {
        check_square(n, entries.len())?;
        Ok(Matrix::Exact { n, entries })
    }

    pub fn from_float(n: usize, entries: Vec<f64>) -> Result<Self, ConstructError> {
        check_square(n, entries.len())?;
        Ok(Matrix::Float { n, entries })
    }

    pub fn identity(n: usize, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Matrix::Exact {
                n,
                entries: (0..n * n)
                    .map(|k| if k / n == k % n { Radical::one() } else { Radical::zero() })
                    .collect(),
            },
            Mode::Float => Matrix::Float {
                n,
                entries: (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 }).collect(),
            },
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Matrix::Exact { n, .. } | Matrix::Float { n, .. } => *n,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Matrix::Exact { .. } => Mode::Exact,
            Matrix::Float { .. } => Mode::Float,
        }
    }

    /// Entry at 0-based `(row, col)` as a float.
    pub fn get_f64(&self, row: usize, col: usize) -> f64 {
        match self {
            Matrix::Exact { n, entries } => entries[row * n + col].to_f64(),
            Matrix::Float { n, entries } => entries[row * n + col],
        }
    }

    pub fn get_exact(&self, row: usize, col: usize) -> Option<&Radical> {
        match self {
            Matrix::Exact { n, entries } => Some(&entries[row * n + col]),
            Matrix::Float { .. } => None,
        }
    }

    pub fn exact_entries(&self) -> Option<&[Radical]> {
        match self {
            Matrix::Exact { entries, .. } => Some(entries),
            Matrix::Float { .. } => None,
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match self {
            Matrix::Exact { entries, .. } => entries.iter().map(Radical::to_f64).collect(),
            Matrix::Float { entries, .. } => entries.clone(),
        }
    }

    pub fn to_float(&self) -> Matrix {
        Matrix::Float {
            n: self.n(),
            entries: self.to_f64_vec(),
        }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_row_slice(n, n, &self.to_f64_vec())
    }

    /// Sign of the 0-based entry, treating `|x| ≤ tol` as zero in float mode.
    pub fn sign_at(&self, row: usize, col: usize, tol: f64) -> Sign {
        match self {
            Matrix::Exact { n, entries } => entries[row * n + col].sign(),
            Matrix::Float { n, entries } => {
                let x = entries[row * n + col];
                if x.abs() <= tol {
                    Sign::Zero
                } else if x < 0.0 {
                    Sign::Neg
                } else {
                    Sign::Pos
                }
            }
        }
    }

    /// Zero below the first subdiagonal (within `tol` in float mode).
    pub fn is_hessenberg(&self, tol: f64) -> bool {
        let n = self.n();
        (0..n).all(|r| (0..r.saturating_sub(1)).all(|c| self.sign_at(r, c, tol) == Sign::Zero))
    }

    /// Exactly one nonzero per row and column, each of magnitude 1.
    pub fn is_signed_permutation(&self, tol: f64) -> bool {
        let n = self.n();
        let unit = |r: usize, c: usize| match self {
            Matrix::Exact { n, entries } => entries[r * n + c].radicand().is_one(),
            Matrix::Float { .. } => (self.get_f64(r, c).abs() - 1.0).abs() <= tol,
        };
        let mut col_hits = vec![0usize; n];
        for r in 0..n {
            let mut hits = 0;
            for (c, hit) in col_hits.iter_mut().enumerate() {
                if self.sign_at(r, c, tol) != Sign::Zero {
                    if !unit(r, c) {
                        return false;
                    }
                    hits += 1;
                    *hit += 1;
                }
            }
            if hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&h| h == 1)
    }
}

fn check_square(n: usize, len: usize) -> Result<(), ConstructError> {
    if len != n * n {
        return Err(ConstructError::NotSquare {
            expected: n * n,
            got: len,
        });
    }
    Ok(())
}

/// A member of the family together with the parameters that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct HessenbergUnitary {
    pub matrix: Matrix,
    pub params: ParamVector,
}

impl HessenbergUnitary {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn mode(&self) -> Mode {
        self.matrix.mode()
    }
}

impl std::ops::Deref for HessenbergUnitary {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.matrix
    }
}

/// All squared entries in row-major order. Walks each row left to right,
/// growing the product of `z`s one factor per column.
fn squared_grid<T: Ring>(z: &[T]) -> Vec<T> {
    let n = z.len() + 1;
    let mut out = vec![T::zero(); n * n];
    for i in 1..=n {
        if i >= 2 {
            out[(i - 1) * n + (i - 2)] = z_at(z, n - i + 1);
        }
        let head = T::one() - z_at(z, n - i + 1);
        let mut prod = T::one();
        for j in i..=n {
            if j > i {
                prod = prod * z_at(z, n - j + 1);
            }
            out[(i - 1) * n + (j - 1)] = head.clone() * (T::one() - z_at(z, n - j)) * prod.clone();
        }
    }
    out
}

fn signed_grid<T, U>(z: &[T], mut f: impl FnMut(i8, T) -> U) -> Vec<U>
where
    T: Ring,
{
    let n = z.len() + 1;
    squared_grid(z)
        .into_iter()
        .enumerate()
        .map(|(k, q)| f(entry_sign(k / n + 1, k % n + 1), q))
        .collect()
}

/// Builds the matrix in the requested mode. Exact mode needs rational
/// parameters; rational parameters may be built in float mode.
pub fn build(z: &ParamVector, mode: Mode) -> Result<HessenbergUnitary, ConstructError> {
    let n = z.n();
    let matrix = match (z, mode) {
        (ParamVector::Exact(v), Mode::Exact) => Matrix::Exact {
            n,
            entries: signed_grid(v, |s, q| {
                Radical::new(Sign::from_i8(s), q).expect("squared entries are nonnegative")
            }),
        },
        (ParamVector::Exact(_), Mode::Float) => {
            return build(&z.to_float(), Mode::Float).map(|u| HessenbergUnitary {
                params: z.clone(),
                ..u
            })
        }
        (ParamVector::Float(_), Mode::Exact) => return Err(ConstructError::FloatParamsInExactMode),
        (ParamVector::Float(v), Mode::Float) => Matrix::Float {
            n,
            entries: signed_grid(v, |s, q: f64| {
                if q > 0.0 {
                    f64::from(s) * q.sqrt()
                } else {
                    0.0
                }
            }),
        },
    };
    Ok(HessenbergUnitary {
        matrix,
        params: z.clone(),
    })
}

/// The member at a vertex of the parameter cube; always a signed permutation.
pub fn vertex_matrix(n: usize, bits: &[u8]) -> Result<HessenbergUnitary, ConstructError> {
    if bits.len() + 1 != n {
        return Err(ParamError::WrongCount {
            expected: n.saturating_sub(1),
            got: bits.len(),
        }
        .into());
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(ConstructError::BadVertexBit);
    }
    let z = ParamVector::exact(
        bits.iter()
            .map(|&b| BigRational::from_integer(b.into()))
            .collect(),
    )?;
    build(&z, Mode::Exact)
}

/// Bits of vertex number `index`: `z_k` is bit `k − 1`.
pub fn vertex_bits(n: usize, index: u64) -> Vec<u8> {
    (0..n.saturating_sub(1)).map(|k| ((index >> k) & 1) as u8).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsityProfile {
    pub nnz: usize,
    pub density: f64,
    pub max_possible: usize,
}

/// Most nonzeros a Hessenberg matrix of size `n` can have.
pub fn max_nonzeros(n: usize) -> usize {
    n * (n + 1) / 2 + n.saturating_sub(1)
}

/// Zero threshold used by [`sparsity_profile`] for float matrices.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

pub fn sparsity_profile(u: &Matrix) -> SparsityProfile {
    sparsity_profile_with_tol(u, DEFAULT_ZERO_TOL)
}

pub fn sparsity_profile_with_tol(u: &Matrix, tol: f64) -> SparsityProfile {
    let n = u.n();
    let nnz = (0..n * n)
        .filter(|&k| u.sign_at(k / n, k % n, tol) != Sign::Zero)
        .count();
    SparsityProfile {
        nnz,
        density: nnz as f64 / (n * n) as f64,
        max_possible: max_nonzeros(n),
    }
}
