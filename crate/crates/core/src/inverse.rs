//! Parameter recovery and prescribed-vector synthesis.
//!
//! A real Hessenberg orthogonal matrix is brought to the family's sign
//! pattern (negative subdiagonal, nonnegative elsewhere) by flipping the signs
//! of rows and columns. The parameters are then read off the subdiagonal,
//! since `q(i, i−1) = z_{n−i+1}`. A vanishing subdiagonal entry means a zero
//! parameter, which splits the member into a direct sum of smaller members,
//! so degenerate inputs go through the same path as generic ones.

use std::ops::Div;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{build, ConstructError, Matrix, Ring};
use crate::params::{Mode, ParamVector};
use crate::radical::{Radical, Sign};
use crate::verify::{verify_exact_matrix, verify_float};

/// Default tolerance for "is zero", "is orthogonal" and "matches".
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InverseError {
    #[error("matrix is not orthogonal (Gram residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("matrix is not Hessenberg: entry ({row}, {col}) below the subdiagonal is nonzero")]
    NotHessenberg { row: usize, col: usize },
    #[error("reconstruction disagrees with the input by {deviation:e}")]
    NoMatch { deviation: f64 },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("vector is not unit norm: squares sum to {0}")]
    NotUnitNorm(String),
    #[error("entry {0} is negative")]
    NegativeEntry(usize),
    #[error("invalid transform: {0}")]
    BadTransform(String),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// Row/column sign flips and permutations. Applied to `m` it produces
/// `out[i][j] = row_signs[i] · col_signs[j] · m[row_perm[i]][col_perm[j]]`
/// (0-based permutations).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceTransform {
    pub row_signs: Vec<i8>,
    pub col_signs: Vec<i8>,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

impl EquivalenceTransform {
    pub fn identity(n: usize) -> Self {
        EquivalenceTransform {
            row_signs: vec![1; n],
            col_signs: vec![1; n],
            row_perm: (0..n).collect(),
            col_perm: (0..n).collect(),
        }
    }

    pub fn new(
        row_signs: Vec<i8>,
        col_signs: Vec<i8>,
        row_perm: Vec<usize>,
        col_perm: Vec<usize>,
    ) -> Result<Self, InverseError> {
        let n = row_signs.len();
        if [col_signs.len(), row_perm.len(), col_perm.len()].iter().any(|&l| l != n) {
            return Err(InverseError::BadTransform("length mismatch".into()));
        }
        if row_signs.iter().chain(&col_signs).any(|&s| s != 1 && s != -1) {
            return Err(InverseError::BadTransform("signs must be ±1".into()));
        }
        for perm in [&row_perm, &col_perm] {
            let mut seen = vec![false; n];
            for &p in perm {
                if p >= n || std::mem::replace(&mut seen[p], true) {
                    return Err(InverseError::BadTransform("not a permutation".into()));
                }
            }
        }
        Ok(EquivalenceTransform {
            row_signs,
            col_signs,
            row_perm,
            col_perm,
        })
    }

    pub fn n(&self) -> usize {
        self.row_signs.len()
    }

    pub fn is_identity(&self) -> bool {
        *self == EquivalenceTransform::identity(self.n())
    }

    pub fn has_identity_perms(&self) -> bool {
        self.row_perm.iter().enumerate().all(|(i, &p)| i == p)
            && self.col_perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Applies the transform; fails if the result leaves Hessenberg form.
    pub fn apply(&self, m: &Matrix) -> Result<Matrix, InverseError> {
        let n = m.n();
        if n != self.n() {
            return Err(InverseError::BadTransform(format!(
                "transform is for n = {}, matrix has n = {n}",
                self.n()
            )));
        }
        let out = match m {
            Matrix::Exact { entries, .. } => Matrix::Exact {
                n,
                entries: (0..n * n)
                    .map(|k| {
                        let (i, j) = (k / n, k % n);
                        let e = entries[self.row_perm[i] * n + self.col_perm[j]].clone();
                        if self.row_signs[i] * self.col_signs[j] < 0 {
                            -e
                        } else {
                            e
                        }
                    })
                    .collect(),
            },
            Matrix::Float { entries, .. } => Matrix::Float {
                n,
                entries: (0..n * n)
                    .map(|k| {
                        let (i, j) = (k / n, k % n);
                        f64::from(self.row_signs[i] * self.col_signs[j])
                            * entries[self.row_perm[i] * n + self.col_perm[j]]
                    })
                    .collect(),
            },
        };
        if let Some((row, col)) = first_below_subdiagonal(&out, 0.0) {
            return Err(InverseError::NotHessenberg { row, col });
        }
        Ok(out)
    }
}

/// First nonzero entry below the subdiagonal, 1-based.
fn first_below_subdiagonal(m: &Matrix, tol: f64) -> Option<(usize, usize)> {
    let n = m.n();
    (0..n)
        .flat_map(|r| (0..r.saturating_sub(1)).map(move |c| (r, c)))
        .find(|&(r, c)| m.sign_at(r, c, tol) != Sign::Zero)
        .map(|(r, c)| (r + 1, c + 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub z: ParamVector,
    pub transform: EquivalenceTransform,
    /// The reconstruction matched bit for bit (always so in exact mode).
    pub exact: bool,
}

/// Union-find over row and column nodes carrying the parity of each node
/// relative to its root.
struct ParityForest {
    parent: Vec<usize>,
    parity: Vec<i8>,
}

impl ParityForest {
    fn new(size: usize) -> Self {
        ParityForest {
            parent: (0..size).collect(),
            parity: vec![1; size],
        }
    }

    fn find(&mut self, x: usize) -> (usize, i8) {
        let p = self.parent[x];
        if p == x {
            return (x, 1);
        }
        let (root, par) = self.find(p);
        self.parent[x] = root;
        self.parity[x] *= par;
        (root, self.parity[x])
    }

    /// Records `sign(a) · sign(b) = rel`; returns false on contradiction.
    fn union(&mut self, a: usize, b: usize, rel: i8) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa * pb == rel;
        }
        let (root, child, flip) = if ra < rb { (ra, rb, pa * pb * rel) } else { (rb, ra, pa * pb * rel) };
        self.parent[child] = root;
        self.parity[child] = flip;
        true
    }
}

/// Row and column signs `d`, `e` such that `d_r · e_c · h(r, c)` has the
/// family's sign pattern. Edges are taken in order of decreasing magnitude so
/// that large entries decide the signs when noise makes small ones disagree.
fn normalizing_signs(h: &Matrix, tol: f64) -> (Vec<i8>, Vec<i8>) {
    let n = h.n();
    let mut edges: Vec<(f64, usize, usize, i8)> = Vec::new();
    for r in 0..n {
        for c in (r.saturating_sub(1))..n {
            let s = h.sign_at(r, c, tol);
            if s == Sign::Zero {
                continue;
            }
            let target = if c + 1 == r { -1 } else { 1 };
            edges.push((h.get_f64(r, c).abs(), r, c, s.as_i8() * target));
        }
    }
    edges.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut forest = ParityForest::new(2 * n);
    for (_, r, c, rel) in edges {
        forest.union(r, n + c, rel);
    }
    let nodes: Vec<(usize, i8)> = (0..2 * n).map(|x| forest.find(x)).collect();
    // Each component may be flipped as a whole; keep the flip with fewer
    // negative signs (ties keep the lowest-index node positive).
    let mut balance = vec![0i64; 2 * n];
    for &(root, s) in &nodes {
        balance[root] += i64::from(s);
    }
    let signs: Vec<i8> = nodes
        .iter()
        .map(|&(root, s)| if balance[root] < 0 { -s } else { s })
        .collect();
    (signs[..n].to_vec(), signs[n..].to_vec())
}

/// Recovers parameters and an equivalence transform with
/// `transform.apply(build(z)) == h` (entrywise within `tol` in float mode).
pub fn recover(h: &Matrix, tol: f64) -> Result<RecoveryResult, InverseError> {
    let n = h.n();
    if n < 2 {
        return Err(InverseError::DimensionTooSmall(n));
    }
    let report = match h {
        Matrix::Exact { .. } => verify_exact_matrix(h),
        Matrix::Float { .. } => verify_float(h, tol),
    }
    .map_err(|_| InverseError::NotUnitary { residual: f64::NAN })?;
    if !report.passed {
        let residual = report
            .max_residual
            .or_else(|| report.failures.iter().filter_map(|f| f.residual).reduce(f64::max))
            .unwrap_or(f64::NAN);
        return Err(InverseError::NotUnitary { residual });
    }
    if let Some((row, col)) = first_below_subdiagonal(h, tol) {
        return Err(InverseError::NotHessenberg { row, col });
    }

    let (row_signs, col_signs) = normalizing_signs(h, tol);
    let transform = EquivalenceTransform {
        row_signs,
        col_signs,
        row_perm: (0..n).collect(),
        col_perm: (0..n).collect(),
    };

    // z_k sits at 0-based (n − k, n − k − 1).
    let z = match h {
        Matrix::Exact { entries, .. } => ParamVector::exact(
            (1..n).map(|k| entries[(n - k) * n + (n - k - 1)].square()).collect(),
        )
        .map_err(ConstructError::from)?,
        Matrix::Float { entries, .. } => ParamVector::float(
            (1..n)
                .map(|k| {
                    let x = entries[(n - k) * n + (n - k - 1)];
                    if x.abs() <= tol {
                        0.0
                    } else {
                        (x * x).min(1.0)
                    }
                })
                .collect(),
        )
        .map_err(ConstructError::from)?,
    };

    let rebuilt = transform.apply(&build(&z, h.mode())?.matrix)?;
    let (matches, exact) = match (&rebuilt, h) {
        (Matrix::Exact { entries: a, .. }, Matrix::Exact { entries: b, .. }) => {
            let eq = a == b;
            (eq, eq)
        }
        _ => {
            let (a, b) = (rebuilt.to_f64_vec(), h.to_f64_vec());
            let dev = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            (dev <= tol, dev == 0.0)
        }
    };
    if !matches {
        let dev = rebuilt
            .to_f64_vec()
            .iter()
            .zip(h.to_f64_vec())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        return Err(InverseError::NoMatch { deviation: dev });
    }
    Ok(RecoveryResult { z, transform, exact })
}

/// Scalars the synthesis recurrences can run over.
pub trait ChainScalar: Ring + Div<Output = Self> + PartialOrd + std::fmt::Display {
    fn negligible(&self, tol: f64) -> bool;
    fn into_params(z: Vec<Self>) -> Result<ParamVector, InverseError>;
}

impl ChainScalar for BigRational {
    fn negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn into_params(z: Vec<Self>) -> Result<ParamVector, InverseError> {
        Ok(ParamVector::exact(z).map_err(ConstructError::from)?)
    }
}

impl ChainScalar for f64 {
    fn negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn into_params(z: Vec<Self>) -> Result<ParamVector, InverseError> {
        Ok(ParamVector::float(z).map_err(ConstructError::from)?)
    }
}

/// Parameters produced by synthesis. `unconstrained` lists the 1-based `k`
/// whose `z_k` had no effect on the prescribed vector and was set to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub params: ParamVector,
    pub unconstrained: Vec<usize>,
}

/// Solves `t₁ = 1 − s₁`, `t_m = 1 − s_m / (t₁ ⋯ t_{m−1})`. Returns `t` and
/// the 0-based positions left unconstrained by a vanished prefix product.
///
/// For a unit vector the prefix product equals the tail sum
/// `R_m = s_m + … + s_n`, so `t_m = R_{m+1} / R_m`: a ratio of sums of
/// nonnegative terms, free of the cancellation in `1 − s_m / R_m`. The same
/// identity makes "nonzero entry behind a zero prefix" impossible once the
/// norm has been checked.
fn solve_chain<T: ChainScalar>(squares: &[T], tol: f64) -> Result<(Vec<T>, Vec<usize>), InverseError> {
    let n = squares.len();
    if n < 2 {
        return Err(InverseError::DimensionTooSmall(n));
    }
    for (idx, s) in squares.iter().enumerate() {
        if *s < T::zero() && !s.negligible(tol) {
            return Err(InverseError::NegativeEntry(idx + 1));
        }
    }
    // Negligible negatives count as zero.
    let squares: Vec<T> = squares
        .iter()
        .map(|s| if *s < T::zero() { T::zero() } else { s.clone() })
        .collect();
    let mut tails = vec![T::zero(); n + 1];
    for m in (0..n).rev() {
        tails[m] = tails[m + 1].clone() + squares[m].clone();
    }
    if !(tails[0].clone() - T::one()).negligible(tol) {
        return Err(InverseError::NotUnitNorm(tails[0].to_string()));
    }

    let mut t = Vec::with_capacity(n - 1);
    let mut free = Vec::new();
    for m in 0..n - 1 {
        if tails[m].negligible(tol) {
            free.push(m);
            t.push(T::zero());
        } else {
            t.push(tails[m + 1].clone() / tails[m].clone());
        }
    }
    Ok((t, free))
}

/// Parameters whose member has first row with the given squared entries.
pub fn synth_first_row_squares<T: ChainScalar>(squares: &[T], tol: f64) -> Result<Synthesis, InverseError> {
    let n = squares.len();
    let (t, free) = solve_chain(squares, tol)?;
    // t_m is z_{n−m} (1-based m), so reverse.
    let mut z = t;
    z.reverse();
    let mut unconstrained: Vec<usize> = free.into_iter().map(|m| n - 1 - m).collect();
    unconstrained.sort_unstable();
    Ok(Synthesis {
        params: T::into_params(z)?,
        unconstrained,
    })
}

/// Parameters whose member has last column with the given squared entries.
pub fn synth_last_column_squares<T: ChainScalar>(squares: &[T], tol: f64) -> Result<Synthesis, InverseError> {
    let reversed: Vec<T> = squares.iter().rev().cloned().collect();
    let (z, free) = solve_chain(&reversed, tol)?;
    Ok(Synthesis {
        params: T::into_params(z)?,
        unconstrained: free.into_iter().map(|m| m + 1).collect(),
    })
}

fn squares_of(p: &[f64]) -> Result<Vec<f64>, InverseError> {
    p.iter()
        .enumerate()
        .map(|(idx, &x)| {
            if x < 0.0 || !x.is_finite() {
                Err(InverseError::NegativeEntry(idx + 1))
            } else {
                Ok(x * x)
            }
        })
        .collect()
}

/// Float synthesis from the entries of a nonnegative unit first row.
pub fn synth_first_row(p: &[f64], tol: f64) -> Result<Synthesis, InverseError> {
    synth_first_row_squares(&squares_of(p)?, tol)
}

/// Float synthesis from the entries of a nonnegative unit last column.
pub fn synth_last_column(q: &[f64], tol: f64) -> Result<Synthesis, InverseError> {
    synth_last_column_squares(&squares_of(q)?, tol)
}

/// Exact synthesis from radical entries (which must be nonnegative).
pub fn synth_first_row_exact(p: &[Radical]) -> Result<Synthesis, InverseError> {
    synth_first_row_squares(&radical_squares(p)?, 0.0)
}

pub fn synth_last_column_exact(q: &[Radical]) -> Result<Synthesis, InverseError> {
    synth_last_column_squares(&radical_squares(q)?, 0.0)
}

fn radical_squares(v: &[Radical]) -> Result<Vec<BigRational>, InverseError> {
    v.iter()
        .enumerate()
        .map(|(idx, r)| {
            if r.sign() == Sign::Neg {
                Err(InverseError::NegativeEntry(idx + 1))
            } else {
                Ok(r.square())
            }
        })
        .collect()
}

/// Builds the synthesized member in the mode of its parameters.
pub fn synthesized_matrix(s: &Synthesis) -> Result<Matrix, InverseError> {
    Ok(build(&s.params, s.params.mode())?.matrix)
}

impl Synthesis {
    pub fn mode(&self) -> Mode {
        self.params.mode()
    }
}
