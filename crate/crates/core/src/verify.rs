//! Orthogonality checks at three levels of rigour.
//!
//! * [`verify_float`] measures the Gram residuals `UᵀU − I` and `UUᵀ − I`.
//! * [`verify_exact`] forms every row and column inner product exactly as a
//!   [`RadicalSum`].
//! * [`verify_symbolic`] proves the identities for all parameter values at
//!   once by treating `z₁ … z_{n−1}` as indeterminates: norms expand to the
//!   constant polynomial 1, and each inner product is shown to be a common
//!   radical factor times a polynomial that expands to zero.
//!
//! Pair indices in reports are 1-based.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{build, entry_factors, entry_sign, squared_entry_with, EntryFactors, Matrix};
use crate::params::{Mode, ParamVector};
use crate::poly::MultiPoly;
use crate::radical::RadicalSum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("exact verification needs rational parameters or exact entries")]
    NotExact,
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("tolerance must be nonnegative and finite")]
    BadTolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Float,
    Exact,
    Symbolic,
}

/// Whether a failure concerns two rows or two columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Rows,
    Columns,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: PairKind,
    pub pair: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub passed: bool,
    pub max_residual: Option<f64>,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    fn from_failures(mode: VerifyMode, max_residual: Option<f64>, mut failures: Vec<Failure>) -> Self {
        failures.sort_by_key(|f| (f.kind == PairKind::Columns, f.pair));
        VerifyReport {
            mode,
            passed: failures.is_empty(),
            max_residual,
            failures,
        }
    }
}

/// Max-norm Gram residual of `UᵀU − I` and `UUᵀ − I`; passes iff it is at
/// most `tol`. Exact matrices are evaluated in floating point.
pub fn verify_float(u: &Matrix, tol: f64) -> Result<VerifyReport, VerifyError> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(VerifyError::BadTolerance);
    }
    let m = u.to_dmatrix();
    let n = u.n();
    let mut failures = Vec::new();
    let mut max_residual = 0.0f64;
    for (kind, gram) in [
        (PairKind::Columns, m.transpose() * &m),
        (PairKind::Rows, &m * m.transpose()),
    ] {
        for a in 0..n {
            for b in a..n {
                let target = if a == b { 1.0 } else { 0.0 };
                let r = (gram[(a, b)] - target).abs().max((gram[(b, a)] - target).abs());
                // NaN must register as a failure.
                if r.is_nan() || r > max_residual {
                    max_residual = if r.is_nan() { f64::NAN } else { r };
                }
                if r.is_nan() || r > tol {
                    failures.push(Failure {
                        kind,
                        pair: [a + 1, b + 1],
                        residual: Some(r),
                        witness: None,
                    });
                }
            }
        }
    }
    Ok(VerifyReport::from_failures(VerifyMode::Float, Some(max_residual), failures))
}

/// Exact Gram check of `build(z)`.
pub fn verify_exact(z: &ParamVector) -> Result<VerifyReport, VerifyError> {
    if z.mode() != Mode::Exact {
        return Err(VerifyError::NotExact);
    }
    let u = build(z, Mode::Exact).map_err(|_| VerifyError::NotExact)?;
    verify_exact_matrix(&u.matrix)
}

/// Exact Gram check of a matrix with radical entries: every diagonal Gram
/// entry must equal 1 and every off-diagonal one must vanish.
pub fn verify_exact_matrix(u: &Matrix) -> Result<VerifyReport, VerifyError> {
    let entries = u.exact_entries().ok_or(VerifyError::NotExact)?;
    let n = u.n();
    let mut failures = Vec::new();
    for kind in [PairKind::Rows, PairKind::Columns] {
        let at = |line: usize, k: usize| match kind {
            PairKind::Rows => &entries[line * n + k],
            PairKind::Columns => &entries[k * n + line],
        };
        for a in 0..n {
            for b in a..n {
                let sum: RadicalSum = (0..n).map(|k| at(a, k) * at(b, k)).collect();
                let ok = if a == b {
                    sum.as_rational().is_some_and(|v| v.is_one())
                } else {
                    sum.is_zero()
                };
                if !ok {
                    let target = if a == b { 1.0 } else { 0.0 };
                    failures.push(Failure {
                        kind,
                        pair: [a + 1, b + 1],
                        residual: Some((sum.to_f64() - target).abs()),
                        witness: Some(render_sum(&sum)),
                    });
                }
            }
        }
    }
    Ok(VerifyReport::from_failures(VerifyMode::Exact, None, failures))
}

fn render_sum(s: &RadicalSum) -> String {
    if s.is_empty() {
        return "0".into();
    }
    s.terms()
        .iter()
        .map(|(rep, c)| format!("{c}*sqrt({rep})"))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Multiset of formal factors `z_k` and `(1 − z_k)`, indexed by `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorCounts {
    pub plain: Vec<u32>,
    pub one_minus: Vec<u32>,
}

impl FactorCounts {
    fn empty(n: usize) -> Self {
        FactorCounts {
            plain: vec![0; n],
            one_minus: vec![0; n],
        }
    }

    fn from_entry(n: usize, f: &EntryFactors) -> Self {
        let mut c = FactorCounts::empty(n);
        c.absorb(f);
        c
    }

    fn absorb(&mut self, f: &EntryFactors) {
        for &k in &f.plain {
            self.plain[k] += 1;
        }
        for &a in &f.one_minus {
            self.one_minus[a] += 1;
        }
    }

    /// `self / other` when every count stays nonnegative.
    fn divide(&self, other: &FactorCounts) -> Option<FactorCounts> {
        let sub = |a: &[u32], b: &[u32]| -> Option<Vec<u32>> {
            a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
        };
        Some(FactorCounts {
            plain: sub(&self.plain, &other.plain)?,
            one_minus: sub(&self.one_minus, &other.one_minus)?,
        })
    }

    /// Square root of a product whose counts are all even.
    fn halve(&self) -> Option<FactorCounts> {
        let half = |a: &[u32]| -> Option<Vec<u32>> {
            a.iter().map(|&x| (x % 2 == 0).then_some(x / 2)).collect()
        };
        Some(FactorCounts {
            plain: half(&self.plain)?,
            one_minus: half(&self.one_minus)?,
        })
    }

    fn to_poly(&self, nvars: usize) -> MultiPoly {
        let mut p = MultiPoly::constant(nvars, BigRational::one());
        for (k, &e) in self.plain.iter().enumerate() {
            for _ in 0..e {
                p = p * MultiPoly::var(nvars, k);
            }
        }
        for (k, &e) in self.one_minus.iter().enumerate() {
            for _ in 0..e {
                p = p * MultiPoly::one_minus(nvars, k);
            }
        }
        p
    }

    fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (k, &e) in self.one_minus.iter().enumerate() {
            for _ in 0..e {
                parts.push(format!("(1-z{k})"));
            }
        }
        for (k, &e) in self.plain.iter().enumerate() {
            for _ in 0..e {
                parts.push(format!("z{k}"));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// The common radicand of the inner product of rows `i < i′`:
/// `(1 − z_{n−i+1})(1 − z_{n−i′+1}) ∏_{k=n−i′+1}^{n−i} z_k`.
pub fn row_pair_factor(n: usize, i: usize, i2: usize) -> FactorCounts {
    pair_factor(n, n - i + 1, n - i2 + 1, (n - i2 + 1)..=(n - i))
}

/// The common radicand of the inner product of columns `j < j′`:
/// `(1 − z_{n−j})(1 − z_{n−j′}) ∏_{k=n−j′+1}^{n−j} z_k`.
pub fn column_pair_factor(n: usize, j: usize, j2: usize) -> FactorCounts {
    pair_factor(n, n - j, n - j2, (n - j2 + 1)..=(n - j))
}

fn pair_factor(
    n: usize,
    a: usize,
    b: usize,
    plain: std::ops::RangeInclusive<usize>,
) -> FactorCounts {
    FactorCounts::from_entry(
        n,
        &EntryFactors {
            one_minus: [a, b].into_iter().filter(|&x| x >= 1 && x < n).collect(),
            plain: plain.collect(),
        },
    )
}

/// One term of a factored inner product: the sign and the rational factor
/// left after pulling out the common radical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTerm {
    pub sign: i8,
    pub factor: FactorCounts,
}

/// Splits the inner product of two rows (or columns) into the common factor
/// `√G` times a sum of signed monomials. Fails with a description when some
/// term's radicand divided by `G` is not a perfect square.
pub fn pair_bracket(n: usize, kind: PairKind, a: usize, b: usize) -> Result<Vec<BracketTerm>, String> {
    let common = match kind {
        PairKind::Rows => row_pair_factor(n, a, b),
        PairKind::Columns => column_pair_factor(n, a, b),
    };
    let mut terms = Vec::new();
    for k in 1..=n {
        let ((ra, ca), (rb, cb)) = match kind {
            PairKind::Rows => ((a, k), (b, k)),
            PairKind::Columns => ((k, a), (k, b)),
        };
        let (Some(fa), Some(fb)) = (entry_factors(n, ra, ca), entry_factors(n, rb, cb)) else {
            continue;
        };
        let mut product = FactorCounts::from_entry(n, &fa);
        product.absorb(&fb);
        let factor = product
            .divide(&common)
            .and_then(|q| q.halve())
            .ok_or_else(|| {
                format!(
                    "term {k}: {} / {} is not a perfect square",
                    product.describe(),
                    common.describe()
                )
            })?;
        terms.push(BracketTerm {
            sign: entry_sign(ra, ca) * entry_sign(rb, cb),
            factor,
        });
    }
    Ok(terms)
}

/// Expands `Σ sign · factor` over `n − 1` indeterminates.
pub fn bracket_poly(n: usize, terms: &[BracketTerm]) -> MultiPoly {
    let nvars = n - 1;
    let mut p = MultiPoly::constant(nvars, BigRational::zero());
    for t in terms {
        let m = t.factor.to_poly(nvars);
        p = if t.sign < 0 { p - m } else { p + m };
    }
    p
}

/// Proves orthogonality of the `n × n` member for all parameter values.
pub fn verify_symbolic(n: usize) -> Result<VerifyReport, VerifyError> {
    if n < 2 {
        return Err(VerifyError::DimensionTooSmall(n));
    }
    let nvars = n - 1;
    let vars: Vec<MultiPoly> = (1..=nvars).map(|k| MultiPoly::var(nvars, k)).collect();
    let mut failures = Vec::new();

    for kind in [PairKind::Rows, PairKind::Columns] {
        for a in 1..=n {
            let mut norm = MultiPoly::constant(nvars, BigRational::zero());
            for k in 1..=n {
                let (i, j) = match kind {
                    PairKind::Rows => (a, k),
                    PairKind::Columns => (k, a),
                };
                let q = squared_entry_with(&vars, i, j).expect("indices in range");
                if !q.is_multilinear() {
                    failures.push(Failure {
                        kind,
                        pair: [a, a],
                        residual: None,
                        witness: Some(format!("entry ({i},{j}) is not multilinear: {q}")),
                    });
                }
                norm = norm + q;
            }
            if norm.as_constant().is_none_or(|c| !c.is_one()) {
                failures.push(Failure {
                    kind,
                    pair: [a, a],
                    residual: None,
                    witness: Some(format!("norm expands to {norm}")),
                });
            }
        }
        for a in 1..=n {
            for b in (a + 1)..=n {
                let witness = match pair_bracket(n, kind, a, b) {
                    Err(msg) => Some(msg),
                    Ok(terms) => {
                        let p = bracket_poly(n, &terms);
                        (!p.is_zero()).then(|| format!("bracket expands to {p}"))
                    }
                };
                if let Some(w) = witness {
                    failures.push(Failure {
                        kind,
                        pair: [a, b],
                        residual: None,
                        witness: Some(w),
                    });
                }
            }
        }
    }
    Ok(VerifyReport::from_failures(VerifyMode::Symbolic, None, failures))
}

/// Largest absolute entry of `UᵀU − I`, for quick checks.
pub fn gram_residual(u: &Matrix) -> f64 {
    let m = u.to_dmatrix();
    let n = u.n();
    let g = m.transpose() * &m;
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g[(a, b)] - target).abs());
        }
    }
    worst
}
