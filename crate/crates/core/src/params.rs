use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("parameter z_{index} = {value} lies outside [0, 1]")]
    OutOfRange { index: usize, value: String },
    #[error("parameter z_{index} is not a finite number")]
    NotFinite { index: usize },
    #[error("expected {expected} parameters, got {got}")]
    WrongCount { expected: usize, got: usize },
}

/// Exact or floating arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// The parameters `z₁ … z_{n−1}` of an `n × n` matrix, each in `[0, 1]`.
///
/// Stored 0-based: `values()[k - 1]` is `z_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamVector {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl ParamVector {
    pub fn exact(z: Vec<BigRational>) -> Result<Self, ParamError> {
        check_len(z.len())?;
        for (k, v) in z.iter().enumerate() {
            if v.is_negative() || *v > BigRational::one() {
                return Err(ParamError::OutOfRange {
                    index: k + 1,
                    value: v.to_string(),
                });
            }
        }
        Ok(ParamVector::Exact(z))
    }

    pub fn float(z: Vec<f64>) -> Result<Self, ParamError> {
        check_len(z.len())?;
        for (k, v) in z.iter().enumerate() {
            if !v.is_finite() {
                return Err(ParamError::NotFinite { index: k + 1 });
            }
            if !(0.0..=1.0).contains(v) {
                return Err(ParamError::OutOfRange {
                    index: k + 1,
                    value: v.to_string(),
                });
            }
        }
        Ok(ParamVector::Float(z))
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(z: &[(i64, i64)]) -> Result<Self, ParamError> {
        ParamVector::exact(
            z.iter()
                .map(|&(p, q)| BigRational::new(p.into(), q.into()))
                .collect(),
        )
    }

    /// Matrix dimension `n`.
    pub fn n(&self) -> usize {
        self.len() + 1
    }

    pub fn len(&self) -> usize {
        match self {
            ParamVector::Exact(z) => z.len(),
            ParamVector::Float(z) => z.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> Mode {
        match self {
            ParamVector::Exact(_) => Mode::Exact,
            ParamVector::Float(_) => Mode::Float,
        }
    }

    pub fn as_exact(&self) -> Option<&[BigRational]> {
        match self {
            ParamVector::Exact(z) => Some(z),
            ParamVector::Float(_) => None,
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match self {
            ParamVector::Exact(z) => z.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
            ParamVector::Float(z) => z.clone(),
        }
    }

    pub fn to_float(&self) -> ParamVector {
        ParamVector::Float(self.to_f64_vec())
    }

    /// The leading `len` parameters `z₁ … z_len`, describing a smaller matrix.
    pub fn prefix(&self, len: usize) -> Result<ParamVector, ParamError> {
        match self {
            ParamVector::Exact(z) => ParamVector::exact(z[..len.min(z.len())].to_vec()),
            ParamVector::Float(z) => ParamVector::float(z[..len.min(z.len())].to_vec()),
        }
    }
}

fn check_len(len: usize) -> Result<(), ParamError> {
    if len == 0 {
        Err(ParamError::DimensionTooSmall(len + 1))
    } else {
        Ok(())
    }
}

/// `z_k` with the sentinels `z₀ = z_n = 0`.
pub(crate) fn z_at<T: Clone + Zero>(z: &[T], k: usize) -> T {
    if k == 0 || k > z.len() {
        T::zero()
    } else {
        z[k - 1].clone()
    }
}
