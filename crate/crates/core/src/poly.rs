//! Sparse multivariate polynomials over ℚ in the indeterminates `z₁ … z_m`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exponent vector, one slot per indeterminate (`exps[k - 1]` for `z_k`).
pub type Exponents = Vec<u32>;

/// Polynomial with rational coefficients. Zero coefficients are never stored,
/// so equal polynomials have identical term maps.
///
/// A polynomial with no variables recorded (`nvars == 0`) is a constant that
/// adopts the width of whatever it is combined with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

impl MultiPoly {
    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        MultiPoly { nvars, terms }
    }

    /// The indeterminate `z_k` (1-based) among `nvars` variables.
    pub fn var(nvars: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= nvars, "variable z_{k} out of range");
        let mut exps = vec![0; nvars];
        exps[k - 1] = 1;
        MultiPoly {
            nvars,
            terms: BTreeMap::from([(exps, BigRational::one())]),
        }
    }

    /// `1 − z_k`.
    pub fn one_minus(nvars: usize, k: usize) -> Self {
        MultiPoly::constant(nvars, BigRational::one()) - MultiPoly::var(nvars, k)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, BigRational> {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    /// The constant value, if the polynomial has no nonconstant terms.
    pub fn as_constant(&self) -> Option<BigRational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(BigRational::zero))
    }

    /// Every exponent is 0 or 1.
    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d <= 1))
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (exps, c) in &self.terms {
            let mut t = c.clone();
            for (x, &d) in point.iter().zip(exps) {
                for _ in 0..d {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    fn widen(&self, nvars: usize) -> Self {
        if self.nvars == nvars {
            return self.clone();
        }
        assert!(
            self.nvars == 0 || self.terms.is_empty(),
            "mixing polynomials over {} and {} variables",
            self.nvars,
            nvars
        );
        MultiPoly {
            nvars,
            terms: self
                .terms
                .values()
                .map(|c| (vec![0; nvars], c.clone()))
                .collect(),
        }
    }

    fn common_width(a: &Self, b: &Self) -> usize {
        a.nvars.max(b.nvars)
    }

    fn add_term(&mut self, exps: Exponents, c: BigRational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

impl Zero for MultiPoly {
    fn zero() -> Self {
        MultiPoly {
            nvars: 0,
            terms: BTreeMap::new(),
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for MultiPoly {
    fn one() -> Self {
        MultiPoly::constant(0, BigRational::one())
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: MultiPoly) -> MultiPoly {
        let w = MultiPoly::common_width(&self, &rhs);
        let mut out = self.widen(w);
        for (e, c) in rhs.widen(w).terms {
            out.add_term(e, c);
        }
        out
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        self + (-rhs)
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        let w = MultiPoly::common_width(&self, &rhs);
        let (a, b) = (self.widen(w), rhs.widen(w));
        let mut out = MultiPoly {
            nvars: w,
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                // Exponents add when monomials multiply.
                #[allow(clippy::suspicious_arithmetic_impl)]
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (exps, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0)
                .map(|(k, &d)| {
                    if d == 1 {
                        format!("z{}", k + 1)
                    } else {
                        format!("z{}^{}", k + 1, d)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{c}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}
