//! Univariate rational polynomials, exact characteristic polynomials and
//! eigenvalue sign counting.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Mat, Matrix};
use crate::scalar::{int, Rational};

/// Polynomial with coefficients in increasing degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    /// Multiplicity of the root at zero.
    pub fn zero_multiplicity(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Number of sign changes in the nonzero coefficient sequence.
    pub fn sign_changes(&self) -> usize {
        let signs: Vec<bool> = self
            .coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(Signed::is_positive)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

impl fmt::Display for Polynomial {
    /// Prints e.g. `x^4 + 3x^3 - 6x^2 - 18x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            let coeff = if mag.is_integer() {
                mag.to_string()
            } else {
                format!("({mag})")
            };
            match (show_coeff, i) {
                (_, 0) => write!(f, "{coeff}")?,
                (true, 1) => write!(f, "{coeff}x")?,
                (false, 1) => write!(f, "x")?,
                (true, _) => write!(f, "{coeff}x^{i}")?,
                (false, _) => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// `det(x I - A)` via the Faddeev–LeVerrier recurrence (exact over Q).
pub fn characteristic_polynomial(a: &Matrix) -> Result<Polynomial> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    // coeffs[k] is the coefficient of x^k
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let prev = &coeffs[n - k + 1];
        m = a.mul(&m)?.add(&Matrix::identity(n).scale(prev))?;
        let am = a.mul(&m)?;
        coeffs[n - k] = -am.trace() / int(k as i64);
    }
    Ok(Polynomial::new(coeffs))
}

/// Counts of negative, zero and positive eigenvalues (with multiplicity).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl Signature {
    pub fn new(negative: usize, zero: usize, positive: usize) -> Self {
        Self {
            negative,
            zero,
            positive,
        }
    }

    /// Sign string in ascending order, e.g. `(-,-,0,+)`.
    pub fn symbols(&self) -> String {
        let parts: Vec<&str> = std::iter::repeat_n("-", self.negative)
            .chain(std::iter::repeat_n("0", self.zero))
            .chain(std::iter::repeat_n("+", self.positive))
            .collect();
        format!("({})", parts.join(","))
    }
}

/// Signature of a polynomial known to have only real roots, by Descartes'
/// rule of signs (exact in the real-rooted case).
pub fn real_rooted_signature(p: &Polynomial) -> Signature {
    let zero = p.zero_multiplicity();
    Signature::new(p.reflect().sign_changes(), zero, p.sign_changes())
}

/// Exact eigenvalue signature of a symmetric rational matrix, together with
/// its characteristic polynomial.
pub fn exact_signature(a: &Matrix) -> Result<(Polynomial, Signature)> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let p = characteristic_polynomial(a)?;
    let s = real_rooted_signature(&p);
    Ok((p, s))
}

/// Eigenvalues of a symmetric float matrix, ascending.
pub fn symmetric_eigenvalues(a: &Mat<f64>) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    let m = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
    let sym = (&m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Float signature: eigenvalues within `tol` of zero count as zero.
pub fn float_signature(a: &Mat<f64>, tol: f64) -> Result<Signature> {
    let ev = symmetric_eigenvalues(a)?;
    Ok(Signature::new(
        ev.iter().filter(|&&x| x < -tol).count(),
        ev.iter().filter(|&&x| x.abs() <= tol).count(),
        ev.iter().filter(|&&x| x > tol).count(),
    ))
}
