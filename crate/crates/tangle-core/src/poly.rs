//! Polynomials in the loop fugacity `n` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A polynomial `c_0 + c_1 n + c_2 n^2 + ...` where `c_k` weighs objects with
/// `k` closed components.
///
/// Trailing zero coefficients are never stored, so the zero polynomial has an
/// empty coefficient vector and structural equality is value equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LoopPolynomial {
    coeffs: Vec<BigRational>,
}

impl LoopPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The polynomial `n`.
    pub fn n() -> Self {
        Self::monomial(1, BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn monomial(k: usize, c: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Builds a polynomial from integer coefficients, lowest power first.
    pub fn from_ints<I: IntoIterator<Item = i64>>(coeffs: I) -> Self {
        Self::from_coeffs(
            coeffs
                .into_iter()
                .map(|c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn from_naturals<I: IntoIterator<Item = BigUint>>(coeffs: I) -> Self {
        Self::from_coeffs(
            coeffs
                .into_iter()
                .map(|c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `n^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree in `n`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn is_nonnegative_integral(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.is_integer() && !c.is_negative())
    }

    /// Integer coefficients, or `None` if some coefficient has a denominator.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// Denominators different from one, in order of increasing power.
    pub fn denominators(&self) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .filter(|c| !c.is_integer())
            .map(|c| c.denom().clone())
            .collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplies by `n^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Divides by `n`; `None` if the constant term is nonzero.
    pub fn div_n(&self) -> Option<Self> {
        match self.coeffs.first() {
            None => Some(Self::zero()),
            Some(c0) if c0.is_zero() => Some(Self {
                coeffs: self.coeffs[1..].to_vec(),
            }),
            Some(_) => None,
        }
    }

    /// Evaluates at a rational value of `n`.
    pub fn eval(&self, n: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * n + c)
    }
}

impl fmt::Debug for LoopPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LoopPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => {}
                _ => write!(f, "{mag}")?,
            }
            match k {
                0 => {}
                1 => write!(f, "n")?,
                _ => write!(f, "n^{k}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a LoopPolynomial> for &'a LoopPolynomial {
    type Output = LoopPolynomial;
    fn add(self, rhs: &'a LoopPolynomial) -> LoopPolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LoopPolynomial {
    type Output = LoopPolynomial;
    fn add(mut self, rhs: LoopPolynomial) -> LoopPolynomial {
        self += &rhs;
        self
    }
}

impl AddAssign<&LoopPolynomial> for LoopPolynomial {
    fn add_assign(&mut self, rhs: &LoopPolynomial) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigRational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl SubAssign<&LoopPolynomial> for LoopPolynomial {
    fn sub_assign(&mut self, rhs: &LoopPolynomial) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigRational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl<'a> Sub<&'a LoopPolynomial> for &'a LoopPolynomial {
    type Output = LoopPolynomial;
    fn sub(self, rhs: &'a LoopPolynomial) -> LoopPolynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LoopPolynomial {
    type Output = LoopPolynomial;
    fn sub(mut self, rhs: LoopPolynomial) -> LoopPolynomial {
        self -= &rhs;
        self
    }
}

impl Neg for &LoopPolynomial {
    type Output = LoopPolynomial;
    fn neg(self) -> LoopPolynomial {
        LoopPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for LoopPolynomial {
    type Output = LoopPolynomial;
    fn neg(self) -> LoopPolynomial {
        -&self
    }
}

impl<'a> Mul<&'a LoopPolynomial> for &'a LoopPolynomial {
    type Output = LoopPolynomial;
    fn mul(self, rhs: &'a LoopPolynomial) -> LoopPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return LoopPolynomial::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LoopPolynomial::from_coeffs(coeffs)
    }
}

impl Mul for LoopPolynomial {
    type Output = LoopPolynomial;
    fn mul(self, rhs: LoopPolynomial) -> LoopPolynomial {
        &self * &rhs
    }
}
