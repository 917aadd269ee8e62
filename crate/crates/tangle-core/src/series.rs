//! Truncated power series in the renormalized coupling `g` with
//! [`LoopPolynomial`] coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::LoopPolynomial;

/// `c_0 + c_1 g + ... + c_P g^P + O(g^{P+1})`.
///
/// The truncation order `P` travels with the value. Binary operations on two
/// series of different orders produce a result at the smaller order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GSeries {
    coeffs: Vec<LoopPolynomial>,
}

impl GSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![LoopPolynomial::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(LoopPolynomial::one(), order)
    }

    pub fn constant(c: LoopPolynomial, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `g`, which is zero at order 0.
    pub fn g(order: usize) -> Self {
        Self::monomial(1, LoopPolynomial::one(), order)
    }

    pub fn monomial(power: usize, c: LoopPolynomial, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// Builds a series from coefficients `c_0..=c_P`; the order is `len - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<LoopPolynomial>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the g^0 term");
        Self { coeffs }
    }

    /// Series with integer coefficients; `rows[p]` lists the coefficients of
    /// `n^0, n^1, ...` at order `p`.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_coeffs(
            rows.iter()
                .map(|r| LoopPolynomial::from_ints(r.iter().copied()))
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[LoopPolynomial] {
        &self.coeffs
    }

    pub fn coeff(&self, p: usize) -> &LoopPolynomial {
        &self.coeffs[p]
    }

    pub fn set_coeff(&mut self, p: usize, c: LoopPolynomial) {
        self.coeffs[p] = c;
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.resize(order + 1, LoopPolynomial::zero());
        s
    }

    /// Same coefficients, with the order raised or lowered; new terms are zero.
    pub fn with_order(mut self, order: usize) -> Self {
        self.coeffs.resize(order + 1, LoopPolynomial::zero());
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LoopPolynomial::is_zero)
    }

    /// Multiplies every coefficient by the polynomial `c`.
    pub fn scale(&self, c: &LoopPolynomial) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplies by `g^k`, dropping terms beyond the truncation order.
    pub fn shift(&self, k: usize) -> Self {
        let order = self.order();
        let mut s = Self::zero(order);
        for p in 0..=order.saturating_sub(k) {
            if p + k <= order {
                s.coeffs[p + k] = self.coeffs[p].clone();
            }
        }
        s
    }

    /// Multiplies by `g`, raising the truncation order by one.
    pub fn times_g(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(LoopPolynomial::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse of a series with constant term exactly 1.
    pub fn reciprocal(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::NonUnitConstantTerm {
                found: self.coeffs[0].to_string(),
            });
        }
        let order = self.order();
        let mut inv = Self::zero(order);
        inv.coeffs[0] = LoopPolynomial::one();
        for m in 1..=order {
            let mut acc = LoopPolynomial::zero();
            for j in 1..=m {
                if !self.coeffs[j].is_zero() && !inv.coeffs[m - j].is_zero() {
                    acc += &(&self.coeffs[j] * &inv.coeffs[m - j]);
                }
            }
            inv.coeffs[m] = -acc;
        }
        Ok(inv)
    }

    /// Divides every coefficient by `n`.
    pub fn exact_divide_by_n(&self) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(p, c)| {
                c.div_n().ok_or_else(|| Error::NotDivisibleByN {
                    order: p,
                    coeff: c.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coeffs })
    }

    /// True when every coefficient is a polynomial in `n` with nonnegative
    /// integer coefficients.
    pub fn is_counting_series(&self) -> bool {
        self.coeffs
            .iter()
            .all(LoopPolynomial::is_nonnegative_integral)
    }

    /// Every non-integral coefficient as `(order, k, denominator)`.
    pub fn denominators(&self) -> Vec<(usize, usize, BigInt)> {
        let mut out = Vec::new();
        for (p, c) in self.coeffs.iter().enumerate() {
            for (k, x) in c.coeffs().iter().enumerate() {
                if !x.is_integer() {
                    out.push((p, k, x.denom().clone()));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SeriesJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let parsed: SeriesJson = serde_json::from_str(s)?;
        parsed.try_into()
    }
}

impl fmt::Debug for GSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let terms = c.coeffs().iter().filter(|x| !num_traits::Zero::is_zero(*x)).count();
            // A lone negative term is printed as a subtraction.
            let negative = terms == 1 && c.coeffs().iter().any(|x| x < &BigRational::default());
            let mag = if negative { -c.clone() } else { c.clone() };
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            match (p, terms > 1) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "({mag})")?,
                (_, false) if mag.is_one() => {}
                (_, false) => write!(f, "{mag}")?,
            }
            match p {
                0 => {}
                1 => write!(f, "g")?,
                _ => write!(f, "g^{p}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(g^{})", self.order() + 1)
    }
}

impl<'a> Add<&'a GSeries> for &'a GSeries {
    type Output = GSeries;
    fn add(self, rhs: &'a GSeries) -> GSeries {
        let order = self.order().min(rhs.order());
        GSeries {
            coeffs: (0..=order)
                .map(|p| &self.coeffs[p] + &rhs.coeffs[p])
                .collect(),
        }
    }
}

impl<'a> Sub<&'a GSeries> for &'a GSeries {
    type Output = GSeries;
    fn sub(self, rhs: &'a GSeries) -> GSeries {
        let order = self.order().min(rhs.order());
        GSeries {
            coeffs: (0..=order)
                .map(|p| &self.coeffs[p] - &rhs.coeffs[p])
                .collect(),
        }
    }
}

impl Neg for &GSeries {
    type Output = GSeries;
    fn neg(self) -> GSeries {
        GSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a GSeries> for &'a GSeries {
    type Output = GSeries;
    /// Cauchy product truncated at the smaller of the two orders.
    fn mul(self, rhs: &'a GSeries) -> GSeries {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![LoopPolynomial::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        GSeries { coeffs }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GSeries {
            type Output = GSeries;
            fn $m(self, rhs: GSeries) -> GSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Wire form: `{"variable":"g","truncation":P,"coeffs":[[[k,"num","den"],...],...]}`.
#[derive(Debug, Serialize, Deserialize)]
struct SeriesJson {
    variable: String,
    truncation: usize,
    coeffs: Vec<Vec<(usize, String, String)>>,
}

impl From<&GSeries> for SeriesJson {
    fn from(s: &GSeries) -> Self {
        let coeffs = s
            .coeffs
            .iter()
            .map(|c| {
                c.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
                    .map(|(k, x)| (k, x.numer().to_string(), x.denom().to_string()))
                    .collect()
            })
            .collect();
        SeriesJson {
            variable: "g".into(),
            truncation: s.order(),
            coeffs,
        }
    }
}

impl TryFrom<SeriesJson> for GSeries {
    type Error = Error;
    fn try_from(j: SeriesJson) -> Result<Self> {
        if j.variable != "g" {
            return Err(Error::Parse(format!("unexpected variable {:?}", j.variable)));
        }
        if j.coeffs.len() != j.truncation + 1 {
            return Err(Error::Parse(format!(
                "truncation {} but {} coefficient rows",
                j.truncation,
                j.coeffs.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(j.coeffs.len());
        for row in j.coeffs {
            let mut c = LoopPolynomial::zero();
            for (k, num, den) in row {
                let num: BigInt = num
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad numerator {num:?}")))?;
                let den: BigInt = den
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad denominator {den:?}")))?;
                if num_traits::Zero::is_zero(&den) {
                    return Err(Error::Parse("zero denominator".into()));
                }
                c += &LoopPolynomial::monomial(k, BigRational::new(num, den));
            }
            coeffs.push(c);
        }
        Ok(GSeries { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(rows: &[&[i64]]) -> GSeries {
        GSeries::from_int_rows(rows)
    }

    #[test]
    fn difference_of_squares() {
        let a = s(&[&[1], &[1], &[]]);
        let b = s(&[&[1], &[-1], &[]]);
        assert_eq!(&a * &b, s(&[&[1], &[], &[-1]]));
    }

    #[test]
    fn truncation_drops_high_terms() {
        let g = GSeries::g(1);
        assert_eq!(&g * &g, GSeries::zero(1));
    }

    #[test]
    fn product_truncates_to_smaller_order() {
        let a = GSeries::one(5);
        let b = GSeries::g(2);
        assert_eq!((&a * &b).order(), 2);
        assert_eq!((&a + &b).order(), 2);
    }

    #[test]
    fn two_leg_series_squared() {
        // (1 + 2g + 8g^2)^2 = 1 + 4g + (16 + 4)g^2
        let g = s(&[&[1], &[2], &[8]]);
        assert_eq!(&g * &g, s(&[&[1], &[4], &[20]]));
    }

    #[test]
    fn geometric_reciprocal() {
        let a = s(&[&[1], &[-1], &[], &[]]);
        assert_eq!(a.reciprocal().unwrap(), s(&[&[1], &[1], &[1], &[1]]));
        assert_eq!(GSeries::one(4).reciprocal().unwrap(), GSeries::one(4));
        let b = s(&[&[1], &[], &[], &[2]]);
        assert_eq!(b.reciprocal().unwrap(), s(&[&[1], &[], &[], &[-2]]));
    }

    #[test]
    fn reciprocal_needs_unit_constant() {
        let a = s(&[&[2], &[1]]);
        assert!(matches!(
            a.reciprocal(),
            Err(Error::NonUnitConstantTerm { .. })
        ));
        assert!(GSeries::zero(2).reciprocal().is_err());
    }

    #[test]
    fn divide_by_n() {
        let a = s(&[&[], &[0, 1], &[0, 0, 1]]);
        assert_eq!(a.exact_divide_by_n().unwrap(), s(&[&[], &[1], &[0, 1]]));
        assert_eq!(
            GSeries::zero(3).exact_divide_by_n().unwrap(),
            GSeries::zero(3)
        );
        let bad = s(&[&[], &[0, 1], &[1, 1]]);
        match bad.exact_divide_by_n() {
            Err(Error::NotDivisibleByN { order, .. }) => assert_eq!(order, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_wire_format() {
        let mut a = s(&[&[1], &[0, 2]]);
        a.set_coeff(
            1,
            &LoopPolynomial::from_ints([0, 2])
                + &LoopPolynomial::constant(BigRational::new(1.into(), 3.into())),
        );
        let text = a.to_json().unwrap();
        assert_eq!(
            text,
            r#"{"variable":"g","truncation":1,"coeffs":[[[0,"1","1"]],[[0,"1","3"],[1,"2","1"]]]}"#
        );
        assert_eq!(GSeries::from_json(&text).unwrap(), a);
    }

    #[test]
    fn json_rejects_inconsistent_truncation() {
        let bad = r#"{"variable":"g","truncation":3,"coeffs":[[[0,"1","1"]]]}"#;
        assert!(GSeries::from_json(bad).is_err());
    }
}
