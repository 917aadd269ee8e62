//! Accumulated path weights for the transfer-matrix DP.
//!
//! Move weights are only ever `1` or `n`, so the DP needs addition and shifts
//! in `n`, never general multiplication. Coefficients stay machine words until
//! they overflow, then promote to arbitrary precision.

use num_bigint::BigUint;

/// A natural number that is a `u64` until it no longer fits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Count {
    Small(u64),
    Big(Box<BigUint>),
}

impl Count {
    pub fn one() -> Self {
        Count::Small(1)
    }

    pub fn add_assign(&mut self, rhs: &Count) {
        match (&mut *self, rhs) {
            (Count::Small(a), Count::Small(b)) => match a.checked_add(*b) {
                Some(s) => *a = s,
                None => *self = Count::Big(Box::new(BigUint::from(*a) + *b)),
            },
            (Count::Big(a), Count::Small(b)) => **a += *b,
            (Count::Small(a), Count::Big(b)) => *self = Count::Big(Box::new(&**b + *a)),
            (Count::Big(a), Count::Big(b)) => **a += &**b,
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match self {
            Count::Small(a) => BigUint::from(*a),
            Count::Big(b) => (**b).clone(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_biguint().to_bytes_le()
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let v = BigUint::from_bytes_le(bytes);
        match u64::try_from(&v) {
            Ok(s) => Count::Small(s),
            Err(_) => Count::Big(Box::new(v)),
        }
    }
}

/// Weight of a DP state: a polynomial in `n` and a tangency marker `x`,
/// stored sparsely as `((p2, k), count)` sorted by `(p2, k)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    terms: Vec<(Monomial, Count)>,
}

/// `x^p2 n^k`.
pub type Monomial = (u16, u16);

impl Tally {
    pub fn unit() -> Self {
        Self {
            terms: vec![((0, 0), Count::one())],
        }
    }

    pub fn terms(&self) -> &[(Monomial, Count)] {
        &self.terms
    }

    pub fn from_terms(mut terms: Vec<(Monomial, Count)>) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(Monomial, Count)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => lc.add_assign(&c),
                _ => out.push((m, c)),
            }
        }
        Self { terms: out }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self += rhs * x^dp2 * n^dk`.
    pub fn add_shifted(&mut self, rhs: &Tally, dp2: u16, dk: u16) {
        if self.terms.is_empty() {
            self.terms = rhs
                .terms
                .iter()
                .map(|((p2, k), c)| ((p2 + dp2, k + dk), c.clone()))
                .collect();
            return;
        }
        let mut merged = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let mut a = std::mem::take(&mut self.terms).into_iter().peekable();
        let mut b = rhs
            .terms
            .iter()
            .map(|((p2, k), c)| ((p2 + dp2, k + dk), c))
            .peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ma, _)), Some((mb, _))) => {
                    if ma < mb {
                        merged.push(a.next().unwrap());
                    } else if mb < ma {
                        let (m, c) = b.next().unwrap();
                        merged.push((m, c.clone()));
                    } else {
                        let (m, mut c) = a.next().unwrap();
                        c.add_assign(b.next().unwrap().1);
                        merged.push((m, c));
                    }
                }
                (Some(_), None) => merged.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (m, c) = b.next().unwrap();
                    merged.push((m, c.clone()));
                }
                (None, None) => break,
            }
        }
        self.terms = merged;
    }

    /// Exact division of every coefficient, `None` if any is not divisible.
    pub fn divided(&self, d: u64) -> Option<Tally> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let q = match c {
                Count::Small(a) if a % d == 0 => Count::Small(a / d),
                Count::Big(b) if (&**b % d) == BigUint::from(0u8) => Count::Big(Box::new(&**b / d)),
                _ => return None,
            };
            terms.push((*m, q));
        }
        Some(Tally { terms })
    }

    pub fn add(&mut self, rhs: &Tally) {
        self.add_shifted(rhs, 0, 0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes() {
        let mut c = Count::Small(u64::MAX);
        c.add_assign(&Count::Small(2));
        assert_eq!(c.to_biguint(), BigUint::from(u64::MAX) + 2u32);
        assert!(matches!(c, Count::Big(_)));
        assert_eq!(Count::from_bytes(&c.to_bytes()), c);
        assert_eq!(Count::from_bytes(&Count::Small(7).to_bytes()), Count::Small(7));
    }

    #[test]
    fn shifted_merge() {
        let mut a = Tally::unit();
        a.add_shifted(&Tally::unit(), 0, 1);
        a.add_shifted(&Tally::unit(), 0, 1);
        a.add_shifted(&Tally::unit(), 1, 0);
        assert_eq!(
            a.terms(),
            &[
                ((0, 0), Count::Small(1)),
                ((0, 1), Count::Small(2)),
                ((1, 0), Count::Small(1))
            ]
        );
    }
}
