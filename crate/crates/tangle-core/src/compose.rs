//! Evaluation of an unrenormalized correlation function at running couplings.
//!
//! A diagram with `V = p1 + p2` vertices and `L` legs has `2V + L/2`
//! propagators, each carrying `1/t`. Crossings carry `g1`, tangencies `g2`:
//!
//! ```text
//! F(g) = t^{-L/2} * sum A(p1, p2) (g1 / t^2)^p1 (g2 / t^2)^p2
//! ```

use crate::error::{Error, Result};
use crate::pattern::LegPattern;
use crate::series::GSeries;
use crate::table::CountTable;

/// Running couplings `t(g)`, `g1(g)`, `g2(g)` borrowed for one evaluation.
#[derive(Clone, Copy)]
pub struct Couplings<'a> {
    pub t: &'a GSeries,
    pub g1: &'a GSeries,
    pub g2: &'a GSeries,
}

/// Precomputed powers of the effective vertex weights `g1/t^2`, `g2/t^2` and
/// the leg prefactors `t^{-L/2}`, shared across patterns and leg counts.
pub struct Substitution {
    order: usize,
    crossing_pows: Vec<GSeries>,
    tangency_pows: Vec<GSeries>,
    inv_t: GSeries,
    /// Lowest power of `g` present in `g2` (`order + 1` if none).
    g2_valuation: usize,
}

impl Substitution {
    pub fn new(c: Couplings<'_>, order: usize) -> Result<Self> {
        let t = c.t.truncate(order.min(c.t.order()));
        if t.order() < order || c.g1.order() < order || c.g2.order() < order {
            return Err(Error::OutOfRange(format!(
                "couplings known to order {} but {order} requested",
                c.t.order().min(c.g1.order()).min(c.g2.order())
            )));
        }
        for (name, s) in [("g1", c.g1), ("g2", c.g2)] {
            if !s.coeff(0).is_zero() {
                return Err(Error::Calibration(format!("{name} must vanish at g = 0")));
            }
        }
        let inv_t = t.reciprocal()?;
        let inv_t2 = &inv_t * &inv_t;
        let u = &c.g1.truncate(order) * &inv_t2;
        let w = &c.g2.truncate(order) * &inv_t2;
        let powers = |x: &GSeries| {
            let mut v = vec![GSeries::one(order)];
            for i in 1..=order {
                let next = &v[i - 1] * x;
                v.push(next);
            }
            v
        };
        let g2_valuation = (0..=order)
            .find(|&j| !c.g2.coeff(j).is_zero())
            .unwrap_or(order + 1);
        Ok(Self {
            order,
            g2_valuation,
            crossing_pows: powers(&u),
            tangency_pows: powers(&w),
            inv_t,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eval(&self, table: &CountTable, pattern: &LegPattern) -> Result<GSeries> {
        let order = self.order;
        if table.max_order() < order {
            return Err(Error::InsufficientTableOrder {
                requested: order,
                available: table.max_order(),
            });
        }
        // A skipped cell has p1 + cost * p2 > max_order; it matters only if
        // p1 + valuation * p2 <= order, the worst case being p1 = 0 with the
        // largest such p2.
        let cost = table.tangency_cost();
        let v = self.g2_valuation;
        if cost > v && v <= order && order + (cost - v) * (order / v) > table.max_order() {
            return Err(Error::TangencyCost {
                cost,
                valuation: self.g2_valuation,
            });
        }
        let mut acc = GSeries::zero(order);
        for (pat, p1, p2, value) in table.entries() {
            if pat != pattern || p1 + p2 > order {
                continue;
            }
            let term = (&self.crossing_pows[p1] * &self.tangency_pows[p2]).scale(value);
            acc = &acc + &term;
        }
        Ok(&acc * &self.inv_t.pow(table.legs() / 2))
    }
}

/// `compose_counts`: one pattern of `table` evaluated at the given couplings
/// through `order`.
pub fn compose_counts(
    table: &CountTable,
    pattern: &LegPattern,
    couplings: Couplings<'_>,
    order: usize,
) -> Result<GSeries> {
    if table.max_order() < order {
        return Err(Error::InsufficientTableOrder {
            requested: order,
            available: table.max_order(),
        });
    }
    Substitution::new(couplings, order)?.eval(table, pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::LoopPolynomial;

    fn two_leg_table() -> CountTable {
        let mut t = CountTable::new(2, 3).unwrap();
        let pat: LegPattern = "12".parse().unwrap();
        for (p, c) in [1i64, 2, 8, 42].into_iter().enumerate() {
            t.add(pat.clone(), p, 0, &LoopPolynomial::from_ints([c]));
        }
        t.add(pat, 0, 1, &LoopPolynomial::from_ints([5]));
        t
    }

    #[test]
    fn crossing_only_series() {
        let table = two_leg_table();
        let pat = "12".parse().unwrap();
        let t = GSeries::one(3);
        let g1 = GSeries::g(3);
        let g2 = GSeries::zero(3);
        let s = compose_counts(&table, &pat, Couplings { t: &t, g1: &g1, g2: &g2 }, 3).unwrap();
        assert_eq!(s, GSeries::from_int_rows(&[&[1], &[2], &[8], &[42]]));
    }

    #[test]
    fn bare_strand_only() {
        let table = two_leg_table();
        let pat = "12".parse().unwrap();
        let t = GSeries::one(3);
        let z = GSeries::zero(3);
        let s = compose_counts(&table, &pat, Couplings { t: &t, g1: &z, g2: &z }, 3).unwrap();
        assert_eq!(s, GSeries::one(3));
    }

    #[test]
    fn propagator_shift_cancels_first_order() {
        // t^{-1}(1 + 2 g1 / t^2) with t = 1 + 2g, g1 = g: (1 - 2g)(1 + 2g) = 1 + O(g^2)
        let table = two_leg_table();
        let pat = "12".parse().unwrap();
        let t = GSeries::from_int_rows(&[&[1], &[2]]);
        let g1 = GSeries::g(1);
        let g2 = GSeries::zero(1);
        let s = compose_counts(&table, &pat, Couplings { t: &t, g1: &g1, g2: &g2 }, 1).unwrap();
        assert_eq!(s, GSeries::one(1));
    }

    #[test]
    fn insufficient_order() {
        let table = two_leg_table();
        let pat = "12".parse().unwrap();
        let t = GSeries::one(5);
        let g1 = GSeries::g(5);
        let z = GSeries::zero(5);
        assert!(matches!(
            compose_counts(&table, &pat, Couplings { t: &t, g1: &g1, g2: &z }, 5),
            Err(Error::InsufficientTableOrder { requested: 5, available: 3 })
        ));
    }
}
