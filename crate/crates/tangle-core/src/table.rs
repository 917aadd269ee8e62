//! Raw diagram counts keyed by leg pattern and vertex content.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::pattern::{check_legs, LegPattern};
use crate::poly::LoopPolynomial;

pub const CSV_HEADER: &str = "legs,pattern,p1,p2,k,count";

/// Number of diagrams with a given leg pattern, `p1` crossings and `p2`
/// tangencies, as a polynomial in the loop weight `n`.
///
/// A table is complete for every cell with `p1 + c * p2 <= max_order`, where
/// `c` is the tangency cost (1 unless the table was enumerated with a larger
/// cost to skip cells that cannot contribute at the requested order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    legs: usize,
    max_order: usize,
    tangency_cost: usize,
    entries: BTreeMap<(LegPattern, usize, usize), LoopPolynomial>,
}

impl CountTable {
    pub fn new(legs: usize, max_order: usize) -> Result<Self> {
        check_legs(legs)?;
        Ok(Self {
            legs,
            max_order,
            tangency_cost: 1,
            entries: BTreeMap::new(),
        })
    }

    pub fn with_tangency_cost(mut self, cost: usize) -> Self {
        self.tangency_cost = cost.max(1);
        self
    }

    pub fn tangency_cost(&self) -> usize {
        self.tangency_cost
    }

    /// Budget used by a cell: `p1 + c * p2`.
    pub fn weight(&self, p1: usize, p2: usize) -> usize {
        p1 + self.tangency_cost * p2
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    /// Largest cell weight the table is complete for.
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn set_max_order(&mut self, order: usize) {
        self.max_order = order;
    }

    /// Adds `value` to the `(pattern, p1, p2)` cell.
    pub fn add(&mut self, pattern: LegPattern, p1: usize, p2: usize, value: &LoopPolynomial) {
        assert_eq!(pattern.legs(), self.legs, "pattern leg count mismatch");
        if value.is_zero() {
            return;
        }
        let key = (pattern, p1, p2);
        let cell = self.entries.entry(key.clone()).or_default();
        *cell += value;
        if cell.is_zero() {
            self.entries.remove(&key);
        }
    }

    pub fn get(&self, pattern: &LegPattern, p1: usize, p2: usize) -> LoopPolynomial {
        // BTreeMap lookups need an owned key; patterns are tiny.
        self.entries
            .get(&(pattern.clone(), p1, p2))
            .cloned()
            .unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&LegPattern, usize, usize, &LoopPolynomial)> {
        self.entries.iter().map(|((pat, p1, p2), v)| (pat, *p1, *p2, v))
    }

    /// Patterns with at least one nonzero cell.
    pub fn patterns(&self) -> BTreeSet<LegPattern> {
        self.entries.keys().map(|(p, _, _)| p.clone()).collect()
    }

    /// Sum over `p1 + p2 = p` restricted to one pattern.
    pub fn total_at(&self, pattern: &LegPattern, p: usize) -> LoopPolynomial {
        let mut acc = LoopPolynomial::zero();
        for p2 in 0..=p {
            acc += &self.get(pattern, p - p2, p2);
        }
        acc
    }

    pub fn truncate(&self, order: usize) -> CountTable {
        CountTable {
            legs: self.legs,
            max_order: order.min(self.max_order),
            tangency_cost: self.tangency_cost,
            entries: self
                .entries
                .iter()
                .filter(|((_, p1, p2), _)| self.weight(*p1, *p2) <= order)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Keeps only crossing vertices.
    pub fn crossings_only(&self) -> CountTable {
        CountTable {
            legs: self.legs,
            max_order: self.max_order,
            tangency_cost: self.tangency_cost,
            entries: self
                .entries
                .iter()
                .filter(|((_, _, p2), _)| *p2 == 0)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Relabels legs `i -> L + 1 - i`.
    pub fn reflected(&self) -> CountTable {
        let mut out = CountTable {
            legs: self.legs,
            max_order: self.max_order,
            tangency_cost: self.tangency_cost,
            entries: BTreeMap::new(),
        };
        for (pat, p1, p2, v) in self.entries() {
            out.add(pat.reflected(), p1, p2, v);
        }
        out
    }

    /// Every cell is a polynomial with nonnegative integer coefficients.
    pub fn is_counting(&self) -> bool {
        self.entries.values().all(LoopPolynomial::is_nonnegative_integral)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for ((pat, p1, p2), v) in &self.entries {
            for (k, c) in v.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let _ = writeln!(out, "{},{},{},{},{},{}", self.legs, pat, p1, p2, k, c.to_integer());
            }
        }
        out
    }

    /// Parses the CSV form. The CSV carries no explicit order, so the table
    /// is taken to be complete through the largest `p1 + p2` present (or
    /// `max_order` when given).
    pub fn from_csv(text: &str, max_order: Option<usize>) -> Result<CountTable> {
        Self::from_csv_with_cost(text, max_order, 1)
    }

    /// As [`from_csv`](Self::from_csv) for a table enumerated with the given
    /// tangency cost; the inferred order is the largest `p1 + cost * p2`.
    pub fn from_csv_with_cost(text: &str, max_order: Option<usize>, cost: usize) -> Result<CountTable> {
        let cost = cost.max(1);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        if header.trim() != CSV_HEADER {
            return Err(Error::Parse(format!("unexpected header {header:?}")));
        }
        let mut legs = None;
        let mut cells: BTreeMap<(LegPattern, usize, usize), BTreeMap<usize, BigInt>> = BTreeMap::new();
        for (lineno, line) in lines.enumerate() {
            let bad = || Error::Parse(format!("line {}: {line:?}", lineno + 2));
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != 6 {
                return Err(bad());
            }
            let l: usize = f[0].parse().map_err(|_| bad())?;
            if *legs.get_or_insert(l) != l {
                return Err(Error::Parse("mixed leg counts".into()));
            }
            let pat: LegPattern = f[1].parse()?;
            if pat.legs() != l {
                return Err(bad());
            }
            let p1: usize = f[2].parse().map_err(|_| bad())?;
            let p2: usize = f[3].parse().map_err(|_| bad())?;
            let k: usize = f[4].parse().map_err(|_| bad())?;
            let c: BigInt = f[5].parse().map_err(|_| bad())?;
            if c.is_negative() {
                return Err(Error::Parse(format!("negative count on line {}", lineno + 2)));
            }
            *cells.entry((pat, p1, p2)).or_default().entry(k).or_default() += c;
        }
        let legs = legs.ok_or_else(|| Error::Parse("no rows".into()))?;
        let inferred = cells.keys().map(|(_, a, b)| a + cost * b).max().unwrap_or(0);
        let mut table = CountTable::new(legs, max_order.unwrap_or(inferred))?.with_tangency_cost(cost);
        for ((pat, p1, p2), ks) in cells {
            let deg = *ks.keys().max().unwrap();
            let mut coeffs = vec![BigRational::zero(); deg + 1];
            for (k, c) in ks {
                coeffs[k] = BigRational::from_integer(c);
            }
            table.add(pat, p1, p2, &LoopPolynomial::from_coeffs(coeffs));
        }
        Ok(table)
    }
}
