//! Order-by-order solution of the renormalization conditions and the
//! resulting prime tangle series.
//!
//! The two-leg function is pinned to 1, which fixes `t(g)`. The couplings
//! `g1`, `g2` are tied to the four-leg functions through their decomposition
//! into horizontally irreducible pieces:
//!
//! ```text
//! G(n, t, g1, g2) = 1
//! g1 = g (1 - 2 H2)
//! g2 = -g (H1 + V2)
//! H2 ± H1       = 1 - 1 / ((1 ∓ g)(1 + Γ2 ± Γ1))
//! H2 + n V2 + H1 = 1 - 1 / ((1 - g)(1 + (n + 1) Γ2 + Γ1))
//! ```
//!
//! Coefficient `m` of `g1` and `g2` only needs `H`, `V` through `m - 1`, and
//! coefficient `m` of `G` is `-t_m` plus terms already known, so a single
//! triangular pass determines everything.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Deserialize;

use crate::compose::{Couplings, Substitution};
use crate::error::{Error, Result};
use crate::pattern::LegPattern;
use crate::poly::LoopPolynomial;
use crate::series::GSeries;
use crate::table::CountTable;

/// Running couplings solving the renormalization conditions through `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingSolution {
    pub t: GSeries,
    pub g1: GSeries,
    pub g2: GSeries,
    pub order: usize,
}

impl CouplingSolution {
    pub fn couplings(&self) -> Couplings<'_> {
        Couplings {
            t: &self.t,
            g1: &self.g1,
            g2: &self.g2,
        }
    }

    /// The same solution truncated to a lower order.
    pub fn truncate(&self, order: usize) -> CouplingSolution {
        let order = order.min(self.order);
        CouplingSolution {
            t: self.t.truncate(order),
            g1: self.g1.truncate(order),
            g2: self.g2.truncate(order),
            order,
        }
    }
}

/// Horizontally irreducible parts of the four-leg functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelSeries {
    pub h1: GSeries,
    pub h2: GSeries,
    pub v2: GSeries,
}

impl ChannelSeries {
    pub fn is_counting(&self) -> bool {
        [&self.h1, &self.h2, &self.v2]
            .iter()
            .all(|s| s.is_counting_series() && s.coeff(0).is_zero())
    }
}

/// `1 - 1 / (a * b)`.
fn one_minus_inverse(a: &GSeries, b: &GSeries) -> Result<GSeries> {
    let order = a.order().min(b.order());
    Ok(&GSeries::one(order) - &(a * b).reciprocal()?)
}

pub fn channel_decompose(gamma1: &GSeries, gamma2: &GSeries, order: usize) -> Result<ChannelSeries> {
    if gamma1.order() < order || gamma2.order() < order {
        return Err(Error::OutOfRange(format!(
            "four-leg series known to order {} but {order} requested",
            gamma1.order().min(gamma2.order())
        )));
    }
    for (name, s) in [("gamma1", gamma1), ("gamma2", gamma2)] {
        if !s.coeff(0).is_zero() {
            return Err(Error::Calibration(format!("{name} has a nonzero constant term")));
        }
    }
    let g1 = gamma1.truncate(order);
    let g2 = gamma2.truncate(order);
    let one = GSeries::one(order);
    let g = GSeries::g(order);
    let one_minus_g = &one - &g;
    let one_plus_g = &one + &g;

    let plus = one_minus_inverse(&one_minus_g, &(&(&one + &g2) + &g1))?;
    let minus = one_minus_inverse(&one_plus_g, &(&(&one + &g2) - &g1))?;
    let half = LoopPolynomial::constant(BigRational::new(1.into(), 2.into()));
    let h2 = (&plus + &minus).scale(&half);
    let h1 = (&plus - &minus).scale(&half);

    let n_plus_one = &LoopPolynomial::n() + &LoopPolynomial::one();
    let all = one_minus_inverse(&one_minus_g, &(&(&one + &g2.scale(&n_plus_one)) + &g1))?;
    let v2 = (&all - &plus).exact_divide_by_n()?;
    Ok(ChannelSeries { h1, h2, v2 })
}

/// Which leg patterns make up each named tangle type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMap {
    pub version: u32,
    kinds: BTreeMap<usize, Vec<TangleType>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangleType {
    pub name: String,
    pub mode: ClassMode,
    pub patterns: Vec<LegPattern>,
}

/// How the listed patterns combine into the type's series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassMode {
    /// The patterns are images of each other and must agree; the type's
    /// series is their common value.
    Representative,
    /// The type's series is the sum over the patterns.
    Sum,
}

#[derive(Deserialize)]
struct ClassMapFile {
    version: u32,
    legs: BTreeMap<String, Vec<TypeEntry>>,
}

#[derive(Deserialize)]
struct TypeEntry {
    name: String,
    mode: ClassMode,
    patterns: Vec<String>,
}

pub const CLASS_MAP_VERSION: u32 = 1;

const BUILTIN_CLASS_MAP: &str = include_str!("../data/tangle_types.json");

impl ClassMap {
    /// The shipped calibration.
    pub fn builtin() -> ClassMap {
        ClassMap::from_json(BUILTIN_CLASS_MAP).expect("shipped class map is valid")
    }

    pub fn from_json(text: &str) -> Result<ClassMap> {
        let file: ClassMapFile = serde_json::from_str(text)?;
        if file.version != CLASS_MAP_VERSION {
            return Err(Error::Calibration(format!(
                "class map version {} (expected {CLASS_MAP_VERSION})",
                file.version
            )));
        }
        let mut kinds = BTreeMap::new();
        for (legs, entries) in file.legs {
            let legs: usize = legs
                .parse()
                .map_err(|_| Error::Calibration(format!("bad leg count {legs:?}")))?;
            let mut types = Vec::new();
            for e in entries {
                let patterns = e
                    .patterns
                    .iter()
                    .map(|p| p.parse::<LegPattern>())
                    .collect::<Result<Vec<_>>>()?;
                if patterns.is_empty() || patterns.iter().any(|p| p.legs() != legs) {
                    return Err(Error::Calibration(format!("type {} has bad patterns", e.name)));
                }
                types.push(TangleType {
                    name: e.name,
                    mode: e.mode,
                    patterns,
                });
            }
            kinds.insert(legs, types);
        }
        Ok(ClassMap {
            version: file.version,
            kinds,
        })
    }

    pub fn types(&self, legs: usize) -> &[TangleType] {
        self.kinds.get(&legs).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn get(&self, legs: usize, name: &str) -> Option<&TangleType> {
        self.types(legs).iter().find(|t| t.name == name)
    }

    fn covers(&self, legs: usize, pattern: &LegPattern) -> bool {
        self.types(legs).iter().any(|t| t.patterns.contains(pattern))
    }
}

fn representative<'a>(map: &'a ClassMap, name: &str) -> Result<&'a LegPattern> {
    map.get(4, name)
        .map(|t| &t.patterns[0])
        .ok_or_else(|| Error::Calibration(format!("class map has no four-leg type {name}")))
}

fn check_table(table: &CountTable, legs: usize, order: usize) -> Result<()> {
    if table.legs() != legs {
        return Err(Error::UnsupportedLegCount(table.legs()));
    }
    if table.max_order() < order {
        return Err(Error::InsufficientTableOrder {
            requested: order,
            available: table.max_order(),
        });
    }
    Ok(())
}

/// Γ1 and Γ2 at the given couplings.
fn four_leg(
    table4: &CountTable,
    map: &ClassMap,
    couplings: Couplings<'_>,
    order: usize,
) -> Result<(GSeries, GSeries)> {
    let sub = Substitution::new(couplings, order)?;
    Ok((
        sub.eval(table4, representative(map, "Gamma1")?)?,
        sub.eval(table4, representative(map, "Gamma2")?)?,
    ))
}

/// `solve_couplings` with the shipped pattern calibration.
pub fn solve_couplings(table2: &CountTable, table4: &CountTable, order: usize) -> Result<CouplingSolution> {
    solve_couplings_with(table2, table4, order, &ClassMap::builtin())
}

pub fn solve_couplings_with(
    table2: &CountTable,
    table4: &CountTable,
    order: usize,
    map: &ClassMap,
) -> Result<CouplingSolution> {
    check_table(table2, 2, order)?;
    check_table(table4, 4, order.saturating_sub(1))?;
    let strand: LegPattern = "12".parse()?;
    let mut t = GSeries::one(order);
    let mut g1 = GSeries::zero(order);
    let mut g2 = GSeries::zero(order);

    for m in 1..=order {
        let below = m - 1;
        let (t_lo, g1_lo, g2_lo) = (t.truncate(below), g1.truncate(below), g2.truncate(below));
        let c = Couplings {
            t: &t_lo,
            g1: &g1_lo,
            g2: &g2_lo,
        };
        let (gamma1, gamma2) = four_leg(table4, map, c, below)?;
        let ch = channel_decompose(&gamma1, &gamma2, below)?;
        let h2 = ch.h2.coeff(below);
        let mut g1_m = -(h2 + h2);
        if below == 0 {
            g1_m += &LoopPolynomial::one();
        }
        g1.set_coeff(m, g1_m);
        g2.set_coeff(m, -(ch.h1.coeff(below) + ch.v2.coeff(below)));

        let (t_m, g1_m, g2_m) = (t.truncate(m), g1.truncate(m), g2.truncate(m));
        let c = Couplings {
            t: &t_m,
            g1: &g1_m,
            g2: &g2_m,
        };
        let two = Substitution::new(c, m)?.eval(table2, &strand)?;
        // t_m is still 0 here and enters G_m as -t_m.
        t.set_coeff(m, two.coeff(m).clone());
    }

    let sol = CouplingSolution { t, g1, g2, order };
    if order >= 1 {
        let (gamma1, gamma2) = four_leg(table4, map, sol.couplings(), 1)?;
        if !gamma1.coeff(1).is_one() || !gamma2.coeff(1).is_zero() {
            return Err(Error::Calibration(format!(
                "order-1 four-leg terms are {} and {}, expected 1 and 0",
                gamma1.coeff(1),
                gamma2.coeff(1)
            )));
        }
    }
    verify_solution(table2, table4, &sol, map)?;
    Ok(sol)
}

/// Recomputes all three conditions from scratch; any nonzero residual is an
/// error.
pub fn verify_solution(
    table2: &CountTable,
    table4: &CountTable,
    sol: &CouplingSolution,
    map: &ClassMap,
) -> Result<()> {
    let order = sol.order;
    let two = Substitution::new(sol.couplings(), order)?.eval(table2, &"12".parse()?)?;
    if two != GSeries::one(order) {
        return Err(Error::Residual(format!("two-leg function is {two:?}")));
    }
    if order == 0 {
        return Ok(());
    }
    let lo = sol.truncate(order - 1);
    let (gamma1, gamma2) = four_leg(table4, map, lo.couplings(), order - 1)?;
    let ch = channel_decompose(&gamma1, &gamma2, order - 1)?;
    let one = GSeries::one(order - 1);
    let h2 = &ch.h2;
    let g1 = (&one - &(h2 + h2)).times_g();
    let g2 = (-&(&ch.h1 + &ch.v2)).times_g();
    if g1 != sol.g1 {
        return Err(Error::Residual("crossing coupling".into()));
    }
    if g2 != sol.g2 {
        return Err(Error::Residual("tangency coupling".into()));
    }
    Ok(())
}

/// The named tangle series of `table` at the solved couplings.
pub fn tangle_series(
    table: &CountTable,
    sol: &CouplingSolution,
    map: &ClassMap,
) -> Result<BTreeMap<String, GSeries>> {
    check_table(table, table.legs(), sol.order)?;
    let legs = table.legs();
    for pattern in table.patterns() {
        if !map.covers(legs, &pattern) {
            return Err(Error::UnmappedPattern(pattern.to_string()));
        }
    }
    let sub = Substitution::new(sol.couplings(), sol.order)?;
    let mut out = BTreeMap::new();
    for ty in map.types(legs) {
        let mut series: Option<(LegPattern, GSeries)> = None;
        for pattern in &ty.patterns {
            let s = sub.eval(table, pattern)?;
            series = Some(match (series, ty.mode) {
                (None, _) => (pattern.clone(), s),
                (Some((first, acc)), ClassMode::Representative) => {
                    if acc != s {
                        return Err(Error::ClassMismatch {
                            kind: ty.name.clone(),
                            first: first.to_string(),
                            second: pattern.to_string(),
                        });
                    }
                    (first, acc)
                }
                (Some((first, acc)), ClassMode::Sum) => (first, &acc + &s),
            });
        }
        if let Some((_, s)) = series {
            out.insert(ty.name.clone(), s);
        }
    }
    Ok(out)
}

/// Solves the couplings and evaluates the channel series at them.
pub fn solved_channels(sol: &CouplingSolution, table4: &CountTable, map: &ClassMap) -> Result<ChannelSeries> {
    let (gamma1, gamma2) = four_leg(table4, map, sol.couplings(), sol.order)?;
    channel_decompose(&gamma1, &gamma2, sol.order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channels_at_table_two_inputs() {
        let gamma1 = GSeries::from_int_rows(&[&[], &[1], &[], &[2]]);
        let gamma2 = GSeries::from_int_rows(&[&[], &[], &[1], &[1]]);
        let ch = channel_decompose(&gamma1, &gamma2, 3).unwrap();
        let sum = &ch.h1 + &ch.h2;
        assert_eq!(sum, GSeries::from_int_rows(&[&[], &[], &[], &[2]]));
    }

    #[test]
    fn channels_round_trip() {
        let gamma1 = GSeries::from_int_rows(&[&[], &[1], &[0], &[2], &[2], &[6, 3]]);
        let gamma2 = GSeries::from_int_rows(&[&[], &[], &[1], &[1], &[3, 1], &[9, 1]]);
        let ch = channel_decompose(&gamma1, &gamma2, 5).unwrap();
        let one = GSeries::one(5);
        let g = GSeries::g(5);
        for sign in [1i64, -1] {
            let s = LoopPolynomial::from_ints([sign]);
            let lhs = &ch.h2 + &ch.h1.scale(&s);
            let rhs = &one
                - &(&(&one - &g.scale(&s)) * &(&(&one + &gamma2) + &gamma1.scale(&s)))
                    .reciprocal()
                    .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn builtin_map_covers_all_patterns() {
        let map = ClassMap::builtin();
        for legs in [4, 6] {
            for p in LegPattern::all(legs) {
                assert!(map.covers(legs, &p), "{p}");
            }
        }
    }

    #[test]
    fn class_map_version_is_checked() {
        let text = BUILTIN_CLASS_MAP.replace("\"version\": 1", "\"version\": 99");
        assert!(matches!(ClassMap::from_json(&text), Err(Error::Calibration(_))));
    }
}
