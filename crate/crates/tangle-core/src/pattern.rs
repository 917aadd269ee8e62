//! Perfect matchings of external leg labels.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const SUPPORTED_LEGS: [usize; 3] = [2, 4, 6];

/// The `2L` relabellings of the boundary legs by rotations and reflections,
/// as lookup tables indexed by the 1-based label (slot 0 unused).
pub fn dihedral_relabellings(legs: usize) -> Vec<[u8; 7]> {
    let mut out = Vec::with_capacity(2 * legs);
    for s in 0..legs {
        for mirror in [false, true] {
            let mut perm = [0u8; 7];
            for l in 1..=legs {
                let m = if mirror { legs + 1 - l } else { l };
                perm[l] = ((m - 1 + s) % legs + 1) as u8;
            }
            out.push(perm);
        }
    }
    out
}

pub fn check_legs(legs: usize) -> Result<()> {
    if SUPPORTED_LEGS.contains(&legs) {
        Ok(())
    } else {
        Err(Error::UnsupportedLegCount(legs))
    }
}

/// Which external legs are joined by the same open strand.
///
/// Legs are labelled `1..=L` in boundary order. Pairs are stored with the
/// smaller label first and sorted, so equal matchings compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LegPattern {
    pairs: Vec<(u8, u8)>,
}

impl LegPattern {
    pub fn new(pairs: impl IntoIterator<Item = (u8, u8)>) -> Result<Self> {
        let mut pairs: Vec<(u8, u8)> = pairs
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        pairs.sort_unstable();
        let legs = pairs.len() * 2;
        let mut seen = vec![false; legs + 1];
        for &(a, b) in &pairs {
            for x in [a, b] {
                let x = x as usize;
                if x == 0 || x > legs || seen[x] {
                    return Err(Error::Parse(format!("not a perfect matching: {pairs:?}")));
                }
                seen[x] = true;
            }
        }
        Ok(Self { pairs })
    }

    pub fn legs(&self) -> usize {
        self.pairs.len() * 2
    }

    pub fn pairs(&self) -> &[(u8, u8)] {
        &self.pairs
    }

    pub fn partner(&self, leg: u8) -> u8 {
        self.pairs
            .iter()
            .find_map(|&(a, b)| match leg {
                _ if leg == a => Some(b),
                _ if leg == b => Some(a),
                _ => None,
            })
            .expect("leg label out of range")
    }

    /// All `(L-1)!!` matchings in lexicographic order.
    pub fn all(legs: usize) -> Vec<LegPattern> {
        fn rec(free: &mut Vec<u8>, cur: &mut Vec<(u8, u8)>, out: &mut Vec<LegPattern>) {
            if free.is_empty() {
                out.push(LegPattern { pairs: cur.clone() });
                return;
            }
            let a = free.remove(0);
            for i in 0..free.len() {
                let b = free.remove(i);
                cur.push((a, b));
                rec(free, cur, out);
                cur.pop();
                free.insert(i, b);
            }
            free.insert(0, a);
        }
        let mut out = Vec::new();
        rec(&mut (1..=legs as u8).collect(), &mut Vec::new(), &mut out);
        out
    }

    /// Image under `i -> L + 1 - i` (top/bottom mirror of the boundary).
    pub fn reflected(&self) -> LegPattern {
        let l = self.legs() as u8;
        LegPattern::new(self.pairs.iter().map(|&(a, b)| (l + 1 - a, l + 1 - b)))
            .expect("reflection preserves matchings")
    }

    /// Image under the cyclic relabelling `i -> i + shift (mod L)`.
    pub fn rotated(&self, shift: usize) -> LegPattern {
        let l = self.legs();
        let r = |x: u8| ((x as usize - 1 + shift) % l + 1) as u8;
        LegPattern::new(self.pairs.iter().map(|&(a, b)| (r(a), r(b))))
            .expect("rotation preserves matchings")
    }

    /// Distinct images under rotations and reflections of the boundary,
    /// sorted.
    pub fn dihedral_orbit(&self) -> Vec<LegPattern> {
        let l = self.legs();
        let mut out: Vec<LegPattern> = (0..l)
            .flat_map(|s| [self.rotated(s), self.reflected().rotated(s)])
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// True when no two chords interleave on the boundary.
    pub fn is_noncrossing(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| {
            self.pairs
                .iter()
                .all(|&(c, d)| !((a < c && c < b && b < d) || (c < a && a < d && d < b)))
        })
    }
}

impl fmt::Display for LegPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, "-")?;
            }
            write!(f, "{a}{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LegPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LegPattern({self})")
    }
}

impl FromStr for LegPattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let pairs = s
            .split('-')
            .map(|p| {
                let d: Vec<u8> = p
                    .chars()
                    .map(|c| c.to_digit(10).map(|x| x as u8))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::Parse(format!("bad pattern {s:?}")))?;
                match d[..] {
                    [a, b] => Ok((a, b)),
                    _ => Err(Error::Parse(format!("bad pattern {s:?}"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        LegPattern::new(pairs)
    }
}
