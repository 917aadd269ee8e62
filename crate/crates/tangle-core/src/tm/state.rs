//! Boundary states of the slice-by-slice construction and the moves acting on
//! them.
//!
//! A state is the ordered list (top to bottom) of dangling line ends of a
//! partially drawn diagram. Each end knows where its strand goes through the
//! drawn part: to another dangling end, or back to an external leg. Delimiters
//! split the list into blocks; ends in different blocks are separated by an
//! arch and can never be joined. All moves act on the uppermost end.

use std::fmt;

use crate::error::Result;
use crate::pattern::{check_legs, LegPattern};
use crate::poly::LoopPolynomial;

/// Where the strand through a dangling end leads.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum End {
    /// Another dangling end of the same state (0-based position).
    Partner(usize),
    /// An external leg (1-based label).
    Leg(u8),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Move {
    /// A new strand crosses the top line: ends appear above and below it.
    Crossing,
    /// A tangency whose two new ends both sit above the continuing top line.
    TangencyAbove,
    /// A tangency whose two new ends both sit below the continuing top line.
    TangencyBelow,
    /// Join the top end to the end at 1-based position `q`.
    Close(usize),
}

impl Move {
    pub fn adds_vertex(self) -> bool {
        !matches!(self, Move::Close(_))
    }

    pub fn is_tangency(self) -> bool {
        matches!(self, Move::TangencyAbove | Move::TangencyBelow)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvolutionState {
    ends: Vec<End>,
    /// Connectivity class of every end through the drawn diagram; `None` when
    /// disconnected diagrams are allowed and no bookkeeping is needed.
    groups: Option<Vec<u8>>,
    /// Sorted gap positions `g` (delimiter between ends `g - 1` and `g`).
    delimiters: Vec<usize>,
    /// Leg pairs already joined into complete open strands.
    joined: u16,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successor {
    pub mv: Move,
    pub state: EvolutionState,
    /// The join closed a strand into a loop (weight `n`).
    pub closes_loop: bool,
    /// Leg pair completed by this move, if any.
    pub joined_legs: Option<(u8, u8)>,
}

impl Successor {
    pub fn weight(&self) -> LoopPolynomial {
        if self.closes_loop {
            LoopPolynomial::n()
        } else {
            LoopPolynomial::one()
        }
    }
}

fn pair_bit(a: u8, b: u8) -> u16 {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    // index of (a, b) among pairs of 1..=6 in lexicographic order
    let idx = (a as usize - 1) * (12 - a as usize) / 2 + (b as usize - a as usize - 1);
    1 << idx
}

pub(crate) fn pairs_from_mask(mask: u16) -> Vec<(u8, u8)> {
    let mut out = Vec::new();
    for a in 1..=6u8 {
        for b in a + 1..=6 {
            if mask & pair_bit(a, b) != 0 {
                out.push((a, b));
            }
        }
    }
    out
}

const DELIMITER: u8 = 0xFF;
const LEG_FLAG: u8 = 0x80;
const HAS_GROUPS: u8 = 1;

impl EvolutionState {
    /// All external legs dangling, each in its own connectivity group.
    pub fn initial(legs: usize, track_groups: bool) -> Result<Self> {
        check_legs(legs)?;
        Ok(Self {
            ends: (1..=legs as u8).map(End::Leg).collect(),
            groups: track_groups.then(|| (0..legs as u8).collect()),
            delimiters: Vec::new(),
            joined: 0,
        })
    }

    /// Builds a state from parts. Intended for tests and tooling; the caller
    /// guarantees the pairing is symmetric.
    pub fn from_parts(
        ends: Vec<End>,
        groups: Option<Vec<u8>>,
        delimiters: Vec<usize>,
        joined: &[(u8, u8)],
    ) -> Self {
        let mut s = Self {
            ends,
            groups,
            delimiters,
            joined: joined.iter().fold(0, |m, &(a, b)| m | pair_bit(a, b)),
        };
        s.normalize_delimiters();
        s
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn ends(&self) -> &[End] {
        &self.ends
    }

    pub fn groups(&self) -> Option<&[u8]> {
        self.groups.as_deref()
    }

    pub fn delimiters(&self) -> &[usize] {
        &self.delimiters
    }

    pub fn joined_pairs(&self) -> Vec<(u8, u8)> {
        pairs_from_mask(self.joined)
    }

    /// The completed leg pattern of an empty state.
    pub fn final_pattern(&self) -> Option<LegPattern> {
        if !self.ends.is_empty() {
            return None;
        }
        LegPattern::new(self.joined_pairs()).ok()
    }

    /// Number of ends in the uppermost block.
    pub fn top_block_len(&self) -> usize {
        self.delimiters.first().copied().unwrap_or(self.ends.len())
    }

    /// Number of distinct connectivity groups among the dangling ends.
    pub fn group_count(&self) -> Option<usize> {
        self.groups.as_ref().map(|g| {
            let mut seen = [false; 256];
            g.iter().filter(|&&x| !std::mem::replace(&mut seen[x as usize], true)).count()
        })
    }

    fn normalize_delimiters(&mut self) {
        let len = self.ends.len();
        self.delimiters.retain(|&g| g > 0 && g < len);
        self.delimiters.sort_unstable();
        self.delimiters.dedup();
    }

    /// Replaces the top end by three ends; `new_pair` are the positions (in
    /// the new state) of the two mutually partnered fresh ends, `keep` the
    /// position of the continuing top line.
    fn grow(&self, keep: usize, new_pair: (usize, usize)) -> EvolutionState {
        let old = &self.ends;
        let mut ends = Vec::with_capacity(old.len() + 2);
        let remap = |e: End| match e {
            End::Partner(0) => End::Partner(keep),
            End::Partner(j) => End::Partner(j + 2),
            leg => leg,
        };
        for slot in 0..3 {
            if slot == keep {
                ends.push(remap(old[0]));
            } else if slot == new_pair.0 {
                ends.push(End::Partner(new_pair.1));
            } else {
                ends.push(End::Partner(new_pair.0));
            }
        }
        ends.extend(old[1..].iter().map(|&e| remap(e)));
        let groups = self.groups.as_ref().map(|g| {
            let mut v = Vec::with_capacity(g.len() + 2);
            v.extend([g[0]; 3]);
            v.extend_from_slice(&g[1..]);
            v
        });
        EvolutionState {
            ends,
            groups,
            delimiters: self.delimiters.iter().map(|d| d + 2).collect(),
            joined: self.joined,
        }
    }

    /// Joins the top end with the end at 0-based position `qi`. Returns
    /// `None` if the join would finish a connected piece while other ends
    /// remain (a disconnected diagram).
    fn close(&self, qi: usize) -> Option<Successor> {
        let old = &self.ends;
        let (a, b) = (old[0], old[qi]);
        let mut closes_loop = false;
        let mut joined_legs = None;
        let mut joined = self.joined;
        // New strand endpoints created by the join, in old indices.
        let mut relink: Option<(usize, End)> = None;
        let mut relink2: Option<(usize, End)> = None;
        match (a, b) {
            (End::Partner(x), _) if x == qi => closes_loop = true,
            (End::Partner(x), End::Partner(y)) => {
                relink = Some((x, End::Partner(y)));
                relink2 = Some((y, End::Partner(x)));
            }
            (End::Partner(x), End::Leg(l)) | (End::Leg(l), End::Partner(x)) => {
                relink = Some((x, End::Leg(l)));
            }
            (End::Leg(l), End::Leg(m)) => {
                joined |= pair_bit(l, m);
                joined_legs = Some((l.min(m), l.max(m)));
            }
        }
        // Old index -> new index: trapped ends 1..qi keep order on top, then
        // the rest after qi.
        let new_index = |i: usize| -> usize {
            debug_assert!(i != 0 && i != qi);
            if i < qi {
                i - 1
            } else {
                i - 2
            }
        };
        let mut ends = Vec::with_capacity(old.len() - 2);
        for (i, &e) in old.iter().enumerate() {
            if i == 0 || i == qi {
                continue;
            }
            let e = match (relink, relink2) {
                (Some((j, to)), _) if j == i => to,
                (_, Some((j, to))) if j == i => to,
                _ => e,
            };
            ends.push(match e {
                End::Partner(j) => End::Partner(new_index(j)),
                leg => leg,
            });
        }
        let groups = match &self.groups {
            None => None,
            Some(g) => {
                let (ga, gb) = (g[0], g[qi]);
                let mut v = Vec::with_capacity(g.len() - 2);
                for (i, &x) in g.iter().enumerate() {
                    if i != 0 && i != qi {
                        v.push(if x == gb { ga } else { x });
                    }
                }
                if !v.is_empty() && !v.contains(&ga) {
                    return None;
                }
                Some(v)
            }
        };
        let mut delimiters: Vec<usize> = self.delimiters.iter().map(|d| d - 2).collect();
        delimiters.push(qi - 1);
        let mut state = EvolutionState {
            ends,
            groups,
            delimiters,
            joined,
        };
        state.normalize_delimiters();
        Some(Successor {
            mv: Move::Close(qi + 1),
            state,
            closes_loop,
            joined_legs,
        })
    }

    /// Applies one move; `None` if it is inadmissible or prunes a
    /// disconnected diagram.
    pub fn apply(&self, mv: Move) -> Option<Successor> {
        if self.ends.is_empty() {
            return None;
        }
        let grown = |keep, pair| Successor {
            mv,
            state: self.grow(keep, pair),
            closes_loop: false,
            joined_legs: None,
        };
        match mv {
            Move::Crossing => Some(grown(1, (0, 2))),
            Move::TangencyAbove => Some(grown(2, (0, 1))),
            Move::TangencyBelow => Some(grown(0, (1, 2))),
            Move::Close(q) => {
                if q < 2 || q % 2 != 0 || q > self.top_block_len() {
                    return None;
                }
                self.close(q - 1)
            }
        }
    }

    /// Every admissible successor: one crossing, two tangencies (when
    /// enabled), then the joins in increasing `q`.
    pub fn successors(&self, allow_tangencies: bool) -> Vec<Successor> {
        let mut out = Vec::new();
        if self.ends.is_empty() {
            return out;
        }
        out.extend(self.apply(Move::Crossing));
        if allow_tangencies {
            out.extend(self.apply(Move::TangencyAbove));
            out.extend(self.apply(Move::TangencyBelow));
        }
        for q in (2..=self.top_block_len()).step_by(2) {
            out.extend(self.apply(Move::Close(q)));
        }
        out
    }

    /// Canonical byte encoding: partner positions are absolute, groups are
    /// renumbered by first occurrence, delimiters are in-line markers.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(3 + 2 * self.ends.len() + self.delimiters.len());
        key.extend_from_slice(&self.joined.to_le_bytes());
        key.push(if self.groups.is_some() { HAS_GROUPS } else { 0 });
        let mut relabel = [u8::MAX; 256];
        let mut next_group = 0u8;
        let mut d = self.delimiters.iter().peekable();
        for (i, &e) in self.ends.iter().enumerate() {
            if d.peek() == Some(&&i) {
                key.push(DELIMITER);
                d.next();
            }
            key.push(match e {
                End::Partner(j) => j as u8,
                End::Leg(l) => LEG_FLAG | l,
            });
            if let Some(g) = &self.groups {
                let slot = &mut relabel[g[i] as usize];
                if *slot == u8::MAX {
                    *slot = next_group;
                    next_group += 1;
                }
                key.push(*slot);
            }
        }
        key
    }

    /// Smallest canonical key over the given leg relabellings (lookup tables
    /// as produced by [`dihedral_relabellings`](crate::pattern::dihedral_relabellings)).
    pub fn symmetric_key(&self, relabellings: &[[u8; 7]]) -> Vec<u8> {
        let orig = self.canonical_key();
        let mut best = orig.clone();
        let mut alt = orig.clone();
        let pairs = pairs_from_mask(self.joined);
        for perm in relabellings {
            let mask = pairs
                .iter()
                .fold(0u16, |m, &(a, b)| m | pair_bit(perm[a as usize], perm[b as usize]));
            alt[..2].copy_from_slice(&mask.to_le_bytes());
            // leg tokens are the only flagged bytes besides delimiters
            for (dst, &b) in alt[3..].iter_mut().zip(&orig[3..]) {
                *dst = if b != DELIMITER && b & LEG_FLAG != 0 {
                    LEG_FLAG | perm[(b & !LEG_FLAG) as usize]
                } else {
                    b
                };
            }
            if alt < best {
                best.copy_from_slice(&alt);
            }
        }
        best
    }

    /// Inverse of [`canonical_key`](Self::canonical_key).
    pub fn from_key(key: &[u8]) -> EvolutionState {
        let joined = u16::from_le_bytes([key[0], key[1]]);
        let has_groups = key[2] & HAS_GROUPS != 0;
        let mut ends = Vec::with_capacity(key.len() / 2);
        let mut groups = has_groups.then(Vec::new);
        let mut delimiters = Vec::new();
        let mut i = 3;
        while i < key.len() {
            let b = key[i];
            if b == DELIMITER {
                delimiters.push(ends.len());
                i += 1;
                continue;
            }
            ends.push(if b & LEG_FLAG != 0 {
                End::Leg(b & !LEG_FLAG)
            } else {
                End::Partner(b as usize)
            });
            i += 1;
            if let Some(g) = groups.as_mut() {
                g.push(key[i]);
                i += 1;
            }
        }
        EvolutionState {
            ends,
            groups,
            delimiters,
            joined,
        }
    }

    /// Checks the structural invariants; used by tests and debug builds.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.ends.len();
        if n % 2 != 0 {
            return Err(format!("odd number of ends: {n}"));
        }
        for (i, &e) in self.ends.iter().enumerate() {
            if let End::Partner(j) = e {
                if j == i || j >= n || self.ends[j] != End::Partner(i) {
                    return Err(format!("asymmetric pairing at {i}"));
                }
                if let Some(g) = &self.groups {
                    if g[i] != g[j] {
                        return Err(format!("partners {i},{j} in different groups"));
                    }
                }
            }
        }
        let mut prev = 0;
        for &d in &self.delimiters {
            if d <= prev || d >= n {
                return Err(format!("empty block at gap {d}"));
            }
            prev = d;
        }
        let mut bounds = vec![0];
        bounds.extend(&self.delimiters);
        bounds.push(n);
        if bounds.windows(2).any(|w| (w[1] - w[0]) % 2 != 0) {
            return Err("odd block".into());
        }
        Ok(())
    }
}

impl fmt::Display for EvolutionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.ends.iter().enumerate() {
            if self.delimiters.contains(&i) {
                write!(f, " |")?;
            }
            if i > 0 {
                write!(f, " ")?;
            }
            match e {
                End::Partner(j) => write!(f, "{j}")?,
                End::Leg(l) => write!(f, "L{l}")?,
            }
            if let Some(g) = &self.groups {
                write!(f, "/{}", g[i])?;
            }
        }
        write!(f, "]")
    }
}
