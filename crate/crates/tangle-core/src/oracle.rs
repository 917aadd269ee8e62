//! Brute-force enumeration of the same diagrams as combinatorial maps.
//!
//! Half-edges `0..L` are the external legs, attached in order to an extra
//! boundary vertex; half-edges `L + 4v .. L + 4v + 4` belong to vertex `v` in
//! cyclic order. Maps are generated by matching the smallest unmatched
//! half-edge either to a fresh vertex (entering at its slot 0) or to another
//! unmatched half-edge on the same face. Fresh vertices are numbered in
//! discovery order, which fixes all labels, so every rooted map appears
//! exactly once and no symmetry factor has to be divided out. Same-face
//! matching keeps every partial map planar.
//!
//! Each planar map is then decorated with every assignment of vertex kinds,
//! and strands are traced to find the leg pattern and the closed loops.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::pattern::{check_legs, LegPattern};
use crate::poly::LoopPolynomial;
use crate::table::CountTable;

const UNMATCHED: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    /// Opposite half-edges belong to the same strand.
    Crossing,
    /// Tangency with strands through slots (0,1) and (2,3).
    TangencyA,
    /// Tangency with strands through slots (1,2) and (3,0).
    TangencyB,
}

impl VertexKind {
    pub const ALL: [VertexKind; 3] = [VertexKind::Crossing, VertexKind::TangencyA, VertexKind::TangencyB];

    /// The slot that continues the strand entering at `slot`.
    pub fn through(self, slot: usize) -> usize {
        match self {
            VertexKind::Crossing => (slot + 2) % 4,
            VertexKind::TangencyA => slot ^ 1,
            VertexKind::TangencyB => match slot {
                0 => 3,
                3 => 0,
                1 => 2,
                _ => 1,
            },
        }
    }

    pub fn is_tangency(self) -> bool {
        self != VertexKind::Crossing
    }
}

/// A planar 4-regular map with `L` legs on the boundary, decorated with
/// vertex kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialMap {
    legs: usize,
    kinds: Vec<VertexKind>,
    /// Fixed-point-free involution on half-edges.
    alpha: Vec<usize>,
}

/// Result of tracing strands through a map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrandSummary {
    pub pattern: LegPattern,
    pub loops: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Reducibility {
    pub one_cut_reducible: bool,
    pub two_cut_reducible: bool,
}

impl Reducibility {
    pub fn is_2pi(self) -> bool {
        !self.one_cut_reducible && !self.two_cut_reducible
    }
}

impl CombinatorialMap {
    pub fn new(legs: usize, kinds: Vec<VertexKind>, alpha: Vec<usize>) -> Result<Self> {
        let h = legs + 4 * kinds.len();
        if alpha.len() != h
            || alpha
                .iter()
                .enumerate()
                .any(|(i, &j)| j >= h || j == i || alpha[j] != i)
        {
            return Err(Error::Parse("edge matching is not a fixed-point-free involution".into()));
        }
        Ok(Self { legs, kinds, alpha })
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn vertices(&self) -> usize {
        self.kinds.len()
    }

    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }

    pub fn crossings(&self) -> usize {
        self.kinds.iter().filter(|k| !k.is_tangency()).count()
    }

    pub fn tangencies(&self) -> usize {
        self.kinds.iter().filter(|k| k.is_tangency()).count()
    }

    fn sigma(&self, h: usize) -> usize {
        sigma(self.legs, h)
    }

    /// Node of a half-edge: legs are their own nodes `0..L`, vertex `v` is
    /// node `L + v`.
    fn node(&self, h: usize) -> usize {
        if h < self.legs {
            h
        } else {
            self.legs + (h - self.legs) / 4
        }
    }

    pub fn edge_count(&self) -> usize {
        self.alpha.len() / 2
    }

    /// Faces of the map including the boundary vertex, traced by
    /// `sigma . alpha`.
    pub fn face_count(&self) -> usize {
        let mut seen = vec![false; self.alpha.len()];
        let mut faces = 0;
        for start in 0..self.alpha.len() {
            if seen[start] {
                continue;
            }
            faces += 1;
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                h = self.sigma(self.alpha[h]);
            }
        }
        faces
    }

    /// `V - E + F` with the boundary vertex counted (2 on the sphere).
    pub fn euler_characteristic(&self) -> i64 {
        (self.vertices() + 1) as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn is_planar(&self) -> bool {
        self.euler_characteristic() == 2
    }

    /// Follows every strand; open strands give the leg pattern, the rest are
    /// closed loops.
    pub fn strands(&self) -> StrandSummary {
        self.strands_from(0)
    }

    /// Same as [`strands`](Self::strands) but starts loop tracing at
    /// half-edge `offset` (mod total) to check start independence.
    pub fn strands_from(&self, offset: usize) -> StrandSummary {
        let l = self.legs;
        let total = self.alpha.len();
        let mut seen = vec![false; total];
        let mut pairs = Vec::new();
        for leg in 0..l {
            if seen[leg] {
                continue;
            }
            seen[leg] = true;
            let mut h = self.alpha[leg];
            loop {
                seen[h] = true;
                if h < l {
                    pairs.push((leg as u8 + 1, h as u8 + 1));
                    break;
                }
                let out = self.through(h);
                seen[out] = true;
                h = self.alpha[out];
            }
        }
        let mut loops = 0;
        for i in 0..total {
            let start = (i + offset) % total;
            if seen[start] {
                continue;
            }
            loops += 1;
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                let out = self.through(h);
                seen[out] = true;
                h = self.alpha[out];
            }
        }
        StrandSummary {
            pattern: LegPattern::new(pairs).expect("strands pair up the legs"),
            loops,
        }
    }

    fn through(&self, h: usize) -> usize {
        let v = (h - self.legs) / 4;
        let slot = (h - self.legs) % 4;
        self.legs + 4 * v + self.kinds[v].through(slot)
    }

    fn components(&self, skip: &[usize]) -> Vec<usize> {
        let nodes = self.legs + self.vertices();
        let mut uf: Vec<usize> = (0..nodes).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut y = x;
            while uf[y] != r {
                let nxt = uf[y];
                uf[y] = r;
                y = nxt;
            }
            r
        }
        for (h, &j) in self.alpha.iter().enumerate() {
            if h > j || skip.contains(&h.min(j)) {
                continue;
            }
            let (a, b) = (find(&mut uf, self.node(h)), find(&mut uf, self.node(j)));
            uf[a] = b;
        }
        (0..nodes).map(|x| find(&mut uf, x)).collect()
    }

    /// Legs and vertices form a single piece.
    pub fn is_connected(&self) -> bool {
        let comp = self.components(&[]);
        comp.iter().all(|&c| c == comp[0])
    }

    /// Edges between two vertices, as their smaller half-edge.
    fn internal_edges(&self) -> Vec<usize> {
        (0..self.alpha.len())
            .filter(|&h| h >= self.legs && self.alpha[h] >= self.legs && h < self.alpha[h])
            .collect()
    }

    /// Cut structure of a connected two-leg diagram.
    pub fn two_leg_irreducibility(&self) -> Reducibility {
        assert_eq!(self.legs, 2, "irreducibility is defined for two legs");
        let internal = self.internal_edges();
        let mut r = Reducibility::default();
        for &e in &internal {
            let comp = self.components(&[e]);
            if comp[0] != comp[1] {
                r.one_cut_reducible = true;
                break;
            }
        }
        'outer: for (i, &e) in internal.iter().enumerate() {
            for &f in &internal[i + 1..] {
                let comp = self.components(&[e, f]);
                let leg_comps = [comp[0], comp[1]];
                if comp[self.legs..].iter().any(|c| !leg_comps.contains(c)) {
                    r.two_cut_reducible = true;
                    break 'outer;
                }
            }
        }
        r
    }
}

fn sigma(legs: usize, h: usize) -> usize {
    if h < legs {
        (h + 1) % legs
    } else {
        let b = h - (h - legs) % 4;
        b + ((h - legs) % 4 + 1) % 4
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub connected_only: bool,
    pub tangencies: bool,
    /// Maximum number of search nodes across the whole run.
    pub node_budget: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            connected_only: true,
            tangencies: true,
            node_budget: 50_000_000,
        }
    }
}

struct MapSearch<'a> {
    legs: usize,
    vertices: usize,
    alpha: Vec<usize>,
    nodes: u64,
    budget: u64,
    visit: &'a mut dyn FnMut(&[usize]),
}

impl MapSearch<'_> {
    fn same_face(&self, a: usize, b: usize) -> bool {
        let mut h = a;
        loop {
            let m = self.alpha[h];
            h = sigma(self.legs, if m == UNMATCHED { h } else { m });
            if h == b {
                return true;
            }
            if h == a {
                return false;
            }
        }
    }

    fn run(&mut self, used: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { limit: self.budget });
        }
        let Some(h) = self.alpha.iter().position(|&x| x == UNMATCHED) else {
            if used == self.vertices {
                (self.visit)(&self.alpha);
            }
            return Ok(());
        };
        for j in h + 1..self.alpha.len() {
            if self.alpha[j] == UNMATCHED && self.same_face(h, j) {
                self.alpha[h] = j;
                self.alpha[j] = h;
                self.run(used)?;
                self.alpha[h] = UNMATCHED;
                self.alpha[j] = UNMATCHED;
            }
        }
        if used < self.vertices {
            let base = self.alpha.len();
            self.alpha.extend([UNMATCHED; 4]);
            self.alpha[h] = base;
            self.alpha[base] = h;
            self.run(used + 1)?;
            self.alpha[h] = UNMATCHED;
            self.alpha.truncate(base);
        }
        Ok(())
    }
}

/// Calls `visit` with the edge involution of every planar map with `legs`
/// boundary legs and exactly `vertices` four-valent vertices in which every
/// vertex is reachable from a leg. Returns the number of search nodes.
pub fn for_each_planar_map(
    legs: usize,
    vertices: usize,
    budget: u64,
    visit: &mut dyn FnMut(&[usize]),
) -> Result<u64> {
    let mut search = MapSearch {
        legs,
        vertices,
        alpha: vec![UNMATCHED; legs],
        nodes: 0,
        budget,
        visit,
    };
    search.run(0)?;
    Ok(search.nodes)
}

fn kind_assignments(vertices: usize, tangencies: bool) -> Vec<Vec<VertexKind>> {
    let choices: &[VertexKind] = if tangencies {
        &VertexKind::ALL
    } else {
        &VertexKind::ALL[..1]
    };
    let mut out = vec![Vec::new()];
    for _ in 0..vertices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

/// All decorated maps with exactly `vertices` vertices.
pub fn decorated_maps(
    legs: usize,
    vertices: usize,
    opts: OracleOptions,
    visit: &mut dyn FnMut(&CombinatorialMap),
) -> Result<()> {
    let kinds = kind_assignments(vertices, opts.tangencies);
    for_each_planar_map(legs, vertices, opts.node_budget, &mut |alpha| {
        for k in &kinds {
            let map = CombinatorialMap {
                legs,
                kinds: k.clone(),
                alpha: alpha.to_vec(),
            };
            if opts.connected_only && !map.is_connected() {
                continue;
            }
            visit(&map);
        }
    })?;
    Ok(())
}

/// Counts for every `(pattern, p1, p2)` with `p1 + p2 <= max_vertices`.
pub fn oracle_table(legs: usize, max_vertices: usize, opts: OracleOptions) -> Result<CountTable> {
    check_legs(legs)?;
    let mut table = CountTable::new(legs, max_vertices)?;
    for v in 0..=max_vertices {
        let mut cells: BTreeMap<(LegPattern, usize, usize), Vec<u64>> = BTreeMap::new();
        decorated_maps(legs, v, opts, &mut |map| {
            debug_assert!(map.is_planar());
            let s = map.strands();
            let cell = cells
                .entry((s.pattern, map.crossings(), map.tangencies()))
                .or_default();
            if cell.len() <= s.loops {
                cell.resize(s.loops + 1, 0);
            }
            cell[s.loops] += 1;
        })?;
        for ((pat, p1, p2), ks) in cells {
            table.add(pat, p1, p2, &LoopPolynomial::from_naturals(ks.into_iter().map(BigUint::from)));
        }
    }
    Ok(table)
}

/// `oracle_enumerate`: the `(p1, p2)` slice, pattern by pattern.
pub fn oracle_enumerate(
    legs: usize,
    p1: usize,
    p2: usize,
    opts: OracleOptions,
) -> Result<BTreeMap<LegPattern, LoopPolynomial>> {
    check_legs(legs)?;
    let mut cells: BTreeMap<LegPattern, Vec<u64>> = BTreeMap::new();
    decorated_maps(legs, p1 + p2, opts, &mut |map| {
        if map.tangencies() != p2 {
            return;
        }
        let s = map.strands();
        let cell = cells.entry(s.pattern).or_default();
        if cell.len() <= s.loops {
            cell.resize(s.loops + 1, 0);
        }
        cell[s.loops] += 1;
    })?;
    Ok(cells
        .into_iter()
        .map(|(p, ks)| (p, LoopPolynomial::from_naturals(ks.into_iter().map(BigUint::from))))
        .collect())
}

/// One `--check-2pi` row: single-strand two-leg crossing diagrams with `p`
/// vertices, and how many of them are 2PI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoPiRow {
    pub p: usize,
    pub total: u64,
    pub two_pi: u64,
}

pub fn count_2pi(p: usize, budget: u64) -> Result<TwoPiRow> {
    let opts = OracleOptions {
        connected_only: true,
        tangencies: false,
        node_budget: budget,
    };
    let mut row = TwoPiRow { p, total: 0, two_pi: 0 };
    decorated_maps(2, p, opts, &mut |map| {
        if map.strands().loops != 0 {
            return;
        }
        row.total += 1;
        if p >= 1 && map.two_leg_irreducibility().is_2pi() {
            row.two_pi += 1;
        }
    })?;
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> LoopPolynomial {
        LoopPolynomial::from_ints(c.iter().copied())
    }

    #[test]
    fn two_leg_low_orders() {
        let crossing_only = OracleOptions {
            tangencies: false,
            ..Default::default()
        };
        let t = oracle_table(2, 3, crossing_only).unwrap();
        let pat: LegPattern = "12".parse().unwrap();
        assert_eq!(t.get(&pat, 0, 0), poly(&[1]));
        assert_eq!(t.get(&pat, 1, 0), poly(&[2]));
        assert_eq!(t.get(&pat, 2, 0), poly(&[8, 1]));
        assert_eq!(t.get(&pat, 3, 0).coeff(0), poly(&[42]).coeff(0));
    }

    #[test]
    fn single_crossing_four_legs() {
        let s = oracle_enumerate(4, 1, 0, OracleOptions::default()).unwrap();
        assert_eq!(s.get(&"13-24".parse().unwrap()), Some(&poly(&[1])));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn single_tangency_four_legs() {
        let s = oracle_enumerate(4, 0, 1, OracleOptions::default()).unwrap();
        assert_eq!(s.get(&"12-34".parse().unwrap()), Some(&poly(&[1])));
        assert_eq!(s.get(&"14-23".parse().unwrap()), Some(&poly(&[1])));
        assert_eq!(s.get(&"13-24".parse().unwrap()), None);
    }

    #[test]
    fn euler_and_strand_start_independence() {
        decorated_maps(4, 3, OracleOptions::default(), &mut |m| {
            assert_eq!(m.euler_characteristic(), 2);
            let a = m.strands();
            for off in 1..m.alpha.len() {
                assert_eq!(m.strands_from(off), a);
            }
        })
        .unwrap();
    }

    #[test]
    fn kind_through_is_involution() {
        for k in VertexKind::ALL {
            for s in 0..4 {
                assert_ne!(k.through(s), s);
                assert_eq!(k.through(k.through(s)), s);
            }
        }
    }

    #[test]
    fn two_pi_low_orders() {
        let rows: Vec<(u64, u64)> = (1..=4)
            .map(|p| {
                let r = count_2pi(p, 10_000_000).unwrap();
                (r.total, r.two_pi)
            })
            .collect();
        assert_eq!(rows, vec![(2, 2), (8, 0), (42, 2), (260, 4)]);
    }

    #[test]
    fn budget_is_enforced() {
        let opts = OracleOptions {
            node_budget: 10,
            ..Default::default()
        };
        assert!(matches!(
            oracle_table(4, 3, opts),
            Err(Error::BudgetExceeded { limit: 10 })
        ));
    }
}
