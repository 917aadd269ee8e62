//! Transfer-matrix enumeration of planar diagrams with external legs.
//!
//! Diagrams are grown from the column of external legs by repeatedly acting
//! on the uppermost dangling end: either a new vertex is placed on it, or it
//! is joined to another end of its block. The DP keeps, for every budget
//! level, the weighted set of distinct states, bucketed by number of ends so
//! that joins (which remove two ends) are processed before the states they
//! produce.
//!
//! The budget of a diagram is `p1 + c * p2`. With the default tangency cost
//! `c = 1` it is the vertex count; larger costs skip cells that cannot reach
//! a given order once tangencies are known to be suppressed.

mod state;
mod tally;

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

pub use state::{End, EvolutionState, Move, Successor};
use state::pairs_from_mask as mask_pairs;
pub use tally::{Count, Monomial, Tally};

use crate::error::{Error, Result};
use crate::pattern::{check_legs, dihedral_relabellings, LegPattern};
use crate::poly::LoopPolynomial;
use crate::table::CountTable;

pub type StateKey = Box<[u8]>;
type Bucket = FxHashMap<StateKey, Tally>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnumerateOptions {
    pub legs: usize,
    /// Largest budget `p1 + tangency_cost * p2` enumerated.
    pub max_vertices: usize,
    pub tangencies: bool,
    /// Budget consumed by one tangency.
    pub tangency_cost: usize,
    pub allow_disconnected: bool,
    /// Worker threads; `0` means the rayon default.
    pub threads: usize,
    /// Abort once a single vertex level holds more distinct states.
    pub state_limit: Option<usize>,
    /// Track connectivity groups even where they cannot prune anything
    /// (two legs). Only useful to cross-check that claim.
    pub force_groups: bool,
    /// Merge states that differ by a rotation or reflection of the leg
    /// labels. Per-pattern counts are then recovered by splitting each
    /// class total evenly over its patterns.
    pub symmetric: bool,
    /// States handed to one worker at a time.
    pub chunk_size: usize,
}

impl EnumerateOptions {
    pub fn new(legs: usize, max_vertices: usize) -> Self {
        Self {
            legs,
            max_vertices,
            tangencies: false,
            tangency_cost: 1,
            allow_disconnected: false,
            threads: 1,
            state_limit: None,
            force_groups: false,
            symmetric: true,
            chunk_size: 1 << 14,
        }
    }

    pub fn tangencies(mut self, on: bool) -> Self {
        self.tangencies = on;
        self
    }

    pub fn allow_disconnected(mut self, on: bool) -> Self {
        self.allow_disconnected = on;
        self
    }

    pub fn tangency_cost(mut self, cost: usize) -> Self {
        self.tangency_cost = cost;
        self
    }

    pub fn symmetric(mut self, on: bool) -> Self {
        self.symmetric = on;
        self
    }

    pub fn chunk_size(mut self, size: usize) -> Self {
        self.chunk_size = size.max(1);
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    /// Whether states carry connectivity groups.
    ///
    /// With two legs every dangling end stays attached to the piece holding
    /// an unjoined leg token, so no join can strand a finished piece and the
    /// groups are dead weight.
    pub fn tracks_groups(&self) -> bool {
        !self.allow_disconnected && (self.legs > 2 || self.force_groups)
    }
}

/// Diagnostics for one completed budget level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelStats {
    /// Budget level; the vertex count when tangencies cost 1.
    pub vertices: usize,
    /// Distinct states entered at this level (before and after joins).
    pub states: usize,
    /// Distinct states right after a vertex move, before any join.
    pub fresh_states: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub table: CountTable,
    pub levels: Vec<LevelStats>,
}

/// Resumable level-by-level driver.
pub struct Enumerator {
    opts: EnumerateOptions,
    /// Next budget level to process.
    level: usize,
    /// `frontier[d]`: states at level `level + d`, indexed by half the
    /// number of ends.
    frontier: Vec<Vec<Bucket>>,
    /// Accumulated counts, keyed by (pattern, p1, p2).
    table: CountTable,
    levels: Vec<LevelStats>,
    relabellings: Vec<[u8; 7]>,
    pool: rayon::ThreadPool,
}

impl Enumerator {
    pub fn new(opts: EnumerateOptions) -> Result<Self> {
        check_legs(opts.legs)?;
        if opts.tangency_cost == 0 {
            return Err(Error::OutOfRange("tangency cost must be at least 1".into()));
        }
        let init = EvolutionState::initial(opts.legs, opts.tracks_groups())?;
        let mut level0 = vec![Bucket::default(); opts.legs / 2 + 1];
        level0[opts.legs / 2].insert(init.canonical_key().into_boxed_slice(), Tally::unit());
        Self::from_parts(opts, 0, vec![level0], None)
    }

    fn from_parts(
        opts: EnumerateOptions,
        level: usize,
        mut frontier: Vec<Vec<Bucket>>,
        table: Option<CountTable>,
    ) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Aborted {
                last_completed: None,
                reason: e.to_string(),
            })?;
        let mut table = match table {
            Some(t) => t,
            None => CountTable::new(opts.legs, 0)?.with_tangency_cost(opts.tangency_cost),
        };
        frontier.resize_with(opts.tangency_cost.max(1) + 1, Vec::new);
        table.set_max_order(level.saturating_sub(1));
        let relabellings = if opts.symmetric {
            dihedral_relabellings(opts.legs)
        } else {
            Vec::new()
        };
        Ok(Self {
            opts,
            level,
            frontier,
            table,
            levels: Vec::new(),
            relabellings,
            pool,
        })
    }

    pub fn options(&self) -> &EnumerateOptions {
        &self.opts
    }

    /// Highest vertex count whose counts are final.
    pub fn completed_order(&self) -> Option<usize> {
        self.level.checked_sub(1)
    }

    pub fn is_done(&self) -> bool {
        self.level > self.opts.max_vertices
    }

    /// Counts through the last completed level.
    pub fn table(&self) -> &CountTable {
        &self.table
    }

    pub fn levels(&self) -> &[LevelStats] {
        &self.levels
    }

    /// Raises the target order of a finished or resumed run.
    pub fn extend_to(&mut self, max_vertices: usize) {
        self.opts.max_vertices = self.opts.max_vertices.max(max_vertices);
    }

    /// Processes one budget level: all joins at this level, recording
    /// finished diagrams, and all vertex moves into later levels.
    pub fn step(&mut self) -> Result<LevelStats> {
        let start = Instant::now();
        let v = self.level;
        let room = self.opts.max_vertices.saturating_sub(v);
        let tangencies = self.opts.tangencies && room >= self.opts.tangency_cost;
        let moves = Moves {
            crossing: room >= 1,
            tangencies,
            tangency_cost: self.opts.tangency_cost,
        };
        let mut current = std::mem::take(&mut self.frontier[0]);
        let fresh_states = current.iter().map(|b| b.len()).sum();
        let mut states = 0usize;
        let mut finished: Vec<(u16, Tally)> = Vec::new();
        let relabellings = &self.relabellings[..];

        for half in (0..current.len()).rev() {
            let bucket = std::mem::take(&mut current[half]);
            states += bucket.len();
            if let Some(limit) = self.opts.state_limit {
                if bucket.len() > limit {
                    return Err(Error::Aborted {
                        last_completed: self.completed_order(),
                        reason: format!("{} states at level {v} exceed limit {limit}", bucket.len()),
                    });
                }
            }
            if half == 0 {
                finished.extend(bucket.into_iter().map(|(key, tally)| (key_mask(&key), tally)));
                continue;
            }
            let entries: Vec<(StateKey, Tally)> = bucket.into_iter().collect();
            let chunk = self.opts.chunk_size.max(1);
            for group in entries.chunks(chunk * self.pool.current_num_threads().max(1)) {
                let produced: Vec<Vec<Produced>> = self.pool.install(|| {
                    group
                        .par_chunks(chunk)
                        .map(|chunk| expand(chunk, moves, relabellings))
                        .collect()
                });
                for batch in produced {
                    for (ahead, target_half, key, tally) in batch {
                        let buckets = if ahead == 0 {
                            &mut current
                        } else {
                            &mut self.frontier[ahead]
                        };
                        if buckets.len() <= target_half {
                            buckets.resize_with(target_half + 1, Bucket::default);
                        }
                        match buckets[target_half].get_mut(&key) {
                            Some(t) => t.add(&tally),
                            None => {
                                buckets[target_half].insert(key, tally);
                            }
                        }
                    }
                }
            }
        }

        let cost = self.opts.tangency_cost;
        for (mask, tally) in finished {
            let pattern = LegPattern::new(mask_pairs(mask)).expect("empty state has a full matching");
            if self.opts.symmetric {
                let orbit = pattern.dihedral_orbit();
                let share = tally.divided(orbit.len() as u64).ok_or_else(|| Error::Aborted {
                    last_completed: self.completed_order(),
                    reason: format!("class total of {pattern} not divisible by its size"),
                })?;
                for p in &orbit {
                    record(&mut self.table, p, v, cost, &share);
                }
            } else {
                record(&mut self.table, &pattern, v, cost, &tally);
            }
        }
        self.table.set_max_order(v);
        self.frontier.remove(0);
        self.frontier.push(Vec::new());
        self.level += 1;
        let stats = LevelStats {
            vertices: v,
            states,
            fresh_states,
            elapsed: start.elapsed(),
        };
        self.levels.push(stats.clone());
        Ok(stats)
    }

    /// Runs to `max_vertices`, calling `on_level` after each completed level.
    pub fn run_with<F: FnMut(&Enumerator, &LevelStats) -> Result<()>>(
        &mut self,
        mut on_level: F,
    ) -> Result<()> {
        while !self.is_done() {
            let stats = self.step()?;
            on_level(self, &stats)?;
        }
        Ok(())
    }

    pub fn into_enumeration(self) -> Enumeration {
        Enumeration {
            table: self.table,
            levels: self.levels,
        }
    }

    /// Pending states for checkpoints: `(ahead, half, key, tally)`, where
    /// `ahead` counts levels past the next one to be processed. The order is
    /// deterministic for a given run but not sorted.
    pub fn frontier_entries(&self) -> impl Iterator<Item = (usize, usize, &[u8], &Tally)> + '_ {
        self.frontier.iter().enumerate().flat_map(|(d, level)| {
            level
                .iter()
                .enumerate()
                .flat_map(move |(h, b)| b.iter().map(move |(k, t)| (d, h, &k[..], t)))
        })
    }

    /// Number of pending states.
    pub fn frontier_len(&self) -> usize {
        self.frontier.iter().flatten().map(|b| b.len()).sum()
    }

    /// Next level `step` will process.
    pub fn level(&self) -> usize {
        self.level
    }

    /// Restores a driver from a checkpoint written before level `level`.
    pub fn resume(
        opts: EnumerateOptions,
        level: usize,
        table: CountTable,
        entries: Vec<(usize, usize, Vec<u8>, Tally)>,
    ) -> Result<Self> {
        let mut frontier: Vec<Vec<Bucket>> = Vec::new();
        for (d, h, k, t) in entries {
            if frontier.len() <= d {
                frontier.resize_with(d + 1, Vec::new);
            }
            let level = &mut frontier[d];
            if level.len() <= h {
                level.resize_with(h + 1, Bucket::default);
            }
            level[h].insert(k.into_boxed_slice(), t);
        }
        Self::from_parts(opts, level, frontier, Some(table))
    }
}

fn key_mask(key: &[u8]) -> u16 {
    u16::from_le_bytes([key[0], key[1]])
}

#[derive(Clone, Copy)]
struct Moves {
    crossing: bool,
    tangencies: bool,
    tangency_cost: usize,
}

/// `(levels ahead, half, key, tally)`.
type Produced = (usize, usize, StateKey, Tally);

fn expand(chunk: &[(StateKey, Tally)], moves: Moves, relabellings: &[[u8; 7]]) -> Vec<Produced> {
    let mut out = Vec::with_capacity(chunk.len() * 4);
    for (key, tally) in chunk {
        let st = EvolutionState::from_key(key);
        for succ in st.successors(moves.tangencies) {
            let ahead = match succ.mv {
                Move::Close(_) => 0,
                Move::Crossing if moves.crossing => 1,
                Move::Crossing => continue,
                _ => moves.tangency_cost,
            };
            let mut t = Tally::default();
            t.add_shifted(
                tally,
                u16::from(succ.mv.is_tangency()),
                u16::from(succ.closes_loop),
            );
            out.push((
                ahead,
                succ.state.len() / 2,
                succ.state.symmetric_key(relabellings).into_boxed_slice(),
                t,
            ));
        }
    }
    out
}

fn record(table: &mut CountTable, pattern: &LegPattern, level: usize, cost: usize, tally: &Tally) {
    let mut by_p2: FxHashMap<usize, Vec<(usize, BigUint)>> = FxHashMap::default();
    for ((p2, k), c) in tally.terms() {
        by_p2
            .entry(*p2 as usize)
            .or_default()
            .push((*k as usize, c.to_biguint()));
    }
    for (p2, ks) in by_p2 {
        let deg = ks.iter().map(|(k, _)| *k).max().unwrap_or(0);
        let mut coeffs = vec![BigUint::default(); deg + 1];
        for (k, c) in ks {
            coeffs[k] += c;
        }
        table.add(
            pattern.clone(),
            level - cost * p2,
            p2,
            &LoopPolynomial::from_naturals(coeffs),
        );
    }
}

/// `enumerate`: runs the transfer matrix through `max_vertices`.
pub fn enumerate(opts: &EnumerateOptions) -> Result<Enumeration> {
    let mut e = Enumerator::new(opts.clone())?;
    e.run_with(|_, _| Ok(()))?;
    Ok(e.into_enumeration())
}

/// Per-level growth ratios of the number of distinct states.
pub fn growth_ratios(levels: &[LevelStats]) -> Vec<(usize, f64)> {
    levels
        .windows(2)
        .filter(|w| w[0].states > 0)
        .map(|w| (w[1].vertices, w[1].states as f64 / w[0].states as f64))
        .collect()
}
