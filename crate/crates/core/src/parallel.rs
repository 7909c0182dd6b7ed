//! Round-synchronous simulation of a full Glauber tape.
//!
//! Every step i of the tape guesses its outcome Y_i, seeded from the
//! initial configuration. A round recomputes every guess from the previous
//! round's guesses at the predecessor steps, using the same inverse
//! transform uniform R_i as the sequential chain. Once a round fixes
//! nothing (Y^t == Y^{t-1}), the guesses are mutually consistent and the
//! assembled output coincides with the sequential run on the same tape.
//!
//! Rounds are double-buffered: all reads within a round see only the
//! previous round, so the result is independent of scheduling and thread
//! count. Steps whose predecessors kept their value cannot change either;
//! the engine tracks the changed set and recomputes only dependent steps,
//! which leaves the round-map semantics untouched.

use crate::error::{Error, Result};
use crate::glauber::RandomTape;
use crate::graph::{EdgeSet, Graph};
use crate::rc::{MarginalEvaluator, RcParams};
use rayon::prelude::*;
use serde::Serialize;

/// Per-edge update lists and predecessor lookups for a site sequence.
///
/// For step i (1-based) and edge e, `pred(i, e)` is the latest step j < i
/// that updated e, or 0 if there is none. `last(e)` is the final step that
/// updated e, or 0.
#[derive(Clone, Debug)]
pub struct PredecessorIndex {
    update_lists: Vec<Vec<u32>>,
    last: Vec<u32>,
    steps: usize,
    m: usize,
    /// Row (i - 1) holds pred_i(e) for every edge; built only while
    /// T * m stays small, otherwise lookups binary-search the lists.
    dense: Option<Vec<u32>>,
}

const DENSE_PRED_LIMIT: usize = 1 << 22;

impl PredecessorIndex {
    #[inline]
    pub fn pred(&self, i: usize, e: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.steps);
        if let Some(dense) = &self.dense {
            return dense[(i - 1) * self.m + e] as usize;
        }
        let list = &self.update_lists[e];
        let pos = list.partition_point(|&j| (j as usize) < i);
        let p = list[pos - 1] as usize;
        debug_assert!(p < i);
        p
    }

    #[inline]
    pub fn last(&self, e: usize) -> usize {
        self.last[e] as usize
    }

    /// Sorted update list of e, beginning with the sentinel 0.
    pub fn update_list(&self, e: usize) -> &[u32] {
        &self.update_lists[e]
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Steps whose sigma reads the guess of step j: those i with
    /// pred_i(e_j) = j, i.e. j < i <= next update of the same edge.
    fn dependents_of(&self, j: usize, e: usize) -> std::ops::RangeInclusive<usize> {
        let list = &self.update_lists[e];
        let pos = list.partition_point(|&x| (x as usize) <= j);
        let hi = if pos < list.len() {
            list[pos] as usize
        } else {
            self.steps
        };
        (j + 1)..=hi
    }
}

/// Builds the index with two scans over the sites (count, then fill).
pub fn build_predecessors(sites: &[u32], m: usize) -> Result<PredecessorIndex> {
    let mut counts = vec![1usize; m];
    for &e in sites {
        if e as usize >= m {
            return Err(Error::IndexOutOfRange(format!("site {e} outside 0..{m}")));
        }
        counts[e as usize] += 1;
    }
    let mut update_lists: Vec<Vec<u32>> = counts
        .iter()
        .map(|&c| {
            let mut list = Vec::with_capacity(c);
            list.push(0u32);
            list
        })
        .collect();
    for (k, &e) in sites.iter().enumerate() {
        update_lists[e as usize].push(k as u32 + 1);
    }
    let last = update_lists
        .iter()
        .map(|list| *list.last().expect("list begins with 0"))
        .collect();
    let dense = if sites.len().saturating_mul(m) <= DENSE_PRED_LIMIT {
        let mut table = Vec::with_capacity(sites.len() * m);
        let mut last_seen = vec![0u32; m];
        for (k, &e) in sites.iter().enumerate() {
            table.extend_from_slice(&last_seen);
            last_seen[e as usize] = k as u32 + 1;
        }
        Some(table)
    } else {
        None
    };
    Ok(PredecessorIndex {
        update_lists,
        last,
        steps: sites.len(),
        m,
        dense,
    })
}

/// The guess vector Y^t of one round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundState {
    pub y: Vec<bool>,
    pub round: usize,
}

impl RoundState {
    /// Y^0: each step guesses the initial bit of its own site.
    pub fn initial(tape: &RandomTape) -> Self {
        RoundState {
            y: tape
                .sites
                .iter()
                .map(|&e| tape.initial.contains(e as usize))
                .collect(),
            round: 0,
        }
    }
}

fn fill_sigma(
    out: &mut EdgeSet,
    i: usize,
    tape: &RandomTape,
    pred: &PredecessorIndex,
    y_prev: &[bool],
) {
    let m = tape.initial.len();
    for e in 0..m {
        let j = pred.pred(i, e);
        let bit = if j == 0 {
            tape.initial.contains(e)
        } else {
            y_prev[j - 1]
        };
        out.set(e, bit);
    }
}

/// sigma^t_i: the configuration step i assumes, given the previous round's
/// guesses. Edges never updated before step i keep their initial bit.
pub fn sigma(
    i: usize,
    tape: &RandomTape,
    pred: &PredecessorIndex,
    y_prev: &[bool],
) -> Result<EdgeSet> {
    if i < 1 || i > tape.steps() {
        return Err(Error::IndexOutOfRange(format!(
            "step {i} outside 1..={}",
            tape.steps()
        )));
    }
    if y_prev.len() != tape.steps() {
        return Err(Error::DimensionMismatch(format!(
            "round vector of length {} against T = {}",
            y_prev.len(),
            tape.steps()
        )));
    }
    let mut out = EdgeSet::empty(tape.initial.len());
    fill_sigma(&mut out, i, tape, pred, y_prev);
    Ok(out)
}

/// Outcome of a round-synchronous run.
///
/// When `stabilized` is set, `output` equals the sequential Glauber run on
/// the same tape; otherwise the output is well-defined but carries no
/// guarantee, and the flag says so rather than guessing.
#[derive(Clone, Debug, Serialize)]
pub struct ParallelRunReport {
    pub output: EdgeSet,
    pub rounds_executed: usize,
    pub stabilization_round: Option<usize>,
    pub stabilized: bool,
}

struct RoundEngine<'a> {
    g: &'a Graph,
    params: &'a RcParams,
    tape: &'a RandomTape,
    pred: PredecessorIndex,
}

impl<'a> RoundEngine<'a> {
    fn new(g: &'a Graph, params: &'a RcParams, tape: &'a RandomTape) -> Result<Self> {
        params.validate_dims(g)?;
        if tape.initial.len() != g.edge_count() {
            return Err(Error::DimensionMismatch(format!(
                "tape over {} edges against m = {}",
                tape.initial.len(),
                g.edge_count()
            )));
        }
        let pred = build_predecessors(&tape.sites, g.edge_count())?;
        Ok(RoundEngine { g, params, tape, pred })
    }

    #[inline]
    fn step_value(
        &self,
        i: usize,
        y_prev: &[bool],
        eval: &mut MarginalEvaluator<'_>,
        scratch: &mut EdgeSet,
    ) -> bool {
        fill_sigma(scratch, i, self.tape, &self.pred, y_prev);
        let e = self.tape.sites[i - 1] as usize;
        let mu = eval.marginal(scratch, e);
        self.tape.uniforms[i - 1] < mu
    }

    /// Round 1 in closed form: every predecessor's round-0 guess is the
    /// initial bit of its own edge, so sigma^1_i equals the initial
    /// configuration for every step and one marginal per edge suffices.
    fn run_first_round(
        &self,
        y_prev: &[bool],
        y_next: &mut [bool],
        eval: &mut MarginalEvaluator<'_>,
    ) -> Vec<u32> {
        let mu_by_edge: Vec<f64> = (0..self.g.edge_count())
            .map(|e| eval.marginal(&self.tape.initial, e))
            .collect();
        let mut changed = Vec::new();
        for i in 1..=self.pred.steps() {
            let value = self.tape.uniforms[i - 1] < mu_by_edge[self.tape.sites[i - 1] as usize];
            y_next[i - 1] = value;
            if value != y_prev[i - 1] {
                changed.push(i as u32);
            }
        }
        changed
    }

    /// Recomputes the guesses of `targets` against `y_prev`, returning the
    /// steps whose value changed. All reads are from the previous round,
    /// so the result does not depend on scheduling; small rounds skip the
    /// parallel machinery outright.
    fn run_round(
        &self,
        y_prev: &[bool],
        y_next: &mut [bool],
        targets: &[u32],
        eval: &mut MarginalEvaluator<'_>,
        scratch: &mut EdgeSet,
    ) -> Vec<u32> {
        const SERIAL_WORK_LIMIT: usize = 1 << 14;
        let mut changed = Vec::new();
        if targets.len().saturating_mul(self.g.edge_count()) <= SERIAL_WORK_LIMIT {
            for &i in targets {
                let value = self.step_value(i as usize, y_prev, eval, scratch);
                y_next[i as usize - 1] = value;
                if value != y_prev[i as usize - 1] {
                    changed.push(i);
                }
            }
            return changed;
        }
        let updates: Vec<(u32, bool)> = targets
            .par_iter()
            .with_min_len(256)
            .map_init(
                || {
                    (
                        MarginalEvaluator::new(self.g, self.params)
                            .expect("dims validated at engine construction"),
                        EdgeSet::empty(self.g.edge_count()),
                    )
                },
                |(eval, scratch), &i| {
                    (i, self.step_value(i as usize, y_prev, eval, scratch))
                },
            )
            .collect();
        for (i, value) in updates {
            y_next[i as usize - 1] = value;
            if value != y_prev[i as usize - 1] {
                changed.push(i);
            }
        }
        changed
    }

    /// Ascending unique dependents of the changed steps. Lower range ends
    /// ascend with `changed`, so a running high-water mark deduplicates
    /// overlapping ranges without a scan over all steps.
    fn dependents(&self, changed: &[u32]) -> Vec<u32> {
        let mut out = Vec::new();
        let mut next_free = 1u32;
        for &j in changed {
            let e = self.tape.sites[j as usize - 1] as usize;
            let range = self.pred.dependents_of(j as usize, e);
            let lo = (*range.start() as u32).max(next_free);
            let hi = *range.end() as u32;
            if lo <= hi {
                out.extend(lo..=hi);
                next_free = hi + 1;
            }
        }
        out
    }

    fn assemble_output(&self, y: &[bool]) -> EdgeSet {
        let mut out = EdgeSet::empty(self.g.edge_count());
        for e in 0..self.g.edge_count() {
            let j = self.pred.last(e);
            let bit = if j == 0 {
                self.tape.initial.contains(e)
            } else {
                y[j - 1]
            };
            out.set(e, bit);
        }
        out
    }

    fn run(&self, t_pa: usize, early_stop: bool) -> (ParallelRunReport, Vec<usize>) {
        let mut y_prev = RoundState::initial(self.tape).y;
        let mut y_next = y_prev.clone();
        // Round 1 has the closed form above; later rounds recompute only
        // the dependents of the previous round's changes (the rest
        // provably keep their guess, so the round map is unchanged).
        let mut eval = MarginalEvaluator::new(self.g, self.params)
            .expect("dims validated at engine construction");
        let mut scratch = EdgeSet::empty(self.g.edge_count());
        let mut targets: Vec<u32> = Vec::new();
        let mut stabilization_round = None;
        let mut rounds_executed = 0;
        let mut diffs = Vec::with_capacity(t_pa);
        for t in 1..=t_pa {
            let changed = if t == 1 {
                self.run_first_round(&y_prev, &mut y_next, &mut eval)
            } else {
                self.run_round(&y_prev, &mut y_next, &targets, &mut eval, &mut scratch)
            };
            rounds_executed = t;
            diffs.push(changed.len());
            if changed.is_empty() && stabilization_round.is_none() {
                stabilization_round = Some(t);
                if early_stop {
                    break;
                }
            }
            targets = self.dependents(&changed);
            for &i in &changed {
                y_prev[i as usize - 1] = y_next[i as usize - 1];
            }
            std::mem::swap(&mut y_prev, &mut y_next);
        }
        // Both buffers agree here: each loop tail syncs them, and the early
        // break only fires when the round changed nothing.
        let report = ParallelRunReport {
            output: self.assemble_output(&y_prev),
            rounds_executed,
            stabilization_round,
            stabilized: stabilization_round.is_some(),
        };
        (report, diffs)
    }
}

/// Runs up to `t_pa` rounds; with `early_stop` the run halts at the first
/// fixed point (a fixed point propagates, so the output is unchanged).
pub fn parallel_rc_run(
    g: &Graph,
    params: &RcParams,
    tape: &RandomTape,
    t_pa: usize,
    early_stop: bool,
) -> Result<ParallelRunReport> {
    if t_pa == 0 {
        return Err(Error::InvalidParameter("round budget must be >= 1".into()));
    }
    let engine = RoundEngine::new(g, params, tape)?;
    Ok(engine.run(t_pa, early_stop).0)
}

/// Hamming distance |Y^t xor Y^{t-1}| for every round t = 1..=t_pa, with
/// early stop disabled.
pub fn round_decay_profile(
    g: &Graph,
    params: &RcParams,
    tape: &RandomTape,
    t_pa: usize,
) -> Result<Vec<usize>> {
    if t_pa == 0 {
        return Err(Error::InvalidParameter("round budget must be >= 1".into()));
    }
    let engine = RoundEngine::new(g, params, tape)?;
    Ok(engine.run(t_pa, false).1)
}
