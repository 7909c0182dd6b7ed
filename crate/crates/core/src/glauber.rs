//! Sequential single-edge Glauber dynamics driven by an explicit random
//! tape.
//!
//! The tape freezes all randomness of a run: the initial product draw, the
//! update sites and the coupling uniforms. Both this engine and the
//! round-synchronous simulator consume the same tape read-only, which is
//! what makes their outputs comparable bit for bit.

use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Graph};
use crate::rc::{MarginalEvaluator, RcParams};
use rand::distr::Distribution;
use rand::Rng;

/// Frozen randomness for a T-step run: the initial configuration X', the
/// update sites e_1..e_T and the uniforms R_1..R_T.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomTape {
    pub initial: EdgeSet,
    pub sites: Vec<u32>,
    pub uniforms: Vec<f64>,
}

impl RandomTape {
    pub fn new(initial: EdgeSet, sites: Vec<u32>, uniforms: Vec<f64>) -> Result<Self> {
        if sites.len() != uniforms.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} sites against {} uniforms",
                sites.len(),
                uniforms.len()
            )));
        }
        let m = initial.len() as u32;
        if let Some(&bad) = sites.iter().find(|&&e| e >= m) {
            return Err(Error::IndexOutOfRange(format!(
                "site {bad} outside 0..{m}"
            )));
        }
        Ok(RandomTape {
            initial,
            sites,
            uniforms,
        })
    }

    #[inline]
    pub fn steps(&self) -> usize {
        self.sites.len()
    }

    /// Line-oriented text form: the initial bits, then one `e_i R_i` line
    /// per step. Uniforms round-trip exactly through the shortest decimal
    /// representation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.initial.to_bitstring());
        out.push('\n');
        for (e, r) in self.sites.iter().zip(&self.uniforms) {
            out.push_str(&format!("{e} {r}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty tape".into()))?;
        let initial = EdgeSet::from_bitstring(header.trim_end())?;
        let mut sites = Vec::new();
        let mut uniforms = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let e: u32 = it
                .next()
                .ok_or_else(|| Error::Parse("missing site".into()))?
                .parse()
                .map_err(|_| Error::Parse("bad site".into()))?;
            let r: f64 = it
                .next()
                .ok_or_else(|| Error::Parse("missing uniform".into()))?
                .parse()
                .map_err(|_| Error::Parse("bad uniform".into()))?;
            if it.next().is_some() {
                return Err(Error::Parse("trailing tokens on tape line".into()));
            }
            sites.push(e);
            uniforms.push(r);
        }
        RandomTape::new(initial, sites, uniforms)
    }
}

/// Draws a fresh tape: the initial set includes each edge independently
/// with its conditional marginal given the full edge set, then T pairs
/// (e_i, R_i) with e_i uniform over the edges and R_i uniform in [0, 1).
///
/// Draw order is fixed (initial bits by edge index, then the pairs in step
/// order) so a tape is reproducible from the generator state.
pub fn draw_tape<R: Rng + ?Sized>(
    g: &Graph,
    params: &RcParams,
    steps: usize,
    rng: &mut R,
) -> Result<RandomTape> {
    if steps == 0 {
        return Err(Error::InvalidParameter("step count must be >= 1".into()));
    }
    params.validate_dims(g)?;
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::InvalidParameter(
            "cannot draw update sites on an edgeless graph".into(),
        ));
    }
    let full = g.full_edge_set();
    let mut eval = MarginalEvaluator::new(g, params)?;
    let mut initial = EdgeSet::empty(m);
    for e in 0..m {
        let mu = eval.marginal(&full, e);
        if rng.random::<f64>() < mu {
            initial.set(e, true);
        }
    }
    let site_dist = rand::distr::Uniform::new(0u32, m as u32)
        .expect("m >= 1 validated above");
    let mut sites = Vec::with_capacity(steps);
    let mut uniforms = Vec::with_capacity(steps);
    for _ in 0..steps {
        sites.push(site_dist.sample(rng));
        uniforms.push(rng.random::<f64>());
    }
    RandomTape::new(initial, sites, uniforms)
}

/// All intermediate states X_0..X_T of a run.
#[derive(Clone, Debug)]
pub struct GlauberTrajectory {
    pub states: Vec<EdgeSet>,
}

impl GlauberTrajectory {
    pub fn final_state(&self) -> &EdgeSet {
        self.states.last().expect("trajectory holds X_0")
    }
}

fn run_impl(
    g: &Graph,
    params: &RcParams,
    tape: &RandomTape,
    mut record: Option<&mut Vec<EdgeSet>>,
) -> Result<EdgeSet> {
    params.validate_dims(g)?;
    if tape.initial.len() != g.edge_count() {
        return Err(Error::DimensionMismatch(format!(
            "tape over {} edges against m = {}",
            tape.initial.len(),
            g.edge_count()
        )));
    }
    let mut eval = MarginalEvaluator::new(g, params)?;
    let mut x = tape.initial.clone();
    if let Some(states) = record.as_deref_mut() {
        states.push(x.clone());
    }
    for (&e, &r) in tape.sites.iter().zip(&tape.uniforms) {
        let e = e as usize;
        let mu = eval.marginal(&x, e);
        // Strict comparison: the update keeps e iff R_i < mu.
        x.set(e, r < mu);
        if let Some(states) = record.as_deref_mut() {
            states.push(x.clone());
        }
    }
    Ok(x)
}

/// X_T from running the update rule over the whole tape.
pub fn glauber_run(g: &Graph, params: &RcParams, tape: &RandomTape) -> Result<EdgeSet> {
    run_impl(g, params, tape, None)
}

/// Like [`glauber_run`] but retaining every intermediate state.
pub fn glauber_trajectory(
    g: &Graph,
    params: &RcParams,
    tape: &RandomTape,
) -> Result<GlauberTrajectory> {
    let mut states = Vec::with_capacity(tape.steps() + 1);
    run_impl(g, params, tape, Some(&mut states))?;
    Ok(GlauberTrajectory { states })
}

/// The analytic one-step transition matrix over all 2^m configurations:
/// the chosen edge is averaged out and the accept threshold integrated, so
/// S moves to S + e with mu_e^S / m and to S - e with (1 - mu_e^S) / m.
pub fn glauber_transition_matrix(g: &Graph, params: &RcParams) -> Result<Vec<Vec<f64>>> {
    params.validate_dims(g)?;
    let m = g.edge_count();
    if m > 10 {
        return Err(Error::StateSpaceTooLarge(format!(
            "m = {m} exceeds the transition-matrix limit 10"
        )));
    }
    let states = 1usize << m;
    let mut eval = MarginalEvaluator::new(g, params)?;
    let mut matrix = vec![vec![0.0f64; states]; states];
    for idx in 0..states {
        let s = EdgeSet::from_index(m, idx as u64);
        for e in 0..m {
            let mu = eval.marginal(&s, e);
            matrix[idx][idx | (1 << e)] += mu / m as f64;
            matrix[idx][idx & !(1 << e)] += (1.0 - mu) / m as f64;
        }
    }
    Ok(matrix)
}
