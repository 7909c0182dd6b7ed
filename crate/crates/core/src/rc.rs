//! Random-cluster weights, conditional edge marginals and exact
//! small-instance oracles.
//!
//! A configuration S ⊆ E has weight
//!
//! ```text
//! w(S) = prod_{e in S} p_e * prod_{e not in S} (1 - p_e)
//!        * prod_{components C of (V,S)} (1 + prod_{v in C} lambda_v)
//! ```
//!
//! All weights are kept in the natural-log domain; component lambda
//! products are formed in the linear domain (every factor is <= 1, so they
//! cannot overflow). Marginals use the stable logistic form so they stay
//! meaningful far past the point where raw weight ratios underflow.

use crate::error::{Error, Result};
use crate::graph::{connected_components, EdgeSet, Graph, UnionFind};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Maximum edge count accepted by the exhaustive-enumeration oracles.
pub const MAX_EXACT_EDGES: usize = 24;

/// Per-edge probabilities and per-vertex weights of a random-cluster model.
///
/// Bounds are strict: 0 < p_e < 1 and 0 <= lambda_v < 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RcParams {
    p: Vec<f64>,
    lambda: Vec<f64>,
}

impl RcParams {
    pub fn new(p: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        for (e, &pe) in p.iter().enumerate() {
            if !(pe > 0.0 && pe < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "p[{e}] = {pe} outside the open interval (0, 1)"
                )));
            }
        }
        for (v, &lv) in lambda.iter().enumerate() {
            if lv.is_nan() || !(0.0..1.0).contains(&lv) {
                return Err(Error::InvalidParameter(format!(
                    "lambda[{v}] = {lv} outside [0, 1)"
                )));
            }
        }
        Ok(RcParams { p, lambda })
    }

    pub fn uniform(g: &Graph, p: f64, lambda: f64) -> Result<Self> {
        RcParams::new(vec![p; g.edge_count()], vec![lambda; g.vertex_count()])
    }

    #[inline]
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    #[inline]
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn p_min(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda.iter().copied().fold(0.0, f64::max)
    }

    pub(crate) fn validate_dims(&self, g: &Graph) -> Result<()> {
        if self.p.len() != g.edge_count() || self.lambda.len() != g.vertex_count() {
            return Err(Error::DimensionMismatch(format!(
                "params sized ({}, {}) against graph with (m, n) = ({}, {})",
                self.p.len(),
                self.lambda.len(),
                g.edge_count(),
                g.vertex_count()
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RcParamsRaw = serde_json::from_str(text)?;
        RcParams::new(raw.p, raw.lambda)
    }
}

#[derive(Deserialize)]
struct RcParamsRaw {
    p: Vec<f64>,
    lambda: Vec<f64>,
}

/// Natural-log-domain configuration weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogWeight(pub f64);

impl LogWeight {
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// log w(S) for the random-cluster weight.
pub fn rc_log_weight(g: &Graph, params: &RcParams, s: &EdgeSet) -> Result<LogWeight> {
    params.validate_dims(g)?;
    if s.len() != g.edge_count() {
        return Err(Error::DimensionMismatch(format!(
            "edge set length {} against m = {}",
            s.len(),
            g.edge_count()
        )));
    }
    let mut log_w = 0.0;
    for e in 0..g.edge_count() {
        log_w += if s.contains(e) {
            params.p[e].ln()
        } else {
            (1.0 - params.p[e]).ln()
        };
    }
    let comps = connected_components(g, s)?;
    for c in 0..comps.component_count() {
        let mut prod = 1.0;
        for &v in comps.members(c) {
            prod *= params.lambda[v];
        }
        log_w += prod.ln_1p();
    }
    Ok(LogWeight(log_w))
}

/// Reusable conditional-marginal evaluator.
///
/// The marginal of edge e given the rest of a configuration only depends on
/// the components of (V, S \ {e}): inserting e either leaves the components
/// unchanged (odds p/(1-p)) or merges two components with lambda-products
/// P1, P2 (odds scaled by (1 + P1*P2) / ((1+P1)(1+P2))). This equals the
/// logistic of the log-weight difference but costs a single component pass.
pub struct MarginalEvaluator<'a> {
    g: &'a Graph,
    params: &'a RcParams,
    uf: UnionFind,
    prod: Vec<f64>,
}

impl<'a> MarginalEvaluator<'a> {
    pub fn new(g: &'a Graph, params: &'a RcParams) -> Result<Self> {
        params.validate_dims(g)?;
        Ok(MarginalEvaluator {
            g,
            params,
            uf: UnionFind::new(g.vertex_count()),
            prod: vec![0.0; g.vertex_count()],
        })
    }

    /// mu_e^S: the probability that edge e is present given the rest of S.
    pub fn marginal(&mut self, s: &EdgeSet, e: usize) -> f64 {
        let p_e = self.params.p[e];
        let (a, b) = self.g.edge(e);
        if a == b {
            return p_e;
        }
        self.uf.reset();
        for (v, l) in self.prod.iter_mut().zip(self.params.lambda.iter()) {
            *v = *l;
        }
        for f in s.iter() {
            if f == e {
                continue;
            }
            let (u, v) = self.g.edge(f);
            let ru = self.uf.find(u as u32);
            let rv = self.uf.find(v as u32);
            if ru != rv {
                let merged = self.prod[ru as usize] * self.prod[rv as usize];
                let r = self.uf.union(ru, rv);
                self.prod[r as usize] = merged;
            }
        }
        let ra = self.uf.find(a as u32);
        let rb = self.uf.find(b as u32);
        if ra == rb {
            return p_e;
        }
        let p1 = self.prod[ra as usize];
        let p2 = self.prod[rb as usize];
        if p1 == 0.0 && p2 == 0.0 {
            return p_e;
        }
        let odds = p_e / (1.0 - p_e) * ((1.0 + p1 * p2) / ((1.0 + p1) * (1.0 + p2)));
        odds / (1.0 + odds)
    }
}

/// mu_e^S via a one-off evaluator. Equal to
/// `1 / (1 + exp(log w(S \ e) - log w(S + e)))` up to rounding.
pub fn rc_marginal(g: &Graph, params: &RcParams, s: &EdgeSet, e: usize) -> Result<f64> {
    if e >= g.edge_count() {
        return Err(Error::IndexOutOfRange(format!(
            "edge {e} outside 0..{}",
            g.edge_count()
        )));
    }
    if s.len() != g.edge_count() {
        return Err(Error::DimensionMismatch(format!(
            "edge set length {} against m = {}",
            s.len(),
            g.edge_count()
        )));
    }
    let mut eval = MarginalEvaluator::new(g, params)?;
    Ok(eval.marginal(s, e))
}

/// A probability vector over a canonically enumerated finite state space.
///
/// State k corresponds to the bit pattern of k read little-endian (edge or
/// vertex or spin index i is bit i).
#[derive(Clone, Debug, Serialize)]
pub struct ExactDistribution {
    probs: Vec<f64>,
}

impl ExactDistribution {
    /// Normalizes log-domain weights with log-sum-exp; the result sums to 1
    /// within 1e-12.
    pub fn from_log_weights(log_weights: Vec<f64>) -> Self {
        let max = log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
        let total = kahan_sum(&probs);
        for p in probs.iter_mut() {
            *p /= total;
        }
        let dist = ExactDistribution { probs };
        debug_assert!((kahan_sum(&dist.probs) - 1.0).abs() <= 1e-12);
        dist
    }

    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidParameter(
                "probabilities must be nonnegative".into(),
            ));
        }
        let total = kahan_sum(&probs);
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "probability vector sums to {total}, not 1"
            )));
        }
        Ok(ExactDistribution { probs })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    #[inline]
    pub fn prob(&self, state: usize) -> f64 {
        self.probs[state]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Inverse-CDF draw: the smallest state k with u < cdf(k).
    pub fn sample_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return k;
            }
        }
        self.probs.len() - 1
    }

    /// State index holding the largest probability (ties to the smallest
    /// index).
    pub fn top_state(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = k;
            }
        }
        best
    }
}

pub(crate) fn kahan_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// The full random-cluster distribution over all 2^m edge subsets.
pub fn rc_exact_distribution(g: &Graph, params: &RcParams) -> Result<ExactDistribution> {
    params.validate_dims(g)?;
    let m = g.edge_count();
    if m > MAX_EXACT_EDGES {
        return Err(Error::StateSpaceTooLarge(format!(
            "m = {m} exceeds the exhaustive-enumeration limit {MAX_EXACT_EDGES}"
        )));
    }
    let mut log_weights = Vec::with_capacity(1usize << m);
    for idx in 0..(1u64 << m) {
        let s = EdgeSet::from_index(m, idx);
        log_weights.push(rc_log_weight(g, params, &s)?.value());
    }
    Ok(ExactDistribution::from_log_weights(log_weights))
}

/// One inverse-CDF draw from the exact distribution.
pub fn rc_exact_sample<R: Rng + ?Sized>(
    g: &Graph,
    params: &RcParams,
    rng: &mut R,
) -> Result<EdgeSet> {
    let dist = rc_exact_distribution(g, params)?;
    let u: f64 = rng.random();
    Ok(EdgeSet::from_index(g.edge_count(), dist.sample_index(u) as u64))
}

/// The tilted parameters p* = p / (p + theta (1 - p)); lambda is unchanged.
pub fn tilt_params(params: &RcParams, theta: f64) -> Result<RcParams> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} outside (0, 1)"
        )));
    }
    let p = params
        .p
        .iter()
        .map(|&pe| pe / (pe + theta * (1.0 - pe)))
        .collect();
    RcParams::new(p, params.lambda.clone())
}
