//! Graph-form Ising model and the Edwards-Sokal lift from random-cluster
//! samples to Ising samples.
//!
//! A vertex subset S has weight prod_{e mono} beta_e * prod_{v in S}
//! lambda_v, where an edge is monochromatic when both endpoints are on the
//! same side of S. The lift takes a random-cluster configuration, computes
//! its components, and includes each component wholly with probability
//! prod(lambda) / (1 + prod(lambda)).

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::field::{field_dynamics_sample, InnerSampler, Schedule};
use crate::graph::{connected_components, EdgeSet, Graph};
use crate::rc::{ExactDistribution, RcParams};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// The Ising state: a subset of the vertices as a bit vector of length n.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSubset {
    bits: Bits,
}

impl VertexSubset {
    pub fn empty(n: usize) -> Self {
        VertexSubset { bits: Bits::new(n) }
    }

    pub fn from_index(n: usize, index: u64) -> Self {
        VertexSubset {
            bits: Bits::from_index(n, index),
        }
    }

    pub fn to_index(&self) -> u64 {
        self.bits.to_index()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.count_ones() == 0
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.bits.get(v)
    }

    #[inline]
    pub fn set(&mut self, v: usize, inside: bool) {
        self.bits.set(v, inside);
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn to_bitstring(&self) -> String {
        self.bits.to_bitstring()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        Bits::from_bitstring(s)
            .map(|bits| VertexSubset { bits })
            .ok_or_else(|| Error::Parse("vertex set bit string must be over {0,1}".into()))
    }
}

impl std::fmt::Debug for VertexSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "VertexSubset({})", self.to_bitstring())
    }
}

impl Serialize for VertexSubset {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_bitstring())
    }
}

/// Ferromagnetic graph-form Ising parameters: per-edge activities beta > 1
/// and per-vertex external fields lambda in (0, 1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphIsingParams {
    beta: Vec<f64>,
    lambda: Vec<f64>,
}

impl GraphIsingParams {
    pub fn new(beta: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        for (e, &b) in beta.iter().enumerate() {
            if !(b > 1.0 && b.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "beta[{e}] = {b} must be finite and > 1"
                )));
            }
        }
        for (v, &l) in lambda.iter().enumerate() {
            if !(l > 0.0 && l < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "lambda[{v}] = {l} outside the open interval (0, 1)"
                )));
            }
        }
        Ok(GraphIsingParams { beta, lambda })
    }

    pub fn uniform(g: &Graph, beta: f64, lambda: f64) -> Result<Self> {
        GraphIsingParams::new(vec![beta; g.edge_count()], vec![lambda; g.vertex_count()])
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    fn validate_dims(&self, g: &Graph) -> Result<()> {
        if self.beta.len() != g.edge_count() || self.lambda.len() != g.vertex_count() {
            return Err(Error::DimensionMismatch(format!(
                "params sized ({}, {}) against graph with (m, n) = ({}, {})",
                self.beta.len(),
                self.lambda.len(),
                g.edge_count(),
                g.vertex_count()
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphIsingRaw = serde_json::from_str(text)?;
        GraphIsingParams::new(raw.beta, raw.lambda)
    }
}

#[derive(Deserialize)]
struct GraphIsingRaw {
    beta: Vec<f64>,
    lambda: Vec<f64>,
}

/// The Gibbs distribution over all 2^n vertex subsets.
pub fn ising_graph_exact_distribution(
    g: &Graph,
    params: &GraphIsingParams,
) -> Result<ExactDistribution> {
    params.validate_dims(g)?;
    let n = g.vertex_count();
    if n > 20 {
        return Err(Error::StateSpaceTooLarge(format!(
            "n = {n} exceeds the enumeration limit 20"
        )));
    }
    let mut log_weights = Vec::with_capacity(1usize << n);
    for mask in 0..(1u64 << n) {
        let mut lw = 0.0;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if (mask >> u) & 1 == (mask >> v) & 1 {
                lw += params.beta[e].ln();
            }
        }
        for v in 0..n {
            if (mask >> v) & 1 == 1 {
                lw += params.lambda[v].ln();
            }
        }
        log_weights.push(lw);
    }
    Ok(ExactDistribution::from_log_weights(log_weights))
}

/// The edge probabilities of the coupled random-cluster model:
/// p = 1 - 1/beta, with lambda passed through.
pub fn rc_params_from_ising(params: &GraphIsingParams) -> Result<RcParams> {
    let p = params.beta.iter().map(|&b| 1.0 - 1.0 / b).collect();
    RcParams::new(p, params.lambda.clone())
}

/// Lifts a random-cluster configuration to an Ising state: each component
/// of (V, rc_sample) is included wholly with probability
/// prod(lambda) / (1 + prod(lambda)).
///
/// Components are visited in canonical order (by smallest member vertex)
/// and one uniform is consumed per component, so the draw is reproducible.
pub fn es_lift<R: Rng + ?Sized>(
    g: &Graph,
    rc_sample: &EdgeSet,
    params: &GraphIsingParams,
    rng: &mut R,
) -> Result<VertexSubset> {
    params.validate_dims(g)?;
    let comps = connected_components(g, rc_sample)?;
    let mut out = VertexSubset::empty(g.vertex_count());
    for c in 0..comps.component_count() {
        let mut prod = 1.0;
        for &v in comps.members(c) {
            prod *= params.lambda[v];
        }
        let include = rng.random::<f64>() < prod / (1.0 + prod);
        if include {
            for &v in comps.members(c) {
                out.set(v, true);
            }
        }
    }
    Ok(out)
}

/// The exact law induced by lifting an exact random-cluster sample:
/// sum over RC configurations of the per-component branch probabilities.
pub fn es_lift_exact_distribution(
    g: &Graph,
    params: &GraphIsingParams,
) -> Result<ExactDistribution> {
    params.validate_dims(g)?;
    let n = g.vertex_count();
    let m = g.edge_count();
    if n > 12 || m > 16 {
        return Err(Error::StateSpaceTooLarge(format!(
            "(n, m) = ({n}, {m}) exceeds the lift-enumeration limit (12, 16)"
        )));
    }
    let rc_params = rc_params_from_ising(params)?;
    let rc_dist = crate::rc::rc_exact_distribution(g, &rc_params)?;
    let mut probs = vec![0.0f64; 1usize << n];
    for idx in 0..(1u64 << m) {
        let s = EdgeSet::from_index(m, idx);
        let comps = connected_components(g, &s)?;
        let k = comps.component_count();
        let mut include_prob = Vec::with_capacity(k);
        let mut masks = Vec::with_capacity(k);
        for c in 0..k {
            let mut prod = 1.0;
            let mut mask = 0u64;
            for &v in comps.members(c) {
                prod *= params.lambda[v];
                mask |= 1 << v;
            }
            include_prob.push(prod / (1.0 + prod));
            masks.push(mask);
        }
        let base = rc_dist.prob(idx as usize);
        for combo in 0..(1u64 << k) {
            let mut weight = base;
            let mut vmask = 0u64;
            for c in 0..k {
                if (combo >> c) & 1 == 1 {
                    weight *= include_prob[c];
                    vmask |= masks[c];
                } else {
                    weight *= 1.0 - include_prob[c];
                }
            }
            probs[vmask as usize] += weight;
        }
    }
    ExactDistribution::from_probs(probs)
}

/// Samples the graph-form Ising model by drawing a random-cluster
/// configuration through the field dynamics and lifting it.
pub fn ising_graph_sample<R: Rng + ?Sized>(
    g: &Graph,
    params: &GraphIsingParams,
    schedule: &Schedule,
    inner: InnerSampler,
    rng: &mut R,
) -> Result<VertexSubset> {
    let rc_params = rc_params_from_ising(params)?;
    let (rc_sample, _) = field_dynamics_sample(g, &rc_params, schedule, inner, rng, false)?;
    es_lift(g, &rc_sample, params, rng)
}
