//! Total-variation computation, empirical histograms and the expansion
//! diagnostics.

use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Graph};
use crate::ising::VertexSubset;
use crate::rc::{kahan_sum, ExactDistribution, MarginalEvaluator, RcParams};
use serde::Serialize;

/// Total variation between two probability vectors: half the l1 distance.
pub fn tv_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    for (name, v) in [("first", a), ("second", b)] {
        let total = kahan_sum(v);
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "{name} vector sums to {total}, not 1"
            )));
        }
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0)
}

/// Histogram of canonical state indices.
#[derive(Clone, Debug)]
pub struct EmpiricalDistribution {
    counts: Vec<u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn from_states(state_space_size: usize, states: &[usize]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter("no samples".into()));
        }
        let mut counts = vec![0u64; state_space_size];
        for &s in states {
            if s >= state_space_size {
                return Err(Error::IndexOutOfRange(format!(
                    "state {s} outside the {state_space_size}-state space"
                )));
            }
            counts[s] += 1;
        }
        Ok(EmpiricalDistribution {
            counts,
            total: states.len() as u64,
        })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn freqs(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }
}

/// Empirical-vs-exact comparison. `stat_budget` is the l1-concentration
/// envelope sqrt(|state space| / (2 N)), not a confidence interval;
/// distributional test thresholds put a 3x slack on it.
#[derive(Clone, Debug, Serialize)]
pub struct TvReport {
    pub tv: f64,
    pub stat_budget: f64,
    pub samples: u64,
    pub state_space_size: usize,
}

/// TV between an empirical histogram of states and an exact distribution.
pub fn empirical_tv(states: &[usize], exact: &ExactDistribution) -> Result<TvReport> {
    let emp = EmpiricalDistribution::from_states(exact.len(), states)?;
    let tv = tv_distance(&emp.freqs(), exact.probs())?;
    Ok(TvReport {
        tv,
        stat_budget: (exact.len() as f64 / (2.0 * emp.total() as f64)).sqrt(),
        samples: emp.total(),
        state_space_size: exact.len(),
    })
}

/// The family of high-expansion vertex sets: nonempty S with |S| <= n/2 and
/// boundary at least |S| log n. Enumerated in canonical (subset-index)
/// order.
pub fn expansion_family(g: &Graph) -> Result<Vec<VertexSubset>> {
    let n = g.vertex_count();
    if n > 16 {
        return Err(Error::StateSpaceTooLarge(format!(
            "n = {n} exceeds the family-enumeration limit 16"
        )));
    }
    let log_n = (n as f64).ln();
    let mut family = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if 2 * size > n {
            continue;
        }
        let mut boundary = 0usize;
        for &(u, v) in g.edges() {
            if (mask >> u) & 1 != (mask >> v) & 1 {
                boundary += 1;
            }
        }
        if boundary as f64 >= size as f64 * log_n {
            family.push(VertexSubset::from_index(n, mask));
        }
    }
    Ok(family)
}

/// True iff `x` intersects the cut of every family member.
pub fn good_event_member(g: &Graph, x: &EdgeSet, family: &[VertexSubset]) -> bool {
    family.iter().all(|s| {
        g.edges().iter().enumerate().any(|(e, &(u, v))| {
            x.contains(e) && s.contains(u) != s.contains(v)
        })
    })
}

/// Worst pairwise marginal-difference ratio over good configurations.
#[derive(Clone, Debug, Serialize)]
pub struct Condition41Report {
    pub max_ratio: f64,
    pub witness: Option<(EdgeSet, EdgeSet)>,
    pub good_configs: usize,
    pub pass: bool,
}

/// Scans all ordered pairs X, Y of good configurations and reports the
/// maximum of sum_e |mu_e^X - mu_e^Y| / max(1, |X xor Y|). A pass means the
/// marginal differences contract at rate 1/2 per disagreeing edge.
pub fn condition41_check(
    g: &Graph,
    params: &RcParams,
    family: &[VertexSubset],
) -> Result<Condition41Report> {
    params.validate_dims(g)?;
    let m = g.edge_count();
    if m > 10 {
        return Err(Error::StateSpaceTooLarge(format!(
            "m = {m} exceeds the pair-scan limit 10"
        )));
    }
    let states = 1usize << m;
    let good: Vec<usize> = (0..states)
        .filter(|&idx| {
            let x = EdgeSet::from_index(m, idx as u64);
            good_event_member(g, &x, family)
        })
        .collect();
    // Marginal table over all configurations once; the pair scan then reads
    // it instead of re-deriving components.
    let mut eval = MarginalEvaluator::new(g, params)?;
    let mut marginals = vec![0.0f64; states * m];
    for idx in 0..states {
        let s = EdgeSet::from_index(m, idx as u64);
        for e in 0..m {
            marginals[idx * m + e] = eval.marginal(&s, e);
        }
    }
    let mut max_ratio = 0.0;
    let mut witness = None;
    for &xi in &good {
        for &yi in &good {
            let diff: f64 = (0..m)
                .map(|e| (marginals[xi * m + e] - marginals[yi * m + e]).abs())
                .sum();
            let ham = (xi ^ yi).count_ones() as usize;
            let ratio = diff / ham.max(1) as f64;
            if ratio > max_ratio {
                max_ratio = ratio;
                witness = Some((
                    EdgeSet::from_index(m, xi as u64),
                    EdgeSet::from_index(m, yi as u64),
                ));
            }
        }
    }
    Ok(Condition41Report {
        max_ratio,
        witness,
        good_configs: good.len(),
        pass: max_ratio <= 0.5 + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap()
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
        assert_eq!(tv_distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        let tv = tv_distance(&[9.0 / 14.0, 5.0 / 14.0], &[0.6, 0.4]).unwrap();
        assert!((tv - 0.04285714285714286).abs() < 1e-15);
    }

    #[test]
    fn tv_rejects_bad_input() {
        assert!(tv_distance(&[0.5, 0.5], &[1.0]).is_err());
        assert!(tv_distance(&[0.5, 0.6], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn empirical_tv_shapes() {
        let exact = ExactDistribution::from_probs(vec![0.25; 4]).unwrap();
        let report = empirical_tv(&[0], &exact).unwrap();
        assert_eq!(report.samples, 1);
        assert!((report.tv - 0.75).abs() < 1e-15);
        assert!(empirical_tv(&[7], &exact).is_err());
        assert!(empirical_tv(&[], &exact).is_err());
    }

    #[test]
    fn family_on_path4() {
        let g = path(4);
        let family = expansion_family(&g).unwrap();
        let members: Vec<String> = family.iter().map(|s| s.to_bitstring()).collect();
        // {1} and {2} have boundary 2 >= log 4; {0} and {3} only 1.
        assert!(members.contains(&"0100".to_string()));
        assert!(members.contains(&"0010".to_string()));
        assert!(!members.contains(&"1000".to_string()));
        assert!(!members.contains(&"0001".to_string()));
    }

    #[test]
    fn family_on_k4_contains_all_singletons() {
        let g = Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let family = expansion_family(&g).unwrap();
        for v in 0..4 {
            assert!(family
                .iter()
                .any(|s| s.count() == 1 && s.contains(v)));
        }
    }

    #[test]
    fn family_on_single_edge() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let family = expansion_family(&g).unwrap();
        assert_eq!(family.len(), 2);
    }

    #[test]
    fn good_event_cases() {
        let g = path(4);
        let family = expansion_family(&g).unwrap();
        assert!(good_event_member(&g, &g.full_edge_set(), &family));
        // Empty family: vacuously good.
        assert!(good_event_member(&g, &EdgeSet::empty(3), &[]));
        // Missing both edges at vertex 1 empties the cut of {1}.
        let x = EdgeSet::from_indices(3, &[2]);
        assert!(!good_event_member(&g, &x, &family));
    }

    #[test]
    fn good_event_is_monotone() {
        let g = path(4);
        let family = expansion_family(&g).unwrap();
        for idx in 0..8u64 {
            let x = EdgeSet::from_index(3, idx);
            if good_event_member(&g, &x, &family) {
                for e in 0..3 {
                    let mut bigger = x.clone();
                    bigger.set(e, true);
                    assert!(good_event_member(&g, &bigger, &family));
                }
            }
        }
    }

    #[test]
    fn condition41_zero_for_percolation() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let params = RcParams::new(vec![0.4, 0.6, 0.8], vec![0.0; 3]).unwrap();
        let family = expansion_family(&g).unwrap();
        let report = condition41_check(&g, &params, &family).unwrap();
        assert_eq!(report.max_ratio, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn condition41_low_temperature_triangle_passes() {
        let g = Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let params = RcParams::uniform(&g, 0.99, 0.5).unwrap();
        let family = expansion_family(&g).unwrap();
        let report = condition41_check(&g, &params, &family).unwrap();
        assert!(report.pass, "max_ratio = {}", report.max_ratio);
        assert!(report.good_configs > 0);
    }

    #[test]
    fn size_guards() {
        let big = Graph::new(17, vec![]).unwrap();
        assert!(matches!(
            expansion_family(&big),
            Err(crate::error::Error::StateSpaceTooLarge(_))
        ));
        let wide = Graph::new(12, (0..11).map(|i| (i, i + 1)).collect()).unwrap();
        let params = RcParams::uniform(&wide, 0.9, 0.5).unwrap();
        assert!(matches!(
            condition41_check(&wide, &params, &[]),
            Err(crate::error::Error::StateSpaceTooLarge(_))
        ));
    }
}
