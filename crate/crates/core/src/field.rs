//! Field dynamics: the outer chain that overlays a Bernoulli(theta) edge
//! set and resamples the union from the tilted random-cluster measure.
//!
//! The proof-driven parameter schedule is computed faithfully in the log
//! domain; its round counts overflow any integer type for realistic inputs,
//! so they saturate at a cap and the schedule carries a `saturated` flag.
//! A practical override schedule exists so the chain itself can be run at
//! desk scale; stationarity holds for any theta.

use crate::error::{Error, Result};
use crate::glauber::draw_tape;
use crate::graph::{EdgeSet, Graph};
use crate::parallel::{parallel_rc_run, ParallelRunReport};
use crate::rc::{rc_exact_distribution, rc_exact_sample, tilt_params, RcParams};
use rand::Rng;
use serde::Serialize;

/// Round counts saturate here; anything past 2^63 is not runnable anyway.
pub const SCHEDULE_CAP: u64 = 1 << 63;

/// The five chain parameters plus the log-domain copy of theta.
///
/// `log_theta` is always finite and authoritative; `theta = exp(log_theta)`
/// can underflow to zero for proof-driven schedules, which also saturate
/// the round counts and set the flag.
#[derive(Clone, Debug, Serialize)]
pub struct Schedule {
    pub theta: f64,
    pub log_theta: f64,
    pub n0: f64,
    pub t_fd: u64,
    pub t_gd: u64,
    pub t_pa: u64,
    pub saturated: bool,
}

fn saturate_log(log_value: f64) -> (u64, f64, bool) {
    let cap_log = (SCHEDULE_CAP as f64).ln();
    if log_value > cap_log {
        (SCHEDULE_CAP, log_value, true)
    } else {
        let v = log_value.exp().ceil().max(1.0);
        (v as u64, (v as u64 as f64).ln(), false)
    }
}

/// Ceiling with saturation for values that fit the float range directly.
fn saturate_value(value: f64) -> (u64, f64, bool) {
    if value.is_nan() || value >= SCHEDULE_CAP as f64 {
        (SCHEDULE_CAP, value.ln(), true)
    } else {
        let v = value.ceil().max(1.0) as u64;
        (v, (v as f64).ln(), false)
    }
}

/// The proof-driven parameter schedule, from the accuracy target and the
/// instance's p_min and lambda_max. All logs are natural.
pub fn paper_schedule(g: &Graph, params: &RcParams, eps: f64) -> Result<Schedule> {
    params.validate_dims(g)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1)")));
    }
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "paper schedule needs n >= 2".into(),
        ));
    }
    let m = g.edge_count().max(1) as f64;
    let p_min = params.p_min();
    let lambda_max = params.lambda_max();
    let contraction = (1.0 - lambda_max).powi(-2);
    let log_n = (n as f64).ln();

    let log_theta =
        -100.0 + 10.0 * (eps / 2.0).ln() / log_n - 140.0 * contraction + p_min.ln() - log_n.ln();
    let theta = log_theta.exp();

    let n0 = (60.0 * contraction)
        .exp()
        .max(3.0 / p_min)
        .max(((2.0 / (eps * eps)).ln() / log_n).sqrt());

    // T^FD = ceil((e/theta)^(5 contraction) * (2 log n + log log(2/p_min)
    //        + log(2/eps^2))), assembled in the log domain.
    let bracket = 2.0 * log_n + (2.0 / p_min).ln().ln() + (2.0 / (eps * eps)).ln();
    let log_t_fd = 5.0 * contraction * (1.0 - log_theta) + bracket.ln();
    let (t_fd, log_t_fd, sat_fd) = saturate_log(log_t_fd);

    // T^GD = ceil(2 m (log m + log(8 T^FD / eps))).
    let gd_value = 2.0 * m * (m.ln() + 8f64.ln() + log_t_fd - eps.ln());
    let (t_gd, log_t_gd, sat_gd) = saturate_value(gd_value);

    // T^PA = ceil(3 log(8 T^GD T^FD / eps)).
    let pa_value = 3.0 * (8f64.ln() + log_t_gd + log_t_fd - eps.ln());
    let (t_pa, _, sat_pa) = saturate_value(pa_value);

    Ok(Schedule {
        theta,
        log_theta,
        n0,
        t_fd,
        t_gd,
        t_pa,
        saturated: sat_fd || sat_gd || sat_pa,
    })
}

/// A user-chosen schedule for desk-scale runs.
pub fn practical_schedule(
    theta: f64,
    t_fd: u64,
    t_gd: u64,
    t_pa: u64,
    n0: f64,
) -> Result<Schedule> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} outside (0, 1)"
        )));
    }
    if t_fd == 0 || t_gd == 0 || t_pa == 0 {
        return Err(Error::InvalidParameter(
            "round counts must be >= 1".into(),
        ));
    }
    if n0.is_nan() || n0 < 0.0 {
        return Err(Error::InvalidParameter(format!("n0 = {n0} must be >= 0")));
    }
    Ok(Schedule {
        theta,
        log_theta: theta.ln(),
        n0,
        t_fd,
        t_gd,
        t_pa,
        saturated: false,
    })
}

/// Which sampler handles the per-iteration tilted subgraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerSampler {
    /// Tape draw plus round-synchronous simulation.
    Parallel,
    /// Exhaustive enumeration (subgraphs up to 24 edges).
    Exact,
}

/// What the inner sampler did on one iteration.
#[derive(Clone, Debug, Serialize)]
pub enum InnerReport {
    Parallel(ParallelRunReport),
    Exact,
}

/// One traced iteration: the Bernoulli(theta) overlay, the inner run and
/// the state the iteration produced.
#[derive(Clone, Debug, Serialize)]
pub struct FieldStepTrace {
    pub iteration: usize,
    pub overlay: EdgeSet,
    pub inner: InnerReport,
    pub result: EdgeSet,
}

/// Runs the field dynamics.
///
/// Below the population threshold (n <= N0) this is one brute-force draw.
/// Otherwise the chain starts at the full edge set and runs T^FD
/// iterations, each replacing X by a sample of the tilted measure on the
/// subgraph (V, S union X); edges outside the union are absent afterwards.
pub fn field_dynamics_sample<R: Rng + ?Sized>(
    g: &Graph,
    params: &RcParams,
    schedule: &Schedule,
    inner: InnerSampler,
    rng: &mut R,
    trace: bool,
) -> Result<(EdgeSet, Option<Vec<FieldStepTrace>>)> {
    params.validate_dims(g)?;
    let n = g.vertex_count();
    let m = g.edge_count();
    if schedule.saturated {
        match inner {
            InnerSampler::Parallel => {
                return Err(Error::SaturatedSchedule(format!(
                    "round counts overflowed (log theta = {}); use a practical schedule",
                    schedule.log_theta
                )));
            }
            InnerSampler::Exact => {
                if (n as f64) > schedule.n0 {
                    return Err(Error::SaturatedSchedule(format!(
                        "T^FD saturated and n = {n} exceeds N0 = {}",
                        schedule.n0
                    )));
                }
            }
        }
    }
    let mut traces = trace.then(Vec::new);
    if (n as f64) <= schedule.n0 {
        let x = rc_exact_sample(g, params, rng)?;
        return Ok((x, traces));
    }
    let tilted = tilt_params(params, schedule.theta)?;
    let mut x = g.full_edge_set();
    for iteration in 1..=schedule.t_fd {
        let mut overlay = EdgeSet::empty(m);
        for e in 0..m {
            if rng.random::<f64>() < schedule.theta {
                overlay.set(e, true);
            }
        }
        let mut union = overlay.clone();
        union.union_with(&x);
        let sub_edges: Vec<usize> = union.iter().collect();
        let (sampled, inner_report) = if sub_edges.is_empty() {
            // The only subset of an empty subgraph is the empty set.
            (EdgeSet::empty(0), InnerReport::Exact)
        } else {
            let sub_g = Graph::new(n, sub_edges.iter().map(|&e| g.edge(e)).collect())?;
            let sub_params = RcParams::new(
                sub_edges.iter().map(|&e| tilted.p()[e]).collect(),
                tilted.lambda().to_vec(),
            )?;
            match inner {
                InnerSampler::Exact => {
                    (rc_exact_sample(&sub_g, &sub_params, rng)?, InnerReport::Exact)
                }
                InnerSampler::Parallel => {
                    let tape = draw_tape(&sub_g, &sub_params, schedule.t_gd as usize, rng)?;
                    let report =
                        parallel_rc_run(&sub_g, &sub_params, &tape, schedule.t_pa as usize, true)?;
                    let out = report.output.clone();
                    (out, InnerReport::Parallel(report))
                }
            }
        };
        let mut next = EdgeSet::empty(m);
        for (k, &e) in sub_edges.iter().enumerate() {
            if sampled.contains(k) {
                next.set(e, true);
            }
        }
        x = next;
        if let Some(traces) = traces.as_mut() {
            traces.push(FieldStepTrace {
                iteration: iteration as usize,
                overlay,
                inner: inner_report,
                result: x.clone(),
            });
        }
    }
    Ok((x, traces))
}

/// The exact one-step transition matrix of the field dynamics over all 2^m
/// configurations: entry (X, Y) sums over overlays S the Bernoulli(theta)
/// weight times the tilted conditional probability of Y given Y is a
/// subset of S union X.
pub fn field_dynamics_transition_matrix(
    g: &Graph,
    params: &RcParams,
    theta: f64,
) -> Result<Vec<Vec<f64>>> {
    params.validate_dims(g)?;
    let m = g.edge_count();
    if m > 10 {
        return Err(Error::StateSpaceTooLarge(format!(
            "m = {m} exceeds the transition-matrix limit 10"
        )));
    }
    let tilted = tilt_params(params, theta)?;
    let states = 1usize << m;
    let tilted_probs = rc_exact_distribution(g, &tilted)?.probs().to_vec();

    // mass[U] = tilted probability that the configuration is inside U; the
    // conditional of the tilted measure on subsets of U is the subgraph
    // (V, U) measure because components depend only on the present edges.
    let mut mass = tilted_probs.clone();
    for b in 0..m {
        let bit = 1usize << b;
        for u in 0..states {
            if u & bit != 0 {
                mass[u] += mass[u ^ bit];
            }
        }
    }

    let mut overlay_weight = vec![0.0f64; states];
    for (s, w) in overlay_weight.iter_mut().enumerate() {
        let k = s.count_ones() as i32;
        *w = theta.powi(k) * (1.0 - theta).powi(m as i32 - k);
    }

    let mut matrix = vec![vec![0.0f64; states]; states];
    for x in 0..states {
        // accum[U] = total overlay weight landing on union U, scaled by the
        // conditional mass; summing over supersets of X|Y gives the row.
        let mut accum = vec![0.0f64; states];
        for (s, w) in overlay_weight.iter().enumerate() {
            accum[s | x] += w;
        }
        for (u, a) in accum.iter_mut().enumerate() {
            *a /= mass[u];
        }
        for b in 0..m {
            let bit = 1usize << b;
            for u in 0..states {
                if u & bit == 0 {
                    accum[u] += accum[u | bit];
                }
            }
        }
        for y in 0..states {
            matrix[x][y] = tilted_probs[y] * accum[x | y];
        }
    }
    Ok(matrix)
}
