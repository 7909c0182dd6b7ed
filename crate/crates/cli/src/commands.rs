//! The sampling subcommands: replica fan-out, oracle comparison and report
//! files.

use crate::{InnerArg, MatrixArgs, NoiserArg, SampleArgs, ScheduleMode};
use fkmc::{
    empirical_tv, es_lift, field_dynamics_sample, ising_graph_exact_distribution,
    ising_matrix_exact_distribution, paper_schedule, practical_schedule, rc_exact_distribution,
    rc_params_from_ising, rgd_sample, Error, GaussianSamplerKind, Graph, GraphIsingParams,
    InnerSampler, MatrixIsing, RcParams, Result, Schedule, TvReport,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Serialize)]
struct RunReport<'a> {
    command: &'a str,
    seed: u64,
    eps: f64,
    replicas: usize,
    threads: usize,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noiser: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<&'a Schedule>,
    saturation_refused: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<TvReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples_file: Option<String>,
}

fn write_with_parent(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

fn report_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".report.json");
    PathBuf::from(os)
}

fn samples_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".samples.csv");
    PathBuf::from(os)
}

fn write_report(out: &Path, report: &RunReport<'_>) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    write_with_parent(&report_path(out), &json)
}

fn write_samples(out: &Path, lines: &[String]) -> Result<String> {
    let path = samples_path(out);
    let mut body = lines.join("\n");
    body.push('\n');
    write_with_parent(&path, &body)?;
    Ok(path.display().to_string())
}

fn resolve_schedule(args: &SampleArgs, g: &Graph, params: &RcParams) -> Result<Schedule> {
    match args.schedule {
        ScheduleMode::Paper => paper_schedule(g, params, args.eps),
        ScheduleMode::Practical => {
            practical_schedule(args.theta, args.tfd, args.tgd, args.tpa, args.n0)
        }
    }
}

fn inner_sampler(arg: InnerArg) -> InnerSampler {
    match arg {
        InnerArg::Parallel => InnerSampler::Parallel,
        InnerArg::Exact => InnerSampler::Exact,
    }
}

fn inner_name(arg: InnerArg) -> &'static str {
    match arg {
        InnerArg::Parallel => "parallel",
        InnerArg::Exact => "exact",
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1)")));
    }
    Ok(())
}

fn check_replicas(replicas: usize) -> Result<()> {
    if replicas == 0 {
        return Err(Error::InvalidParameter("--replicas must be >= 1".into()));
    }
    Ok(())
}

/// Replica r uses stream r of a ChaCha8 generator seeded with the run
/// seed; results are collected in replica order.
fn replica_rng(seed: u64, replica: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica as u64);
    rng
}

pub fn sample_rc(args: &SampleArgs, threads: usize) -> Result<i32> {
    check_eps(args.eps)?;
    check_replicas(args.replicas)?;
    let g = Graph::parse_edge_list(&fs::read_to_string(&args.graph)?)?;
    let params = RcParams::from_json(&fs::read_to_string(&args.params)?)?;
    let schedule = resolve_schedule(args, &g, &params)?;
    let mut report = RunReport {
        command: "sample-rc",
        seed: args.seed,
        eps: args.eps,
        replicas: args.replicas,
        threads,
        n: g.vertex_count(),
        m: Some(g.edge_count()),
        inner: Some(inner_name(args.inner)),
        noiser: None,
        schedule: Some(&schedule),
        saturation_refused: false,
        oracle: None,
        samples_file: None,
    };
    if schedule.saturated && args.inner == InnerArg::Parallel {
        report.saturation_refused = true;
        write_report(&args.out, &report)?;
        eprintln!(
            "schedule saturated (log theta = {}); report written, refusing to sample",
            schedule.log_theta
        );
        return Ok(2);
    }
    let inner = inner_sampler(args.inner);
    let samples: Vec<fkmc::EdgeSet> = (0..args.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(args.seed, r);
            field_dynamics_sample(&g, &params, &schedule, inner, &mut rng, false)
                .map(|(x, _)| x)
        })
        .collect::<Result<_>>()?;
    if g.edge_count() <= fkmc::MAX_EXACT_EDGES {
        let exact = rc_exact_distribution(&g, &params)?;
        let states: Vec<usize> = samples.iter().map(|s| s.to_index() as usize).collect();
        report.oracle = Some(empirical_tv(&states, &exact)?);
    }
    let lines: Vec<String> = samples.iter().map(|s| s.to_bitstring()).collect();
    report.samples_file = Some(write_samples(&args.out, &lines)?);
    write_report(&args.out, &report)?;
    Ok(0)
}

pub fn sample_ising_graph(args: &SampleArgs, threads: usize) -> Result<i32> {
    check_eps(args.eps)?;
    check_replicas(args.replicas)?;
    let g = Graph::parse_edge_list(&fs::read_to_string(&args.graph)?)?;
    let params = GraphIsingParams::from_json(&fs::read_to_string(&args.params)?)?;
    let rc_params = rc_params_from_ising(&params)?;
    let schedule = resolve_schedule(args, &g, &rc_params)?;
    let mut report = RunReport {
        command: "sample-ising-graph",
        seed: args.seed,
        eps: args.eps,
        replicas: args.replicas,
        threads,
        n: g.vertex_count(),
        m: Some(g.edge_count()),
        inner: Some(inner_name(args.inner)),
        noiser: None,
        schedule: Some(&schedule),
        saturation_refused: false,
        oracle: None,
        samples_file: None,
    };
    if schedule.saturated && args.inner == InnerArg::Parallel {
        report.saturation_refused = true;
        write_report(&args.out, &report)?;
        eprintln!(
            "schedule saturated (log theta = {}); report written, refusing to sample",
            schedule.log_theta
        );
        return Ok(2);
    }
    let inner = inner_sampler(args.inner);
    let samples: Vec<fkmc::VertexSubset> = (0..args.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(args.seed, r);
            let (rc_sample, _) =
                field_dynamics_sample(&g, &rc_params, &schedule, inner, &mut rng, false)?;
            es_lift(&g, &rc_sample, &params, &mut rng)
        })
        .collect::<Result<_>>()?;
    if g.vertex_count() <= 20 {
        let exact = ising_graph_exact_distribution(&g, &params)?;
        let states: Vec<usize> = samples.iter().map(|s| s.to_index() as usize).collect();
        report.oracle = Some(empirical_tv(&states, &exact)?);
    }
    let lines: Vec<String> = samples.iter().map(|s| s.to_bitstring()).collect();
    report.samples_file = Some(write_samples(&args.out, &lines)?);
    write_report(&args.out, &report)?;
    Ok(0)
}

pub fn sample_ising_matrix(args: &MatrixArgs, threads: usize) -> Result<i32> {
    check_eps(args.eps)?;
    check_replicas(args.replicas)?;
    let model = MatrixIsing::from_json(&fs::read_to_string(&args.params)?)?;
    let kind = match args.noiser {
        NoiserArg::Exact => GaussianSamplerKind::ExactCholesky,
        NoiserArg::Langevin => {
            let default = GaussianSamplerKind::default_langevin(&model, args.eps)?;
            let (mut steps, mut step_size) = match default {
                GaussianSamplerKind::Langevin {
                    step_count,
                    step_size,
                } => (step_count, step_size),
                _ => unreachable!(),
            };
            if let Some(s) = args.langevin_steps {
                steps = s;
            }
            if let Some(s) = args.langevin_step_size {
                step_size = s;
            }
            GaussianSamplerKind::Langevin {
                step_count: steps,
                step_size,
            }
        }
    };
    let samples: Vec<fkmc::SpinConfig> = (0..args.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(args.seed, r);
            rgd_sample(&model, args.eps, kind, None, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut report = RunReport {
        command: "sample-ising-matrix",
        seed: args.seed,
        eps: args.eps,
        replicas: args.replicas,
        threads,
        n: model.n(),
        m: None,
        inner: None,
        noiser: Some(format!("{kind:?}")),
        schedule: None,
        saturation_refused: false,
        oracle: None,
        samples_file: None,
    };
    if model.n() <= 16 {
        let exact = ising_matrix_exact_distribution(&model)?;
        let states: Vec<usize> = samples.iter().map(|s| s.to_index() as usize).collect();
        report.oracle = Some(empirical_tv(&states, &exact)?);
    }
    let lines: Vec<String> = samples.iter().map(|s| s.to_bitstring()).collect();
    report.samples_file = Some(write_samples(&args.out, &lines)?);
    write_report(&args.out, &report)?;
    Ok(0)
}
