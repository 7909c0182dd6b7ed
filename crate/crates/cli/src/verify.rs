//! The `verify` subcommand: consolidated property checks on built-in
//! fixtures, one pass/fail line per check, JSON detail on request.

use fkmc::{
    condition41_check, draw_tape, es_lift_exact_distribution, expansion_family,
    field_dynamics_transition_matrix, glauber_run, glauber_transition_matrix,
    ising_graph_exact_distribution, parallel_rc_run, rc_exact_distribution, tv_distance, Graph,
    GraphIsingParams, MatrixIsing, RcParams, Result,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct CheckResult {
    name: &'static str,
    pass: bool,
    details: String,
}

fn triangle() -> Graph {
    Graph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap()
}

fn path4() -> Graph {
    Graph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap()
}

fn cycle4() -> Graph {
    Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
}

fn cycle5() -> Graph {
    Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap()
}

fn rc_fixtures() -> Vec<(Graph, RcParams)> {
    let mut out = Vec::new();
    for g in [triangle(), path4(), cycle4()] {
        for &(p, l) in &[(0.5, 0.5), (0.9, 0.0), (0.75, 0.3), (0.99, 0.7)] {
            out.push((g.clone(), RcParams::uniform(&g, p, l).unwrap()));
        }
    }
    out
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn check_glauber_stationarity() -> CheckResult {
    let mut worst = 0.0f64;
    for (g, params) in rc_fixtures() {
        let mu = rc_exact_distribution(&g, &params).unwrap();
        let p = glauber_transition_matrix(&g, &params).unwrap();
        let mut mu_p = vec![0.0; mu.len()];
        for (x, row) in p.iter().enumerate() {
            for (y, entry) in row.iter().enumerate() {
                mu_p[y] += mu.prob(x) * entry;
            }
        }
        worst = worst.max(l1(&mu_p, mu.probs()));
    }
    CheckResult {
        name: "glauber-stationarity",
        pass: worst <= 1e-10,
        details: format!("max l1(mu P - mu) = {worst:.3e} (tolerance 1e-10)"),
    }
}

fn check_field_stationarity() -> CheckResult {
    let mut worst = 0.0f64;
    for (g, params) in rc_fixtures() {
        let mu = rc_exact_distribution(&g, &params).unwrap();
        for &theta in &[0.2, 0.5, 0.8] {
            let p = field_dynamics_transition_matrix(&g, &params, theta).unwrap();
            let mut mu_p = vec![0.0; mu.len()];
            for (x, row) in p.iter().enumerate() {
                for (y, entry) in row.iter().enumerate() {
                    mu_p[y] += mu.prob(x) * entry;
                }
            }
            worst = worst.max(l1(&mu_p, mu.probs()));
        }
    }
    CheckResult {
        name: "field-stationarity",
        pass: worst <= 1e-9,
        details: format!("max l1(mu P_FD - mu) = {worst:.3e} (tolerance 1e-9)"),
    }
}

fn check_tape_equivalence() -> CheckResult {
    let graphs = vec![triangle(), path4(), cycle4(), cycle5()];
    let mut total = 0usize;
    let mut stabilized = 0usize;
    let mut mismatches = 0usize;
    for g in &graphs {
        for &lambda in &[0.0, 0.3, 0.7] {
            for &p in &[0.5, 0.9, 0.99] {
                let params = RcParams::uniform(g, p, lambda).unwrap();
                for seed in 0..3u64 {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let tape = draw_tape(g, &params, 60, &mut rng).unwrap();
                    let report = parallel_rc_run(g, &params, &tape, 30, true).unwrap();
                    total += 1;
                    if report.stabilized {
                        stabilized += 1;
                        if report.output != glauber_run(g, &params, &tape).unwrap() {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    CheckResult {
        name: "tape-equivalence",
        pass: mismatches == 0 && stabilized > 0,
        details: format!("{stabilized}/{total} runs stabilized, {mismatches} mismatches"),
    }
}

fn check_es_identity() -> CheckResult {
    let mut worst = 0.0f64;
    let mut count = 0;
    for g in [
        Graph::new(2, vec![(0, 1)]).unwrap(),
        triangle(),
        path4(),
        cycle4(),
    ] {
        for &(b, l) in &[(2.0, 0.5), (10.0, 0.2), (1.2, 0.8)] {
            let params = GraphIsingParams::uniform(&g, b, l).unwrap();
            let lift = es_lift_exact_distribution(&g, &params).unwrap();
            let gibbs = ising_graph_exact_distribution(&g, &params).unwrap();
            worst = worst.max(tv_distance(lift.probs(), gibbs.probs()).unwrap());
            count += 1;
        }
    }
    CheckResult {
        name: "es-identity",
        pass: worst <= 1e-10,
        details: format!("max TV over {count} fixtures = {worst:.3e} (tolerance 1e-10)"),
    }
}

fn denoise_laws(model: &MatrixIsing, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = model.n();
    let j = model.interaction();
    let h = model.fields();
    let mut a = vec![0.0f64; n];
    for r in 0..n {
        let mut acc = h[r];
        for c in 0..n {
            acc += j[(r, c)] * y[c];
        }
        a[r] = acc;
    }
    let mut brute = Vec::with_capacity(1 << n);
    for idx in 0..(1u64 << n) {
        let x: Vec<f64> = (0..n)
            .map(|v| if (idx >> v) & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        let mut quad = 0.0;
        let mut gauss = 0.0;
        for r in 0..n {
            let mut jx = 0.0;
            let mut jr = 0.0;
            for c in 0..n {
                jx += j[(r, c)] * x[c];
                jr += j[(r, c)] * (y[c] - x[c]);
            }
            quad += x[r] * jx;
            gauss += (y[r] - x[r]) * jr;
        }
        let lin: f64 = (0..n).map(|v| h[v] * x[v]).sum();
        brute.push((0.5 * quad + lin - 0.5 * gauss).exp());
    }
    let total: f64 = brute.iter().sum();
    for w in brute.iter_mut() {
        *w /= total;
    }
    let product: Vec<f64> = (0..(1u64 << n))
        .map(|idx| {
            (0..n)
                .map(|v| {
                    let p_plus = 1.0 / (1.0 + (-2.0 * a[v]).exp());
                    if (idx >> v) & 1 == 1 {
                        p_plus
                    } else {
                        1.0 - p_plus
                    }
                })
                .product()
        })
        .collect();
    (brute, product)
}

fn check_denoise_identity() -> CheckResult {
    let models = [
        MatrixIsing::from_json(
            r#"{"J": [[0.5, 0.2], [0.2, 0.5]], "h": [0.3, -0.4], "eta": 0.5}"#,
        )
        .unwrap(),
        MatrixIsing::from_json(
            r#"{"J": [[0.5, 0.1, 0.05, 0.0],
                      [0.1, 0.5, 0.1, 0.05],
                      [0.05, 0.1, 0.5, 0.1],
                      [0.0, 0.05, 0.1, 0.5]],
                 "h": [0.2, -0.1, 0.3, 0.0], "eta": 0.5}"#,
        )
        .unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for model in &models {
        for _ in 0..25 {
            let y: Vec<f64> = (0..model.n()).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
            let (brute, product) = denoise_laws(model, &y);
            worst = worst.max(tv_distance(&brute, &product).unwrap());
        }
    }
    CheckResult {
        name: "denoise-identity",
        pass: worst <= 1e-12,
        details: format!("max TV = {worst:.3e} (tolerance 1e-12)"),
    }
}

fn check_condition41() -> CheckResult {
    let fixtures = vec![
        (triangle(), 0.99, 0.5),
        (cycle4(), 0.99, 0.3),
        (path4(), 0.995, 0.7),
    ];
    let mut worst = 0.0f64;
    let mut all_pass = true;
    for (g, p, l) in fixtures {
        let params = RcParams::uniform(&g, p, l).unwrap();
        let family = expansion_family(&g).unwrap();
        let report = condition41_check(&g, &params, &family).unwrap();
        worst = worst.max(report.max_ratio);
        all_pass &= report.pass;
    }
    CheckResult {
        name: "condition-41",
        pass: all_pass,
        details: format!("max ratio = {worst:.6} (threshold 0.5)"),
    }
}

pub fn run(out: Option<&Path>) -> Result<i32> {
    let checks = vec![
        check_glauber_stationarity(),
        check_field_stationarity(),
        check_tape_equivalence(),
        check_es_identity(),
        check_denoise_identity(),
        check_condition41(),
    ];
    for c in &checks {
        println!(
            "check {}: {} ({})",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.details
        );
    }
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&checks)?;
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(path, json)?;
    }
    Ok(if checks.iter().all(|c| c.pass) { 0 } else { 1 })
}
