//! The denoising identity, the exact noiser's moments, stationarity of one
//! chain step, and the diagonal-shift invariance.

mod common;

use fkmc::{
    denoise, gaussian_noise, ising_matrix_exact_distribution, rgd_sample, tv_distance,
    GaussianSamplerKind, MatrixIsing, SpinConfig,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Random symmetric matrix with spectrum inside [lo, hi], built from a
/// random rotation of a random diagonal.
fn random_valid_j(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = raw.qr();
    let q = qr.q();
    let evs = DVector::from_fn(n, |_, _| lo + (hi - lo) * rng.random::<f64>());
    // Symmetrize exactly against rounding.
    let j = &q * DMatrix::from_diagonal(&evs) * q.transpose();
    let mut sym = j.clone();
    for r in 0..n {
        for c in 0..n {
            sym[(r, c)] = 0.5 * (j[(r, c)] + j[(c, r)]);
        }
    }
    sym
}

fn random_model(n: usize, eta: f64, rng: &mut ChaCha8Rng) -> MatrixIsing {
    let margin = 0.02;
    let j = random_valid_j(n, eta / 2.0 + margin, 1.0 - eta / 2.0 - margin, rng);
    let h = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal) * 0.5);
    MatrixIsing::new(j, h, eta).unwrap()
}

/// Brute-force law of the denoising step: proportional to
/// mu_Ising(x) * exp(-1/2 (y-x)^T J (y-x)) over all spin states.
fn brute_denoise_law(model: &MatrixIsing, y: &[f64]) -> Vec<f64> {
    let n = model.n();
    let yv = DVector::from_column_slice(y);
    let mut weights = Vec::with_capacity(1 << n);
    for idx in 0..(1u64 << n) {
        let x = SpinConfig::from_index(n, idx).to_vector();
        let quad = 0.5 * (model.interaction() * &x).dot(&x);
        let lin = model.fields().dot(&x);
        let resid = &yv - &x;
        let gauss = -0.5 * (model.interaction() * &resid).dot(&resid);
        weights.push((quad + lin + gauss).exp());
    }
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// The product of per-coordinate logistic marginals at a = J y + h.
fn product_denoise_law(model: &MatrixIsing, y: &[f64]) -> Vec<f64> {
    let n = model.n();
    let a = model.interaction() * DVector::from_column_slice(y) + model.fields();
    let p_plus: Vec<f64> = (0..n).map(|v| 1.0 / (1.0 + (-2.0 * a[v]).exp())).collect();
    (0..(1u64 << n))
        .map(|idx| {
            (0..n)
                .map(|v| {
                    if (idx >> v) & 1 == 1 {
                        p_plus[v]
                    } else {
                        1.0 - p_plus[v]
                    }
                })
                .product()
        })
        .collect()
}

#[test]
fn denoising_identity_holds_pointwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..100 {
        let n = if trial % 5 == 0 { 4 } else { 2 };
        let model = random_model(n, 0.5, &mut rng);
        let y: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal) * 2.0)
            .collect();
        let brute = brute_denoise_law(&model, &y);
        let product = product_denoise_law(&model, &y);
        let tv = tv_distance(&brute, &product).unwrap();
        assert!(tv <= 1e-12, "trial {trial}: tv = {tv}");
    }
}

#[test]
fn exact_noiser_mean_and_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let model = random_model(4, 0.5, &mut rng);
    let n = model.n();
    let x = SpinConfig::all_ones(n);
    let draws = 100_000usize;
    let mut sum = vec![0.0f64; n];
    let mut cov = vec![vec![0.0f64; n]; n];
    for _ in 0..draws {
        let y = gaussian_noise(&model, &x, GaussianSamplerKind::ExactCholesky, &mut rng).unwrap();
        let d: Vec<f64> = y.iter().map(|&yv| yv - 1.0).collect();
        for (v, &dv) in d.iter().enumerate() {
            sum[v] += dv;
            for (w, &dw) in d.iter().enumerate() {
                cov[v][w] += dv * dw;
            }
        }
    }
    let inv = model
        .interaction()
        .clone()
        .try_inverse()
        .expect("J is positive definite");
    let max_var = (0..n).map(|v| inv[(v, v)]).fold(0.0, f64::max);
    let mean_tol = 4.0 * (max_var / draws as f64).sqrt();
    for (v, &total) in sum.iter().enumerate() {
        let mean = total / draws as f64;
        assert!(mean.abs() <= mean_tol, "mean[{v}] = {mean}, tol = {mean_tol}");
    }
    let mut frob = 0.0;
    for v in 0..n {
        for w in 0..n {
            let c = cov[v][w] / draws as f64;
            frob += (c - inv[(v, w)]).powi(2);
        }
    }
    assert!(frob.sqrt() <= 0.05, "Frobenius error = {}", frob.sqrt());
}

#[test]
fn one_step_preserves_gibbs_law() {
    // Draw x from the exact law, run one noise+denoise step, and compare
    // the empirical law of the result against the exact law.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let model = random_model(4, 0.5, &mut rng);
    let exact = ising_matrix_exact_distribution(&model).unwrap();
    let replicas = 200_000usize;
    let mut counts = vec![0u64; exact.len()];
    for r in 0..replicas {
        let mut rng = ChaCha8Rng::seed_from_u64(5000);
        rng.set_stream(r as u64);
        let u: f64 = rng.random();
        let x = SpinConfig::from_index(model.n(), exact.sample_index(u) as u64);
        let y = gaussian_noise(&model, &x, GaussianSamplerKind::ExactCholesky, &mut rng).unwrap();
        let z = denoise(&model, &y, &mut rng).unwrap();
        counts[z.to_index() as usize] += 1;
    }
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / replicas as f64).collect();
    let tv = tv_distance(&freqs, exact.probs()).unwrap();
    let budget = (exact.len() as f64 / (2.0 * replicas as f64)).sqrt();
    assert!(tv <= 3.0 * budget, "tv = {tv}, budget = {budget}");
}

#[test]
fn diagonal_shift_leaves_law_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let j = random_valid_j(4, 0.3, 0.6, &mut rng);
    let h = DVector::from_fn(4, |_, _| rng.sample::<f64, _>(StandardNormal) * 0.3);
    let model = MatrixIsing::new(j.clone(), h.clone(), 0.5).unwrap();
    let shifted = MatrixIsing::new(j + DMatrix::from_diagonal_element(4, 4, 0.1), h, 0.5).unwrap();
    let a = ising_matrix_exact_distribution(&model).unwrap();
    let b = ising_matrix_exact_distribution(&shifted).unwrap();
    let tv = tv_distance(a.probs(), b.probs()).unwrap();
    assert!(tv <= 1e-12, "tv = {tv}");
}

#[test]
fn single_spin_chain_is_unbiased() {
    let model = MatrixIsing::new(
        DMatrix::from_diagonal_element(1, 1, 0.5),
        DVector::zeros(1),
        0.5,
    )
    .unwrap();
    let replicas = 100_000usize;
    let mut plus = 0u64;
    for r in 0..replicas {
        let mut rng = ChaCha8Rng::seed_from_u64(200);
        rng.set_stream(r as u64);
        let x = rgd_sample(&model, 0.05, GaussianSamplerKind::ExactCholesky, None, &mut rng)
            .unwrap();
        if x.spins()[0] == 1 {
            plus += 1;
        }
    }
    let bias = (plus as f64 / replicas as f64 - 0.5).abs();
    assert!(bias <= 0.01, "bias = {bias}");
}

#[test]
fn langevin_noiser_tracks_exact_noiser() {
    // Paired comparison at smoke scale: the chain run with the Langevin
    // noiser lands within a small TV of the exact-noiser chain.
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let model = random_model(4, 0.5, &mut rng);
    let exact_dist = ising_matrix_exact_distribution(&model).unwrap();
    let replicas = 30_000usize;
    let mut tv_by_kind = Vec::new();
    for kind in [
        GaussianSamplerKind::ExactCholesky,
        GaussianSamplerKind::Langevin {
            step_count: 200,
            step_size: 0.125,
        },
    ] {
        let mut counts = vec![0u64; exact_dist.len()];
        for r in 0..replicas {
            let mut rng = ChaCha8Rng::seed_from_u64(600);
            rng.set_stream(r as u64);
            let x = rgd_sample(&model, 0.05, kind, None, &mut rng).unwrap();
            counts[x.to_index() as usize] += 1;
        }
        let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / replicas as f64).collect();
        tv_by_kind.push(tv_distance(&freqs, exact_dist.probs()).unwrap());
    }
    let gap = (tv_by_kind[0] - tv_by_kind[1]).abs();
    assert!(gap <= 0.02, "exact tv = {}, langevin tv = {}", tv_by_kind[0], tv_by_kind[1]);
}
