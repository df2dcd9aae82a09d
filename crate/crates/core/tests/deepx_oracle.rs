mod common;

use common::{deepx_brute_force, random_chi, uniform_tensor};
use ndarray::Array3;
use xextremes::embed::{spacetime_expectation_a, spacetime_expectation_b};
use xextremes::{deepx_metric, spate_metric, EmbeddingConfig, EnsembleTensor, ExtremalMatrix, Shape};

#[test]
fn full_metric_matches_brute_force() {
    for seed in 0..50u64 {
        let t = uniform_tensor(Shape::new(2, 5, 4, 4), 0.2, 3.0, seed);
        let chi = random_chi(16, 0.6, 1000 + seed);
        let cfg = EmbeddingConfig {
            q: 0.6,
            length_scale: 0.5 + (seed % 5) as f64 * 0.7,
            ..EmbeddingConfig::default()
        };
        let got = deepx_metric(&t, &cfg, &chi).unwrap();
        let want = deepx_brute_force(&t, 0.5, 0.5, cfg.length_scale, 0.6, &chi, 1e-8);
        for (k, (a, b)) in got.values.iter().zip(&want).enumerate() {
            assert!((a - b).abs() <= 1e-10, "seed {seed} index {k}: {a} vs {b}");
        }
    }
}

#[test]
fn baseline_weights_reproduce_spate_path() {
    for seed in 0..50u64 {
        let t = uniform_tensor(Shape::new(2, 5, 4, 4), -1.0, 1.0, seed);
        let chi = random_chi(16, 0.9, seed);
        let cfg = EmbeddingConfig::baseline();
        let a = deepx_metric(&t, &cfg, &chi).unwrap();
        let b = spate_metric(&t, cfg.length_scale, cfg.neighborhood, cfg.denominator_epsilon).unwrap();
        let worst = a
            .values
            .iter()
            .zip(b.values.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12, "seed {seed}: {worst}");
    }
}

#[test]
fn three_pixel_tail_expectation_by_hand() {
    // step 0: [1, 2, 3], step 1: [2, 4, 1]; with two values per pixel the
    // larger sits at F = 2/3 > q = 0.5, so pixels 0 and 1 are jointly extreme
    // at step 1 and pixel 2 is not.
    let t = EnsembleTensor::from_vec(Shape::new(1, 2, 1, 3), vec![1.0, 2.0, 3.0, 2.0, 4.0, 1.0])
        .unwrap();
    let chi = ExtremalMatrix::from_values(
        3,
        0.5,
        vec![
            Some(1.0), Some(0.3), Some(0.2),
            Some(0.7), Some(1.0), Some(0.4),
            Some(0.9), Some(0.6), Some(1.0),
        ],
    )
    .unwrap();
    let cfg = EmbeddingConfig {
        q: 0.5,
        ..EmbeddingConfig::default()
    };
    let mu_b = spacetime_expectation_b(&t, &cfg, &chi, 0).unwrap();
    // past_i = b * x_i(0), denominator = b * 6; b cancels
    let expected = [(1.0 * 2.0 + 0.3 * 4.0) * 1.0 / 6.0, (0.7 * 2.0 + 1.0 * 4.0) * 2.0 / 6.0, 0.0];
    for (c, e) in expected.iter().enumerate() {
        assert!((mu_b[[1, 0, c]] - e).abs() < 1e-12, "pixel {c}");
    }
    assert!(mu_b.index_axis(ndarray::Axis(0), 0).iter().all(|&v| v == 0.0));
}

#[test]
fn two_pixel_expectation_with_flat_kernel() {
    // l = inf: past_i = x_i(0). muA_i(1) = (x_0(1) + x_1(1)) * x_i(0) / (x_0(0) + x_1(0))
    let t = EnsembleTensor::from_vec(Shape::new(1, 2, 2, 1), vec![1.0, 3.0, 5.0, 3.0]).unwrap();
    let cfg = EmbeddingConfig {
        length_scale: f64::INFINITY,
        ..EmbeddingConfig::default()
    };
    let mu: Array3<f64> = spacetime_expectation_a(&t, &cfg, 0).unwrap();
    assert!((mu[[1, 0, 0]] - 8.0 * 1.0 / 4.0).abs() < 1e-12);
    assert!((mu[[1, 1, 0]] - 8.0 * 3.0 / 4.0).abs() < 1e-12);
}

#[test]
fn all_pairs_extreme_with_unit_chi_collapses_expectations() {
    let t = uniform_tensor(Shape::new(3, 4, 3, 3), 0.5, 2.0, 77);
    let chi = ExtremalMatrix::constant(9, 0.0, 1.0).unwrap();
    let cfg = EmbeddingConfig {
        q: 0.0,
        ..EmbeddingConfig::default()
    };
    for s in 0..3 {
        let a = spacetime_expectation_a(&t, &cfg, s).unwrap();
        let b = spacetime_expectation_b(&t, &cfg, &chi, s).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn sign_follows_local_coherence() {
    let t = uniform_tensor(Shape::new(1, 6, 5, 5), 0.1, 2.0, 5);
    let chi = random_chi(25, 0.9, 5);
    let f = deepx_metric(&t, &EmbeddingConfig::default(), &chi).unwrap();
    let nb = xextremes::Neighborhood::Moore8;
    for step in 1..6 {
        for i in 0..25 {
            let z = f.deviations[[0, step, i / 5, i % 5]];
            let nsum: f64 = nb
                .neighbors(5, 5, i / 5, i % 5)
                .into_iter()
                .map(|j| f.deviations[[0, step, j / 5, j % 5]])
                .sum();
            let v = f.values[[0, step, i / 5, i % 5]];
            assert!(v == 0.0 || v.signum() == (z * nsum).signum());
        }
    }
}
