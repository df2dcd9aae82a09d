//! Built-in self checks run by `xextremes verify`.
//!
//! Each check is small enough to finish in well under a second in a release
//! build; the full-size versions live in the crate's acceptance tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::embed::{deepx_metric, spate_metric, EmbeddingConfig};
use crate::error::Result;
use crate::eval::{ms_swd, radial_psd, PyramidConfig};
use crate::grid::Neighborhood;
use crate::risk::{
    analytic_dependent_risks, analytic_random_risks, empirical_risks, EventUnit,
    RandomProcessParams, ThresholdMap,
};
use crate::tail::{extremal_correlation, ExtremalMatrix};
use crate::tensor::{EnsembleTensor, Shape};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn random_tensor(shape: Shape, rng: &mut ChaCha8Rng) -> Result<EnsembleTensor> {
    EnsembleTensor::from_fn(shape, |_, _, _, _| rng.random_range(0.5f32..2.0))
}

/// Bernoulli(p) indicators on a 3x3 grid, one snapshot per row of draws.
pub fn bernoulli_field(snapshots: usize, p: f64, seed: u64) -> Result<EnsembleTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EnsembleTensor::from_fn(Shape::new(1, snapshots, 3, 3), |_, _, _, _| {
        rng.random_bool(p) as u8 as f32
    })
}

pub fn run_checks() -> Vec<Check> {
    let p44 = 1.0 / 44.0;
    vec![
        check("analytic random baseline", || {
            let r = analytic_random_risks(&RandomProcessParams::uniform(p44, 8))?;
            let ok = (r.community - 0.1869).abs() < 5e-4
                && (r.checkmate - 0.1216).abs() < 5e-4
                && (r.stalemate - 0.8784).abs() < 5e-4;
            Ok((
                ok,
                format!(
                    "{:.4} / {:.4} / {:.4}",
                    r.community, r.checkmate, r.stalemate
                ),
            ))
        }),
        check("analytic dependent baseline", || {
            let r = analytic_dependent_risks(&RandomProcessParams::uniform(p44, 8))?;
            let ok = r.community == p44 && r.checkmate == 1.0 && r.stalemate == 0.0;
            Ok((ok, format!("{} / {} / {}", r.community, r.checkmate, r.stalemate)))
        }),
        check("record length 36", || {
            let p = RandomProcessParams::from_record_length(36, 8)?;
            Ok(((p.p_target - 0.02778).abs() < 5e-6, format!("{:.5}", p.p_target)))
        }),
        check("empirical matches analytic", || {
            let t = bernoulli_field(200_000, p44, 7)?;
            let thr = ThresholdMap::uniform(3, 3, 1.0);
            let risk = empirical_risks(&t, &thr, Neighborhood::Moore8, EventUnit::Snapshot)?;
            let c = risk.get(1, 1);
            let a = analytic_random_risks(&RandomProcessParams::uniform(p44, 8))?;
            let dev = (c.p_community - a.community)
                .abs()
                .max((c.p_checkmate.unwrap_or(f64::NAN) - a.checkmate).abs());
            Ok((dev < 0.01, format!("max deviation {dev:.4}")))
        }),
        check("deepx reduces to baseline", || {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let t = random_tensor(Shape::new(2, 5, 4, 4), &mut rng)?;
                let chi = ExtremalMatrix::constant(16, 0.9, 0.5)?;
                let cfg = EmbeddingConfig {
                    theta_a: 1.0,
                    theta_b: 0.0,
                    ..EmbeddingConfig::default()
                };
                let a = deepx_metric(&t, &cfg, &chi)?;
                let b = spate_metric(&t, cfg.length_scale, cfg.neighborhood, cfg.denominator_epsilon)?;
                for (x, y) in a.values.iter().zip(b.values.iter()) {
                    worst = worst.max((x - y).abs());
                }
            }
            Ok((worst <= 1e-12, format!("max difference {worst:e}")))
        }),
        check("comonotone extremal correlation", || {
            let t = EnsembleTensor::from_fn(Shape::new(1, 400, 1, 2), |_, t, _, c| {
                (t * 37 % 400) as f32 * (1.0 + c as f32)
            })?;
            let chi = extremal_correlation(&t, 0.9)?;
            let v = chi.get(0, 1).unwrap_or(f64::NAN);
            Ok((v == 1.0, format!("chi = {v}")))
        }),
        check("ms-swd of identical ensembles", || {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let t = random_tensor(Shape::new(2, 2, 16, 16), &mut rng)?;
            let d = ms_swd(&t, &t, &PyramidConfig::default())?;
            Ok((d.distance <= 1e-9, format!("{:e}", d.distance)))
        }),
        check("psd parseval", || {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let t = random_tensor(Shape::new(1, 3, 12, 10), &mut rng)?;
            let spec = radial_psd(&t)?;
            let ms = t.as_slice().iter().map(|&v| (v as f64).powi(2)).sum::<f64>()
                / t.as_slice().len() as f64;
            let rel = (spec.total_power() - ms).abs() / ms;
            Ok((rel < 1e-8, format!("relative error {rel:e}")))
        }),
        check("tensor round trip", || {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let t = random_tensor(Shape::new(2, 3, 4, 5), &mut rng)?;
            let back = EnsembleTensor::from_bytes(&t.to_bytes())?;
            Ok((back == t, format!("{} bytes", t.to_bytes().len())))
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_checks() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
