//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test --test acceptance` (or `cargo test --workspace`).

mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use common::{bernoulli_tensor, deepx_brute_force, random_chi, synchronized_tensor, uniform_tensor};
use xextremes::eval::{mmd_squared, ms_swd, radial_psd, KernelConfig, PyramidConfig};
use xextremes::lgcp::empirical_dispersion;
use xextremes::risk::{
    analytic_dependent_risks, analytic_random_field, analytic_random_risks, build_thresholds,
    empirical_risks, EventUnit, RandomProcessParams, RiskField, ThresholdMap,
};
use xextremes::tail::{
    binomial_pmf, cooccurrence_histogram, extremal_correlation, spectral_distribution,
    total_variation,
};
use xextremes::{
    deepx_metric, simulate_lgcp, spate_metric, EmbeddingConfig, EnsembleTensor, LgcpConfig,
    Neighborhood, Shape,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn analytic_baselines() -> Outcome {
    let start = Instant::now();
    let p = 1.0 / 44.0;
    let r = analytic_random_risks(&RandomProcessParams::uniform(p, 8)).map_err(err)?;
    let close = |a: f64, b: f64| (a - b).abs() < 5e-4;
    let random_ok = close(r.community, 0.1869) && close(r.checkmate, 0.1216) && close(r.stalemate, 0.8784);
    let d = analytic_dependent_risks(&RandomProcessParams::uniform(p, 8)).map_err(err)?;
    let dependent_ok = d.community == p && d.checkmate == 1.0 && d.stalemate == 0.0;
    let s36 = RandomProcessParams::from_record_length(36, 8).map_err(err)?.p_target;
    let s36_ok = format!("{s36:.5}") == "0.02778";

    let out = Command::new(env!("CARGO_BIN_EXE_xextremes"))
        .args(["risk-analytic", "--p", "0.022727", "--neighbors", "8"])
        .output()
        .map_err(err)?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(err)?;
    let field = |k: &str| v[k].as_f64().unwrap_or(f64::NAN);
    let cli_ok = out.status.success()
        && format!("{:.4}", field("community")) == "0.1869"
        && format!("{:.4}", field("checkmate")) == "0.1216"
        && format!("{:.4}", field("stalemate")) == "0.8784";
    let secs = start.elapsed().as_secs_f64();
    ensure(
        random_ok && dependent_ok && s36_ok && cli_ok && secs < 1.0,
        format!(
            "random {:.4}/{:.4}/{:.4}, dependent {}/{}/{}, S=36 -> {s36:.5}, cli {}, {secs:.3}s",
            r.community, r.checkmate, r.stalemate, d.community, d.checkmate, d.stalemate,
            if cli_ok { "ok" } else { "mismatch" }
        ),
    )
}

fn empirical_matches_analytic() -> Outcome {
    let start = Instant::now();
    let p = 1.0 / 44.0;
    let t = bernoulli_tensor(1_000_000, 3, 3, p, 2024);
    let risk = empirical_risks(&t, &ThresholdMap::uniform(3, 3, 1.0), Neighborhood::Moore8, EventUnit::Snapshot)
        .map_err(err)?;
    let c = risk.get(1, 1);
    let a = analytic_random_risks(&RandomProcessParams::uniform(p, 8)).map_err(err)?;
    let devs = [
        (c.p_community - a.community).abs(),
        (c.p_checkmate.unwrap_or(f64::NAN) - a.checkmate).abs(),
        (c.p_stalemate.unwrap_or(f64::NAN) - a.stalemate).abs(),
    ];
    let worst = devs.iter().copied().fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst <= 0.005 && secs < 30.0,
        format!(
            "empirical {:.4}/{:.4}/{:.4}, max deviation {worst:.4}, {secs:.2}s",
            c.p_community,
            c.p_checkmate.unwrap_or(f64::NAN),
            c.p_stalemate.unwrap_or(f64::NAN)
        ),
    )
}

fn deepx_reduction() -> Outcome {
    let (mut reduction, mut brute) = (0.0f64, 0.0f64);
    for seed in 0..50u64 {
        let t = uniform_tensor(Shape::new(2, 5, 4, 4), 0.2, 3.0, seed);
        let chi = random_chi(16, 0.6, 500 + seed);
        let base = EmbeddingConfig::baseline();
        let a = deepx_metric(&t, &base, &chi).map_err(err)?;
        let b = spate_metric(&t, base.length_scale, base.neighborhood, base.denominator_epsilon)
            .map_err(err)?;
        for (x, y) in a.values.iter().zip(b.values.iter()) {
            reduction = reduction.max((x - y).abs());
        }
        let cfg = EmbeddingConfig {
            q: 0.6,
            ..EmbeddingConfig::default()
        };
        let full = deepx_metric(&t, &cfg, &chi).map_err(err)?;
        let want = deepx_brute_force(&t, cfg.theta_a, cfg.theta_b, cfg.length_scale, cfg.q, &chi, cfg.denominator_epsilon);
        for (x, y) in full.values.iter().zip(&want) {
            brute = brute.max((x - y).abs());
        }
    }
    ensure(
        reduction <= 1e-12 && brute <= 1e-10,
        format!("50 tensors: baseline gap {reduction:e}, brute-force gap {brute:e}"),
    )
}

fn tail_metrics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 1_000_000;
    let u: Vec<f32> = (0..n).map(|_| rng.random()).collect();
    let v: Vec<f32> = (0..n).map(|_| rng.random()).collect();

    // comonotone: second pixel is an increasing transform of the first
    let co = EnsembleTensor::from_fn(Shape::new(1, 10_000, 1, 2), |_, t, _, c| {
        if c == 0 { u[t] } else { u[t].exp() * 3.0 }
    })
    .map_err(err)?;
    let chi_co = extremal_correlation(&co, 0.9).map_err(err)?.get(0, 1).unwrap_or(f64::NAN);

    let ind = EnsembleTensor::from_fn(Shape::new(1, n, 1, 2), |_, t, _, c| if c == 0 { u[t] } else { v[t] })
        .map_err(err)?;
    let chi_ind = extremal_correlation(&ind, 0.9).map_err(err)?.get(0, 1).unwrap_or(f64::NAN);

    let a: Vec<f64> = u.iter().map(|&x| x as f64).collect();
    let b: Vec<f64> = v.iter().map(|&x| x as f64).collect();
    let a_co: Vec<f64> = a.iter().map(|x| x.exp()).collect();
    let mean_co = spectral_distribution(&a, &a_co, 0.99)
        .map_err(err)?
        .mean_angle()
        .unwrap_or(f64::NAN);
    let outside = 1.0 - spectral_distribution(&a, &b, 0.99).map_err(err)?.mass_within(0.2, 0.8);

    ensure(
        chi_co == 1.0 && (chi_ind - 0.10).abs() <= 0.01 && (mean_co - 0.5).abs() <= 0.05 && outside >= 0.8,
        format!(
            "chi comonotone {chi_co}, chi independent {chi_ind:.4}, mean angle {mean_co:.4}, mass outside [0.2, 0.8] {outside:.3}"
        ),
    )
}

fn evaluation_battery() -> Outcome {
    // MMD^2 between halves of one Gaussian sample
    let mut total = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..1000)
            .map(|_| (0..16).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        total += mmd_squared(&pts[..500], &pts[500..], KernelConfig::MedianHeuristic)
            .map_err(err)?
            .mmd2;
    }
    let mmd_avg = total / 20.0;

    let x = uniform_tensor(Shape::new(3, 2, 32, 32), 0.0, 5.0, 31);
    let swd = ms_swd(&x, &x, &PyramidConfig::default()).map_err(err)?.distance;

    let mut parseval = 0.0f64;
    for (k, (h, w)) in [(8, 8), (9, 13), (16, 10), (31, 32)].into_iter().enumerate() {
        let t = uniform_tensor(Shape::new(2, 2, h, w), -3.0, 7.0, 90 + k as u64);
        let spec = radial_psd(&t).map_err(err)?;
        let ms = t.as_slice().iter().map(|&v| (v as f64).powi(2)).sum::<f64>() / t.as_slice().len() as f64;
        parseval = parseval.max((spec.total_power() - ms).abs() / ms);
    }

    // i.i.d. uniform field; exceeding 0.99 happens with probability 0.01
    let field = uniform_tensor(Shape::new(10, 10_000, 8, 8), 0.0, 1.0, 11);
    let hist = cooccurrence_histogram(&field, &ThresholdMap::uniform(8, 8, 0.99)).map_err(err)?;
    let tv = total_variation(&hist.probabilities, &binomial_pmf(64, 0.01).map_err(err)?);

    ensure(
        mmd_avg.abs() < 1e-3 && swd <= 1e-9 && parseval < 1e-8 && tv < 0.02,
        format!(
            "mean MMD^2 {mmd_avg:.2e}, MS-SWD(X, X) {swd:e}, Parseval rel. error {parseval:.1e}, co-occurrence TV {tv:.4}"
        ),
    )
}

fn lgcp_validation() -> Outcome {
    let base = LgcpConfig {
        n_samples: 40,
        time: 10,
        rows: 16,
        cols: 16,
        seed: 42,
        ..LgcpConfig::default()
    };
    let cells = base.n_samples * base.time * base.rows * base.cols;
    let near_poisson = simulate_lgcp(&LgcpConfig {
        gp_variance: 1e-8,
        ..base.clone()
    })
    .map_err(err)?;
    let d0 = empirical_dispersion(&near_poisson).map_err(err)?;
    let cox = simulate_lgcp(&LgcpConfig {
        gp_variance: 1.0,
        ..base.clone()
    })
    .map_err(err)?;
    let mean = cox.as_slice().iter().map(|&v| v as f64).sum::<f64>() / cells as f64;
    let expected = (base.gp_mean + 0.5).exp();
    let d1 = empirical_dispersion(&cox).map_err(err)?;
    let rel = (mean - expected).abs() / expected;
    ensure(
        (0.97..=1.03).contains(&d0) && rel <= 0.05 && d1 > 1.0 && cells >= 100_000,
        format!("{cells} cells: dispersion at sigma^2 -> 0 {d0:.4}; sigma^2 = 1 mean {mean:.4} vs {expected:.4} ({:.1}%), dispersion {d1:.3}", rel * 100.0),
    )
}

fn normalization_and_monotonicity() -> Outcome {
    let mut fields: Vec<(String, RiskField)> = Vec::new();
    let p = 1.0 / 44.0;
    let mut checkmate = Vec::new();
    let mut stalemate = Vec::new();
    for (k, rho) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
        let t = synchronized_tensor(200_000, p, rho, 300 + k as u64);
        let f = empirical_risks(&t, &ThresholdMap::uniform(3, 3, 1.0), Neighborhood::Moore8, EventUnit::Snapshot)
            .map_err(err)?;
        let c = f.get(1, 1);
        checkmate.push(c.p_checkmate.unwrap_or(f64::NAN));
        stalemate.push(c.p_stalemate.unwrap_or(f64::NAN));
        fields.push((format!("sync {rho}"), f));
    }
    let monotone = checkmate.windows(2).all(|w| w[1] >= w[0]) && stalemate.windows(2).all(|w| w[1] <= w[0]);

    let reference = simulate_lgcp(&LgcpConfig { n_samples: 20, seed: 1, ..LgcpConfig::default() }).map_err(err)?;
    let ensemble = simulate_lgcp(&LgcpConfig { n_samples: 60, seed: 2, ..LgcpConfig::default() }).map_err(err)?;
    for nb in [Neighborhood::Moore8, Neighborhood::VonNeumann4, Neighborhood::Radius(2)] {
        let thr = build_thresholds(&reference, 44, nb).map_err(err)?;
        fields.push((format!("lgcp {nb}"), empirical_risks(&ensemble, &thr, nb, EventUnit::Snapshot).map_err(err)?));
        fields.push((format!("lgcp {nb} blocks"), empirical_risks(&ensemble, &thr, nb, EventUnit::Block(10)).map_err(err)?));
    }
    let noise = uniform_tensor(Shape::new(4, 500, 6, 7), 0.0, 1.0, 5);
    let thr = build_thresholds(&noise, 36, Neighborhood::Moore8).map_err(err)?;
    fields.push(("uniform noise".into(), empirical_risks(&noise, &thr, Neighborhood::Moore8, EventUnit::Snapshot).map_err(err)?));
    fields.push(("analytic".into(), analytic_random_field(16, 16, p, Neighborhood::Moore8).map_err(err)?));

    let (worst_name, worst) = fields
        .iter()
        .map(|(n, f)| (n.as_str(), f.max_normalization_error()))
        .fold(("", 0.0f64), |a, b| if b.1 > a.1 { b } else { a });
    let all_defined_bounded = fields.iter().all(|(_, f)| {
        f.pixels.iter().all(|p| {
            (0.0..=1.0).contains(&p.p_community)
                && p.p_checkmate.is_none_or(|v| (0.0..=1.0).contains(&v))
                && p.p_stalemate.is_none_or(|v| (0.0..=1.0).contains(&v))
        })
    });
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ");
    ensure(
        worst <= 1e-12 && monotone && all_defined_bounded,
        format!(
            "{} fields, max |check + stale - 1| {worst:e}{}; checkmate over sync sweep {}; stalemate {}",
            fields.len(),
            if worst > 0.0 { format!(" ({worst_name})") } else { String::new() },
            fmt(&checkmate),
            fmt(&stalemate)
        ),
    )
}

fn run_pipeline(bin: &str, dir: &Path, threads: &str) -> Result<(), String> {
    let steps: [&[&str]; 9] = [
        &["simulate-lgcp", "--output", "sim.xt", "--samples", "30", "--seed", "9"],
        &["simulate-lgcp", "--output", "ref.xt", "--samples", "12", "--seed", "10"],
        &["embed", "--input", "sim.xt", "--output", "emb.xt", "--q", "0.8"],
        &["chi", "--input", "sim.xt", "--output", "chi.xt", "--q", "0.8"],
        &["thresholds", "--input", "ref.xt", "--record-length", "44", "--output", "thr.json"],
        &["risk", "--input", "sim.xt", "--thresholds", "thr.json", "--output", "risk.csv"],
        &["msswd", "--input", "sim.xt", "--other", "ref.xt", "--seed", "3", "--manifest", "msswd.json"],
        &["psd", "--input", "sim.xt", "--output", "psd.csv"],
        &["mmd", "--input", "sim.xt", "--other", "ref.xt", "--permutations", "50", "--manifest", "mmd.json"],
    ];
    for args in steps {
        let out = Command::new(bin)
            .args(args)
            .args(["--threads", threads])
            .current_dir(dir)
            .output()
            .map_err(err)?;
        if !out.status.success() {
            return Err(format!("{} failed: {}", args[0], String::from_utf8_lossy(&out.stderr)));
        }
        std::fs::write(dir.join(format!("{}.stdout", args[0])), &out.stdout).map_err(err)?;
    }
    Ok(())
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_xextremes");
    let one = tempfile::tempdir().map_err(err)?;
    let eight = tempfile::tempdir().map_err(err)?;
    run_pipeline(bin, one.path(), "1")?;
    run_pipeline(bin, eight.path(), "8")?;
    let mut names: Vec<String> = std::fs::read_dir(one.path())
        .map_err(err)?
        .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    names.sort();
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| std::fs::read(one.path().join(n)).ok() != std::fs::read(eight.path().join(n)).ok())
        .collect();
    ensure(
        differing.is_empty() && names.len() >= 20,
        if differing.is_empty() {
            format!("{} files byte-identical at --threads 1 and 8", names.len())
        } else {
            format!("differing files: {differing:?}")
        },
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("analytic baseline reproduction", analytic_baselines),
        ("empirical/analytic oracle equivalence", empirical_matches_analytic),
        ("DeepX reduction and brute-force agreement", deepx_reduction),
        ("tail-metric properties", tail_metrics),
        ("evaluation battery properties", evaluation_battery),
        ("LGCP validation", lgcp_validation),
        ("normalization identity and synchronization monotonicity", normalization_and_monotonicity),
        ("CLI determinism across thread counts", cli_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{}] {name}: {detail} ({:.2}s)", k + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
