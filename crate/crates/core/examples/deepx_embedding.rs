//! DeepX embedding of a simulated ensemble next to the SPATE baseline.

use xextremes::{
    deepx_metric, extremal_correlation, simulate_lgcp, spate_metric, EmbeddingConfig, LgcpConfig,
};

fn main() -> xextremes::Result<()> {
    let t = simulate_lgcp(&LgcpConfig {
        n_samples: 60,
        gp_variance: 1.5,
        seed: 3,
        ..LgcpConfig::default()
    })?;
    let cfg = EmbeddingConfig::default();
    let chi = extremal_correlation(&t, cfg.q)?;
    println!("chi estimated at q = {} ({} missing pairs)", cfg.q, chi.n_missing());

    let deepx = deepx_metric(&t, &cfg, &chi)?;
    let spate = spate_metric(&t, cfg.length_scale, cfg.neighborhood, cfg.denominator_epsilon)?;
    let mean_abs = |a: &ndarray::Array4<f64>| a.iter().map(|v| v.abs()).sum::<f64>() / a.len() as f64;
    println!("mean |DeepX| {:.4}, mean |SPATE| {:.4}", mean_abs(&deepx.values), mean_abs(&spate.values));
    println!(
        "guarded denominators {}, degenerate frames {}",
        deepx.guarded_denominators, deepx.degenerate_frames
    );

    let baseline = deepx_metric(&t, &EmbeddingConfig::baseline(), &chi)?;
    println!("theta = (1, 0) equals SPATE: {}", baseline.values == spate.values);

    let frame = deepx.values.slice(ndarray::s![0, 5, 6..10, 6..10]);
    println!("sample 0, step 5, rows/cols 6..10:\n{frame:.3}");
    Ok(())
}
