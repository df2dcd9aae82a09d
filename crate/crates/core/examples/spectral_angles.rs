//! Extremal-angle spectral samples for dependent and independent pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xextremes::tail::{spectral_distribution, spectral_wasserstein};

fn histogram(angles: &[f64]) -> String {
    let mut bins = [0usize; 10];
    for &w in angles {
        bins[((w * 10.0) as usize).min(9)] += 1;
    }
    bins.iter()
        .map(|&b| format!("{:.2}", b as f64 / angles.len() as f64))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> xextremes::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 100_000;
    let a: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let noise: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let partly: Vec<f64> = a.iter().zip(&noise).map(|(x, e)| 0.7 * x + 0.3 * e).collect();

    for (name, b) in [("comonotone", a.clone()), ("partly dependent", partly), ("independent", noise)] {
        let s = spectral_distribution(&a, &b, 0.99)?;
        println!(
            "{name:>17}: {} angles, mean {:.3}, mass in [0.2, 0.8] {:.3}",
            s.n_retained(),
            s.mean_angle().unwrap_or(f64::NAN),
            s.mass_within(0.2, 0.8)
        );
        println!("{:>17}  {}", "", histogram(&s.angles));
    }

    let co = spectral_distribution(&a, &a, 0.99)?;
    let ind = spectral_distribution(&a, &a.iter().rev().copied().collect::<Vec<_>>(), 0.99)?;
    println!("W1(comonotone, reversed) = {:.3}", spectral_wasserstein(&co, &ind)?);
    Ok(())
}
