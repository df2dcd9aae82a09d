//! Extremal correlation, rank correlation and exceedance co-occurrence on a
//! field where the left half shares one driver and the right half is noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xextremes::risk::ThresholdMap;
use xextremes::tail::{binomial_pmf, cooccurrence_histogram, kendall_tau, total_variation};
use xextremes::{extremal_correlation, EnsembleTensor, Shape};

fn main() -> xextremes::Result<()> {
    let shape = Shape::new(4, 500, 4, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut driver = 0.0f32;
    let t = EnsembleTensor::from_fn(shape, |_, _, _, c| {
        if c == 0 {
            driver = rng.random();
        }
        let noise: f32 = rng.random();
        if c < 2 { driver + 0.05 * noise } else { noise }
    })?;

    let chi = extremal_correlation(&t, 0.9)?;
    println!("chi(0,1) coupled: {:.3}", chi.get(0, 1).unwrap_or(f64::NAN));
    println!("chi(2,3) independent: {:.3}", chi.get(2, 3).unwrap_or(f64::NAN));
    println!("joint exceedances of (0,1): {:?}", chi.joint_count(0, 1));

    let tau = kendall_tau(&t.pixel_series(0), &t.pixel_series(1))?;
    println!("Kendall tau (0,1) = {:.3}, p = {:.2e}", tau.coef, tau.p);
    let tau = kendall_tau(&t.pixel_series(2), &t.pixel_series(3))?;
    println!("Kendall tau (2,3) = {:.3}, p = {:.2}", tau.coef, tau.p);

    let hist = cooccurrence_histogram(&t, &ThresholdMap::uniform(4, 4, 0.95))?;
    let tv = total_variation(&hist.probabilities, &binomial_pmf(16, 0.05)?);
    println!("co-occurrence vs Binomial(16, 0.05): TV = {tv:.3}, mean count {:.2}", hist.mean_count());
    Ok(())
}
