//! Empirical joint (AND) return periods of paired annual maxima.

use crate::error::{Error, Result};

const MIN_PAIRS: usize = 20;

/// Empirical `1 / P(X > x and Y > y)` in units of the pairing block (years
/// for annual maxima).
pub fn joint_return_period(pairs: &[(f64, f64)], level: (f64, f64)) -> Result<f64> {
    if pairs.len() < MIN_PAIRS {
        return Err(Error::InsufficientData(format!(
            "joint return period needs at least {MIN_PAIRS} paired maxima, got {}",
            pairs.len()
        )));
    }
    let hits = pairs
        .iter()
        .filter(|(x, y)| *x > level.0 && *y > level.1)
        .count();
    if hits == 0 {
        return Err(Error::Undefined(format!(
            "no joint exceedance of ({}, {}) among {} pairs",
            level.0,
            level.1,
            pairs.len()
        )));
    }
    Ok(pairs.len() as f64 / hits as f64)
}

/// Ratio of the generated to the real joint return period at `level`.
/// Values below 1 mean the generated ensemble makes the joint event more
/// frequent.
pub fn bivariate_return_amplification(
    real: &[(f64, f64)],
    gen: &[(f64, f64)],
    level: (f64, f64),
) -> Result<f64> {
    let real_rp = joint_return_period(real, level)?;
    let gen_rp = joint_return_period(gen, level)?;
    Ok(gen_rp / real_rp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| (k as f64, ((k * 7) % n) as f64))
            .collect()
    }

    #[test]
    fn identical_sets_give_unit_ratio() {
        let p = pairs(40);
        assert_eq!(bivariate_return_amplification(&p, &p, (20.0, 10.0)).unwrap(), 1.0);
    }

    #[test]
    fn doubling_joint_exceedances_halves_the_ratio() {
        // 40 pairs; real has 4 joint exceedances of (10, 10), gen has 8
        let mut real = vec![(0.0, 0.0); 40];
        let mut gen = vec![(0.0, 0.0); 40];
        for p in real.iter_mut().take(4) {
            *p = (11.0, 12.0);
        }
        for p in gen.iter_mut().take(8) {
            *p = (11.0, 12.0);
        }
        assert_eq!(joint_return_period(&real, (10.0, 10.0)).unwrap(), 10.0);
        assert_eq!(
            bivariate_return_amplification(&real, &gen, (10.0, 10.0)).unwrap(),
            0.5
        );
    }

    #[test]
    fn level_above_maxima_is_undefined() {
        let p = pairs(30);
        assert!(matches!(
            bivariate_return_amplification(&p, &p, (100.0, 100.0)),
            Err(Error::Undefined(_))
        ));
        assert!(matches!(
            joint_return_period(&pairs(10), (0.0, 0.0)),
            Err(Error::InsufficientData(_))
        ));
    }
}
