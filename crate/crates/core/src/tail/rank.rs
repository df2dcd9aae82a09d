//! Kendall and Spearman rank correlation with tie handling.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::cdf::plotting_positions;
use crate::error::{Error, Result};

const MIN_LEN_FOR_TEST: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankCorrelation {
    pub coef: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub n: usize,
}

fn check_pair(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min {
        return Err(Error::InsufficientData(format!(
            "need at least {min} paired values, got {}",
            x.len()
        )));
    }
    for (name, s) in [("x", x), ("y", y)] {
        if s.iter().all(|&v| v == s[0]) {
            return Err(Error::Undefined(format!("{name} is constant")));
        }
    }
    Ok(())
}

struct PairCounts {
    concordant: f64,
    discordant: f64,
    /// pairs not tied in x (resp. y)
    untied_x: f64,
    untied_y: f64,
}

fn pair_counts(x: &[f64], y: &[f64]) -> PairCounts {
    let n = x.len();
    let mut c = PairCounts {
        concordant: 0.0,
        discordant: 0.0,
        untied_x: 0.0,
        untied_y: 0.0,
    };
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].total_cmp(&x[j]) as i32;
            let dy = y[i].total_cmp(&y[j]) as i32;
            if dx != 0 {
                c.untied_x += 1.0;
            }
            if dy != 0 {
                c.untied_y += 1.0;
            }
            match dx * dy {
                1 => c.concordant += 1.0,
                -1 => c.discordant += 1.0,
                _ => {}
            }
        }
    }
    c
}

/// Sizes of the tie groups in `v`.
fn tie_groups(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut start = 0;
    while start < s.len() {
        let mut end = start + 1;
        while end < s.len() && s[end] == s[start] {
            end += 1;
        }
        if end - start > 1 {
            out.push((end - start) as f64);
        }
        start = end;
    }
    out
}

/// Kendall's tau-b coefficient alone (no minimum length beyond 2).
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y, 2)?;
    let c = pair_counts(x, y);
    Ok((c.concordant - c.discordant) / (c.untied_x * c.untied_y).sqrt())
}

/// Kendall's tau-b with a normal-approximation p-value whose variance
/// includes the tie corrections.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<RankCorrelation> {
    check_pair(x, y, MIN_LEN_FOR_TEST)?;
    let n = x.len() as f64;
    let c = pair_counts(x, y);
    let s = c.concordant - c.discordant;
    let tau = s / (c.untied_x * c.untied_y).sqrt();

    let tx = tie_groups(x);
    let ty = tie_groups(y);
    let sum = |g: &[f64], f: fn(f64) -> f64| g.iter().map(|&t| f(t)).sum::<f64>();
    let v0 = n * (n - 1.0) * (2.0 * n + 5.0);
    let vt = sum(&tx, |t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = sum(&ty, |t| t * (t - 1.0) * (2.0 * t + 5.0));
    let v1 = sum(&tx, |t| t * (t - 1.0)) * sum(&ty, |t| t * (t - 1.0)) / (2.0 * n * (n - 1.0));
    let v2 = sum(&tx, |t| t * (t - 1.0) * (t - 2.0)) * sum(&ty, |t| t * (t - 1.0) * (t - 2.0))
        / (9.0 * n * (n - 1.0) * (n - 2.0));
    let var = (v0 - vt - vu) / 18.0 + v1 + v2;
    let z = s / var.sqrt();
    let normal = Normal::standard();
    let p = (2.0 * (1.0 - normal.cdf(z.abs()))).min(1.0);
    Ok(RankCorrelation {
        coef: tau,
        p,
        n: x.len(),
    })
}

/// Spearman's rho on mid-ranks, p-value from the t approximation.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<RankCorrelation> {
    check_pair(x, y, MIN_LEN_FOR_TEST)?;
    let rx = plotting_positions(x);
    let ry = plotting_positions(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let p = if rho.abs() >= 1.0 {
        0.0
    } else {
        let df = n - 2.0;
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df)
            .map_err(|e| Error::Numerical(format!("t distribution: {e}")))?;
        2.0 * (1.0 - dist.cdf(t.abs()))
    };
    Ok(RankCorrelation {
        coef: rho,
        p,
        n: x.len(),
    })
}
