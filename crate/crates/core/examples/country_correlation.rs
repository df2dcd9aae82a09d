//! Average a risk field over labeled countries and rank-correlate the
//! result with a national indicator.

use xextremes::risk::{
    aggregate_country, analytic_random_field, correlate_indicator, IndicatorColumn, IndicatorRow,
    RankMethod, RiskColumn,
};
use xextremes::{GridMeta, Neighborhood};

fn main() -> xextremes::Result<()> {
    let (rows, cols) = (12, 12);
    let mut risks = analytic_random_field(rows, cols, 0.02, Neighborhood::Moore8)?;
    // add a north-south gradient so countries differ
    for (k, px) in risks.pixels.iter_mut().enumerate() {
        px.p_community *= 1.0 + (k / cols) as f64 / rows as f64;
    }
    risks.pixels[5].p_checkmate = None;
    risks.pixels[5].p_stalemate = None;

    // 2x3 blocks are countries, one pixel in the corner is its own island
    let labels = (0..rows * cols)
        .map(|k| {
            let (r, c) = (k / cols, k % cols);
            Some(if k == rows * cols - 1 { "island".to_string() } else { format!("C{:02}", (r / 2) * 4 + c / 3) })
        })
        .collect();
    let meta = GridMeta::new(rows, cols).with_labels(labels)?;
    let table = aggregate_country(&risks, &meta)?;
    println!("{} countries, excluded {:?}", table.rows.len(), table.excluded);
    for row in table.rows.iter().take(3) {
        println!(
            "  {} ({} px, {} missing): community {:.4}, checkmate {:?}",
            row.country_id, row.n_pixels, row.n_missing, row.p_community, row.p_checkmate
        );
    }

    let indicators: Vec<IndicatorRow> = table
        .rows
        .iter()
        .enumerate()
        .map(|(k, r)| IndicatorRow {
            country_id: r.country_id.clone(),
            vulnerability: Some(r.p_community * 10.0 + ((k * 7) % 5) as f64 * 0.01),
            readiness: Some(1.0 - r.p_community),
        })
        .collect();
    for (col, name) in [(IndicatorColumn::Vulnerability, "vulnerability"), (IndicatorColumn::Readiness, "readiness")] {
        for method in [RankMethod::Kendall, RankMethod::Spearman] {
            let c = correlate_indicator(&table, &indicators, RiskColumn::Community, col, method)?;
            println!("{name:>13} {method:?}: {:+.3} (p = {:.1e}, n = {})", c.coef, c.p, c.n);
        }
    }
    Ok(())
}
