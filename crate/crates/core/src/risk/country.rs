//! Country-level averages and their rank correlation with national indicators.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::field::RiskField;
use crate::error::{Error, Result};
use crate::grid::GridMeta;
use crate::tail::{kendall_tau, spearman_rho};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRisk {
    pub country_id: String,
    pub n_pixels: usize,
    pub p_community: f64,
    /// Mean over pixels with a defined value; `None` when none is defined.
    pub p_checkmate: Option<f64>,
    pub p_stalemate: Option<f64>,
    /// Pixels whose normalized risks are undefined.
    pub n_missing: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryTable {
    pub rows: Vec<CountryRisk>,
    /// Countries dropped for covering fewer than two pixels.
    pub excluded: Vec<String>,
}

fn masked_mean(vals: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = vals.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Unweighted pixel means per labeled country.
pub fn aggregate_country(risks: &RiskField, meta: &GridMeta) -> Result<CountryTable> {
    if (risks.rows, risks.cols) != (meta.n_rows, meta.n_cols) {
        return Err(Error::Shape(format!(
            "risks are {}x{}, labels cover {}x{}",
            risks.rows, risks.cols, meta.n_rows, meta.n_cols
        )));
    }
    if meta.pixel_labels.is_none() {
        return Err(Error::Config("grid has no country labels".into()));
    }
    let mut table = CountryTable {
        rows: Vec::new(),
        excluded: Vec::new(),
    };
    for (id, pixels) in meta.regions() {
        if pixels.len() < 2 {
            log::warn!("country {id} covers {} pixel(s); excluded", pixels.len());
            table.excluded.push(id);
            continue;
        }
        let px: Vec<_> = pixels.iter().map(|&k| &risks.pixels[k]).collect();
        let n_missing = px.iter().filter(|p| !p.defined()).count();
        if n_missing > 0 {
            log::warn!("country {id}: {n_missing} pixel(s) without normalized risks");
        }
        table.rows.push(CountryRisk {
            n_pixels: px.len(),
            p_community: px.iter().map(|p| p.p_community).sum::<f64>() / px.len() as f64,
            p_checkmate: masked_mean(px.iter().map(|p| p.p_checkmate)),
            p_stalemate: masked_mean(px.iter().map(|p| p.p_stalemate)),
            n_missing,
            country_id: id,
        });
    }
    Ok(table)
}

impl CountryTable {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for row in &self.rows {
            wtr.serialize(row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let rows = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        Ok(CountryTable {
            rows,
            excluded: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub country_id: String,
    pub vulnerability: Option<f64>,
    pub readiness: Option<f64>,
}

/// Reads a `country_id, vulnerability, readiness` table.
pub fn read_indicators(path: impl AsRef<Path>) -> Result<Vec<IndicatorRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RiskColumn {
    Community,
    Checkmate,
    Stalemate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndicatorColumn {
    Vulnerability,
    Readiness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMethod {
    Kendall,
    Spearman,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorCorrelation {
    pub method: RankMethod,
    pub coef: f64,
    pub p: f64,
    pub n: usize,
    /// Country ids present in only one table, or lacking a value in either.
    pub unmatched: Vec<String>,
}

/// Rank correlation between a country risk column and an indicator,
/// joined on country id. At least ten countries must join.
pub fn correlate_indicator(
    table: &CountryTable,
    indicators: &[IndicatorRow],
    risk: RiskColumn,
    indicator: IndicatorColumn,
    method: RankMethod,
) -> Result<IndicatorCorrelation> {
    let ind: BTreeMap<&str, Option<f64>> = indicators
        .iter()
        .map(|r| {
            let v = match indicator {
                IndicatorColumn::Vulnerability => r.vulnerability,
                IndicatorColumn::Readiness => r.readiness,
            };
            (r.country_id.as_str(), v)
        })
        .collect();
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut unmatched = Vec::new();
    for row in &table.rows {
        let rv = match risk {
            RiskColumn::Community => Some(row.p_community),
            RiskColumn::Checkmate => row.p_checkmate,
            RiskColumn::Stalemate => row.p_stalemate,
        };
        match (rv, ind.get(row.country_id.as_str()).copied().flatten()) {
            (Some(a), Some(b)) => {
                x.push(a);
                y.push(b);
            }
            _ => unmatched.push(row.country_id.clone()),
        }
    }
    let in_table: std::collections::BTreeSet<&str> =
        table.rows.iter().map(|r| r.country_id.as_str()).collect();
    unmatched.extend(
        ind.keys()
            .filter(|k| !in_table.contains(*k))
            .map(|k| k.to_string()),
    );
    unmatched.sort();
    if x.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "only {} countries join; at least 10 are needed",
            x.len()
        )));
    }
    let rc = match method {
        RankMethod::Kendall => kendall_tau(&x, &y)?,
        RankMethod::Spearman => spearman_rho(&x, &y)?,
    };
    Ok(IndicatorCorrelation {
        method,
        coef: rc.coef,
        p: rc.p,
        n: rc.n,
        unmatched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::PixelRisk;

    fn labeled(labels: &[&str], pixels: Vec<PixelRisk>) -> (RiskField, GridMeta) {
        let meta = GridMeta::new(1, labels.len())
            .with_labels(labels.iter().map(|s| Some(s.to_string())).collect())
            .unwrap();
        let f = RiskField {
            rows: 1,
            cols: labels.len(),
            pixels,
        };
        (f, meta)
    }

    #[test]
    fn means_and_exclusions() {
        let (f, meta) = labeled(
            &["a", "a", "b", "b", "c"],
            vec![
                PixelRisk::from_unnormalized(0.2, 0.1, 0.1, 1),
                PixelRisk::from_unnormalized(0.4, 0.1, 0.3, 1),
                PixelRisk::from_unnormalized(0.3, 0.15, 0.15, 1),
                PixelRisk::from_unnormalized(0.0, 0.0, 0.0, 0),
                PixelRisk::from_unnormalized(0.9, 0.9, 0.0, 1),
            ],
        );
        let t = aggregate_country(&f, &meta).unwrap();
        assert_eq!(t.excluded, vec!["c".to_string()]);
        let a = &t.rows[0];
        assert!((a.p_community - 0.3).abs() < 1e-15);
        assert_eq!(a.n_missing, 0);
        let b = &t.rows[1];
        assert_eq!(b.p_community, 0.15);
        assert_eq!(b.p_checkmate, Some(0.5));
        assert_eq!(b.n_missing, 1);
    }

    fn table(vals: &[f64]) -> CountryTable {
        CountryTable {
            rows: vals
                .iter()
                .enumerate()
                .map(|(i, &v)| CountryRisk {
                    country_id: format!("c{i}"),
                    n_pixels: 2,
                    p_community: v,
                    p_checkmate: None,
                    p_stalemate: None,
                    n_missing: 2,
                })
                .collect(),
            excluded: vec![],
        }
    }

    #[test]
    fn identity_and_reversal() {
        let vals: Vec<f64> = (0..12).map(|i| (i * 7 % 12) as f64 / 12.0).collect();
        let t = table(&vals);
        for (sign, expect) in [(1.0, 1.0), (-1.0, -1.0)] {
            let mut ind: Vec<IndicatorRow> = vals
                .iter()
                .enumerate()
                .map(|(i, &v)| IndicatorRow {
                    country_id: format!("c{i}"),
                    vulnerability: Some(sign * v),
                    readiness: None,
                })
                .collect();
            ind.push(IndicatorRow {
                country_id: "zz".into(),
                vulnerability: Some(0.0),
                readiness: None,
            });
            for m in [RankMethod::Kendall, RankMethod::Spearman] {
                let c = correlate_indicator(
                    &t,
                    &ind,
                    RiskColumn::Community,
                    IndicatorColumn::Vulnerability,
                    m,
                )
                .unwrap();
                assert!((c.coef - expect).abs() < 1e-12);
                assert_eq!(c.unmatched, vec!["zz".to_string()]);
            }
            assert!(correlate_indicator(
                &t,
                &ind,
                RiskColumn::Checkmate,
                IndicatorColumn::Vulnerability,
                RankMethod::Kendall
            )
            .is_err());
        }
    }
}
