//! Unseen-extreme risks: record thresholds, empirical and analytic
//! community / checkmate / stalemate probabilities, hotspots and country
//! aggregation.

mod analytic;
mod country;
mod empirical;
mod field;
mod hotspots;
mod thresholds;

pub use analytic::{
    analytic_dependent_risks, analytic_random_field, analytic_random_risks, RandomProcessParams,
    RiskTriple,
};
pub use country::{
    aggregate_country, correlate_indicator, read_indicators, CountryRisk, CountryTable,
    IndicatorColumn, IndicatorCorrelation, IndicatorRow, RankMethod, RiskColumn,
};
pub use empirical::{empirical_risks, EventUnit};
pub use field::{PixelRisk, RiskField};
pub use hotspots::{classify_hotspots, persistence, HotspotFlags, Persistence};
pub use thresholds::{build_thresholds, ThresholdMap};
