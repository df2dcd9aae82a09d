//! Record thresholds from a short reference record, empirical checkmate and
//! stalemate probabilities in a large ensemble, and hotspots against the
//! spatially random baseline.

use xextremes::risk::{
    analytic_dependent_risks, analytic_random_field, analytic_random_risks, build_thresholds,
    classify_hotspots, empirical_risks, persistence, EventUnit, RandomProcessParams,
};
use xextremes::{simulate_lgcp, LgcpConfig, Neighborhood};

fn main() -> xextremes::Result<()> {
    let p = RandomProcessParams::from_record_length(44, 8)?;
    let random = analytic_random_risks(&p)?;
    let dependent = analytic_dependent_risks(&p)?;
    println!(
        "random process:    community {:.4} checkmate {:.4} stalemate {:.4}",
        random.community, random.checkmate, random.stalemate
    );
    println!(
        "dependent process: community {:.4} checkmate {:.4} stalemate {:.4}",
        dependent.community, dependent.checkmate, dependent.stalemate
    );

    let cfg = LgcpConfig {
        gp_mean: 1.0,
        ..LgcpConfig::default()
    };
    let reference = simulate_lgcp(&LgcpConfig { n_samples: 5, seed: 1, ..cfg.clone() })?;
    let historical = simulate_lgcp(&LgcpConfig { n_samples: 200, seed: 2, ..cfg.clone() })?;
    let future = simulate_lgcp(&LgcpConfig { n_samples: 200, seed: 3, gp_mean: 1.2, ..cfg.clone() })?;

    let nb = Neighborhood::Moore8;
    let thr = build_thresholds(&reference, 50, nb)?;
    let hist = empirical_risks(&historical, &thr, nb, EventUnit::Snapshot)?;
    let fut = empirical_risks(&future, &thr, nb, EventUnit::Snapshot)?;
    println!(
        "historical: {} of {} pixels defined, max |check + stale - 1| = {:e}",
        hist.n_defined(),
        hist.pixels.len(),
        hist.max_normalization_error()
    );
    let centre = hist.get(8, 8);
    println!(
        "pixel (8, 8): community {:.4} checkmate {:?} stalemate {:?}",
        centre.p_community, centre.p_checkmate, centre.p_stalemate
    );

    let baseline = analytic_random_field(16, 16, 1.0 / 50.0, nb)?;
    let h = classify_hotspots(&hist, 50, &baseline)?;
    let f = classify_hotspots(&fut, 50, &baseline)?;
    let pers = persistence(&h.community_high, &f.community_high)?;
    println!(
        "community hotspots: {} historical, {} future, {} persist, {} new",
        pers.n_hist, pers.n_future, pers.n_persistent, pers.n_new
    );
    println!("checkmate above random: {} pixels", h.n_checkmate_above_random());

    let yearly = empirical_risks(&historical, &thr, nb, EventUnit::Block(10))?;
    println!("block-maxima mode, pixel (8, 8) community {:.4}", yearly.get(8, 8).p_community);
    Ok(())
}
