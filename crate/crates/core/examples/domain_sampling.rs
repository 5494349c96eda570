//! The genus-2 parameter domain: two periodic squares with a disc cut out
//! of each, an annulus around each disc, and glue pairs straddling the
//! disc boundaries.
//!
//! `cargo run --example domain_sampling [n]`

use willmore::net::Chart;
use willmore::sampling::{
    disc_center, periodic_disc_distance, sample_annulus, sample_bulk, sample_glue_pairs, SamplerConfig,
};

fn main() -> willmore::Result<()> {
    let n = std::env::args().nth(1).map_or(10_000, |s| s.parse().expect("n"));
    let cfg = SamplerConfig::default();
    println!("disc radius {}, punctured chart area {:.4}", cfg.delta, cfg.punctured_area());

    let bulk = sample_bulk(2, &cfg, n, 0, 0)?;
    for &chart in Chart::for_genus(2) {
        let pts: Vec<_> = bulk.iter().filter(|s| s.chart == chart).collect();
        let closest = pts
            .iter()
            .map(|s| periodic_disc_distance(s.u, s.v, disc_center(chart)))
            .fold(f64::INFINITY, f64::min);
        println!("{chart:?}: {} bulk points, nearest to the disc centre at r = {closest:.4}", pts.len());
    }

    let ann = sample_annulus(Chart::T2, &cfg, n / 4, 0, 0)?;
    let mean_r = ann
        .iter()
        .map(|s| periodic_disc_distance(s.u, s.v, disc_center(Chart::T2)))
        .sum::<f64>()
        / ann.len() as f64;
    println!(
        "annulus on T2: {} points, mean r {mean_r:.4} (uniform in r gives {:.4})",
        ann.len(),
        cfg.delta * (1.0 + cfg.alpha) / 2.0
    );

    let pairs = sample_glue_pairs(&cfg, 5, 0, 0)?;
    for p in &pairs {
        println!(
            "glue r {:.4} θ {:.4}: T1 ({:.4}, {:.4}) <-> T2 ({:.4}, {:.4}), reflected r {:.4}",
            p.r, p.theta, p.p1.0, p.p1.1, p.p2.0, p.p2.1, p.r2()
        );
    }
    Ok(())
}
