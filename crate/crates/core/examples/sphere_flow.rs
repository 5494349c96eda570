//! Genus 0: pretrain on the (2, 1, 0.5) ellipsoid, then run the Willmore
//! flow and watch the estimate fall toward 4π.
//!
//! `cargo run --release --example sphere_flow [epochs]`

use willmore::config::TrainConfig;
use willmore::driver::{evaluate_with, pretrain, train, TrainOptions};

fn main() -> willmore::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut cfg = TrainConfig::for_genus(0)?;
    if let Some(e) = std::env::args().nth(1) {
        cfg.epochs = e.parse().expect("epochs");
    }
    let pre = pretrain(&cfg)?;
    let start = evaluate_with(&pre.model, &cfg, cfg.seed)?;
    println!("after pretraining: rmse {:.3e}, W = {:.4}", pre.report.rmse, start.willmore);
    let opts = TrainOptions {
        optimizer: Some(pre.optimizer),
        ..TrainOptions::default()
    };
    let out = train(&cfg, pre.model, opts)?;
    let end = evaluate_with(&out.model, &cfg, cfg.seed)?;
    println!(
        "after {} epochs: W = {:.4} (4π = {:.4}), regularity {:?}",
        cfg.epochs,
        end.willmore,
        4.0 * std::f64::consts::PI,
        end.regularity
    );
    Ok(())
}
