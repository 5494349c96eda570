//! Genus 1: pretrain on a thin torus and flow toward the Clifford torus.
//!
//! `cargo run --release --example torus_flow [tau] [epochs]`, e.g. `0.1+0.1i`.

use std::f64::consts::PI;

use willmore::config::TrainConfig;
use willmore::driver::{evaluate_with, pretrain, train, TrainOptions};

fn main() -> willmore::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut cfg = TrainConfig::for_genus(1)?;
    let mut args = std::env::args().skip(1);
    if let Some(tau) = args.next() {
        cfg.set("tau", &tau)?;
    }
    if let Some(e) = args.next() {
        cfg.set("train.epochs", &e)?;
    }
    println!("reference: {}", cfg.reference());
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
        "after {} epochs: W = {:.4} (2π² = {:.4}), ∫K dA = {:.4}",
        cfg.epochs,
        end.willmore,
        2.0 * PI * PI,
        end.integral_k
    );
    Ok(())
}
