//! Pretrain a small torus, save it with its optimizer state, load it back
//! and export a coloured point cloud.
//!
//! `cargo run --release --example checkpoint_export [dir]`

use std::path::PathBuf;

use willmore::config::TrainConfig;
use willmore::driver::{evaluate_with, export_surface, pretrain};
use willmore::net::{load_state, save_state};

fn main() -> willmore::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let mut cfg = TrainConfig::for_genus(1)?;
    cfg.set("layers", "32,32")?;
    cfg.set("pretrain.epochs", "40")?;
    let pre = pretrain(&cfg)?;
    println!("pretrained: rmse {:.3e}", pre.report.rmse);

    let ckpt = dir.join("torus.wfnn");
    save_state(&pre.model, &pre.optimizer, &ckpt)?;
    let (model, opt) = load_state(&ckpt)?;
    assert_eq!(model, pre.model);
    println!(
        "reloaded {} parameters, optimizer at step {}",
        model.param_count(),
        opt.map_or(0, |o| o.step)
    );
    println!("W = {:.4}", evaluate_with(&model, &cfg, 1)?.willmore);

    let ply = dir.join("torus.ply");
    let n = export_surface(&model, &cfg.sampler, 5000, 1, &ply)?;
    println!("{n} points -> {}", ply.display());
    Ok(())
}
