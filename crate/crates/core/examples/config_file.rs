//! Configuration files are `key = value` lines. Parse one, override a
//! couple of keys, and print the fully resolved result.
//!
//! `cargo run --example config_file [path]`

use willmore::config::TrainConfig;

const TEXT: &str = "
# a twisted torus with a shorter run
genus = 1
tau = 0.1+0.1i
train.epochs = 50
lr.max = 1e-4
";

fn main() -> willmore::Result<()> {
    let mut cfg = match std::env::args().nth(1) {
        Some(p) => TrainConfig::load(p, None)?,
        None => TrainConfig::from_text(TEXT, None)?,
    };
    cfg.set("seed", "7")?;
    cfg.validate()?;
    println!("{cfg}");
    println!("learning rate at epoch 25: {:.3e}", willmore::optim::lr_at(&cfg.lr_schedule(), 25.0));
    Ok(())
}
