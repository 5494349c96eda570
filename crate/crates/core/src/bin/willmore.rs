//! Command-line front end: pretrain, train, evaluate, export and print the
//! quadrature oracle table.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;
use willmore::config::TrainConfig;
use willmore::driver::{evaluate, export_surface, pretrain, train, TrainOptions};
use willmore::geometry::{default_oracle_surfaces, OracleRow};
use willmore::net::{load_state, save_state};
use willmore::{Error, Result};

#[derive(Parser)]
#[command(name = "willmore", version, about = "Neural Willmore flow for genus 0, 1 and 2 surfaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Surface genus; overrides the config file.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(0..=2))]
    genus: Option<u8>,
    /// key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Checkpoint to start from.
    #[arg(long, global = true)]
    ckpt: Option<PathBuf>,
    /// Output file, or run directory for `train`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Evaluation or export point count, or oracle grid size.
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit the network to the closed-form reference surface.
    Pretrain,
    /// Run the Willmore flow; pretrains first when no --ckpt is given.
    Train,
    /// Fresh-sample Monte Carlo diagnostics of a checkpoint.
    Eval,
    /// Write a coloured PLY point cloud of a checkpoint.
    Export,
    /// Quadrature values for the closed-form surfaces, as CSV.
    Oracle,
}

impl Cli {
    fn config(&self) -> Result<TrainConfig> {
        self.config_or(0)
    }

    /// `fallback` is the genus used when neither --genus nor --config say.
    fn config_or(&self, fallback: u8) -> Result<TrainConfig> {
        let genus = self.genus.or(self.config.is_none().then_some(fallback));
        let mut cfg = match &self.config {
            Some(p) => TrainConfig::load(p, genus)?,
            None => TrainConfig::for_genus(genus.unwrap_or(fallback))?,
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }

    fn ckpt(&self) -> Result<&Path> {
        self.ckpt
            .as_deref()
            .ok_or_else(|| Error::Config("--ckpt is required".into()))
    }

    fn out_or(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| default.into())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Stdout unless `--out` names a file.
fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: &Cli) -> Result<()> {
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |e| Error::io(p, e)
    };
    match cli.cmd {
        Cmd::Pretrain => {
            let cfg = cli.config()?;
            let out = cli.out_or(&format!("pretrained_g{}.wfnn", cfg.genus));
            let pre = pretrain(&cfg)?;
            save_state(&pre.model, &pre.optimizer, &out)?;
            println!(
                "pretrained genus {} for {} epochs: loss {:.4e}, rmse {:.4e} -> {}",
                cfg.genus,
                pre.report.epochs,
                pre.report.final_loss,
                pre.report.rmse,
                out.display()
            );
        }
        Cmd::Train => {
            let cfg = cli.config()?;
            let dir = cli.out_or(&format!("run_g{}", cfg.genus));
            std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            let (model, optimizer) = match &cli.ckpt {
                Some(p) => load_state(p)?,
                None => {
                    let pre = pretrain(&cfg)?;
                    (pre.model, Some(pre.optimizer))
                }
            };
            let cfg_path = dir.join("config.txt");
            std::fs::write(&cfg_path, cfg.to_string()).map_err(io_err(&cfg_path))?;
            let log_path = dir.join("log.csv");
            let mut log = create(&log_path)?;
            let outcome = train(
                &cfg,
                model,
                TrainOptions {
                    out_dir: Some(dir.clone()),
                    csv: Some(&mut log),
                    optimizer,
                },
            )?;
            log.flush().map_err(io_err(&log_path))?;
            let final_path = dir.join("final.wfnn");
            save_state(&outcome.model, &outcome.optimizer, &final_path)?;
            info!("{} rollbacks", outcome.rollbacks);
            println!(
                "trained {} epochs, final eval W {:.4} -> {}",
                cfg.epochs,
                outcome.final_eval().unwrap_or(f64::NAN),
                final_path.display()
            );
        }
        Cmd::Eval => {
            let (model, _) = load_state(cli.ckpt()?)?;
            let cfg = cli.config_or(model.genus())?;
            let n = cli.samples.unwrap_or(cfg.eval_samples);
            let e = evaluate(&model, &cfg.sampler, &cfg.weights, n, cfg.seed)?;
            let mut w = sink(cli.out.as_deref())?;
            let mut put = |k: &str, v: String| writeln!(w, "{k}={v}");
            (|| -> io::Result<()> {
                put("genus", model.genus().to_string())?;
                put("samples", n.to_string())?;
                put("willmore", e.willmore.to_string())?;
                for (k, x) in e.per_chart.iter().enumerate() {
                    put(&format!("willmore.chart{k}"), x.to_string())?;
                }
                put("integral_k", e.integral_k.to_string())?;
                put("conformal_willmore", e.conformal_willmore.to_string())?;
                put("reg.area", e.regularity.area.to_string())?;
                put("reg.pos", e.regularity.pos.to_string())?;
                put("reg.smooth", e.regularity.smooth.to_string())?;
                put("reg.log", e.regularity.log.to_string())?;
                if let Some(g) = e.glue {
                    put("glue.c0", g.c0.to_string())?;
                    put("glue.c1", g.c1.to_string())?;
                    put("glue.c2", g.c2.to_string())?;
                }
                if let Some(gap) = e.mean_glue_gap {
                    put("glue.mean_gap", gap.to_string())?;
                }
                put("degenerate", e.degenerate.to_string())
            })()
            .map_err(|e| Error::io("<eval output>", e))?;
        }
        Cmd::Export => {
            let (model, _) = load_state(cli.ckpt()?)?;
            let cfg = cli.config_or(model.genus())?;
            let out = cli.out_or("surface.ply");
            let n = cli.samples.unwrap_or(5000);
            export_surface(&model, &cfg.sampler, n, cfg.seed, &out)?;
            println!("{n} points -> {}", out.display());
        }
        Cmd::Oracle => {
            let n = cli.samples.unwrap_or(256);
            let mut w = sink(cli.out.as_deref())?;
            let mut lines = vec![OracleRow::CSV_HEADER.to_string()];
            for s in default_oracle_surfaces() {
                lines.push(OracleRow::compute(s, n)?.to_string());
            }
            writeln!(w, "{}", lines.join("\n")).map_err(|e| Error::io("<oracle output>", e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
