//! End-to-end checks on small runs: files on disk, export format,
//! determinism and pretraining quality.

use std::f64::consts::PI;

use willmore::config::TrainConfig;
use willmore::driver::{evaluate_with, export_surface, pretrain, sample_cloud, train, EpochLog, TrainOptions};
use willmore::net::{load_checkpoint, load_state, save_checkpoint, save_state, Chart};

fn tiny(genus: u8) -> TrainConfig {
    let mut c = TrainConfig::for_genus(genus).unwrap();
    for (k, v) in [
        ("layers", "8,8"),
        ("train.epochs", "4"),
        ("train.points", "200"),
        ("train.batch", "100"),
        ("pretrain.epochs", "3"),
        ("pretrain.points", "200"),
        ("pretrain.batch", "100"),
        ("eval.samples", "300"),
        ("eval.every", "2"),
    ] {
        c.set(k, v).unwrap();
    }
    if genus == 2 {
        c.set("anneal.scale", "0.02").unwrap();
    }
    c
}

fn run(cfg: &TrainConfig) -> (String, Vec<u8>) {
    let pre = pretrain(cfg).unwrap();
    let mut csv = Vec::new();
    let out = train(
        cfg,
        pre.model,
        TrainOptions {
            csv: Some(&mut csv),
            optimizer: Some(pre.optimizer),
            ..TrainOptions::default()
        },
    )
    .unwrap();
    let bytes = willmore::net::encode_state(&out.model, Some(&out.optimizer));
    (String::from_utf8(csv).unwrap(), bytes)
}

#[test]
fn training_is_deterministic_per_seed() {
    for genus in 0..=2 {
        let cfg = tiny(genus);
        let (log_a, ckpt_a) = run(&cfg);
        let (log_b, ckpt_b) = run(&cfg);
        assert_eq!(log_a, log_b, "genus {genus}");
        assert_eq!(ckpt_a, ckpt_b, "genus {genus}");
        let mut lines = log_a.lines();
        assert_eq!(lines.next(), Some(EpochLog::CSV_HEADER));
        assert_eq!(lines.count(), cfg.epochs);

        let mut other = cfg.clone();
        other.seed += 1;
        assert_ne!(run(&other).1, ckpt_a);
    }
}

#[test]
fn state_files_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(2);
    let pre = pretrain(&cfg).unwrap();
    let p = dir.path().join("a.wfnn");
    save_state(&pre.model, &pre.optimizer, &p).unwrap();
    let (m, o) = load_state(&p).unwrap();
    assert_eq!(m, pre.model);
    assert_eq!(o.as_ref(), Some(&pre.optimizer));
    // a bare checkpoint loads as a state with no optimizer
    let q = dir.path().join("b.wfnn");
    save_checkpoint(&pre.model, &q).unwrap();
    assert_eq!(load_state(&q).unwrap(), (pre.model.clone(), None));
    assert_eq!(load_checkpoint(&p).unwrap(), pre.model);
    let ea = evaluate_with(&m, &cfg, 3).unwrap();
    let eb = evaluate_with(&pre.model, &cfg, 3).unwrap();
    assert_eq!(ea, eb);

    let mut bytes = std::fs::read(&p).unwrap();
    bytes.truncate(bytes.len() - 3);
    std::fs::write(&p, &bytes).unwrap();
    assert!(load_state(&p).is_err());
}

#[test]
fn ply_export_has_one_record_per_point() {
    let dir = tempfile::tempdir().unwrap();
    for genus in 0..=2 {
        let cfg = tiny(genus);
        let pre = pretrain(&cfg).unwrap();
        let path = dir.path().join(format!("g{genus}.ply"));
        let n = export_surface(&pre.model, &cfg.sampler, 500, 1, &path).unwrap();
        assert_eq!(n, 500);
        let text = std::fs::read_to_string(&path).unwrap();
        let (header, body) = text.split_once("end_header\n").unwrap();
        assert!(header.starts_with("ply\nformat ascii 1.0\nelement vertex 500\n"));
        assert_eq!(header.lines().filter(|l| l.starts_with("property")).count(), 9);
        let rows: Vec<Vec<f64>> = body
            .lines()
            .map(|l| l.split(' ').map(|t| t.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 500);
        for r in &rows {
            assert_eq!(r.len(), 9);
            assert!(r[..3].iter().all(|x| x.is_finite()));
            assert!(r[3..6].iter().all(|&c| (0.0..=255.0).contains(&c)));
        }
        let tags: std::collections::BTreeSet<u8> = rows.iter().map(|r| r[8] as u8).collect();
        let want: std::collections::BTreeSet<u8> = Chart::for_genus(genus).iter().map(|c| c.tag()).collect();
        assert_eq!(tags, want);
    }
}

#[test]
fn export_cloud_matches_the_model() {
    let cfg = tiny(0);
    let pre = pretrain(&cfg).unwrap();
    let cloud = sample_cloud(&pre.model, &cfg.sampler, 50, 9).unwrap();
    for p in &cloud {
        let q = pre.model.forward_jet(p.chart, p.u, p.v).unwrap().point();
        for (a, b) in p.xyz.iter().zip(q) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn pretraining_recovers_the_unit_sphere() {
    let mut cfg = TrainConfig::for_genus(0).unwrap();
    for (k, v) in [("ref.a", "1"), ("ref.b", "1"), ("ref.c", "1")] {
        cfg.set(k, v).unwrap();
    }
    let pre = pretrain(&cfg).unwrap();
    let w = evaluate_with(&pre.model, &cfg, 11).unwrap().willmore;
    assert!((w - 4.0 * PI).abs() < 0.05 * 4.0 * PI, "W = {w}");
}

#[test]
fn pretrained_genus2_tori_sit_apart() {
    let mut cfg = TrainConfig::for_genus(2).unwrap();
    cfg.set("layers", "32,32").unwrap();
    cfg.set("pretrain.epochs", "100").unwrap();
    let pre = pretrain(&cfg).unwrap();
    let cloud = sample_cloud(&pre.model, &cfg.sampler, 4000, 2).unwrap();
    let max_t1 = cloud.iter().filter(|p| p.chart == Chart::T1).map(|p| p.xyz[0]).fold(f64::MIN, f64::max);
    let min_t2 = cloud.iter().filter(|p| p.chart == Chart::T2).map(|p| p.xyz[0]).fold(f64::MAX, f64::min);
    assert!(max_t1 < min_t2, "T1 reaches x = {max_t1}, T2 starts at x = {min_t2}");
}
