//! The two input encodings: real spherical harmonics on the sphere
//! chart and Fourier modes on the torus charts. Prints a Monte Carlo Gram
//! matrix of the harmonics, which should be close to the identity.
//!
//! `cargo run --release --example features [degree]`

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use willmore::features::FeatureMap;

fn main() -> willmore::Result<()> {
    let degree = std::env::args().nth(1).map_or(3, |s| s.parse().expect("degree"));
    let sh = FeatureMap::sphere(degree)?;
    let n = sh.len();
    println!("degree {degree}: {n} harmonics");

    // ∫ Y_i Y_j dΩ by uniform sampling on the sphere
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let samples = 200_000;
    let mut gram = vec![0.0; n * n];
    for _ in 0..samples {
        let u = rng.random_range(0.0..TAU);
        let v = (1.0 - 2.0 * rng.random::<f64>()).acos();
        let y: Vec<f64> = sh.at(u, v)?.iter().map(|j| j.f).collect();
        for i in 0..n {
            for k in 0..n {
                gram[i * n + k] += y[i] * y[k];
            }
        }
    }
    let scale = 4.0 * PI / samples as f64;
    let mut off: f64 = 0.0;
    let mut diag: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let g = gram[i * n + k] * scale;
            if i == k {
                diag = diag.max((g - 1.0).abs());
            } else {
                off = off.max(g.abs());
            }
        }
    }
    println!("Gram matrix: max |diag - 1| {diag:.3}, max |off-diagonal| {off:.3}");

    let fourier = FeatureMap::fourier(4)?;
    let a = fourier.at(1.0, 2.0)?;
    let b = fourier.at(1.0 + TAU, 2.0 - TAU)?;
    let gap = a.iter().zip(&b).map(|(x, y)| (x.f - y.f).abs()).fold(0.0, f64::max);
    println!("{} Fourier features, periodic to {gap:.1e}", fourier.len());
    Ok(())
}
