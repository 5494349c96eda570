//! Fundamental forms and curvatures of the closed-form surfaces, and Monte
//! Carlo Willmore estimates converging on the quadrature values.
//!
//! `cargo run --release --example curvature`

use std::f64::consts::PI;

use willmore::driver::evaluate;
use willmore::geometry::{fundamental_forms, quadrature_willmore, Immersion, ReferenceSurface};
use willmore::losses::LossWeights;
use willmore::net::Chart;
use willmore::sampling::SamplerConfig;

fn main() -> willmore::Result<()> {
    let surfaces = [
        ("unit sphere", ReferenceSurface::sphere()),
        ("ellipsoid (2, 1, 0.5)", ReferenceSurface::Ellipsoid { a: 2.0, b: 1.0, c: 0.5 }),
        ("Clifford torus", ReferenceSurface::torus_with_ratio(2f64.sqrt())),
    ];
    for (name, s) in &surfaces {
        let ff = fundamental_forms(&s.jet(Chart::Main, 0.4, 1.1)?)?;
        println!(
            "{name} at (0.4, 1.1): E {:.4} F {:.4} G {:.4}  H {:+.4}  K {:+.4}",
            ff.e, ff.f, ff.g, ff.h, ff.k
        );
    }

    let w = LossWeights::for_genus(0);
    let sampler = SamplerConfig::default();
    for (name, s) in &surfaces {
        let exact = quadrature_willmore(s, 256, 256)?;
        print!("{name}: quadrature {exact:.5}");
        for n in [1_000, 10_000, 100_000] {
            let e = evaluate(s, &sampler, &w, n, 7)?;
            print!("  MC{n} {:.4}", e.willmore);
        }
        println!();
    }
    println!("4π = {:.5}, 2π² = {:.5}", 4.0 * PI, 2.0 * PI * PI);
    Ok(())
}
