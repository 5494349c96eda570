//! Forward-mode 2-jets against finite differences, then a reverse-mode
//! tape through the same expression.
//!
//! `cargo run --example jet_derivatives`

use willmore::jet::{Jet2, Tape};

// f(u, v) = sin(u) * sqrt(1 + v^2) + u * v
fn f_jet(u: Jet2<f64>, v: Jet2<f64>) -> Jet2<f64> {
    let (su, _) = u.sin_cos();
    su * (v * v + 1.0).sqrt() + u * v
}

fn f(u: f64, v: f64) -> f64 {
    u.sin() * (1.0 + v * v).sqrt() + u * v
}

fn main() -> willmore::Result<()> {
    let (u0, v0, h) = (0.7, -1.3, 1e-4);
    let (u, v) = Jet2::seed(u0, v0)?;
    let jet = f_jet(u, v);
    let fd = [
        f(u0, v0),
        (f(u0 + h, v0) - f(u0 - h, v0)) / (2.0 * h),
        (f(u0, v0 + h) - f(u0, v0 - h)) / (2.0 * h),
        (f(u0 + h, v0) - 2.0 * f(u0, v0) + f(u0 - h, v0)) / (h * h),
        (f(u0 + h, v0 + h) - f(u0 + h, v0 - h) - f(u0 - h, v0 + h) + f(u0 - h, v0 - h)) / (4.0 * h * h),
        (f(u0, v0 + h) - 2.0 * f(u0, v0) + f(u0, v0 - h)) / (h * h),
    ];
    for (name, (j, d)) in ["f", "f_u", "f_v", "f_uu", "f_uv", "f_vv"].iter().zip(jet.slots().iter().zip(fd)) {
        println!("{name:5} jet {j:+.10}  fd {d:+.10}  diff {:.1e}", (j - d).abs());
    }

    // gradient of f_uv with respect to (a, b) in f(a u, b v), at a = b = 1
    let tape = Tape::new();
    let (a, b) = (tape.param(1.0), tape.param(1.0));
    let (ju, jv) = (Jet2::constant(a) * u.lift(a), Jet2::constant(b) * v.lift(b));
    let (su, _) = ju.sin_cos();
    let g = su * (jv * jv + 1.0).sqrt() + ju * jv;
    let grad = tape.gradient(g.duv)?;
    let duv = |a: f64, b: f64| {
        let (su, _) = (u * a).sin_cos();
        (su * (v * b * (v * b) + 1.0).sqrt() + u * a * (v * b)).duv
    };
    let e = 1e-6;
    println!(
        "d f_uv / da: tape {:+.8}  fd {:+.8}",
        grad[0],
        (duv(1.0 + e, 1.0) - duv(1.0 - e, 1.0)) / (2.0 * e)
    );
    println!(
        "d f_uv / db: tape {:+.8}  fd {:+.8}",
        grad[1],
        (duv(1.0, 1.0 + e) - duv(1.0, 1.0 - e)) / (2.0 * e)
    );
    Ok(())
}
