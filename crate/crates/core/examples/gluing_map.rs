//! The radial reflection that glues the two genus-2 charts: a point at
//! polar offset `(r, θ)` from the first disc centre is identified with
//! the point at `(2δ - r, θ)` from the second. Prints where a few points
//! land and the stretch factor along the circle.
//!
//! `cargo run --example gluing_map`

use std::f64::consts::PI;

use willmore::sampling::{glue_map, GluePair};

fn main() {
    let delta = 0.65;
    for (r, theta) in [(0.6, 0.0), (0.65, PI / 2.0), (0.7, PI), (0.62, 4.0)] {
        let (u, v) = glue_map(r, theta, delta);
        let p = GluePair::new(r, theta, delta);
        println!(
            "r {r:.2} θ {theta:.3} -> ({u:+.4}, {v:+.4})  reflected r {:.3}  tangential stretch {:.4}",
            p.r2(),
            (2.0 * delta - r) / r
        );
    }
    // applying the map twice comes back to the start
    let (u, v) = glue_map(0.6, 1.0, delta);
    let (x, y) = (u - PI, v);
    let back = glue_map((x * x + y * y).sqrt(), y.atan2(x), delta);
    println!("round trip: ({:.6}, {:.6}) vs ({:.6}, {:.6})", back.0 - PI, back.1, 0.6 * 1f64.cos(), 0.6 * 1f64.sin());
}
