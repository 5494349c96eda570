//! AdamW with gradient clipping and a cosine learning rate, driven by
//! reverse-mode gradients from the tape, on the Rosenbrock function.
//!
//! `cargo run --release --example adam_tape`

use willmore::jet::Tape;
use willmore::optim::{clip_gradient, lr_at, AdamW, LrSchedule};

fn main() -> willmore::Result<()> {
    let mut p = vec![-1.5, 2.0];
    let mut opt = AdamW::new(2, 0.0);
    let steps = 3000;
    let sched = LrSchedule::Cosine {
        max: 0.05,
        min: 1e-4,
        epochs: steps as f64,
    };
    for step in 0..steps {
        let tape = Tape::new();
        let (x, y) = (tape.param(p[0]), tape.param(p[1]));
        let a = tape.constant(1.0) - x;
        let b = y - x * x;
        let loss = a * a + b * b * 100.0;
        let mut g = tape.gradient(loss)?.to_vec();
        clip_gradient(&mut g, 10.0)?;
        opt.step(&mut p, &g, lr_at(&sched, step as f64));
        if step % 500 == 0 {
            println!("step {step:4}  f {:.6e}  at ({:.4}, {:.4})", loss.value(), p[0], p[1]);
        }
    }
    println!("minimum near ({:.4}, {:.4}), expected (1, 1)", p[0], p[1]);
    Ok(())
}
