//! Kashaev invariants of the figure-eight knot and their exponential growth
//! rate compared with the hyperbolic volume.

use std::f64::consts::TAU;

use apoly::jones::{growth_rate, kashaev_sequence};
use apoly::lobachevsky::figure_eight_volume;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ns = [500, 1000, 2000, 4000];
    let seq = kashaev_sequence(&ns)?;
    for p in &seq {
        println!("N = {:>5}  log <4_1>_N = {:>20.12}  ({:.2} ms)", p.n, p.value.log_abs, p.runtime_ms);
    }
    let fit = growth_rate(&seq, 1.0)?;
    let vol = figure_eight_volume();
    println!("fit: log|J| ~ {:.12} N + {:.6} log N + {:.6}", fit.slope, fit.log_correction, fit.intercept);
    println!("2 pi slope   = {:.12}", TAU * fit.slope);
    println!("6 L(pi/3)    = {vol:.12}");
    println!("difference   = {:.2e}", (TAU * fit.slope - vol).abs());
    Ok(())
}
