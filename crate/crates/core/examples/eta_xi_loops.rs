//! Periods of eta and xi around closed loops on the figure-eight curve, with
//! xi / (4 pi^2) recognized as a rational number.

use std::f64::consts::TAU;

use apoly::config::demo_config;
use apoly::forms::{eta_xi_error, integrate_eta, integrate_xi, lift_refined};
use apoly::knots::KnotDb;
use apoly::symbols::recognize_rational;
use apoly::tracker::StepControls;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = KnotDb::builtin().get("figure-eight")?.polynomial()?;
    let cfg = demo_config();
    println!("{:<10} {:>9} {:>12} {:>12} {:>22} {:>6}", "loop", "samples", "eta", "eta err", "xi/(4 pi^2)", "p/q");
    for (name, spec) in &cfg.loops {
        let refined = lift_refined(&a, spec, &StepControls::default(), 1e-9, 8, eta_xi_error)?;
        let eta = integrate_eta(&refined.path);
        let ratio = integrate_xi(&refined.path).value / (TAU * TAU);
        let rec = recognize_rational(ratio, 48, 1e-5)?;
        println!(
            "{name:<10} {:>9} {:>12.3e} {:>12.3e} {ratio:>22.15} {:>4}/{}",
            refined.path.len(),
            eta.value,
            eta.est_error,
            rec.p,
            rec.q
        );
    }
    Ok(())
}
