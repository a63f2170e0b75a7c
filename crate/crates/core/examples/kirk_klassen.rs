//! The two Kirk-Klassen expressions agree along tracked paths.

use apoly::cplx::c;
use apoly::forms::kirk_klassen;
use apoly::knots::KnotDb;
use apoly::tracker::{lift_path, PathSpec, Segment, StepControls};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let knot = KnotDb::builtin().get("figure-eight")?.clone();
    let a = knot.polynomial()?;
    let g = knot.geom_seed;
    let ends = [c(1.5, 0.0), c(1.3, 0.4), c(2.0, -0.5), c(1.1, 0.05)];
    for end in ends {
        let spec = PathSpec::new(vec![Segment::line(g.m0, end)], g.l_seed, false);
        let path = lift_path(&a, &spec, &StepControls::default())?;
        let kk = kirk_klassen(&path);
        println!(
            "m: 1 -> {end:.2}  exp(2 pi i int(a db - b da)) = {:.12}  alternate = {:.12}  |diff| = {:.1e}",
            kk.value, kk.alternate, kk.abs_diff
        );
    }
    Ok(())
}
