//! Lift routes in the m-plane to the curve and read off monodromy.

use apoly::cplx::c;
use apoly::knots::KnotDb;
use apoly::poly::parse_poly;
use apoly::tracker::{lift_path, loop_around_m, PathSpec, Segment, StepControls};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctrl = StepControls::default();

    // The square root: one turn around the branch point swaps the sheets.
    let sqrt = parse_poly("l^2 - m")?;
    for turns in [1, 2] {
        let p = lift_path(&sqrt, &loop_around_m(c(0.0, 0.0), 1.0, c(1.0, 0.0), turns), &ctrl)?;
        let mono = p.monodromy.expect("closed spec");
        println!(
            "l^2 = m, {turns} turn(s): l {:.6} -> {:.6}, returned = {}, arg l advanced by {:.6}",
            mono.l_start,
            mono.l_end,
            mono.returned,
            p.last().unwrap().logs.arg_l - p.first().unwrap().logs.arg_l
        );
    }

    // The geometric branch of the figure-eight curve, from just off the
    // complete structure out to m = 1.5.
    let knot = KnotDb::builtin().get("figure-eight")?.clone();
    let a = knot.polynomial()?;
    let g = knot.geom_seed;
    let spec = PathSpec::new(vec![Segment::line(g.m0, c(1.5, 0.0))], g.l_seed, false);
    let p = lift_path(&a, &spec, &ctrl)?;
    println!(
        "figure-eight: {} samples, max residual {:.1e}, base normalized = {}",
        p.len(),
        p.residual_max,
        p.base_normalized
    );
    for s in p.samples.iter().step_by(p.len() / 5) {
        println!("  t = {:.3}  m = {:.4}  l = {:.9}", s.t, s.m, s.l);
    }
    Ok(())
}
