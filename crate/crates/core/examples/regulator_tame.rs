//! The regulator r(l, m) around punctures agrees with the tame symbol, and
//! r(f, 1 - f) = 1 on the line l + m = 1.

use apoly::cplx::c;
use apoly::config::demo_config;
use apoly::forms::{regulator, Role};
use apoly::knots::KnotDb;
use apoly::poly::parse_poly;
use apoly::symbols::{analyze_puncture, Puncture};
use apoly::tracker::{lift_path, loop_around_m, StepControls};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctrl = StepControls::default();
    let point = |id: &str, center, radius, l_seed| Puncture {
        id: id.into(),
        center,
        radius,
        l_seed,
        turns: 1,
        at_infinity: false,
    };
    let mut cases = vec![
        ("l + m - 1", point("l=0", c(1.0, 0.0), 0.2, c(-0.2, 0.0))),
        ("l + m - 1", point("m=0", c(0.0, 0.0), 0.2, c(0.8, 0.0))),
        ("l + m - 2", point("m=0", c(0.0, 0.0), 0.3, c(1.7, 0.0))),
        ("l + m - 2", point("l=0", c(2.0, 0.0), 0.3, c(-0.3, 0.0))),
    ];
    let fig8 = KnotDb::builtin().get("figure-eight")?.a_poly.clone();
    for p in demo_config().punctures {
        cases.push((Box::leak(fig8.clone().into_boxed_str()), p));
    }

    println!("{:<28} {:<14} {:>4} {:>4} {:>30} {:>10}", "curve", "point", "v_l", "v_m", "tame symbol", "|r - T|");
    for (curve, p) in &cases {
        let a = parse_poly(curve)?;
        let r = analyze_puncture(&a, p, &ctrl, 1e-12)?;
        let label: String = curve.chars().take(26).collect();
        println!(
            "{label:<28} {:<14} {:>4} {:>4} {:>30.12} {:>10.1e}",
            r.id, r.v_l.v, r.v_m.v, r.tame, r.match_abs_err
        );
    }

    let line = parse_poly("l + m - 1")?;
    for (center, seed) in [(c(1.0, 0.0), c(-0.25, 0.0)), (c(0.0, 0.0), c(0.75, 0.0))] {
        let path = lift_path(&line, &loop_around_m(center, 0.25, seed, 1), &ctrl)?;
        let r = regulator(&path, Role::LasF)?;
        println!("Steinberg r(l, 1 - l) around m = {center}: {:.15}", r.value);
    }
    Ok(())
}
