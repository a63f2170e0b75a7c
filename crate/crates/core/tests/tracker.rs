use std::f64::consts::TAU;

use apoly::cplx::{arg_0_2pi, c};
use apoly::error::TrackError;
use apoly::knots::KnotDb;
use apoly::poly::{parse_poly, LaurentBiPoly};
use apoly::tracker::{concat, lift_path, loop_around_m, snap_seed, PathSpec, Segment, StepControls, TrackedPath};
use num_complex::Complex64;
use proptest::prelude::*;

fn figure_eight() -> LaurentBiPoly {
    KnotDb::builtin().get("figure-eight").unwrap().polynomial().unwrap()
}

fn assert_residuals(a: &LaurentBiPoly, p: &TrackedPath, tol: f64) {
    for s in &p.samples {
        let scale = a.term_scale(s.l, s.m).unwrap();
        let r = a.eval(s.l, s.m).unwrap().norm();
        assert!(r <= tol * scale, "residual {r:e} at t = {}", s.t);
    }
}

fn assert_unwrap_consistent(p: &TrackedPath) {
    for s in &p.samples {
        assert!((s.logs.log_l().exp() - s.l).norm() <= 1e-9 * s.l.norm());
        assert!((s.logs.log_m().exp() - s.m).norm() <= 1e-9 * s.m.norm());
    }
    let last = p.last().unwrap();
    let d = (last.logs.arg_l.rem_euclid(TAU) - arg_0_2pi(last.l)).abs();
    assert!(d < 1e-9 || (TAU - d) < 1e-9, "final arg l disagrees with principal value");
}

/// Maximum change of `l` between the samples of `coarse` and the samples of
/// `fine` at the same parameter values.
fn max_shift(coarse: &TrackedPath, fine: &TrackedPath) -> f64 {
    let mut worst: f64 = 0.0;
    let mut j = 0;
    for s in &coarse.samples {
        while j < fine.samples.len() && fine.samples[j].t < s.t - 1e-12 {
            j += 1;
        }
        let f = &fine.samples[j];
        assert!((f.t - s.t).abs() < 1e-12, "fine grid lacks t = {}", s.t);
        worst = worst.max((f.l - s.l).norm());
    }
    worst
}

#[test]
fn figure_eight_line_from_near_geometric_point() {
    let a = figure_eight();
    let m0 = c(1.01, 0.0);
    let l0 = snap_seed(&a, m0, c(-1.0, 0.1)).unwrap();
    let spec = PathSpec::new(vec![Segment::line(m0, c(1.10, 0.0))], l0, false);
    let p = lift_path(&a, &spec, &StepControls::default()).unwrap();
    assert_residuals(&a, &p, 1e-12);
    assert_unwrap_consistent(&p);
    // Along the real segment the geometric branch stays on the unit circle.
    for s in &p.samples {
        assert!((s.l.norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn geometric_seed_is_normalized() {
    let knot = KnotDb::builtin().get("figure-eight").unwrap().clone();
    let a = knot.polynomial().unwrap();
    let g = knot.geom_seed;
    let spec = PathSpec::new(vec![Segment::line(g.m0, c(1.3, 0.2))], g.l_seed, false);
    let p = lift_path(&a, &spec, &StepControls::default()).unwrap();
    assert!(p.base_normalized);
    assert_eq!(p.first().unwrap().logs.arg_m, 0.0);
}

#[test]
fn refinement_stability() {
    let a = figure_eight();
    let m0 = c(1.2, 0.3);
    let l0 = snap_seed(&a, m0, c(-0.8, 0.6)).unwrap();
    let spec = PathSpec::new(
        vec![Segment::line(m0, c(1.4, 0.5)), Segment::line(c(1.4, 0.5), c(0.9, 0.9))],
        l0,
        false,
    );
    let ctrl = StepControls::default();
    let coarse = lift_path(&a, &spec, &ctrl).unwrap();
    let fine = lift_path(&a, &spec, &ctrl.with_max_step(ctrl.max_step / 2.0)).unwrap();
    assert!(max_shift(&coarse, &fine) < 1e-9);
}

#[test]
fn square_root_monodromy() {
    let a = parse_poly("l^2 - m").unwrap();
    let ctrl = StepControls::default();
    let one = lift_path(&a, &loop_around_m(c(0.0, 0.0), 0.5, c(0.5f64.sqrt(), 0.0), 1), &ctrl).unwrap();
    let mono = one.monodromy.unwrap();
    assert!(!mono.returned);
    assert!((mono.l_end + mono.l_start).norm() < 1e-9);
    let two = lift_path(&a, &loop_around_m(c(0.0, 0.0), 0.5, c(0.5f64.sqrt(), 0.0), 2), &ctrl).unwrap();
    assert!(two.monodromy.unwrap().returned);
    assert!((two.last().unwrap().logs.arg_l - two.first().unwrap().logs.arg_l - TAU).abs() < 1e-9);
}

#[test]
fn monodromy_twice_equals_two_turns() {
    let a = figure_eight();
    let ctrl = StepControls::default();
    // A circle enclosing only the branch point at the golden ratio.
    let center = c(1.618_033_988_749_895, 0.0);
    let start = center + 0.3;
    let l0 = snap_seed(&a, start, c(1.0, 0.8)).unwrap();
    let once = lift_path(&a, &loop_around_m(center, 0.3, l0, 1), &ctrl).unwrap();
    let l1 = once.last().unwrap().l;
    let again = lift_path(&a, &loop_around_m(center, 0.3, l1, 1), &ctrl).unwrap();
    let twice = lift_path(&a, &loop_around_m(center, 0.3, l0, 2), &ctrl).unwrap();
    assert!(!once.monodromy.unwrap().returned);
    assert!((again.last().unwrap().l - twice.last().unwrap().l).norm() < 1e-9);
    assert!(twice.monodromy.unwrap().returned);
}

#[test]
fn reversal_retraces_samples() {
    let a = figure_eight();
    let m0 = c(1.3, -0.4);
    let l0 = snap_seed(&a, m0, c(0.0, 1.0)).unwrap();
    let spec = PathSpec::new(vec![Segment::line(m0, c(2.0, 0.4))], l0, false);
    let p = lift_path(&a, &spec, &StepControls::default()).unwrap();
    let r = p.reversed();
    assert_eq!(r.len(), p.len());
    assert_eq!(r.first().unwrap().l, p.last().unwrap().l);
    assert_eq!(r.last().unwrap().t, 1.0);
}

#[test]
fn concat_checks_endpoints() {
    let a = figure_eight();
    let ctrl = StepControls::default();
    let m0 = c(1.3, -0.4);
    let l0 = snap_seed(&a, m0, c(0.0, 1.0)).unwrap();
    let first = lift_path(&a, &PathSpec::new(vec![Segment::line(m0, c(2.0, 0.4))], l0, false), &ctrl).unwrap();
    let l1 = first.last().unwrap().l;
    let second = lift_path(&a, &PathSpec::new(vec![Segment::line(c(2.0, 0.4), c(1.5, 1.0))], l1, false), &ctrl).unwrap();
    let joined = concat(&first, &second).unwrap();
    assert_eq!(joined.len(), first.len() + second.len() - 1);
    assert_unwrap_consistent(&joined);
    let gap = lift_path(&a, &PathSpec::new(vec![Segment::line(c(2.1, 0.4), c(1.5, 1.0))], snap_seed(&a, c(2.1, 0.4), l1).unwrap(), false), &ctrl).unwrap();
    assert!(matches!(concat(&first, &gap), Err(TrackError::Mismatch(_))));
}

#[test]
fn seed_far_from_curve_is_rejected() {
    let a = figure_eight();
    let spec = PathSpec::new(vec![Segment::line(c(1.5, 0.0), c(1.6, 0.0))], c(3.0, 0.0), false);
    assert!(matches!(lift_path(&a, &spec, &StepControls::default()), Err(TrackError::Seed(_))));
}

#[test]
fn path_through_branch_point_is_reported() {
    let a = figure_eight();
    let phi = 1.618_033_988_749_895;
    let m0 = c(1.3, 0.0);
    let l0 = snap_seed(&a, m0, c(-0.5, 0.8)).unwrap();
    let spec = PathSpec::new(vec![Segment::line(m0, c(phi, 0.0)), Segment::line(c(phi, 0.0), c(2.0, 0.0))], l0, false);
    match lift_path(&a, &spec, &StepControls::default()) {
        Err(TrackError::Ramification { m, .. }) => assert!((m - phi).norm() < 1e-3, "{m}"),
        other => panic!("expected ramification, got {:?}", other.map(|p| p.len())),
    }
}

fn random_line() -> impl Strategy<Value = (Complex64, Complex64, bool)> {
    (0.2f64..0.9, 0.0f64..1.2, 0.2f64..0.9, 0.0f64..1.2, any::<bool>()).prop_map(|(r0, a0, r1, a1, pick)| {
        // Wedge 0 < arg m < 1.2 at radius in (1.1, 1.8): clear of the real
        // and imaginary axes, away from the branch points.
        (
            Complex64::from_polar(1.1 + r0, 0.15 + a0 * 0.5),
            Complex64::from_polar(1.1 + r1, 0.15 + a1 * 0.5),
            pick,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_lines_satisfy_tracker_invariants((m0, m1, pick) in random_line()) {
        let a = figure_eight();
        let roots = apoly::poly::roots_in_l(&a, m0).unwrap();
        let l0 = roots[usize::from(pick)];
        let spec = PathSpec::new(vec![Segment::line(m0, m1)], l0, false);
        let ctrl = StepControls::default();
        let p = lift_path(&a, &spec, &ctrl).unwrap();
        assert_residuals(&a, &p, 1e-12);
        assert_unwrap_consistent(&p);
        let fine = lift_path(&a, &spec, &ctrl.with_max_step(ctrl.max_step / 2.0)).unwrap();
        prop_assert!(max_shift(&p, &fine) < 1e-9);
    }
}
