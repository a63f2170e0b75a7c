use apoly::cplx::c;
use apoly::error::SymbolError;
use apoly::forms::Role;
use apoly::poly::parse_poly;
use apoly::symbols::{
    analyze_puncture, estimate_symbol_order, recognize_rational, valuation, valuation_with, Puncture,
    RationalRecognition,
};
use apoly::tracker::{lift_path, loop_around_m, StepControls};
use proptest::prelude::*;

proptest! {
    #[test]
    fn exact_fractions_are_recovered(p in -500i64..500, q in 1i64..=48) {
        let r = recognize_rational(p as f64 / q as f64, 48, 1e-5).unwrap();
        let g = num_integer::gcd(p, q);
        prop_assert_eq!((r.p, r.q), (p / g, q / g));
        prop_assert!(r.residual < 1e-12);
    }

    #[test]
    fn small_perturbations_do_not_change_the_fraction(p in -50i64..50, q in 1i64..=48, eps in -1e-7f64..1e-7) {
        let r = recognize_rational(p as f64 / q as f64 + eps, 48, 1e-5).unwrap();
        let g = num_integer::gcd(p, q);
        prop_assert_eq!((r.p, r.q), (p / g, q / g));
    }
}

#[test]
fn order_estimates() {
    let stable = |p, q| RationalRecognition::new(p, q, true);
    assert_eq!(estimate_symbol_order(&[stable(1, 2)]).unwrap(), 2);
    assert_eq!(estimate_symbol_order(&[stable(1, 4), stable(5, 6)]).unwrap(), 12);
    assert_eq!(estimate_symbol_order(&[stable(-2, 1), stable(0, 1)]).unwrap(), 1);
    assert_eq!(estimate_symbol_order(&[]), Err(SymbolError::Empty));
}

#[test]
fn valuation_is_additive() {
    // On l + m = 2, f1 = l vanishes at m = 2 and f2 = l - 1 at m = 1.
    let a = parse_poly("l + m - 2").unwrap();
    let ctrl = StepControls::default();
    for (center, radius) in [(c(2.0, 0.0), 0.3), (c(1.0, 0.0), 0.3), (c(1.5, 0.0), 0.8)] {
        let m0 = center + radius;
        let p = lift_path(&a, &loop_around_m(center, radius, 2.0 - m0, 1), &ctrl).unwrap();
        let v1 = valuation_with(&p, |l, _| l).unwrap().v;
        let v2 = valuation_with(&p, |l, _| l - 1.0).unwrap().v;
        let v12 = valuation_with(&p, |l, _| l * (l - 1.0)).unwrap().v;
        assert_eq!(v12, v1 + v2, "center {center}");
    }
}

#[test]
fn valuation_survives_halving_the_radius() {
    let a = parse_poly("l^2*m^4 - l*m^8 + l*m^6 + 2*l*m^4 + l*m^2 - l + m^4").unwrap();
    let ctrl = StepControls::default();
    for radius in [0.4, 0.2] {
        let roots = apoly::poly::roots_in_l(&a, c(radius, 0.0)).unwrap();
        let small = roots.into_iter().min_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
        let p = lift_path(&a, &loop_around_m(c(0.0, 0.0), radius, small, 1), &ctrl).unwrap();
        assert_eq!(valuation(&p, Role::LasF).unwrap().v, 4);
        assert_eq!(valuation(&p, Role::MasF).unwrap().v, 1);
    }
}

#[test]
fn tame_symbols_on_lines() {
    let ctrl = StepControls::default();
    let cases = [
        ("l + m - 1", c(1.0, 0.0), 0.25, c(-0.25, 0.0), (1, 0), c(1.0, 0.0)),
        ("l + m - 1", c(0.0, 0.0), 0.25, c(0.75, 0.0), (0, 1), c(1.0, 0.0)),
        ("l + m - 2", c(0.0, 0.0), 0.25, c(1.75, 0.0), (0, 1), c(2.0, 0.0)),
        ("l + m - 2", c(2.0, 0.0), 0.25, c(-0.25, 0.0), (1, 0), c(0.5, 0.0)),
    ];
    for (curve, center, radius, l_seed, (vl, vm), expected) in cases {
        let p = Puncture {
            id: format!("{curve} @ {center}"),
            center,
            radius,
            l_seed,
            turns: 1,
            at_infinity: false,
        };
        let r = analyze_puncture(&parse_poly(curve).unwrap(), &p, &ctrl, 1e-12).unwrap();
        assert_eq!((r.v_l.v, r.v_m.v), (vl, vm), "{}", p.id);
        assert!((r.tame - expected).norm() < 1e-9, "{}: {}", p.id, r.tame);
        assert!(r.match_abs_err < 1e-6);
    }
}

#[test]
fn point_at_infinity_on_a_line() {
    // On l + m = 2 both l and m have a simple pole at infinity, so T = -m/l -> 1.
    let p = Puncture {
        id: "inf".into(),
        center: c(0.0, 0.0),
        radius: 4.0,
        l_seed: c(-2.0, 0.0),
        turns: -1,
        at_infinity: true,
    };
    let r = analyze_puncture(&parse_poly("l + m - 2").unwrap(), &p, &StepControls::default(), 1e-12).unwrap();
    assert_eq!((r.v_l.v, r.v_m.v), (-1, -1));
    assert!((r.tame - 1.0).norm() < 1e-9, "{}", r.tame);
    assert!(r.match_abs_err < 1e-6);
}
