use apoly::cplx::c;
use apoly::forms::{
    integrate_eta, integrate_xi, kirk_klassen, regulator, regulator_integral, regulator_with, IntegralResult, Role,
};
use apoly::knots::KnotDb;
use apoly::poly::{parse_poly, roots_in_l, LaurentBiPoly};
use apoly::tracker::{concat, lift_path, loop_around_m, snap_seed, PathSpec, Segment, StepControls, TrackedPath};
use num_complex::Complex64;
use proptest::prelude::*;

fn figure_eight() -> LaurentBiPoly {
    KnotDb::builtin().get("figure-eight").unwrap().polynomial().unwrap()
}

/// The four integrals tested for orientation and additivity, as complex
/// numbers with their error estimates.
fn integrals(p: &TrackedPath) -> [IntegralResult<Complex64>; 4] {
    let re = |r: IntegralResult<f64>| IntegralResult {
        value: Complex64::new(r.value, 0.0),
        est_error: r.est_error,
        n_samples: r.n_samples,
    };
    [
        re(integrate_eta(p)),
        re(integrate_xi(p)),
        regulator_integral(p, Role::LasF),
        kirk_klassen(p).exponent,
    ]
}

/// Rounding floor for sums of many terms of size `scale`.
fn floor(scale: f64) -> f64 {
    1e-12 * (1.0 + scale)
}

fn line_on_curve(a: &LaurentBiPoly, m0: Complex64, m1: Complex64, pick: usize) -> TrackedPath {
    let l0 = roots_in_l(a, m0).unwrap()[pick];
    lift_path(a, &PathSpec::new(vec![Segment::line(m0, m1)], l0, false), &StepControls::default()).unwrap()
}

fn wedge_point() -> impl Strategy<Value = Complex64> {
    (1.1f64..1.9, 0.15f64..0.75).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reversal_negates_all_integrals(m0 in wedge_point(), m1 in wedge_point(), pick in 0usize..2) {
        let a = figure_eight();
        let p = line_on_curve(&a, m0, m1, pick);
        let r = p.reversed();
        for (f, b) in integrals(&p).iter().zip(integrals(&r).iter()) {
            let sum = (f.value + b.value).norm();
            prop_assert!(sum <= 2.0 * (f.est_error + b.est_error) + floor(f.value.norm()), "{} vs {}", f.value, b.value);
        }
    }

    #[test]
    fn concatenation_adds_all_integrals(m0 in wedge_point(), m1 in wedge_point(), m2 in wedge_point(), pick in 0usize..2) {
        let a = figure_eight();
        let p = line_on_curve(&a, m0, m1, pick);
        let l1 = p.last().unwrap().l;
        let q = lift_path(&a, &PathSpec::new(vec![Segment::line(m1, m2)], l1, false), &StepControls::default()).unwrap();
        let pq = concat(&p, &q).unwrap();
        let (ip, iq, ipq) = (integrals(&p), integrals(&q), integrals(&pq));
        for k in 0..4 {
            let diff = (ipq[k].value - ip[k].value - iq[k].value).norm();
            let est = ip[k].est_error + iq[k].est_error + ipq[k].est_error;
            prop_assert!(diff <= 2.0 * est + floor(ipq[k].value.norm()), "integral {}: diff {:e}", k, diff);
        }
    }
}

#[test]
fn error_estimate_shrinks_with_density() {
    let a = figure_eight();
    let m0 = c(1.2, 0.3);
    let l0 = snap_seed(&a, m0, c(-0.8, 0.6)).unwrap();
    let spec = PathSpec::new(vec![Segment::line(m0, c(0.7, 1.2))], l0, false);
    let mut prev: Option<f64> = None;
    for step in [0.1, 0.05, 0.025] {
        let p = lift_path(&a, &spec, &StepControls::default().with_max_step(step)).unwrap();
        let est = integrate_eta(&p).est_error.max(integrate_xi(&p).est_error);
        if let Some(e) = prev {
            if e > 1e-12 {
                assert!(e / est >= 3.0, "error only dropped from {e:e} to {est:e}");
            }
        }
        prev = Some(est);
    }
}

#[test]
fn regulator_is_independent_of_base_point() {
    let a = figure_eight();
    let ctrl = StepControls::default().with_max_step(0.005);
    let mut values = Vec::new();
    for theta0 in [0.0, 1.0, 2.5, 4.0] {
        let m0 = Complex64::from_polar(0.4, theta0);
        let l0 = roots_in_l(&a, m0).unwrap().into_iter().min_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
        let spec = PathSpec::new(vec![Segment::arc(c(0.0, 0.0), 0.4, theta0, theta0 + std::f64::consts::TAU)], l0, true);
        let p = lift_path(&a, &spec, &ctrl).unwrap();
        values.push(regulator(&p, Role::LasF).unwrap().value);
    }
    for v in &values[1..] {
        assert!((v - values[0]).norm() < 1e-8, "{v} vs {}", values[0]);
    }

    let line = parse_poly("l + m - 2").unwrap();
    let mut values = Vec::new();
    for theta0 in [0.0, 2.0, 5.0] {
        let m0 = Complex64::from_polar(0.5, theta0);
        let spec = PathSpec::new(vec![Segment::arc(c(0.0, 0.0), 0.5, theta0, theta0 + std::f64::consts::TAU)], 2.0 - m0, true);
        let p = lift_path(&line, &spec, &StepControls::default()).unwrap();
        values.push(regulator(&p, Role::LasF).unwrap().value);
    }
    for v in &values {
        assert!((v - 2.0).norm() < 1e-8, "{v}");
    }
}

#[test]
fn regulator_is_bilinear_and_antisymmetric() {
    let line = parse_poly("l + m - 2").unwrap();
    let p = lift_path(&line, &loop_around_m(c(0.0, 0.0), 0.5, c(1.5, 0.0), 1), &StepControls::default()).unwrap();
    let f1 = |l: Complex64, _m: Complex64| l;
    let f2 = |l: Complex64, _m: Complex64| l - 3.0;
    let g = |_l: Complex64, m: Complex64| m;
    let r1 = regulator_with(&p, f1, g).unwrap().value;
    let r2 = regulator_with(&p, f2, g).unwrap().value;
    let r12 = regulator_with(&p, |l, m| f1(l, m) * f2(l, m), g).unwrap().value;
    assert!((r12 - r1 * r2).norm() <= 1e-8, "{r12} vs {}", r1 * r2);
    assert!((r1 - 2.0).norm() < 1e-8 && (r2 + 1.0).norm() < 1e-8);
    let back = regulator_with(&p, g, f1).unwrap().value;
    assert!((r1 * back - 1.0).norm() <= 1e-8);
}

#[test]
fn regulator_is_independent_of_loop_radius() {
    let a = figure_eight();
    let ctrl = StepControls::default().with_max_step(0.0025);
    let reg_at = |radius: f64| {
        let m0 = c(radius, 0.0);
        let l0 = roots_in_l(&a, m0).unwrap().into_iter().min_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
        let p = lift_path(&a, &loop_around_m(c(0.0, 0.0), radius, l0, 1), &ctrl).unwrap();
        regulator(&p, Role::LasF).unwrap().value
    };
    let (r, half) = (reg_at(0.5), reg_at(0.25));
    assert!((r - half).norm() <= 1e-7, "{r} vs {half}");

    let line = parse_poly("l + m - 1").unwrap();
    let reg_line = |radius: f64| {
        let p = lift_path(&line, &loop_around_m(c(1.0, 0.0), radius, c(-radius, 0.0), 1), &StepControls::default()).unwrap();
        regulator(&p, Role::LasF).unwrap().value
    };
    assert!((reg_line(0.4) - reg_line(0.2)).norm() <= 1e-7);
}

#[test]
fn eta_vanishes_and_xi_is_integral_on_figure_eight_loops() {
    let a = figure_eight();
    let ctrl = StepControls::default().with_max_step(0.005);
    for radius in [0.4, 0.8, 1.2] {
        let m0 = c(radius, 0.0);
        let l0 = roots_in_l(&a, m0).unwrap()[0];
        let p = lift_path(&a, &loop_around_m(c(0.0, 0.0), radius, l0, 1), &ctrl).unwrap();
        assert!(p.is_closed());
        assert!(integrate_eta(&p).value.abs() < 1e-8);
        let k = integrate_xi(&p).value / (4.0 * std::f64::consts::PI.powi(2));
        assert!((k - k.round()).abs() < 1e-8, "radius {radius}: {k}");
    }
}
