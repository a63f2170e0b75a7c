//! Local data of the symbol `{l, m}` at punctures, plus rational recognition
//! of loop periods.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cplx::serde_pair;
use crate::error::SymbolError;
use crate::forms::{lift_refined, regulator, unwrap_log, RegulatorValue, Role};
use crate::poly::LaurentBiPoly;
use crate::tracker::{lift_path, loop_around_m, snap_seed, PathSpec, Segment, StepControls, TrackedPath};

/// Allowed distance of a winding number from the nearest integer.
pub const WINDING_TOL: f64 = 0.1;
/// Relative agreement required between the two radii of a tame-symbol
/// extraction.
pub const EXTRAPOLATION_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Valuation {
    pub v: i64,
    /// Mean distance of the witness loop from its centroid in the m-plane.
    pub witness_radius: f64,
}

fn witness_radius(path: &TrackedPath) -> f64 {
    let n = path.samples.len().max(1) as f64;
    let center: Complex64 = path.samples.iter().map(|s| s.m).sum::<Complex64>() / n;
    path.samples.iter().map(|s| (s.m - center).norm()).sum::<f64>() / n
}

fn winding_to_valuation(delta_arg: f64, path: &TrackedPath) -> Result<Valuation, SymbolError> {
    let winding = delta_arg / TAU;
    let v = winding.round();
    let distance = (delta_arg - TAU * v).abs();
    if distance >= WINDING_TOL {
        return Err(SymbolError::AmbiguousWinding { winding, distance });
    }
    Ok(Valuation {
        v: v as i64,
        witness_radius: witness_radius(path),
    })
}

/// Order of zero (positive) or pole (negative) of `l` or `m` at the point
/// enclosed by `x_loop`, read off as the winding number of its argument.
pub fn valuation(x_loop: &TrackedPath, f_role: Role) -> Result<Valuation, SymbolError> {
    if !x_loop.is_closed() {
        return Err(SymbolError::NotClosed);
    }
    let (a, b) = (x_loop.first().unwrap(), x_loop.last().unwrap());
    let delta = match f_role {
        Role::LasF => b.logs.arg_l - a.logs.arg_l,
        Role::MasF => b.logs.arg_m - a.logs.arg_m,
    };
    winding_to_valuation(delta, x_loop)
}

/// Valuation of an arbitrary function `h(l, m)` on the curve.
pub fn valuation_with<H>(x_loop: &TrackedPath, h: H) -> Result<Valuation, SymbolError>
where
    H: Fn(Complex64, Complex64) -> Complex64,
{
    if !x_loop.is_closed() {
        return Err(SymbolError::NotClosed);
    }
    let logs = unwrap_log(x_loop, h);
    let delta = logs.last().unwrap().im - logs[0].im;
    winding_to_valuation(delta, x_loop)
}

/// Mean of `(-1)^(v_l v_m) l^(v_m) / m^(v_l)` over a loop made of full
/// circles. Only samples on the even points of the tracker's uniform grid
/// enter, so step bisections do not bias the average, and the periodic
/// trapezoid rule converges geometrically.
fn loop_mean(path: &TrackedPath, v_l: i64, v_m: i64) -> Complex64 {
    let sign = if (v_l * v_m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let s = &path.samples;
    let grid: Vec<_> = s[..s.len() - 1].iter().filter(|x| x.level >= 1).collect();
    if grid.is_empty() {
        return s[0].l.powi(v_m as i32) / s[0].m.powi(v_l as i32) * sign;
    }
    grid.iter()
        .map(|x| x.l.powi(v_m as i32) / x.m.powi(v_l as i32))
        .sum::<Complex64>()
        * sign
        / grid.len() as f64
}

/// `T_x(l, m) = (-1)^(v_l v_m) (l^(v_m) / m^(v_l))(x)`, estimated from loops
/// at radius `r` (`outer`) and `r/2` (`inner`) and extrapolated linearly to
/// radius zero.
pub fn tame_symbol(
    outer: &TrackedPath,
    inner: &TrackedPath,
    v_l: &Valuation,
    v_m: &Valuation,
) -> Result<Complex64, SymbolError> {
    if outer.is_empty() || inner.is_empty() {
        return Err(SymbolError::NotClosed);
    }
    if v_l.v == 0 && v_m.v == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let t_outer = loop_mean(outer, v_l.v, v_m.v);
    let t_inner = loop_mean(inner, v_l.v, v_m.v);
    if (t_outer - t_inner).norm() > EXTRAPOLATION_TOL * t_inner.norm().max(f64::MIN_POSITIVE) {
        return Err(SymbolError::ExtrapolationUnstable {
            outer: t_outer,
            inner: t_inner,
        });
    }
    Ok(2.0 * t_inner - t_outer)
}

/// A point of `S(l, m)` together with the loop used to isolate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Puncture {
    pub id: String,
    #[serde(with = "serde_pair")]
    pub center: Complex64,
    pub radius: f64,
    /// Approximate `l` at `center + radius`; snapped to the nearest root.
    #[serde(with = "serde_pair")]
    pub l_seed: Complex64,
    #[serde(default = "one")]
    pub turns: i32,
    /// The loop isolates `m = infinity`: the inner loop doubles the radius
    /// instead of halving it.
    #[serde(default)]
    pub at_infinity: bool,
}

fn one() -> i32 {
    1
}

#[derive(Debug, Clone, PartialEq)]
pub struct PunctureReport {
    pub id: String,
    pub v_l: Valuation,
    pub v_m: Valuation,
    pub tame: Complex64,
    pub regulator: RegulatorValue,
    pub match_abs_err: f64,
}

/// Isolating loops at both radii for a puncture, the outer one refined until
/// the regulator integral's error estimate meets `target`.
pub fn puncture_loops(
    a: &LaurentBiPoly,
    p: &Puncture,
    ctrl: &StepControls,
    target: f64,
) -> Result<(TrackedPath, TrackedPath), SymbolError> {
    let m_outer = p.center + p.radius;
    let l_outer = snap_seed(a, m_outer, p.l_seed)?;
    let outer_spec = loop_around_m(p.center, p.radius, l_outer, p.turns);
    let refined = lift_refined(a, &outer_spec, ctrl, target, 8, |path| {
        crate::forms::regulator_integral(path, Role::LasF).est_error
    })?;
    let fine = refined.ctrl;

    let inner_radius = if p.at_infinity { 2.0 * p.radius } else { 0.5 * p.radius };
    let m_inner = p.center + inner_radius;
    let radial = PathSpec::new(vec![Segment::line(m_outer, m_inner)], l_outer, false);
    let l_inner = lift_path(a, &radial, &fine)?.last().unwrap().l;
    let inner = lift_path(a, &loop_around_m(p.center, inner_radius, l_inner, p.turns), &fine)?;
    Ok((refined.path, inner))
}

/// Everything measured around one puncture.
pub fn analyze_puncture(
    a: &LaurentBiPoly,
    p: &Puncture,
    ctrl: &StepControls,
    target: f64,
) -> Result<PunctureReport, SymbolError> {
    let (outer, inner) = puncture_loops(a, p, ctrl, target)?;
    let v_l = valuation(&outer, Role::LasF)?;
    let v_m = valuation(&outer, Role::MasF)?;
    let tame = tame_symbol(&outer, &inner, &v_l, &v_m)?;
    let reg = regulator(&outer, Role::LasF)?;
    Ok(PunctureReport {
        id: p.id.clone(),
        v_l,
        v_m,
        tame,
        match_abs_err: (reg.value - tame).norm(),
        regulator: reg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalRecognition {
    pub p: i64,
    pub q: i64,
    pub residual: f64,
    /// Unchanged under halving of the tracker step; set by the caller.
    pub stable: bool,
}

impl RationalRecognition {
    pub fn new(p: i64, q: i64, stable: bool) -> Self {
        Self {
            p,
            q,
            residual: 0.0,
            stable,
        }
    }

    pub fn as_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn same_fraction(&self, other: &Self) -> bool {
        self.p == other.p && self.q == other.q
    }
}

/// Smallest-denominator continued-fraction convergent `p/q` of `value` with
/// `q <= q_max` and `|value - p/q| <= tol`.
pub fn recognize_rational(value: f64, q_max: i64, tol: f64) -> Result<RationalRecognition, SymbolError> {
    let no = || SymbolError::NoRational { value, q_max, tol };
    if !value.is_finite() || q_max < 1 {
        return Err(no());
    }
    // Convergents h_k / k_k from the recurrences h_k = a_k h_{k-1} + h_{k-2}.
    let (mut h_prev, mut h) = (1i64, value.floor() as i64);
    let (mut k_prev, mut k) = (0i64, 1i64);
    let mut x = value - value.floor();
    loop {
        let residual = (value - h as f64 / k as f64).abs();
        if residual <= tol {
            let g = h.gcd(&k).max(1);
            return Ok(RationalRecognition {
                p: h / g,
                q: k / g,
                residual,
                stable: false,
            });
        }
        if x < 1e-300 {
            return Err(no());
        }
        let inv = 1.0 / x;
        let a = inv.floor();
        x = inv - a;
        if a > i64::MAX as f64 / 4.0 {
            return Err(no());
        }
        let a = a as i64;
        let next_k = a.checked_mul(k).and_then(|v| v.checked_add(k_prev)).ok_or_else(no)?;
        if next_k > q_max {
            return Err(no());
        }
        let next_h = a.checked_mul(h).and_then(|v| v.checked_add(h_prev)).ok_or_else(no)?;
        (h_prev, h) = (h, next_h);
        (k_prev, k) = (k, next_k);
    }
}

/// Least common multiple of the denominators of the stable recognitions: a
/// numerical lower bound for the order of `{l, m}`.
pub fn estimate_symbol_order(recognitions: &[RationalRecognition]) -> Result<u64, SymbolError> {
    if recognitions.is_empty() {
        return Err(SymbolError::Empty);
    }
    Ok(recognitions
        .iter()
        .filter(|r| r.stable)
        .fold(1u64, |acc, r| acc.lcm(&(r.q.unsigned_abs()))))
}
