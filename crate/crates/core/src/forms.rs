//! Line integrals of the regulator-related 1-forms along tracked paths.
//!
//! Every integral here is a Stieltjes sum `sum F d G` over the tracker's
//! samples, read from the same [`LogState`] so that integration-by-parts
//! identities between the forms hold sample for sample:
//!
//! * `eta = log|l| d(arg m) - log|m| d(arg l)`
//! * `xi  = -(log|m| d(log|l|) + arg(l) d(arg m))`
//! * `Vol(l, m) = Vol(K) - 2 * int eta`
//! * `CS(l, m)  = CS(K) + int xi / pi^2`
//! * `U(l, m)   = q * int xi`
//! * `CS_1      = (int xi + i int eta) / (2 pi i)`
//!
//! The trapezoid rule is applied on the full, half and quarter resolution
//! grids recorded by the tracker; two Richardson extrapolations give the value
//! and the error estimate.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::cplx::{arg_0_2pi, wrap_pi};
use crate::error::{FormError, TrackError};
use crate::poly::LaurentBiPoly;
use crate::tracker::{lift_path, LogState, PathSpec, StepControls, TrackedPath};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<T> {
    pub value: T,
    /// `|R_h - R_2h|`, the difference between the extrapolated values at full
    /// and half resolution.
    pub est_error: f64,
    pub n_samples: usize,
}

impl IntegralResult<Complex64> {
    fn re(self) -> IntegralResult<f64> {
        IntegralResult {
            value: self.value.re,
            est_error: self.est_error,
            n_samples: self.n_samples,
        }
    }
}

/// Trapezoid sums over samples at grid level >= 0, 1, 2 followed by
/// Richardson extrapolation. `panel(i, j)` returns the contribution of the
/// panel between sample indices `i < j`.
pub fn quadrature<F>(path: &TrackedPath, panel: F) -> IntegralResult<Complex64>
where
    F: Fn(usize, usize) -> Complex64,
{
    let n_samples = path.samples.len();
    if n_samples < 2 {
        return IntegralResult {
            value: Complex64::new(0.0, 0.0),
            est_error: 0.0,
            n_samples,
        };
    }
    let mut sums = [Complex64::new(0.0, 0.0); 3];
    for (level, sum) in sums.iter_mut().enumerate() {
        let mut prev: Option<usize> = None;
        for (k, _) in path.samples.iter().enumerate().filter(|(_, s)| s.level as usize >= level) {
            if let Some(p) = prev {
                *sum += panel(p, k);
            }
            prev = Some(k);
        }
    }
    let full = sums[0] + (sums[0] - sums[1]) / 3.0;
    let half = sums[1] + (sums[1] - sums[2]) / 3.0;
    IntegralResult {
        value: full,
        est_error: (full - half).norm(),
        n_samples,
    }
}

/// `int F dG` for real or complex `F`, `G` read from the log state.
fn stieltjes<F, G>(path: &TrackedPath, f: F, g: G) -> IntegralResult<Complex64>
where
    F: Fn(&LogState) -> Complex64,
    G: Fn(&LogState) -> Complex64,
{
    let s = &path.samples;
    quadrature(path, |i, j| {
        let (a, b) = (&s[i].logs, &s[j].logs);
        0.5 * (f(a) + f(b)) * (g(b) - g(a))
    })
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn integrate_eta(path: &TrackedPath) -> IntegralResult<f64> {
    let a = stieltjes(path, |s| real(s.log_abs_l), |s| real(s.arg_m));
    let b = stieltjes(path, |s| real(s.log_abs_m), |s| real(s.arg_l));
    combine(a, b, 1.0, -1.0).re()
}

pub fn integrate_xi(path: &TrackedPath) -> IntegralResult<f64> {
    let a = stieltjes(path, |s| real(s.log_abs_m), |s| real(s.log_abs_l));
    let b = stieltjes(path, |s| real(s.arg_l), |s| real(s.arg_m));
    combine(a, b, -1.0, -1.0).re()
}

fn combine(
    a: IntegralResult<Complex64>,
    b: IntegralResult<Complex64>,
    ca: f64,
    cb: f64,
) -> IntegralResult<Complex64> {
    IntegralResult {
        value: a.value * ca + b.value * cb,
        est_error: a.est_error * ca.abs() + b.est_error * cb.abs(),
        n_samples: a.n_samples,
    }
}

/// `Vol(l, m) = Vol(K) + 2 int [-log|l| d arg m + log|m| d arg l]`, which is
/// `Vol(K) - 2 int eta`.
pub fn vol_along(path: &TrackedPath, vol_k: f64) -> f64 {
    vol_k - 2.0 * integrate_eta(path).value
}

/// `CS(l, m) = CS(K) - (1/pi^2) int [log|m| d log|l| + arg l d arg m]`, which
/// is `CS(K) + int xi / pi^2`.
pub fn cs_along(path: &TrackedPath, cs_k: f64) -> f64 {
    cs_k + integrate_xi(path).value / (PI * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialCs {
    /// `U = q * int xi`.
    pub value: f64,
    /// `U / (2 pi)^2` reduced to `[0, 1)`.
    pub normalized_mod1: f64,
}

pub fn special_cs_u(path: &TrackedPath, q_order: u64) -> SpecialCs {
    let value = q_order as f64 * integrate_xi(path).value;
    let normalized = value / (TAU * TAU);
    let mut frac = normalized.rem_euclid(1.0);
    if frac >= 1.0 - 1e-12 {
        frac = 0.0;
    }
    SpecialCs {
        value,
        normalized_mod1: frac,
    }
}

/// `(int xi + i int eta) / (2 pi i)`.
pub fn cs1_along(path: &TrackedPath) -> Complex64 {
    let xi = integrate_xi(path).value;
    let eta = integrate_eta(path).value;
    Complex64::new(xi, eta) / (TAU * I)
}

/// Which coordinate plays `f` in `r(f, g)`; `g` is the other one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    LasF,
    MasF,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegulatorValue {
    pub value: Complex64,
    /// `| |value| - 1 |`.
    pub modulus_defect: f64,
    /// Error estimate of `value` propagated from the quadrature.
    pub est_error: f64,
    /// `int log f dg/g - log g(t0) int df/f`.
    pub exponent: Complex64,
}

type LogOf = fn(&LogState) -> Complex64;

fn role_logs(role: Role) -> (LogOf, LogOf) {
    match role {
        Role::LasF => (LogState::log_l, LogState::log_m),
        Role::MasF => (LogState::log_m, LogState::log_l),
    }
}

/// `int log f d log g` along the path, with both logs continuous along it.
pub fn regulator_integral(path: &TrackedPath, role: Role) -> IntegralResult<Complex64> {
    let (f, g) = role_logs(role);
    stieltjes(path, f, g)
}

/// `r(f, g)(loop) = exp((1/2 pi i)(int log f dg/g - log g(t0) int df/f))`.
///
/// `log f` is continued along the loop from its principal value at the base
/// point; `log g(t0)` is principal with `arg` in `[0, 2 pi)` except at the
/// geometric base point, where the tracker has set `arg m(t0) = 0`.
pub fn regulator(path: &TrackedPath, role: Role) -> Result<RegulatorValue, FormError> {
    if !path.is_closed() {
        return Err(FormError::NotClosed);
    }
    let (f, g) = role_logs(role);
    let integral = stieltjes(path, f, g);
    let (first, last) = (path.first().unwrap(), path.last().unwrap());
    let df = f(&last.logs) - f(&first.logs);
    Ok(assemble_regulator(integral, g(&first.logs), df))
}

fn assemble_regulator(integral: IntegralResult<Complex64>, log_g0: Complex64, df: Complex64) -> RegulatorValue {
    let exponent = integral.value - log_g0 * df;
    let value = (exponent / (TAU * I)).exp();
    RegulatorValue {
        value,
        modulus_defect: (value.norm() - 1.0).abs(),
        est_error: value.norm() * integral.est_error / TAU,
        exponent,
    }
}

/// Unwrapped `log h` along the samples, principal (`arg` in `[0, 2 pi)`) at
/// the first sample.
pub fn unwrap_log<H>(path: &TrackedPath, h: H) -> Vec<Complex64>
where
    H: Fn(Complex64, Complex64) -> Complex64,
{
    let mut out: Vec<Complex64> = Vec::with_capacity(path.samples.len());
    let mut prev: Option<Complex64> = None;
    for s in &path.samples {
        let v = h(s.l, s.m);
        let arg = match (prev, out.last()) {
            (Some(p), Some(last)) => last.im + wrap_pi((v / p).arg()),
            _ => arg_0_2pi(v),
        };
        out.push(Complex64::new(v.norm().ln(), arg));
        prev = Some(v);
    }
    out
}

/// Regulator for arbitrary functions `f(l, m)`, `g(l, m)` on the curve.
pub fn regulator_with<F, G>(path: &TrackedPath, f: F, g: G) -> Result<RegulatorValue, FormError>
where
    F: Fn(Complex64, Complex64) -> Complex64,
    G: Fn(Complex64, Complex64) -> Complex64,
{
    if !path.is_closed() {
        return Err(FormError::NotClosed);
    }
    let lf = unwrap_log(path, f);
    let lg = unwrap_log(path, g);
    let integral = quadrature(path, |i, j| 0.5 * (lf[i] + lf[j]) * (lg[j] - lg[i]));
    let n = lf.len() - 1;
    Ok(assemble_regulator(integral, lg[0], lf[n] - lf[0]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KirkKlassen {
    /// `exp(2 pi i int (alpha d beta - beta d alpha))` with
    /// `alpha = log m / 2 pi i`, `beta = log l / 2 pi i`.
    pub value: Complex64,
    /// `exp((1/2 pi i) int (log m d log l - log l d log m))`.
    pub alternate: Complex64,
    pub abs_diff: f64,
    /// `int (log m d log l - log l d log m)`.
    pub exponent: IntegralResult<Complex64>,
}

pub fn kirk_klassen(path: &TrackedPath) -> KirkKlassen {
    let alpha = |s: &LogState| s.log_m() / (TAU * I);
    let beta = |s: &LogState| s.log_l() / (TAU * I);
    let ab = stieltjes(path, alpha, beta);
    let ba = stieltjes(path, beta, alpha);
    let value = (TAU * I * (ab.value - ba.value)).exp();

    let ml = stieltjes(path, LogState::log_m, LogState::log_l);
    let lm = stieltjes(path, LogState::log_l, LogState::log_m);
    let exponent = combine(ml, lm, 1.0, -1.0);
    let alternate = (exponent.value / (TAU * I)).exp();
    KirkKlassen {
        value,
        alternate,
        abs_diff: (value - alternate).norm(),
        exponent,
    }
}

/// A lifted path refined until the chosen error measure meets a target.
#[derive(Debug, Clone)]
pub struct Refined {
    pub path: TrackedPath,
    pub ctrl: StepControls,
    pub refinements: usize,
    pub est_error: f64,
}

/// Error measure used by [`lift_refined`] by default: the larger of the
/// `eta` and `xi` error estimates.
pub fn eta_xi_error(path: &TrackedPath) -> f64 {
    integrate_eta(path).est_error.max(integrate_xi(path).est_error)
}

/// Lifts `spec`, halving `max_step` and re-tracking until `error_of` is below
/// `target` or `max_refinements` halvings have been made.
pub fn lift_refined<E>(
    a: &LaurentBiPoly,
    spec: &PathSpec,
    ctrl: &StepControls,
    target: f64,
    max_refinements: usize,
    error_of: E,
) -> Result<Refined, TrackError>
where
    E: Fn(&TrackedPath) -> f64,
{
    let mut ctrl = *ctrl;
    let mut refinements = 0;
    loop {
        let path = lift_path(a, spec, &ctrl)?;
        let est_error = error_of(&path);
        if est_error <= target || refinements >= max_refinements {
            return Ok(Refined {
                path,
                ctrl,
                refinements,
                est_error,
            });
        }
        ctrl.max_step *= 0.5;
        refinements += 1;
    }
}
