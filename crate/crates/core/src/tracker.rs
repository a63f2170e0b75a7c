//! Predictor-corrector continuation of `A(l, m) = 0` along a route in the
//! m-plane, with continuously unwrapped logarithms of `l` and `m`.
//!
//! A route is a [`PathSpec`]: line and arc segments in `m` plus a seed value
//! of `l` that picks the branch. [`lift_path`] walks each segment on a uniform
//! grid of `4k` steps (so the quadrature in [`crate::forms`] can form the
//! half- and quarter-resolution sums it needs for Richardson extrapolation),
//! bisecting any step whose Newton correction is slow, whose Kantorovich
//! test fails, or whose argument jump is too large.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cplx::{arg_0_2pi, serde_pair, wrap_pi};
use crate::error::TrackError;
use crate::poly::{roots_in_l, CompiledPoly, LaurentBiPoly};

/// Tolerance on shared segment endpoints.
pub const ENDPOINT_TOL: f64 = 1e-12;
/// Concatenation accepts endpoints this close in `(l, m)`.
pub const CONCAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Segment {
    Line {
        #[serde(with = "serde_pair")]
        m_start: Complex64,
        #[serde(with = "serde_pair")]
        m_end: Complex64,
    },
    Arc {
        #[serde(with = "serde_pair")]
        center: Complex64,
        radius: f64,
        angle_start: f64,
        angle_end: f64,
    },
}

impl Segment {
    pub fn line(m_start: Complex64, m_end: Complex64) -> Self {
        Segment::Line { m_start, m_end }
    }

    pub fn arc(center: Complex64, radius: f64, angle_start: f64, angle_end: f64) -> Self {
        Segment::Arc {
            center,
            radius,
            angle_start,
            angle_end,
        }
    }

    /// Point at segment parameter `s` in `[0, 1]`.
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { m_start, m_end } => m_start + (m_end - m_start) * s,
            Segment::Arc {
                center,
                radius,
                angle_start,
                angle_end,
            } => center + Complex64::from_polar(radius, angle_start + s * (angle_end - angle_start)),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { m_start, m_end } => (m_end - m_start).norm(),
            Segment::Arc {
                radius,
                angle_start,
                angle_end,
                ..
            } => radius * (angle_end - angle_start).abs(),
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Segment::Line { m_start, m_end } => Segment::Line {
                m_start: m_end,
                m_end: m_start,
            },
            Segment::Arc {
                center,
                radius,
                angle_start,
                angle_end,
            } => Segment::Arc {
                center,
                radius,
                angle_start: angle_end,
                angle_end: angle_start,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub segments: Vec<Segment>,
    #[serde(with = "serde_pair")]
    pub l_seed: Complex64,
    #[serde(default)]
    pub closed: bool,
}

impl PathSpec {
    pub fn new(segments: Vec<Segment>, l_seed: Complex64, closed: bool) -> Self {
        Self {
            segments,
            l_seed,
            closed,
        }
    }

    /// A path consisting of the single point `m`.
    pub fn point(m: Complex64, l_seed: Complex64) -> Self {
        Self::new(vec![Segment::line(m, m)], l_seed, false)
    }

    pub fn m_start(&self) -> Option<Complex64> {
        self.segments.first().map(Segment::start)
    }

    pub fn m_end(&self) -> Option<Complex64> {
        self.segments.last().map(Segment::end)
    }

    pub fn validate(&self) -> Result<(), TrackError> {
        let first = self
            .segments
            .first()
            .ok_or_else(|| TrackError::InvalidSpec("no segments".into()))?;
        for (k, seg) in self.segments.iter().enumerate() {
            if let Segment::Arc { radius, .. } = seg {
                if radius.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                    return Err(TrackError::InvalidSpec(format!("segment {k}: radius must be > 0")));
                }
            }
        }
        for (k, pair) in self.segments.windows(2).enumerate() {
            let (a, b) = (pair[0].end(), pair[1].start());
            if (a - b).norm() > ENDPOINT_TOL * (1.0 + a.norm()) {
                return Err(TrackError::InvalidSpec(format!(
                    "segments {k} and {} do not share an endpoint",
                    k + 1
                )));
            }
        }
        if self.closed {
            let (a, b) = (self.segments.last().unwrap().end(), first.start());
            if (a - b).norm() > ENDPOINT_TOL * (1.0 + a.norm()) {
                return Err(TrackError::InvalidSpec("closed path does not return to its start".into()));
            }
        }
        Ok(())
    }
}

/// Closed path of `|turns|` full circles of `radius` about `m_center`,
/// starting at angle 0; counterclockwise for positive `turns`.
pub fn loop_around_m(m_center: Complex64, radius: f64, l_seed: Complex64, turns: i32) -> PathSpec {
    let dir = if turns >= 0 { TAU } else { -TAU };
    let segments = (0..turns.unsigned_abs())
        .map(|k| {
            let a0 = dir * k as f64;
            Segment::arc(m_center, radius, a0, a0 + dir)
        })
        .collect();
    PathSpec::new(segments, l_seed, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepControls {
    /// Largest step in the segment parameter.
    pub max_step: f64,
    pub min_step: f64,
    /// Newton iterations allowed when polishing the seed.
    pub newton_budget: usize,
    /// Newton iterations per step before the step is halved.
    pub newton_halving: usize,
    /// Residual tolerance relative to the largest term of `A` at the sample.
    pub residual_tol: f64,
    /// Seed acceptance relative to the term scale.
    pub seed_tol: f64,
    /// `|dA/dl|` below this times the term scale is treated as a branch point.
    pub ramification_tol: f64,
    /// Start points with `|m - 1| <= epsilon` get `arg m = 0`.
    pub epsilon: f64,
}

impl Default for StepControls {
    fn default() -> Self {
        Self {
            max_step: 0.01,
            min_step: 1e-12,
            newton_budget: 20,
            newton_halving: 5,
            residual_tol: 1e-12,
            seed_tol: 1e-6,
            ramification_tol: 1e-8,
            epsilon: 1e-4,
        }
    }
}

impl StepControls {
    pub fn with_max_step(self, max_step: f64) -> Self {
        Self { max_step, ..self }
    }

    /// Steps per segment: the smallest multiple of 4 not below `1 / max_step`.
    pub fn steps_per_segment(&self) -> usize {
        4 * (1.0 / (4.0 * self.max_step)).ceil().max(1.0) as usize
    }
}

/// Unwrapped logarithms of `l` and `m` at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LogState {
    pub log_abs_l: f64,
    pub arg_l: f64,
    pub log_abs_m: f64,
    pub arg_m: f64,
}

impl LogState {
    pub fn log_l(&self) -> Complex64 {
        Complex64::new(self.log_abs_l, self.arg_l)
    }

    pub fn log_m(&self) -> Complex64 {
        Complex64::new(self.log_abs_m, self.arg_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub l: Complex64,
    pub m: Complex64,
    pub logs: LogState,
    /// 2 on the quarter-resolution grid, 1 on the half-resolution grid,
    /// 0 otherwise (including bisection points).
    pub level: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    pub l_start: Complex64,
    pub l_end: Complex64,
    /// Final `l` equals initial `l` within 1e-8.
    pub returned: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackedPath {
    pub samples: Vec<Sample>,
    pub residual_max: f64,
    /// Absolute residual bound met by every sample.
    pub residual_tol: f64,
    /// `arg m` at the first sample was set to 0 because `m(t0)` is within
    /// epsilon of 1.
    pub base_normalized: bool,
    pub monodromy: Option<Monodromy>,
}

impl TrackedPath {
    pub fn empty() -> Self {
        Self {
            samples: Vec::new(),
            residual_max: 0.0,
            residual_tol: 0.0,
            base_normalized: false,
            monodromy: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Start and end agree in both `m` and `l`.
    pub fn is_closed(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => {
                (a.m - b.m).norm() <= CONCAT_TOL * (1.0 + a.m.norm())
                    && (a.l - b.l).norm() <= 1e-8 * a.l.norm().max(1.0)
            }
            _ => false,
        }
    }

    /// Same points in the opposite order. The unwrapped logs are kept, so
    /// every line integral changes sign exactly.
    pub fn reversed(&self) -> Self {
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|s| Sample { t: 1.0 - s.t, ..*s })
            .collect();
        let mut out = Self {
            samples,
            monodromy: None,
            base_normalized: false,
            ..self.clone()
        };
        out.monodromy = out.compute_monodromy();
        out
    }

    /// Shifts the unwrapped arguments by multiples of `2*pi` so the first
    /// sample's arguments are as close as possible to the given values.
    pub fn rebased(&self, arg_l: f64, arg_m: f64) -> Self {
        let Some(first) = self.first() else {
            return self.clone();
        };
        let dl = ((arg_l - first.logs.arg_l) / TAU).round() * TAU;
        let dm = ((arg_m - first.logs.arg_m) / TAU).round() * TAU;
        let mut out = self.clone();
        for s in &mut out.samples {
            s.logs.arg_l += dl;
            s.logs.arg_m += dm;
        }
        out
    }

    fn compute_monodromy(&self) -> Option<Monodromy> {
        let (a, b) = (self.first()?, self.last()?);
        if self.samples.len() < 2 || (a.m - b.m).norm() > CONCAT_TOL * (1.0 + a.m.norm()) {
            return None;
        }
        Some(Monodromy {
            l_start: a.l,
            l_end: b.l,
            returned: (a.l - b.l).norm() <= 1e-8 * a.l.norm().max(1.0),
        })
    }
}

/// Joins `b` onto the end of `a`. `b` is re-based so its arguments continue
/// `a`'s; `a` occupies `t` in `[0, 1/2]` and `b` the rest.
pub fn concat(a: &TrackedPath, b: &TrackedPath) -> Result<TrackedPath, TrackError> {
    if b.is_empty() {
        return Ok(a.clone());
    }
    let Some(end) = a.last().copied() else {
        return Ok(b.clone());
    };
    let start = b.first().unwrap();
    let dm = (end.m - start.m).norm();
    let dl = (end.l - start.l).norm();
    if dm > CONCAT_TOL * (1.0 + end.m.norm()) || dl > CONCAT_TOL * (1.0 + end.l.norm()) {
        return Err(TrackError::Mismatch(format!(
            "|dm| = {dm:e}, |dl| = {dl:e} at the junction"
        )));
    }
    let b = b.rebased(end.logs.arg_l, end.logs.arg_m);
    if a.len() == 1 {
        let mut out = b;
        out.base_normalized = a.base_normalized;
        return Ok(out);
    }
    if b.len() == 1 {
        return Ok(a.clone());
    }
    let mut samples: Vec<Sample> = a.samples.iter().map(|s| Sample { t: 0.5 * s.t, ..*s }).collect();
    let junction_level = end.level.min(start.level);
    samples.last_mut().unwrap().level = junction_level;
    samples.extend(b.samples.iter().skip(1).map(|s| Sample {
        t: 0.5 + 0.5 * s.t,
        ..*s
    }));
    let mut out = TrackedPath {
        samples,
        residual_max: a.residual_max.max(b.residual_max),
        residual_tol: a.residual_tol.max(b.residual_tol),
        base_normalized: a.base_normalized,
        monodromy: None,
    };
    out.monodromy = out.compute_monodromy();
    Ok(out)
}

/// Root of `A(., m)` nearest to `approx`.
pub fn snap_seed(a: &LaurentBiPoly, m: Complex64, approx: Complex64) -> Result<Complex64, TrackError> {
    let roots = roots_in_l(a, m)?;
    roots
        .into_iter()
        .min_by(|x, y| (x - approx).norm().total_cmp(&(y - approx).norm()))
        .ok_or_else(|| TrackError::Seed(format!("A has no roots in l at m = {m}")))
}

struct Tracker<'a> {
    poly: CompiledPoly,
    ctrl: &'a StepControls,
    samples: Vec<Sample>,
    residual_max: f64,
    scale_max: f64,
}

enum StepFailure {
    Retry,
    Hard(TrackError),
}

/// Lifts `spec` onto the curve `A = 0`.
pub fn lift_path(a: &LaurentBiPoly, spec: &PathSpec, ctrl: &StepControls) -> Result<TrackedPath, TrackError> {
    spec.validate()?;
    let poly = a.compile();
    let m0 = spec.m_start().unwrap();
    if m0.norm() == 0.0 {
        return Err(TrackError::InvalidSpec("path starts at m = 0".into()));
    }

    let jet = poly.jet(spec.l_seed, m0);
    let on_curve = jet.value.norm() <= ctrl.seed_tol * jet.scale;
    if !on_curve {
        return Err(TrackError::Seed(format!(
            "|A(l_seed, m_start)| = {:e} exceeds {:e} * scale {:e}",
            jet.value.norm(),
            ctrl.seed_tol,
            jet.scale
        )));
    }
    let roots = roots_in_l(a, m0)?;
    let mut by_distance: Vec<f64> = roots.iter().map(|r| (r - spec.l_seed).norm()).collect();
    by_distance.sort_by(f64::total_cmp);
    if by_distance.len() >= 2 && by_distance[1] < 1e-8 {
        return Err(TrackError::Seed(format!(
            "seed sits on a multiple root at m = {m0}; start from an offset point"
        )));
    }

    // Polish the seed at fixed m.
    let mut l0 = spec.l_seed;
    for _ in 0..ctrl.newton_budget {
        let j = poly.jet(l0, m0);
        if j.value.norm() <= ctrl.residual_tol * j.scale {
            break;
        }
        if j.d_l.norm() == 0.0 {
            break;
        }
        l0 -= j.value / j.d_l;
    }
    let j0 = poly.jet(l0, m0);
    if j0.value.norm() > ctrl.residual_tol * j0.scale {
        return Err(TrackError::Seed("Newton polish of the seed did not converge".into()));
    }

    let base_normalized = (m0 - 1.0).norm() <= ctrl.epsilon;
    let logs = LogState {
        log_abs_l: l0.norm().ln(),
        arg_l: arg_0_2pi(l0),
        log_abs_m: m0.norm().ln(),
        arg_m: if base_normalized { 0.0 } else { arg_0_2pi(m0) },
    };
    let mut tr = Tracker {
        poly,
        ctrl,
        samples: vec![Sample {
            t: 0.0,
            l: l0,
            m: m0,
            logs,
            level: 2,
        }],
        residual_max: j0.value.norm(),
        scale_max: j0.scale,
    };

    let active: Vec<&Segment> = spec.segments.iter().filter(|s| s.length() > 0.0).collect();
    let n_seg = active.len();
    let n = ctrl.steps_per_segment();
    for (k, seg) in active.iter().enumerate() {
        let t_of = |s: f64| (k as f64 + s) / n_seg as f64;
        for q in 0..n {
            let (s0, s1) = (q as f64 / n as f64, (q + 1) as f64 / n as f64);
            let level = match q + 1 {
                i if i % 4 == 0 => 2,
                i if i % 2 == 0 => 1,
                _ => 0,
            };
            tr.advance(seg, s0, s1, level, &t_of)?;
        }
    }

    let mut path = TrackedPath {
        samples: tr.samples,
        residual_max: tr.residual_max,
        residual_tol: ctrl.residual_tol * tr.scale_max,
        base_normalized,
        monodromy: None,
    };
    if let Some(last) = path.samples.last_mut() {
        last.t = if n_seg == 0 { 0.0 } else { 1.0 };
    }
    if spec.closed {
        path.monodromy = path.compute_monodromy();
    }
    Ok(path)
}

impl Tracker<'_> {
    fn advance(
        &mut self,
        seg: &Segment,
        s0: f64,
        s1: f64,
        level: u8,
        t_of: &dyn Fn(f64) -> f64,
    ) -> Result<(), TrackError> {
        match self.try_step(seg, s1, level, t_of) {
            Ok(()) => Ok(()),
            Err(StepFailure::Hard(e)) => Err(e),
            Err(StepFailure::Retry) => {
                if s1 - s0 < self.ctrl.min_step {
                    return Err(self.underflow(t_of(s0)));
                }
                let mid = 0.5 * (s0 + s1);
                self.advance(seg, s0, mid, 0, t_of)?;
                self.advance(seg, mid, s1, level, t_of)
            }
        }
    }

    /// Step underflow next to a point where `|dA/dl|` is already small is a
    /// square-root branch point the corrector cannot step across.
    fn underflow(&self, t: f64) -> TrackError {
        let last = self.samples.last().unwrap();
        let j = self.poly.jet(last.l, last.m);
        if j.d_l.norm() < self.ctrl.ramification_tol.sqrt() * j.scale {
            TrackError::Ramification {
                t,
                m: last.m,
                dadl: j.d_l.norm(),
            }
        } else {
            TrackError::NonConvergence { t }
        }
    }

    fn try_step(
        &mut self,
        seg: &Segment,
        s1: f64,
        level: u8,
        t_of: &dyn Fn(f64) -> f64,
    ) -> Result<(), StepFailure> {
        let prev = *self.samples.last().unwrap();
        let m1 = seg.point(s1);
        if m1.norm() == 0.0 {
            return Err(StepFailure::Hard(TrackError::InvalidSpec("path passes through m = 0".into())));
        }
        let here = self.poly.jet(prev.l, prev.m);
        if here.d_l.norm() == 0.0 {
            return Err(StepFailure::Retry);
        }
        let slope = -here.d_m / here.d_l;
        let mut l = prev.l + slope * (m1 - prev.m);

        // Kantorovich-style basin test at the predicted point.
        let jp = self.poly.jet(l, m1);
        if jp.d_l.norm() == 0.0 || jp.value.norm() * jp.d_ll.norm() > 0.25 * jp.d_l.norm_sqr() {
            return Err(StepFailure::Retry);
        }

        let mut converged = None;
        for _ in 0..=self.ctrl.newton_halving {
            let j = self.poly.jet(l, m1);
            if !j.value.is_finite() {
                return Err(StepFailure::Retry);
            }
            if j.value.norm() <= self.ctrl.residual_tol * j.scale {
                converged = Some(j);
                break;
            }
            if j.d_l.norm() == 0.0 {
                return Err(StepFailure::Retry);
            }
            l -= j.value / j.d_l;
        }
        let Some(j) = converged else {
            return Err(StepFailure::Retry);
        };
        if l.norm() == 0.0 || !l.is_finite() {
            return Err(StepFailure::Hard(TrackError::InvalidSpec(
                "lift reaches l = 0 or l = infinity".into(),
            )));
        }

        let d_arg_l = wrap_pi((l / prev.l).arg());
        let d_arg_m = wrap_pi((m1 / prev.m).arg());
        if d_arg_l.abs() > PI / 4.0 || d_arg_m.abs() > PI / 4.0 {
            return Err(StepFailure::Retry);
        }
        // Relative change in l also bounded, so |l| is well resolved.
        if (l - prev.l).norm() > 0.25 * prev.l.norm().max(l.norm()) {
            return Err(StepFailure::Retry);
        }

        if j.d_l.norm() < self.ctrl.ramification_tol * j.scale {
            return Err(StepFailure::Hard(TrackError::Ramification {
                t: t_of(s1),
                m: m1,
                dadl: j.d_l.norm(),
            }));
        }

        self.residual_max = self.residual_max.max(j.value.norm());
        self.scale_max = self.scale_max.max(j.scale);
        self.samples.push(Sample {
            t: t_of(s1),
            l,
            m: m1,
            logs: LogState {
                log_abs_l: l.norm().ln(),
                arg_l: prev.logs.arg_l + d_arg_l,
                log_abs_m: m1.norm().ln(),
                arg_m: prev.logs.arg_m + d_arg_m,
            },
            level,
        });
        Ok(())
    }
}

/// One row of a branch-point probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCandidate {
    pub m: Complex64,
    pub l: Complex64,
    /// `|l dA/dl|` divided by the term scale at `(l, m)`.
    pub relative_dadl: f64,
}

/// Rectangular grid in the m-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub const MAX_POINTS: usize = 1_000_000;

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let step = |lo: f64, hi: f64, n: usize, k: usize| {
            if n <= 1 {
                lo
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        };
        (0..self.ny).flat_map(move |iy| {
            (0..self.nx).map(move |ix| {
                Complex64::new(
                    step(self.re_min, self.re_max, self.nx, ix),
                    step(self.im_min, self.im_max, self.ny, iy),
                )
            })
        })
    }
}

/// Grid points `m` where some root `l` of `A(., m)` has `|l dA/dl|` below
/// `threshold` relative to the term scale. Points where the root solve
/// itself degenerates are skipped.
pub fn probe_branch_points(
    a: &LaurentBiPoly,
    grid: &Grid,
    threshold: f64,
) -> Result<Vec<BranchCandidate>, TrackError> {
    if grid.nx.saturating_mul(grid.ny) > Grid::MAX_POINTS {
        return Err(TrackError::InvalidSpec(format!(
            "grid has more than {} points",
            Grid::MAX_POINTS
        )));
    }
    let poly = a.compile();
    let mut out = Vec::new();
    for m in grid.points() {
        if m.norm() == 0.0 {
            continue;
        }
        let Ok(roots) = roots_in_l(a, m) else { continue };
        let best = roots
            .iter()
            .filter(|l| l.norm() > 0.0)
            .map(|&l| {
                let j = poly.jet(l, m);
                (l, (l * j.d_l).norm() / j.scale.max(f64::MIN_POSITIVE))
            })
            .min_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((l, rel)) = best {
            if rel < threshold {
                out.push(BranchCandidate { m, l, relative_dadl: rel });
            }
        }
    }
    Ok(out)
}
