//! Colored Jones polynomials of the figure-eight knot at roots of unity, the
//! Kashaev invariant and growth-rate fits.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cplx::{arg_0_2pi, wrap_pi};
use crate::error::JonesError;

/// A complex number stored as `exp(log_abs + i arg)`; zero has
/// `log_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_abs: f64,
    pub arg: f64,
}

impl LogComplex {
    pub const ZERO: Self = Self {
        log_abs: f64::NEG_INFINITY,
        arg: 0.0,
    };
    pub const ONE: Self = Self { log_abs: 0.0, arg: 0.0 };

    pub fn from_complex(z: Complex64) -> Self {
        if z == Complex64::new(0.0, 0.0) {
            Self::ZERO
        } else {
            Self {
                log_abs: z.norm().ln(),
                arg: z.arg(),
            }
        }
    }

    /// Overflows to infinity for large `log_abs`.
    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.log_abs.exp(), self.arg)
        }
    }

    pub fn is_zero(self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    /// `arg` reduced to `(-pi, pi]`.
    pub fn principal(self) -> Self {
        Self {
            log_abs: self.log_abs,
            arg: wrap_pi(self.arg),
        }
    }
}

impl std::ops::Mul for LogComplex {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            Self::ZERO
        } else {
            Self {
                log_abs: self.log_abs + other.log_abs,
                arg: self.arg + other.arg,
            }
        }
    }
}

/// Streaming sum of `LogComplex` terms, rescaled to the largest magnitude
/// seen so far.
#[derive(Debug, Clone, Copy)]
struct LogSum {
    shift: f64,
    acc: Complex64,
}

impl LogSum {
    fn new() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            acc: Complex64::new(0.0, 0.0),
        }
    }

    fn add(&mut self, t: LogComplex) {
        if t.is_zero() {
            return;
        }
        if t.log_abs > self.shift {
            let rescale = if self.shift.is_finite() {
                (self.shift - t.log_abs).exp()
            } else {
                0.0
            };
            self.acc = self.acc * rescale + Complex64::from_polar(1.0, t.arg);
            self.shift = t.log_abs;
        } else {
            self.acc += Complex64::from_polar((t.log_abs - self.shift).exp(), t.arg);
        }
    }

    fn finish(self) -> LogComplex {
        if !self.shift.is_finite() || self.acc.norm() == 0.0 {
            return LogComplex::ZERO;
        }
        LogComplex {
            log_abs: self.shift + self.acc.norm().ln(),
            arg: self.acc.arg(),
        }
    }
}

/// Evaluates a family of colored Jones polynomials `J_N(q)`.
pub trait JonesEvaluator {
    fn evaluate(&self, n: u64, q: Complex64) -> Result<LogComplex, JonesError>;
}

/// The figure-eight knot.
#[derive(Debug, Clone, Copy, Default)]
pub struct FigureEight;

impl JonesEvaluator for FigureEight {
    fn evaluate(&self, n: u64, q: Complex64) -> Result<LogComplex, JonesError> {
        colored_jones_fig8(n, q)
    }
}

/// `J_N(q)` for the figure-eight knot at `q` on the unit circle,
/// `Σ_j Π_{k=1..j} (q^((N+k)/2) - q^(-(N+k)/2)) (q^((N-k)/2) - q^(-(N-k)/2))`.
pub fn colored_jones_fig8(n: u64, q: Complex64) -> Result<LogComplex, JonesError> {
    if n == 0 {
        return Err(JonesError::Invalid("color N must be positive".into()));
    }
    if !q.re.is_finite() || !q.im.is_finite() || (q.norm() - 1.0).abs() > 1e-12 {
        return Err(JonesError::Invalid(format!("q = {q} is not on the unit circle")));
    }
    Ok(colored_jones_fig8_theta(n, arg_0_2pi(q)))
}

/// Same sum with `q = exp(i theta)` and half powers `q^(a/2) = exp(i a theta / 2)`.
/// The result does not depend on the representative of `theta` mod `2 pi`.
pub fn colored_jones_fig8_theta(n: u64, theta: f64) -> LogComplex {
    let nf = n as f64;
    let mut sum = LogSum::new();
    let mut term = LogComplex::ONE;
    sum.add(term);
    for k in 1..n {
        let kf = k as f64;
        // (x - 1/x)(y - 1/y) with x = exp(i (N-k) theta/2), y = exp(i (N+k) theta/2).
        let f = -4.0 * ((nf - kf) * theta / 2.0).sin() * ((nf + kf) * theta / 2.0).sin();
        if f == 0.0 {
            break;
        }
        let factor = LogComplex {
            log_abs: f.abs().ln(),
            arg: if f < 0.0 { PI } else { 0.0 },
        };
        term = term * factor;
        sum.add(term.principal());
    }
    sum.finish()
}

/// Direct complex summation, usable while the values stay in `f64` range.
pub fn colored_jones_fig8_direct(n: u64, q: Complex64) -> Complex64 {
    let theta = arg_0_2pi(q);
    let half = |a: f64| Complex64::from_polar(1.0, a * theta / 2.0);
    let nf = n as f64;
    let mut total = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..n {
        let kf = k as f64;
        let x = half(nf - kf);
        let y = half(nf + kf);
        term *= (x - 1.0 / x) * (y - 1.0 / y);
        total += term;
    }
    total
}

/// `q = exp(2 pi i / k)`.
pub fn root_of_unity(k: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU / k as f64)
}

/// One entry of a Jones sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JonesPoint {
    pub n: u64,
    pub k: u64,
    pub a: f64,
    pub value: LogComplex,
    pub runtime_ms: f64,
}

fn timed(n: u64, k: u64, a: f64) -> Result<JonesPoint, JonesError> {
    let start = std::time::Instant::now();
    let value = colored_jones_fig8(n, root_of_unity(k))?;
    Ok(JonesPoint {
        n,
        k,
        a,
        value,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Kashaev invariants `<4_1>_N = J_N(exp(2 pi i / N))`, checked to be real
/// and positive.
pub fn kashaev_sequence(n_list: &[u64]) -> Result<Vec<JonesPoint>, JonesError> {
    n_list
        .iter()
        .map(|&n| {
            let p = timed(n, n, 1.0)?;
            if p.value.is_zero() || wrap_pi(p.value.arg).abs() > 1e-6 {
                return Err(JonesError::Invalid(format!(
                    "Kashaev invariant at N = {n} is not positive real (arg {})",
                    p.value.arg
                )));
            }
            Ok(p)
        })
        .collect()
}

/// `J_N(exp(2 pi i / k))` with `k = round(N / a)`.
pub fn generalized_sequence(n_list: &[u64], a: f64) -> Result<Vec<JonesPoint>, JonesError> {
    if !(a.is_finite() && a > 0.0) {
        return Err(JonesError::Invalid(format!("a = {a} must be positive")));
    }
    n_list
        .iter()
        .map(|&n| {
            let k = (n as f64 / a).round();
            if k < 1.0 {
                return Err(JonesError::Invalid(format!("N / a rounds to zero for N = {n}")));
            }
            timed(n, k as u64, a)
        })
        .collect()
}

/// Least-squares fit `log|J_N| ≈ slope k + log_correction log N + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub a: f64,
    pub slope: f64,
    pub log_correction: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    /// `arg J_N / k` at the largest `N`.
    pub arg_rate: f64,
    /// Largest `|N/a - k|` among the fitted points.
    pub max_rounding: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 4;

/// Solves the least-squares problem `X beta ≈ y` by Householder QR.
fn least_squares<const P: usize>(rows: &[[f64; P]], y: &[f64]) -> [f64; P] {
    let n = rows.len();
    let mut a: Vec<[f64; P]> = rows.to_vec();
    let mut b = y.to_vec();
    for col in 0..P {
        let norm = (col..n).map(|i| a[i][col] * a[i][col]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[col][col] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (col..n).map(|i| a[i][col]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        for j in col..P {
            let d: f64 = (col..n).map(|i| v[i - col] * a[i][j]).sum::<f64>() * 2.0 / vv;
            for (row, vi) in a[col..].iter_mut().zip(&v) {
                row[j] -= d * vi;
            }
        }
        let d: f64 = (col..n).map(|i| v[i - col] * b[i]).sum::<f64>() * 2.0 / vv;
        for i in col..n {
            b[i] -= d * v[i - col];
        }
    }
    let mut beta = [0.0; P];
    for col in (0..P).rev() {
        let s: f64 = (col + 1..P).map(|j| a[col][j] * beta[j]).sum();
        beta[col] = if a[col][col] == 0.0 { 0.0 } else { (b[col] - s) / a[col][col] };
    }
    beta
}

/// Fits the exponential growth of a sequence produced with parameter `a`.
pub fn growth_rate(seq: &[JonesPoint], a: f64) -> Result<GrowthFit, JonesError> {
    let usable: Vec<&JonesPoint> = seq.iter().filter(|p| !p.value.is_zero()).collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(JonesError::InsufficientData {
            needed: MIN_FIT_POINTS,
            got: usable.len(),
        });
    }
    let rows: Vec<[f64; 3]> = usable
        .iter()
        .map(|p| [p.k as f64, (p.n as f64).ln(), 1.0])
        .collect();
    let y: Vec<f64> = usable.iter().map(|p| p.value.log_abs).collect();
    let [slope, log_correction, intercept] = least_squares(&rows, &y);
    let rms_residual = (rows
        .iter()
        .zip(&y)
        .map(|(r, yi)| (slope * r[0] + log_correction * r[1] + intercept - yi).powi(2))
        .sum::<f64>()
        / rows.len() as f64)
        .sqrt();
    let last = usable.iter().max_by_key(|p| p.n).unwrap();
    Ok(GrowthFit {
        a,
        slope,
        log_correction,
        intercept,
        rms_residual,
        arg_rate: wrap_pi(last.value.arg) / last.k as f64,
        max_rounding: usable
            .iter()
            .map(|p| (p.n as f64 / a - p.k as f64).abs())
            .fold(0.0, f64::max),
        points: usable.len(),
    })
}

/// Comparison of a fitted growth rate with `(Vol + i X) / (2 pi)` for the two
/// normalizations of the imaginary part `X`: `pi CS` and `U / (2 pi)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureGap {
    /// `|slope - Vol/(2 pi)|`.
    pub gap: f64,
    pub predicted_cs: [f64; 2],
    pub predicted_u: [f64; 2],
    pub observed: [f64; 2],
    pub report: String,
}

pub fn conjecture_gap(fit: &GrowthFit, vol: f64, cs: f64, u: f64) -> ConjectureGap {
    let predicted_cs = [vol / TAU, PI * cs / TAU];
    let predicted_u = [vol / TAU, u / (TAU * TAU) / TAU];
    let observed = [fit.slope, fit.arg_rate];
    let gap = (fit.slope - vol / TAU).abs();
    let mut report = String::new();
    let _ = writeln!(report, "a = {}", fit.a);
    let _ = writeln!(report, "{:<24}{:>24}{:>24}", "", "real", "imag");
    let _ = writeln!(report, "{:<24}{:>24.16e}{:>24.16e}", "fitted", observed[0], observed[1]);
    let _ = writeln!(report, "{:<24}{:>24.16e}{:>24.16e}", "Vol + i pi CS", predicted_cs[0], predicted_cs[1]);
    let _ = writeln!(report, "{:<24}{:>24.16e}{:>24.16e}", "Vol + i U/(2pi)^2", predicted_u[0], predicted_u[1]);
    let _ = writeln!(report, "gap (real part) = {gap:.3e}");
    ConjectureGap {
        gap,
        predicted_cs,
        predicted_u,
        observed,
        report,
    }
}
