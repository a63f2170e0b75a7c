//! The Lobachevsky function `Λ(θ) = -∫_0^θ log|2 sin t| dt`.

use std::f64::consts::{PI, TAU};

/// `ζ(2k) / (k (2k + 1))` folded into the Clausen power series; terms decay
/// like `(θ/2π)^(2k)` so thirty of them reach machine precision on `|θ| <= π`.
const CLAUSEN_TERMS: usize = 30;

fn zeta_even(k: usize) -> f64 {
    let p2 = PI * PI;
    match k {
        1 => p2 / 6.0,
        2 => p2 * p2 / 90.0,
        3 => p2 * p2 * p2 / 945.0,
        _ => {
            let s = 2.0 * k as f64;
            (1..=200).rev().map(|n| (n as f64).powf(-s)).sum()
        }
    }
}

/// Clausen function `Cl2(θ) = Σ sin(nθ)/n²`.
pub fn clausen2(theta: f64) -> f64 {
    let mut x = theta.rem_euclid(TAU);
    let mut sign = 1.0;
    if x > PI {
        x = TAU - x;
        sign = -1.0;
    }
    if x == 0.0 || x == PI {
        return 0.0;
    }
    let r = x / TAU;
    let r2 = r * r;
    let mut pow = r2;
    let mut sum = 0.0;
    for k in 1..=CLAUSEN_TERMS {
        let kf = k as f64;
        sum += zeta_even(k) / (kf * (2.0 * kf + 1.0)) * pow;
        pow *= r2;
    }
    sign * (x - x * x.ln() + x * sum)
}

/// `Λ(θ) = Cl2(2θ) / 2`, odd and π-periodic.
pub fn lobachevsky(theta: f64) -> f64 {
    0.5 * clausen2(2.0 * theta)
}

/// Hyperbolic volume of the figure-eight knot complement, `6 Λ(π/3)`.
pub fn figure_eight_volume() -> f64 {
    6.0 * lobachevsky(PI / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct Fourier series with pairs of terms averaged to speed up the tail.
    fn fourier_lobachevsky(theta: f64, n_terms: usize) -> f64 {
        let mut s = 0.0;
        for n in 1..=n_terms {
            let nf = n as f64;
            s += (2.0 * nf * theta).sin() / (nf * nf);
        }
        // Tail Σ_{n>N} sin(2nθ)/n² is bounded by ~1/(N² |sin θ|).
        0.5 * s
    }

    fn simpson_lobachevsky(theta: f64) -> f64 {
        // -∫_0^θ log|2 sin t| dt, splitting off the log singularity at 0:
        // log(2 sin t) = log(2t) + log(sin t / t).
        let n = 20_000;
        let h = theta / n as f64;
        let g = |t: f64| if t == 0.0 { 0.0 } else { (t.sin() / t).ln() };
        let mut s = g(0.0) + g(theta);
        for i in 1..n {
            s += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let smooth = s * h / 3.0;
        let singular = theta * ((2.0 * theta).ln() - 1.0);
        -(smooth + singular)
    }

    #[test]
    fn agrees_with_fourier_series() {
        for &theta in &[0.1, 0.3, PI / 6.0, PI / 3.0, 1.3, 2.0, 2.9] {
            let a = lobachevsky(theta);
            let b = fourier_lobachevsky(theta, 2_000_000);
            assert!((a - b).abs() < 1e-11, "theta {theta}: {a} vs {b}");
        }
    }

    #[test]
    fn agrees_with_integral_definition() {
        for &theta in &[0.2, PI / 3.0, 1.0, 1.5] {
            let a = lobachevsky(theta);
            let b = simpson_lobachevsky(theta);
            assert!((a - b).abs() < 1e-12, "theta {theta}: {a} vs {b}");
        }
    }

    #[test]
    fn symmetries() {
        for &theta in &[0.2, 0.7, 1.1] {
            assert!((lobachevsky(-theta) + lobachevsky(theta)).abs() < 1e-15);
            assert!((lobachevsky(theta + PI) - lobachevsky(theta)).abs() < 1e-14);
        }
        assert_eq!(lobachevsky(0.0), 0.0);
        assert!(lobachevsky(PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn figure_eight_volume_value() {
        let v = figure_eight_volume();
        assert!((v - 2.029_883_212_819_307).abs() < 1e-13, "{v}");
    }
}
