//! Roots in `l` of `A(l, m)` at fixed `m`.

use num_complex::Complex64;

use super::LaurentBiPoly;
use crate::error::PolyError;

const DK_BUDGET: usize = 2000;
const NEWTON_POLISH: usize = 8;
/// Roots closer than this are reported as one cluster.
pub const CLUSTER_RADIUS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// All roots in `l` (with multiplicity) of `p(l, m)` after clearing the
/// lowest power of `l`.
///
/// Durand-Kerner from roots of unity scaled by the Fujiwara bound, followed by
/// Newton polishing of simple roots. Roots within [`CLUSTER_RADIUS`] of each
/// other are replaced by their centroid, which is far more accurate than the
/// individual estimates at a multiple root.
pub fn roots_in_l(p: &LaurentBiPoly, m: Complex64) -> Result<Vec<Complex64>, PolyError> {
    if m == Complex64::new(0.0, 0.0) {
        return Err(PolyError::Domain('m'));
    }
    let (_, coeffs) = p.coefficients_in_l(m)?;
    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if cmax == 0.0 {
        return Err(PolyError::Degenerate {
            m,
            reason: "polynomial vanishes identically at this m".into(),
        });
    }
    let lead = *coeffs.last().unwrap();
    if lead.norm() <= 1e-14 * cmax {
        return Err(PolyError::Degenerate {
            m,
            reason: "leading l-coefficient vanishes".into(),
        });
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();

    let mut z = initial_configuration(&monic);
    for _ in 0..DK_BUDGET {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // Coincident estimates: nudge deterministically.
                let nudge = Complex64::new(1e-9, 1e-9) * (1.0 + z[i].norm());
                z[i] += nudge;
                continue;
            }
            let step = horner(&monic, z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }

    let clusters = cluster_roots(&z);
    let mut out = Vec::with_capacity(n);
    for cl in &clusters {
        let mut r = cl.value;
        if cl.multiplicity == 1 {
            r = polish(&monic, r);
        }
        out.extend(std::iter::repeat_n(r, cl.multiplicity));
    }

    for &r in &out {
        let res = p.eval(r, m)?.norm();
        let scale = p.term_scale(r, m)?;
        if res > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(PolyError::NonConvergence {
                iterations: DK_BUDGET,
            });
        }
    }
    Ok(out)
}

/// Groups values closer than [`CLUSTER_RADIUS`] (transitively) and returns
/// each group's centroid and size. Order follows first appearance.
pub fn cluster_roots(values: &[Complex64]) -> Vec<RootCluster> {
    let n = values.len();
    let mut group = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        group[i] = next;
        let mut stack = vec![i];
        while let Some(k) = stack.pop() {
            for j in 0..n {
                if group[j] == usize::MAX
                    && (values[j] - values[k]).norm() < CLUSTER_RADIUS * (1.0 + values[k].norm())
                {
                    group[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    (0..next)
        .map(|g| {
            let members: Vec<Complex64> =
                (0..n).filter(|&i| group[i] == g).map(|i| values[i]).collect();
            let sum: Complex64 = members.iter().sum();
            RootCluster {
                value: sum / members.len() as f64,
                multiplicity: members.len(),
            }
        })
        .collect()
}

fn horner(monic: &[Complex64], z: Complex64) -> Complex64 {
    monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_with_derivative(monic: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in monic.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn polish(monic: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = (horner(monic, z).norm(), z);
    for _ in 0..NEWTON_POLISH {
        let (p, dp) = horner_with_derivative(monic, z);
        if dp.norm() == 0.0 {
            break;
        }
        z -= p / dp;
        let r = horner(monic, z).norm();
        if r < best.0 {
            best = (r, z);
        } else {
            break;
        }
    }
    best.1
}

/// Points on the circle of radius equal to the Fujiwara bound, at angles
/// `2*pi*k/n + 0.4` so no start lies on the real axis.
fn initial_configuration(monic: &[Complex64]) -> Vec<Complex64> {
    let n = monic.len() - 1;
    let mut bound: f64 = 0.0;
    for k in 1..=n {
        let a = monic[n - k].norm();
        let term = if k == n { (a / 2.0).powf(1.0 / k as f64) } else { a.powf(1.0 / k as f64) };
        bound = bound.max(term);
    }
    let radius = (2.0 * bound).max(1e-3);
    (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}
