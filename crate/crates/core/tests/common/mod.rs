//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;

/// Planar-diagram code of the figure-eight knot: each crossing lists its four
/// edge labels counterclockwise, starting from the incoming under-strand.
pub const FIGURE_EIGHT_PD: [[usize; 4]; 4] = [[4, 2, 5, 1], [8, 6, 1, 5], [6, 3, 7, 4], [2, 7, 3, 8]];

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Kauffman bracket as a map from powers of `A` to integer coefficients.
pub fn kauffman_bracket(pd: &[[usize; 4]]) -> BTreeMap<i32, i64> {
    let n_edges = 2 * pd.len();
    let mut out: BTreeMap<i32, i64> = BTreeMap::new();
    for state in 0u32..(1 << pd.len()) {
        let mut parent: Vec<usize> = (0..=n_edges).collect();
        let mut a_count = 0i32;
        for (k, &[a, b, c, d]) in pd.iter().enumerate() {
            let (p, q) = if state >> k & 1 == 0 {
                a_count += 1;
                ((a, b), (c, d))
            } else {
                a_count -= 1;
                ((a, d), (b, c))
            };
            for (x, y) in [p, q] {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
        }
        let loops = (1..=n_edges)
            .filter(|&e| find(&mut parent, e) == e)
            .count();
        // A^(a_count) * d^(loops - 1) with d = -A^2 - A^-2.
        let mut term: BTreeMap<i32, i64> = BTreeMap::from([(a_count, 1)]);
        for _ in 1..loops {
            let mut next = BTreeMap::new();
            for (&e, &c) in &term {
                *next.entry(e + 2).or_insert(0) -= c;
                *next.entry(e - 2).or_insert(0) -= c;
            }
            term = next;
        }
        for (e, c) in term {
            *out.entry(e).or_insert(0) += c;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Writhe from the crossing signs of a PD code.
pub fn writhe(pd: &[[usize; 4]]) -> i32 {
    let n = 2 * pd.len();
    pd.iter()
        .map(|&[_, j, _, l]| {
            if j == l % n + 1 {
                1
            } else if l == j % n + 1 {
                -1
            } else {
                0
            }
        })
        .sum()
}

/// Jones polynomial `V(t) = (-A^3)^(-w) <D>` at `A = t^(-1/4)`, evaluated at
/// a complex `t`. Requires all exponents of `A` to be multiples of four.
pub fn jones_from_bracket(pd: &[[usize; 4]], t: Complex64) -> Complex64 {
    let w = writhe(pd);
    let sign = if w % 2 == 0 { 1.0 } else { -1.0 };
    kauffman_bracket(pd)
        .into_iter()
        .map(|(e, c)| {
            let total = e - 3 * w;
            assert_eq!(total % 4, 0, "bracket exponent {total} is not a multiple of 4");
            t.powi(-total / 4) * (c as f64 * sign)
        })
        .sum()
}

/// `Σ_{j<N} Π_{k<=j} |1 - q^k|^2` at `q = exp(2 pi i / N)`, summed directly.
pub fn kashaev_direct(n: u64) -> f64 {
    let q = Complex64::from_polar(1.0, std::f64::consts::TAU / n as f64);
    let mut total = 1.0;
    let mut term = 1.0;
    for k in 1..n {
        term *= (Complex64::new(1.0, 0.0) - q.powu(k as u32)).norm_sqr();
        total += term;
    }
    total
}

/// `Λ(θ) = (1/2) Σ sin(2 n θ)/n²` truncated after `n_terms` terms; the
/// remainder is of order `1 / (n_terms² |sin θ|)`.
pub fn lobachevsky_fourier(theta: f64, n_terms: usize) -> f64 {
    // Kahan summation keeps the long series at full precision.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=n_terms {
        let nf = n as f64;
        let y = (2.0 * nf * theta).sin() / (nf * nf) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    0.5 * sum
}

/// `|a - b|` relative to `max(|a|, |b|, 1)`.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
