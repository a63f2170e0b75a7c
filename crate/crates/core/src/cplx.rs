//! Small complex-number helpers shared across modules.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Argument in `[0, 2*pi)`.
pub fn arg_0_2pi(z: Complex64) -> f64 {
    let a = z.arg();
    let a = if a < 0.0 { a + TAU } else { a };
    // -0.0 and values rounding up to 2*pi both land on 0.
    if a >= TAU || a == 0.0 {
        0.0
    } else {
        a
    }
}

/// Principal value of `x` reduced to `(-pi, pi]`.
pub fn wrap_pi(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Serde adapter writing a complex number as `[re, im]`.
pub mod serde_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}
