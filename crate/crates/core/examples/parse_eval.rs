//! Parse a Laurent polynomial and evaluate it; then solve for l at fixed m.

use apoly::cplx::c;
use apoly::poly::{parse_poly, roots_in_l, Var};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = "m^4*l^2 - (m^8 - m^6 - 2*m^4 - m^2 + 1)*l + m^4";
    let a = parse_poly(text)?;
    println!("input     : {text}");
    println!("canonical : {a}");
    println!("terms     : {}", a.len());

    let m = c(0.8, 0.3);
    let roots = roots_in_l(&a, m)?;
    let dl = a.partial(Var::L)?;
    let dm = a.partial(Var::M)?;
    for l in &roots {
        println!(
            "m = {m:.3}: l = {l:.12}, |A| = {:.1e}, dA/dl = {:.6}, dA/dm = {:.6}",
            a.eval(*l, m)?.norm(),
            dl.eval(*l, m)?,
            dm.eval(*l, m)?
        );
    }
    println!("product of the roots: {:.12}", roots[0] * roots[1]);

    for bad in ["2l", "l + ", "l ^ x"] {
        println!("{bad:>8} -> {}", parse_poly(bad).unwrap_err());
    }
    Ok(())
}
