//! Values of Vol, CS and U at m = -exp(i pi a) next to the growth rate of
//! J_N(exp(2 pi i / k)), k = round(N / a).

use apoly::config::{demo_config, Stage};
use apoly::pipeline::execute;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = demo_config();
    cfg.targets = vec![Stage::Loops.name().into(), Stage::Conjecture.name().into()];
    let resolved = cfg.resolve(std::path::Path::new("."))?;
    let report = execute(&resolved);
    for e in &report.errors {
        eprintln!("{}: {}", e.item, e.message);
    }
    for note in &report.notes {
        println!("{note}");
    }
    Ok(())
}
