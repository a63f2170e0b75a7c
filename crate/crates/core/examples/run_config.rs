//! Build a small configuration in code and run it through the pipeline into a
//! temporary directory.

use std::fs;

use apoly::config::{demo_config, RunConfig};
use apoly::pipeline::run_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("apoly-run-config-example");
    fs::create_dir_all(&dir)?;

    let mut cfg: RunConfig = demo_config();
    cfg.targets = vec!["loops:m0_r0.4".into(), "punctures".into(), "kashaev".into()];
    cfg.jones.n_values = vec![100, 200, 400, 800];
    cfg.output_dir = "out".into();
    let path = dir.join("config.json");
    fs::write(&path, cfg.to_json())?;

    let report = run_file(&path)?;
    println!("exit code {}", report.exit_code());
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    print!("{}", fs::read_to_string(dir.join("out/summary.txt"))?);
    Ok(())
}
