use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use apoly::config::demo_config;
use apoly::error::ConfigError;
use apoly::knots::KnotDb;
use apoly::pipeline::{self, num, RunReport};
use apoly::poly::parse_poly;
use apoly::tracker::{probe_branch_points, Grid};

#[derive(Parser)]
#[command(name = "apoly", version, about = "A-polynomial curve lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON configuration; outputs go under its output_dir.
    Run { config: PathBuf },
    /// List grid points near branch points of the A-polynomial curve.
    Probe {
        /// Knot name in the built-in database, or a knot database file
        /// holding a single record.
        knot: String,
        /// re_min,re_max,im_min,im_max[,nx,ny]
        #[arg(allow_hyphen_values = true)]
        region: String,
        /// Relative |dA/dl| threshold.
        #[arg(long, default_value_t = 1e-2)]
        threshold: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the built-in figure-eight configuration.
    Demo {
        #[arg(long, default_value = "apoly-demo")]
        out: PathBuf,
        /// Print the configuration as JSON instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Check the syntax of a polynomial file and print its canonical form.
    Parse { polyfile: PathBuf },
}

fn config_failure(e: &ConfigError) -> ExitCode {
    eprintln!("config error: {e}");
    ExitCode::from(2)
}

fn finish(report: &RunReport) -> ExitCode {
    for c in &report.checks {
        println!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
    }
    for e in &report.errors {
        eprintln!("error in stage {} ({}): {}", e.stage, e.item, e.message);
    }
    if let Some(dir) = report.files.first().and_then(|f| f.parent()) {
        println!("outputs written to {}", dir.display());
    }
    ExitCode::from(report.exit_code() as u8)
}

fn parse_region(text: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 && parts.len() != 6 {
        return Err(format!("region '{text}' needs 4 or 6 comma-separated values"));
    }
    let f = |s: &str| s.parse::<f64>().map_err(|_| format!("bad number '{s}'"));
    let n = |s: &str| s.parse::<usize>().map_err(|_| format!("bad count '{s}'"));
    let (nx, ny) = if parts.len() == 6 { (n(parts[4])?, n(parts[5])?) } else { (201, 201) };
    Ok(Grid {
        re_min: f(parts[0])?,
        re_max: f(parts[1])?,
        im_min: f(parts[2])?,
        im_max: f(parts[3])?,
        nx,
        ny,
    })
}

fn probe(knot: &str, region: &str, threshold: f64, output: Option<PathBuf>) -> ExitCode {
    let record = match KnotDb::builtin().get(knot) {
        Ok(r) => r.clone(),
        Err(e) => {
            let Ok(text) = std::fs::read_to_string(knot) else {
                return config_failure(&e);
            };
            match KnotDb::parse(&text, knot).and_then(|db| {
                let name = db.names().next().map(str::to_string).unwrap_or_default();
                db.get(&name).cloned()
            }) {
                Ok(r) => r,
                Err(e) => return config_failure(&e),
            }
        }
    };
    let a = match record.validate() {
        Ok(a) => a,
        Err(e) => return config_failure(&e),
    };
    let grid = match parse_region(region) {
        Ok(g) => g,
        Err(m) => return config_failure(&ConfigError::Invalid(m)),
    };
    let found = match probe_branch_points(&a, &grid, threshold) {
        Ok(f) => f,
        Err(e) => return config_failure(&ConfigError::Invalid(e.to_string())),
    };
    let mut csv = String::from("m_re,m_im,l_re,l_im,relative_dadl\n");
    for b in &found {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            num(b.m.re),
            num(b.m.im),
            num(b.l.re),
            num(b.l.im),
            num(b.relative_dadl)
        ));
    }
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            println!("{} candidates written to {}", found.len(), path.display());
        }
        None => print!("{csv}"),
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => match pipeline::run_file(&config) {
            Ok(report) => finish(&report),
            Err(e) => config_failure(&e),
        },
        Command::Demo { out, print_config } => {
            let mut cfg = demo_config();
            if print_config {
                println!("{}", cfg.to_json());
                return ExitCode::SUCCESS;
            }
            cfg.output_dir = out.display().to_string();
            match pipeline::run(&cfg, std::path::Path::new(".")) {
                Ok(report) => finish(&report),
                Err(e) => config_failure(&e),
            }
        }
        Command::Parse { polyfile } => {
            let text = match std::fs::read_to_string(&polyfile) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", polyfile.display());
                    return ExitCode::from(2);
                }
            };
            match parse_poly(text.trim_end()) {
                Ok(p) => {
                    println!("{p}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}: {e}", polyfile.display());
                    ExitCode::from(1)
                }
            }
        }
        Command::Probe {
            knot,
            region,
            threshold,
            output,
        } => probe(&knot, &region, threshold, output),
    }
}
