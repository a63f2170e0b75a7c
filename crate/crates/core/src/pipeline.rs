//! Orchestration of a [`RunConfig`]. Each requested stage becomes one CSV
//! table; `summary.txt` collects the checks.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{effective_seed, ConjecturePoint, Resolved, RunConfig, Stage};
use crate::error::ConfigError;
use crate::forms::{
    cs_along, eta_xi_error, integrate_eta, integrate_xi, kirk_klassen, lift_refined, special_cs_u, vol_along,
};
use crate::jones::{conjecture_gap, generalized_sequence, growth_rate, kashaev_sequence, JonesPoint};
use crate::symbols::{analyze_puncture, estimate_symbol_order, recognize_rational, RationalRecognition};
use crate::tracker::{PathSpec, Segment, TrackedPath};

/// Formats a float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV file: a `#` comment line carrying the timestamp, the column
/// names, then the rows.
#[derive(Debug, Clone)]
pub struct Table {
    pub file_name: &'static str,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(file_name: &'static str, columns: &'static [&'static str]) -> Self {
        Self {
            file_name,
            columns,
            rows: Vec::new(),
        }
    }

    /// Body without the timestamp line.
    pub fn body(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    fn write(&self, dir: &Path, stamp: &str) -> std::io::Result<PathBuf> {
        let path = dir.join(self.file_name);
        fs::write(&path, format!("# apoly {} generated {stamp}\n{}", env!("CARGO_PKG_VERSION"), self.body()))?;
        Ok(path)
    }
}

/// A pass/fail line of the summary, pointing at the CSV row that backs it.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub file: &'static str,
    pub row_key: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageError {
    pub stage: Stage,
    pub item: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub errors: Vec<StageError>,
    pub notes: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    /// 0 when no stage errored, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn table(&self, file_name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file_name == file_name)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self, stamp: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# apoly {} generated {stamp}", env!("CARGO_PKG_VERSION"));
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(s, "checks: {passed}/{} passed, stage errors: {}", self.checks.len(), self.errors.len());
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {} [{} row {}] {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.file,
                c.row_key,
                c.detail
            );
        }
        for e in &self.errors {
            let _ = writeln!(s, "ERROR stage {} ({}): {}", e.stage, e.item, e.message);
        }
        for n in &self.notes {
            let _ = writeln!(s);
            s.push_str(n);
            if !n.ends_with('\n') {
                s.push('\n');
            }
        }
        s
    }
}

/// Loads `config_path`, runs it and writes the outputs.
pub fn run_file(config_path: &Path) -> Result<RunReport, ConfigError> {
    let (cfg, base) = RunConfig::load(config_path)?;
    run(&cfg, &base)
}

/// Runs a configuration whose relative paths are anchored at `base`.
pub fn run(cfg: &RunConfig, base: &Path) -> Result<RunReport, ConfigError> {
    let resolved = cfg.resolve(base)?;
    let report = execute(&resolved);
    write_outputs(report, &resolved.output_dir)
}

fn write_outputs(mut report: RunReport, dir: &Path) -> Result<RunReport, ConfigError> {
    let io = |e: std::io::Error| ConfigError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    fs::create_dir_all(dir).map_err(io)?;
    let stamp = timestamp();
    let mut files = Vec::new();
    for t in &report.tables {
        files.push(t.write(dir, &stamp).map_err(io)?);
    }
    let summary = dir.join("summary.txt");
    fs::write(&summary, report.summary(&stamp)).map_err(io)?;
    files.push(summary);
    report.files = files;
    Ok(report)
}

fn timestamp() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("unix:{secs}")
}

struct LoopOutcome {
    row: Vec<String>,
    recognition: Option<RationalRecognition>,
    check_eta: Check,
    check_xi: Check,
}

fn loop_stage(r: &Resolved, name: &str, spec: &PathSpec) -> Result<LoopOutcome, String> {
    let cfg = &r.config;
    let spec = effective_seed(&r.poly, spec, cfg.snap_seeds).map_err(|e| e.to_string())?;
    let refined = lift_refined(
        &r.poly,
        &spec,
        &cfg.controls,
        cfg.refine.target,
        cfg.refine.max_refinements,
        eta_xi_error,
    )
    .map_err(|e| e.to_string())?;
    let path = &refined.path;
    if !path.is_closed() {
        return Err("lift does not close up (monodromy is nontrivial)".into());
    }
    let eta = integrate_eta(path);
    let xi = integrate_xi(path);
    let ratio = xi.value / (TAU * TAU);

    let half_ctrl = refined.ctrl.with_max_step(refined.ctrl.max_step * 0.5);
    let half = crate::tracker::lift_path(&r.poly, &spec, &half_ctrl).map_err(|e| e.to_string())?;
    let ratio_half = integrate_xi(&half).value / (TAU * TAU);

    let q_max = cfg.rational.q_max;
    let tol = cfg.rational.tol;
    let rec = recognize_rational(ratio, q_max, tol).ok();
    let rec_half = recognize_rational(ratio_half, q_max, tol).ok();
    let recognition = match (rec, rec_half) {
        (Some(mut a), Some(b)) => {
            a.stable = a.same_fraction(&b);
            Some(a)
        }
        (a, _) => a,
    };

    let eta_ok = eta.value.abs() < cfg.refine.eta_tol;
    let (p, q, residual, stable) = match &recognition {
        Some(rr) => (rr.p.to_string(), rr.q.to_string(), num(rr.residual), rr.stable.to_string()),
        None => ("".into(), "".into(), "".into(), "false".into()),
    };
    let row = vec![
        name.to_string(),
        path.len().to_string(),
        num(refined.ctrl.max_step),
        num(eta.value),
        num(eta.est_error),
        num(xi.value),
        num(xi.est_error),
        num(ratio),
        num(ratio_half),
        p.clone(),
        q.clone(),
        residual,
        stable.clone(),
    ];
    let check_eta = Check {
        name: format!("eta-exact {name}"),
        passed: eta_ok,
        file: "loops.csv",
        row_key: name.to_string(),
        detail: format!("|eta| = {:.3e} (< {:.0e})", eta.value.abs(), cfg.refine.eta_tol),
    };
    let check_xi = Check {
        name: format!("xi-rational {name}"),
        passed: recognition.map(|r| r.stable).unwrap_or(false),
        file: "loops.csv",
        row_key: name.to_string(),
        detail: match recognition {
            Some(rr) => format!("xi/(4 pi^2) = {p}/{q}, residual {:.1e}, stable {stable}", rr.residual),
            None => format!("xi/(4 pi^2) = {ratio:.10} not recognized with q <= {q_max}"),
        },
    };
    Ok(LoopOutcome {
        row,
        recognition,
        check_eta,
        check_xi,
    })
}

fn lift_for_report(r: &Resolved, spec: &PathSpec) -> Result<TrackedPath, String> {
    let cfg = &r.config;
    let spec = effective_seed(&r.poly, spec, cfg.snap_seeds).map_err(|e| e.to_string())?;
    lift_refined(
        &r.poly,
        &spec,
        &cfg.controls,
        cfg.refine.target,
        cfg.refine.max_refinements,
        eta_xi_error,
    )
    .map(|refined| refined.path)
    .map_err(|e| e.to_string())
}

fn conjecture_spec(r: &Resolved, p: &ConjecturePoint) -> PathSpec {
    if let Some(spec) = &p.path {
        return spec.clone();
    }
    let g = r.knot.geom_seed;
    let target = p.m_target();
    // The complete structure itself sits at m = 1; stay at the seed point.
    let end = if (target - 1.0).norm() <= g.epsilon * (1.0 + 1e-9) {
        g.m0
    } else {
        target
    };
    PathSpec::new(vec![Segment::line(g.m0, end)], g.l_seed, false)
}

fn jones_row(p: &JonesPoint) -> Vec<String> {
    vec![
        p.n.to_string(),
        p.k.to_string(),
        num(p.a),
        num(p.value.log_abs),
        num(p.value.arg),
        format!("{:.3}", p.runtime_ms),
    ]
}

/// Runs the stages of a resolved configuration without touching the disk.
pub fn execute(r: &Resolved) -> RunReport {
    let cfg = &r.config;
    let mut report = RunReport::default();
    let err = |report: &mut RunReport, stage: Stage, item: &str, message: String| {
        report.errors.push(StageError {
            stage,
            item: item.to_string(),
            message,
        })
    };

    let mut symbol_order = 1u64;
    if r.wants(Stage::Loops) {
        let mut table = Table::new(
            "loops.csv",
            &[
                "loop",
                "n_samples",
                "max_step",
                "eta",
                "eta_err",
                "xi",
                "xi_err",
                "xi_over_4pi2",
                "xi_over_4pi2_half_step",
                "p",
                "q",
                "residual",
                "stable",
            ],
        );
        let selected: Vec<(&String, &PathSpec)> =
            cfg.loops.iter().filter(|(n, _)| r.selects(Stage::Loops, n)).collect();
        let outcomes: Vec<_> = selected
            .par_iter()
            .map(|(name, spec)| (name.as_str(), loop_stage(r, name, spec)))
            .collect();
        let mut recognitions = Vec::new();
        for (name, out) in outcomes {
            match out {
                Ok(o) => {
                    table.rows.push(o.row);
                    report.checks.push(o.check_eta);
                    report.checks.push(o.check_xi);
                    recognitions.extend(o.recognition);
                }
                Err(m) => err(&mut report, Stage::Loops, name, m),
            }
        }
        if let Ok(order) = estimate_symbol_order(&recognitions) {
            symbol_order = order;
        }
        report.notes.push(format!(
            "symbol order estimate (lcm of stable denominators): {symbol_order}"
        ));
        report.tables.push(table);
    }

    if r.wants(Stage::Punctures) {
        let mut table = Table::new(
            "punctures.csv",
            &[
                "puncture_id",
                "v_l",
                "v_m",
                "tame_re",
                "tame_im",
                "regulator_re",
                "regulator_im",
                "match_abs_err",
            ],
        );
        let selected: Vec<_> = cfg
            .punctures
            .iter()
            .filter(|p| r.selects(Stage::Punctures, &p.id))
            .collect();
        let outcomes: Vec<_> = selected
            .par_iter()
            .map(|p| (p, analyze_puncture(&r.poly, p, &cfg.controls, cfg.refine.target)))
            .collect();
        for (p, out) in outcomes {
            match out {
                Ok(rep) => {
                    table.rows.push(vec![
                        rep.id.clone(),
                        rep.v_l.v.to_string(),
                        rep.v_m.v.to_string(),
                        num(rep.tame.re),
                        num(rep.tame.im),
                        num(rep.regulator.value.re),
                        num(rep.regulator.value.im),
                        num(rep.match_abs_err),
                    ]);
                    report.checks.push(Check {
                        name: format!("tame-symbol {}", rep.id),
                        passed: rep.match_abs_err < 1e-6,
                        file: "punctures.csv",
                        row_key: rep.id.clone(),
                        detail: format!("|r - T| = {:.3e} (< 1e-6)", rep.match_abs_err),
                    });
                }
                Err(e) => err(&mut report, Stage::Punctures, &p.id, e.to_string()),
            }
        }
        report.tables.push(table);
    }

    // Lifted open paths are shared by the path and Kirk-Klassen stages.
    let needs_paths = r.wants(Stage::Paths) || r.wants(Stage::KirkKlassen);
    let lifted: Vec<(String, bool, Result<TrackedPath, String>)> = if needs_paths {
        let mut items: Vec<(String, bool, &PathSpec)> = Vec::new();
        for (name, spec) in &cfg.paths {
            if r.selects(Stage::Paths, name) || r.selects(Stage::KirkKlassen, name) {
                items.push((name.clone(), false, spec));
            }
        }
        for (name, spec) in &cfg.loops {
            if r.selects(Stage::KirkKlassen, name) {
                items.push((name.clone(), true, spec));
            }
        }
        items
            .par_iter()
            .map(|(name, is_loop, spec)| (name.clone(), *is_loop, lift_for_report(r, spec)))
            .collect()
    } else {
        Vec::new()
    };

    if r.wants(Stage::Paths) {
        let mut table = Table::new(
            "paths.csv",
            &[
                "path",
                "n_samples",
                "l_end_re",
                "l_end_im",
                "m_end_re",
                "m_end_im",
                "eta",
                "xi",
                "vol",
                "cs",
                "u",
                "u_over_4pi2_mod1",
            ],
        );
        for (name, is_loop, path) in &lifted {
            if *is_loop || !r.selects(Stage::Paths, name) {
                continue;
            }
            match path {
                Ok(path) => {
                    let end = path.last().expect("lifted path has samples");
                    let vol = vol_along(path, r.knot.vol_k);
                    let cs = cs_along(path, r.knot.cs_k);
                    let u = special_cs_u(path, symbol_order);
                    table.rows.push(vec![
                        name.clone(),
                        path.len().to_string(),
                        num(end.l.re),
                        num(end.l.im),
                        num(end.m.re),
                        num(end.m.im),
                        num(integrate_eta(path).value),
                        num(integrate_xi(path).value),
                        num(vol),
                        num(cs),
                        num(u.value),
                        num(u.normalized_mod1),
                    ]);
                    report.checks.push(Check {
                        name: format!("path-values-finite {name}"),
                        passed: vol.is_finite() && cs.is_finite() && u.value.is_finite(),
                        file: "paths.csv",
                        row_key: name.clone(),
                        detail: format!("Vol = {vol:.12}, CS = {cs:.12}, U = {:.12}", u.value),
                    });
                }
                Err(m) => err(&mut report, Stage::Paths, name, m.clone()),
            }
        }
        report.tables.push(table);
    }

    if r.wants(Stage::KirkKlassen) {
        let mut table = Table::new(
            "kirk_klassen.csv",
            &["path", "value_re", "value_im", "alternate_re", "alternate_im", "abs_diff"],
        );
        for (name, _, path) in &lifted {
            if !r.selects(Stage::KirkKlassen, name) {
                continue;
            }
            match path {
                Ok(path) => {
                    let kk = kirk_klassen(path);
                    table.rows.push(vec![
                        name.clone(),
                        num(kk.value.re),
                        num(kk.value.im),
                        num(kk.alternate.re),
                        num(kk.alternate.im),
                        num(kk.abs_diff),
                    ]);
                    report.checks.push(Check {
                        name: format!("kirk-klassen {name}"),
                        passed: kk.abs_diff < 1e-8,
                        file: "kirk_klassen.csv",
                        row_key: name.clone(),
                        detail: format!("|difference| = {:.3e} (< 1e-8)", kk.abs_diff),
                    });
                }
                Err(m) => {
                    if !r.wants(Stage::Paths) {
                        err(&mut report, Stage::KirkKlassen, name, m.clone());
                    }
                }
            }
        }
        report.tables.push(table);
    }

    let mut jones = Table::new("jones.csv", &["N", "k", "a", "log_abs", "arg", "runtime_ms"]);
    let mut growth = Table::new(
        "growth.csv",
        &[
            "a",
            "points",
            "slope",
            "log_correction",
            "intercept",
            "rms_residual",
            "two_pi_slope",
            "vol",
            "abs_err",
        ],
    );
    let fit_row = |fit: &crate::jones::GrowthFit, vol: f64| {
        vec![
            num(fit.a),
            fit.points.to_string(),
            num(fit.slope),
            num(fit.log_correction),
            num(fit.intercept),
            num(fit.rms_residual),
            num(TAU * fit.slope),
            num(vol),
            num((TAU * fit.slope - vol).abs()),
        ]
    };

    if r.wants(Stage::Kashaev) {
        match kashaev_sequence(&cfg.jones.n_values) {
            Ok(seq) => {
                jones.rows.extend(seq.iter().map(jones_row));
                match growth_rate(&seq, 1.0) {
                    Ok(fit) => {
                        let e = (TAU * fit.slope - r.knot.vol_k).abs();
                        growth.rows.push(fit_row(&fit, r.knot.vol_k));
                        report.checks.push(Check {
                            name: "kashaev-growth".into(),
                            passed: e < cfg.jones.slope_tol,
                            file: "growth.csv",
                            row_key: "a=1".into(),
                            detail: format!(
                                "2 pi slope = {:.9}, Vol = {:.9}, |diff| = {e:.3e} (< {:.0e}); log N coefficient {:.4}",
                                TAU * fit.slope,
                                r.knot.vol_k,
                                cfg.jones.slope_tol,
                                fit.log_correction
                            ),
                        });
                    }
                    Err(e) => err(&mut report, Stage::Kashaev, "growth fit", e.to_string()),
                }
            }
            Err(e) => err(&mut report, Stage::Kashaev, "sequence", e.to_string()),
        }
    }

    if r.wants(Stage::Conjecture) {
        let mut table = Table::new(
            "conjecture.csv",
            &[
                "a",
                "m_re",
                "m_im",
                "l_re",
                "l_im",
                "vol",
                "cs",
                "u",
                "slope",
                "log_correction",
                "gap",
                "observed_re",
                "observed_im",
                "predicted_cs_re",
                "predicted_cs_im",
                "predicted_u_re",
                "predicted_u_im",
            ],
        );
        let mut text = String::from("generalized conjecture, growth rate per k versus (Vol + i X)/(2 pi):\n");
        let outcomes: Vec<_> = cfg
            .conjecture
            .par_iter()
            .map(|p| {
                let item = format!("a={}", p.a);
                let path = lift_for_report(r, &conjecture_spec(r, p)).map_err(|m| (item.clone(), m))?;
                let seq = generalized_sequence(&cfg.jones.n_values, p.a).map_err(|e| (item.clone(), e.to_string()))?;
                let fit = growth_rate(&seq, p.a).map_err(|e| (item.clone(), e.to_string()))?;
                Ok((p, path, seq, fit))
            })
            .collect();
        for out in outcomes {
            match out {
                Ok((p, path, seq, fit)) => {
                    let end = path.last().expect("lifted path has samples");
                    let vol = vol_along(&path, r.knot.vol_k);
                    let cs = cs_along(&path, r.knot.cs_k);
                    let u = special_cs_u(&path, symbol_order).value;
                    let gap = conjecture_gap(&fit, vol, cs, u);
                    jones.rows.extend(seq.iter().map(jones_row));
                    growth.rows.push(fit_row(&fit, vol));
                    let key = format!("a={}", p.a);
                    table.rows.push(vec![
                        num(p.a),
                        num(end.m.re),
                        num(end.m.im),
                        num(end.l.re),
                        num(end.l.im),
                        num(vol),
                        num(cs),
                        num(u),
                        num(fit.slope),
                        num(fit.log_correction),
                        num(gap.gap),
                        num(gap.observed[0]),
                        num(gap.observed[1]),
                        num(gap.predicted_cs[0]),
                        num(gap.predicted_cs[1]),
                        num(gap.predicted_u[0]),
                        num(gap.predicted_u[1]),
                    ]);
                    let finite = [vol, cs, u, fit.slope, gap.gap].iter().all(|x| x.is_finite());
                    report.checks.push(Check {
                        name: format!("conjecture-finite {key}"),
                        passed: finite,
                        file: "conjecture.csv",
                        row_key: key.clone(),
                        detail: format!("Vol = {vol:.9}, CS = {cs:.9}, U = {u:.9}, gap = {:.3e}", gap.gap),
                    });
                    text.push_str(&gap.report);
                    let _ = writeln!(text, "endpoint m = {}, l = {}", fmt_c(end.m), fmt_c(end.l));
                }
                Err((item, m)) => err(&mut report, Stage::Conjecture, &item, m),
            }
        }
        report.notes.push(text);
        report.tables.push(table);
    }

    if r.wants(Stage::Kashaev) || r.wants(Stage::Conjecture) {
        report.tables.push(jones);
        report.tables.push(growth);
    }
    report
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.12} {} {:.12}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
}
