//! Run configuration: a JSON document naming the knot, the paths and loops to
//! lift, the punctures to examine and the pipeline stages to run.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cplx::c;
use crate::error::ConfigError;
use crate::knots::{KnotDb, KnotRecord};
use crate::poly::{roots_in_l, LaurentBiPoly};
use crate::symbols::Puncture;
use crate::tracker::{loop_around_m, snap_seed, PathSpec, Segment, StepControls};

/// Environment variable overriding [`StepControls::seed_tol`].
pub const SEED_TOL_ENV: &str = "APOLY_SEED_TOL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KnotRef {
    Name(String),
    Inline(KnotRecord),
}

/// A pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    /// `eta` and `xi` periods of closed loops, with rational recognition.
    Loops,
    /// Tame symbols against regulators at punctures.
    Punctures,
    /// `Vol`, `CS` and `U` along open paths.
    Paths,
    /// Both Kirk-Klassen expressions on every path and loop.
    KirkKlassen,
    /// Kashaev invariants and their growth rate.
    Kashaev,
    /// Generalized volume-conjecture comparison at `m = -exp(i pi a)`.
    Conjecture,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Loops,
        Stage::Punctures,
        Stage::Paths,
        Stage::KirkKlassen,
        Stage::Kashaev,
        Stage::Conjecture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Loops => "loops",
            Stage::Punctures => "punctures",
            Stage::Paths => "paths",
            Stage::KirkKlassen => "kirk_klassen",
            Stage::Kashaev => "kashaev",
            Stage::Conjecture => "conjecture",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| ConfigError::UnknownName {
                kind: "target",
                name: s.to_string(),
            })
    }
}

/// A requested stage, optionally restricted to named items: `"loops"` or
/// `"loops:m0_small"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Target {
    pub stage: Stage,
    pub item: Option<String>,
}

impl FromStr for Target {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (stage, item) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b.to_string())),
            None => (s, None),
        };
        Ok(Target {
            stage: stage.trim().parse()?,
            item,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefineSettings {
    /// Target for the quadrature error estimate.
    pub target: f64,
    pub max_refinements: usize,
    /// Pass threshold for `|∮ eta|`.
    pub eta_tol: f64,
}

impl Default for RefineSettings {
    fn default() -> Self {
        Self {
            target: 1e-9,
            max_refinements: 8,
            eta_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RationalSettings {
    pub q_max: i64,
    pub tol: f64,
}

impl Default for RationalSettings {
    fn default() -> Self {
        Self { q_max: 48, tol: 1e-5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JonesSettings {
    pub n_values: Vec<u64>,
    /// Pass threshold for `|2 pi slope - Vol|`.
    pub slope_tol: f64,
}

impl Default for JonesSettings {
    fn default() -> Self {
        Self {
            n_values: vec![500, 1000, 2000, 4000],
            slope_tol: 1e-3,
        }
    }
}

/// One point `m = -exp(i pi a)` of the generalized conjecture. Without a
/// `path` the branch is reached by a straight line from the geometric seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjecturePoint {
    pub a: f64,
    #[serde(default)]
    pub path: Option<PathSpec>,
}

impl ConjecturePoint {
    pub fn m_target(&self) -> Complex64 {
        -Complex64::from_polar(1.0, PI * self.a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub knot: KnotRef,
    /// Extra knot database, relative to the config file.
    #[serde(default)]
    pub knot_db: Option<String>,
    #[serde(default)]
    pub paths: BTreeMap<String, PathSpec>,
    #[serde(default)]
    pub loops: BTreeMap<String, PathSpec>,
    #[serde(default)]
    pub punctures: Vec<Puncture>,
    pub targets: Vec<String>,
    #[serde(default)]
    pub controls: StepControls,
    #[serde(default)]
    pub refine: RefineSettings,
    #[serde(default)]
    pub rational: RationalSettings,
    #[serde(default)]
    pub jones: JonesSettings,
    #[serde(default)]
    pub conjecture: Vec<ConjecturePoint>,
    /// Replace each seed by the nearest root of `A(., m_start)` before lifting.
    #[serde(default)]
    pub snap_seeds: bool,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

fn default_output_dir() -> String {
    "out".into()
}

/// A configuration with names resolved and the knot loaded.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub knot: KnotRecord,
    pub poly: LaurentBiPoly,
    pub targets: Vec<Target>,
    pub output_dir: PathBuf,
}

impl Resolved {
    pub fn wants(&self, stage: Stage) -> bool {
        self.targets.iter().any(|t| t.stage == stage)
    }

    /// Whether `item` of `stage` is selected.
    pub fn selects(&self, stage: Stage, item: &str) -> bool {
        self.targets
            .iter()
            .any(|t| t.stage == stage && t.item.as_deref().is_none_or(|n| n == item))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            source_name: "config".into(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Reads a config file; the returned directory anchors relative paths.
    pub fn load(path: &Path) -> Result<(Self, PathBuf), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let cfg = serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            source_name: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks names and specs, applies the seed-tolerance override from the
    /// environment and loads the knot.
    pub fn resolve(&self, base: &Path) -> Result<Resolved, ConfigError> {
        let mut config = self.clone();
        apply_env_overrides(&mut config.controls)?;
        if config.targets.is_empty() {
            return Err(ConfigError::Invalid("targets must not be empty".into()));
        }
        let targets = config
            .targets
            .iter()
            .map(|t| t.parse::<Target>())
            .collect::<Result<Vec<_>, _>>()?;
        for t in &targets {
            if let Some(item) = &t.item {
                let known = match t.stage {
                    Stage::Loops => config.loops.contains_key(item),
                    Stage::Paths => config.paths.contains_key(item),
                    Stage::KirkKlassen => config.loops.contains_key(item) || config.paths.contains_key(item),
                    Stage::Punctures => config.punctures.iter().any(|p| &p.id == item),
                    Stage::Kashaev | Stage::Conjecture => false,
                };
                if !known {
                    return Err(ConfigError::UnknownName {
                        kind: t.stage.name(),
                        name: item.clone(),
                    });
                }
            }
        }
        for (kind, map) in [("path", &config.paths), ("loop", &config.loops)] {
            for (name, spec) in map {
                spec.validate()
                    .map_err(|e| ConfigError::Invalid(format!("{kind} {name}: {e}")))?;
            }
        }
        for (name, spec) in &config.loops {
            if !spec.closed {
                return Err(ConfigError::Invalid(format!("loop {name} is not marked closed")));
            }
        }
        for p in &config.conjecture {
            if let Some(spec) = &p.path {
                spec.validate()
                    .map_err(|e| ConfigError::Invalid(format!("conjecture a = {}: {e}", p.a)))?;
            }
        }
        if targets.iter().any(|t| t.stage == Stage::Kashaev) && config.jones.n_values.is_empty() {
            return Err(ConfigError::Invalid("jones.n_values must not be empty".into()));
        }

        let knot = match &config.knot {
            KnotRef::Inline(record) => record.clone(),
            KnotRef::Name(name) => match &config.knot_db {
                Some(db_path) => {
                    let path = base.join(db_path);
                    let text = std::fs::read_to_string(&path).map_err(|e| ConfigError::Io {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })?;
                    KnotDb::parse(&text, &path.display().to_string())?.get(name)?.clone()
                }
                None => KnotDb::builtin().get(name)?.clone(),
            },
        };
        let poly = knot.validate()?;
        let output_dir = base.join(&config.output_dir);
        Ok(Resolved {
            config,
            knot,
            poly,
            targets,
            output_dir,
        })
    }
}

/// Applies `APOLY_SEED_TOL` when set.
pub fn apply_env_overrides(ctrl: &mut StepControls) -> Result<(), ConfigError> {
    if let Ok(v) = std::env::var(SEED_TOL_ENV) {
        let tol: f64 = v
            .trim()
            .parse()
            .map_err(|_| ConfigError::Invalid(format!("{SEED_TOL_ENV}={v} is not a number")))?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ConfigError::Invalid(format!("{SEED_TOL_ENV}={v} must be positive")));
        }
        ctrl.seed_tol = tol;
    }
    Ok(())
}

fn root_near(a: &LaurentBiPoly, m: Complex64, pick: impl Fn(&Complex64) -> f64) -> Complex64 {
    let roots = roots_in_l(a, m).expect("figure-eight roots at a regular point");
    *roots
        .iter()
        .min_by(|x, y| pick(x).total_cmp(&pick(y)))
        .expect("nonempty root list")
}

/// The figure-eight configuration used by `apoly demo`: loops around the
/// puncture at `m = 0` and two generic loops, all four points over `m = 0`
/// and `m = infinity`, two paths from the geometric point, the Kashaev
/// sequence and the generalized conjecture at `a = 0.9, 1.0, 1.1`.
pub fn demo_config() -> RunConfig {
    let knot = KnotDb::builtin().get("figure-eight").cloned().expect("builtin figure-eight");
    let a = knot.polynomial().expect("builtin polynomial parses");
    let small = |m: Complex64| root_near(&a, m, |l| l.norm());
    let large = |m: Complex64| root_near(&a, m, |l| -l.norm());

    let mut loops = BTreeMap::new();
    loops.insert("m0_r0.4".to_string(), loop_around_m(c(0.0, 0.0), 0.4, small(c(0.4, 0.0)), 1));
    loops.insert("m0_r0.8".to_string(), loop_around_m(c(0.0, 0.0), 0.8, small(c(0.8, 0.0)), 1));
    loops.insert("m0_r1.2".to_string(), loop_around_m(c(0.0, 0.0), 1.2, small(c(1.2, 0.0)), 1));
    loops.insert("m1_r0.75".to_string(), loop_around_m(c(1.0, 0.0), 0.75, small(c(1.75, 0.0)), 1));

    let puncture = |id: &str, radius: f64, seed: Complex64, at_infinity: bool| Puncture {
        id: id.to_string(),
        center: c(0.0, 0.0),
        radius,
        l_seed: seed,
        turns: if at_infinity { -1 } else { 1 },
        at_infinity,
    };
    let punctures = vec![
        puncture("m0_small_l", 0.4, small(c(0.4, 0.0)), false),
        puncture("m0_large_l", 0.4, large(c(0.4, 0.0)), false),
        puncture("minf_small_l", 2.5, small(c(2.5, 0.0)), true),
        puncture("minf_large_l", 2.5, large(c(2.5, 0.0)), true),
    ];

    let g = knot.geom_seed;
    let mut paths = BTreeMap::new();
    paths.insert(
        "geom_to_1.5".to_string(),
        PathSpec::new(vec![Segment::line(g.m0, c(1.5, 0.0))], g.l_seed, false),
    );
    let corner = c(1.5, 0.0);
    let end = c(0.0, 1.5);
    let arc_path = PathSpec::new(
        vec![Segment::line(g.m0, corner), Segment::arc(c(0.0, 0.0), 1.5, 0.0, PI / 2.0)],
        g.l_seed,
        false,
    );
    debug_assert!((arc_path.m_end().unwrap() - end).norm() < 1e-12);
    paths.insert("geom_arc_to_1.5i".to_string(), arc_path);

    RunConfig {
        knot: KnotRef::Name("figure-eight".into()),
        knot_db: None,
        paths,
        loops,
        punctures,
        targets: Stage::ALL.iter().map(|s| s.name().to_string()).collect(),
        controls: StepControls::default(),
        refine: RefineSettings::default(),
        rational: RationalSettings::default(),
        jones: JonesSettings::default(),
        conjecture: [0.9, 1.0, 1.1]
            .into_iter()
            .map(|a| ConjecturePoint { a, path: None })
            .collect(),
        snap_seeds: false,
        output_dir: "apoly-demo".into(),
    }
}

/// Seed for `spec`, snapped to the nearest root when requested.
pub fn effective_seed(a: &LaurentBiPoly, spec: &PathSpec, snap: bool) -> Result<PathSpec, crate::error::TrackError> {
    let mut spec = spec.clone();
    if snap {
        if let Some(m) = spec.m_start() {
            spec.l_seed = snap_seed(a, m, spec.l_seed)?;
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_syntax() {
        assert_eq!(
            "loops:abc".parse::<Target>().unwrap(),
            Target {
                stage: Stage::Loops,
                item: Some("abc".into())
            }
        );
        assert!("nope".parse::<Target>().is_err());
    }

    #[test]
    fn demo_round_trips_through_json() {
        let cfg = demo_config();
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn resolution_errors() {
        let mut cfg = demo_config();
        cfg.targets.clear();
        assert!(matches!(cfg.resolve(Path::new(".")), Err(ConfigError::Invalid(_))));

        let mut cfg = demo_config();
        cfg.knot = KnotRef::Name("no-such-knot".into());
        assert!(matches!(cfg.resolve(Path::new(".")), Err(ConfigError::UnknownKnot(_))));

        let mut cfg = demo_config();
        cfg.targets = vec!["loops:missing".into()];
        assert!(matches!(cfg.resolve(Path::new(".")), Err(ConfigError::UnknownName { .. })));
    }

    #[test]
    fn minimal_json_uses_defaults() {
        let cfg = RunConfig::from_json(r#"{"knot": "figure-eight", "targets": ["kashaev"]}"#).unwrap();
        assert_eq!(cfg.rational.q_max, 48);
        assert_eq!(cfg.controls, StepControls::default());
        let r = cfg.resolve(Path::new("/tmp/x")).unwrap();
        assert_eq!(r.output_dir, Path::new("/tmp/x/out"));
        assert!(r.wants(Stage::Kashaev) && !r.wants(Stage::Loops));
    }
}
