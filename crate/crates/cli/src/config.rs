//! `key = value` run configuration with optional `[model]` / `[run]`
//! sections. Values come from built-in defaults, then the config file, then
//! `--set` flags; each resolved key remembers which layer supplied it.

use std::collections::BTreeMap;
use std::fmt;

use qidiode_core::{dmi_from_field, ModelParams};
use thiserror::Error;

/// Two sources for the DMI strength must agree to this absolute tolerance.
pub const DMI_AGREEMENT: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("line {line}: unknown section `[{name}]`")]
    UnknownSection { line: usize, name: String },

    #[error("{}unknown key `{key}`", at(*.line))]
    UnknownKey { key: String, line: Option<usize> },

    #[error("{}key `{key}` belongs in [{expected}], found in [{found}]", at(*.line))]
    WrongSection {
        key: String,
        expected: Section,
        found: Section,
        line: Option<usize>,
    },

    #[error("{}invalid value `{value}` for `{key}`: {reason}", at(*.line))]
    Value {
        key: String,
        value: String,
        reason: String,
        line: Option<usize>,
    },

    #[error("d = {d} conflicts with e_y * g_me = {e_y} * {g_me} = {}", e_y * g_me)]
    DmiConflict { d: f64, e_y: f64, g_me: f64 },

    #[error("invalid model: {0}")]
    Model(#[from] qidiode_core::Error),

    #[error("cannot read config `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn at(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_else(|| "flag: ".into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Section {
    Model,
    Run,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Model => "model",
            Section::Run => "run",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    Default,
    File,
    Flag,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Default => "default",
            Provenance::File => "file",
            Provenance::Flag => "flag",
        })
    }
}

/// Every accepted key, its section, and its default. `auto` / `none` mark
/// optional values resolved downstream.
pub const KEYS: &[(&str, Section, &str)] = &[
    ("j1", Section::Model, "1"),
    ("j2", Section::Model, "0.5"),
    ("d", Section::Model, "1"),
    ("a", Section::Model, "0.001"),
    ("a0", Section::Model, "1"),
    ("n", Section::Model, "1000"),
    ("g_me", Section::Model, "1"),
    ("e_y", Section::Model, "none"),
    ("zeta", Section::Model, "none"),
    ("zeta_decay", Section::Model, "5"),
    ("r_sites", Section::Run, "10"),
    ("t_max", Section::Run, "30"),
    ("dt", Section::Run, "auto"),
    ("t_truncation", Section::Run, "auto"),
    ("d_min", Section::Run, "0"),
    ("d_max", Section::Run, "3"),
    ("d_steps", Section::Run, "7"),
    ("k_points", Section::Run, "201"),
    ("n_sites", Section::Run, "16"),
    ("displacement", Section::Run, "3"),
    ("pairs", Section::Run, "1:4,1:14"),
];

fn lookup(key: &str) -> Option<(Section, &'static str)> {
    KEYS.iter().find(|(k, _, _)| *k == key).map(|&(_, s, d)| (s, d))
}

/// A raw `key = value` assignment from one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub key: String,
    pub value: String,
    pub line: Option<usize>,
}

/// Resolved run settings, independent of subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub r_sites: u32,
    pub t_max: f64,
    pub dt: Option<f64>,
    pub t_truncation: Option<f64>,
    pub d_min: f64,
    pub d_max: f64,
    pub d_steps: usize,
    pub k_points: usize,
    pub n_sites: usize,
    pub displacement: i64,
    /// 0-based `(source, probe)` pairs.
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub e_y: Option<f64>,
    pub run: RunSettings,
    /// Resolved text and provenance of every key, sorted by key.
    pub resolved: BTreeMap<String, (String, Provenance)>,
}

/// Parses the file layer only; no defaults, no validation of values.
pub fn parse_assignments(text: &str) -> Result<Vec<Assignment>, ConfigError> {
    let mut section: Option<Section> = None;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = Some(match name.trim() {
                "model" => Section::Model,
                "run" => Section::Run,
                other => {
                    return Err(ConfigError::UnknownSection {
                        line,
                        name: other.to_string(),
                    })
                }
            });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: raw.to_string(),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: raw.to_string(),
            });
        }
        let Some((expected, _)) = lookup(&key) else {
            return Err(ConfigError::UnknownKey { key, line: Some(line) });
        };
        if let Some(found) = section {
            if found != expected {
                return Err(ConfigError::WrongSection {
                    key,
                    expected,
                    found,
                    line: Some(line),
                });
            }
        }
        out.push(Assignment {
            key,
            value,
            line: Some(line),
        });
    }
    Ok(out)
}

/// Parses a `key=value` command-line override.
pub fn parse_flag(flag: &str) -> Result<Assignment, ConfigError> {
    let Some((key, value)) = flag.split_once('=') else {
        return Err(ConfigError::Value {
            key: flag.to_string(),
            value: String::new(),
            reason: "expected key=value".into(),
            line: None,
        });
    };
    let key = key.trim().to_string();
    if lookup(&key).is_none() {
        return Err(ConfigError::UnknownKey { key, line: None });
    }
    Ok(Assignment {
        key,
        value: value.trim().to_string(),
        line: None,
    })
}

/// Resolves a configuration document with no flag overrides.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    resolve(text, &[])
}

/// Layers defaults, `text`, then `flags` (each `key=value`).
pub fn resolve(text: &str, flags: &[String]) -> Result<RunConfig, ConfigError> {
    let file = parse_assignments(text)?;
    let flags = flags.iter().map(|f| parse_flag(f)).collect::<Result<Vec<_>, _>>()?;

    let mut layered: BTreeMap<String, (String, Provenance, Option<usize>)> = KEYS
        .iter()
        .map(|&(k, _, d)| (k.to_string(), (d.to_string(), Provenance::Default, None)))
        .collect();
    for (layer, provenance) in [(file, Provenance::File), (flags, Provenance::Flag)] {
        for a in layer {
            layered.insert(a.key, (a.value, provenance, a.line));
        }
    }
    for (key, (value, provenance, _)) in &layered {
        log::info!("{key} = {value} ({provenance})");
    }

    let field = |key: &str| -> (&str, Provenance, Option<usize>) {
        let (v, p, l) = &layered[key];
        (v.as_str(), *p, *l)
    };

    let j1 = number(field("j1"), "j1")?;
    let j2 = number(field("j2"), "j2")?;
    let a = number(field("a"), "a")?;
    let a0 = number(field("a0"), "a0")?;
    let n = count(field("n"), "n")?;
    let g_me = number(field("g_me"), "g_me")?;
    let e_y = optional(field("e_y"), "e_y", "none")?;
    let zeta = optional(field("zeta"), "zeta", "none")?;
    let zeta_decay = number(field("zeta_decay"), "zeta_decay")?;

    let (d_text, d_provenance, _) = field("d");
    let mut d = number(field("d"), "d")?;
    let mut d_resolved = (d_text.to_string(), d_provenance);
    if let Some(e) = e_y {
        let from_field = dmi_from_field(e, g_me);
        if d_provenance == Provenance::Default {
            d = from_field;
            let (_, field_provenance, _) = field("e_y");
            d_resolved = (format!("{d}"), field_provenance);
        } else if (d - from_field).abs() > DMI_AGREEMENT {
            return Err(ConfigError::DmiConflict { d, e_y: e, g_me });
        }
    }

    let model = ModelParams {
        j1,
        j2,
        d,
        a,
        a0,
        n,
        g_me,
        zeta_decay,
        zeta,
    };
    model.validate()?;

    let run = RunSettings {
        r_sites: integer(field("r_sites"), "r_sites")?,
        t_max: number(field("t_max"), "t_max")?,
        dt: optional(field("dt"), "dt", "auto")?,
        t_truncation: optional(field("t_truncation"), "t_truncation", "auto")?,
        d_min: number(field("d_min"), "d_min")?,
        d_max: number(field("d_max"), "d_max")?,
        d_steps: count(field("d_steps"), "d_steps")?,
        k_points: count(field("k_points"), "k_points")?,
        n_sites: count(field("n_sites"), "n_sites")?,
        displacement: integer(field("displacement"), "displacement")?,
        pairs: pairs(field("pairs"))?,
    };
    check_run(&run, &layered)?;

    let mut resolved: BTreeMap<String, (String, Provenance)> =
        layered.into_iter().map(|(k, (v, p, _))| (k, (v, p))).collect();
    resolved.insert("d".into(), d_resolved);

    Ok(RunConfig {
        model,
        e_y,
        run,
        resolved,
    })
}

fn value_error(key: &str, value: &str, line: Option<usize>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
        line,
    }
}

fn number((value, _, line): (&str, Provenance, Option<usize>), key: &str) -> Result<f64, ConfigError> {
    let x: f64 = value
        .parse()
        .map_err(|e: std::num::ParseFloatError| value_error(key, value, line, e.to_string()))?;
    if !x.is_finite() {
        return Err(value_error(key, value, line, "must be finite"));
    }
    Ok(x)
}

fn optional(field: (&str, Provenance, Option<usize>), key: &str, unset: &str) -> Result<Option<f64>, ConfigError> {
    if field.0.eq_ignore_ascii_case(unset) {
        Ok(None)
    } else {
        number(field, key).map(Some)
    }
}

fn integer<T: std::str::FromStr>(
    (value, _, line): (&str, Provenance, Option<usize>),
    key: &str,
) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| value_error(key, value, line, e.to_string()))
}

fn count(field: (&str, Provenance, Option<usize>), key: &str) -> Result<usize, ConfigError> {
    let n: usize = integer(field, key)?;
    if n == 0 {
        return Err(value_error(key, field.0, field.2, "must be >= 1"));
    }
    Ok(n)
}

/// `1:4, 1:14` (1-based) into 0-based pairs.
fn pairs((value, _, line): (&str, Provenance, Option<usize>)) -> Result<Vec<(usize, usize)>, ConfigError> {
    value
        .split(',')
        .map(|item| {
            let bad = || value_error("pairs", value, line, format!("`{}` is not `source:probe`", item.trim()));
            let (s, p) = item.trim().split_once(':').ok_or_else(bad)?;
            let s: usize = s.trim().parse().map_err(|_| bad())?;
            let p: usize = p.trim().parse().map_err(|_| bad())?;
            if s == 0 || p == 0 {
                return Err(value_error("pairs", value, line, "site indices are 1-based"));
            }
            Ok((s - 1, p - 1))
        })
        .collect()
}

fn check_run(
    run: &RunSettings,
    layered: &BTreeMap<String, (String, Provenance, Option<usize>)>,
) -> Result<(), ConfigError> {
    let fail = |key: &str, reason: &str| {
        let (v, _, l) = &layered[key];
        Err(value_error(key, v, *l, reason))
    };
    if !(run.t_max > 0.0) {
        return fail("t_max", "must be > 0");
    }
    if matches!(run.dt, Some(dt) if !(dt > 0.0)) {
        return fail("dt", "must be > 0");
    }
    if matches!(run.t_truncation, Some(t) if !(t > 0.0)) {
        return fail("t_truncation", "must be > 0");
    }
    if run.d_min < 0.0 {
        return fail("d_min", "must be >= 0");
    }
    if run.d_max < run.d_min {
        return fail("d_max", "must be >= d_min");
    }
    if run.k_points < 2 {
        return fail("k_points", "must be >= 2");
    }
    Ok(())
}

impl RunConfig {
    /// `d_steps` values evenly spaced on `[d_min, d_max]`.
    pub fn d_values(&self) -> Vec<f64> {
        let RunSettings {
            d_min, d_max, d_steps, ..
        } = self.run;
        if d_steps == 1 {
            return vec![d_min];
        }
        (0..d_steps)
            .map(|i| d_min + (d_max - d_min) * i as f64 / (d_steps - 1) as f64)
            .collect()
    }

    /// Separation in length units.
    pub fn r(&self) -> f64 {
        self.run.r_sites as f64 * self.model.a
    }
}
