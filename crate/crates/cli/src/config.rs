//! Run configuration: a flat `key = value` file, one pair per line.
//!
//! `#` starts a comment, blank lines are skipped.  Keys of the nested
//! custom-problem block are spelled with a `custom.` prefix.  Required
//! keys are `experiment`, `N`, and `t_end`; everything else has a
//! documented default.  [`emit`] renders a configuration in canonical
//! order such that `parse_config(&emit(&c))` reproduces `c` exactly.
//!
//! ```text
//! experiment = example1        # example1 | example2 | example3 | custom
//! N = 100                      # number of grid elements (>= 4)
//! dt = 0.1                     # time step (default 0.1)
//! zeta = 1                     # basis shape parameter (default 1)
//! t_end = 5                    # final time (>= 0)
//! snapshot_times = 0, 2.5, 5   # default: 0 and t_end
//! report_times = 0, 5          # default: 0 and t_end
//! snapshot_density = 5         # profile samples per x-unit (default 5)
//! output_dir = out             # default: current directory
//! # only with experiment = custom:
//! custom.domain = -20, 30
//! custom.mu1 = 4
//! custom.mu2 = -3
//! custom.mu3 = 1
//! custom.initial = 0.5*sech(0.25*x)^2
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::expr::parse_expression;

/// Which problem a run solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Solitary pulse with a known solution, `mu = (4, -3, 1)` on `[-20, 30]`.
    Example1,
    /// Kink with a known solution, `mu = (1, -5, 1)` on `[-80, 80]`.
    Example2,
    /// Wave generation, `mu = (10, -3, 1)` on `[-40, 60]`, no exact solution.
    Example3,
    /// User-defined problem from the `custom.*` keys.
    Custom,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Example1 => "example1",
            Experiment::Example2 => "example2",
            Experiment::Example3 => "example3",
            Experiment::Custom => "custom",
        }
    }
}

/// The `custom.*` block: domain, equation coefficients, and the initial
/// profile as an unparsed expression in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomProblem {
    pub domain: (f64, f64),
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub initial: String,
}

/// Everything one `run` invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub dt: f64,
    pub zeta: f64,
    pub t_end: f64,
    /// Times whose full profiles go to `snapshots.csv`.
    pub snapshot_times: Vec<f64>,
    /// Times whose invariants (and errors, when available) are reported.
    pub report_times: Vec<f64>,
    /// Profile samples per unit of `x` in `snapshots.csv`.
    pub snapshot_density: f64,
    pub output_dir: PathBuf,
    pub custom: Option<CustomProblem>,
}

/// A rejected configuration; messages name the offending key and line.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },

    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { key: String, line: usize },

    #[error("line {line}: invalid value for key `{key}`: {reason}")]
    InvalidValue {
        key: String,
        line: usize,
        reason: String,
    },

    #[error("missing required key `{key}`")]
    MissingKey { key: &'static str },

    #[error("line {line}: key `{key}` only applies when experiment = custom")]
    NotCustom { key: String, line: usize },
}

const KNOWN_KEYS: [&str; 14] = [
    "experiment",
    "N",
    "dt",
    "zeta",
    "t_end",
    "snapshot_times",
    "report_times",
    "snapshot_density",
    "output_dir",
    "custom.domain",
    "custom.mu1",
    "custom.mu2",
    "custom.mu3",
    "custom.initial",
];

/// One raw `key = value` pair with the line it came from.
struct RawEntry {
    line: usize,
    value: String,
}

struct RawConfig {
    entries: Vec<(String, RawEntry)>,
}

impl RawConfig {
    fn get(&self, key: &str) -> Option<&RawEntry> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, e)| e)
    }
}

fn invalid(key: &str, line: usize, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        line,
        reason: reason.into(),
    }
}

fn split_lines(text: &str) -> Result<RawConfig, ConfigError> {
    let mut entries: Vec<(String, RawEntry)> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let Some(eq) = stripped.find('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: stripped.to_string(),
            });
        };
        let key = stripped[..eq].trim();
        let value = stripped[eq + 1..].trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: stripped.to_string(),
            });
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                key: key.to_string(),
                line,
            });
        }
        if entries.iter().any(|(k, _)| k == key) {
            return Err(ConfigError::DuplicateKey {
                key: key.to_string(),
                line,
            });
        }
        entries.push((
            key.to_string(),
            RawEntry {
                line,
                value: value.to_string(),
            },
        ));
    }
    Ok(RawConfig { entries })
}

fn parse_float(key: &str, entry: &RawEntry) -> Result<f64, ConfigError> {
    let v: f64 = entry
        .value
        .parse()
        .map_err(|_| invalid(key, entry.line, format!("expected a number, got `{}`", entry.value)))?;
    if !v.is_finite() {
        return Err(invalid(key, entry.line, "must be finite"));
    }
    Ok(v)
}

fn parse_float_list(key: &str, entry: &RawEntry) -> Result<Vec<f64>, ConfigError> {
    let text = entry.value.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(invalid(key, entry.line, "empty entry in list"));
        }
        let v: f64 = item
            .parse()
            .map_err(|_| invalid(key, entry.line, format!("expected a number, got `{item}`")))?;
        if !v.is_finite() {
            return Err(invalid(key, entry.line, "list entries must be finite"));
        }
        out.push(v);
    }
    Ok(out)
}

/// Default snapshot/report times: the endpoints of the run.
fn default_times(t_end: f64) -> Vec<f64> {
    if t_end == 0.0 {
        vec![0.0]
    } else {
        vec![0.0, t_end]
    }
}

fn check_times(key: &str, entry: &RawEntry, times: &[f64], t_end: f64) -> Result<(), ConfigError> {
    for &t in times {
        if !(-1e-9..=t_end + 1e-9).contains(&t) {
            return Err(invalid(
                key,
                entry.line,
                format!("time {t} lies outside [0, {t_end}]"),
            ));
        }
    }
    Ok(())
}

/// Parses and validates one configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw = split_lines(text)?;

    let experiment = {
        let entry = raw
            .get("experiment")
            .ok_or(ConfigError::MissingKey { key: "experiment" })?;
        match entry.value.as_str() {
            "example1" => Experiment::Example1,
            "example2" => Experiment::Example2,
            "example3" => Experiment::Example3,
            "custom" => Experiment::Custom,
            other => {
                return Err(invalid(
                    "experiment",
                    entry.line,
                    format!("`{other}` is not one of example1, example2, example3, custom"),
                ))
            }
        }
    };

    let n = {
        let entry = raw.get("N").ok_or(ConfigError::MissingKey { key: "N" })?;
        let v: i64 = entry.value.parse().map_err(|_| {
            invalid("N", entry.line, format!("expected an integer, got `{}`", entry.value))
        })?;
        if v < 4 {
            return Err(invalid("N", entry.line, format!("must be at least 4, got {v}")));
        }
        v as usize
    };

    let t_end = {
        let entry = raw
            .get("t_end")
            .ok_or(ConfigError::MissingKey { key: "t_end" })?;
        let v = parse_float("t_end", entry)?;
        if v < 0.0 {
            return Err(invalid("t_end", entry.line, "must be >= 0"));
        }
        v
    };

    let dt = match raw.get("dt") {
        None => 0.1,
        Some(entry) => {
            let v = parse_float("dt", entry)?;
            if v <= 0.0 {
                return Err(invalid("dt", entry.line, "must be > 0"));
            }
            v
        }
    };

    let zeta = match raw.get("zeta") {
        None => 1.0,
        Some(entry) => {
            let v = parse_float("zeta", entry)?;
            if v <= 0.0 {
                return Err(invalid("zeta", entry.line, "must be > 0"));
            }
            v
        }
    };

    let snapshot_density = match raw.get("snapshot_density") {
        None => 5.0,
        Some(entry) => {
            let v = parse_float("snapshot_density", entry)?;
            if v <= 0.0 {
                return Err(invalid("snapshot_density", entry.line, "must be > 0"));
            }
            v
        }
    };

    let snapshot_times = match raw.get("snapshot_times") {
        None => default_times(t_end),
        Some(entry) => {
            let times = parse_float_list("snapshot_times", entry)?;
            check_times("snapshot_times", entry, &times, t_end)?;
            times
        }
    };

    let report_times = match raw.get("report_times") {
        None => default_times(t_end),
        Some(entry) => {
            let times = parse_float_list("report_times", entry)?;
            check_times("report_times", entry, &times, t_end)?;
            times
        }
    };

    let output_dir = match raw.get("output_dir") {
        None => PathBuf::from("."),
        Some(entry) => {
            if entry.value.is_empty() {
                return Err(invalid("output_dir", entry.line, "must not be empty"));
            }
            PathBuf::from(&entry.value)
        }
    };

    let custom = if experiment == Experiment::Custom {
        let field = |key: &'static str| {
            raw.get(key).ok_or(ConfigError::MissingKey { key })
        };

        let domain = {
            let entry = field("custom.domain")?;
            let ends = parse_float_list("custom.domain", entry)?;
            if ends.len() != 2 {
                return Err(invalid(
                    "custom.domain",
                    entry.line,
                    "expected two numbers `a, b`",
                ));
            }
            if !(ends[0] < ends[1]) {
                return Err(invalid("custom.domain", entry.line, "need a < b"));
            }
            (ends[0], ends[1])
        };
        let mu1 = parse_float("custom.mu1", field("custom.mu1")?)?;
        let mu2 = parse_float("custom.mu2", field("custom.mu2")?)?;
        let mu3 = {
            let entry = field("custom.mu3")?;
            let v = parse_float("custom.mu3", entry)?;
            if v == 0.0 {
                return Err(invalid("custom.mu3", entry.line, "must be nonzero"));
            }
            v
        };
        let initial = {
            let entry = field("custom.initial")?;
            if let Err(e) = parse_expression(&entry.value) {
                return Err(invalid("custom.initial", entry.line, e.to_string()));
            }
            entry.value.clone()
        };
        Some(CustomProblem {
            domain,
            mu1,
            mu2,
            mu3,
            initial,
        })
    } else {
        for key in ["custom.domain", "custom.mu1", "custom.mu2", "custom.mu3", "custom.initial"] {
            if let Some(entry) = raw.get(key) {
                return Err(ConfigError::NotCustom {
                    key: key.to_string(),
                    line: entry.line,
                });
            }
        }
        None
    };

    Ok(RunConfig {
        experiment,
        n,
        dt,
        zeta,
        t_end,
        snapshot_times,
        report_times,
        snapshot_density,
        output_dir,
        custom,
    })
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Renders a configuration in canonical key order.  Every key is written
/// explicitly, so parsing the result reproduces the input configuration
/// field for field.
pub fn emit(config: &RunConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment = {}", config.experiment.as_str());
    let _ = writeln!(s, "N = {}", config.n);
    let _ = writeln!(s, "dt = {}", config.dt);
    let _ = writeln!(s, "zeta = {}", config.zeta);
    let _ = writeln!(s, "t_end = {}", config.t_end);
    let _ = writeln!(s, "snapshot_times = {}", join_floats(&config.snapshot_times));
    let _ = writeln!(s, "report_times = {}", join_floats(&config.report_times));
    let _ = writeln!(s, "snapshot_density = {}", config.snapshot_density);
    let _ = writeln!(s, "output_dir = {}", config.output_dir.display());
    if let Some(c) = &config.custom {
        let _ = writeln!(s, "custom.domain = {}, {}", c.domain.0, c.domain.1);
        let _ = writeln!(s, "custom.mu1 = {}", c.mu1);
        let _ = writeln!(s, "custom.mu2 = {}", c.mu2);
        let _ = writeln!(s, "custom.mu3 = {}", c.mu3);
        let _ = writeln!(s, "custom.initial = {}", c.initial);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> RunConfig {
        parse_config(text).unwrap()
    }

    #[test]
    fn minimal_config_fills_the_documented_defaults() {
        let c = parse("experiment = example1\nN = 100\nt_end = 5\n");
        assert_eq!(c.experiment, Experiment::Example1);
        assert_eq!(c.n, 100);
        assert_eq!(c.dt, 0.1);
        assert_eq!(c.zeta, 1.0);
        assert_eq!(c.t_end, 5.0);
        assert_eq!(c.snapshot_times, vec![0.0, 5.0]);
        assert_eq!(c.report_times, vec![0.0, 5.0]);
        assert_eq!(c.snapshot_density, 5.0);
        assert_eq!(c.output_dir, PathBuf::from("."));
        assert!(c.custom.is_none());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let c = parse("# a run\n\nexperiment = example2 # kink\nN = 200\nt_end = 12\n");
        assert_eq!(c.experiment, Experiment::Example2);
        assert_eq!(c.n, 200);
    }

    #[test]
    fn zero_horizon_defaults_to_a_single_time() {
        let c = parse("experiment = example1\nN = 100\nt_end = 0\n");
        assert_eq!(c.snapshot_times, vec![0.0]);
        assert_eq!(c.report_times, vec![0.0]);
    }

    #[test]
    fn negative_element_count_is_reported_on_its_key() {
        let e = parse_config("experiment = example1\nN = -5\nt_end = 5\n").unwrap_err();
        match &e {
            ConfigError::InvalidValue { key, line, .. } => {
                assert_eq!(key, "N");
                assert_eq!(*line, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
        let msg = e.to_string();
        assert!(msg.contains("`N`") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected_with_their_line() {
        let e = parse_config("experiment = example1\nN = 100\nt_end = 5\nmystery = 1\n")
            .unwrap_err();
        assert_eq!(
            e,
            ConfigError::UnknownKey {
                key: "mystery".into(),
                line: 4
            }
        );
        let e = parse_config("experiment = example1\nN = 100\nN = 200\nt_end = 5\n").unwrap_err();
        assert_eq!(
            e,
            ConfigError::DuplicateKey {
                key: "N".into(),
                line: 3
            }
        );
    }

    #[test]
    fn missing_required_keys_are_named() {
        let e = parse_config("experiment = example1\nt_end = 5\n").unwrap_err();
        assert_eq!(e, ConfigError::MissingKey { key: "N" });
        let e = parse_config("N = 100\nt_end = 5\n").unwrap_err();
        assert_eq!(e, ConfigError::MissingKey { key: "experiment" });
        let e = parse_config("experiment = example1\nN = 100\n").unwrap_err();
        assert_eq!(e, ConfigError::MissingKey { key: "t_end" });
    }

    #[test]
    fn lines_without_an_assignment_are_syntax_errors() {
        let e = parse_config("experiment example1\n").unwrap_err();
        assert!(matches!(e, ConfigError::Syntax { line: 1, .. }));
    }

    #[test]
    fn times_outside_the_horizon_are_rejected() {
        let text = "experiment = example1\nN = 100\nt_end = 5\nreport_times = 0, 7\n";
        let e = parse_config(text).unwrap_err();
        match e {
            ConfigError::InvalidValue { key, line, .. } => {
                assert_eq!(key, "report_times");
                assert_eq!(line, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn custom_keys_demand_the_custom_experiment() {
        let text = "experiment = example1\nN = 100\nt_end = 5\ncustom.mu1 = 1\n";
        let e = parse_config(text).unwrap_err();
        assert_eq!(
            e,
            ConfigError::NotCustom {
                key: "custom.mu1".into(),
                line: 4
            }
        );
    }

    #[test]
    fn custom_experiment_requires_every_field() {
        let text = "experiment = custom\nN = 100\nt_end = 1\ncustom.domain = -20, 30\n\
                    custom.mu1 = 4\ncustom.mu2 = -3\ncustom.mu3 = 1\n";
        let e = parse_config(text).unwrap_err();
        assert_eq!(e, ConfigError::MissingKey { key: "custom.initial" });
    }

    #[test]
    fn zero_dispersion_and_bad_domains_are_rejected() {
        let base = "experiment = custom\nN = 100\nt_end = 1\ncustom.domain = -20, 30\n\
                    custom.mu1 = 4\ncustom.mu2 = -3\ncustom.initial = x\n";
        let e = parse_config(&format!("{base}custom.mu3 = 0\n")).unwrap_err();
        assert!(matches!(e, ConfigError::InvalidValue { ref key, .. } if key == "custom.mu3"));

        let text = "experiment = custom\nN = 100\nt_end = 1\ncustom.domain = 30, -20\n\
                    custom.mu1 = 4\ncustom.mu2 = -3\ncustom.mu3 = 1\ncustom.initial = x\n";
        let e = parse_config(text).unwrap_err();
        assert!(matches!(e, ConfigError::InvalidValue { ref key, .. } if key == "custom.domain"));
    }

    #[test]
    fn broken_expressions_are_reported_on_their_key() {
        let text = "experiment = custom\nN = 100\nt_end = 1\ncustom.domain = -20, 30\n\
                    custom.mu1 = 4\ncustom.mu2 = -3\ncustom.mu3 = 1\ncustom.initial = sech(x\n";
        let e = parse_config(text).unwrap_err();
        match e {
            ConfigError::InvalidValue { key, line, reason } => {
                assert_eq!(key, "custom.initial");
                assert_eq!(line, 8);
                assert!(reason.contains("parenthesis"), "{reason}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn emit_is_canonical() {
        let c = parse("experiment = example1\nN = 100\nt_end = 5\n");
        assert_eq!(
            emit(&c),
            "experiment = example1\nN = 100\ndt = 0.1\nzeta = 1\nt_end = 5\n\
             snapshot_times = 0, 5\nreport_times = 0, 5\nsnapshot_density = 5\n\
             output_dir = .\n"
        );
    }

    #[test]
    fn round_trip_preserves_a_custom_configuration() {
        let c = RunConfig {
            experiment: Experiment::Custom,
            n: 240,
            dt: 0.05,
            zeta: 0.125,
            t_end: 2.5,
            snapshot_times: vec![0.0, 1.25, 2.5],
            report_times: vec![0.0, 2.5],
            snapshot_density: 2.0,
            output_dir: PathBuf::from("results/custom"),
            custom: Some(CustomProblem {
                domain: (-20.0, 30.0),
                mu1: 4.0,
                mu2: -3.0,
                mu3: 1.0,
                initial: "0.5*sech(0.25*x)^2".to_string(),
            }),
        };
        assert_eq!(parse_config(&emit(&c)).unwrap(), c);
    }

    prop_compose! {
        fn time_list(t_end: f64)(fracs in proptest::collection::vec(0.0f64..=1.0, 0..5)) -> Vec<f64> {
            fracs.into_iter().map(|f| f * t_end).collect()
        }
    }

    fn config_strategy() -> impl Strategy<Value = RunConfig> {
        (
            0usize..4,
            4usize..2000,
            0.001f64..1.0,
            1e-7f64..5.0,
            0.0f64..20.0,
            0.1f64..20.0,
            0usize..3,
        )
            .prop_flat_map(|(exp, n, dt, zeta, t_end, density, dir)| {
                let experiment = [
                    Experiment::Example1,
                    Experiment::Example2,
                    Experiment::Example3,
                    Experiment::Custom,
                ][exp];
                let output_dir = PathBuf::from(["out", "results/a", "."][dir]);
                let custom = if experiment == Experiment::Custom {
                    Some(CustomProblem {
                        domain: (-20.0, 30.0),
                        mu1: 4.0,
                        mu2: -3.0,
                        mu3: 1.0,
                        initial: "0.5*sech(0.25*x)^2".to_string(),
                    })
                } else {
                    None
                };
                (time_list(t_end), time_list(t_end)).prop_map(move |(snap, rep)| RunConfig {
                    experiment,
                    n,
                    dt,
                    zeta,
                    t_end,
                    snapshot_times: snap,
                    report_times: rep,
                    snapshot_density: density,
                    output_dir: output_dir.clone(),
                    custom: custom.clone(),
                })
            })
    }

    proptest! {
        #[test]
        fn round_trip_is_the_identity(config in config_strategy()) {
            let text = emit(&config);
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(back, config);
        }
    }
}
