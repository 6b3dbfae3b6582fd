//! TOML run configurations: parsing, located syntax errors, and validation
//! that reports every violated constraint at once.

use serde::{Deserialize, Serialize};

use crate::coeff::{SeriesTolerance, TestFunction};
use crate::error::{ConfigErrors, ConfigIssue, Error, Result};
use crate::geometry::{field_range, DomainSpec, FieldSpec};

/// The five subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Coeffs,
    Model1d,
    Verify,
    Kunz,
    Thermo,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::Model1d => "model1d",
            Command::Verify => "verify",
            Command::Kunz => "kunz",
            Command::Thermo => "thermo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<String>,
    pub format: Option<Format>,
}

/// Either an explicit list or an evenly spaced range `start..=stop` with `count` points.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
}

impl RawGrid {
    fn resolve(&self, name: &str, errors: &mut ConfigErrors) -> Vec<f64> {
        match (&self.values, self.start, self.stop, self.count) {
            (Some(v), None, None, None) => {
                if v.is_empty() {
                    errors.push(format!("{name}: values must not be empty"));
                }
                v.clone()
            }
            (None, Some(a), Some(b), Some(n)) => {
                if n == 0 || (n == 1 && a != b) {
                    errors.push(format!("{name}: count must be >= 2 for a range"));
                    return Vec::new();
                }
                if n == 1 {
                    return vec![a];
                }
                (0..n)
                    .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                    .collect()
            }
            _ => {
                errors.push(format!(
                    "{name}: give either `values` or all of `start`, `stop`, `count`"
                ));
                Vec::new()
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel1d {
    xi: RawGrid,
    k_max: usize,
    spacing: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    Trace,
    Count,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    mode: VerifyMode,
    h: Option<Vec<f64>>,
    l: Option<Vec<f64>>,
    e: Option<f64>,
    k: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKunz {
    b: f64,
    k: usize,
    e: RawGrid,
    tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThermo {
    b: f64,
    beta: f64,
    mu: f64,
    l: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<Command>,
    domain: Option<DomainSpec>,
    field: Option<FieldSpec>,
    function: Option<TestFunction>,
    tolerance: Option<SeriesTolerance>,
    model1d: Option<RawModel1d>,
    verify: Option<RawVerify>,
    kunz: Option<RawKunz>,
    thermo: Option<RawThermo>,
    #[serde(default)]
    output: OutputSpec,
}

/// A validated configuration for one subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Coeffs {
        domain: DomainSpec,
        field: FieldSpec,
        function: TestFunction,
        tolerance: SeriesTolerance,
        output: OutputSpec,
    },
    Model1d {
        xi: Vec<f64>,
        k_max: usize,
        spacing: f64,
        output: OutputSpec,
    },
    Verify {
        domain: DomainSpec,
        field: FieldSpec,
        function: Option<TestFunction>,
        tolerance: SeriesTolerance,
        mode: VerifyMode,
        h: Vec<f64>,
        e: Option<f64>,
        k: Option<usize>,
        output: OutputSpec,
    },
    Kunz {
        b: f64,
        k: usize,
        e: Vec<f64>,
        tol: f64,
        output: OutputSpec,
    },
    Thermo {
        b: f64,
        beta: f64,
        mu: f64,
        l: Vec<f64>,
        tolerance: SeriesTolerance,
        output: OutputSpec,
    },
}

impl RunConfig {
    pub fn command(&self) -> Command {
        match self {
            RunConfig::Coeffs { .. } => Command::Coeffs,
            RunConfig::Model1d { .. } => Command::Model1d,
            RunConfig::Verify { .. } => Command::Verify,
            RunConfig::Kunz { .. } => Command::Kunz,
            RunConfig::Thermo { .. } => Command::Thermo,
        }
    }

    pub fn output(&self) -> &OutputSpec {
        match self {
            RunConfig::Coeffs { output, .. }
            | RunConfig::Model1d { output, .. }
            | RunConfig::Verify { output, .. }
            | RunConfig::Kunz { output, .. }
            | RunConfig::Thermo { output, .. } => output,
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before
        .rsplit('\n')
        .next()
        .map(|s| s.chars().count())
        .unwrap_or(0)
        + 1;
    (line, col)
}

fn syntax_error(text: &str, err: toml::de::Error) -> Error {
    let (line, column) = match err.span() {
        Some(span) => {
            let (l, c) = line_col(text, span.start);
            (Some(l), Some(c))
        }
        None => (None, None),
    };
    Error::Config(ConfigErrors(vec![ConfigIssue {
        line,
        column,
        message: err.message().to_string(),
    }]))
}

/// Parses a configuration whose `command` key selects the subcommand.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_with(text, None)
}

/// Parses a configuration for `command`; a `command` key in the file, if
/// present, must agree.
pub fn parse_config_for(command: Command, text: &str) -> Result<RunConfig> {
    parse_with(text, Some(command))
}

fn issues<T>(r: std::result::Result<T, Vec<String>>, prefix: &str, errors: &mut ConfigErrors) {
    if let Err(list) = r {
        for m in list {
            errors.push(format!("{prefix}: {m}"));
        }
    }
}

fn parse_with(text: &str, expected: Option<Command>) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| syntax_error(text, e))?;
    let mut errors = ConfigErrors::default();
    let command = match (raw.command, expected) {
        (Some(c), Some(e)) if c != e => {
            errors.push(format!(
                "file is a `{}` configuration but `{}` was requested",
                c.name(),
                e.name()
            ));
            e
        }
        (Some(c), _) => c,
        (None, Some(e)) => e,
        (None, None) => {
            errors.push("missing key `command`");
            return Err(Error::Config(errors));
        }
    };
    let tolerance = raw.tolerance.unwrap_or_default();
    if let Err(m) = tolerance.validate() {
        errors.push(format!("tolerance: {m}"));
    }
    if let Some(d) = &raw.domain {
        issues(d.validate(), "domain", &mut errors);
    }
    if let Some(f) = &raw.field {
        issues(f.validate(), "field", &mut errors);
    }
    if let Some(f) = &raw.function {
        issues(f.validate(), "function", &mut errors);
    }
    let require = |present: bool, name: &str, errors: &mut ConfigErrors| {
        if !present {
            errors.push(format!("`{}` needs a [{name}] section", command.name()));
        }
    };
    let unused = |present: bool, name: &str, errors: &mut ConfigErrors| {
        if present {
            errors.push(format!(
                "section [{name}] is not used by `{}`",
                command.name()
            ));
        }
    };
    let config = match command {
        Command::Coeffs => {
            require(raw.domain.is_some(), "domain", &mut errors);
            require(raw.field.is_some(), "field", &mut errors);
            require(raw.function.is_some(), "function", &mut errors);
            for (p, n) in [
                (raw.model1d.is_some(), "model1d"),
                (raw.verify.is_some(), "verify"),
                (raw.kunz.is_some(), "kunz"),
                (raw.thermo.is_some(), "thermo"),
            ] {
                unused(p, n, &mut errors);
            }
            errors.is_empty().then(|| RunConfig::Coeffs {
                domain: raw.domain.clone().unwrap(),
                field: raw.field.unwrap(),
                function: raw.function.unwrap(),
                tolerance,
                output: raw.output.clone(),
            })
        }
        Command::Model1d => {
            require(raw.model1d.is_some(), "model1d", &mut errors);
            for (p, n) in [
                (raw.domain.is_some(), "domain"),
                (raw.field.is_some(), "field"),
                (raw.function.is_some(), "function"),
                (raw.verify.is_some(), "verify"),
                (raw.kunz.is_some(), "kunz"),
                (raw.thermo.is_some(), "thermo"),
            ] {
                unused(p, n, &mut errors);
            }
            match &raw.model1d {
                Some(m) => {
                    let xi = m.xi.resolve("model1d.xi", &mut errors);
                    if xi.iter().any(|x| !x.is_finite()) {
                        errors.push("model1d.xi: values must be finite");
                    }
                    if m.k_max == 0 {
                        errors.push("model1d.k_max must be >= 1");
                    }
                    let spacing = m.spacing.unwrap_or(crate::special1d::DEFAULT_MODEL_SPACING);
                    if !(spacing > 0.0 && spacing <= 0.1) {
                        errors.push(format!(
                            "model1d.spacing must lie in (0, 0.1], got {spacing}"
                        ));
                    }
                    errors.is_empty().then(|| RunConfig::Model1d {
                        xi,
                        k_max: m.k_max,
                        spacing,
                        output: raw.output.clone(),
                    })
                }
                None => None,
            }
        }
        Command::Verify => {
            require(raw.domain.is_some(), "domain", &mut errors);
            require(raw.field.is_some(), "field", &mut errors);
            require(raw.verify.is_some(), "verify", &mut errors);
            for (p, n) in [
                (raw.model1d.is_some(), "model1d"),
                (raw.kunz.is_some(), "kunz"),
                (raw.thermo.is_some(), "thermo"),
            ] {
                unused(p, n, &mut errors);
            }
            match (&raw.verify, &raw.domain, &raw.field) {
                (Some(v), Some(dom), Some(field)) => {
                    validate_verify(v, dom, field, &raw, tolerance, &mut errors)
                }
                _ => None,
            }
        }
        Command::Kunz => {
            require(raw.kunz.is_some(), "kunz", &mut errors);
            for (p, n) in [
                (raw.domain.is_some(), "domain"),
                (raw.field.is_some(), "field"),
                (raw.function.is_some(), "function"),
                (raw.model1d.is_some(), "model1d"),
                (raw.verify.is_some(), "verify"),
                (raw.thermo.is_some(), "thermo"),
            ] {
                unused(p, n, &mut errors);
            }
            match &raw.kunz {
                Some(k) => {
                    let e = k.e.resolve("kunz.e", &mut errors);
                    if !(k.b > 0.0) {
                        errors.push(format!("kunz.b must be positive (inf B > 0), got {}", k.b));
                    }
                    if k.k == 0 {
                        errors.push("kunz.k must be >= 1");
                    }
                    let kf = k.k as f64;
                    for &ev in &e {
                        if k.b > 0.0
                            && !((2.0 * kf - 1.0) * k.b < ev && ev < (2.0 * kf + 1.0) * k.b)
                        {
                            errors.push(format!(
                                "kunz.e = {ev} violates the gap condition (2K-1)B < E < (2K+1)B = ({}, {}) for K = {}, B = {}",
                                (2.0 * kf - 1.0) * k.b,
                                (2.0 * kf + 1.0) * k.b,
                                k.k,
                                k.b
                            ));
                        }
                    }
                    let tol = k.tol.unwrap_or(1e-10);
                    if !(tol >= 1e-13) {
                        errors.push(format!("kunz.tol must be >= 1e-13, got {tol}"));
                    }
                    errors.is_empty().then(|| RunConfig::Kunz {
                        b: k.b,
                        k: k.k,
                        e,
                        tol,
                        output: raw.output.clone(),
                    })
                }
                None => None,
            }
        }
        Command::Thermo => {
            require(raw.thermo.is_some(), "thermo", &mut errors);
            for (p, n) in [
                (raw.domain.is_some(), "domain"),
                (raw.field.is_some(), "field"),
                (raw.function.is_some(), "function"),
                (raw.model1d.is_some(), "model1d"),
                (raw.verify.is_some(), "verify"),
                (raw.kunz.is_some(), "kunz"),
            ] {
                unused(p, n, &mut errors);
            }
            match &raw.thermo {
                Some(t) => {
                    if !(t.b > 0.0) {
                        errors.push(format!(
                            "thermo.b must be positive (inf B > 0), got {}",
                            t.b
                        ));
                    }
                    if !(t.beta > 0.0) {
                        errors.push(format!("thermo.beta must be > 0, got {}", t.beta));
                    }
                    if !t.mu.is_finite() {
                        errors.push("thermo.mu must be finite");
                    }
                    if t.l.is_empty() || t.l.iter().any(|l| !(*l >= 1.0)) {
                        errors.push("thermo.l must be a non-empty list of values >= 1");
                    }
                    let radius_limit = crate::asymptotics::MAX_DESK_RADIUS;
                    if t.l.iter().any(|l| *l > radius_limit) {
                        errors.push(format!("thermo.l values must not exceed {radius_limit}"));
                    }
                    errors.is_empty().then(|| RunConfig::Thermo {
                        b: t.b,
                        beta: t.beta,
                        mu: t.mu,
                        l: t.l.clone(),
                        tolerance,
                        output: raw.output.clone(),
                    })
                }
                None => None,
            }
        }
    };
    match config {
        Some(c) if errors.is_empty() => Ok(c),
        _ => Err(Error::Config(errors)),
    }
}

fn validate_verify(
    v: &RawVerify,
    dom: &DomainSpec,
    field: &FieldSpec,
    raw: &RawConfig,
    tolerance: SeriesTolerance,
    errors: &mut ConfigErrors,
) -> Option<RunConfig> {
    let h = match (&v.h, &v.l) {
        (Some(h), None) => h.clone(),
        (None, Some(l)) => {
            if l.iter().any(|x| !(*x > 0.0)) {
                errors.push("verify.l values must be > 0");
            }
            l.iter().map(|x| 1.0 / (x * x)).collect()
        }
        _ => {
            errors.push("verify needs exactly one of `h` or `l`");
            Vec::new()
        }
    };
    if h.iter().any(|x| !(*x > 0.0)) {
        errors.push("verify.h values must be > 0");
    }
    if h.windows(2).any(|w| !(w[1] < w[0])) {
        errors.push("verify.h must be strictly decreasing");
    }
    if field.constant_value().is_none() {
        errors.push("verify compares against exact spectra and needs a constant field");
    }
    let scale = match dom {
        DomainSpec::Disk { radius } => *radius,
        DomainSpec::Rectangle { lx, ly } => lx.max(*ly),
        DomainSpec::Star { .. } => {
            errors.push("verify supports disk and rectangle domains");
            0.0
        }
    };
    let limit = crate::asymptotics::MAX_DESK_RADIUS;
    if h.iter().any(|x| *x > 0.0 && scale / x.sqrt() > limit) {
        errors.push(format!(
            "verify: dilated domain size h^(-1/2)·R must stay <= {limit}"
        ));
    }
    match v.mode {
        VerifyMode::Trace => {
            if raw.function.is_none() {
                errors.push("verify in trace mode needs a [function] section");
            }
        }
        VerifyMode::Count => {
            if !matches!(dom, DomainSpec::Disk { .. }) {
                errors.push("verify in count mode supports disk domains only");
            }
            match (v.e, v.k) {
                (Some(e), Some(k)) => {
                    let (b_min, b_max) = field_range(dom, field);
                    let kf = k as f64;
                    if k == 0 || !((2.0 * kf - 1.0) * b_max < e && e < (2.0 * kf + 1.0) * b_min) {
                        errors.push(format!(
                            "verify: gap condition (2K-1)B_max < E < (2K+1)B_min fails for K = {k}, E = {e}, B_min = {b_min}, B_max = {b_max}"
                        ));
                    }
                }
                _ => errors.push("verify in count mode needs `e` and `k`"),
            }
        }
    }
    errors.is_empty().then(|| RunConfig::Verify {
        domain: dom.clone(),
        field: *field,
        function: raw.function,
        tolerance,
        mode: v.mode,
        h,
        e: v.e,
        k: v.k,
        output: raw.output.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
command = "coeffs"

[domain]
kind = "disk"
radius = 1.0

[field]
kind = "constant"
b0 = 1.0

[function]
kind = "gaussian"
center = 1.0
width = 0.5
"#;

    #[test]
    fn minimal_config_parses() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.command(), Command::Coeffs);
    }

    #[test]
    fn negative_field_is_rejected() {
        let text = MINIMAL.replace("b0 = 1.0", "b0 = -1.0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("inf B > 0"), "{err}");
    }

    #[test]
    fn gap_violation_is_reported() {
        let text = r#"
command = "verify"
[domain]
kind = "disk"
radius = 1.0
[field]
kind = "constant"
b0 = 1.0
[verify]
mode = "count"
h = [0.04]
e = 4.0
k = 1
"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("gap condition"), "{err}");
    }

    #[test]
    fn all_errors_are_collected() {
        let text = MINIMAL
            .replace("b0 = 1.0", "b0 = -1.0")
            .replace("width = 0.5", "width = -0.5")
            .replace("radius = 1.0", "radius = 0.0");
        match parse_config(&text).unwrap_err() {
            Error::Config(list) => assert_eq!(list.0.len(), 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn syntax_errors_are_located() {
        let text = "command = \"coeffs\"\n[domain\nkind = 1\n";
        match parse_config(text).unwrap_err() {
            Error::Config(list) => assert_eq!(list.0[0].line, Some(2)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("radius = 1.0", "radius = 1.0\ncolour = 3");
        match parse_config(&text).unwrap_err() {
            Error::Config(list) => {
                assert!(
                    list.0[0].message.contains("colour"),
                    "{}",
                    list.0[0].message
                );
                assert!(list.0[0].line.is_some());
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn command_mismatch() {
        assert!(parse_config_for(Command::Kunz, MINIMAL).is_err());
        assert!(parse_config_for(
            Command::Coeffs,
            &MINIMAL.replace("command = \"coeffs\"", "")
        )
        .is_ok());
    }
}
