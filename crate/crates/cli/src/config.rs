//! Scenario configuration: a flat `key = value` document.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment, also allowed after a value
//! key = value
//! list_key = a, b, c
//! ```
//!
//! Numbers accept a plain literal or a fraction `a/b`. Keys are listed in
//! [`KEYS`]; `scenario = figN` loads a preset first and the remaining entries
//! override it.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use modent_core::cavity1d::InitialState;
use modent_core::cavity3d::{Cavity3DParams, Regime, ASYMMETRIC_MIN_NU};
use num_complex::Complex64;

use crate::error::{CliError, ConfigIssue, IssueKind};
use crate::presets;

/// Every recognised key with a one-line description.
pub const KEYS: [(&str, &str); 15] = [
    ("scenario", "fig1 .. fig10 or custom (default custom)"),
    ("model", "cavity3d-symmetric, cavity3d-asymmetric, cavity1d-p2 or cavity1d-p1"),
    ("grid", "tau (default) or kappa = tanh(2 tau), cavity1d-p2 only"),
    ("start", "first grid value (default 0)"),
    ("end", "last grid value"),
    ("zeros", "cavity3d-symmetric: end the grid at the n-th zero, rho tau = n pi"),
    ("points", "number of grid points (default 1000)"),
    ("measures", "comma list from Y, Ytilde, Y2, Ltilde, K2, Z, Ic, Jc, E1, E3, nbar"),
    ("output", "CSV path (default standard output)"),
    ("nu", "cavity3d: coupling parameter nu = 96 mu^2"),
    ("theta1", "cavity3d: list of initial coth(beta_1/2), one per curve (default 1)"),
    ("theta3", "cavity3d: list of initial coth(3 beta_3/2), one per curve (default 1)"),
    ("pairs", "cavity1d: list of mode pairs r-s (default 1-3 for p2, 1-2 for p1)"),
    ("state", "cavity1d-p1: list from fock, squeezed, coherent, thermal, even, odd (default squeezed)"),
    ("nu1", "cavity1d-p1: list of initial mean photon numbers (default 1)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Figure(u8),
    Custom,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Figure(n) => write!(f, "fig{n}"),
            Scenario::Custom => f.write_str("custom"),
        }
    }
}

impl Scenario {
    pub fn parse(s: &str) -> Option<Self> {
        if s == "custom" {
            return Some(Scenario::Custom);
        }
        let n: u8 = s.strip_prefix("fig")?.parse().ok()?;
        (1..=presets::COUNT).contains(&n).then_some(Scenario::Figure(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Cavity3DSymmetric,
    Cavity3DAsymmetric,
    Cavity1DP2,
    Cavity1DP1,
}

impl Model {
    pub const ALL: [Model; 4] =
        [Model::Cavity3DSymmetric, Model::Cavity3DAsymmetric, Model::Cavity1DP2, Model::Cavity1DP1];

    pub fn name(self) -> &'static str {
        match self {
            Model::Cavity3DSymmetric => "cavity3d-symmetric",
            Model::Cavity3DAsymmetric => "cavity3d-asymmetric",
            Model::Cavity1DP2 => "cavity1d-p2",
            Model::Cavity1DP1 => "cavity1d-p1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Model::ALL.into_iter().find(|m| m.name() == s)
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Model::Cavity3DSymmetric => &["nu", "theta1", "theta3", "zeros"],
            Model::Cavity3DAsymmetric => &["nu", "theta1", "theta3"],
            Model::Cavity1DP2 => &["pairs"],
            Model::Cavity1DP1 => &["pairs", "state", "nu1"],
        }
    }
}

/// Independent variable of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Tau,
    /// `κ = tanh(2τ)`.
    Kappa,
}

/// Uniform grid `start + i (end − start)/(points − 1)` on `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub axis: Axis,
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..self.points)
            .map(|i| if i == n { self.end } else { self.start + (self.end - self.start) * (i as f64 / n as f64) })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Y,
    Ytilde,
    Y2,
    Ltilde,
    K2,
    Z,
    Ic,
    Jc,
    E1,
    E3,
    Nbar,
}

impl Measure {
    pub const ALL: [Measure; 11] = [
        Measure::Y,
        Measure::Ytilde,
        Measure::Y2,
        Measure::Ltilde,
        Measure::K2,
        Measure::Z,
        Measure::Ic,
        Measure::Jc,
        Measure::E1,
        Measure::E3,
        Measure::Nbar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Y => "Y",
            Measure::Ytilde => "Ytilde",
            Measure::Y2 => "Y2",
            Measure::Ltilde => "Ltilde",
            Measure::K2 => "K2",
            Measure::Z => "Z",
            Measure::Ic => "Ic",
            Measure::Jc => "Jc",
            Measure::E1 => "E1",
            Measure::E3 => "E3",
            Measure::Nbar => "nbar",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Measure::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Fock,
    Squeezed,
    Coherent,
    Thermal,
    Even,
    Odd,
}

impl StateKind {
    pub const ALL: [StateKind; 6] = [
        StateKind::Fock,
        StateKind::Squeezed,
        StateKind::Coherent,
        StateKind::Thermal,
        StateKind::Even,
        StateKind::Odd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateKind::Fock => "fock",
            StateKind::Squeezed => "squeezed",
            StateKind::Coherent => "coherent",
            StateKind::Thermal => "thermal",
            StateKind::Even => "even",
            StateKind::Odd => "odd",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        StateKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// The state of this kind with mean photon number `nu1`.
    pub fn with_photons(self, nu1: f64) -> Result<InitialState, String> {
        if !(nu1 >= 0.0 && nu1.is_finite()) {
            return Err(format!("mean photon number {nu1} must be finite and non-negative"));
        }
        let real = |x: f64| Complex64::new(x, 0.0);
        Ok(match self {
            StateKind::Fock => {
                if nu1.fract() != 0.0 || nu1 > u32::MAX as f64 {
                    return Err(format!("Fock state needs an integer photon number, got {nu1}"));
                }
                InitialState::Fock { n: nu1 as u32 }
            }
            StateKind::Squeezed => InitialState::squeezed_with_photons(nu1),
            StateKind::Coherent => InitialState::Coherent { alpha: real(nu1.sqrt()) },
            StateKind::Thermal => InitialState::Thermal { n_bar: nu1 },
            // Mean photon numbers x tanh x and x coth x of |α|² = x.
            StateKind::Even => {
                InitialState::EvenCoherent { alpha: real(solve_increasing(|x| x * x.tanh(), nu1, nu1 + 1.0).sqrt()) }
            }
            StateKind::Odd => {
                if nu1 < 1.0 {
                    return Err(format!("odd coherent states carry at least one photon, got {nu1}"));
                }
                let f = |x: f64| if x == 0.0 { 1.0 } else { x / x.tanh() };
                InitialState::OddCoherent { alpha: real(solve_increasing(f, nu1, nu1).sqrt()) }
            }
        })
    }
}

/// Root of an increasing `f(x) = target` on `[0, hi]` by bisection.
fn solve_increasing(f: impl Fn(f64) -> f64, target: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Model-specific parameters; each list entry is one curve.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Cavity3D { nu: f64, thetas: Vec<(f64, f64)> },
    Cavity1DP2 { pairs: Vec<(i64, i64)> },
    Cavity1DP1 { pairs: Vec<(i64, i64)>, states: Vec<(StateKind, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub model: Model,
    pub params: ModelParams,
    pub tau_grid: GridSpec,
    pub measures: Vec<Measure>,
    pub output_path: Option<String>,
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: Option<usize>,
    origin: Scenario,
}

struct Builder {
    entries: BTreeMap<String, Entry>,
    issues: Vec<ConfigIssue>,
}

impl Builder {
    fn issue(&mut self, key: &str, kind: IssueKind, message: impl Into<String>) {
        let (line, field) = match self.entries.get(key) {
            Some(Entry { line, origin: Scenario::Figure(n), .. }) if line.is_none() => {
                (None, format!("{key} (preset fig{n})"))
            }
            Some(e) => (e.line, key.to_string()),
            None => (None, key.to_string()),
        };
        self.issues.push(ConfigIssue { line, field, kind, message: message.into() });
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn number(&mut self, key: &str) -> Option<f64> {
        let raw = self.raw(key)?.to_string();
        match parse_number(&raw) {
            Some(v) => Some(v),
            None => {
                self.issue(key, IssueKind::Parse, format!("`{raw}` is not a number"));
                None
            }
        }
    }

    fn numbers(&mut self, key: &str) -> Option<Vec<f64>> {
        let raw = self.raw(key)?.to_string();
        let mut out = Vec::new();
        for item in split_list(&raw) {
            match parse_number(item) {
                Some(v) => out.push(v),
                None => {
                    self.issue(key, IssueKind::Parse, format!("`{item}` is not a number"));
                    return None;
                }
            }
        }
        if out.is_empty() {
            self.issue(key, IssueKind::OutOfRange, "list is empty");
            return None;
        }
        Some(out)
    }

    fn count(&mut self, key: &str) -> Option<usize> {
        let raw = self.raw(key)?.to_string();
        match raw.parse::<usize>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.issue(key, IssueKind::Parse, format!("`{raw}` is not a non-negative integer"));
                None
            }
        }
    }

    fn require(&mut self, key: &str) -> bool {
        if self.entries.contains_key(key) {
            true
        } else {
            self.issue(key, IssueKind::MissingKey, "required");
            false
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let v = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => s.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

/// `key = value` entries of a document, with parse issues.
fn parse_entries(text: &str, origin: Scenario, with_lines: bool) -> (BTreeMap<String, Entry>, Vec<ConfigIssue>) {
    let mut entries = BTreeMap::new();
    let mut issues = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let location = with_lines.then_some(line_no);
        let Some((key, value)) = line.split_once('=') else {
            issues.push(ConfigIssue {
                line: location,
                field: line.to_string(),
                kind: IssueKind::Parse,
                message: "expected `key = value`".into(),
            });
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.iter().any(|(k, _)| *k == key) {
            issues.push(ConfigIssue {
                line: location,
                field: key.to_string(),
                kind: IssueKind::UnknownKey,
                message: "unknown key".into(),
            });
            continue;
        }
        if let Some(prev) = entries.get::<str>(key).and_then(|e: &Entry| e.line) {
            issues.push(ConfigIssue {
                line: location,
                field: key.to_string(),
                kind: IssueKind::DuplicateKey,
                message: format!("already set on line {prev}"),
            });
            continue;
        }
        entries.insert(key.to_string(), Entry { value: value.to_string(), line: location, origin });
    }
    (entries, issues)
}

/// Parses and validates a configuration document, reporting every problem.
pub fn validate_config(text: &str) -> Result<ScenarioConfig, CliError> {
    let (user, mut issues) = parse_entries(text, Scenario::Custom, true);
    let scenario = match user.get("scenario") {
        None => Scenario::Custom,
        Some(e) => match Scenario::parse(&e.value) {
            Some(s) => s,
            None => {
                issues.push(ConfigIssue {
                    line: e.line,
                    field: "scenario".into(),
                    kind: IssueKind::OutOfRange,
                    message: format!("`{}` is not custom or fig1..fig{}", e.value, presets::COUNT),
                });
                Scenario::Custom
            }
        },
    };
    let mut entries = BTreeMap::new();
    if let Scenario::Figure(n) = scenario {
        let (preset, preset_issues) = parse_entries(presets::text(n), scenario, false);
        debug_assert!(preset_issues.is_empty(), "{preset_issues:?}");
        entries = preset;
        if user.contains_key("end") || user.contains_key("zeros") {
            entries.remove("end");
            entries.remove("zeros");
        }
    }
    entries.extend(user);
    let mut b = Builder { entries, issues };
    let cfg = build(&mut b, scenario);
    if b.issues.is_empty() {
        Ok(cfg.expect("a configuration without issues is complete"))
    } else {
        b.issues.sort_by_key(|i| i.line.unwrap_or(usize::MAX));
        Err(CliError::Config(b.issues))
    }
}

/// Configuration of a preset.
pub fn preset_config(n: u8) -> Result<ScenarioConfig, CliError> {
    validate_config(&format!("scenario = fig{n}\n"))
}

fn build(b: &mut Builder, scenario: Scenario) -> Option<ScenarioConfig> {
    let model = if b.require("model") {
        let raw = b.raw("model").unwrap_or_default().to_string();
        let m = Model::parse(&raw);
        if m.is_none() {
            let names: Vec<_> = Model::ALL.iter().map(|m| m.name()).collect();
            b.issue("model", IssueKind::OutOfRange, format!("`{raw}` is not one of {}", names.join(", ")));
        }
        m
    } else {
        None
    };
    if let Some(model) = model {
        let foreign: Vec<String> = b
            .entries
            .keys()
            .filter(|k| {
                let generic = ["scenario", "model", "grid", "start", "end", "points", "measures", "output"];
                !generic.contains(&k.as_str()) && !model.keys().contains(&k.as_str())
            })
            .cloned()
            .collect();
        for k in foreign {
            b.issue(&k, IssueKind::UnknownKey, format!("not used by model {}", model.name()));
        }
    }

    if model.is_none() {
        for key in ["nu", "start", "end"] {
            if b.raw(key).is_some() {
                b.number(key);
            }
        }
        for key in ["theta1", "theta3", "nu1"] {
            if b.raw(key).is_some() {
                b.numbers(key);
            }
        }
        for key in ["points", "zeros"] {
            if b.raw(key).is_some() {
                b.count(key);
            }
        }
    }
    let measures = build_measures(b);
    let params = model.and_then(|m| build_params(b, m));
    let tau_grid = model.and_then(|m| build_grid(b, m, params.as_ref()));
    let output_path = b.raw("output").map(str::to_string);
    if output_path.as_deref() == Some("") {
        b.issue("output", IssueKind::OutOfRange, "empty path");
    }
    Some(ScenarioConfig {
        scenario,
        model: model?,
        params: params?,
        tau_grid: tau_grid?,
        measures: measures?,
        output_path,
    })
}

fn build_measures(b: &mut Builder) -> Option<Vec<Measure>> {
    if !b.require("measures") {
        return None;
    }
    let raw = b.raw("measures").unwrap_or_default().to_string();
    let mut out = Vec::new();
    let mut ok = true;
    for item in split_list(&raw) {
        match Measure::parse(item) {
            Some(m) if out.contains(&m) => {
                b.issue("measures", IssueKind::DuplicateKey, format!("`{item}` listed twice"));
                ok = false;
            }
            Some(m) => out.push(m),
            None => {
                let names: Vec<_> = Measure::ALL.iter().map(|m| m.name()).collect();
                b.issue("measures", IssueKind::UnknownMeasure, format!("`{item}` is not one of {}", names.join(", ")));
                ok = false;
            }
        }
    }
    if out.is_empty() && ok {
        b.issue("measures", IssueKind::OutOfRange, "at least one measure is required");
        ok = false;
    }
    ok.then_some(out)
}

fn build_pairs(b: &mut Builder, default: (i64, i64), odd_only: bool) -> Option<Vec<(i64, i64)>> {
    let Some(raw) = b.raw("pairs").map(str::to_string) else {
        return Some(vec![default]);
    };
    let mut out = Vec::new();
    for item in split_list(&raw) {
        let parsed = item
            .split_once('-')
            .and_then(|(r, s)| Some((r.trim().parse::<i64>().ok()?, s.trim().parse::<i64>().ok()?)));
        let Some((r, s)) = parsed else {
            b.issue("pairs", IssueKind::Parse, format!("`{item}` is not of the form r-s"));
            return None;
        };
        if r < 1 || s < 1 || r == s {
            b.issue("pairs", IssueKind::OutOfRange, format!("`{item}`: modes must be distinct and ≥ 1"));
            return None;
        }
        if odd_only && (r % 2 == 0 || s % 2 == 0) {
            b.issue("pairs", IssueKind::Domain, format!("`{item}`: even modes stay in vacuum for p = 2"));
            return None;
        }
        out.push((r, s));
    }
    if out.is_empty() {
        b.issue("pairs", IssueKind::OutOfRange, "list is empty");
        return None;
    }
    Some(out)
}

fn build_params(b: &mut Builder, model: Model) -> Option<ModelParams> {
    match model {
        Model::Cavity3DSymmetric | Model::Cavity3DAsymmetric => {
            let nu = if b.require("nu") { b.number("nu") } else { None };
            let theta1 = if b.raw("theta1").is_some() { b.numbers("theta1") } else { Some(vec![1.0]) };
            let theta3 = if b.raw("theta3").is_some() { b.numbers("theta3") } else { Some(vec![1.0]) };
            let (nu, theta1, theta3) = (nu?, theta1?, theta3?);
            if theta1.len() != theta3.len() {
                b.issue(
                    "theta3",
                    IssueKind::OutOfRange,
                    format!("{} values for {} theta1 values", theta3.len(), theta1.len()),
                );
                return None;
            }
            let regime = if model == Model::Cavity3DSymmetric { Regime::Symmetric } else { Regime::Asymmetric };
            if regime == Regime::Asymmetric && nu < ASYMMETRIC_MIN_NU {
                b.issue(
                    "nu",
                    IssueKind::Domain,
                    format!("asymmetric resonance formulas need nu ≥ {ASYMMETRIC_MIN_NU}, got {nu}"),
                );
                return None;
            }
            let thetas: Vec<(f64, f64)> = theta1.into_iter().zip(theta3).collect();
            for &(t1, t3) in &thetas {
                if let Err(e) = Cavity3DParams::new(nu, t1, t3, regime) {
                    let field = if nu > 0.5 { "theta1" } else { "nu" };
                    b.issue(field, IssueKind::Domain, e.to_string());
                    return None;
                }
            }
            Some(ModelParams::Cavity3D { nu, thetas })
        }
        Model::Cavity1DP2 => Some(ModelParams::Cavity1DP2 { pairs: build_pairs(b, (1, 3), true)? }),
        Model::Cavity1DP1 => {
            let pairs = build_pairs(b, (1, 2), false);
            let kinds = match b.raw("state").map(str::to_string) {
                None => Some(vec![StateKind::Squeezed]),
                Some(raw) => {
                    let mut kinds = Vec::new();
                    for item in split_list(&raw) {
                        match StateKind::parse(item) {
                            Some(k) => kinds.push(k),
                            None => {
                                let names: Vec<_> = StateKind::ALL.iter().map(|k| k.name()).collect();
                                b.issue(
                                    "state",
                                    IssueKind::OutOfRange,
                                    format!("`{item}` is not one of {}", names.join(", ")),
                                );
                            }
                        }
                    }
                    (kinds.len() == split_list(&raw).count() && !kinds.is_empty()).then_some(kinds)
                }
            };
            let nu1 = if b.raw("nu1").is_some() { b.numbers("nu1") } else { Some(vec![1.0]) };
            let (pairs, kinds, nu1) = (pairs?, kinds?, nu1?);
            let mut states = Vec::new();
            for &k in &kinds {
                for &n in &nu1 {
                    if let Err(msg) = k.with_photons(n) {
                        b.issue("nu1", IssueKind::OutOfRange, msg);
                        return None;
                    }
                    states.push((k, n));
                }
            }
            Some(ModelParams::Cavity1DP1 { pairs, states })
        }
    }
}

fn build_grid(b: &mut Builder, model: Model, params: Option<&ModelParams>) -> Option<GridSpec> {
    let axis = match b.raw("grid") {
        None | Some("tau") => Axis::Tau,
        Some("kappa") if model == Model::Cavity1DP2 => Axis::Kappa,
        Some("kappa") => {
            b.issue("grid", IssueKind::OutOfRange, "the kappa grid is only defined for cavity1d-p2");
            return None;
        }
        Some(other) => {
            let other = other.to_string();
            b.issue("grid", IssueKind::OutOfRange, format!("`{other}` is not tau or kappa"));
            return None;
        }
    };
    let start = if b.raw("start").is_some() { b.number("start") } else { Some(0.0) };
    let points = if b.raw("points").is_some() { b.count("points") } else { Some(1000) };
    let end = match (b.raw("end").is_some(), b.raw("zeros").is_some()) {
        (true, true) => {
            b.issue("zeros", IssueKind::OutOfRange, "give either end or zeros, not both");
            None
        }
        (true, false) => b.number("end"),
        (false, true) => {
            let n = b.count("zeros");
            match (n, params) {
                (Some(0), _) => {
                    b.issue("zeros", IssueKind::OutOfRange, "must be at least 1");
                    None
                }
                (Some(n), Some(ModelParams::Cavity3D { nu, .. })) => Some(n as f64 * PI / (2.0 * nu - 1.0).sqrt()),
                _ => None,
            }
        }
        (false, false) => {
            b.issue("end", IssueKind::MissingKey, "required");
            None
        }
    };
    let (start, end, points) = (start?, end?, points?);
    let mut ok = true;
    if start < 0.0 {
        b.issue("start", IssueKind::OutOfRange, format!("{start} must be ≥ 0"));
        ok = false;
    }
    if end <= start {
        let field = if b.raw("end").is_some() { "end" } else { "zeros" };
        b.issue(field, IssueKind::OutOfRange, format!("end {end} must exceed start {start}"));
        ok = false;
    }
    if axis == Axis::Kappa && end >= 1.0 {
        b.issue("end", IssueKind::OutOfRange, format!("kappa = {end} must be below 1"));
        ok = false;
    }
    if !(2..=10_000_000).contains(&points) {
        b.issue("points", IssueKind::OutOfRange, format!("{points} must lie in [2, 10000000]"));
        ok = false;
    }
    ok.then_some(GridSpec { axis, start, end, points })
}

impl ScenarioConfig {
    /// Loads a configuration file.
    pub fn from_file(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })?;
        validate_config(&text)
    }
}
