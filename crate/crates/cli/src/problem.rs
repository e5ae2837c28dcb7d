//! Problem files: a TOML document describing the space, the group, the
//! invariant basis, the parameters, the potential and the run options.

use std::fmt;
use std::sync::Arc;

use orbitred::parse::{parse_mixed, parse_poly};
use orbitred::{
    EliminationMode, InvariantBasis, Monomial, OrbitPoly, Overrides, ParameterSpec, QPoly,
    Rational, ReductionOptions, Strategy, StrategyKind, TieBreak, VarSet,
};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MAX_SETS: usize = 256;
/// Environment variable that replaces the built-in default seed.
pub const SEED_ENV: &str = "ORBITRED_SEED";
/// Key inside `[invariants]` holding the syzygy rules.
pub const SYZYGY_KEY: &str = "syzygies";
/// Potential text that requests the most general invariant potential.
pub const GENERAL: &str = "general";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub format_version: u32,
    pub space: Space,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Group>,
    pub invariants: Invariants,
    #[serde(default)]
    pub parameters: Parameters,
    pub potential: Potential,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Space {
    pub variables: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Group {
    /// Row-major matrices acting on the space variables.
    pub generators: Vec<Vec<Vec<Entry>>>,
}

/// A rational matrix entry, written either as an integer or as `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    fn value(&self) -> Option<Rational> {
        match self {
            Entry::Int(n) => Some(Rational::from_integer((*n).into())),
            Entry::Text(s) => s.trim().parse().ok(),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Int(n) => write!(f, "{n}"),
            Entry::Text(s) => f.write_str(s),
        }
    }
}

/// Invariant names mapped to x-expressions, in declaration order, plus the
/// syzygy rules `"lhs -> rhs"`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Invariants {
    pub entries: Vec<(String, String)>,
    pub syzygies: Vec<String>,
}

impl Serialize for Invariants {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len() + 1))?;
        for (name, expr) in &self.entries {
            map.serialize_entry(name, expr)?;
        }
        if !self.syzygies.is_empty() {
            map.serialize_entry(SYZYGY_KEY, &self.syzygies)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Invariants {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;

        impl<'de> Visitor<'de> for V {
            type Value = Invariants;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("invariant names mapped to x-expressions")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Invariants, A::Error> {
                let mut out = Invariants::default();
                while let Some(key) = map.next_key::<String>()? {
                    if key == SYZYGY_KEY {
                        out.syzygies = map.next_value()?;
                    } else {
                        out.entries.push((key, map.next_value()?));
                    }
                }
                Ok(out)
            }
        }

        d.deserialize_map(V)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Parameters {
    pub critical: Vec<String>,
    pub generic: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Potential {
    /// A J-expression over the parameters, or `"general"`.
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncate: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub keep: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tie_break: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_sets: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub order: Vec<OrderSpec>,
}

/// Explicit row and column monomials for the stage at `degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderSpec {
    pub degree: u32,
    pub targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<String>,
}

impl OrderSpec {
    /// Parses `DEGREE:T1,T2,...[;G1,G2,...]`.
    pub fn parse_flag(s: &str) -> CliResult<Self> {
        let bad = || {
            CliError::input(
                "flags",
                format!("--order `{s}`: expected DEGREE:TARGETS[;GENERATORS]"),
            )
        };
        let (deg, lists) = s.split_once(':').ok_or_else(bad)?;
        let degree = deg.trim().parse().map_err(|_| bad())?;
        let (t, g) = match lists.split_once(';') {
            Some((t, g)) => (t, Some(g)),
            None => (lists, None),
        };
        let split = |l: &str| -> Vec<String> {
            l.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(String::from)
                .collect()
        };
        let targets = split(t);
        if targets.is_empty() {
            return Err(bad());
        }
        Ok(Self {
            degree,
            targets,
            generators: g.map(split).unwrap_or_default(),
        })
    }
}

impl ProblemFile {
    /// Parses the TOML layer only.
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let file: ProblemFile = toml::from_str(text).map_err(|e| {
            let (section, place) = match e.span() {
                Some(span) => {
                    let (line, col) = line_col(text, span.start);
                    (
                        section_at(text, line),
                        format!("line {line}, column {col}: "),
                    )
                }
                None => ("file".to_string(), String::new()),
            };
            CliError::input(&section, format!("{place}{}", e.message()))
        })?;
        if file.format_version != FORMAT_VERSION {
            return Err(CliError::input(
                "format_version",
                format!(
                    "unsupported version {} (expected {FORMAT_VERSION})",
                    file.format_version
                ),
            ));
        }
        Ok(file)
    }

    /// Canonical TOML text; parsing it yields an identical structure.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("problem files always serialize")
    }

    /// All parameter names, critical ones first.
    fn parameter_names(&self) -> Vec<String> {
        self.parameters
            .critical
            .iter()
            .chain(&self.parameters.generic)
            .cloned()
            .collect()
    }
}

/// Run settings after merging the file options with command-line flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub mode: EliminationMode,
    pub truncation: Option<u32>,
    pub keep_set: bool,
    pub keep: Vec<String>,
    pub tie_break: TieBreak,
    pub max_sets: usize,
    pub seed: Option<u64>,
    pub orders: Vec<OrderSpec>,
}

/// Command-line replacements for [`Options`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Flags {
    pub mode: Option<String>,
    pub truncate: Option<u32>,
    pub strategy: Option<String>,
    pub keep: Vec<String>,
    pub tie_break: Option<String>,
    pub max_sets: Option<usize>,
    pub order: Vec<String>,
    pub seed: Option<u64>,
}

pub fn parse_mode(s: &str, section: &str) -> CliResult<EliminationMode> {
    s.parse().map_err(|e: String| CliError::input(section, e))
}

pub fn parse_tie_break(s: &str, section: &str) -> CliResult<TieBreak> {
    match s {
        "keep_earliest" => Ok(TieBreak::KeepEarliest),
        "keep_latest" => Ok(TieBreak::KeepLatest),
        other => Err(CliError::input(
            section,
            format!("unknown tie_break `{other}` (expected keep_earliest or keep_latest)"),
        )),
    }
}

pub fn tie_break_name(t: TieBreak) -> &'static str {
    match t {
        TieBreak::KeepEarliest => "keep_earliest",
        TieBreak::KeepLatest => "keep_latest",
    }
}

fn strategy_is_keep(strategy: Option<&str>, keep: &[String], section: &str) -> CliResult<bool> {
    match strategy {
        None => Ok(!keep.is_empty()),
        Some("keep_set") => Ok(true),
        Some("max_eliminate") if keep.is_empty() => Ok(false),
        Some("max_eliminate") => Err(CliError::input(section, "keep requires strategy keep_set")),
        Some(other) => Err(CliError::input(
            section,
            format!("unknown strategy `{other}` (expected max_eliminate or keep_set)"),
        )),
    }
}

impl Settings {
    fn from_options(o: &Options) -> CliResult<Self> {
        let s = "options";
        Ok(Self {
            mode: o
                .mode
                .as_deref()
                .map(|m| parse_mode(m, s))
                .transpose()?
                .unwrap_or(EliminationMode::Fixed),
            truncation: o.truncate,
            keep_set: strategy_is_keep(o.strategy.as_deref(), &o.keep, s)?,
            keep: o.keep.clone(),
            tie_break: o
                .tie_break
                .as_deref()
                .map(|t| parse_tie_break(t, s))
                .transpose()?
                .unwrap_or_default(),
            max_sets: o.max_sets.unwrap_or(DEFAULT_MAX_SETS),
            seed: o.seed,
            orders: o.order.clone(),
        })
    }

    /// Applies command-line flags on top of these settings.
    pub fn with_flags(&self, f: &Flags) -> CliResult<Self> {
        let s = "flags";
        let mut out = self.clone();
        if let Some(m) = &f.mode {
            out.mode = parse_mode(m, s)?;
        }
        if f.truncate.is_some() {
            out.truncation = f.truncate;
        }
        if !f.keep.is_empty() {
            out.keep = f.keep.clone();
        }
        if f.strategy.is_some() || !f.keep.is_empty() {
            out.keep_set = strategy_is_keep(f.strategy.as_deref(), &out.keep, s)?;
        }
        if let Some(t) = &f.tie_break {
            out.tie_break = parse_tie_break(t, s)?;
        }
        if let Some(n) = f.max_sets {
            out.max_sets = n;
        }
        if f.seed.is_some() {
            out.seed = f.seed;
        }
        for o in &f.order {
            let spec = OrderSpec::parse_flag(o)?;
            out.orders.retain(|x| x.degree != spec.degree);
            out.orders.push(spec);
        }
        out.orders.sort_by_key(|o| o.degree);
        Ok(out)
    }

    pub fn strategy_name(&self) -> &'static str {
        if self.keep_set {
            "keep_set"
        } else {
            "max_eliminate"
        }
    }

    /// Seed precedence: flag or file, then the environment, then the default.
    pub fn resolved_seed(&self) -> CliResult<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                CliError::input(
                    "options",
                    format!("{SEED_ENV}=`{v}` is not an unsigned integer"),
                )
            }),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }

    /// Engine options for `basis`.
    pub fn reduction_options(&self, basis: &InvariantBasis) -> CliResult<ReductionOptions> {
        let j = basis.j_vars();
        let mut keep = Vec::with_capacity(self.keep.len());
        for k in &self.keep {
            let m = parse_monomial(k, j)
                .map_err(|e| CliError::input("options", format!("keep `{k}`: {e}")))?;
            if !basis.is_normal(&m) {
                return Err(CliError::input(
                    "options",
                    format!("keep `{k}` is not in syzygy normal form"),
                ));
            }
            keep.push(m);
        }
        let kind = if self.keep_set {
            StrategyKind::KeepSet(keep)
        } else {
            StrategyKind::MaxEliminate
        };
        let mut overrides = std::collections::BTreeMap::new();
        for o in &self.orders {
            let list = |l: &[String]| -> CliResult<Vec<Monomial>> {
                l.iter()
                    .map(|t| {
                        parse_monomial(t, j).map_err(|e| {
                            CliError::input("options", format!("order {}: `{t}`: {e}", o.degree))
                        })
                    })
                    .collect()
            };
            let generators = if o.generators.is_empty() {
                None
            } else {
                Some(list(&o.generators)?)
            };
            overrides.insert(
                o.degree,
                Overrides {
                    targets: Some(list(&o.targets)?),
                    generators,
                },
            );
        }
        Ok(ReductionOptions {
            mode: self.mode,
            strategy: Strategy {
                kind,
                tie_break: self.tie_break,
            },
            truncation: self.truncation,
            max_sets: self.max_sets,
            overrides,
        })
    }
}

/// A single J-monomial with coefficient 1.
pub fn parse_monomial(s: &str, j: &Arc<VarSet>) -> Result<Monomial, String> {
    let p = parse_poly(s, j).map_err(|e| e.to_string())?;
    match p.leading() {
        Some((m, c)) if p.len() == 1 && c == &Rational::from_integer(1.into()) => Ok(m.clone()),
        _ => Err(format!("`{s}` is not a single monomial")),
    }
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    /// `sha256:` followed by the hex digest of the file text.
    pub digest: String,
    pub basis: InvariantBasis,
    pub params: ParameterSpec,
    pub potential: OrbitPoly,
    pub settings: Settings,
}

/// Parses and validates a problem file.
pub fn parse_problem(text: &str) -> CliResult<Problem> {
    let file = ProblemFile::from_toml(text)?;
    check_names(&file, text)?;

    let xv = VarSet::new(file.space.variables.iter().map(String::as_str));
    let names: Vec<String> = file
        .invariants
        .entries
        .iter()
        .map(|(n, _)| n.clone())
        .collect();
    let mut polys = Vec::with_capacity(names.len());
    for (name, expr) in &file.invariants.entries {
        let p = parse_poly(expr, &xv).map_err(|e| located(text, "invariants", name, expr, e))?;
        polys.push(p);
    }
    if polys.is_empty() {
        return Err(CliError::input(
            "invariants",
            "at least one invariant is required",
        ));
    }

    let generators = match &file.group {
        Some(g) => Some(group_matrices(g, xv.len())?),
        None => None,
    };

    let unweighted = VarSet::new(names.iter().map(String::as_str));
    let mut rules: Vec<(QPoly, QPoly)> = Vec::new();
    let invariant_error = |e: orbitred::Error| CliError::from_core("invariants", e);
    let mut basis = InvariantBasis::new(
        xv.clone(),
        names.clone(),
        polys.clone(),
        vec![],
        generators.clone(),
    )
    .map_err(invariant_error)?;
    for rule in &file.invariants.syzygies {
        let at = |e: orbitred::Error| located(text, "invariants", SYZYGY_KEY, rule, e);
        let Some((lhs, rhs)) = rule.split_once("->") else {
            return Err(locate_message(
                text,
                "invariants",
                SYZYGY_KEY,
                rule,
                1,
                "expected `lhs -> rhs`",
            ));
        };
        let lhs_p = parse_poly(lhs, &unweighted).map_err(at)?;
        let rhs_p = parse_poly(rhs, &unweighted).map_err(|e| match e {
            orbitred::Error::Parse { column, message } => located(
                text,
                "invariants",
                SYZYGY_KEY,
                rule,
                orbitred::Error::Parse {
                    column: column + lhs.len() + 2,
                    message,
                },
            ),
            other => at(other),
        })?;
        rules.push((lhs_p, rhs_p));
        basis = InvariantBasis::new(
            xv.clone(),
            names.clone(),
            polys.clone(),
            rules.clone(),
            generators.clone(),
        )
        .map_err(|e| locate_message(text, "invariants", SYZYGY_KEY, rule, 1, &e.to_string()))?;
    }

    if basis.group_generators().is_some() {
        let check = basis.check_invariance().map_err(invariant_error)?;
        if let Some((g, a)) = check.counterexample {
            return Err(CliError::input(
                "group",
                format!(
                    "invariant `{}` is not invariant under generator {}",
                    names[a],
                    g + 1
                ),
            ));
        }
    }

    let settings = Settings::from_options(&file.options)?;
    let (potential, params) = if file.potential.expression.trim() == GENERAL {
        if !file.parameters.generic.is_empty() {
            return Err(CliError::input(
                "parameters",
                "a general potential names its own coefficients; drop `generic`",
            ));
        }
        let n = settings
            .truncation
            .unwrap_or_else(|| basis.stability_order());
        let (f, _) = basis.general_potential(n);
        let params = ParameterSpec::new(f.ctx().clone(), &file.parameters.critical)
            .map_err(|e| CliError::from_core("parameters", e))?;
        (f, params)
    } else {
        let pv = VarSet::new(file.parameter_names().iter().map(String::as_str));
        let params = ParameterSpec::new(pv.clone(), &file.parameters.critical)
            .map_err(|e| CliError::from_core("parameters", e))?;
        let expr = &file.potential.expression;
        let f = parse_mixed(expr, basis.j_vars(), &pv)
            .map_err(|e| located(text, "potential", "expression", expr, e))?;
        (f, params)
    };

    Ok(Problem {
        digest: digest(text),
        file,
        basis,
        params,
        potential,
        settings,
    })
}

pub fn digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

fn group_matrices(g: &Group, n: usize) -> CliResult<Vec<Vec<Vec<Rational>>>> {
    let mut out = Vec::with_capacity(g.generators.len());
    for (k, m) in g.generators.iter().enumerate() {
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(CliError::input(
                "group",
                format!("generator {} must be a {n}x{n} matrix", k + 1),
            ));
        }
        let mut rows = Vec::with_capacity(n);
        for row in m {
            let mut r = Vec::with_capacity(n);
            for e in row {
                let v = e.value().ok_or_else(|| {
                    CliError::input(
                        "group",
                        format!("generator {}: `{e}` is not a rational number", k + 1),
                    )
                })?;
                r.push(v);
            }
            rows.push(r);
        }
        out.push(rows);
    }
    Ok(out)
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Names must be identifiers and distinct across all sections.
fn check_names(file: &ProblemFile, text: &str) -> CliResult<()> {
    if file.space.variables.is_empty() {
        return Err(CliError::input(
            "space",
            "at least one variable is required",
        ));
    }
    let mut seen: Vec<(&str, &str)> = Vec::new();
    let groups: [(&str, Vec<&String>); 3] = [
        ("space", file.space.variables.iter().collect()),
        (
            "invariants",
            file.invariants.entries.iter().map(|(n, _)| n).collect(),
        ),
        (
            "parameters",
            file.parameters
                .critical
                .iter()
                .chain(&file.parameters.generic)
                .collect(),
        ),
    ];
    for (section, names) in groups {
        for name in names {
            if !is_name(name) {
                return Err(CliError::input(
                    section,
                    format!("`{name}` is not a valid name"),
                ));
            }
            if let Some((other, _)) = seen.iter().find(|(_, n)| *n == name.as_str()) {
                let place = match locate(text, section, name, None) {
                    Some((l, _)) => format!("line {l}: "),
                    None => String::new(),
                };
                return Err(CliError::input(
                    section,
                    format!("{place}name `{name}` is already used in [{other}]"),
                ));
            }
            seen.push((section, name.as_str()));
        }
    }
    Ok(())
}

/// 1-based line and column of byte `offset`.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// The table header in force at `line`.
fn section_at(text: &str, line: usize) -> String {
    text.lines()
        .take(line)
        .filter_map(header)
        .last()
        .map(|h| h.split('.').next().unwrap_or(&h).to_string())
        .unwrap_or_else(|| "file".to_string())
}

fn header(line: &str) -> Option<String> {
    let t = line.trim();
    if !t.starts_with('[') {
        return None;
    }
    let inner = t.trim_start_matches('[');
    Some(inner[..inner.find(']')?].trim().to_string())
}

/// Position of the quoted `needle` in the value of `key` within `[section]`,
/// or of the key itself.
fn locate(text: &str, section: &str, key: &str, needle: Option<&str>) -> Option<(usize, usize)> {
    let mut current = String::new();
    let mut in_key = false;
    for (i, line) in text.lines().enumerate() {
        if let Some(h) = header(line) {
            if in_key {
                return None;
            }
            current = h;
            continue;
        }
        if current != section {
            continue;
        }
        let mut from = 0;
        if !in_key {
            let t = line.trim_start();
            let Some(rest) = t
                .strip_prefix(key)
                .or_else(|| t.strip_prefix(&format!("\"{key}\"")))
            else {
                continue;
            };
            let Some(eq) = rest.trim_start().strip_prefix('=') else {
                continue;
            };
            in_key = true;
            from = line.len() - eq.len();
            if needle.is_none() {
                return Some((i + 1, line.len() - t.len() + 1));
            }
        }
        let quoted = format!("\"{}\"", needle.unwrap_or_default());
        if let Some(pos) = line[from..].find(&quoted) {
            return Some((i + 1, line[..from + pos].chars().count() + 2));
        }
    }
    None
}

fn locate_message(
    text: &str,
    section: &str,
    key: &str,
    expr: &str,
    column: usize,
    message: &str,
) -> CliError {
    match locate(text, section, key, Some(expr)) {
        Some((line, col)) => CliError::input(
            section,
            format!("line {line}, column {}: {message}", col + column - 1),
        ),
        None => CliError::input(section, format!("{key}: {message}")),
    }
}

/// An expression error placed at its line and column in the file.
fn located(text: &str, section: &str, key: &str, expr: &str, e: orbitred::Error) -> CliError {
    match e {
        orbitred::Error::Parse { column, message } => {
            locate_message(text, section, key, expr, column, &message)
        }
        other => {
            let err = CliError::from_core(section, other);
            match err {
                CliError::Input { message, .. } => {
                    locate_message(text, section, key, expr, 1, &message)
                }
                domain => domain,
            }
        }
    }
}
