//! Command implementations. Each returns the text for stdout.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use orbitred::numeric::default_scales;
use orbitred::parse::parse_mixed;
use orbitred::{criterion_check, reduce, verify_reduction, NumericContext, ReductionReport};

use crate::error::{CliError, CliResult};
use crate::problem::{parse_mode, parse_problem, parse_tie_break, Problem, Settings};
use crate::report::{render_text, ReportDoc};

pub fn read_file(path: &Path, section: &str) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(section, format!("{}: {e}", path.display())))
}

pub fn load_problem(path: &Path) -> CliResult<Problem> {
    parse_problem(&read_file(path, "input")?)
}

pub fn pmatrix(problem: &Problem) -> CliResult<String> {
    let p = problem
        .basis
        .p_matrix()
        .map_err(|e| CliError::from_core("invariants", e))?;
    Ok(p.to_string())
}

pub fn stability_order(problem: &Problem) -> String {
    format!("{}\n", problem.basis.stability_order())
}

/// The most general potential up to `degree` (the stability order by default).
pub fn general_potential(problem: &Problem, degree: Option<u32>) -> String {
    let n = degree.unwrap_or_else(|| problem.basis.stability_order());
    let (f, names) = problem.basis.general_potential(n);
    format!("coefficients: {}\npotential: {f}\n", names.len())
}

/// Runs the elimination criterion on a single term of the problem potential.
pub fn check_term(problem: &Problem, term: &str, mode: Option<&str>) -> CliResult<String> {
    let mode = match mode {
        Some(m) => parse_mode(m, "flags")?,
        None => problem.settings.mode,
    };
    let pv = problem.potential.ctx();
    let t = parse_mixed(term, problem.basis.j_vars(), pv)
        .map_err(|e| CliError::input("flags", format!("--term `{term}`: {e}")))?;
    if t.len() > 1 {
        return Err(CliError::input(
            "flags",
            format!("--term `{term}` must be a single term"),
        ));
    }
    let p = problem
        .basis
        .p_matrix()
        .map_err(|e| CliError::from_core("invariants", e))?;
    let r = criterion_check(
        &t,
        &problem.potential,
        &problem.basis,
        &p,
        mode,
        &problem.params,
    )
    .map_err(|e| CliError::from_core("check-term", e))?;
    let mut out = String::new();
    let _ = writeln!(out, "mode: {mode}");
    if r.eliminable {
        let _ = writeln!(out, "eliminable: yes");
    } else {
        let _ = writeln!(out, "eliminable: no");
    }
    if let Some(g) = &r.generator {
        let _ = writeln!(out, "generator: {}", g.poly());
    }
    if let Some(q) = &r.q {
        for (name, qi) in problem.basis.names().iter().zip(q) {
            let _ = writeln!(out, "Q[{name}]: {qi}");
        }
    }
    for c in &r.conditions {
        let _ = writeln!(out, "requires: {c}");
    }
    if let Some(reason) = &r.reason {
        let _ = writeln!(out, "reason: {reason}");
    }
    Ok(out)
}

/// Reduces the problem potential under `settings`.
pub fn run_reduction(
    problem: &Problem,
    settings: &Settings,
) -> CliResult<(ReductionReport, ReportDoc)> {
    let opts = settings.reduction_options(&problem.basis)?;
    let seed = settings.resolved_seed()?;
    let report = reduce(&problem.potential, &problem.basis, &problem.params, &opts)
        .map_err(|e| CliError::from_core("reduce", e))?;
    let doc = ReportDoc::new(&report, &problem.basis, settings, &problem.digest, seed);
    Ok((report, doc))
}

pub fn reduce_text(problem: &Problem, report: &ReductionReport) -> String {
    render_text(report, &problem.basis)
}

/// Settings recorded in a report.
pub fn settings_of(doc: &ReportDoc) -> CliResult<Settings> {
    let s = "report";
    Ok(Settings {
        mode: parse_mode(&doc.mode, s)?,
        truncation: Some(doc.truncation),
        keep_set: match doc.strategy.kind.as_str() {
            "keep_set" => true,
            "max_eliminate" => false,
            other => return Err(CliError::input(s, format!("unknown strategy `{other}`"))),
        },
        keep: doc.strategy.keep.clone(),
        tie_break: parse_tie_break(&doc.strategy.tie_break, s)?,
        max_sets: doc.max_sets,
        seed: Some(doc.seed),
        orders: doc.orders.clone(),
    })
}

/// Parameter values for `verify`: explicit assignments, then `default` for
/// every remaining parameter.
pub fn assignments(
    problem: &Problem,
    set: &[String],
    default: Option<f64>,
) -> CliResult<BTreeMap<String, f64>> {
    let names = problem.potential.ctx().names();
    let mut values = BTreeMap::new();
    for item in set {
        let bad = || CliError::input("flags", format!("--set `{item}`: expected NAME=NUMBER"));
        let (k, v) = item.split_once('=').ok_or_else(bad)?;
        let k = k.trim();
        if !names.iter().any(|n| n == k) {
            return Err(CliError::input(
                "flags",
                format!("--set `{item}`: unknown parameter `{k}`"),
            ));
        }
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        values.insert(k.to_string(), v);
    }
    if let Some(d) = default {
        for n in names {
            values.entry(n.clone()).or_insert(d);
        }
    }
    Ok(values)
}

pub struct VerifyOutcome {
    pub text: String,
    pub pass: bool,
}

/// Checks a stored report against the problem, then runs the numeric oracle.
pub fn verify(
    problem: &Problem,
    doc: &ReportDoc,
    values: BTreeMap<String, f64>,
    samples: usize,
    seed: Option<u64>,
) -> CliResult<VerifyOutcome> {
    if doc.input_digest != problem.digest {
        return Err(CliError::input(
            "report",
            format!(
                "input digest {} does not match the problem file ({})",
                doc.input_digest, problem.digest
            ),
        ));
    }
    let settings = settings_of(doc)?;
    let (fresh, fresh_doc) = run_reduction(problem, &settings)?;
    if let Some(field) = first_difference(doc, &fresh_doc) {
        return Err(CliError::domain(
            "report",
            format!("{field} differs from a fresh reduction of the input"),
        ));
    }
    let stored = doc.to_report(&problem.basis)?;
    if stored != fresh {
        return Err(CliError::domain(
            "report",
            "re-parsed report differs from a fresh reduction of the input",
        ));
    }
    if samples == 0 {
        return Err(CliError::input("flags", "--samples must be positive"));
    }
    let seed = seed.unwrap_or(doc.seed);
    let ctx = NumericContext::new(problem.basis.clone(), values);
    let v = verify_reduction(&stored, &ctx, samples, &default_scales(), seed)
        .map_err(|e| CliError::from_core("verify", e))?;
    let mut text = String::new();
    let _ = writeln!(text, "seed: {seed}");
    let _ = writeln!(text, "samples: {samples}");
    for (eps, d) in &v.defects {
        let _ = writeln!(text, "scale {eps:e}: defect {d:e}");
    }
    if v.exact {
        let _ = writeln!(text, "slope: exact (required {})", v.required);
    } else {
        let _ = writeln!(text, "slope: {:.3} (required {})", v.slope, v.required);
    }
    let _ = writeln!(text, "result: {}", if v.pass { "pass" } else { "fail" });
    Ok(VerifyOutcome { text, pass: v.pass })
}

fn first_difference(a: &ReportDoc, b: &ReportDoc) -> Option<String> {
    if a == b {
        return None;
    }
    let (ja, jb) = (serde_json::to_value(a).ok()?, serde_json::to_value(b).ok()?);
    let (oa, ob) = (ja.as_object()?, jb.as_object()?);
    oa.iter()
        .find(|(k, v)| ob.get(*k) != Some(v))
        .map(|(k, _)| format!("field `{k}`"))
        .or_else(|| Some("report".to_string()))
}
