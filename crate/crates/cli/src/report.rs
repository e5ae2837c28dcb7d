//! The machine-readable reduction report and its text rendering.

use std::fmt::Write as _;
use std::sync::Arc;

use orbitred::parse::{parse_mixed, parse_poly, parse_ratfun};
use orbitred::{
    EliminationPlan, Generator, InvariantBasis, Monomial, ReductionReport, ResonanceCondition,
    Stage, StageStatus, VarSet,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::problem::{parse_monomial, tie_break_name, OrderSpec, Settings, FORMAT_VERSION};

pub const TOOL: &str = "orbitred";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub format_version: u32,
    pub tool: String,
    pub version: String,
    pub input_digest: String,
    pub seed: u64,
    pub mode: String,
    pub critical: Vec<String>,
    pub parameters: Vec<String>,
    pub truncation: u32,
    pub strategy: StrategyDoc,
    pub max_sets: usize,
    pub orders: Vec<OrderSpec>,
    pub original_potential: String,
    pub stages: Vec<StageDoc>,
    pub conditions: Vec<String>,
    pub surviving: Vec<String>,
    pub reduced_potential: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDoc {
    pub kind: String,
    pub keep: Vec<String>,
    pub tie_break: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageDoc {
    pub target_degree: u32,
    pub source_degree: u32,
    pub generator_degree: u32,
    pub status: String,
    pub targets: Vec<String>,
    pub zeroed: Vec<String>,
    /// Generator monomials with their coefficients, in column order.
    pub solution: Vec<[String; 2]>,
    pub minor: Option<String>,
    pub conditions: Vec<String>,
    pub generator: Option<String>,
    pub note: Option<String>,
}

impl ReportDoc {
    pub fn new(
        report: &ReductionReport,
        basis: &InvariantBasis,
        settings: &Settings,
        digest: &str,
        seed: u64,
    ) -> Self {
        let j = basis.j_vars();
        let monos = |ms: &[Monomial]| ms.iter().map(|m| m.render(j)).collect::<Vec<_>>();
        let stages = report
            .stages
            .iter()
            .map(|s| StageDoc {
                target_degree: s.target_degree,
                source_degree: s.source_degree,
                generator_degree: s.generator_degree,
                status: s.status.as_str().to_string(),
                targets: monos(&s.targets),
                zeroed: s
                    .plan
                    .as_ref()
                    .map(|p| monos(&p.zeroed))
                    .unwrap_or_default(),
                solution: s
                    .plan
                    .as_ref()
                    .map(|p| {
                        p.solution
                            .iter()
                            .map(|(m, c)| [m.render(j), c.render()])
                            .collect()
                    })
                    .unwrap_or_default(),
                minor: s.plan.as_ref().map(|p| p.minor.to_string()),
                conditions: s
                    .plan
                    .as_ref()
                    .map(|p| p.conditions.iter().map(|c| c.poly().to_string()).collect())
                    .unwrap_or_default(),
                generator: s.generator.as_ref().map(|g| g.poly().to_string()),
                note: s.note.clone(),
            })
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest: digest.to_string(),
            seed,
            mode: report.mode.as_str().to_string(),
            critical: report.critical.clone(),
            parameters: report.original.ctx().names().to_vec(),
            truncation: report.truncation,
            strategy: StrategyDoc {
                kind: settings.strategy_name().to_string(),
                keep: if settings.keep_set {
                    settings.keep.clone()
                } else {
                    Vec::new()
                },
                tie_break: tie_break_name(settings.tie_break).to_string(),
            },
            max_sets: settings.max_sets,
            orders: settings.orders.clone(),
            original_potential: report.original.to_string(),
            stages,
            conditions: report
                .conditions
                .iter()
                .map(|c| c.poly().to_string())
                .collect(),
            surviving: monos(&report.surviving),
            reduced_potential: report.reduced.to_string(),
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let doc: ReportDoc = serde_json::from_str(text).map_err(|e| {
            CliError::input(
                "report",
                format!("line {}, column {}: {e}", e.line(), e.column()),
            )
        })?;
        if doc.format_version != FORMAT_VERSION {
            return Err(CliError::input(
                "report",
                format!(
                    "unsupported version {} (expected {FORMAT_VERSION})",
                    doc.format_version
                ),
            ));
        }
        Ok(doc)
    }

    /// Rebuilds the engine report from the stored strings alone.
    pub fn to_report(&self, basis: &InvariantBasis) -> CliResult<ReductionReport> {
        let j = basis.j_vars();
        let pv = VarSet::new(self.parameters.iter().map(String::as_str));
        let poly = |s: &str| parse_mixed(s, j, &pv).map_err(|e| bad(format!("`{s}`: {e}")));
        let mono = |s: &String| parse_monomial(s, j).map_err(bad);
        let cond = |s: &String| {
            parse_poly(s, &pv)
                .map(|p| ResonanceCondition::new(&p))
                .map_err(|e| bad(format!("`{s}`: {e}")))
        };
        let mut stages = Vec::with_capacity(self.stages.len());
        for s in &self.stages {
            let targets: Vec<Monomial> = s.targets.iter().map(mono).collect::<CliResult<_>>()?;
            let plan = match &s.minor {
                None => None,
                Some(minor) => {
                    let zeroed: Vec<Monomial> =
                        s.zeroed.iter().map(mono).collect::<CliResult<_>>()?;
                    let zeroed_rows = zeroed
                        .iter()
                        .map(|z| {
                            targets
                                .iter()
                                .position(|t| t == z)
                                .ok_or_else(|| bad("zeroed monomial is not a target"))
                        })
                        .collect::<CliResult<_>>()?;
                    let solution = s
                        .solution
                        .iter()
                        .map(|[m, c]| {
                            let c = parse_ratfun(c, &pv).map_err(|e| bad(format!("`{c}`: {e}")))?;
                            Ok((mono(m)?, c))
                        })
                        .collect::<CliResult<_>>()?;
                    Some(EliminationPlan {
                        zeroed,
                        zeroed_rows,
                        solution,
                        conditions: s.conditions.iter().map(cond).collect::<CliResult<_>>()?,
                        minor: parse_poly(minor, &pv)
                            .map_err(|e| bad(format!("`{minor}`: {e}")))?,
                    })
                }
            };
            let generator = match &s.generator {
                Some(g) => Some(Generator::new(poly(g)?).map_err(|e| bad(e.to_string()))?),
                None => None,
            };
            stages.push(Stage {
                target_degree: s.target_degree,
                source_degree: s.source_degree,
                generator_degree: s.generator_degree,
                status: parse_status(&s.status)?,
                targets,
                plan,
                generator,
                note: s.note.clone(),
            });
        }
        Ok(ReductionReport {
            original: poly(&self.original_potential)?,
            reduced: poly(&self.reduced_potential)?,
            stages,
            conditions: self.conditions.iter().map(cond).collect::<CliResult<_>>()?,
            mode: self.mode.parse().map_err(bad)?,
            truncation: self.truncation,
            critical: self.critical.clone(),
            surviving: self.surviving.iter().map(mono).collect::<CliResult<_>>()?,
        })
    }
}

fn bad(message: impl Into<String>) -> CliError {
    CliError::input("report", message)
}

fn parse_status(s: &str) -> CliResult<StageStatus> {
    [
        StageStatus::Applied,
        StageStatus::Trivial,
        StageStatus::Skipped,
        StageStatus::Infeasible,
    ]
    .into_iter()
    .find(|st| st.as_str() == s)
    .ok_or_else(|| bad(format!("unknown stage status `{s}`")))
}

/// Plain-text summary of a reduction.
pub fn render_text(report: &ReductionReport, basis: &InvariantBasis) -> String {
    let j: &Arc<VarSet> = basis.j_vars();
    let list = |ms: &[Monomial]| {
        ms.iter()
            .map(|m| m.render(j))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut out = String::new();
    let critical = if report.critical.is_empty() {
        "none".to_string()
    } else {
        report.critical.join(", ")
    };
    let _ = writeln!(out, "mode: {} (critical: {critical})", report.mode);
    let _ = writeln!(out, "truncation: {}", report.truncation);
    let _ = writeln!(out, "original: {}", report.original);
    for s in &report.stages {
        let _ = writeln!(
            out,
            "stage {}: {} (source degree {}, generator degree {})",
            s.target_degree, s.status, s.source_degree, s.generator_degree
        );
        let _ = writeln!(out, "  targets: {}", list(&s.targets));
        if let Some(p) = &s.plan {
            let _ = writeln!(out, "  zeroed: {}", list(&p.zeroed));
            for c in &p.conditions {
                let _ = writeln!(out, "  requires: {c}");
            }
        }
        if let Some(g) = &s.generator {
            let _ = writeln!(out, "  generator: {}", g.poly());
        }
        if let Some(n) = &s.note {
            let _ = writeln!(out, "  note: {n}");
        }
    }
    let _ = writeln!(out, "conditions:");
    if report.conditions.is_empty() {
        let _ = writeln!(out, "  none");
    }
    for c in &report.conditions {
        let _ = writeln!(out, "  {c}");
    }
    let _ = writeln!(out, "surviving: {}", list(&report.surviving));
    let _ = writeln!(out, "reduced: {}", report.reduced);
    out
}
