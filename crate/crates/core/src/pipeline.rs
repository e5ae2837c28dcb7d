//! Staged reduction: one generator per target degree, lowest degree first.

use std::collections::BTreeMap;
use std::fmt;

use crate::elimination::{
    at_locus, build_transfer, eliminable_sets, push_condition, source_component,
    target_coefficients, EliminationMode, EliminationPlan, Overrides, ResonanceCondition,
};
use crate::error::{Error, Result};
use crate::invariant::{InvariantBasis, PMatrix};
use crate::orbit::{lie_transform, Generator, OrbitPoly, ParameterSpec};
use crate::poly::Monomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Keep the monomials that come first in the monomial order.
    #[default]
    KeepEarliest,
    /// Keep the monomials that come last in the monomial order.
    KeepLatest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyKind {
    MaxEliminate,
    /// Never target the listed monomials.
    KeepSet(Vec<Monomial>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub tie_break: TieBreak,
}

impl Strategy {
    pub fn max_eliminate() -> Self {
        Self {
            kind: StrategyKind::MaxEliminate,
            tie_break: TieBreak::default(),
        }
    }

    pub fn keep_set(keep: Vec<Monomial>) -> Self {
        Self {
            kind: StrategyKind::KeepSet(keep),
            tie_break: TieBreak::default(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            StrategyKind::MaxEliminate => "max_eliminate",
            StrategyKind::KeepSet(_) => "keep_set",
        }
    }

    fn keeps(&self, m: &Monomial) -> bool {
        matches!(&self.kind, StrategyKind::KeepSet(k) if k.contains(m))
    }
}

impl Default for Strategy {
    fn default() -> Self {
        Self::max_eliminate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOptions {
    pub mode: EliminationMode,
    pub strategy: Strategy,
    /// Defaults to the stability order of the basis.
    pub truncation: Option<u32>,
    pub max_sets: usize,
    /// Explicit monomial lists keyed by target degree.
    pub overrides: BTreeMap<u32, Overrides>,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self {
            mode: EliminationMode::Fixed,
            strategy: Strategy::default(),
            truncation: None,
            max_sets: 256,
            overrides: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    /// A nonzero generator was applied.
    Applied,
    /// The chosen targets already vanish; nothing to apply.
    Trivial,
    /// No generator reaches this degree at first order.
    Skipped,
    /// The keep set leaves no admissible elimination.
    Infeasible,
}

impl StageStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            StageStatus::Applied => "applied",
            StageStatus::Trivial => "trivial",
            StageStatus::Skipped => "skipped",
            StageStatus::Infeasible => "infeasible",
        }
    }
}

impl fmt::Display for StageStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub target_degree: u32,
    pub source_degree: u32,
    pub generator_degree: u32,
    pub status: StageStatus,
    pub targets: Vec<Monomial>,
    pub plan: Option<EliminationPlan>,
    pub generator: Option<Generator>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub original: OrbitPoly,
    pub reduced: OrbitPoly,
    pub stages: Vec<Stage>,
    pub conditions: Vec<ResonanceCondition>,
    pub mode: EliminationMode,
    pub truncation: u32,
    pub critical: Vec<String>,
    /// Monomials left in the reduced potential (see [`surviving_monomials`]).
    pub surviving: Vec<Monomial>,
}

impl ReductionReport {
    /// Stage generators in application order.
    pub fn generators(&self) -> Vec<&Generator> {
        self.stages
            .iter()
            .filter_map(|s| s.generator.as_ref())
            .collect()
    }

    /// Monomials zeroed by applied or trivial stages.
    pub fn zeroed(&self) -> Vec<&Monomial> {
        self.stages
            .iter()
            .filter_map(|s| s.plan.as_ref())
            .flat_map(|p| p.zeroed.iter())
            .collect()
    }
}

/// The deduplicated union of all stage conditions, in stage order.
pub fn conditions_summary(report: &ReductionReport) -> Vec<ResonanceCondition> {
    let mut out = Vec::new();
    for plan in report.stages.iter().filter_map(|s| s.plan.as_ref()) {
        for c in &plan.conditions {
            push_condition(&mut out, c.clone());
        }
    }
    out
}

/// Monomials with nonzero coefficient at the critical locus, together with
/// the terms whose original coefficient is purely critical (e.g. `a*J1`).
/// In fixed mode this is every monomial of `reduced`.
pub fn surviving_monomials(
    original: &OrbitPoly,
    reduced: &OrbitPoly,
    mode: EliminationMode,
    params: &ParameterSpec,
) -> Result<Vec<Monomial>> {
    let restricted = at_locus(reduced, mode, params)?;
    let mut out: Vec<Monomial> = Vec::new();
    for (m, c) in reduced.terms() {
        let keep = if restricted.coeff(m).is_some() {
            true
        } else {
            let orig = original.coeff_or_zero(m);
            !orig.is_zero() && orig.substitute_zero(params.critical())?.is_zero() && !c.is_zero()
        };
        if keep {
            out.push(m.clone());
        }
    }
    Ok(out)
}

fn choose(
    plans: Vec<EliminationPlan>,
    targets: &[Monomial],
    tie: TieBreak,
) -> Option<EliminationPlan> {
    let kept = |p: &EliminationPlan| -> Vec<Monomial> {
        let mut k: Vec<Monomial> = targets
            .iter()
            .filter(|t| !p.zeroed.contains(t))
            .cloned()
            .collect();
        k.sort();
        if tie == TieBreak::KeepLatest {
            k.reverse();
        }
        k
    };
    let mut best: Option<(Vec<Monomial>, EliminationPlan)> = None;
    for p in plans {
        let k = kept(&p);
        let better = match &best {
            None => true,
            Some((bk, _)) => match tie {
                TieBreak::KeepEarliest => k < *bk,
                TieBreak::KeepLatest => k > *bk,
            },
        };
        if better {
            best = Some((k, p));
        }
    }
    best.map(|(_, p)| p)
}

/// Runs the staged reduction of `f`.
pub fn reduce(
    f: &OrbitPoly,
    basis: &InvariantBasis,
    params: &ParameterSpec,
    opts: &ReductionOptions,
) -> Result<ReductionReport> {
    if f.ctx() != params.vars() {
        return Err(Error::VarSetMismatch {
            left: params.vars().names().join(","),
            right: f.ctx().names().join(","),
        });
    }
    let n = opts.truncation.unwrap_or_else(|| basis.stability_order());
    let p = basis.p_matrix()?;
    let original = basis.normal_form(f).truncate(n);
    let mut current = original.clone();
    let mode = opts.mode;
    let first = source_component(&current, mode, params)?;
    let w0 = first.degree().unwrap_or(0);
    let mut stages = Vec::new();

    for w in (w0 + 1)..=n {
        let default_targets = basis.normal_monomials(w);
        let ov = opts.overrides.get(&w).cloned().unwrap_or_default();
        if default_targets.is_empty() && ov.targets.is_none() {
            continue;
        }
        let src = source_component(&current, mode, params)?;
        let w_s = src.degree().unwrap_or(0);
        if w + 2 < w_s + 4 {
            continue;
        }
        let stage = run_stage(&mut current, &src, w, basis, &p, params, opts, &ov, n)?;
        stages.push(stage);
    }

    let surviving = surviving_monomials(&original, &current, mode, params)?;
    let mut report = ReductionReport {
        original,
        reduced: current,
        stages,
        conditions: Vec::new(),
        mode,
        truncation: n,
        critical: params.critical_names(),
        surviving,
    };
    report.conditions = conditions_summary(&report);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn run_stage(
    current: &mut OrbitPoly,
    src: &OrbitPoly,
    w: u32,
    basis: &InvariantBasis,
    p: &PMatrix,
    params: &ParameterSpec,
    opts: &ReductionOptions,
    ov: &Overrides,
    n: u32,
) -> Result<Stage> {
    let mode = opts.mode;
    let t = build_transfer(src, w, basis, p, ov)?;
    let mut stage = Stage {
        target_degree: w,
        source_degree: t.source_degree,
        generator_degree: t.generator_degree,
        status: StageStatus::Skipped,
        targets: t.targets.clone(),
        plan: None,
        generator: None,
        note: None,
    };
    if t.generators.is_empty() {
        stage.note = Some(format!(
            "no generator monomials of degree {}",
            t.generator_degree
        ));
        return Ok(stage);
    }
    let rhs = target_coefficients(current, &t, mode, params)?;
    let rows: Vec<usize> = (0..t.rows())
        .filter(|&i| !opts.strategy.keeps(&t.targets[i]))
        .collect();
    let plans = eliminable_sets(&t, &rhs, mode, params, opts.max_sets, Some(&rows))?;
    let Some(plan) = choose(plans, &t.targets, opts.strategy.tie_break) else {
        if matches!(
            opts.strategy.kind,
            crate::pipeline::StrategyKind::KeepSet(_)
        ) && !rows.is_empty()
        {
            stage.status = StageStatus::Infeasible;
            stage.note = Some("no admissible elimination outside the keep set".into());
        } else {
            stage.note = Some("transfer matrix vanishes at first order".into());
        }
        return Ok(stage);
    };
    let g = plan.generator(basis.j_vars(), params.vars())?;
    if g.is_zero() {
        stage.status = StageStatus::Trivial;
    } else {
        *current = basis.normal_form(&lie_transform(current, &g, basis, p, n)?);
        stage.status = StageStatus::Applied;
        stage.generator = Some(g);
    }
    let check = at_locus(current, mode, params)?;
    if let Some(m) = plan.zeroed.iter().find(|m| check.coeff(m).is_some()) {
        unreachable!(
            "stage at degree {w} left {} nonzero",
            m.render(basis.j_vars())
        );
    }
    stage.plan = Some(plan);
    Ok(stage)
}

/// Re-applies the stage generators of `report` to its original potential.
pub fn replay(report: &ReductionReport, basis: &InvariantBasis) -> Result<OrbitPoly> {
    let p = basis.p_matrix()?;
    let mut f = report.original.clone();
    for g in report.generators() {
        f = basis.normal_form(&lie_transform(&f, g, basis, &p, report.truncation)?);
    }
    Ok(f)
}
