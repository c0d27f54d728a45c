//! Command execution over a resolved workspace. Every command produces one
//! deterministic report: structural validation always runs first, and a
//! validation failure aborts any other command instead of computing on
//! broken data.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::artin::ArtinLocalAlgebra;
use crate::deform::{
    cocycle_residual, main_theorem_check, mc_residual_linfty, mc_solve_order_by_order,
};
use crate::cech::obstruction_naturality_check;
use crate::error::{Error, Result};
use crate::glie::CoeffRing;
use crate::rational::format_rat;
use crate::report::{Report, Violation};
use crate::rng::Sampler;
use crate::scs::{CompatibleSampler, ScsDgla, TotElement, TwElement};
use crate::transfer::{multisets, TotKey, TransferEngine};
use crate::workspace::{JobKind, NamedElement, ResolvedJob, Workspace};

/// Everything the command line can ask for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    SideConditions,
    TransferDump,
    LinftyCheck,
    McCheck,
    CocycleCheck,
    SolveMc,
    MainTheorem,
    ObstructionNaturality,
}

impl Command {
    pub fn parse(name: &str) -> Option<Command> {
        Some(match name {
            "validate" => Command::Validate,
            "side-conditions" => Command::SideConditions,
            "transfer-dump" => Command::TransferDump,
            "linfty-check" => Command::LinftyCheck,
            "mc-check" => Command::McCheck,
            "cocycle-check" => Command::CocycleCheck,
            "solve-mc" => Command::SolveMc,
            "main-theorem" => Command::MainTheorem,
            "obstruction-naturality" => Command::ObstructionNaturality,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::SideConditions => "side-conditions",
            Command::TransferDump => "transfer-dump",
            Command::LinftyCheck => "linfty-check",
            Command::McCheck => "mc-check",
            Command::CocycleCheck => "cocycle-check",
            Command::SolveMc => "solve-mc",
            Command::MainTheorem => "main-theorem",
            Command::ObstructionNaturality => "obstruction-naturality",
        }
    }
}

/// Optional knobs; unset fields fall back to per-command defaults, then to
/// the matching fields of file-level job declarations.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub rng_seed: Option<u64>,
    pub instances: Option<usize>,
    pub max_arity: Option<usize>,
    pub seed_class: Option<String>,
}

/// Report plus the abort marker the exit code depends on.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    /// True when validation failed and the requested command never ran.
    pub aborted: bool,
}

/// Structural validation of every declared and derived object, in a fixed
/// order: coefficient rings, Lie algebras, covers, sheaf morphisms, tower
/// levels, towers, tower morphisms.
pub fn validate_all(ws: &Workspace) -> Report {
    let mut report = Report::new();
    for algebra in ws.algebras.values() {
        report.merge(algebra.validate());
    }
    for g in ws.lie_algebras.values() {
        report.merge(g.validate());
    }
    for cover in ws.covers.values() {
        report.merge(cover.validate());
    }
    for morphism in ws.sheaf_morphisms.values() {
        report.merge(morphism.validate());
    }
    for tower in ws.towers.values() {
        for level in 0..=tower.max_level() {
            report.merge(tower.level(level).validate());
        }
        report.merge(tower.validate());
    }
    for morphism in ws.morphisms.values() {
        report.merge(morphism.validate());
    }
    report
}

/// Contraction and side-condition battery on one tower. The identities
/// that hold basis-wise are checked on every basis element of the total
/// complex; the homotopy identities are checked on `samples` random
/// compatible Thom-Whitney elements drawn from `seed`.
pub fn side_conditions_battery(scs: &Arc<ScsDgla>, samples: usize, seed: u64) -> Result<Report> {
    let mut report = Report::new();
    let name = scs.name.clone();
    let mut basis_count = 0usize;
    for level in 0..=scs.max_level() {
        for b in 0..scs.level(level).dim() {
            basis_count += 1;
            let tag = format!("level {level}, basis {}", scs.level(level).basis_name(b));
            let x = TotElement::basis(scs, level, b);
            let ex = TwElement::dupont_e(&x)?;
            if !ex.dupont_i().sub(&x)?.is_zero() {
                report.push(Violation::new("contraction-ie", &name, format!("I E != Id at {tag}")));
            }
            if !ex.dupont_h()?.is_zero() {
                report.push(Violation::new("side-condition-he", &name, format!("h E != 0 at {tag}")));
            }
            let commuted = TwElement::dupont_e(&x.tot_differential()?)?;
            if !ex.tw_differential().sub(&commuted)?.is_zero() {
                report.push(Violation::new("chain-map-e", &name, format!("d E != E d at {tag}")));
            }
        }
    }
    let source = CompatibleSampler::new(scs)?;
    let mut rng = Sampler::new(seed);
    for k in 0..samples {
        let w = source.sample(&mut rng)?;
        let tag = format!("sample {k}");
        let hw = w.dupont_h()?;
        let lhs = TwElement::dupont_e(&w.dupont_i())?.sub(&w)?;
        let rhs = w.tw_differential().dupont_h()?.add(&hw.tw_differential())?;
        if !lhs.sub(&rhs)?.is_zero() {
            report.push(Violation::new(
                "contraction-homotopy",
                &name,
                format!("E I - Id != h d + d h at {tag}"),
            ));
        }
        if !hw.dupont_h()?.is_zero() {
            report.push(Violation::new("side-condition-hh", &name, format!("h h != 0 at {tag}")));
        }
        if !hw.dupont_i().is_zero() {
            report.push(Violation::new("side-condition-ih", &name, format!("I h != 0 at {tag}")));
        }
        let di = w.dupont_i().tot_differential()?;
        if !di.sub(&w.tw_differential().dupont_i())?.is_zero() {
            report.push(Violation::new("chain-map-i", &name, format!("d I != I d at {tag}")));
        }
    }
    report.note(format!(
        "side conditions on '{name}': {basis_count} basis elements, {samples} samples"
    ));
    Ok(report)
}

/// Runs one command against a workspace. `Ok` with `aborted: true` means
/// validation failed and the command itself never ran.
pub fn run(ws: &Workspace, command: Command, opts: &RunOptions) -> Result<RunOutcome> {
    let seed = opts.rng_seed.unwrap_or(0);
    let mut report = Report::new();
    report.note(format!("command: {}", command.name()));
    report.note(format!("rng-seed: {seed}"));

    let validation = validate_all(ws);
    if command == Command::Validate {
        report.note(format!(
            "validated {} algebra(s), {} Lie algebra(s), {} cover(s), {} tower(s), {} morphism(s)",
            ws.algebras.len(),
            ws.lie_algebras.len(),
            ws.covers.len(),
            ws.towers.len(),
            ws.morphisms.len()
        ));
        report.merge(validation);
        return Ok(RunOutcome { report, aborted: false });
    }
    if !validation.is_clean() {
        report.note("aborted: workspace validation failed, the command did not run");
        report.merge(validation);
        return Ok(RunOutcome { report, aborted: true });
    }

    match command {
        Command::Validate => unreachable!("handled above"),
        Command::SideConditions => {
            let samples = opts.instances.unwrap_or(25);
            for tower in ws.towers.values() {
                report.merge(side_conditions_battery(tower, samples, seed)?);
            }
        }
        Command::TransferDump => {
            let cap = opts.max_arity.unwrap_or(2);
            for tower in ws.towers.values() {
                report.merge(transfer_dump(tower, cap)?);
            }
        }
        Command::LinftyCheck => {
            let cap = opts.max_arity.unwrap_or(3);
            for tower in ws.towers.values() {
                let engine = TransferEngine::new(tower);
                report.note(format!("L-infinity relations on '{}' through arity {cap}", tower.name));
                report.merge(engine.check_linfty_relations(cap)?);
            }
        }
        Command::McCheck => {
            let mut engines = EngineCache::new();
            if ws.elements.is_empty() {
                report.note("no elements declared, nothing to check");
            }
            for el in &ws.elements {
                mc_check_element(&mut report, &mut engines, el);
            }
        }
        Command::CocycleCheck => {
            if ws.elements.is_empty() {
                report.note("no elements declared, nothing to check");
            }
            for el in &ws.elements {
                cocycle_check_element(&mut report, el);
            }
        }
        Command::SolveMc => {
            let mut engines = EngineCache::new();
            let selected: Vec<&NamedElement> = match &opts.seed_class {
                Some(wanted) => {
                    let found = ws.elements.iter().find(|e| &e.name == wanted);
                    match found {
                        Some(el) => vec![el],
                        None => {
                            return Err(Error::Unresolved(format!(
                                "seed class '{wanted}' is not a declared element"
                            )))
                        }
                    }
                }
                None => ws.elements.iter().collect(),
            };
            if selected.is_empty() {
                report.note("no elements declared, nothing to solve");
            }
            for el in selected {
                solve_mc_element(&mut report, &mut engines, el);
            }
        }
        Command::MainTheorem => {
            let jobs: Vec<&ResolvedJob> =
                ws.jobs.iter().filter(|j| j.kind == JobKind::MainTheorem).collect();
            if jobs.is_empty() {
                report.note("no main-theorem jobs declared");
            }
            for job in jobs {
                let tower = job.tower.as_ref().expect("checked at resolution");
                let algebra = job.algebra.as_ref().expect("checked at resolution");
                let instances = opts.instances.or(job.instances).unwrap_or(25);
                let job_seed = opts.rng_seed.or(job.rng_seed).unwrap_or(0);
                report.note(format!(
                    "main-theorem '{}': tower '{}', algebra '{}', instances {instances}, rng-seed {job_seed}",
                    job.name, tower.name, algebra.name
                ));
                match main_theorem_check(tower, algebra, instances, job_seed) {
                    Ok(r) => report.merge(r),
                    Err(e) => {
                        report.push(Violation::new("job-error", &job.name, e.to_string()))
                    }
                }
            }
        }
        Command::ObstructionNaturality => {
            let jobs: Vec<&ResolvedJob> =
                ws.jobs.iter().filter(|j| j.kind == JobKind::ObstructionNaturality).collect();
            if jobs.is_empty() {
                report.note("no obstruction-naturality jobs declared");
            }
            for job in jobs {
                let morphism = &ws.morphisms[job.morphism.as_ref().expect("checked at resolution")];
                let el = &ws.elements[job.seed.expect("checked at resolution")];
                report.note(format!(
                    "obstruction-naturality '{}': morphism '{}', seed '{}'",
                    job.name, morphism.name, el.name
                ));
                match obstruction_naturality_check(morphism, &el.algebra, &el.value) {
                    Ok(r) => report.merge(r),
                    Err(e) => {
                        report.push(Violation::new("job-error", &job.name, e.to_string()))
                    }
                }
            }
        }
    }
    Ok(RunOutcome { report, aborted: false })
}

struct EngineCache {
    engines: BTreeMap<String, TransferEngine>,
}

impl EngineCache {
    fn new() -> Self {
        EngineCache { engines: BTreeMap::new() }
    }

    fn get(&mut self, tower: &Arc<ScsDgla>) -> &TransferEngine {
        self.engines
            .entry(tower.name.clone())
            .or_insert_with(|| TransferEngine::new(tower))
    }
}

fn artin_ring(algebra: &Arc<ArtinLocalAlgebra>) -> CoeffRing {
    CoeffRing::Artin(Arc::clone(algebra))
}

fn mc_check_element(report: &mut Report, engines: &mut EngineCache, el: &NamedElement) {
    let engine = engines.get(&el.tower);
    match mc_residual_linfty(engine, &el.value, &el.algebra) {
        Ok(r) if r.is_zero() => {
            report.note(format!("mc-check '{}': residual 0", el.name));
        }
        Ok(r) => {
            report.push(Violation::new(
                "mc-residual",
                &el.name,
                format!("residual {}", r.render(&artin_ring(&el.algebra))),
            ));
        }
        Err(e) => report.push(Violation::new("job-error", &el.name, e.to_string())),
    }
}

fn cocycle_check_element(report: &mut Report, el: &NamedElement) {
    for (level, component) in el.value.components.iter().enumerate() {
        if level != 1 && !component.is_zero() {
            report.push(Violation::new(
                "cocycle-support",
                &el.name,
                format!("nonzero component at level {level}, cocycles live at level 1"),
            ));
            return;
        }
    }
    let m = el.value.components[1].clone();
    let ring = artin_ring(&el.algebra);
    match cocycle_residual(&el.tower, &m, &ring) {
        Ok(None) => {
            report.note(format!("cocycle-check '{}': no level 2, nothing to verify", el.name));
        }
        Ok(Some(r)) if r.is_zero() => {
            report.note(format!("cocycle-check '{}': residual 0", el.name));
        }
        Ok(Some(r)) => {
            report.push(Violation::new(
                "cocycle-residual",
                &el.name,
                format!("residual {}", r.render(&ring)),
            ));
        }
        Err(e) => report.push(Violation::new("job-error", &el.name, e.to_string())),
    }
}

fn solve_mc_element(report: &mut Report, engines: &mut EngineCache, el: &NamedElement) {
    let engine = engines.get(&el.tower);
    match mc_solve_order_by_order(engine, &el.algebra, &el.value) {
        Ok(outcome) => {
            for step in &outcome.steps {
                report.note(format!("solve-mc '{}': {step}", el.name));
            }
            if let Some(solution) = &outcome.solution {
                report.note(format!(
                    "solve-mc '{}': solution {}",
                    el.name,
                    solution.render(&artin_ring(&el.algebra))
                ));
            }
            for ob in &outcome.obstructions {
                let coords: Vec<String> = ob.class.iter().map(format_rat).collect();
                report.note(format!(
                    "solve-mc '{}': obstruction at layer {}, monomial {}: [{}]",
                    el.name,
                    ob.layer,
                    ob.monomial,
                    coords.join(", ")
                ));
            }
        }
        Err(e) => report.push(Violation::new("seed-rejected", &el.name, e.to_string())),
    }
}

/// Dumps every nonzero transferred operation through the arity cap, one
/// note per nonzero value, in basis order.
fn transfer_dump(scs: &Arc<ScsDgla>, cap: usize) -> Result<Report> {
    let mut report = Report::new();
    let engine = TransferEngine::new(scs);
    let basis: Vec<TotKey> = (0..=scs.max_level())
        .flat_map(|i| (0..scs.level(i).dim()).map(move |b| (i, b)))
        .collect();
    let degrees: Vec<i64> =
        basis.iter().map(|(i, b)| *i as i64 + scs.level(*i).basis_degree(*b)).collect();
    let (dmin, dmax) = match (degrees.iter().min(), degrees.iter().max()) {
        (Some(lo), Some(hi)) => (*lo, *hi),
        _ => return Ok(report),
    };
    for arity in 1..=cap {
        let mut nonzero = 0usize;
        for tuple in multisets(&basis, arity) {
            // The operation raises shifted degree by one; skip tuples whose
            // output degree misses the complex entirely.
            let out_degree: i64 = tuple
                .iter()
                .map(|(i, b)| *i as i64 + scs.level(*i).basis_degree(*b) - 1)
                .sum::<i64>()
                + 2;
            if out_degree < dmin || out_degree > dmax {
                continue;
            }
            let value = engine.transferred_bracket_basis(&tuple)?;
            if value.is_zero() {
                continue;
            }
            nonzero += 1;
            let names: Vec<String> = tuple
                .iter()
                .map(|(i, b)| scs.level(*i).basis_name(*b).to_string())
                .collect();
            report.note(format!(
                "q{arity}[{}] = {}",
                names.join(" | "),
                value.render(&CoeffRing::Rationals)
            ));
        }
        report.note(format!("'{}' arity {arity}: {nonzero} nonzero operation(s)", scs.name));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::workspace;

    fn small_workspace() -> Workspace {
        workspace::parse_str(
            r#"{
  "artin_algebras": [
    {"name": "A", "monomials": ["t", "t2"],
     "products": [{"left": "t", "right": "t", "value": {"t2": "1"}}]}
  ],
  "lie_algebras": [
    {"name": "u1", "basis": [{"name": "u"}], "brackets": []}
  ],
  "covers": [
    {"name": "circle", "opens": ["U1", "U2", "U3"],
     "constant": {"algebra": "u1",
       "present": [[1], [2], [3], [1, 2], [1, 3], [2, 3]]}}
  ],
  "towers": [{"name": "circle", "cover": "circle"}],
  "elements": [
    {"name": "loop", "tower": "circle", "algebra": "A",
     "terms": [{"level": 1, "basis": "u@1,2", "monomial": "t", "coeff": "1"}]}
  ],
  "jobs": [
    {"name": "battery", "command": "main-theorem", "tower": "circle",
     "algebra": "A", "instances": 3, "rng_seed": 5}
  ]
}"#,
        )
        .unwrap()
    }

    #[test]
    fn command_names_round_trip() {
        for cmd in [
            Command::Validate,
            Command::SideConditions,
            Command::TransferDump,
            Command::LinftyCheck,
            Command::McCheck,
            Command::CocycleCheck,
            Command::SolveMc,
            Command::MainTheorem,
            Command::ObstructionNaturality,
        ] {
            assert_eq!(Command::parse(cmd.name()), Some(cmd));
        }
        assert_eq!(Command::parse("no-such-command"), None);
    }

    #[test]
    fn the_small_workspace_runs_every_command_clean() {
        let ws = small_workspace();
        let opts = RunOptions { instances: Some(3), ..RunOptions::default() };
        for cmd in [
            Command::Validate,
            Command::SideConditions,
            Command::TransferDump,
            Command::LinftyCheck,
            Command::McCheck,
            Command::CocycleCheck,
            Command::SolveMc,
            Command::MainTheorem,
        ] {
            let outcome = run(&ws, cmd, &opts).unwrap();
            assert!(!outcome.aborted, "{} aborted", cmd.name());
            assert!(
                outcome.report.is_clean(),
                "{} reported: {}",
                cmd.name(),
                outcome.report.render_text()
            );
        }
    }

    #[test]
    fn obstruction_naturality_without_jobs_is_a_clean_note() {
        let ws = small_workspace();
        let outcome = run(&ws, Command::ObstructionNaturality, &RunOptions::default()).unwrap();
        assert!(outcome.report.is_clean());
        assert!(outcome
            .report
            .info()
            .iter()
            .any(|l| l.contains("no obstruction-naturality jobs declared")));
    }

    #[test]
    fn validation_failure_aborts_other_commands() {
        let mut ws = small_workspace();
        let corrupted = corpus::corrupted_sl2_three_opens();
        ws.towers.insert(corrupted.name.clone(), corrupted);
        let outcome = run(&ws, Command::McCheck, &RunOptions::default()).unwrap();
        assert!(outcome.aborted);
        assert!(!outcome.report.is_clean());
        let validate = run(&ws, Command::Validate, &RunOptions::default()).unwrap();
        assert!(!validate.aborted);
        assert!(!validate.report.is_clean());
    }

    #[test]
    fn side_conditions_hold_on_the_circle_tower() {
        let ws = small_workspace();
        let report = side_conditions_battery(&ws.towers["circle"], 10, 99).unwrap();
        assert!(report.is_clean(), "{}", report.render_text());
    }

    #[test]
    fn unknown_seed_class_is_an_error() {
        let ws = small_workspace();
        let opts = RunOptions { seed_class: Some("ghost".into()), ..RunOptions::default() };
        assert!(matches!(run(&ws, Command::SolveMc, &opts), Err(Error::Unresolved(_))));
    }

    #[test]
    fn the_declared_loop_element_is_mc_and_a_cocycle() {
        let ws = small_workspace();
        let mc = run(&ws, Command::McCheck, &RunOptions::default()).unwrap();
        assert!(mc.report.is_clean(), "{}", mc.report.render_text());
        assert!(mc.report.info().iter().any(|l| l.contains("mc-check 'loop': residual 0")));
        let co = run(&ws, Command::CocycleCheck, &RunOptions::default()).unwrap();
        assert!(co.report.is_clean(), "{}", co.report.render_text());
    }
}
