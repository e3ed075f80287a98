//! Proof obligations for a program: adherence to a specification and
//! equivalence of two programs, discharged one conjecture at a time by an
//! external TPTP prover.

mod runner;
mod spec;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::InterfaceDecl;
use crate::fol::{emit_tptp, infer_sorts, EmitError, EmitOptions, Formula, GroundAtom, NamedFormula};
use crate::oracle::{find_countermodel, Domain, OracleError, OracleLimits};
use crate::syntax::{Head, Predicate, Program};
use crate::translation::{complete, CompletionOptions, CompletionTheory, TranslationError};

pub use runner::{parse_szs_status, run_tasks, ProverConfig, RunError, Status, Verdict};
pub use spec::{parse_spec, SpecError, SpecFile};

/// Axioms plus exactly one conjecture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationTask {
    pub name: String,
    pub axioms: Vec<NamedFormula>,
    pub conjecture: NamedFormula,
}

impl VerificationTask {
    pub fn to_tptp(&self, options: &EmitOptions) -> Result<String, EmitError> {
        let mut all = self.axioms.clone();
        all.push(self.conjecture.clone());
        emit_tptp(&all, options)
    }

    /// Predicates mentioned by the axioms.
    pub fn axiom_predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        for a in &self.axioms {
            a.formula.collect_predicates(&mut out);
        }
        out
    }

    /// Looks for a finite interpretation over `domain` satisfying the axioms
    /// but not the conjecture.
    pub fn search_countermodel(
        &self,
        domain: &Domain,
        limits: OracleLimits,
    ) -> Result<Option<BTreeSet<GroundAtom>>, OracleError> {
        let axioms: Vec<Formula> = self.axioms.iter().map(|a| a.formula.clone()).collect();
        find_countermodel(&axioms, &self.conjecture.formula, domain, limits)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Translation(#[from] TranslationError),
    #[error("predicate {used} is used but the program knows {name} only with arity {}", list(.known))]
    ArityMismatch {
        used: Predicate,
        name: String,
        known: Vec<usize>,
    },
    #[error("renaming private predicate {from} to {to} collides with an existing predicate")]
    NameCollision { from: Predicate, to: Predicate },
    #[error("private predicates of program {program} are defined recursively ({cycle}); their completed definitions cannot be used as explicit definitions")]
    PrivateRecursion { program: usize, cycle: String },
    #[error("task {task}: {source}")]
    Sort {
        task: String,
        source: crate::fol::SortError,
    },
}

fn list(arities: &[usize]) -> String {
    arities.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AdherenceOptions {
    /// Also prove the completion's output definitions and constraints from
    /// the specification.
    pub both_directions: bool,
}

/// One task per spec formula: the completion of `program` (inputs open)
/// and the assumptions entail that formula.
pub fn assemble_adherence(
    program: &Program,
    spec: &SpecFile,
    options: AdherenceOptions,
) -> Result<Vec<VerificationTask>, AssemblyError> {
    let mut known = program.signature();
    known.extend(spec.interface.inputs().iter().cloned());
    known.extend(spec.interface.outputs().iter().cloned());
    let mut used: BTreeSet<Predicate> = spec.interface.inputs().union(spec.interface.outputs()).cloned().collect();
    for f in spec.assumes.iter().chain(&spec.specs) {
        f.collect_predicates(&mut used);
    }
    check_arities(&used, &program.signature())?;

    let theory = complete(program, &spec.interface, CompletionOptions::default())?;
    let assumes: Vec<NamedFormula> = spec
        .assumes
        .iter()
        .enumerate()
        .map(|(k, f)| NamedFormula::axiom(format!("assume_{}", k + 1), f.clone()))
        .collect();
    let mut axioms = theory.named_formulas();
    axioms.extend(assumes.iter().cloned());
    let mut tasks: Vec<VerificationTask> = spec
        .specs
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let name = format!("spec_{}", k + 1);
            VerificationTask {
                name: name.clone(),
                axioms: axioms.clone(),
                conjecture: NamedFormula::conjecture(name, f.clone()),
            }
        })
        .collect();

    if options.both_directions {
        let (public, private) = split_definitions(&theory, &spec.interface);
        check_private_acyclic(program, &spec.interface, 1)?;
        let mut reverse_axioms: Vec<NamedFormula> = spec
            .specs
            .iter()
            .enumerate()
            .map(|(k, f)| NamedFormula::axiom(format!("spec_{}", k + 1), f.clone()))
            .collect();
        reverse_axioms.extend(assumes);
        reverse_axioms.extend(private);
        for goal in public {
            let name = format!("reverse_{}", goal.name);
            tasks.push(VerificationTask {
                name: name.clone(),
                axioms: reverse_axioms.clone(),
                conjecture: NamedFormula::conjecture(name, goal.formula),
            });
        }
    }
    check_task_sorts(&tasks)?;
    Ok(tasks)
}

/// Definitions of public predicates plus constraints, and definitions of
/// private predicates.
fn split_definitions(theory: &CompletionTheory, interface: &InterfaceDecl) -> (Vec<NamedFormula>, Vec<NamedFormula>) {
    let named = theory.named_formulas();
    let mut public = Vec::new();
    let mut private = Vec::new();
    for (i, nf) in named.into_iter().enumerate() {
        match theory.definitions.get(i) {
            Some(d) if !interface.is_public(&d.predicate) => private.push(nf),
            _ => public.push(nf),
        }
    }
    (public, private)
}

fn check_arities(used: &BTreeSet<Predicate>, signature: &BTreeSet<Predicate>) -> Result<(), AssemblyError> {
    let mut by_name: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for p in signature {
        by_name.entry(&p.name).or_default().push(p.arity);
    }
    for p in used {
        if let Some(arities) = by_name.get(p.name.as_str()) {
            if !arities.contains(&p.arity) {
                return Err(AssemblyError::ArityMismatch {
                    used: p.clone(),
                    name: p.name.clone(),
                    known: arities.clone(),
                });
            }
        }
    }
    Ok(())
}

fn check_task_sorts(tasks: &[VerificationTask]) -> Result<(), AssemblyError> {
    for t in tasks {
        let mut formulas: Vec<Formula> = t.axioms.iter().map(|a| a.formula.clone()).collect();
        formulas.push(t.conjecture.formula.clone());
        infer_sorts(&formulas).map_err(|source| AssemblyError::Sort {
            task: t.name.clone(),
            source,
        })?;
    }
    Ok(())
}

/// Private predicates may depend on public ones but not, even negatively
/// or through a choice rule, on themselves.
fn check_private_acyclic(program: &Program, public: &InterfaceDecl, index: usize) -> Result<(), AssemblyError> {
    let mut edges: BTreeMap<Predicate, BTreeSet<Predicate>> = BTreeMap::new();
    for rule in &program.rules {
        let Some(head) = rule.head.atom() else { continue };
        let from = head.predicate();
        if public.is_public(&from) {
            continue;
        }
        let targets = edges.entry(from.clone()).or_default();
        if matches!(rule.head, Head::Choice(_)) {
            targets.insert(from.clone());
        }
        for element in &rule.body {
            for (atom, _) in element.atoms() {
                let to = atom.predicate();
                if !public.is_public(&to) {
                    targets.insert(to);
                }
            }
        }
    }
    // depth-first search with an explicit path
    fn visit(
        node: &Predicate,
        edges: &BTreeMap<Predicate, BTreeSet<Predicate>>,
        state: &mut BTreeMap<Predicate, bool>,
        path: &mut Vec<Predicate>,
    ) -> Option<Vec<Predicate>> {
        match state.get(node) {
            Some(true) => return None,
            Some(false) => {
                let start = path.iter().position(|p| p == node).expect("on path");
                let mut cycle = path[start..].to_vec();
                cycle.push(node.clone());
                return Some(cycle);
            }
            None => {}
        }
        state.insert(node.clone(), false);
        path.push(node.clone());
        for next in edges.get(node).into_iter().flatten() {
            if let Some(c) = visit(next, edges, state, path) {
                return Some(c);
            }
        }
        path.pop();
        state.insert(node.clone(), true);
        None
    }
    let mut state = BTreeMap::new();
    for node in edges.keys() {
        if let Some(cycle) = visit(node, &edges, &mut state, &mut Vec::new()) {
            let cycle = cycle.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> ");
            return Err(AssemblyError::PrivateRecursion { program: index, cycle });
        }
    }
    Ok(())
}

/// Renames the private predicates of `program` with suffix `_<index>`.
fn rename_private(
    program: &Program,
    public: &InterfaceDecl,
    index: usize,
    taken: &BTreeSet<Predicate>,
) -> Result<Program, AssemblyError> {
    for p in program.signature() {
        if !public.is_public(&p) {
            let to = Predicate::new(format!("{}_{index}", p.name), p.arity);
            if taken.contains(&to) {
                return Err(AssemblyError::NameCollision { from: p, to });
            }
        }
    }
    let suffix = format!("_{index}");
    Ok(program.rename_predicates(|p| (!public.is_public(p)).then(|| format!("{}{suffix}", p.name))))
}

/// Tasks showing that `p1` and `p2` have the same answer sets on the
/// public predicates. Public predicates are shared, private ones are renamed
/// apart with suffixes `_1` and `_2`. For each direction i→j the axioms
/// are the completion of program i, the completed definitions of the
/// private predicates of program j, and the assumptions; each output
/// definition and constraint of program j is one conjecture.
pub fn assemble_equivalence(
    p1: &Program,
    p2: &Program,
    public: &InterfaceDecl,
    assumes: &[Formula],
) -> Result<Vec<VerificationTask>, AssemblyError> {
    let mut used: BTreeSet<Predicate> = public.inputs().union(public.outputs()).cloned().collect();
    for f in assumes {
        f.collect_predicates(&mut used);
    }
    check_arities(&used, &p1.signature())?;
    check_arities(&used, &p2.signature())?;

    let mut taken: BTreeSet<Predicate> = p1.signature();
    taken.extend(p2.signature());
    taken.extend(used);
    let r1 = rename_private(p1, public, 1, &taken)?;
    let r2 = rename_private(p2, public, 2, &taken)?;
    check_private_acyclic(&r1, public, 1)?;
    check_private_acyclic(&r2, public, 2)?;

    let c1 = complete(&r1, public, CompletionOptions::default())?;
    let c2 = complete(&r2, public, CompletionOptions::default())?;
    let assumes: Vec<NamedFormula> = assumes
        .iter()
        .enumerate()
        .map(|(k, f)| NamedFormula::axiom(format!("assume_{}", k + 1), f.clone()))
        .collect();

    let mut tasks = Vec::new();
    for (from, to, label) in [(&c1, &c2, "forward"), (&c2, &c1, "backward")] {
        let (goals, definitions) = split_definitions(to, public);
        let mut axioms = prefixed(from.named_formulas(), if label == "forward" { "p1" } else { "p2" });
        axioms.extend(prefixed(definitions, if label == "forward" { "p2" } else { "p1" }));
        axioms.extend(assumes.iter().cloned());
        for goal in goals {
            let name = format!("{label}_{}", goal.name);
            tasks.push(VerificationTask {
                name: name.clone(),
                axioms: axioms.clone(),
                conjecture: NamedFormula::conjecture(name, goal.formula),
            });
        }
    }
    check_task_sorts(&tasks)?;
    Ok(tasks)
}

fn prefixed(formulas: Vec<NamedFormula>, prefix: &str) -> Vec<NamedFormula> {
    formulas
        .into_iter()
        .map(|mut f| {
            f.name = format!("{prefix}_{}", f.name);
            f
        })
        .collect()
}
