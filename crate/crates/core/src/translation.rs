//! Completion of tight programs.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{format_cycle, is_tight, InterfaceDecl};
use crate::fol::{simplify, Formula, NamedFormula, Variable};
use crate::syntax::{Atom, BodyElement, Head, Literal, Predicate, Program, Rule, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TranslationError {
    #[error("program is not tight (positive cycle {0}); completion would be unsound")]
    NotTight(String),
    #[error("input predicate {0} occurs in a rule head")]
    InputInHead(Predicate),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletedDefinition {
    pub predicate: Predicate,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletionTheory {
    pub definitions: Vec<CompletedDefinition>,
    pub constraints: Vec<Formula>,
    /// Set when the program is not tight and completion was forced; the
    /// positive cycle found is recorded in `warning`.
    pub unsound: bool,
    pub warning: Option<String>,
}

impl CompletionTheory {
    /// Axioms named `compdef_<pred>` and `constraint_<k>`; predicates that
    /// share a name across arities get an arity suffix.
    pub fn named_formulas(&self) -> Vec<NamedFormula> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for d in &self.definitions {
            *counts.entry(d.predicate.name.as_str()).or_default() += 1;
        }
        let mut out: Vec<NamedFormula> = self
            .definitions
            .iter()
            .map(|d| NamedFormula::axiom(definition_name(&d.predicate, counts[d.predicate.name.as_str()] > 1), d.formula.clone()))
            .collect();
        for (k, c) in self.constraints.iter().enumerate() {
            out.push(NamedFormula::axiom(format!("constraint_{}", k + 1), c.clone()));
        }
        out
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.definitions
            .iter()
            .map(|d| &d.formula)
            .chain(&self.constraints)
    }

    pub fn definition(&self, predicate: &Predicate) -> Option<&CompletedDefinition> {
        self.definitions.iter().find(|d| &d.predicate == predicate)
    }
}

pub(crate) fn definition_name(p: &Predicate, overloaded: bool) -> String {
    if overloaded {
        format!("compdef_{}_{}", p.name, p.arity)
    } else {
        format!("compdef_{}", p.name)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CompletionOptions {
    /// Complete non-tight programs anyway; the theory is marked unsound.
    pub force: bool,
    pub simplify: bool,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        Self {
            force: false,
            simplify: true,
        }
    }
}

fn literal(l: &Literal) -> Formula {
    match l {
        Literal::Positive(a) => Formula::Atom(a.clone()),
        Literal::Negative(a) => Formula::negate(Formula::Atom(a.clone())),
        Literal::Comparison(c) => Formula::Compare(c.clone()),
    }
}

/// τ of one body element. `global` are the variables of the rule that
/// occur outside conditional literals (see [`Rule::global_variables`]).
pub fn translate_body_element(element: &BodyElement, global: &[String]) -> Formula {
    match element {
        BodyElement::Positive(a) | BodyElement::DoubleNegative(a) => Formula::Atom(a.clone()),
        BodyElement::Negative(a) => Formula::negate(Formula::Atom(a.clone())),
        BodyElement::Comparison(c) => Formula::Compare(c.clone()),
        BodyElement::Conditional(cl) => {
            let mut vars = Vec::new();
            cl.collect_variables(&mut vars);
            let local: Vec<Variable> = vars
                .into_iter()
                .filter(|v| !global.contains(v))
                .map(Variable::new)
                .collect();
            let conditions = Formula::conjoin(cl.conditions.iter().map(literal).collect());
            Formula::forall(local, Formula::implies(conditions, literal(&cl.head)))
        }
    }
}

/// τ of a rule body as a conjunction (⊤ when empty).
pub fn translate_body(rule: &Rule) -> Formula {
    let global = rule.global_variables();
    Formula::conjoin(
        rule.body
            .iter()
            .map(|e| translate_body_element(e, &global))
            .collect(),
    )
}

/// Fresh head variables `V1..Vn`, with the prefix lengthened until none of
/// them clashes with `taken`.
fn fresh_variables(arity: usize, taken: &BTreeSet<String>) -> Vec<String> {
    let mut prefix = "V".to_string();
    loop {
        let names: Vec<String> = (1..=arity).map(|i| format!("{prefix}{i}")).collect();
        if names.iter().all(|n| !taken.contains(n)) {
            return names;
        }
        prefix.push('V');
    }
}

fn complete_predicate(program: &Program, p: &Predicate, simplify_output: bool) -> Formula {
    let rules: Vec<&Rule> = program
        .rules
        .iter()
        .filter(|r| r.head.atom().map(Atom::predicate).as_ref() == Some(p))
        .collect();
    let taken: BTreeSet<String> = rules.iter().flat_map(|r| r.variables()).collect();
    let fresh = fresh_variables(p.arity, &taken);
    let head_atom = Atom::new(p.name.clone(), fresh.iter().map(Term::variable).collect());
    let disjuncts = rules
        .iter()
        .map(|rule| {
            let head = rule.head.atom().expect("rule selected by head predicate");
            let mut parts: Vec<Formula> = fresh
                .iter()
                .zip(&head.args)
                .map(|(v, t)| Formula::equal(Term::variable(v), t.clone()))
                .collect();
            parts.push(translate_body(rule));
            if matches!(rule.head, Head::Choice(_)) {
                parts.push(Formula::Atom(head_atom.clone()));
            }
            let bound = rule.global_variables().into_iter().map(Variable::new).collect();
            Formula::exists(bound, Formula::conjoin(parts))
        })
        .collect();
    let formula = Formula::forall(
        fresh.iter().map(Variable::new).collect(),
        Formula::iff(Formula::Atom(head_atom), Formula::disjoin(disjuncts)),
    );
    if simplify_output {
        simplify(&formula)
    } else {
        formula
    }
}

fn constraint(rule: &Rule, simplify_output: bool) -> Formula {
    let bound = rule.global_variables().into_iter().map(Variable::new).collect();
    let formula = Formula::forall(bound, Formula::negate(translate_body(rule)));
    if simplify_output {
        simplify(&formula)
    } else {
        formula
    }
}

/// Completes every non-input predicate of the program and of the declared
/// outputs, in predicate order, followed by one constraint per headless
/// rule.
pub fn complete(
    program: &Program,
    interface: &InterfaceDecl,
    options: CompletionOptions,
) -> Result<CompletionTheory, TranslationError> {
    for p in program.head_predicates() {
        if interface.is_input(&p) {
            return Err(TranslationError::InputInHead(p));
        }
    }
    let tightness = is_tight(program);
    let mut warning = None;
    if let Some(cycle) = tightness.witness {
        let cycle = format_cycle(&cycle);
        if !options.force {
            return Err(TranslationError::NotTight(cycle));
        }
        warning = Some(format!(
            "program is not tight (positive cycle {cycle}); the completion may have models that are not stable models"
        ));
    }
    let mut predicates = program.signature();
    predicates.extend(interface.outputs().iter().cloned());
    let definitions = predicates
        .iter()
        .filter(|p| !interface.is_input(p))
        .map(|p| CompletedDefinition {
            predicate: p.clone(),
            formula: complete_predicate(program, p, options.simplify),
        })
        .collect();
    let constraints = program
        .rules
        .iter()
        .filter(|r| matches!(r.head, Head::None))
        .map(|r| constraint(r, options.simplify))
        .collect();
    Ok(CompletionTheory {
        definitions,
        constraints,
        unsound: warning.is_some(),
        warning,
    })
}

#[cfg(test)]
fn translate_conditional(rule: &Rule, index: usize) -> Option<Formula> {
    match rule.body.get(index)? {
        e @ BodyElement::Conditional(_) => Some(translate_body_element(e, &rule.global_variables())),
        _ => None,
    }
}
