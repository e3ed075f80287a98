//! A deliberately naive reference semantics: grounding over a finite domain,
//! stable models via the Gelfond-Lifschitz reduct, and brute-force
//! enumeration of the finite models of a completion.

mod ground;
mod models;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{format_cycle, is_tight, InterfaceDecl};
use crate::fol::{EvalError, GroundAtom, Value};
use crate::syntax::{Predicate, Program, Term};
use crate::translation::{complete, CompletionOptions, TranslationError};

pub use ground::{ground, GroundHead, GroundProgram, GroundRule};
pub use models::{completion_models, completion_models_of, find_countermodel, stable_models};

/// A set of models, each a set of true ground atoms; ordered
/// lexicographically.
pub type ModelSet = BTreeSet<BTreeSet<GroundAtom>>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("condition predicate {0} of a conditional literal must be defined by facts only")]
    IntensionalCondition(Predicate),
    #[error("rule `{0}` has variables but the domain is empty")]
    EmptyUniverse(String),
    #[error("{what} has {size} atoms, more than the limit of {cap} (raise --max-base)")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("`{0}` is not a ground fact")]
    NotAFact(String),
    #[error("fact {0} belongs to {1}, which is not an input predicate")]
    NotAnInput(GroundAtom, Predicate),
    #[error("program is not tight (positive cycle {0}); the completion does not characterize its stable models")]
    NotTight(String),
    #[error(transparent)]
    Translation(#[from] TranslationError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("sort error: {0}")]
    Sort(String),
}

#[derive(Clone, Copy, Debug)]
pub struct OracleLimits {
    /// Largest number of atoms whose truth values are guessed.
    pub max_base: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_base: 20 }
    }
}

/// The finite domain: symbolic constants plus the integers in `int_bounds`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Domain {
    pub universe: BTreeSet<String>,
    pub int_bounds: Option<(i64, i64)>,
}

impl Domain {
    pub fn new(universe: impl IntoIterator<Item = impl Into<String>>, int_bounds: Option<(i64, i64)>) -> Self {
        Self {
            universe: universe.into_iter().map(Into::into).collect(),
            int_bounds,
        }
    }

    /// Symbolic constants of `program` and `facts`.
    pub fn of_program(program: &Program, facts: &BTreeSet<GroundAtom>, int_bounds: Option<(i64, i64)>) -> Self {
        let mut universe = program.symbols();
        for a in facts {
            for v in &a.args {
                if let Value::Sym(s) = v {
                    universe.insert(s.clone());
                }
            }
        }
        Self { universe, int_bounds }
    }

    pub fn values(&self) -> Vec<Value> {
        let mut out: Vec<Value> = match self.int_bounds {
            Some((lo, hi)) => (lo..=hi).map(Value::Int).collect(),
            None => Vec::new(),
        };
        out.extend(self.universe.iter().cloned().map(Value::Sym));
        out
    }

    pub fn contains(&self, v: &Value) -> bool {
        match v {
            Value::Int(i) => matches!(self.int_bounds, Some((lo, hi)) if lo <= *i && *i <= hi),
            Value::Sym(s) => self.universe.contains(s),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty() && self.int_bounds.is_none()
    }
}

fn ground_value(t: &Term) -> Option<Value> {
    match t {
        Term::Integer(i) => Some(Value::Int(*i)),
        Term::Symbol(s) => Some(Value::Sym(s.clone())),
        Term::Variable(_) => None,
        Term::BinaryOperation { op, lhs, rhs } => match (ground_value(lhs)?, ground_value(rhs)?) {
            (Value::Int(a), Value::Int(b)) => op.apply(a, b).map(Value::Int),
            _ => None,
        },
    }
}

/// Reads a program consisting of ground facts only.
pub fn facts_of(program: &Program) -> Result<BTreeSet<GroundAtom>, OracleError> {
    let mut out = BTreeSet::new();
    for rule in &program.rules {
        let atom = match (&rule.head, rule.is_fact()) {
            (crate::syntax::Head::Basic(a), true) => a,
            _ => return Err(OracleError::NotAFact(rule.to_string())),
        };
        let args: Option<Vec<Value>> = atom.args.iter().map(ground_value).collect();
        let args = args.ok_or_else(|| OracleError::NotAFact(rule.to_string()))?;
        out.insert(GroundAtom::new(atom.predicate.clone(), args));
    }
    Ok(out)
}

/// The facts as a program.
pub fn fact_program(facts: &BTreeSet<GroundAtom>) -> Program {
    Program::new(
        facts
            .iter()
            .map(|a| {
                crate::syntax::Rule::fact(crate::syntax::Atom::new(
                    a.predicate.clone(),
                    a.args.iter().map(Value::to_term).collect(),
                ))
            })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub stable_models: ModelSet,
    pub completion_models: ModelSet,
    pub equal: bool,
    /// Stable models that are not completion models.
    pub only_stable: ModelSet,
    /// Completion models that are not stable models.
    pub only_completion: ModelSet,
}

/// Compares the stable models of `program ∪ input_facts` with the models
/// of the completion whose input predicates are fixed to `input_facts`.
pub fn crosscheck(
    program: &Program,
    interface: &InterfaceDecl,
    domain: &Domain,
    input_facts: &BTreeSet<GroundAtom>,
    limits: OracleLimits,
) -> Result<CrossCheckReport, OracleError> {
    if let Some(cycle) = is_tight(program).witness {
        return Err(OracleError::NotTight(format_cycle(&cycle)));
    }
    for a in input_facts {
        let p = Predicate::new(a.predicate.clone(), a.args.len());
        if !interface.is_input(&p) {
            return Err(OracleError::NotAnInput(a.clone(), p));
        }
    }
    let mut with_facts = program.clone();
    with_facts.extend(&fact_program(input_facts));
    let grounded = ground(&with_facts, domain)?;
    let stable = stable_models(&grounded, limits)?;

    let theory = complete(program, interface, CompletionOptions::default())?;
    let completion = models::completion_models_of(&theory, domain, input_facts, limits)?;

    let only_stable: ModelSet = stable.difference(&completion).cloned().collect();
    let only_completion: ModelSet = completion.difference(&stable).cloned().collect();
    Ok(CrossCheckReport {
        equal: only_stable.is_empty() && only_completion.is_empty(),
        stable_models: stable,
        completion_models: completion,
        only_stable,
        only_completion,
    })
}

/// Renders a model as `{a, b(1)}`.
pub struct DisplayModel<'a>(pub &'a BTreeSet<GroundAtom>);

impl fmt::Display for DisplayModel<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// Keeps only atoms of the given predicates.
pub fn project(models: &ModelSet, onto: &BTreeSet<Predicate>) -> ModelSet {
    models
        .iter()
        .map(|m| {
            m.iter()
                .filter(|a| onto.contains(&Predicate::new(a.predicate.clone(), a.args.len())))
                .cloned()
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionMismatch {
    pub input_facts: BTreeSet<GroundAtom>,
    pub first: ModelSet,
    pub second: ModelSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    /// Input instances compared.
    pub instances: usize,
    /// First instance on which the projections differ.
    pub mismatch: Option<ProjectionMismatch>,
}

/// Compares the stable models of two programs projected onto the public
/// outputs, for every set of input facts over `domain` that satisfies the
/// `assumes` mentioning input predicates only.
pub fn compare_projections(
    p1: &Program,
    p2: &Program,
    public: &InterfaceDecl,
    assumes: &[crate::fol::Formula],
    domain: &Domain,
    limits: OracleLimits,
) -> Result<ProjectionReport, OracleError> {
    let values = domain.values();
    let mut base = Vec::new();
    for p in public.inputs() {
        let mut tuples: Vec<Vec<Value>> = vec![vec![]];
        for _ in 0..p.arity {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    values.iter().map(move |v| {
                        let mut t = t.clone();
                        t.push(v.clone());
                        t
                    })
                })
                .collect();
        }
        base.extend(tuples.into_iter().map(|t| GroundAtom::new(p.name.clone(), t)));
    }
    if base.len() > limits.max_base {
        return Err(OracleError::CapExceeded {
            what: "the input base",
            size: base.len(),
            cap: limits.max_base,
        });
    }
    let filters: Vec<&crate::fol::Formula> = assumes
        .iter()
        .filter(|f| f.predicates().iter().all(|p| public.is_input(p)))
        .collect();
    let mut report = ProjectionReport {
        instances: 0,
        mismatch: None,
    };
    for mask in 0u64..1 << base.len() {
        let facts: BTreeSet<GroundAtom> = base
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect();
        let interp = crate::fol::Interpretation::new(domain.universe.clone(), domain.int_bounds, facts.clone())
            .expect("facts are built from the domain");
        let mut admitted = true;
        for f in &filters {
            admitted &= crate::fol::evaluate(f, &interp)?;
        }
        if !admitted {
            continue;
        }
        report.instances += 1;
        let models = |p: &Program| -> Result<ModelSet, OracleError> {
            let mut with_facts = p.clone();
            with_facts.extend(&fact_program(&facts));
            Ok(project(&stable_models(&ground(&with_facts, domain)?, limits)?, public.outputs()))
        };
        let (first, second) = (models(p1)?, models(p2)?);
        if first != second {
            report.mismatch = Some(ProjectionMismatch {
                input_facts: facts,
                first,
                second,
            });
            break;
        }
    }
    Ok(report)
}
