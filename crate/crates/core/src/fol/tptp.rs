//! TPTP output.
//!
//! The TFF dialect types object variables with the declared sort `object` and
//! integer variables with `$int`. The FOF dialect has no integers: integer
//! quantifiers are expanded over a finite range, ground arithmetic is
//! evaluated and integers become distinct constants `int_<n>` (`int_m<n>`
//! for negative values). FOF output is therefore only faithful for models
//! whose integers lie inside that range.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{BinaryOperator, Predicate, Relation, Term};

use super::{infer_sorts, Formula, Sort, SortError, Variable};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    #[default]
    Tff,
    Fof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Axiom,
    Conjecture,
}

impl Role {
    fn keyword(self) -> &'static str {
        match self {
            Role::Axiom => "axiom",
            Role::Conjecture => "conjecture",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedFormula {
    pub name: String,
    pub role: Role,
    pub formula: Formula,
}

impl NamedFormula {
    pub fn axiom(name: impl Into<String>, formula: Formula) -> Self {
        Self {
            name: name.into(),
            role: Role::Axiom,
            formula,
        }
    }

    pub fn conjecture(name: impl Into<String>, formula: Formula) -> Self {
        Self {
            name: name.into(),
            role: Role::Conjecture,
            formula,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct EmitOptions {
    pub dialect: Dialect,
    /// Integer range for the FOF dialect.
    pub int_range: Option<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("mixed-sort comparison `{0}`: an object cannot equal an integer")]
    MixedEquality(String),
    #[error("formula `{name}` has free variable {variable}")]
    FreeVariable { name: String, variable: String },
    #[error("invalid or duplicate formula name `{0}`")]
    BadName(String),
    #[error("the fof dialect needs an integer range (--int-range lo..hi)")]
    MissingIntRange,
    #[error("empty integer range {0}..{1}")]
    EmptyRange(i64, i64),
}

/// TPTP identifiers for predicates and constants, made unique and kept
/// apart from the reserved type name `object`.
struct Names {
    predicates: BTreeMap<Predicate, String>,
    constants: BTreeMap<String, String>,
    integers: BTreeMap<i64, String>,
}

impl Names {
    fn new(predicates: &BTreeSet<Predicate>, constants: &BTreeSet<String>, integers: &BTreeSet<i64>) -> Self {
        let mut used: HashSet<String> = ["object".to_string()].into();
        let fresh = |candidate: String, used: &mut HashSet<String>| {
            let mut name = candidate;
            while used.contains(&name) {
                name.push('_');
            }
            used.insert(name.clone());
            name
        };
        let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
        for p in predicates {
            *arities.entry(p.name.as_str()).or_default() += 1;
        }
        let mut out_p = BTreeMap::new();
        // plain names first so that they keep their spelling where possible
        for p in predicates.iter().filter(|p| arities[p.name.as_str()] == 1 && p.name != "object") {
            used.insert(p.name.clone());
            out_p.insert(p.clone(), p.name.clone());
        }
        for p in predicates {
            if out_p.contains_key(p) {
                continue;
            }
            let candidate = if arities[p.name.as_str()] > 1 {
                format!("{}_{}", p.name, p.arity)
            } else {
                format!("p_{}", p.name)
            };
            out_p.insert(p.clone(), fresh(candidate, &mut used));
        }
        let mut out_c = BTreeMap::new();
        for c in constants {
            let name = if used.contains(c) {
                fresh(format!("c_{c}"), &mut used)
            } else {
                fresh(c.clone(), &mut used)
            };
            out_c.insert(c.clone(), name);
        }
        let mut out_i = BTreeMap::new();
        for i in integers {
            let candidate = if *i < 0 {
                format!("int_m{}", i.unsigned_abs())
            } else {
                format!("int_{i}")
            };
            out_i.insert(*i, fresh(candidate, &mut used));
        }
        Names {
            predicates: out_p,
            constants: out_c,
            integers: out_i,
        }
    }
}

fn is_tptp_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Renders `formulas` as a TPTP problem. Sorts are inferred jointly over all
/// formulas before emission.
pub fn emit_tptp(formulas: &[NamedFormula], options: &EmitOptions) -> Result<String, EmitError> {
    let mut seen = HashSet::new();
    for nf in formulas {
        if !is_tptp_name(&nf.name) || !seen.insert(nf.name.as_str()) {
            return Err(EmitError::BadName(nf.name.clone()));
        }
        if let Some(v) = nf.formula.free_variables().into_iter().next() {
            return Err(EmitError::FreeVariable {
                name: nf.name.clone(),
                variable: v,
            });
        }
    }
    let raw: Vec<Formula> = formulas.iter().map(|nf| nf.formula.clone()).collect();
    let sorts = infer_sorts(&raw)?;
    let annotated: Vec<Formula> = raw
        .iter()
        .enumerate()
        .map(|(i, f)| sorts.annotate(i, f))
        .collect();
    for f in &annotated {
        check_mixed(f, &mut Vec::new())?;
    }

    let mut predicates = BTreeSet::new();
    let mut constants = BTreeSet::new();
    for f in &annotated {
        f.collect_predicates(&mut predicates);
        f.collect_symbols(&mut constants);
    }

    match options.dialect {
        Dialect::Tff => {
            let names = Names::new(&predicates, &constants, &BTreeSet::new());
            let mut out = String::new();
            out.push_str("tff(object_type, type, object: $tType).\n");
            for p in &predicates {
                let name = &names.predicates[p];
                let args: Vec<&str> = (0..p.arity)
                    .map(|i| match sorts.position(p, i) {
                        Sort::Integer => "$int",
                        _ => "object",
                    })
                    .collect();
                let ty = match args.len() {
                    0 => "$o".to_string(),
                    1 => format!("{} > $o", args[0]),
                    _ => format!("({}) > $o", args.join(" * ")),
                };
                writeln!(out, "tff(type_{name}, type, {name}: {ty}).").unwrap();
            }
            for c in names.constants.values() {
                writeln!(out, "tff(type_{c}, type, {c}: object).").unwrap();
            }
            write_distinctness(&mut out, "tff", names.constants.values().collect());
            for (nf, f) in formulas.iter().zip(&annotated) {
                let mut body = String::new();
                write_tff(&mut body, f, &names);
                writeln!(out, "tff({}, {}, {body}).", nf.name, nf.role.keyword()).unwrap();
            }
            Ok(out)
        }
        Dialect::Fof => {
            let (lo, hi) = options.int_range.ok_or(EmitError::MissingIntRange)?;
            if lo > hi {
                return Err(EmitError::EmptyRange(lo, hi));
            }
            let grounded: Vec<Formula> = annotated.iter().map(|f| expand_integers(f, lo, hi)).collect();
            let names = Names::new(&predicates, &constants, &(lo..=hi).collect());
            let mut out = String::new();
            writeln!(out, "% integers are restricted to {lo}..{hi}").unwrap();
            let mut all: Vec<&String> = names.constants.values().collect();
            all.extend(names.integers.values());
            write_distinctness(&mut out, "fof", all);
            for (nf, f) in formulas.iter().zip(&grounded) {
                let mut body = String::new();
                write_fof(&mut body, f, &names, (lo, hi));
                writeln!(out, "fof({}, {}, {body}).", nf.name, nf.role.keyword()).unwrap();
            }
            Ok(out)
        }
    }
}

fn write_distinctness(out: &mut String, kind: &str, constants: Vec<&String>) {
    let mut k = 0;
    for (i, a) in constants.iter().enumerate() {
        for b in &constants[i + 1..] {
            k += 1;
            writeln!(out, "{kind}(unique_names_{k}, axiom, {a} != {b}).").unwrap();
        }
    }
}

fn term_sort(t: &Term, env: &[Variable]) -> Sort {
    match t {
        Term::Integer(_) | Term::BinaryOperation { .. } => Sort::Integer,
        Term::Symbol(_) => Sort::Object,
        Term::Variable(v) => env
            .iter()
            .rev()
            .find(|b| &b.name == v)
            .map_or(Sort::General, |b| b.sort),
    }
}

fn check_mixed(f: &Formula, env: &mut Vec<Variable>) -> Result<(), EmitError> {
    match f {
        Formula::Compare(c) if !c.relation.is_order() => {
            let (l, r) = (term_sort(&c.lhs, env), term_sort(&c.rhs, env));
            if l != r && l != Sort::General && r != Sort::General {
                return Err(EmitError::MixedEquality(format!(
                    "{} {} {}",
                    c.lhs,
                    c.relation.ascii(),
                    c.rhs
                )));
            }
            Ok(())
        }
        Formula::Atom(_) | Formula::Compare(_) | Formula::Top | Formula::Bottom => Ok(()),
        Formula::Not(g) => check_mixed(g, env),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().try_for_each(|g| check_mixed(g, env)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_mixed(a, env)?;
            check_mixed(b, env)
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let n = env.len();
            env.extend(vs.iter().cloned());
            let r = check_mixed(g, env);
            env.truncate(n);
            r
        }
    }
}

fn tff_term(out: &mut String, t: &Term, names: &Names) {
    match t {
        Term::Integer(i) => write!(out, "{i}").unwrap(),
        Term::Symbol(s) => out.push_str(&names.constants[s]),
        Term::Variable(v) => out.push_str(v),
        Term::BinaryOperation { op, lhs, rhs } => {
            out.push_str(match op {
                BinaryOperator::Add => "$sum(",
                BinaryOperator::Subtract => "$difference(",
                BinaryOperator::Multiply => "$product(",
            });
            tff_term(out, lhs, names);
            out.push_str(", ");
            tff_term(out, rhs, names);
            out.push(')');
        }
    }
}

fn order_function(r: Relation) -> &'static str {
    match r {
        Relation::Less => "$less",
        Relation::LessEqual => "$lesseq",
        Relation::Greater => "$greater",
        Relation::GreaterEqual => "$greatereq",
        Relation::Equal | Relation::NotEqual => unreachable!("not an order relation"),
    }
}

fn write_args(out: &mut String, args: &[Term], mut term: impl FnMut(&mut String, &Term)) {
    if args.is_empty() {
        return;
    }
    out.push('(');
    for (i, t) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        term(out, t);
    }
    out.push(')');
}

/// Shared connective layout; `leaf` renders atoms and comparisons and
/// `binder` renders one quantified variable.
fn write_connectives(
    out: &mut String,
    f: &Formula,
    leaf: &mut dyn FnMut(&mut String, &Formula),
    binder: &dyn Fn(&Variable) -> String,
) {
    match f {
        Formula::Atom(_) | Formula::Compare(_) => leaf(out, f),
        Formula::Top => out.push_str("$true"),
        Formula::Bottom => out.push_str("$false"),
        Formula::Not(g) => {
            out.push_str("~ (");
            write_connectives(out, g, leaf, binder);
            out.push(')');
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let (sep, unit) = if matches!(f, Formula::And(_)) {
                (" & ", "$true")
            } else {
                (" | ", "$false")
            };
            if gs.is_empty() {
                out.push_str(unit);
                return;
            }
            out.push('(');
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                write_connectives(out, g, leaf, binder);
            }
            out.push(')');
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let sep = if matches!(f, Formula::Implies(..)) {
                " => "
            } else {
                " <=> "
            };
            out.push('(');
            write_connectives(out, a, leaf, binder);
            out.push_str(sep);
            write_connectives(out, b, leaf, binder);
            out.push(')');
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            out.push_str(if matches!(f, Formula::Forall(..)) {
                "! ["
            } else {
                "? ["
            });
            let bound: Vec<String> = vs.iter().map(binder).collect();
            out.push_str(&bound.join(", "));
            out.push_str("] : (");
            write_connectives(out, g, leaf, binder);
            out.push(')');
        }
    }
}

fn write_tff(out: &mut String, f: &Formula, names: &Names) {
    let mut leaf = |out: &mut String, f: &Formula| match f {
        Formula::Atom(a) => {
            out.push_str(&names.predicates[&a.predicate()]);
            write_args(out, &a.args, |o, t| tff_term(o, t, names));
        }
        Formula::Compare(c) if c.relation.is_order() => {
            out.push_str(order_function(c.relation));
            out.push('(');
            tff_term(out, &c.lhs, names);
            out.push_str(", ");
            tff_term(out, &c.rhs, names);
            out.push(')');
        }
        Formula::Compare(c) => {
            out.push('(');
            tff_term(out, &c.lhs, names);
            out.push_str(if c.relation == Relation::Equal { " = " } else { " != " });
            tff_term(out, &c.rhs, names);
            out.push(')');
        }
        _ => unreachable!(),
    };
    let binder = |v: &Variable| {
        let ty = if v.sort == Sort::Integer { "$int" } else { "object" };
        format!("{}: {ty}", v.name)
    };
    write_connectives(out, f, &mut leaf, &binder);
}

/// Replaces integer-sorted quantifiers by finite conjunctions/disjunctions.
fn expand_integers(f: &Formula, lo: i64, hi: i64) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Compare(_) | Formula::Top | Formula::Bottom => f.clone(),
        Formula::Not(g) => Formula::negate(expand_integers(g, lo, hi)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| expand_integers(g, lo, hi)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| expand_integers(g, lo, hi)).collect()),
        Formula::Implies(a, b) => Formula::implies(expand_integers(a, lo, hi), expand_integers(b, lo, hi)),
        Formula::Iff(a, b) => Formula::iff(expand_integers(a, lo, hi), expand_integers(b, lo, hi)),
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let universal = matches!(f, Formula::Forall(..));
            let body = expand_integers(g, lo, hi);
            let (ints, objects): (Vec<Variable>, Vec<Variable>) =
                vs.iter().cloned().partition(|v| v.sort == Sort::Integer);
            let mut instances = vec![body];
            for v in &ints {
                instances = instances
                    .iter()
                    .flat_map(|inst| {
                        (lo..=hi).map(move |n| {
                            // integers have no variables, so substitution cannot capture
                            inst.substitute(&v.name, &Term::Integer(n)).expect("capture-free")
                        })
                    })
                    .collect();
            }
            let body = if ints.is_empty() {
                instances.pop().unwrap()
            } else if universal {
                Formula::And(instances)
            } else {
                Formula::Or(instances)
            };
            if objects.is_empty() {
                body
            } else if universal {
                Formula::Forall(objects, Box::new(body))
            } else {
                Formula::Exists(objects, Box::new(body))
            }
        }
    }
}

fn ground_value(t: &Term) -> Option<i64> {
    match t {
        Term::Integer(i) => Some(*i),
        Term::BinaryOperation { op, lhs, rhs } => op.apply(ground_value(lhs)?, ground_value(rhs)?),
        _ => None,
    }
}

fn write_fof(out: &mut String, f: &Formula, names: &Names, (lo, hi): (i64, i64)) {
    let fof_term = |t: &Term| -> Option<String> {
        match t {
            Term::Symbol(s) => Some(names.constants[s].clone()),
            Term::Variable(v) => Some(v.clone()),
            _ => ground_value(t)
                .filter(|n| lo <= *n && *n <= hi)
                .map(|n| names.integers[&n].clone()),
        }
    };
    let mut leaf = |out: &mut String, f: &Formula| match f {
        Formula::Atom(a) => {
            let args: Option<Vec<String>> = a.args.iter().map(fof_term).collect();
            match args {
                Some(args) => {
                    out.push_str(&names.predicates[&a.predicate()]);
                    if !args.is_empty() {
                        write!(out, "({})", args.join(", ")).unwrap();
                    }
                }
                // an argument outside the integer range
                None => out.push_str("$false"),
            }
        }
        Formula::Compare(c) => {
            let values = (ground_value(&c.lhs), ground_value(&c.rhs));
            if let (Some(l), Some(r)) = values {
                out.push_str(if c.relation.holds(&l, &r) { "$true" } else { "$false" });
            } else if values.0.is_some() || values.1.is_some() || c.relation.is_order() {
                // undefined arithmetic on one side
                out.push_str(if c.relation == Relation::NotEqual { "$true" } else { "$false" });
            } else {
                let (l, r) = (fof_term(&c.lhs).unwrap(), fof_term(&c.rhs).unwrap());
                let rel = if c.relation == Relation::Equal { "=" } else { "!=" };
                write!(out, "({l} {rel} {r})").unwrap();
            }
        }
        _ => unreachable!(),
    };
    write_connectives(out, f, &mut leaf, &|v: &Variable| v.name.clone());
}
