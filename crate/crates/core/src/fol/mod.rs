//! First-order formulas, sort inference, finite evaluation and TPTP output.

mod eval;
mod parse;
mod simplify;
mod sorts;
mod tptp;

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use serde::Serialize;

use crate::syntax::{Atom, Comparison, Predicate, Relation, Term};

pub use eval::{evaluate, EvalError, GroundAtom, Interpretation, InterpretationError, Value};
pub(crate) use eval::{compare_values, eval_term};
pub use parse::parse_formula;
pub(crate) use parse::parse_formula_until_dot;
pub use simplify::simplify;
pub use sorts::{infer_sorts, SortAssignment, SortError};
pub use tptp::{emit_tptp, Dialect, EmitError, EmitOptions, NamedFormula, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    /// Not yet determined; ranges over both domains when evaluated.
    General,
    Object,
    Integer,
}

impl Sort {
    fn suffix(self) -> &'static str {
        match self {
            Sort::General => "",
            Sort::Object => "$s",
            Sort::Integer => "$i",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Variable {
    pub name: String,
    pub sort: Sort,
}

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            sort: Sort::General,
        }
    }

    pub fn sorted(name: impl Into<String>, sort: Sort) -> Self {
        Self {
            name: name.into(),
            sort,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Formula {
    Atom(Atom),
    Compare(Comparison),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Vec<Variable>, Box<Formula>),
    Exists(Vec<Variable>, Box<Formula>),
    Top,
    Bottom,
}

impl Formula {
    pub fn compare(relation: Relation, lhs: Term, rhs: Term) -> Self {
        Formula::Compare(Comparison { relation, lhs, rhs })
    }

    pub fn equal(lhs: Term, rhs: Term) -> Self {
        Self::compare(Relation::Equal, lhs, rhs)
    }

    pub fn negate(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Self {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// Conjunction that avoids trivial wrappers: empty is ⊤, singleton is the
    /// element itself.
    pub fn conjoin(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::Top,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    pub fn disjoin(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::Bottom,
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    /// Universal quantification, omitted when `vars` is empty.
    pub fn forall(vars: Vec<Variable>, body: Formula) -> Self {
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }

    pub fn exists(vars: Vec<Variable>, body: Formula) -> Self {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_variables(&self) -> Vec<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            let push_term = |t: &Term, out: &mut Vec<String>| {
                for v in t.variables() {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            };
            match f {
                Formula::Atom(a) => a.args.iter().for_each(|t| push_term(t, out)),
                Formula::Compare(c) => {
                    push_term(&c.lhs, out);
                    push_term(&c.rhs, out);
                }
                Formula::Not(g) => go(g, bound, out),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| go(g, bound, out)),
                Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                    let n = bound.len();
                    bound.extend(vs.iter().map(|v| v.name.clone()));
                    go(g, bound, out);
                    bound.truncate(n);
                }
                Formula::Top | Formula::Bottom => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    pub fn universal_closure(self) -> Formula {
        let vars = self.free_variables().into_iter().map(Variable::new).collect();
        Formula::forall(vars, self)
    }

    pub fn collect_predicates(&self, out: &mut BTreeSet<Predicate>) {
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                out.insert(a.predicate());
            }
        });
    }

    pub fn predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        self.collect_predicates(&mut out);
        out
    }

    pub fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        self.visit(&mut |f| match f {
            Formula::Atom(a) => a.args.iter().for_each(|t| t.collect_symbols(out)),
            Formula::Compare(c) => {
                c.lhs.collect_symbols(out);
                c.rhs.collect_symbols(out);
            }
            _ => {}
        });
    }

    /// Pre-order traversal of all subformulas.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Atom(_) | Formula::Compare(_) | Formula::Top | Formula::Bottom => {}
        }
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::Compare(_) | Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(g) => Formula::negate(g.map_atoms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
            Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(g.map_atoms(f))),
            Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(g.map_atoms(f))),
        }
    }

    pub fn rename_predicates(&self, rename: &impl Fn(&Predicate) -> Option<String>) -> Formula {
        self.map_atoms(&|a| match rename(&a.predicate()) {
            Some(name) => Atom::new(name, a.args.clone()),
            None => a.clone(),
        })
    }

    /// Replaces free occurrences of `var` by `by`. Returns `None` if a
    /// variable of `by` would be captured by a quantifier.
    pub fn substitute(&self, var: &str, by: &Term) -> Option<Formula> {
        let by_vars = by.variables();
        self.substitute_inner(var, by, &by_vars)
    }

    fn substitute_inner(&self, var: &str, by: &Term, by_vars: &[String]) -> Option<Formula> {
        Some(match self {
            Formula::Atom(a) => Formula::Atom(Atom::new(
                a.predicate.clone(),
                a.args.iter().map(|t| t.substitute(var, by)).collect(),
            )),
            Formula::Compare(c) => Formula::Compare(Comparison {
                relation: c.relation,
                lhs: c.lhs.substitute(var, by),
                rhs: c.rhs.substitute(var, by),
            }),
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(g) => Formula::negate(g.substitute_inner(var, by, by_vars)?),
            Formula::And(gs) => Formula::And(
                gs.iter()
                    .map(|g| g.substitute_inner(var, by, by_vars))
                    .collect::<Option<_>>()?,
            ),
            Formula::Or(gs) => Formula::Or(
                gs.iter()
                    .map(|g| g.substitute_inner(var, by, by_vars))
                    .collect::<Option<_>>()?,
            ),
            Formula::Implies(a, b) => Formula::implies(
                a.substitute_inner(var, by, by_vars)?,
                b.substitute_inner(var, by, by_vars)?,
            ),
            Formula::Iff(a, b) => Formula::iff(
                a.substitute_inner(var, by, by_vars)?,
                b.substitute_inner(var, by, by_vars)?,
            ),
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                if vs.iter().any(|v| v.name == var) {
                    return Some(self.clone());
                }
                let free = g.free_variables();
                if free.iter().any(|v| v == var) && vs.iter().any(|v| by_vars.contains(&v.name)) {
                    return None;
                }
                let body = Box::new(g.substitute_inner(var, by, by_vars)?);
                match self {
                    Formula::Forall(..) => Formula::Forall(vs.clone(), body),
                    _ => Formula::Exists(vs.clone(), body),
                }
            }
        })
    }

    /// Assigns sorts to quantified variables in pre-order; used after sort
    /// inference.
    pub(crate) fn map_binders(&self, f: &mut impl FnMut(&Variable) -> Variable) -> Formula {
        match self {
            Formula::Atom(_) | Formula::Compare(_) | Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(g) => Formula::negate(g.map_binders(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_binders(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_binders(f)).collect()),
            Formula::Implies(a, b) => {
                let a = a.map_binders(f);
                Formula::implies(a, b.map_binders(f))
            }
            Formula::Iff(a, b) => {
                let a = a.map_binders(f);
                Formula::iff(a, b.map_binders(f))
            }
            Formula::Forall(vs, g) => {
                let vs = vs.iter().map(&mut *f).collect();
                Formula::Forall(vs, Box::new(g.map_binders(f)))
            }
            Formula::Exists(vs, g) => {
                let vs = vs.iter().map(&mut *f).collect();
                Formula::Exists(vs, Box::new(g.map_binders(f)))
            }
        }
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_equivalent(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    /// Renames bound variables to `_0`, `_1`, ... in pre-order; these names
    /// cannot clash with source variables.
    fn canonical(&self) -> Formula {
        fn term(t: &Term, env: &[(String, String)]) -> Term {
            match t {
                Term::Variable(v) => match env.iter().rev().find(|(o, _)| o == v) {
                    Some((_, n)) => Term::Variable(n.clone()),
                    None => t.clone(),
                },
                Term::BinaryOperation { op, lhs, rhs } => Term::binary(*op, term(lhs, env), term(rhs, env)),
                _ => t.clone(),
            }
        }
        fn go(f: &Formula, env: &mut Vec<(String, String)>, next: &mut usize) -> Formula {
            match f {
                Formula::Atom(a) => Formula::Atom(Atom::new(
                    a.predicate.clone(),
                    a.args.iter().map(|t| term(t, env)).collect(),
                )),
                Formula::Compare(c) => Formula::compare(c.relation, term(&c.lhs, env), term(&c.rhs, env)),
                Formula::Top | Formula::Bottom => f.clone(),
                Formula::Not(g) => Formula::negate(go(g, env, next)),
                Formula::And(gs) => Formula::And(gs.iter().map(|g| go(g, env, next)).collect()),
                Formula::Or(gs) => Formula::Or(gs.iter().map(|g| go(g, env, next)).collect()),
                Formula::Implies(a, b) => {
                    let a = go(a, env, next);
                    Formula::implies(a, go(b, env, next))
                }
                Formula::Iff(a, b) => {
                    let a = go(a, env, next);
                    Formula::iff(a, go(b, env, next))
                }
                Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                    let depth = env.len();
                    let mut renamed = Vec::new();
                    for v in vs {
                        let name = format!("_{next}");
                        *next += 1;
                        env.push((v.name.clone(), name.clone()));
                        renamed.push(Variable::sorted(name, v.sort));
                    }
                    let body = Box::new(go(g, env, next));
                    env.truncate(depth);
                    if matches!(f, Formula::Forall(..)) {
                        Formula::Forall(renamed, body)
                    } else {
                        Formula::Exists(renamed, body)
                    }
                }
            }
        }
        go(self, &mut Vec::new(), &mut 0)
    }

    pub fn display(&self, style: Style) -> DisplayFormula<'_> {
        DisplayFormula {
            formula: self,
            style,
        }
    }
}

/// Connective vocabulary for textual output.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Style {
    #[default]
    Unicode,
    /// The syntax accepted by specification files.
    Ascii,
}

pub struct DisplayFormula<'a> {
    formula: &'a Formula,
    style: Style,
}

impl fmt::Display for DisplayFormula<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.formula, self.style, true)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, Style::Unicode, true)
    }
}

struct Vocabulary {
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
    iff: &'static str,
    forall: &'static str,
    exists: &'static str,
    top: &'static str,
    bottom: &'static str,
}

const UNICODE: Vocabulary = Vocabulary {
    not: "¬",
    and: " ∧ ",
    or: " ∨ ",
    implies: " → ",
    iff: " ↔ ",
    forall: "∀",
    exists: "∃",
    top: "⊤",
    bottom: "⊥",
};

const ASCII: Vocabulary = Vocabulary {
    not: "not ",
    and: " and ",
    or: " or ",
    implies: " -> ",
    iff: " <-> ",
    forall: "forall ",
    exists: "exists ",
    top: "#true",
    bottom: "#false",
};

fn write_formula(f: &mut impl Write, formula: &Formula, style: Style, top: bool) -> fmt::Result {
    let voc = match style {
        Style::Unicode => &UNICODE,
        Style::Ascii => &ASCII,
    };
    let compound = !matches!(
        formula,
        Formula::Atom(_) | Formula::Compare(_) | Formula::Not(_) | Formula::Top | Formula::Bottom
    );
    if compound && !top {
        f.write_char('(')?;
    }
    match formula {
        Formula::Atom(a) => write!(f, "{a}")?,
        Formula::Compare(c) => {
            let rel = match style {
                Style::Unicode => c.relation.unicode(),
                Style::Ascii => c.relation.ascii(),
            };
            write!(f, "{} {rel} {}", c.lhs, c.rhs)?
        }
        Formula::Top => f.write_str(voc.top)?,
        Formula::Bottom => f.write_str(voc.bottom)?,
        Formula::Not(g) => {
            f.write_str(voc.not)?;
            write_formula(f, g, style, false)?;
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let sep = if matches!(formula, Formula::And(_)) {
                voc.and
            } else {
                voc.or
            };
            if gs.is_empty() {
                // only reachable for hand-built formulas
                let unit = if matches!(formula, Formula::And(_)) {
                    voc.top
                } else {
                    voc.bottom
                };
                f.write_str(unit)?;
            }
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write_formula(f, g, style, false)?;
            }
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let sep = if matches!(formula, Formula::Implies(..)) {
                voc.implies
            } else {
                voc.iff
            };
            write_formula(f, a, style, false)?;
            f.write_str(sep)?;
            write_formula(f, b, style, false)?;
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let q = if matches!(formula, Formula::Forall(..)) {
                voc.forall
            } else {
                voc.exists
            };
            f.write_str(q)?;
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    f.write_char(' ')?;
                }
                write!(f, "{}{}", v.name, v.sort.suffix())?;
            }
            f.write_str(" (")?;
            write_formula(f, g, style, true)?;
            f.write_char(')')?;
        }
    }
    if compound && !top {
        f.write_char(')')?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unicode_and_ascii_rendering() {
        let f = parse_formula("forall X (q(X) <-> p(X) and X > 1)").unwrap();
        assert_eq!(f.to_string(), "∀X (q(X) ↔ (p(X) ∧ X > 1))");
        assert_eq!(
            f.display(Style::Ascii).to_string(),
            "forall X (q(X) <-> (p(X) and X > 1))"
        );
    }

    #[test]
    fn free_variables_respect_binding() {
        let f = parse_formula("forall X (q(X, Y) and exists Z r(Z, W))").unwrap();
        assert_eq!(f.free_variables(), vec!["Y".to_string(), "W".to_string()]);
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = parse_formula("exists Y p(X, Y)").unwrap();
        assert!(f.substitute("X", &Term::variable("Y")).is_none());
        let g = f.substitute("X", &Term::symbol("a")).unwrap();
        assert_eq!(g, parse_formula("exists Y p(a, Y)").unwrap());
    }

    #[test]
    fn alpha_equivalence() {
        let f = parse_formula("forall X (q(X) <-> exists Y p(X, Y))").unwrap();
        let g = parse_formula("forall V1 (q(V1) <-> exists X p(V1, X))").unwrap();
        let h = parse_formula("forall V1 (q(V1) <-> exists X p(X, V1))").unwrap();
        assert!(f.alpha_equivalent(&g));
        assert!(!f.alpha_equivalent(&h));
    }

    #[test]
    fn closure() {
        let f = parse_formula("p(X) -> q(X, Y)").unwrap().universal_closure();
        assert_eq!(f.to_string(), "∀X Y (p(X) → q(X, Y))");
        assert!(f.is_closed());
    }
}
