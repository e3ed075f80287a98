//! Evaluation of formulas in finite interpretations.
//!
//! The domain consists of the symbolic constants of the universe and, when
//! bounds are given, the integers in `[lo, hi]`. Binders range over the part
//! of the domain selected by their sort. Terms that leave the domain, or
//! whose arithmetic is undefined, make the enclosing atom false; an order
//! comparison involving a symbol is false as well.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Relation, Term};

use super::{Formula, Sort};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

impl Value {
    pub fn to_term(&self) -> Term {
        match self {
            Value::Int(i) => Term::Integer(*i),
            Value::Sym(s) => Term::Symbol(s.clone()),
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Integer,
            Value::Sym(_) => Sort::Object,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<Value>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<Value>) -> Self {
        Self {
            predicate: predicate.into(),
            args,
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InterpretationError {
    #[error("atom {0} has an argument outside the domain")]
    OutsideDomain(GroundAtom),
    #[error("empty integer range {0}..{1}")]
    EmptyRange(i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("free variable {0}")]
    FreeVariable(String),
    #[error("integer quantifier over {0} without integer bounds")]
    UnboundedIntegers(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    pub universe: BTreeSet<String>,
    pub int_bounds: Option<(i64, i64)>,
    pub atoms: BTreeSet<GroundAtom>,
}

impl Interpretation {
    pub fn new(
        universe: BTreeSet<String>,
        int_bounds: Option<(i64, i64)>,
        atoms: BTreeSet<GroundAtom>,
    ) -> Result<Self, InterpretationError> {
        if let Some((lo, hi)) = int_bounds {
            if lo > hi {
                return Err(InterpretationError::EmptyRange(lo, hi));
            }
        }
        let interp = Self {
            universe,
            int_bounds,
            atoms,
        };
        if let Some(bad) = interp
            .atoms
            .iter()
            .find(|a| !a.args.iter().all(|v| interp.contains(v)))
        {
            return Err(InterpretationError::OutsideDomain(bad.clone()));
        }
        Ok(interp)
    }

    pub fn contains(&self, value: &Value) -> bool {
        match value {
            Value::Int(i) => matches!(self.int_bounds, Some((lo, hi)) if lo <= *i && *i <= hi),
            Value::Sym(s) => self.universe.contains(s),
        }
    }

    /// Domain elements of the given sort, integers first.
    pub fn domain(&self, sort: Sort) -> Vec<Value> {
        let mut out = Vec::new();
        if sort != Sort::Object {
            if let Some((lo, hi)) = self.int_bounds {
                out.extend((lo..=hi).map(Value::Int));
            }
        }
        if sort != Sort::Integer {
            out.extend(self.universe.iter().cloned().map(Value::Sym));
        }
        out
    }
}

pub(crate) type Env = Vec<(String, Value)>;

pub(crate) fn eval_term(t: &Term, env: &Env) -> Result<Option<Value>, EvalError> {
    Ok(match t {
        Term::Integer(i) => Some(Value::Int(*i)),
        Term::Symbol(s) => Some(Value::Sym(s.clone())),
        Term::Variable(v) => Some(
            env.iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, val)| val.clone())
                .ok_or_else(|| EvalError::FreeVariable(v.clone()))?,
        ),
        Term::BinaryOperation { op, lhs, rhs } => {
            match (eval_term(lhs, env)?, eval_term(rhs, env)?) {
                (Some(Value::Int(a)), Some(Value::Int(b))) => op.apply(a, b).map(Value::Int),
                _ => None,
            }
        }
    })
}

pub(crate) fn compare_values(relation: Relation, lhs: &Value, rhs: &Value) -> bool {
    match (lhs, rhs) {
        (Value::Int(a), Value::Int(b)) => relation.holds(a, b),
        _ if relation.is_order() => false,
        _ => relation.holds(lhs, rhs),
    }
}

fn eval(f: &Formula, interp: &Interpretation, env: &mut Env) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(a) => {
            let mut args = Vec::with_capacity(a.args.len());
            for t in &a.args {
                match eval_term(t, env)? {
                    Some(v) => args.push(v),
                    None => return Ok(false),
                }
            }
            interp.atoms.contains(&GroundAtom::new(a.predicate.clone(), args))
        }
        Formula::Compare(c) => match (eval_term(&c.lhs, env)?, eval_term(&c.rhs, env)?) {
            (Some(l), Some(r)) => compare_values(c.relation, &l, &r),
            _ => false,
        },
        Formula::Not(g) => !eval(g, interp, env)?,
        Formula::And(gs) => {
            for g in gs {
                if !eval(g, interp, env)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval(g, interp, env)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Implies(a, b) => !eval(a, interp, env)? || eval(b, interp, env)?,
        Formula::Iff(a, b) => eval(a, interp, env)? == eval(b, interp, env)?,
        Formula::Forall(vs, g) => quantify(vs, g, interp, env, true)?,
        Formula::Exists(vs, g) => quantify(vs, g, interp, env, false)?,
    })
}

fn quantify(
    vs: &[super::Variable],
    body: &Formula,
    interp: &Interpretation,
    env: &mut Env,
    universal: bool,
) -> Result<bool, EvalError> {
    let Some((first, rest)) = vs.split_first() else {
        return eval(body, interp, env);
    };
    if first.sort == Sort::Integer && interp.int_bounds.is_none() {
        return Err(EvalError::UnboundedIntegers(first.name.clone()));
    }
    for value in interp.domain(first.sort) {
        env.push((first.name.clone(), value));
        let result = quantify(rest, body, interp, env, universal);
        env.pop();
        if result? != universal {
            return Ok(!universal);
        }
    }
    Ok(universal)
}

/// Truth value of a closed formula.
pub fn evaluate(formula: &Formula, interp: &Interpretation) -> Result<bool, EvalError> {
    eval(formula, interp, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    fn interp(universe: &[&str], bounds: Option<(i64, i64)>, atoms: &[(&str, Vec<Value>)]) -> Interpretation {
        Interpretation::new(
            universe.iter().map(|s| s.to_string()).collect(),
            bounds,
            atoms
                .iter()
                .map(|(p, a)| GroundAtom::new(*p, a.clone()))
                .collect(),
        )
        .unwrap()
    }

    fn holds(src: &str, i: &Interpretation) -> bool {
        evaluate(&parse_formula(src).unwrap(), i).unwrap()
    }

    #[test]
    fn quantifiers_and_sorts() {
        let i = interp(&["a"], Some((0, 2)), &[("p", vec![Value::Int(2)])]);
        assert!(holds("exists X (p(X))", &i));
        assert!(!holds("exists X$s (p(X))", &i));
        assert!(holds("forall X$i (p(X) -> X > 1)", &i));
        assert!(!holds("forall X (p(X))", &i));
    }

    #[test]
    fn out_of_domain_terms_make_atoms_false() {
        let i = interp(&[], Some((0, 2)), &[("p", vec![Value::Int(0)])]);
        assert!(!holds("exists X$i (p(X + 1))", &i));
        assert!(holds("exists X$i (p(X + 1) or X = 2)", &i));
        // 2 + 1 = 3 lies outside the range, but the comparison is still defined
        assert!(holds("exists X$i (X + 1 = 3)", &i));
    }

    #[test]
    fn ill_typed_comparisons() {
        let i = interp(&["a", "b"], Some((0, 0)), &[]);
        assert!(!holds("exists X$s (X < 0)", &i));
        assert!(holds("forall X$s (X != 0)", &i));
        assert!(holds("a != b", &i));
    }

    #[test]
    fn integer_quantifier_needs_bounds() {
        let i = interp(&["a"], None, &[]);
        assert_eq!(
            evaluate(&parse_formula("exists N$i (N = N)").unwrap(), &i),
            Err(EvalError::UnboundedIntegers("N".into()))
        );
        assert!(holds("forall X (X = a)", &i));
    }

    #[test]
    fn free_variables_are_errors() {
        let i = interp(&[], None, &[]);
        assert_eq!(
            evaluate(&parse_formula("p(X)").unwrap(), &i),
            Err(EvalError::FreeVariable("X".into()))
        );
    }

    #[test]
    fn atoms_must_lie_in_domain() {
        let err = Interpretation::new(
            BTreeSet::new(),
            Some((0, 1)),
            [GroundAtom::new("p", vec![Value::Int(5)])].into(),
        )
        .unwrap_err();
        assert!(matches!(err, InterpretationError::OutsideDomain(_)));
    }
}
