//! Two-sorted inference over a set of formulas.
//!
//! Variables and predicate argument positions are merged into equivalence
//! classes whenever they must share a sort; each class is then forced to
//! `Integer` by arithmetic, order comparisons or integer literals and to
//! `Object` by symbolic constants. Unconstrained classes default to
//! `Object`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Comparison, Predicate, Term};

use super::{Formula, Sort, Variable};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    /// (formula index, pre-order binder ordinal)
    Binder(usize, usize),
    Free(usize, String),
    Position(Predicate, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("sort clash for {subject}: {object_reason} requires an object, but {integer_reason} requires an integer")]
pub struct SortError {
    pub subject: String,
    pub object_reason: String,
    pub integer_reason: String,
}

/// Inferred sorts for every binder and predicate argument position.
#[derive(Clone, Debug, Default)]
pub struct SortAssignment {
    binders: HashMap<(usize, usize), Sort>,
    positions: BTreeMap<(Predicate, usize), Sort>,
}

impl SortAssignment {
    /// The sort of argument `index` of `predicate`; `Object` if the
    /// predicate never occurred.
    pub fn position(&self, predicate: &Predicate, index: usize) -> Sort {
        self.positions
            .get(&(predicate.clone(), index))
            .copied()
            .unwrap_or(Sort::Object)
    }

    pub fn positions(&self) -> &BTreeMap<(Predicate, usize), Sort> {
        &self.positions
    }

    /// Returns formula `index` with every binder annotated.
    pub fn annotate(&self, index: usize, formula: &Formula) -> Formula {
        let mut ordinal = 0;
        formula.map_binders(&mut |v| {
            let sort = self
                .binders
                .get(&(index, ordinal))
                .copied()
                .unwrap_or(Sort::Object);
            ordinal += 1;
            Variable::sorted(v.name.clone(), sort)
        })
    }
}

#[derive(Default)]
struct Forces {
    object: Option<String>,
    integer: Option<String>,
}

#[derive(Default)]
struct Inference {
    keys: HashMap<Key, usize>,
    parent: Vec<usize>,
    names: Vec<String>,
    forces: Vec<Forces>,
}

impl Inference {
    fn node(&mut self, key: Key) -> usize {
        if let Some(&n) = self.keys.get(&key) {
            return n;
        }
        let n = self.parent.len();
        self.parent.push(n);
        self.names.push(match &key {
            Key::Binder(_, _) | Key::Free(_, _) => String::new(),
            Key::Position(p, i) => format!("argument {} of {p}", i + 1),
        });
        self.forces.push(Forces::default());
        self.keys.insert(key, n);
        n
    }

    fn find(&mut self, mut n: usize) -> usize {
        while self.parent[n] != n {
            self.parent[n] = self.parent[self.parent[n]];
            n = self.parent[n];
        }
        n
    }

    fn union(&mut self, a: usize, b: usize) -> Result<(), SortError> {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return Ok(());
        }
        self.parent[b] = a;
        let moved = std::mem::take(&mut self.forces[b]);
        if self.names[a].is_empty() {
            self.names[a] = std::mem::take(&mut self.names[b]);
        }
        if let Some(r) = moved.object {
            self.force(a, Sort::Object, r)?;
        }
        if let Some(r) = moved.integer {
            self.force(a, Sort::Integer, r)?;
        }
        Ok(())
    }

    fn force(&mut self, n: usize, sort: Sort, reason: String) -> Result<(), SortError> {
        let root = self.find(n);
        let forces = &mut self.forces[root];
        match sort {
            Sort::Object => {
                forces.object.get_or_insert(reason);
            }
            Sort::Integer => {
                forces.integer.get_or_insert(reason);
            }
            Sort::General => return Ok(()),
        }
        if let (Some(o), Some(i)) = (&forces.object, &forces.integer) {
            return Err(SortError {
                subject: self.names[root].clone(),
                object_reason: o.clone(),
                integer_reason: i.clone(),
            });
        }
        Ok(())
    }
}

struct Walker<'a> {
    inf: &'a mut Inference,
    index: usize,
    ordinal: usize,
    scope: Vec<(String, usize)>,
}

impl Walker<'_> {
    fn variable(&mut self, name: &str) -> usize {
        if let Some((_, n)) = self.scope.iter().rev().find(|(v, _)| v == name) {
            return *n;
        }
        let n = self.inf.node(Key::Free(self.index, name.to_string()));
        if self.inf.names[n].is_empty() {
            self.inf.names[n] = format!("variable {name} in formula {}", self.index + 1);
        }
        n
    }

    /// Constrains `term` to `target` when given, returning the node of a
    /// plain variable term.
    fn term(&mut self, term: &Term, context: &str) -> Result<TermSort, SortError> {
        Ok(match term {
            Term::Variable(v) => TermSort::Node(self.variable(v)),
            Term::Symbol(s) => TermSort::Fixed(Sort::Object, format!("symbol `{s}` in {context}")),
            Term::Integer(i) => TermSort::Fixed(Sort::Integer, format!("integer `{i}` in {context}")),
            Term::BinaryOperation { .. } => {
                let reason = format!("arithmetic `{term}` in {context}");
                self.force_term_integer(term, &reason)?;
                TermSort::Fixed(Sort::Integer, reason)
            }
        })
    }

    fn force_term_integer(&mut self, term: &Term, reason: &str) -> Result<(), SortError> {
        for v in term.variables() {
            let n = self.variable(&v);
            self.inf.force(n, Sort::Integer, reason.to_string())?;
        }
        if let Some(s) = first_symbol(term) {
            // a symbol under arithmetic can never be an integer
            return Err(SortError {
                subject: format!("term `{term}`"),
                object_reason: format!("symbol `{s}`"),
                integer_reason: reason.to_string(),
            });
        }
        Ok(())
    }

    fn bind(&mut self, node: usize, ts: TermSort) -> Result<(), SortError> {
        match ts {
            TermSort::Node(m) => self.inf.union(node, m),
            TermSort::Fixed(sort, reason) => self.inf.force(node, sort, reason),
        }
    }

    fn comparison(&mut self, c: &Comparison) -> Result<(), SortError> {
        let context = format!(
            "`{} {} {}` (formula {})",
            c.lhs,
            c.relation.ascii(),
            c.rhs,
            self.index + 1
        );
        if c.relation.is_order() {
            let reason = format!("comparison {context}");
            self.force_term_integer(&c.lhs, &reason)?;
            self.force_term_integer(&c.rhs, &reason)?;
            if let Some(s) = first_symbol(&c.lhs).or_else(|| first_symbol(&c.rhs)) {
                return Err(SortError {
                    subject: context.clone(),
                    object_reason: format!("symbol `{s}`"),
                    integer_reason: reason,
                });
            }
            return Ok(());
        }
        let lhs = self.term(&c.lhs, &context)?;
        let rhs = self.term(&c.rhs, &context)?;
        match (lhs, rhs) {
            (TermSort::Node(a), other) | (other, TermSort::Node(a)) => self.bind(a, other),
            (TermSort::Fixed(s, r), TermSort::Fixed(t, q)) if s != t => {
                let (object_reason, integer_reason) = if s == Sort::Object { (r, q) } else { (q, r) };
                Err(SortError {
                    subject: context,
                    object_reason,
                    integer_reason,
                })
            }
            _ => Ok(()),
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<(), SortError> {
        match f {
            Formula::Atom(a) => {
                let context = format!("`{a}` (formula {})", self.index + 1);
                let predicate = a.predicate();
                for (i, t) in a.args.iter().enumerate() {
                    let node = self.inf.node(Key::Position(predicate.clone(), i));
                    let ts = self.term(t, &context)?;
                    self.bind(node, ts)?;
                }
                Ok(())
            }
            Formula::Compare(c) => self.comparison(c),
            Formula::Top | Formula::Bottom => Ok(()),
            Formula::Not(g) => self.formula(g),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().try_for_each(|g| self.formula(g)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.formula(a)?;
                self.formula(b)
            }
            Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                let depth = self.scope.len();
                for v in vs {
                    let n = self.inf.node(Key::Binder(self.index, self.ordinal));
                    self.ordinal += 1;
                    self.inf.names[n] = format!("variable {} in formula {}", v.name, self.index + 1);
                    let reason = format!("declared sort of {} (formula {})", v.name, self.index + 1);
                    self.inf.force(n, v.sort, reason)?;
                    self.scope.push((v.name.clone(), n));
                }
                self.formula(g)?;
                self.scope.truncate(depth);
                Ok(())
            }
        }
    }
}

enum TermSort {
    Node(usize),
    Fixed(Sort, String),
}

fn first_symbol(t: &Term) -> Option<&str> {
    match t {
        Term::Symbol(s) => Some(s),
        Term::BinaryOperation { lhs, rhs, .. } => first_symbol(lhs).or_else(|| first_symbol(rhs)),
        _ => None,
    }
}

/// Infers sorts jointly for `formulas`; predicate argument positions are
/// shared across all of them.
pub fn infer_sorts(formulas: &[Formula]) -> Result<SortAssignment, SortError> {
    let mut inf = Inference::default();
    let mut binder_counts = Vec::with_capacity(formulas.len());
    for (index, f) in formulas.iter().enumerate() {
        let mut w = Walker {
            inf: &mut inf,
            index,
            ordinal: 0,
            scope: Vec::new(),
        };
        w.formula(f)?;
        binder_counts.push(w.ordinal);
    }
    let resolved = |inf: &mut Inference, n: usize| {
        let root = inf.find(n);
        if inf.forces[root].integer.is_some() {
            Sort::Integer
        } else {
            Sort::Object
        }
    };
    let mut out = SortAssignment::default();
    let keys: Vec<(Key, usize)> = inf.keys.iter().map(|(k, n)| (k.clone(), *n)).collect();
    for (key, n) in keys {
        let sort = resolved(&mut inf, n);
        match key {
            Key::Binder(f, o) => {
                out.binders.insert((f, o), sort);
            }
            Key::Position(p, i) => {
                out.positions.insert((p, i), sort);
            }
            Key::Free(..) => {}
        }
    }
    Ok(out)
}

impl fmt::Display for SortAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((p, i), s) in &self.positions {
            writeln!(f, "{p}[{}]: {s:?}", i + 1)?;
        }
        Ok(())
    }
}
