//! The mini-gringo input language: program AST, parser, printer and
//! safety check.
//!
//! The accepted fragment covers facts, basic rules, choice rules without
//! bounds, constraints, default negation (single and double), comparisons
//! and non-nested conditional literals. Terms are integers, symbolic
//! constants, variables and integer arithmetic over `+`, `-` and `*`.

pub(crate) mod lexer;
pub(crate) mod parser;
mod print;
mod safety;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

pub use parser::{parse_program, ParseError};
pub use print::print_program;
pub use safety::{check_safety, local_variables, SafetyViolation};

/// A predicate symbol identified by name and arity; `p/1` and `p/2` are
/// different predicates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Self {
            name: name.into(),
            arity,
        }
    }

    /// Parses the `name/arity` notation used on the command line and in
    /// manifests.
    pub fn parse(text: &str) -> Option<Self> {
        let (name, arity) = text.trim().rsplit_once('/')?;
        let name = name.trim();
        if !is_symbol_name(name) {
            return None;
        }
        Some(Self::new(name, arity.trim().parse().ok()?))
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

pub(crate) fn is_symbol_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BinaryOperator {
    Add,
    Subtract,
    Multiply,
}

impl BinaryOperator {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOperator::Add => "+",
            BinaryOperator::Subtract => "-",
            BinaryOperator::Multiply => "*",
        }
    }

    pub fn apply(self, lhs: i64, rhs: i64) -> Option<i64> {
        match self {
            BinaryOperator::Add => lhs.checked_add(rhs),
            BinaryOperator::Subtract => lhs.checked_sub(rhs),
            BinaryOperator::Multiply => lhs.checked_mul(rhs),
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOperator::Add | BinaryOperator::Subtract => 1,
            BinaryOperator::Multiply => 2,
        }
    }
}

/// Terms shared by programs and first-order formulas.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Term {
    Integer(i64),
    Symbol(String),
    Variable(String),
    BinaryOperation {
        op: BinaryOperator,
        lhs: Box<Term>,
        rhs: Box<Term>,
    },
}

impl Term {
    pub fn variable(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        Term::Symbol(name.into())
    }

    pub fn binary(op: BinaryOperator, lhs: Term, rhs: Term) -> Self {
        Term::BinaryOperation {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// Collects variables in order of first occurrence.
    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Variable(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::BinaryOperation { lhs, rhs, .. } => {
                lhs.collect_variables(out);
                rhs.collect_variables(out);
            }
            Term::Integer(_) | Term::Symbol(_) => {}
        }
    }

    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    pub fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Symbol(s) => {
                out.insert(s.clone());
            }
            Term::BinaryOperation { lhs, rhs, .. } => {
                lhs.collect_symbols(out);
                rhs.collect_symbols(out);
            }
            Term::Integer(_) | Term::Variable(_) => {}
        }
    }

    pub fn is_arithmetic(&self) -> bool {
        matches!(self, Term::BinaryOperation { .. })
    }

    /// True if a symbolic constant occurs underneath an arithmetic operator.
    pub fn has_symbolic_arithmetic(&self) -> bool {
        fn contains_symbol(t: &Term) -> bool {
            match t {
                Term::Symbol(_) => true,
                Term::BinaryOperation { lhs, rhs, .. } => contains_symbol(lhs) || contains_symbol(rhs),
                _ => false,
            }
        }
        match self {
            Term::BinaryOperation { lhs, rhs, .. } => contains_symbol(lhs) || contains_symbol(rhs),
            _ => false,
        }
    }

    pub fn substitute(&self, var: &str, by: &Term) -> Term {
        match self {
            Term::Variable(v) if v == var => by.clone(),
            Term::BinaryOperation { op, lhs, rhs } => {
                Term::binary(*op, lhs.substitute(var, by), rhs.substitute(var, by))
            }
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Self {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn predicate(&self) -> Predicate {
        Predicate::new(self.predicate.clone(), self.args.len())
    }

    pub fn collect_variables(&self, out: &mut Vec<String>) {
        for arg in &self.args {
            arg.collect_variables(out);
        }
    }

    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Relation {
    Equal,
    NotEqual,
    Less,
    LessEqual,
    Greater,
    GreaterEqual,
}

impl Relation {
    pub fn ascii(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::NotEqual => "!=",
            Relation::Less => "<",
            Relation::LessEqual => "<=",
            Relation::Greater => ">",
            Relation::GreaterEqual => ">=",
        }
    }

    pub fn unicode(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::NotEqual => "≠",
            Relation::Less => "<",
            Relation::LessEqual => "≤",
            Relation::Greater => ">",
            Relation::GreaterEqual => "≥",
        }
    }

    /// Order relations only make sense on integers.
    pub fn is_order(self) -> bool {
        !matches!(self, Relation::Equal | Relation::NotEqual)
    }

    pub fn holds<T: Ord>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Equal => lhs == rhs,
            Relation::NotEqual => lhs != rhs,
            Relation::Less => lhs < rhs,
            Relation::LessEqual => lhs <= rhs,
            Relation::Greater => lhs > rhs,
            Relation::GreaterEqual => lhs >= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Comparison {
    pub relation: Relation,
    pub lhs: Term,
    pub rhs: Term,
}

impl Comparison {
    pub fn collect_variables(&self, out: &mut Vec<String>) {
        self.lhs.collect_variables(out);
        self.rhs.collect_variables(out);
    }
}

/// A literal that may stand in a conditional literal: an atom, optionally
/// negated once, or a comparison (conditions only).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Literal {
    Positive(Atom),
    Negative(Atom),
    Comparison(Comparison),
}

impl Literal {
    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            Literal::Positive(a) | Literal::Negative(a) => a.collect_variables(out),
            Literal::Comparison(c) => c.collect_variables(out),
        }
    }

    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Literal::Positive(a) | Literal::Negative(a) => Some(a),
            Literal::Comparison(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ConditionalLiteral {
    /// Either `Literal::Positive` or `Literal::Negative`.
    pub head: Literal,
    /// Never empty.
    pub conditions: Vec<Literal>,
}

impl ConditionalLiteral {
    pub fn collect_variables(&self, out: &mut Vec<String>) {
        self.head.collect_variables(out);
        for c in &self.conditions {
            c.collect_variables(out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BodyElement {
    Positive(Atom),
    Negative(Atom),
    DoubleNegative(Atom),
    Comparison(Comparison),
    Conditional(ConditionalLiteral),
}

impl BodyElement {
    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            BodyElement::Positive(a) | BodyElement::Negative(a) | BodyElement::DoubleNegative(a) => {
                a.collect_variables(out)
            }
            BodyElement::Comparison(c) => c.collect_variables(out),
            BodyElement::Conditional(c) => c.collect_variables(out),
        }
    }

    /// Atoms with their polarity (`true` = positive), conditional literal
    /// heads and conditions included.
    pub fn atoms(&self) -> Vec<(&Atom, bool)> {
        match self {
            BodyElement::Positive(a) => vec![(a, true)],
            BodyElement::Negative(a) | BodyElement::DoubleNegative(a) => vec![(a, false)],
            BodyElement::Comparison(_) => vec![],
            BodyElement::Conditional(c) => {
                let mut out = Vec::new();
                for lit in std::iter::once(&c.head).chain(&c.conditions) {
                    match lit {
                        Literal::Positive(a) => out.push((a, true)),
                        Literal::Negative(a) => out.push((a, false)),
                        Literal::Comparison(_) => {}
                    }
                }
                out
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Head {
    Basic(Atom),
    Choice(Atom),
    None,
}

impl Head {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Head::Basic(a) | Head::Choice(a) => Some(a),
            Head::None => None,
        }
    }
}

/// Source position of a rule, 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<BodyElement>,
    /// Position of the first token; not part of structural equality.
    pub span: Span,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.body == other.body
    }
}

impl Eq for Rule {}

impl Rule {
    pub fn new(head: Head, body: Vec<BodyElement>) -> Self {
        Self {
            head,
            body,
            span: Span::default(),
        }
    }

    pub fn fact(atom: Atom) -> Self {
        Self::new(Head::Basic(atom), vec![])
    }

    /// A ground fact: basic head, empty body, no variables.
    pub fn is_fact(&self) -> bool {
        matches!(&self.head, Head::Basic(a) if a.variables().is_empty()) && self.body.is_empty()
    }

    /// All variables in order of first occurrence (head first).
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(a) = self.head.atom() {
            a.collect_variables(&mut out);
        }
        for e in &self.body {
            e.collect_variables(&mut out);
        }
        out
    }

    /// Variables occurring in the head or in a body element that is not a
    /// conditional literal.
    pub fn global_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(a) = self.head.atom() {
            a.collect_variables(&mut out);
        }
        for e in &self.body {
            if !matches!(e, BodyElement::Conditional(_)) {
                e.collect_variables(&mut out);
            }
        }
        out
    }

    pub fn rename_predicates(&self, rename: &impl Fn(&Predicate) -> Option<String>) -> Rule {
        let ren_atom = |a: &Atom| -> Atom {
            match rename(&a.predicate()) {
                Some(name) => Atom::new(name, a.args.clone()),
                None => a.clone(),
            }
        };
        let ren_lit = |l: &Literal| -> Literal {
            match l {
                Literal::Positive(a) => Literal::Positive(ren_atom(a)),
                Literal::Negative(a) => Literal::Negative(ren_atom(a)),
                Literal::Comparison(c) => Literal::Comparison(c.clone()),
            }
        };
        let head = match &self.head {
            Head::Basic(a) => Head::Basic(ren_atom(a)),
            Head::Choice(a) => Head::Choice(ren_atom(a)),
            Head::None => Head::None,
        };
        let body = self
            .body
            .iter()
            .map(|e| match e {
                BodyElement::Positive(a) => BodyElement::Positive(ren_atom(a)),
                BodyElement::Negative(a) => BodyElement::Negative(ren_atom(a)),
                BodyElement::DoubleNegative(a) => BodyElement::DoubleNegative(ren_atom(a)),
                BodyElement::Comparison(c) => BodyElement::Comparison(c.clone()),
                BodyElement::Conditional(c) => BodyElement::Conditional(ConditionalLiteral {
                    head: ren_lit(&c.head),
                    conditions: c.conditions.iter().map(ren_lit).collect(),
                }),
            })
            .collect();
        Rule {
            head,
            body,
            span: self.span,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Self { rules }
    }

    /// Every predicate occurring in a head, a body or a conditional literal.
    pub fn signature(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        for rule in &self.rules {
            if let Some(a) = rule.head.atom() {
                out.insert(a.predicate());
            }
            for e in &rule.body {
                for (a, _) in e.atoms() {
                    out.insert(a.predicate());
                }
            }
        }
        out
    }

    /// Predicates occurring in some rule head.
    pub fn head_predicates(&self) -> BTreeSet<Predicate> {
        self.rules
            .iter()
            .filter_map(|r| r.head.atom().map(Atom::predicate))
            .collect()
    }

    fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        for rule in &self.rules {
            if let Some(a) = rule.head.atom() {
                a.args.iter().for_each(&mut *f);
            }
            for e in &rule.body {
                for (a, _) in e.atoms() {
                    a.args.iter().for_each(&mut *f);
                }
                let mut comparisons = Vec::new();
                match e {
                    BodyElement::Comparison(c) => comparisons.push(c),
                    BodyElement::Conditional(cl) => {
                        for l in &cl.conditions {
                            if let Literal::Comparison(c) = l {
                                comparisons.push(c);
                            }
                        }
                    }
                    _ => {}
                }
                for c in comparisons {
                    f(&c.lhs);
                    f(&c.rhs);
                }
            }
        }
    }

    /// Symbolic constants occurring anywhere in the program.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| t.collect_symbols(&mut out));
        out
    }

    /// Integer literals occurring anywhere in the program.
    pub fn integers(&self) -> BTreeSet<i64> {
        fn walk(t: &Term, out: &mut BTreeSet<i64>) {
            match t {
                Term::Integer(i) => {
                    out.insert(*i);
                }
                Term::BinaryOperation { lhs, rhs, .. } => {
                    walk(lhs, out);
                    walk(rhs, out);
                }
                Term::Symbol(_) | Term::Variable(_) => {}
            }
        }
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| walk(t, &mut out));
        out
    }

    /// Predicates defined only by ground facts (or not defined at all).
    pub fn is_extensional(&self, predicate: &Predicate) -> bool {
        self.rules
            .iter()
            .filter(|r| r.head.atom().map(Atom::predicate).as_ref() == Some(predicate))
            .all(Rule::is_fact)
    }

    pub fn rename_predicates(&self, rename: impl Fn(&Predicate) -> Option<String>) -> Program {
        Program::new(self.rules.iter().map(|r| r.rename_predicates(&rename)).collect())
    }

    pub fn extend(&mut self, other: &Program) {
        self.rules.extend(other.rules.iter().cloned());
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_term(f, self)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_atom(f, self)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_rule(f, self)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}
