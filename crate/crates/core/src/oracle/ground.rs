use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::fol::{compare_values, eval_term, GroundAtom, Value};
use crate::syntax::{Atom, BodyElement, Comparison, Head, Literal, Predicate, Program, Rule};

use super::{Domain, OracleError};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GroundHead {
    Atom(GroundAtom),
    None,
}

/// A ground rule `head :- positive, not negative, not not double_negative`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroundRule {
    pub head: GroundHead,
    pub positive: Vec<GroundAtom>,
    pub negative: Vec<GroundAtom>,
    pub double_negative: Vec<GroundAtom>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
}

impl GroundProgram {
    /// Atoms whose truth value the reduct depends on.
    pub fn negated_atoms(&self) -> BTreeSet<GroundAtom> {
        self.rules
            .iter()
            .flat_map(|r| r.negative.iter().chain(&r.double_negative))
            .cloned()
            .collect()
    }

    pub fn atoms(&self) -> BTreeSet<GroundAtom> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            if let GroundHead::Atom(a) = &r.head {
                out.insert(a.clone());
            }
            out.extend(r.positive.iter().cloned());
            out.extend(r.negative.iter().cloned());
            out.extend(r.double_negative.iter().cloned());
        }
        out
    }

    /// Least model of the reduct with respect to `guess`, or `None` if a
    /// constraint of the reduct fires.
    pub fn reduct_least_model(&self, guess: &BTreeSet<GroundAtom>) -> Option<BTreeSet<GroundAtom>> {
        let kept: Vec<&GroundRule> = self
            .rules
            .iter()
            .filter(|r| {
                r.negative.iter().all(|a| !guess.contains(a))
                    && r.double_negative.iter().all(|a| guess.contains(a))
            })
            .collect();
        let mut model = BTreeSet::new();
        loop {
            let mut changed = false;
            for r in &kept {
                if let GroundHead::Atom(h) = &r.head {
                    if !model.contains(h) && r.positive.iter().all(|a| model.contains(a)) {
                        model.insert(h.clone());
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let violated = kept
            .iter()
            .any(|r| r.head == GroundHead::None && r.positive.iter().all(|a| model.contains(a)));
        (!violated).then_some(model)
    }

    /// Classical satisfaction of every rule.
    pub fn is_model(&self, m: &BTreeSet<GroundAtom>) -> bool {
        self.rules.iter().all(|r| {
            let body = r.positive.iter().all(|a| m.contains(a))
                && r.negative.iter().all(|a| !m.contains(a))
                && r.double_negative.iter().all(|a| m.contains(a));
            !body
                || match &r.head {
                    GroundHead::Atom(h) => m.contains(h),
                    GroundHead::None => false,
                }
        })
    }
}

impl fmt::Display for GroundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let GroundHead::Atom(a) = &self.head {
            write!(f, "{a}")?;
        }
        let body: Vec<String> = self
            .positive
            .iter()
            .map(ToString::to_string)
            .chain(self.negative.iter().map(|a| format!("not {a}")))
            .chain(self.double_negative.iter().map(|a| format!("not not {a}")))
            .collect();
        if !body.is_empty() {
            if self.head != GroundHead::None {
                f.write_str(" ")?;
            }
            write!(f, ":- {}", body.join(", "))?;
        } else if self.head == GroundHead::None {
            f.write_str(":-")?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// The complement atom used to desugar choice rules; its name cannot occur
/// in source programs.
pub(crate) fn complement(a: &GroundAtom) -> GroundAtom {
    GroundAtom::new(format!("{}'", a.predicate), a.args.clone())
}

pub(crate) fn is_complement(a: &GroundAtom) -> bool {
    a.predicate.ends_with('\'')
}

type Env = Vec<(String, Value)>;

/// `None` when an argument is undefined or outside the domain.
fn ground_atom(a: &Atom, env: &Env, domain: &Domain) -> Option<GroundAtom> {
    let mut args = Vec::with_capacity(a.args.len());
    for t in &a.args {
        let v = eval_term(t, env).ok()??;
        if !domain.contains(&v) {
            return None;
        }
        args.push(v);
    }
    Some(GroundAtom::new(a.predicate.clone(), args))
}

fn comparison_holds(c: &Comparison, env: &Env) -> bool {
    match (eval_term(&c.lhs, env), eval_term(&c.rhs, env)) {
        (Ok(Some(l)), Ok(Some(r))) => compare_values(c.relation, &l, &r),
        _ => false,
    }
}

#[derive(Default)]
struct Body {
    positive: Vec<GroundAtom>,
    negative: Vec<GroundAtom>,
    double_negative: Vec<GroundAtom>,
}

struct Grounder<'a> {
    domain: &'a Domain,
    values: Vec<Value>,
    facts: BTreeSet<GroundAtom>,
}

impl Grounder<'_> {
    fn literal_in_facts(&self, l: &Literal, env: &Env) -> bool {
        match l {
            Literal::Positive(a) => ground_atom(a, env, self.domain).is_some_and(|g| self.facts.contains(&g)),
            Literal::Negative(a) => !ground_atom(a, env, self.domain).is_some_and(|g| self.facts.contains(&g)),
            Literal::Comparison(c) => comparison_holds(c, env),
        }
    }

    /// Adds the instance of `head` for every assignment to `locals` under
    /// which all conditions hold in the facts. Returns false if the body
    /// became unsatisfiable.
    fn expand_conditional(
        &self,
        head: &Literal,
        conditions: &[Literal],
        locals: &[String],
        env: &mut Env,
        body: &mut Body,
    ) -> bool {
        let Some((first, rest)) = locals.split_first() else {
            if !conditions.iter().all(|c| self.literal_in_facts(c, env)) {
                return true;
            }
            return match head {
                Literal::Positive(a) => match ground_atom(a, env, self.domain) {
                    Some(g) => {
                        body.positive.push(g);
                        true
                    }
                    None => false,
                },
                Literal::Negative(a) => {
                    if let Some(g) = ground_atom(a, env, self.domain) {
                        body.negative.push(g);
                    }
                    true
                }
                Literal::Comparison(c) => comparison_holds(c, env),
            };
        };
        for v in &self.values {
            env.push((first.clone(), v.clone()));
            let ok = self.expand_conditional(head, conditions, rest, env, body);
            env.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    /// Ground body under `env`, or `None` if it is certainly false.
    fn body(&self, rule: &Rule, globals: &[String], env: &mut Env) -> Option<Body> {
        let mut body = Body::default();
        for e in &rule.body {
            match e {
                BodyElement::Positive(a) => body.positive.push(ground_atom(a, env, self.domain)?),
                BodyElement::Negative(a) => {
                    if let Some(g) = ground_atom(a, env, self.domain) {
                        body.negative.push(g);
                    }
                }
                BodyElement::DoubleNegative(a) => body.double_negative.push(ground_atom(a, env, self.domain)?),
                BodyElement::Comparison(c) => {
                    if !comparison_holds(c, env) {
                        return None;
                    }
                }
                BodyElement::Conditional(cl) => {
                    let mut vars = Vec::new();
                    cl.collect_variables(&mut vars);
                    vars.retain(|v| !globals.contains(v));
                    if !self.expand_conditional(&cl.head, &cl.conditions, &vars, env, &mut body) {
                        return None;
                    }
                }
            }
        }
        Some(body)
    }

    fn rule(&self, rule: &Rule, globals: &[String], env: &mut Env, out: &mut BTreeSet<GroundRule>) {
        let Some((first, rest)) = globals.split_first() else {
            self.instance(rule, env, out);
            return;
        };
        // prune as soon as a comparison over bound variables fails
        for v in &self.values {
            env.push((first.clone(), v.clone()));
            let bound: Vec<&String> = env.iter().map(|(n, _)| n).collect();
            let pruned = rule.body.iter().any(|e| match e {
                BodyElement::Comparison(c) => {
                    let mut vars = Vec::new();
                    c.collect_variables(&mut vars);
                    vars.iter().all(|x| bound.contains(&x)) && !comparison_holds(c, env)
                }
                _ => false,
            });
            if !pruned {
                self.rule(rule, rest, env, out);
            }
            env.pop();
        }
    }

    fn instance(&self, rule: &Rule, env: &mut Env, out: &mut BTreeSet<GroundRule>) {
        let globals = rule.global_variables();
        let Some(body) = self.body(rule, &globals, env) else {
            return;
        };
        let sorted = |mut v: Vec<GroundAtom>| {
            v.sort();
            v.dedup();
            v
        };
        let positive = sorted(body.positive);
        let negative = sorted(body.negative);
        let double_negative = sorted(body.double_negative);
        match &rule.head {
            Head::None => {
                out.insert(GroundRule {
                    head: GroundHead::None,
                    positive,
                    negative,
                    double_negative,
                });
            }
            Head::Basic(a) => {
                if let Some(h) = ground_atom(a, env, self.domain) {
                    out.insert(GroundRule {
                        head: GroundHead::Atom(h),
                        positive,
                        negative,
                        double_negative,
                    });
                }
            }
            Head::Choice(a) => {
                if let Some(h) = ground_atom(a, env, self.domain) {
                    let c = complement(&h);
                    let mut neg_h = negative.clone();
                    neg_h.push(c.clone());
                    neg_h.sort();
                    let mut neg_c = negative;
                    neg_c.push(h.clone());
                    neg_c.sort();
                    out.insert(GroundRule {
                        head: GroundHead::Atom(h),
                        positive: positive.clone(),
                        negative: neg_h,
                        double_negative: double_negative.clone(),
                    });
                    out.insert(GroundRule {
                        head: GroundHead::Atom(c),
                        positive,
                        negative: neg_c,
                        double_negative,
                    });
                }
            }
        }
    }
}

/// Instantiates every rule over `domain`. Atoms with an argument outside
/// the domain (or with undefined arithmetic) count as false.
pub fn ground(program: &Program, domain: &Domain) -> Result<GroundProgram, OracleError> {
    for rule in &program.rules {
        for e in &rule.body {
            if let BodyElement::Conditional(cl) = e {
                for c in &cl.conditions {
                    if let Some(a) = c.atom() {
                        let p: Predicate = a.predicate();
                        if !program.is_extensional(&p) {
                            return Err(OracleError::IntensionalCondition(p));
                        }
                    }
                }
            }
        }
    }
    let values = domain.values();
    let mut facts = BTreeSet::new();
    for rule in program.rules.iter().filter(|r| r.is_fact()) {
        if let Some(g) = rule.head.atom().and_then(|a| ground_atom(a, &Vec::new(), domain)) {
            facts.insert(g);
        }
    }
    let grounder = Grounder {
        domain,
        values,
        facts,
    };
    let mut out = BTreeSet::new();
    for rule in &program.rules {
        let globals = rule.global_variables();
        if !globals.is_empty() && domain.is_empty() {
            return Err(OracleError::EmptyUniverse(rule.to_string()));
        }
        grounder.rule(rule, &globals, &mut Vec::new(), &mut out);
    }
    Ok(GroundProgram {
        rules: out.into_iter().collect(),
    })
}
