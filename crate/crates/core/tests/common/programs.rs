//! Seeded generator of small, safe, sort-consistent tight programs with
//! input facts, for the completion correspondence checks.

use std::collections::BTreeSet;

use aspv::analysis::is_tight;
use aspv::fol::{GroundAtom, Value};
use aspv::oracle::Domain;
use aspv::syntax::{parse_program, Predicate, Program};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Obj,
    Int,
}

#[derive(Clone, Debug)]
struct Pred {
    name: &'static str,
    sorts: Vec<Kind>,
    input: bool,
}

pub struct Generated {
    pub source: String,
    pub program: Program,
    pub inputs: BTreeSet<Predicate>,
    pub facts: BTreeSet<GroundAtom>,
    pub domain: Domain,
}

struct Ctx<'a, R: Rng> {
    rng: &'a mut R,
    universe: Vec<String>,
    ints: Option<(i64, i64)>,
    /// Variables bound by positive literals, with their sort.
    bound: Vec<(String, Kind)>,
}

impl<R: Rng> Ctx<'_, R> {
    fn constant(&mut self, k: Kind) -> String {
        match k {
            Kind::Obj => self.universe.choose(self.rng).unwrap().clone(),
            Kind::Int => {
                let (lo, hi) = self.ints.unwrap();
                self.rng.gen_range(lo..=hi).to_string()
            }
        }
    }

    /// A term for a positive body literal; may bind a new variable.
    fn binding_term(&mut self, k: Kind) -> String {
        if self.rng.gen_bool(0.2) {
            return self.constant(k);
        }
        let name = ["X", "Y", "Z"][self.rng.gen_range(0..3)].to_string();
        match self.bound.iter().find(|(v, _)| *v == name) {
            Some((_, s)) if *s != k => self.constant(k),
            Some(_) => name,
            None => {
                self.bound.push((name.clone(), k));
                name
            }
        }
    }

    /// A term using only already bound variables.
    fn bound_term(&mut self, k: Kind) -> String {
        let same: Vec<String> = self.bound.iter().filter(|(_, s)| *s == k).map(|(v, _)| v.clone()).collect();
        if !same.is_empty() && self.rng.gen_bool(0.75) {
            same.choose(self.rng).unwrap().clone()
        } else {
            self.constant(k)
        }
    }
}

fn atom(name: &str, args: &[String]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        format!("{name}({})", args.join(","))
    }
}

/// Draws programs until one is tight and its oracle bases stay small.
pub fn random_tight_program<R: Rng>(rng: &mut R) -> Generated {
    loop {
        if let Some(g) = attempt(rng) {
            return g;
        }
    }
}

fn attempt<R: Rng>(rng: &mut R) -> Option<Generated> {
    let universe: Vec<String> = ["a", "b", "c"][..rng.gen_range(1..=3)].iter().map(|s| s.to_string()).collect();
    let ints = if rng.gen_bool(0.7) {
        Some((0, rng.gen_range(0..=2)))
    } else {
        None
    };
    let n = rng.gen_range(1..=3);
    let mut preds: Vec<Pred> = ["p", "q", "r"][..n]
        .iter()
        .map(|name| Pred {
            name,
            sorts: (0..rng.gen_range(0..=2))
                .map(|_| if ints.is_some() && rng.gen_bool(0.5) { Kind::Int } else { Kind::Obj })
                .collect(),
            input: rng.gen_bool(0.35),
        })
        .collect();
    if preds.iter().all(|p| p.input) {
        preds[0].input = false;
    }
    let size = |k: Kind| match k {
        Kind::Obj => universe.len(),
        Kind::Int => ints.map_or(0, |(lo, hi)| (hi - lo + 1) as usize),
    };
    let base: usize = preds
        .iter()
        .filter(|p| !p.input)
        .map(|p| p.sorts.iter().map(|k| size(*k)).product::<usize>())
        .sum();
    if base > 16 {
        return None;
    }

    let mut ctx = Ctx {
        rng,
        universe: universe.clone(),
        ints,
        bound: Vec::new(),
    };
    let heads: Vec<Pred> = preds.iter().filter(|p| !p.input).cloned().collect();
    let inputs: Vec<Pred> = preds.iter().filter(|p| p.input).cloned().collect();
    let mut source = String::new();
    for _ in 0..ctx.rng.gen_range(1..=6) {
        ctx.bound.clear();
        let mut body = Vec::new();
        for _ in 0..ctx.rng.gen_range(0..=2) {
            let p = preds.choose(ctx.rng).unwrap().clone();
            let args: Vec<String> = p.sorts.iter().map(|k| ctx.binding_term(*k)).collect();
            body.push(atom(p.name, &args));
        }
        if ctx.rng.gen_bool(0.4) {
            let p = preds.choose(ctx.rng).unwrap().clone();
            let args: Vec<String> = p.sorts.iter().map(|k| ctx.bound_term(*k)).collect();
            let neg = if ctx.rng.gen_bool(0.15) { "not not " } else { "not " };
            body.push(format!("{neg}{}", atom(p.name, &args)));
        }
        if !ctx.bound.is_empty() && ctx.rng.gen_bool(0.3) {
            let (v, k) = ctx.bound.choose(ctx.rng).unwrap().clone();
            let rhs = ctx.bound_term(k);
            let rel = match k {
                Kind::Obj => ["=", "!="].choose(ctx.rng).unwrap(),
                Kind::Int => ["=", "!=", "<", "<=", ">", ">="].choose(ctx.rng).unwrap(),
            };
            body.push(format!("{v} {rel} {rhs}"));
        }
        // a conditional literal whose condition is an input predicate
        if ctx.rng.gen_bool(0.15) {
            let conds: Vec<&Pred> = inputs.iter().filter(|p| p.sorts.len() == 1).collect();
            if let Some(c) = conds.choose(ctx.rng) {
                let k = c.sorts[0];
                let targets: Vec<&Pred> = preds.iter().filter(|p| p.sorts == [k]).collect();
                if let Some(t) = targets.choose(ctx.rng) {
                    let neg = if ctx.rng.gen_bool(0.5) { "not " } else { "" };
                    body.push(format!("{neg}{}(W) : {}(W)", t.name, c.name));
                }
            }
        }
        let kind = ctx.rng.gen_range(0..10);
        let head = if kind < 2 && !body.is_empty() {
            String::new()
        } else {
            let h = heads.choose(ctx.rng).unwrap().clone();
            let args: Vec<String> = h
                .sorts
                .iter()
                .map(|k| {
                    let ints: Vec<String> = ctx.bound.iter().filter(|(_, s)| *s == Kind::Int).map(|(v, _)| v.clone()).collect();
                    if *k == Kind::Int && !ints.is_empty() && ctx.rng.gen_bool(0.1) {
                        format!("{}+1", ints.choose(ctx.rng).unwrap())
                    } else {
                        ctx.bound_term(*k)
                    }
                })
                .collect();
            let a = atom(h.name, &args);
            if kind < 4 {
                format!("{{{a}}}")
            } else {
                a
            }
        };
        let rule = match (head.is_empty(), body.is_empty()) {
            (_, true) => format!("{head}."),
            (true, false) => format!(":- {}.", body.join(", ")),
            (false, false) => format!("{head} :- {}.", body.join(", ")),
        };
        source.push_str(&rule);
        source.push('\n');
    }
    let program = parse_program(&source).unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{source}"));
    if !is_tight(&program).tight {
        return None;
    }

    let mut facts = BTreeSet::new();
    for p in &inputs {
        let mut tuples: Vec<Vec<Value>> = vec![vec![]];
        for k in &p.sorts {
            let values: Vec<Value> = match k {
                Kind::Obj => universe.iter().map(|u| Value::Sym(u.clone())).collect(),
                Kind::Int => {
                    let (lo, hi) = ints.unwrap();
                    (lo..=hi).map(Value::Int).collect()
                }
            };
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
        for t in tuples {
            if ctx.rng.gen_bool(0.5) {
                facts.insert(GroundAtom::new(p.name, t));
            }
        }
    }
    Some(Generated {
        source,
        program,
        inputs: inputs.iter().map(|p| Predicate::new(p.name, p.sorts.len())).collect(),
        facts,
        domain: Domain::new(universe, ints),
    })
}
