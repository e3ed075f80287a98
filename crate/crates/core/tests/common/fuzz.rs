//! Random program text exercising the whole surface syntax: arithmetic
//! with precedence and parentheses, negative numbers, comparisons, double
//! negation, conditional literals with several conditions, choice rules,
//! constraints, comments and irregular whitespace. Rules are safe by
//! construction.

use rand::seq::SliceRandom;
use rand::Rng;

const PREDS: [(&str, usize); 6] = [("p", 1), ("q", 2), ("r", 0), ("edge", 2), ("node", 1), ("s_1", 3)];
const VARS: [&str; 5] = ["X", "Y", "Z", "Node", "V_2"];
const SYMS: [&str; 4] = ["a", "b", "c1", "d_e"];

fn space<R: Rng>(rng: &mut R) -> &'static str {
    ["", " ", "  ", "\n  ", "\t"][rng.gen_range(0..5)]
}

fn int<R: Rng>(rng: &mut R) -> String {
    rng.gen_range(-3i64..=12).to_string()
}

fn arith<R: Rng>(rng: &mut R, vars: &[String], depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.5) {
        return if !vars.is_empty() && rng.gen_bool(0.6) {
            vars.choose(rng).unwrap().clone()
        } else {
            int(rng)
        };
    }
    let op = ["+", "-", "*"].choose(rng).unwrap();
    let l = arith(rng, vars, depth - 1);
    let r = arith(rng, vars, depth - 1);
    if rng.gen_bool(0.3) {
        format!("({l}{op}{r})")
    } else {
        format!("{l}{}{op}{}{r}", space(rng), space(rng))
    }
}

fn term<R: Rng>(rng: &mut R, vars: &[String]) -> String {
    match rng.gen_range(0..4) {
        0 => SYMS.choose(rng).unwrap().to_string(),
        1 => arith(rng, vars, 2),
        _ if !vars.is_empty() => vars.choose(rng).unwrap().clone(),
        _ => int(rng),
    }
}

fn atom_with(name: &str, args: Vec<String>) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        format!("{name}({})", args.join(", "))
    }
}

fn binding_atom<R: Rng>(rng: &mut R, bound: &mut Vec<String>) -> String {
    let (name, arity) = *PREDS.choose(rng).unwrap();
    let args = (0..arity)
        .map(|_| {
            if rng.gen_bool(0.7) {
                let v = VARS.choose(rng).unwrap().to_string();
                if !bound.contains(&v) {
                    bound.push(v.clone());
                }
                v
            } else {
                SYMS.choose(rng).unwrap().to_string()
            }
        })
        .collect();
    atom_with(name, args)
}

fn bound_atom<R: Rng>(rng: &mut R, vars: &[String]) -> String {
    let (name, arity) = *PREDS.choose(rng).unwrap();
    atom_with(name, (0..arity).map(|_| term(rng, vars)).collect())
}

fn comparison<R: Rng>(rng: &mut R, vars: &[String]) -> String {
    let rel = ["=", "!=", "<", "<=", ">", ">="].choose(rng).unwrap();
    format!("{}{}{rel}{}{}", term(rng, vars), space(rng), space(rng), term(rng, vars))
}

fn conditional<R: Rng>(rng: &mut R, vars: &[String]) -> String {
    // local variable W is bound by the first condition
    let mut local = vars.to_vec();
    local.push("W".to_string());
    let mut conds = vec!["node(W)".to_string()];
    for _ in 0..rng.gen_range(0..=2) {
        conds.push(match rng.gen_range(0..3) {
            0 => comparison(rng, &local),
            1 => format!("not {}", bound_atom(rng, &local)),
            _ => bound_atom(rng, &local),
        });
    }
    let head = match rng.gen_range(0..2) {
        0 => format!("not {}", bound_atom(rng, &local)),
        _ => bound_atom(rng, &local),
    };
    format!("{head} : {}", conds.join(", "))
}

fn rule<R: Rng>(rng: &mut R) -> String {
    let mut bound = Vec::new();
    let mut body = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        body.push(binding_atom(rng, &mut bound));
    }
    for _ in 0..rng.gen_range(0..=2) {
        body.push(match rng.gen_range(0..4) {
            0 => format!("not {}", bound_atom(rng, &bound)),
            1 => format!("not not {}", bound_atom(rng, &bound)),
            2 => comparison(rng, &bound),
            _ => conditional(rng, &bound),
        });
    }
    body.shuffle(rng);
    let head = match rng.gen_range(0..6) {
        0 if !body.is_empty() => String::new(),
        1 => format!("{{{}}}", bound_atom(rng, &bound)),
        _ => bound_atom(rng, &bound),
    };
    // a conditional literal's conditions run up to the next `;`
    let mut joined = String::new();
    for (i, e) in body.iter().enumerate() {
        if i > 0 {
            let after_conditional = body[i - 1].contains(" : ");
            joined.push(if after_conditional { ';' } else { ',' });
            joined.push_str(space(rng));
        }
        joined.push_str(e);
    }
    match (head.is_empty(), body.is_empty()) {
        (_, true) => format!("{head}."),
        (true, false) => format!(":-{}{joined}.", space(rng)),
        (false, false) => format!("{head}{}:-{}{joined}.", space(rng), space(rng)),
    }
}

/// A random program of up to `max_rules` rules.
pub fn random_program_text<R: Rng>(rng: &mut R, max_rules: usize) -> String {
    let mut out = String::new();
    for _ in 0..rng.gen_range(0..=max_rules) {
        if rng.gen_bool(0.1) {
            out.push_str("% a comment\n");
        }
        out.push_str(&rule(rng));
        out.push_str(["\n", " ", "\n\n"][rng.gen_range(0..3)]);
    }
    out
}
