use crate::syntax::{Relation, Term};

use super::{Formula, Sort, Variable};

/// Equivalence-preserving cleanup: ⊤/⊥ absorption, double-negation
/// elimination, flattening of nested ∧/∨, removal of vacuous quantifiers
/// and elimination of `X = Y` under an existential binding `X`.
///
/// Equivalence is with respect to the usual non-empty domains.
pub fn simplify(formula: &Formula) -> Formula {
    match formula {
        Formula::Atom(_) | Formula::Compare(_) | Formula::Top | Formula::Bottom => formula.clone(),
        Formula::Not(g) => negation(simplify(g)),
        Formula::And(gs) => {
            let mut parts = Vec::new();
            for g in gs {
                match simplify(g) {
                    Formula::Top => {}
                    Formula::Bottom => return Formula::Bottom,
                    Formula::And(inner) => parts.extend(inner),
                    other => parts.push(other),
                }
            }
            Formula::conjoin(parts)
        }
        Formula::Or(gs) => {
            let mut parts = Vec::new();
            for g in gs {
                match simplify(g) {
                    Formula::Bottom => {}
                    Formula::Top => return Formula::Top,
                    Formula::Or(inner) => parts.extend(inner),
                    other => parts.push(other),
                }
            }
            Formula::disjoin(parts)
        }
        Formula::Implies(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Top, b) => b,
            (Formula::Bottom, _) | (_, Formula::Top) => Formula::Top,
            (a, Formula::Bottom) => negation(a),
            (a, b) => Formula::implies(a, b),
        },
        Formula::Iff(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Top, other) | (other, Formula::Top) => other,
            (Formula::Bottom, other) | (other, Formula::Bottom) => negation(other),
            (a, b) => Formula::iff(a, b),
        },
        Formula::Forall(vs, g) => {
            let body = simplify(g);
            if body == Formula::Top {
                return Formula::Top;
            }
            Formula::forall(non_vacuous(vs, &body), body)
        }
        Formula::Exists(vs, g) => {
            let body = simplify(g);
            if body == Formula::Bottom {
                return Formula::Bottom;
            }
            let (vs, body) = eliminate_equalities(vs.clone(), body);
            if body == Formula::Top && vs.is_empty() {
                return Formula::Top;
            }
            Formula::exists(non_vacuous(&vs, &body), body)
        }
    }
}

fn negation(f: Formula) -> Formula {
    match f {
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Not(inner) => *inner,
        other => Formula::negate(other),
    }
}

fn non_vacuous(vs: &[Variable], body: &Formula) -> Vec<Variable> {
    let free = body.free_variables();
    vs.iter().filter(|v| free.contains(&v.name)).cloned().collect()
}

/// `∃X (X = Y ∧ F)` becomes `∃ (F[Y/X])` when `X` is unsorted and `Y` is a
/// variable; any other equality is left alone because bounded integer
/// domains make the general one-point rule unsound.
fn eliminate_equalities(mut vs: Vec<Variable>, mut body: Formula) -> (Vec<Variable>, Formula) {
    loop {
        let parts = match &body {
            Formula::And(parts) => parts.clone(),
            other => vec![other.clone()],
        };
        let mut rewritten = None;
        'search: for (i, part) in parts.iter().enumerate() {
            let Formula::Compare(c) = part else { continue };
            if c.relation != Relation::Equal {
                continue;
            }
            for (x, y) in [(&c.lhs, &c.rhs), (&c.rhs, &c.lhs)] {
                let (Term::Variable(x), Term::Variable(y)) = (x, y) else { continue };
                if x == y {
                    continue;
                }
                let Some(pos) = vs.iter().position(|v| &v.name == x && v.sort == Sort::General)
                else {
                    continue;
                };
                let by = Term::Variable(y.clone());
                let rest: Option<Vec<Formula>> = parts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, p)| p.substitute(x, &by))
                    .collect();
                if let Some(rest) = rest {
                    rewritten = Some((pos, rest));
                    break 'search;
                }
            }
        }
        match rewritten {
            Some((pos, rest)) => {
                vs.remove(pos);
                body = simplify(&Formula::conjoin(rest));
            }
            None => return (vs, body),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    fn s(src: &str) -> String {
        simplify(&parse_formula(src).unwrap())
            .display(super::super::Style::Ascii)
            .to_string()
    }

    #[test]
    fn absorption() {
        assert_eq!(s("X = a and #true"), "X = a");
        assert_eq!(s("p or #true"), "#true");
        assert_eq!(s("p and #false"), "#false");
        assert_eq!(s("p or #false or q"), "p or q");
        assert_eq!(s("#true -> p"), "p");
        assert_eq!(s("p -> #false"), "not p");
        assert_eq!(s("p <-> #false"), "not p");
        assert_eq!(s("#true <-> p"), "p");
    }

    #[test]
    fn double_negation_and_flattening() {
        assert_eq!(s("not not p"), "p");
        assert_eq!(s("(a and (b and c)) and d"), "a and b and c and d");
        assert_eq!(s("a or (b or c)"), "a or b or c");
    }

    #[test]
    fn vacuous_quantifiers() {
        assert_eq!(s("forall Y p"), "p");
        assert_eq!(s("exists X Y p(X)"), "exists X (p(X))");
        assert_eq!(s("forall X #true"), "#true");
        assert_eq!(s("exists X #false"), "#false");
    }

    #[test]
    fn one_point_rule_on_variables() {
        assert_eq!(s("forall V (q(V) <-> exists X (V = X and p(X)))"), "forall V (q(V) <-> p(V))");
        assert_eq!(s("exists X (X = Y)"), "#true");
        // integer-valued right-hand sides are left alone
        assert_eq!(s("exists X (X = Y + 1 and p(X))"), "exists X (X = Y + 1 and p(X))");
        // sorted binders are left alone
        assert_eq!(s("exists X$i (X = Y and p(X))"), "exists X$i (X = Y and p(X))");
    }

    #[test]
    fn capture_blocks_one_point_rule() {
        assert_eq!(
            s("exists X (X = Y and forall Y p(X, Y))"),
            "exists X (X = Y and (forall Y (p(X, Y))))"
        );
    }
}
