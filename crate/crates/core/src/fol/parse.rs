//! Parser for the ASCII formula syntax of specification files and module
//! manifests.
//!
//! Precedence from loosest to tightest: `<->`, `->`/`<-`, `or`, `and`,
//! `not`. Quantifiers extend as far to the right as possible.

use crate::syntax::lexer::{tokenize, Token};
use crate::syntax::parser::{relation_of, Parser};
use crate::syntax::{Comparison, ParseError};

use super::{Formula, Sort, Variable};

const KEYWORDS: &[&str] = &["not", "and", "or", "forall", "exists"];

pub fn parse_formula(source: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser::new(tokenize(source)?);
    let formula = parse_iff(&mut parser)?;
    if !parser.at(&Token::Eof) {
        return Err(parser.unexpected(&["end of formula"]));
    }
    Ok(formula)
}

/// Parses a formula terminated by `.`, consuming the dot.
pub(crate) fn parse_formula_until_dot(parser: &mut Parser) -> Result<Formula, ParseError> {
    let formula = parse_iff(parser)?;
    parser.expect(Token::Dot, "`.`")?;
    Ok(formula)
}

fn parse_iff(p: &mut Parser) -> Result<Formula, ParseError> {
    let mut lhs = parse_implication(p)?;
    while p.eat(&Token::DoubleArrow) {
        let rhs = parse_implication(p)?;
        lhs = Formula::iff(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_implication(p: &mut Parser) -> Result<Formula, ParseError> {
    let lhs = parse_or(p)?;
    if p.eat(&Token::Arrow) {
        let rhs = parse_implication(p)?;
        return Ok(Formula::implies(lhs, rhs));
    }
    let mut lhs = lhs;
    while p.eat(&Token::LeftArrow) {
        let rhs = parse_or(p)?;
        lhs = Formula::implies(rhs, lhs);
    }
    Ok(lhs)
}

fn parse_or(p: &mut Parser) -> Result<Formula, ParseError> {
    let mut parts = vec![parse_and(p)?];
    while p.at_keyword("or") {
        p.bump();
        parts.push(parse_and(p)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Formula::Or(parts)
    })
}

fn parse_and(p: &mut Parser) -> Result<Formula, ParseError> {
    let mut parts = vec![parse_unary(p)?];
    while p.at_keyword("and") {
        p.bump();
        parts.push(parse_unary(p)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Formula::And(parts)
    })
}

fn parse_unary(p: &mut Parser) -> Result<Formula, ParseError> {
    if p.at_keyword("not") {
        p.bump();
        return Ok(Formula::negate(parse_unary(p)?));
    }
    for (keyword, universal) in [("forall", true), ("exists", false)] {
        if p.at_keyword(keyword) {
            p.bump();
            let vars = parse_binders(p)?;
            let body = Box::new(parse_iff(p)?);
            return Ok(if universal {
                Formula::Forall(vars, body)
            } else {
                Formula::Exists(vars, body)
            });
        }
    }
    parse_primary(p)
}

fn parse_binders(p: &mut Parser) -> Result<Vec<Variable>, ParseError> {
    let mut vars = Vec::new();
    while let Token::Variable(name) = p.peek().clone() {
        p.bump();
        let sort = match p.peek().clone() {
            Token::Sort(s) => {
                let span = p.span();
                p.bump();
                match s.as_str() {
                    "i" => Sort::Integer,
                    "s" => Sort::Object,
                    "g" => Sort::General,
                    _ => {
                        return Err(ParseError::new(
                            span,
                            format!("unknown sort `${s}` (expected $i, $s or $g)"),
                        ))
                    }
                }
            }
            _ => Sort::General,
        };
        vars.push(Variable::sorted(name, sort));
    }
    if vars.is_empty() {
        return Err(p.unexpected(&["variable"]));
    }
    Ok(vars)
}

fn parse_primary(p: &mut Parser) -> Result<Formula, ParseError> {
    match p.peek().clone() {
        Token::Directive(d) if d == "true" => {
            p.bump();
            Ok(Formula::Top)
        }
        Token::Directive(d) if d == "false" => {
            p.bump();
            Ok(Formula::Bottom)
        }
        Token::LParen => {
            // either a parenthesised formula or the left operand of a comparison
            let saved = p.pos;
            p.bump();
            let first_error = match parse_iff(p) {
                Ok(inner) => {
                    if p.eat(&Token::RParen)
                        && relation_of(p.peek()).is_none()
                        && !matches!(p.peek(), Token::Plus | Token::Minus | Token::Star)
                    {
                        return Ok(inner);
                    }
                    None
                }
                Err(e) => Some(e),
            };
            p.pos = saved;
            parse_comparison(p).map_err(|e| first_error.unwrap_or(e))
        }
        Token::Ident(name) if KEYWORDS.contains(&name.as_str()) => {
            Err(p.unexpected(&["formula"]))
        }
        Token::Ident(_) => {
            let next = p.peek_at(1);
            let is_atom = matches!(next, Token::LParen)
                || !(relation_of(next).is_some()
                    || matches!(next, Token::Plus | Token::Minus | Token::Star));
            if is_atom {
                let atom = p.parse_atom()?;
                if relation_of(p.peek()).is_some() {
                    return Err(ParseError::new(p.span(), "function terms are not supported"));
                }
                Ok(Formula::Atom(atom))
            } else {
                parse_comparison(p)
            }
        }
        _ => parse_comparison(p),
    }
}

fn parse_comparison(p: &mut Parser) -> Result<Formula, ParseError> {
    let lhs = p.parse_term()?;
    let relation = match relation_of(p.peek()) {
        Some(r) => r,
        None => return Err(p.unexpected(&["comparison operator"])),
    };
    p.bump();
    let rhs = p.parse_term()?;
    Ok(Formula::Compare(Comparison { relation, lhs, rhs }))
}

#[cfg(test)]
mod tests {
    use super::super::Style;
    use super::*;
    use crate::syntax::{Atom, Relation, Term};

    fn atom(name: &str, vars: &[&str]) -> Formula {
        Formula::Atom(Atom::new(name, vars.iter().map(|v| Term::variable(*v)).collect()))
    }

    #[test]
    fn precedence() {
        let f = parse_formula("a or b and c -> d <-> e").unwrap();
        assert_eq!(
            f,
            Formula::iff(
                Formula::implies(
                    Formula::Or(vec![atom("a", &[]), Formula::And(vec![atom("b", &[]), atom("c", &[])])]),
                    atom("d", &[])
                ),
                atom("e", &[])
            )
        );
    }

    #[test]
    fn quantifier_scope_is_maximal() {
        let f = parse_formula("forall X q(X) -> r(X)").unwrap();
        assert!(matches!(f, Formula::Forall(_, ref body) if matches!(**body, Formula::Implies(..))));
    }

    #[test]
    fn sorted_binders() {
        let f = parse_formula("exists N$i M$s (p(N, M))").unwrap();
        let Formula::Exists(vs, _) = f else { panic!() };
        assert_eq!(vs[0].sort, Sort::Integer);
        assert_eq!(vs[1].sort, Sort::Object);
    }

    #[test]
    fn parenthesised_comparisons() {
        let f = parse_formula("(X + 1) * 2 >= Y").unwrap();
        assert!(matches!(f, Formula::Compare(Comparison { relation: Relation::GreaterEqual, .. })));
        let g = parse_formula("(p(X)) and (X > 1)").unwrap();
        assert!(matches!(g, Formula::And(ref v) if v.len() == 2));
    }

    #[test]
    fn reverse_implication() {
        assert_eq!(
            parse_formula("a <- b").unwrap(),
            Formula::implies(atom("b", &[]), atom("a", &[]))
        );
    }

    #[test]
    fn constants_and_truth_values() {
        assert_eq!(parse_formula("#true").unwrap(), Formula::Top);
        assert_eq!(parse_formula("not #false").unwrap(), Formula::negate(Formula::Bottom));
        assert!(parse_formula("X = a").is_ok());
        assert!(parse_formula("and").is_err());
        assert!(parse_formula("p(X) q").is_err());
    }

    #[test]
    fn ascii_round_trip_examples() {
        for src in [
            "forall X (q(X) <-> (p(X) and X > 1))",
            "forall X Y$i (p(X, Y) -> (q(X) -> r(Y)))",
            "((a -> b) -> c)",
            "not (a and b) or not not c",
            "(exists X (p(X))) and q",
            "#true <-> (#false or X != Y + 1 * 2)",
        ] {
            let f = parse_formula(src).unwrap();
            let printed = f.display(Style::Ascii).to_string();
            assert_eq!(parse_formula(&printed).unwrap(), f, "{src} => {printed}");
        }
    }
}
