use std::fmt::{self, Write};

use super::{Atom, BodyElement, Head, Literal, Program, Rule, Term};

/// Renders a program with one rule per line. The output parses back to a
/// structurally equal program.
pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for rule in &program.rules {
        writeln!(out, "{rule}").expect("writing to a String cannot fail");
    }
    out
}

pub(crate) fn write_term(f: &mut impl Write, term: &Term) -> fmt::Result {
    match term {
        Term::Integer(i) => write!(f, "{i}"),
        Term::Symbol(s) | Term::Variable(s) => f.write_str(s),
        Term::BinaryOperation { op, lhs, rhs } => {
            let lhs_parens = matches!(&**lhs, Term::BinaryOperation { op: inner, .. }
                if inner.precedence() < op.precedence());
            // operators are left-associative, so an equal-precedence right
            // operand needs parentheses too
            let rhs_parens = matches!(&**rhs, Term::BinaryOperation { op: inner, .. }
                if inner.precedence() <= op.precedence());
            write_operand(f, lhs, lhs_parens)?;
            write!(f, " {} ", op.symbol())?;
            write_operand(f, rhs, rhs_parens)
        }
    }
}

fn write_operand(f: &mut impl Write, term: &Term, parens: bool) -> fmt::Result {
    if parens {
        f.write_char('(')?;
        write_term(f, term)?;
        f.write_char(')')
    } else {
        write_term(f, term)
    }
}

pub(crate) fn write_atom(f: &mut impl Write, atom: &Atom) -> fmt::Result {
    f.write_str(&atom.predicate)?;
    if !atom.args.is_empty() {
        f.write_char('(')?;
        for (i, arg) in atom.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write_term(f, arg)?;
        }
        f.write_char(')')?;
    }
    Ok(())
}

fn write_literal(f: &mut impl Write, literal: &Literal) -> fmt::Result {
    match literal {
        Literal::Positive(a) => write_atom(f, a),
        Literal::Negative(a) => {
            f.write_str("not ")?;
            write_atom(f, a)
        }
        Literal::Comparison(c) => {
            write_term(f, &c.lhs)?;
            write!(f, " {} ", c.relation.ascii())?;
            write_term(f, &c.rhs)
        }
    }
}

fn write_body_element(f: &mut impl Write, element: &BodyElement) -> fmt::Result {
    match element {
        BodyElement::Positive(a) => write_atom(f, a),
        BodyElement::Negative(a) => {
            f.write_str("not ")?;
            write_atom(f, a)
        }
        BodyElement::DoubleNegative(a) => {
            f.write_str("not not ")?;
            write_atom(f, a)
        }
        BodyElement::Comparison(c) => write_literal(f, &Literal::Comparison(c.clone())),
        BodyElement::Conditional(cl) => {
            write_literal(f, &cl.head)?;
            f.write_str(" : ")?;
            for (i, c) in cl.conditions.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_literal(f, c)?;
            }
            Ok(())
        }
    }
}

pub(crate) fn write_rule(f: &mut impl Write, rule: &Rule) -> fmt::Result {
    match &rule.head {
        Head::Basic(a) => write_atom(f, a)?,
        Head::Choice(a) => {
            f.write_char('{')?;
            write_atom(f, a)?;
            f.write_char('}')?;
        }
        Head::None => {}
    }
    if !rule.body.is_empty() {
        if matches!(rule.head, Head::None) {
            f.write_str(":- ")?;
        } else {
            f.write_str(" :- ")?;
        }
        for (i, element) in rule.body.iter().enumerate() {
            if i > 0 {
                // a conditional literal swallows following commas
                let sep = match rule.body[i - 1] {
                    BodyElement::Conditional(_) => "; ",
                    _ => ", ",
                };
                f.write_str(sep)?;
            }
            write_body_element(f, element)?;
        }
    }
    f.write_char('.')
}
