use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{InterfaceDecl, OverlappingInterface};
use crate::fol::{parse_formula_until_dot, Formula};
use crate::syntax::lexer::{tokenize, Token};
use crate::syntax::parser::Parser;
use crate::syntax::{ParseError, Predicate, Span};

/// Interface, assumptions and specification formulas read from a `.spec`
/// file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SpecFile {
    pub interface: InterfaceDecl,
    pub assumes: Vec<Formula>,
    pub specs: Vec<Formula>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{span}: unknown directive `{name}` (expected input, output, assume or spec)")]
    UnknownDirective { span: Span, name: String },
    #[error("{span}: the `lemma` directive is reserved and not supported yet")]
    Lemma { span: Span },
    #[error("{span}: {directive} formula has free variable(s) {}", .variables.join(", "))]
    FreeVariables {
        span: Span,
        directive: &'static str,
        variables: Vec<String>,
    },
    #[error(transparent)]
    Interface(#[from] OverlappingInterface),
}

impl SpecFile {
    /// Predicates used by assumptions or specs that the interface does not
    /// declare.
    pub fn auxiliary_predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        for f in self.assumes.iter().chain(&self.specs) {
            f.collect_predicates(&mut out);
        }
        out.retain(|p| !self.interface.is_public(p));
        out
    }
}

/// Parses directives
///
/// ```text
/// input: p/1, e/2.
/// output: q/1.
/// assume: forall X (p(X) -> X >= 0).
/// spec: forall X (q(X) <-> p(X) and X > 1).
/// ```
pub fn parse_spec(source: &str) -> Result<SpecFile, SpecError> {
    let mut parser = Parser::new(tokenize(source)?);
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut assumes = Vec::new();
    let mut specs = Vec::new();
    while !parser.at(&Token::Eof) {
        let span = parser.span();
        let name = match parser.peek() {
            Token::Ident(name) => name.clone(),
            _ => return Err(parser.unexpected(&["directive"]).into()),
        };
        parser.bump();
        parser.expect(Token::Colon, "`:`")?;
        match name.as_str() {
            "input" => inputs.extend(predicate_list(&mut parser)?),
            "output" => outputs.extend(predicate_list(&mut parser)?),
            "assume" => assumes.push(closed_formula(&mut parser, "assume", span)?),
            "spec" => specs.push(closed_formula(&mut parser, "spec", span)?),
            "lemma" => return Err(SpecError::Lemma { span }),
            _ => return Err(SpecError::UnknownDirective { span, name }),
        }
    }
    Ok(SpecFile {
        interface: InterfaceDecl::new(inputs, outputs)?,
        assumes,
        specs,
    })
}

fn predicate_list(parser: &mut Parser) -> Result<Vec<Predicate>, ParseError> {
    let mut out = Vec::new();
    if parser.eat(&Token::Dot) {
        return Ok(out);
    }
    loop {
        let name = match parser.peek() {
            Token::Ident(name) => name.clone(),
            _ => return Err(parser.unexpected(&["predicate name"])),
        };
        parser.bump();
        parser.expect(Token::Slash, "`/`")?;
        let arity = match parser.peek() {
            Token::Integer(n) if *n >= 0 => *n as usize,
            _ => return Err(parser.unexpected(&["arity"])),
        };
        parser.bump();
        out.push(Predicate::new(name, arity));
        if parser.eat(&Token::Dot) {
            return Ok(out);
        }
        parser.expect(Token::Comma, "`,` or `.`")?;
    }
}

fn closed_formula(parser: &mut Parser, directive: &'static str, span: Span) -> Result<Formula, SpecError> {
    let formula = parse_formula_until_dot(parser)?;
    let variables = formula.free_variables();
    if !variables.is_empty() {
        return Err(SpecError::FreeVariables {
            span,
            directive,
            variables,
        });
    }
    Ok(formula)
}
