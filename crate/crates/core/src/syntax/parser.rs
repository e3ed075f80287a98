use thiserror::Error;

use super::lexer::{tokenize, Spanned, Token};
use super::safety::{check_safety, SafetyViolation};
use super::{
    Atom, BinaryOperator, BodyElement, Comparison, ConditionalLiteral, Head, Literal, Program,
    Relation, Rule, Span, Term,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{span}: {message}{}", expected_suffix(expected))]
    Syntax {
        span: Span,
        message: String,
        expected: Vec<String>,
    },
    #[error("{span}: conditional literals may not be nested")]
    NestedConditional { span: Span },
    #[error(transparent)]
    Unsafe(#[from] SafetyViolation),
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(", "))
    }
}

impl ParseError {
    pub(crate) fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            span,
            message: message.into(),
            expected: vec![],
        }
    }

    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. } | ParseError::NestedConditional { span } => *span,
            ParseError::Unsafe(v) => v.span,
        }
    }
}

/// Parses a program and checks every rule for safety.
pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    let mut parser = Parser::new(tokenize(source)?);
    let mut rules = Vec::new();
    while !parser.at(&Token::Eof) {
        let rule = parser.parse_rule()?;
        check_safety(&rule)?;
        rules.push(rule);
    }
    Ok(Program::new(rules))
}

pub(crate) struct Parser {
    tokens: Vec<Spanned>,
    pub(crate) pos: usize,
}

impl Parser {
    pub(crate) fn new(tokens: Vec<Spanned>) -> Self {
        Self { tokens, pos: 0 }
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.tokens[self.pos].token
    }

    pub(crate) fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].token
    }

    pub(crate) fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    pub(crate) fn at(&self, token: &Token) -> bool {
        self.peek() == token
    }

    pub(crate) fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Token::Ident(w) if w == word)
    }

    pub(crate) fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos].token.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        token
    }

    pub(crate) fn eat(&mut self, token: &Token) -> bool {
        if self.at(token) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            span: self.span(),
            message: format!("unexpected {}", self.peek().describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub(crate) fn expect(&mut self, token: Token, name: &str) -> Result<(), ParseError> {
        if self.eat(&token) {
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn parse_rule(&mut self) -> Result<Rule, ParseError> {
        let span = self.span();
        let head = match self.peek() {
            Token::If => Head::None,
            Token::LBrace => {
                self.bump();
                let atom = self.parse_atom()?;
                if !self.at(&Token::RBrace) {
                    return Err(ParseError::new(
                        self.span(),
                        "choice rules must have exactly one head atom",
                    ));
                }
                self.bump();
                Head::Choice(atom)
            }
            Token::Integer(_) if matches!(self.peek_at(1), Token::LBrace) => {
                return Err(ParseError::new(
                    span,
                    "cardinality bounds on choice rules are not supported",
                ));
            }
            Token::Directive(d) => {
                return Err(ParseError::new(span, format!("directive `#{d}` is not supported")));
            }
            Token::Ident(w) if w == "not" => {
                return Err(ParseError::new(span, "negated literals may not occur in rule heads"));
            }
            Token::Ident(_) => Head::Basic(self.parse_atom()?),
            _ => return Err(self.unexpected(&["atom", "`{`", "`:-`"])),
        };

        let body = if self.eat(&Token::If) {
            self.parse_body()?
        } else {
            match self.peek() {
                Token::Dot => {
                    self.bump();
                    vec![]
                }
                Token::Semicolon | Token::Bar => {
                    return Err(ParseError::new(self.span(), "disjunctive heads are not supported"))
                }
                _ => return Err(self.unexpected(&["`.`", "`:-`"])),
            }
        };
        if matches!(head, Head::None) && body.is_empty() {
            return Err(ParseError::new(span, "constraints need a non-empty body"));
        }
        Ok(Rule { head, body, span })
    }

    fn parse_body(&mut self) -> Result<Vec<BodyElement>, ParseError> {
        let mut body = Vec::new();
        loop {
            body.push(self.parse_body_element()?);
            match self.peek() {
                Token::Comma | Token::Semicolon => {
                    self.bump();
                }
                Token::Dot => {
                    self.bump();
                    return Ok(body);
                }
                _ => return Err(self.unexpected(&["`,`", "`;`", "`.`"])),
            }
        }
    }

    fn parse_body_element(&mut self) -> Result<BodyElement, ParseError> {
        let start = self.span();
        if self.at_keyword("not") {
            self.bump();
            if self.at_keyword("not") {
                self.bump();
                let atom = self.parse_atom()?;
                if self.at(&Token::Colon) {
                    return Err(ParseError::new(
                        start,
                        "a doubly negated atom cannot head a conditional literal",
                    ));
                }
                return Ok(BodyElement::DoubleNegative(atom));
            }
            let atom = self.parse_atom()?;
            if self.at(&Token::Colon) {
                return self.parse_conditional(Literal::Negative(atom));
            }
            return Ok(BodyElement::Negative(atom));
        }
        match self.parse_atom_or_comparison()? {
            Literal::Positive(atom) => {
                if self.at(&Token::Colon) {
                    self.parse_conditional(Literal::Positive(atom))
                } else {
                    Ok(BodyElement::Positive(atom))
                }
            }
            Literal::Comparison(c) => {
                if self.at(&Token::Colon) {
                    return Err(ParseError::new(
                        start,
                        "a comparison cannot head a conditional literal",
                    ));
                }
                Ok(BodyElement::Comparison(c))
            }
            Literal::Negative(_) => unreachable!("negation handled above"),
        }
    }

    fn parse_conditional(&mut self, head: Literal) -> Result<BodyElement, ParseError> {
        self.expect(Token::Colon, "`:`")?;
        let mut conditions = Vec::new();
        loop {
            let condition = if self.at_keyword("not") {
                self.bump();
                if self.at_keyword("not") {
                    return Err(ParseError::new(
                        self.span(),
                        "double negation is not allowed in conditions",
                    ));
                }
                Literal::Negative(self.parse_atom()?)
            } else {
                self.parse_atom_or_comparison()?
            };
            if self.at(&Token::Colon) {
                return Err(ParseError::NestedConditional { span: self.span() });
            }
            conditions.push(condition);
            if !self.eat(&Token::Comma) {
                break;
            }
        }
        Ok(BodyElement::Conditional(ConditionalLiteral { head, conditions }))
    }

    /// An atom, or a comparison `t1 rel t2`.
    fn parse_atom_or_comparison(&mut self) -> Result<Literal, ParseError> {
        if let Token::Ident(name) = self.peek() {
            if name == "not" {
                return Err(self.unexpected(&["atom", "comparison"]));
            }
            let next = self.peek_at(1);
            let is_atom = matches!(next, Token::LParen)
                || !(relation_of(next).is_some()
                    || matches!(next, Token::Plus | Token::Minus | Token::Star | Token::Slash));
            if is_atom {
                let atom = self.parse_atom()?;
                if relation_of(self.peek()).is_some() {
                    return Err(ParseError::new(self.span(), "function terms are not supported"));
                }
                return Ok(Literal::Positive(atom));
            }
        }
        let lhs = self.parse_term()?;
        let relation = match relation_of(self.peek()) {
            Some(r) => r,
            None => return Err(self.unexpected(&["comparison operator"])),
        };
        self.bump();
        let rhs = self.parse_term()?;
        Ok(Literal::Comparison(Comparison { relation, lhs, rhs }))
    }

    pub(crate) fn parse_atom(&mut self) -> Result<Atom, ParseError> {
        let name = match self.peek() {
            Token::Ident(name) if name != "not" => name.clone(),
            _ => return Err(self.unexpected(&["atom"])),
        };
        self.bump();
        let mut args = Vec::new();
        if self.eat(&Token::LParen) {
            if self.at(&Token::RParen) {
                return Err(ParseError::new(
                    self.span(),
                    "empty argument lists are not allowed; write `p` for a nullary atom",
                ));
            }
            loop {
                args.push(self.parse_term()?);
                if self.eat(&Token::Comma) {
                    continue;
                }
                if self.at(&Token::Semicolon) {
                    return Err(ParseError::new(self.span(), "pools are not supported"));
                }
                self.expect(Token::RParen, "`)`")?;
                break;
            }
        }
        Ok(Atom::new(name, args))
    }

    pub(crate) fn parse_term(&mut self) -> Result<Term, ParseError> {
        let start = self.span();
        let term = self.parse_binary(1)?;
        match self.peek() {
            Token::DotDot => {
                return Err(ParseError::new(self.span(), "intervals are not supported"));
            }
            Token::Slash => {
                return Err(ParseError::new(self.span(), "division is not supported"));
            }
            _ => {}
        }
        if term.has_symbolic_arithmetic() {
            return Err(ParseError::new(
                start,
                "arithmetic is only defined on integers, not on symbolic constants",
            ));
        }
        Ok(term)
    }

    fn parse_binary(&mut self, min_precedence: u8) -> Result<Term, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinaryOperator::Add,
                Token::Minus => BinaryOperator::Subtract,
                Token::Star => BinaryOperator::Multiply,
                _ => return Ok(lhs),
            };
            if op.precedence() < min_precedence {
                return Ok(lhs);
            }
            self.bump();
            let rhs = self.parse_binary(op.precedence() + 1)?;
            lhs = Term::binary(op, lhs, rhs);
        }
    }

    fn parse_unary(&mut self) -> Result<Term, ParseError> {
        if self.eat(&Token::Minus) {
            if let Token::Integer(i) = *self.peek() {
                self.bump();
                return Ok(Term::Integer(-i));
            }
            let operand = self.parse_unary()?;
            return Ok(Term::binary(BinaryOperator::Subtract, Term::Integer(0), operand));
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<Term, ParseError> {
        let span = self.span();
        match self.bump() {
            Token::Integer(i) => Ok(Term::Integer(i)),
            Token::Variable(v) => Ok(Term::Variable(v)),
            Token::Ident(s) => {
                if self.at(&Token::LParen) {
                    return Err(ParseError::new(span, "function terms are not supported"));
                }
                if s == "not" {
                    return Err(ParseError::new(span, "`not` is a keyword"));
                }
                Ok(Term::Symbol(s))
            }
            Token::LParen => {
                let t = self.parse_binary(1)?;
                self.expect(Token::RParen, "`)`")?;
                Ok(t)
            }
            Token::Underscore => Err(ParseError::new(span, "anonymous variables are not supported")),
            _ => {
                self.pos -= 1;
                Err(self.unexpected(&["term"]))
            }
        }
    }
}

pub(crate) fn relation_of(token: &Token) -> Option<Relation> {
    Some(match token {
        Token::Equal => Relation::Equal,
        Token::NotEqual => Relation::NotEqual,
        Token::Less => Relation::Less,
        Token::LessEqual => Relation::LessEqual,
        Token::Greater => Relation::Greater,
        Token::GreaterEqual => Relation::GreaterEqual,
        _ => return None,
    })
}
