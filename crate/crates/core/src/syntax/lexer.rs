use super::{ParseError, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Token {
    Ident(String),
    Variable(String),
    Integer(i64),
    /// `#word`
    Directive(String),
    /// `$word`, a sort annotation on a formula variable
    Sort(String),
    Underscore,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Dot,
    DotDot,
    If,
    Colon,
    Equal,
    NotEqual,
    Less,
    LessEqual,
    Greater,
    GreaterEqual,
    Plus,
    Minus,
    Star,
    Slash,
    Bar,
    Arrow,
    LeftArrow,
    DoubleArrow,
    Eof,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Variable(s) => format!("variable `{s}`"),
            Token::Integer(i) => format!("integer `{i}`"),
            Token::Directive(s) => format!("`#{s}`"),
            Token::Sort(s) => format!("`${s}`"),
            Token::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Token::Underscore => "_",
            Token::LParen => "(",
            Token::RParen => ")",
            Token::LBrace => "{",
            Token::RBrace => "}",
            Token::Comma => ",",
            Token::Semicolon => ";",
            Token::Dot => ".",
            Token::DotDot => "..",
            Token::If => ":-",
            Token::Colon => ":",
            Token::Equal => "=",
            Token::NotEqual => "!=",
            Token::Less => "<",
            Token::LessEqual => "<=",
            Token::Greater => ">",
            Token::GreaterEqual => ">=",
            Token::Plus => "+",
            Token::Minus => "-",
            Token::Star => "*",
            Token::Slash => "/",
            Token::Bar => "|",
            Token::Arrow => "->",
            Token::LeftArrow => "<-",
            Token::DoubleArrow => "<->",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub token: Token,
    pub span: Span,
}

/// Splits `source` into tokens. `%` starts a comment running to the end of
/// the line.
pub(crate) fn tokenize(source: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut column = 1;

    macro_rules! advance {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    column = 1;
                } else {
                    column += 1;
                }
                i += 1;
            }
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column };
        let next = chars.get(i + 1).copied();
        let next2 = chars.get(i + 2).copied();

        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
            continue;
        }

        let word = |start: usize| -> String {
            chars[start..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                .collect()
        };

        let (token, len) = if c.is_ascii_lowercase() {
            let w = word(i);
            let n = w.chars().count();
            (Token::Ident(w), n)
        } else if c.is_ascii_uppercase() {
            let w = word(i);
            let n = w.chars().count();
            (Token::Variable(w), n)
        } else if c == '_' {
            let w = word(i);
            if w.len() > 1 {
                return Err(ParseError::new(
                    span,
                    format!("`{w}`: variable names must start with an uppercase letter"),
                ));
            }
            (Token::Underscore, 1)
        } else if c.is_ascii_digit() {
            let digits: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
            let value: i64 = digits.parse().map_err(|_| {
                ParseError::new(span, format!("integer literal `{digits}` is out of range"))
            })?;
            (Token::Integer(value), digits.len())
        } else if c == '#' || c == '$' {
            let w = word(i + 1);
            if w.is_empty() {
                return Err(ParseError::new(span, format!("expected a word after `{c}`")));
            }
            let n = w.len() + 1;
            let token = if c == '#' {
                Token::Directive(w)
            } else {
                Token::Sort(w)
            };
            (token, n)
        } else {
            match (c, next, next2) {
                ('<', Some('-'), Some('>')) => (Token::DoubleArrow, 3),
                ('<', Some('-'), _) => (Token::LeftArrow, 2),
                ('<', Some('='), _) => (Token::LessEqual, 2),
                ('<', Some('>'), _) => (Token::NotEqual, 2),
                ('<', _, _) => (Token::Less, 1),
                ('>', Some('='), _) => (Token::GreaterEqual, 2),
                ('>', _, _) => (Token::Greater, 1),
                ('!', Some('='), _) => (Token::NotEqual, 2),
                ('-', Some('>'), _) => (Token::Arrow, 2),
                ('-', _, _) => (Token::Minus, 1),
                ('=', _, _) => (Token::Equal, 1),
                (':', Some('-'), _) => (Token::If, 2),
                (':', _, _) => (Token::Colon, 1),
                ('.', Some('.'), _) => (Token::DotDot, 2),
                ('.', _, _) => (Token::Dot, 1),
                ('(', _, _) => (Token::LParen, 1),
                (')', _, _) => (Token::RParen, 1),
                ('{', _, _) => (Token::LBrace, 1),
                ('}', _, _) => (Token::RBrace, 1),
                (',', _, _) => (Token::Comma, 1),
                (';', _, _) => (Token::Semicolon, 1),
                ('+', _, _) => (Token::Plus, 1),
                ('*', _, _) => (Token::Star, 1),
                ('/', _, _) => (Token::Slash, 1),
                ('|', _, _) => (Token::Bar, 1),
                _ => {
                    return Err(ParseError::new(span, format!("unexpected character `{c}`")));
                }
            }
        };
        tokens.push(Spanned { token, span });
        advance!(len);
    }

    tokens.push(Spanned {
        token: Token::Eof,
        span: Span { line, column },
    });
    Ok(tokens)
}
