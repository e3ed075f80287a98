//! Stand-alone checker for the TPTP fragment the emitter targets: `tff`
//! and `fof` annotated formulas, type declarations, quantifiers with
//! optionally typed variables, the binary connectives and `$int`
//! arithmetic. Beyond syntax it checks that every variable is bound and
//! that typed symbols are declared before use with a consistent arity.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Lower(String),
    Upper(String),
    Dollar(String),
    Int(String),
    Punct(&'static str),
}

const PUNCT: [&str; 22] = [
    "<=>", "<~>", "=>", "<=", "~|", "~&", "!=", "(", ")", "[", "]", ",", ".", ":", "!", "?", "~", "&", "|", "=",
    ">", "*",
];

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    'outer: while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '%' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let end = src[i + 2..].find("*/").ok_or("unterminated comment")?;
            i += end + 4;
            continue;
        }
        let word = |start: usize| {
            let mut j = start;
            while j < b.len() && (b[j].is_ascii_alphanumeric() || b[j] == b'_') {
                j += 1;
            }
            j
        };
        if c.is_ascii_lowercase() {
            let j = word(i);
            out.push(Tok::Lower(src[i..j].to_string()));
            i = j;
            continue;
        }
        if c.is_ascii_uppercase() {
            let j = word(i);
            out.push(Tok::Upper(src[i..j].to_string()));
            i = j;
            continue;
        }
        if c == '$' {
            let j = word(i + 1);
            if j == i + 1 {
                return Err(format!("bare `$` at byte {i}"));
            }
            out.push(Tok::Dollar(src[i..j].to_string()));
            i = j;
            continue;
        }
        let signed = (c == '-' || c == '+') && i + 1 < b.len() && b[i + 1].is_ascii_digit();
        if c.is_ascii_digit() || signed {
            let mut j = i + 1;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            let digits = src[i..j].trim_start_matches(['-', '+']);
            if digits.len() > 1 && digits.starts_with('0') {
                return Err(format!("integer with leading zero `{}`", &src[i..j]));
            }
            out.push(Tok::Int(src[i..j].to_string()));
            i = j;
            continue;
        }
        for p in PUNCT {
            if src[i..].starts_with(p) {
                out.push(Tok::Punct(p));
                i += p.len();
                continue 'outer;
            }
        }
        return Err(format!("unexpected character `{c}` at byte {i}"));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Ty {
    Int,
    Object,
    Bool,
    TType,
}

struct Checker {
    toks: Vec<Tok>,
    pos: usize,
    typed: bool,
    /// Declared symbols: argument count and whether they are predicates.
    decls: BTreeMap<String, (usize, bool)>,
    /// Symbols seen in untyped formulas, to check arities agree.
    seen: BTreeMap<String, (usize, bool)>,
    bound: Vec<String>,
    names: BTreeSet<String>,
}

impl Checker {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Tok, String> {
        let t = self.toks.get(self.pos).cloned().ok_or("unexpected end of input")?;
        self.pos += 1;
        Ok(t)
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), String> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(format!("expected `{p}`, found {:?} at token {}", self.peek(), self.pos))
        }
    }

    fn annotated(&mut self) -> Result<(), String> {
        let lang = match self.next()? {
            Tok::Lower(w) if w == "tff" || w == "fof" => w,
            t => return Err(format!("expected tff or fof, found {t:?}")),
        };
        self.typed = lang == "tff";
        self.expect("(")?;
        let name = match self.next()? {
            Tok::Lower(w) | Tok::Int(w) => w,
            t => return Err(format!("bad formula name {t:?}")),
        };
        if !self.names.insert(name.clone()) {
            return Err(format!("duplicate formula name {name}"));
        }
        self.expect(",")?;
        let role = match self.next()? {
            Tok::Lower(w) => w,
            t => return Err(format!("bad role {t:?}")),
        };
        self.expect(",")?;
        match role.as_str() {
            "type" if self.typed => self.type_decl()?,
            "axiom" | "conjecture" | "hypothesis" | "negated_conjecture" => {
                self.bound.clear();
                self.formula()?;
            }
            r => return Err(format!("unsupported role {r} in {lang}")),
        }
        self.expect(")")?;
        self.expect(".")
    }

    fn type_decl(&mut self) -> Result<(), String> {
        if self.eat("(") {
            self.type_decl()?;
            return self.expect(")");
        }
        let name = match self.next()? {
            Tok::Lower(w) => w,
            t => return Err(format!("bad declared symbol {t:?}")),
        };
        self.expect(":")?;
        let (args, result) = self.signature()?;
        if result == Ty::TType {
            if !args.is_empty() {
                return Err("type constructors with arguments are not expected".into());
            }
            return Ok(());
        }
        if self.decls.insert(name.clone(), (args.len(), result == Ty::Bool)).is_some() {
            return Err(format!("symbol {name} declared twice"));
        }
        Ok(())
    }

    fn atomic_type(&mut self) -> Result<Ty, String> {
        match self.next()? {
            Tok::Dollar(w) if w == "$int" => Ok(Ty::Int),
            Tok::Dollar(w) if w == "$o" => Ok(Ty::Bool),
            Tok::Dollar(w) if w == "$tType" => Ok(Ty::TType),
            Tok::Dollar(w) if w == "$i" => Ok(Ty::Object),
            Tok::Lower(w) if w == "object" => Ok(Ty::Object),
            t => Err(format!("unknown type {t:?}")),
        }
    }

    fn signature(&mut self) -> Result<(Vec<Ty>, Ty), String> {
        let mut args = Vec::new();
        if self.eat("(") {
            args.push(self.atomic_type()?);
            while self.eat("*") {
                args.push(self.atomic_type()?);
            }
            self.expect(")")?;
            self.expect(">")?;
            if args.len() < 2 {
                return Err("parenthesized argument list needs at least two types".into());
            }
            return Ok((args, self.atomic_type()?));
        }
        let first = self.atomic_type()?;
        if self.eat(">") {
            args.push(first);
            return Ok((args, self.atomic_type()?));
        }
        Ok((args, first))
    }

    fn formula(&mut self) -> Result<(), String> {
        self.unitary()?;
        if let Some(Tok::Punct(op)) = self.peek().cloned() {
            match op {
                "<=>" | "=>" | "<=" | "<~>" | "~|" | "~&" => {
                    self.pos += 1;
                    self.unitary()?;
                    if matches!(self.peek(), Some(Tok::Punct("<=>" | "=>" | "<=" | "<~>" | "~|" | "~&" | "&" | "|"))) {
                        return Err(format!("non-associative `{op}` needs parentheses"));
                    }
                }
                "&" | "|" => {
                    while self.eat(op) {
                        self.unitary()?;
                    }
                    if matches!(self.peek(), Some(Tok::Punct("<=>" | "=>" | "<=" | "<~>" | "~|" | "~&" | "&" | "|"))) {
                        return Err(format!("mixed connectives after `{op}` need parentheses"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn unitary(&mut self) -> Result<(), String> {
        if self.eat("(") {
            self.formula()?;
            return self.expect(")");
        }
        if self.eat("~") {
            return self.unitary();
        }
        if self.is("!") || self.is("?") {
            self.pos += 1;
            self.expect("[")?;
            let before = self.bound.len();
            loop {
                match self.next()? {
                    Tok::Upper(v) => self.bound.push(v),
                    t => return Err(format!("expected variable, found {t:?}")),
                }
                if self.eat(":") {
                    if !self.typed {
                        return Err("typed variable in fof".into());
                    }
                    let t = self.atomic_type()?;
                    if t != Ty::Int && t != Ty::Object {
                        return Err("variables must range over $int or object".into());
                    }
                } else if self.typed {
                    return Err("untyped variable in tff (defaults to $i, which is never declared)".into());
                }
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("]")?;
            self.expect(":")?;
            self.unitary()?;
            self.bound.truncate(before);
            return Ok(());
        }
        self.atomic()
    }

    fn atomic(&mut self) -> Result<(), String> {
        match self.peek().cloned() {
            Some(Tok::Dollar(w)) if w == "$true" || w == "$false" => {
                self.pos += 1;
                Ok(())
            }
            Some(Tok::Dollar(w)) if matches!(w.as_str(), "$less" | "$lesseq" | "$greater" | "$greatereq") => {
                if !self.typed {
                    return Err(format!("{w} in fof"));
                }
                self.pos += 1;
                self.expect("(")?;
                self.term()?;
                self.expect(",")?;
                self.term()?;
                self.expect(")")
            }
            Some(Tok::Lower(_)) if !self.followed_by_equality() => {
                let Tok::Lower(name) = self.next()? else { unreachable!() };
                let n = self.arguments()?;
                self.use_symbol(&name, n, true)
            }
            _ => {
                self.term()?;
                if !(self.eat("=") || self.eat("!=")) {
                    return Err(format!("expected an atom or equation at token {}", self.pos));
                }
                self.term()
            }
        }
    }

    /// A lower word starts an equation when the term it heads is followed
    /// by `=` or `!=`.
    fn followed_by_equality(&self) -> bool {
        let mut i = self.pos + 1;
        if matches!(self.toks.get(i), Some(Tok::Punct("("))) {
            let mut depth = 0;
            while let Some(t) = self.toks.get(i) {
                match t {
                    Tok::Punct("(") => depth += 1,
                    Tok::Punct(")") => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                i += 1;
            }
            i += 1;
        }
        matches!(self.toks.get(i), Some(Tok::Punct("=" | "!=")))
    }

    fn arguments(&mut self) -> Result<usize, String> {
        if !self.eat("(") {
            return Ok(0);
        }
        let mut n = 0;
        loop {
            self.term()?;
            n += 1;
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(n)
    }

    fn use_symbol(&mut self, name: &str, arity: usize, predicate: bool) -> Result<(), String> {
        if self.typed {
            match self.decls.get(name) {
                Some(&(a, p)) if a == arity && p == predicate => Ok(()),
                Some(_) => Err(format!("{name} used with arity {arity} against its declaration")),
                None => Err(format!("undeclared symbol {name}")),
            }
        } else {
            match self.seen.insert(name.to_string(), (arity, predicate)) {
                Some(prev) if prev != (arity, predicate) => Err(format!("{name} used inconsistently")),
                _ => Ok(()),
            }
        }
    }

    fn term(&mut self) -> Result<(), String> {
        match self.next()? {
            Tok::Upper(v) => {
                if !self.bound.contains(&v) {
                    return Err(format!("free variable {v}"));
                }
                Ok(())
            }
            Tok::Int(_) if self.typed => Ok(()),
            Tok::Int(i) => Err(format!("integer {i} in fof")),
            Tok::Dollar(w) if matches!(w.as_str(), "$sum" | "$difference" | "$product") => {
                if !self.typed {
                    return Err(format!("{w} in fof"));
                }
                self.expect("(")?;
                self.term()?;
                self.expect(",")?;
                self.term()?;
                self.expect(")")
            }
            Tok::Dollar(w) if w == "$uminus" => {
                self.expect("(")?;
                self.term()?;
                self.expect(")")
            }
            Tok::Lower(f) => {
                let n = self.arguments()?;
                self.use_symbol(&f, n, false)
            }
            t => Err(format!("expected a term, found {t:?}")),
        }
    }
}

/// Checks a TPTP problem; returns the number of annotated formulas.
pub fn check(src: &str) -> Result<usize, String> {
    let mut c = Checker {
        toks: lex(src)?,
        pos: 0,
        typed: false,
        decls: BTreeMap::new(),
        seen: BTreeMap::new(),
        bound: Vec::new(),
        names: BTreeSet::new(),
    };
    let mut count = 0;
    while c.peek().is_some() {
        c.annotated().map_err(|e| format!("formula {}: {e}", count + 1))?;
        count += 1;
    }
    Ok(count)
}

#[allow(dead_code)]
pub fn self_test() {
    assert_eq!(check("fof(a, axiom, p & q).").unwrap(), 1);
    assert!(check("fof(a, axiom, p & q | r).").is_err());
    assert!(check("fof(a, axiom, p => q => r).").is_err());
    assert!(check("fof(a, axiom, p(X)).").is_err());
    assert!(check("tff(t, type, p: $int > $o). tff(a, axiom, p(1)).").is_ok());
    assert!(check("tff(a, axiom, p(1)).").is_err());
    assert!(check("tff(t, type, p: $int > $o). tff(a, axiom, p(1, 2)).").is_err());
    assert!(check("fof(a, axiom, p). fof(a, axiom, q).").is_err());
    assert!(check("tff(t, type, c: object). tff(a, axiom, ! [X: object] : (X = c)).").is_ok());
    assert!(check("fof(a, axiom, ! [X] : p(X) & q).").is_ok());
    assert!(check("fof(a, axiom, ~ p = q)").is_err());
}
