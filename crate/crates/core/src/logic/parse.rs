//! Recursive-descent parser for the surface formula grammar.
//!
//! ```text
//! formula := ("forall"|"exists") var ["in" term] "." formula
//!          | formula ("and"|"or"|"->"|"<->") formula
//!          | "not" formula
//!          | term ("="|"!="|"in"|"notin") term
//!          | relname "(" terms ")"
//!          | "(" formula ")"
//! ```
//!
//! Precedence, loosest to tightest: `<->`, `->` (right-associative), `or`,
//! `and`, `not`. A quantifier body extends as far right as possible.
//! Entity constants are written `C_{<entity literal>}`.

use crate::entity::{parse_entity_at, Entity};

use super::{Formula, Language, LogicError, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Entity(Entity),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Neq,
    Arrow,
    DArrow,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn lex(text: &str) -> Result<Lexer, LogicError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let err = |line: usize, col: usize, msg: &str| LogicError::Syntax {
        line,
        col,
        msg: msg.to_string(),
    };
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'\n' => {
                line += 1;
                col = 1;
                i += 1;
            }
            _ if c.is_ascii_whitespace() => {
                i += 1;
                col += 1;
            }
            b'(' => {
                toks.push((Tok::LParen, line, col));
                i += 1;
                col += 1;
            }
            b')' => {
                toks.push((Tok::RParen, line, col));
                i += 1;
                col += 1;
            }
            b',' => {
                toks.push((Tok::Comma, line, col));
                i += 1;
                col += 1;
            }
            b'.' => {
                toks.push((Tok::Dot, line, col));
                i += 1;
                col += 1;
            }
            b'=' => {
                toks.push((Tok::Eq, line, col));
                i += 1;
                col += 1;
            }
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push((Tok::Neq, line, col));
                i += 2;
                col += 2;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                toks.push((Tok::Arrow, line, col));
                i += 2;
                col += 2;
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                toks.push((Tok::DArrow, line, col));
                i += 3;
                col += 3;
            }
            _ if c.is_ascii_alphanumeric() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = std::str::from_utf8(&bytes[start..i]).unwrap().to_string();
                let width = i - start;
                if word == "C_" && bytes.get(i) == Some(&b'{') {
                    i += 1;
                    let lit_start = i;
                    let mut p = i;
                    let entity = parse_entity_at(bytes, &mut p).map_err(|e| {
                        err(line, col + (p - start), &format!("bad entity literal: {e}"))
                    })?;
                    i = p;
                    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                        i += 1;
                    }
                    if bytes.get(i) != Some(&b'}') {
                        return Err(err(line, col, "unterminated entity constant"));
                    }
                    i += 1;
                    toks.push((Tok::Entity(entity), line, col));
                    col += i - start + (lit_start - start);
                } else {
                    toks.push((Tok::Ident(word), line, col));
                    col += width;
                }
            }
            _ => return Err(err(line, col, &format!("unexpected character `{}`", c as char))),
        }
    }
    Ok(Lexer {
        toks,
        pos: 0,
        end: (line, col),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Ident(s)) => Some(s.as_str()),
            _ => None,
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or(self.end)
    }

    fn error(&self, msg: impl Into<String>) -> LogicError {
        let (line, col) = self.here();
        LogicError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }
}

const KEYWORDS: &[&str] = &["forall", "exists", "not", "and", "or", "in", "notin"];

/// Parse a formula against a language. Relation and function applications
/// are checked for declaredness and arity; bare identifiers become
/// variables unless declared as constants.
pub fn parse_formula(text: &str, lang: &Language) -> Result<Formula, LogicError> {
    let mut lx = lex(text)?;
    let f = parse_iff(&mut lx, lang)?;
    if lx.peek().is_some() {
        return Err(lx.error("trailing input after formula"));
    }
    Ok(f)
}

fn parse_iff(lx: &mut Lexer, lang: &Language) -> Result<Formula, LogicError> {
    let mut f = parse_implies(lx, lang)?;
    while lx.peek() == Some(&Tok::DArrow) {
        lx.next();
        let rhs = parse_implies(lx, lang)?;
        f = Formula::iff(f, rhs);
    }
    Ok(f)
}

fn parse_implies(lx: &mut Lexer, lang: &Language) -> Result<Formula, LogicError> {
    let lhs = parse_or(lx, lang)?;
    if lx.peek() == Some(&Tok::Arrow) {
        lx.next();
        let rhs = parse_implies(lx, lang)?;
        Ok(Formula::implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_or(lx: &mut Lexer, lang: &Language) -> Result<Formula, LogicError> {
    let mut f = parse_and(lx, lang)?;
    while lx.peek_ident() == Some("or") {
        lx.next();
        let rhs = parse_and(lx, lang)?;
        f = Formula::or(f, rhs);
    }
    Ok(f)
}

fn parse_and(lx: &mut Lexer, lang: &Language) -> Result<Formula, LogicError> {
    let mut f = parse_unary(lx, lang)?;
    while lx.peek_ident() == Some("and") {
        lx.next();
        let rhs = parse_unary(lx, lang)?;
        f = Formula::and(f, rhs);
    }
    Ok(f)
}

fn parse_unary(lx: &mut Lexer, lang: &Language) -> Result<Formula, LogicError> {
    match lx.peek_ident() {
        Some("not") => {
            lx.next();
            Ok(Formula::not(parse_unary(lx, lang)?))
        }
        Some(q @ ("forall" | "exists")) => {
            let universal = q == "forall";
            lx.next();
            let var = match lx.next() {
                Some(Tok::Ident(v)) if !KEYWORDS.contains(&v.as_str()) => v,
                _ => return Err(lx.error("expected a variable after the quantifier")),
            };
            let bound = if lx.peek_ident() == Some("in") {
                lx.next();
                Some(parse_term(lx, lang)?)
            } else {
                None
            };
            lx.expect(Tok::Dot, "`.` before the quantifier body")?;
            let body = parse_iff(lx, lang)?;
            Ok(match (universal, bound) {
                (true, Some(b)) => Formula::forall_in(var, b, body),
                (false, Some(b)) => Formula::exists_in(var, b, body),
                (true, None) => Formula::forall(var, body),
                (false, None) => Formula::exists(var, body),
            })
        }
        _ => parse_atom(lx, lang),
    }
}

fn parse_atom(lx: &mut Lexer, lang: &Language) -> Result<Formula, LogicError> {
    if lx.peek() == Some(&Tok::LParen) {
        lx.next();
        let f = parse_iff(lx, lang)?;
        lx.expect(Tok::RParen, "`)`")?;
        return Ok(f);
    }
    // relation application?
    if let Some(name) = lx.peek_ident() {
        if !KEYWORDS.contains(&name)
            && lx.toks.get(lx.pos + 1).map(|(t, _, _)| t) == Some(&Tok::LParen)
            && lang.relation_arity(name).is_some()
        {
            let name = name.to_string();
            lx.next();
            let args = parse_args(lx, lang)?;
            let expected = lang.relation_arity(&name).unwrap();
            if args.len() != expected {
                return Err(LogicError::ArityMismatch {
                    name,
                    expected,
                    got: args.len(),
                });
            }
            return Ok(Formula::Rel(name, args));
        }
    }
    let lhs = parse_term(lx, lang)?;
    match lx.next() {
        Some(Tok::Eq) => Ok(Formula::eq(lhs, parse_term(lx, lang)?)),
        Some(Tok::Neq) => Ok(Formula::neq(lhs, parse_term(lx, lang)?)),
        Some(Tok::Ident(w)) if w == "in" => Ok(Formula::mem(lhs, parse_term(lx, lang)?)),
        Some(Tok::Ident(w)) if w == "notin" => {
            Ok(Formula::not(Formula::mem(lhs, parse_term(lx, lang)?)))
        }
        _ => {
            lx.pos = lx.pos.saturating_sub(1);
            Err(lx.error("expected `=`, `!=`, `in`, or `notin` after a term"))
        }
    }
}

fn parse_args(lx: &mut Lexer, lang: &Language) -> Result<Vec<Term>, LogicError> {
    lx.expect(Tok::LParen, "`(`")?;
    let mut args = Vec::new();
    if lx.peek() == Some(&Tok::RParen) {
        lx.next();
        return Ok(args);
    }
    loop {
        args.push(parse_term(lx, lang)?);
        match lx.next() {
            Some(Tok::Comma) => continue,
            Some(Tok::RParen) => return Ok(args),
            _ => return Err(lx.error("expected `,` or `)` in an argument list")),
        }
    }
}

fn parse_term(lx: &mut Lexer, lang: &Language) -> Result<Term, LogicError> {
    match lx.next() {
        Some(Tok::Entity(e)) => Ok(Term::EntityConst(e)),
        Some(Tok::Ident(name)) => {
            if KEYWORDS.contains(&name.as_str()) {
                lx.pos -= 1;
                return Err(lx.error(format!("keyword `{name}` cannot be a term")));
            }
            if lx.peek() == Some(&Tok::LParen) {
                let arity = lang
                    .function_arity(&name)
                    .ok_or_else(|| LogicError::UnknownSymbol(name.clone()))?;
                let args = parse_args(lx, lang)?;
                if args.len() != arity {
                    return Err(LogicError::ArityMismatch {
                        name,
                        expected: arity,
                        got: args.len(),
                    });
                }
                Ok(Term::Apply(name, args))
            } else if lang.function_arity(&name) == Some(0) {
                Ok(Term::Const(name))
            } else {
                Ok(Term::var(name))
            }
        }
        _ => {
            lx.pos = lx.pos.saturating_sub(1);
            Err(lx.error("expected a term"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::parse_entity;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn bounded_quantifier_surface_form() {
        let lang = Language::new();
        let f = parse_formula("forall x in A . x in B", &lang).unwrap();
        assert_eq!(
            f,
            Formula::forall_in("x", v("A"), Formula::mem(v("x"), v("B")))
        );
    }

    #[test]
    fn connectives_and_negation() {
        let lang = Language::new().with_relation("R", 2);
        let f = parse_formula("not (x = y and R(x,y))", &lang).unwrap();
        assert_eq!(
            f,
            Formula::not(Formula::and(
                Formula::eq(v("x"), v("y")),
                Formula::Rel("R".into(), vec![v("x"), v("y")]),
            ))
        );
    }

    #[test]
    fn unknown_and_arity_errors() {
        let lang = Language::new();
        assert!(parse_formula("forall x . x = x", &lang).is_ok());
        // R undeclared: `R(x)` cannot be a relation atom, and the fallback
        // term parse stops at `(`
        assert!(parse_formula("R(x)", &lang).is_err());
        let lang2 = Language::new().with_relation("R", 2);
        assert_eq!(
            parse_formula("R(x)", &lang2),
            Err(LogicError::ArityMismatch {
                name: "R".into(),
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn entity_constants() {
        let lang = Language::new();
        let f = parse_formula("forall x in C_{{a,b}} . x in C_{{a,b,c}}", &lang).unwrap();
        let ab = parse_entity("{a,b}").unwrap();
        let abc = parse_entity("{a,b,c}").unwrap();
        assert_eq!(
            f,
            Formula::forall_in(
                "x",
                Term::EntityConst(ab),
                Formula::mem(v("x"), Term::EntityConst(abc))
            )
        );
        let g = parse_formula("x in C_{a}", &lang).unwrap();
        assert_eq!(
            g,
            Formula::mem(v("x"), Term::EntityConst(Entity::atom("a")))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let lang = Language::new().with_relation("P", 1);
        let f = parse_formula("P(x) and P(y) or P(z) -> P(x) -> P(y)", &lang).unwrap();
        // ((P(x) and P(y)) or P(z)) -> (P(x) -> P(y))
        let p = |n: &str| Formula::Rel("P".into(), vec![v(n)]);
        assert_eq!(
            f,
            Formula::implies(
                Formula::or(Formula::and(p("x"), p("y")), p("z")),
                Formula::implies(p("x"), p("y")),
            )
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        let lang = Language::new();
        match parse_formula("forall x x = x", &lang) {
            Err(LogicError::Syntax { line: 1, col, .. }) => assert!(col > 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }
}
