//! Pretty-printing. `parse(print(f))` reproduces `f` exactly.

use std::fmt;

use super::{Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Apply(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Term::EntityConst(e) => write!(f, "C_{{{e}}}"),
        }
    }
}

// Precedence levels, loosest to tightest: quantifiers bind their whole
// body, so they print at level 0; iff 0, implies 1, or 2, and 3, not 4.
const IFF: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;

fn write_prec(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let level = match f {
        Formula::Eq(..) | Formula::Rel(..) | Formula::Mem(..) => 5,
        Formula::Not(inner) => {
            // `not t1 in t2` would lex fine, but print Not(Eq) as `!=` and
            // Not(Mem) as `notin` for readability; both re-parse to Not.
            match &**inner {
                Formula::Eq(a, b) => {
                    if min > NOT {
                        return write!(out, "(not {a} = {b})");
                    }
                    return write!(out, "{a} != {b}");
                }
                Formula::Mem(a, b) => {
                    if min > NOT {
                        return write!(out, "(not {a} in {b})");
                    }
                    return write!(out, "{a} notin {b}");
                }
                _ => NOT,
            }
        }
        Formula::And(..) => AND,
        Formula::Or(..) => OR,
        Formula::Implies(..) => IMPLIES,
        Formula::Iff(..) => IFF,
        Formula::Forall(..)
        | Formula::Exists(..)
        | Formula::BoundedForall(..)
        | Formula::BoundedExists(..) => 0,
    };
    let parens = level < min;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::Eq(a, b) => write!(out, "{a} = {b}")?,
        Formula::Mem(a, b) => write!(out, "{a} in {b}")?,
        Formula::Rel(name, args) => {
            write!(out, "{name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(out, ",")?;
                }
                write!(out, "{a}")?;
            }
            write!(out, ")")?;
        }
        Formula::Not(inner) => {
            write!(out, "not ")?;
            write_prec(inner, NOT, out)?;
        }
        Formula::And(a, b) => {
            write_prec(a, AND, out)?;
            write!(out, " and ")?;
            write_prec(b, AND + 1, out)?;
        }
        Formula::Or(a, b) => {
            write_prec(a, OR, out)?;
            write!(out, " or ")?;
            write_prec(b, OR + 1, out)?;
        }
        Formula::Implies(a, b) => {
            write_prec(a, IMPLIES + 1, out)?;
            write!(out, " -> ")?;
            write_prec(b, IMPLIES, out)?;
        }
        Formula::Iff(a, b) => {
            write_prec(a, IFF, out)?;
            write!(out, " <-> ")?;
            write_prec(b, IFF + 1, out)?;
        }
        Formula::Forall(v, body) => {
            write!(out, "forall {v} . ")?;
            write_prec(body, 0, out)?;
        }
        Formula::Exists(v, body) => {
            write!(out, "exists {v} . ")?;
            write_prec(body, 0, out)?;
        }
        Formula::BoundedForall(v, bound, body) => {
            write!(out, "forall {v} in {bound} . ")?;
            write_prec(body, 0, out)?;
        }
        Formula::BoundedExists(v, bound, body) => {
            write!(out, "exists {v} in {bound} . ")?;
            write_prec(body, 0, out)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(self, 0, out)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_formula, Language};
    use super::*;

    fn roundtrip(f: &Formula, lang: &Language) {
        let text = f.to_string();
        let back = parse_formula(&text, lang).unwrap_or_else(|e| {
            panic!("printed `{text}` failed to parse: {e}");
        });
        assert_eq!(&back, f, "printed as `{text}`");
    }

    #[test]
    fn print_parse_examples() {
        let lang = Language::new().with_relation("R", 2).with_relation("P", 1);
        let v = |n: &str| Term::var(n);
        let samples = vec![
            Formula::forall_in("x", v("A"), Formula::mem(v("x"), v("B"))),
            Formula::not(Formula::and(
                Formula::eq(v("x"), v("y")),
                Formula::Rel("R".into(), vec![v("x"), v("y")]),
            )),
            Formula::and(
                Formula::forall("x", Formula::Rel("P".into(), vec![v("x")])),
                Formula::neq(v("y"), v("z")),
            ),
            Formula::implies(
                Formula::implies(
                    Formula::Rel("P".into(), vec![v("x")]),
                    Formula::Rel("P".into(), vec![v("y")]),
                ),
                Formula::Rel("P".into(), vec![v("z")]),
            ),
            Formula::not(Formula::not(Formula::eq(v("x"), v("x")))),
            Formula::or(
                Formula::exists_in("u", v("w"), Formula::neq(v("u"), v("w"))),
                Formula::iff(
                    Formula::eq(v("x"), v("y")),
                    Formula::mem(v("x"), v("y")),
                ),
            ),
        ];
        for f in &samples {
            roundtrip(f, &lang);
        }
    }
}
