//! Syntax of first-order and membership formulas.
//!
//! Terms and formulas use named variables throughout; the structures we
//! check are tiny and named builders stay legible. `Or`, `Implies`, `Iff`
//! and the existential quantifiers are derived connectives: [`Formula::normalize`]
//! rewrites them into the `{Not, And, Forall}` core, and formula depth is
//! measured on the normalized form.

mod builders;
mod parse;
mod print;

pub use builders::{
    build_base, build_nu, build_phi, build_psi_hyperfinite, naturals_prefix, star_transform,
    NaturalsPrefix, PhiKind,
};
pub use parse::parse_formula;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::entity::Entity;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` has arity {expected}, got {got} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("entity constant `{0}` has no image under the star map")]
    UnmappedConstant(String),
}

/// Relation and function symbols with arities; arity-0 functions are
/// constants. Names are unique across both maps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Language {
    relations: BTreeMap<String, usize>,
    functions: BTreeMap<String, usize>,
}

impl Language {
    pub fn new() -> Language {
        Language::default()
    }

    pub fn with_relation(mut self, name: impl Into<String>, arity: usize) -> Language {
        let name = name.into();
        assert!(
            !self.functions.contains_key(&name) && !self.relations.contains_key(&name),
            "duplicate symbol {name}"
        );
        self.relations.insert(name, arity);
        self
    }

    pub fn with_function(mut self, name: impl Into<String>, arity: usize) -> Language {
        let name = name.into();
        assert!(
            !self.functions.contains_key(&name) && !self.relations.contains_key(&name),
            "duplicate symbol {name}"
        );
        self.functions.insert(name, arity);
        self
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn relations_only(&self) -> bool {
        self.functions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// A declared constant symbol of some first-order language.
    Const(String),
    Apply(String, Vec<Term>),
    /// A literal entity, the expanded-language constant written `C_{...}`.
    EntityConst(Entity),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    fn visit_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(v) => {
                out.insert(v);
            }
            Term::Const(_) | Term::EntityConst(_) => {}
            Term::Apply(_, args) => args.iter().for_each(|t| t.visit_vars(out)),
        }
    }
}

pub type VarSet = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    /// Membership atom of the epsilon language.
    Mem(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    BoundedForall(String, Term, Box<Formula>),
    BoundedExists(String, Term, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    pub fn forall(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(f))
    }
    pub fn exists(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(f))
    }
    pub fn forall_in(v: impl Into<String>, bound: Term, f: Formula) -> Formula {
        let v = v.into();
        debug_assert!(
            !term_mentions(&bound, &v),
            "bound variable {v} occurs in its own bound term"
        );
        Formula::BoundedForall(v, bound, Box::new(f))
    }
    pub fn exists_in(v: impl Into<String>, bound: Term, f: Formula) -> Formula {
        let v = v.into();
        debug_assert!(
            !term_mentions(&bound, &v),
            "bound variable {v} occurs in its own bound term"
        );
        Formula::BoundedExists(v, bound, Box::new(f))
    }
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }
    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::Eq(a, b))
    }
    pub fn mem(a: Term, b: Term) -> Formula {
        Formula::Mem(a, b)
    }

    /// Conjunction of a nonempty list, folded left.
    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        let first = it.next().expect("empty conjunction");
        it.fold(first, Formula::and)
    }

    /// Disjunction of a nonempty list, folded left.
    pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        let first = it.next().expect("empty disjunction");
        it.fold(first, Formula::or)
    }

    /// "There is exactly one y in x with psi(y)", expanded at construction:
    /// `∃y∈x (ψ(y) ∧ ∀z∈x (ψ(z) → z=y))` with `z` fresh for `ψ`.
    pub fn exists_unique_in(v: &str, bound: Term, psi: impl Fn(&Term) -> Formula) -> Formula {
        let y = Term::var(v);
        let fresh = fresh_var(v, &psi(&y));
        let z = Term::var(&fresh);
        Formula::exists_in(
            v,
            bound.clone(),
            Formula::and(
                psi(&y),
                Formula::forall_in(
                    fresh.clone(),
                    bound,
                    Formula::implies(psi(&z), Formula::eq(z.clone(), y.clone())),
                ),
            ),
        )
    }

    /// True iff every quantifier in the formula is bounded.
    pub fn is_bounded(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Rel(..) | Formula::Mem(..) => true,
            Formula::Not(f) => f.is_bounded(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_bounded() && b.is_bounded()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
            Formula::BoundedForall(_, _, f) | Formula::BoundedExists(_, _, f) => f.is_bounded(),
        }
    }

    /// Variables with at least one free occurrence. The bound term of a
    /// bounded quantifier is outside the quantifier's scope, so its
    /// variables count as free unless captured further out.
    pub fn free_variables(&self) -> VarSet {
        let mut out = BTreeSet::new();
        self.visit_free(&mut out);
        out.into_iter().map(str::to_owned).collect()
    }

    fn visit_free<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::Eq(a, b) | Formula::Mem(a, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
            Formula::Rel(_, ts) => ts.iter().for_each(|t| t.visit_vars(out)),
            Formula::Not(f) => f.visit_free(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_free(out);
                b.visit_free(out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                let mut inner = BTreeSet::new();
                f.visit_free(&mut inner);
                inner.remove(v.as_str());
                out.extend(inner);
            }
            Formula::BoundedForall(v, bound, f) | Formula::BoundedExists(v, bound, f) => {
                bound.visit_vars(out);
                let mut inner = BTreeSet::new();
                f.visit_free(&mut inner);
                inner.remove(v.as_str());
                out.extend(inner);
            }
        }
    }

    /// Rewrite derived connectives into the `{Not, And, Forall}` core
    /// (bounded quantifiers stay bounded: `∃x∈y φ` becomes `¬∀x∈y ¬φ`).
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::Eq(..) | Formula::Rel(..) | Formula::Mem(..) => self.clone(),
            Formula::Not(f) => Formula::not(f.normalize()),
            Formula::And(a, b) => Formula::and(a.normalize(), b.normalize()),
            Formula::Or(a, b) => Formula::not(Formula::and(
                Formula::not(a.normalize()),
                Formula::not(b.normalize()),
            )),
            Formula::Implies(a, b) => {
                Formula::not(Formula::and(a.normalize(), Formula::not(b.normalize())))
            }
            Formula::Iff(a, b) => Formula::and(
                Formula::implies(*a.clone(), *b.clone()).normalize(),
                Formula::implies(*b.clone(), *a.clone()).normalize(),
            ),
            Formula::Forall(v, f) => Formula::forall(v.clone(), f.normalize()),
            Formula::Exists(v, f) => {
                Formula::not(Formula::forall(v.clone(), Formula::not(f.normalize())))
            }
            Formula::BoundedForall(v, t, f) => {
                Formula::BoundedForall(v.clone(), t.clone(), Box::new(f.normalize()))
            }
            Formula::BoundedExists(v, t, f) => Formula::not(Formula::BoundedForall(
                v.clone(),
                t.clone(),
                Box::new(Formula::not(f.normalize())),
            )),
        }
    }

    /// Structural equality after normalizing derived connectives.
    pub fn eq_normalized(&self, other: &Formula) -> bool {
        self.normalize() == other.normalize()
    }

    /// Nesting count of `{Not, And, Forall}` (and their bounded forms) on
    /// the normalized formula.
    pub fn depth(&self) -> usize {
        fn core_depth(f: &Formula) -> usize {
            match f {
                Formula::Eq(..) | Formula::Rel(..) | Formula::Mem(..) => 0,
                Formula::Not(g) => 1 + core_depth(g),
                Formula::And(a, b) => 1 + core_depth(a).max(core_depth(b)),
                Formula::Forall(_, g)
                | Formula::BoundedForall(_, _, g)
                | Formula::Exists(_, g)
                | Formula::BoundedExists(_, _, g) => 1 + core_depth(g),
                Formula::Or(..) | Formula::Implies(..) | Formula::Iff(..) => {
                    unreachable!("normalized formula")
                }
            }
        }
        core_depth(&self.normalize())
    }

    /// Every entity constant occurring anywhere in the formula.
    pub fn entity_constants(&self) -> BTreeSet<Entity> {
        fn visit_term(t: &Term, out: &mut BTreeSet<Entity>) {
            match t {
                Term::EntityConst(e) => {
                    out.insert(e.clone());
                }
                Term::Apply(_, args) => args.iter().for_each(|a| visit_term(a, out)),
                Term::Var(_) | Term::Const(_) => {}
            }
        }
        fn visit(f: &Formula, out: &mut BTreeSet<Entity>) {
            match f {
                Formula::Eq(a, b) | Formula::Mem(a, b) => {
                    visit_term(a, out);
                    visit_term(b, out);
                }
                Formula::Rel(_, ts) => ts.iter().for_each(|t| visit_term(t, out)),
                Formula::Not(g) => visit(g, out),
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Implies(a, b)
                | Formula::Iff(a, b) => {
                    visit(a, out);
                    visit(b, out);
                }
                Formula::Forall(_, g) | Formula::Exists(_, g) => visit(g, out),
                Formula::BoundedForall(_, t, g) | Formula::BoundedExists(_, t, g) => {
                    visit_term(t, out);
                    visit(g, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        visit(self, &mut out);
        out
    }
}

fn term_mentions(t: &Term, v: &str) -> bool {
    match t {
        Term::Var(w) => w == v,
        Term::Const(_) | Term::EntityConst(_) => false,
        Term::Apply(_, args) => args.iter().any(|a| term_mentions(a, v)),
    }
}

/// A variable name based on `hint` that does not occur (free or bound)
/// in `f`.
pub fn fresh_var(hint: &str, f: &Formula) -> String {
    let mut used = BTreeSet::new();
    collect_all_vars(f, &mut used);
    let mut candidate = format!("{hint}_");
    let mut n = 0;
    while used.contains(candidate.as_str()) {
        n += 1;
        candidate = format!("{hint}_{n}");
    }
    candidate
}

fn collect_all_vars<'a>(f: &'a Formula, out: &mut BTreeSet<&'a str>) {
    match f {
        Formula::Eq(a, b) | Formula::Mem(a, b) => {
            a.visit_vars(out);
            b.visit_vars(out);
        }
        Formula::Rel(_, ts) => ts.iter().for_each(|t| t.visit_vars(out)),
        Formula::Not(g) => collect_all_vars(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_all_vars(a, out);
            collect_all_vars(b, out);
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            out.insert(v);
            collect_all_vars(g, out);
        }
        Formula::BoundedForall(v, t, g) | Formula::BoundedExists(v, t, g) => {
            out.insert(v);
            t.visit_vars(out);
            collect_all_vars(g, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn bounded_recognition() {
        let f = Formula::forall_in("x", v("y"), Formula::mem(v("x"), v("z")));
        assert!(f.is_bounded());
        let g = Formula::forall("x", Formula::eq(v("x"), v("x")));
        assert!(!g.is_bounded());
        assert!(Formula::mem(v("x"), v("y")).is_bounded());
        // derived connectives do not affect boundedness
        assert!(Formula::or(f.clone(), f.clone()).is_bounded());
        assert!(!Formula::exists("x", Formula::eq(v("x"), v("x"))).is_bounded());
    }

    #[test]
    fn free_variables_of_quantifiers() {
        let f = Formula::forall("x", Formula::mem(v("x"), v("y")));
        assert_eq!(f.free_variables(), VarSet::from(["y".to_string()]));
        let g = Formula::forall_in("x", v("y"), Formula::mem(v("x"), v("z")));
        assert_eq!(
            g.free_variables(),
            VarSet::from(["y".to_string(), "z".to_string()])
        );
        assert_eq!(
            Formula::eq(v("x"), v("x")).free_variables(),
            VarSet::from(["x".to_string()])
        );
    }

    #[test]
    fn normalization_hits_the_core() {
        let f = Formula::iff(
            Formula::or(Formula::eq(v("x"), v("y")), Formula::mem(v("x"), v("y"))),
            Formula::exists_in("z", v("x"), Formula::eq(v("z"), v("y"))),
        );
        fn core_only(f: &Formula) -> bool {
            match f {
                Formula::Eq(..) | Formula::Rel(..) | Formula::Mem(..) => true,
                Formula::Not(g) => core_only(g),
                Formula::And(a, b) => core_only(a) && core_only(b),
                Formula::Forall(_, g) | Formula::BoundedForall(_, _, g) => core_only(g),
                _ => false,
            }
        }
        assert!(core_only(&f.normalize()));
        assert!(f.eq_normalized(&f.clone()));
    }

    #[test]
    fn depth_counts_core_nesting() {
        assert_eq!(Formula::eq(v("x"), v("x")).depth(), 0);
        assert_eq!(Formula::neq(v("x"), v("y")).depth(), 1);
        assert_eq!(
            Formula::forall("x", Formula::eq(v("x"), v("x"))).depth(),
            1
        );
        // ∃x∈y φ normalizes to ¬∀x∈y ¬φ: two extra levels over φ's atom + 1
        assert_eq!(
            Formula::exists_in("x", v("y"), Formula::eq(v("x"), v("x"))).depth(),
            3
        );
    }

    #[test]
    fn exists_unique_expansion_is_bounded_and_fresh() {
        let f = Formula::exists_unique_in("y", v("x"), |y| Formula::mem(y.clone(), v("y_")));
        assert!(f.is_bounded());
        // the expansion must not capture the y_ that psi mentions
        let mut all = BTreeSet::new();
        collect_all_vars(&f, &mut all);
        assert!(all.contains("y_1") || !all.contains("y_"), "fresh variable collided");
    }
}
