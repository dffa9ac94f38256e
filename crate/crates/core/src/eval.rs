//! Evaluation of bounded membership formulas over entities.
//!
//! Truth of a bounded formula depends only on the transitive closures of
//! its parameters, so evaluation never touches any ambient level set:
//! quantifiers walk the members of their bound, equality is extensional,
//! and a quantifier bounded by an atom (or the empty set) is vacuous.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::entity::Entity;
use crate::logic::{Formula, Term};

/// Variable bindings for bounded evaluation.
pub type Environment = BTreeMap<String, Entity>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbounded quantifier over `{0}` cannot be evaluated against entities")]
    UnboundedQuantifier(String),
    #[error("variable `{0}` is not bound in the environment")]
    UnresolvedVariable(String),
    #[error("symbol `{0}` has no interpretation over entities")]
    UninterpretedSymbol(String),
}

fn eval_term(t: &Term, env: &Environment) -> Result<Entity, EvalError> {
    match t {
        Term::Var(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| EvalError::UnresolvedVariable(v.clone())),
        Term::EntityConst(e) => Ok(e.clone()),
        Term::Const(c) => Err(EvalError::UninterpretedSymbol(c.clone())),
        Term::Apply(name, _) => Err(EvalError::UninterpretedSymbol(name.clone())),
    }
}

/// Evaluate a bounded formula under the given environment.
pub fn eval_bounded(f: &Formula, env: &Environment) -> Result<bool, EvalError> {
    let mut env = env.clone();
    eval_rec(f, &mut env)
}

fn eval_rec(f: &Formula, env: &mut Environment) -> Result<bool, EvalError> {
    match f {
        Formula::Eq(a, b) => Ok(eval_term(a, env)? == eval_term(b, env)?),
        Formula::Mem(a, b) => {
            let a = eval_term(a, env)?;
            let b = eval_term(b, env)?;
            Ok(b.contains(&a))
        }
        Formula::Rel(name, _) => Err(EvalError::UninterpretedSymbol(name.clone())),
        Formula::Not(g) => Ok(!eval_rec(g, env)?),
        Formula::And(a, b) => Ok(eval_rec(a, env)? && eval_rec(b, env)?),
        Formula::Or(a, b) => Ok(eval_rec(a, env)? || eval_rec(b, env)?),
        Formula::Implies(a, b) => Ok(!eval_rec(a, env)? || eval_rec(b, env)?),
        Formula::Iff(a, b) => Ok(eval_rec(a, env)? == eval_rec(b, env)?),
        Formula::Forall(v, _) | Formula::Exists(v, _) => {
            Err(EvalError::UnboundedQuantifier(v.clone()))
        }
        Formula::BoundedForall(v, bound, body) => {
            let bound = eval_term(bound, env)?;
            let saved = env.get(v).cloned();
            let mut result = true;
            for m in bound.members() {
                env.insert(v.clone(), m.clone());
                if !eval_rec(body, env)? {
                    result = false;
                    break;
                }
            }
            restore(env, v, saved);
            Ok(result)
        }
        Formula::BoundedExists(v, bound, body) => {
            let bound = eval_term(bound, env)?;
            let saved = env.get(v).cloned();
            let mut result = false;
            for m in bound.members() {
                env.insert(v.clone(), m.clone());
                if eval_rec(body, env)? {
                    result = true;
                    break;
                }
            }
            restore(env, v, saved);
            Ok(result)
        }
    }
}

fn restore(env: &mut Environment, v: &str, saved: Option<Entity>) {
    match saved {
        Some(e) => {
            env.insert(v.to_string(), e);
        }
        None => {
            env.remove(v);
        }
    }
}

/// Convenience: evaluate with variables bound in order.
pub fn eval_with(f: &Formula, bindings: &[(&str, &Entity)]) -> Result<bool, EvalError> {
    let env: Environment = bindings
        .iter()
        .map(|(k, v)| (k.to_string(), (*v).clone()))
        .collect();
    eval_bounded(f, &env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::{kuratowski, parse_entity, rank, BaseSet, Entity};
    use crate::logic::{build_phi, Formula, PhiKind, Term};

    fn env(bindings: &[(&str, Entity)]) -> Environment {
        bindings
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn empty_set_satisfies_emptiness() {
        let f = build_phi(PhiKind::Empty);
        assert!(eval_bounded(&f, &env(&[("x", Entity::empty_set())])).unwrap());
        assert!(!eval_bounded(&f, &env(&[("x", parse_entity("{a}").unwrap())])).unwrap());
    }

    #[test]
    fn quantifier_over_atom_is_vacuous() {
        let f = Formula::forall_in("x", Term::var("A"), Formula::neq(Term::var("x"), Term::var("x")));
        assert!(eval_bounded(&f, &env(&[("A", Entity::atom("a"))])).unwrap());
        let g = Formula::exists_in("x", Term::var("A"), Formula::eq(Term::var("x"), Term::var("x")));
        assert!(!eval_bounded(&g, &env(&[("A", Entity::atom("a"))])).unwrap());
    }

    #[test]
    fn subset_formula_matches_native() {
        let f = build_phi(PhiKind::Subset);
        let s1 = parse_entity("{a}").unwrap();
        let s2 = parse_entity("{a,b}").unwrap();
        assert!(eval_bounded(&f, &env(&[("x", s1.clone()), ("y", s2.clone())])).unwrap());
        assert!(!eval_bounded(&f, &env(&[("x", s2), ("y", s1)])).unwrap());
    }

    #[test]
    fn tuple_formula_recognizes_kuratowski_pairs() {
        let a = Entity::atom("a");
        let b = Entity::atom("b");
        let pair = kuratowski(a.clone(), b.clone());
        let f = build_phi(PhiKind::Tuple(2));
        assert!(eval_bounded(
            &f,
            &env(&[("x", pair.clone()), ("y1", a.clone()), ("y2", b.clone())])
        )
        .unwrap());
        assert!(!eval_bounded(&f, &env(&[("x", pair), ("y1", b), ("y2", a)])).unwrap());
    }

    #[test]
    fn vn_member_matches_rank() {
        let base = BaseSet::new(["a", "b"]);
        let base_entity = base.as_entity();
        for text in ["a", "{}", "{a}", "{a,b}", "{{a},b}", "{{a,b}}"] {
            let e = parse_entity(text).unwrap();
            let r = rank(&e, &base).unwrap();
            for n in 0..=3 {
                let f = build_phi(PhiKind::VnMember(n));
                let got = eval_bounded(&f, &env(&[("x", base_entity.clone()), ("y", e.clone())]))
                    .unwrap();
                assert_eq!(got, r <= n, "{text} at level {n}");
            }
        }
    }

    #[test]
    fn unbounded_quantifier_is_rejected() {
        let f = Formula::forall("x", Formula::eq(Term::var("x"), Term::var("x")));
        assert_eq!(
            eval_bounded(&f, &Environment::new()),
            Err(EvalError::UnboundedQuantifier("x".into()))
        );
    }
}
