//! Deterministic, duplicate-free formula enumeration.
//!
//! Formulas are generated over the `{Not, And, Forall}` core (plus the
//! membership style with bounded quantifiers), level by level: atoms
//! first, then at each level negations, conjunctions, and quantifications
//! of everything already enumerated. The And step is quadratic, so counts
//! explode past depth 2; the depth cap and a hard count cap keep requests
//! honest. The depth-3 checkers avoid full enumeration: two-sided
//! equivalence checks are closed under negation and conjunction pointwise,
//! so only quantifier-topped formulas add content beyond depth 2.

use std::collections::HashSet;

use thiserror::Error;

use crate::logic::{Formula, Language, Term};

/// Hard limit on enumerated formulas.
pub const FORMULA_COUNT_CAP: usize = 2_000_000;

/// Default depth cap.
pub const DEPTH_CAP: usize = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("depth {0} exceeds the enumeration cap {DEPTH_CAP}")]
    DepthCapExceeded(usize),
    #[error("enumeration exceeded {FORMULA_COUNT_CAP} formulas at depth {0}")]
    CountCapExceeded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomStyle {
    /// Relation applications and equalities; unbounded quantifiers.
    FirstOrder,
    /// Membership and equality atoms; quantifiers bounded by variables.
    Epsilon,
}

/// All formulas of core depth <= `max_depth` with symbols from `lang`,
/// terms drawn from the given variables, in a fixed order.
pub fn enumerate_formulas(
    lang: &Language,
    max_depth: usize,
    vars: &[String],
) -> Result<Vec<Formula>, EnumerateError> {
    enumerate_styled(
        AtomStyle::FirstOrder,
        Some(lang),
        max_depth,
        vars,
        &[],
        FORMULA_COUNT_CAP,
    )
}

/// Epsilon-language variant: atoms are `s in t` and `s = t`, quantifiers
/// are bounded by pool variables.
pub fn enumerate_epsilon_formulas(
    max_depth: usize,
    vars: &[String],
) -> Result<Vec<Formula>, EnumerateError> {
    enumerate_styled(AtomStyle::Epsilon, None, max_depth, vars, &[], FORMULA_COUNT_CAP)
}

/// As [`enumerate_formulas`], with extra ground terms (element constants)
/// usable in atom positions. Used to enumerate diagram sentences.
pub fn enumerate_formulas_with_terms(
    lang: &Language,
    max_depth: usize,
    vars: &[String],
    extra_terms: &[Term],
) -> Result<Vec<Formula>, EnumerateError> {
    enumerate_styled(
        AtomStyle::FirstOrder,
        Some(lang),
        max_depth,
        vars,
        extra_terms,
        FORMULA_COUNT_CAP,
    )
}

fn enumerate_styled(
    style: AtomStyle,
    lang: Option<&Language>,
    max_depth: usize,
    vars: &[String],
    extra_terms: &[Term],
    count_cap: usize,
) -> Result<Vec<Formula>, EnumerateError> {
    if max_depth > DEPTH_CAP {
        return Err(EnumerateError::DepthCapExceeded(max_depth));
    }
    let mut terms: Vec<Term> = vars.iter().map(Term::var).collect();
    terms.extend(extra_terms.iter().cloned());

    let mut out: Vec<Formula> = Vec::new();
    let mut seen: HashSet<Formula> = HashSet::new();
    let push = |f: Formula, out: &mut Vec<Formula>, seen: &mut HashSet<Formula>| {
        if seen.insert(f.clone()) {
            out.push(f);
        }
    };

    // depth 0: atoms
    match style {
        AtomStyle::FirstOrder => {
            let lang = lang.expect("first-order enumeration needs a language");
            for (name, arity) in lang.relations() {
                for args in tuples(&terms, arity) {
                    push(Formula::Rel(name.to_string(), args), &mut out, &mut seen);
                }
            }
        }
        AtomStyle::Epsilon => {
            for s in &terms {
                for t in &terms {
                    push(Formula::mem(s.clone(), t.clone()), &mut out, &mut seen);
                }
            }
        }
    }
    for s in &terms {
        for t in &terms {
            push(Formula::eq(s.clone(), t.clone()), &mut out, &mut seen);
        }
    }

    let mut level_start = 0;
    for depth in 1..=max_depth {
        let cumulative_end = out.len();
        // Not over everything so far
        for i in 0..cumulative_end {
            push(Formula::not(out[i].clone()), &mut out, &mut seen);
        }
        // And over pairs with at least one operand from the last level
        for i in 0..cumulative_end {
            for j in 0..cumulative_end {
                if i >= level_start || j >= level_start {
                    push(
                        Formula::and(out[i].clone(), out[j].clone()),
                        &mut out,
                        &mut seen,
                    );
                }
                if out.len() > count_cap {
                    return Err(EnumerateError::CountCapExceeded(depth));
                }
            }
        }
        // quantifiers over everything so far
        for v in vars {
            match style {
                AtomStyle::FirstOrder => {
                    for i in 0..cumulative_end {
                        push(Formula::forall(v.clone(), out[i].clone()), &mut out, &mut seen);
                    }
                }
                AtomStyle::Epsilon => {
                    for bound in vars.iter().filter(|b| *b != v) {
                        for i in 0..cumulative_end {
                            push(
                                Formula::forall_in(v.clone(), Term::var(bound), out[i].clone()),
                                &mut out,
                                &mut seen,
                            );
                        }
                    }
                }
            }
        }
        if out.len() > count_cap {
            return Err(EnumerateError::CountCapExceeded(depth));
        }
        level_start = cumulative_end;
    }
    Ok(out)
}

fn tuples(terms: &[Term], arity: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * terms.len());
        for prefix in &out {
            for t in terms {
                let mut row = prefix.clone();
                row.push(t.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn depth_zero_atoms() {
        let lang = Language::new().with_relation("P", 1);
        let fs = enumerate_formulas(&lang, 0, &vars(&["x"])).unwrap();
        assert_eq!(
            fs,
            vec![
                Formula::Rel("P".into(), vec![Term::var("x")]),
                Formula::eq(Term::var("x"), Term::var("x")),
            ]
        );
    }

    #[test]
    fn depth_one_contains_negation_and_quantification() {
        let lang = Language::new();
        let fs = enumerate_formulas(&lang, 1, &vars(&["x"])).unwrap();
        let refl = Formula::eq(Term::var("x"), Term::var("x"));
        assert!(fs.contains(&Formula::not(refl.clone())));
        assert!(fs.contains(&Formula::forall("x", refl)));
    }

    #[test]
    fn enumeration_is_duplicate_free_and_deterministic() {
        let lang = Language::new().with_relation("P", 1);
        let fs1 = enumerate_formulas(&lang, 2, &vars(&["x", "y"])).unwrap();
        let fs2 = enumerate_formulas(&lang, 2, &vars(&["x", "y"])).unwrap();
        assert_eq!(fs1, fs2);
        let set: HashSet<_> = fs1.iter().collect();
        assert_eq!(set.len(), fs1.len());
        for f in &fs1 {
            assert!(f.depth() <= 2);
        }
    }

    #[test]
    fn depth_cap_is_enforced() {
        let lang = Language::new();
        assert_eq!(
            enumerate_formulas(&lang, 4, &vars(&["x"])),
            Err(EnumerateError::DepthCapExceeded(4))
        );
    }

    #[test]
    fn epsilon_style_uses_bounded_quantifiers() {
        let fs = enumerate_epsilon_formulas(1, &vars(&["x", "y"])).unwrap();
        assert!(fs.contains(&Formula::mem(Term::var("x"), Term::var("y"))));
        assert!(fs.contains(&Formula::forall_in(
            "x",
            Term::var("y"),
            Formula::mem(Term::var("x"), Term::var("x"))
        )));
        assert!(fs.iter().all(|f| f.is_bounded()));
    }
}
