//! Encoding finite relational structures as entities, with a translation
//! that turns first-order satisfaction into bounded evaluation.
//!
//! A structure `(A, R1, ..., Rk)` becomes the left-nested tuple entity of
//! its universe (as atoms) and its relation graphs. For each first-order
//! formula there is a bounded membership formula, with two extra free
//! variables `m_` (the encoded structure) and `t_` (a transitive set
//! containing it), that holds exactly when the original does: atoms
//! become tuple-membership statements relativized to `t_`, and
//! quantifiers are relativized to the universe component of `m_`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::entity::{tuple, Entity};
use crate::fol::Structure;
use crate::logic::{Formula, Language, Term};

/// Free-variable name bound to the encoded structure.
pub const MODEL_VAR: &str = "m_";
/// Free-variable name bound to a transitive set containing the encoding.
pub const TRANSITIVE_VAR: &str = "t_";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("function symbols are not supported; encode them as relation graphs")]
    FunctionSymbols,
    #[error("atom map must be injective and total on the universe")]
    BadAtomMap,
    #[error("relation `{0}` is not in the language")]
    UnknownRelation(String),
    #[error("only variables may appear in formulas being encoded")]
    NonVariableTerm,
}

/// The encoded structure, the transitive closure entity to relativize
/// against, and the universe images.
#[derive(Debug, Clone)]
pub struct EncodedStructure {
    pub model: Entity,
    pub transitive: Entity,
    pub atom_map: BTreeMap<String, Entity>,
}

/// Encode a relational structure. The atom map sends universe elements to
/// entities (typically fresh atoms) and must be injective.
pub fn encode_structure(
    s: &Structure,
    atom_map: &BTreeMap<String, Entity>,
) -> Result<EncodedStructure, EncodeError> {
    if !s.lang.relations_only() {
        return Err(EncodeError::FunctionSymbols);
    }
    let mut images = Vec::new();
    for e in &s.universe {
        let img = atom_map.get(e).ok_or(EncodeError::BadAtomMap)?;
        images.push(img.clone());
    }
    {
        let distinct: std::collections::BTreeSet<&Entity> = images.iter().collect();
        if distinct.len() != images.len() {
            return Err(EncodeError::BadAtomMap);
        }
    }
    let universe_entity = Entity::set(images);

    let mut parts = vec![universe_entity];
    for (name, _) in s.lang.relations() {
        let rows = &s.relations[name];
        let graph = Entity::set(rows.iter().map(|row| {
            let imgs: Vec<Entity> = row.iter().map(|e| atom_map[e].clone()).collect();
            tuple(&imgs)
        }));
        parts.push(graph);
    }
    let model = tuple(&parts);
    Ok(EncodedStructure {
        transitive: model.transitive_closure(),
        model,
        atom_map: atom_map.clone(),
    })
}

struct BarCtx<'a> {
    /// relation name -> 0-based position among the sorted relations
    positions: BTreeMap<&'a str, usize>,
    relation_count: usize,
    counter: usize,
}

impl<'a> BarCtx<'a> {
    fn fresh(&mut self, hint: &str) -> String {
        let v = format!("{hint}{}", self.counter);
        self.counter += 1;
        v
    }

    fn t(&self) -> Term {
        Term::var(TRANSITIVE_VAR)
    }

    /// `x = (a,b)` with fresh scratch variables.
    fn pair_eq(&mut self, x: &Term, a: &Term, b: &Term) -> Formula {
        let u = self.fresh("qu");
        let v = self.fresh("qv");
        let w = self.fresh("qw");
        let set_eq = |x: &Term, members: &[Term], scratch: &str| {
            let sv = Term::var(scratch);
            Formula::and_all(
                members
                    .iter()
                    .map(|m| Formula::mem(m.clone(), x.clone()))
                    .chain([Formula::forall_in(
                        scratch,
                        x.clone(),
                        Formula::or_all(
                            members.iter().map(|m| Formula::eq(sv.clone(), m.clone())),
                        ),
                    )]),
            )
        };
        Formula::exists_in(
            u.clone(),
            x.clone(),
            Formula::exists_in(
                v.clone(),
                x.clone(),
                Formula::and_all([
                    set_eq(x, &[Term::var(&u), Term::var(&v)], &w),
                    set_eq(&Term::var(&u), &[a.clone()], &w),
                    set_eq(&Term::var(&v), &[a.clone(), b.clone()], &w),
                ]),
            ),
        )
    }

    /// `out` is the component of the model tuple reached by peeling
    /// `lefts` times to the left and then taking the side given by
    /// `right`. With the left-nested layout, the universe sits at the
    /// bottom left and relation `j` is the right component after
    /// `k - 1 - j` left steps.
    fn component(&mut self, from: &Term, lefts: usize, right: bool, body: impl FnOnce(&mut Self, &Term) -> Formula) -> Formula {
        if lefts == 0 && !right {
            return body(self, from);
        }
        let l = self.fresh("ql");
        let r = self.fresh("qr");
        let pair = self.pair_eq(from, &Term::var(&l), &Term::var(&r));
        let inner = if lefts > 0 {
            self.component(&Term::var(&l), lefts - 1, right, body)
        } else {
            body(self, &Term::var(&r))
        };
        Formula::exists_in(
            l.clone(),
            self.t(),
            Formula::exists_in(r.clone(), self.t(), Formula::and(pair, inner)),
        )
    }

    fn with_universe(&mut self, body: impl FnOnce(&mut Self, &Term) -> Formula) -> Formula {
        // peel to the bottom-left corner
        self.component(&Term::var(MODEL_VAR), self.relation_count, false, body)
    }

    fn with_relation(
        &mut self,
        pos: usize,
        body: impl FnOnce(&mut Self, &Term) -> Formula,
    ) -> Formula {
        if self.relation_count == 0 {
            unreachable!("relation lookup in a relation-free language");
        }
        self.component(
            &Term::var(MODEL_VAR),
            self.relation_count - 1 - pos,
            true,
            body,
        )
    }

    /// `w = (args...)` via the left nesting, binding intermediate tuples
    /// inside `t_`.
    fn tuple_eq(&mut self, w: &Term, args: &[Term]) -> Formula {
        match args {
            [] => unreachable!("nullary relation rows are excluded earlier"),
            [a] => Formula::eq(w.clone(), a.clone()),
            [a, b] => self.pair_eq(w, a, b),
            [front @ .., last] => {
                let p = self.fresh("qp");
                let prefix = self.tuple_eq(&Term::var(&p), front);
                let outer = self.pair_eq(w, &Term::var(&p), last);
                Formula::exists_in(
                    p.clone(),
                    self.t(),
                    Formula::and(prefix, outer),
                )
            }
        }
    }

    fn bar(&mut self, f: &Formula) -> Result<Formula, EncodeError> {
        Ok(match f {
            Formula::Eq(a, b) => {
                check_var(a)?;
                check_var(b)?;
                f.clone()
            }
            Formula::Rel(name, args) => {
                for a in args {
                    check_var(a)?;
                }
                let pos = *self
                    .positions
                    .get(name.as_str())
                    .ok_or_else(|| EncodeError::UnknownRelation(name.clone()))?;
                if args.len() == 1 {
                    // unary relation: the graph holds elements directly
                    let arg = args[0].clone();
                    self.with_relation(pos, |_, r| Formula::mem(arg, r.clone()))
                } else {
                    let args = args.clone();
                    let w = self.fresh("qt");
                    let t = self.t();
                    let tuple_and_member = {
                        let weq = self.tuple_eq(&Term::var(&w), &args);
                        let wvar = Term::var(&w);
                        self.with_relation(pos, move |_, r| {
                            Formula::and(weq, Formula::mem(wvar, r.clone()))
                        })
                    };
                    Formula::exists_in(w, t, tuple_and_member)
                }
            }
            Formula::Mem(..) => return Err(EncodeError::NonVariableTerm),
            Formula::Not(g) => Formula::not(self.bar(g)?),
            Formula::And(a, b) => Formula::and(self.bar(a)?, self.bar(b)?),
            Formula::Forall(v, body) => {
                let inner = self.bar(body)?;
                let v = v.clone();
                self.with_universe(move |_, a| Formula::forall_in(v, a.clone(), inner))
            }
            _ => unreachable!("normalized formulas only"),
        })
    }
}

fn check_var(t: &Term) -> Result<(), EncodeError> {
    match t {
        Term::Var(_) => Ok(()),
        _ => Err(EncodeError::NonVariableTerm),
    }
}

/// The bounded counterpart of a first-order formula over a relational
/// language: satisfaction in the structure equals bounded evaluation of
/// the result with `m_` bound to the encoding and `t_` to a transitive
/// set containing it.
pub fn bar_formula(f: &Formula, lang: &Language) -> Result<Formula, EncodeError> {
    if !lang.relations_only() {
        return Err(EncodeError::FunctionSymbols);
    }
    let positions: BTreeMap<&str, usize> = lang
        .relations()
        .enumerate()
        .map(|(i, (name, _))| (name, i))
        .collect();
    let mut ctx = BarCtx {
        relation_count: positions.len(),
        positions,
        counter: 0,
    };
    let out = ctx.bar(&f.normalize())?;
    debug_assert!(out.is_bounded());
    Ok(out)
}
