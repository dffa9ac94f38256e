//! Constructors for the bounded formulas that define basic set-theoretic
//! notions inside an epsilon structure: emptiness, finite sets, tuples,
//! subsets, products, functions, cumulative-level membership, the
//! finite-bijection formula, and the level formulas used for truncation.
//!
//! Every builder returns a bounded formula.

use std::collections::HashMap;
use std::sync::Mutex;

use once_cell::sync::Lazy;

use crate::entity::{kuratowski, Entity};

use super::{Formula, LogicError, Term};

/// Which defining formula to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhiKind {
    /// `x = {}` — free variable `x`.
    Empty,
    /// `x = {y1,...,yn}` — free variables `x, y1..yn`.
    FiniteSet(usize),
    /// `x = (y1,...,yn)` under the left-nested pair encoding — free
    /// variables `x, y1..yn`.
    Tuple(usize),
    /// `x ⊆ y` — free variables `x, y`.
    Subset,
    /// `x = y × z` — free variables `x, y, z`.
    Product,
    /// `x : y → z` — free variables `x, y, z`.
    Function,
    /// `y` lies in the n-th cumulative level over the base `x` — free
    /// variables `x, y`.
    VnMember(usize),
    /// As `VnMember(n)`, and `y` is a set (not a member of `x`).
    VnSet(usize),
}

static PHI_CACHE: Lazy<Mutex<HashMap<PhiKind, Formula>>> = Lazy::new(Mutex::default);

fn var(n: &str) -> Term {
    Term::var(n)
}

/// `y1 ∈ x ∧ ... ∧ yn ∈ x ∧ ∀w∈x (w=y1 ∨ ... ∨ w=yn)` with the member
/// slots given as terms. `w` must not collide with the slots.
fn finite_set_formula(x: &Term, members: &[Term], scratch: &str) -> Formula {
    let w = var(scratch);
    let each_in = members
        .iter()
        .map(|m| Formula::mem(m.clone(), x.clone()));
    let only = Formula::forall_in(
        scratch,
        x.clone(),
        Formula::or_all(members.iter().map(|m| Formula::eq(w.clone(), m.clone()))),
    );
    Formula::and_all(each_in.chain([only]))
}

/// `x = (a,b)`, i.e. `x = {{a},{a,b}}`, with fresh scratch variables
/// suffixed by `lvl` so nested uses do not capture each other.
fn pair_formula(x: &Term, a: &Term, b: &Term, lvl: usize) -> Formula {
    let u = format!("u{lvl}");
    let v = format!("v{lvl}");
    let w = format!("w{lvl}");
    Formula::exists_in(
        u.clone(),
        x.clone(),
        Formula::exists_in(
            v.clone(),
            x.clone(),
            Formula::and_all([
                finite_set_formula(x, &[var(&u), var(&v)], &w),
                finite_set_formula(&var(&u), &[a.clone()], &w),
                finite_set_formula(&var(&v), &[a.clone(), b.clone()], &w),
            ]),
        ),
    )
}

/// `x = (a1,...,an)` via the left nesting `((a1,...,a_{n-1}), an)`.
fn tuple_formula(x: &Term, parts: &[Term], lvl: usize) -> Formula {
    match parts {
        [] => panic!("empty tuple"),
        [a] => Formula::eq(x.clone(), a.clone()),
        [a, b] => pair_formula(x, a, b, lvl),
        [front @ .., last] => {
            let p = format!("p{lvl}");
            let u = format!("u{lvl}");
            let v = format!("v{lvl}");
            let w = format!("w{lvl}");
            // x = {u,v}, u = {p}, v = {p,last}, p = (front)
            Formula::exists_in(
                u.clone(),
                x.clone(),
                Formula::exists_in(
                    v.clone(),
                    x.clone(),
                    Formula::and_all([
                        finite_set_formula(x, &[var(&u), var(&v)], &w),
                        Formula::exists_in(
                            p.clone(),
                            var(&u),
                            Formula::and_all([
                                finite_set_formula(&var(&u), &[var(&p)], &w),
                                finite_set_formula(&var(&v), &[var(&p), last.clone()], &w),
                                tuple_formula(&var(&p), front, lvl + 1),
                            ]),
                        ),
                    ]),
                ),
            )
        }
    }
}

fn subset_formula(x: &Term, y: &Term, scratch: &str) -> Formula {
    Formula::forall_in(
        scratch,
        x.clone(),
        Formula::mem(var(scratch), y.clone()),
    )
}

/// `(u,v) ∈ r`, encoded as `∃w∈r (w = (u,v))`.
fn pair_in(r: &Term, u: &Term, v: &Term, lvl: usize) -> Formula {
    let w = format!("m{lvl}");
    Formula::exists_in(w.clone(), r.clone(), pair_formula(&var(&w), u, v, lvl))
}

fn product_formula(x: &Term, y: &Term, z: &Term) -> Formula {
    let forward = Formula::forall_in(
        "u0",
        x.clone(),
        Formula::exists_in(
            "v0",
            y.clone(),
            Formula::exists_in("w0", z.clone(), pair_formula(&var("u0"), &var("v0"), &var("w0"), 1)),
        ),
    );
    let backward = Formula::forall_in(
        "v0",
        y.clone(),
        Formula::forall_in(
            "w0",
            z.clone(),
            Formula::exists_in("u0", x.clone(), pair_formula(&var("u0"), &var("v0"), &var("w0"), 1)),
        ),
    );
    Formula::and(forward, backward)
}

fn function_formula(f: &Term, dom: &Term, cod: &Term) -> Formula {
    // graph shape: every member of f is a pair from dom × cod
    let graph = Formula::forall_in(
        "g0",
        f.clone(),
        Formula::exists_in(
            "v0",
            dom.clone(),
            Formula::exists_in("w0", cod.clone(), pair_formula(&var("g0"), &var("v0"), &var("w0"), 1)),
        ),
    );
    // totality with uniqueness: ∀v∈dom ∃!w∈cod ((v,w) ∈ f)
    let f2 = f.clone();
    let total_unique = Formula::forall_in(
        "v0",
        dom.clone(),
        Formula::exists_unique_in("w0", cod.clone(), move |w| {
            pair_in(&f2, &var("v0"), w, 2)
        }),
    );
    Formula::and(graph, total_unique)
}

fn vn_member_formula(base: &Term, cand: &Term, n: usize) -> Formula {
    if n == 0 {
        return Formula::mem(cand.clone(), base.clone());
    }
    let z = format!("z{n}");
    Formula::or(
        Formula::mem(cand.clone(), base.clone()),
        Formula::forall_in(z.clone(), cand.clone(), vn_member_formula(base, &var(&z), n - 1)),
    )
}

/// Build one of the defining formulas. Results are memoized per kind.
pub fn build_phi(kind: PhiKind) -> Formula {
    if let Some(f) = PHI_CACHE.lock().unwrap().get(&kind) {
        return f.clone();
    }
    let x = var("x");
    let f = match kind {
        PhiKind::Empty => Formula::forall_in("y", x, Formula::neq(var("y"), var("y"))),
        PhiKind::FiniteSet(n) => {
            assert!(n >= 1, "finite-set formula needs n >= 1");
            let members: Vec<Term> = (1..=n).map(|i| var(&format!("y{i}"))).collect();
            finite_set_formula(&x, &members, "w")
        }
        PhiKind::Tuple(n) => {
            assert!(n >= 1, "tuple formula needs n >= 1");
            let parts: Vec<Term> = (1..=n).map(|i| var(&format!("y{i}"))).collect();
            tuple_formula(&x, &parts, 0)
        }
        PhiKind::Subset => subset_formula(&x, &var("y"), "u"),
        PhiKind::Product => product_formula(&x, &var("y"), &var("z")),
        PhiKind::Function => function_formula(&x, &var("y"), &var("z")),
        PhiKind::VnMember(n) => vn_member_formula(&x, &var("y"), n),
        PhiKind::VnSet(n) => Formula::and(
            vn_member_formula(&x, &var("y"), n),
            Formula::not(Formula::mem(var("y"), x)),
        ),
    };
    debug_assert!(f.is_bounded());
    PHI_CACHE.lock().unwrap().insert(kind, f.clone());
    f
}

/// Level formula for truncation, with the argument order `(y, x)`:
/// `nu_0(y,x) = y ∈ x` and `nu_{n+1}(y,x) = nu_n(y,x) ∨ ∀z∈y nu_n(z,x)`.
pub fn build_nu(n: usize) -> Formula {
    vn_member_formula(&var("x"), &var("y"), n)
}

/// `BASE(x) = ∀y∈x ∀z∈y (z ≠ z)`: no member of `x` has members.
pub fn build_base() -> Formula {
    Formula::forall_in(
        "y",
        var("x"),
        Formula::forall_in("z", var("y"), Formula::neq(var("z"), var("z"))),
    )
}

/// An initial segment of the naturals as entities: atoms `"0".."m-1"`,
/// the set of them, their strict order as a pair set, and the powerset of
/// the segment.
pub struct NaturalsPrefix {
    pub len: usize,
    pub atoms: Vec<Entity>,
    pub set: Entity,
    pub less_than: Entity,
    pub powerset: Entity,
}

pub fn naturals_prefix(len: usize) -> NaturalsPrefix {
    assert!(len <= 16, "naturals prefix of length {len}");
    let atoms: Vec<Entity> = (0..len).map(|i| Entity::atom(i.to_string())).collect();
    let set = Entity::set(atoms.clone());
    let mut lt = Vec::new();
    for i in 0..len {
        for j in (i + 1)..len {
            lt.push(kuratowski(atoms[i].clone(), atoms[j].clone()));
        }
    }
    NaturalsPrefix {
        len,
        atoms: atoms.clone(),
        set: set.clone(),
        less_than: Entity::set(lt),
        powerset: set.powerset(),
    }
}

/// The bounded formula asserting that `f` is a bijection from
/// `{0,...,n-1}` onto `A`, with free variables `A`, `f`, `n` and the
/// witness segment quantified inside the powerset of the given naturals
/// prefix.
pub fn build_psi_hyperfinite(prefix: &NaturalsPrefix) -> Formula {
    let nats = Term::EntityConst(prefix.set.clone());
    let lt = Term::EntityConst(prefix.less_than.clone());
    let pow = Term::EntityConst(prefix.powerset.clone());
    let cap_a = var("A");
    let f = var("f");
    let n = var("n");
    let seg = var("U");

    let below_n = |m: &Term| -> Formula {
        // m < n, i.e. (m,n) is a member of the order
        pair_in(&lt, m, &n, 7)
    };
    // U = {m in naturals : m < n}
    let segment_is_initial = Formula::and(
        subset_formula(&seg, &nats, "s0"),
        Formula::forall_in(
            "m0",
            nats.clone(),
            Formula::iff(below_n(&var("m0")), Formula::mem(var("m0"), seg.clone())),
        ),
    );
    // every member of f is a pair (u,a) with u in U, a in A
    let graph = Formula::forall_in(
        "g0",
        f.clone(),
        Formula::exists_in(
            "u0",
            seg.clone(),
            Formula::exists_in("a0", cap_a.clone(), pair_formula(&var("g0"), &var("u0"), &var("a0"), 1)),
        ),
    );
    let total = Formula::forall_in(
        "u0",
        seg.clone(),
        Formula::exists_in("a0", cap_a.clone(), pair_in(&f, &var("u0"), &var("a0"), 2)),
    );
    let onto = Formula::forall_in(
        "a0",
        cap_a.clone(),
        Formula::exists_in("u0", seg.clone(), pair_in(&f, &var("u0"), &var("a0"), 2)),
    );
    let single_valued = Formula::forall_in(
        "u0",
        seg.clone(),
        Formula::forall_in(
            "a0",
            cap_a.clone(),
            Formula::forall_in(
                "b0",
                cap_a.clone(),
                Formula::implies(
                    Formula::and(
                        pair_in(&f, &var("u0"), &var("a0"), 3),
                        pair_in(&f, &var("u0"), &var("b0"), 4),
                    ),
                    Formula::eq(var("a0"), var("b0")),
                ),
            ),
        ),
    );
    let injective = Formula::forall_in(
        "u0",
        seg.clone(),
        Formula::forall_in(
            "v0",
            seg.clone(),
            Formula::implies(
                Formula::exists_in(
                    "a0",
                    cap_a.clone(),
                    Formula::and(
                        pair_in(&f, &var("u0"), &var("a0"), 5),
                        pair_in(&f, &var("v0"), &var("a0"), 6),
                    ),
                ),
                Formula::eq(var("u0"), var("v0")),
            ),
        ),
    );

    let psi = Formula::and_all([
        segment_is_initial,
        graph,
        total,
        onto,
        single_valued,
        injective,
    ]);
    let out = Formula::exists_in("U", pow, psi);
    debug_assert!(out.is_bounded());
    out
}

/// Replace every entity constant by its image. Structure is otherwise
/// unchanged, so free variables are preserved.
pub fn star_transform(
    f: &Formula,
    star: &dyn Fn(&Entity) -> Option<Entity>,
) -> Result<Formula, LogicError> {
    fn map_term(t: &Term, star: &dyn Fn(&Entity) -> Option<Entity>) -> Result<Term, LogicError> {
        Ok(match t {
            Term::Var(v) => Term::Var(v.clone()),
            Term::Const(c) => Term::Const(c.clone()),
            Term::Apply(name, args) => Term::Apply(
                name.clone(),
                args.iter()
                    .map(|a| map_term(a, star))
                    .collect::<Result<_, _>>()?,
            ),
            Term::EntityConst(e) => Term::EntityConst(
                star(e).ok_or_else(|| LogicError::UnmappedConstant(e.to_string()))?,
            ),
        })
    }
    Ok(match f {
        Formula::Eq(a, b) => Formula::Eq(map_term(a, star)?, map_term(b, star)?),
        Formula::Mem(a, b) => Formula::Mem(map_term(a, star)?, map_term(b, star)?),
        Formula::Rel(name, ts) => Formula::Rel(
            name.clone(),
            ts.iter()
                .map(|t| map_term(t, star))
                .collect::<Result<_, _>>()?,
        ),
        Formula::Not(g) => Formula::not(star_transform(g, star)?),
        Formula::And(a, b) => Formula::and(star_transform(a, star)?, star_transform(b, star)?),
        Formula::Or(a, b) => Formula::or(star_transform(a, star)?, star_transform(b, star)?),
        Formula::Implies(a, b) => {
            Formula::implies(star_transform(a, star)?, star_transform(b, star)?)
        }
        Formula::Iff(a, b) => Formula::iff(star_transform(a, star)?, star_transform(b, star)?),
        Formula::Forall(v, g) => Formula::forall(v.clone(), star_transform(g, star)?),
        Formula::Exists(v, g) => Formula::exists(v.clone(), star_transform(g, star)?),
        Formula::BoundedForall(v, t, g) => Formula::BoundedForall(
            v.clone(),
            map_term(t, star)?,
            Box::new(star_transform(g, star)?),
        ),
        Formula::BoundedExists(v, t, g) => Formula::BoundedExists(
            v.clone(),
            map_term(t, star)?,
            Box::new(star_transform(g, star)?),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::parse_entity;

    #[test]
    fn phi_library_is_bounded() {
        let mut kinds = vec![
            PhiKind::Empty,
            PhiKind::Subset,
            PhiKind::Product,
            PhiKind::Function,
        ];
        for n in 1..=4 {
            kinds.push(PhiKind::FiniteSet(n));
            kinds.push(PhiKind::Tuple(n));
            kinds.push(PhiKind::VnMember(n));
            kinds.push(PhiKind::VnSet(n));
        }
        for k in kinds {
            let f = build_phi(k);
            assert!(f.is_bounded(), "{k:?} not bounded: {f}");
        }
    }

    #[test]
    fn empty_formula_shape() {
        assert_eq!(build_phi(PhiKind::Empty).to_string(), "forall y in x . y != y");
    }

    #[test]
    fn vn_member_base_case_is_membership() {
        assert_eq!(build_phi(PhiKind::VnMember(0)).to_string(), "y in x");
        assert_eq!(build_nu(0).to_string(), "y in x");
    }

    #[test]
    fn base_formula_shape() {
        assert_eq!(
            build_base().to_string(),
            "forall y in x . forall z in y . z != z"
        );
    }

    #[test]
    fn psi_is_bounded() {
        let prefix = naturals_prefix(4);
        assert!(build_psi_hyperfinite(&prefix).is_bounded());
    }

    #[test]
    fn star_transform_substitutes_constants() {
        let lang = Language::new();
        let f = super::super::parse_formula("x in C_{{a}}", &lang).unwrap();
        let a_set = parse_entity("{a}").unwrap();
        let b_set = parse_entity("{b}").unwrap();
        let mapped = star_transform(&f, &|e| (e == &a_set).then(|| b_set.clone())).unwrap();
        assert_eq!(mapped.to_string(), "x in C_{{b}}");
        assert_eq!(mapped.free_variables(), f.free_variables());

        // constant-free formulas are unchanged
        let g = super::super::parse_formula("forall x . x = x", &lang).unwrap();
        assert_eq!(star_transform(&g, &|_| None).unwrap(), g);

        // unmapped constant is an error
        assert!(matches!(
            star_transform(&f, &|_| None),
            Err(LogicError::UnmappedConstant(_))
        ));
    }

    use super::super::Language;
}
