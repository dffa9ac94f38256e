//! The thirteen closure facts of a universe, checked constructively over
//! a materialized level: each object is built and its rank asserted to
//! stay within the expected level, without ever materializing the bigger
//! levels themselves.

use std::collections::BTreeSet;

use crate::entity::{
    enumerate_vn, is_transitive, kuratowski, rank, tuple, BaseSet, Entity, EntityError,
};
use crate::report::CheckReport;

/// Relation entities: sets whose members all decode as pairs.
pub fn is_relation_entity(e: &Entity) -> bool {
    e.is_set() && e.members().iter().all(|m| crate::entity::decode_pair(m).is_ok())
}

pub fn relation_domain(r: &Entity) -> Entity {
    Entity::set(
        r.members()
            .iter()
            .filter_map(|m| crate::entity::decode_pair(m).ok())
            .map(|(a, _)| a),
    )
}

pub fn relation_range(r: &Entity) -> Entity {
    Entity::set(
        r.members()
            .iter()
            .filter_map(|m| crate::entity::decode_pair(m).ok())
            .map(|(_, b)| b),
    )
}

pub fn relation_inverse(r: &Entity) -> Entity {
    Entity::set(
        r.members()
            .iter()
            .filter_map(|m| crate::entity::decode_pair(m).ok())
            .map(|(a, b)| kuratowski(b, a)),
    )
}

pub fn relation_image(r: &Entity, c: &Entity) -> Entity {
    Entity::set(
        r.members()
            .iter()
            .filter_map(|m| crate::entity::decode_pair(m).ok())
            .filter(|(a, _)| c.contains(a))
            .map(|(_, b)| b),
    )
}

/// `r` followed after `s`: pairs `(x,z)` with `(x,y)` in `s` and `(y,z)`
/// in `r`.
pub fn relation_compose(r: &Entity, s: &Entity) -> Entity {
    let mut out = Vec::new();
    for sp in s.members() {
        let Ok((x, y)) = crate::entity::decode_pair(sp) else { continue };
        for rp in r.members() {
            let Ok((y2, z)) = crate::entity::decode_pair(rp) else { continue };
            if y == y2 {
                out.push(kuratowski(x.clone(), z.clone()));
            }
        }
    }
    Entity::set(out)
}

/// Is the entity the graph of a total function from `dom` to `cod`?
pub fn is_function_from_to(f: &Entity, dom: &Entity, cod: &Entity) -> bool {
    if !is_relation_entity(f) {
        return false;
    }
    let pairs: Vec<(Entity, Entity)> = f
        .members()
        .iter()
        .map(|m| crate::entity::decode_pair(m).unwrap())
        .collect();
    if !pairs
        .iter()
        .all(|(a, b)| dom.contains(a) && cod.contains(b))
    {
        return false;
    }
    dom.members().iter().all(|a| {
        let values: BTreeSet<&Entity> = pairs
            .iter()
            .filter(|(x, _)| x == a)
            .map(|(_, y)| y)
            .collect();
        values.len() == 1
    })
}

pub fn function_apply(f: &Entity, a: &Entity) -> Option<Entity> {
    f.members().iter().find_map(|m| {
        let (x, y) = crate::entity::decode_pair(m).ok()?;
        (&x == a).then_some(y)
    })
}

/// All function graphs from `dom` to `cod`.
pub fn function_space(dom: &Entity, cod: &Entity) -> Entity {
    let dom_members = dom.members();
    let n = cod.members().len();
    if dom_members.is_empty() {
        return Entity::set([Entity::empty_set()]);
    }
    if n == 0 {
        return Entity::empty_set();
    }
    assert!(
        n.checked_pow(dom_members.len() as u32).is_some_and(|c| c <= 100_000),
        "function space too large"
    );
    let mut graphs: Vec<Vec<Entity>> = vec![Vec::new()];
    for a in dom_members {
        let mut next = Vec::with_capacity(graphs.len() * n);
        for g in &graphs {
            for b in cod.members() {
                let mut g2 = g.clone();
                g2.push(kuratowski(a.clone(), b.clone()));
                next.push(g2);
            }
        }
        graphs = next;
    }
    Entity::set(graphs.into_iter().map(Entity::set))
}

/// All choice functions through a family of sets: graphs `g` with domain
/// the family itself and `g(A)` a member of `A`.
pub fn product_of_family(family: &Entity) -> Entity {
    let sets = family.members();
    if sets.is_empty() {
        return Entity::set([Entity::empty_set()]);
    }
    if sets.iter().any(|s| s.members().is_empty()) {
        return Entity::empty_set();
    }
    let mut graphs: Vec<Vec<Entity>> = vec![Vec::new()];
    for s in sets {
        let mut next = Vec::new();
        for g in &graphs {
            for choice in s.members() {
                let mut g2 = g.clone();
                g2.push(kuratowski(s.clone(), choice.clone()));
                next.push(g2);
            }
        }
        graphs = next;
        assert!(graphs.len() <= 100_000, "product too large");
    }
    Entity::set(graphs.into_iter().map(Entity::set))
}

/// Union of the members of a family.
pub fn union_of_family(family: &Entity) -> Entity {
    Entity::set(
        family
            .members()
            .iter()
            .flat_map(|m| m.members().iter().cloned()),
    )
}

/// Intersection of the members of a nonempty family; atoms contribute no
/// members.
pub fn intersection_of_family(family: &Entity) -> Option<Entity> {
    let mut it = family.members().iter();
    let first = it.next()?;
    let mut acc = first.clone();
    for m in it {
        acc = acc.intersection(m);
    }
    Some(acc)
}

/// Run the closure-property suite over the n-th level of the base:
/// singletons, finite unions, finite subsets, subsets of members, indexed
/// and internal unions, intersections, tuples, relations, the
/// domain/range/inverse/image package, functions, function spaces, and
/// finite products, each built concretely and placed in its level by rank.
pub fn check_closure_properties(
    base: &BaseSet,
    n: usize,
    cap: u64,
) -> Result<CheckReport, EntityError> {
    let level = enumerate_vn(base, n, cap)?;
    let sets: Vec<&Entity> = level.iter().filter(|e| e.is_set()).collect();
    let mut report = CheckReport::passing();
    report.stats.max_depth = n;

    let check = |item: &str, cond: bool, detail: String, report: &mut CheckReport| {
        report.stats.cases_checked += 1;
        if !cond {
            report.push_counterexample(item.to_string(), detail);
        }
    };
    let rk = |e: &Entity| rank(e, base).expect("closure objects stay over the base");

    // 1: singletons climb exactly one level
    for e in &level {
        let single = Entity::set([(*e).clone()]);
        check(
            "singleton",
            rk(&single) == rk(e) + 1,
            format!("{{{e}}} has rank {}", rk(&single)),
            &mut report,
        );
    }
    // 2: binary (hence finite) unions stay in the level
    for a in &sets {
        for b in &sets {
            let u = a.union(b);
            check(
                "finite-union",
                rk(&u) <= rk(a).max(rk(b)),
                format!("{a} ∪ {b} has rank {}", rk(&u)),
                &mut report,
            );
        }
    }
    // 3: finite subsets of the level land one level up
    {
        let sample: Vec<Entity> = level.iter().take(8).cloned().collect();
        let s = Entity::set(sample);
        check(
            "finite-subset-of-level",
            rk(&s) <= n + 1,
            format!("{s} has rank {}", rk(&s)),
            &mut report,
        );
    }
    // 4: subsets of members stay in the level
    for b in &sets {
        for sub in b.powerset().members() {
            check(
                "subset-of-member",
                rk(sub) <= rk(b).max(1),
                format!("{sub} ⊆ {b} has rank {}", rk(sub)),
                &mut report,
            );
        }
    }
    // 5/6: unions over a family that is itself a member
    for fam in sets.iter().filter(|f| f.members().iter().all(|m| m.is_set())) {
        let u = union_of_family(fam);
        check(
            "family-union",
            rk(&u) <= rk(fam).saturating_sub(1).max(1),
            format!("⋃{fam} has rank {}", rk(&u)),
            &mut report,
        );
    }
    // 7: intersections of nonempty families of sets
    for fam in sets
        .iter()
        .filter(|f| !f.is_empty() && f.members().iter().all(|m| m.is_set()))
    {
        let i = intersection_of_family(fam).unwrap();
        let bound = fam.members().iter().map(|m| rk(m)).min().unwrap();
        check(
            "family-intersection",
            rk(&i) <= bound.max(1),
            format!("⋂{fam} has rank {}", rk(&i)),
            &mut report,
        );
    }
    // 8: pairs and longer tuples
    for a in &level {
        for b in &level {
            let p = kuratowski((*a).clone(), (*b).clone());
            check(
                "pair",
                rk(&p) == rk(a).max(rk(b)) + 2,
                format!("({a},{b}) has rank {}", rk(&p)),
                &mut report,
            );
        }
    }
    {
        let a = Entity::atom(base.atom_names().next().unwrap());
        let triple = tuple(&[a.clone(), a.clone(), a.clone()]);
        check(
            "triple",
            rk(&triple) == 4,
            format!("(a,a,a) has rank {}", rk(&triple)),
            &mut report,
        );
    }

    // relations over the base: subsets of X × X
    let base_entity = base.as_entity();
    let pairs = base_entity.product(&base_entity);
    let relations: Vec<Entity> = pairs.powerset().members().to_vec();
    // 9: relations live two levels above their columns
    for r in &relations {
        check(
            "relation",
            rk(r) <= 3,
            format!("{r} has rank {}", rk(r)),
            &mut report,
        );
    }
    // 10: domain, range, inverse, image
    for r in &relations {
        let d = relation_domain(r);
        let g = relation_range(r);
        let inv = relation_inverse(r);
        check(
            "relation-domain-range",
            rk(&d) <= 1 && rk(&g) <= 1,
            format!("dom {d}, ran {g}"),
            &mut report,
        );
        check(
            "relation-inverse",
            rk(&inv) <= 3 && relation_inverse(&inv) == *r,
            format!("inverse of {r} is {inv}"),
            &mut report,
        );
        for c in base_entity.powerset().members() {
            let img = relation_image(r, c);
            check(
                "relation-image",
                img.is_subset_of(&g),
                format!("{r}[{c}] = {img} escapes the range"),
                &mut report,
            );
        }
    }
    // 11: functions are relations with images and preimages inside
    for dom in base_entity.powerset().members() {
        for cod in base_entity.powerset().members() {
            let space = function_space(dom, cod);
            for f in space.members() {
                check(
                    "function-is-graph",
                    is_function_from_to(f, dom, cod) && rk(f) <= 3,
                    format!("{f}: {dom} → {cod}"),
                    &mut report,
                );
            }
            // 12: the function space itself is an entity one level up
            check(
                "function-space",
                rk(&space) <= 4,
                format!("{cod}^{dom} has rank {}", rk(&space)),
                &mut report,
            );
        }
    }
    // 13: finite products of families over the base
    for fam_members in base_entity.powerset().powerset().members() {
        if fam_members.members().is_empty() {
            continue;
        }
        let prod = product_of_family(fam_members);
        for g in prod.members() {
            check(
                "product-choice",
                is_function_from_to(g, fam_members, &union_of_family(fam_members)),
                format!("{g} is not a choice function through {fam_members}"),
                &mut report,
            );
        }
        check(
            "product",
            rk(&prod) <= 6,
            format!("∏{fam_members} has rank {}", rk(&prod)),
            &mut report,
        );
    }

    // the materialized levels are transitive over their sets
    for e in &sets {
        check(
            "level-transitivity",
            e.members()
                .iter()
                .all(|m| m.is_atom() || level.contains(m)),
            format!("member of {e} escapes the level"),
            &mut report,
        );
    }
    let level_entity = Entity::set(level.clone());
    check(
        "level-is-transitive-over-sets",
        is_transitive(&level_entity),
        "materialized level is not transitive".to_string(),
        &mut report,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::parse_entity;

    #[test]
    fn all_thirteen_items_pass_over_two_atoms() {
        let base = BaseSet::new(["a", "b"]);
        let report = check_closure_properties(&base, 2, crate::entity::DEFAULT_CAP).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.stats.cases_checked > 100);
    }

    #[test]
    fn pair_rank_spot_value() {
        let base = BaseSet::new(["a", "b"]);
        let p = kuratowski(Entity::atom("a"), Entity::atom("b"));
        assert_eq!(rank(&p, &base).unwrap(), 2);
    }

    #[test]
    fn function_space_spot_value() {
        let a = parse_entity("{a}").unwrap();
        let b = parse_entity("{b}").unwrap();
        let space = function_space(&a, &b);
        // {{(a,b)}}
        assert_eq!(space.len(), 1);
        let f = &space.members()[0];
        assert!(is_function_from_to(f, &a, &b));
        assert_eq!(
            function_apply(f, &Entity::atom("a")).unwrap(),
            Entity::atom("b")
        );
        // empty domain: exactly the empty graph
        let none = function_space(&Entity::empty_set(), &b);
        assert_eq!(none, parse_entity("{{}}").unwrap());
        // empty codomain with nonempty domain: no functions
        assert_eq!(function_space(&a, &Entity::empty_set()), Entity::empty_set());
    }

    #[test]
    fn relation_algebra_round_trips() {
        let r = Entity::set([
            kuratowski(Entity::atom("a"), Entity::atom("b")),
            kuratowski(Entity::atom("b"), Entity::atom("b")),
        ]);
        assert!(is_relation_entity(&r));
        assert_eq!(relation_domain(&r), parse_entity("{a,b}").unwrap());
        assert_eq!(relation_range(&r), parse_entity("{b}").unwrap());
        assert_eq!(relation_inverse(&relation_inverse(&r)), r);
        let c = parse_entity("{a}").unwrap();
        assert_eq!(relation_image(&r, &c), parse_entity("{b}").unwrap());
        // compose with the identity on {a,b}
        let id = Entity::set([
            kuratowski(Entity::atom("a"), Entity::atom("a")),
            kuratowski(Entity::atom("b"), Entity::atom("b")),
        ]);
        assert_eq!(relation_compose(&r, &id), r);
        assert_eq!(relation_compose(&id, &r), r);
    }

    #[test]
    fn product_of_family_counts() {
        let fam = parse_entity("{{a,b},{c}}").unwrap();
        let prod = product_of_family(&fam);
        assert_eq!(prod.len(), 2);
        let empty_factor = parse_entity("{{a},{}}").unwrap();
        assert_eq!(product_of_family(&empty_factor), Entity::empty_set());
    }
}
