//! Depth-bounded elementary-embedding checking by semantic saturation.
//!
//! For structures this small, distinct formulas collapse onto few truth
//! tables. The checker explores, level by level, every (A-table, B-table)
//! signature reachable by `{Not, And, Forall}` from the atoms, keeping one
//! witness formula per signature. A formula of depth d has the signature
//! of some level-<=d entry, and whether the embedding condition
//! `A |= phi[a..] iff B |= phi[h(a..)]` holds depends only on the
//! signature. So scanning the reachable signatures decides the condition
//! for every formula of the given depth, and a failing signature's witness
//! is a minimal-depth counterexample. When a level adds no new signature
//! the space is saturated and the verdict covers all depths.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::logic::{Formula, Term};
use crate::report::CheckReport;

use super::{all_assignments, satisfies, Assignment, ElemId, FolError, Structure};

/// Which formula family drives the check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingStyle {
    /// Relation/equality atoms, unbounded quantifiers over the universe.
    FirstOrder,
    /// Membership-style: structures over one binary relation `E`, atoms
    /// `x in y` read as `E(x,y)`, quantifiers bounded (`forall x in y`).
    BoundedEpsilon,
}

/// Truth table of one formula over all assignments of the variable pool.
type Table = Vec<bool>;

struct Side<'a> {
    s: &'a Structure,
    /// all var-pool assignments, index-addressable
    assignments: Vec<Assignment>,
    /// assignment index -> per-variable element positions
    coords: Vec<Vec<usize>>,
}

impl<'a> Side<'a> {
    fn new(s: &'a Structure, pool: &[String]) -> Side<'a> {
        let assignments = all_assignments(s, &pool.to_vec());
        let pos: BTreeMap<&ElemId, usize> = s
            .universe
            .iter()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let coords = assignments
            .iter()
            .map(|a| pool.iter().map(|v| pos[&a[v]]).collect())
            .collect();
        Side {
            s,
            assignments,
            coords,
        }
    }

    fn table_of(&self, f: &Formula) -> Result<Table, FolError> {
        self.assignments
            .iter()
            .map(|a| satisfies(self.s, f, a))
            .collect()
    }

    /// Indices of assignments that agree with `asg` except at variable
    /// `var_idx`, one per universe element, in universe order.
    fn variants(&self, asg_idx: usize, var_idx: usize, pool_len: usize) -> Vec<usize> {
        let n = self.s.universe.len();
        // assignments are in lexicographic order of coords, last variable
        // fastest; stride of var v is n^(pool_len-1-v)
        let stride = n.pow((pool_len - 1 - var_idx) as u32);
        let base = asg_idx - self.coords[asg_idx][var_idx] * stride;
        (0..n).map(|k| base + k * stride).collect()
    }
}

fn forall_project(side: &Side, table: &Table, var_idx: usize, pool_len: usize) -> Table {
    (0..table.len())
        .map(|i| {
            side.variants(i, var_idx, pool_len)
                .into_iter()
                .all(|j| table[j])
        })
        .collect()
}

/// Bounded projection: `forall v in b . phi` where membership is the `E`
/// relation of an epsilon structure.
fn bounded_forall_project(
    side: &Side,
    table: &Table,
    var_idx: usize,
    bound_idx: usize,
    pool_len: usize,
    edges: &BTreeSet<(usize, usize)>,
) -> Table {
    (0..table.len())
        .map(|i| {
            let bound_elem = side.coords[i][bound_idx];
            side.variants(i, var_idx, pool_len)
                .into_iter()
                .enumerate()
                .all(|(elem, j)| !edges.contains(&(elem, bound_elem)) || table[j])
        })
        .collect()
}

fn epsilon_edges(s: &Structure) -> Result<BTreeSet<(usize, usize)>, FolError> {
    let table = s
        .relations
        .get("E")
        .ok_or_else(|| FolError::UnknownSymbol("E".into()))?;
    let pos: BTreeMap<&ElemId, usize> = s
        .universe
        .iter()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    Ok(table
        .iter()
        .map(|row| (pos[&row[0]], pos[&row[1]]))
        .collect())
}

fn pool_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Check that `h` is an elementary embedding from `a` into `b` for every
/// formula of depth <= `depth` over a pool of `vars` variables. On
/// failure the report carries a minimal-depth witness formula and the
/// offending tuple.
pub fn check_elementary_embedding(
    h: &BTreeMap<ElemId, ElemId>,
    a: &Structure,
    b: &Structure,
    depth: usize,
    vars: usize,
    style: EmbeddingStyle,
) -> Result<CheckReport, FolError> {
    if a.lang != b.lang {
        return Err(FolError::Malformed("languages differ".into()));
    }
    for e in &a.universe {
        let img = h
            .get(e)
            .ok_or_else(|| FolError::Malformed(format!("map undefined at `{e}`")))?;
        if !b.universe.contains(img) {
            return Err(FolError::ForeignElement(img.clone()));
        }
    }

    let pool = pool_names(vars);
    let side_a = Side::new(a, &pool);
    let side_b = Side::new(b, &pool);

    // index of the h-image of each A-assignment among B-assignments
    let b_pos: BTreeMap<&ElemId, usize> = b
        .universe
        .iter()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let nb = b.universe.len();
    let mapped: Vec<usize> = side_a
        .assignments
        .iter()
        .map(|asg| {
            pool.iter().fold(0usize, |acc, v| {
                acc * nb + b_pos[&h[&asg[v]]]
            })
        })
        .collect();

    let edges_a;
    let edges_b;
    let atoms: Vec<Formula> = match style {
        EmbeddingStyle::FirstOrder => {
            edges_a = BTreeSet::new();
            edges_b = BTreeSet::new();
            let lang = &a.lang;
            let mut atoms = Vec::new();
            for (name, arity) in lang.relations() {
                let mut tuples = vec![Vec::new()];
                for _ in 0..arity {
                    let mut next = Vec::new();
                    for t in &tuples {
                        for v in &pool {
                            let mut row: Vec<Term> = t.clone();
                            row.push(Term::var(v));
                            next.push(row);
                        }
                    }
                    tuples = next;
                }
                atoms.extend(tuples.into_iter().map(|args| Formula::Rel(name.to_string(), args)));
            }
            for s in &pool {
                for t in &pool {
                    atoms.push(Formula::eq(Term::var(s), Term::var(t)));
                }
            }
            atoms
        }
        EmbeddingStyle::BoundedEpsilon => {
            edges_a = epsilon_edges(a)?;
            edges_b = epsilon_edges(b)?;
            let mut atoms = Vec::new();
            for s in &pool {
                for t in &pool {
                    atoms.push(Formula::Rel("E".into(), vec![Term::var(s), Term::var(t)]));
                }
            }
            for s in &pool {
                for t in &pool {
                    atoms.push(Formula::eq(Term::var(s), Term::var(t)));
                }
            }
            atoms
        }
    };

    let mut report = CheckReport::passing();
    report.stats.max_depth = depth;

    // signature -> witness formula, explored breadth-first by depth
    let mut seen: HashMap<(Table, Table), Formula> = HashMap::new();
    let mut frontier: Vec<(Table, Table, Formula)> = Vec::new();

    let check_and_insert = |ta: Table,
                                tb: Table,
                                f: Formula,
                                seen: &mut HashMap<(Table, Table), Formula>,
                                frontier: &mut Vec<(Table, Table, Formula)>,
                                report: &mut CheckReport| {
        if seen.contains_key(&(ta.clone(), tb.clone())) {
            return;
        }
        report.stats.formulas_checked += 1;
        if report.passed() {
            for (i, &bi) in mapped.iter().enumerate() {
                report.stats.cases_checked += 1;
                if ta[i] != tb[bi] {
                    report.push_counterexample(
                        f.to_string(),
                        format!(
                            "assignment {:?}: left side {} but image side {}",
                            side_a.assignments[i], ta[i], tb[bi]
                        ),
                    );
                    break;
                }
            }
        }
        seen.insert((ta.clone(), tb.clone()), f.clone());
        frontier.push((ta, tb, f));
    };

    for atom in &atoms {
        let ta = side_a.table_of(atom)?;
        let tb = side_b.table_of(atom)?;
        check_and_insert(ta, tb, atom.clone(), &mut seen, &mut frontier, &mut report);
    }

    let mut cumulative: Vec<(Table, Table, Formula)> = frontier.clone();
    for _level in 1..=depth {
        let mut next: Vec<(Table, Table, Formula)> = Vec::new();
        let prev_frontier = std::mem::take(&mut frontier);
        // negations
        for (ta, tb, f) in &cumulative {
            let nta = ta.iter().map(|x| !x).collect();
            let ntb = tb.iter().map(|x| !x).collect();
            check_and_insert(nta, ntb, Formula::not(f.clone()), &mut seen, &mut next, &mut report);
        }
        // conjunctions with at least one recent operand
        let is_recent: Vec<bool> = cumulative
            .iter()
            .map(|e| prev_frontier.iter().any(|p| p.2 == e.2))
            .collect();
        for (i, (ta1, tb1, f1)) in cumulative.iter().enumerate() {
            for (j, (ta2, tb2, f2)) in cumulative.iter().enumerate() {
                if !(is_recent[i] || is_recent[j]) {
                    continue;
                }
                let ta: Table = ta1.iter().zip(ta2).map(|(x, y)| *x && *y).collect();
                let tb: Table = tb1.iter().zip(tb2).map(|(x, y)| *x && *y).collect();
                check_and_insert(
                    ta,
                    tb,
                    Formula::and(f1.clone(), f2.clone()),
                    &mut seen,
                    &mut next,
                    &mut report,
                );
            }
        }
        // quantifications
        for (ta, tb, f) in &cumulative {
            for (vi, v) in pool.iter().enumerate() {
                match style {
                    EmbeddingStyle::FirstOrder => {
                        let pta = forall_project(&side_a, ta, vi, pool.len());
                        let ptb = forall_project(&side_b, tb, vi, pool.len());
                        check_and_insert(
                            pta,
                            ptb,
                            Formula::forall(v.clone(), f.clone()),
                            &mut seen,
                            &mut next,
                            &mut report,
                        );
                    }
                    EmbeddingStyle::BoundedEpsilon => {
                        for (bi, bv) in pool.iter().enumerate() {
                            if bi == vi {
                                continue;
                            }
                            let pta = bounded_forall_project(
                                &side_a,
                                ta,
                                vi,
                                bi,
                                pool.len(),
                                &edges_a,
                            );
                            let ptb = bounded_forall_project(
                                &side_b,
                                tb,
                                vi,
                                bi,
                                pool.len(),
                                &edges_b,
                            );
                            check_and_insert(
                                pta,
                                ptb,
                                Formula::forall_in(v.clone(), Term::var(bv), f.clone()),
                                &mut seen,
                                &mut next,
                                &mut report,
                            );
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break; // saturated: deeper formulas add no new signature
        }
        frontier = next.clone();
        cumulative.extend(next);
    }
    Ok(report)
}

/// Bounded-elementary comparison of an epsilon substructure against its
/// extension via the inclusion map.
pub fn check_bounded_elementary_submodel(
    a: &Structure,
    b: &Structure,
    depth: usize,
    vars: usize,
) -> Result<CheckReport, FolError> {
    let h: BTreeMap<ElemId, ElemId> = a
        .universe
        .iter()
        .map(|e| (e.clone(), e.clone()))
        .collect();
    check_elementary_embedding(&h, a, b, depth, vars, EmbeddingStyle::BoundedEpsilon)
}

/// `A` is a transitive submodel of `B`: both over the language `{E: 2}`,
/// `A`'s universe a subset of `B`'s with the restricted relation, and
/// every `E`-predecessor (in `B`) of an `A`-element lies in `A`.
pub fn is_transitive_submodel(a: &Structure, b: &Structure) -> Result<bool, FolError> {
    let ea = a
        .relations
        .get("E")
        .ok_or_else(|| FolError::UnknownSymbol("E".into()))?;
    let eb = b
        .relations
        .get("E")
        .ok_or_else(|| FolError::UnknownSymbol("E".into()))?;
    let a_univ: BTreeSet<&ElemId> = a.universe.iter().collect();
    if !a_univ.iter().all(|e| b.universe.contains(e)) {
        return Err(FolError::Malformed("carrier is not a subset".into()));
    }
    let restricted: BTreeSet<Vec<ElemId>> = eb
        .iter()
        .filter(|row| a_univ.contains(&row[0]) && a_univ.contains(&row[1]))
        .cloned()
        .collect();
    if &restricted != ea {
        return Err(FolError::Malformed(
            "relation is not the restriction of the extension".into(),
        ));
    }
    for row in eb {
        if a_univ.contains(&row[1]) && !a_univ.contains(&row[0]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sentences over the element-constant expansion of `s`, depth-bounded.
/// All satisfied sentences of depth <= `depth` are included; at depth 0
/// the negations of unsatisfied atoms are added so the atomic picture is
/// complete.
pub fn elementary_diagram(s: &Structure, depth: usize) -> Result<BTreeSet<Formula>, FolError> {
    let mut lang = s.lang.clone();
    let mut expansion = s.clone();
    for e in &s.universe {
        let cname = format!("c_{e}");
        if lang.relation_arity(&cname).is_some() || lang.function_arity(&cname).is_some() {
            return Err(FolError::Malformed(format!(
                "constant name {cname} collides with the language"
            )));
        }
        lang = lang.with_function(&cname, 0);
        expansion
            .functions
            .insert(cname, BTreeMap::from([(Vec::new(), e.clone())]));
    }
    expansion.lang = lang.clone();
    expansion.validate()?;

    let consts: Vec<Term> = s
        .universe
        .iter()
        .map(|e| Term::Const(format!("c_{e}")))
        .collect();
    let vars = vec!["q1".to_string()];
    let formulas = super::enumerate_formulas_with_terms(&lang, depth, &vars, &consts)
        .map_err(|e| FolError::Malformed(e.to_string()))?;

    let empty = Assignment::new();
    let mut out = BTreeSet::new();
    for f in &formulas {
        if !f.free_variables().is_empty() {
            continue;
        }
        if satisfies(&expansion, f, &empty)? {
            out.insert(f.clone());
        } else if f.depth() == 0 {
            out.insert(Formula::not(f.clone()));
        }
    }
    Ok(out)
}

/// The language of epsilon structures: one binary relation.
pub fn epsilon_language() -> crate::logic::Language {
    crate::logic::Language::new().with_relation("E", 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Language;

    fn unary_p(universe: &[&str], p: &[&str]) -> Structure {
        let lang = Language::new().with_relation("P", 1);
        Structure {
            lang,
            universe: universe.iter().map(|s| s.to_string()).collect(),
            relations: BTreeMap::from([(
                "P".to_string(),
                p.iter().map(|e| vec![e.to_string()]).collect(),
            )]),
            functions: BTreeMap::new(),
        }
    }

    fn eps(universe: &[&str], edges: &[(&str, &str)]) -> Structure {
        Structure {
            lang: epsilon_language(),
            universe: universe.iter().map(|s| s.to_string()).collect(),
            relations: BTreeMap::from([(
                "E".to_string(),
                edges
                    .iter()
                    .map(|(x, y)| vec![x.to_string(), y.to_string()])
                    .collect(),
            )]),
            functions: BTreeMap::new(),
        }
    }

    fn identity(s: &Structure) -> BTreeMap<ElemId, ElemId> {
        s.universe.iter().map(|e| (e.clone(), e.clone())).collect()
    }

    #[test]
    fn identity_is_elementary_at_any_depth() {
        for s in [unary_p(&["0"], &[]), unary_p(&["0", "1"], &["0"])] {
            for depth in 0..=3 {
                let r = check_elementary_embedding(
                    &identity(&s),
                    &s,
                    &s,
                    depth,
                    2,
                    EmbeddingStyle::FirstOrder,
                )
                .unwrap();
                assert!(r.passed(), "depth {depth}: {r}");
            }
        }
    }

    #[test]
    fn inclusion_that_breaks_a_universal_sentence() {
        let a = unary_p(&["0"], &["0"]);
        let b = unary_p(&["0", "1"], &["0"]);
        let h = identity(&a);
        let r =
            check_elementary_embedding(&h, &a, &b, 1, 1, EmbeddingStyle::FirstOrder).unwrap();
        assert!(!r.passed());
        let witness = &r.counterexamples[0].formula;
        assert!(witness.contains("forall"), "witness was {witness}");
        // at depth 0 the mismatch is invisible
        let r0 = check_elementary_embedding(&h, &a, &b, 0, 1, EmbeddingStyle::FirstOrder).unwrap();
        assert!(r0.passed());
    }

    #[test]
    fn non_injective_map_fails_on_an_equality_atom() {
        let a = unary_p(&["0", "1"], &[]);
        let b = unary_p(&["0"], &[]);
        let h: BTreeMap<ElemId, ElemId> = BTreeMap::from([
            ("0".to_string(), "0".to_string()),
            ("1".to_string(), "0".to_string()),
        ]);
        let r = check_elementary_embedding(&h, &a, &b, 0, 2, EmbeddingStyle::FirstOrder).unwrap();
        assert!(!r.passed());
        assert!(r.counterexamples[0].formula.contains('='));
    }

    #[test]
    fn transitive_submodels() {
        // chain: b E a E X
        let b = eps(&["b", "a", "X"], &[("b", "a"), ("a", "X")]);
        let downward = eps(&["b", "a"], &[("b", "a")]);
        assert!(is_transitive_submodel(&downward, &b).unwrap());
        let missing = eps(&["a", "X"], &[("a", "X")]);
        assert!(!is_transitive_submodel(&missing, &b).unwrap());
        assert!(is_transitive_submodel(&b, &b).unwrap());
        // not a submodel at all
        let wrong = eps(&["a", "X"], &[]);
        assert!(is_transitive_submodel(&wrong, &b).is_err());
    }

    #[test]
    fn transitive_submodels_are_bounded_elementary() {
        let b = eps(
            &["b", "a", "X", "u"],
            &[("b", "a"), ("a", "X"), ("b", "X"), ("u", "X")],
        );
        let a = eps(&["b", "a"], &[("b", "a")]);
        assert!(is_transitive_submodel(&a, &b).unwrap());
        let r = check_bounded_elementary_submodel(&a, &b, 3, 3).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn diagram_examples() {
        let s = unary_p(&["0"], &[]);
        let d = elementary_diagram(&s, 0).unwrap();
        let c0 = Term::Const("c_0".to_string());
        assert!(d.contains(&Formula::eq(c0.clone(), c0.clone())));
        assert!(d.contains(&Formula::not(Formula::Rel("P".into(), vec![c0.clone()]))));
        // never both a sentence and its negation
        for f in &d {
            assert!(!d.contains(&Formula::not(f.clone())), "{f} and its negation");
        }
    }

    #[test]
    fn diagrams_transport_along_isomorphism() {
        let s1 = unary_p(&["0", "1"], &["0"]);
        let s2 = unary_p(&["a", "b"], &["a"]);
        let d1 = elementary_diagram(&s1, 1).unwrap();
        let d2 = elementary_diagram(&s2, 1).unwrap();
        // rename c_0 -> c_a, c_1 -> c_b in printed form
        let renamed: BTreeSet<String> = d1
            .iter()
            .map(|f| f.to_string().replace("c_0", "c_a").replace("c_1", "c_b"))
            .collect();
        let d2_strings: BTreeSet<String> = d2.iter().map(|f| f.to_string()).collect();
        assert_eq!(renamed, d2_strings);
    }
}
