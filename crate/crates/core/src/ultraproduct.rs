//! Reduced products and ultraproducts of finite structures, the
//! product/quotient satisfaction equivalence checked formula by formula,
//! the diagonal embedding, and a compactness demonstrator.
//!
//! Every filter over a finite index set is the superset family of its
//! kernel (the intersection of its members), so choice functions are
//! equivalent exactly when they agree on the kernel. The canonical
//! representative of a class fixes the kernel coordinates and takes the
//! first universe element everywhere else.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::filters::{Filter, Index, SetFamily, Subset, Ultrafilter};
use crate::fol::{
    all_assignments, check_elementary_embedding, enumerate_formulas, satisfies, Assignment,
    ElemId, EmbeddingStyle, FolError, Structure,
};
use crate::logic::Formula;
use crate::report::CheckReport;

#[derive(Debug, Error)]
pub enum ProductError {
    #[error("index `{0}` has no structure")]
    MissingFactor(Index),
    #[error("factor `{0}` uses a different language")]
    LanguageMismatch(Index),
    #[error("ultrafilter index set does not match the family")]
    IndexMismatch,
    #[error(transparent)]
    Fol(#[from] FolError),
    #[error("enumeration failed: {0}")]
    Enumerate(#[from] crate::fol::EnumerateError),
    #[error("claimed model for subset {0:?} does not satisfy sentence `{1}`")]
    BadSubsetModel(Vec<usize>, String),
    #[error(transparent)]
    Filter(#[from] crate::filters::FilterError),
}

/// Structures sharing one language, indexed by a finite set.
#[derive(Debug, Clone)]
pub struct IndexedFamily {
    pub index_set: Vec<Index>,
    pub structures: BTreeMap<Index, Structure>,
}

impl IndexedFamily {
    pub fn new(
        index_set: impl IntoIterator<Item = impl Into<Index>>,
        structures: BTreeMap<Index, Structure>,
    ) -> Result<IndexedFamily, ProductError> {
        let index_set: Vec<Index> = index_set.into_iter().map(Into::into).collect();
        let mut lang = None;
        for i in &index_set {
            let s = structures
                .get(i)
                .ok_or_else(|| ProductError::MissingFactor(i.clone()))?;
            s.validate()?;
            match &lang {
                None => lang = Some(s.lang.clone()),
                Some(l) if *l == s.lang => {}
                Some(_) => return Err(ProductError::LanguageMismatch(i.clone())),
            }
        }
        Ok(IndexedFamily {
            index_set,
            structures,
        })
    }

    fn factor(&self, i: &Index) -> &Structure {
        &self.structures[i]
    }

    fn index_subset(&self) -> BTreeSet<Index> {
        self.index_set.iter().cloned().collect()
    }
}

/// A choice function through the family.
pub type ChoiceFunction = BTreeMap<Index, ElemId>;

/// The quotient of the product by agreement on a kernel of indices.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub structure: Structure,
    /// class id -> canonical representative
    pub reps: BTreeMap<ElemId, ChoiceFunction>,
    pub kernel: BTreeSet<Index>,
    /// present when the quotient was taken by a filter that is not an
    /// ultrafilter; negation clauses of the equivalence may then fail
    pub warning: Option<String>,
}

impl Quotient {
    /// Canonical representative of the class of `f`.
    pub fn canonical_rep(&self, fam: &IndexedFamily, f: &ChoiceFunction) -> ChoiceFunction {
        canonical_rep(fam, &self.kernel, f)
    }

    /// Class id of the choice function `f`.
    pub fn class_of(&self, fam: &IndexedFamily, f: &ChoiceFunction) -> ElemId {
        render_class(&self.canonical_rep(fam, f), &fam.index_set)
    }
}

fn canonical_rep(fam: &IndexedFamily, kernel: &BTreeSet<Index>, f: &ChoiceFunction) -> ChoiceFunction {
    fam.index_set
        .iter()
        .map(|i| {
            let v = if kernel.contains(i) {
                f[i].clone()
            } else {
                fam.factor(i).universe[0].clone()
            };
            (i.clone(), v)
        })
        .collect()
}

fn render_class(rep: &ChoiceFunction, index_order: &[Index]) -> ElemId {
    let parts: Vec<&str> = index_order.iter().map(|i| rep[i].as_str()).collect();
    format!("[{}]", parts.join("|"))
}

fn all_choice_functions(fam: &IndexedFamily) -> Vec<ChoiceFunction> {
    let mut out: Vec<ChoiceFunction> = vec![BTreeMap::new()];
    for i in &fam.index_set {
        let mut next = Vec::new();
        for f in &out {
            for e in &fam.factor(i).universe {
                let mut g = f.clone();
                g.insert(i.clone(), e.clone());
                next.push(g);
            }
        }
        out = next;
    }
    out
}

fn build_quotient(
    fam: &IndexedFamily,
    kernel: &BTreeSet<Index>,
    member_test: impl Fn(&Subset) -> bool,
    warning: Option<String>,
) -> Result<Quotient, ProductError> {
    // universe: canonical representatives, ordered by their value
    // positions so relabeled inputs produce relabeled outputs
    let mut reps: Vec<ChoiceFunction> = Vec::new();
    let mut seen = BTreeSet::new();
    for f in all_choice_functions(fam) {
        let rep = canonical_rep(fam, kernel, &f);
        if seen.insert(render_class(&rep, &fam.index_set)) {
            reps.push(rep);
        }
    }
    reps.sort_by_key(|rep| {
        fam.index_set
            .iter()
            .map(|i| {
                let u = &fam.factor(i).universe;
                u.iter().position(|e| e == &rep[i]).unwrap()
            })
            .collect::<Vec<_>>()
    });

    let lang = fam.factor(&fam.index_set[0]).lang.clone();
    let universe: Vec<ElemId> = reps
        .iter()
        .map(|r| render_class(r, &fam.index_set))
        .collect();
    let rep_map: BTreeMap<ElemId, ChoiceFunction> = universe
        .iter()
        .cloned()
        .zip(reps.iter().cloned())
        .collect();

    // relations: R(f1/F,...) iff {i : R(f1(i),...)} is a member
    let mut relations: BTreeMap<String, BTreeSet<Vec<ElemId>>> = BTreeMap::new();
    for (name, arity) in lang.relations() {
        let mut table = BTreeSet::new();
        for row in index_tuples(universe.len(), arity) {
            let agreement: Subset = fam
                .index_set
                .iter()
                .filter(|i| {
                    let i: &Index = i;
                    let args: Vec<ElemId> =
                        row.iter().map(|k| reps[*k][i].clone()).collect();
                    fam.factor(i).relations[name].contains(&args)
                })
                .cloned()
                .collect();
            if member_test(&agreement) {
                table.insert(row.iter().map(|k| universe[*k].clone()).collect());
            }
        }
        relations.insert(name.to_string(), table);
    }

    // functions: apply pointwise, then take the class of the result
    let mut functions: BTreeMap<String, BTreeMap<Vec<ElemId>, ElemId>> = BTreeMap::new();
    for (name, arity) in lang.functions() {
        let mut table = BTreeMap::new();
        for row in index_tuples(universe.len(), arity) {
            let pointwise: ChoiceFunction = fam
                .index_set
                .iter()
                .map(|i| {
                    let args: Vec<ElemId> =
                        row.iter().map(|k| reps[*k][i].clone()).collect();
                    (i.clone(), fam.factor(i).functions[name][&args].clone())
                })
                .collect();
            let value = render_class(
                &canonical_rep(fam, kernel, &pointwise),
                &fam.index_set,
            );
            table.insert(
                row.iter().map(|k| universe[*k].clone()).collect(),
                value,
            );
        }
        functions.insert(name.to_string(), table);
    }

    let structure = Structure {
        lang,
        universe,
        relations,
        functions,
    };
    structure.validate()?;
    Ok(Quotient {
        structure,
        reps: rep_map,
        kernel: kernel.clone(),
        warning,
    })
}

fn index_tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for k in 0..n {
                let mut row = t.clone();
                row.push(k);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// The ultraproduct of the family by an ultrafilter over its index set.
pub fn build_ultraproduct(
    fam: &IndexedFamily,
    u: &Ultrafilter,
) -> Result<Quotient, ProductError> {
    if *u.index_set() != fam.index_subset() {
        return Err(ProductError::IndexMismatch);
    }
    let kernel: BTreeSet<Index> = [u.principal_point().clone()].into();
    build_quotient(fam, &kernel, |s| u.contains(s), None)
}

/// The reduced product by an arbitrary filter. Carries a warning when the
/// filter is not ultra: the construction is still well-defined, but the
/// negation clause of the satisfaction equivalence can fail, which is
/// exactly what the negative test fixtures demonstrate.
pub fn build_reduced_product(
    fam: &IndexedFamily,
    filter: &Filter,
) -> Result<Quotient, ProductError> {
    if *filter.index_set() != fam.index_subset() {
        return Err(ProductError::IndexMismatch);
    }
    let kernel = filter
        .members()
        .fold(filter.index_set().clone(), |acc, m| &acc & m);
    let warning = if crate::filters::is_ultrafilter(filter.family()) {
        None
    } else {
        Some("quotient by a non-ultra filter: negation clauses unverified".to_string())
    };
    build_quotient(fam, &kernel, |s| filter.contains(s), warning)
}

/// Variable pool used by the product equivalence check.
pub const LOS_VARS: [&str; 2] = ["x", "y"];

// Truth tables for all enumerated formulas over one structure, keyed by
// the structure's canonical form. Formulas are identified by their index
// in the shared enumeration, assignments by position, so the cache is
// sound across structures that differ only in element names.
type TableVec = Arc<Vec<Vec<bool>>>;
static TABLE_CACHE: Lazy<Mutex<HashMap<(String, usize), TableVec>>> = Lazy::new(Mutex::default);

fn tables_for(
    s: &Structure,
    formulas: &[Formula],
    depth: usize,
) -> Result<TableVec, ProductError> {
    let key = (s.canonical_key(), depth);
    if let Some(t) = TABLE_CACHE.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let pool: Vec<String> = LOS_VARS.iter().map(|v| v.to_string()).collect();
    let assignments = all_assignments(s, &pool);
    let mut tables = Vec::with_capacity(formulas.len());
    for f in formulas {
        let mut table = Vec::with_capacity(assignments.len());
        for a in &assignments {
            table.push(satisfies(s, f, a)?);
        }
        tables.push(table);
    }
    let arc = Arc::new(tables);
    TABLE_CACHE.lock().unwrap().insert(key, arc.clone());
    Ok(arc)
}

fn assignment_index(s: &Structure, values: &[&ElemId]) -> usize {
    let n = s.universe.len();
    values.iter().fold(0, |acc, v| {
        acc * n + s.universe.iter().position(|e| e == *v).unwrap()
    })
}

/// Verify, for every enumerated formula of the given depth and every
/// tuple of class representatives, that quotient satisfaction coincides
/// with filter membership of the pointwise satisfaction index set. The
/// check is exhaustive; a failure reports both sides.
pub fn los_check(
    fam: &IndexedFamily,
    u: &Ultrafilter,
    depth: usize,
) -> Result<CheckReport, ProductError> {
    let q = build_ultraproduct(fam, u)?;
    los_check_quotient(fam, &q, |s| u.contains(s), depth)
}

/// The same equivalence check against an arbitrary quotient and member
/// test; used by the reduced-product fixtures.
pub fn los_check_quotient(
    fam: &IndexedFamily,
    q: &Quotient,
    member_test: impl Fn(&Subset) -> bool,
    depth: usize,
) -> Result<CheckReport, ProductError> {
    let lang = &fam.factor(&fam.index_set[0]).lang;
    let pool: Vec<String> = LOS_VARS.iter().map(|v| v.to_string()).collect();
    let formulas = enumerate_formulas(lang, depth, &pool)?;

    let up_tables = tables_for(&q.structure, &formulas, depth)?;
    let factor_tables: BTreeMap<&Index, TableVec> = fam
        .index_set
        .iter()
        .map(|i| Ok((i, tables_for(fam.factor(i), &formulas, depth)?)))
        .collect::<Result<_, ProductError>>()?;

    let mut report = CheckReport::passing();
    report.stats.max_depth = depth;
    let classes = &q.structure.universe;

    for (fi, formula) in formulas.iter().enumerate() {
        report.stats.formulas_checked += 1;
        // every assignment of the pool vars to classes
        for xi in 0..classes.len() {
            for yi in 0..classes.len() {
                report.stats.cases_checked += 1;
                let lhs = up_tables[fi][xi * classes.len() + yi];
                let rep_x = &q.reps[&classes[xi]];
                let rep_y = &q.reps[&classes[yi]];
                let pointwise: Subset = fam
                    .index_set
                    .iter()
                    .filter(|i| {
                        let s = fam.factor(i);
                        let idx = assignment_index(s, &[&rep_x[*i], &rep_y[*i]]);
                        factor_tables[*i][fi][idx]
                    })
                    .cloned()
                    .collect();
                let rhs = member_test(&pointwise);
                if lhs != rhs {
                    report.push_counterexample(
                        formula.to_string(),
                        format!(
                            "x={}, y={}: quotient side {lhs}, pointwise set {pointwise:?} membership {rhs}",
                            classes[xi], classes[yi]
                        ),
                    );
                    if report.counterexamples.len() >= 5 {
                        return Ok(report);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// The map sending each element to the class of its constant function,
/// with an elementary-embedding report at the given depth.
pub fn diagonal_embedding(
    a: &Structure,
    index_set: &[Index],
    u: &Ultrafilter,
    depth: usize,
) -> Result<(BTreeMap<ElemId, ElemId>, CheckReport), ProductError> {
    let structures: BTreeMap<Index, Structure> = index_set
        .iter()
        .map(|i| (i.clone(), a.clone()))
        .collect();
    let fam = IndexedFamily::new(index_set.to_vec(), structures)?;
    let q = build_ultraproduct(&fam, u)?;
    let h: BTreeMap<ElemId, ElemId> = a
        .universe
        .iter()
        .map(|e| {
            let constant: ChoiceFunction = index_set
                .iter()
                .map(|i| (i.clone(), e.clone()))
                .collect();
            (e.clone(), q.class_of(&fam, &constant))
        })
        .collect();
    let report = check_elementary_embedding(
        &h,
        a,
        &q.structure,
        depth,
        3,
        EmbeddingStyle::FirstOrder,
    )?;
    Ok((h, report))
}

/// For a principal ultrafilter, the map `f/U -> f(i0)` is an isomorphism
/// onto the principal factor. Returns it after verifying bijectivity and
/// preservation in both directions.
pub fn principal_collapse(
    fam: &IndexedFamily,
    u: &Ultrafilter,
) -> Result<BTreeMap<ElemId, ElemId>, ProductError> {
    let q = build_ultraproduct(fam, u)?;
    let point = u.principal_point();
    let factor = fam.factor(point);
    let map: BTreeMap<ElemId, ElemId> = q
        .structure
        .universe
        .iter()
        .map(|c| (c.clone(), q.reps[c][point].clone()))
        .collect();

    // bijection
    let image: BTreeSet<&ElemId> = map.values().collect();
    if image.len() != map.len() || map.len() != factor.universe.len() {
        return Err(FolError::Malformed("collapse map is not a bijection".into()).into());
    }
    // relation preservation both ways
    for (name, _) in q.structure.lang.relations() {
        let up_rows = &q.structure.relations[name];
        let f_rows = &factor.relations[name];
        for row in up_rows {
            let mapped: Vec<ElemId> = row.iter().map(|c| map[c].clone()).collect();
            if !f_rows.contains(&mapped) {
                return Err(FolError::Malformed(format!(
                    "collapse drops {name}{row:?}"
                ))
                .into());
            }
        }
        for row in f_rows {
            let preimage: Vec<ElemId> = row
                .iter()
                .map(|e| {
                    map.iter()
                        .find(|(_, v)| *v == e)
                        .map(|(k, _)| k.clone())
                        .unwrap()
                })
                .collect();
            if !up_rows.contains(&preimage) {
                return Err(FolError::Malformed(format!(
                    "collapse misses {name}{row:?}"
                ))
                .into());
            }
        }
    }
    // function preservation
    for (name, _) in q.structure.lang.functions() {
        for (args, v) in &q.structure.functions[name] {
            let mapped_args: Vec<ElemId> = args.iter().map(|c| map[c].clone()).collect();
            if factor.functions[name][&mapped_args] != map[v] {
                return Err(FolError::Malformed(format!(
                    "collapse breaks {name} at {args:?}"
                ))
                .into());
            }
        }
    }
    Ok(map)
}

/// Build a model of a finite sentence set from models of its nonempty
/// subsets: index by the subsets, extend the superset family to an
/// ultrafilter, take the ultraproduct, and verify it satisfies every
/// sentence.
pub fn compactness_witness(
    sentences: &[Formula],
    subset_models: &BTreeMap<BTreeSet<usize>, Structure>,
) -> Result<Structure, ProductError> {
    let empty = Assignment::new();
    // verify the claimed models
    for (subset, model) in subset_models {
        for &k in subset {
            if !satisfies(model, &sentences[k], &empty)? {
                return Err(ProductError::BadSubsetModel(
                    subset.iter().copied().collect(),
                    sentences[k].to_string(),
                ));
            }
        }
    }

    let render = |s: &BTreeSet<usize>| {
        let parts: Vec<String> = s.iter().map(usize::to_string).collect();
        format!("{{{}}}", parts.join(","))
    };
    let mut index_set = Vec::new();
    let mut structures = BTreeMap::new();
    let mut subsets = Vec::new();
    for (subset, model) in subset_models {
        if subset.is_empty() {
            continue;
        }
        let id = render(subset);
        index_set.push(id.clone());
        structures.insert(id, model.clone());
        subsets.push(subset.clone());
    }
    let fam = IndexedFamily::new(index_set.clone(), structures)?;

    // the family of upward cones has the f.i.p.
    let members: Vec<Vec<Index>> = subsets
        .iter()
        .map(|i| {
            subsets
                .iter()
                .filter(|j| i.is_subset(j))
                .map(render)
                .collect()
        })
        .collect();
    let cones = SetFamily::new(index_set, members)?;
    let u = crate::filters::extend_to_ultrafilter(&cones)?;
    let q = build_ultraproduct(&fam, &u)?;

    for sentence in sentences {
        if !satisfies(&q.structure, sentence, &empty)? {
            return Err(FolError::Malformed(format!(
                "ultraproduct fails `{sentence}`"
            ))
            .into());
        }
    }
    Ok(q.structure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::generate_filter;
    use crate::logic::{parse_formula, Language};

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

    fn two_factor_family() -> IndexedFamily {
        IndexedFamily::new(
            ["0", "1"],
            BTreeMap::from([
                ("0".to_string(), unary_p(&["x"], &["x"])),
                ("1".to_string(), unary_p(&["y"], &[])),
            ]),
        )
        .unwrap()
    }

    #[test]
    fn principal_point_decides_satisfaction() {
        let fam = two_factor_family();
        let u = Ultrafilter::principal(["0", "1"], "0").unwrap();
        let q = build_ultraproduct(&fam, &u).unwrap();
        let some_p = parse_formula("exists v . P(v)", &q.structure.lang).unwrap();
        assert!(satisfies(&q.structure, &some_p, &Assignment::new()).unwrap());

        let u1 = Ultrafilter::principal(["0", "1"], "1").unwrap();
        let q1 = build_ultraproduct(&fam, &u1).unwrap();
        assert!(!satisfies(&q1.structure, &some_p, &Assignment::new()).unwrap());
    }

    #[test]
    fn degenerate_index_is_isomorphic_to_the_factor() {
        let s = unary_p(&["0", "1"], &["0"]);
        let fam = IndexedFamily::new(
            ["i"],
            BTreeMap::from([("i".to_string(), s.clone())]),
        )
        .unwrap();
        let u = Ultrafilter::principal(["i"], "i").unwrap();
        let q = build_ultraproduct(&fam, &u).unwrap();
        assert_eq!(q.structure.canonical_key(), s.canonical_key());
        principal_collapse(&fam, &u).unwrap();
    }

    #[test]
    fn class_equality_is_agreement_on_the_kernel() {
        let fam = IndexedFamily::new(
            ["0", "1"],
            BTreeMap::from([
                ("0".to_string(), unary_p(&["a", "b"], &["a"])),
                ("1".to_string(), unary_p(&["c", "d"], &["c"])),
            ]),
        )
        .unwrap();
        let u = Ultrafilter::principal(["0", "1"], "0").unwrap();
        let q = build_ultraproduct(&fam, &u).unwrap();
        assert_eq!(q.structure.universe.len(), 2);
        let f: ChoiceFunction = BTreeMap::from([
            ("0".to_string(), "a".to_string()),
            ("1".to_string(), "d".to_string()),
        ]);
        let g: ChoiceFunction = BTreeMap::from([
            ("0".to_string(), "a".to_string()),
            ("1".to_string(), "c".to_string()),
        ]);
        assert_eq!(q.class_of(&fam, &f), q.class_of(&fam, &g));
    }

    #[test]
    fn relations_are_well_defined_on_classes() {
        // substituting a different representative of the same class never
        // changes the relation verdict
        let fam = IndexedFamily::new(
            ["0", "1", "2"],
            BTreeMap::from([
                ("0".to_string(), unary_p(&["a", "b"], &["a"])),
                ("1".to_string(), unary_p(&["c"], &["c"])),
                ("2".to_string(), unary_p(&["d", "e"], &[])),
            ]),
        )
        .unwrap();
        let u = Ultrafilter::principal(["0", "1", "2"], "1").unwrap();
        let q = build_ultraproduct(&fam, &u).unwrap();
        for f in all_choice_functions(&fam) {
            let class = q.class_of(&fam, &f);
            let in_table = q.structure.relations["P"].contains(&vec![class]);
            let pointwise: Subset = fam
                .index_set
                .iter()
                .filter(|i| fam.factor(i).relations["P"].contains(&vec![f[*i].clone()]))
                .cloned()
                .collect();
            assert_eq!(in_table, u.contains(&pointwise));
        }
    }

    #[test]
    fn equivalence_holds_at_depth_two() {
        let fam = two_factor_family();
        for point in ["0", "1"] {
            let u = Ultrafilter::principal(["0", "1"], point).unwrap();
            let r = los_check(&fam, &u, 2).unwrap();
            assert!(r.passed(), "point {point}: {r}");
        }
    }

    #[test]
    fn non_ultra_filter_breaks_the_negation_clause() {
        let fam = two_factor_family();
        let trivial = generate_filter(
            &SetFamily::new(["0", "1"], [["0", "1"]]).unwrap(),
        )
        .unwrap();
        let q = build_reduced_product(&fam, &trivial).unwrap();
        assert!(q.warning.is_some());
        let r = los_check_quotient(&fam, &q, |s| trivial.contains(s), 1).unwrap();
        assert!(!r.passed());
        assert!(
            r.counterexamples[0].formula.contains("not")
                || r.counterexamples[0].formula.contains("!="),
            "witness should involve negation: {}",
            r.counterexamples[0].formula
        );
    }

    #[test]
    fn diagonal_embedding_is_elementary() {
        let a = unary_p(&["0", "1"], &["0"]);
        let index: Vec<Index> = vec!["i".into(), "j".into()];
        let u = Ultrafilter::principal(["i", "j"], "i").unwrap();
        let (h, report) = diagonal_embedding(&a, &index, &u, 3).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(h.len(), 2);

        // image covers the whole ultrapower at finite scale
        let fam = IndexedFamily::new(
            index.clone(),
            BTreeMap::from([("i".to_string(), a.clone()), ("j".to_string(), a.clone())]),
        )
        .unwrap();
        let q = build_ultraproduct(&fam, &u).unwrap();
        let image: BTreeSet<&ElemId> = h.values().collect();
        assert_eq!(image.len(), q.structure.universe.len());
    }

    #[test]
    fn compactness_demo() {
        let lang = Language::new().with_relation("P", 1);
        let s0 = parse_formula("exists v . P(v)", &lang).unwrap();
        let s1 = parse_formula("exists v . not P(v)", &lang).unwrap();
        let sentences = vec![s0, s1];
        let models = BTreeMap::from([
            (BTreeSet::from([0]), unary_p(&["0"], &["0"])),
            (BTreeSet::from([1]), unary_p(&["0"], &[])),
            (BTreeSet::from([0, 1]), unary_p(&["0", "1"], &["0"])),
        ]);
        let model = compactness_witness(&sentences, &models).unwrap();
        let empty = Assignment::new();
        for s in &sentences {
            assert!(satisfies(&model, s, &empty).unwrap());
        }

        // singleton set
        let single = vec![parse_formula("exists v . P(v)", &lang).unwrap()];
        let m = BTreeMap::from([(BTreeSet::from([0]), unary_p(&["0"], &["0"]))]);
        compactness_witness(&single, &m).unwrap();

        // a bad claimed model is rejected up front
        let bad = BTreeMap::from([
            (BTreeSet::from([0]), unary_p(&["0"], &[])),
            (BTreeSet::from([1]), unary_p(&["0"], &[])),
            (BTreeSet::from([0, 1]), unary_p(&["0", "1"], &["0"])),
        ]);
        assert!(matches!(
            compactness_witness(&sentences, &bad),
            Err(ProductError::BadSubsetModel(..))
        ));
    }
}
