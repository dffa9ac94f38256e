//! Finite first-order structures and the satisfaction relation.

mod embedding;
mod enumerate;

pub use embedding::{
    check_bounded_elementary_submodel, check_elementary_embedding, elementary_diagram,
    epsilon_language, is_transitive_submodel, EmbeddingStyle,
};
pub use enumerate::{
    enumerate_epsilon_formulas, enumerate_formulas, enumerate_formulas_with_terms, EnumerateError,
    DEPTH_CAP, FORMULA_COUNT_CAP,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Formula, Language, Term};

pub type ElemId = String;

/// Variable bindings into a structure's universe.
pub type Assignment = BTreeMap<String, ElemId>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FolError {
    #[error("variable `{0}` is unassigned")]
    UnassignedVariable(String),
    #[error("symbol `{0}` is not in the language")]
    UnknownSymbol(String),
    #[error("membership and entity-constant atoms have no first-order interpretation here")]
    EpsilonAtom,
    #[error("element `{0}` is not in the universe")]
    ForeignElement(String),
    #[error("structure is malformed: {0}")]
    Malformed(String),
}

/// A finite model: universe, relation tables, and total function tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub lang: Language,
    /// Nonempty, in a fixed order that quotients and products respect.
    pub universe: Vec<ElemId>,
    pub relations: BTreeMap<String, BTreeSet<Vec<ElemId>>>,
    pub functions: BTreeMap<String, BTreeMap<Vec<ElemId>, ElemId>>,
}

impl Structure {
    /// Validate the tables against the language: tuple widths match
    /// arities, members lie in the universe, functions are total.
    pub fn validate(&self) -> Result<(), FolError> {
        if self.universe.is_empty() {
            return Err(FolError::Malformed("empty universe".into()));
        }
        let in_universe = |e: &ElemId| self.universe.contains(e);
        for (name, arity) in self.lang.relations() {
            let table = self
                .relations
                .get(name)
                .ok_or_else(|| FolError::Malformed(format!("missing relation table {name}")))?;
            for row in table {
                if row.len() != arity {
                    return Err(FolError::Malformed(format!(
                        "relation {name} row width {} != arity {arity}",
                        row.len()
                    )));
                }
                if !row.iter().all(in_universe) {
                    return Err(FolError::Malformed(format!(
                        "relation {name} row mentions foreign elements"
                    )));
                }
            }
        }
        for (name, arity) in self.lang.functions() {
            let table = self
                .functions
                .get(name)
                .ok_or_else(|| FolError::Malformed(format!("missing function table {name}")))?;
            let expected = self.universe.len().pow(arity as u32);
            if table.len() != expected {
                return Err(FolError::Malformed(format!(
                    "function {name} has {} rows, expected {expected}",
                    table.len()
                )));
            }
            for (args, value) in table {
                if args.len() != arity || !args.iter().all(in_universe) || !in_universe(value) {
                    return Err(FolError::Malformed(format!("function {name} row malformed")));
                }
            }
        }
        Ok(())
    }

    /// Relabel universe elements by their position. Structures that differ
    /// only in element names collapse to the same canonical form, which the
    /// memoizing checkers use as a cache key.
    pub fn canonical_key(&self) -> String {
        let index: BTreeMap<&ElemId, usize> = self
            .universe
            .iter()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut out = format!("u{}", self.universe.len());
        for (name, table) in &self.relations {
            out.push_str(&format!(";R{name}:"));
            let mut rows: Vec<Vec<usize>> = table
                .iter()
                .map(|row| row.iter().map(|e| index[e]).collect())
                .collect();
            rows.sort();
            for row in rows {
                out.push_str(&format!("{row:?}"));
            }
        }
        for (name, table) in &self.functions {
            out.push_str(&format!(";F{name}:"));
            for (args, v) in table {
                let args: Vec<usize> = args.iter().map(|e| index[e]).collect();
                out.push_str(&format!("{args:?}->{}", index[v]));
            }
        }
        out
    }
}

/// Evaluate a term to an element.
pub fn eval_term(s: &Structure, t: &Term, a: &Assignment) -> Result<ElemId, FolError> {
    match t {
        Term::Var(v) => a
            .get(v)
            .cloned()
            .ok_or_else(|| FolError::UnassignedVariable(v.clone())),
        Term::Const(c) => {
            let table = s.functions.get(c).ok_or_else(|| FolError::UnknownSymbol(c.clone()))?;
            table
                .get(&Vec::new())
                .cloned()
                .ok_or_else(|| FolError::Malformed(format!("constant {c} has no value")))
        }
        Term::Apply(name, args) => {
            let table = s
                .functions
                .get(name)
                .ok_or_else(|| FolError::UnknownSymbol(name.clone()))?;
            let mut row = Vec::with_capacity(args.len());
            for arg in args {
                row.push(eval_term(s, arg, a)?);
            }
            table
                .get(&row)
                .cloned()
                .ok_or_else(|| FolError::Malformed(format!("function {name} partial at {row:?}")))
        }
        Term::EntityConst(_) => Err(FolError::EpsilonAtom),
    }
}

/// The recursive satisfaction relation. Unbounded quantifiers range over
/// the whole universe; membership atoms are rejected (they belong to the
/// epsilon evaluators).
pub fn satisfies(s: &Structure, f: &Formula, a: &Assignment) -> Result<bool, FolError> {
    let mut a = a.clone();
    satisfies_rec(s, f, &mut a)
}

fn satisfies_rec(s: &Structure, f: &Formula, a: &mut Assignment) -> Result<bool, FolError> {
    match f {
        Formula::Eq(t1, t2) => Ok(eval_term(s, t1, a)? == eval_term(s, t2, a)?),
        Formula::Rel(name, args) => {
            let table = s
                .relations
                .get(name)
                .ok_or_else(|| FolError::UnknownSymbol(name.clone()))?;
            let mut row = Vec::with_capacity(args.len());
            for arg in args {
                row.push(eval_term(s, arg, a)?);
            }
            Ok(table.contains(&row))
        }
        Formula::Mem(..) => Err(FolError::EpsilonAtom),
        Formula::Not(g) => Ok(!satisfies_rec(s, g, a)?),
        Formula::And(p, q) => Ok(satisfies_rec(s, p, a)? && satisfies_rec(s, q, a)?),
        Formula::Or(p, q) => Ok(satisfies_rec(s, p, a)? || satisfies_rec(s, q, a)?),
        Formula::Implies(p, q) => Ok(!satisfies_rec(s, p, a)? || satisfies_rec(s, q, a)?),
        Formula::Iff(p, q) => Ok(satisfies_rec(s, p, a)? == satisfies_rec(s, q, a)?),
        Formula::Forall(v, body) => {
            let saved = a.get(v).cloned();
            let mut result = true;
            for e in &s.universe {
                a.insert(v.clone(), e.clone());
                if !satisfies_rec(s, body, a)? {
                    result = false;
                    break;
                }
            }
            restore(a, v, saved);
            Ok(result)
        }
        Formula::Exists(v, body) => {
            let saved = a.get(v).cloned();
            let mut result = false;
            for e in &s.universe {
                a.insert(v.clone(), e.clone());
                if satisfies_rec(s, body, a)? {
                    result = true;
                    break;
                }
            }
            restore(a, v, saved);
            Ok(result)
        }
        Formula::BoundedForall(..) | Formula::BoundedExists(..) => Err(FolError::EpsilonAtom),
    }
}

fn restore(a: &mut Assignment, v: &str, saved: Option<ElemId>) {
    match saved {
        Some(e) => {
            a.insert(v.to_string(), e);
        }
        None => {
            a.remove(v);
        }
    }
}

/// All assignments of the given variables into the universe, in
/// lexicographic order of the universe positions.
pub fn all_assignments(s: &Structure, vars: &[String]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for v in vars {
        let mut next = Vec::with_capacity(out.len() * s.universe.len());
        for a in &out {
            for e in &s.universe {
                let mut b = a.clone();
                b.insert(v.clone(), e.clone());
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Structure JSON format:
/// `{"language": {"relations": {"P": 1}, "functions": {}},
///   "universe": ["0","1"], "relations": {"P": [["0"]]}, "functions": {}}`.
/// Function tables are lists of rows `[arg1,...,argN,value]`.
#[derive(Debug, Serialize, Deserialize)]
pub struct StructureFile {
    pub language: LanguageFile,
    pub universe: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub functions: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LanguageFile {
    #[serde(default)]
    pub relations: BTreeMap<String, usize>,
    #[serde(default)]
    pub functions: BTreeMap<String, usize>,
}

impl StructureFile {
    pub fn into_structure(self) -> Result<Structure, FolError> {
        let mut lang = Language::new();
        for (name, arity) in &self.language.relations {
            lang = lang.with_relation(name, *arity);
        }
        for (name, arity) in &self.language.functions {
            lang = lang.with_function(name, *arity);
        }
        let mut relations: BTreeMap<String, BTreeSet<Vec<ElemId>>> = BTreeMap::new();
        for (name, _) in lang.relations() {
            let rows = self.relations.get(name).cloned().unwrap_or_default();
            relations.insert(name.to_string(), rows.into_iter().collect());
        }
        let mut functions: BTreeMap<String, BTreeMap<Vec<ElemId>, ElemId>> = BTreeMap::new();
        for (name, _) in lang.functions() {
            let rows = self.functions.get(name).cloned().unwrap_or_default();
            let mut table = BTreeMap::new();
            for mut row in rows {
                let value = row.pop().ok_or_else(|| {
                    FolError::Malformed(format!("function {name} has an empty row"))
                })?;
                table.insert(row, value);
            }
            functions.insert(name.to_string(), table);
        }
        let s = Structure {
            lang,
            universe: self.universe,
            relations,
            functions,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn from_structure(s: &Structure) -> StructureFile {
        StructureFile {
            language: LanguageFile {
                relations: s.lang.relations().map(|(n, a)| (n.to_string(), a)).collect(),
                functions: s.lang.functions().map(|(n, a)| (n.to_string(), a)).collect(),
            },
            universe: s.universe.clone(),
            relations: s
                .relations
                .iter()
                .map(|(n, rows)| (n.clone(), rows.iter().cloned().collect()))
                .collect(),
            functions: s
                .functions
                .iter()
                .map(|(n, table)| {
                    let rows = table
                        .iter()
                        .map(|(args, v)| {
                            let mut row = args.clone();
                            row.push(v.clone());
                            row
                        })
                        .collect();
                    (n.clone(), rows)
                })
                .collect(),
        }
    }
}

#[cfg(test)]
pub(crate) fn structure_from_json(json: &str) -> Structure {
    let file: StructureFile = serde_json::from_str(json).unwrap();
    file.into_structure().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    pub(crate) fn unary_p(universe: &[&str], p: &[&str]) -> Structure {
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

    #[test]
    fn quantifiers_enumerate_the_universe() {
        let s = unary_p(&["0", "1"], &["0"]);
        let lang = s.lang.clone();
        let some_p = parse_formula("exists x . P(x)", &lang).unwrap();
        let all_p = parse_formula("forall x . P(x)", &lang).unwrap();
        assert!(satisfies(&s, &some_p, &Assignment::new()).unwrap());
        assert!(!satisfies(&s, &all_p, &Assignment::new()).unwrap());

        let empty = unary_p(&["0"], &[]);
        assert!(!satisfies(&empty, &some_p, &Assignment::new()).unwrap());
        let refl = parse_formula("forall x . x = x", &lang).unwrap();
        assert!(satisfies(&empty, &refl, &Assignment::new()).unwrap());
    }

    #[test]
    fn function_evaluation_by_table() {
        let lang = Language::new().with_function("F", 1);
        let s = Structure {
            lang: lang.clone(),
            universe: vec!["0".into(), "1".into()],
            relations: BTreeMap::new(),
            functions: BTreeMap::from([(
                "F".to_string(),
                // successor mod 2
                BTreeMap::from([
                    (vec!["0".to_string()], "1".to_string()),
                    (vec!["1".to_string()], "0".to_string()),
                ]),
            )]),
        };
        s.validate().unwrap();
        let a = Assignment::from([("x".to_string(), "1".to_string())]);
        let t = Term::Apply("F".into(), vec![Term::var("x")]);
        assert_eq!(eval_term(&s, &t, &a).unwrap(), "0");
        assert_eq!(
            eval_term(&s, &Term::var("y"), &a),
            Err(FolError::UnassignedVariable("y".into()))
        );
    }

    #[test]
    fn mem_atoms_are_rejected() {
        let s = unary_p(&["0"], &[]);
        let f = Formula::mem(Term::var("x"), Term::var("y"));
        let a = Assignment::from([
            ("x".to_string(), "0".to_string()),
            ("y".to_string(), "0".to_string()),
        ]);
        assert_eq!(satisfies(&s, &f, &a), Err(FolError::EpsilonAtom));
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"language": {"relations": {"P": 1}, "functions": {}},
                       "universe": ["0","1"], "relations": {"P": [["0"]]}, "functions": {}}"#;
        let s = structure_from_json(json);
        assert_eq!(s, unary_p(&["0", "1"], &["0"]));
        let back = serde_json::to_string(&StructureFile::from_structure(&s)).unwrap();
        let s2: StructureFile = serde_json::from_str(&back).unwrap();
        assert_eq!(s2.into_structure().unwrap(), s);
    }

    #[test]
    fn canonical_key_ignores_element_names() {
        let s1 = unary_p(&["0", "1"], &["0"]);
        let s2 = unary_p(&["a", "b"], &["a"]);
        let s3 = unary_p(&["0", "1"], &["1"]);
        assert_eq!(s1.canonical_key(), s2.canonical_key());
        assert_ne!(s1.canonical_key(), s3.canonical_key());
    }
}
