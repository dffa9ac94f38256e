//! Filters and ultrafilters over finite index sets.
//!
//! Over a finite index set every ultrafilter is principal, so the
//! canonical representation is the generating point; member lists are
//! derived on demand. The countable-incompleteness checker exists so that
//! pipelines that would need an incomplete ultrafilter fail loudly instead
//! of silently producing nothing.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Index = String;
pub type IndexSet = BTreeSet<Index>;
pub type Subset = BTreeSet<Index>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FilterError {
    #[error("member {0:?} is not a subset of the index set")]
    ForeignMember(Vec<Index>),
    #[error("family lacks the finite intersection property")]
    NoFip,
    #[error("index set is empty")]
    EmptyIndex,
    #[error("family is not an ultrafilter: {0}")]
    NotUltra(String),
    #[error("blocks do not partition the index set")]
    BadPartition,
}

/// A family of subsets of a finite index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    pub index_set: IndexSet,
    pub members: BTreeSet<Subset>,
}

impl SetFamily {
    pub fn new(
        index_set: impl IntoIterator<Item = impl Into<Index>>,
        members: impl IntoIterator<Item = impl IntoIterator<Item = impl Into<Index>>>,
    ) -> Result<SetFamily, FilterError> {
        let index_set: IndexSet = index_set.into_iter().map(Into::into).collect();
        let members: BTreeSet<Subset> = members
            .into_iter()
            .map(|m| m.into_iter().map(Into::into).collect())
            .collect();
        for m in &members {
            if !m.is_subset(&index_set) {
                return Err(FilterError::ForeignMember(m.iter().cloned().collect()));
            }
        }
        Ok(SetFamily { index_set, members })
    }

    /// Intersection of all members; the whole index set for the empty
    /// family.
    pub fn total_intersection(&self) -> Subset {
        let mut it = self.members.iter();
        match it.next() {
            None => self.index_set.clone(),
            Some(first) => it.fold(first.clone(), |acc, m| &acc & m),
        }
    }
}

/// Finite intersection property. Over a finite family this is equivalent
/// to the total intersection being nonempty, and the implementation
/// exploits that.
pub fn has_fip(fam: &SetFamily) -> bool {
    !fam.total_intersection().is_empty()
}

/// A validated filter: nonempty, no empty set, closed under intersection
/// and superset within the powerset of the index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    family: SetFamily,
}

impl Filter {
    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.family.index_set
    }

    pub fn contains(&self, s: &Subset) -> bool {
        self.family.members.contains(s)
    }

    pub fn members(&self) -> impl Iterator<Item = &Subset> {
        self.family.members.iter()
    }

    /// Check the filter axioms directly.
    pub fn validate(family: &SetFamily) -> Result<Filter, FilterError> {
        if family.index_set.is_empty() {
            return Err(FilterError::EmptyIndex);
        }
        if family.members.is_empty() || family.members.contains(&Subset::new()) {
            return Err(FilterError::NoFip);
        }
        for a in &family.members {
            for b in &family.members {
                if !family.members.contains(&(a & b)) {
                    return Err(FilterError::NotUltra(format!(
                        "not intersection-closed at {a:?}, {b:?}"
                    )));
                }
            }
            for sup in supersets_within(a, &family.index_set) {
                if !family.members.contains(&sup) {
                    return Err(FilterError::NotUltra(format!(
                        "missing superset {sup:?} of {a:?}"
                    )));
                }
            }
        }
        Ok(Filter {
            family: family.clone(),
        })
    }
}

fn supersets_within(base: &Subset, index: &IndexSet) -> Vec<Subset> {
    let rest: Vec<&Index> = index.iter().filter(|i| !base.contains(*i)).collect();
    assert!(rest.len() <= 20, "index set too large for closure");
    let mut out = Vec::with_capacity(1 << rest.len());
    for mask in 0u32..(1 << rest.len()) {
        let mut s = base.clone();
        for (k, i) in rest.iter().enumerate() {
            if mask & (1 << k) != 0 {
                s.insert((*i).clone());
            }
        }
        out.push(s);
    }
    out
}

/// Smallest filter containing the family: supersets of finite
/// intersections of members (of the index set itself for the empty
/// family).
pub fn generate_filter(fam: &SetFamily) -> Result<Filter, FilterError> {
    if fam.index_set.is_empty() {
        return Err(FilterError::EmptyIndex);
    }
    if !has_fip(fam) {
        return Err(FilterError::NoFip);
    }
    // close under pairwise intersection to a fixed point, then supersets
    let mut intersections: BTreeSet<Subset> = fam.members.clone();
    intersections.insert(fam.index_set.clone());
    loop {
        let mut grew = false;
        let snapshot: Vec<Subset> = intersections.iter().cloned().collect();
        for a in &snapshot {
            for b in &snapshot {
                if intersections.insert(a & b) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut members = BTreeSet::new();
    for base in &intersections {
        members.extend(supersets_within(base, &fam.index_set));
    }
    Filter::validate(&SetFamily {
        index_set: fam.index_set.clone(),
        members,
    })
}

/// A principal ultrafilter over a finite index set, represented by its
/// generating point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ultrafilter {
    index_set: IndexSet,
    principal_point: Index,
}

impl Ultrafilter {
    pub fn principal(
        index_set: impl IntoIterator<Item = impl Into<Index>>,
        point: impl Into<Index>,
    ) -> Result<Ultrafilter, FilterError> {
        let index_set: IndexSet = index_set.into_iter().map(Into::into).collect();
        let point = point.into();
        if !index_set.contains(&point) {
            return Err(FilterError::ForeignMember(vec![point]));
        }
        Ok(Ultrafilter {
            index_set,
            principal_point: point,
        })
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn principal_point(&self) -> &Index {
        &self.principal_point
    }

    pub fn contains(&self, s: &Subset) -> bool {
        s.contains(&self.principal_point)
    }

    /// The full member list, derived from the point.
    pub fn members(&self) -> BTreeSet<Subset> {
        let mut point_set = Subset::new();
        point_set.insert(self.principal_point.clone());
        supersets_within(&point_set, &self.index_set)
            .into_iter()
            .collect()
    }

    pub fn as_filter(&self) -> Filter {
        Filter {
            family: SetFamily {
                index_set: self.index_set.clone(),
                members: self.members(),
            },
        }
    }
}

/// Extend a family with the f.i.p. to an ultrafilter containing it. Ties
/// are broken toward the smallest point of the total intersection in the
/// index order, so reruns are reproducible.
pub fn extend_to_ultrafilter(fam: &SetFamily) -> Result<Ultrafilter, FilterError> {
    if fam.index_set.is_empty() {
        return Err(FilterError::EmptyIndex);
    }
    let total = fam.total_intersection();
    let point = total.iter().next().ok_or(FilterError::NoFip)?;
    Ultrafilter::principal(fam.index_set.clone(), point.clone())
}

/// Is the family exactly an ultrafilter (a filter with the complement
/// dichotomy)?
pub fn is_ultrafilter(fam: &SetFamily) -> bool {
    let Ok(filter) = Filter::validate(fam) else {
        return false;
    };
    let subsets = supersets_within(&Subset::new(), &fam.index_set);
    subsets.iter().all(|s| {
        let complement: Subset = fam.index_set.difference(s).cloned().collect();
        filter.contains(s) ^ filter.contains(&complement)
    })
}

/// Countable incompleteness is unattainable over a finite index set: any
/// countable list of members repeats only finitely many distinct sets,
/// and a filter is closed under those finite intersections. Returns the
/// verdict (always false here) together with that argument, so callers
/// that need incompleteness can fail with a reason.
pub fn is_countably_incomplete(filter: &Filter) -> (bool, String) {
    let n = filter.family().members.len();
    (
        false,
        format!(
            "the filter has only {n} distinct members, so every countable \
             subfamily has a finite underlying set and its intersection is \
             a finite intersection of members, which stays in the filter"
        ),
    )
}

/// For a disjoint partition of the index set and a family with the
/// f.i.p., report which block each possible extension point forces into
/// the extending ultrafilter: the block containing the principal point.
pub fn partition_forced_blocks(
    fam: &SetFamily,
    blocks: &[Subset],
) -> Result<Vec<(Index, usize)>, FilterError> {
    let mut union = Subset::new();
    let mut total = 0;
    for b in blocks {
        total += b.len();
        union.extend(b.iter().cloned());
    }
    if union != fam.index_set || total != union.len() {
        return Err(FilterError::BadPartition);
    }
    if !has_fip(fam) {
        return Err(FilterError::NoFip);
    }
    Ok(fam
        .total_intersection()
        .into_iter()
        .map(|point| {
            let block = blocks.iter().position(|b| b.contains(&point)).unwrap();
            (point, block)
        })
        .collect())
}

/// Family file format:
/// `{"index_set": ["0","1","2"], "members": [["0","1"],["1","2"]]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct FamilyFile {
    pub index_set: Vec<Index>,
    pub members: Vec<Vec<Index>>,
}

impl FamilyFile {
    pub fn into_family(self) -> Result<SetFamily, FilterError> {
        SetFamily::new(self.index_set, self.members)
    }
}

/// Ultrafilter input: a principal point, or a full member list that must
/// validate as an ultrafilter.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UltrafilterFile {
    Principal { principal: Index },
    Members { members: Vec<Vec<Index>> },
}

impl UltrafilterFile {
    pub fn into_ultrafilter(self, index_set: &IndexSet) -> Result<Ultrafilter, FilterError> {
        match self {
            UltrafilterFile::Principal { principal } => {
                Ultrafilter::principal(index_set.clone(), principal)
            }
            UltrafilterFile::Members { members } => {
                let fam = SetFamily::new(
                    index_set.iter().cloned(),
                    members.into_iter().map(|m| m.into_iter()),
                )?;
                if !is_ultrafilter(&fam) {
                    return Err(FilterError::NotUltra("member list given".into()));
                }
                extend_to_ultrafilter(&fam)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(index: &[&str], members: &[&[&str]]) -> SetFamily {
        SetFamily::new(
            index.iter().copied(),
            members.iter().map(|m| m.iter().copied()),
        )
        .unwrap()
    }

    #[test]
    fn fip_examples() {
        assert!(has_fip(&fam(&["0", "1", "2"], &[&["0", "1"], &["1", "2"]])));
        assert!(!has_fip(&fam(&["0", "1"], &[&["0"], &[]])));
        assert!(!has_fip(&fam(&["0", "1"], &[&["0"], &["1"]])));
        // empty family: every finite subfamily has nonempty intersection
        assert!(has_fip(&fam(&["0", "1"], &[])));
    }

    #[test]
    fn generated_filter_examples() {
        let f = generate_filter(&fam(&["0", "1", "2"], &[&["0", "1"], &["1", "2"]])).unwrap();
        let expected: BTreeSet<Subset> = [
            vec!["1"],
            vec!["0", "1"],
            vec!["1", "2"],
            vec!["0", "1", "2"],
        ]
        .into_iter()
        .map(|v| v.into_iter().map(String::from).collect())
        .collect();
        assert_eq!(f.family().members, expected);

        let trivial = generate_filter(&fam(&["0", "1"], &[&["0", "1"]])).unwrap();
        assert_eq!(trivial.family().members.len(), 1);

        let single = generate_filter(&fam(&["0", "1"], &[&["0"]])).unwrap();
        assert_eq!(single.family().members.len(), 2);

        assert_eq!(
            generate_filter(&fam(&["0", "1"], &[&["0"], &["1"]])),
            Err(FilterError::NoFip)
        );
    }

    #[test]
    fn ultrafilter_extension() {
        let u = extend_to_ultrafilter(&fam(&["0", "1", "2"], &[&["0", "1"], &["1", "2"]])).unwrap();
        assert_eq!(u.principal_point(), "1");
        let u2 = extend_to_ultrafilter(&fam(&["0", "1"], &[])).unwrap();
        assert_eq!(u2.principal_point(), "0");
        let u3 = extend_to_ultrafilter(&fam(&["0", "1", "2"], &[&["2"]])).unwrap();
        assert_eq!(u3.principal_point(), "2");
    }

    #[test]
    fn ultrafilter_recognition() {
        let u = Ultrafilter::principal(["0", "1"], "0").unwrap();
        assert!(is_ultrafilter(u.as_filter().family()));
        // {I} is a filter but not ultra over |I| = 2
        let trivial = fam(&["0", "1"], &[&["0", "1"]]);
        assert!(Filter::validate(&trivial).is_ok());
        assert!(!is_ultrafilter(&trivial));
    }

    #[test]
    fn finite_filters_are_countably_complete() {
        let f = generate_filter(&fam(&["0", "1", "2"], &[&["0", "1"]])).unwrap();
        let (incomplete, why) = is_countably_incomplete(&f);
        assert!(!incomplete);
        assert!(why.contains("finite intersection"));
    }

    #[test]
    fn every_finite_ultrafilter_is_principal() {
        // exhaustive over |I| = 3: every family that validates as an
        // ultrafilter equals the principal family at some point
        let index: IndexSet = ["0", "1", "2"].iter().map(|s| s.to_string()).collect();
        let all_subsets = supersets_within(&Subset::new(), &index);
        let n = all_subsets.len(); // 8
        let mut ultra_count = 0;
        for mask in 0u32..(1 << n) {
            let members: BTreeSet<Subset> = all_subsets
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.clone())
                .collect();
            let family = SetFamily {
                index_set: index.clone(),
                members,
            };
            if is_ultrafilter(&family) {
                ultra_count += 1;
                let point = family.total_intersection();
                assert_eq!(point.len(), 1);
                let u =
                    Ultrafilter::principal(index.clone(), point.iter().next().unwrap().clone())
                        .unwrap();
                assert_eq!(u.members(), family.members);
            }
        }
        assert_eq!(ultra_count, 3);
    }

    #[test]
    fn partition_refuter() {
        let family = fam(&["0", "1", "2"], &[&["1", "2"]]);
        let blocks: Vec<Subset> = vec![
            ["0".to_string()].into_iter().collect(),
            ["1".to_string(), "2".to_string()].into_iter().collect(),
        ];
        let forced = partition_forced_blocks(&family, &blocks).unwrap();
        assert_eq!(
            forced,
            vec![("1".to_string(), 1), ("2".to_string(), 1)]
        );
        let bad_blocks: Vec<Subset> = vec![["0".to_string()].into_iter().collect()];
        assert_eq!(
            partition_forced_blocks(&family, &bad_blocks),
            Err(FilterError::BadPartition)
        );
    }
}
