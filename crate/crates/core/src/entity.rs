//! Hereditarily finite entities over named atoms.
//!
//! An [`Entity`] is either an atom (a named individual with no members) or a
//! finite set of entities. Entities are hash-consed: each distinct value is
//! interned exactly once, so extensional equality is a pointer comparison and
//! hashing is O(1). The intern pool is append-only and safe to use from
//! multiple threads.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntityError {
    #[error("atom `{0}` does not belong to the base set")]
    ForeignAtom(String),
    #[error("level {level} over a base of {base} atoms has {predicted} elements, above the cap {cap}")]
    CapExceeded {
        level: usize,
        base: usize,
        predicted: u128,
        cap: u64,
    },
    #[error("entity is an atom, not a set")]
    NotASet,
    #[error("entity is not a Kuratowski pair")]
    NotAPair,
    #[error("set is not transitive")]
    NotTransitive,
    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
}

#[derive(Debug)]
enum Node {
    Atom(String),
    /// Members sorted by the canonical entity order, no duplicates.
    Set(Vec<Entity>),
}

/// A hash-consed hereditarily finite entity.
#[derive(Clone)]
pub struct Entity {
    node: Arc<Node>,
    id: u64,
}

#[derive(PartialEq, Eq, Hash)]
enum InternKey {
    Atom(String),
    Set(Vec<u64>),
}

static POOL: Lazy<Mutex<(HashMap<InternKey, Entity>, u64)>> =
    Lazy::new(|| Mutex::new((HashMap::new(), 0)));

impl Entity {
    /// The atom with the given name. Atoms are global; a [`BaseSet`] is a
    /// view over a subset of them, not an owner.
    pub fn atom(name: impl Into<String>) -> Entity {
        let name = name.into();
        assert!(!name.is_empty(), "atom names must be nonempty");
        let mut pool = POOL.lock().unwrap();
        let key = InternKey::Atom(name.clone());
        if let Some(e) = pool.0.get(&key) {
            return e.clone();
        }
        let id = pool.1;
        pool.1 += 1;
        let e = Entity {
            node: Arc::new(Node::Atom(name)),
            id,
        };
        pool.0.insert(key, e.clone());
        e
    }

    /// The set with the given members. Order and duplicates are irrelevant:
    /// `set([a, b]) == set([b, a, a])`.
    pub fn set(members: impl IntoIterator<Item = Entity>) -> Entity {
        let mut ms: Vec<Entity> = members.into_iter().collect();
        ms.sort_by(Entity::cmp_structural);
        ms.dedup_by(|a, b| a.id == b.id);
        let key = InternKey::Set(ms.iter().map(|m| m.id).collect());
        let mut pool = POOL.lock().unwrap();
        if let Some(e) = pool.0.get(&key) {
            return e.clone();
        }
        let id = pool.1;
        pool.1 += 1;
        let e = Entity {
            node: Arc::new(Node::Set(ms)),
            id,
        };
        pool.0.insert(key, e.clone());
        e
    }

    pub fn empty_set() -> Entity {
        Entity::set([])
    }

    pub fn is_atom(&self) -> bool {
        matches!(*self.node, Node::Atom(_))
    }

    pub fn is_set(&self) -> bool {
        !self.is_atom()
    }

    pub fn is_empty_set(&self) -> bool {
        matches!(&*self.node, Node::Set(ms) if ms.is_empty())
    }

    pub fn atom_name(&self) -> Option<&str> {
        match &*self.node {
            Node::Atom(n) => Some(n),
            Node::Set(_) => None,
        }
    }

    /// Members in canonical order; empty for atoms.
    pub fn members(&self) -> &[Entity] {
        match &*self.node {
            Node::Atom(_) => &[],
            Node::Set(ms) => ms,
        }
    }

    pub fn len(&self) -> usize {
        self.members().len()
    }

    pub fn is_empty(&self) -> bool {
        self.members().is_empty()
    }

    /// Membership; always false for atoms.
    pub fn contains(&self, e: &Entity) -> bool {
        self.members().binary_search_by(|m| m.cmp_structural(e)).is_ok()
    }

    pub fn is_subset_of(&self, other: &Entity) -> bool {
        self.members().iter().all(|m| other.contains(m))
    }

    pub fn union(&self, other: &Entity) -> Entity {
        Entity::set(self.members().iter().chain(other.members()).cloned())
    }

    pub fn intersection(&self, other: &Entity) -> Entity {
        Entity::set(self.members().iter().filter(|m| other.contains(m)).cloned())
    }

    pub fn difference(&self, other: &Entity) -> Entity {
        Entity::set(self.members().iter().filter(|m| !other.contains(m)).cloned())
    }

    /// The powerset as an entity. Guarded by the caller where sizes matter.
    pub fn powerset(&self) -> Entity {
        let ms = self.members();
        assert!(ms.len() <= 20, "powerset of a set with {} members", ms.len());
        let mut subsets = Vec::with_capacity(1 << ms.len());
        for mask in 0u32..(1 << ms.len()) {
            let sub = ms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, m)| m.clone());
            subsets.push(Entity::set(sub));
        }
        Entity::set(subsets)
    }

    /// Cartesian product as a set of Kuratowski pairs.
    pub fn product(&self, other: &Entity) -> Entity {
        let mut pairs = Vec::new();
        for a in self.members() {
            for b in other.members() {
                pairs.push(kuratowski(a.clone(), b.clone()));
            }
        }
        Entity::set(pairs)
    }

    fn cmp_structural(&self, other: &Entity) -> Ordering {
        if self.id == other.id {
            return Ordering::Equal;
        }
        match (&*self.node, &*other.node) {
            (Node::Atom(a), Node::Atom(b)) => a.cmp(b),
            (Node::Atom(_), Node::Set(_)) => Ordering::Less,
            (Node::Set(_), Node::Atom(_)) => Ordering::Greater,
            (Node::Set(xs), Node::Set(ys)) => {
                for (x, y) in xs.iter().zip(ys.iter()) {
                    match x.cmp_structural(y) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                xs.len().cmp(&ys.len())
            }
        }
    }

    /// All entities reachable through membership, excluding `self`.
    pub fn transitive_members(&self) -> Vec<Entity> {
        let mut seen: BTreeSet<Entity> = BTreeSet::new();
        let mut stack: Vec<Entity> = self.members().to_vec();
        while let Some(e) = stack.pop() {
            if seen.insert(e.clone()) {
                stack.extend(e.members().iter().cloned());
            }
        }
        seen.into_iter().collect()
    }

    /// Transitive closure including `self`: the least transitive set with
    /// `self` as a member.
    pub fn transitive_closure(&self) -> Entity {
        let mut all = self.transitive_members();
        all.push(self.clone());
        Entity::set(all)
    }
}

impl PartialEq for Entity {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for Entity {}

impl Hash for Entity {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl PartialOrd for Entity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_structural(other)
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::Atom(n) => write!(f, "{n}"),
            Node::Set(ms) => {
                write!(f, "{{")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl fmt::Debug for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Kuratowski pair `(a,b) = {{a},{a,b}}`.
pub fn kuratowski(a: Entity, b: Entity) -> Entity {
    let fst = Entity::set([a.clone()]);
    let snd = Entity::set([a, b]);
    Entity::set([fst, snd])
}

/// Left-nested tuple: `(a1,...,an) = ((a1,...,a_{n-1}), an)`. A one-element
/// tuple is the element itself.
pub fn tuple(parts: &[Entity]) -> Entity {
    assert!(!parts.is_empty(), "empty tuple");
    let mut acc = parts[0].clone();
    for p in &parts[1..] {
        acc = kuratowski(acc, p.clone());
    }
    acc
}

/// Decode a Kuratowski pair back into its components.
pub fn decode_pair(e: &Entity) -> Result<(Entity, Entity), EntityError> {
    let ms = e.members();
    match ms {
        [single] => {
            // {{a}} encodes (a,a)
            let inner = single.members();
            if single.is_set() && inner.len() == 1 {
                Ok((inner[0].clone(), inner[0].clone()))
            } else {
                Err(EntityError::NotAPair)
            }
        }
        [p, q] => {
            let (small, large) = if p.len() <= q.len() { (p, q) } else { (q, p) };
            if !(small.is_set() && large.is_set() && small.len() == 1 && large.len() == 2) {
                return Err(EntityError::NotAPair);
            }
            let a = small.members()[0].clone();
            if !large.contains(&a) {
                return Err(EntityError::NotAPair);
            }
            let b = large
                .members()
                .iter()
                .find(|m| **m != a)
                .cloned()
                .ok_or(EntityError::NotAPair)?;
            Ok((a, b))
        }
        _ => Err(EntityError::NotAPair),
    }
}

/// A finite set of atom names acting as the ground level of a superstructure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseSet {
    atoms: BTreeSet<String>,
}

impl BaseSet {
    pub fn new(atoms: impl IntoIterator<Item = impl Into<String>>) -> BaseSet {
        BaseSet {
            atoms: atoms.into_iter().map(Into::into).collect(),
        }
    }

    pub fn atom_names(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(String::as_str)
    }

    pub fn atoms(&self) -> Vec<Entity> {
        self.atoms.iter().map(Entity::atom).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.atoms.contains(name)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The base set as a set entity.
    pub fn as_entity(&self) -> Entity {
        Entity::set(self.atoms())
    }
}

/// Default cap for materialized level sizes; override with `UMT_CAP`.
pub const DEFAULT_CAP: u64 = 1_000_000;

pub fn cap_from_env() -> u64 {
    std::env::var("UMT_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// Least `n` with the entity in the n-th cumulative level over `X`:
/// 0 for atoms, `1 + max(member ranks)` for sets (so the empty set has
/// rank 1). Errors if the entity mentions an atom outside `X`.
pub fn rank(e: &Entity, base: &BaseSet) -> Result<usize, EntityError> {
    match &*e.node {
        Node::Atom(n) => {
            if base.contains(n) {
                Ok(0)
            } else {
                Err(EntityError::ForeignAtom(n.clone()))
            }
        }
        Node::Set(ms) => {
            let mut max = 0;
            for m in ms {
                max = max.max(rank(m, base)?);
            }
            Ok(max + 1)
        }
    }
}

/// Materialize the cumulative level `V_n(X)`. Level sizes satisfy
/// `|V_{n+1}| = |X| + 2^{|V_n|}`, so anything past n=2 over a nontrivial
/// base blows the cap; `rank` and bounded evaluation never need it.
pub fn enumerate_vn(base: &BaseSet, n: usize, cap: u64) -> Result<Vec<Entity>, EntityError> {
    let mut level: Vec<Entity> = base.atoms();
    let mut size: u128 = level.len() as u128;
    for k in 0..n {
        let predicted = base.len() as u128 + (1u128 << size.min(100));
        if size >= 64 || predicted > cap as u128 {
            return Err(EntityError::CapExceeded {
                level: k + 1,
                base: base.len(),
                predicted,
                cap,
            });
        }
        let mut next: BTreeSet<Entity> = base.atoms().into_iter().collect();
        for mask in 0u64..(1u64 << level.len()) {
            let sub = level
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, m)| m.clone());
            next.insert(Entity::set(sub));
        }
        level = next.into_iter().collect();
        size = level.len() as u128;
    }
    Ok(level)
}

/// Elements of elements are elements; vacuous for atom members.
pub fn is_transitive(e: &Entity) -> bool {
    e.members()
        .iter()
        .all(|m| m.members().iter().all(|mm| e.contains(mm)))
}

/// Every member's powerset stays inside: `A in T` implies `A ∪ P(A) ⊆ T`,
/// atoms exempt.
pub fn is_supertransitive(e: &Entity) -> bool {
    e.members().iter().all(|m| {
        m.members().iter().all(|mm| e.contains(mm))
            && (m.is_atom() || m.powerset().members().iter().all(|s| e.contains(s)))
    })
}

/// `S ∪ P(S)` for transitive `S`; the result is supertransitive.
pub fn build_supertransitive(s: &Entity) -> Result<Entity, EntityError> {
    if !is_transitive(s) {
        return Err(EntityError::NotTransitive);
    }
    Ok(s.union(&s.powerset()))
}

/// Parse an entity literal: `ident`, `{e1,...,en}`, or the pair sugar
/// `(a,b)` for the Kuratowski encoding.
pub fn parse_entity(text: &str) -> Result<Entity, EntityError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let e = parse_entity_at(bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(EntityError::Parse {
            at: pos,
            msg: "trailing input after entity".into(),
        });
    }
    Ok(e)
}

pub(crate) fn parse_entity_at(bytes: &[u8], pos: &mut usize) -> Result<Entity, EntityError> {
    skip_ws(bytes, pos);
    match bytes.get(*pos) {
        Some(b'{') => {
            *pos += 1;
            let mut members = Vec::new();
            skip_ws(bytes, pos);
            if bytes.get(*pos) == Some(&b'}') {
                *pos += 1;
                return Ok(Entity::set(members));
            }
            loop {
                members.push(parse_entity_at(bytes, pos)?);
                skip_ws(bytes, pos);
                match bytes.get(*pos) {
                    Some(b',') => *pos += 1,
                    Some(b'}') => {
                        *pos += 1;
                        return Ok(Entity::set(members));
                    }
                    _ => {
                        return Err(EntityError::Parse {
                            at: *pos,
                            msg: "expected `,` or `}`".into(),
                        })
                    }
                }
            }
        }
        Some(b'(') => {
            *pos += 1;
            let mut parts = vec![parse_entity_at(bytes, pos)?];
            loop {
                skip_ws(bytes, pos);
                match bytes.get(*pos) {
                    Some(b',') => {
                        *pos += 1;
                        parts.push(parse_entity_at(bytes, pos)?);
                    }
                    Some(b')') => {
                        *pos += 1;
                        if parts.len() < 2 {
                            return Err(EntityError::Parse {
                                at: *pos,
                                msg: "tuple needs at least two components".into(),
                            });
                        }
                        return Ok(tuple(&parts));
                    }
                    _ => {
                        return Err(EntityError::Parse {
                            at: *pos,
                            msg: "expected `,` or `)`".into(),
                        })
                    }
                }
            }
        }
        Some(c) if c.is_ascii_alphanumeric() || *c == b'_' => {
            let start = *pos;
            while let Some(c) = bytes.get(*pos) {
                if c.is_ascii_alphanumeric() || *c == b'_' {
                    *pos += 1;
                } else {
                    break;
                }
            }
            Ok(Entity::atom(
                std::str::from_utf8(&bytes[start..*pos]).unwrap(),
            ))
        }
        _ => Err(EntityError::Parse {
            at: *pos,
            msg: "expected an atom, `{`, or `(`".into(),
        }),
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while bytes.get(*pos).is_some_and(|c| c.is_ascii_whitespace()) {
        *pos += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> BaseSet {
        BaseSet::new(["a", "b"])
    }

    #[test]
    fn extensional_equality_ignores_order_and_duplicates() {
        let a = Entity::atom("a");
        let b = Entity::atom("b");
        let s1 = Entity::set([a.clone(), b.clone()]);
        let s2 = Entity::set([b.clone(), a.clone(), a.clone()]);
        assert_eq!(s1, s2);
        assert_eq!(parse_entity("{a,b}").unwrap(), parse_entity("{b,a,a}").unwrap());
    }

    #[test]
    fn ranks() {
        let base = ab();
        let a = Entity::atom("a");
        let b = Entity::atom("b");
        assert_eq!(rank(&a, &base).unwrap(), 0);
        assert_eq!(rank(&Entity::set([a.clone()]), &base).unwrap(), 1);
        assert_eq!(rank(&Entity::empty_set(), &base).unwrap(), 1);
        assert_eq!(rank(&kuratowski(a.clone(), b.clone()), &base).unwrap(), 2);
        assert_eq!(
            rank(&Entity::atom("zz"), &base),
            Err(EntityError::ForeignAtom("zz".into()))
        );
    }

    #[test]
    fn level_sizes() {
        let base = ab();
        assert_eq!(enumerate_vn(&base, 0, DEFAULT_CAP).unwrap().len(), 2);
        assert_eq!(enumerate_vn(&base, 1, DEFAULT_CAP).unwrap().len(), 6);
        assert_eq!(enumerate_vn(&base, 2, DEFAULT_CAP).unwrap().len(), 66);
        assert!(matches!(
            enumerate_vn(&base, 3, DEFAULT_CAP),
            Err(EntityError::CapExceeded { .. })
        ));
    }

    #[test]
    fn levels_are_transitive_over_sets_and_cumulative() {
        let base = ab();
        for n in 1..=2 {
            let level: BTreeSet<Entity> =
                enumerate_vn(&base, n, DEFAULT_CAP).unwrap().into_iter().collect();
            let prev = enumerate_vn(&base, n - 1, DEFAULT_CAP).unwrap();
            // V_{n+1}(X) = X ∪ P(V_n(X))
            let prev_entity = Entity::set(prev.clone());
            let mut rebuilt: BTreeSet<Entity> = base.atoms().into_iter().collect();
            rebuilt.extend(prev_entity.powerset().members().iter().cloned());
            assert_eq!(level, rebuilt);
            // transitive over sets
            for e in &level {
                for m in e.members() {
                    assert!(level.contains(m), "{m} escapes level {n}");
                }
            }
        }
    }

    #[test]
    fn kuratowski_shape() {
        let a = Entity::atom("a");
        let b = Entity::atom("b");
        let p = kuratowski(a.clone(), b.clone());
        assert_eq!(p, parse_entity("{{a},{a,b}}").unwrap());
        // (a,a) collapses extensionally
        assert_eq!(kuratowski(a.clone(), a.clone()), parse_entity("{{a}}").unwrap());
        assert_eq!(decode_pair(&p).unwrap(), (a.clone(), b.clone()));
        assert_eq!(
            decode_pair(&kuratowski(a.clone(), a.clone())).unwrap(),
            (a.clone(), a.clone())
        );
        // (a,b,c) = ((a,b),c)
        let c = Entity::atom("c");
        let t = tuple(&[a.clone(), b.clone(), c.clone()]);
        assert_eq!(t, kuratowski(kuratowski(a, b), c));
    }

    #[test]
    fn pair_sugar_in_literals() {
        let a = Entity::atom("a");
        let b = Entity::atom("b");
        assert_eq!(parse_entity("(a,b)").unwrap(), kuratowski(a, b));
        assert!(decode_pair(&parse_entity("{a,b}").unwrap()).is_err());
    }

    #[test]
    fn transitivity_checks() {
        let a = Entity::atom("a");
        let atoms_only = parse_entity("{a,b}").unwrap();
        assert!(is_transitive(&atoms_only));
        let missing = Entity::set([Entity::set([a.clone()])]);
        assert!(!is_transitive(&missing));

        let t = build_supertransitive(&atoms_only).unwrap();
        assert_eq!(t.len(), 6);
        assert!(is_supertransitive(&t));
        assert!(build_supertransitive(&missing).is_err());
    }

    #[test]
    fn supertransitive_rejects_plain_transitive() {
        // {a, {a}} is transitive but not supertransitive: P({a}) has the
        // member {} which is absent.
        let a = Entity::atom("a");
        let s = Entity::set([a.clone(), Entity::set([a])]);
        assert!(is_transitive(&s));
        assert!(!is_supertransitive(&s));
    }
}
