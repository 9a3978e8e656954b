//! The atom universe `{0, 1, 2, ...}` standing in for an infinite carrier set,
//! together with finite and cofinite set descriptions over it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::ParseError;

/// An element of the carrier, named by its index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Atom(pub u32);

impl Atom {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl From<u32> for Atom {
    fn from(i: u32) -> Self {
        Atom(i)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Canonical comparison of atoms. Every "least" or "pick" step in the crate
/// resolves through this order.
pub fn atom_cmp(a: Atom, b: Atom) -> std::cmp::Ordering {
    a.cmp(&b)
}

/// A finite set of atoms, iterated in ascending order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomSet(BTreeSet<Atom>);

impl AtomSet {
    pub fn new() -> Self {
        AtomSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: Atom) -> bool {
        self.0.contains(&a)
    }

    pub fn insert(&mut self, a: Atom) -> bool {
        self.0.insert(a)
    }

    pub fn remove(&mut self, a: Atom) -> bool {
        self.0.remove(&a)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Atom> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<Atom> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Atom> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn extend<I: IntoIterator<Item = Atom>>(&mut self, atoms: I) {
        self.0.extend(atoms)
    }
}

impl FromIterator<Atom> for AtomSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        AtomSet(iter.into_iter().collect())
    }
}

impl FromIterator<u32> for AtomSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        AtomSet(iter.into_iter().map(Atom).collect())
    }
}

impl<const N: usize> From<[u32; N]> for AtomSet {
    fn from(atoms: [u32; N]) -> Self {
        atoms.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a AtomSet {
    type Item = Atom;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, Atom>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for AtomSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Parses `{a,b,c}`. Atoms may appear in any order but must not repeat.
impl FromStr for AtomSet {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let inner = s
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| ParseError::new(s, "expected a set of the form {a,b,c}"))?;
        let mut set = AtomSet::new();
        if inner.trim().is_empty() {
            return Ok(set);
        }
        for tok in inner.split(',') {
            let a = parse_atom(tok.trim()).map_err(|_| ParseError::new(s, "bad atom"))?;
            if !set.insert(a) {
                return Err(ParseError::new(s, "repeated atom"));
            }
        }
        Ok(set)
    }
}

pub(crate) fn parse_atom(tok: &str) -> Result<Atom, ParseError> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::new(tok, "atoms are decimal integers"));
    }
    tok.parse::<u32>()
        .map(Atom)
        .map_err(|_| ParseError::new(tok, "atom out of range"))
}

/// Returns the `count` smallest atoms not in `avoid`.
pub fn fresh_atoms(count: usize, avoid: &AtomSet) -> AtomSet {
    let mut out = AtomSet::new();
    let mut next = 0u32;
    while out.len() < count {
        let a = Atom(next);
        if !avoid.contains(a) {
            out.insert(a);
        }
        next += 1;
    }
    out
}

/// A subset of the carrier that is either finite or the complement of a
/// finite set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SetSpec {
    Finite(AtomSet),
    CofiniteComplement(AtomSet),
}

impl SetSpec {
    /// The whole carrier.
    pub fn everything() -> Self {
        SetSpec::CofiniteComplement(AtomSet::new())
    }

    pub fn contains(&self, a: Atom) -> bool {
        spec_contains(self, a)
    }
}

pub fn spec_contains(x: &SetSpec, a: Atom) -> bool {
    match x {
        SetSpec::Finite(members) => members.contains(a),
        SetSpec::CofiniteComplement(excluded) => !excluded.contains(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn atom_order() {
        assert_eq!(atom_cmp(Atom(0), Atom(1)), Ordering::Less);
        assert_eq!(atom_cmp(Atom(5), Atom(5)), Ordering::Equal);
        assert_eq!(atom_cmp(Atom(9), Atom(2)), Ordering::Greater);
    }

    #[test]
    fn fresh_atoms_examples() {
        assert_eq!(fresh_atoms(3, &AtomSet::new()), AtomSet::from([0, 1, 2]));
        assert_eq!(
            fresh_atoms(2, &AtomSet::from([0, 2])),
            AtomSet::from([1, 3])
        );
        assert_eq!(fresh_atoms(0, &AtomSet::from([7])), AtomSet::new());
    }

    #[test]
    fn spec_membership() {
        assert!(spec_contains(
            &SetSpec::Finite(AtomSet::from([1, 3])),
            Atom(3)
        ));
        assert!(!spec_contains(
            &SetSpec::CofiniteComplement(AtomSet::from([2])),
            Atom(2)
        ));
        assert!(spec_contains(&SetSpec::everything(), Atom(42)));
    }

    #[test]
    fn set_text_form() {
        let s = AtomSet::from([3, 1, 2]);
        assert_eq!(s.to_string(), "{1,2,3}");
        assert_eq!("{3,1,2}".parse::<AtomSet>().unwrap(), s);
        assert_eq!("{}".parse::<AtomSet>().unwrap(), AtomSet::new());
        assert!("{1,1}".parse::<AtomSet>().is_err());
        assert!("{1,-2}".parse::<AtomSet>().is_err());
        assert!("1,2".parse::<AtomSet>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn fresh_atoms_are_fresh(count in 0usize..40, avoid in proptest::collection::btree_set(0u32..60, 0..30)) {
            let avoid: AtomSet = avoid.into_iter().collect();
            let got = fresh_atoms(count, &avoid);
            proptest::prop_assert_eq!(got.len(), count);
            proptest::prop_assert!(got.is_disjoint(&avoid));
        }

        #[test]
        fn atom_cmp_is_total(a in 0u32..100, b in 0u32..100, c in 0u32..100) {
            let (a, b, c) = (Atom(a), Atom(b), Atom(c));
            proptest::prop_assert_eq!(atom_cmp(a, b), atom_cmp(b, a).reverse());
            if atom_cmp(a, b) != Ordering::Greater && atom_cmp(b, c) != Ordering::Greater {
                proptest::prop_assert!(atom_cmp(a, c) != Ordering::Greater);
            }
        }
    }
}
