//! Finitely supported permutations of the atom universe.
//!
//! A [`FinPerm`] stores only its moved points, so structural equality is
//! equality of permutations. Composition follows the usual convention:
//! `compose(g, f)` applies `f` first.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::carrier::{parse_atom, Atom, AtomSet, SetSpec};
use crate::error::{ParseError, PermError};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinPerm {
    moved: BTreeMap<Atom, Atom>,
}

impl FinPerm {
    pub fn identity() -> Self {
        FinPerm::default()
    }

    /// The cycle `(a_0;...;a_n)`: `a_0 -> a_1 -> ... -> a_n -> a_0`.
    pub fn cycle(points: &[Atom]) -> Result<Self, PermError> {
        if points.len() == 1 {
            return Err(PermError::SinglePoint);
        }
        let mut moved = BTreeMap::new();
        for (i, &a) in points.iter().enumerate() {
            let next = points[(i + 1) % points.len()];
            if moved.insert(a, next).is_some() {
                return Err(PermError::DuplicatePoint(a));
            }
        }
        Ok(FinPerm { moved })
    }

    /// Shorthand for tests and fixed constructions with known-good input.
    pub fn cyc(points: &[u32]) -> Self {
        let atoms: Vec<Atom> = points.iter().copied().map(Atom).collect();
        FinPerm::cycle(&atoms).expect("valid cycle")
    }

    pub fn transposition(a: Atom, b: Atom) -> Self {
        FinPerm::cycle(&[a, b]).expect("distinct atoms")
    }

    /// Builds a permutation from an arbitrary finite map, dropping fixed
    /// points and checking bijectivity on the support.
    pub fn from_map<I: IntoIterator<Item = (Atom, Atom)>>(pairs: I) -> Result<Self, PermError> {
        let mut moved = BTreeMap::new();
        for (a, b) in pairs {
            if moved.insert(a, b).is_some() {
                return Err(PermError::DuplicatePoint(a));
            }
        }
        moved.retain(|a, b| a != b);
        let keys: AtomSet = moved.keys().copied().collect();
        let values: AtomSet = moved.values().copied().collect();
        if keys != values {
            return Err(PermError::NotBijective);
        }
        Ok(FinPerm { moved })
    }

    pub fn apply(&self, a: Atom) -> Atom {
        self.moved.get(&a).copied().unwrap_or(a)
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    pub fn mov(&self) -> AtomSet {
        self.moved.keys().copied().collect()
    }

    pub fn mov_len(&self) -> usize {
        self.moved.len()
    }

    pub fn moves(&self, a: Atom) -> bool {
        self.moved.contains_key(&a)
    }

    /// Moved points in ascending order.
    pub fn moved_points(&self) -> impl Iterator<Item = Atom> + '_ {
        self.moved.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Atom, Atom)> + '_ {
        self.moved.iter().map(|(&a, &b)| (a, b))
    }

    /// `self ∘ f`: apply `f`, then `self`.
    pub fn after(&self, f: &FinPerm) -> FinPerm {
        compose(self, f)
    }

    pub fn inverse(&self) -> FinPerm {
        FinPerm {
            moved: self.moved.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    /// `p ∘ self ∘ p⁻¹`, the conjugation action of `p` on `self`.
    pub fn conjugate_by(&self, p: &FinPerm) -> FinPerm {
        FinPerm {
            moved: self
                .moved
                .iter()
                .map(|(&a, &b)| (p.apply(a), p.apply(b)))
                .collect(),
        }
    }

    pub fn is_involution(&self) -> bool {
        self.moved.iter().all(|(&a, &b)| self.apply(b) == a)
    }

    pub fn restrict_to(&self, x: &SetSpec) -> FinPerm {
        deflate(self, x)
    }

    /// Disjoint cycles, each starting at its least atom, sorted by that atom.
    pub fn cycles(&self) -> Vec<Vec<Atom>> {
        let mut seen = AtomSet::new();
        let mut out = Vec::new();
        for &start in self.moved.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut cyc = vec![start];
            seen.insert(start);
            let mut cur = self.apply(start);
            while cur != start {
                seen.insert(cur);
                cyc.push(cur);
                cur = self.apply(cur);
            }
            out.push(cyc);
        }
        out
    }

    pub fn to_cycles(&self) -> String {
        self.to_string()
    }
}

/// `g ∘ f`: apply `f` first, then `g`.
pub fn compose(g: &FinPerm, f: &FinPerm) -> FinPerm {
    let mut moved = BTreeMap::new();
    for a in f.moved.keys().chain(g.moved.keys()) {
        let b = g.apply(f.apply(*a));
        if b != *a {
            moved.insert(*a, b);
        }
    }
    FinPerm { moved }
}

pub fn inverse(s: &FinPerm) -> FinPerm {
    s.inverse()
}

pub fn mov(s: &FinPerm) -> AtomSet {
    s.mov()
}

/// The restriction `s ▷ X`, extended by the identity off `X`: each `x ∈ X`
/// goes to the first point of its forward `s`-orbit that lies in `X`.
pub fn deflate(s: &FinPerm, x: &SetSpec) -> FinPerm {
    let mut moved = BTreeMap::new();
    for &a in s.moved.keys() {
        if !x.contains(a) {
            continue;
        }
        // The orbit of `a` is finite and returns to `a` itself.
        let mut cur = s.apply(a);
        while !x.contains(cur) {
            cur = s.apply(cur);
        }
        if cur != a {
            moved.insert(a, cur);
        }
    }
    FinPerm { moved }
}

impl fmt::Display for FinPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("()");
        }
        for cyc in self.cycles() {
            f.write_str("(")?;
            for (i, a) in cyc.iter().enumerate() {
                if i > 0 {
                    f.write_str(";")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Serialize for FinPerm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Parses cycle notation: `()` or one or more disjoint cycles `(a;b;...)`
/// with at least two atoms each.
impl FromStr for FinPerm {
    type Err = PermError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s = text.trim();
        if s == "()" {
            return Ok(FinPerm::identity());
        }
        let mut rest = s;
        let mut moved = BTreeMap::new();
        if rest.is_empty() {
            return Err(ParseError::new(text, "empty permutation").into());
        }
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| ParseError::new(text, "expected '('"))?;
            let close = body
                .find(')')
                .ok_or_else(|| ParseError::new(text, "unclosed cycle"))?;
            let atoms = body[..close]
                .split(';')
                .map(parse_atom)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ParseError::new(text, "bad atom in cycle"))?;
            if atoms.len() < 2 {
                return Err(ParseError::new(text, "a cycle needs at least two atoms").into());
            }
            for (i, &a) in atoms.iter().enumerate() {
                if moved.insert(a, atoms[(i + 1) % atoms.len()]).is_some() {
                    return Err(PermError::DuplicatePoint(a));
                }
            }
            rest = &body[close + 1..];
        }
        Ok(FinPerm { moved })
    }
}
