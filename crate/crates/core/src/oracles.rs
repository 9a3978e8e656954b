//! Built-in adversarial oracles for the diagonalization engines. None of
//! them can be honest; they exist to drive both engine outcomes.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use fnv::FnvHasher;

use crate::carrier::{Atom, AtomSet, SetSpec};
use crate::error::ParseError;
use crate::partition::FinitaryPartition;
use crate::perm::{deflate, FinPerm};

/// Stable across runs and platforms.
fn stable_hash(text: &str) -> u64 {
    let mut h = FnvHasher::default();
    text.hash(&mut h);
    h.finish()
}

/// Restricts `s` to its `n` least moved points.
pub fn truncate(n: usize) -> impl Fn(&FinPerm) -> FinPerm + Clone {
    move |s: &FinPerm| {
        let keep: AtomSet = s.moved_points().take(n).collect();
        deflate(s, &SetSpec::Finite(keep))
    }
}

/// `P` values: the identity and `(0;j)` for `0 < j < P`.
pub fn perm_pool_values(size: usize) -> Vec<FinPerm> {
    std::iter::once(FinPerm::identity())
        .chain((1..size as u32).map(|j| FinPerm::transposition(Atom(0), Atom(j))))
        .collect()
}

/// Hashes the cycle notation of the input into [`perm_pool_values`].
pub fn perm_pool(size: usize) -> impl Fn(&FinPerm) -> FinPerm + Clone {
    let values = perm_pool_values(size.max(1));
    move |s: &FinPerm| values[(stable_hash(&s.to_string()) % values.len() as u64) as usize].clone()
}

/// The block of the least atom in a non-singleton block; empty for the
/// all-singletons partition.
pub fn min_block(p: &FinitaryPartition) -> AtomSet {
    p.support()
        .iter()
        .next()
        .map(|a| p.block_of(a))
        .unwrap_or_default()
}

/// `P` values: `{0, ..., j-1}` for `j < P`.
pub fn part_pool_values(size: usize) -> Vec<AtomSet> {
    (0..size as u32).map(|j| (0..j).collect()).collect()
}

/// Hashes the text form of the input into [`part_pool_values`].
pub fn part_pool(size: usize) -> impl Fn(&FinitaryPartition) -> AtomSet + Clone {
    let values = part_pool_values(size.max(1));
    move |p: &FinitaryPartition| {
        values[(stable_hash(&p.to_string()) % values.len() as u64) as usize].clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermOracle {
    Truncate,
    Pool(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartOracle {
    MinBlock,
    Pool(usize),
}

fn parse_pool(text: &str) -> Result<Option<usize>, ParseError> {
    let Some(size) = text.strip_prefix("pool:") else {
        return Ok(None);
    };
    match size.parse::<usize>() {
        Ok(p) if p >= 1 => Ok(Some(p)),
        _ => Err(ParseError::new(
            text,
            "pool size must be a positive integer",
        )),
    }
}

impl FromStr for PermOracle {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        if text == "truncate" {
            return Ok(PermOracle::Truncate);
        }
        parse_pool(text)?
            .map(PermOracle::Pool)
            .ok_or_else(|| ParseError::new(text, "expected truncate or pool:P"))
    }
}

impl FromStr for PartOracle {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        if text == "min-block" {
            return Ok(PartOracle::MinBlock);
        }
        parse_pool(text)?
            .map(PartOracle::Pool)
            .ok_or_else(|| ParseError::new(text, "expected min-block or pool:P"))
    }
}

impl fmt::Display for PermOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PermOracle::Truncate => f.write_str("truncate"),
            PermOracle::Pool(p) => write!(f, "pool:{p}"),
        }
    }
}

impl fmt::Display for PartOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartOracle::MinBlock => f.write_str("min-block"),
            PartOracle::Pool(p) => write!(f, "pool:{p}"),
        }
    }
}

impl PermOracle {
    pub fn build(self, n: usize) -> Box<dyn Fn(&FinPerm) -> FinPerm> {
        match self {
            PermOracle::Truncate => Box::new(truncate(n)),
            PermOracle::Pool(p) => Box::new(perm_pool(p)),
        }
    }
}

impl PartOracle {
    pub fn build(self) -> Box<dyn Fn(&FinitaryPartition) -> AtomSet> {
        match self {
            PartOracle::MinBlock => Box::new(min_block),
            PartOracle::Pool(p) => Box::new(part_pool(p)),
        }
    }
}
