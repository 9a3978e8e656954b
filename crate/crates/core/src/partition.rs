//! Partitions of the carrier into finite blocks, the quotient frame built
//! from a list of finite sets, the orders on subsets and partitions of its
//! classes, and exact Bell and derangement numbers.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::carrier::{Atom, AtomSet};
use crate::error::{ParseError, PartitionError};
use crate::exec::{self, Strategy};

/// Largest `l` accepted by [`bell`].
pub const BELL_MAX: usize = 25;
/// Largest `j` accepted by [`derangement`].
pub const DERANGEMENT_MAX: usize = 20;
/// Default cap on the number of classes for [`enumerate_partitions_r`].
pub const ENUMERATION_CAP: usize = 12;

/// A partition of the carrier with finite blocks, stored as its blocks of
/// size at least two. Every other atom is a singleton block.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinitaryPartition {
    blocks: BTreeSet<AtomSet>,
}

impl FinitaryPartition {
    pub fn all_singletons() -> Self {
        FinitaryPartition::default()
    }

    pub fn from_blocks<I: IntoIterator<Item = AtomSet>>(blocks: I) -> Result<Self, PartitionError> {
        let mut seen = AtomSet::new();
        let mut kept = BTreeSet::new();
        for block in blocks {
            for a in &block {
                if !seen.insert(a) {
                    return Err(PartitionError::OverlappingBlocks(a));
                }
            }
            if block.len() >= 2 {
                kept.insert(block);
            }
        }
        Ok(FinitaryPartition { blocks: kept })
    }

    /// Blocks of size at least two, ordered by least atom.
    pub fn exceptional_blocks(&self) -> impl Iterator<Item = &AtomSet> {
        self.blocks.iter()
    }

    pub fn is_all_singletons(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The block containing `a` (a singleton when `a` is in no exceptional block).
    pub fn block_of(&self, a: Atom) -> AtomSet {
        self.blocks
            .iter()
            .find(|b| b.contains(a))
            .cloned()
            .unwrap_or_else(|| AtomSet::from_iter([a]))
    }

    /// Atoms lying in non-singleton blocks.
    pub fn support(&self) -> AtomSet {
        self.blocks.iter().flat_map(|b| b.iter()).collect()
    }
}

impl fmt::Display for FinitaryPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return f.write_str("{}*");
        }
        for b in &self.blocks {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl Serialize for FinitaryPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for FinitaryPartition {
    type Err = PartitionError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s = text.trim();
        if s == "{}*" {
            return Ok(FinitaryPartition::all_singletons());
        }
        if s.is_empty() {
            return Err(ParseError::new(text, "empty partition").into());
        }
        let mut blocks = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            if !rest.starts_with('{') {
                return Err(ParseError::new(text, "expected '{'").into());
            }
            let close = rest
                .find('}')
                .ok_or_else(|| ParseError::new(text, "unclosed block"))?;
            let block: AtomSet = rest[..=close].parse()?;
            if block.is_empty() {
                return Err(ParseError::new(text, "empty block").into());
            }
            blocks.push(block);
            rest = &rest[close + 1..];
        }
        FinitaryPartition::from_blocks(blocks)
    }
}

/// A set of class indices of a [`QuotientFrame`], kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ClassSet(Vec<usize>);

impl ClassSet {
    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ClassSet(v)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }
}

impl fmt::Display for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

/// Walks two ascending sequences and decides by the least element of their
/// symmetric difference: the side containing it is the greater one.
fn cmp_by_least_difference<T, F>(a: &[T], b: &[T], cmp: F) -> Ordering
where
    F: Fn(&T, &T) -> Ordering,
{
    let mut i = 0;
    loop {
        match (a.get(i), b.get(i)) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => match cmp(x, y) {
                Ordering::Equal => i += 1,
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            },
        }
    }
}

/// Lexicographic order on characteristic strings `b_0 b_1 ... b_{l-1}` of
/// class sets, with `0 < 1` and class 0 most significant.
pub fn cmp_subsets(u: &ClassSet, v: &ClassSet) -> Ordering {
    cmp_by_least_difference(&u.0, &v.0, |x, y| x.cmp(y))
}

/// A set partition of the classes `{0, ..., l-1}`. Blocks are stored in
/// ascending [`cmp_subsets`] order, which for disjoint blocks is descending
/// order of their least class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassPartition {
    blocks: Vec<ClassSet>,
}

impl ClassPartition {
    pub fn from_blocks(mut blocks: Vec<ClassSet>) -> Self {
        blocks.retain(|b| !b.is_empty());
        blocks.sort_by(cmp_subsets);
        ClassPartition { blocks }
    }

    /// Builds the partition encoded by a restricted-growth string.
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let parts = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); parts];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        ClassPartition::from_blocks(blocks.into_iter().map(ClassSet).collect())
    }

    pub fn blocks(&self) -> &[ClassSet] {
        &self.blocks
    }

    /// Whether the blocks are pairwise disjoint and cover exactly `0..l`.
    pub fn is_partition_of(&self, l: usize) -> bool {
        let mut seen = vec![false; l];
        for b in &self.blocks {
            for &c in b.indices() {
                if c >= l || std::mem::replace(&mut seen[c], true) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl fmt::Display for ClassPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// The well-order on set partitions of the classes: characteristic
/// functions over subsets, with subsets taken in [`cmp_subsets`] order.
/// The subset-least block in the symmetric difference decides, and the
/// partition containing it is the greater.
pub fn cmp_partitions_r(q1: &ClassPartition, q2: &ClassPartition) -> Ordering {
    cmp_by_least_difference(&q1.blocks, &q2.blocks, cmp_subsets)
}

/// Restricted-growth strings of length `l` in lexicographic order.
pub fn restricted_growth_strings(l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(l);
    fn go(l: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        let top = if cur.is_empty() { 0 } else { max + 1 };
        for v in 0..=top {
            cur.push(v);
            go(l, cur, max.max(v), out);
            cur.pop();
        }
    }
    go(l, &mut cur, 0, &mut out);
    out
}

/// All set partitions of `l` classes, ascending in the R order. Generated
/// from restricted-growth strings, then sorted.
pub fn enumerate_partitions_r(
    l: usize,
    cap: usize,
    strategy: Strategy,
) -> Result<Vec<ClassPartition>, PartitionError> {
    if l > cap {
        return Err(PartitionError::BudgetExceeded { classes: l, cap });
    }
    let mut parts: Vec<ClassPartition> = restricted_growth_strings(l)
        .iter()
        .map(|rgs| ClassPartition::from_rgs(rgs))
        .collect();
    exec::sort_by(&mut parts, cmp_partitions_r, strategy);
    Ok(parts)
}

/// Visits the set partitions of `l` classes in ascending R order without
/// materializing them, stopping when `visit` breaks.
///
/// Ascending R order is descending lexicographic order of the block lists
/// (blocks in ascending subset order). The first block of such a list is
/// the one with the largest least element; the remaining blocks all have
/// smaller least elements. Candidates for each block are produced by
/// counting down over the remaining classes.
pub fn for_each_partition_r<F>(l: usize, mut visit: F) -> ControlFlow<()>
where
    F: FnMut(&ClassPartition) -> ControlFlow<()>,
{
    let rest: Vec<usize> = (0..l).collect();
    let mut prefix = Vec::new();
    descend(&rest, usize::MAX, &mut prefix, &mut visit)
}

fn descend<F>(
    rest: &[usize],
    bound: usize,
    prefix: &mut Vec<ClassSet>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&ClassPartition) -> ControlFlow<()>,
{
    if rest.is_empty() {
        let q = ClassPartition {
            blocks: prefix.clone(),
        };
        return visit(&q);
    }
    // The whole remainder as one block has the largest key.
    prefix.push(ClassSet(rest.to_vec()));
    let flow = descend(&[], bound, prefix, visit);
    prefix.pop();
    flow?;

    // Otherwise the block omits rest[0] and its least class lies below `bound`.
    let tail = &rest[1..];
    let eligible = tail.iter().take_while(|&&c| c < bound).count();
    if eligible == 0 {
        return ControlFlow::Continue(());
    }
    let mut mask = vec![true; tail.len()];
    loop {
        let block: Vec<usize> = tail
            .iter()
            .zip(&mask)
            .filter_map(|(&c, &on)| on.then_some(c))
            .collect();
        let remainder: Vec<usize> = std::iter::once(rest[0])
            .chain(
                tail.iter()
                    .zip(&mask)
                    .filter_map(|(&c, &on)| (!on).then_some(c)),
            )
            .collect();
        let least = block[0];
        prefix.push(ClassSet(block));
        let flow = descend(&remainder, least, prefix, visit);
        prefix.pop();
        flow?;

        // Decrement the mask read as a binary number, tail[0] most significant.
        let last = mask.iter().rposition(|&on| on).expect("nonzero mask");
        mask[last] = false;
        for m in &mut mask[last + 1..] {
            *m = true;
        }
        if !mask[..eligible].iter().any(|&on| on) {
            return ControlFlow::Continue(());
        }
    }
}

/// The quotient of `∪C` by "lies in exactly the same members of `C`", with
/// classes in the induced order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientFrame {
    c_list: Vec<AtomSet>,
    classes: Vec<QuotientClass>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientClass {
    pub atoms: AtomSet,
    /// Membership in each entry of the frame's set list.
    pub membership: Vec<bool>,
}

impl QuotientFrame {
    /// Builds the frame from sets listed in their well-order. Repeated sets
    /// keep their first position.
    pub fn build(values: &[AtomSet]) -> Self {
        let mut c_list: Vec<AtomSet> = Vec::with_capacity(values.len());
        for v in values {
            if !c_list.contains(v) {
                c_list.push(v.clone());
            }
        }
        let universe: AtomSet = c_list.iter().flat_map(|c| c.iter()).collect();
        // Vec<bool> orders lexicographically with false < true, which is the
        // class order: at the first set where two classes differ, the class
        // inside that set is the greater.
        let mut groups: BTreeMap<Vec<bool>, AtomSet> = BTreeMap::new();
        for a in &universe {
            let key: Vec<bool> = c_list.iter().map(|c| c.contains(a)).collect();
            groups.entry(key).or_default().insert(a);
        }
        let classes = groups
            .into_iter()
            .map(|(membership, atoms)| QuotientClass { atoms, membership })
            .collect();
        QuotientFrame { c_list, classes }
    }

    pub fn c_list(&self) -> &[AtomSet] {
        &self.c_list
    }

    pub fn classes(&self) -> &[QuotientClass] {
        &self.classes
    }

    /// Number of classes.
    pub fn l(&self) -> usize {
        self.classes.len()
    }

    pub fn union(&self) -> AtomSet {
        self.classes.iter().flat_map(|c| c.atoms.iter()).collect()
    }

    /// Classes contained in the `c`-th listed set.
    pub fn classes_in(&self, c: usize) -> ClassSet {
        ClassSet(
            self.classes
                .iter()
                .enumerate()
                .filter_map(|(i, q)| q.membership[c].then_some(i))
                .collect(),
        )
    }

    /// `u <_D v`: at the first listed set where membership differs, `v` is
    /// inside it.
    pub fn class_less(&self, u: usize, v: usize) -> bool {
        let (mu, mv) = (&self.classes[u].membership, &self.classes[v].membership);
        mu.iter()
            .zip(mv)
            .find(|(a, b)| a != b)
            .is_some_and(|(&a, &b)| !a && b)
    }

    /// Unions the classes of each block of `q`; atoms outside `∪C` stay
    /// singletons.
    pub fn lift(&self, q: &ClassPartition) -> FinitaryPartition {
        let blocks = q.blocks.iter().map(|b| {
            b.indices()
                .iter()
                .flat_map(|&i| self.classes[i].atoms.iter())
                .collect::<AtomSet>()
        });
        FinitaryPartition::from_blocks(blocks).expect("classes are pairwise disjoint")
    }
}

pub fn build_frame(values: &[AtomSet]) -> QuotientFrame {
    QuotientFrame::build(values)
}

pub fn lift(q: &ClassPartition, frame: &QuotientFrame) -> FinitaryPartition {
    frame.lift(q)
}

/// Exact Bell number via the Bell triangle.
pub fn bell(l: usize) -> Result<u64, PartitionError> {
    if l > BELL_MAX {
        return Err(PartitionError::OutOfRange {
            what: "bell index",
            value: l,
            max: BELL_MAX,
        });
    }
    let mut row: Vec<u128> = vec![1];
    for _ in 0..l {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("nonempty row"));
        for &x in &row {
            let prev = *next.last().expect("nonempty row");
            next.push(prev + x);
        }
        row = next;
    }
    Ok(row[0] as u64)
}

/// Number of fixed-point-free permutations of a `j`-set.
pub fn derangement(j: usize) -> Result<u64, PartitionError> {
    if j > DERANGEMENT_MAX {
        return Err(PartitionError::OutOfRange {
            what: "derangement index",
            value: j,
            max: DERANGEMENT_MAX,
        });
    }
    let (mut prev, mut cur) = (1u64, 0u64);
    if j == 0 {
        return Ok(1);
    }
    for i in 2..=j as u64 {
        let next = (i - 1) * (cur + prev);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}
