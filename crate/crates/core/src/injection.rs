//! An injection from permutations moving exactly `n` points into
//! permutations moving exactly `m` points, for `m >= n + 2`, with a decoder.
//!
//! A [`Tableau`] reserves `(m - n)(2^(n+1) - 1)` atoms arranged in levels
//! `H_0, ..., H_n`. Level `i` holds `m - n` fresh atoms `a_{i,j}` plus one
//! atom `b_{i,x}` for every atom `x` of the earlier levels. A permutation `s`
//! moving `n` points misses some level; let `i` be the first. Every moved
//! point of `s` lying in an earlier level `x` is swapped out to its copy
//! `b_{i,x}`, and the cycle on `a_{i,0..m-n}` is multiplied on. That cycle
//! marks `i`, and the copies in level `i` tell which points were swapped.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::carrier::{Atom, AtomSet};
use crate::error::TableauError;
use crate::exec::{self, Strategy};
use crate::perm::{compose, FinPerm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    m: usize,
    levels: Vec<AtomSet>,
    a_atoms: Vec<Vec<Atom>>,
    b_atoms: Vec<BTreeMap<Atom, Atom>>,
}

/// Intermediate values of one encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EncodeTrace {
    pub i_s: usize,
    pub h_s: FinPerm,
    pub t_s: FinPerm,
    pub u_s: FinPerm,
}

impl Tableau {
    /// Reserves the lowest-index atoms: level 0 first, within a level the
    /// `a` atoms before the `b` atoms, `b` atoms keyed in atom order.
    pub fn build(n: usize, m: usize) -> Result<Self, TableauError> {
        if m < n + 2 {
            return Err(TableauError::BadParameters { n, m });
        }
        let width = m - n;
        let mut next = 0u32;
        let mut take = || {
            let a = Atom(next);
            next += 1;
            a
        };
        let mut levels: Vec<AtomSet> = Vec::with_capacity(n + 1);
        let mut a_atoms = Vec::with_capacity(n + 1);
        let mut b_atoms = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            let a: Vec<Atom> = (0..width).map(|_| take()).collect();
            let earlier: AtomSet = levels.iter().flat_map(|h| h.iter()).collect();
            let b: BTreeMap<Atom, Atom> = earlier.iter().map(|x| (x, take())).collect();
            let mut level: AtomSet = a.iter().copied().collect();
            level.extend(b.values().copied());
            levels.push(level);
            a_atoms.push(a);
            b_atoms.push(b);
        }
        Ok(Tableau {
            n,
            m,
            levels,
            a_atoms,
            b_atoms,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The level sets `H_0, ..., H_n`.
    pub fn levels(&self) -> &[AtomSet] {
        &self.levels
    }

    pub fn a(&self, i: usize, j: usize) -> Atom {
        self.a_atoms[i][j]
    }

    /// `b_{i,x}` for `x` in an earlier level than `i`.
    pub fn b(&self, i: usize, x: Atom) -> Option<Atom> {
        self.b_atoms[i].get(&x).copied()
    }

    pub fn reserved(&self) -> AtomSet {
        self.levels.iter().flat_map(|h| h.iter()).collect()
    }

    fn marker_cycle(&self, i: usize) -> FinPerm {
        FinPerm::cycle(&self.a_atoms[i]).expect("m - n >= 2 distinct atoms")
    }

    /// Involution swapping each `x` with `b_{i,x}` for the given `x`.
    fn swaps<I: IntoIterator<Item = Atom>>(&self, i: usize, xs: I) -> FinPerm {
        let mut pairs = Vec::new();
        for x in xs {
            let b = self.b_atoms[i][&x];
            pairs.push((x, b));
            pairs.push((b, x));
        }
        FinPerm::from_map(pairs).expect("swaps of disjoint pairs")
    }

    pub fn encode(&self, s: &FinPerm) -> Result<(FinPerm, EncodeTrace), TableauError> {
        if s.mov_len() != self.n {
            return Err(TableauError::WrongMovSize {
                expected: self.n,
                got: s.mov_len(),
            });
        }
        let moved = s.mov();
        let i_s = self
            .levels
            .iter()
            .position(|h| h.is_disjoint(&moved))
            .expect("n moved points cannot meet all n + 1 disjoint levels");
        let earlier: AtomSet = self.levels[..i_s].iter().flat_map(|h| h.iter()).collect();
        let h_s = self.swaps(i_s, moved.intersection(&earlier).iter());
        let t_s = compose(&h_s, &compose(s, &h_s));
        let u_s = self.marker_cycle(i_s);
        let image = compose(&t_s, &u_s);
        debug_assert_eq!(image.mov_len(), self.m);
        Ok((image, EncodeTrace { i_s, h_s, t_s, u_s }))
    }

    /// Recovers `s` from `encode(s)`; anything outside the image is rejected.
    pub fn decode(&self, t: &FinPerm) -> Result<FinPerm, TableauError> {
        if t.mov_len() != self.m {
            return Err(TableauError::NotInImage("wrong number of moved points"));
        }
        let moved = t.mov();
        let i_s = self
            .levels
            .iter()
            .position(|h| !h.is_disjoint(&moved))
            .ok_or(TableauError::NotInImage("moves no reserved level"))?;
        let marker: AtomSet = self.a_atoms[i_s].iter().copied().collect();
        let u_s = self.marker_cycle(i_s);
        if marker.iter().any(|a| t.apply(a) != u_s.apply(a)) {
            return Err(TableauError::NotInImage("marker cycle missing"));
        }
        let t_s = FinPerm::from_map(t.pairs().filter(|(a, _)| !marker.contains(*a)))
            .map_err(|_| TableauError::NotInImage("marker cycle not separable"))?;
        let earlier: AtomSet = self.levels[..i_s].iter().flat_map(|h| h.iter()).collect();
        let swapped: Vec<Atom> = earlier
            .iter()
            .filter(|&x| t_s.moves(self.b_atoms[i_s][&x]))
            .collect();
        let h_s = self.swaps(i_s, swapped);
        let s = compose(&h_s, &compose(&t_s, &h_s));
        match self.encode(&s) {
            Ok((again, _)) if again == *t => Ok(s),
            _ => Err(TableauError::NotInImage("re-encoding differs")),
        }
    }
}

pub fn build_tableau(n: usize, m: usize) -> Result<Tableau, TableauError> {
    Tableau::build(n, m)
}

/// Every permutation of `pool` moving exactly `n` points.
pub fn permutations_moving(pool: &AtomSet, n: usize) -> Vec<FinPerm> {
    use itertools::Itertools;
    let atoms: Vec<Atom> = pool.iter().collect();
    let mut out = Vec::new();
    for support in atoms.iter().copied().combinations(n) {
        for image in support.iter().copied().permutations(n) {
            if support.iter().zip(&image).all(|(a, b)| a != b) {
                out.push(FinPerm::from_map(support.iter().copied().zip(image)).expect("bijection"));
            }
        }
    }
    out
}

/// Outcome of checking the encoder on every permutation of a pool.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundTripReport {
    pub checked: usize,
    pub round_trip_failures: usize,
    pub wrong_size: usize,
    pub distinct_images: usize,
}

/// Encodes every `s` moving `n` points of the reserved atoms plus `extra`
/// fresh atoms, then decodes, checking sizes and injectivity.
pub fn verify_exhaustive(tableau: &Tableau, extra: usize, strategy: Strategy) -> RoundTripReport {
    let reserved = tableau.reserved();
    let mut pool = reserved.clone();
    pool.extend(crate::carrier::fresh_atoms(extra, &reserved).iter());
    let domain = permutations_moving(&pool, tableau.n());
    let results = exec::flat_map(
        &domain,
        |s| {
            let (image, _) = tableau.encode(s).expect("domain has the right size");
            let ok = tableau.decode(&image).as_ref() == Ok(s);
            vec![(image, ok)]
        },
        strategy,
    );
    let mut images: Vec<&FinPerm> = results.iter().map(|(img, _)| img).collect();
    images.sort();
    images.dedup();
    RoundTripReport {
        checked: domain.len(),
        round_trip_failures: results.iter().filter(|(_, ok)| !ok).count(),
        wrong_size: results
            .iter()
            .filter(|(img, _)| img.mov_len() != tableau.m())
            .count(),
        distinct_images: images.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_shapes() {
        let t = build_tableau(2, 4).unwrap();
        assert_eq!(t.reserved().len(), 14);
        let sizes: Vec<usize> = t.levels().iter().map(AtomSet::len).collect();
        assert_eq!(sizes, vec![2, 4, 8]);
        let t0 = build_tableau(0, 2).unwrap();
        assert_eq!(t0.reserved().len(), 2);
        assert_eq!(t0.levels()[0].len(), 2);
        assert_eq!(
            build_tableau(3, 3),
            Err(TableauError::BadParameters { n: 3, m: 3 })
        );
    }

    #[test]
    fn tableau_layout_is_lowest_atoms() {
        let t = build_tableau(2, 4).unwrap();
        assert_eq!(t.levels()[0], AtomSet::from([0, 1]));
        assert_eq!(t.levels()[1], AtomSet::from([2, 3, 4, 5]));
        assert_eq!(t.b(1, Atom(0)), Some(Atom(4)));
        assert_eq!(t.b(2, Atom(5)), Some(Atom(13)));
        for (n, m) in [(1, 3), (2, 5), (3, 5), (4, 7)] {
            let t = build_tableau(n, m).unwrap();
            assert_eq!(t.reserved().len(), (m - n) * ((1 << (n + 1)) - 1));
            for (i, h) in t.levels().iter().enumerate() {
                assert_eq!(h.len(), (m - n) << i);
                for j in 0..i {
                    assert!(h.is_disjoint(&t.levels()[j]));
                }
            }
        }
    }

    #[test]
    fn encode_fresh_support() {
        let t = build_tableau(2, 4).unwrap();
        let s = FinPerm::cyc(&[20, 21]);
        let (img, trace) = t.encode(&s).unwrap();
        assert_eq!(trace.i_s, 0);
        assert!(trace.h_s.is_identity());
        assert_eq!(
            img,
            compose(&s, &FinPerm::cycle(&[t.a(0, 0), t.a(0, 1)]).unwrap())
        );
        assert_eq!(img.mov_len(), 4);
        assert_eq!(t.decode(&img).unwrap(), s);
    }

    #[test]
    fn encode_on_level_zero() {
        let t = build_tableau(2, 4).unwrap();
        let (a00, a01) = (t.a(0, 0), t.a(0, 1));
        let s = FinPerm::cycle(&[a00, a01]).unwrap();
        let (img, trace) = t.encode(&s).unwrap();
        assert_eq!(trace.i_s, 1);
        let (b0, b1) = (t.b(1, a00).unwrap(), t.b(1, a01).unwrap());
        assert_eq!(
            trace.h_s,
            compose(
                &FinPerm::transposition(a00, b0),
                &FinPerm::transposition(a01, b1)
            )
        );
        assert!(trace.h_s.is_involution());
        assert_eq!(trace.t_s, FinPerm::cycle(&[b0, b1]).unwrap());
        let u = FinPerm::cycle(&[t.a(1, 0), t.a(1, 1)]).unwrap();
        assert_eq!(trace.u_s, u);
        assert_eq!(img, compose(&trace.t_s, &u));
        assert_eq!(t.decode(&img).unwrap(), s);
    }

    #[test]
    fn encode_and_decode_errors() {
        let t = build_tableau(2, 4).unwrap();
        assert_eq!(
            t.encode(&FinPerm::identity()).unwrap_err(),
            TableauError::WrongMovSize {
                expected: 2,
                got: 0
            }
        );
        assert!(matches!(
            t.decode(&FinPerm::identity()),
            Err(TableauError::NotInImage(_))
        ));
        let s = FinPerm::cycle(&[t.a(0, 0), t.a(0, 1)]).unwrap();
        assert!(matches!(t.decode(&s), Err(TableauError::NotInImage(_))));
        // right size, but no marker cycle
        assert!(matches!(
            t.decode(&FinPerm::cyc(&[20, 21, 22, 23])),
            Err(TableauError::NotInImage(_))
        ));
        // level-1 marker on a permutation that level 0 would have encoded
        let fake = compose(&FinPerm::cyc(&[2, 3]), &FinPerm::cyc(&[20, 21]));
        assert_eq!(
            t.decode(&fake),
            Err(TableauError::NotInImage("re-encoding differs"))
        );
    }

    #[test]
    fn degenerate_sizes() {
        let t = build_tableau(0, 2).unwrap();
        let (img, trace) = t.encode(&FinPerm::identity()).unwrap();
        assert_eq!(img, FinPerm::cyc(&[0, 1]));
        assert_eq!(trace.i_s, 0);
        assert_eq!(t.decode(&img).unwrap(), FinPerm::identity());
        // nothing moves exactly one point, so n = 1 has an empty domain
        let t1 = build_tableau(1, 3).unwrap();
        assert!(permutations_moving(&t1.reserved(), 1).is_empty());
    }

    #[test]
    fn exhaustive_small_cases() {
        for (n, m) in [(0, 2), (1, 3), (2, 4), (2, 6)] {
            let t = build_tableau(n, m).unwrap();
            let r = verify_exhaustive(&t, 4, Strategy::Sequential);
            assert_eq!(r.round_trip_failures, 0);
            assert_eq!(r.wrong_size, 0);
            assert_eq!(r.distinct_images, r.checked);
        }
    }

    #[test]
    fn traces_keep_supports_apart() {
        let t = build_tableau(3, 5).unwrap();
        let mut pool = t.reserved();
        pool.extend(crate::carrier::fresh_atoms(2, &t.reserved()).iter());
        for s in permutations_moving(&pool, 3).iter().step_by(7) {
            let (_, tr) = t.encode(s).unwrap();
            assert!(t.levels()[tr.i_s].is_disjoint(&s.mov()));
            assert!(t.levels()[..tr.i_s]
                .iter()
                .all(|h| !h.is_disjoint(&s.mov())));
            assert!(tr.h_s.is_involution());
            assert_eq!(tr.t_s.mov_len(), 3);
            assert!(tr.t_s.mov().is_disjoint(&tr.u_s.mov()));
        }
    }
}
