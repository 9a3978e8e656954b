//! Finite check of the support argument against maps from permutations
//! moving `n` points into permutations moving `n + 1` points.
//!
//! Suppose `f` is supported by a finite `E`, i.e. `f(π∘s∘π⁻¹) = π∘f(s)∘π⁻¹`
//! whenever `π` fixes `E` pointwise. For `s` avoiding `E`, every candidate
//! value `t = f(s)` is refuted by one of three witnesses, checked here pair
//! by pair over a small carrier.

use serde::Serialize;

use crate::carrier::{Atom, AtomSet};
use crate::error::ProbeError;
use crate::exec::{self, Strategy};
use crate::injection::permutations_moving;
use crate::perm::{compose, FinPerm};

/// Largest carrier accepted by [`scan`].
pub const SCAN_CARRIER_MAX: usize = 8;

/// Partners sought for the first refutation.
pub const SAMPLE_PARTNERS: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportConfig {
    pub e: AtomSet,
    pub n: usize,
    /// Atoms `0..carrier`.
    pub carrier: usize,
}

impl SupportConfig {
    pub fn new(e: AtomSet, n: usize, carrier: usize) -> Result<Self, ProbeError> {
        if n < 2 {
            return Err(ProbeError::Precondition(format!(
                "n = {n}: no permutation moves exactly one point and n = 0 is degenerate"
            )));
        }
        if carrier < e.len() + n + 2 {
            return Err(ProbeError::Precondition(format!(
                "carrier of {carrier} atoms is smaller than |E| + n + 2 = {}",
                e.len() + n + 2
            )));
        }
        if let Some(a) = e.iter().find(|a| a.0 as usize >= carrier) {
            return Err(ProbeError::Precondition(format!(
                "support atom {a} is outside the carrier"
            )));
        }
        Ok(SupportConfig { e, n, carrier })
    }

    pub fn atoms(&self) -> AtomSet {
        (0..self.carrier as u32).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum ProbeVerdict {
    /// `a ∈ mov(s) ∖ mov(t)`: each `(a;b)` with `b ∉ E ∪ mov(t)` fixes `E`
    /// and `t`, so every `(a;b)∘s∘(a;b)` would share the value `t`.
    MissingMoved {
        a: Atom,
        partners: Vec<Atom>,
        /// `s` followed by its distinct conjugates by `(a;b)`.
        family: Vec<FinPerm>,
    },
    /// `a ∈ mov(t) ∖ (mov(s) ∪ E)`: `τ = (a;b)` fixes `E` and `s` but not `t`.
    ExtraOutside {
        a: Atom,
        b: Atom,
        tau: FinPerm,
        conjugate: FinPerm,
    },
    /// `mov(t) = mov(s) ∪ {e}`: `s` fixes `E`, so it must fix `t`, yet it
    /// moves `d = t(e)`.
    ForcedFixedPoint {
        e: Atom,
        d: Atom,
        witness: FinPerm,
    },
    PreconditionFail {
        reason: String,
    },
}

impl ProbeVerdict {
    pub fn is_refutation(&self) -> bool {
        !matches!(self, ProbeVerdict::PreconditionFail { .. })
    }
}

fn fail(reason: String) -> ProbeVerdict {
    ProbeVerdict::PreconditionFail { reason }
}

/// `p∘s∘p⁻¹`.
fn conjugate(s: &FinPerm, p: &FinPerm) -> FinPerm {
    compose(&compose(p, s), &p.inverse())
}

/// Classifies the assignment `s -> t` into the first applicable branch.
pub fn classify(s: &FinPerm, t: &FinPerm, cfg: &SupportConfig) -> ProbeVerdict {
    let (ms, mt) = (s.mov(), t.mov());
    if ms.len() != cfg.n {
        return fail(format!("s moves {} points, expected {}", ms.len(), cfg.n));
    }
    if mt.len() != cfg.n + 1 {
        return fail(format!(
            "t moves {} points, expected {}",
            mt.len(),
            cfg.n + 1
        ));
    }
    if !ms.is_disjoint(&cfg.e) {
        return fail("s moves a point of E".into());
    }
    if ms
        .iter()
        .chain(mt.iter())
        .any(|a| a.0 as usize >= cfg.carrier)
    {
        return fail("s or t moves a point outside the carrier".into());
    }
    let atoms = cfg.atoms();
    let blocked = cfg.e.union(&mt);

    if let Some(a) = ms.difference(&mt).iter().next() {
        let mut family = vec![s.clone()];
        let mut partners = Vec::new();
        for b in atoms.iter().filter(|&b| b != a && !blocked.contains(b)) {
            if partners.len() == SAMPLE_PARTNERS {
                break;
            }
            let image = conjugate(s, &FinPerm::transposition(a, b));
            if !family.contains(&image) {
                family.push(image);
                partners.push(b);
            }
        }
        return ProbeVerdict::MissingMoved {
            a,
            partners,
            family,
        };
    }

    let fixed_part = cfg.e.union(&ms);
    if let Some(a) = mt.difference(&fixed_part).iter().next() {
        let b = atoms
            .iter()
            .find(|&b| !blocked.contains(b))
            .expect("carrier has room outside E and mov(t)");
        let tau = FinPerm::transposition(a, b);
        let conjugate = conjugate(t, &tau);
        return ProbeVerdict::ExtraOutside {
            a,
            b,
            tau,
            conjugate,
        };
    }

    let extra: Vec<Atom> = mt.difference(&ms).iter().collect();
    let e = extra[0];
    ProbeVerdict::ForcedFixedPoint {
        e,
        d: t.apply(e),
        witness: conjugate(t, s),
    }
}

/// A permutation of `0..carrier` as its value table.
fn table(p: &FinPerm, carrier: usize) -> Vec<u32> {
    (0..carrier as u32).map(|x| p.apply(Atom(x)).0).collect()
}

/// `p∘s∘p⁻¹` computed on value tables.
fn conjugate_table(s: &[u32], p: &[u32]) -> Vec<u32> {
    let mut out = vec![0; s.len()];
    for x in 0..s.len() {
        out[p[x] as usize] = p[s[x] as usize];
    }
    out
}

fn fixes(p: &[u32], set: &AtomSet) -> bool {
    set.iter().all(|a| p[a.0 as usize] == a.0)
}

/// Rechecks a verdict from value tables alone: the witness permutation
/// fixes everything it must, and conjugation by it changes `t` or maps
/// several inputs onto the same image of `t`.
pub fn verify(s: &FinPerm, t: &FinPerm, cfg: &SupportConfig, verdict: &ProbeVerdict) -> bool {
    let c = cfg.carrier;
    let (st, tt) = (table(s, c), table(t, c));
    let moved = |p: &[u32]| -> AtomSet { (0..c as u32).filter(|&x| p[x as usize] != x).collect() };
    match verdict {
        ProbeVerdict::MissingMoved {
            a,
            partners,
            family,
        } => {
            let fix = cfg.e.union(&moved(&tt));
            let mut seen: Vec<Vec<u32>> = vec![st.clone()];
            for (b, member) in partners.iter().zip(&family[1..]) {
                let mut pi: Vec<u32> = (0..c as u32).collect();
                pi.swap(a.0 as usize, b.0 as usize);
                let image = conjugate_table(&st, &pi);
                if !fixes(&pi, &fix) || image != table(member, c) || seen.contains(&image) {
                    return false;
                }
                seen.push(image);
            }
            family.len() == partners.len() + 1
                && family[0] == *s
                && st[a.0 as usize] != a.0
                && tt[a.0 as usize] == a.0
        }
        ProbeVerdict::ExtraOutside { tau, conjugate, .. } => {
            let pi = table(tau, c);
            let image = conjugate_table(&tt, &pi);
            fixes(&pi, &cfg.e.union(&moved(&st)))
                && conjugate_table(&st, &pi) == st
                && image != tt
                && image == table(conjugate, c)
        }
        ProbeVerdict::ForcedFixedPoint { e, d, witness } => {
            let image = conjugate_table(&tt, &st);
            let mut expected = moved(&st);
            expected.insert(*e);
            cfg.e.contains(*e)
                && moved(&tt) == expected
                && tt[e.0 as usize] == d.0
                && st[d.0 as usize] != d.0
                && fixes(&st, &cfg.e)
                && image != tt
                && image == table(witness, c)
        }
        ProbeVerdict::PreconditionFail { .. } => false,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub carrier: usize,
    #[serde(rename = "E")]
    pub e: AtomSet,
    pub n: usize,
    pub pairs: usize,
    pub missing_moved: usize,
    pub extra_outside: usize,
    pub forced_fixed_point: usize,
    pub escapes: usize,
    /// Smallest family (including `s`) behind a missing-moved verdict.
    pub min_sample: Option<usize>,
    pub verified: usize,
}

#[derive(Clone, Default)]
struct Tally {
    pairs: usize,
    branch: [usize; 3],
    escapes: usize,
    min_sample: Option<usize>,
    verified: usize,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            pairs: self.pairs + other.pairs,
            branch: [0, 1, 2].map(|i| self.branch[i] + other.branch[i]),
            escapes: self.escapes + other.escapes,
            min_sample: match (self.min_sample, other.min_sample) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            verified: self.verified + other.verified,
        }
    }
}

/// Classifies and verifies every pair `(s, t)` with `s` moving `n` atoms
/// outside `E` and `t` moving `n + 1` atoms of the carrier.
pub fn scan(cfg: &SupportConfig, strategy: Strategy) -> Result<ScanReport, ProbeError> {
    if cfg.carrier > SCAN_CARRIER_MAX {
        return Err(ProbeError::CarrierTooLarge(cfg.carrier));
    }
    let atoms = cfg.atoms();
    let sources = permutations_moving(&atoms.difference(&cfg.e), cfg.n);
    let targets = permutations_moving(&atoms, cfg.n + 1);
    let tally = exec::map_reduce(
        &sources,
        Tally::default(),
        |s| {
            let mut tally = Tally::default();
            for t in &targets {
                tally.pairs += 1;
                let verdict = classify(s, t, cfg);
                match &verdict {
                    ProbeVerdict::MissingMoved { family, .. } => {
                        tally.branch[0] += 1;
                        tally.min_sample = Some(
                            tally
                                .min_sample
                                .map_or(family.len(), |m| m.min(family.len())),
                        );
                    }
                    ProbeVerdict::ExtraOutside { .. } => tally.branch[1] += 1,
                    ProbeVerdict::ForcedFixedPoint { .. } => tally.branch[2] += 1,
                    ProbeVerdict::PreconditionFail { .. } => tally.escapes += 1,
                }
                if verify(s, t, cfg, &verdict) {
                    tally.verified += 1;
                }
            }
            tally
        },
        Tally::merge,
        strategy,
    );
    Ok(ScanReport {
        carrier: cfg.carrier,
        e: cfg.e.clone(),
        n: cfg.n,
        pairs: tally.pairs,
        missing_moved: tally.branch[0],
        extra_outside: tally.branch[1],
        forced_fixed_point: tally.branch[2],
        escapes: tally.escapes,
        min_sample: tally.min_sample,
        verified: tally.verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(e: &[u32], n: usize, carrier: usize) -> SupportConfig {
        SupportConfig::new(e.iter().copied().collect(), n, carrier).unwrap()
    }

    #[test]
    fn missing_moved_example() {
        let c = cfg(&[0], 2, 8);
        let (s, t) = (FinPerm::cyc(&[1, 2]), FinPerm::cyc(&[3, 4, 5]));
        let v = classify(&s, &t, &c);
        let ProbeVerdict::MissingMoved {
            a,
            partners,
            family,
        } = &v
        else {
            panic!("{v:?}");
        };
        assert_eq!(*a, Atom(1));
        assert_eq!(partners, &vec![Atom(6), Atom(7)]);
        assert_eq!(
            family,
            &vec![s.clone(), FinPerm::cyc(&[2, 6]), FinPerm::cyc(&[2, 7])]
        );
        assert!(verify(&s, &t, &c, &v));
    }

    #[test]
    fn extra_outside_example() {
        let c = cfg(&[0], 2, 6);
        let (s, t) = (FinPerm::cyc(&[1, 2]), FinPerm::cyc(&[1, 2, 3]));
        let v = classify(&s, &t, &c);
        assert_eq!(
            v,
            ProbeVerdict::ExtraOutside {
                a: Atom(3),
                b: Atom(4),
                tau: FinPerm::cyc(&[3, 4]),
                conjugate: FinPerm::cyc(&[1, 2, 4]),
            }
        );
        assert!(verify(&s, &t, &c, &v));
    }

    #[test]
    fn forced_fixed_point_example() {
        let c = cfg(&[0], 2, 6);
        let (s, t) = (FinPerm::cyc(&[1, 2]), FinPerm::cyc(&[0, 1, 2]));
        let v = classify(&s, &t, &c);
        assert_eq!(
            v,
            ProbeVerdict::ForcedFixedPoint {
                e: Atom(0),
                d: Atom(1),
                witness: FinPerm::cyc(&[0, 2, 1]),
            }
        );
        assert!(verify(&s, &t, &c, &v));
    }

    #[test]
    fn preconditions() {
        assert!(SupportConfig::new(AtomSet::from([0]), 1, 6).is_err());
        assert!(SupportConfig::new(AtomSet::from([0]), 2, 4).is_err());
        assert!(SupportConfig::new(AtomSet::from([9]), 2, 6).is_err());
        let c = cfg(&[0], 2, 6);
        let cases = [
            (FinPerm::cyc(&[1, 2, 3]), FinPerm::cyc(&[1, 2, 3])),
            (FinPerm::cyc(&[1, 2]), FinPerm::cyc(&[1, 2])),
            (FinPerm::cyc(&[0, 2]), FinPerm::cyc(&[1, 2, 3])),
            (FinPerm::cyc(&[1, 2]), FinPerm::cyc(&[1, 2, 7])),
        ];
        for (s, t) in cases {
            let v = classify(&s, &t, &c);
            assert!(!v.is_refutation(), "{s} -> {t}");
            assert!(!verify(&s, &t, &c, &v));
        }
        assert_eq!(
            scan(&cfg(&[0], 2, 9), Strategy::Sequential),
            Err(ProbeError::CarrierTooLarge(9))
        );
    }

    #[test]
    fn scan_carrier_six() {
        let r = scan(&cfg(&[0], 2, 6), Strategy::Sequential).unwrap();
        assert_eq!(r.pairs, 400);
        assert_eq!(r.escapes, 0);
        assert_eq!(r.verified, 400);
        assert_eq!(
            r.missing_moved + r.extra_outside + r.forced_fixed_point,
            400
        );
        assert!(r.forced_fixed_point > 0);
    }

    #[test]
    fn empty_support_never_forces_a_fixed_point() {
        let r = scan(&cfg(&[], 2, 6), Strategy::Sequential).unwrap();
        assert_eq!(r.pairs, 15 * 40);
        assert_eq!(r.forced_fixed_point, 0);
        assert_eq!(r.verified, r.pairs);
    }

    #[test]
    fn strategies_agree() {
        let c = cfg(&[0, 1], 2, 7);
        assert_eq!(
            scan(&c, Strategy::Sequential).unwrap(),
            scan(&c, Strategy::Parallel).unwrap()
        );
    }

    #[test]
    fn report_field_order() {
        let r = scan(&cfg(&[0], 2, 6), Strategy::Sequential).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(
            json.starts_with(r#"{"carrier":6,"E":"{0}","n":2,"pairs":400,"#),
            "{json}"
        );
    }

    proptest::proptest! {
        #[test]
        fn every_valid_pair_is_refuted(
            e in proptest::collection::btree_set(0u32..8, 0..3),
            s_idx in proptest::num::usize::ANY,
            t_idx in proptest::num::usize::ANY,
        ) {
            let c = SupportConfig::new(e.into_iter().collect(), 2, 8).unwrap();
            let atoms = c.atoms();
            let sources = permutations_moving(&atoms.difference(&c.e), 2);
            let targets = permutations_moving(&atoms, 3);
            let (s, t) = (&sources[s_idx % sources.len()], &targets[t_idx % targets.len()]);
            let v = classify(s, t, &c);
            proptest::prop_assert!(v.is_refutation());
            proptest::prop_assert!(verify(s, t, &c, &v), "{:?}", v);
        }
    }
}
