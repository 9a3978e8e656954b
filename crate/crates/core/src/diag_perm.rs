//! Diagonalization against oracles `f` from permutations into permutations
//! moving at most `n` points that claim every fiber has at most `k` points.
//!
//! The engine grows a list `g(0), g(1), ...` of pairwise distinct
//! permutations. At step `m` it reads `s_i = f(g(i))` for `i < m` and builds
//! `floor(log2 m) + 1` nontrivial permutations `t_l` with pairwise disjoint
//! supports, each moving at most `2n` points. Products over subsets of the
//! `t_l` give more than `m` distinct candidates, and the first one (in
//! subset order) not yet listed becomes `g(m)`. Every oracle answer goes
//! through an [`OracleLedger`], so a lying oracle ends the run with a
//! violation certificate instead.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::carrier::{Atom, AtomSet, SetSpec};
use crate::diag::{
    compute_bounds, pairwise_distinct, BoundParams, Certificate, CertificateKind, OracleLedger,
    Violation, ViolationRecord,
};
use crate::error::EngineError;
use crate::exec::{self, Strategy};
use crate::injection::permutations_moving;
use crate::perm::{compose, deflate, FinPerm};

/// Strict mode refuses to seed more permutations than this.
pub const STRICT_SEED_LIMIT: u128 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Seeds `m0 + 1` permutations, so the family construction can never
    /// get stuck against an honest oracle.
    Strict,
    /// Seeds the given number of permutations and falls back to a fresh
    /// transposition whenever the family construction gets stuck.
    Opportunistic { seeds: usize },
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Opportunistic { .. } => "opportunistic",
        }
    }
}

/// First engine-reserved atom for an engine instance.
pub fn engine_base(instance: u32) -> Atom {
    Atom(1000 * (instance + 1))
}

/// `count` transpositions `(c_0; c_{j+1})` over atoms `c_i = base + i`.
pub fn seed(count: usize, base: Atom) -> Vec<FinPerm> {
    (0..count as u32)
        .map(|j| FinPerm::transposition(base, Atom(base.0 + j + 1)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "lowercase")]
pub enum CaseTag {
    /// `s_i` moves some `x` outside `C` to a point outside `C`.
    Case1 { i: usize, x: Atom },
    /// `s_i(x) != s_j(x)` for some `x` in `C`, both outside `C`.
    Case2 { i: usize, j: usize, x: Atom },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyMember {
    pub t: FinPerm,
    #[serde(flatten)]
    pub case: CaseTag,
    /// Union of the supports of the earlier members.
    pub c: AtomSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stuck {
    pub l: usize,
    pub c: AtomSet,
    #[serde(skip)]
    pub partial: Vec<FamilyMember>,
}

/// `floor(log2 m) + 1`.
pub fn family_len(m: usize) -> usize {
    assert!(m >= 1);
    (usize::BITS - m.leading_zeros()) as usize
}

/// Builds `t_0, ..., t_{floor(log2 m)}` from `b = [s_0, ..., s_{m-1}]`.
pub fn build_family(b: &[FinPerm], m: usize, n: usize) -> Result<Vec<FamilyMember>, Stuck> {
    let mut family: Vec<FamilyMember> = Vec::new();
    let mut c = AtomSet::new();
    for l in 0..family_len(m) {
        let outside = SetSpec::CofiniteComplement(c.clone());
        let member = case_one(b, &c)
            .map(|(i, x)| FamilyMember {
                t: deflate(&b[i], &outside),
                case: CaseTag::Case1 { i, x },
                c: c.clone(),
            })
            .or_else(|| {
                case_two(b, &c).map(|(i, j, x)| FamilyMember {
                    t: deflate(&compose(&b[j], &b[i].inverse()), &outside),
                    case: CaseTag::Case2 { i, j, x },
                    c: c.clone(),
                })
            });
        let Some(member) = member else {
            return Err(Stuck {
                l,
                c,
                partial: family,
            });
        };
        debug_assert!(!member.t.is_identity());
        debug_assert!(member.t.mov_len() <= 2 * n);
        c.extend(member.t.moved_points());
        family.push(member);
    }
    Ok(family)
}

fn case_one(b: &[FinPerm], c: &AtomSet) -> Option<(usize, Atom)> {
    b.iter().enumerate().find_map(|(i, s)| {
        s.moved_points()
            .find(|&x| !c.contains(x) && !c.contains(s.apply(x)))
            .map(|x| (i, x))
    })
}

fn case_two(b: &[FinPerm], c: &AtomSet) -> Option<(usize, usize, Atom)> {
    // For each s_i, the points of C it sends outside C.
    let exits: Vec<Vec<(Atom, Atom)>> = b
        .iter()
        .map(|s| {
            c.iter()
                .map(|x| (x, s.apply(x)))
                .filter(|(_, y)| !c.contains(*y))
                .collect()
        })
        .collect();
    for (i, exits_i) in exits.iter().enumerate() {
        for (j, s_j) in b.iter().enumerate().skip(i + 1) {
            let found = exits_i.iter().find(|(x, y)| {
                let yj = s_j.apply(*x);
                !c.contains(yj) && yj != *y
            });
            if let Some(&(x, _)) = found {
                return Some((i, j, x));
            }
        }
    }
    None
}

/// The product of the members selected by `a`. Supports are disjoint, so
/// this is their union.
pub fn assemble_f(family: &[FinPerm], a: &[usize]) -> FinPerm {
    let mut map = BTreeMap::new();
    for &i in a {
        map.extend(family[i].pairs());
    }
    FinPerm::from_map(map).expect("disjoint supports")
}

/// The `rank`-th subset of `0..len` in lexicographic order of
/// characteristic strings, index 0 most significant.
fn index_set(rank: u128, len: usize) -> Vec<usize> {
    (0..len)
        .filter(|&i| rank >> (len - 1 - i) & 1 == 1)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexedValue {
    pub i: usize,
    pub value: FinPerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermStepTrace {
    pub m: usize,
    /// Distinct oracle values, each with the first index producing it.
    pub b: Vec<IndexedValue>,
    pub family: Vec<FamilyMember>,
    pub stuck: Option<Stuck>,
    pub chosen: Option<Vec<usize>>,
    pub candidates_checked: usize,
    pub fallback: bool,
    pub result: Option<FinPerm>,
}

impl PermStepTrace {
    /// Checks the recorded family: nontrivial members moving at most `2n`
    /// points, pairwise disjoint supports, `|C| <= 2nl` at stage `l`, and
    /// the full length unless the step got stuck.
    pub fn check_family(&self, n: usize) -> Result<(), String> {
        let mut union = AtomSet::new();
        for (l, member) in self.family.iter().enumerate() {
            if member.t.is_identity() {
                return Err(format!("t_{l} is trivial"));
            }
            if member.t.mov_len() > 2 * n {
                return Err(format!("t_{l} moves {} > 2n points", member.t.mov_len()));
            }
            if member.c != union {
                return Err(format!(
                    "C at stage {l} is not the union of earlier supports"
                ));
            }
            if member.c.len() > 2 * n * l {
                return Err(format!("|C| = {} > 2nl at stage {l}", member.c.len()));
            }
            if !member.t.mov().is_disjoint(&union) {
                return Err(format!("t_{l} overlaps earlier supports"));
            }
            union.extend(member.t.moved_points());
        }
        if self.stuck.is_none() && self.family.len() != family_len(self.m) {
            return Err(format!(
                "family has {} members, expected {}",
                self.family.len(),
                family_len(self.m)
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum StepOutcome {
    Emitted(PermStepTrace),
    Violation(Violation<FinPerm, FinPerm>),
    /// The family construction got stuck where the counting argument rules
    /// it out.
    Stuck(PermStepTrace),
}

pub struct PermEngine<F> {
    n: usize,
    k: usize,
    mode: Mode,
    params: BoundParams,
    oracle: F,
    g: Vec<FinPerm>,
    listed: HashSet<FinPerm>,
    ledger: OracleLedger<FinPerm, FinPerm>,
    touched: AtomSet,
    next_reserved: u32,
    seeds: usize,
}

impl<F> PermEngine<F>
where
    F: Fn(&FinPerm) -> FinPerm,
{
    pub fn new(
        n: usize,
        k: usize,
        mode: Mode,
        oracle: F,
        instance: u32,
    ) -> Result<Self, EngineError> {
        let params = compute_bounds(n, k)?;
        let count = match mode {
            Mode::Strict => {
                let want = params.m0 + 1;
                if want > STRICT_SEED_LIMIT {
                    return Err(EngineError::Infeasible {
                        what: "m0 + 1 strict seeds",
                        value: want,
                        limit: STRICT_SEED_LIMIT,
                    });
                }
                want as usize
            }
            Mode::Opportunistic { seeds } => seeds.max(1),
        };
        let base = engine_base(instance);
        let g = seed(count, base);
        let touched: AtomSet = g
            .iter()
            .flat_map(|s| s.mov().iter().collect::<Vec<_>>())
            .collect();
        Ok(PermEngine {
            n,
            k,
            mode,
            params,
            oracle,
            listed: g.iter().cloned().collect(),
            g,
            ledger: OracleLedger::new(k),
            touched,
            next_reserved: base.0 + count as u32 + 1,
            seeds: count,
        })
    }

    pub fn params(&self) -> &BoundParams {
        &self.params
    }

    pub fn g(&self) -> &[FinPerm] {
        &self.g
    }

    pub fn seeds(&self) -> usize {
        self.seeds
    }

    pub fn ledger(&self) -> &OracleLedger<FinPerm, FinPerm> {
        &self.ledger
    }

    fn fresh_reserved(&mut self) -> Atom {
        while self.touched.contains(Atom(self.next_reserved)) {
            self.next_reserved += 1;
        }
        let a = Atom(self.next_reserved);
        self.next_reserved += 1;
        self.touched.insert(a);
        a
    }

    fn push(&mut self, s: FinPerm) {
        let fresh = self.listed.insert(s.clone());
        assert!(fresh, "emitted permutation is already listed");
        self.touched.extend(s.moved_points());
        self.g.push(s);
    }

    pub fn step(&mut self) -> Result<StepOutcome, EngineError> {
        let m = self.g.len();
        let mut b = Vec::with_capacity(m);
        let mut distinct = Vec::new();
        let mut seen = HashSet::new();
        for i in 0..m {
            let (out, violation) = self.ledger.query(&self.g[i], &self.oracle)?;
            if out.mov_len() > self.n {
                return Err(EngineError::OutOfCodomain {
                    value: out.to_string(),
                    reason: format!("moves more than {} points", self.n),
                });
            }
            if let Some(v) = violation {
                return Ok(StepOutcome::Violation(v));
            }
            self.touched.extend(out.moved_points());
            if seen.insert(out.clone()) {
                distinct.push(IndexedValue {
                    i,
                    value: out.clone(),
                });
            }
            b.push(out);
        }
        let mut trace = PermStepTrace {
            m,
            b: distinct,
            family: Vec::new(),
            stuck: None,
            chosen: None,
            candidates_checked: 0,
            fallback: false,
            result: None,
        };
        match build_family(&b, m, self.n) {
            Ok(family) => {
                let ts: Vec<FinPerm> = family.iter().map(|f| f.t.clone()).collect();
                trace.family = family;
                let len = ts.len();
                // 2^len > m candidates, at most m of them already listed
                for rank in 0..(1u128 << len) {
                    trace.candidates_checked += 1;
                    let a = index_set(rank, len);
                    let candidate = assemble_f(&ts, &a);
                    if !self.listed.contains(&candidate) {
                        trace.chosen = Some(a);
                        trace.result = Some(candidate.clone());
                        self.push(candidate);
                        return Ok(StepOutcome::Emitted(trace));
                    }
                }
                unreachable!("more than m distinct candidates");
            }
            Err(stuck) => {
                trace.family = stuck.partial.clone();
                trace.stuck = Some(stuck);
                match self.mode {
                    Mode::Strict => Ok(StepOutcome::Stuck(trace)),
                    Mode::Opportunistic { .. } => {
                        let (x, y) = (self.fresh_reserved(), self.fresh_reserved());
                        let t = FinPerm::transposition(x, y);
                        trace.fallback = true;
                        trace.result = Some(t.clone());
                        self.push(t);
                        Ok(StepOutcome::Emitted(trace))
                    }
                }
            }
        }
    }

    pub fn run(mut self, steps: usize) -> Result<Certificate<PermStepTrace>, EngineError> {
        if steps == 0 {
            return Err(EngineError::NoSteps);
        }
        let mut traces = Vec::new();
        let mut kind = CertificateKind::PermDiag;
        let mut violation = None;
        let mut note = None;
        for _ in 0..steps {
            match self.step()? {
                StepOutcome::Emitted(t) => traces.push(t),
                StepOutcome::Violation(v) => {
                    kind = CertificateKind::LedgerViolation;
                    violation = Some(ViolationRecord::from(&v));
                    break;
                }
                StepOutcome::Stuck(t) => {
                    kind = CertificateKind::Stuck;
                    note = Some(format!(
                        "family construction stuck at m = {} > m0 = {} with a clean ledger: internal inconsistency",
                        t.m, self.params.m0
                    ));
                    traces.push(t);
                    break;
                }
            }
        }
        Ok(Certificate {
            kind,
            n: Some(self.n),
            k: self.k,
            l0: Some(self.params.l0),
            m0: Some(self.params.m0),
            steps,
            outputs: self.g[self.seeds..]
                .iter()
                .map(ToString::to_string)
                .collect(),
            all_distinct: pairwise_distinct(&self.g),
            violation,
            traces,
            engine: "perm",
            mode: Some(self.mode.name()),
            seeds: self.seeds,
            window: Some(self.params.window),
            note,
        })
    }
}

pub fn run<F>(
    n: usize,
    k: usize,
    oracle: F,
    steps: usize,
    mode: Mode,
) -> Result<Certificate<PermStepTrace>, EngineError>
where
    F: Fn(&FinPerm) -> FinPerm,
{
    if steps == 0 {
        return Err(EngineError::NoSteps);
    }
    PermEngine::new(n, k, mode, oracle, 0)?.run(steps)
}

/// `h(s) = (s ▷ C, {x ∈ C | s(x) ∉ C})`.
pub fn case2_signature(s: &FinPerm, c: &AtomSet) -> (FinPerm, AtomSet) {
    let inside = deflate(s, &SetSpec::Finite(c.clone()));
    let exits = c.iter().filter(|&x| !c.contains(s.apply(x))).collect();
    (inside, exits)
}

/// Every point moved outside `C` is sent into `C`.
pub fn enters_c(s: &FinPerm, c: &AtomSet) -> bool {
    s.moved_points()
        .filter(|&x| !c.contains(x))
        .all(|x| c.contains(s.apply(x)))
}

/// Points of `C` sent outside `C` by both permutations are sent to the same
/// place.
pub fn exits_agree(s: &FinPerm, t: &FinPerm, c: &AtomSet) -> bool {
    c.iter().all(|x| {
        let (a, b) = (s.apply(x), t.apply(x));
        c.contains(a) || c.contains(b) || a == b
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub subsets: usize,
    pub pairs_checked: usize,
    pub counterexamples: usize,
}

/// Exhaustively checks that `case2_signature` is injective on pairs of
/// permutations moving at most `n` points of `universe` that satisfy
/// [`enters_c`] and [`exits_agree`], for every `C` of at most `max_c` atoms.
pub fn check_case2_lemma(
    universe: &AtomSet,
    n: usize,
    max_c: usize,
    strategy: Strategy,
) -> LemmaReport {
    use itertools::Itertools;
    let perms: Vec<FinPerm> = (0..=n)
        .flat_map(|j| permutations_moving(universe, j))
        .collect();
    let atoms: Vec<Atom> = universe.iter().collect();
    let subsets: Vec<AtomSet> = (0..=max_c.min(atoms.len()))
        .flat_map(|size| atoms.iter().copied().combinations(size))
        .map(|c| c.into_iter().collect())
        .collect();
    exec::map_reduce(
        &subsets,
        LemmaReport::default(),
        |c| {
            let ok: Vec<&FinPerm> = perms.iter().filter(|s| enters_c(s, c)).collect();
            let sigs: Vec<(FinPerm, AtomSet)> = ok.iter().map(|s| case2_signature(s, c)).collect();
            let mut report = LemmaReport {
                subsets: 1,
                ..Default::default()
            };
            for (x, s) in ok.iter().enumerate() {
                for (y, t) in ok.iter().enumerate().skip(x + 1) {
                    if !exits_agree(s, t, c) {
                        continue;
                    }
                    report.pairs_checked += 1;
                    if sigs[x] == sigs[y] {
                        report.counterexamples += 1;
                    }
                }
            }
            report
        },
        |a, b| LemmaReport {
            subsets: a.subsets + b.subsets,
            pairs_checked: a.pairs_checked + b.pairs_checked,
            counterexamples: a.counterexamples + b.counterexamples,
        },
        strategy,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        let s = seed(3, Atom(1000));
        assert_eq!(
            s,
            vec![
                FinPerm::cyc(&[1000, 1001]),
                FinPerm::cyc(&[1000, 1002]),
                FinPerm::cyc(&[1000, 1003])
            ]
        );
        assert_eq!(seed(1, Atom(1000)).len(), 1);
        assert!(pairwise_distinct(&seed(500, Atom(1000))));
    }

    #[test]
    fn family_lengths() {
        assert_eq!(family_len(1), 1);
        assert_eq!(family_len(2), 2);
        assert_eq!(family_len(3), 2);
        assert_eq!(family_len(4), 3);
        assert_eq!(family_len(257), 9);
        for m in 1..2000usize {
            assert!(1usize << family_len(m) > m);
        }
    }

    #[test]
    fn family_single_transposition_gets_stuck() {
        let b = vec![FinPerm::cyc(&[1, 2])];
        let err = build_family(&b, 2, 2).unwrap_err();
        assert_eq!(err.l, 1);
        assert_eq!(err.c, AtomSet::from([1, 2]));
        assert_eq!(err.partial.len(), 1);
        assert_eq!(err.partial[0].t, FinPerm::cyc(&[1, 2]));
        assert_eq!(err.partial[0].case, CaseTag::Case1 { i: 0, x: Atom(1) });
    }

    #[test]
    fn family_case_two() {
        // Stage 0 takes (1;5), so stage 1 sees C = {1,5}.
        let b = vec![
            FinPerm::cyc(&[1, 5]),
            FinPerm::cyc(&[1, 3]),
            FinPerm::cyc(&[1, 4]),
        ];
        let fam = build_family(&b, 3, 2).unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam[1].c, AtomSet::from([1, 5]));
        assert_eq!(
            fam[1].case,
            CaseTag::Case2 {
                i: 1,
                j: 2,
                x: Atom(1)
            }
        );
        // (1;4) ∘ (1;3)⁻¹ restricted off {1,5} is (3;4)
        assert_eq!(fam[1].t, FinPerm::cyc(&[3, 4]));
    }

    #[test]
    fn family_identity_values_stuck_immediately() {
        let b = vec![FinPerm::identity(); 5];
        let err = build_family(&b, 5, 3).unwrap_err();
        assert_eq!(err.l, 0);
        assert!(err.c.is_empty());
    }

    #[test]
    fn assemble_examples() {
        let fam = vec![FinPerm::cyc(&[1, 2]), FinPerm::cyc(&[3, 4])];
        assert_eq!(assemble_f(&fam, &[0, 1]).to_cycles(), "(1;2)(3;4)");
        assert!(assemble_f(&fam, &[]).is_identity());
        assert_eq!(assemble_f(&fam, &[1]), FinPerm::cyc(&[3, 4]));
    }

    #[test]
    fn assemble_is_injective() {
        for len in 0..=10u32 {
            let fam: Vec<FinPerm> = (0..len)
                .map(|i| FinPerm::cyc(&[2 * i, 2 * i + 1]))
                .collect();
            let all: Vec<FinPerm> = (0..1u128 << len)
                .map(|r| assemble_f(&fam, &index_set(r, len as usize)))
                .collect();
            assert!(pairwise_distinct(&all));
        }
    }

    #[test]
    fn index_sets_in_lex_order() {
        let sets: Vec<Vec<usize>> = (0..8).map(|r| index_set(r, 3)).collect();
        assert_eq!(
            sets,
            vec![
                vec![],
                vec![2],
                vec![1],
                vec![1, 2],
                vec![0],
                vec![0, 2],
                vec![0, 1],
                vec![0, 1, 2]
            ]
        );
    }

    fn truncate(n: usize) -> impl Fn(&FinPerm) -> FinPerm {
        move |s: &FinPerm| {
            let keep: AtomSet = s.moved_points().take(n).collect();
            deflate(s, &SetSpec::Finite(keep))
        }
    }

    #[test]
    fn strict_n1_violates_immediately() {
        let cert = run(1, 1, truncate(1), 1, Mode::Strict).unwrap();
        assert_eq!(cert.kind, CertificateKind::LedgerViolation);
        assert_eq!(cert.seeds, 257);
        let v = cert.violation.unwrap();
        assert_eq!(v.output, "()");
        assert_eq!(v.witnesses.len(), 2);
    }

    #[test]
    fn distinct_oracle_steps_cleanly() {
        // Injective oracle into transpositions on atoms 0, 1, ...
        let names = std::cell::RefCell::new(std::collections::HashMap::new());
        let oracle = |s: &FinPerm| {
            let mut names = names.borrow_mut();
            let next = names.len() as u32;
            let i = *names.entry(s.clone()).or_insert(next);
            FinPerm::cyc(&[2 * i, 2 * i + 1])
        };
        let mut e = PermEngine::new(2, 1, Mode::Opportunistic { seeds: 8 }, oracle, 0).unwrap();
        for _ in 0..20 {
            match e.step().unwrap() {
                StepOutcome::Emitted(t) => t.check_family(2).unwrap(),
                other => panic!("unexpected {other:?}"),
            }
        }
        assert!(pairwise_distinct(e.g()));
    }

    #[test]
    fn out_of_codomain_is_an_error() {
        let cert = run(
            1,
            1,
            |s: &FinPerm| s.clone(),
            1,
            Mode::Opportunistic { seeds: 4 },
        );
        assert!(matches!(cert, Err(EngineError::OutOfCodomain { .. })));
        assert!(matches!(
            run(1, 1, truncate(1), 0, Mode::Strict),
            Err(EngineError::NoSteps)
        ));
    }

    #[test]
    fn strict_refuses_astronomical_seeding() {
        assert!(matches!(
            PermEngine::new(2, 1, Mode::Strict, truncate(2), 0),
            Err(EngineError::Infeasible { .. })
        ));
    }

    #[test]
    fn signature_examples() {
        let c = AtomSet::from([0, 1]);
        let s = FinPerm::cyc(&[0, 2, 1]);
        assert!(enters_c(&s, &c));
        let (inside, exits) = case2_signature(&s, &c);
        assert_eq!(inside, FinPerm::cyc(&[0, 1]));
        assert_eq!(exits, AtomSet::from([0]));
        assert!(!enters_c(&FinPerm::cyc(&[2, 3]), &c));
        assert!(!exits_agree(
            &FinPerm::cyc(&[0, 2]),
            &FinPerm::cyc(&[0, 3]),
            &c
        ));
    }

    #[test]
    fn lemma_small_universe() {
        let u: AtomSet = (0..5).collect();
        let r = check_case2_lemma(&u, 2, 3, Strategy::Sequential);
        assert_eq!(r.counterexamples, 0);
        assert!(r.pairs_checked > 0);
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(24))]

        #[test]
        fn engine_traces_keep_family_invariants(
            n in 2usize..4,
            k in 1usize..3,
            pool in 1usize..12,
            seeds in 1usize..40,
            use_pool in proptest::bool::ANY,
        ) {
            let oracle: Box<dyn Fn(&FinPerm) -> FinPerm> = if use_pool {
                Box::new(crate::oracles::perm_pool(pool))
            } else {
                Box::new(truncate(n))
            };
            let cert = run(n, k, oracle, 30, Mode::Opportunistic { seeds }).unwrap();
            proptest::prop_assert!(cert.all_distinct);
            for t in &cert.traces {
                proptest::prop_assert!(t.check_family(n).is_ok(), "{:?}", t.check_family(n));
            }
            if let Some(v) = &cert.violation {
                proptest::prop_assert_eq!(v.witnesses.len(), k + 1);
            }
        }
    }
}
