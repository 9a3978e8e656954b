//! Shared machinery for the diagonalization engines: the `l0`/`m0` bounds,
//! the fiber-auditing ledger, run certificates, and the adapter that turns
//! an oracle into permutations moving at most `n` points into an oracle into
//! finite sets.

use std::collections::HashMap;
use std::fmt::Display;
use std::hash::Hash;

use num_bigint::BigUint;
use serde::Serialize;

use crate::carrier::AtomSet;
use crate::error::EngineError;
use crate::partition::derangement;
use crate::perm::FinPerm;

/// Width of the window over which `k(2nl)^{2n} < 2^l` is verified.
pub const BOUND_WINDOW: u64 = 100;
const BOUND_SEARCH_LIMIT: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundParams {
    pub n: usize,
    pub k: usize,
    pub l0: u64,
    pub m0: u128,
    pub window: u64,
}

fn pow_term(n: usize, k: usize, l: u64) -> BigUint {
    // (2nl)^{2n}, with 0^0 = 1
    let base = BigUint::from(2 * n as u64) * BigUint::from(l);
    BigUint::from(k) * base.pow(2 * n as u32)
}

/// Whether `k(2nl)^{2n} < 2^l`.
pub fn bound_holds(n: usize, k: usize, l: u64) -> bool {
    pow_term(n, k, l) < (BigUint::from(1u8) << l as usize)
}

/// `2^{l+1}/(l+1)^{2n} >= 2^l/l^{2n}`, i.e. `2 l^{2n} >= (l+1)^{2n}`.
fn ratio_nondecreasing(n: usize, l: u64) -> bool {
    let e = 2 * n as u32;
    BigUint::from(2u8) * BigUint::from(l).pow(e) >= BigUint::from(l + 1).pow(e)
}

/// Least `l0` such that `k(2nl)^{2n} < 2^l` on the whole window
/// `(l0, l0 + 100]` with `2^l / l^{2n}` nondecreasing there, and
/// `m0 = k(2n l0)^{2n}`.
pub fn compute_bounds(n: usize, k: usize) -> Result<BoundParams, EngineError> {
    if k == 0 {
        return Err(EngineError::InvalidArgument("k must be at least 1"));
    }
    let w = BOUND_WINDOW;
    let mut l0 = 0u64;
    while l0 <= BOUND_SEARCH_LIMIT {
        // Any failure at l rules out every candidate below l.
        let hold_fail = (l0 + 1..=l0 + w).rev().find(|&l| !bound_holds(n, k, l));
        let mono_fail = (l0 + 1..l0 + w).rev().find(|&l| !ratio_nondecreasing(n, l));
        match hold_fail.max(mono_fail) {
            Some(l) => l0 = l,
            None => {
                let m0 =
                    u128::try_from(pow_term(n, k, l0)).map_err(|_| EngineError::Overflow("m0"))?;
                return Ok(BoundParams {
                    n,
                    k,
                    l0,
                    m0,
                    window: w,
                });
            }
        }
    }
    Err(EngineError::Overflow("l0 search"))
}

/// Exact fiber bound of `s -> mov(s)` on permutations moving at most `n`
/// points: `max_{j <= n} D_j`.
pub fn mov_fiber_bound(n: usize) -> Result<u64, EngineError> {
    let mut best = 0;
    for j in 0..=n {
        best = best.max(derangement(j)?);
    }
    Ok(best)
}

/// Wraps an oracle into permutations moving at most `n` points as an oracle
/// into finite sets, `x -> mov(f(x))`, returning it with its fiber bound.
pub fn mov_adapter<I, F>(
    f: F,
    k: usize,
    n: usize,
) -> Result<(impl Fn(&I) -> AtomSet, usize), EngineError>
where
    F: Fn(&I) -> FinPerm,
{
    let factor = mov_fiber_bound(n)?;
    let bound = (k as u64)
        .checked_mul(factor)
        .and_then(|b| usize::try_from(b).ok())
        .ok_or(EngineError::Overflow("adapted fiber bound"))?;
    Ok((move |x: &I| f(x).mov(), bound))
}

/// `k + 1` distinct inputs sharing one output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation<I, O> {
    pub output: O,
    pub witnesses: Vec<I>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationRecord {
    pub output: String,
    pub witnesses: Vec<String>,
}

impl<I: Display, O: Display> From<&Violation<I, O>> for ViolationRecord {
    fn from(v: &Violation<I, O>) -> Self {
        ViolationRecord {
            output: v.output.to_string(),
            witnesses: v.witnesses.iter().map(ToString::to_string).collect(),
        }
    }
}

/// Records oracle answers and audits the claimed fiber bound `k` on every
/// queried point.
#[derive(Clone, Debug)]
pub struct OracleLedger<I, O> {
    k: usize,
    queries: HashMap<I, O>,
    fibers: HashMap<O, Vec<I>>,
}

impl<I, O> OracleLedger<I, O>
where
    I: Clone + Eq + Hash + Display,
    O: Clone + Eq + Hash + Display,
{
    pub fn new(k: usize) -> Self {
        OracleLedger {
            k,
            queries: HashMap::new(),
            fibers: HashMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn answer(&self, input: &I) -> Option<&O> {
        self.queries.get(input)
    }

    pub fn fiber(&self, output: &O) -> &[I] {
        self.fibers.get(output).map_or(&[], Vec::as_slice)
    }

    /// Number of distinct outputs seen.
    pub fn image_size(&self) -> usize {
        self.fibers.len()
    }

    pub fn max_fiber(&self) -> usize {
        self.fibers.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Records `input -> output`. Returns the violation when this record makes
    /// a fiber exceed `k`. Repeating a recorded pair is a no-op.
    pub fn record(&mut self, input: I, output: O) -> Result<Option<Violation<I, O>>, EngineError> {
        if let Some(prev) = self.queries.get(&input) {
            if *prev == output {
                return Ok(None);
            }
            return Err(EngineError::InconsistentOracle {
                input: input.to_string(),
                first: prev.to_string(),
                second: output.to_string(),
            });
        }
        self.queries.insert(input.clone(), output.clone());
        let fiber = self.fibers.entry(output.clone()).or_default();
        fiber.push(input);
        if fiber.len() == self.k + 1 {
            return Ok(Some(Violation {
                output,
                witnesses: fiber.clone(),
            }));
        }
        Ok(None)
    }

    /// Answers from the ledger when possible, otherwise asks the oracle and
    /// records the answer.
    pub fn query<F>(
        &mut self,
        input: &I,
        oracle: F,
    ) -> Result<(O, Option<Violation<I, O>>), EngineError>
    where
        F: FnOnce(&I) -> O,
    {
        if let Some(o) = self.queries.get(input) {
            return Ok((o.clone(), None));
        }
        let out = oracle(input);
        let v = self.record(input.clone(), out.clone())?;
        Ok((out, v))
    }
}

pub fn ledger_record<I, O>(
    ledger: &mut OracleLedger<I, O>,
    input: I,
    output: O,
) -> Result<Option<Violation<I, O>>, EngineError>
where
    I: Clone + Eq + Hash + Display,
    O: Clone + Eq + Hash + Display,
{
    ledger.record(input, output)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    PermDiag,
    PartDiag,
    LedgerViolation,
    Stuck,
    FraenkelScan,
}

/// Auditable record of an engine run. Field order is the JSON field order.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate<T: Serialize> {
    pub kind: CertificateKind,
    pub n: Option<usize>,
    pub k: usize,
    pub l0: Option<u64>,
    pub m0: Option<u128>,
    pub steps: usize,
    pub outputs: Vec<String>,
    pub all_distinct: bool,
    pub violation: Option<ViolationRecord>,
    pub traces: Vec<T>,
    pub engine: &'static str,
    pub mode: Option<&'static str>,
    pub seeds: usize,
    pub window: Option<u64>,
    pub note: Option<String>,
}

impl<T: Serialize> Certificate<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Whether all items are pairwise distinct.
pub fn pairwise_distinct<T: Eq + Hash>(items: &[T]) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(items.len());
    items.iter().all(|x| seen.insert(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::Atom;
    use crate::injection::permutations_moving;

    /// Independent brute force over u128 for small parameters.
    fn brute_l0(n: u32, k: u128) -> u64 {
        let lhs = |l: u128| k * (2 * n as u128 * l).pow(2 * n);
        let holds = |l: u128| lhs(l) < (1u128 << l);
        (0u64..)
            .find(|&big_l| (big_l + 1..=big_l + 100).all(|l| l >= 127 || holds(l as u128)))
            .unwrap()
    }

    #[test]
    fn bounds_examples() {
        let b = compute_bounds(1, 1).unwrap();
        assert_eq!((b.l0, b.m0), (8, 256));
        let b = compute_bounds(1, 2).unwrap();
        assert_eq!((b.l0, b.m0), (9, 648));
        let b = compute_bounds(0, 1).unwrap();
        assert_eq!(b.m0, 1);
        let b = compute_bounds(2, 1).unwrap();
        assert_eq!((b.l0, b.m0), (27, 136_048_896));
        assert!(compute_bounds(1, 0).is_err());
    }

    #[test]
    fn bounds_match_brute_force() {
        for n in 1..=2 {
            for k in 1..=5 {
                let b = compute_bounds(n, k).unwrap();
                assert_eq!(b.l0, brute_l0(n as u32, k as u128), "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn bounds_window_and_minimality() {
        for (n, k) in [(0, 1), (0, 7), (1, 1), (1, 3), (2, 2), (3, 1), (4, 5)] {
            let b = compute_bounds(n, k).unwrap();
            assert!((b.l0 + 1..=b.l0 + BOUND_WINDOW).all(|l| bound_holds(n, k, l)));
            assert!(b.l0 == 0 || !bound_holds(n, k, b.l0), "n = {n}, k = {k}");
        }
    }

    #[test]
    fn ledger_examples() {
        let s1 = FinPerm::cyc(&[1, 2]);
        let s2 = FinPerm::cyc(&[1, 3]);
        let id = FinPerm::identity();

        let mut l = OracleLedger::new(1);
        assert_eq!(l.record(s1.clone(), id.clone()).unwrap(), None);
        let v = l.record(s2.clone(), id.clone()).unwrap().unwrap();
        assert_eq!(v.output, id);
        assert_eq!(v.witnesses, vec![s1.clone(), s2.clone()]);

        let mut l = OracleLedger::new(2);
        assert_eq!(l.record(s1.clone(), id.clone()).unwrap(), None);
        assert_eq!(l.record(s2.clone(), id.clone()).unwrap(), None);

        let mut l = OracleLedger::new(1);
        assert_eq!(l.record(s1.clone(), id.clone()).unwrap(), None);
        assert_eq!(l.record(s1.clone(), id.clone()).unwrap(), None);
        assert_eq!(l.fiber(&id).len(), 1);

        assert!(matches!(
            l.record(s1.clone(), s2.clone()),
            Err(EngineError::InconsistentOracle { .. })
        ));
    }

    #[test]
    fn adapter_factors() {
        assert_eq!(mov_fiber_bound(2).unwrap(), 1);
        assert_eq!(mov_fiber_bound(4).unwrap(), 9);
        assert_eq!(mov_fiber_bound(0).unwrap(), 1);
        let (f, bound) = mov_adapter(|s: &FinPerm| s.inverse(), 3, 4).unwrap();
        assert_eq!(bound, 27);
        assert_eq!(f(&FinPerm::cyc(&[4, 5, 6])), AtomSet::from([4, 5, 6]));
    }

    #[test]
    fn mov_fibers_are_derangement_counts() {
        let universe: AtomSet = (0..6).collect();
        for n in 0..=4 {
            let mut fibers: HashMap<AtomSet, u64> = HashMap::new();
            for j in 0..=n {
                for s in permutations_moving(&universe, j) {
                    *fibers.entry(s.mov()).or_default() += 1;
                }
            }
            for (f, count) in &fibers {
                assert_eq!(*count, derangement(f.len()).unwrap());
            }
            assert_eq!(
                fibers.values().copied().max().unwrap(),
                mov_fiber_bound(n).unwrap().max(1)
            );
        }
        let _ = Atom(0);
    }

    proptest::proptest! {
        #[test]
        fn ledger_fibers_stay_bounded(k in 1usize..4, outs in proptest::collection::vec(0u32..5, 1..40)) {
            let mut l: OracleLedger<u32, u32> = OracleLedger::new(k);
            for (i, o) in outs.iter().enumerate() {
                match l.record(i as u32, *o).unwrap() {
                    Some(v) => {
                        proptest::prop_assert_eq!(v.witnesses.len(), k + 1);
                        break;
                    }
                    None => proptest::prop_assert!(l.max_fiber() <= k),
                }
            }
        }
    }
}
