//! Diagonalization against oracles `f` from partitions with finite blocks
//! into finite sets that claim every fiber has at most `k` points.
//!
//! After seeding `72k² + 1` partitions, step `m` collects the distinct
//! values `C` of `f` on `g(0), ..., g(m-1)` in order of first occurrence,
//! builds the quotient frame of `∪C`, and walks set partitions of its
//! classes in ascending R order until a lift is not yet listed. A clean
//! ledger forces `m <= k|C| <= k 2^l`, and the Bell number of `l` outgrows
//! that, so the walk always succeeds.

use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::carrier::{Atom, AtomSet};
use crate::diag::{
    pairwise_distinct, Certificate, CertificateKind, OracleLedger, Violation, ViolationRecord,
};
use crate::diag_perm::engine_base;
use crate::error::EngineError;
use crate::partition::{
    bell, for_each_partition_r, ClassPartition, FinitaryPartition, QuotientFrame, BELL_MAX,
};

/// `72k² + 1` partitions; the `j`-th has the single block `{c_0, c_{j+1}}`
/// over atoms `c_i = base + i`.
pub fn seed_partitions(k: usize, base: Atom) -> Vec<FinitaryPartition> {
    (0..72 * k * k + 1)
        .map(|j| {
            let block = AtomSet::from_iter([base, Atom(base.0 + j as u32 + 1)]);
            FinitaryPartition::from_blocks([block]).expect("one block")
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartStepTrace {
    pub m: usize,
    /// Values that joined `C` at this step, in order.
    pub c_new: Vec<AtomSet>,
    pub c_len: usize,
    pub l: usize,
    /// `None` when `l` is beyond the exact Bell range.
    pub bell_l: Option<u64>,
    pub classes_in_c_injective: bool,
    pub q: Option<String>,
    pub rank_checked: usize,
    pub result: Option<FinitaryPartition>,
}

impl PartStepTrace {
    /// Checks the counting chain recorded by a step on a clean ledger with
    /// `72k² + 1` seeds.
    pub fn check_counting(&self, k: usize) -> Result<(), String> {
        if self.m > k * self.c_len {
            return Err(format!("m = {} > k|C| = {}", self.m, k * self.c_len));
        }
        if !self.classes_in_c_injective {
            return Err("classes-in-c map is not injective".into());
        }
        if self.l < 128 && (self.c_len as u128) > 1u128 << self.l {
            return Err(format!("|C| = {} > 2^{}", self.c_len, self.l));
        }
        if let Some(b) = self.bell_l {
            if self.l >= 1 && 72 * (b as u128) <= 1u128 << (2 * self.l) {
                return Err(format!("72 B_{} <= 4^{}", self.l, self.l));
            }
        }
        if self.m > 72 * k * k && self.l < 128 && 72 * (k as u128) >= 1u128 << self.l {
            return Err(format!("72k >= 2^{}", self.l));
        }
        if self.result.is_none() {
            return Err("no fresh partition".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum StepOutcome {
    Emitted(PartStepTrace),
    Violation(Violation<FinitaryPartition, AtomSet>),
    /// Every lift was already listed, which a clean ledger rules out.
    Stuck(PartStepTrace),
}

pub struct PartEngine<F> {
    k: usize,
    oracle: F,
    g: Vec<FinitaryPartition>,
    listed: HashSet<FinitaryPartition>,
    ledger: OracleLedger<FinitaryPartition, AtomSet>,
    c: Vec<AtomSet>,
    seeds: usize,
}

impl<F> PartEngine<F>
where
    F: Fn(&FinitaryPartition) -> AtomSet,
{
    pub fn new(k: usize, oracle: F, instance: u32) -> Result<Self, EngineError> {
        if k == 0 {
            return Err(EngineError::InvalidArgument("k must be at least 1"));
        }
        let g = seed_partitions(k, engine_base(instance));
        Ok(PartEngine {
            k,
            oracle,
            listed: g.iter().cloned().collect(),
            seeds: g.len(),
            g,
            ledger: OracleLedger::new(k),
            c: Vec::new(),
        })
    }

    pub fn g(&self) -> &[FinitaryPartition] {
        &self.g
    }

    pub fn seeds(&self) -> usize {
        self.seeds
    }

    pub fn ledger(&self) -> &OracleLedger<FinitaryPartition, AtomSet> {
        &self.ledger
    }

    pub fn step(&mut self) -> Result<StepOutcome, EngineError> {
        let m = self.g.len();
        let before = self.c.len();
        for i in 0..m {
            let (value, violation) = self.ledger.query(&self.g[i], &self.oracle)?;
            if let Some(v) = violation {
                return Ok(StepOutcome::Violation(v));
            }
            // Queries are cached, so C only ever grows at its end.
            if !self.c.contains(&value) {
                self.c.push(value);
            }
        }
        let frame = QuotientFrame::build(&self.c);
        let l = frame.l();
        let in_c: HashSet<_> = (0..self.c.len()).map(|c| frame.classes_in(c)).collect();
        let mut trace = PartStepTrace {
            m,
            c_new: self.c[before..].to_vec(),
            c_len: self.c.len(),
            l,
            bell_l: (l <= BELL_MAX).then(|| bell(l)).transpose()?,
            classes_in_c_injective: in_c.len() == self.c.len(),
            q: None,
            rank_checked: 0,
            result: None,
        };
        let mut found: Option<(ClassPartition, FinitaryPartition)> = None;
        let _ = for_each_partition_r(l, |q| {
            trace.rank_checked += 1;
            let lifted = frame.lift(q);
            if self.listed.contains(&lifted) {
                ControlFlow::Continue(())
            } else {
                found = Some((q.clone(), lifted));
                ControlFlow::Break(())
            }
        });
        match found {
            Some((q, lifted)) => {
                trace.q = Some(q.to_string());
                trace.result = Some(lifted.clone());
                let fresh = self.listed.insert(lifted.clone());
                assert!(fresh, "emitted partition is already listed");
                self.g.push(lifted);
                Ok(StepOutcome::Emitted(trace))
            }
            None => Ok(StepOutcome::Stuck(trace)),
        }
    }

    pub fn run(mut self, steps: usize) -> Result<Certificate<PartStepTrace>, EngineError> {
        if steps == 0 {
            return Err(EngineError::NoSteps);
        }
        let mut traces = Vec::new();
        let mut kind = CertificateKind::PartDiag;
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
                        "no fresh lift at m = {} with a clean ledger: internal inconsistency",
                        t.m
                    ));
                    traces.push(t);
                    break;
                }
            }
        }
        Ok(Certificate {
            kind,
            n: None,
            k: self.k,
            l0: None,
            m0: None,
            steps,
            outputs: self.g[self.seeds..]
                .iter()
                .map(ToString::to_string)
                .collect(),
            all_distinct: pairwise_distinct(&self.g),
            violation,
            traces,
            engine: "part",
            mode: None,
            seeds: self.seeds,
            window: None,
            note,
        })
    }
}

pub fn run<F>(k: usize, oracle: F, steps: usize) -> Result<Certificate<PartStepTrace>, EngineError>
where
    F: Fn(&FinitaryPartition) -> AtomSet,
{
    if steps == 0 {
        return Err(EngineError::NoSteps);
    }
    PartEngine::new(k, oracle, 0)?.run(steps)
}
