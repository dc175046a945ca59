//! Runtime monitor over the environment safety assumptions.

use std::collections::{BTreeMap, BTreeSet};

use crate::props::PropRef;
use crate::semantics::{violates, Triplet};
use crate::spec::{GR1Spec, SafetyClause};

/// Environment safety clauses in spec order (hard, then skill) with an index
/// from each atom to the clauses that read it.
#[derive(Clone, Debug)]
pub struct Monitor {
    clauses: Vec<SafetyClause>,
    dependencies: BTreeMap<PropRef, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationReport {
    pub violated: BTreeSet<usize>,
    pub triplet: Triplet,
    pub active_goal_index: usize,
}

pub fn compile_monitor(spec: &GR1Spec) -> Monitor {
    let clauses: Vec<SafetyClause> = spec.env_safety().cloned().collect();
    let mut dependencies: BTreeMap<PropRef, Vec<usize>> = BTreeMap::new();
    for (i, c) in clauses.iter().enumerate() {
        for (p, _) in c.body.atoms() {
            let entry = dependencies.entry(p).or_default();
            if entry.last() != Some(&i) {
                entry.push(i);
            }
        }
    }
    Monitor {
        clauses,
        dependencies,
    }
}

impl Monitor {
    pub fn clauses(&self) -> &[SafetyClause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Clauses that read `prop` at either step.
    pub fn dependents(&self, prop: PropRef) -> &[usize] {
        self.dependencies.get(&prop).map_or(&[], Vec::as_slice)
    }

    /// Every atom mentioned by some clause.
    pub fn indexed_atoms(&self) -> impl Iterator<Item = PropRef> + '_ {
        self.dependencies.keys().copied()
    }

    pub fn check_assumptions(&self, t: &Triplet, active_goal: usize) -> ViolationReport {
        let violated = self
            .clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| violates(c, t))
            .map(|(i, _)| i)
            .collect();
        ViolationReport {
            violated,
            triplet: *t,
            active_goal_index: active_goal,
        }
    }
}
