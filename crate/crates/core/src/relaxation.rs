//! Weakening violated assumptions so the observed transition is admitted.

use thiserror::Error;

use crate::formula::Formula;
use crate::monitor::ViolationReport;
use crate::props::{ControllableState, PropRef, PropSet, PropositionTable};
use crate::semantics::Triplet;
use crate::spec::{generate_skill_clauses, leftmost_disjunct, replace_leftmost_disjunct, Branch, GR1Spec, Origin};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxationRecord {
    /// Index in monitor order (hard clauses, then skill clauses).
    pub clause_index: usize,
    pub origin: Origin,
    pub added_disjunct: Formula,
    pub triplet: Triplet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelaxError {
    #[error("violated clause index {0} is out of range")]
    ClauseIndex(usize),
    #[error("goal index {0} is out of range")]
    GoalIndex(usize),
    #[error("clause {0} is a system clause")]
    NotEnvClause(usize),
    #[error("no skill named `{0}`")]
    UnknownSkill(String),
    #[error("skill `{0}` has no chain state {1} with a successor")]
    ChainIndex(String, usize),
    #[error("observed state is not a valid controllable state for `{0}`")]
    BadObservation(String),
}

fn literals(set: PropSet, mask: PropSet, next: bool) -> Vec<Formula> {
    mask.iter()
        .map(|i| {
            let p = PropRef::Input(i);
            if next {
                Formula::next_literal(p, set.contains(i))
            } else {
                Formula::literal(p, set.contains(i))
            }
        })
        .collect()
}

/// Full literal description of a triplet. Hard clauses see every input;
/// skill clauses only the controllable ones. Outputs are always included.
pub fn relaxation_disjunct(props: &PropositionTable, t: &Triplet, origin: Origin) -> Formula {
    let mask = match origin {
        Origin::Skill => props.controllable_mask(),
        _ => props.input_mask(),
    };
    let outputs = (0..props.outputs().len())
        .map(|y| Formula::literal(PropRef::Output(y), t.y_out.contains(y)));
    let mut parts = literals(t.x_in, mask, false);
    parts.extend(outputs);
    parts.extend(literals(t.x_in_next, mask, true));
    Formula::conj(parts)
}

/// Conjunction fixing every input to its value in `x`.
pub fn exact_input_state(props: &PropositionTable, x: PropSet) -> Formula {
    Formula::conj(literals(x, props.input_mask(), false))
}

pub fn relax(
    spec: &GR1Spec,
    report: &ViolationReport,
) -> Result<(GR1Spec, Vec<RelaxationRecord>), RelaxError> {
    let mut out = spec.clone();
    let mut records = Vec::new();
    for &index in &report.violated {
        let clause = out.env_safety_mut(index).ok_or(RelaxError::ClauseIndex(index))?;
        if clause.origin == Origin::System {
            return Err(RelaxError::NotEnvClause(index));
        }
        let d = relaxation_disjunct(&spec.props, &report.triplet, clause.origin);
        if clause.body.disjuncts().contains(&&d) {
            continue;
        }
        clause.body = Formula::or(clause.body.clone(), d.clone());
        records.push(RelaxationRecord {
            clause_index: index,
            origin: clause.origin,
            added_disjunct: d,
            triplet: report.triplet,
        });
    }

    out.env_init = exact_input_state(&spec.props, report.triplet.x_in_next);
    // Pinning sys_init to the current output would forbid restarting a
    // skill mid-chain, so the system may choose any consistent output.
    out.sys_init = Formula::True;

    let j = report.active_goal_index;
    if !out.sys_liveness.is_empty() {
        if j >= out.sys_liveness.len() {
            return Err(RelaxError::GoalIndex(j));
        }
        out.sys_liveness.rotate_left(j);
    } else if j != 0 {
        return Err(RelaxError::GoalIndex(j));
    }
    Ok((out, records))
}

/// Records that executing `skill` from chain state `from` may also land in
/// `observed_post`, widening that progress clause. No-op when the observation
/// is the declared successor (or the state itself).
pub fn relax_skill_clause_nondeterminism(
    spec: &GR1Spec,
    skill: &str,
    from: usize,
    observed_post: ControllableState,
) -> Result<GR1Spec, RelaxError> {
    let sk = spec
        .skill(skill)
        .ok_or_else(|| RelaxError::UnknownSkill(skill.to_string()))?;
    if from + 1 >= sk.chain.len() {
        return Err(RelaxError::ChainIndex(skill.to_string(), from));
    }
    let mask = sk.scope(&spec.props).mask;
    let observed = observed_post.intersect(mask);
    if observed == sk.chain[from + 1]
        || observed == sk.chain[from]
        || sk.branches.iter().any(|b| b.from == from && b.to == observed)
    {
        return Ok(spec.clone());
    }
    if !observed_post.is_subset(spec.props.controllable_mask())
        || !spec.props.respects_mutex_partial(observed)
    {
        return Err(RelaxError::BadObservation(skill.to_string()));
    }
    let old = generate_skill_clauses(sk, &spec.props)
        .map_err(|_| RelaxError::BadObservation(skill.to_string()))?;
    let mut widened = sk.clone();
    widened.branches.push(Branch { from, to: observed });
    let new = generate_skill_clauses(&widened, &spec.props)
        .map_err(|_| RelaxError::BadObservation(skill.to_string()))?;

    let mut out = spec.clone();
    let target = out
        .env_safety_skill
        .iter_mut()
        .find(|c| c.source_skill.as_deref() == Some(skill) && *leftmost_disjunct(&c.body) == old[from].body)
        .ok_or_else(|| RelaxError::ChainIndex(skill.to_string(), from))?;
    target.body = replace_leftmost_disjunct(&target.body, new[from].body.clone());
    let slot = out
        .skills
        .iter_mut()
        .find(|s| s.name == skill)
        .expect("skill exists");
    *slot = widened;
    Ok(out)
}
