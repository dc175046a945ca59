//! Suggesting new skills that make an unrealizable specification realizable.
//!
//! The search works on controllable states. For a randomly chosen goal, an
//! input state is *good* when the system can force a visit to that goal from
//! it. Existing skill transitions are grounded in every uncontrollable
//! context the relaxed specification can reach; these grounded transitions
//! are the anchors that the two procedures rewire.

mod adjacency;
mod reduce;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::props::{ControllableState, InputState, PropSet};
use crate::semantics::{eval, Assignment};
use crate::spec::{GR1Spec, Skill, SpecError};
use crate::synthesis::{
    build_game_with, goal_fixpoint, is_realizable, winning_set, BuildMode, GameConfig,
    SynthesisError, DEFAULT_STATE_CAP,
};

pub use adjacency::{AdjacencyError, AdjacencyModel};
pub use reduce::reduce_skills;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Procedure {
    ModifyPreconditions,
    ModifyPostconditions,
}

impl Procedure {
    pub fn other(self) -> Self {
        match self {
            Procedure::ModifyPreconditions => Procedure::ModifyPostconditions,
            Procedure::ModifyPostconditions => Procedure::ModifyPreconditions,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Procedure::ModifyPreconditions => "modify-preconditions",
            Procedure::ModifyPostconditions => "modify-postconditions",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RepairConfig {
    pub rng_seed: u64,
    pub max_iterations: usize,
    pub start: Procedure,
    pub state_cap: usize,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            rng_seed: 0,
            max_iterations: 500,
            start: Procedure::ModifyPreconditions,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkillSuggestion {
    pub skill: Skill,
    pub procedure: Procedure,
    pub iteration: usize,
}

impl SkillSuggestion {
    pub fn name(&self) -> &str {
        &self.skill.name
    }

    pub fn chain(&self) -> &[ControllableState] {
        &self.skill.chain
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepairError {
    #[error("specification is already realizable")]
    AlreadyRealizable,
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepairOutcome {
    /// Empty when no repair was found within the iteration budget.
    pub suggestions: Vec<SkillSuggestion>,
    pub iterations: usize,
    /// Chains rejected by the adjacency screen.
    pub constraints: Vec<Vec<ControllableState>>,
    /// Candidates that were synthesized against.
    pub candidates: usize,
}

/// Per-goal sets of input states from which the system can force the goal,
/// plus the inputs of the full winning region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodSets {
    pub per_goal: Vec<BTreeSet<InputState>>,
    pub winning: BTreeSet<InputState>,
}

impl GoodSets {
    pub fn compute(spec: &GR1Spec, state_cap: usize) -> Result<Self, SynthesisError> {
        let game = build_game_with(
            spec,
            GameConfig {
                mode: BuildMode::Full,
                state_cap,
            },
        )?;
        let init = spec.sys_init_all();
        let startable: Vec<bool> = game
            .states
            .iter()
            .map(|s| eval(&init, &Assignment::state(s.input, s.output)))
            .collect();
        let project = |set: &fixedbitset::FixedBitSet| -> BTreeSet<InputState> {
            set.ones()
                .filter(|&i| startable[i])
                .map(|i| game.states[i].input)
                .collect()
        };
        let full = game.full_set();
        let per_goal = game
            .sys_liveness_sets
            .iter()
            .map(|goal| project(&goal_fixpoint(&game, &full, goal).0))
            .collect();
        let winning = project(&winning_set(&game));
        Ok(GoodSets { per_goal, winning })
    }

    pub fn is_good(&self, goal: usize, x: InputState) -> bool {
        self.per_goal[goal].contains(&x)
    }

    /// Some set strictly grew (the sets only ever grow as skills are added).
    pub fn grew_from(&self, before: &GoodSets) -> bool {
        self.winning.len() > before.winning.len()
            || self
                .per_goal
                .iter()
                .zip(&before.per_goal)
                .any(|(a, b)| a.len() > b.len())
    }
}

/// A skill step grounded in full controllable states and an uncontrollable
/// context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub skill: usize,
    pub step: usize,
    pub from: ControllableState,
    pub to: ControllableState,
    pub context: InputState,
}

/// Uncontrollable parts of the input states reachable under `spec`.
pub fn reachable_contexts(spec: &GR1Spec, state_cap: usize) -> Result<Vec<InputState>, SynthesisError> {
    let game = build_game_with(
        spec,
        GameConfig {
            mode: BuildMode::Reachable,
            state_cap,
        },
    )?;
    let u = spec.props.input_mask().minus(spec.props.controllable_mask());
    let set: BTreeSet<InputState> = game.states.iter().map(|s| s.input.intersect(u)).collect();
    Ok(set.into_iter().collect())
}

pub fn anchors(spec: &GR1Spec, contexts: &[InputState]) -> Vec<Anchor> {
    let mut out = Vec::new();
    let controllable = spec.props.controllable_mask();
    for (si, skill) in spec.skills.iter().enumerate() {
        let scope = skill.scope(&spec.props).mask;
        let rest = spec.props.enumerate_states(controllable.minus(scope));
        for step in 0..skill.chain.len() - 1 {
            for &r in &rest {
                for &context in contexts {
                    out.push(Anchor {
                        skill: si,
                        step,
                        from: skill.chain[step].union(r),
                        to: skill.chain[step + 1].union(r),
                        context,
                    });
                }
            }
        }
    }
    out
}

/// Everything the two procedures read.
pub struct RepairContext<'a> {
    pub spec: &'a GR1Spec,
    pub good: &'a GoodSets,
    pub anchors: &'a [Anchor],
    pub adjacency: &'a AdjacencyModel,
}

impl RepairContext<'_> {
    fn good(&self, goal: usize, c: ControllableState, context: InputState) -> bool {
        self.good.is_good(goal, c.union(context))
    }

    /// Replacement states for an anchor: vary only what the anchor changes,
    /// staying within two adjacency hops of either end.
    fn variations(&self, a: &Anchor) -> Vec<ControllableState> {
        let props = &self.spec.props;
        let changed = a.from.union(a.to).minus(a.from.intersect(a.to));
        let mut mask = PropSet::EMPTY;
        for i in changed.iter() {
            match props.group_of(i) {
                Some(g) => {
                    for &m in &props.mutex_groups()[g] {
                        mask = mask.with(m);
                    }
                }
                None => mask = mask.with(i),
            }
        }
        let base = a.from.minus(mask);
        props
            .enumerate_states(mask)
            .into_iter()
            .map(|q| base.union(q))
            .filter(|&p| {
                self.adjacency.hops(props, a.from, p) <= 2 || self.adjacency.hops(props, a.to, p) <= 2
            })
            .collect()
    }

    fn finish(&self, a: &Anchor, goal: usize, states: Vec<ControllableState>) -> Option<Vec<ControllableState>> {
        let skill = &self.spec.skills[a.skill];
        let scope = skill.scope(&self.spec.props).mask;
        let mut chain: Vec<ControllableState> = Vec::new();
        for s in states {
            let s = s.intersect(scope);
            if chain.last() != Some(&s) {
                chain.push(s);
            }
        }
        let unique: BTreeSet<_> = chain.iter().collect();
        if chain.len() < 2 || unique.len() != chain.len() {
            return None;
        }
        let outside = a.from.minus(scope);
        let start = chain[0].union(outside);
        let end = chain[chain.len() - 1].union(outside);
        (!self.good(goal, start, a.context) && self.good(goal, end, a.context)).then_some(chain)
    }
}

fn pick<'a, T>(rng: &mut impl Rng, items: &'a [T]) -> Option<&'a T> {
    if items.is_empty() {
        None
    } else {
        Some(&items[rng.gen_range(0..items.len())])
    }
}

/// Keeps a transition whose postcondition is good and gives it a new,
/// not-yet-good precondition. When the old precondition was an intermediate
/// state the new chain runs from the old start through the new state, so the
/// pre-precondition no longer leads into the old precondition.
pub fn modify_preconditions(
    ctx: &RepairContext,
    goal: usize,
    rng: &mut impl Rng,
) -> Option<Vec<ControllableState>> {
    let eligible: Vec<&Anchor> = ctx
        .anchors
        .iter()
        .filter(|a| ctx.good(goal, a.to, a.context))
        .collect();
    let a = **pick(rng, &eligible)?;
    let options: Vec<ControllableState> = ctx
        .variations(&a)
        .into_iter()
        .filter(|&p| p != a.to && !ctx.good(goal, p, a.context))
        .collect();
    let p = *pick(rng, &options)?;
    let skill = &ctx.spec.skills[a.skill];
    let states = if a.step == 0 {
        vec![p, a.to]
    } else if p == a.from {
        vec![a.from, a.to]
    } else {
        let outside = a.from.minus(skill.scope(&ctx.spec.props).mask);
        skill.chain[..a.step]
            .iter()
            .map(|s| s.union(outside))
            .chain([p, a.to])
            .collect()
    };
    ctx.finish(&a, goal, states)
}

/// Takes a transition stuck outside the good set at both ends and sends its
/// precondition to a good state instead.
pub fn modify_postconditions(
    ctx: &RepairContext,
    goal: usize,
    rng: &mut impl Rng,
) -> Option<Vec<ControllableState>> {
    let eligible: Vec<&Anchor> = ctx
        .anchors
        .iter()
        .filter(|a| !ctx.good(goal, a.from, a.context) && !ctx.good(goal, a.to, a.context))
        .collect();
    let a = **pick(rng, &eligible)?;
    let options: Vec<ControllableState> = ctx
        .variations(&a)
        .into_iter()
        .filter(|&p| p != a.from && ctx.good(goal, p, a.context))
        .collect();
    let p = *pick(rng, &options)?;
    ctx.finish(&a, goal, vec![a.from, p])
}

pub fn add_skills(spec: &GR1Spec, skills: &[SkillSuggestion]) -> Result<GR1Spec, SpecError> {
    let mut out = spec.clone();
    for s in skills {
        out.add_skill(s.skill.clone())?;
    }
    Ok(out)
}

fn fresh_name(spec: &GR1Spec, counter: &mut usize) -> String {
    loop {
        *counter += 1;
        let name = format!("repair_{counter}");
        if spec.props.lookup(&name).is_none() {
            return name;
        }
    }
}

pub fn repair(
    spec: &GR1Spec,
    cfg: &RepairConfig,
    adjacency: &AdjacencyModel,
) -> Result<RepairOutcome, RepairError> {
    if is_realizable(spec, cfg.state_cap)? {
        return Err(RepairError::AlreadyRealizable);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let contexts = reachable_contexts(spec, cfg.state_cap)?;
    let goals = spec.sys_liveness.len().max(1);
    let mut outcome = RepairOutcome::default();
    let mut working = spec.clone();
    let mut good = GoodSets::compute(&working, cfg.state_cap)?;
    let mut accepted: Vec<SkillSuggestion> = Vec::new();
    let mut tried: BTreeSet<Vec<ControllableState>> = BTreeSet::new();
    let mut procedure = cfg.start;
    let mut counter = 0;

    for iteration in 1..=cfg.max_iterations {
        outcome.iterations = iteration;
        let goal = rng.gen_range(0..goals);
        let anchor_list = anchors(&working, &contexts);
        let ctx = RepairContext {
            spec: &working,
            good: &good,
            anchors: &anchor_list,
            adjacency,
        };
        let candidate = match procedure {
            Procedure::ModifyPreconditions => modify_preconditions(&ctx, goal, &mut rng),
            Procedure::ModifyPostconditions => modify_postconditions(&ctx, goal, &mut rng),
        };
        let used = procedure;
        procedure = procedure.other();
        let Some(chain) = candidate else { continue };
        if working.skills.iter().any(|s| s.chain == chain) || !tried.insert(chain.clone()) {
            continue;
        }
        if !adjacency.chain_ok(&working.props, &chain) {
            outcome.constraints.push(chain);
            continue;
        }
        let skill = Skill::new(&fresh_name(&working, &mut counter), chain);
        let mut next = working.clone();
        if next.add_skill(skill.clone()).is_err() {
            continue;
        }
        outcome.candidates += 1;
        let suggestion = SkillSuggestion {
            skill,
            procedure: used,
            iteration,
        };
        if is_realizable(&next, cfg.state_cap)? {
            accepted.push(suggestion);
            outcome.suggestions = reduce_skills(spec, &accepted, cfg.state_cap)?;
            return Ok(outcome);
        }
        let next_good = GoodSets::compute(&next, cfg.state_cap)?;
        if next_good.grew_from(&good) {
            working = next;
            good = next_good;
            accepted.push(suggestion);
        }
    }
    Ok(outcome)
}
