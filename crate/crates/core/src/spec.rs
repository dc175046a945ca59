//! GR(1) specification data model and skill-clause generation.
//!
//! A specification is the implication `env -> sys` where both sides carry an
//! initial condition, safety clauses (implicitly `always`) and liveness
//! clauses (implicitly `always eventually`). Skills are output propositions
//! with a chain of controllable states; each chain is expanded into
//! environment safety clauses by [`generate_skill_clauses`].

use thiserror::Error;

use crate::formula::Formula;
use crate::props::{ControllableState, PropRef, PropSet, PropositionTable, TableError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    /// Encodes a skill postcondition; may be rewritten by relaxation.
    Skill,
    /// Environment assumption that repair never touches.
    Hard,
    /// System guarantee.
    System,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyClause {
    pub body: Formula,
    pub origin: Origin,
    /// Owning skill for `Origin::Skill` clauses; `None` marks the idle frame.
    pub source_skill: Option<String>,
}

impl SafetyClause {
    pub fn hard(body: Formula) -> Self {
        SafetyClause {
            body,
            origin: Origin::Hard,
            source_skill: None,
        }
    }

    pub fn system(body: Formula) -> Self {
        SafetyClause {
            body,
            origin: Origin::System,
            source_skill: None,
        }
    }

    pub fn skill(body: Formula, skill: Option<&str>) -> Self {
        SafetyClause {
            body,
            origin: Origin::Skill,
            source_skill: skill.map(str::to_string),
        }
    }

    pub fn is_idle_frame(&self) -> bool {
        self.origin == Origin::Skill && self.source_skill.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LivenessClause {
    pub body: Formula,
}

/// An extra observed outcome of a chain step: executing from chain state
/// `from` may also land in `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub from: usize,
    pub to: ControllableState,
}

/// A skill: an output proposition plus the ordered controllable states
/// (waypoints) it passes through.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skill {
    pub name: String,
    pub chain: Vec<ControllableState>,
    pub branches: Vec<Branch>,
}

/// Controllable inputs a skill constrains: every mutex group its chain
/// touches plus the free inputs it mentions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scope {
    pub groups: Vec<usize>,
    pub free: PropSet,
    pub mask: PropSet,
}

impl Skill {
    pub fn new(name: &str, chain: Vec<ControllableState>) -> Self {
        Skill {
            name: name.to_string(),
            chain,
            branches: Vec::new(),
        }
    }

    pub fn initial(&self) -> ControllableState {
        self.chain[0]
    }

    pub fn last(&self) -> ControllableState {
        *self.chain.last().expect("chain is non-empty")
    }

    pub fn scope(&self, props: &PropositionTable) -> Scope {
        let mentioned = self
            .chain
            .iter()
            .chain(self.branches.iter().map(|b| &b.to))
            .fold(PropSet::EMPTY, |acc, s| acc.union(*s));
        let mut groups: Vec<usize> = mentioned.iter().filter_map(|i| props.group_of(i)).collect();
        groups.sort_unstable();
        groups.dedup();
        let free = PropSet::from_indices(mentioned.iter().filter(|&i| props.group_of(i).is_none()));
        let mask = groups
            .iter()
            .flat_map(|&g| props.mutex_groups()[g].iter().copied())
            .fold(free, |acc, i| acc.with(i));
        Scope { groups, free, mask }
    }

    /// Position of `state` in the chain, comparing only scope inputs.
    pub fn chain_position(&self, props: &PropositionTable, state: ControllableState) -> Option<usize> {
        let mask = self.scope(props).mask;
        self.chain
            .iter()
            .position(|s| *s == state.intersect(mask))
    }

    pub fn validate(&self, props: &PropositionTable) -> Result<(), SpecError> {
        if self.chain.len() < 2 {
            return Err(SpecError::ChainTooShort(self.name.clone()));
        }
        let controllable = props.controllable_mask();
        let scope = self.scope(props);
        let check_state = |s: &ControllableState| -> Result<(), SpecError> {
            if !s.is_subset(controllable) {
                return Err(SpecError::NotControllable(self.name.clone()));
            }
            for &g in &scope.groups {
                let members = props.mutex_groups()[g].iter().filter(|&&i| s.contains(i)).count();
                if members != 1 {
                    return Err(SpecError::MutexViolation {
                        skill: self.name.clone(),
                        state: props.format_inputs(*s),
                    });
                }
            }
            Ok(())
        };
        for (k, s) in self.chain.iter().enumerate() {
            check_state(s)?;
            if self.chain[..k].contains(s) {
                return Err(SpecError::RepeatedChainState {
                    skill: self.name.clone(),
                    state: props.format_inputs(*s),
                });
            }
        }
        for b in &self.branches {
            check_state(&b.to)?;
            if b.from + 1 >= self.chain.len() {
                return Err(SpecError::BadBranch(self.name.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("skill `{0}` needs a chain of at least two states")]
    ChainTooShort(String),
    #[error("skill `{0}` mentions an input that is not controllable")]
    NotControllable(String),
    #[error("skill `{skill}`: state {state} violates a mutex group")]
    MutexViolation { skill: String, state: String },
    #[error("skill `{skill}`: chain state {state} repeats")]
    RepeatedChainState { skill: String, state: String },
    #[error("skill `{0}`: branch must start at a non-final chain state")]
    BadBranch(String),
    #[error("no skill named `{0}`")]
    UnknownSkill(String),
    #[error("`{0}` is not an output proposition")]
    NotAnOutput(String),
    #[error("skill `{0}` is already declared")]
    DuplicateSkill(String),
    #[error("output `{0}` has no skill declaration")]
    MissingSkill(String),
    #[error("environment clause `{0}` reads the next value of an output")]
    NextOutputInEnvClause(String),
    #[error("liveness clause `{0}` may not use next()")]
    NextInLiveness(String),
    #[error("initial condition `{0}` may not use next()")]
    NextInInit(String),
    #[error("skill clause `{0}` must name exactly one output and no uncontrollable input")]
    BadSkillClause(String),
    #[error("output `{0}` is still referenced after removal")]
    DanglingOutput(String),
}

/// Conjunction describing `state` over `mask`: positive literals for the
/// members present, negative literals for free inputs that are absent.
/// Absent mutex-group members need no literal.
pub fn encode_state(props: &PropositionTable, state: PropSet, mask: PropSet, next: bool) -> Formula {
    let lit = |i: usize, positive: bool| {
        if next {
            Formula::next_literal(PropRef::Input(i), positive)
        } else {
            Formula::literal(PropRef::Input(i), positive)
        }
    };
    Formula::conj(mask.iter().filter_map(|i| {
        if state.contains(i) {
            Some(lit(i, true))
        } else if props.group_of(i).is_none() {
            Some(lit(i, false))
        } else {
            None
        }
    }))
}

fn frame(inputs: PropSet) -> Formula {
    Formula::conj(inputs.iter().map(|i| {
        Formula::iff(
            Formula::Atom(PropRef::Input(i)),
            Formula::Next(PropRef::Input(i)),
        )
    }))
}

/// Stay-or-advance progress clauses, one per non-final chain state, plus a
/// frame clause holding every controllable input outside the skill's scope.
pub fn generate_skill_clauses(
    skill: &Skill,
    props: &PropositionTable,
) -> Result<Vec<SafetyClause>, SpecError> {
    skill.validate(props)?;
    let y = props
        .output_index(&skill.name)
        .ok_or_else(|| SpecError::NotAnOutput(skill.name.clone()))?;
    let active = Formula::Atom(PropRef::Output(y));
    let scope = skill.scope(props);
    let mut clauses = Vec::with_capacity(skill.chain.len());
    for k in 0..skill.chain.len() - 1 {
        let here = skill.chain[k];
        let mut targets = vec![here, skill.chain[k + 1]];
        targets.extend(skill.branches.iter().filter(|b| b.from == k).map(|b| b.to));
        let body = Formula::implies(
            Formula::and(encode_state(props, here, scope.mask, false), active.clone()),
            Formula::disj(
                targets
                    .into_iter()
                    .map(|t| encode_state(props, t, scope.mask, true)),
            ),
        );
        clauses.push(SafetyClause::skill(body, Some(&skill.name)));
    }
    let untouched = props.controllable_mask().minus(scope.mask);
    clauses.push(SafetyClause::skill(
        Formula::implies(active, frame(untouched)),
        Some(&skill.name),
    ));
    Ok(clauses)
}

/// While no skill is active every controllable input keeps its value.
pub fn idle_frame_formula(props: &PropositionTable) -> Formula {
    let none_active = Formula::conj(
        (0..props.outputs().len()).map(|y| Formula::not(Formula::Atom(PropRef::Output(y)))),
    );
    Formula::implies(none_active, frame(props.controllable_mask()))
}

pub fn generate_idle_clause(props: &PropositionTable) -> SafetyClause {
    SafetyClause::skill(idle_frame_formula(props), None)
}

/// Leftmost disjunct of an `Or` spine: the clause body before relaxation.
pub fn leftmost_disjunct(body: &Formula) -> &Formula {
    match body {
        Formula::Or(a, _) => leftmost_disjunct(a),
        other => other,
    }
}

/// Replaces the leftmost disjunct of an `Or` spine; relaxation only ever
/// appends disjuncts on the right, so the leftmost one is the original body.
pub fn replace_leftmost_disjunct(body: &Formula, new: Formula) -> Formula {
    match body {
        Formula::Or(a, b) => Formula::Or(Box::new(replace_leftmost_disjunct(a, new)), b.clone()),
        _ => new,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GR1Spec {
    pub props: PropositionTable,
    pub skills: Vec<Skill>,
    pub env_init: Formula,
    pub sys_init: Formula,
    pub env_safety_hard: Vec<SafetyClause>,
    pub env_safety_skill: Vec<SafetyClause>,
    pub sys_safety: Vec<SafetyClause>,
    pub env_liveness: Vec<LivenessClause>,
    pub sys_liveness: Vec<LivenessClause>,
}

impl GR1Spec {
    pub fn new(props: PropositionTable) -> Self {
        GR1Spec {
            props,
            skills: Vec::new(),
            env_init: Formula::True,
            sys_init: Formula::True,
            env_safety_hard: Vec::new(),
            env_safety_skill: Vec::new(),
            sys_safety: Vec::new(),
            env_liveness: Vec::new(),
            sys_liveness: Vec::new(),
        }
    }

    pub fn skill(&self, name: &str) -> Option<&Skill> {
        self.skills.iter().find(|s| s.name == name)
    }

    pub fn skill_of_output(&self, output: usize) -> Option<&Skill> {
        self.skill(&self.props.outputs()[output])
    }

    /// Environment safety clauses in monitor order: hard clauses first, then
    /// skill clauses.
    pub fn env_safety(&self) -> impl Iterator<Item = &SafetyClause> {
        self.env_safety_hard.iter().chain(self.env_safety_skill.iter())
    }

    pub fn env_safety_len(&self) -> usize {
        self.env_safety_hard.len() + self.env_safety_skill.len()
    }

    pub fn env_safety_mut(&mut self, index: usize) -> Option<&mut SafetyClause> {
        let hard = self.env_safety_hard.len();
        if index < hard {
            self.env_safety_hard.get_mut(index)
        } else {
            self.env_safety_skill.get_mut(index - hard)
        }
    }

    /// Skill activation rule: a skill starts only at its initial
    /// precondition and continues only through non-final chain states.
    pub fn precondition_clause(&self, skill: &Skill) -> SafetyClause {
        let y = PropRef::Output(self.props.output_index(&skill.name).expect("declared skill"));
        let mask = skill.scope(&self.props).mask;
        let start = encode_state(&self.props, skill.initial(), mask, true);
        let middle = &skill.chain[1..skill.chain.len() - 1];
        let rhs = if middle.is_empty() {
            start
        } else {
            Formula::or(
                start,
                Formula::and(
                    Formula::Atom(y),
                    Formula::disj(middle.iter().map(|s| encode_state(&self.props, *s, mask, true))),
                ),
            )
        };
        SafetyClause::system(Formula::implies(Formula::Next(y), rhs))
    }

    /// At most one skill is active at the next step.
    pub fn output_mutex_clause(&self) -> SafetyClause {
        let n = self.props.outputs().len();
        let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        SafetyClause::system(Formula::conj(pairs.map(|(a, b)| {
            Formula::not(Formula::and(
                Formula::Next(PropRef::Output(a)),
                Formula::Next(PropRef::Output(b)),
            ))
        })))
    }

    /// User system clauses followed by the generated output mutex and skill
    /// activation clauses.
    pub fn sys_safety_all(&self) -> Vec<SafetyClause> {
        let mut all = self.sys_safety.clone();
        if self.props.outputs().len() > 1 {
            all.push(self.output_mutex_clause());
        }
        all.extend(self.skills.iter().map(|s| self.precondition_clause(s)));
        all
    }

    /// `sys_init` conjoined with: at most one output, and each active skill
    /// sits at its initial precondition.
    pub fn sys_init_all(&self) -> Formula {
        let n = self.props.outputs().len();
        let mutex = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| {
            Formula::not(Formula::and(
                Formula::Atom(PropRef::Output(a)),
                Formula::Atom(PropRef::Output(b)),
            ))
        });
        let starts = self.skills.iter().map(|s| {
            let y = PropRef::Output(self.props.output_index(&s.name).expect("declared skill"));
            let mask = s.scope(&self.props).mask;
            Formula::implies(Formula::Atom(y), encode_state(&self.props, s.initial(), mask, false))
        });
        let generated: Vec<Formula> = mutex.chain(starts).collect();
        if generated.is_empty() {
            self.sys_init.clone()
        } else if self.sys_init == Formula::True {
            Formula::conj(generated)
        } else {
            Formula::and(self.sys_init.clone(), Formula::conj(generated))
        }
    }

    /// User environment liveness followed by skill fairness: for every
    /// non-final chain state, infinitely often the robot is not stuck there
    /// with the skill active. A stalled skill is the environment's fault.
    pub fn env_liveness_all(&self) -> Vec<LivenessClause> {
        let mut all = self.env_liveness.clone();
        for s in &self.skills {
            let y = PropRef::Output(self.props.output_index(&s.name).expect("declared skill"));
            let mask = s.scope(&self.props).mask;
            for state in &s.chain[..s.chain.len() - 1] {
                all.push(LivenessClause {
                    body: Formula::not(Formula::and(
                        encode_state(&self.props, *state, mask, false),
                        Formula::Atom(y),
                    )),
                });
            }
        }
        all
    }

    /// Adds a skill: declares its output, generates its clauses and widens
    /// the idle frame.
    pub fn add_skill(&mut self, skill: Skill) -> Result<(), SpecError> {
        if self.skill(&skill.name).is_some() || self.props.lookup(&skill.name).is_some() {
            return Err(SpecError::DuplicateSkill(skill.name.clone()));
        }
        let before = self.props.outputs().len();
        self.props.add_output(&skill.name)?;
        let clauses = match generate_skill_clauses(&skill, &self.props) {
            Ok(c) => c,
            Err(e) => {
                self.props.truncate_outputs(before);
                return Err(e);
            }
        };
        self.env_safety_skill.extend(clauses);
        self.skills.push(skill);
        self.refresh_idle_frame();
        Ok(())
    }

    /// Removes skills by name, renumbering the remaining outputs. Fails if a
    /// removed output is still mentioned by a clause that is not owned by the
    /// removed skills (e.g. a relaxation disjunct).
    pub fn remove_skills(&mut self, names: &[&str]) -> Result<(), SpecError> {
        for name in names {
            if self.skill(name).is_none() {
                return Err(SpecError::UnknownSkill(name.to_string()));
            }
        }
        let removed: Vec<usize> = names
            .iter()
            .map(|n| self.props.output_index(n).expect("skill output"))
            .collect();
        let mut next = self.clone();
        next.skills.retain(|s| !names.contains(&s.name.as_str()));
        next.env_safety_skill.retain(|c| {
            c.source_skill
                .as_deref()
                .is_none_or(|s| !names.contains(&s))
        });
        let keep: Vec<usize> = (0..self.props.outputs().len())
            .filter(|i| !removed.contains(i))
            .collect();
        let mut table = PropositionTable::new();
        for p in self.props.inputs() {
            table.add_input(&p.name, p.controllable)?;
        }
        for g in self.props.mutex_groups() {
            let names: Vec<&str> = g.iter().map(|&i| self.props.inputs()[i].name.as_str()).collect();
            table.add_mutex_group(&names)?;
        }
        for &i in &keep {
            table.add_output(&self.props.outputs()[i])?;
        }
        let removed_set = PropSet::from_indices(removed.iter().copied());
        let mut dangling = false;
        let remap = |p: PropRef| match p {
            PropRef::Output(i) => PropRef::Output(keep.iter().position(|&k| k == i).unwrap_or(i)),
            other => other,
        };
        next.props = table;
        // The idle frame is regenerated below, so only its relaxation
        // disjuncts need to be free of the removed outputs.
        for c in next.env_safety_skill.iter_mut().filter(|c| c.is_idle_frame()) {
            c.body = replace_leftmost_disjunct(&c.body, Formula::True);
        }
        let mut fix = |f: &mut Formula| {
            dangling |= !f.outputs_mentioned().intersect(removed_set).is_empty();
            *f = f.map_props(&remap);
        };
        fix(&mut next.env_init);
        fix(&mut next.sys_init);
        for c in next
            .env_safety_hard
            .iter_mut()
            .chain(next.env_safety_skill.iter_mut())
            .chain(next.sys_safety.iter_mut())
        {
            fix(&mut c.body);
        }
        for c in next.env_liveness.iter_mut().chain(next.sys_liveness.iter_mut()) {
            fix(&mut c.body);
        }
        if dangling {
            return Err(SpecError::DanglingOutput(names.join(",")));
        }
        next.refresh_idle_frame();
        *self = next;
        Ok(())
    }

    /// Rebuilds the idle frame's original disjunct for the current outputs,
    /// keeping any relaxation disjuncts. Adds the clause if missing.
    pub fn refresh_idle_frame(&mut self) {
        let fresh = idle_frame_formula(&self.props);
        match self.env_safety_skill.iter_mut().find(|c| c.is_idle_frame()) {
            Some(c) => c.body = replace_leftmost_disjunct(&c.body, fresh),
            None => self.env_safety_skill.push(SafetyClause::skill(fresh, None)),
        }
    }

    /// Structural checks shared by the parser and programmatic builders.
    pub fn validate(&self) -> Result<(), SpecError> {
        let show = |f: &Formula| f.display(&self.props).to_string();
        for name in self.props.outputs() {
            if self.skill(name).is_none() {
                return Err(SpecError::MissingSkill(name.clone()));
            }
        }
        for (i, s) in self.skills.iter().enumerate() {
            if self.props.output_index(&s.name).is_none() {
                return Err(SpecError::NotAnOutput(s.name.clone()));
            }
            if self.skills[..i].iter().any(|o| o.name == s.name) {
                return Err(SpecError::DuplicateSkill(s.name.clone()));
            }
            s.validate(&self.props)?;
        }
        for f in [&self.env_init, &self.sys_init] {
            if f.has_next() {
                return Err(SpecError::NextInInit(show(f)));
            }
        }
        for c in self.env_safety() {
            if c.body.has_next_output() {
                return Err(SpecError::NextOutputInEnvClause(show(&c.body)));
            }
        }
        let uncontrollable = self.props.input_mask().minus(self.props.controllable_mask());
        for c in self.env_safety_skill.iter().filter(|c| !c.is_idle_frame()) {
            let outs = c.body.outputs_mentioned();
            let bad_inputs = !c.body.inputs_mentioned().intersect(uncontrollable).is_empty();
            let owner = c
                .source_skill
                .as_deref()
                .and_then(|s| self.props.output_index(s));
            if outs.len() != 1 || bad_inputs || owner.map(PropSet::singleton) != Some(outs) {
                return Err(SpecError::BadSkillClause(show(&c.body)));
            }
        }
        for c in self.env_liveness.iter().chain(self.sys_liveness.iter()) {
            if c.body.has_next() {
                return Err(SpecError::NextInLiveness(show(&c.body)));
            }
        }
        Ok(())
    }
}
