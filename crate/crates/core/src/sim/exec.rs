use thiserror::Error;

use crate::monitor::{compile_monitor, Monitor};
use crate::props::{InputState, OutputState};
use crate::relaxation::{relax, RelaxError, RelaxationRecord};
use crate::repair::{add_skills, repair, AdjacencyModel, RepairConfig, RepairError, SkillSuggestion};
use crate::semantics::Triplet;
use crate::spec::{GR1Spec, SpecError};
use crate::synthesis::{synthesize, Strategy, SynthesisError, DEFAULT_STATE_CAP};

use super::scenario::{Effect, Scenario};
use super::workspace::{WorldError, WorldState, Workspace};

#[derive(Debug, Error)]
pub enum ExecError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error(transparent)]
    Repair(#[from] RepairError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("the specification is unrealizable")]
    Unrealizable,
    #[error("no strategy node starts from the observed state {0}")]
    NoInitialNode(String),
    #[error("strategy has no move for {0} although no assumption was violated")]
    MissingMove(String),
}

#[derive(Clone, Debug)]
pub struct ExecConfig {
    pub max_steps: usize,
    pub state_cap: usize,
    pub repair: RepairConfig,
    pub adjacency: AdjacencyModel,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            max_steps: 30,
            state_cap: DEFAULT_STATE_CAP,
            repair: RepairConfig::default(),
            adjacency: AdjacencyModel::unconstrained(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// Ran for the step budget.
    Running,
    /// A violation could not be recovered from.
    Unrecoverable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub step: usize,
    pub input: InputState,
    pub output: OutputState,
    /// Goal being pursued, as an index into the original liveness list.
    pub goal: usize,
}

#[derive(Clone, Debug)]
pub struct ViolationRecord {
    pub step: usize,
    pub triplet: Triplet,
    /// Violated clauses, printed against the specification in force at the time.
    pub violated: Vec<String>,
    pub relaxations: Vec<RelaxationRecord>,
    /// Printed added disjuncts, parallel to `relaxations`.
    pub added: Vec<String>,
    pub relaxed_realizable: bool,
    pub suggestions: Vec<SkillSuggestion>,
    pub repair_iterations: usize,
    /// Whether execution could continue.
    pub realizable: bool,
    /// Original goal index active when the violation was observed.
    pub goal_before: usize,
    /// Original goal index of the resumed strategy's first node.
    pub goal_after: Option<usize>,
    /// Input state of the resumed strategy's first node.
    pub resumed_input: Option<InputState>,
}

#[derive(Clone, Debug)]
pub struct ExecutionReport {
    pub trace: Vec<TraceEntry>,
    pub violations: Vec<ViolationRecord>,
    pub terminal: Terminal,
    pub final_spec: GR1Spec,
}

struct Controller {
    spec: GR1Spec,
    monitor: Monitor,
    strategy: Strategy,
    /// Current liveness position to original index.
    goal_map: Vec<usize>,
}

impl Controller {
    fn new(spec: GR1Spec, goal_map: Vec<usize>, state_cap: usize) -> Result<Self, ExecError> {
        let strategy = synthesize(&spec, state_cap)?
            .strategy
            .ok_or(ExecError::Unrealizable)?;
        Ok(Controller {
            monitor: compile_monitor(&spec),
            spec,
            strategy,
            goal_map,
        })
    }

    fn start(&self, x: InputState) -> Result<usize, ExecError> {
        self.strategy
            .initial_node(x)
            .ok_or_else(|| ExecError::NoInitialNode(self.spec.props.format_inputs(x)))
    }
}

fn apply_effect(ws: &Workspace, world: &mut WorldState, effect: &Effect) -> Result<(), WorldError> {
    match effect {
        Effect::Move { object, region } => ws.teleport(world, object, region),
        Effect::Set { flag, value } => ws.set_flag(world, flag, *value),
    }
}

/// Runs the controller against the simulated world. Each step reads the
/// abstract state, lets scripted events fire (they preempt the skill for
/// that step) or advances the active skill, then checks the observed
/// transition. A violation triggers relaxation, resynthesis and, when the
/// relaxed spec is unrealizable, skill repair before resuming from the
/// observed state.
pub fn run_execution_loop(
    spec: &GR1Spec,
    ws: &Workspace,
    scenario: &Scenario,
    cfg: &ExecConfig,
) -> Result<ExecutionReport, ExecError> {
    ws.check_grounding(&spec.props)?;
    let goals = spec.sys_liveness.len().max(1);
    let mut ctl = Controller::new(spec.clone(), (0..goals).collect(), cfg.state_cap)?;
    let mut world = ws.initial_state();
    let mut node = ctl.start(ws.inverse_grounding(&ctl.spec.props, &world)?)?;
    let mut fired = vec![false; scenario.events.len()];
    let mut trace = Vec::new();
    let mut violations = Vec::new();
    let mut terminal = Terminal::Running;

    for step in 1..=cfg.max_steps {
        let props = &ctl.spec.props;
        let x = ws.inverse_grounding(props, &world)?;
        let y = ctl.strategy.gamma_y(node);
        let goal = ctl.strategy.goal_of(node);
        trace.push(TraceEntry {
            step,
            input: x,
            output: y,
            goal: ctl.goal_map[goal],
        });

        let mut any_event = false;
        for (i, ev) in scenario.events.iter().enumerate() {
            if !fired[i] && ev.triggered(step, x, y) {
                fired[i] = true;
                any_event = true;
                apply_effect(ws, &mut world, &ev.effect)?;
            }
        }
        if !any_event {
            if let Some(out) = y.iter().next() {
                if let Some(skill) = ctl.spec.skill_of_output(out) {
                    let here = x.intersect(props.controllable_mask());
                    if let Some(k) = skill.chain_position(props, here) {
                        if k + 1 < skill.chain.len() {
                            ws.apply_skill_tick(props, skill, k, &mut world)?;
                        }
                    }
                }
            }
        }

        let x_next = ws.inverse_grounding(props, &world)?;
        let t = Triplet {
            x_in: x,
            y_out: y,
            x_in_next: x_next,
        };
        let report = ctl.monitor.check_assumptions(&t, goal);
        if report.violated.is_empty() {
            node = ctl
                .strategy
                .delta(node, x_next)
                .ok_or_else(|| ExecError::MissingMove(props.format_inputs(x_next)))?;
            continue;
        }

        let violated = report
            .violated
            .iter()
            .map(|&i| ctl.monitor.clauses()[i].body.display(props).to_string())
            .collect();
        let (relaxed, relaxations) = relax(&ctl.spec, &report)?;
        let added = relaxations
            .iter()
            .map(|r| r.added_disjunct.display(props).to_string())
            .collect();
        let mut goal_map = ctl.goal_map.clone();
        goal_map.rotate_left(goal);
        let mut record = ViolationRecord {
            step,
            triplet: t,
            violated,
            relaxations,
            added,
            relaxed_realizable: false,
            suggestions: Vec::new(),
            repair_iterations: 0,
            realizable: false,
            goal_before: ctl.goal_map[goal],
            goal_after: None,
            resumed_input: None,
        };

        let next_ctl = match Controller::new(relaxed.clone(), goal_map.clone(), cfg.state_cap) {
            Ok(c) => {
                record.relaxed_realizable = true;
                Some(c)
            }
            Err(ExecError::Unrealizable) => {
                let rcfg = RepairConfig {
                    rng_seed: cfg.repair.rng_seed.wrapping_add(violations.len() as u64),
                    ..cfg.repair
                };
                let outcome = repair(&relaxed, &rcfg, &cfg.adjacency)?;
                record.repair_iterations = outcome.iterations;
                record.suggestions = outcome.suggestions;
                if record.suggestions.is_empty() {
                    None
                } else {
                    let repaired = add_skills(&relaxed, &record.suggestions)?;
                    Some(Controller::new(repaired, goal_map, cfg.state_cap)?)
                }
            }
            Err(e) => return Err(e),
        };

        match next_ctl {
            Some(c) => {
                ctl = c;
                node = ctl.start(x_next)?;
                record.realizable = true;
                record.goal_after = Some(ctl.goal_map[ctl.strategy.goal_of(node)]);
                record.resumed_input = Some(ctl.strategy.gamma_x(node));
                violations.push(record);
            }
            None => {
                ctl.spec = relaxed;
                violations.push(record);
                terminal = Terminal::Unrecoverable;
                break;
            }
        }
    }

    Ok(ExecutionReport {
        trace,
        violations,
        terminal,
        final_spec: ctl.spec,
    })
}
