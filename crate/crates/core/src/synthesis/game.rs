use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::formula::Formula;
use crate::props::{InputState, OutputState};
use crate::semantics::{eval, Assignment};
use crate::spec::{GR1Spec, SafetyClause};

use super::SynthesisError;

pub const DEFAULT_STATE_CAP: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GameState {
    pub input: InputState,
    pub output: OutputState,
}

/// One environment choice at a state and the system replies to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvMove {
    pub input: InputState,
    /// Successor state indices, one per allowed output.
    pub replies: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuildMode {
    /// Forward closure from the initial states.
    Reachable,
    /// Every mutex-consistent state, whatever the initial condition says.
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct GameConfig {
    pub mode: BuildMode,
    pub state_cap: usize,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            mode: BuildMode::Reachable,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GameStructure {
    pub states: Vec<GameState>,
    index: HashMap<GameState, usize>,
    pub env_moves: Vec<Vec<EnvMove>>,
    /// For each input satisfying the environment initial condition, the
    /// states the system may start from.
    pub initial: Vec<(InputState, Vec<usize>)>,
    pub env_liveness_sets: Vec<FixedBitSet>,
    pub sys_liveness_sets: Vec<FixedBitSet>,
}

struct Rules<'a> {
    env_safety: Vec<&'a SafetyClause>,
    sys_safety: Vec<SafetyClause>,
    inputs: Vec<InputState>,
    outputs: Vec<OutputState>,
}

impl Rules<'_> {
    fn env_successors(&self, s: GameState) -> Vec<InputState> {
        self.inputs
            .iter()
            .copied()
            .filter(|&x| {
                let a = Assignment::step((s.input, s.output), (x, OutputState::EMPTY));
                self.env_safety.iter().all(|c| eval(&c.body, &a))
            })
            .collect()
    }

    fn sys_successors(&self, s: GameState, x: InputState) -> Vec<OutputState> {
        self.outputs
            .iter()
            .copied()
            .filter(|&y| {
                let a = Assignment::step((s.input, s.output), (x, y));
                self.sys_safety.iter().all(|c| eval(&c.body, &a))
            })
            .collect()
    }
}

fn liveness_sets(states: &[GameState], bodies: Vec<Formula>) -> Vec<FixedBitSet> {
    let bodies = if bodies.is_empty() {
        vec![Formula::True]
    } else {
        bodies
    };
    bodies
        .iter()
        .map(|f| {
            let mut set = FixedBitSet::with_capacity(states.len());
            for (i, s) in states.iter().enumerate() {
                set.set(i, eval(f, &Assignment::state(s.input, s.output)));
            }
            set
        })
        .collect()
}

pub fn build_game(spec: &GR1Spec) -> Result<GameStructure, SynthesisError> {
    build_game_with(spec, GameConfig::default())
}

pub fn build_game_with(spec: &GR1Spec, cfg: GameConfig) -> Result<GameStructure, SynthesisError> {
    let rules = Rules {
        env_safety: spec.env_safety().collect(),
        sys_safety: spec.sys_safety_all(),
        inputs: spec.props.all_input_states(),
        outputs: spec.props.all_output_states(),
    };
    let sys_init = spec.sys_init_all();
    let mut states: Vec<GameState> = Vec::new();
    let mut index: HashMap<GameState, usize> = HashMap::new();
    let mut intern = |s: GameState, states: &mut Vec<GameState>| -> Result<(usize, bool), SynthesisError> {
        if let Some(&i) = index.get(&s) {
            return Ok((i, false));
        }
        if states.len() >= cfg.state_cap {
            return Err(SynthesisError::StateCap(cfg.state_cap));
        }
        index.insert(s, states.len());
        states.push(s);
        Ok((states.len() - 1, true))
    };

    if cfg.mode == BuildMode::Full {
        for &x in &rules.inputs {
            for &y in &rules.outputs {
                intern(GameState { input: x, output: y }, &mut states)?;
            }
        }
    }
    let mut initial = Vec::new();
    let mut queue = VecDeque::new();
    for &x in &rules.inputs {
        if !eval(&spec.env_init, &Assignment::state(x, OutputState::EMPTY)) {
            continue;
        }
        let mut starts = Vec::new();
        for &y in &rules.outputs {
            if eval(&sys_init, &Assignment::state(x, y)) {
                let (i, fresh) = intern(GameState { input: x, output: y }, &mut states)?;
                if fresh {
                    queue.push_back(i);
                }
                starts.push(i);
            }
        }
        initial.push((x, starts));
    }
    if cfg.mode == BuildMode::Full {
        queue = (0..states.len()).collect();
    }

    let mut env_moves: Vec<Vec<EnvMove>> = vec![Vec::new(); states.len()];
    while let Some(i) = queue.pop_front() {
        let s = states[i];
        let mut moves = Vec::new();
        for x in rules.env_successors(s) {
            let mut replies = Vec::new();
            for y in rules.sys_successors(s, x) {
                let (j, fresh) = intern(GameState { input: x, output: y }, &mut states)?;
                if fresh {
                    queue.push_back(j);
                }
                replies.push(j);
            }
            moves.push(EnvMove { input: x, replies });
        }
        if env_moves.len() < states.len() {
            env_moves.resize(states.len(), Vec::new());
        }
        env_moves[i] = moves;
    }
    env_moves.resize(states.len(), Vec::new());

    let env_liveness_sets = liveness_sets(
        &states,
        spec.env_liveness_all().into_iter().map(|l| l.body).collect(),
    );
    let sys_liveness_sets = liveness_sets(
        &states,
        spec.sys_liveness.iter().map(|l| l.body.clone()).collect(),
    );
    Ok(GameStructure {
        states,
        index,
        env_moves,
        initial,
        env_liveness_sets,
        sys_liveness_sets,
    })
}

impl GameStructure {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: GameState) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.states.len())
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    /// Controllable predecessor: states where every environment move has a
    /// system reply landing in `target`. Vacuous when the environment has no
    /// move at all.
    pub fn cpre(&self, target: &FixedBitSet) -> FixedBitSet {
        let mut out = self.empty_set();
        for (i, moves) in self.env_moves.iter().enumerate() {
            if moves
                .iter()
                .all(|m| m.replies.iter().any(|&j| target.contains(j)))
            {
                out.insert(i);
            }
        }
        out
    }
}
