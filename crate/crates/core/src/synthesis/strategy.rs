use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use crate::props::{InputState, OutputState, PropositionTable};

use super::game::GameStructure;
use super::solve::Solution;
use super::SynthesisError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StrategyNode {
    /// Index into the game's state list.
    pub state: usize,
    pub input: InputState,
    pub output: OutputState,
    /// System liveness goal being pursued.
    pub goal: usize,
}

/// Deterministic finite-state controller. `delta` is partial: inputs that
/// break the environment assumptions have no transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub nodes: Vec<StrategyNode>,
    pub initial: BTreeMap<InputState, usize>,
    transitions: Vec<BTreeMap<InputState, usize>>,
    pub goal_count: usize,
}

impl Strategy {
    pub fn initial_node(&self, x: InputState) -> Option<usize> {
        self.initial.get(&x).copied()
    }

    pub fn delta(&self, node: usize, x: InputState) -> Option<usize> {
        self.transitions[node].get(&x).copied()
    }

    pub fn gamma_x(&self, node: usize) -> InputState {
        self.nodes[node].input
    }

    pub fn gamma_y(&self, node: usize) -> OutputState {
        self.nodes[node].output
    }

    pub fn goal_of(&self, node: usize) -> usize {
        self.nodes[node].goal
    }

    pub fn successors(&self, node: usize) -> impl Iterator<Item = (InputState, usize)> + '_ {
        self.transitions[node].iter().map(|(&x, &n)| (x, n))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Line-oriented dump: `state` lines, then `edge` lines.
    pub fn dump(&self, props: &PropositionTable) -> String {
        let mut out = String::new();
        for (id, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                out,
                "state {id} in={} out={} goal={}",
                props.format_inputs(n.input),
                props.format_outputs(n.output),
                n.goal
            );
        }
        for (id, edges) in self.transitions.iter().enumerate() {
            for (&x, &to) in edges {
                let _ = writeln!(out, "edge {id} on={} -> {to}", props.format_inputs(x));
            }
        }
        out
    }
}

fn rank_key(sol: &Solution, goal: usize, s: usize) -> (u32, u32, usize) {
    let (r, i) = sol.layers[goal].rank[s].unwrap_or((u32::MAX, u32::MAX));
    (r, i, s)
}

/// System reply to one environment move from `(s, goal)`.
fn choose(
    sol: &Solution,
    goal_reached: bool,
    s: usize,
    goal: usize,
    replies: &[usize],
) -> Option<(usize, usize)> {
    let m = sol.layers.len();
    if goal_reached {
        let next_goal = (goal + 1) % m;
        return replies
            .iter()
            .copied()
            .filter(|&t| sol.winning.contains(t))
            .min_by_key(|&t| rank_key(sol, next_goal, t))
            .map(|t| (t, next_goal));
    }
    let layers = &sol.layers[goal];
    let (r, i) = layers.rank[s]?;
    let layer = &layers.x[r as usize][i as usize];
    replies
        .iter()
        .copied()
        .filter(|&t| match layers.rank[t] {
            Some((rt, _)) if rt < r => true,
            _ => layer.contains(t),
        })
        .min_by_key(|&t| rank_key(sol, goal, t))
        .map(|t| (t, goal))
}

pub fn extract_strategy(game: &GameStructure, sol: &Solution) -> Result<Strategy, SynthesisError> {
    if !sol.realizable {
        return Err(SynthesisError::Unrealizable);
    }
    let reach_z = game.cpre(&sol.winning);
    let in_goal: Vec<FixedBitSet> = game
        .sys_liveness_sets
        .iter()
        .map(|j| {
            let mut s = j.clone();
            s.intersect_with(&reach_z);
            s
        })
        .collect();

    let mut nodes: Vec<StrategyNode> = Vec::new();
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut add = |s: usize, goal: usize, nodes: &mut Vec<StrategyNode>, queue: &mut VecDeque<usize>| {
        *ids.entry((s, goal)).or_insert_with(|| {
            let st = game.states[s];
            nodes.push(StrategyNode {
                state: s,
                input: st.input,
                output: st.output,
                goal,
            });
            queue.push_back(nodes.len() - 1);
            nodes.len() - 1
        })
    };

    let mut initial = BTreeMap::new();
    for (x, starts) in &game.initial {
        let best = starts
            .iter()
            .copied()
            .filter(|&s| sol.winning.contains(s))
            .min_by_key(|&s| rank_key(sol, 0, s))
            .ok_or(SynthesisError::Unrealizable)?;
        let id = add(best, 0, &mut nodes, &mut queue);
        initial.insert(*x, id);
    }

    let mut transitions: Vec<BTreeMap<InputState, usize>> = Vec::new();
    while let Some(id) = queue.pop_front() {
        let StrategyNode { state: s, goal, .. } = nodes[id];
        let reached = in_goal[goal].contains(s);
        let mut edges = BTreeMap::new();
        for mv in &game.env_moves[s] {
            let (t, g) = choose(sol, reached, s, goal, &mv.replies)
                .ok_or(SynthesisError::Internal("no winning reply"))?;
            let to = add(t, g, &mut nodes, &mut queue);
            edges.insert(mv.input, to);
        }
        if transitions.len() <= id {
            transitions.resize(id + 1, BTreeMap::new());
        }
        transitions[id] = edges;
    }
    transitions.resize(nodes.len(), BTreeMap::new());
    Ok(Strategy {
        nodes,
        initial,
        transitions,
        goal_count: sol.layers.len(),
    })
}
