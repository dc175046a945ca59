use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::props::{ControllableState, PropositionTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdjacencyError {
    #[error("line {0}: expected `group: state -- state` or `group: state -> state`")]
    Syntax(usize),
    #[error("line {line}: no input proposition `{name}`")]
    UnknownState { line: usize, name: String },
    #[error("line {line}: `{a}` and `{b}` are not in the same mutex group")]
    CrossGroup { line: usize, a: String, b: String },
}

/// Which region changes a low-level controller can realize, per mutex group.
/// Groups never mentioned are unconstrained.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdjacencyModel {
    edges: BTreeSet<(usize, usize)>,
    constrained: BTreeSet<usize>,
    /// Hop counts between members of constrained groups.
    dist: BTreeMap<(usize, usize), usize>,
}

impl AdjacencyModel {
    pub fn unconstrained() -> Self {
        Self::default()
    }

    /// Parses `object: a -- b` (symmetric) and `object: a -> b` (directed)
    /// lines. A state `a` names the input `object_a`, or `a` itself when that
    /// is already a declared input.
    pub fn parse(text: &str, props: &PropositionTable) -> Result<Self, AdjacencyError> {
        let mut model = AdjacencyModel::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (group, rest) = content.split_once(':').ok_or(AdjacencyError::Syntax(line))?;
            let (symmetric, (a, b)) = if let Some(pair) = rest.split_once("--") {
                (true, pair)
            } else {
                (false, rest.split_once("->").ok_or(AdjacencyError::Syntax(line))?)
            };
            let resolve = |state: &str| {
                let state = state.trim();
                let qualified = format!("{}_{}", group.trim(), state);
                props
                    .input_index(&qualified)
                    .or_else(|| props.input_index(state))
                    .ok_or(AdjacencyError::UnknownState {
                        line,
                        name: qualified,
                    })
            };
            let (ia, ib) = (resolve(a)?, resolve(b)?);
            let g = match (props.group_of(ia), props.group_of(ib)) {
                (Some(ga), Some(gb)) if ga == gb => ga,
                _ => {
                    return Err(AdjacencyError::CrossGroup {
                        line,
                        a: a.trim().to_string(),
                        b: b.trim().to_string(),
                    })
                }
            };
            model.constrained.insert(g);
            model.edges.insert((ia, ib));
            if symmetric {
                model.edges.insert((ib, ia));
            }
        }
        for &g in &model.constrained {
            let d = model.distances(props, g);
            model.dist.extend(d);
        }
        Ok(model)
    }

    pub fn is_constrained(&self, group: usize) -> bool {
        self.constrained.contains(&group)
    }

    fn member(props: &PropositionTable, s: ControllableState, group: usize) -> Option<usize> {
        props.mutex_groups()[group].iter().copied().find(|&i| s.contains(i))
    }

    /// One controller step: every constrained group stays put or moves along
    /// a declared edge.
    pub fn adjacent(&self, props: &PropositionTable, from: ControllableState, to: ControllableState) -> bool {
        self.constrained.iter().all(|&g| {
            match (Self::member(props, from, g), Self::member(props, to, g)) {
                (Some(a), Some(b)) => a == b || self.edges.contains(&(a, b)),
                _ => true,
            }
        })
    }

    pub fn chain_ok(&self, props: &PropositionTable, chain: &[ControllableState]) -> bool {
        chain.windows(2).all(|w| self.adjacent(props, w[0], w[1]))
    }

    /// Shortest-path hop counts inside one constrained group.
    fn distances(&self, props: &PropositionTable, group: usize) -> BTreeMap<(usize, usize), usize> {
        let members = &props.mutex_groups()[group];
        let mut out = BTreeMap::new();
        for &src in members {
            let mut queue = VecDeque::from([(src, 0)]);
            let mut seen = BTreeSet::from([src]);
            while let Some((u, d)) = queue.pop_front() {
                out.insert((src, u), d);
                for &v in members {
                    if self.edges.contains(&(u, v)) && seen.insert(v) {
                        queue.push_back((v, d + 1));
                    }
                }
            }
        }
        out
    }

    /// Largest per-group hop count between two controllable states; free
    /// inputs and unconstrained groups count one hop per change.
    pub fn hops(&self, props: &PropositionTable, from: ControllableState, to: ControllableState) -> usize {
        let mut worst = 0;
        for g in 0..props.mutex_groups().len() {
            let (a, b) = match (Self::member(props, from, g), Self::member(props, to, g)) {
                (Some(a), Some(b)) => (a, b),
                _ => continue,
            };
            let d = if a == b {
                0
            } else if self.is_constrained(g) {
                self.dist.get(&(a, b)).copied().unwrap_or(usize::MAX)
            } else {
                1
            };
            worst = worst.max(d);
        }
        let free_changed = props
            .free_inputs()
            .any(|i| props.is_controllable(i) && from.contains(i) != to.contains(i));
        if free_changed {
            worst = worst.max(1);
        }
        worst
    }
}
