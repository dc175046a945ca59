//! Proposition tables and fixed-width proposition sets.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Maximum number of inputs (and, separately, outputs) a table may hold.
pub const MAX_PROPS: usize = 64;

/// A set of propositions of one kind, stored as a bit vector keyed by the
/// position of each proposition in its [`PropositionTable`] list.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropSet(pub u64);

impl PropSet {
    pub const EMPTY: PropSet = PropSet(0);

    pub fn singleton(index: usize) -> Self {
        PropSet(1 << index)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(PropSet::EMPTY, |s, i| s.with(i))
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn with(self, index: usize) -> Self {
        PropSet(self.0 | 1 << index)
    }

    pub fn without(self, index: usize) -> Self {
        PropSet(self.0 & !(1 << index))
    }

    pub fn set(self, index: usize, value: bool) -> Self {
        if value {
            self.with(index)
        } else {
            self.without(index)
        }
    }

    pub fn union(self, other: PropSet) -> Self {
        PropSet(self.0 | other.0)
    }

    pub fn intersect(self, other: PropSet) -> Self {
        PropSet(self.0 & other.0)
    }

    pub fn minus(self, other: PropSet) -> Self {
        PropSet(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: PropSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_PROPS).filter(move |i| bits >> i & 1 == 1)
    }
}

impl fmt::Debug for PropSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Input state: the set of inputs that are true.
pub type InputState = PropSet;
/// Output state: the set of skills that are active.
pub type OutputState = PropSet;
/// Controllable input state: a [`PropSet`] over input indices that only
/// mentions controllable inputs.
pub type ControllableState = PropSet;

/// Reference to a proposition in a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropRef {
    Input(usize),
    Output(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputProp {
    pub name: String,
    pub controllable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("invalid proposition name `{0}`")]
    InvalidName(String),
    #[error("proposition `{0}` declared twice")]
    Duplicate(String),
    #[error("too many propositions (limit {MAX_PROPS})")]
    TooMany,
    #[error("`{0}` is not a declared input")]
    NotAnInput(String),
    #[error("input `{0}` belongs to more than one mutex group")]
    MultipleGroups(String),
    #[error("mutex group mixes controllable and uncontrollable inputs: {0}")]
    MixedGroup(String),
    #[error("mutex group must have at least one member")]
    EmptyGroup,
}

/// Identifier syntax, excluding the formula keywords.
pub fn valid_name(name: &str) -> bool {
    if matches!(name, "true" | "false" | "next") {
        return false;
    }
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Inputs (tagged controllable or uncontrollable), outputs, and mutex groups.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropositionTable {
    inputs: Vec<InputProp>,
    outputs: Vec<String>,
    mutex_groups: Vec<Vec<usize>>,
    group_of: Vec<Option<usize>>,
    names: HashMap<String, PropRef>,
}

impl PropositionTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_new(&self, name: &str) -> Result<(), TableError> {
        if !valid_name(name) || matches!(name, "true" | "false" | "next") {
            return Err(TableError::InvalidName(name.to_string()));
        }
        if self.names.contains_key(name) {
            return Err(TableError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    pub fn add_input(&mut self, name: &str, controllable: bool) -> Result<usize, TableError> {
        self.check_new(name)?;
        if self.inputs.len() == MAX_PROPS {
            return Err(TableError::TooMany);
        }
        let index = self.inputs.len();
        self.inputs.push(InputProp {
            name: name.to_string(),
            controllable,
        });
        self.group_of.push(None);
        self.names.insert(name.to_string(), PropRef::Input(index));
        Ok(index)
    }

    pub fn add_output(&mut self, name: &str) -> Result<usize, TableError> {
        self.check_new(name)?;
        if self.outputs.len() == MAX_PROPS {
            return Err(TableError::TooMany);
        }
        let index = self.outputs.len();
        self.outputs.push(name.to_string());
        self.names.insert(name.to_string(), PropRef::Output(index));
        Ok(index)
    }

    /// Drops every output at position `len` and beyond.
    pub fn truncate_outputs(&mut self, len: usize) {
        for name in self.outputs.drain(len..) {
            self.names.remove(&name);
        }
    }

    pub fn add_mutex_group(&mut self, members: &[&str]) -> Result<usize, TableError> {
        if members.is_empty() {
            return Err(TableError::EmptyGroup);
        }
        let mut indices = Vec::with_capacity(members.len());
        for name in members {
            let index = self
                .input_index(name)
                .ok_or_else(|| TableError::NotAnInput(name.to_string()))?;
            if self.group_of[index].is_some() || indices.contains(&index) {
                return Err(TableError::MultipleGroups(name.to_string()));
            }
            indices.push(index);
        }
        let tag = self.inputs[indices[0]].controllable;
        if indices.iter().any(|&i| self.inputs[i].controllable != tag) {
            return Err(TableError::MixedGroup(members.join(",")));
        }
        let group = self.mutex_groups.len();
        for &i in &indices {
            self.group_of[i] = Some(group);
        }
        self.mutex_groups.push(indices);
        Ok(group)
    }

    pub fn inputs(&self) -> &[InputProp] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn mutex_groups(&self) -> &[Vec<usize>] {
        &self.mutex_groups
    }

    pub fn group_of(&self, input: usize) -> Option<usize> {
        self.group_of[input]
    }

    pub fn lookup(&self, name: &str) -> Option<PropRef> {
        self.names.get(name).copied()
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        match self.lookup(name) {
            Some(PropRef::Input(i)) => Some(i),
            _ => None,
        }
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        match self.lookup(name) {
            Some(PropRef::Output(i)) => Some(i),
            _ => None,
        }
    }

    pub fn name(&self, prop: PropRef) -> &str {
        match prop {
            PropRef::Input(i) => &self.inputs[i].name,
            PropRef::Output(i) => &self.outputs[i],
        }
    }

    pub fn is_controllable(&self, input: usize) -> bool {
        self.inputs[input].controllable
    }

    pub fn controllable_mask(&self) -> PropSet {
        PropSet::from_indices((0..self.inputs.len()).filter(|&i| self.inputs[i].controllable))
    }

    pub fn input_mask(&self) -> PropSet {
        PropSet::from_indices(0..self.inputs.len())
    }

    pub fn output_mask(&self) -> PropSet {
        PropSet::from_indices(0..self.outputs.len())
    }

    /// Inputs that belong to no mutex group.
    pub fn free_inputs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.inputs.len()).filter(|&i| self.group_of[i].is_none())
    }

    /// Every mutex group in the table has exactly one member in `state`.
    pub fn respects_mutex(&self, state: InputState) -> bool {
        self.mutex_groups
            .iter()
            .all(|g| g.iter().filter(|&&i| state.contains(i)).count() == 1)
    }

    /// Every mutex group touched by `state` has exactly one member in it.
    pub fn respects_mutex_partial(&self, state: InputState) -> bool {
        self.mutex_groups
            .iter()
            .all(|g| g.iter().filter(|&&i| state.contains(i)).count() <= 1)
    }

    /// All mutex-consistent states over the inputs selected by `mask`
    /// (groups fully inside or outside the mask), in canonical order.
    pub fn enumerate_states(&self, mask: PropSet) -> Vec<InputState> {
        let mut states = vec![PropSet::EMPTY];
        for group in &self.mutex_groups {
            if !group.iter().all(|&i| mask.contains(i)) {
                continue;
            }
            states = states
                .iter()
                .flat_map(|s| group.iter().map(move |&i| s.with(i)))
                .collect();
        }
        for free in self.free_inputs().filter(|&i| mask.contains(i)) {
            states = states
                .iter()
                .flat_map(|&s| [s, s.with(free)])
                .collect();
        }
        states
    }

    /// All mutex-consistent input states.
    pub fn all_input_states(&self) -> Vec<InputState> {
        self.enumerate_states(self.input_mask())
    }

    /// No output, or exactly one.
    pub fn all_output_states(&self) -> Vec<OutputState> {
        std::iter::once(PropSet::EMPTY)
            .chain((0..self.outputs.len()).map(PropSet::singleton))
            .collect()
    }

    /// Renders a set as `{a,b}` in table order.
    pub fn format_inputs(&self, set: InputState) -> String {
        let names: Vec<&str> = set.iter().map(|i| self.inputs[i].name.as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn format_outputs(&self, set: OutputState) -> String {
        let names: Vec<&str> = set.iter().map(|i| self.outputs[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}
