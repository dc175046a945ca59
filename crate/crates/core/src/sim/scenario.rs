use thiserror::Error;

use crate::props::{InputState, OutputState, PropRef, PropositionTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("scenario line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("scenario line {line}: unknown proposition `{name}`")]
    UnknownProp { line: usize, name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Effect {
    Move { object: String, region: String },
    Set { flag: String, value: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trigger {
    /// Fires at the given 1-based step.
    AtStep(usize),
    /// Fires the first time every listed input and output is true.
    When { inputs: InputState, outputs: OutputState },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub trigger: Trigger,
    pub effect: Effect,
}

/// Scripted disturbances. Each event fires at most once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub events: Vec<Event>,
    pub max_steps: Option<usize>,
}

impl Event {
    pub fn triggered(&self, step: usize, x: InputState, y: OutputState) -> bool {
        match &self.trigger {
            Trigger::AtStep(n) => *n == step,
            Trigger::When { inputs, outputs } => inputs.is_subset(x) && outputs.is_subset(y),
        }
    }
}

fn perr(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_effect(text: &str, line: usize) -> Result<Effect, ScenarioError> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("move ") {
        let (object, region) = rest
            .split_once("->")
            .ok_or_else(|| perr(line, "expected `move OBJECT -> REGION`"))?;
        return Ok(Effect::Move {
            object: object.trim().to_string(),
            region: region.trim().to_string(),
        });
    }
    if let Some(rest) = text.strip_prefix("set ") {
        let (flag, value) = rest
            .split_once('=')
            .ok_or_else(|| perr(line, "expected `set FLAG = true|false`"))?;
        let value = match value.trim() {
            "true" => true,
            "false" => false,
            v => return Err(perr(line, format!("`{v}` is not true or false"))),
        };
        return Ok(Effect::Set {
            flag: flag.trim().to_string(),
            value,
        });
    }
    Err(perr(line, format!("unknown effect `{text}`")))
}

impl Scenario {
    pub fn empty() -> Self {
        Scenario {
            events: Vec::new(),
            max_steps: None,
        }
    }

    /// Lines: `at step N: EFFECT`, `when {p, q}: EFFECT` and `max_steps N`,
    /// where EFFECT is `move OBJECT -> REGION` or `set FLAG = true|false`.
    /// Trigger sets may name inputs and outputs.
    pub fn parse(text: &str, props: &PropositionTable) -> Result<Self, ScenarioError> {
        let mut sc = Scenario::empty();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(n) = content.strip_prefix("max_steps") {
                let n = n.trim().parse().map_err(|_| perr(line, "max_steps needs a number"))?;
                sc.max_steps = Some(n);
                continue;
            }
            let (trigger, effect) = if let Some(rest) = content.strip_prefix("at step") {
                let (n, effect) = rest.split_once(':').ok_or_else(|| perr(line, "missing `:`"))?;
                let n: usize = n.trim().parse().map_err(|_| perr(line, "step must be a number"))?;
                if n == 0 {
                    return Err(perr(line, "steps start at 1"));
                }
                (Trigger::AtStep(n), effect)
            } else if let Some(rest) = content.strip_prefix("when") {
                let rest = rest.trim();
                let close = rest.find('}').ok_or_else(|| perr(line, "expected `when {..}: EFFECT`"))?;
                let body = rest[..close]
                    .strip_prefix('{')
                    .ok_or_else(|| perr(line, "expected `{`"))?;
                let (mut inputs, mut outputs) = (InputState::EMPTY, OutputState::EMPTY);
                for name in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    match props.lookup(name) {
                        Some(PropRef::Input(i)) => inputs = inputs.with(i),
                        Some(PropRef::Output(o)) => outputs = outputs.with(o),
                        None => {
                            return Err(ScenarioError::UnknownProp {
                                line,
                                name: name.to_string(),
                            })
                        }
                    }
                }
                let effect = rest[close + 1..]
                    .trim()
                    .strip_prefix(':')
                    .ok_or_else(|| perr(line, "missing `:`"))?;
                (Trigger::When { inputs, outputs }, effect)
            } else {
                return Err(perr(line, format!("unknown entry `{content}`")));
            };
            sc.events.push(Event {
                trigger,
                effect: parse_effect(effect, line)?,
            });
        }
        Ok(sc)
    }
}
