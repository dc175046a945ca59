//! Formula evaluation, triplet violation and lasso-trace checking.

use crate::formula::Formula;
use crate::props::{InputState, OutputState, PropRef};
use crate::spec::{GR1Spec, SafetyClause};

/// An observed step from one input state to the next under the chosen outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Triplet {
    pub x_in: InputState,
    pub y_out: OutputState,
    pub x_in_next: InputState,
}

/// Total assignment over current inputs and outputs plus the next step.
/// `next_outputs` is only read by system clauses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Assignment {
    pub inputs: InputState,
    pub outputs: OutputState,
    pub next_inputs: InputState,
    pub next_outputs: OutputState,
}

impl Assignment {
    pub fn from_triplet(t: &Triplet) -> Self {
        Assignment {
            inputs: t.x_in,
            outputs: t.y_out,
            next_inputs: t.x_in_next,
            next_outputs: OutputState::EMPTY,
        }
    }

    pub fn step(now: (InputState, OutputState), next: (InputState, OutputState)) -> Self {
        Assignment {
            inputs: now.0,
            outputs: now.1,
            next_inputs: next.0,
            next_outputs: next.1,
        }
    }

    /// Assignment for a formula without `next` atoms.
    pub fn state(inputs: InputState, outputs: OutputState) -> Self {
        Assignment {
            inputs,
            outputs,
            ..Default::default()
        }
    }

    fn get(&self, p: PropRef, next: bool) -> bool {
        match (p, next) {
            (PropRef::Input(i), false) => self.inputs.contains(i),
            (PropRef::Input(i), true) => self.next_inputs.contains(i),
            (PropRef::Output(i), false) => self.outputs.contains(i),
            (PropRef::Output(i), true) => self.next_outputs.contains(i),
        }
    }
}

pub fn eval(f: &Formula, a: &Assignment) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => a.get(*p, false),
        Formula::Next(p) => a.get(*p, true),
        Formula::Not(x) => !eval(x, a),
        Formula::And(x, y) => eval(x, a) && eval(y, a),
        Formula::Or(x, y) => eval(x, a) || eval(y, a),
        Formula::Implies(x, y) => !eval(x, a) || eval(y, a),
        Formula::Iff(x, y) => eval(x, a) == eval(y, a),
    }
}

/// A triplet violates `always body` iff the literals it fixes falsify the body.
pub fn violates(clause: &SafetyClause, t: &Triplet) -> bool {
    !eval(&clause.body, &Assignment::from_triplet(t))
}

/// Finite prefix followed by a loop that repeats forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoTrace {
    pub prefix: Vec<(InputState, OutputState)>,
    pub cycle: Vec<(InputState, OutputState)>,
}

impl LassoTrace {
    /// Every consecutive pair, including the step closing the loop.
    pub fn steps(&self) -> Vec<Assignment> {
        let all: Vec<_> = self.prefix.iter().chain(self.cycle.iter()).copied().collect();
        let mut out: Vec<Assignment> = all.windows(2).map(|w| Assignment::step(w[0], w[1])).collect();
        if let (Some(&last), Some(&head)) = (self.cycle.last(), self.cycle.first()) {
            out.push(Assignment::step(last, head));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceReport {
    pub env_ok: bool,
    pub sys_ok: bool,
    pub goals_met: Vec<bool>,
}

pub fn check_trace(spec: &GR1Spec, trace: &LassoTrace) -> TraceReport {
    let steps = trace.steps();
    let holds_in_loop = |f: &Formula| {
        trace
            .cycle
            .iter()
            .any(|&(x, y)| eval(f, &Assignment::state(x, y)))
    };
    let env_safety = steps
        .iter()
        .all(|a| spec.env_safety().all(|c| eval(&c.body, a)));
    let env_live = spec.env_liveness_all().iter().all(|l| holds_in_loop(&l.body));
    let sys = spec.sys_safety_all();
    let sys_safety = steps.iter().all(|a| sys.iter().all(|c| eval(&c.body, a)));
    let goals_met: Vec<bool> = spec.sys_liveness.iter().map(|l| holds_in_loop(&l.body)).collect();
    TraceReport {
        env_ok: env_safety && env_live,
        sys_ok: sys_safety && goals_met.iter().all(|&g| g),
        goals_met,
    }
}
