//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gr1_repair::fixtures::Fixture;
use gr1_repair::formula::Formula;
use gr1_repair::monitor::compile_monitor;
use gr1_repair::parse::{parse_spec, parse_triplet};
use gr1_repair::props::{InputState, OutputState, PropRef, PropositionTable};
use gr1_repair::relaxation::relax;
use gr1_repair::repair::AdjacencyModel;
use gr1_repair::semantics::{eval, Assignment, Triplet};
use gr1_repair::sim::{run_execution_loop, ExecConfig, ExecutionReport, Scenario, Workspace};
use gr1_repair::spec::{GR1Spec, LivenessClause, SafetyClause, Skill};
use gr1_repair::synthesis::Strategy;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// SAT oracle for a single step: the clause body conjoined with unit literals for
// every proposition the triplet fixes, handed to a small DPLL solver.

pub struct Cnf {
    pub vars: i32,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    fn fresh(&mut self) -> i32 {
        self.vars += 1;
        self.vars
    }
}

fn tseitin(f: &Formula, cnf: &mut Cnf, atoms: &mut BTreeMap<(PropRef, bool), i32>) -> i32 {
    let mut atom = |p: PropRef, next: bool, cnf: &mut Cnf| *atoms.entry((p, next)).or_insert_with(|| cnf.fresh());
    match f {
        Formula::True => {
            let v = cnf.fresh();
            cnf.clauses.push(vec![v]);
            v
        }
        Formula::False => {
            let v = cnf.fresh();
            cnf.clauses.push(vec![-v]);
            v
        }
        Formula::Atom(p) => atom(*p, false, cnf),
        Formula::Next(p) => atom(*p, true, cnf),
        Formula::Not(a) => -tseitin(a, cnf, atoms),
        Formula::And(a, b) => {
            let (a, b) = (tseitin(a, cnf, atoms), tseitin(b, cnf, atoms));
            let v = cnf.fresh();
            cnf.clauses.extend([vec![-v, a], vec![-v, b], vec![v, -a, -b]]);
            v
        }
        Formula::Or(a, b) => {
            let (a, b) = (tseitin(a, cnf, atoms), tseitin(b, cnf, atoms));
            let v = cnf.fresh();
            cnf.clauses.extend([vec![-v, a, b], vec![v, -a], vec![v, -b]]);
            v
        }
        Formula::Implies(a, b) => {
            let (a, b) = (tseitin(a, cnf, atoms), tseitin(b, cnf, atoms));
            let v = cnf.fresh();
            cnf.clauses.extend([vec![-v, -a, b], vec![v, a], vec![v, -b]]);
            v
        }
        Formula::Iff(a, b) => {
            let (a, b) = (tseitin(a, cnf, atoms), tseitin(b, cnf, atoms));
            let v = cnf.fresh();
            cnf.clauses
                .extend([vec![-v, -a, b], vec![-v, a, -b], vec![v, a, b], vec![v, -a, -b]]);
            v
        }
    }
}

fn value(assign: &[i8], lit: i32) -> i8 {
    let v = assign[lit.unsigned_abs() as usize];
    if lit > 0 {
        v
    } else {
        -v
    }
}

/// Plain DPLL with unit propagation.
pub fn dpll(cnf: &Cnf) -> bool {
    fn go(clauses: &[Vec<i32>], assign: &mut [i8]) -> bool {
        loop {
            let mut changed = false;
            for c in clauses {
                let mut unassigned = None;
                let mut open = 0;
                let mut sat = false;
                for &l in c {
                    match value(assign, l) {
                        1 => {
                            sat = true;
                            break;
                        }
                        0 => {
                            open += 1;
                            unassigned = Some(l);
                        }
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => {
                        let l = unassigned.unwrap();
                        assign[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        let Some(var) = clauses
            .iter()
            .flatten()
            .map(|l| l.unsigned_abs() as usize)
            .find(|&v| assign[v] == 0)
        else {
            return true;
        };
        for guess in [1, -1] {
            let mut trial = assign.to_vec();
            trial[var] = guess;
            if go(clauses, &mut trial) {
                return true;
            }
        }
        false
    }
    let mut assign = vec![0i8; cnf.vars as usize + 1];
    go(&cnf.clauses, &mut assign)
}

/// Violated iff the body is UNSAT once every proposition `t` fixes is pinned.
pub fn sat_violated(body: &Formula, props: &PropositionTable, t: &Triplet) -> bool {
    let mut cnf = Cnf {
        vars: 0,
        clauses: Vec::new(),
    };
    let mut atoms = BTreeMap::new();
    let root = tseitin(body, &mut cnf, &mut atoms);
    cnf.clauses.push(vec![root]);
    let mut force = |p: PropRef, next: bool, on: bool, cnf: &mut Cnf| {
        let v = *atoms.entry((p, next)).or_insert_with(|| cnf.fresh());
        cnf.clauses.push(vec![if on { v } else { -v }]);
    };
    for i in 0..props.inputs().len() {
        force(PropRef::Input(i), false, t.x_in.contains(i), &mut cnf);
        force(PropRef::Input(i), true, t.x_in_next.contains(i), &mut cnf);
    }
    for o in 0..props.outputs().len() {
        force(PropRef::Output(o), false, t.y_out.contains(o), &mut cnf);
    }
    !dpll(&cnf)
}

// ---------------------------------------------------------------------------
// Random generators.

/// A few controllable inputs in one mutex group, a free controllable input,
/// uncontrollable inputs (one grouped pair) and some outputs.
pub fn random_table(r: &mut impl Rng) -> PropositionTable {
    let mut t = PropositionTable::new();
    let group = r.gen_range(2..=4);
    let names: Vec<String> = (0..group).map(|i| format!("r_{i}")).collect();
    for n in &names {
        t.add_input(n, true).unwrap();
    }
    t.add_input("hold", true).unwrap();
    t.add_input("o_a", false).unwrap();
    t.add_input("o_b", false).unwrap();
    if r.gen_bool(0.5) {
        t.add_input("flag", false).unwrap();
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    t.add_mutex_group(&refs).unwrap();
    t.add_mutex_group(&["o_a", "o_b"]).unwrap();
    t
}

pub struct FormulaShape {
    pub next_inputs: bool,
    pub next_outputs: bool,
    pub outputs: bool,
}

pub fn random_formula(r: &mut impl Rng, props: &PropositionTable, depth: u32, shape: &FormulaShape) -> Formula {
    if depth == 0 || r.gen_bool(0.25) {
        let n_in = props.inputs().len();
        let n_out = if shape.outputs { props.outputs().len() } else { 0 };
        let pick = r.gen_range(0..n_in + n_out + 1);
        if pick == n_in + n_out {
            return if r.gen_bool(0.5) { Formula::True } else { Formula::False };
        }
        let p = if pick < n_in {
            PropRef::Input(pick)
        } else {
            PropRef::Output(pick - n_in)
        };
        let next = match p {
            PropRef::Input(_) => shape.next_inputs && r.gen_bool(0.5),
            PropRef::Output(_) => shape.next_outputs && r.gen_bool(0.5),
        };
        return if next { Formula::Next(p) } else { Formula::Atom(p) };
    }
    let a = random_formula(r, props, depth - 1, shape);
    match r.gen_range(0..5) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_formula(r, props, depth - 1, shape)),
        2 => Formula::or(a, random_formula(r, props, depth - 1, shape)),
        3 => Formula::implies(a, random_formula(r, props, depth - 1, shape)),
        _ => Formula::iff(a, random_formula(r, props, depth - 1, shape)),
    }
}

pub const ENV_SHAPE: FormulaShape = FormulaShape {
    next_inputs: true,
    next_outputs: false,
    outputs: true,
};

/// Input state honouring every mutex group.
pub fn random_state(r: &mut impl Rng, props: &PropositionTable) -> InputState {
    let mut x = InputState::EMPTY;
    for g in props.mutex_groups() {
        x = x.with(*g.choose(r).unwrap());
    }
    for i in props.free_inputs() {
        x = x.set(i, r.gen_bool(0.5));
    }
    x
}

pub fn random_output(r: &mut impl Rng, props: &PropositionTable) -> OutputState {
    let n = props.outputs().len();
    let k = r.gen_range(0..=n);
    if k == n {
        OutputState::EMPTY
    } else {
        OutputState::singleton(k)
    }
}

pub fn random_triplet(r: &mut impl Rng, props: &PropositionTable) -> Triplet {
    Triplet {
        x_in: random_state(r, props),
        y_out: random_output(r, props),
        x_in_next: random_state(r, props),
    }
}

fn random_chain(r: &mut impl Rng, props: &PropositionTable) -> Vec<InputState> {
    let group = &props.mutex_groups()[0];
    let len = r.gen_range(2..=group.len().min(3));
    let mut members = group.clone();
    members.shuffle(r);
    let with_hold = r.gen_bool(0.3);
    let hold = props.input_index("hold").unwrap();
    members[..len]
        .iter()
        .map(|&m| {
            let s = InputState::singleton(m);
            if with_hold {
                s.set(hold, r.gen_bool(0.5))
            } else {
                s
            }
        })
        .collect()
}

/// Random but valid spec: one to three skills, a few clauses per section.
pub fn random_spec(r: &mut impl Rng) -> GR1Spec {
    let props = random_table(r);
    let mut spec = GR1Spec::new(props);
    for k in 0..r.gen_range(1..=3) {
        let chain = random_chain(r, &spec.props);
        let skill = Skill::new(&format!("skill_{k}"), chain);
        spec.add_skill(skill).unwrap();
    }
    let outputs = FormulaShape {
        next_inputs: false,
        next_outputs: false,
        outputs: true,
    };
    let sys_shape = FormulaShape {
        next_inputs: true,
        next_outputs: true,
        outputs: true,
    };
    let state_shape = FormulaShape {
        next_inputs: false,
        next_outputs: false,
        outputs: false,
    };
    for _ in 0..r.gen_range(0..3) {
        let body = random_formula(r, &spec.props, 3, &ENV_SHAPE);
        spec.env_safety_hard.push(SafetyClause::hard(body));
    }
    for _ in 0..r.gen_range(0..3) {
        let body = random_formula(r, &spec.props, 3, &sys_shape);
        spec.sys_safety.push(SafetyClause::system(body));
    }
    for _ in 0..r.gen_range(0..3) {
        spec.sys_liveness.push(LivenessClause {
            body: random_formula(r, &spec.props, 2, &outputs),
        });
    }
    if r.gen_bool(0.5) {
        spec.env_liveness.push(LivenessClause {
            body: random_formula(r, &spec.props, 2, &outputs),
        });
    }
    if r.gen_bool(0.7) {
        spec.env_init = random_formula(r, &spec.props, 2, &state_shape);
    }
    if r.gen_bool(0.3) {
        spec.sys_init = random_formula(r, &spec.props, 2, &outputs);
    }
    spec
}

/// A triplet violating at least one env clause of `spec`, if one turns up.
pub fn violating_triplet(r: &mut impl Rng, spec: &GR1Spec, tries: usize) -> Option<Triplet> {
    let m = compile_monitor(spec);
    (0..tries)
        .map(|_| random_triplet(r, &spec.props))
        .find(|t| !m.check_assumptions(t, 0).violated.is_empty())
}

// ---------------------------------------------------------------------------
// Exhaustive playout of a strategy.

fn state_holds(f: &Formula, x: InputState, y: OutputState) -> bool {
    eval(f, &Assignment::state(x, y))
}

/// Tarjan's SCCs over `nodes` with successor lists restricted to `inside`.
fn sccs(succ: &BTreeMap<usize, Vec<usize>>, inside: &BTreeSet<usize>) -> Vec<Vec<usize>> {
    struct T<'a> {
        succ: &'a BTreeMap<usize, Vec<usize>>,
        inside: &'a BTreeSet<usize>,
        index: BTreeMap<usize, usize>,
        low: BTreeMap<usize, usize>,
        stack: Vec<usize>,
        on: BTreeSet<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(t: &mut T, v: usize) {
        t.index.insert(v, t.next);
        t.low.insert(v, t.next);
        t.next += 1;
        t.stack.push(v);
        t.on.insert(v);
        let ws: Vec<usize> = t.succ[&v].iter().copied().filter(|w| t.inside.contains(w)).collect();
        for w in ws {
            if !t.index.contains_key(&w) {
                visit(t, w);
                let lw = t.low[&w];
                let lv = t.low.get_mut(&v).unwrap();
                *lv = (*lv).min(lw);
            } else if t.on.contains(&w) {
                let iw = t.index[&w];
                let lv = t.low.get_mut(&v).unwrap();
                *lv = (*lv).min(iw);
            }
        }
        if t.low[&v] == t.index[&v] {
            let mut comp = Vec::new();
            loop {
                let w = t.stack.pop().unwrap();
                t.on.remove(&w);
                comp.push(w);
                if w == v {
                    break;
                }
            }
            t.out.push(comp);
        }
    }
    let mut t = T {
        succ,
        inside,
        index: BTreeMap::new(),
        low: BTreeMap::new(),
        stack: Vec::new(),
        on: BTreeSet::new(),
        next: 0,
        out: Vec::new(),
    };
    for &v in inside {
        if !t.index.contains_key(&v) {
            visit(&mut t, v);
        }
    }
    t.out
}

#[derive(Debug, Default)]
pub struct Playout {
    pub nodes: usize,
    pub edges: usize,
    pub depth_reached: usize,
}

/// Plays every environment move allowed by the assumptions, from every
/// allowed initial state, to `depth` steps. Fails on a system safety
/// violation, a missing response, or a fair cycle that avoids some goal.
pub fn exhaustive_playout(spec: &GR1Spec, strategy: &Strategy, depth: usize) -> Result<Playout, String> {
    let props = &spec.props;
    let inputs: Vec<InputState> = props.all_input_states();
    let env_safety: Vec<&SafetyClause> = spec.env_safety().collect();
    let sys_safety = spec.sys_safety_all();
    let sys_init = spec.sys_init_all();
    let mut frontier = Vec::new();
    for &x in &inputs {
        if !state_holds(&spec.env_init, x, OutputState::EMPTY) {
            continue;
        }
        let n = strategy
            .initial_node(x)
            .ok_or_else(|| format!("no initial node for {}", props.format_inputs(x)))?;
        if strategy.gamma_x(n) != x || !state_holds(&sys_init, x, strategy.gamma_y(n)) {
            return Err(format!("bad initial node for {}", props.format_inputs(x)));
        }
        frontier.push(n);
    }
    let mut seen: BTreeSet<usize> = frontier.iter().copied().collect();
    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut report = Playout::default();
    for d in 0..depth {
        let mut next_frontier = Vec::new();
        for &n in &frontier {
            let (x, y) = (strategy.gamma_x(n), strategy.gamma_y(n));
            let mut out = Vec::new();
            for &x2 in &inputs {
                let a = Assignment::step((x, y), (x2, OutputState::EMPTY));
                if !env_safety.iter().all(|c| eval(&c.body, &a)) {
                    continue;
                }
                let m = strategy.delta(n, x2).ok_or_else(|| {
                    format!(
                        "no move from node {n} on {} although the assumptions allow it",
                        props.format_inputs(x2)
                    )
                })?;
                if strategy.gamma_x(m) != x2 {
                    return Err(format!("node {m} does not read {}", props.format_inputs(x2)));
                }
                let step = Assignment::step((x, y), (x2, strategy.gamma_y(m)));
                if let Some(c) = sys_safety.iter().find(|c| !eval(&c.body, &step)) {
                    return Err(format!(
                        "safety `{}` broken from node {n} to node {m}",
                        c.body.display(props)
                    ));
                }
                report.edges += 1;
                out.push(m);
                if seen.insert(m) {
                    next_frontier.push(m);
                }
            }
            succ.insert(n, out);
        }
        if next_frontier.is_empty() {
            break;
        }
        report.depth_reached = d + 1;
        frontier = next_frontier;
    }
    // Nodes never expanded inside the depth bound keep an empty successor
    // list so the cycle check stays within explored plays.
    for &n in &seen {
        succ.entry(n).or_default();
    }
    report.nodes = seen.len();

    let env_live = spec.env_liveness_all();
    let goals: Vec<Formula> = if spec.sys_liveness.is_empty() {
        vec![Formula::True]
    } else {
        spec.sys_liveness.iter().map(|l| l.body.clone()).collect()
    };
    for (j, goal) in goals.iter().enumerate() {
        let avoid: BTreeSet<usize> = seen
            .iter()
            .copied()
            .filter(|&n| !state_holds(goal, strategy.gamma_x(n), strategy.gamma_y(n)))
            .collect();
        for comp in sccs(&succ, &avoid) {
            let cyclic = comp.len() > 1 || succ[&comp[0]].contains(&comp[0]);
            if !cyclic {
                continue;
            }
            let fair = env_live.iter().all(|e| {
                comp.iter()
                    .any(|&n| state_holds(&e.body, strategy.gamma_x(n), strategy.gamma_y(n)))
            });
            if fair {
                return Err(format!("fair cycle through nodes {comp:?} never reaches goal {j}"));
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Independent realizability check. The GR(1) objective is degeneralized with
// two round-robin counters into a max-parity game over priorities 0..=2 and
// solved with Zielonka's recursive algorithm. Priority 2 marks a completed
// round of system goals, 1 a completed round of environment assumptions.

struct Parity {
    /// true for nodes where the system moves
    sys: Vec<bool>,
    prio: Vec<u8>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Parity {
    fn attractor(&self, alive: &[bool], target: &[usize], sys_player: bool) -> Vec<bool> {
        let n = self.sys.len();
        let mut inside = vec![false; n];
        let mut count: Vec<usize> = (0..n)
            .map(|v| self.succ[v].iter().filter(|&&w| alive[w]).count())
            .collect();
        let mut stack = Vec::new();
        for &t in target {
            if alive[t] && !inside[t] {
                inside[t] = true;
                stack.push(t);
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &self.pred[w] {
                if !alive[v] || inside[v] {
                    continue;
                }
                let take = if self.sys[v] == sys_player {
                    true
                } else {
                    count[v] -= 1;
                    count[v] == 0
                };
                if take {
                    inside[v] = true;
                    stack.push(v);
                }
            }
        }
        inside
    }

    /// Winning region of the system within the trap `alive`.
    fn solve(&self, alive: &[bool]) -> Vec<bool> {
        let nodes: Vec<usize> = (0..alive.len()).filter(|&v| alive[v]).collect();
        if nodes.is_empty() {
            return vec![false; alive.len()];
        }
        let top = nodes.iter().map(|&v| self.prio[v]).max().unwrap();
        let sys_player = top % 2 == 0;
        let at_top: Vec<usize> = nodes.iter().copied().filter(|&v| self.prio[v] == top).collect();
        let a = self.attractor(alive, &at_top, sys_player);
        let rest: Vec<bool> = (0..alive.len()).map(|v| alive[v] && !a[v]).collect();
        let sys_win = self.solve(&rest);
        let opp: Vec<usize> = (0..alive.len())
            .filter(|&v| rest[v] && sys_win[v] != sys_player)
            .collect();
        if opp.is_empty() {
            return alive.iter().map(|&al| al && sys_player).collect();
        }
        let b = self.attractor(alive, &opp, !sys_player);
        let rest: Vec<bool> = (0..alive.len()).map(|v| alive[v] && !b[v]).collect();
        let sys_win = self.solve(&rest);
        (0..alive.len())
            .map(|v| alive[v] && if b[v] { !sys_player } else { sys_win[v] })
            .collect()
    }
}

pub fn parity_realizable(spec: &GR1Spec) -> bool {
    let props = &spec.props;
    let inputs = props.all_input_states();
    let outputs = props.all_output_states();
    let env_safety: Vec<&SafetyClause> = spec.env_safety().collect();
    let sys_safety = spec.sys_safety_all();
    let sys_init = spec.sys_init_all();
    let or_true = |v: Vec<Formula>| if v.is_empty() { vec![Formula::True] } else { v };
    let je = or_true(spec.env_liveness_all().into_iter().map(|l| l.body).collect());
    let js = or_true(spec.sys_liveness.iter().map(|l| l.body.clone()).collect());

    // environment nodes carry (x, y, system counter, environment counter);
    // system choice nodes hang off them and two sinks close dead ends
    let mut g = Parity { sys: vec![], prio: vec![], succ: vec![], pred: vec![] };
    let push = |g: &mut Parity, sys: bool, prio: u8| {
        g.sys.push(sys);
        g.prio.push(prio);
        g.succ.push(Vec::new());
        g.pred.push(Vec::new());
        g.sys.len() - 1
    };
    let sys_sink = push(&mut g, false, 0);
    let env_sink = push(&mut g, false, 1);
    type Key = (InputState, OutputState, usize, usize);
    let mut index: BTreeMap<Key, usize> = BTreeMap::new();
    let mut queue = Vec::new();
    let mut intern = |g: &mut Parity, queue: &mut Vec<(usize, Key)>, key: Key| {
        if let Some(&v) = index.get(&key) {
            return v;
        }
        let (x, y, j, i) = key;
        let hit_s = state_holds(&js[j], x, y);
        let hit_e = state_holds(&je[i], x, y);
        let prio = if hit_s && j + 1 == js.len() {
            2
        } else if hit_e && i + 1 == je.len() {
            1
        } else {
            0
        };
        let v = push(g, false, prio);
        index.insert(key, v);
        queue.push((v, key));
        v
    };
    let mut roots = Vec::new();
    for &x in &inputs {
        if !state_holds(&spec.env_init, x, OutputState::EMPTY) {
            continue;
        }
        let starts: Vec<usize> = outputs
            .iter()
            .filter(|&&y| state_holds(&sys_init, x, y))
            .map(|&y| intern(&mut g, &mut queue, (x, y, 0, 0)))
            .collect();
        roots.push(starts);
    }
    let mut edges = Vec::new();
    while let Some((v, (x, y, j, i))) = queue.pop() {
        let j2 = if state_holds(&js[j], x, y) { (j + 1) % js.len() } else { j };
        let i2 = if state_holds(&je[i], x, y) { (i + 1) % je.len() } else { i };
        let mut any_env = false;
        for &x2 in &inputs {
            let a = Assignment::step((x, y), (x2, OutputState::EMPTY));
            if !env_safety.iter().all(|c| eval(&c.body, &a)) {
                continue;
            }
            any_env = true;
            let choice = push(&mut g, true, 0);
            edges.push((v, choice));
            let mut any_sys = false;
            for &y2 in &outputs {
                let step = Assignment::step((x, y), (x2, y2));
                if sys_safety.iter().all(|c| eval(&c.body, &step)) {
                    any_sys = true;
                    let w = intern(&mut g, &mut queue, (x2, y2, j2, i2));
                    edges.push((choice, w));
                }
            }
            if !any_sys {
                edges.push((choice, env_sink));
            }
        }
        if !any_env {
            edges.push((v, sys_sink));
        }
    }
    edges.push((sys_sink, sys_sink));
    edges.push((env_sink, env_sink));
    for (a, b) in edges {
        g.succ[a].push(b);
        g.pred[b].push(a);
    }
    let win = g.solve(&vec![true; g.sys.len()]);
    roots.iter().all(|starts| starts.iter().any(|&v| win[v]))
}

// ---------------------------------------------------------------------------
// Fixture helpers.

pub fn run_fixture(f: &Fixture, seed: u64) -> ExecutionReport {
    let spec = parse_spec(f.spec).unwrap();
    let ws = Workspace::parse(f.workspace).unwrap();
    let scenario = Scenario::parse(f.scenario, &spec.props).unwrap();
    let mut cfg = ExecConfig {
        adjacency: AdjacencyModel::parse(f.adjacency, &spec.props).unwrap(),
        ..ExecConfig::default()
    };
    cfg.repair.rng_seed = seed;
    if let Some(n) = scenario.max_steps {
        cfg.max_steps = n;
    }
    run_execution_loop(&spec, &ws, &scenario, &cfg).unwrap()
}

/// The example1 spec after relaxing the observed obstacle move.
pub fn example1_relaxed() -> GR1Spec {
    let spec = parse_spec(gr1_repair::fixtures::EXAMPLE1.spec).unwrap();
    let t = parse_triplet(
        &spec.props,
        "{robot_assm,obs_wlkwy} | {move_1} | {robot_assm,obs_aisle}",
    )
    .unwrap();
    let report = compile_monitor(&spec).check_assumptions(&t, 0);
    relax(&spec, &report).unwrap().0
}

/// Relaxed spec at a fixture's first violation.
pub fn relaxed_at_first_violation(f: &Fixture) -> GR1Spec {
    let spec = parse_spec(f.spec).unwrap();
    let report = run_fixture(f, 0);
    let v = report.violations.first().expect("fixture has a violation");
    let m = compile_monitor(&spec);
    let r = m.check_assumptions(&v.triplet, 0);
    let goal = v.goal_before;
    let r = gr1_repair::monitor::ViolationReport {
        active_goal_index: goal,
        ..r
    };
    relax(&spec, &r).unwrap().0
}
