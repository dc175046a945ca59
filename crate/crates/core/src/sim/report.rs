use std::fmt::Write as _;

use serde::Serialize;

use crate::parse::format_triplet;
use crate::props::PropositionTable;
use crate::spec::Origin;

use super::exec::{ExecutionReport, Terminal, ViolationRecord};

#[derive(Serialize)]
struct JsonRelaxation<'a> {
    clause: usize,
    origin: &'static str,
    disjunct: &'a str,
}

#[derive(Serialize)]
struct JsonSuggestion {
    name: String,
    procedure: &'static str,
    chain: Vec<String>,
}

#[derive(Serialize)]
struct JsonEvent<'a> {
    step: usize,
    violated_clauses: &'a [String],
    relaxations: Vec<JsonRelaxation<'a>>,
    suggestions: Vec<JsonSuggestion>,
    realizable: bool,
}

pub fn origin_label(o: Origin) -> &'static str {
    match o {
        Origin::Hard => "hard",
        Origin::Skill => "skill",
        Origin::System => "system",
    }
}

/// One `step N in={..} out={..} goal=G` line per step.
pub fn format_trace(report: &ExecutionReport, props: &PropositionTable) -> String {
    let mut out = String::new();
    for e in &report.trace {
        let _ = writeln!(
            out,
            "step {} in={} out={} goal={}",
            e.step,
            props.format_inputs(e.input),
            props.format_outputs(e.output),
            e.goal
        );
    }
    out
}

fn describe(v: &ViolationRecord, props: &PropositionTable, out: &mut String) {
    let _ = writeln!(out, "step {}: violation on {}", v.step, format_triplet(props, &v.triplet));
    for c in &v.violated {
        let _ = writeln!(out, "  violated: {c}");
    }
    for (r, d) in v.relaxations.iter().zip(&v.added) {
        let _ = writeln!(out, "  relaxed clause {} ({}) with: {d}", r.clause_index, origin_label(r.origin));
    }
    let _ = writeln!(out, "  relaxed spec realizable: {}", v.relaxed_realizable);
    if !v.relaxed_realizable {
        let _ = writeln!(out, "  repair iterations: {}", v.repair_iterations);
    }
    for s in &v.suggestions {
        let chain: Vec<String> = s.chain().iter().map(|c| props.format_inputs(*c)).collect();
        let _ = writeln!(
            out,
            "  suggested {} ({}): {}",
            s.name(),
            s.procedure.label(),
            chain.join(" -> ")
        );
    }
    if v.realizable {
        let _ = writeln!(
            out,
            "  resumed at {} pursuing goal {}",
            v.resumed_input.map(|x| props.format_inputs(x)).unwrap_or_default(),
            v.goal_after.unwrap_or(0)
        );
    } else {
        let _ = writeln!(out, "  unrecoverable");
    }
}

// Repair only appends outputs, so the final table prints every recorded state.
pub fn format_events(report: &ExecutionReport) -> String {
    let props = &report.final_spec.props;
    let mut out = String::new();
    for v in &report.violations {
        describe(v, props, &mut out);
    }
    let _ = writeln!(
        out,
        "terminal: {}",
        match report.terminal {
            Terminal::Running => "running",
            Terminal::Unrecoverable => "unrecoverable",
        }
    );
    out
}

/// One JSON object per violation, newline separated.
pub fn format_json_events(report: &ExecutionReport) -> String {
    let props = &report.final_spec.props;
    let mut out = String::new();
    for v in &report.violations {
        let ev = JsonEvent {
            step: v.step,
            violated_clauses: &v.violated,
            relaxations: v
                .relaxations
                .iter()
                .zip(&v.added)
                .map(|(r, d)| JsonRelaxation {
                    clause: r.clause_index,
                    origin: origin_label(r.origin),
                    disjunct: d,
                })
                .collect(),
            suggestions: v
                .suggestions
                .iter()
                .map(|s| JsonSuggestion {
                    name: s.name().to_string(),
                    procedure: s.procedure.label(),
                    chain: s.chain().iter().map(|c| props.format_inputs(*c)).collect(),
                })
                .collect(),
            realizable: v.realizable,
        };
        out.push_str(&serde_json::to_string(&ev).expect("plain data serializes"));
        out.push('\n');
    }
    out
}
