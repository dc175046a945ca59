//! Text front end: formula parser, SPEC file parser and printer, and the
//! `{a,b}` state / triplet syntax used by the CLI.

use std::fmt::Write as _;

use crate::formula::Formula;
use crate::props::{InputState, OutputState, PropRef, PropSet, PropositionTable};
use crate::semantics::Triplet;
use crate::spec::{
    generate_idle_clause, generate_skill_clauses, Branch, GR1Spec, LivenessClause, SafetyClause,
    Skill, SpecError,
};

fn err(line: usize, column: usize, message: impl Into<String>) -> SpecError {
    SpecError::Parse {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    End,
}

fn lex(text: &str, line: usize, offset: usize) -> Result<Vec<(Tok, usize)>, SpecError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = offset + i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = match c {
            '!' => (Tok::Not, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Implies, 2),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => (Tok::Iff, 3),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = chars[i..]
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                    .count();
                (Tok::Ident(chars[i..i + len].iter().collect()), len)
            }
            other => return Err(err(line, col, format!("unexpected character `{other}`"))),
        };
        out.push((tok, col));
        i += len;
    }
    out.push((Tok::End, offset + chars.len() + 1));
    Ok(out)
}

/// Where a formula appears; decides which `next` atoms are legal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaContext {
    /// Initial conditions and liveness bodies: no `next`.
    State,
    /// Environment safety: `next` over inputs only.
    EnvSafety,
    /// System safety: `next` over inputs and outputs.
    SysSafety,
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    table: &'a PropositionTable,
    ctx: FormulaContext,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SpecError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(err(self.line, self.col(), format!("expected {what}")))
        }
    }

    fn iff(&mut self) -> Result<Formula, SpecError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            lhs = Formula::iff(lhs, self.implies()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, SpecError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            return Ok(Formula::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, SpecError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, SpecError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SpecError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        self.atom()
    }

    fn prop(&mut self) -> Result<PropRef, SpecError> {
        let col = self.col();
        match self.bump() {
            Tok::Ident(name) => self
                .table
                .lookup(&name)
                .ok_or_else(|| err(self.line, col, format!("undeclared proposition `{name}`"))),
            _ => Err(err(self.line, col, "expected a proposition")),
        }
    }

    fn atom(&mut self) -> Result<Formula, SpecError> {
        let col = self.col();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) if name == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) if name == "next" => {
                self.bump();
                self.expect(Tok::LParen, "`(` after next")?;
                let p = self.prop()?;
                self.expect(Tok::RParen, "`)`")?;
                match (self.ctx, p) {
                    (FormulaContext::State, _) => {
                        Err(err(self.line, col, "next() is not allowed here"))
                    }
                    (FormulaContext::EnvSafety, PropRef::Output(_)) => Err(err(
                        self.line,
                        col,
                        "environment clauses may not read the next value of an output",
                    )),
                    _ => Ok(Formula::Next(p)),
                }
            }
            Tok::Ident(_) => Ok(Formula::Atom(self.prop()?)),
            _ => Err(err(self.line, col, "expected a formula")),
        }
    }
}

/// Parses one formula. `line` and `offset` only position error messages.
pub fn parse_formula_at(
    text: &str,
    table: &PropositionTable,
    ctx: FormulaContext,
    line: usize,
    offset: usize,
) -> Result<Formula, SpecError> {
    let mut p = Parser {
        toks: lex(text, line, offset)?,
        pos: 0,
        line,
        table,
        ctx,
    };
    let f = p.iff()?;
    if *p.peek() != Tok::End {
        return Err(err(line, p.col(), "unexpected trailing input"));
    }
    Ok(f)
}

pub fn parse_formula(
    text: &str,
    table: &PropositionTable,
    ctx: FormulaContext,
) -> Result<Formula, SpecError> {
    parse_formula_at(text, table, ctx, 1, 0)
}

fn parse_set_at(
    text: &str,
    line: usize,
    offset: usize,
    mut resolve: impl FnMut(&str, usize) -> Result<usize, SpecError>,
) -> Result<PropSet, SpecError> {
    let trimmed = text.trim();
    let lead = offset + (text.len() - text.trim_start().len());
    let inner = trimmed
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| err(line, lead + 1, "expected a set like {a,b}"))?;
    let mut set = PropSet::EMPTY;
    let mut col = lead + 2;
    for part in inner.split(',') {
        let name = part.trim();
        let at = col + (part.len() - part.trim_start().len());
        col += part.len() + 1;
        if name.is_empty() {
            if inner.trim().is_empty() {
                break;
            }
            return Err(err(line, at, "empty name in set"));
        }
        set = set.with(resolve(name, at)?);
    }
    Ok(set)
}

fn input_set(table: &PropositionTable, text: &str, line: usize, offset: usize) -> Result<InputState, SpecError> {
    parse_set_at(text, line, offset, |name, col| {
        table
            .input_index(name)
            .ok_or_else(|| err(line, col, format!("`{name}` is not a declared input")))
    })
}

fn output_set(table: &PropositionTable, text: &str, line: usize, offset: usize) -> Result<OutputState, SpecError> {
    parse_set_at(text, line, offset, |name, col| {
        table
            .output_index(name)
            .ok_or_else(|| err(line, col, format!("`{name}` is not a declared output")))
    })
}

/// Parses a full input state; every mutex group must have exactly one member.
pub fn parse_input_state(table: &PropositionTable, text: &str) -> Result<InputState, SpecError> {
    let s = input_set(table, text, 1, 0)?;
    if !table.respects_mutex(s) {
        return Err(err(1, 1, format!("input state {} violates a mutex group", table.format_inputs(s))));
    }
    Ok(s)
}

pub fn parse_output_state(table: &PropositionTable, text: &str) -> Result<OutputState, SpecError> {
    output_set(table, text, 1, 0)
}

/// Parses `{inputs} | {outputs} | {next inputs}`.
pub fn parse_triplet(table: &PropositionTable, line_text: &str) -> Result<Triplet, SpecError> {
    let parts: Vec<&str> = line_text.split('|').collect();
    if parts.len() != 3 {
        return Err(err(1, 1, "expected `{inputs} | {outputs} | {next inputs}`"));
    }
    let mut offset = 0;
    let mut cols = Vec::new();
    for p in &parts {
        cols.push(offset);
        offset += p.len() + 1;
    }
    let x_in = input_set(table, parts[0], 1, cols[0])?;
    let y_out = output_set(table, parts[1], 1, cols[1])?;
    let x_in_next = input_set(table, parts[2], 1, cols[2])?;
    for (s, c) in [(x_in, cols[0]), (x_in_next, cols[2])] {
        if !table.respects_mutex(s) {
            return Err(err(1, c + 1, format!("input state {} violates a mutex group", table.format_inputs(s))));
        }
    }
    Ok(Triplet {
        x_in,
        y_out,
        x_in_next,
    })
}

pub fn format_triplet(table: &PropositionTable, t: &Triplet) -> String {
    format!(
        "{} | {} | {}",
        table.format_inputs(t.x_in),
        table.format_outputs(t.y_out),
        table.format_inputs(t.x_in_next)
    )
}

const SECTIONS: [&str; 7] = [
    "ENV_INIT",
    "SYS_INIT",
    "ENV_SAFETY_HARD",
    "ENV_SAFETY_SKILL",
    "SYS_SAFETY",
    "ENV_LIVENESS",
    "SYS_LIVENESS",
];

struct Line<'a> {
    number: usize,
    /// Column of the first character of `text`.
    offset: usize,
    text: &'a str,
}

struct Section<'a> {
    header: String,
    line: usize,
    lines: Vec<Line<'a>>,
}

fn split_sections(text: &str) -> Result<Vec<Section<'_>>, SpecError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let offset = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let header = rest
                .strip_suffix(']')
                .ok_or_else(|| err(number, offset + 1, "unterminated section header"))?;
            sections.push(Section {
                header: header.trim().to_string(),
                line: number,
                lines: Vec::new(),
            });
            continue;
        }
        match sections.last_mut() {
            Some(s) => s.lines.push(Line {
                number,
                offset,
                text: trimmed,
            }),
            None => return Err(err(number, offset + 1, "content before the first section header")),
        }
    }
    Ok(sections)
}

fn parse_skill(table: &PropositionTable, name: &str, section: &Section) -> Result<Skill, SpecError> {
    let mut chain = None;
    let mut branches = Vec::new();
    for l in &section.lines {
        let (key, value) = l
            .text
            .split_once(':')
            .ok_or_else(|| err(l.number, l.offset + 1, "expected `chain:` or `branch:`"))?;
        let value_offset = l.offset + key.len() + 1;
        match key.trim() {
            "chain" => {
                if chain.is_some() {
                    return Err(err(l.number, l.offset + 1, "duplicate chain"));
                }
                let mut states = Vec::new();
                let mut col = value_offset;
                for part in value.split("->") {
                    states.push(input_set(table, part, l.number, col)?);
                    col += part.len() + 2;
                }
                chain = Some(states);
            }
            "branch" => {
                let (from, to) = value
                    .split_once("->")
                    .ok_or_else(|| err(l.number, value_offset + 1, "expected `branch: k -> {..}`"))?;
                let from: usize = from
                    .trim()
                    .parse()
                    .map_err(|_| err(l.number, value_offset + 1, "branch index must be a number"))?;
                let to_offset = value_offset + value.find("->").unwrap_or(0) + 2;
                branches.push(Branch {
                    from,
                    to: input_set(table, to, l.number, to_offset)?,
                });
            }
            other => {
                return Err(err(l.number, l.offset + 1, format!("unknown skill field `{other}`")))
            }
        }
    }
    let chain = chain.ok_or_else(|| err(section.line, 1, format!("skill `{name}` has no chain")))?;
    let skill = Skill {
        name: name.to_string(),
        chain,
        branches,
    };
    skill
        .validate(table)
        .map_err(|e| err(section.line, 1, e.to_string()))?;
    Ok(skill)
}

/// Parses a SPEC file and expands skill chains into environment clauses.
pub fn parse_spec(text: &str) -> Result<GR1Spec, SpecError> {
    let sections = split_sections(text)?;
    let mut table = PropositionTable::new();
    let mut seen: Vec<&str> = Vec::new();
    for s in &sections {
        let h = s.header.as_str();
        if !h.starts_with("SKILL ") && seen.contains(&h) {
            return Err(err(s.line, 1, format!("duplicate section [{h}]")));
        }
        seen.push(h);
        let known = matches!(h, "INPUT" | "MUTEX" | "OUTPUT") || SECTIONS.contains(&h) || h.starts_with("SKILL ");
        if !known {
            return Err(err(s.line, 1, format!("unknown section [{h}]")));
        }
    }
    let find = |h: &str| sections.iter().find(|s| s.header == h);
    let as_parse = |l: &Line, e: SpecError| match e {
        e @ SpecError::Parse { .. } => e,
        other => err(l.number, l.offset + 1, other.to_string()),
    };

    let inputs = find("INPUT").ok_or_else(|| err(1, 1, "missing [INPUT] section"))?;
    for l in &inputs.lines {
        let (name, tag) = l
            .text
            .split_once(':')
            .ok_or_else(|| err(l.number, l.offset + 1, "expected `name : c|u`"))?;
        let controllable = match tag.trim() {
            "c" => true,
            "u" => false,
            _ => return Err(err(l.number, l.offset + name.len() + 2, "tag must be `c` or `u`")),
        };
        table
            .add_input(name.trim(), controllable)
            .map_err(|e| as_parse(l, e.into()))?;
    }
    if let Some(mutex) = find("MUTEX") {
        for l in &mutex.lines {
            let names: Vec<&str> = l.text.split(',').map(str::trim).collect();
            table.add_mutex_group(&names).map_err(|e| as_parse(l, e.into()))?;
        }
    }
    if let Some(outputs) = find("OUTPUT") {
        for l in &outputs.lines {
            table.add_output(l.text).map_err(|e| as_parse(l, e.into()))?;
        }
    }

    let mut spec = GR1Spec::new(table);
    for s in sections.iter().filter(|s| s.header.starts_with("SKILL ")) {
        let name = s.header["SKILL ".len()..].trim();
        if spec.props.output_index(name).is_none() {
            return Err(err(s.line, 1, format!("skill `{name}` is not declared in [OUTPUT]")));
        }
        if spec.skill(name).is_some() {
            return Err(err(s.line, 1, format!("skill `{name}` declared twice")));
        }
        let skill = parse_skill(&spec.props, name, s)?;
        spec.skills.push(skill);
    }
    for name in spec.props.outputs() {
        if spec.skill(name).is_none() {
            return Err(err(1, 1, format!("output `{name}` has no [SKILL {name}] section")));
        }
    }

    let lines_of = |h: &str| find(h).map(|s| s.lines.as_slice()).unwrap_or(&[]);
    let formula = |l: &Line, ctx| parse_formula_at(l.text, &spec.props, ctx, l.number, l.offset);
    let init = |h: &str| -> Result<Formula, SpecError> {
        let parts = lines_of(h)
            .iter()
            .map(|l| formula(l, FormulaContext::State))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Formula::conj(parts))
    };
    let env_init = init("ENV_INIT")?;
    let sys_init = init("SYS_INIT")?;
    let safety = |h: &str, ctx, make: fn(Formula) -> SafetyClause| {
        lines_of(h)
            .iter()
            .map(|l| formula(l, ctx).map(make))
            .collect::<Result<Vec<_>, _>>()
    };
    let env_safety_hard = safety("ENV_SAFETY_HARD", FormulaContext::EnvSafety, SafetyClause::hard)?;
    let sys_safety = safety("SYS_SAFETY", FormulaContext::SysSafety, SafetyClause::system)?;
    let liveness = |h: &str| {
        lines_of(h)
            .iter()
            .map(|l| formula(l, FormulaContext::State).map(|body| LivenessClause { body }))
            .collect::<Result<Vec<_>, _>>()
    };
    let env_liveness = liveness("ENV_LIVENESS")?;
    let sys_liveness = liveness("SYS_LIVENESS")?;

    // Tagged skill clauses replace generation for their skill; untagged ones
    // are extra clauses owned by the single output they mention.
    let mut skill_clauses = Vec::new();
    let mut tagged: Vec<Option<String>> = Vec::new();
    for l in lines_of("ENV_SAFETY_SKILL") {
        let (tag, body_text, body_offset) = match l.text.strip_prefix('@') {
            Some(rest) => {
                let tag_len = rest
                    .find(char::is_whitespace)
                    .ok_or_else(|| err(l.number, l.offset + 1, "tag without a clause"))?;
                let tag = &rest[..tag_len];
                let body = &rest[tag_len..];
                (Some(tag), body, l.offset + 1 + tag_len)
            }
            None => (None, l.text, l.offset),
        };
        let body = parse_formula_at(body_text, &spec.props, FormulaContext::EnvSafety, l.number, body_offset)?;
        let owner = match tag {
            Some("idle") => None,
            Some(name) => {
                if spec.skill(name).is_none() {
                    return Err(err(l.number, l.offset + 1, format!("no skill named `{name}`")));
                }
                Some(name.to_string())
            }
            None => {
                let outs = body.outputs_mentioned();
                if outs.len() != 1 {
                    return Err(err(
                        l.number,
                        l.offset + 1,
                        "skill clause must mention exactly one output",
                    ));
                }
                let y = outs.iter().next().expect("one output");
                Some(spec.props.outputs()[y].clone())
            }
        };
        if let Some(t) = tag {
            let key = if t == "idle" { None } else { Some(t.to_string()) };
            if !tagged.contains(&key) {
                tagged.push(key);
            }
        }
        skill_clauses.push(SafetyClause::skill(body, owner.as_deref()));
    }
    for skill in &spec.skills {
        if !tagged.contains(&Some(skill.name.clone())) {
            skill_clauses.extend(generate_skill_clauses(skill, &spec.props)?);
        }
    }
    if !tagged.contains(&None) {
        skill_clauses.push(generate_idle_clause(&spec.props));
    }

    spec.env_init = env_init;
    spec.sys_init = sys_init;
    spec.env_safety_hard = env_safety_hard;
    spec.env_safety_skill = skill_clauses;
    spec.sys_safety = sys_safety;
    spec.env_liveness = env_liveness;
    spec.sys_liveness = sys_liveness;
    spec.validate()?;
    Ok(spec)
}

pub fn print_skill(spec_props: &PropositionTable, skill: &Skill) -> String {
    let mut out = String::new();
    let chain: Vec<String> = skill.chain.iter().map(|s| spec_props.format_inputs(*s)).collect();
    let _ = writeln!(out, "[SKILL {}]", skill.name);
    let _ = writeln!(out, "chain: {}", chain.join(" -> "));
    for b in &skill.branches {
        let _ = writeln!(out, "branch: {} -> {}", b.from, spec_props.format_inputs(b.to));
    }
    out
}

/// Canonical text; every section header is always present and every skill
/// clause is written with its owner tag so that reparsing is exact.
pub fn print_spec(spec: &GR1Spec) -> String {
    let t = &spec.props;
    let mut out = String::new();
    out.push_str("[INPUT]\n");
    for p in t.inputs() {
        let _ = writeln!(out, "{} : {}", p.name, if p.controllable { "c" } else { "u" });
    }
    out.push_str("\n[MUTEX]\n");
    for g in t.mutex_groups() {
        let names: Vec<&str> = g.iter().map(|&i| t.inputs()[i].name.as_str()).collect();
        let _ = writeln!(out, "{}", names.join(", "));
    }
    out.push_str("\n[OUTPUT]\n");
    for y in t.outputs() {
        let _ = writeln!(out, "{y}");
    }
    for s in &spec.skills {
        out.push('\n');
        out.push_str(&print_skill(t, s));
    }
    let formula_lines = |out: &mut String, header: &str, items: &mut dyn Iterator<Item = String>| {
        let _ = writeln!(out, "\n[{header}]");
        for line in items {
            let _ = writeln!(out, "{line}");
        }
    };
    let init = |f: &Formula| -> Vec<String> {
        if *f == Formula::True {
            Vec::new()
        } else {
            vec![f.display(t).to_string()]
        }
    };
    formula_lines(&mut out, "ENV_INIT", &mut init(&spec.env_init).into_iter());
    formula_lines(&mut out, "SYS_INIT", &mut init(&spec.sys_init).into_iter());
    formula_lines(
        &mut out,
        "ENV_SAFETY_HARD",
        &mut spec.env_safety_hard.iter().map(|c| c.body.display(t).to_string()),
    );
    formula_lines(
        &mut out,
        "ENV_SAFETY_SKILL",
        &mut spec.env_safety_skill.iter().map(|c| {
            format!(
                "@{} {}",
                c.source_skill.as_deref().unwrap_or("idle"),
                c.body.display(t)
            )
        }),
    );
    formula_lines(
        &mut out,
        "SYS_SAFETY",
        &mut spec.sys_safety.iter().map(|c| c.body.display(t).to_string()),
    );
    formula_lines(
        &mut out,
        "ENV_LIVENESS",
        &mut spec.env_liveness.iter().map(|c| c.body.display(t).to_string()),
    );
    formula_lines(
        &mut out,
        "SYS_LIVENESS",
        &mut spec.sys_liveness.iter().map(|c| c.body.display(t).to_string()),
    );
    out
}
