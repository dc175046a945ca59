//! Boolean formulas over current propositions and next-step atoms.

use std::fmt;

use crate::props::{PropRef, PropSet, PropositionTable};

/// Clause body AST. `Next` reads the proposition's value at the next step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(PropRef),
    Next(PropRef),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `True` when empty.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `False` when empty.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn literal(prop: PropRef, positive: bool) -> Formula {
        if positive {
            Formula::Atom(prop)
        } else {
            Formula::not(Formula::Atom(prop))
        }
    }

    pub fn next_literal(prop: PropRef, positive: bool) -> Formula {
        if positive {
            Formula::Next(prop)
        } else {
            Formula::not(Formula::Next(prop))
        }
    }

    /// Calls `f(prop, is_next)` on every atom occurrence, left to right.
    pub fn visit_atoms(&self, f: &mut impl FnMut(PropRef, bool)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p) => f(*p, false),
            Formula::Next(p) => f(*p, true),
            Formula::Not(a) => a.visit_atoms(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    pub fn atoms(&self) -> Vec<(PropRef, bool)> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |p, n| {
            if !out.contains(&(p, n)) {
                out.push((p, n));
            }
        });
        out
    }

    pub fn has_next(&self) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |_, n| found |= n);
        found
    }

    pub fn has_next_output(&self) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |p, n| found |= n && matches!(p, PropRef::Output(_)));
        found
    }

    /// Output propositions mentioned anywhere in the formula.
    pub fn outputs_mentioned(&self) -> PropSet {
        let mut acc = PropSet::EMPTY;
        self.visit_atoms(&mut |p, _| {
            if let PropRef::Output(i) = p {
                acc = acc.with(i);
            }
        });
        acc
    }

    /// Input propositions mentioned at either step.
    pub fn inputs_mentioned(&self) -> PropSet {
        let mut acc = PropSet::EMPTY;
        self.visit_atoms(&mut |p, _| {
            if let PropRef::Input(i) = p {
                acc = acc.with(i);
            }
        });
        acc
    }

    /// Top-level disjuncts of a left- or right-nested `Or` spine.
    pub fn disjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            if let Formula::Or(a, b) = f {
                walk(a, out);
                walk(b, out);
            } else {
                out.push(f);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Next(_) => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Rewrites proposition references, e.g. after outputs are renumbered.
    pub fn map_props(&self, f: &impl Fn(PropRef) -> PropRef) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(p) => Formula::Atom(f(*p)),
            Formula::Next(p) => Formula::Next(f(*p)),
            Formula::Not(a) => Formula::not(a.map_props(f)),
            Formula::And(a, b) => Formula::and(a.map_props(f), b.map_props(f)),
            Formula::Or(a, b) => Formula::or(a.map_props(f), b.map_props(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_props(f), b.map_props(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_props(f), b.map_props(f)),
        }
    }

    pub fn display<'a>(&'a self, table: &'a PropositionTable) -> Display<'a> {
        Display {
            formula: self,
            table,
        }
    }
}

/// Printer for a formula; operator precedence `!` > `&` > `|` > `->` > `<->`,
/// with `&`, `|` and `<->` left-associative and `->` right-associative.
pub struct Display<'a> {
    formula: &'a Formula,
    table: &'a PropositionTable,
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        _ => 5,
    }
}

impl Display<'_> {
    fn write(&self, f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |out: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, right_assoc: bool| {
            let p = precedence(f);
            let (left_min, right_min) = if right_assoc { (p + 1, p) } else { (p, p + 1) };
            self.write_at(a, left_min, out)?;
            write!(out, " {op} ")?;
            self.write_at(b, right_min, out)
        };
        match f {
            Formula::True => out.write_str("true"),
            Formula::False => out.write_str("false"),
            Formula::Atom(p) => out.write_str(self.table.name(*p)),
            Formula::Next(p) => write!(out, "next({})", self.table.name(*p)),
            Formula::Not(a) => {
                out.write_str("!")?;
                self.write_at(a, 5, out)
            }
            Formula::And(a, b) => binary(out, a, "&", b, false),
            Formula::Or(a, b) => binary(out, a, "|", b, false),
            Formula::Implies(a, b) => binary(out, a, "->", b, true),
            Formula::Iff(a, b) => binary(out, a, "<->", b, false),
        }
    }

    fn write_at(&self, f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if precedence(f) < min {
            out.write_str("(")?;
            self.write(f, out)?;
            out.write_str(")")
        } else {
            self.write(f, out)
        }
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.formula, out)
    }
}
