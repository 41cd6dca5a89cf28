//! Register constraints: the guard language of transitions.
//!
//! A constraint relates the current register valuation `u`, the input datum
//! `d` and the successor valuation `v`. The stored form uses only `true`,
//! three equality atoms, negation and conjunction; disjunction and the `!=`
//! atoms of the surface syntax are desugared at parse time.

use std::fmt;

use crate::data::{DataValue, Datum, Valuation};

/// The constraint AST. Register indices are 0-based internally; the surface
/// syntax uses 1-based names (`r1`, `r2`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constraint {
    True,
    /// The input datum equals the current value of register `i`: `in == r<i+1>`.
    CurEq(usize),
    /// The next value of register `i` equals the current value of register
    /// `j`: `r<i+1>' == r<j+1>`.
    NextEqReg(usize, usize),
    /// The next value of register `i` equals the input datum: `r<i+1>' == in`.
    NextEqInput(usize),
    Not(Box<Constraint>),
    And(Box<Constraint>, Box<Constraint>),
}

impl Constraint {
    pub fn not(c: Constraint) -> Constraint {
        Constraint::Not(Box::new(c))
    }

    pub fn and(l: Constraint, r: Constraint) -> Constraint {
        Constraint::And(Box::new(l), Box::new(r))
    }

    /// `(l | r)` desugared to `!(!l & !r)`.
    pub fn or(l: Constraint, r: Constraint) -> Constraint {
        Constraint::not(Constraint::and(Constraint::not(l), Constraint::not(r)))
    }

    /// The satisfaction relation: does `(current, datum, next)` satisfy the
    /// constraint? Note that ⊥ compares equal only to ⊥.
    pub fn eval(&self, current: &Valuation, datum: Datum, next: &Valuation) -> bool {
        match self {
            Constraint::True => true,
            Constraint::CurEq(i) => current.get(*i) == DataValue::Datum(datum),
            Constraint::NextEqReg(i, j) => next.get(*i) == current.get(*j),
            Constraint::NextEqInput(i) => next.get(*i) == DataValue::Datum(datum),
            Constraint::Not(c) => !c.eval(current, datum, next),
            Constraint::And(l, r) => {
                l.eval(current, datum, next) && r.eval(current, datum, next)
            }
        }
    }

    /// The largest register index mentioned, if any.
    pub fn max_register(&self) -> Option<usize> {
        match self {
            Constraint::True => None,
            Constraint::CurEq(i) | Constraint::NextEqInput(i) => Some(*i),
            Constraint::NextEqReg(i, j) => Some(*i.max(j)),
            Constraint::Not(c) => c.max_register(),
            Constraint::And(l, r) => l.max_register().max(r.max_register()),
        }
    }

    /// Disjunctive normal form over the six literal kinds. Contradictory
    /// conjuncts are dropped. The empty conjunct means `true`; an empty
    /// disjunction means `false`.
    pub fn to_dnf(&self) -> Dnf {
        Dnf {
            conjuncts: dnf_branches(self, true),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::True => write!(f, "true"),
            Constraint::CurEq(i) => write!(f, "in == r{}", i + 1),
            Constraint::NextEqReg(i, j) => write!(f, "r{}' == r{}", i + 1, j + 1),
            Constraint::NextEqInput(i) => write!(f, "r{}' == in", i + 1),
            // Negated atoms print as the `!=` sugar, other negations as `!(...)`.
            Constraint::Not(c) => match c.as_ref() {
                Constraint::CurEq(i) => write!(f, "in != r{}", i + 1),
                Constraint::NextEqReg(i, j) => write!(f, "r{}' != r{}", i + 1, j + 1),
                Constraint::NextEqInput(i) => write!(f, "r{}' != in", i + 1),
                other => write!(f, "!({other})"),
            },
            Constraint::And(l, r) => write!(f, "({l} & {r})"),
        }
    }
}

/// One conjunction of literals. Each literal carries a polarity flag:
/// `true` for the equality, `false` for its negation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Conjunct {
    /// `(i, polarity)`: input vs. current register `i`.
    pub cur: Vec<(usize, bool)>,
    /// `(i, j, polarity)`: next register `i` vs. current register `j`.
    pub next_reg: Vec<(usize, usize, bool)>,
    /// `(i, polarity)`: next register `i` vs. input.
    pub next_input: Vec<(usize, bool)>,
}

impl Conjunct {
    fn push(&mut self, lit: Literal) -> bool {
        match lit {
            Literal::Cur(i, p) => {
                if self.cur.contains(&(i, !p)) {
                    return false;
                }
                if !self.cur.contains(&(i, p)) {
                    self.cur.push((i, p));
                }
            }
            Literal::NextReg(i, j, p) => {
                if self.next_reg.contains(&(i, j, !p)) {
                    return false;
                }
                if !self.next_reg.contains(&(i, j, p)) {
                    self.next_reg.push((i, j, p));
                }
            }
            Literal::NextInput(i, p) => {
                if self.next_input.contains(&(i, !p)) {
                    return false;
                }
                if !self.next_input.contains(&(i, p)) {
                    self.next_input.push((i, p));
                }
            }
        }
        true
    }

    /// Do the literals about the current valuation hold for `(current, datum)`?
    pub fn cur_satisfied(&self, current: &Valuation, datum: Datum) -> bool {
        self.cur
            .iter()
            .all(|&(i, pos)| (current.get(i) == DataValue::Datum(datum)) == pos)
    }
}

#[derive(Debug, Clone, Copy)]
enum Literal {
    Cur(usize, bool),
    NextReg(usize, usize, bool),
    NextInput(usize, bool),
}

/// A disjunction of [`Conjunct`]s.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dnf {
    pub conjuncts: Vec<Conjunct>,
}

fn dnf_branches(c: &Constraint, positive: bool) -> Vec<Conjunct> {
    match (c, positive) {
        (Constraint::True, true) => vec![Conjunct::default()],
        (Constraint::True, false) => vec![],
        (Constraint::CurEq(i), p) => singleton(Literal::Cur(*i, p)),
        (Constraint::NextEqReg(i, j), p) => singleton(Literal::NextReg(*i, *j, p)),
        (Constraint::NextEqInput(i), p) => singleton(Literal::NextInput(*i, p)),
        (Constraint::Not(inner), p) => dnf_branches(inner, !p),
        (Constraint::And(l, r), true) => {
            let left = dnf_branches(l, true);
            let right = dnf_branches(r, true);
            let mut out = Vec::new();
            for cl in &left {
                for cr in &right {
                    if let Some(merged) = merge(cl, cr) {
                        out.push(merged);
                    }
                }
            }
            out
        }
        // ¬(l ∧ r) = ¬l ∨ ¬r
        (Constraint::And(l, r), false) => {
            let mut out = dnf_branches(l, false);
            out.extend(dnf_branches(r, false));
            out
        }
    }
}

fn singleton(lit: Literal) -> Vec<Conjunct> {
    let mut c = Conjunct::default();
    if c.push(lit) {
        vec![c]
    } else {
        vec![]
    }
}

fn merge(a: &Conjunct, b: &Conjunct) -> Option<Conjunct> {
    let mut out = a.clone();
    for &(i, p) in &b.cur {
        if !out.push(Literal::Cur(i, p)) {
            return None;
        }
    }
    for &(i, j, p) in &b.next_reg {
        if !out.push(Literal::NextReg(i, j, p)) {
            return None;
        }
    }
    for &(i, p) in &b.next_input {
        if !out.push(Literal::NextInput(i, p)) {
            return None;
        }
    }
    Some(out)
}
