//! Parser for the line-oriented automaton text format.
//!
//! ```text
//! # comment
//! alphabet a b c
//! registers 1
//! initial l0
//! accepting l2 l3
//! edge l0 -> l1 on a when (in != r1 & r1' == r1)
//! ```
//!
//! Constraint grammar: `true`, the atoms `in == r<i>`, `in != r<i>`,
//! `r<i>' == r<j>`, `r<i>' != r<j>`, `r<i>' == in`, `r<i>' != in`,
//! negation `!(...)`, and parenthesized `&`/`|` chains. Disjunction and the
//! `!=` atoms are desugared before storage. Locations are declared
//! implicitly by mention; header lines may appear in any order.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automaton::{Automaton, Edge, LocId};
use crate::constraint::Constraint;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {col}: {message}")]
    AtPosition {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{0}")]
    Structure(String),
}

fn err_at<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::AtPosition {
        line,
        col,
        message: message.into(),
    })
}

/// Parses the text format into a validated [`Automaton`].
pub fn parse_automaton(text: &str) -> Result<Automaton, ParseError> {
    let mut alphabet: Option<(usize, Vec<String>)> = None;
    let mut registers: Option<(usize, usize)> = None;
    let mut initial: Option<(usize, String)> = None;
    let mut accepting: Option<(usize, Vec<String>)> = None;
    // (line number, src, dst, tag, constraint text, constraint column)
    let mut edge_lines: Vec<(usize, String, String, String, String, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks = tokens_with_pos(line);
        if toks.is_empty() {
            continue;
        }
        let (head_col, head) = toks[0];
        match head {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(ParseError::Structure(format!(
                        "line {line_no}: duplicate `alphabet` line"
                    )));
                }
                let tags: Vec<String> = toks[1..].iter().map(|&(_, t)| t.to_string()).collect();
                if tags.is_empty() {
                    return err_at(line_no, head_col + 1, "alphabet declares no tags");
                }
                for (col, t) in &toks[1..] {
                    if t.contains(':') {
                        return err_at(line_no, col + 1, format!("tag `{t}` may not contain `:`"));
                    }
                }
                alphabet = Some((line_no, tags));
            }
            "registers" => {
                if registers.is_some() {
                    return Err(ParseError::Structure(format!(
                        "line {line_no}: duplicate `registers` line"
                    )));
                }
                if toks.len() != 2 {
                    return err_at(line_no, head_col + 1, "expected `registers <n>`");
                }
                let (col, tok) = toks[1];
                let n: usize = match tok.parse() {
                    Ok(n) => n,
                    Err(_) => return err_at(line_no, col + 1, format!("bad register count `{tok}`")),
                };
                if n == 0 {
                    return err_at(line_no, col + 1, "register count must be positive");
                }
                registers = Some((line_no, n));
            }
            "initial" => {
                if initial.is_some() {
                    return Err(ParseError::Structure(format!(
                        "line {line_no}: duplicate `initial` line"
                    )));
                }
                if toks.len() != 2 {
                    return err_at(line_no, head_col + 1, "expected `initial <location>`");
                }
                initial = Some((line_no, toks[1].1.to_string()));
            }
            "accepting" => {
                if accepting.is_some() {
                    return Err(ParseError::Structure(format!(
                        "line {line_no}: duplicate `accepting` line"
                    )));
                }
                accepting = Some((
                    line_no,
                    toks[1..].iter().map(|&(_, t)| t.to_string()).collect(),
                ));
            }
            "edge" => {
                // edge <src> -> <dst> on <tag> when <constraint>
                if toks.len() < 8
                    || toks[2].1 != "->"
                    || toks[4].1 != "on"
                    || toks[6].1 != "when"
                {
                    return err_at(
                        line_no,
                        head_col + 1,
                        "expected `edge <src> -> <dst> on <tag> when <constraint>`",
                    );
                }
                let constraint_col = toks[7].0;
                edge_lines.push((
                    line_no,
                    toks[1].1.to_string(),
                    toks[3].1.to_string(),
                    toks[5].1.to_string(),
                    line[constraint_col..].to_string(),
                    constraint_col,
                ));
            }
            other => {
                return err_at(line_no, head_col + 1, format!("unknown directive `{other}`"));
            }
        }
    }

    let (_, tags) = alphabet.ok_or_else(|| ParseError::Structure("missing `alphabet` line".into()))?;
    let (_, register_count) =
        registers.ok_or_else(|| ParseError::Structure("missing `registers` line".into()))?;
    let (_, initial_name) =
        initial.ok_or_else(|| ParseError::Structure("missing `initial` line".into()))?;
    let accepting_names = accepting.map(|(_, a)| a).unwrap_or_default();

    // Locations are everything mentioned, sorted.
    let mut location_set: BTreeSet<String> = BTreeSet::new();
    location_set.insert(initial_name.clone());
    location_set.extend(accepting_names.iter().cloned());
    for (_, src, dst, _, _, _) in &edge_lines {
        location_set.insert(src.clone());
        location_set.insert(dst.clone());
    }
    let locations: Vec<String> = location_set.into_iter().collect();
    let loc_id = |name: &str| -> LocId { locations.binary_search_by(|l| l.as_str().cmp(name)).unwrap() };

    let tag_set: BTreeSet<&str> = tags.iter().map(|t| t.as_str()).collect();
    let mut edges = Vec::new();
    for (line_no, src, dst, tag, constraint_text, constraint_col) in &edge_lines {
        if !tag_set.contains(tag.as_str()) {
            return err_at(
                *line_no,
                1,
                format!("tag `{tag}` is not declared in the alphabet"),
            );
        }
        let guard = parse_constraint(constraint_text, *line_no, *constraint_col, register_count)?;
        edges.push(Edge {
            src: loc_id(src),
            tag: tag.clone(),
            guard,
            dst: loc_id(dst),
        });
    }

    let initial_id = loc_id(&initial_name);
    let accepting_ids: BTreeSet<LocId> = accepting_names.iter().map(|n| loc_id(n)).collect();

    Automaton::new(
        tags,
        locations,
        register_count,
        initial_id,
        accepting_ids,
        edges,
    )
    .map_err(|e| ParseError::Structure(e.to_string()))
}

fn tokens_with_pos(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

// ---------------------------------------------------------------------------
// Constraint parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    True,
    In,
    /// `r<i>`, 0-based.
    Reg(usize),
    /// `r<i>'`, 0-based.
    RegPrime(usize),
    Eq,
    Neq,
    Amp,
    Pipe,
    Bang,
    LParen,
    RParen,
}

struct Lexer<'a> {
    text: &'a str,
    /// Byte position within `text`.
    pos: usize,
    line: usize,
    /// Column of `text[0]` in the original line (0-based byte offset).
    base_col: usize,
}

impl<'a> Lexer<'a> {
    fn col(&self) -> usize {
        self.base_col + self.pos + 1
    }

    fn peek_char(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn next_tok(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        self.skip_ws();
        let col = self.col();
        let Some(c) = self.peek_char() else {
            return Ok(None);
        };
        let tok = match c {
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            '&' => {
                self.pos += 1;
                Tok::Amp
            }
            '|' => {
                self.pos += 1;
                Tok::Pipe
            }
            '=' => {
                if self.text[self.pos..].starts_with("==") {
                    self.pos += 2;
                    Tok::Eq
                } else {
                    return err_at(self.line, col, "expected `==`");
                }
            }
            '!' => {
                if self.text[self.pos..].starts_with("!=") {
                    self.pos += 2;
                    Tok::Neq
                } else {
                    self.pos += 1;
                    Tok::Bang
                }
            }
            _ => {
                let rest = &self.text[self.pos..];
                if let Some(stripped) = rest.strip_prefix("true") {
                    if stripped.chars().next().is_none_or(|c| !c.is_alphanumeric()) {
                        self.pos += 4;
                        return Ok(Some((col, Tok::True)));
                    }
                }
                if let Some(stripped) = rest.strip_prefix("in") {
                    if stripped
                        .chars()
                        .next()
                        .is_none_or(|c| !c.is_alphanumeric() && c != '\'')
                    {
                        self.pos += 2;
                        return Ok(Some((col, Tok::In)));
                    }
                }
                if rest.starts_with('r') {
                    let digits: String = rest[1..].chars().take_while(|c| c.is_ascii_digit()).collect();
                    if digits.is_empty() {
                        return err_at(self.line, col, "expected register index after `r`");
                    }
                    let index: usize = digits
                        .parse()
                        .map_err(|_| ParseError::AtPosition {
                            line: self.line,
                            col,
                            message: format!("bad register index `r{digits}`"),
                        })?;
                    if index == 0 {
                        return err_at(self.line, col, "register names start at r1");
                    }
                    self.pos += 1 + digits.len();
                    if self.text[self.pos..].starts_with('\'') {
                        self.pos += 1;
                        return Ok(Some((col, Tok::RegPrime(index - 1))));
                    }
                    return Ok(Some((col, Tok::Reg(index - 1))));
                }
                return err_at(self.line, col, format!("unexpected character `{c}`"));
            }
        };
        Ok(Some((col, tok)))
    }
}

struct ConstraintParser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    end_col: usize,
    register_count: usize,
}

impl ConstraintParser {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).copied();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<usize, ParseError> {
        match self.next() {
            Some((col, t)) if t == tok => Ok(col),
            Some((col, _)) => err_at(self.line, col, format!("expected {what}")),
            None => err_at(self.line, self.end_col, format!("expected {what}")),
        }
    }

    fn check_register(&self, col: usize, index: usize) -> Result<(), ParseError> {
        if index >= self.register_count {
            return err_at(
                self.line,
                col,
                format!(
                    "register r{} out of range (automaton has {})",
                    index + 1,
                    self.register_count
                ),
            );
        }
        Ok(())
    }

    fn parse_expr(&mut self) -> Result<Constraint, ParseError> {
        match self.next() {
            None => err_at(self.line, self.end_col, "expected a constraint"),
            Some((_, Tok::True)) => Ok(Constraint::True),
            Some((col, Tok::Bang)) => {
                self.expect(Tok::LParen, "`(` after `!`")?;
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let _ = col;
                Ok(Constraint::not(inner))
            }
            Some((_, Tok::LParen)) => {
                let first = self.parse_expr()?;
                let mut items = vec![first];
                let mut op: Option<Tok> = None;
                loop {
                    match self.next() {
                        Some((_, Tok::RParen)) => break,
                        Some((col, t @ (Tok::Amp | Tok::Pipe))) => {
                            if op.is_some_and(|o| o != t) {
                                return err_at(
                                    self.line,
                                    col,
                                    "mixed `&` and `|` need parentheses",
                                );
                            }
                            op = Some(t);
                            items.push(self.parse_expr()?);
                        }
                        Some((col, _)) => {
                            return err_at(self.line, col, "expected `&`, `|` or `)`")
                        }
                        None => return err_at(self.line, self.end_col, "unclosed `(`"),
                    }
                }
                if items.len() == 1 {
                    return Ok(items.pop().unwrap());
                }
                let combine = match op.unwrap() {
                    Tok::Amp => Constraint::and,
                    _ => Constraint::or,
                };
                let mut iter = items.into_iter();
                let mut acc = iter.next().unwrap();
                for item in iter {
                    acc = combine(acc, item);
                }
                Ok(acc)
            }
            Some((_, Tok::In)) => {
                // in == r<i>  |  in != r<i>
                let negated = match self.next() {
                    Some((_, Tok::Eq)) => false,
                    Some((_, Tok::Neq)) => true,
                    Some((col, _)) => return err_at(self.line, col, "expected `==` or `!=`"),
                    None => return err_at(self.line, self.end_col, "expected `==` or `!=`"),
                };
                match self.next() {
                    Some((col, Tok::Reg(i))) => {
                        self.check_register(col, i)?;
                        let atom = Constraint::CurEq(i);
                        Ok(if negated { Constraint::not(atom) } else { atom })
                    }
                    Some((col, _)) => err_at(self.line, col, "expected a register after `in ==`"),
                    None => err_at(self.line, self.end_col, "expected a register"),
                }
            }
            Some((pcol, Tok::RegPrime(i))) => {
                self.check_register(pcol, i)?;
                let negated = match self.next() {
                    Some((_, Tok::Eq)) => false,
                    Some((_, Tok::Neq)) => true,
                    Some((col, _)) => return err_at(self.line, col, "expected `==` or `!=`"),
                    None => return err_at(self.line, self.end_col, "expected `==` or `!=`"),
                };
                let atom = match self.next() {
                    Some((col, Tok::Reg(j))) => {
                        self.check_register(col, j)?;
                        Constraint::NextEqReg(i, j)
                    }
                    Some((_, Tok::In)) => Constraint::NextEqInput(i),
                    Some((col, _)) => {
                        return err_at(self.line, col, "expected a register or `in`")
                    }
                    None => return err_at(self.line, self.end_col, "expected a register or `in`"),
                };
                Ok(if negated { Constraint::not(atom) } else { atom })
            }
            Some((col, Tok::Reg(_))) => err_at(
                self.line,
                col,
                "current-value atoms are written `in == r<i>`",
            ),
            Some((col, _)) => err_at(self.line, col, "expected a constraint"),
        }
    }
}

/// Parses a constraint in isolation. `base_col` is the 0-based byte offset of
/// `text` within its original line, used for error positions.
pub fn parse_constraint(
    text: &str,
    line: usize,
    base_col: usize,
    register_count: usize,
) -> Result<Constraint, ParseError> {
    let mut lexer = Lexer {
        text,
        pos: 0,
        line,
        base_col,
    };
    let mut toks = Vec::new();
    while let Some(t) = lexer.next_tok()? {
        toks.push(t);
    }
    let end_col = base_col + text.trim_end().len() + 1;
    let mut parser = ConstraintParser {
        toks,
        pos: 0,
        line,
        end_col,
        register_count,
    };
    let c = parser.parse_expr()?;
    if let Some(&(col, _)) = parser.peek() {
        return err_at(line, col, "trailing input after constraint");
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parses_the_all_different_fixture() {
        let aut = parse_automaton(fixtures::LAD).unwrap();
        assert_eq!(aut.location_count(), 3);
        assert_eq!(aut.register_count, 1);
        assert_eq!(aut.edges.len(), 3);
        assert_eq!(aut.loc_name(aut.initial), "l0");
        assert!(aut.is_accepting(aut.loc_id("l2").unwrap()));
    }

    #[test]
    fn empty_edge_set_is_allowed() {
        let aut = parse_automaton("alphabet a\nregisters 1\ninitial p\naccepting p\n").unwrap();
        assert_eq!(aut.edges.len(), 0);
        assert_eq!(aut.initial, 0);
        assert!(aut.is_accepting(0));
    }

    #[test]
    fn register_out_of_range_is_reported_with_position() {
        let text = "alphabet a\nregisters 1\ninitial p\naccepting p\nedge p -> p on a when in == r2\n";
        let err = parse_automaton(text).unwrap_err();
        match err {
            ParseError::AtPosition { line, col, message } => {
                assert_eq!(line, 5);
                assert!(col > 20, "column should point into the constraint, got {col}");
                assert!(message.contains("r2"));
            }
            other => panic!("expected positioned error, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_tag_is_rejected() {
        let text = "alphabet a\nregisters 1\ninitial p\nedge p -> p on b when true\n";
        let err = parse_automaton(text).unwrap_err();
        assert!(err.to_string().contains("tag `b`"));
    }

    #[test]
    fn constraint_desugaring() {
        let c = parse_constraint("(in != r1 | r1' == in)", 1, 0, 1).unwrap();
        assert_eq!(
            c,
            Constraint::or(
                Constraint::not(Constraint::CurEq(0)),
                Constraint::NextEqInput(0)
            )
        );
        let c = parse_constraint("!( (in == r1 & r1' != r1) )", 1, 0, 2).unwrap();
        assert_eq!(
            c,
            Constraint::not(Constraint::and(
                Constraint::CurEq(0),
                Constraint::not(Constraint::NextEqReg(0, 0))
            ))
        );
    }

    #[test]
    fn mixed_operators_need_parens() {
        let err = parse_constraint("(true & true | true)", 1, 0, 1).unwrap_err();
        assert!(err.to_string().contains("mixed"));
    }

    #[test]
    fn chains_of_one_operator_are_accepted() {
        let c = parse_constraint("(true & true & in == r1)", 1, 0, 1).unwrap();
        assert_eq!(
            c,
            Constraint::and(
                Constraint::and(Constraint::True, Constraint::True),
                Constraint::CurEq(0)
            )
        );
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a comment\n\nalphabet a # trailing\nregisters 1\ninitial p\n";
        let aut = parse_automaton(text).unwrap();
        assert_eq!(aut.tags(), ["a"]);
    }

    #[test]
    fn pretty_print_roundtrips() {
        for text in [fixtures::LAD, fixtures::UNIVERSAL_LEN2, fixtures::SIGMA_STAR] {
            let aut = parse_automaton(text).unwrap();
            let printed = aut.pretty_print();
            assert_eq!(parse_automaton(&printed).unwrap(), aut, "roundtrip of:\n{printed}");
        }
    }
}
