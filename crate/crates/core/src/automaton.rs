//! Register automata with guessing and their validation.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::constraint::{Constraint, Dnf};
use crate::data::Valuation;

/// Index of a location in [`Automaton::locations`].
pub type LocId = usize;

/// One transition. The guard relates the current valuation, the input datum
/// and the successor valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: LocId,
    pub tag: String,
    pub guard: Constraint,
    pub dst: LocId,
}

/// A register automaton with guessing.
///
/// Locations and alphabet tags are kept sorted by name so that equal automata
/// have equal internal indices regardless of construction order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    tags: Vec<String>,
    locations: Vec<String>,
    pub register_count: usize,
    pub initial: LocId,
    pub accepting: BTreeSet<LocId>,
    pub edges: Vec<Edge>,
    guard_dnfs: Vec<Dnf>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("the automaton must have at least one register")]
    NoRegisters,
    #[error("the automaton must have at least one location")]
    NoLocations,
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("edge {edge}: tag `{tag}` is not declared in the alphabet")]
    UndeclaredTag { edge: usize, tag: String },
    #[error("edge {edge}: register r{register} out of range (automaton has {count})")]
    RegisterOutOfRange {
        edge: usize,
        register: usize,
        count: usize,
    },
    #[error("location index {0} out of range")]
    LocationOutOfRange(usize),
}

impl Automaton {
    /// Builds and validates an automaton. `tags` and `locations` are sorted
    /// and deduplicated; the caller passes location indices relative to the
    /// sorted order.
    pub fn new(
        tags: impl IntoIterator<Item = String>,
        locations: impl IntoIterator<Item = String>,
        register_count: usize,
        initial: LocId,
        accepting: BTreeSet<LocId>,
        edges: Vec<Edge>,
    ) -> Result<Self, ValidationError> {
        let tags: Vec<String> = {
            let set: BTreeSet<String> = tags.into_iter().collect();
            set.into_iter().collect()
        };
        let locations: Vec<String> = {
            let set: BTreeSet<String> = locations.into_iter().collect();
            set.into_iter().collect()
        };
        if register_count == 0 {
            return Err(ValidationError::NoRegisters);
        }
        if locations.is_empty() {
            return Err(ValidationError::NoLocations);
        }
        if tags.is_empty() {
            return Err(ValidationError::EmptyAlphabet);
        }
        if initial >= locations.len() {
            return Err(ValidationError::LocationOutOfRange(initial));
        }
        for &l in &accepting {
            if l >= locations.len() {
                return Err(ValidationError::LocationOutOfRange(l));
            }
        }
        for (idx, edge) in edges.iter().enumerate() {
            if edge.src >= locations.len() {
                return Err(ValidationError::LocationOutOfRange(edge.src));
            }
            if edge.dst >= locations.len() {
                return Err(ValidationError::LocationOutOfRange(edge.dst));
            }
            if !tags.contains(&edge.tag) {
                return Err(ValidationError::UndeclaredTag {
                    edge: idx,
                    tag: edge.tag.clone(),
                });
            }
            if let Some(r) = edge.guard.max_register() {
                if r >= register_count {
                    return Err(ValidationError::RegisterOutOfRange {
                        edge: idx,
                        register: r + 1,
                        count: register_count,
                    });
                }
            }
        }
        let guard_dnfs = edges.iter().map(|e| e.guard.to_dnf()).collect();
        Ok(Automaton {
            tags,
            locations,
            register_count,
            initial,
            accepting,
            edges,
            guard_dnfs,
        })
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.binary_search_by(|t| t.as_str().cmp(tag)).is_ok()
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn location_count(&self) -> usize {
        self.locations.len()
    }

    pub fn loc_name(&self, loc: LocId) -> &str {
        &self.locations[loc]
    }

    pub fn loc_id(&self, name: &str) -> Option<LocId> {
        self.locations
            .binary_search_by(|l| l.as_str().cmp(name))
            .ok()
    }

    pub fn is_accepting(&self, loc: LocId) -> bool {
        self.accepting.contains(&loc)
    }

    /// Precomputed DNF of the guard of edge `idx`.
    pub fn guard_dnf(&self, idx: usize) -> &Dnf {
        &self.guard_dnfs[idx]
    }

    /// Indices of the edges leaving `src` with the given tag.
    pub fn edges_from(&self, src: LocId, tag: &str) -> impl Iterator<Item = usize> + '_ {
        let tag = tag.to_string();
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.src == src && e.tag == tag)
            .map(|(i, _)| i)
    }

    /// The canonical text form; [`crate::parse::parse_automaton`] of the
    /// result reproduces the automaton exactly.
    pub fn pretty_print(&self) -> String {
        let mut out = String::new();
        write!(out, "alphabet").unwrap();
        for t in &self.tags {
            write!(out, " {t}").unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "registers {}", self.register_count).unwrap();
        writeln!(out, "initial {}", self.loc_name(self.initial)).unwrap();
        write!(out, "accepting").unwrap();
        for &l in &self.accepting {
            write!(out, " {}", self.loc_name(l)).unwrap();
        }
        writeln!(out).unwrap();
        for e in &self.edges {
            writeln!(
                out,
                "edge {} -> {} on {} when {}",
                self.loc_name(e.src),
                self.loc_name(e.dst),
                e.tag,
                e.guard
            )
            .unwrap();
        }
        out
    }
}

/// A concrete state: a location together with a register valuation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConcreteState {
    pub loc: LocId,
    pub valuation: Valuation,
}

impl ConcreteState {
    pub fn new(loc: LocId, valuation: Valuation) -> Self {
        ConcreteState { loc, valuation }
    }

    /// The initial state: the initial location with all registers at ⊥.
    pub fn initial(aut: &Automaton) -> Self {
        ConcreteState {
            loc: aut.initial,
            valuation: Valuation::all_bot(aut.register_count),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_loc() -> Automaton {
        Automaton::new(
            vec!["a".into()],
            vec!["p".into(), "q".into()],
            1,
            0,
            BTreeSet::from([1]),
            vec![Edge {
                src: 0,
                tag: "a".into(),
                guard: Constraint::True,
                dst: 1,
            }],
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_input() {
        assert_eq!(
            Automaton::new(
                vec!["a".into()],
                vec!["p".into()],
                0,
                0,
                BTreeSet::new(),
                vec![]
            )
            .unwrap_err(),
            ValidationError::NoRegisters
        );
        let err = Automaton::new(
            vec!["a".into()],
            vec!["p".into()],
            1,
            0,
            BTreeSet::new(),
            vec![Edge {
                src: 0,
                tag: "b".into(),
                guard: Constraint::True,
                dst: 0,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, ValidationError::UndeclaredTag { .. }));
        let err = Automaton::new(
            vec!["a".into()],
            vec!["p".into()],
            1,
            0,
            BTreeSet::new(),
            vec![Edge {
                src: 0,
                tag: "a".into(),
                guard: Constraint::CurEq(1),
                dst: 0,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, ValidationError::RegisterOutOfRange { .. }));
    }

    #[test]
    fn locations_are_sorted() {
        let aut = two_loc();
        assert_eq!(aut.loc_id("p"), Some(0));
        assert_eq!(aut.loc_id("q"), Some(1));
        assert_eq!(aut.loc_id("r"), None);
        assert!(aut.has_tag("a"));
        assert!(!aut.has_tag("b"));
    }
}
