//! Containment checking for register automata with guessing.
//!
//! Register automata read finite words over `alphabet × data`, store data in
//! registers for later equality tests, and may nondeterministically guess
//! future register contents. This crate decides whether the language of an
//! arbitrary such automaton `A` is contained in the language of an
//! unambiguous single-register automaton `B`.
//!
//! The decision procedure tracks, per `A`-run, the full set of `B`-states
//! symbolically as finite or cofinite data sets per location. Supports stay
//! bounded because interchangeable data are collapsed onto a single
//! representative, and the resulting configurations are deduplicated through
//! a renaming-invariant canonical key, so the reachability search for a
//! "bad" pair (an accepting `A`-state with a non-accepting `B`-set) runs in
//! a finite graph. Counterexamples are replayed from the search tree and
//! verified against the concrete semantics before being reported.
//!
//! The [`oracle`] module provides brute-force reference procedures (bounded
//! containment, bounded unambiguity checking, a seeded instance generator)
//! used to cross-validate the symbolic engine.

pub mod automaton;
pub mod canonical;
pub mod config;
pub mod constraint;
pub mod data;
pub mod fixtures;
pub mod oracle;
pub mod parse;
pub mod search;
pub mod semantics;
pub mod sync;

pub use automaton::{Automaton, ConcreteState, Edge, LocId, ValidationError};
pub use canonical::{canonicalize, decode, CanonicalKey};
pub use config::{successor, successor_word, Configuration, DataSet};
pub use constraint::Constraint;
pub use data::{DataValue, DataWord, Datum, Letter, PartialIso, Valuation, WordSyntaxError};
pub use oracle::{
    bounded_counterexample, find_ambiguity, random_automaton, run_fuzz, AmbiguityWitness,
    FuzzInstance, FuzzParams, FuzzRecord, FuzzSummary, Role,
};
pub use parse::{parse_automaton, ParseError};
pub use search::{
    bad_reachable_from, check_containment, check_containment_with, within_state_bound, Report,
    SearchError, SearchOptions, Verdict,
};
pub use semantics::{accepts, concrete_successors, membership_pool};
pub use sync::{representative_letters, sync_successors, SyncConfig};
