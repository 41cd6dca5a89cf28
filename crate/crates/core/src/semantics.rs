//! Concrete operational semantics: one-step successors with guesses drawn
//! from a finite pool, and membership of a data word.
//!
//! Guessed register values range over proper data only; ⊥ appears in a
//! successor valuation exactly when a `r' == r` constraint copies it from a
//! register that currently holds ⊥. Closure of runs under partial
//! isomorphisms makes a finite guess pool sufficient: any run can be renamed
//! so that all guessed values come from the word's data plus a small set of
//! fresh representatives.

use std::collections::BTreeSet;

use crate::automaton::{Automaton, ConcreteState};
use crate::constraint::Conjunct;
use crate::data::{fresh_data, DataValue, DataWord, Datum, Letter, Valuation};

/// All states reachable from `state` in one step on `letter`, with guessed
/// values restricted to the current valuation, the input datum and
/// `guess_pool`. Enlarging the pool only enlarges the result.
pub fn concrete_successors(
    aut: &Automaton,
    state: &ConcreteState,
    letter: &Letter,
    guess_pool: &BTreeSet<Datum>,
) -> BTreeSet<ConcreteState> {
    let mut candidates: BTreeSet<Datum> = guess_pool.clone();
    candidates.insert(letter.datum);
    candidates.extend(state.valuation.data());

    let mut out = BTreeSet::new();
    for edge_idx in aut.edges_from(state.loc, &letter.tag) {
        let edge = &aut.edges[edge_idx];
        for conjunct in &aut.guard_dnf(edge_idx).conjuncts {
            enumerate_conjunct(
                conjunct,
                &state.valuation,
                letter.datum,
                &candidates,
                aut.register_count,
                &mut |valuation| {
                    debug_assert!(edge.guard.eval(&state.valuation, letter.datum, &valuation));
                    out.insert(ConcreteState::new(edge.dst, valuation));
                },
            );
        }
    }
    out
}

/// Enumerates the successor valuations admitted by one conjunct and feeds
/// them to `emit`.
fn enumerate_conjunct(
    conjunct: &Conjunct,
    current: &Valuation,
    datum: Datum,
    candidates: &BTreeSet<Datum>,
    register_count: usize,
    emit: &mut dyn FnMut(Valuation),
) {
    if !conjunct.cur_satisfied(current, datum) {
        return;
    }

    // Forced values from the positive next-literals.
    let mut forced: Vec<Option<DataValue>> = vec![None; register_count];
    for &(i, j, pos) in &conjunct.next_reg {
        if pos {
            let v = current.get(j);
            match forced[i] {
                Some(prev) if prev != v => return,
                _ => forced[i] = Some(v),
            }
        }
    }
    for &(i, pos) in &conjunct.next_input {
        if pos {
            let v = DataValue::Datum(datum);
            match forced[i] {
                Some(prev) if prev != v => return,
                _ => forced[i] = Some(v),
            }
        }
    }

    // Per-register admissible values.
    let mut options: Vec<Vec<DataValue>> = Vec::with_capacity(register_count);
    for i in 0..register_count {
        match forced[i] {
            Some(v) => {
                let ok = conjunct
                    .next_reg
                    .iter()
                    .all(|&(i2, j, pos)| pos || i2 != i || v != current.get(j))
                    && conjunct
                        .next_input
                        .iter()
                        .all(|&(i2, pos)| pos || i2 != i || v != DataValue::Datum(datum));
                if !ok {
                    return;
                }
                options.push(vec![v]);
            }
            None => {
                // Unforced: a guess over proper data, never ⊥.
                let opts: Vec<DataValue> = candidates
                    .iter()
                    .copied()
                    .filter(|&c| {
                        conjunct.next_reg.iter().all(|&(i2, j, pos)| {
                            pos || i2 != i || DataValue::Datum(c) != current.get(j)
                        }) && conjunct
                            .next_input
                            .iter()
                            .all(|&(i2, pos)| pos || i2 != i || c != datum)
                    })
                    .map(DataValue::Datum)
                    .collect();
                if opts.is_empty() {
                    return;
                }
                options.push(opts);
            }
        }
    }

    let mut valuation = vec![DataValue::Bot; register_count];
    cartesian(&options, 0, &mut valuation, emit);
}

fn cartesian(
    options: &[Vec<DataValue>],
    i: usize,
    valuation: &mut Vec<DataValue>,
    emit: &mut dyn FnMut(Valuation),
) {
    if i == options.len() {
        emit(Valuation(valuation.clone()));
        return;
    }
    for &v in &options[i] {
        valuation[i] = v;
        cartesian(options, i + 1, valuation, emit);
    }
}

/// The guess pool used by [`accepts`]: the word's data plus
/// `register_count * (|word| + 1)` fresh values.
pub fn membership_pool(aut: &Automaton, word: &DataWord) -> BTreeSet<Datum> {
    let mut pool = word.data();
    let fresh = fresh_data(&pool, aut.register_count * (word.len() + 1));
    pool.extend(fresh);
    pool
}

/// Does the automaton accept the word? Breadth-first search over concrete
/// states, complete because runs are closed under partial isomorphisms.
pub fn accepts(aut: &Automaton, word: &DataWord) -> bool {
    let pool = membership_pool(aut, word);
    let mut frontier: BTreeSet<ConcreteState> = BTreeSet::new();
    frontier.insert(ConcreteState::initial(aut));
    for letter in word.letters() {
        let mut next = BTreeSet::new();
        for state in &frontier {
            next.extend(concrete_successors(aut, state, letter, &pool));
        }
        frontier = next;
        if frontier.is_empty() {
            return false;
        }
    }
    frontier.iter().any(|s| aut.is_accepting(s.loc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn lad_state(loc: &str, v: DataValue) -> ConcreteState {
        let aut = fixtures::lad();
        ConcreteState::new(aut.loc_id(loc).unwrap(), Valuation(vec![v]))
    }

    #[test]
    fn successors_of_the_initial_guess() {
        let aut = fixtures::lad();
        let state = lad_state("l0", DataValue::Bot);
        let pool = BTreeSet::from([2, 3]);
        let succs = concrete_successors(&aut, &state, &Letter::new("σ", 1), &pool);
        let expected: BTreeSet<ConcreteState> = [2, 3]
            .into_iter()
            .map(|d| lad_state("l1", DataValue::Datum(d)))
            .collect();
        assert_eq!(succs, expected);
    }

    #[test]
    fn successors_of_the_accepting_step() {
        let aut = fixtures::lad();
        let state = lad_state("l1", DataValue::Datum(3));
        let pool = BTreeSet::from([3]);
        let succs = concrete_successors(&aut, &state, &Letter::new("σ", 3), &pool);
        assert_eq!(
            succs,
            BTreeSet::from([lad_state("l2", DataValue::Datum(3))])
        );
    }

    #[test]
    fn no_outgoing_edges_means_no_successors() {
        let aut = fixtures::lad();
        let state = lad_state("l2", DataValue::Datum(3));
        let succs = concrete_successors(&aut, &state, &Letter::new("σ", 3), &BTreeSet::from([0]));
        assert!(succs.is_empty());
    }

    #[test]
    fn bot_is_never_guessed() {
        // From (l0, ⊥) the guard `r1' != in` leaves the new value unforced,
        // so ⊥ must not appear in any successor even though ⊥ != 1.
        let aut = fixtures::lad();
        let state = lad_state("l0", DataValue::Bot);
        let succs = concrete_successors(&aut, &state, &Letter::new("σ", 1), &BTreeSet::from([0, 1]));
        assert!(succs
            .iter()
            .all(|s| !s.valuation.get(0).is_bot()));
        assert_eq!(succs, BTreeSet::from([lad_state("l1", DataValue::Datum(0))]));
    }

    #[test]
    fn membership_of_the_running_example() {
        let aut = fixtures::lad();
        assert!(accepts(&aut, &DataWord::parse("σ:1 σ:2 σ:2 σ:3").unwrap()));
        assert!(!accepts(&aut, &DataWord::parse("σ:1 σ:2 σ:1").unwrap()));
        assert!(!accepts(&aut, &DataWord::empty()));
    }

    #[test]
    fn membership_of_short_words() {
        let aut = fixtures::lad();
        assert!(!accepts(&aut, &DataWord::parse("σ:5").unwrap()));
        assert!(accepts(&aut, &DataWord::parse("σ:5 σ:6").unwrap()));
        assert!(!accepts(&aut, &DataWord::parse("σ:5 σ:5").unwrap()));
    }

    #[test]
    fn empty_word_accepted_iff_initial_accepting() {
        assert!(accepts(&fixtures::sigma_star(), &DataWord::empty()));
        assert!(!accepts(&fixtures::empty_lang(), &DataWord::empty()));
    }
}
