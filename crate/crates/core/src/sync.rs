//! The synchronized state space: one concrete state of `A` paired with a
//! symbolic configuration of `B`.
//!
//! The raw synchronized space is infinitely branching (any input datum and
//! any guessed register value gives a move). Branching becomes finite by
//! picking one concrete representative per equivalence class of letters and
//! guesses: the data already relevant to the pair, plus least-unused fresh
//! values.

use std::collections::BTreeSet;

use crate::automaton::{Automaton, ConcreteState, LocId};
use crate::config::{successor, Configuration};
use crate::data::{fresh_data, least_fresh, Datum, Letter, PartialIso, Valuation};
use crate::semantics::concrete_successors;

/// A synchronized configuration: a single `A`-state and a `B`-configuration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyncConfig {
    pub a_loc: LocId,
    pub a_val: Valuation,
    pub config: Configuration,
}

impl SyncConfig {
    pub fn new(a_loc: LocId, a_val: Valuation, config: Configuration) -> Self {
        SyncConfig {
            a_loc,
            a_val,
            config,
        }
    }

    /// The initial synchronized configuration of `a` and `b`.
    pub fn initial(a: &Automaton, b: &Automaton) -> Self {
        SyncConfig {
            a_loc: a.initial,
            a_val: Valuation::all_bot(a.register_count),
            config: Configuration::initial(b),
        }
    }

    /// Bad: `A` accepts here while the `B`-configuration does not.
    pub fn is_bad(&self, a: &Automaton, b: &Automaton) -> bool {
        a.is_accepting(self.a_loc) && !self.config.is_accepting(b)
    }

    /// All data relevant to this pair: the configuration's support plus the
    /// proper data held in `A`'s registers.
    pub fn relevant_data(&self) -> BTreeSet<Datum> {
        let mut data = self.config.support();
        data.extend(self.a_val.data());
        data
    }

    /// Maximal collapse of the `B`-configuration with respect to the
    /// `A`-valuation; returns the collapse trace as well.
    pub fn collapse_max(&self) -> (SyncConfig, Vec<(Datum, Datum)>) {
        let (config, trace) = self.config.collapse_max(&self.a_val);
        (
            SyncConfig {
                a_loc: self.a_loc,
                a_val: self.a_val.clone(),
                config,
            },
            trace,
        )
    }

    pub fn apply_iso(&self, pi: &PartialIso) -> SyncConfig {
        SyncConfig {
            a_loc: self.a_loc,
            a_val: pi.apply_valuation(&self.a_val),
            config: self.config.apply_iso(pi),
        }
    }
}

/// One concrete letter per branching class: each relevant datum and a single
/// least-unused fresh representative, for every tag of `alphabet`.
pub fn representative_letters(s: &SyncConfig, alphabet: &[String]) -> Vec<Letter> {
    let relevant = s.relevant_data();
    let fresh = least_fresh(&relevant);
    let mut data: Vec<Datum> = relevant.into_iter().collect();
    data.push(fresh);
    data.sort_unstable();
    let mut out = Vec::with_capacity(alphabet.len() * data.len());
    for tag in alphabet {
        for &d in &data {
            out.push(Letter::new(tag.clone(), d));
        }
    }
    out
}

/// All synchronized successors on `letter`: every `A`-move (guesses drawn
/// from the relevant data, the input datum and `m` fresh representatives)
/// paired with the symbolic `B`-successor.
pub fn sync_successors(
    a: &Automaton,
    b: &Automaton,
    s: &SyncConfig,
    letter: &Letter,
) -> Vec<SyncConfig> {
    let mut pool = s.relevant_data();
    pool.insert(letter.datum);
    let fresh = fresh_data(&pool, a.register_count);
    pool.extend(fresh);

    let a_state = ConcreteState::new(s.a_loc, s.a_val.clone());
    let a_moves = concrete_successors(a, &a_state, letter, &pool);
    if a_moves.is_empty() {
        return Vec::new();
    }
    let b_next = successor(b, &s.config, letter);
    a_moves
        .into_iter()
        .map(|m| SyncConfig::new(m.loc, m.valuation, b_next.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DataSet;
    use crate::data::DataValue;
    use crate::fixtures;

    #[test]
    fn badness_of_synchronized_configurations() {
        let a = fixtures::sigma_star(); // single accepting location u0
        let b = fixtures::lad();
        let empty = SyncConfig::new(0, Valuation::all_bot(1), Configuration::default());
        assert!(empty.is_bad(&a, &b));

        let a2 = fixtures::lad(); // l0 is not accepting
        let not_acc = SyncConfig::new(
            a2.loc_id("l0").unwrap(),
            Valuation::all_bot(1),
            Configuration::default(),
        );
        assert!(!not_acc.is_bad(&a2, &b));

        let acc_b = SyncConfig::new(
            0,
            Valuation(vec![DataValue::Datum(1)]),
            Configuration::new([(b.loc_id("l2").unwrap(), DataSet::finite([3]))]),
        );
        assert!(!acc_b.is_bad(&a, &b));
    }

    #[test]
    fn representative_letters_add_one_fresh_datum() {
        let s = SyncConfig::new(
            0,
            Valuation(vec![DataValue::Datum(3), DataValue::Bot]),
            Configuration::new([(0, DataSet::finite([1])), (1, DataSet::cofinite([3]))]),
        );
        // support {1,3}, valuation data {3}: fresh representative is 0.
        let letters = representative_letters(&s, &["σ".to_string()]);
        assert_eq!(
            letters,
            vec![Letter::new("σ", 0), Letter::new("σ", 1), Letter::new("σ", 3)]
        );
    }

    #[test]
    fn representative_letters_of_the_initial_configuration() {
        let a = fixtures::sigma_star();
        let b = fixtures::lad();
        let s = SyncConfig::initial(&a, &b);
        assert_eq!(
            representative_letters(&s, &["σ".to_string()]),
            vec![Letter::new("σ", 0)]
        );
        assert_eq!(
            representative_letters(&s, &["a".to_string(), "b".to_string()]),
            vec![Letter::new("a", 0), Letter::new("b", 0)]
        );
    }

    #[test]
    fn sync_successors_pair_a_moves_with_the_b_successor() {
        // A and B are both the all-different automaton.
        let a = fixtures::lad();
        let b = fixtures::lad();
        let s = SyncConfig::initial(&a, &b);
        let succs = sync_successors(&a, &b, &s, &Letter::new("σ", 0));
        // A guesses a value != 0; the pool is {0} plus one fresh value {1},
        // so exactly one representative move. B's configuration excludes 0.
        assert_eq!(succs.len(), 1);
        let expected_config =
            Configuration::new([(b.loc_id("l1").unwrap(), DataSet::cofinite([0]))]);
        assert_eq!(succs[0].config, expected_config);
        assert_eq!(succs[0].a_val, Valuation(vec![DataValue::Datum(1)]));
        assert_eq!(succs[0].a_loc, a.loc_id("l1").unwrap());
    }

    #[test]
    fn no_a_move_means_no_synchronized_move() {
        let a = fixtures::lad();
        let b = fixtures::lad();
        // l2 has no outgoing edges in A.
        let s = SyncConfig::new(
            a.loc_id("l2").unwrap(),
            Valuation(vec![DataValue::Datum(1)]),
            Configuration::initial(&b),
        );
        assert!(sync_successors(&a, &b, &s, &Letter::new("σ", 0)).is_empty());
    }
}
