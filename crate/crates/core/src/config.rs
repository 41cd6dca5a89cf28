//! The symbolic configuration algebra for a single-register automaton.
//!
//! A configuration stores, per location, the set of register contents with
//! which that location is currently occupied. Each such set is finite or
//! cofinite over the proper data, with ⊥-membership tracked by a separate
//! flag; this keeps every operation a finite computation. Configurations are
//! closed under the one-letter successor operator, which is implemented as a
//! case analysis over the DNF of each edge guard.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value as Json};

use crate::automaton::{Automaton, LocId};
use crate::constraint::Conjunct;
use crate::data::{DataValue, DataWord, Datum, Letter, PartialIso, Valuation};

/// A finite or cofinite set of data values. `Cofinite { excluded, bot }`
/// denotes all proper data except `excluded`, plus ⊥ iff `bot`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataSet {
    Finite { data: BTreeSet<Datum>, bot: bool },
    Cofinite { excluded: BTreeSet<Datum>, bot: bool },
}

impl DataSet {
    pub fn empty() -> Self {
        DataSet::Finite {
            data: BTreeSet::new(),
            bot: false,
        }
    }

    pub fn just_bot() -> Self {
        DataSet::Finite {
            data: BTreeSet::new(),
            bot: true,
        }
    }

    pub fn finite(data: impl IntoIterator<Item = Datum>) -> Self {
        DataSet::Finite {
            data: data.into_iter().collect(),
            bot: false,
        }
    }

    pub fn cofinite(excluded: impl IntoIterator<Item = Datum>) -> Self {
        DataSet::Cofinite {
            excluded: excluded.into_iter().collect(),
            bot: false,
        }
    }

    pub fn is_cofinite(&self) -> bool {
        matches!(self, DataSet::Cofinite { .. })
    }

    pub fn contains(&self, v: DataValue) -> bool {
        match (self, v) {
            (DataSet::Finite { bot, .. }, DataValue::Bot) => *bot,
            (DataSet::Cofinite { bot, .. }, DataValue::Bot) => *bot,
            (DataSet::Finite { data, .. }, DataValue::Datum(d)) => data.contains(&d),
            (DataSet::Cofinite { excluded, .. }, DataValue::Datum(d)) => !excluded.contains(&d),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            DataSet::Finite { data, bot } => data.is_empty() && !bot,
            DataSet::Cofinite { .. } => false,
        }
    }

    /// The sole member, if the set has exactly one (cofinite sets never do).
    fn sole_member(&self) -> Option<DataValue> {
        match self {
            DataSet::Finite { data, bot } => match (data.len(), bot) {
                (0, true) => Some(DataValue::Bot),
                (1, false) => data.iter().next().copied().map(DataValue::Datum),
                _ => None,
            },
            DataSet::Cofinite { .. } => None,
        }
    }

    /// Intersection with `{d}`; drops ⊥.
    fn restrict_to_datum(&self, d: Datum) -> DataSet {
        if self.contains(DataValue::Datum(d)) {
            DataSet::finite([d])
        } else {
            DataSet::empty()
        }
    }

    /// Removes `d`; keeps ⊥-membership.
    fn without_datum(&self, d: Datum) -> DataSet {
        match self {
            DataSet::Finite { data, bot } => {
                let mut data = data.clone();
                data.remove(&d);
                DataSet::Finite { data, bot: *bot }
            }
            DataSet::Cofinite { excluded, bot } => {
                let mut excluded = excluded.clone();
                excluded.insert(d);
                DataSet::Cofinite {
                    excluded,
                    bot: *bot,
                }
            }
        }
    }

    fn union(&self, other: &DataSet) -> DataSet {
        match (self, other) {
            (
                DataSet::Finite { data: d1, bot: b1 },
                DataSet::Finite { data: d2, bot: b2 },
            ) => DataSet::Finite {
                data: d1.union(d2).copied().collect(),
                bot: *b1 || *b2,
            },
            (
                DataSet::Finite { data, bot: b1 },
                DataSet::Cofinite { excluded, bot: b2 },
            )
            | (
                DataSet::Cofinite { excluded, bot: b2 },
                DataSet::Finite { data, bot: b1 },
            ) => DataSet::Cofinite {
                excluded: excluded.difference(data).copied().collect(),
                bot: *b1 || *b2,
            },
            (
                DataSet::Cofinite { excluded: e1, bot: b1 },
                DataSet::Cofinite { excluded: e2, bot: b2 },
            ) => DataSet::Cofinite {
                excluded: e1.intersection(e2).copied().collect(),
                bot: *b1 || *b2,
            },
        }
    }

    /// Data that individuate this set: its elements if finite, its exclusions
    /// if cofinite.
    fn support<'a>(&'a self) -> impl Iterator<Item = Datum> + 'a {
        match self {
            DataSet::Finite { data, .. } => data.iter().copied(),
            DataSet::Cofinite { excluded, .. } => excluded.iter().copied(),
        }
    }

    fn apply_iso(&self, pi: &PartialIso) -> DataSet {
        let rename = |set: &BTreeSet<Datum>| -> BTreeSet<Datum> {
            set.iter()
                .map(|&d| {
                    pi.apply(d)
                        .unwrap_or_else(|| panic!("datum {d} outside the domain of the renaming"))
                })
                .collect()
        };
        match self {
            DataSet::Finite { data, bot } => DataSet::Finite {
                data: rename(data),
                bot: *bot,
            },
            DataSet::Cofinite { excluded, bot } => DataSet::Cofinite {
                excluded: rename(excluded),
                bot: *bot,
            },
        }
    }
}

/// A symbolic set of states of a single-register automaton: one [`DataSet`]
/// per location, with absent locations denoting the empty set.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    rows: BTreeMap<LocId, DataSet>,
}

impl Configuration {
    pub fn new(rows: impl IntoIterator<Item = (LocId, DataSet)>) -> Self {
        let mut c = Configuration::default();
        for (loc, set) in rows {
            c.set_row(loc, set);
        }
        c
    }

    /// The initial configuration `{(initial, ⊥)}`.
    pub fn initial(b: &Automaton) -> Self {
        Configuration::new([(b.initial, DataSet::just_bot())])
    }

    pub fn rows(&self) -> impl Iterator<Item = (LocId, &DataSet)> {
        self.rows.iter().map(|(&l, s)| (l, s))
    }

    pub fn row(&self, loc: LocId) -> DataSet {
        self.rows.get(&loc).cloned().unwrap_or_else(DataSet::empty)
    }

    fn set_row(&mut self, loc: LocId, set: DataSet) {
        if set.is_empty() {
            self.rows.remove(&loc);
        } else {
            self.rows.insert(loc, set);
        }
    }

    fn union_row(&mut self, loc: LocId, set: DataSet) {
        if set.is_empty() {
            return;
        }
        let merged = match self.rows.get(&loc) {
            Some(existing) => existing.union(&set),
            None => set,
        };
        self.rows.insert(loc, merged);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, loc: LocId, v: DataValue) -> bool {
        self.rows.get(&loc).is_some_and(|s| s.contains(v))
    }

    /// The support: data occurring in a finite row or excluded from a
    /// cofinite row. Always finite; never contains ⊥.
    pub fn support(&self) -> BTreeSet<Datum> {
        self.rows.values().flat_map(|s| s.support()).collect()
    }

    /// Locations whose row contains the datum `d`.
    pub fn locations_with(&self, d: Datum) -> BTreeSet<LocId> {
        self.rows
            .iter()
            .filter(|(_, s)| s.contains(DataValue::Datum(d)))
            .map(|(&l, _)| l)
            .collect()
    }

    /// Is some accepting location occupied?
    pub fn is_accepting(&self, aut: &Automaton) -> bool {
        self.rows.keys().any(|&l| aut.is_accepting(l))
    }

    /// Locations of finite rows that contain `d` (the states the collapse
    /// rule deletes).
    pub fn finite_rows_with(&self, d: Datum) -> BTreeSet<LocId> {
        self.rows
            .iter()
            .filter(|(_, s)| !s.is_cofinite() && s.contains(DataValue::Datum(d)))
            .map(|(&l, _)| l)
            .collect()
    }

    /// Locations of cofinite rows that exclude `d` (the states the collapse
    /// rule adds). Disjoint from the configuration by construction.
    pub fn cofinite_rows_without(&self, d: Datum) -> BTreeSet<LocId> {
        self.rows
            .iter()
            .filter(|(_, s)| s.is_cofinite() && !s.contains(DataValue::Datum(d)))
            .map(|(&l, _)| l)
            .collect()
    }

    /// Are `a` and `b` interchangeable: both outside the protected valuation
    /// and occupying exactly the same locations?
    pub fn indistinguishable(&self, protected: &Valuation, a: Datum, b: Datum) -> bool {
        debug_assert_ne!(a, b);
        if protected.contains_datum(a) || protected.contains_datum(b) {
            return false;
        }
        self.locations_with(a) == self.locations_with(b)
    }

    /// One collapse step: with `a` indistinguishable from `b`, make `b`
    /// generic by deleting it from every finite row and un-excluding it from
    /// every cofinite row. Afterwards `b` is no longer in the support.
    pub fn collapse_step(&self, protected: &Valuation, a: Datum, b: Datum) -> Configuration {
        assert!(
            self.support().contains(&a)
                && self.support().contains(&b)
                && self.indistinguishable(protected, a, b),
            "collapse_step requires an indistinguishable support pair, got ({a}, {b})"
        );
        let mut out = Configuration::default();
        for (&loc, set) in &self.rows {
            let new_set = match set {
                DataSet::Finite { data, bot } => {
                    let mut data = data.clone();
                    data.remove(&b);
                    DataSet::Finite { data, bot: *bot }
                }
                DataSet::Cofinite { excluded, bot } => {
                    let mut excluded = excluded.clone();
                    excluded.remove(&b);
                    DataSet::Cofinite {
                        excluded,
                        bot: *bot,
                    }
                }
            };
            out.set_row(loc, new_set);
        }
        debug_assert!(!out.support().contains(&b));
        out
    }

    /// Collapses until no indistinguishable pair remains. Pairs are scanned
    /// in ascending order and the numerically larger datum is collapsed, so
    /// the result is deterministic. Returns the collapsed configuration and
    /// the `(kept, removed)` pairs in application order.
    pub fn collapse_max(&self, protected: &Valuation) -> (Configuration, Vec<(Datum, Datum)>) {
        let mut current = self.clone();
        let mut trace = Vec::new();
        'outer: loop {
            let support: Vec<Datum> = current.support().into_iter().collect();
            for i in 0..support.len() {
                for j in (i + 1)..support.len() {
                    let (a, b) = (support[i], support[j]);
                    if current.indistinguishable(protected, a, b) {
                        current = current.collapse_step(protected, a, b);
                        trace.push((a, b));
                        continue 'outer;
                    }
                }
            }
            return (current, trace);
        }
    }

    /// Is every indistinguishable pair already collapsed?
    pub fn is_maximally_collapsed(&self, protected: &Valuation) -> bool {
        let support: Vec<Datum> = self.support().into_iter().collect();
        for i in 0..support.len() {
            for j in (i + 1)..support.len() {
                if self.indistinguishable(protected, support[i], support[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Pointwise renaming. The renaming must be defined on the whole support.
    pub fn apply_iso(&self, pi: &PartialIso) -> Configuration {
        let mut out = Configuration::default();
        for (&loc, set) in &self.rows {
            out.set_row(loc, set.apply_iso(pi));
        }
        out
    }

    /// Debug serialization with location names, stable sorted key order.
    /// For cofinite rows `data` lists the excluded values.
    pub fn to_debug_json(&self, aut: &Automaton) -> Json {
        let mut rows = serde_json::Map::new();
        for (&loc, set) in &self.rows {
            let (kind, items, bot) = match set {
                DataSet::Finite { data, bot } => ("finite", data, bot),
                DataSet::Cofinite { excluded, bot } => ("cofinite", excluded, bot),
            };
            rows.insert(
                aut.loc_name(loc).to_string(),
                json!({
                    "kind": kind,
                    "data": items.iter().collect::<Vec<_>>(),
                    "bot": bot,
                }),
            );
        }
        json!({ "rows": rows })
    }
}

/// The one-letter successor: all states reachable from some state of `c` by
/// reading `letter`. The result is again a configuration.
pub fn successor(b: &Automaton, c: &Configuration, letter: &Letter) -> Configuration {
    assert_eq!(
        b.register_count, 1,
        "symbolic successors are defined for single-register automata"
    );
    let mut out = Configuration::default();
    for (src, row) in c.rows() {
        for edge_idx in b.edges_from(src, &letter.tag) {
            let edge = &b.edges[edge_idx];
            for conjunct in &b.guard_dnf(edge_idx).conjuncts {
                let image = conjunct_image(conjunct, row, letter.datum);
                out.union_row(edge.dst, image);
            }
        }
    }
    out
}

/// The successor on a whole word; the empty word leaves `c` unchanged.
pub fn successor_word(b: &Automaton, c: &Configuration, word: &DataWord) -> Configuration {
    word.letters()
        .iter()
        .fold(c.clone(), |acc, l| successor(b, &acc, l))
}

/// The set `{v | ∃u ∈ row: (u, d, v) satisfies the conjunct}` for a
/// single-register conjunct.
fn conjunct_image(conjunct: &Conjunct, row: &DataSet, d: Datum) -> DataSet {
    // Literals about the current value filter the row.
    let mut current = row.clone();
    for &(_, pos) in &conjunct.cur {
        current = if pos {
            current.restrict_to_datum(d)
        } else {
            current.without_datum(d)
        };
    }
    if current.is_empty() {
        return DataSet::empty();
    }

    let copy = conjunct.next_reg.iter().any(|&(_, _, pos)| pos);
    let no_copy = conjunct.next_reg.iter().any(|&(_, _, pos)| !pos);
    let take_input = conjunct.next_input.iter().any(|&(_, pos)| pos);
    let avoid_input = conjunct.next_input.iter().any(|&(_, pos)| !pos);

    if copy {
        // v = u: the image is the filtered row itself; ⊥ propagates.
        let mut image = current;
        if take_input {
            image = image.restrict_to_datum(d);
        }
        if avoid_input {
            image = image.without_datum(d);
        }
        if no_copy {
            // v = u and v != u cannot both hold.
            return DataSet::empty();
        }
        image
    } else if take_input {
        // v = d, provided a witness u remains (u != d when v != u is required).
        let witnesses = if no_copy {
            current.without_datum(d)
        } else {
            current
        };
        if avoid_input || witnesses.is_empty() {
            DataSet::empty()
        } else {
            DataSet::finite([d])
        }
    } else {
        // v is guessed: any proper datum, minus the excluded ones. ⊥ is never
        // guessed.
        let mut excluded = BTreeSet::new();
        if avoid_input {
            excluded.insert(d);
        }
        if no_copy {
            // v must differ from some u in the row.
            match current.sole_member() {
                Some(DataValue::Bot) => {} // every proper datum differs from ⊥
                Some(DataValue::Datum(e)) => {
                    excluded.insert(e);
                }
                None => {} // two or more members: some u differs from any v
            }
            DataSet::Cofinite {
                excluded,
                bot: false,
            }
        } else {
            DataSet::Cofinite {
                excluded,
                bot: false,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn lad_loc(name: &str) -> LocId {
        fixtures::lad().loc_id(name).unwrap()
    }

    fn letter(d: Datum) -> Letter {
        Letter::new("σ", d)
    }

    #[test]
    fn support_of_the_reachable_configuration() {
        let c = Configuration::new([
            (1, DataSet::cofinite([1, 2, 3])),
            (2, DataSet::finite([3])),
        ]);
        assert_eq!(c.support(), BTreeSet::from([1, 2, 3]));
        assert_eq!(Configuration::default().support(), BTreeSet::new());
        let full = Configuration::new([(0, DataSet::cofinite([]))]);
        assert_eq!(full.support(), BTreeSet::new());
    }

    #[test]
    fn successor_from_the_initial_configuration() {
        let b = fixtures::lad();
        let c = Configuration::initial(&b);
        let next = successor(&b, &c, &letter(1));
        assert_eq!(
            next,
            Configuration::new([(lad_loc("l1"), DataSet::cofinite([1]))])
        );
    }

    #[test]
    fn successor_of_a_mixed_configuration() {
        let b = fixtures::lad();
        let c = Configuration::new([
            (lad_loc("l1"), DataSet::cofinite([1, 2])),
            (lad_loc("l2"), DataSet::finite([2])),
        ]);
        let next = successor(&b, &c, &letter(3));
        assert_eq!(
            next,
            Configuration::new([
                (lad_loc("l1"), DataSet::cofinite([1, 2, 3])),
                (lad_loc("l2"), DataSet::finite([3])),
            ])
        );
    }

    #[test]
    fn successor_of_the_empty_configuration_is_empty() {
        let b = fixtures::lad();
        assert!(successor(&b, &Configuration::default(), &letter(0)).is_empty());
    }

    #[test]
    fn successor_word_folds_left() {
        let b = fixtures::lad();
        let c = Configuration::initial(&b);
        assert_eq!(successor_word(&b, &c, &DataWord::empty()), c);
        let expected = Configuration::new([
            (lad_loc("l1"), DataSet::cofinite([1, 2, 3])),
            (lad_loc("l2"), DataSet::finite([3])),
        ]);
        assert_eq!(
            successor_word(&b, &c, &DataWord::parse("σ:1 σ:2 σ:3").unwrap()),
            expected
        );
        assert_eq!(
            successor_word(&b, &c, &DataWord::parse("σ:1 σ:2 σ:2 σ:3").unwrap()),
            expected
        );
    }

    #[test]
    fn acceptance_of_configurations() {
        let b = fixtures::lad();
        let non_accepting = Configuration::new([(lad_loc("l1"), DataSet::cofinite([1]))]);
        assert!(!non_accepting.is_accepting(&b));
        let accepting = Configuration::new([(lad_loc("l2"), DataSet::finite([3]))]);
        assert!(accepting.is_accepting(&b));
        assert!(!Configuration::default().is_accepting(&b));
        // A cofinite row at an accepting location is nonempty.
        let cof = Configuration::new([(lad_loc("l2"), DataSet::cofinite([7]))]);
        assert!(cof.is_accepting(&b));
    }

    // The worked example with three locations: finite, cofinite missing
    // {1,2}, cofinite missing {0,1}.
    fn three_row_config() -> Configuration {
        Configuration::new([
            (1, DataSet::finite([0, 1])),
            (2, DataSet::cofinite([1, 2])),
            (3, DataSet::cofinite([0, 1])),
        ])
    }

    #[test]
    fn finite_and_cofinite_rows_for_each_datum() {
        let c = three_row_config();
        assert_eq!(c.finite_rows_with(0), BTreeSet::from([1]));
        assert_eq!(c.cofinite_rows_without(0), BTreeSet::from([3]));
        assert_eq!(c.finite_rows_with(1), BTreeSet::from([1]));
        assert_eq!(c.cofinite_rows_without(1), BTreeSet::from([2, 3]));
        assert_eq!(c.finite_rows_with(2), BTreeSet::new());
        assert_eq!(c.cofinite_rows_without(2), BTreeSet::from([2]));
    }

    #[test]
    fn deleted_states_are_disjoint_from_the_configuration() {
        let c = three_row_config();
        for d in 0..5 {
            for loc in c.cofinite_rows_without(d) {
                assert!(!c.contains(loc, DataValue::Datum(d)));
            }
        }
    }

    #[test]
    fn indistinguishability() {
        let c = Configuration::new([
            (1, DataSet::cofinite([1, 2, 3])),
            (2, DataSet::finite([3])),
        ]);
        let bot = Valuation::all_bot(1);
        assert!(c.indistinguishable(&bot, 1, 2));
        assert!(!c.indistinguishable(&bot, 1, 3));
        let protecting_one = Valuation(vec![DataValue::Datum(1)]);
        assert!(!c.indistinguishable(&protecting_one, 1, 2));
    }

    #[test]
    fn collapse_step_makes_the_datum_generic() {
        let c = Configuration::new([
            (1, DataSet::cofinite([1, 2, 3])),
            (2, DataSet::finite([3])),
        ]);
        let bot = Valuation::all_bot(1);
        let collapsed = c.collapse_step(&bot, 1, 2);
        assert_eq!(
            collapsed,
            Configuration::new([(1, DataSet::cofinite([1, 3])), (2, DataSet::finite([3]))])
        );
        assert_eq!(collapsed.support(), BTreeSet::from([1, 3]));
    }

    #[test]
    fn collapse_max_reaches_a_fixpoint() {
        let c = Configuration::new([
            (1, DataSet::cofinite([1, 2, 3])),
            (2, DataSet::finite([3])),
        ]);
        let bot = Valuation::all_bot(1);
        let (collapsed, trace) = c.collapse_max(&bot);
        // 1 and 2 share the empty location set, so 2 collapses; afterwards 1
        // (no locations) and 3 (location 2) are distinguishable and both stay.
        assert_eq!(trace, vec![(1, 2)]);
        assert_eq!(
            collapsed,
            Configuration::new([(1, DataSet::cofinite([1, 3])), (2, DataSet::finite([3]))])
        );
        assert!(collapsed.is_maximally_collapsed(&bot));
        let (again, trace2) = collapsed.collapse_max(&bot);
        assert_eq!(again, collapsed);
        assert!(trace2.is_empty());
    }

    #[test]
    fn collapse_max_respects_the_protected_tuple() {
        let c = Configuration::new([(1, DataSet::finite([5, 7]))]);
        let protecting_five = Valuation(vec![DataValue::Datum(5)]);
        let (collapsed, trace) = c.collapse_max(&protecting_five);
        assert_eq!(collapsed, c);
        assert!(trace.is_empty());
    }

    #[test]
    fn collapse_shrinks_support_by_exactly_the_removed_datum() {
        let c = Configuration::new([
            (0, DataSet::finite([2, 4])),
            (1, DataSet::cofinite([2, 4, 6])),
        ]);
        let bot = Valuation::all_bot(1);
        assert!(c.indistinguishable(&bot, 2, 4));
        let collapsed = c.collapse_step(&bot, 2, 4);
        let mut expected = c.support();
        expected.remove(&4);
        assert_eq!(collapsed.support(), expected);
    }

    #[test]
    fn apply_iso_renames_pointwise() {
        let pi = PartialIso::from_pairs([(1, 9), (2, 2), (3, 3)]).unwrap();
        let c = Configuration::new([(1, DataSet::cofinite([1, 2, 3]))]);
        assert_eq!(
            c.apply_iso(&pi),
            Configuration::new([(1, DataSet::cofinite([9, 2, 3]))])
        );
        let w = DataWord::parse("σ:1 σ:2 σ:3").unwrap();
        let swap = PartialIso::from_pairs([(1, 3), (2, 2), (3, 1)]).unwrap();
        assert_eq!(swap.apply_word(&w), DataWord::parse("σ:3 σ:2 σ:1").unwrap());
        let id = PartialIso::from_pairs([(1, 1), (2, 2), (3, 3)]).unwrap();
        assert_eq!(c.apply_iso(&id), c);
    }

    #[test]
    fn debug_json_is_stable() {
        let b = fixtures::lad();
        let c = Configuration::new([
            (lad_loc("l1"), DataSet::cofinite([1, 2, 3])),
            (lad_loc("l2"), DataSet::finite([3])),
        ]);
        assert_eq!(
            serde_json::to_string(&c.to_debug_json(&b)).unwrap(),
            r#"{"rows":{"l1":{"bot":false,"data":[1,2,3],"kind":"cofinite"},"l2":{"bot":false,"data":[3],"kind":"finite"}}}"#
        );
    }
}
