//! Renaming-invariant encoding of maximally collapsed synchronized
//! configurations.
//!
//! A maximally collapsed pair is determined up to data renaming by: the
//! `A`-location, the equality shape of the `A`-valuation, the location set of
//! each valuation datum, the (pairwise distinct) location sets of the
//! remaining support data, and per `B`-location a cofinite bit and a
//! ⊥-membership bit. Two maximally collapsed pairs get the same key exactly
//! when they are equal up to a partial isomorphism.

use std::collections::BTreeSet;

use crate::automaton::Automaton;
use crate::config::{Configuration, DataSet};
use crate::data::{DataValue, Datum, PartialIso, Valuation};
use crate::sync::SyncConfig;

/// The canonical fingerprint. Location sets are bitmasks over `B`'s location
/// indices, so `B` is limited to 64 locations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    pub a_loc: usize,
    /// Per register: `None` for ⊥, otherwise the first-occurrence index of
    /// the datum among the valuation's distinct proper data.
    pub shape: Vec<Option<usize>>,
    /// Location set of each distinct valuation datum, in first-occurrence
    /// order.
    pub aval_locsets: Vec<u64>,
    /// Location sets of the support data outside the valuation, sorted.
    /// Pairwise distinct because the configuration is maximally collapsed.
    pub parked_locsets: Vec<u64>,
    /// Bit per `B`-location: the row is cofinite.
    pub cofinite_bits: u64,
    /// Bit per `B`-location: the row contains ⊥.
    pub bot_bits: u64,
}

/// Encodes a maximally collapsed synchronized configuration. Returns the key
/// and the renaming that maps the configuration onto its canonical
/// representative: valuation data to `1..=k` in first-occurrence order,
/// remaining support data to `k+1..=p` in ascending location-set order.
///
/// Panics if the configuration is not maximally collapsed with respect to
/// its valuation, or if `B` has more than 64 locations.
pub fn canonicalize(s: &SyncConfig, b: &Automaton) -> (CanonicalKey, PartialIso) {
    assert!(
        b.location_count() <= 64,
        "canonical keys support at most 64 locations"
    );
    assert!(
        s.config.is_maximally_collapsed(&s.a_val),
        "canonicalize requires a maximally collapsed configuration"
    );

    // Distinct proper valuation data in first-occurrence order.
    let mut dvals: Vec<Datum> = Vec::new();
    let mut shape: Vec<Option<usize>> = Vec::with_capacity(s.a_val.len());
    for &v in &s.a_val.0 {
        match v {
            DataValue::Bot => shape.push(None),
            DataValue::Datum(d) => match dvals.iter().position(|&x| x == d) {
                Some(i) => shape.push(Some(i)),
                None => {
                    dvals.push(d);
                    shape.push(Some(dvals.len() - 1));
                }
            },
        }
    }

    let locset_mask = |d: Datum| -> u64 {
        s.config
            .locations_with(d)
            .into_iter()
            .fold(0u64, |m, l| m | (1 << l))
    };

    let aval_locsets: Vec<u64> = dvals.iter().map(|&d| locset_mask(d)).collect();

    let dval_set: BTreeSet<Datum> = dvals.iter().copied().collect();
    let mut parked: Vec<(u64, Datum)> = s
        .config
        .support()
        .into_iter()
        .filter(|d| !dval_set.contains(d))
        .map(|d| (locset_mask(d), d))
        .collect();
    parked.sort_unstable();
    for pair in parked.windows(2) {
        assert_ne!(
            pair[0].0, pair[1].0,
            "two parked data share a location set; the configuration is not maximally collapsed"
        );
    }

    let mut cofinite_bits = 0u64;
    let mut bot_bits = 0u64;
    for (loc, set) in s.config.rows() {
        if set.is_cofinite() {
            cofinite_bits |= 1 << loc;
        }
        if set.contains(DataValue::Bot) {
            bot_bits |= 1 << loc;
        }
    }

    let k = dvals.len() as Datum;
    let pairs = dvals
        .iter()
        .enumerate()
        .map(|(i, &d)| (d, i as Datum + 1))
        .chain(
            parked
                .iter()
                .enumerate()
                .map(|(j, &(_, d))| (d, k + 1 + j as Datum)),
        );
    let pi = PartialIso::from_pairs(pairs).expect("canonical renaming is injective");

    let key = CanonicalKey {
        a_loc: s.a_loc,
        shape,
        aval_locsets,
        parked_locsets: parked.iter().map(|&(m, _)| m).collect(),
        cofinite_bits,
        bot_bits,
    };
    (key, pi)
}

/// Reconstructs a synchronized configuration from a key, using the canonical
/// data `1..=p`. The result canonicalizes back to the same key.
pub fn decode(key: &CanonicalKey, b: &Automaton) -> SyncConfig {
    let k = key.aval_locsets.len() as Datum;
    let p = k + key.parked_locsets.len() as Datum;
    let a_val = Valuation(
        key.shape
            .iter()
            .map(|&s| match s {
                None => DataValue::Bot,
                Some(i) => DataValue::Datum(i as Datum + 1),
            })
            .collect(),
    );

    let locset_of = |d: Datum| -> u64 {
        if d <= k {
            key.aval_locsets[(d - 1) as usize]
        } else {
            key.parked_locsets[(d - k - 1) as usize]
        }
    };

    let mut rows = Vec::new();
    for loc in 0..b.location_count() {
        let members: BTreeSet<Datum> = (1..=p).filter(|&d| locset_of(d) & (1 << loc) != 0).collect();
        let bot = key.bot_bits & (1 << loc) != 0;
        let set = if key.cofinite_bits & (1 << loc) != 0 {
            DataSet::Cofinite {
                excluded: (1..=p).filter(|&d| !members.contains(&d)).collect(),
                bot,
            }
        } else {
            DataSet::Finite { data: members, bot }
        };
        rows.push((loc, set));
    }
    SyncConfig::new(key.a_loc, a_val, Configuration::new(rows))
}
