//! Containment checking as reachability of a bad synchronized configuration.
//!
//! The language of `A` is contained in the language of an unambiguous
//! single-register `B` exactly when no reachable synchronized configuration
//! pairs an accepting `A`-location with a non-accepting `B`-configuration.
//! The search works on canonical keys of maximally collapsed configurations:
//! every raw successor is collapsed, canonicalized and deduplicated, which
//! makes the reachable space finite. Witnesses are rebuilt by replaying the
//! path from the root and undoing, per node, the canonical renaming and the
//! collapse steps (each collapsed pair is moved to fresh data, mirroring the
//! construction that justifies the collapse rule). Every returned witness is
//! independently verified with the concrete membership semantics.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::automaton::Automaton;
use crate::canonical::{canonicalize, CanonicalKey};
use crate::data::{DataWord, Datum, Letter, PartialIso};
use crate::semantics::accepts;
use crate::sync::{representative_letters, sync_successors, SyncConfig};

/// The answer to a containment query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Contained,
    NotContained { witness: DataWord },
}

/// Verdict plus exploration statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub verdict: Verdict,
    /// Number of distinct canonical keys explored.
    pub explored: usize,
}

impl Report {
    /// The stable JSON form: `{"contained": true}` or
    /// `{"contained": false, "witness": [...], "witness_verified": true,
    /// "explored_states": N}`.
    pub fn to_json(&self) -> Json {
        match &self.verdict {
            Verdict::Contained => json!({ "contained": true }),
            Verdict::NotContained { witness } => json!({
                "contained": false,
                "witness": witness
                    .letters()
                    .iter()
                    .map(|l| json!({ "tag": l.tag, "datum": l.datum }))
                    .collect::<Vec<_>>(),
                "witness_verified": true,
                "explored_states": self.explored,
            }),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    /// Abort with [`SearchError::Timeout`] when exceeded.
    pub deadline: Option<Instant>,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("the right-hand automaton must have exactly 1 register, it has {0}")]
    RegisterCount(usize),
    #[error("the right-hand automaton has {0} locations, at most 64 are supported")]
    TooManyLocations(usize),
    #[error("search exceeded its deadline after exploring {explored} configurations")]
    Timeout { explored: usize },
    #[error(
        "explored {explored} canonical configurations, above the bound {bound}; \
         this indicates a canonicalization defect"
    )]
    StateBoundExceeded { explored: usize, bound: u128 },
    #[error("reconstructed witness failed verification: {witness}")]
    WitnessVerification { witness: DataWord },
}

/// Decides `L(A) ⊆ L(B)`. `B` must be unambiguous with a single register;
/// unambiguity is the caller's promise and is not verified here. A
/// `NotContained` verdict always carries a membership-verified witness and is
/// therefore sound even if the promise is broken.
pub fn check_containment(a: &Automaton, b: &Automaton) -> Result<Report, SearchError> {
    check_containment_with(a, b, &SearchOptions::default())
}

pub fn check_containment_with(
    a: &Automaton,
    b: &Automaton,
    options: &SearchOptions,
) -> Result<Report, SearchError> {
    let outcome = search(a, b, SyncConfig::initial(a, b), options)?;
    match outcome.bad_word {
        None => Ok(Report {
            verdict: Verdict::Contained,
            explored: outcome.explored,
        }),
        Some(word) => {
            let witness = word.normalized();
            if accepts(a, &witness) && !accepts(b, &witness) {
                Ok(Report {
                    verdict: Verdict::NotContained { witness },
                    explored: outcome.explored,
                })
            } else {
                Err(SearchError::WitnessVerification { witness })
            }
        }
    }
}

/// Does `start` reach a bad synchronized configuration? Used by the tests
/// that exercise the collapse rule from arbitrary reachable configurations.
pub fn bad_reachable_from(
    a: &Automaton,
    b: &Automaton,
    start: &SyncConfig,
    options: &SearchOptions,
) -> Result<bool, SearchError> {
    Ok(search(a, b, start.clone(), options)?.bad_word.is_some())
}

struct SearchOutcome {
    /// A word leading from the start configuration to a bad one, if any.
    bad_word: Option<DataWord>,
    explored: usize,
}

struct Node {
    rep: SyncConfig,
    parent: Option<usize>,
    /// Letter chosen at the parent's representative.
    letter: Option<Letter>,
    /// Collapse pairs `(kept, removed)` applied to the raw successor.
    collapse_trace: Vec<(Datum, Datum)>,
    /// Renaming from the collapsed configuration onto the representative.
    renaming: PartialIso,
}

fn search(
    a: &Automaton,
    b: &Automaton,
    start: SyncConfig,
    options: &SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    if b.register_count != 1 {
        return Err(SearchError::RegisterCount(b.register_count));
    }
    if b.location_count() > 64 {
        return Err(SearchError::TooManyLocations(b.location_count()));
    }
    let bound = canonical_key_bound(a, b);

    let mut nodes: Vec<Node> = Vec::new();
    let mut seen: HashMap<CanonicalKey, usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    let insert = |raw: SyncConfig,
                      parent: Option<usize>,
                      letter: Option<Letter>,
                      nodes: &mut Vec<Node>,
                      seen: &mut HashMap<CanonicalKey, usize>,
                      queue: &mut VecDeque<usize>|
     -> Option<usize> {
        let (collapsed, collapse_trace) = raw.collapse_max();
        let (key, renaming) = canonicalize(&collapsed, b);
        if seen.contains_key(&key) {
            return None;
        }
        let rep = collapsed.apply_iso(&renaming);
        let id = nodes.len();
        nodes.push(Node {
            rep,
            parent,
            letter,
            collapse_trace,
            renaming,
        });
        seen.insert(key, id);
        queue.push_back(id);
        Some(id)
    };

    if let Some(id) = insert(start, None, None, &mut nodes, &mut seen, &mut queue) {
        if nodes[id].rep.is_bad(a, b) {
            return Ok(SearchOutcome {
                bad_word: Some(reconstruct_witness(&nodes, id)),
                explored: seen.len(),
            });
        }
    }

    while let Some(id) = queue.pop_front() {
        if let Some(deadline) = options.deadline {
            if Instant::now() > deadline {
                return Err(SearchError::Timeout {
                    explored: seen.len(),
                });
            }
        }
        let letters = representative_letters(&nodes[id].rep, a.tags());
        for letter in letters {
            let raws = sync_successors(a, b, &nodes[id].rep, &letter);
            for raw in raws {
                let Some(new_id) = insert(
                    raw,
                    Some(id),
                    Some(letter.clone()),
                    &mut nodes,
                    &mut seen,
                    &mut queue,
                ) else {
                    continue;
                };
                if seen.len() as u128 > bound {
                    return Err(SearchError::StateBoundExceeded {
                        explored: seen.len(),
                        bound,
                    });
                }
                if nodes[new_id].rep.is_bad(a, b) {
                    return Ok(SearchOutcome {
                        bad_word: Some(reconstruct_witness(&nodes, new_id)),
                        explored: seen.len(),
                    });
                }
            }
        }
    }

    Ok(SearchOutcome {
        bad_word: None,
        explored: seen.len(),
    })
}

/// Replays the path from the root to `bad_id`, turning the empty word at the
/// bad node into a word that leads the start configuration to a bad one.
///
/// Walking upwards, the word valid at a node's representative is first moved
/// through the inverse of the canonical renaming, then through the collapse
/// steps in reverse (renaming each collapsed pair to fresh data), and finally
/// prefixed with the letter that was read at the parent.
fn reconstruct_witness(nodes: &[Node], bad_id: usize) -> DataWord {
    // A fresh-value source above every datum mentioned anywhere on the path.
    let mut max_seen: Datum = 0;
    let mut id = bad_id;
    loop {
        let node = &nodes[id];
        for d in node.rep.relevant_data() {
            max_seen = max_seen.max(d);
        }
        for &(x, y) in &node.collapse_trace {
            max_seen = max_seen.max(x).max(y);
        }
        for (x, y) in node.renaming.pairs() {
            max_seen = max_seen.max(x).max(y);
        }
        if let Some(l) = &node.letter {
            max_seen = max_seen.max(l.datum);
        }
        match node.parent {
            Some(p) => id = p,
            None => break,
        }
    }
    let mut next_fresh = max_seen + 1;
    let mut fresh = move || {
        let v = next_fresh;
        next_fresh += 1;
        v
    };

    let mut word: Vec<Letter> = Vec::new();
    let mut id = bad_id;
    loop {
        let node = &nodes[id];

        // Representative frame -> collapsed frame.
        let inverse = node.renaming.inverse();
        let mut assigned: HashMap<Datum, Datum> = HashMap::new();
        for letter in &mut word {
            letter.datum = match inverse.apply(letter.datum) {
                Some(d) => d,
                None => *assigned.entry(letter.datum).or_insert_with(&mut fresh),
            };
        }

        // Collapsed frame -> raw successor frame: undo each collapse step by
        // moving the pair's data out of the word.
        for &(kept, removed) in node.collapse_trace.iter().rev() {
            let kept_to = fresh();
            let removed_to = fresh();
            for letter in &mut word {
                if letter.datum == kept {
                    letter.datum = kept_to;
                } else if letter.datum == removed {
                    letter.datum = removed_to;
                }
            }
        }

        match node.parent {
            Some(parent) => {
                word.insert(0, node.letter.clone().expect("non-root node has a letter"));
                id = parent;
            }
            None => break,
        }
    }
    DataWord(word)
}

/// The number of set partitions of `n` elements.
fn bell(n: usize) -> u128 {
    // Bell triangle; n stays tiny (register counts).
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let prev = *next.last().unwrap();
            next.push(prev.saturating_add(x));
        }
        row = next;
    }
    row[0]
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Number of equality types of an `m`-tuple over the data domain with ⊥:
/// choose the ⊥ positions, partition the rest.
pub fn valuation_shape_count(m: usize) -> u128 {
    (0..=m)
        .map(|bots| binomial(m, bots).saturating_mul(bell(m - bots)))
        .fold(0u128, |acc, x| acc.saturating_add(x))
}

fn pow2(exp: u32) -> u128 {
    if exp >= 127 {
        u128::MAX
    } else {
        1u128 << exp
    }
}

/// Upper bound on the number of distinct canonical keys, used as a
/// diagnostic: exceeding it means canonicalization is leaking states.
pub fn canonical_key_bound(a: &Automaton, b: &Automaton) -> u128 {
    let lb = b.location_count() as u32;
    let k = a.register_count as u128;
    let k_pow_k = (0..a.register_count).fold(1u128, |acc, _| acc.saturating_mul(k));
    let two_pow_lb = pow2(lb);
    let double_exp = if lb >= 7 {
        u128::MAX
    } else {
        pow2(1u32 << lb)
    };
    (b.location_count() as u128)
        .saturating_mul(k_pow_k.max(1))
        .saturating_mul((k + 1).saturating_mul(two_pow_lb))
        .saturating_mul(double_exp)
        .saturating_mul(two_pow_lb)
        .saturating_mul(a.location_count() as u128)
        .saturating_mul(valuation_shape_count(a.register_count))
}

/// Diagnostic guard: has the exploration stayed within the key-count bound?
pub fn within_state_bound(explored: usize, a: &Automaton, b: &Automaton) -> bool {
    explored as u128 <= canonical_key_bound(a, b)
}
