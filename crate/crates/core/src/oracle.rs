//! Independent brute-force reference procedures: bounded containment,
//! bounded unambiguity checking, a seeded automaton generator and the fuzz
//! harness that compares the symbolic engine against the brute force.
//!
//! Word enumeration is restricted to canonical words, whose distinct data
//! appear as 0, 1, 2, ... in order of first occurrence. Every data word is
//! isomorphic to exactly one canonical word and both membership and run
//! multiplicity are invariant under partial isomorphisms, so nothing is lost
//! and the word count drops from `domain^length` to the number of
//! restricted-growth strings.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::automaton::{Automaton, ConcreteState, Edge};
use crate::constraint::Constraint;
use crate::data::{fresh_data, DataValue, DataWord, Datum, Letter, Valuation};
use crate::search::{check_containment_with, SearchOptions, Verdict};
use crate::semantics::{accepts, concrete_successors};

/// Parameters of the fuzz harness and the random automaton generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzParams {
    pub max_word_length: usize,
    pub data_domain_size: u64,
    pub max_locations: usize,
    pub max_edges: usize,
    pub max_registers_a: usize,
    pub seed: u64,
    pub instances: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FuzzParamError {
    #[error("all fuzz parameters must be positive")]
    NotPositive,
    #[error(
        "data domain size {domain} too small: need at least \
         max_word_length + max_registers_a + 1 = {needed}"
    )]
    DomainTooSmall { domain: u64, needed: u64 },
}

impl FuzzParams {
    pub fn validate(&self) -> Result<(), FuzzParamError> {
        if self.max_word_length == 0
            || self.data_domain_size == 0
            || self.max_locations == 0
            || self.max_edges == 0
            || self.max_registers_a == 0
            || self.instances == 0
        {
            return Err(FuzzParamError::NotPositive);
        }
        let needed = self.max_word_length as u64 + self.max_registers_a as u64 + 1;
        if self.data_domain_size < needed {
            return Err(FuzzParamError::DomainTooSmall {
                domain: self.data_domain_size,
                needed,
            });
        }
        Ok(())
    }
}

impl Default for FuzzParams {
    fn default() -> Self {
        FuzzParams {
            max_word_length: 6,
            data_domain_size: 10,
            max_locations: 3,
            max_edges: 4,
            max_registers_a: 2,
            seed: 0,
            instances: 500,
        }
    }
}

// ---------------------------------------------------------------------------
// Bounded containment
// ---------------------------------------------------------------------------

/// A pair of state frontiers evolved in lockstep along a word prefix.
#[derive(Clone)]
struct FrontierPair {
    a: BTreeSet<ConcreteState>,
    b: BTreeSet<ConcreteState>,
}

struct FrontierStepper {
    /// Canonical word data live below this value; everything at or above it
    /// is a fresh representative and may be renamed within a state.
    window_end: Datum,
    pool_a: BTreeSet<Datum>,
    pool_b: BTreeSet<Datum>,
}

impl FrontierStepper {
    fn new(a: &Automaton, b: &Automaton, max_len: usize) -> Self {
        let window_end = max_len as Datum;
        let pool = |regs: usize| -> BTreeSet<Datum> {
            // The whole canonical window (a guess may match a future input)
            // plus 2 * registers representatives for values never read.
            (0..window_end)
                .chain(window_end..window_end + 2 * regs as Datum)
                .collect()
        };
        FrontierStepper {
            window_end,
            pool_a: pool(a.register_count),
            pool_b: pool(b.register_count),
        }
    }

    /// Renames the fresh representatives of a valuation to the least ones in
    /// order of occurrence; sound because such values are never equal to any
    /// word datum.
    fn compress(&self, state: ConcreteState) -> ConcreteState {
        let mut map: BTreeMap<Datum, Datum> = BTreeMap::new();
        let mut next = self.window_end;
        let valuation = Valuation(
            state
                .valuation
                .0
                .iter()
                .map(|&v| match v {
                    DataValue::Datum(d) if d >= self.window_end => {
                        let r = *map.entry(d).or_insert_with(|| {
                            let r = next;
                            next += 1;
                            r
                        });
                        DataValue::Datum(r)
                    }
                    other => other,
                })
                .collect(),
        );
        ConcreteState::new(state.loc, valuation)
    }

    fn step(
        &self,
        aut: &Automaton,
        pool: &BTreeSet<Datum>,
        frontier: &BTreeSet<ConcreteState>,
        letter: &Letter,
    ) -> BTreeSet<ConcreteState> {
        let mut next = BTreeSet::new();
        for state in frontier {
            for succ in concrete_successors(aut, state, letter, pool) {
                next.insert(self.compress(succ));
            }
        }
        next
    }

    fn step_pair(
        &self,
        a: &Automaton,
        b: &Automaton,
        pair: &FrontierPair,
        letter: &Letter,
    ) -> FrontierPair {
        FrontierPair {
            a: self.step(a, &self.pool_a, &pair.a, letter),
            b: self.step(b, &self.pool_b, &pair.b, letter),
        }
    }
}

fn frontier_accepting(aut: &Automaton, frontier: &BTreeSet<ConcreteState>) -> bool {
    frontier.iter().any(|s| aut.is_accepting(s.loc))
}

/// Searches for a shortest data word accepted by `a` but not by `b`, over
/// words of length at most `max_len` with data from `0..dom_size`.
/// Enumerates canonical representatives only; complete by closure under
/// partial isomorphisms.
pub fn bounded_counterexample(
    a: &Automaton,
    b: &Automaton,
    max_len: usize,
    dom_size: u64,
) -> Option<DataWord> {
    let stepper = FrontierStepper::new(a, b, max_len);
    let root = FrontierPair {
        a: BTreeSet::from([ConcreteState::initial(a)]),
        b: BTreeSet::from([ConcreteState::initial(b)]),
    };
    let mut best: Option<DataWord> = None;
    let mut prefix = Vec::new();
    counterexample_dfs(
        a,
        b,
        &stepper,
        &root,
        max_len,
        dom_size,
        0,
        &mut prefix,
        &mut best,
    );
    best
}

#[allow(clippy::too_many_arguments)]
fn counterexample_dfs(
    a: &Automaton,
    b: &Automaton,
    stepper: &FrontierStepper,
    pair: &FrontierPair,
    max_len: usize,
    dom_size: u64,
    used_data: u64,
    prefix: &mut Vec<Letter>,
    best: &mut Option<DataWord>,
) {
    if frontier_accepting(a, &pair.a) && !frontier_accepting(b, &pair.b) {
        *best = Some(DataWord(prefix.clone()));
        return;
    }
    if pair.a.is_empty() {
        return; // nothing below can be accepted by A
    }
    if prefix.len() == max_len {
        return;
    }
    if let Some(found) = best {
        if prefix.len() + 1 >= found.len() {
            return;
        }
    }
    let max_datum = used_data.min(dom_size - 1);
    for tag in a.tags() {
        for d in 0..=max_datum {
            let letter = Letter::new(tag.clone(), d);
            let child = stepper.step_pair(a, b, pair, &letter);
            prefix.push(letter);
            counterexample_dfs(
                a,
                b,
                stepper,
                &child,
                max_len,
                dom_size,
                used_data.max(d + 1),
                prefix,
                best,
            );
            prefix.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// Bounded unambiguity
// ---------------------------------------------------------------------------

/// A word with two distinct initialized accepting runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityWitness {
    pub word: DataWord,
    pub run1: Vec<ConcreteState>,
    pub run2: Vec<ConcreteState>,
}

/// Searches words up to `max_len` (canonical, data below `dom_size`) for one
/// admitting two distinct initialized accepting runs. Runs are sequences of
/// states; guesses are drawn from the word's data plus `max_len + registers`
/// fresh representatives, which is enough for an unforced guess to show up
/// as two or more runs.
pub fn find_ambiguity(b: &Automaton, max_len: usize, dom_size: u64) -> Option<AmbiguityWitness> {
    let mut words: Vec<DataWord> = Vec::new();
    enumerate_canonical_words(b, max_len, dom_size, &mut words);
    words.sort_by_key(|w| w.len());
    for word in &words {
        let mut pool = word.data();
        pool.extend(fresh_data(&pool, max_len + b.register_count));
        let mut memo = HashMap::new();
        let initial = ConcreteState::initial(b);
        if count_accepting_runs(b, word, &pool, &initial, 0, &mut memo) >= 2 {
            let mut runs = Vec::new();
            collect_accepting_runs(b, word, &pool, &initial, &mut vec![initial.clone()], &mut runs);
            assert!(runs.len() >= 2, "run counting and collection disagree");
            return Some(AmbiguityWitness {
                word: word.clone(),
                run1: runs[0].clone(),
                run2: runs[1].clone(),
            });
        }
    }
    None
}

fn enumerate_canonical_words(
    aut: &Automaton,
    max_len: usize,
    dom_size: u64,
    out: &mut Vec<DataWord>,
) {
    fn rec(
        aut: &Automaton,
        max_len: usize,
        dom_size: u64,
        prefix: &mut Vec<Letter>,
        used: u64,
        out: &mut Vec<DataWord>,
    ) {
        out.push(DataWord(prefix.clone()));
        if prefix.len() == max_len {
            return;
        }
        let max_datum = used.min(dom_size - 1);
        for tag in aut.tags() {
            for d in 0..=max_datum {
                prefix.push(Letter::new(tag.clone(), d));
                rec(aut, max_len, dom_size, prefix, used.max(d + 1), out);
                prefix.pop();
            }
        }
    }
    rec(aut, max_len, dom_size, &mut Vec::new(), 0, out);
}

fn count_accepting_runs(
    b: &Automaton,
    word: &DataWord,
    pool: &BTreeSet<Datum>,
    state: &ConcreteState,
    pos: usize,
    memo: &mut HashMap<(ConcreteState, usize), u32>,
) -> u32 {
    if pos == word.len() {
        return u32::from(b.is_accepting(state.loc));
    }
    let key = (state.clone(), pos);
    if let Some(&c) = memo.get(&key) {
        return c;
    }
    let mut total = 0u32;
    for succ in concrete_successors(b, state, &word.letters()[pos], pool) {
        total = total.saturating_add(count_accepting_runs(b, word, pool, &succ, pos + 1, memo));
        if total >= 2 {
            break;
        }
    }
    memo.insert(key, total);
    total
}

fn collect_accepting_runs(
    b: &Automaton,
    word: &DataWord,
    pool: &BTreeSet<Datum>,
    state: &ConcreteState,
    path: &mut Vec<ConcreteState>,
    out: &mut Vec<Vec<ConcreteState>>,
) {
    if out.len() >= 2 {
        return;
    }
    let pos = path.len() - 1;
    if pos == word.len() {
        if b.is_accepting(state.loc) {
            out.push(path.clone());
        }
        return;
    }
    for succ in concrete_successors(b, state, &word.letters()[pos], pool) {
        path.push(succ.clone());
        collect_accepting_runs(b, word, pool, &succ, path, out);
        path.pop();
        if out.len() >= 2 {
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Random automata
// ---------------------------------------------------------------------------

/// Which side of a containment query an automaton is generated for. The
/// right-hand side is forced to a single register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    A,
    B,
}

/// Seeded, reproducible automaton generation over the singleton alphabet
/// `{a}`. Guards are random conjunctions (occasionally disjunctions) over the
/// literal kinds; for role `B` the next value is usually pinned by a copy or
/// input literal, which makes unambiguous candidates common.
pub fn random_automaton(params: &FuzzParams, role: Role) -> Automaton {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ role_salt(role));
    let register_count = match role {
        Role::B => 1,
        Role::A => rng.gen_range(1..=params.max_registers_a),
    };
    let location_count = rng.gen_range(1..=params.max_locations);
    let locations: Vec<String> = (0..location_count).map(|i| format!("l{i}")).collect();
    let initial = rng.gen_range(0..location_count);
    let accepting: BTreeSet<usize> = (0..location_count)
        .filter(|_| rng.gen_bool(1.0 / 3.0))
        .collect();
    let edge_count = rng.gen_range(0..=params.max_edges);
    let pin_next = matches!(role, Role::B);
    let edges: Vec<Edge> = (0..edge_count)
        .map(|_| Edge {
            src: rng.gen_range(0..location_count),
            tag: "a".to_string(),
            guard: random_guard(&mut rng, register_count, pin_next),
            dst: rng.gen_range(0..location_count),
        })
        .collect();
    Automaton::new(
        vec!["a".to_string()],
        locations,
        register_count,
        initial,
        accepting,
        edges,
    )
    .expect("generated automaton is valid")
}

fn role_salt(role: Role) -> u64 {
    match role {
        Role::A => 0x9e37_79b9_7f4a_7c15,
        Role::B => 0x517c_c1b7_2722_0a95,
    }
}

fn random_guard(rng: &mut ChaCha8Rng, registers: usize, pin_next: bool) -> Constraint {
    let conjunction = |rng: &mut ChaCha8Rng| -> Constraint {
        let mut literals: Vec<Constraint> = Vec::new();
        if rng.gen_bool(0.6) {
            literals.push(random_cur_literal(rng, registers));
        }
        for i in 0..registers {
            let pin = if pin_next {
                rng.gen_bool(0.85)
            } else {
                rng.gen_bool(0.5)
            };
            if pin {
                literals.push(random_next_literal(rng, registers, i, true));
            } else if rng.gen_bool(0.4) {
                literals.push(random_next_literal(rng, registers, i, false));
            }
        }
        literals
            .into_iter()
            .reduce(Constraint::and)
            .unwrap_or(Constraint::True)
    };
    let first = conjunction(rng);
    if rng.gen_bool(0.2) {
        Constraint::or(first, conjunction(rng))
    } else {
        first
    }
}

fn random_cur_literal(rng: &mut ChaCha8Rng, registers: usize) -> Constraint {
    let atom = Constraint::CurEq(rng.gen_range(0..registers));
    if rng.gen_bool(0.5) {
        atom
    } else {
        Constraint::not(atom)
    }
}

fn random_next_literal(
    rng: &mut ChaCha8Rng,
    registers: usize,
    register: usize,
    positive: bool,
) -> Constraint {
    let atom = if rng.gen_bool(0.5) {
        Constraint::NextEqReg(register, rng.gen_range(0..registers))
    } else {
        Constraint::NextEqInput(register)
    };
    if positive {
        atom
    } else {
        Constraint::not(atom)
    }
}

// ---------------------------------------------------------------------------
// Fuzz harness
// ---------------------------------------------------------------------------

/// Bound and domain of the unambiguity filter applied to generated `B`
/// candidates.
pub const UNAMBIGUITY_FILTER_BOUND: usize = 5;
pub const UNAMBIGUITY_FILTER_DOMAIN: u64 = 8;

/// One line of the fuzz report.
#[derive(Debug, Clone, Serialize)]
pub struct FuzzRecord {
    pub seed: u64,
    pub verdict: String,
    #[serde(rename = "oracleAgrees")]
    pub oracle_agrees: bool,
    #[serde(rename = "witnessLength", skip_serializing_if = "Option::is_none")]
    pub witness_length: Option<usize>,
}

/// Per-instance details, for the record sink and for assertions in tests.
#[derive(Debug)]
pub struct FuzzInstance {
    pub record: FuzzRecord,
    pub explored: usize,
    pub within_bound: bool,
    pub elapsed: Duration,
    pub error: Option<String>,
}

#[derive(Debug, Default)]
pub struct FuzzSummary {
    pub instances: usize,
    pub disagreements: usize,
    pub errors: usize,
    pub contained: usize,
    pub not_contained: usize,
}

/// Runs the full harness: generate an instance per seed, check containment
/// symbolically, compare with the brute-force oracle, report one record per
/// instance.
pub fn run_fuzz(
    params: &FuzzParams,
    mut on_instance: impl FnMut(&FuzzInstance),
) -> Result<FuzzSummary, FuzzParamError> {
    params.validate()?;
    let mut summary = FuzzSummary::default();
    for i in 0..params.instances {
        let instance_seed = params
            .seed
            .wrapping_add((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let instance = fuzz_instance(params, instance_seed);
        summary.instances += 1;
        if !instance.record.oracle_agrees {
            summary.disagreements += 1;
        }
        if instance.error.is_some() {
            summary.errors += 1;
        }
        match instance.record.verdict.as_str() {
            "contained" => summary.contained += 1,
            "not_contained" => summary.not_contained += 1,
            _ => {}
        }
        on_instance(&instance);
    }
    Ok(summary)
}

/// Generates and checks a single instance.
pub fn fuzz_instance(params: &FuzzParams, instance_seed: u64) -> FuzzInstance {
    let (a, b) = generate_instance(params, instance_seed);
    let deadline = Instant::now() + Duration::from_secs(10);
    let options = SearchOptions {
        deadline: Some(deadline),
    };
    let started = Instant::now();
    let result = check_containment_with(&a, &b, &options);
    let elapsed = started.elapsed();

    match result {
        Ok(report) => {
            let oracle = bounded_counterexample(&a, &b, params.max_word_length, params.data_domain_size);
            let (verdict, agrees, witness_length) = match &report.verdict {
                Verdict::Contained => ("contained", oracle.is_none(), None),
                Verdict::NotContained { witness } => {
                    let verified = accepts(&a, witness) && !accepts(&b, witness);
                    let length_matches = match &oracle {
                        Some(o) => o.len() == witness.len(),
                        None => witness.len() > params.max_word_length,
                    };
                    (
                        "not_contained",
                        verified && length_matches,
                        Some(witness.len()),
                    )
                }
            };
            FuzzInstance {
                record: FuzzRecord {
                    seed: instance_seed,
                    verdict: verdict.to_string(),
                    oracle_agrees: agrees,
                    witness_length,
                },
                explored: report.explored,
                within_bound: crate::search::within_state_bound(report.explored, &a, &b),
                elapsed,
                error: None,
            }
        }
        Err(e) => FuzzInstance {
            record: FuzzRecord {
                seed: instance_seed,
                verdict: "error".to_string(),
                oracle_agrees: false,
                witness_length: None,
            },
            explored: 0,
            within_bound: false,
            elapsed,
            error: Some(e.to_string()),
        },
    }
}

/// Generates the `(A, B)` pair for one instance: `B` is drawn until it passes
/// the bounded unambiguity filter; `A` is either fresh, `B` with one edge
/// dropped, or `B` itself.
pub fn generate_instance(params: &FuzzParams, instance_seed: u64) -> (Automaton, Automaton) {
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
    let b = 'b: {
        for attempt in 0..200u64 {
            let candidate = random_automaton(
                &FuzzParams {
                    seed: instance_seed.wrapping_add(attempt.wrapping_mul(2) + 1),
                    ..params.clone()
                },
                Role::B,
            );
            if find_ambiguity(&candidate, UNAMBIGUITY_FILTER_BOUND, UNAMBIGUITY_FILTER_DOMAIN)
                .is_none()
            {
                break 'b candidate;
            }
        }
        // Edgeless automata are trivially unambiguous.
        random_automaton(
            &FuzzParams {
                max_edges: 1,
                seed: instance_seed,
                ..params.clone()
            },
            Role::B,
        )
    };
    let b = if find_ambiguity(&b, UNAMBIGUITY_FILTER_BOUND, UNAMBIGUITY_FILTER_DOMAIN).is_some() {
        // The fallback draw may still be ambiguous; strip its edges.
        Automaton::new(
            b.tags().to_vec(),
            b.locations().to_vec(),
            b.register_count,
            b.initial,
            b.accepting.clone(),
            Vec::new(),
        )
        .expect("edgeless automaton is valid")
    } else {
        b
    };

    let choice = rng.gen_range(0..100);
    let a = if choice < 60 || b.edges.is_empty() {
        random_automaton(
            &FuzzParams {
                seed: instance_seed.wrapping_add(0xa5a5),
                ..params.clone()
            },
            Role::A,
        )
    } else if choice < 85 {
        // B with one edge removed: containment in B is likely but not forced.
        let drop = rng.gen_range(0..b.edges.len());
        let edges: Vec<Edge> = b
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, e)| e.clone())
            .collect();
        Automaton::new(
            b.tags().to_vec(),
            b.locations().to_vec(),
            b.register_count,
            b.initial,
            b.accepting.clone(),
            edges,
        )
        .expect("edge-dropped automaton is valid")
    } else {
        b.clone()
    };
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn universal_vs_all_different_has_a_length_two_counterexample() {
        let a = fixtures::universal_len2();
        let b = fixtures::lad();
        let w = bounded_counterexample(&a, &b, 2, 4).expect("counterexample exists");
        assert_eq!(w.len(), 2);
        assert!(accepts(&a, &w) && !accepts(&b, &w));
        let letters = w.letters();
        assert_eq!(letters[0].datum, letters[1].datum);
    }

    #[test]
    fn containment_in_itself_has_no_counterexample() {
        let b = fixtures::lad();
        assert_eq!(bounded_counterexample(&b, &b, 4, 6), None);
    }

    #[test]
    fn zero_length_bound_without_epsilon_acceptance() {
        let a = fixtures::lad(); // does not accept ε
        let b = fixtures::empty_lang();
        assert_eq!(bounded_counterexample(&a, &b, 0, 4), None);
    }

    #[test]
    fn sigma_star_counterexample_is_epsilon() {
        let a = fixtures::sigma_star();
        let b = fixtures::lad();
        assert_eq!(bounded_counterexample(&a, &b, 3, 5), Some(DataWord::empty()));
    }

    #[test]
    fn all_different_automaton_is_unambiguous_at_bound() {
        assert_eq!(find_ambiguity(&fixtures::lad(), 4, 6), None);
    }

    #[test]
    fn parallel_unconstrained_edges_are_ambiguous() {
        let witness = find_ambiguity(&fixtures::ambiguous(), 4, 6).expect("ambiguity");
        assert_eq!(witness.word.len(), 1);
        assert_ne!(witness.run1, witness.run2);
        assert_eq!(witness.run1.len(), 2);
    }

    #[test]
    fn no_accepting_location_means_no_ambiguity() {
        assert_eq!(find_ambiguity(&fixtures::empty_lang(), 4, 6), None);
    }

    #[test]
    fn generation_is_deterministic() {
        let params = FuzzParams {
            seed: 42,
            ..FuzzParams::default()
        };
        assert_eq!(
            random_automaton(&params, Role::A),
            random_automaton(&params, Role::A)
        );
        assert_eq!(random_automaton(&params, Role::B).register_count, 1);
        assert!(random_automaton(&params, Role::A).register_count <= params.max_registers_a);
    }

    #[test]
    fn fuzz_params_validation() {
        assert!(FuzzParams::default().validate().is_ok());
        let bad = FuzzParams {
            data_domain_size: 5,
            ..FuzzParams::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(FuzzParamError::DomainTooSmall { .. })
        ));
    }
}
