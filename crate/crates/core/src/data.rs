//! Data values, letters, data words, register valuations and partial
//! isomorphisms of the data domain.
//!
//! The data domain is the set of non-negative integers, used purely as an
//! equality type: no operation in this crate ever compares data with `<` for
//! semantic purposes, only for canonical orderings. The special value ⊥
//! ("bot") is the initial content of every register and is distinct from
//! every proper datum.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A datum of the (conceptually infinite) data domain.
pub type Datum = u64;

/// An element of the data domain extended with the undefined value ⊥.
///
/// `Bot == Bot` holds; `Bot != Datum(d)` for every `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataValue {
    Bot,
    Datum(Datum),
}

impl DataValue {
    pub fn datum(self) -> Option<Datum> {
        match self {
            DataValue::Bot => None,
            DataValue::Datum(d) => Some(d),
        }
    }

    pub fn is_bot(self) -> bool {
        matches!(self, DataValue::Bot)
    }
}

impl fmt::Display for DataValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataValue::Bot => write!(f, "⊥"),
            DataValue::Datum(d) => write!(f, "{d}"),
        }
    }
}

impl From<Datum> for DataValue {
    fn from(d: Datum) -> Self {
        DataValue::Datum(d)
    }
}

/// One letter of a data word: a tag from the finite alphabet paired with a
/// proper datum (never ⊥, enforced by the type).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub tag: String,
    pub datum: Datum,
}

impl Letter {
    pub fn new(tag: impl Into<String>, datum: Datum) -> Self {
        Letter {
            tag: tag.into(),
            datum,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tag, self.datum)
    }
}

/// A finite sequence of letters. The empty word is allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DataWord(pub Vec<Letter>);

/// Error for the `tag:datum` word syntax.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordSyntaxError {
    #[error("token {index}: expected `tag:datum`, got `{token}`")]
    MalformedToken { index: usize, token: String },
    #[error("token {index}: datum `{token}` is not a non-negative integer")]
    BadDatum { index: usize, token: String },
}

impl DataWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        DataWord(letters)
    }

    pub fn empty() -> Self {
        DataWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// The set of all data occurring in the word.
    pub fn data(&self) -> BTreeSet<Datum> {
        self.0.iter().map(|l| l.datum).collect()
    }

    /// Parses the space-separated `tag:datum` syntax. Whitespace-only input
    /// is the empty word.
    pub fn parse(text: &str) -> Result<Self, WordSyntaxError> {
        let mut letters = Vec::new();
        for (index, token) in text.split_whitespace().enumerate() {
            let Some((tag, datum)) = token.rsplit_once(':') else {
                return Err(WordSyntaxError::MalformedToken {
                    index,
                    token: token.to_string(),
                });
            };
            if tag.is_empty() {
                return Err(WordSyntaxError::MalformedToken {
                    index,
                    token: token.to_string(),
                });
            }
            let datum: Datum = datum.parse().map_err(|_| WordSyntaxError::BadDatum {
                index,
                token: token.to_string(),
            })?;
            letters.push(Letter::new(tag, datum));
        }
        Ok(DataWord(letters))
    }

    /// Renames the word's data so that distinct data appear as 0, 1, 2, ... in
    /// order of first occurrence. The result is isomorphic to `self`.
    pub fn normalized(&self) -> DataWord {
        let mut seen: BTreeMap<Datum, Datum> = BTreeMap::new();
        let mut next = 0;
        let letters = self
            .0
            .iter()
            .map(|l| {
                let d = *seen.entry(l.datum).or_insert_with(|| {
                    let v = next;
                    next += 1;
                    v
                });
                Letter::new(l.tag.clone(), d)
            })
            .collect();
        DataWord(letters)
    }
}

impl fmt::Display for DataWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A register valuation: one [`DataValue`] per register.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(pub Vec<DataValue>);

impl Valuation {
    /// The initial valuation: every register holds ⊥.
    pub fn all_bot(register_count: usize) -> Self {
        Valuation(vec![DataValue::Bot; register_count])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, register: usize) -> DataValue {
        self.0[register]
    }

    /// All proper data occurring in the valuation (⊥ excluded).
    pub fn data(&self) -> BTreeSet<Datum> {
        self.0.iter().filter_map(|v| v.datum()).collect()
    }

    pub fn contains_datum(&self, d: Datum) -> bool {
        self.0.contains(&DataValue::Datum(d))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A finite injective renaming of proper data. ⊥ is always fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialIso {
    map: BTreeMap<Datum, Datum>,
}

impl PartialIso {
    pub fn identity() -> Self {
        PartialIso::default()
    }

    /// Builds a partial isomorphism from explicit pairs. Fails on
    /// non-injective input.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Datum, Datum)>) -> Option<Self> {
        let mut map = BTreeMap::new();
        let mut image = BTreeSet::new();
        for (a, b) in pairs {
            match map.get(&a) {
                Some(&prev) if prev != b => return None,
                Some(_) => continue,
                None => {
                    if !image.insert(b) {
                        return None;
                    }
                    map.insert(a, b);
                }
            }
        }
        Some(PartialIso { map })
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = Datum> + '_ {
        self.map.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Datum, Datum)> + '_ {
        self.map.iter().map(|(&a, &b)| (a, b))
    }

    pub fn defined_on(&self, d: Datum) -> bool {
        self.map.contains_key(&d)
    }

    pub fn apply(&self, d: Datum) -> Option<Datum> {
        self.map.get(&d).copied()
    }

    /// Applies the renaming to a value; ⊥ maps to ⊥. Data outside the domain
    /// are a contract violation.
    pub fn apply_value(&self, v: DataValue) -> DataValue {
        match v {
            DataValue::Bot => DataValue::Bot,
            DataValue::Datum(d) => DataValue::Datum(
                self.apply(d)
                    .unwrap_or_else(|| panic!("datum {d} outside the domain of the renaming")),
            ),
        }
    }

    pub fn apply_valuation(&self, val: &Valuation) -> Valuation {
        Valuation(val.0.iter().map(|&v| self.apply_value(v)).collect())
    }

    pub fn apply_word(&self, word: &DataWord) -> DataWord {
        DataWord(
            word.0
                .iter()
                .map(|l| {
                    Letter::new(
                        l.tag.clone(),
                        self.apply(l.datum).unwrap_or_else(|| {
                            panic!("datum {} outside the domain of the renaming", l.datum)
                        }),
                    )
                })
                .collect(),
        )
    }

    /// The inverse renaming. Always exists because the map is injective.
    pub fn inverse(&self) -> PartialIso {
        PartialIso {
            map: self.map.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }
}

/// The `count` smallest data not contained in `used`.
pub fn fresh_data(used: &BTreeSet<Datum>, count: usize) -> Vec<Datum> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = 0;
    while out.len() < count {
        if !used.contains(&candidate) {
            out.push(candidate);
        }
        candidate += 1;
    }
    out
}

/// The smallest datum not contained in `used`.
pub fn least_fresh(used: &BTreeSet<Datum>) -> Datum {
    let mut candidate = 0;
    while used.contains(&candidate) {
        candidate += 1;
    }
    candidate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bot_equality() {
        assert_eq!(DataValue::Bot, DataValue::Bot);
        assert_ne!(DataValue::Bot, DataValue::Datum(0));
        assert_eq!(DataValue::Datum(3), DataValue::Datum(3));
        assert_ne!(DataValue::Datum(3), DataValue::Datum(4));
    }

    #[test]
    fn word_parse_roundtrip() {
        let w = DataWord::parse("σ:1 σ:2 σ:2 σ:3").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.data(), BTreeSet::from([1, 2, 3]));
        assert_eq!(DataWord::parse(&w.to_string()).unwrap(), w);
        assert_eq!(DataWord::parse("  ").unwrap(), DataWord::empty());
        assert!(DataWord::parse("a:x").is_err());
        assert!(DataWord::parse("justatag").is_err());
        assert!(DataWord::parse(":3").is_err());
    }

    #[test]
    fn word_normalization_uses_first_occurrence_order() {
        let w = DataWord::parse("a:7 b:3 a:7 b:9").unwrap();
        assert_eq!(w.normalized(), DataWord::parse("a:0 b:1 a:0 b:2").unwrap());
    }

    #[test]
    fn iso_rejects_non_injective() {
        assert!(PartialIso::from_pairs([(1, 5), (2, 5)]).is_none());
        let pi = PartialIso::from_pairs([(1, 9), (2, 2)]).unwrap();
        assert_eq!(pi.apply_value(DataValue::Bot), DataValue::Bot);
        assert_eq!(pi.apply(1), Some(9));
        assert_eq!(pi.inverse().apply(9), Some(1));
    }

    #[test]
    fn fresh_data_skips_used() {
        let used = BTreeSet::from([0, 2, 3]);
        assert_eq!(fresh_data(&used, 3), vec![1, 4, 5]);
        assert_eq!(least_fresh(&used), 1);
        assert_eq!(least_fresh(&BTreeSet::new()), 0);
    }
}
