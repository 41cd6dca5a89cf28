//! Small example automata used throughout the test suites and benchmarks.

use crate::automaton::Automaton;
use crate::parse::parse_automaton;

/// Accepts the data words whose last datum differs from all earlier data
/// ("all different"). A single guessed register: on the first letter the
/// automaton guesses the datum that will end the word, keeps it while
/// reading letters that differ from it, and accepts when the input matches.
pub const LAD: &str = "\
# all-different: the last datum has not occurred before
alphabet σ
registers 1
initial l0
accepting l2
edge l0 -> l1 on σ when r1' != in
edge l1 -> l1 on σ when (in != r1 & r1' == r1)
edge l1 -> l2 on σ when (in == r1 & r1' == r1)
";

/// Accepts every data word of length at least two.
pub const UNIVERSAL_LEN2: &str = "\
# accepts every data word of length >= 2
alphabet σ
registers 1
initial u0
accepting u2
edge u0 -> u1 on σ when true
edge u1 -> u2 on σ when true
edge u2 -> u2 on σ when true
";

/// Accepts every data word, including the empty one.
pub const SIGMA_STAR: &str = "\
# accepts every data word
alphabet σ
registers 1
initial u0
accepting u0
edge u0 -> u0 on σ when true
";

/// Two parallel unconstrained edges into the accepting location; ambiguous
/// already on words of length one.
pub const AMBIGUOUS: &str = "\
alphabet a
registers 1
initial p0
accepting p1
edge p0 -> p1 on a when true
edge p0 -> p1 on a when true
";

/// No accepting location: the empty language.
pub const EMPTY_LANG: &str = "\
alphabet σ
registers 1
initial e0
accepting
edge e0 -> e0 on σ when true
";

pub fn lad() -> Automaton {
    parse_automaton(LAD).expect("fixture parses")
}

pub fn universal_len2() -> Automaton {
    parse_automaton(UNIVERSAL_LEN2).expect("fixture parses")
}

pub fn sigma_star() -> Automaton {
    parse_automaton(SIGMA_STAR).expect("fixture parses")
}

pub fn ambiguous() -> Automaton {
    parse_automaton(AMBIGUOUS).expect("fixture parses")
}

pub fn empty_lang() -> Automaton {
    parse_automaton(EMPTY_LANG).expect("fixture parses")
}
