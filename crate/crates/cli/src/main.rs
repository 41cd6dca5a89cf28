//! `gra`: containment, membership, unambiguity checking, fuzzing and
//! configuration tracing for register automata with guessing.
//!
//! Exit codes are part of the machine interface: 0 for a positive answer
//! (contained, no violation, all fuzz instances agree), 1 for a negative one
//! (not contained, ambiguity found, fuzz disagreement), 2 for usage, parse or
//! semantic errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use gra_core::{
    accepts, check_containment, find_ambiguity, parse_automaton, run_fuzz, successor, Automaton,
    ConcreteState, Configuration, DataWord, FuzzParams, Verdict,
};

#[derive(Parser)]
#[command(
    name = "gra",
    about = "Containment checking for register automata with guessing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether L(A) is contained in L(B); B must be an unambiguous
    /// single-register automaton.
    Check {
        /// Automaton A (text format)
        file_a: PathBuf,
        /// Automaton B (text format, single register)
        file_b: PathBuf,
        /// Print the verdict as JSON
        #[arg(long)]
        json: bool,
        /// Skip the bounded unambiguity pre-check of B
        #[arg(long)]
        assume_unambiguous: bool,
    },
    /// Decide whether a data word is accepted.
    Member {
        file: PathBuf,
        /// Space-separated `tag:datum` pairs; empty for the empty word
        word: String,
    },
    /// Search for a word with two distinct accepting runs, up to a bound.
    Unambiguous {
        file: PathBuf,
        /// Maximum word length
        #[arg(long, default_value_t = 4)]
        bound: usize,
        /// Number of distinct data values
        #[arg(long, default_value_t = 8)]
        domain: u64,
    },
    /// Compare the symbolic engine against the brute-force oracle on random
    /// instances; one JSON record per line.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        instances: usize,
        /// Oracle word-length bound
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Oracle data-domain size
        #[arg(long, default_value_t = 10)]
        domain: u64,
        #[arg(long, default_value_t = 3)]
        max_locations: usize,
        #[arg(long, default_value_t = 4)]
        max_edges: usize,
        #[arg(long, default_value_t = 2)]
        max_registers_a: usize,
    },
    /// Print the symbolic configuration of a single-register automaton after
    /// each letter of a word, as JSON lines.
    Trace {
        file: PathBuf,
        /// Space-separated `tag:datum` pairs
        word: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Check {
            file_a,
            file_b,
            json,
            assume_unambiguous,
        } => check(&file_a, &file_b, json, assume_unambiguous),
        Command::Member { file, word } => member(&file, &word),
        Command::Unambiguous {
            file,
            bound,
            domain,
        } => unambiguous(&file, bound, domain),
        Command::Fuzz {
            seed,
            instances,
            max_len,
            domain,
            max_locations,
            max_edges,
            max_registers_a,
        } => fuzz(FuzzParams {
            max_word_length: max_len,
            data_domain_size: domain,
            max_locations,
            max_edges,
            max_registers_a,
            seed,
            instances,
        }),
        Command::Trace { file, word } => trace(&file, &word),
    }
}

fn load_automaton(path: &Path) -> Result<Automaton> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_automaton(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn parse_word_for(aut: &Automaton, word: &str, path: &Path) -> Result<DataWord> {
    let word = DataWord::parse(word).map_err(|e| anyhow!("bad word: {e}"))?;
    for letter in word.letters() {
        if !aut.has_tag(&letter.tag) {
            bail!(
                "tag `{}` is not in the alphabet of {}",
                letter.tag,
                path.display()
            );
        }
    }
    Ok(word)
}

const PRECHECK_BOUND: usize = 4;
const PRECHECK_DOMAIN: u64 = 8;

fn check(file_a: &Path, file_b: &Path, json: bool, assume_unambiguous: bool) -> Result<ExitCode> {
    let a = load_automaton(file_a)?;
    let b = load_automaton(file_b)?;
    if b.register_count != 1 {
        bail!(
            "{}: the right-hand automaton must have exactly 1 register, it has {}",
            file_b.display(),
            b.register_count
        );
    }
    if assume_unambiguous {
        eprintln!("note: unambiguity of B assumed, not checked");
    } else {
        match find_ambiguity(&b, PRECHECK_BOUND, PRECHECK_DOMAIN) {
            Some(witness) => bail!(
                "{}: not unambiguous, two accepting runs on `{}`",
                file_b.display(),
                witness.word
            ),
            None => eprintln!(
                "note: unambiguity of B verified only up to length {PRECHECK_BOUND} \
                 over a {PRECHECK_DOMAIN}-value domain; a verdict of CONTAINED relies on it"
            ),
        }
    }

    let report = check_containment(&a, &b)?;
    if json {
        println!("{}", report.to_json());
    } else {
        match &report.verdict {
            Verdict::Contained => println!("CONTAINED"),
            Verdict::NotContained { witness } => {
                println!("NOT CONTAINED");
                println!("witness: {witness}");
            }
        }
    }
    Ok(match report.verdict {
        Verdict::Contained => ExitCode::SUCCESS,
        Verdict::NotContained { .. } => ExitCode::from(1),
    })
}

fn member(file: &Path, word: &str) -> Result<ExitCode> {
    let aut = load_automaton(file)?;
    let word = parse_word_for(&aut, word, file)?;
    println!("{}", accepts(&aut, &word));
    Ok(ExitCode::SUCCESS)
}

fn unambiguous(file: &Path, bound: usize, domain: u64) -> Result<ExitCode> {
    let aut = load_automaton(file)?;
    match find_ambiguity(&aut, bound, domain) {
        None => {
            println!("no violation up to length {bound} over a {domain}-value domain");
            Ok(ExitCode::SUCCESS)
        }
        Some(witness) => {
            println!("ambiguous on word: {}", witness.word);
            println!("run 1: {}", format_run(&aut, &witness.word, &witness.run1));
            println!("run 2: {}", format_run(&aut, &witness.word, &witness.run2));
            Ok(ExitCode::from(1))
        }
    }
}

fn format_run(aut: &Automaton, word: &DataWord, run: &[ConcreteState]) -> String {
    let mut out = String::new();
    for (i, state) in run.iter().enumerate() {
        if i > 0 {
            write!(out, " --{}--> ", word.letters()[i - 1]).unwrap();
        }
        write!(out, "({},{})", aut.loc_name(state.loc), state.valuation).unwrap();
    }
    out
}

fn fuzz(params: FuzzParams) -> Result<ExitCode> {
    let summary = run_fuzz(&params, |instance| {
        println!(
            "{}",
            serde_json::to_string(&instance.record).expect("record serializes")
        );
        if let Some(err) = &instance.error {
            eprintln!("seed {}: {err}", instance.record.seed);
        }
    })?;
    eprintln!(
        "{} instances: {} contained, {} not contained, {} disagreements, {} errors",
        summary.instances,
        summary.contained,
        summary.not_contained,
        summary.disagreements,
        summary.errors
    );
    if summary.disagreements > 0 || summary.errors > 0 {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn trace(file: &Path, word: &str) -> Result<ExitCode> {
    let aut = load_automaton(file)?;
    if aut.register_count != 1 {
        bail!(
            "{}: tracing needs a single-register automaton, this one has {}",
            file.display(),
            aut.register_count
        );
    }
    let word = parse_word_for(&aut, word, file)?;
    let mut config = Configuration::initial(&aut);
    for letter in word.letters() {
        config = successor(&aut, &config, letter);
        println!("{}", config.to_debug_json(&aut));
    }
    Ok(ExitCode::SUCCESS)
}
