//! The `espec` command line.
//!
//! Exit codes: 0 for related pairs and successful runs, 1 for unrelated
//! pairs, fixture mismatches, spectrum violations and searches that find
//! nothing, 2 for usage and input errors.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use espectrum::algebra::structure_of;
use espectrum::equiv::{check_prepared, full_matrix_prepared, MatrixOptions, Prepared, Relation};
use espectrum::io::{export_dot, format_es, read_es, write_es, DotSource};
use espectrum::search::{find_minimal_pairs, Criterion, SearchError, SearchSpec};
use espectrum::semantics::{build_lts, configurations, Mode};
use espectrum::spectrum::{builtin_fixtures, generate_pairs, verify_spectrum, CorpusSpec, Diagram};
use espectrum::{EventStructure, StructureClass};

#[derive(Parser, Debug)]
#[command(name = "espec", version, about = "Equivalences of finite labelled prime event structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a structure and print its class and relation sizes.
    Validate(One),
    /// Print a structure in the text format, or as a Hasse diagram with --dot.
    Show {
        #[command(flatten)]
        input: One,
        #[arg(long)]
        dot: bool,
    },
    /// Print the transition system over configurations.
    Lts {
        #[command(flatten)]
        input: One,
        #[arg(long, value_enum, default_value = "i")]
        mode: ModeArg,
        #[arg(long)]
        dot: bool,
    },
    /// Decide one relation; exits 0 if related and 1 if not.
    Check {
        relation: Relation,
        #[command(flatten)]
        inputs: Two,
        /// Print a witness or distinguishing evidence.
        #[arg(long)]
        witness: bool,
    },
    /// Print all ten verdicts.
    Matrix {
        #[command(flatten)]
        inputs: Two,
        /// Print the witness of every verdict.
        #[arg(long)]
        witness: bool,
    },
    /// Recompute every builtin fixture; exits 1 on any mismatch.
    Fixtures,
    /// Check the inclusion diagram of a class on a random corpus.
    Spectrum {
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        labels: usize,
        /// Also print the verdict bits of every pair.
        #[arg(long)]
        table: bool,
    },
    /// Find the smallest elementary structures told apart by one relation only.
    Search {
        #[arg(long, required_unless_present = "source_deleted")]
        coarse: Option<Relation>,
        #[arg(long, required_unless_present = "source_deleted")]
        fine: Option<Relation>,
        #[arg(long)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        labels: usize,
        /// Also require equal multisets of source-deleted substructures.
        #[arg(long)]
        sdm_filter: bool,
        /// Search for non-isomorphic pairs with equal source-deleted multisets instead.
        #[arg(long, conflicts_with_all = ["coarse", "fine"])]
        source_deleted: bool,
        /// Compare every pair of a size instead of bucketing by invariants.
        #[arg(long)]
        no_filters: bool,
        /// Write the pairs found as .es files into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct One {
    /// Algebraic expression such as "(a||b)+(a;b)".
    #[arg(long)]
    expr: Option<String>,
    /// Path to an .es file.
    #[arg(long)]
    file: Option<PathBuf>,
}

/// Two inputs, each `--expr` or `--file`, taken in command-line order.
#[derive(Args, Debug)]
struct Two {
    #[arg(long = "expr", value_name = "EXPR")]
    exprs: Vec<String>,
    #[arg(long = "file", value_name = "PATH")]
    files: Vec<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    I,
    S,
    P,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ClassArg {
    Pes,
    Cs,
    Ees,
}

enum Source {
    Expr(String),
    File(PathBuf),
}

fn load(source: &Source) -> Result<EventStructure> {
    match source {
        Source::Expr(e) => structure_of(e).with_context(|| format!("in expression `{e}`")),
        Source::File(p) => read_es(p).with_context(|| format!("in {}", p.display())),
    }
}

fn load_one(input: &One) -> Result<EventStructure> {
    match (&input.expr, &input.file) {
        (Some(e), _) => load(&Source::Expr(e.clone())),
        (_, Some(p)) => load(&Source::File(p.clone())),
        _ => bail!("give --expr or --file"),
    }
}

/// Orders the `--expr` and `--file` values by their position on the command line.
fn ordered_inputs(m: &ArgMatches) -> Result<[Source; 2]> {
    let mut found: Vec<(usize, Source)> = Vec::new();
    if let (Some(idx), Some(vals)) = (m.indices_of("exprs"), m.get_many::<String>("exprs")) {
        found.extend(idx.zip(vals).map(|(i, v)| (i, Source::Expr(v.clone()))));
    }
    if let (Some(idx), Some(vals)) = (m.indices_of("files"), m.get_many::<PathBuf>("files")) {
        found.extend(idx.zip(vals).map(|(i, v)| (i, Source::File(v.clone()))));
    }
    if found.len() != 2 {
        bail!("expected exactly two inputs (each --expr or --file), got {}", found.len());
    }
    found.sort_by_key(|(i, _)| *i);
    let mut it = found.into_iter().map(|(_, s)| s);
    Ok([it.next().unwrap(), it.next().unwrap()])
}

fn load_pair(m: &ArgMatches) -> Result<(Prepared, Prepared)> {
    let [a, b] = ordered_inputs(m)?;
    let prepare = |s: &Source| -> Result<Prepared> { Ok(Prepared::new(load(s)?)?) };
    Ok((prepare(&a)?, prepare(&b)?))
}

/// Escapes anything outside ASCII so that output stays plain.
fn ascii(text: &str) -> String {
    text.chars()
        .map(|c| if c.is_ascii() { c.to_string() } else { format!("\\u{{{:x}}}", c as u32) })
        .collect()
}

fn classes(s: &EventStructure) -> String {
    s.classify().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn execute(cli: Cli, matches: &ArgMatches, out: &mut String) -> Result<i32> {
    let sub = matches.subcommand().map(|(_, m)| m).expect("subcommand is required");
    match cli.command {
        Command::Validate(input) => {
            let s = load_one(&input)?;
            out.push_str(&format!("class: {}\n", classes(&s)));
            out.push_str(&format!("events: {}\n", s.len()));
            out.push_str(&format!("causality pairs: {}\n", s.causality().len()));
            out.push_str(&format!("conflict pairs: {}\n", s.conflict_pairs().len()));
            out.push_str(&format!("concurrency pairs: {}\n", s.concurrency().len()));
            if s.len() <= espectrum::semantics::LTS_EVENT_LIMIT {
                out.push_str(&format!("configurations: {}\n", configurations(&s).len()));
            }
            out.push_str(&format!("autoconcurrency: {}\n", if s.has_autoconcurrency() { "yes" } else { "no" }));
            Ok(0)
        }
        Command::Show { input, dot } => {
            let s = load_one(&input)?;
            out.push_str(&if dot { export_dot(DotSource::Structure(&s)) } else { format_es(&s) });
            Ok(0)
        }
        Command::Lts { input, mode, dot } => {
            let s = load_one(&input)?;
            let mode = match mode {
                ModeArg::I => Mode::Interleaving,
                ModeArg::S => Mode::Step,
                ModeArg::P => Mode::Pomset,
            };
            let lts = build_lts(&s, mode)?;
            if dot {
                out.push_str(&export_dot(DotSource::Lts(&lts)));
            } else {
                out.push_str(&format!("{} states, {} transitions\n", lts.states().len(), lts.transitions().len()));
                for t in lts.transitions() {
                    out.push_str(&format!("{} --{}--> {}\n", lts.states()[t.source], t.action, lts.states()[t.target]));
                }
            }
            Ok(0)
        }
        Command::Check { relation, witness, .. } => {
            let (a, b) = load_pair(sub)?;
            let v = check_prepared(relation, &a, &b, witness)?;
            out.push_str(&format!("{relation}: {}\n", if v.related { "related" } else { "not related" }));
            if let Some(w) = &v.witness {
                out.push_str(&w.to_string());
            }
            Ok(if v.related { 0 } else { 1 })
        }
        Command::Matrix { witness, .. } => {
            let (a, b) = load_pair(sub)?;
            let m = full_matrix_prepared(&a, &b, MatrixOptions { witnesses: witness, parallel: true })?;
            out.push_str(&m.to_string());
            if witness {
                for r in Relation::ALL {
                    if let Some(w) = m.witness(r) {
                        out.push_str(&format!("\n[{r}]\n{w}"));
                    }
                }
            }
            Ok(0)
        }
        Command::Fixtures => {
            let mut failures = 0;
            for f in builtin_fixtures() {
                let m = espectrum::equiv::full_matrix(&f.left, &f.right)?;
                let ok = m.bits() == f.expected.bits();
                failures += usize::from(!ok);
                out.push_str(&format!(
                    "{} {:<9} {} (expected {})  {}\n",
                    if ok { "ok  " } else { "FAIL" },
                    f.name,
                    m.bits(),
                    f.expected.bits(),
                    f.source
                ));
            }
            Ok(if failures == 0 { 0 } else { 1 })
        }
        Command::Spectrum { class, pairs, seed, max_size, labels, table } => {
            let class = match class {
                ClassArg::Pes => StructureClass::Pes,
                ClassArg::Cs => StructureClass::Cs,
                ClassArg::Ees => StructureClass::Ees,
            };
            let spec = CorpusSpec { count: pairs, ..CorpusSpec::new(class, max_size, labels, seed) };
            let corpus = generate_pairs(&spec)?;
            let diagram = if class == StructureClass::Ees && labels == 1 {
                Diagram::elementary_one_label()
            } else {
                Diagram::by_class(class)
            };
            let report = verify_spectrum(&corpus, &builtin_fixtures(), &diagram)?;
            out.push_str(&report.to_string());
            if table {
                out.push_str(&report.table());
            }
            Ok(if report.violation_count() == 0 { 0 } else { 1 })
        }
        Command::Search { coarse, fine, max_n, labels, sdm_filter, source_deleted, no_filters, out: dir } => {
            let criterion = if source_deleted {
                Criterion::SourceDeleted
            } else {
                Criterion::Separate { coarse: coarse.expect("required"), fine: fine.expect("required") }
            };
            let spec = SearchSpec { max_events: max_n, labels, criterion, filters: !no_filters, sdm_filter };
            let outcome = match find_minimal_pairs(&spec) {
                Ok(o) => o,
                Err(SearchError::NoPairFound(n)) => {
                    out.push_str(&format!("no pair found with at most {n} events\n"));
                    return Ok(1);
                }
                Err(e) => return Err(e.into()),
            };
            out.push_str(&outcome.certificate());
            for (i, (l, r)) in outcome.pairs.iter().enumerate() {
                out.push_str(&format!("\npair {i} left:\n{}", format_es(l)));
                out.push_str(&format!("pair {i} right:\n{}", format_es(r)));
                if let Some(dir) = &dir {
                    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                    write_es(l, dir.join(format!("pair-{i}-left.es")))?;
                    write_es(r, dir.join(format!("pair-{i}-right.es")))?;
                }
            }
            Ok(0)
        }
    }
}

/// Runs the command line given by `args` (program name first) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let text = ascii(&e.render().to_string());
            let code = if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", ascii(&e.render().to_string()));
            return 2;
        }
    };
    let mut text = String::new();
    let code = match execute(cli, &matches, &mut text) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", ascii(&format!("{e:#}")));
            2
        }
    };
    let _ = out.write_all(ascii(&text).as_bytes());
    code
}
