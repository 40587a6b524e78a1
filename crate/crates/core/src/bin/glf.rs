//! Command-line front end over a fragment directory.
//!
//! Exit status: 0 on success, 1 when a gold suite has failures, 2 when a
//! fragment, file or input cannot be processed.

#![allow(clippy::result_large_err)]

use std::io::{self, IsTerminal};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use glf::bridge::{view_stub, Fragment};
use glf::shell::{load_fragment, load_knowledge, manifest_path, run_gold_dir, GoldReport, Session, ShellError};

#[derive(Parser)]
#[command(
    name = "glf",
    version,
    about = "Grammars, theories and views as a natural-language understanding pipeline"
)]
struct Cli {
    /// Fragment directory or manifest file.
    #[arg(short, long, global = true, default_value = ".")]
    fragment: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a fragment and summarize it.
    Load { dir: Option<PathBuf> },
    /// Print the trees of a sentence.
    Parse {
        #[arg(long)]
        lang: Option<String>,
        #[arg(long)]
        cat: Option<String>,
        sentence: String,
    },
    /// Parse in one language and linearize in another.
    Translate {
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: String,
        #[arg(long)]
        cat: Option<String>,
        sentence: String,
    },
    /// Print the logical form of every reading.
    Construct {
        #[arg(long)]
        lang: Option<String>,
        #[arg(long)]
        cat: Option<String>,
        /// Also print the term before simplification.
        #[arg(long)]
        trace: bool,
        sentence: String,
    },
    /// Analyze a discourse, one sentence per argument, and print its models.
    Analyze {
        #[arg(long)]
        lang: Option<String>,
        /// World knowledge, one proposition per line.
        #[arg(long)]
        kb: Vec<PathBuf>,
        #[arg(required = true)]
        sentences: Vec<String>,
    },
    /// Run the gold suites of a fragment, or of every fragment below a directory.
    Gold { dir: Option<PathBuf> },
    /// Print a view skeleton from the fragment's language theory.
    Stub {
        #[arg(long)]
        view: String,
        #[arg(long)]
        target: String,
    },
    /// Interactive session; reads commands from standard input.
    Repl {
        #[arg(long)]
        kb: Vec<PathBuf>,
    },
}

enum Failure {
    Gold,
    Error(Box<ShellError>),
}

impl From<ShellError> for Failure {
    fn from(e: ShellError) -> Self {
        Failure::Error(Box::new(e))
    }
}

impl From<glf::bridge::BridgeError> for Failure {
    fn from(e: glf::bridge::BridgeError) -> Self {
        Failure::Error(Box::new(e.into()))
    }
}

impl From<glf::tableau::TableauError> for Failure {
    fn from(e: glf::tableau::TableauError) -> Self {
        Failure::Error(Box::new(e.into()))
    }
}

fn io_error(e: io::Error) -> Failure {
    Failure::Error(Box::new(ShellError::Io {
        path: "<stdio>".into(),
        message: e.to_string(),
    }))
}

fn knowledge(f: &Fragment, files: &[PathBuf]) -> Result<Vec<glf::kernel::Term>, ShellError> {
    let mut out = Vec::new();
    for p in files {
        out.extend(load_knowledge(f, p)?);
    }
    Ok(out)
}

fn session(f: Fragment, lang: Option<String>, kb: &[PathBuf]) -> Result<Session, Failure> {
    let kb = knowledge(&f, kb)?;
    let mut s = Session::new(f, kb)?;
    if let Some(l) = lang {
        s.fragment.concrete(&l)?;
        s.lang = l;
    }
    Ok(s)
}

fn summary(f: &Fragment) -> String {
    let mut out = vec![
        format!("fragment {}", f.name),
        format!(
            "  abstract {} (start category {})",
            f.abstract_grammar.name, f.start_category
        ),
    ];
    for (lang, c) in &f.concretes {
        out.push(format!("  concrete {lang}: {}", c.name()));
    }
    out.push(format!(
        "  view {} : {} -> {} ({} constants in the target)",
        f.view,
        f.language_theory,
        f.target().name(),
        f.target().len()
    ));
    out.join("\n")
}

/// Fragment directories at or directly below `dir`, sorted.
fn fragment_dirs(dir: &Path) -> Vec<PathBuf> {
    if manifest_path(dir).is_file() {
        return vec![dir.to_path_buf()];
    }
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(dir)
        .into_iter()
        .flatten()
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_dir() && manifest_path(p).is_file())
        .collect();
    dirs.sort();
    dirs
}

fn gold(dir: &Path) -> Result<(), Failure> {
    let dirs = fragment_dirs(dir);
    if dirs.is_empty() {
        return Err(ShellError::Load(format!("no fragment manifest in or below {}", dir.display())).into());
    }
    let mut all = GoldReport::default();
    for d in dirs {
        let f = load_fragment(&d)?;
        let gold = d.join("gold");
        let report = if gold.is_dir() {
            run_gold_dir(&f, &gold)?
        } else {
            GoldReport::default()
        };
        println!("{}: {report}", f.name);
        all.results.extend(report.results);
    }
    if all.is_success() {
        Ok(())
    } else {
        Err(Failure::Gold)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let frag = &cli.fragment;
    match cli.command {
        Command::Load { dir } => println!("{}", summary(&load_fragment(dir.as_deref().unwrap_or(frag))?)),
        Command::Parse { lang, cat, sentence } => {
            let mut s = session(load_fragment(frag)?, lang, &[])?;
            s.cat = cat;
            let trees = s.parse(&sentence)?;
            if trees.is_empty() {
                println!("no parse");
            }
            for t in trees {
                println!("{t}");
            }
        }
        Command::Translate {
            from,
            to,
            cat,
            sentence,
        } => {
            let f = load_fragment(frag)?;
            let from = match from {
                Some(l) => f.concrete(&l)?,
                None => f
                    .concretes
                    .values()
                    .next()
                    .ok_or_else(|| ShellError::Load("no concrete syntax".into()))?,
            };
            let out = from
                .translate(f.concrete(&to)?, cat.as_deref(), &sentence)
                .map_err(glf::bridge::BridgeError::from)?;
            if out.is_empty() {
                println!("no parse");
            }
            for s in out {
                println!("{s}");
            }
        }
        Command::Construct {
            lang,
            cat,
            trace,
            sentence,
        } => {
            let mut s = session(load_fragment(frag)?, lang, &[])?;
            s.cat = cat;
            s.trace = trace;
            let readings = s.construct(&sentence)?;
            if readings.is_empty() {
                println!("no parse");
            }
            for r in readings {
                if trace {
                    println!("{}  ~>  {}", r.ast, s.fragment.print(&r.applied));
                }
                println!("{}", s.fragment.print(&r.term));
            }
        }
        Command::Analyze { lang, kb, sentences } => {
            let mut s = session(load_fragment(frag)?, lang, &kb)?;
            let mut models = s.state.models();
            for sentence in &sentences {
                models = s.analyze(sentence)?;
            }
            println!("{}", s.render_models(&models));
        }
        Command::Gold { dir } => gold(dir.as_deref().unwrap_or(frag))?,
        Command::Stub { view, target } => {
            let f = load_fragment(frag)?;
            let lang = f
                .graph
                .flatten(&f.language_theory)
                .map_err(glf::bridge::BridgeError::from)?;
            print!("{}", view_stub(&lang, &view, &target));
        }
        Command::Repl { kb } => {
            let mut s = session(load_fragment(frag)?, None, &kb)?;
            let stdin = io::stdin();
            let prompt = stdin.is_terminal();
            if prompt {
                println!("{}\ntype `help` for commands", summary(&s.fragment));
            }
            s.run(stdin.lock(), io::stdout().lock(), prompt).map_err(io_error)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Gold) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("glf: {e}");
            ExitCode::from(2)
        }
    }
}
