use std::io::{BufRead, Write};

use super::ShellError;
use crate::bridge::{Fragment, Reading};
use crate::grammar::Ast;
use crate::kernel::Term;
use crate::tableau::{BeliefState, Model};

pub const HELP: &str = "\
commands:
  parse <sentence>            trees of the sentence
  linearize <lang> <tree>     the tree in another language
  translate <lang> <sentence> parse, then linearize in <lang>
  construct <sentence>        logical form of every reading
  analyze <sentence>          add the sentence to the discourse, print models
  state                       models of the discourse so far
  reset                       forget the discourse
  lang <lang>                 input language
  cat <category>              start category (`cat -` for the default)
  trace on|off                also print terms before simplification
  help                        this text
  quit                        leave";

/// A fragment, its discourse state and the input options.
#[derive(Debug)]
pub struct Session {
    pub fragment: Fragment,
    pub knowledge: Vec<Term>,
    pub state: BeliefState,
    pub lang: String,
    pub cat: Option<String>,
    pub trace: bool,
}

pub enum Outcome {
    Continue(String),
    Quit,
}

impl Session {
    pub fn new(fragment: Fragment, knowledge: Vec<Term>) -> Result<Session, ShellError> {
        let state = BeliefState::new(fragment.logic(), &knowledge)?;
        let lang = fragment
            .concretes
            .keys()
            .next()
            .cloned()
            .ok_or_else(|| ShellError::Load(format!("fragment {} has no concrete syntax", fragment.name)))?;
        Ok(Session {
            fragment,
            knowledge,
            state,
            lang,
            cat: None,
            trace: false,
        })
    }

    pub fn parse(&self, sentence: &str) -> Result<Vec<Ast>, ShellError> {
        let conc = self.fragment.concrete(&self.lang)?;
        let cat = self.cat.as_deref().unwrap_or(&self.fragment.start_category);
        Ok(conc
            .parse(Some(cat), sentence)
            .map_err(crate::bridge::BridgeError::from)?)
    }

    pub fn construct(&self, sentence: &str) -> Result<Vec<Reading>, ShellError> {
        Ok(self.fragment.construct(&self.lang, self.cat.as_deref(), sentence)?)
    }

    /// Adds a sentence to the discourse and returns the models of the new
    /// state. A sentence without a parse leaves the state unchanged.
    pub fn analyze(&mut self, sentence: &str) -> Result<Vec<Model>, ShellError> {
        let readings = self.construct(sentence)?;
        if readings.is_empty() {
            return Err(ShellError::Load(format!("no parse for `{sentence}`")));
        }
        let terms: Vec<Term> = readings.into_iter().map(|r| r.term).collect();
        self.state = self.state.update(sentence, &terms)?;
        Ok(self.state.models())
    }

    pub fn reset(&mut self) -> Result<(), ShellError> {
        self.state = BeliefState::new(self.fragment.logic(), &self.knowledge)?;
        Ok(())
    }

    pub fn render_models(&self, models: &[Model]) -> String {
        if models.is_empty() {
            return "no open branches: the discourse is inconsistent".into();
        }
        let mut out: Vec<String> = models
            .iter()
            .enumerate()
            .map(|(i, m)| format!("model {}: {m}", i + 1))
            .collect();
        if self.state.exhausted {
            out.push("(step budget exhausted; branches may be unsaturated)".into());
        }
        out.join("\n")
    }

    fn render_readings(&self, readings: &[Reading]) -> String {
        if readings.is_empty() {
            return "no parse".into();
        }
        let mut out = Vec::new();
        for r in readings {
            if self.trace {
                out.push(format!("{}  ~>  {}", r.ast, self.fragment.print(&r.applied)));
            }
            out.push(self.fragment.print(&r.term));
            for d in &r.check.diagnostics {
                out.push(format!(
                    "  not in the target logic: {} ({})",
                    self.fragment.print(&d.subterm),
                    d.message
                ));
            }
        }
        out.join("\n")
    }

    fn command(&mut self, cmd: &str, arg: &str) -> Result<String, ShellError> {
        let need = |what: &str| -> Result<(), ShellError> {
            if arg.is_empty() {
                Err(ShellError::Load(format!("`{cmd}` needs {what}")))
            } else {
                Ok(())
            }
        };
        Ok(match cmd {
            "parse" => {
                need("a sentence")?;
                let trees = self.parse(arg)?;
                if trees.is_empty() {
                    "no parse".into()
                } else {
                    trees.iter().map(Ast::to_string).collect::<Vec<_>>().join("\n")
                }
            }
            "linearize" | "translate" => {
                let (lang, rest) = arg.split_once(char::is_whitespace).unwrap_or((arg, ""));
                need("a language and an argument")?;
                let to = self.fragment.concrete(lang)?;
                if cmd == "linearize" {
                    let ast = Ast::parse(rest.trim()).map_err(crate::bridge::BridgeError::from)?;
                    to.linearize(&ast).map_err(crate::bridge::BridgeError::from)?
                } else {
                    let from = self.fragment.concrete(&self.lang)?;
                    let out = from
                        .translate(to, self.cat.as_deref(), rest.trim())
                        .map_err(crate::bridge::BridgeError::from)?;
                    if out.is_empty() {
                        "no parse".into()
                    } else {
                        out.join("\n")
                    }
                }
            }
            "construct" => {
                need("a sentence")?;
                let rs = self.construct(arg)?;
                self.render_readings(&rs)
            }
            "analyze" => {
                need("a sentence")?;
                let ms = self.analyze(arg)?;
                self.render_models(&ms)
            }
            "state" => self.render_models(&self.state.models()),
            "reset" => {
                self.reset()?;
                "discourse cleared".into()
            }
            "lang" => {
                need("a language")?;
                self.fragment.concrete(arg)?;
                self.lang = arg.to_string();
                format!("language: {arg}")
            }
            "cat" => {
                need("a category")?;
                if arg == "-" {
                    self.cat = None;
                } else {
                    self.fragment.category_type(arg)?;
                    self.cat = Some(arg.to_string());
                }
                format!(
                    "category: {}",
                    self.cat.as_deref().unwrap_or(&self.fragment.start_category)
                )
            }
            "trace" => {
                self.trace = match arg {
                    "on" => true,
                    "off" => false,
                    _ => return Err(ShellError::Load("`trace` takes `on` or `off`".into())),
                };
                format!("trace: {arg}")
            }
            "help" => HELP.into(),
            _ => return Err(ShellError::Load(format!("unknown command `{cmd}`; try `help`"))),
        })
    }

    /// Runs one input line. Errors are reported in the output; only `quit`
    /// ends the session.
    pub fn execute(&mut self, line: &str) -> Outcome {
        let line = line.trim();
        if line.is_empty() {
            return Outcome::Continue(String::new());
        }
        let (cmd, arg) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        if cmd == "quit" || cmd == "exit" {
            return Outcome::Quit;
        }
        match self.command(cmd, arg.trim()) {
            Ok(s) => Outcome::Continue(s),
            Err(e) => Outcome::Continue(format!("error: {e}")),
        }
    }

    /// Reads commands until `quit` or end of input.
    pub fn run(&mut self, input: impl BufRead, mut output: impl Write, prompt: bool) -> std::io::Result<()> {
        let mut lines = input.lines();
        loop {
            if prompt {
                write!(output, "glf> ")?;
                output.flush()?;
            }
            let Some(line) = lines.next().transpose()? else { break };
            match self.execute(&line) {
                Outcome::Quit => break,
                Outcome::Continue(s) if s.is_empty() => {}
                Outcome::Continue(s) => writeln!(output, "{s}")?,
            }
        }
        Ok(())
    }
}
