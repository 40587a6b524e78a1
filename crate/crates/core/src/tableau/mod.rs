//! Semantic analysis by ground tableaux. A belief state is the list of open
//! branches; each update spawns one branch per reading and saturates. Open
//! saturated branches induce Herbrand models.

mod ground;

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{alpha_eq, alpha_key, check, normalize, Context, KernelError, QName, Term};
use crate::theory::FlatTheory;

/// Expansions allowed per update before saturation stops.
pub const DEFAULT_STEP_BUDGET: usize = 10_000;

/// Theory of the designated atoms that quantifiers over an empty domain
/// ground to.
pub const TABLEAU: &str = "tableau";

pub fn top() -> Term {
    Term::constant(QName::new(TABLEAU, "⊤"))
}

pub fn bottom() -> Term {
    Term::constant(QName::new(TABLEAU, "⊥"))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableauError {
    #[error("an update needs at least one reading")]
    EmptyReadings,
    #[error("world knowledge `{term}` is not a proposition: {error}")]
    IllTypedAxiom { term: String, error: KernelError },
    #[error("reading `{term}` is not a proposition: {error}")]
    IllTypedReading { term: String, error: KernelError },
    #[error("quantifiers need a type of individuals, and none is configured")]
    NoDomainType,
    #[error("grounding needs the `{0}` connective, which is not configured")]
    MissingConnective(&'static str),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Which constants of the logic play which role in the tableau rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Connectives {
    pub and: Option<QName>,
    pub or: Option<QName>,
    pub not: Option<QName>,
    pub implies: Option<QName>,
    pub forall: Option<QName>,
    pub exists: Option<QName>,
}

impl Connectives {
    pub const ROLES: [&'static str; 6] = ["and", "or", "not", "implies", "forall", "exists"];

    /// Assigns a constant to a role; unknown roles are rejected.
    pub fn set(&mut self, role: &str, q: QName) -> Result<(), String> {
        let slot = match role {
            "and" => &mut self.and,
            "or" => &mut self.or,
            "not" => &mut self.not,
            "implies" => &mut self.implies,
            "forall" => &mut self.forall,
            "exists" => &mut self.exists,
            _ => return Err(format!("unknown connective role `{role}`")),
        };
        *slot = Some(q);
        Ok(())
    }

    fn contains(&self, q: &QName) -> bool {
        [
            &self.and,
            &self.or,
            &self.not,
            &self.implies,
            &self.forall,
            &self.exists,
        ]
        .iter()
        .any(|c| c.as_ref() == Some(q))
    }
}

/// The signature analysis runs over.
#[derive(Clone, Debug)]
pub struct Logic {
    pub theory: Arc<FlatTheory>,
    pub proposition: Term,
    pub individuals: Option<Term>,
    pub connectives: Connectives,
}

impl Logic {
    pub fn print(&self, t: &Term) -> String {
        self.theory.print(t)
    }

    pub fn print_literal(&self, l: &Literal) -> String {
        let atom = self.print(&l.atom);
        if l.positive {
            return atom;
        }
        match &self.connectives.not {
            Some(n) => self.print(&Term::app(Term::constant(n.clone()), l.atom.clone())),
            None => format!("¬({atom})"),
        }
    }

    fn check_prop(&self, t: &Term) -> Result<Term, KernelError> {
        check(self.theory.as_ref(), &Context::new(), t, &self.proposition)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Literal {
    pub positive: bool,
    /// Ground and β-normal; its head is not a connective.
    pub atom: Term,
}

/// A tableau branch. Pending formulas carry their sign, so negation needs no
/// constant of its own.
#[derive(Clone, Debug, Default)]
pub struct Branch {
    literals: Vec<Literal>,
    keys: HashSet<(bool, String)>,
    pending: VecDeque<(bool, Term)>,
    closed: bool,
}

impl Branch {
    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn pending(&self) -> impl Iterator<Item = (bool, &Term)> + '_ {
        self.pending.iter().map(|(s, t)| (*s, t))
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_saturated(&self) -> bool {
        self.closed || self.pending.is_empty()
    }

    pub fn enqueue(&mut self, positive: bool, t: Term) {
        self.pending.push_back((positive, t));
    }

    fn add_literal(&mut self, positive: bool, atom: Term) {
        let key = alpha_key(&atom);
        if self.keys.contains(&(!positive, key.clone())) {
            self.closed = true;
        }
        if self.keys.insert((positive, key)) {
            self.literals.push(Literal { positive, atom });
        }
    }
}

enum Expansion {
    Alpha(Vec<(bool, Term)>),
    Beta(Vec<(bool, Term)>, Vec<(bool, Term)>),
    Literal(bool, Term),
    Close,
    Nothing,
}

enum Form<'a> {
    And(&'a Term, &'a Term),
    Or(&'a Term, &'a Term),
    Implies(&'a Term, &'a Term),
    Not(&'a Term),
    Top,
    Bottom,
    /// A defined non-connective head, unfolded once and β-normalized, or a
    /// quantifier that still needs grounding.
    Rewrite(Term),
    Atom,
}

/// Result of saturating a list of branches.
struct Saturation {
    open: Vec<Branch>,
    steps: usize,
    exhausted: bool,
}

impl Logic {
    fn classify<'a>(&self, t: &'a Term) -> Result<Form<'a>, TableauError> {
        let (head, args) = t.spine();
        let Term::Const(q) = head else { return Ok(Form::Atom) };
        let c = &self.connectives;
        let is = |r: &Option<QName>| r.as_ref() == Some(q);
        Ok(match args.as_slice() {
            [a, b] if is(&c.and) => Form::And(a, b),
            [a, b] if is(&c.or) => Form::Or(a, b),
            [a, b] if is(&c.implies) => Form::Implies(a, b),
            [a] if is(&c.not) => Form::Not(a),
            [_] if is(&c.forall) || is(&c.exists) => Form::Rewrite(self.ground(t)?),
            [] if q.theory == TABLEAU && q.name == "⊤" => Form::Top,
            [] if q.theory == TABLEAU && q.name == "⊥" => Form::Bottom,
            _ => match self.theory.get(q).and_then(|d| d.definiens.as_ref()) {
                Some(def) if !c.contains(q) => {
                    let unfolded = Term::apps(def.clone(), args.into_iter().cloned());
                    Form::Rewrite(normalize(self.theory.as_ref(), &unfolded)?)
                }
                _ => Form::Atom,
            },
        })
    }

    /// Truth value of `t` under every assignment extending the branch
    /// literals, when the connective structure alone decides it.
    fn value(&self, b: &Branch, t: &Term) -> Result<Option<bool>, TableauError> {
        Ok(match self.classify(t)? {
            Form::Not(a) => self.value(b, a)?.map(|v| !v),
            Form::And(x, y) => match self.value(b, x)? {
                Some(false) => Some(false),
                vx => match (vx, self.value(b, y)?) {
                    (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                },
            },
            Form::Or(x, y) => match self.value(b, x)? {
                Some(true) => Some(true),
                vx => match (vx, self.value(b, y)?) {
                    (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                },
            },
            Form::Implies(x, y) => match self.value(b, x)? {
                Some(false) => Some(true),
                vx => match (vx, self.value(b, y)?) {
                    (_, Some(true)) => Some(true),
                    (Some(true), Some(false)) => Some(false),
                    _ => None,
                },
            },
            Form::Top => Some(true),
            Form::Bottom => Some(false),
            Form::Rewrite(_) => None,
            Form::Atom => {
                let key = alpha_key(t);
                if b.keys.contains(&(true, key.clone())) {
                    Some(true)
                } else if b.keys.contains(&(false, key)) {
                    Some(false)
                } else {
                    None
                }
            }
        })
    }

    /// A β-formula already decided by the branch literals needs no split:
    /// true adds nothing, false closes the branch.
    fn expand_on(&self, b: &Branch, sign: bool, t: Term) -> Result<Expansion, TableauError> {
        let e = self.expand(sign, t.clone())?;
        if !matches!(e, Expansion::Beta(..)) {
            return Ok(e);
        }
        Ok(match self.value(b, &t)? {
            Some(v) if v == sign => Expansion::Nothing,
            Some(_) => Expansion::Close,
            None => e,
        })
    }

    fn expand(&self, sign: bool, t: Term) -> Result<Expansion, TableauError> {
        use Expansion::*;
        let s = |x: &Term| (sign, x.clone());
        let flip = |x: &Term| (!sign, x.clone());
        Ok(match self.classify(&t)? {
            Form::Not(a) => Alpha(vec![flip(a)]),
            Form::And(a, b) if sign => Alpha(vec![s(a), s(b)]),
            Form::And(a, b) => Beta(vec![s(a)], vec![s(b)]),
            Form::Or(a, b) if sign => Beta(vec![s(a)], vec![s(b)]),
            Form::Or(a, b) => Alpha(vec![s(a), s(b)]),
            Form::Implies(a, b) if sign => Beta(vec![(false, a.clone())], vec![(true, b.clone())]),
            Form::Implies(a, b) => Alpha(vec![(true, a.clone()), (false, b.clone())]),
            Form::Top if sign => Nothing,
            Form::Bottom if !sign => Nothing,
            Form::Top | Form::Bottom => Close,
            Form::Rewrite(u) => Alpha(vec![(sign, u)]),
            Form::Atom => Literal(sign, t),
        })
    }

    /// Expands pending formulas first in, first out, until every branch is
    /// saturated or `budget` expansions have been made. Closed branches are
    /// dropped; the left branch of a split precedes the right one.
    fn saturate(&self, branches: Vec<Branch>, budget: usize) -> Result<Saturation, TableauError> {
        let mut queue: VecDeque<Branch> = branches.into();
        let mut open = Vec::new();
        let mut steps = 0;
        let mut exhausted = false;
        while let Some(mut b) = queue.pop_front() {
            while !b.closed {
                let Some((sign, f)) = b.pending.pop_front() else { break };
                if steps == budget {
                    b.pending.push_front((sign, f));
                    exhausted = true;
                    break;
                }
                steps += 1;
                match self.expand_on(&b, sign, f)? {
                    Expansion::Alpha(fs) => b.pending.extend(fs),
                    Expansion::Beta(l, r) => {
                        let mut right = b.clone();
                        right.pending.extend(r);
                        b.pending.extend(l);
                        queue.push_front(right);
                    }
                    Expansion::Literal(sign, atom) => b.add_literal(sign, atom),
                    Expansion::Close => b.closed = true,
                    Expansion::Nothing => {}
                }
            }
            if !b.closed {
                open.push(b);
            }
            if exhausted {
                open.extend(queue.drain(..).filter(|b| !b.closed));
            }
        }
        Ok(Saturation { open, steps, exhausted })
    }
}

/// One processed update of a belief state.
#[derive(Clone, Debug, PartialEq)]
pub struct Update {
    pub label: String,
    /// Distinct readings, after normalization and before grounding.
    pub readings: Vec<Term>,
    pub steps: usize,
    pub open_branches: usize,
    pub exhausted: bool,
}

/// The open branches of a discourse's tableau. Updates return a new state.
#[derive(Clone, Debug)]
pub struct BeliefState {
    pub logic: Logic,
    pub world_knowledge: Vec<Term>,
    pub branches: Vec<Branch>,
    pub history: Vec<Update>,
    pub step_budget: usize,
    /// Whether the last saturation stopped at the budget. Such a state is
    /// still usable; some branches keep pending formulas.
    pub exhausted: bool,
}

/// The literals of one open branch, positive first, then by printed atom.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub literals: Vec<Literal>,
    printed: Vec<String>,
    keys: Vec<(bool, String)>,
}

impl Model {
    /// Printed literals, in model order.
    pub fn printed(&self) -> &[String] {
        &self.printed
    }

    pub fn positive_atoms(&self) -> impl Iterator<Item = &Term> + '_ {
        self.literals.iter().filter(|l| l.positive).map(|l| &l.atom)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.printed.join(", "))
    }
}

impl BeliefState {
    /// A single branch holding the grounded world knowledge, saturated once.
    pub fn new(logic: Logic, world_knowledge: &[Term]) -> Result<BeliefState, TableauError> {
        Self::with_budget(logic, world_knowledge, DEFAULT_STEP_BUDGET)
    }

    pub fn with_budget(
        logic: Logic,
        world_knowledge: &[Term],
        step_budget: usize,
    ) -> Result<BeliefState, TableauError> {
        let mut root = Branch::default();
        let mut axioms = Vec::new();
        for t in world_knowledge {
            let t = logic.check_prop(t).map_err(|error| TableauError::IllTypedAxiom {
                term: logic.print(t),
                error,
            })?;
            let t = normalize(logic.theory.as_ref(), &t)?;
            root.enqueue(true, logic.ground(&t)?);
            axioms.push(t);
        }
        let sat = logic.saturate(vec![root], step_budget)?;
        Ok(BeliefState {
            logic,
            world_knowledge: axioms,
            branches: sat.open,
            history: Vec::new(),
            step_budget,
            exhausted: sat.exhausted,
        })
    }

    /// Adds a sentence given by its readings: every open branch is copied once
    /// per distinct reading, then everything is saturated.
    pub fn update(&self, label: &str, readings: &[Term]) -> Result<BeliefState, TableauError> {
        if readings.is_empty() {
            return Err(TableauError::EmptyReadings);
        }
        let logic = &self.logic;
        let mut distinct: Vec<Term> = Vec::new();
        for r in readings {
            let r = logic.check_prop(r).map_err(|error| TableauError::IllTypedReading {
                term: logic.print(r),
                error,
            })?;
            let r = normalize(logic.theory.as_ref(), &r)?;
            if !distinct.iter().any(|d| alpha_eq(d, &r)) {
                distinct.push(r);
            }
        }
        let grounded = distinct
            .iter()
            .map(|r| logic.ground(r))
            .collect::<Result<Vec<_>, _>>()?;
        let mut next = Vec::with_capacity(self.branches.len() * grounded.len());
        for b in &self.branches {
            for g in &grounded {
                let mut c = b.clone();
                c.enqueue(true, g.clone());
                next.push(c);
            }
        }
        let sat = logic.saturate(next, self.step_budget)?;
        let mut history = self.history.clone();
        history.push(Update {
            label: label.to_string(),
            readings: distinct,
            steps: sat.steps,
            open_branches: sat.open.len(),
            exhausted: sat.exhausted,
        });
        Ok(BeliefState {
            logic: self.logic.clone(),
            world_knowledge: self.world_knowledge.clone(),
            branches: sat.open,
            history,
            step_budget: self.step_budget,
            exhausted: sat.exhausted,
        })
    }

    /// One model per open branch, duplicates merged, in branch order.
    pub fn models(&self) -> Vec<Model> {
        let mut out: Vec<Model> = Vec::new();
        for b in &self.branches {
            let mut lits: Vec<(String, Literal)> = b
                .literals
                .iter()
                .map(|l| (self.logic.print_literal(l), l.clone()))
                .collect();
            lits.sort_by(|(pa, a), (pb, b)| b.positive.cmp(&a.positive).then_with(|| pa.cmp(pb)));
            let mut keys: Vec<(bool, String)> = lits.iter().map(|(_, l)| (l.positive, alpha_key(&l.atom))).collect();
            keys.sort();
            let m = Model {
                printed: lits.iter().map(|(p, _)| p.clone()).collect(),
                literals: lits.into_iter().map(|(_, l)| l).collect(),
                keys,
            };
            if !out.iter().any(|o| o.keys == m.keys) {
                out.push(m);
            }
        }
        out
    }

    pub fn is_inconsistent(&self) -> bool {
        self.branches.is_empty()
    }
}
