//! The logical-framework kernel: terms, substitution, β/δ-normalization and
//! LF type checking (including Curry-Howard proof checking).

mod reduce;
mod term;
mod typing;

pub use reduce::{normalize, normalize_with, NormalizeOptions, Strategy, Unfolding, DEFAULT_STEP_BUDGET};
pub use term::{alpha_eq, alpha_key, fresh_name, substitute, QName, Sort, Term, ARROW_BINDER};
pub use typing::{check, check_is_type, check_proof, defeq, elaborate, infer_type, Context, ProofVerdict};

use thiserror::Error;

/// One token of a mixfix notation: a literal lexeme or an argument placeholder `%i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NotationToken {
    Lit(String),
    Arg(usize),
}

/// Mixfix notation attached to a constant.
///
/// Placeholders number the Pi-arguments of the constant's type from 1. When the
/// placeholders start at `k + 1`, the first `k` arguments are implicit: they are
/// omitted from terms and inferred by the type checker.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Notation {
    pub tokens: Vec<NotationToken>,
    pub precedence: u32,
}

pub const DEFAULT_PRECEDENCE: u32 = 10;

impl Notation {
    pub fn arity(&self) -> usize {
        self.args().max().unwrap_or(0)
    }

    pub fn implicit_args(&self) -> usize {
        self.args().min().map_or(0, |m| m - 1)
    }

    pub fn explicit_arity(&self) -> usize {
        self.arity() - self.implicit_args()
    }

    pub fn args(&self) -> impl Iterator<Item = usize> + '_ {
        self.tokens.iter().filter_map(|t| match t {
            NotationToken::Arg(i) => Some(*i),
            NotationToken::Lit(_) => None,
        })
    }

    pub fn literals(&self) -> impl Iterator<Item = &str> + '_ {
        self.tokens.iter().filter_map(|t| match t {
            NotationToken::Lit(s) => Some(s.as_str()),
            NotationToken::Arg(_) => None,
        })
    }

    /// Checks the placeholder discipline against the number of Pi-arguments of
    /// the declared type.
    pub fn validate(&self, pi_args: usize) -> Result<(), String> {
        if self.literals().next().is_none() {
            return Err("notation needs at least one literal token".into());
        }
        let mut seen: Vec<usize> = self.args().collect();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0] == w[1] {
                return Err(format!("placeholder %{} occurs more than once", w[0]));
            }
        }
        if let (Some(lo), Some(hi)) = (seen.first(), seen.last()) {
            if *lo == 0 {
                return Err("placeholders are numbered from %1".into());
            }
            if hi - lo + 1 != seen.len() {
                return Err("placeholders must form a contiguous range ending at the arity".into());
            }
        }
        if self.arity() > pi_args {
            return Err(format!(
                "notation arity {} exceeds the {} arguments of the declared type",
                self.arity(),
                pi_args
            ));
        }
        Ok(())
    }
}

/// A constant declaration `c [: type] [= definiens] [# notation]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Declaration {
    pub name: QName,
    pub ty: Option<Term>,
    pub definiens: Option<Term>,
    pub notation: Option<Notation>,
}

impl Declaration {
    pub fn implicit_args(&self) -> usize {
        self.notation.as_ref().map_or(0, Notation::implicit_args)
    }
}

/// Anything that can resolve qualified constant names to declarations.
pub trait Signature {
    fn declaration(&self, name: &QName) -> Option<&Declaration>;
}

/// Counts the leading Pi binders of a type, without unfolding definitions.
pub fn pi_arity(ty: &Term) -> usize {
    let mut n = 0;
    let mut cur = ty;
    while let Term::Pi(_, _, cod) = cur {
        n += 1;
        cur = cod;
    }
    n
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("unknown constant {0}")]
    UnknownConstant(QName),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("type mismatch in `{term}`: expected {expected}, found {found}")]
    TypeMismatch { expected: Term, found: Term, term: Term },
    #[error("`{term}` has type {ty}, which is not a function type")]
    NotAFunction { term: Term, ty: Term },
    #[error("cannot infer the type of binder `{0}`; annotate it or use it where a function type is expected")]
    UntypedBinder(String),
    #[error("`{0}` is not a type")]
    NotAType(Term),
    #[error("`kind` has no type")]
    KindHasNoType,
    #[error("cannot infer implicit argument {index} of {constant}")]
    UnresolvedImplicit { constant: QName, index: usize },
    #[error("normalization exceeded the budget of {0} reduction steps")]
    NonTerminationGuard(usize),
}
