use super::term::{substitute, Term};
use super::{KernelError, Signature};

pub const DEFAULT_STEP_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Leftmost-outermost.
    NormalOrder,
    /// Rightmost-innermost: arguments are normalized before contraction.
    Applicative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unfolding {
    /// Defined constants stay folded.
    Lazy,
    /// Every defined constant is replaced by its definiens.
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct NormalizeOptions {
    pub strategy: Strategy,
    pub unfolding: Unfolding,
    pub budget: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            strategy: Strategy::NormalOrder,
            unfolding: Unfolding::Lazy,
            budget: DEFAULT_STEP_BUDGET,
        }
    }
}

/// β-normal form with defined constants kept folded.
pub fn normalize<S: Signature + ?Sized>(sig: &S, t: &Term) -> Result<Term, KernelError> {
    normalize_with(sig, t, &NormalizeOptions::default())
}

pub fn normalize_with<S: Signature + ?Sized>(sig: &S, t: &Term, opts: &NormalizeOptions) -> Result<Term, KernelError> {
    let mut r = Reducer {
        sig,
        opts: *opts,
        steps: 0,
    };
    match opts.strategy {
        Strategy::NormalOrder => r.nf(t.clone()),
        Strategy::Applicative => r.nf_innermost(t.clone()),
    }
}

pub(crate) struct Reducer<'a, S: Signature + ?Sized> {
    pub sig: &'a S,
    pub opts: NormalizeOptions,
    pub steps: usize,
}

impl<'a, S: Signature + ?Sized> Reducer<'a, S> {
    pub fn new(sig: &'a S, unfolding: Unfolding) -> Self {
        Reducer {
            sig,
            opts: NormalizeOptions {
                unfolding,
                ..NormalizeOptions::default()
            },
            steps: 0,
        }
    }

    fn tick(&mut self) -> Result<(), KernelError> {
        self.steps += 1;
        if self.steps > self.opts.budget {
            Err(KernelError::NonTerminationGuard(self.opts.budget))
        } else {
            Ok(())
        }
    }

    fn definiens(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Const(q) => self.sig.declaration(q)?.definiens.clone(),
            _ => None,
        }
    }

    /// Reduces head redexes until the head is neither a β-redex nor (under full
    /// unfolding) a defined constant.
    pub fn whnf(&mut self, t: Term) -> Result<Term, KernelError> {
        let mut cur = t;
        loop {
            let (head, args) = {
                let (h, a) = cur.spine();
                (h.clone(), a.into_iter().cloned().collect::<Vec<_>>())
            };
            match head {
                Term::Lam(x, _, body) if !args.is_empty() => {
                    self.tick()?;
                    let mut args = args.into_iter();
                    let first = args.next().expect("nonempty");
                    cur = Term::apps(substitute(&body, &x, &first), args);
                }
                Term::Const(_) if self.opts.unfolding == Unfolding::Full => match self.definiens(&head) {
                    Some(d) => {
                        self.tick()?;
                        cur = Term::apps(d, args);
                    }
                    None => return Ok(cur),
                },
                _ => return Ok(cur),
            }
        }
    }

    pub fn nf(&mut self, t: Term) -> Result<Term, KernelError> {
        let t = self.whnf(t)?;
        match t {
            Term::App(..) => {
                let (head, args) = {
                    let (h, a) = t.spine();
                    (h.clone(), a.into_iter().cloned().collect::<Vec<_>>())
                };
                let head = self.nf(head)?;
                let mut out = head;
                for a in args {
                    out = Term::app(out, self.nf(a)?);
                }
                Ok(out)
            }
            Term::Lam(x, ty, body) => {
                let ty = match ty {
                    Some(ty) => Some(self.nf(*ty)?),
                    None => None,
                };
                Ok(Term::lam(x, ty, self.nf(*body)?))
            }
            Term::Pi(x, d, c) => Ok(Term::pi(x, self.nf(*d)?, self.nf(*c)?)),
            other => Ok(other),
        }
    }

    fn nf_innermost(&mut self, t: Term) -> Result<Term, KernelError> {
        match t {
            Term::App(f, a) => {
                // right argument first, then the function part
                let a = self.nf_innermost(*a)?;
                let f = self.nf_innermost(*f)?;
                match f {
                    Term::Lam(x, _, body) => {
                        self.tick()?;
                        self.nf_innermost(substitute(&body, &x, &a))
                    }
                    f => Ok(Term::app(f, a)),
                }
            }
            Term::Lam(x, ty, body) => {
                let body = self.nf_innermost(*body)?;
                let ty = match ty {
                    Some(ty) => Some(self.nf_innermost(*ty)?),
                    None => None,
                };
                Ok(Term::lam(x, ty, body))
            }
            Term::Pi(x, d, c) => {
                let c = self.nf_innermost(*c)?;
                Ok(Term::pi(x, self.nf_innermost(*d)?, c))
            }
            Term::Const(_) if self.opts.unfolding == Unfolding::Full => match self.definiens(&t) {
                Some(d) => {
                    self.tick()?;
                    self.nf_innermost(d)
                }
                None => Ok(t),
            },
            other => Ok(other),
        }
    }
}
