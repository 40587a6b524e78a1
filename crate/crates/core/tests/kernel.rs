use std::path::Path;
use std::sync::Arc;

use glf::kernel::{
    alpha_eq, check, check_proof, defeq, infer_type, normalize, normalize_with, substitute, Context, KernelError,
    NormalizeOptions, QName, Strategy, Term, Unfolding,
};
use glf::theory::{FlatTheory, TheoryGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn life_graph() -> TheoryGraph {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/life/logic");
    let mut g = TheoryGraph::new();
    for f in [
        "PropLogic.thy",
        "LogicSyntax.thy",
        "LifeDT.thy",
        "LifeProofs.thy",
        "LifeLanguage.thy",
    ] {
        g.load_file(&dir.join(f)).unwrap_or_else(|e| panic!("{f}: {e}"));
    }
    g
}

fn flat(name: &str) -> Arc<FlatTheory> {
    life_graph().flatten(name).unwrap()
}

fn parse(th: &FlatTheory, s: &str) -> Term {
    th.parse(s).unwrap_or_else(|e| panic!("`{s}`: {e}"))
}

#[test]
fn application_types() {
    let th = flat("LifeDT");
    let t = parse(&th, "love' joan' joan'");
    assert!(alpha_eq(
        &infer_type(th.as_ref(), &Context::new(), &t).unwrap(),
        &parse(&th, "o")
    ));
    let bad = parse(&th, "joan' joan'");
    assert!(matches!(
        infer_type(th.as_ref(), &Context::new(), &bad),
        Err(KernelError::NotAFunction { .. })
    ));
}

#[test]
fn tree_terms_have_their_category() {
    let th = flat("LifeLex");
    let t = parse(&th, "act joan (love mary)");
    let ty = infer_type(th.as_ref(), &Context::new(), &t).unwrap();
    assert_eq!(th.print(&ty), "Stmt");
}

#[test]
fn natural_deduction_proofs() {
    let th = flat("LifeProofs");
    let ded = th.lookup("ded").unwrap().name.clone();
    let both = parse(&th, "run' mary' ∧ run' joan'");
    let verdict = |proof: &str, prop: &Term| check_proof(th.as_ref(), &ded, &parse(&th, proof), prop);
    assert!(verdict("andI a1 a2", &both).accepted);
    assert!(!verdict("andI a2 a1", &both).accepted);
    let wrong = verdict("a1", &parse(&th, "run' joan'"));
    assert!(!wrong.accepted);
    assert!(wrong.diagnostic.is_some());
    assert!(verdict("andEl (andI a1 a2)", &parse(&th, "run' mary'")).accepted);
    assert!(verdict("andEr (andI a1 a2)", &parse(&th, "run' joan'")).accepted);
}

#[test]
fn defined_disjunction_unfolds_on_demand() {
    let th = flat("LogicSyntax");
    let or = parse(&th, "[a:o,b:o] a ∨ b");
    let unfolded = parse(&th, "[a:o,b:o] ¬ (¬ a ∧ ¬ b)");
    assert!(!alpha_eq(&normalize(th.as_ref(), &or).unwrap(), &unfolded));
    let full = NormalizeOptions {
        unfolding: Unfolding::Full,
        ..Default::default()
    };
    assert!(alpha_eq(&normalize_with(th.as_ref(), &or, &full).unwrap(), &unfolded));
    assert!(defeq(th.as_ref(), &or, &unfolded).unwrap());
}

#[test]
fn implicit_arguments_are_elaborated() {
    let th = flat("LifeProofs");
    let p = parse(&th, "andI a1 a2");
    let (head, args) = p.spine();
    assert!(matches!(head, Term::Const(q) if q.name == "andI"));
    assert_eq!(args.len(), 2, "implicits are not written");
    let ty = infer_type(th.as_ref(), &Context::new(), &p).unwrap();
    assert_eq!(th.print(&ty), "⊢ run' mary' ∧ run' joan'");
}

// Random well-typed terms over LifeDT, seeded through proptest.

#[derive(Clone, Copy, Debug, PartialEq)]
enum Ty {
    O,
    I,
    Pred,
    Rel,
    Quant,
}

impl Ty {
    fn term(self, th: &FlatTheory) -> Term {
        let s = match self {
            Ty::O => "o",
            Ty::I => "ι",
            Ty::Pred => "ι -> o",
            Ty::Rel => "ι -> ι -> o",
            Ty::Quant => "(ι -> o) -> o",
        };
        parse(th, s)
    }
}

struct Gen<'a> {
    th: &'a FlatTheory,
    rng: ChaCha8Rng,
    vars: Vec<(String, Ty)>,
    fresh: usize,
}

impl Gen<'_> {
    fn c(&self, name: &str) -> Term {
        Term::constant(self.th.lookup(name).unwrap().name.clone())
    }

    fn var_of(&mut self, ty: Ty) -> Option<Term> {
        // Only the innermost binder of a name is visible.
        let vs: Vec<&String> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(i, (n, t))| *t == ty && !self.vars[i + 1..].iter().any(|(m, _)| m == n))
            .map(|(_, (n, _))| n)
            .collect();
        if vs.is_empty() {
            return None;
        }
        Some(Term::var(vs[self.rng.gen_range(0..vs.len())].clone()))
    }

    fn bind(&mut self, dom: Ty, body_ty: Ty, depth: usize) -> Term {
        // Reuse names now and then to exercise shadowing and capture.
        let x = if self.rng.gen_bool(0.3) {
            "x".to_string()
        } else {
            self.fresh += 1;
            format!("v{}", self.fresh)
        };
        self.vars.push((x.clone(), dom));
        let body = self.gen(body_ty, depth);
        self.vars.pop();
        Term::lam(x, Some(dom.term(self.th)), body)
    }

    fn redex(&mut self, ty: Ty, depth: usize) -> Term {
        let dom = [Ty::I, Ty::O, Ty::Pred][self.rng.gen_range(0..3)];
        let f = self.bind(dom, ty, depth - 1);
        let a = self.gen(dom, depth - 1);
        Term::app(f, a)
    }

    fn gen(&mut self, ty: Ty, depth: usize) -> Term {
        if depth > 0 && self.rng.gen_bool(0.2) {
            return self.redex(ty, depth);
        }
        if self.rng.gen_bool(0.3) {
            if let Some(v) = self.var_of(ty) {
                return v;
            }
        }
        let d = depth.saturating_sub(1);
        match ty {
            Ty::I => {
                let i = self.rng.gen_range(0..2);
                self.c(["joan'", "mary'"][i])
            }
            Ty::O if depth == 0 => Term::app(self.c("run'"), self.gen(Ty::I, 0)),
            Ty::O => match self.rng.gen_range(0..6) {
                0 => Term::app(self.gen(Ty::Pred, d), self.gen(Ty::I, d)),
                1 => Term::apps(self.gen(Ty::Rel, d), [self.gen(Ty::I, d), self.gen(Ty::I, d)]),
                2 => Term::app(self.c("neg"), self.gen(Ty::O, d)),
                3 => {
                    let i = self.rng.gen_range(0..3);
                    let op = ["and", "or", "impl"][i];
                    Term::apps(self.c(op), [self.gen(Ty::O, d), self.gen(Ty::O, d)])
                }
                4 => Term::app(self.gen(Ty::Quant, d), self.gen(Ty::Pred, d)),
                _ => Term::app(self.c("run'"), self.gen(Ty::I, d)),
            },
            Ty::Pred if depth == 0 || self.rng.gen_bool(0.3) => self.c("run'"),
            Ty::Pred => match self.rng.gen_range(0..2) {
                0 => Term::app(self.gen(Ty::Rel, d), self.gen(Ty::I, d)),
                _ => self.bind(Ty::I, Ty::O, d),
            },
            Ty::Rel if depth == 0 || self.rng.gen_bool(0.5) => self.c("love'"),
            Ty::Rel => {
                let x = format!("r{}", self.fresh);
                self.fresh += 1;
                self.vars.push((x.clone(), Ty::I));
                let body = self.gen(Ty::Pred, d);
                self.vars.pop();
                Term::lam(x, Some(Ty::I.term(self.th)), body)
            }
            Ty::Quant => {
                // Type-raised individual `[p] p c`.
                self.fresh += 1;
                let p = format!("p{}", self.fresh);
                let c = self.gen(Ty::I, 0);
                Term::lam(p.clone(), Some(Ty::Pred.term(self.th)), Term::app(Term::var(p), c))
            }
        }
    }
}

fn random_prop(th: &FlatTheory, seed: u64, depth: usize) -> Term {
    Gen {
        th,
        rng: ChaCha8Rng::seed_from_u64(seed),
        vars: Vec::new(),
        fresh: 0,
    }
    .gen(Ty::O, depth)
}

fn has_redex(t: &Term) -> bool {
    match t {
        Term::App(f, a) => matches!(**f, Term::Lam(..)) || has_redex(f) || has_redex(a),
        Term::Lam(_, ty, b) => ty.as_deref().is_some_and(has_redex) || has_redex(b),
        Term::Pi(_, d, c) => has_redex(d) || has_redex(c),
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_terms_are_propositions(seed: u64, depth in 1usize..6) {
        let th = flat("LifeDT");
        let t = random_prop(&th, seed, depth);
        let ty = infer_type(th.as_ref(), &Context::new(), &t).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(alpha_eq(&ty, &Ty::O.term(&th)));
    }

    #[test]
    fn subject_reduction(seed: u64, depth in 1usize..6) {
        let th = flat("LifeDT");
        let t = random_prop(&th, seed, depth);
        let n = normalize(th.as_ref(), &t).unwrap();
        prop_assert!(!has_redex(&n), "{}", th.print(&n));
        prop_assert!(check(th.as_ref(), &Context::new(), &n, &Ty::O.term(&th)).is_ok());
    }

    #[test]
    fn strategies_agree(seed: u64, depth in 1usize..6) {
        let th = flat("LifeDT");
        let t = random_prop(&th, seed, depth);
        let outer = normalize(th.as_ref(), &t).unwrap();
        let inner = normalize_with(th.as_ref(), &t, &NormalizeOptions {
            strategy: Strategy::Applicative,
            ..Default::default()
        }).unwrap();
        prop_assert!(alpha_eq(&outer, &inner), "{} vs {}", th.print(&outer), th.print(&inner));
    }

    #[test]
    fn normalization_is_idempotent(seed: u64, depth in 1usize..6) {
        let th = flat("LifeDT");
        let n = normalize(th.as_ref(), &random_prop(&th, seed, depth)).unwrap();
        prop_assert!(alpha_eq(&normalize(th.as_ref(), &n).unwrap(), &n));
    }

    #[test]
    fn lazy_and_full_unfolding_are_convertible(seed: u64, depth in 1usize..5) {
        let th = flat("LifeDT");
        let t = random_prop(&th, seed, depth);
        let lazy = normalize(th.as_ref(), &t).unwrap();
        let full = normalize_with(th.as_ref(), &t, &NormalizeOptions {
            unfolding: Unfolding::Full,
            ..Default::default()
        }).unwrap();
        prop_assert!(defeq(th.as_ref(), &lazy, &full).unwrap());
    }

    #[test]
    fn substitution_laws(seed: u64, depth in 1usize..6) {
        let th = flat("LifeDT");
        let t = random_prop(&th, seed, depth);
        prop_assert!(alpha_eq(&substitute(&t, "x", &Term::var("x")), &t));
        // Closed terms are fixed by any substitution.
        prop_assert!(alpha_eq(&substitute(&t, "x", &Term::var("v1")), &t));
    }

    #[test]
    fn printing_round_trips(seed: u64, depth in 1usize..6) {
        let th = flat("LifeDT");
        for t in [random_prop(&th, seed, depth), normalize(th.as_ref(), &random_prop(&th, seed, depth)).unwrap()] {
            let printed = th.print(&t);
            let back = th.parse(&printed).map_err(|e| TestCaseError::fail(format!("`{printed}`: {e}")))?;
            prop_assert!(alpha_eq(&back, &t), "`{}` reparsed as `{}`", printed, th.print(&back));
        }
    }
}

#[test]
fn qualified_names_resolve() {
    let th = flat("LifeDT");
    let q = QName::new("LifeDT", "run'");
    assert!(th.contains(&q));
    assert_eq!(th.lookup("run'").unwrap().name, q);
}

#[test]
fn argument_type_mismatch_is_rejected() {
    let th = flat("LifeDT");
    let t = parse(&th, "([p:ι -> o] p joan') ([x:ι] x)");
    assert!(matches!(
        infer_type(th.as_ref(), &Context::new(), &t),
        Err(KernelError::TypeMismatch { .. })
    ));
    let shadowed = parse(&th, "[x:o] ([x:ι] x) joan'");
    let ty = infer_type(th.as_ref(), &Context::new(), &shadowed).unwrap();
    assert_eq!(th.print(&ty), "o → ι");
}
