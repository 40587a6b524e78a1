//! Shared by the tableau and acceptance suites: a propositional test logic,
//! a random formula generator and a truth-table oracle.
#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use glf::kernel::Term;
use glf::tableau::{BeliefState, Connectives, Logic};
use glf::theory::{FlatTheory, TheoryGraph};
use rand::Rng;

pub const ATOMS: usize = 8;

/// `Atoms`: eight propositional atoms `p0`..`p7`, two individuals and a few
/// predicates over first-order syntax. `NoOne`: the same logic without
/// individuals.
pub fn test_graph() -> TheoryGraph {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut g = TheoryGraph::new();
    for f in [
        "life/logic/PropLogic.thy",
        "life/logic/LogicSyntax.thy",
        "quantified/logic/FOLSyntax.thy",
    ] {
        g.load_file(&root.join(f)).unwrap();
    }
    let atoms: String = (0..ATOMS).map(|i| format!("  p{i} : o ;\n")).collect();
    g.load_str(
        &format!(
            "theory Atoms : LF =\n  include FOLSyntax ;\n{atoms}  john' : ι ;\n  mary' : ι ;\n  \
             run' : ι -> o ;\n  love' : ι -> ι -> o ;\n  nand : o -> o -> o = [a,b] ¬ (a ∧ b) ;\nend\n\
             theory NoOne : LF =\n  include FOLSyntax ;\n  run' : ι -> o ;\nend\n"
        ),
        "atoms.thy",
    )
    .unwrap();
    g
}

pub fn test_theory() -> Arc<FlatTheory> {
    test_graph().flatten("Atoms").unwrap()
}

pub fn logic_over(theory: Arc<FlatTheory>) -> Logic {
    let mut connectives = Connectives::default();
    for (role, name) in [
        ("and", "and"),
        ("or", "or"),
        ("not", "neg"),
        ("implies", "impl"),
        ("forall", "forall"),
        ("exists", "exists"),
    ] {
        if let Some(d) = theory.lookup(name) {
            connectives.set(role, d.name.clone()).unwrap();
        }
    }
    Logic {
        proposition: theory.parse("o").unwrap(),
        individuals: Some(theory.parse("ι").unwrap()),
        theory,
        connectives,
    }
}

pub fn test_logic() -> Logic {
    logic_over(test_theory())
}

fn c(l: &Logic, name: &str) -> Term {
    Term::constant(l.theory.lookup(name).unwrap().name.clone())
}

/// A random formula over `p0`..`p{atoms-1}` with ∧, ∨, ¬, ⇒ and depth at most `depth`.
pub fn random_formula(l: &Logic, rng: &mut impl Rng, atoms: usize, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return c(l, &format!("p{}", rng.gen_range(0..atoms)));
    }
    match rng.gen_range(0..4) {
        0 => Term::app(c(l, "neg"), random_formula(l, rng, atoms, depth - 1)),
        k => {
            let op = ["and", "or", "impl"][k - 1];
            let a = random_formula(l, rng, atoms, depth - 1);
            let b = random_formula(l, rng, atoms, depth - 1);
            Term::apps(c(l, op), [a, b])
        }
    }
}

/// Truth value under `assign`, bit i giving `p{i}`.
pub fn eval(t: &Term, assign: u32) -> bool {
    let (head, args) = t.spine();
    let Term::Const(q) = head else { panic!("not a formula") };
    match (q.name.as_str(), args.as_slice()) {
        ("and", [a, b]) => eval(a, assign) && eval(b, assign),
        ("or", [a, b]) => eval(a, assign) || eval(b, assign),
        ("impl", [a, b]) => !eval(a, assign) || eval(b, assign),
        ("neg", [a]) => !eval(a, assign),
        (p, []) => {
            let i: u32 = p.strip_prefix('p').and_then(|i| i.parse().ok()).expect("an atom");
            assign >> i & 1 == 1
        }
        _ => panic!("unexpected head {q}"),
    }
}

fn atom_index(t: &Term) -> u32 {
    match t {
        Term::Const(q) => q.name[1..].parse().unwrap(),
        _ => panic!("literal atoms are constants here"),
    }
}

/// Runs a discourse: world knowledge, then one update per reading list.
pub fn run_discourse(l: &Logic, kb: &[Term], updates: &[Vec<Term>]) -> BeliefState {
    let mut s = BeliefState::new(l.clone(), kb).unwrap();
    for (i, rs) in updates.iter().enumerate() {
        s = s.update(&format!("u{i}"), rs).unwrap();
    }
    s
}

/// Soundness and completeness of the open branches against all 2^8
/// assignments: every assignment extending a branch satisfies the discourse,
/// and every satisfying assignment extends some branch.
pub fn oracle_check(kb: &[Term], updates: &[Vec<Term>], state: &BeliefState) -> Result<(), String> {
    if state.exhausted {
        return Err("step budget exhausted".into());
    }
    let holds = |a: u32| kb.iter().all(|t| eval(t, a)) && updates.iter().all(|rs| rs.iter().any(|r| eval(r, a)));
    let branches: Vec<Vec<(u32, bool)>> = state
        .branches
        .iter()
        .map(|b| {
            assert!(b.is_saturated() && !b.is_closed());
            b.literals().iter().map(|l| (atom_index(&l.atom), l.positive)).collect()
        })
        .collect();
    let extends = |lits: &[(u32, bool)], a: u32| lits.iter().all(|&(i, pos)| (a >> i & 1 == 1) == pos);
    for a in 0..(1u32 << ATOMS) {
        let sat = holds(a);
        for (n, lits) in branches.iter().enumerate() {
            if extends(lits, a) && !sat {
                return Err(format!(
                    "unsound: branch {n} extends to an assignment {a:08b} that falsifies the discourse"
                ));
            }
        }
        if sat && !branches.iter().any(|lits| extends(lits, a)) {
            return Err(format!("incomplete: model {a:08b} extends no open branch"));
        }
    }
    Ok(())
}
