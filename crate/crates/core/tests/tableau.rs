mod common;

use std::path::Path;

use common::{eval, logic_over, oracle_check, random_formula, run_discourse, test_graph, test_logic, ATOMS};
use glf::kernel::{alpha_eq, Term};
use glf::shell::load_fragment;
use glf::tableau::{bottom, top, BeliefState, Logic, TableauError};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn t(l: &Logic, s: &str) -> Term {
    l.theory.parse(s).unwrap_or_else(|e| panic!("`{s}`: {e}"))
}

fn ts(l: &Logic, ss: &[&str]) -> Vec<Term> {
    ss.iter().map(|s| t(l, s)).collect()
}

fn models(s: &BeliefState) -> Vec<String> {
    s.models().iter().map(ToString::to_string).collect()
}

#[test]
fn empty_knowledge_gives_one_empty_branch() {
    let s = BeliefState::new(test_logic(), &[]).unwrap();
    assert_eq!(s.branches.len(), 1);
    assert!(s.branches[0].literals().is_empty());
    assert_eq!(models(&s), ["{}"]);
}

#[test]
fn axioms_induce_a_herbrand_model() {
    let l = test_logic();
    let s = BeliefState::new(l.clone(), &ts(&l, &["run' mary'", "run' john'"])).unwrap();
    assert_eq!(s.branches.len(), 1);
    assert_eq!(s.branches[0].literals().len(), 2);
    assert_eq!(models(&s), ["{run' john', run' mary'}"]);
}

#[test]
fn contradictory_knowledge_has_no_branches() {
    let l = test_logic();
    let s = BeliefState::new(l.clone(), &ts(&l, &["p0", "¬ p0"])).unwrap();
    assert!(s.is_inconsistent());
    assert!(s.models().is_empty());
}

#[test]
fn ill_typed_input_is_rejected() {
    let l = test_logic();
    let err = BeliefState::new(l.clone(), &ts(&l, &["john'"])).unwrap_err();
    assert!(matches!(err, TableauError::IllTypedAxiom { ref term, .. } if term == "john'"));
    let s = BeliefState::new(l.clone(), &[]).unwrap();
    assert_eq!(s.update("x", &[]).unwrap_err(), TableauError::EmptyReadings);
    assert!(matches!(
        s.update("x", &ts(&l, &["run'"])),
        Err(TableauError::IllTypedReading { .. })
    ));
}

#[test]
fn grounding_over_the_domain() {
    let l = test_logic();
    assert_eq!(
        l.domain().unwrap().iter().map(|d| l.print(d)).collect::<Vec<_>>(),
        ["john'", "mary'"]
    );
    let g = l.ground(&t(&l, "∀ [x:ι] run' x")).unwrap();
    assert!(alpha_eq(&g, &t(&l, "run' john' ∧ run' mary'")));
    let g = l.ground(&t(&l, "∃ [x:ι] ∀ [y:ι] love' x y")).unwrap();
    let expected = "love' john' john' ∧ love' john' mary' ∨ love' mary' john' ∧ love' mary' mary'";
    assert!(alpha_eq(&g, &t(&l, expected)), "{}", l.print(&g));
    let free = t(&l, "p0 ⇒ run' john'");
    assert_eq!(l.ground(&free).unwrap(), free);
}

#[test]
fn grounding_preserves_truth_over_two_individuals() {
    // Reuse the atom oracle: read run' john' as p0 and run' mary' as p1.
    let l = test_logic();
    let g = l.ground(&t(&l, "∀ [x:ι] run' x")).unwrap();
    let as_atoms = |u: &Term| {
        let s = l.print(u).replace("run' john'", "p0").replace("run' mary'", "p1");
        t(&l, &s)
    };
    let g = as_atoms(&g);
    for a in 0..4 {
        assert_eq!(eval(&g, a), a & 1 == 1 && a & 2 == 2);
    }
}

#[test]
fn singleton_and_empty_domains() {
    let graph = test_graph();
    let mut one = graph.clone();
    one.load_str(
        "theory One : LF =\n  include NoOne ;\n  john' : ι ;\n  love' : ι -> ι -> o ;\nend\n",
        "one.thy",
    )
    .unwrap();
    let l = logic_over(one.flatten("One").unwrap());
    let g = l.ground(&t(&l, "∃ [x:ι] love' x x")).unwrap();
    assert!(alpha_eq(&g, &t(&l, "love' john' john'")));

    let l = logic_over(graph.flatten("NoOne").unwrap());
    assert_eq!(l.ground(&t(&l, "∀ [x:ι] run' x")).unwrap(), top());
    assert_eq!(l.ground(&t(&l, "∃ [x:ι] run' x")).unwrap(), bottom());
    let s = BeliefState::new(l.clone(), &ts(&l, &["∀ [x:ι] run' x"])).unwrap();
    assert_eq!(models(&s), ["{}"]);
    assert!(BeliefState::new(l.clone(), &ts(&l, &["∃ [x:ι] run' x"]))
        .unwrap()
        .is_inconsistent());

    let mut untyped = l.clone();
    untyped.individuals = None;
    assert_eq!(
        untyped.ground(&t(&l, "∀ [x:ι] run' x")),
        Err(TableauError::NoDomainType)
    );
}

#[test]
fn alpha_and_beta_rules() {
    let l = test_logic();
    let s = BeliefState::new(l.clone(), &[]).unwrap();
    let conj = s.update("a", &ts(&l, &["run' john' ∧ run' mary'"])).unwrap();
    assert_eq!(conj.branches.len(), 1);
    assert_eq!(models(&conj), ["{run' john', run' mary'}"]);
    let disj = s.update("b", &ts(&l, &["p0 ∨ p1"])).unwrap();
    assert_eq!(models(&disj), ["{p0}", "{p1}"]);
    let imp = s.update("c", &ts(&l, &["p0 ⇒ p1"])).unwrap();
    assert_eq!(models(&imp), ["{¬ p0}", "{p1}"]);
    let nimp = s.update("d", &ts(&l, &["¬ (p0 ⇒ p1)"])).unwrap();
    assert_eq!(models(&nimp), ["{p0, ¬ p1}"]);
    let nor = s.update("e", &ts(&l, &["¬ (p0 ∨ ¬ ¬ p1)"])).unwrap();
    assert_eq!(models(&nor), ["{¬ p0, ¬ p1}"]);
    let nand = s.update("f", &ts(&l, &["¬ (p0 ∧ p1)"])).unwrap();
    assert_eq!(models(&nand), ["{¬ p0}", "{¬ p1}"]);
}

#[test]
fn defined_predicates_are_unfolded() {
    let l = test_logic();
    let s = BeliefState::new(l.clone(), &ts(&l, &["nand p0 p1", "p0"])).unwrap();
    assert_eq!(models(&s), ["{p0, ¬ p1}"]);
}

#[test]
fn modal_operators_are_opaque() {
    let f = load_fragment(&Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/modal")).unwrap();
    let l = f.logic();
    let s = BeliefState::new(l.clone(), &ts(&l, &["⟦d⟧ run' mary'"])).unwrap();
    assert_eq!(s.branches[0].literals().len(), 1);
    assert_eq!(models(&s), ["{⟦d⟧ run' mary'}"]);
    let both = s.update("x", &ts(&l, &["¬ ⟦d⟧ run' mary' ∨ run' john'"])).unwrap();
    assert_eq!(models(&both), ["{run' john', ⟦d⟧ run' mary'}"]);
}

#[test]
fn one_branch_per_reading() {
    let l = test_logic();
    let s = BeliefState::new(l.clone(), &[]).unwrap();
    let amb = s.update("x", &ts(&l, &["p0", "p1", "p0"])).unwrap();
    assert_eq!(amb.branches.len(), 2);
    assert_eq!(amb.history[0].readings.len(), 2);
    assert_eq!(models(&amb), ["{p0}", "{p1}"]);
}

#[test]
fn associativity_readings_stay_apart_but_agree() {
    let l = test_logic();
    let s = BeliefState::new(l.clone(), &[]).unwrap();
    let u = s.update("x", &ts(&l, &["(p0 ∧ p1) ∧ p2", "p0 ∧ (p1 ∧ p2)"])).unwrap();
    assert_eq!(u.history[0].readings.len(), 2);
    assert_eq!(u.branches.len(), 2);
    let key = |b: &glf::tableau::Branch| {
        let mut v: Vec<String> = b.literals().iter().map(|x| l.print_literal(x)).collect();
        v.sort();
        v
    };
    assert_eq!(key(&u.branches[0]), key(&u.branches[1]));
    assert_eq!(models(&u), ["{p0, p1, p2}"]);
}

#[test]
fn knowledge_resolves_ambiguity() {
    let l = test_logic();
    let s = BeliefState::new(l.clone(), &ts(&l, &["p0"])).unwrap();
    let u = s.update("x", &ts(&l, &["¬ p0", "p1"])).unwrap();
    assert_eq!(models(&u), ["{p0, p1}"]);
}

#[test]
fn updates_are_persistent() {
    let l = test_logic();
    let s = BeliefState::new(l.clone(), &[]).unwrap();
    let _ = s.update("x", &ts(&l, &["p0 ∨ p1"])).unwrap();
    assert_eq!(models(&s), ["{}"]);
    assert!(s.history.is_empty());
}

#[test]
fn budget_exhaustion_is_flagged() {
    let l = test_logic();
    let big = (0..ATOMS)
        .map(|i| format!("(p{i} ∨ ¬ p{i})"))
        .collect::<Vec<_>>()
        .join(" ∧ ");
    let s = BeliefState::with_budget(l.clone(), &ts(&l, &[&big]), 20).unwrap();
    assert!(s.exhausted);
    assert!(!s.branches.is_empty());
    assert!(s.branches.iter().any(|b| !b.is_saturated()));
    let full = BeliefState::new(l.clone(), &ts(&l, &[&big])).unwrap();
    assert!(!full.exhausted);
    assert_eq!(full.branches.len(), 1 << ATOMS);
}

#[test]
fn closure_needs_a_complementary_pair() {
    let l = test_logic();
    let s = BeliefState::new(l.clone(), &ts(&l, &["love' john' mary'", "¬ love' mary' john'"])).unwrap();
    assert_eq!(s.branches.len(), 1);
    let closed = s
        .update("x", &ts(&l, &["love' john' mary' ⇒ love' mary' john'"]))
        .unwrap();
    assert!(closed.is_inconsistent());
}

fn discourse(l: &Logic, seed: u64) -> (Vec<Term>, Vec<Vec<Term>>) {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kb = (0..rng.gen_range(0..3))
        .map(|_| random_formula(l, &mut rng, ATOMS, 3))
        .collect();
    let updates = (0..rng.gen_range(1..4))
        .map(|_| {
            (0..rng.gen_range(1..3))
                .map(|_| random_formula(l, &mut rng, ATOMS, 4))
                .collect()
        })
        .collect();
    (kb, updates)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn discourses_match_the_truth_table(seed: u64) {
        let l = test_logic();
        let (kb, updates) = discourse(&l, seed);
        let s = run_discourse(&l, &kb, &updates);
        prop_assert_eq!(oracle_check(&kb, &updates, &s), Ok(()));
    }

    #[test]
    fn analysis_is_deterministic(seed: u64) {
        let l = test_logic();
        let (kb, updates) = discourse(&l, seed);
        let a = run_discourse(&l, &kb, &updates);
        let b = run_discourse(&l, &kb, &updates);
        prop_assert_eq!(a.models(), b.models());
        let lits = |s: &BeliefState| s.branches.iter().map(|b| b.literals().to_vec()).collect::<Vec<_>>();
        prop_assert_eq!(lits(&a), lits(&b));
    }

    #[test]
    fn more_facts_never_add_branches(seed: u64, atom in 0..ATOMS, positive: bool) {
        let l = test_logic();
        let (kb, updates) = discourse(&l, seed);
        let fact = t(&l, &if positive { format!("p{atom}") } else { format!("¬ p{atom}") });
        let mut more = kb.clone();
        more.push(fact);
        let before = run_discourse(&l, &kb, &updates);
        let after = run_discourse(&l, &more, &updates);
        prop_assert!(after.branches.len() <= before.branches.len());
        prop_assert!(after.models().len() <= before.models().len());
    }

    #[test]
    fn more_knowledge_never_adds_models(seed: u64, extra_seed: u64) {
        let l = test_logic();
        let (kb, updates) = discourse(&l, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(extra_seed);
        let mut more = kb.clone();
        more.push(random_formula(&l, &mut rng, ATOMS, 3));
        let before = run_discourse(&l, &kb, &updates);
        let after = run_discourse(&l, &more, &updates);
        // Every total assignment that extends a branch after the addition
        // extended one before it.
        let covers = |s: &BeliefState, a: u32| {
            s.models().iter().any(|m| {
                m.literals.iter().all(|x| match &x.atom {
                    Term::Const(q) => (a >> q.name[1..].parse::<u32>().unwrap() & 1 == 1) == x.positive,
                    _ => unreachable!(),
                })
            })
        };
        for a in 0..(1u32 << ATOMS) {
            prop_assert!(!covers(&after, a) || covers(&before, a));
        }
    }
}

#[test]
fn disjunctive_knowledge_can_split_branches() {
    // Branch counts are not monotone in the knowledge: a disjunctive axiom
    // splits a branch that the discourse alone leaves whole.
    let l = test_logic();
    let updates = vec![ts(&l, &["p0"])];
    let before = run_discourse(&l, &[], &updates);
    let after = run_discourse(&l, &ts(&l, &["p1 ∨ p2"]), &updates);
    assert_eq!(models(&before), ["{p0}"]);
    assert_eq!(models(&after), ["{p0, p1}", "{p0, p2}"]);
}

#[test]
fn decided_disjunctions_do_not_split() {
    // Once found to exhaust the step budget before β-formulas were checked
    // against the branch literals.
    let l = test_logic();
    let (kb, updates) = discourse(&l, 319400186328760609);
    let s = run_discourse(&l, &kb, &updates);
    assert_eq!(oracle_check(&kb, &updates, &s), Ok(()));
    let s = BeliefState::new(l.clone(), &ts(&l, &["p0", "p0 ∨ p1", "¬ p1 ∧ (p1 ∨ p2)"])).unwrap();
    assert_eq!(models(&s), ["{p0, p2, ¬ p1}"]);
}
