use std::path::{Path, PathBuf};

use glf::bridge::{
    ast_to_term, check_in_target_logic, fill_stub, install_language_theories, language_theories, language_theory,
    pending_assignments, term_to_ast, view_stub, BridgeError, Fragment,
};
use glf::grammar::{Ast, GrammarSet};
use glf::kernel::{alpha_eq, check, Context, Term};
use glf::shell::load_fragment;
use glf::theory::TheoryGraph;
use indexmap::IndexMap;

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(rel)
}

fn load(name: &str) -> Fragment {
    load_fragment(&corpus(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn ast(s: &str) -> Ast {
    Ast::parse(s).unwrap()
}

#[test]
fn life_language_theories() {
    let f = load("life");
    let ths = language_theories(&f.grammars, "LifeLex").unwrap();
    assert_eq!(
        ths.iter().map(|t| t.name.as_str()).collect::<Vec<_>>(),
        ["LifeGrammar", "LifeLex"]
    );
    assert_eq!(ths[1].includes, ["LifeGrammar"]);
    let flat = f.graph.flatten("LifeLex").unwrap();
    let decls: Vec<String> = flat
        .declarations()
        .map(|d| format!("{} : {}", d.name.name, flat.print(d.ty.as_ref().unwrap())))
        .collect();
    assert_eq!(
        decls,
        [
            "Stmt : type",
            "Person : type",
            "Action : type",
            "act : Person → Action → Stmt",
            "and_Stmt : Stmt → Stmt → Stmt",
            "joan : Person",
            "mary : Person",
            "love : Person → Action",
            "run : Action",
            "loveOneself : Action",
        ]
    );
}

#[test]
fn quantified_language_theory() {
    let f = load("quantified");
    let th = language_theory(&f.abstract_grammar).unwrap();
    assert_eq!(th.declarations.len(), 4 + 10);
    let flat = f.graph.flatten("Quantified").unwrap();
    let ms = flat.lookup("makeSentence").unwrap();
    assert_eq!(flat.print(ms.ty.as_ref().unwrap()), "NP → VP → S");
}

#[test]
fn empty_grammar_gives_empty_theory() {
    let mut set = GrammarSet::new();
    set.load_str("abstract Nothing = {\n}\n", "n.gf").unwrap();
    let th = language_theory(set.abstract_grammar("Nothing").unwrap()).unwrap();
    assert!(th.declarations.is_empty());
    assert!(th.includes.is_empty());
}

#[test]
fn reserved_words_clash() {
    let mut set = GrammarSet::new();
    set.load_str("abstract Clash = {\n  cat S ;\n  fun end : S ;\n}\n", "c.gf")
        .unwrap();
    let err = language_theory(set.abstract_grammar("Clash").unwrap()).unwrap_err();
    assert_eq!(
        err,
        BridgeError::NameClash {
            module: "Clash".into(),
            name: "end".into()
        }
    );
}

#[test]
fn hand_written_language_theory_must_agree() {
    let f = load("life");
    let text = std::fs::read_to_string(corpus("life/logic/LifeLanguage.thy")).unwrap();
    let wrong = text.replace("love : Person -> Action", "love : Person -> Stmt");
    assert_ne!(wrong, text);
    let mut g = TheoryGraph::new();
    g.load_str(&wrong, "LifeLanguage.thy").unwrap();
    let err = install_language_theories(&mut g, &f.grammars, "LifeLex").unwrap_err();
    assert!(
        matches!(err, BridgeError::LanguageTheoryMismatch { ref theory, .. } if theory == "LifeLex"),
        "{err}"
    );
}

#[test]
fn trees_as_terms() {
    let f = load("life");
    let abs = &f.abstract_grammar;
    let lex = f.graph.flatten("LifeLex").unwrap();
    let t = ast_to_term(abs, &ast("act joan (love mary)")).unwrap();
    assert!(alpha_eq(&t, &lex.parse("act joan (love mary)").unwrap()));
    assert_eq!(lex.print(&ast_to_term(abs, &ast("mary")).unwrap()), "mary");
    let not_tree = lex.parse("[p:Person] act p run").unwrap();
    assert!(matches!(term_to_ast(abs, &not_tree), Err(BridgeError::NotAnAst(_))));
}

#[test]
fn ast_term_inverse_on_enumerated_trees() {
    for name in ["life", "quantified", "modal"] {
        let f = load(name);
        let abs = &f.abstract_grammar;
        let cats: Vec<String> = abs.cats.keys().cloned().collect();
        let mut n = 0;
        for cat in &cats {
            for a in abs.enumerate(cat, 3) {
                let t = ast_to_term(abs, &a).unwrap();
                assert_eq!(term_to_ast(abs, &t).unwrap(), a);
                n += 1;
            }
        }
        assert!(n > 20, "{name}: only {n} trees");
    }
}

#[test]
fn stub_lists_every_undefined_constant() {
    let f = load("life");
    let lex = f.graph.flatten("LifeLex").unwrap();
    let stub = view_stub(&lex, "Filled", "LifeDT");
    let pending = pending_assignments(&stub);
    assert_eq!(
        pending,
        [
            "Stmt",
            "Person",
            "Action",
            "act",
            "and_Stmt",
            "joan",
            "mary",
            "love",
            "run",
            "loveOneself"
        ]
    );
    // The unfilled stub is a valid, partial view.
    let mut g = f.graph.clone();
    g.load_str(&stub, "stub.view").unwrap();
    assert_eq!(g.check_totality("Filled").unwrap().missing.len(), 10);
}

#[test]
fn filled_stub_is_total() {
    let f = load("life");
    let lex = f.graph.flatten("LifeLex").unwrap();
    let stub = view_stub(&lex, "Filled", "LifeDT");
    let text = std::fs::read_to_string(corpus("life/semantics/LifeSemantics.view")).unwrap();
    let values: IndexMap<String, String> = text
        .lines()
        .filter_map(|l| {
            let (k, v) = l.trim().strip_suffix(" ;")?.split_once(" = ")?;
            Some((k.to_string(), v.to_string()))
        })
        .collect();
    assert_eq!(values.len(), 10);
    let filled = fill_stub(&stub, &values);
    assert!(pending_assignments(&filled).is_empty());
    let mut g = f.graph.clone();
    g.load_str(&filled, "filled.view").unwrap();
    assert!(g.check_totality("Filled").unwrap().is_total());
    let t = ast_to_term(&f.abstract_grammar, &ast("act joan loveOneself")).unwrap();
    assert!(alpha_eq(
        &g.apply_view("Filled", &t).unwrap(),
        &g.apply_view("LifeLexSemantics", &t).unwrap()
    ));
}

#[test]
fn defined_constants_need_no_stub_lines() {
    let mut g = TheoryGraph::new();
    g.load_str(
        "theory Defs : LF =\n  Id : type -> type = [a:type] a ;\n  K : type -> type -> type = [a:type,b:type] a ;\nend\n",
        "d.thy",
    )
    .unwrap();
    let defs = g.flatten("Defs").unwrap();
    assert_eq!(defs.len(), 2);
    assert!(pending_assignments(&view_stub(&defs, "V", "Defs")).is_empty());
}

#[test]
fn target_logic_gate() {
    let f = load("quantified");
    let accepts = |s: &str| check_in_target_logic(f.target(), &f.parse_term(s).unwrap());
    assert!(accepts("∀ [x:ι] run' x").is_ok());
    assert!(accepts("love' joan' joan'").is_ok());
    assert!(accepts("∃ [x:ι] ∀ [y:ι] love' x y ∧ ¬ run' y").is_ok());
    let residue = f.parse_term("[p:ι -> o] p john'").unwrap();
    let r = check_in_target_logic(f.target(), &residue);
    assert_eq!(r.diagnostics.len(), 1);
    assert!(alpha_eq(&r.diagnostics[0].subterm, &residue));
    let nested = accepts("run' john' ∧ ([p:ι -> o] p john') run'");
    assert!(!nested.is_ok());
    let foreign = ast_to_term(&f.abstract_grammar, &ast("john")).unwrap();
    assert!(!check_in_target_logic(f.target(), &foreign).is_ok());
}

#[test]
fn constructions_are_well_typed_and_in_the_target() {
    // Quantified noun phrases nest freely: 819k of them at depth 4, against
    // 28k sentences.
    for name in ["life", "quantified", "modal"] {
        let f = load(name);
        let abs = &f.abstract_grammar;
        for cat in abs.cats.keys() {
            let depth = if name == "quantified" && *cat != f.start_category {
                3
            } else {
                4
            };
            let ty = f.category_type(cat).unwrap();
            for a in abs.enumerate(cat, depth) {
                let r = f.construct_ast(&a).unwrap_or_else(|e| panic!("{e}"));
                check(f.target().as_ref(), &Context::new(), &r.term, &ty).unwrap();
                if *cat == f.start_category {
                    assert!(r.check.is_ok(), "{name}: {a} gives {}", f.print(&r.term));
                }
            }
        }
    }
}

#[test]
fn construction_is_compositional() {
    let f = load("life");
    let and = f.target().lookup("and").unwrap().name.clone();
    let stmts = f.abstract_grammar.enumerate("Stmt", 3);
    assert_eq!(stmts.len(), 24);
    for a in &stmts {
        for b in &stmts {
            let whole = f
                .construct_ast(&Ast::node("and_Stmt", vec![a.clone(), b.clone()]))
                .unwrap();
            let parts = Term::apps(
                Term::constant(and.clone()),
                [f.construct_ast(a).unwrap().term, f.construct_ast(b).unwrap().term],
            );
            assert!(alpha_eq(&whole.term, &parts));
        }
    }
}

#[test]
fn construction_oracles() {
    let cases = [
        ("life", "Joan loves herself", vec!["love' joan' joan'"]),
        ("life", "Mary loves Joan", vec!["love' mary' joan'"]),
        (
            "quantified",
            "John and Mary love everyone",
            vec!["∀ [x:ι] love' john' x ∧ love' mary' x"],
        ),
        (
            "quantified",
            "everyone loves someone",
            vec!["∃ [y:ι] ∀ [x:ι] love' x y"],
        ),
        (
            "modal",
            "John doesn't believe that Mary has to run",
            vec!["¬ ⟦e john'⟧ ⟦d⟧ run' mary'"],
        ),
        ("modal", "John doesn't run", vec!["¬ run' john'"]),
    ];
    for (name, sentence, expected) in cases {
        let f = load(name);
        let got: Vec<Term> = f
            .construct("Eng", None, sentence)
            .unwrap()
            .into_iter()
            .map(|r| r.term)
            .collect();
        assert_eq!(got.len(), expected.len(), "{sentence}");
        for (g, e) in got.iter().zip(&expected) {
            assert!(alpha_eq(g, &f.parse_term(e).unwrap()), "{sentence}: {}", f.print(g));
        }
    }
}

#[test]
fn unknown_language_is_an_error() {
    let f = load("life");
    assert_eq!(
        f.construct("Fre", None, "Marie court").unwrap_err(),
        BridgeError::UnknownLanguage("Fre".into())
    );
    assert!(f.construct("Eng", None, "Mary flies").unwrap().is_empty());
}
