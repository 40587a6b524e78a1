//! End-to-end acceptance: one PASS/FAIL line per criterion, then a single
//! exit status over all of them. Limits and sizes are pinned below.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{oracle_check, run_discourse, test_logic, ATOMS};
use glf::bridge::{check_in_target_logic, BridgeError, Fragment};
use glf::grammar::Ast;
use glf::kernel::{alpha_eq, alpha_key, check_proof, Term};
use glf::shell::{load_fragment, parse_gold, ShellError};
use glf::tableau::BeliefState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Per-sentence limit on semantics construction.
const CONSTRUCT_LIMIT: Duration = Duration::from_secs(1);
/// Limit on the whole random tableau run.
const TABLEAU_LIMIT: Duration = Duration::from_secs(30);
const RANDOM_FORMULAS: usize = 500;
const FORMULA_DEPTH: usize = 6;
const TABLEAU_SEED: u64 = 0x5eed_7ab1;
const ROUND_TRIP_DEPTH: usize = 4;
/// Gold cases the shipped corpus must hold at least.
const MIN_GOLD_CASES: usize = 20;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn load(name: &str) -> Result<Fragment, String> {
    load_fragment(&corpus().join(name)).map_err(|e| format!("{name}: {e}"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Copies a directory tree.
fn copy_tree(from: &Path, to: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(to)?;
    for entry in std::fs::read_dir(from)? {
        let entry = entry?;
        let dest = to.join(entry.file_name());
        if entry.file_type()?.is_dir() {
            copy_tree(&entry.path(), &dest)?;
        } else {
            std::fs::copy(entry.path(), dest)?;
        }
    }
    Ok(())
}

fn pipeline() -> Outcome {
    let cases = [
        ("life", "Joan loves herself", "love' joan' joan'"),
        (
            "quantified",
            "John and Mary love everyone",
            "∀[x:ι](love' john' x)∧(love' mary' x)",
        ),
        ("modal", "John doesn't run", "¬(run' john')"),
        (
            "modal",
            "John doesn't believe that Mary has to run",
            "¬⟦e john'⟧⟦d⟧(run' mary')",
        ),
    ];
    let mut slowest = Duration::ZERO;
    for (name, sentence, expected) in cases {
        let f = load(name)?;
        let start = Instant::now();
        let readings = f.construct("Eng", None, sentence).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        ensure(took < CONSTRUCT_LIMIT, || format!("{sentence}: {took:?}"))?;
        let expected = f.parse_term(expected).map_err(|e| e.to_string())?;
        ensure(readings.len() == 1, || {
            format!("{sentence}: {} readings", readings.len())
        })?;
        ensure(alpha_eq(&readings[0].term, &expected), || {
            format!("{sentence}: got {}", f.print(&readings[0].term))
        })?;
    }
    Ok(format!("4 sentences, slowest {slowest:?}"))
}

fn translation() -> Outcome {
    let f = load("life")?;
    let eng = f.concrete("Eng").map_err(|e| e.to_string())?;
    let ger = f.concrete("Ger").map_err(|e| e.to_string())?;
    let out = eng
        .translate(ger, None, "Mary loves herself")
        .map_err(|e| e.to_string())?;
    ensure(out == ["Maria liebt sich"], || format!("{out:?}"))?;
    Ok("Mary loves herself -> Maria liebt sich".into())
}

fn ast_reproduction() -> Outcome {
    let cases = [
        (
            "quantified",
            "John and Mary love everyone",
            "makeSentence (and_NP john mary) (applyObject love everyone)",
        ),
        ("life", "Joan loves herself", "act joan loveOneself"),
    ];
    for (name, sentence, expected) in cases {
        let f = load(name)?;
        let asts = f
            .concrete("Eng")
            .unwrap()
            .parse(None, sentence)
            .map_err(|e| e.to_string())?;
        let expected = Ast::parse(expected).unwrap();
        ensure(asts == [expected.clone()], || format!("{sentence}: {asts:?}"))?;
    }
    Ok("2 sentences, one tree each".into())
}

/// Assignment lines of the Life semantics views, as written.
fn assignment_lines(view_text: &str) -> Vec<(String, String)> {
    view_text
        .lines()
        .filter_map(|l| {
            let (name, _) = l.trim().strip_suffix(" ;")?.split_once(" = ")?;
            Some((l.to_string(), name.to_string()))
        })
        .collect()
}

fn totality_gate() -> Outcome {
    let view_file = corpus().join("life/semantics/LifeSemantics.view");
    let text = std::fs::read_to_string(&view_file).map_err(|e| e.to_string())?;
    let lines = assignment_lines(&text);
    ensure(lines.len() == 10, || format!("{} assignment lines", lines.len()))?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let life = tmp.path().join("life");
    copy_tree(&corpus().join("life"), &life).map_err(|e| e.to_string())?;
    for (line, name) in &lines {
        let cut = text.replacen(&format!("{line}\n"), "", 1);
        std::fs::write(life.join("semantics/LifeSemantics.view"), cut).map_err(|e| e.to_string())?;
        match load_fragment(&life) {
            Err(ShellError::Bridge(BridgeError::TotalityFailure { view, missing })) => {
                let names: Vec<&str> = missing.iter().map(|q| q.name.as_str()).collect();
                ensure(view == "LifeLexSemantics" && names == [name.as_str()], || {
                    format!("without {name}: {view} misses {names:?}")
                })?;
            }
            Err(e) => return Err(format!("without {name}: {e}")),
            Ok(_) => return Err(format!("without {name}: loaded")),
        }
    }
    Ok(format!("{} deletions, each named", lines.len()))
}

fn proof_checking() -> Outcome {
    let f = load("life")?;
    let th = f.graph.flatten("LifeProofs").map_err(|e| e.to_string())?;
    let ded = th.lookup("ded").ok_or("no ded")?.name.clone();
    // The stored definiens has its implicit arguments filled in; the checker
    // takes the term as written.
    let file = corpus().join("life/logic/LifeProofs.thy");
    let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
    let written = text
        .lines()
        .find_map(|l| {
            l.trim()
                .strip_prefix("proof :")?
                .split_once(" = ")?
                .1
                .strip_suffix(" ;")
        })
        .ok_or("no proof declaration")?;
    let proof = th.parse(written).map_err(|e| e.to_string())?;
    let prop = th.parse("run' mary' ∧ run' joan'").map_err(|e| e.to_string())?;
    let verdict = check_proof(th.as_ref(), &ded, &proof, &prop);
    ensure(verdict.accepted, || {
        format!("corpus proof rejected: {:?}", verdict.diagnostic)
    })?;
    let swapped = th.parse("andI a2 a1").map_err(|e| e.to_string())?;
    let verdict = check_proof(th.as_ref(), &ded, &swapped, &prop);
    ensure(!verdict.accepted, || "swapped proof accepted".into())?;
    Ok(format!("accepted {written}, rejected andI a2 a1"))
}

fn tableau_oracle() -> Outcome {
    let l = test_logic();
    let mut rng = ChaCha8Rng::seed_from_u64(TABLEAU_SEED);
    let start = Instant::now();
    let mut branches = 0;
    for i in 0..RANDOM_FORMULAS {
        let f = common::random_formula(&l, &mut rng, ATOMS, FORMULA_DEPTH);
        let updates = vec![vec![f]];
        let s = run_discourse(&l, &[], &updates);
        oracle_check(&[], &updates, &s).map_err(|e| format!("formula {i} `{}`: {e}", l.print(&updates[0][0])))?;
        branches += s.branches.len();
    }
    let took = start.elapsed();
    ensure(took < TABLEAU_LIMIT, || format!("{took:?}"))?;
    Ok(format!(
        "{RANDOM_FORMULAS} formulas, {branches} open branches, {took:?}"
    ))
}

fn ambiguity() -> Outcome {
    let f = load("quantified")?;
    let readings = f
        .construct("Eng", None, "John and Mary and Joan run")
        .map_err(|e| e.to_string())?;
    ensure(readings.len() == 2, || format!("{} readings", readings.len()))?;
    ensure(readings[0].ast != readings[1].ast, || "identical trees".into())?;
    let terms: Vec<Term> = readings.iter().map(|r| r.term.clone()).collect();
    let s = BeliefState::new(f.logic(), &[]).map_err(|e| e.to_string())?;
    let s = s.update("s", &terms).map_err(|e| e.to_string())?;
    ensure(s.branches.len() == 2 && !s.exhausted, || {
        format!("{} branches", s.branches.len())
    })?;
    let lits: Vec<Vec<(bool, String)>> = s
        .branches
        .iter()
        .map(|b| {
            let mut v: Vec<_> = b.literals().iter().map(|l| (l.positive, alpha_key(&l.atom))).collect();
            v.sort();
            v
        })
        .collect();
    ensure(lits[0] == lits[1], || format!("{:?}", s.models()))?;
    Ok(format!("2 trees, shared model {}", s.models()[0]))
}

fn round_trip() -> Outcome {
    let mut summary = Vec::new();
    for name in ["life", "quantified", "modal"] {
        let f = load(name)?;
        let abs = &f.abstract_grammar;
        let trees = abs.enumerate(&f.start_category, ROUND_TRIP_DEPTH);
        for (lang, c) in &f.concretes {
            for t in &trees {
                let s = c.linearize(t).map_err(|e| format!("{t}: {e}"))?;
                let back = c.parse(Some(&f.start_category), &s).map_err(|e| e.to_string())?;
                ensure(back.contains(t), || format!("{name} {lang}: {t} -> {s:?}"))?;
            }
            summary.push(format!("{name}/{lang} {}", trees.len()));
        }
    }
    Ok(summary.join(", "))
}

fn target_logic_gate() -> Outcome {
    let mut checked = 0;
    for name in ["life", "quantified", "modal"] {
        let f = load(name)?;
        let dir = corpus().join(name).join("gold");
        for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            for case in parse_gold(&text, &path.display().to_string()).map_err(|e| e.to_string())? {
                // Meanings of other categories are functions, not formulas.
                if case.cat != f.start_category {
                    continue;
                }
                for e in &case.expected {
                    let t = f.parse_term(e).map_err(|err| format!("`{e}`: {err}"))?;
                    let r = check_in_target_logic(f.target(), &t);
                    ensure(r.is_ok(), || format!("`{e}` rejected: {:?}", r.diagnostics))?;
                    checked += 1;
                }
            }
        }
    }
    let f = load("quantified")?;
    let residue = f.parse_term("[p:ι → o] p john'").map_err(|e| e.to_string())?;
    ensure(!check_in_target_logic(f.target(), &residue).is_ok(), || {
        "residue accepted".into()
    })?;
    Ok(format!("{checked} gold formulas accepted, residue rejected"))
}

fn run_gold_cli(dir: &Path) -> Result<(Option<i32>, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_glf"))
        .arg("gold")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn gold_regression() -> Outcome {
    let mut cases = 0;
    for name in ["life", "quantified", "modal"] {
        let dir = corpus().join(name).join("gold");
        for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            cases += parse_gold(&text, "").map_err(|e| e.to_string())?.len();
        }
    }
    ensure(cases >= MIN_GOLD_CASES, || format!("only {cases} gold cases"))?;
    let (code, out) = run_gold_cli(&corpus())?;
    ensure(code == Some(0), || format!("corpus exit {code:?}:\n{out}"))?;

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    copy_tree(&corpus(), tmp.path()).map_err(|e| e.to_string())?;
    let gold = tmp.path().join("life/gold/life.gold");
    let text = std::fs::read_to_string(&gold).map_err(|e| e.to_string())?;
    let corrupted = text.replacen("love' joan' joan'", "love' joan' mary'", 1);
    ensure(corrupted != text, || "nothing to corrupt".into())?;
    std::fs::write(&gold, corrupted).map_err(|e| e.to_string())?;
    let (code, out) = run_gold_cli(tmp.path())?;
    ensure(code == Some(1), || format!("corrupted exit {code:?}:\n{out}"))?;
    Ok(format!("{cases} cases exit 0, one corrupted expectation exits 1"))
}

fn main() -> std::process::ExitCode {
    let criteria: [Criterion; 10] = [
        ("pipeline reproduction", pipeline),
        ("translation", translation),
        ("parse trees", ast_reproduction),
        ("totality gate", totality_gate),
        ("proof checking", proof_checking),
        ("tableau oracle", tableau_oracle),
        ("associativity ambiguity", ambiguity),
        ("round trip", round_trip),
        ("target logic gate", target_logic_gate),
        ("gold regression", gold_regression),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {n:>2} {name}: {detail}"),
            Err(why) => {
                println!("FAIL {n:>2} {name}: {why}");
                failed.push(n);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
