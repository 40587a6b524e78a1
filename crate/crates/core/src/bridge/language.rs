use indexmap::IndexMap;

use super::BridgeError;
use crate::grammar::{AbstractGrammar, Ast, GrammarSet};
use crate::kernel::{alpha_eq, Declaration, QName, Term};
use crate::syntax::{lex, Pos, TokKind};
use crate::theory::{FlatTheory, Theory, TheoryGraph, LF};

/// Words of the theory language that cannot name a constant.
const RESERVED: &[&str] = &["type", "kind", "include", "end", "theory", "view", "prec", LF];

fn check_name(module: &str, name: &str) -> Result<(), BridgeError> {
    let single_ident =
        matches!(lex(name, Pos::default()).as_deref(), Ok([t]) if t.kind == TokKind::Ident && t.text == name);
    if RESERVED.contains(&name) || !single_ident || name.starts_with('?') || name.contains('?') {
        return Err(BridgeError::NameClash {
            module: module.to_string(),
            name: name.to_string(),
        });
    }
    Ok(())
}

/// The language theory of one abstract module: a type per own category and
/// a constant per own function, in grammar order. Extended grammars become
/// includes.
pub fn language_theory(abs: &AbstractGrammar) -> Result<Theory, BridgeError> {
    check_name(&abs.name, &abs.name)?;
    let cat_term = |c: &str| Term::constant(QName::new(&abs.cats[c], c));
    let mut th = Theory::new(&abs.name);
    th.includes = abs.extends.clone();
    for c in abs.own_cats() {
        check_name(&abs.name, c)?;
        th.declarations.push(Declaration {
            name: QName::new(&abs.name, c),
            ty: Some(Term::typ()),
            definiens: None,
            notation: None,
        });
    }
    for (f, sig) in abs.own_funs() {
        check_name(&abs.name, f)?;
        let ty = sig
            .args
            .iter()
            .rev()
            .fold(cat_term(&sig.result), |acc, a| Term::arrow(cat_term(a), acc));
        th.declarations.push(Declaration {
            name: QName::new(&abs.name, f),
            ty: Some(ty),
            definiens: None,
            notation: None,
        });
    }
    Ok(th)
}

/// Language theories of `name` and everything it extends, dependencies first.
pub fn language_theories(set: &GrammarSet, name: &str) -> Result<Vec<Theory>, BridgeError> {
    fn visit(set: &GrammarSet, name: &str, out: &mut Vec<Theory>) -> Result<(), BridgeError> {
        if out.iter().any(|t| t.name == name) {
            return Ok(());
        }
        let abs = set
            .abstract_grammar(name)
            .ok_or_else(|| crate::grammar::GrammarError::UnknownModule(name.to_string()))?;
        for e in &abs.extends {
            visit(set, e, out)?;
        }
        out.push(language_theory(abs)?);
        Ok(())
    }
    let mut out = Vec::new();
    visit(set, name, &mut out)?;
    Ok(out)
}

/// Adds the generated language theories of `name` to `graph`. A theory of the
/// same name that is already present must agree with the generated one up to
/// declaration order.
pub fn install_language_theories(graph: &mut TheoryGraph, set: &GrammarSet, name: &str) -> Result<(), BridgeError> {
    for th in language_theories(set, name)? {
        match graph.theory(&th.name) {
            Some(existing) => verify(existing, &th)?,
            None => graph.add_theory(th)?,
        }
    }
    Ok(())
}

fn verify(existing: &Theory, generated: &Theory) -> Result<(), BridgeError> {
    let mismatch = |message: String| BridgeError::LanguageTheoryMismatch {
        theory: generated.name.clone(),
        message,
    };
    let mut inc_a = existing.includes.clone();
    let mut inc_b = generated.includes.clone();
    inc_a.sort();
    inc_b.sort();
    if inc_a != inc_b {
        return Err(mismatch(format!("includes {inc_a:?}, the grammar extends {inc_b:?}")));
    }
    for d in &generated.declarations {
        let Some(e) = existing.declaration(&d.name.name) else {
            return Err(mismatch(format!("`{}` is missing", d.name.name)));
        };
        let same = match (&e.ty, &d.ty) {
            (Some(a), Some(b)) => alpha_eq(a, b),
            _ => false,
        };
        if !same || e.definiens.is_some() {
            return Err(mismatch(format!("`{}` does not have the generated type", d.name.name)));
        }
    }
    if let Some(extra) = existing
        .declarations
        .iter()
        .find(|e| generated.declaration(&e.name.name).is_none())
    {
        return Err(mismatch(format!("`{}` is not in the grammar", extra.name.name)));
    }
    Ok(())
}

/// Curried application of each function constant to its children.
pub fn ast_to_term(abs: &AbstractGrammar, ast: &Ast) -> Result<Term, BridgeError> {
    let sig = abs
        .funs
        .get(&ast.fun)
        .ok_or_else(|| crate::grammar::GrammarError::UnknownFunction {
            grammar: abs.name.clone(),
            function: ast.fun.clone(),
        })?;
    let head = Term::constant(QName::new(&sig.origin, &ast.fun));
    let args = ast
        .children
        .iter()
        .map(|c| ast_to_term(abs, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Term::apps(head, args))
}

/// Inverse of [`ast_to_term`] on its image.
pub fn term_to_ast(abs: &AbstractGrammar, t: &Term) -> Result<Ast, BridgeError> {
    let (head, args) = t.spine();
    let not_ast = || BridgeError::NotAnAst(t.clone());
    let Term::Const(q) = head else { return Err(not_ast()) };
    let sig = abs.funs.get(&q.name).ok_or_else(not_ast)?;
    if sig.origin != q.theory || sig.args.len() != args.len() {
        return Err(not_ast());
    }
    let children = args
        .into_iter()
        .map(|a| term_to_ast(abs, a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ast::node(q.name.clone(), children))
}

const PENDING: &str = "// ";

/// A view file from `lang` to `target` with one commented placeholder line
/// `// c : type = ;` per undefined constant, so the stub parses as is.
pub fn view_stub(lang: &FlatTheory, view: &str, target: &str) -> String {
    let mut out = format!(
        "// Semantics construction for {}. Replace each commented line by an\n// assignment `c = term ;`.\n\nview {view} : {} -> {target} =\n",
        lang.name(),
        lang.name()
    );
    for d in lang.declarations().filter(|d| d.definiens.is_none()) {
        let ty = d.ty.as_ref().map_or_else(|| "?".to_string(), |t| lang.print(t));
        out.push_str(&format!("  {PENDING}{} : {ty} = ;\n", d.name.name));
    }
    out.push_str("end\n");
    out
}

fn pending_name(line: &str) -> Option<&str> {
    let rest = line.trim_start().strip_prefix(PENDING)?;
    if !rest.trim_end().ends_with("= ;") {
        return None;
    }
    rest.split_whitespace().next()
}

/// Names whose assignment is still a placeholder.
pub fn pending_assignments(stub: &str) -> Vec<String> {
    stub.lines().filter_map(pending_name).map(str::to_string).collect()
}

/// Replaces placeholder lines by the given right-hand sides. Unlisted
/// placeholders are kept.
pub fn fill_stub(stub: &str, values: &IndexMap<String, String>) -> String {
    let mut out = String::new();
    for line in stub.lines() {
        match pending_name(line).and_then(|n| values.get(n).map(|v| (n, v))) {
            Some((n, v)) => out.push_str(&format!("  {n} = {v} ;\n")),
            None => {
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}
