use std::fmt;

use super::{AbstractGrammar, GrammarError};

/// An abstract syntax tree: a function applied to subtrees.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ast {
    pub fun: String,
    pub children: Vec<Ast>,
}

impl Ast {
    pub fn leaf(fun: impl Into<String>) -> Self {
        Ast {
            fun: fun.into(),
            children: Vec::new(),
        }
    }

    pub fn node(fun: impl Into<String>, children: Vec<Ast>) -> Self {
        Ast {
            fun: fun.into(),
            children,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Ast::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Ast::depth).max().unwrap_or(0)
    }

    /// Parses `f a (g b c)` style trees.
    pub fn parse(text: &str) -> Result<Ast, GrammarError> {
        let toks = tokenize(text);
        let mut i = 0;
        let ast = parse_app(&toks, &mut i, text)?;
        if i != toks.len() {
            return Err(bad(text, format!("unexpected `{}`", toks[i])));
        }
        Ok(ast)
    }
}

fn bad(text: &str, message: String) -> GrammarError {
    GrammarError::IllFormedAst {
        ast: text.to_string(),
        message,
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !ch.is_whitespace() {
                out.push(ch.to_string());
            }
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_app(toks: &[String], i: &mut usize, text: &str) -> Result<Ast, GrammarError> {
    let head = match toks.get(*i) {
        Some(t) if t != "(" && t != ")" => t.clone(),
        Some(t) if t == "(" => {
            *i += 1;
            let inner = parse_app(toks, i, text)?;
            expect_close(toks, i, text)?;
            if toks.get(*i).is_some_and(|t| t != ")") {
                return Err(bad(text, "a parenthesized tree cannot be applied".into()));
            }
            return Ok(inner);
        }
        Some(t) => return Err(bad(text, format!("unexpected `{t}`"))),
        None => return Err(bad(text, "empty tree".into())),
    };
    *i += 1;
    let mut children = Vec::new();
    while let Some(t) = toks.get(*i) {
        if t == ")" {
            break;
        }
        if t == "(" {
            *i += 1;
            children.push(parse_app(toks, i, text)?);
            expect_close(toks, i, text)?;
        } else {
            children.push(Ast::leaf(t.clone()));
            *i += 1;
        }
    }
    Ok(Ast::node(head, children))
}

fn expect_close(toks: &[String], i: &mut usize, text: &str) -> Result<(), GrammarError> {
    if toks.get(*i).map(String::as_str) == Some(")") {
        *i += 1;
        Ok(())
    } else {
        Err(bad(text, "missing `)`".into()))
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fun)?;
        for c in &self.children {
            if c.children.is_empty() {
                write!(f, " {c}")?;
            } else {
                write!(f, " ({c})")?;
            }
        }
        Ok(())
    }
}

impl AbstractGrammar {
    /// All trees of category `cat` with depth at most `depth`, in function
    /// declaration order.
    pub fn enumerate(&self, cat: &str, depth: usize) -> Vec<Ast> {
        if depth == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (f, sig) in &self.funs {
            if sig.result != cat {
                continue;
            }
            let mut partial: Vec<Vec<Ast>> = vec![Vec::new()];
            for arg in &sig.args {
                let subs = self.enumerate(arg, depth - 1);
                let mut next = Vec::new();
                for p in &partial {
                    for s in &subs {
                        let mut q = p.clone();
                        q.push(s.clone());
                        next.push(q);
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|cs| Ast::node(f.clone(), cs)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let s = "and_Stmt (act mary run) (act joan (love mary))";
        let a = Ast::parse(s).unwrap();
        assert_eq!(a.to_string(), s);
        assert_eq!(a.size(), 8);
        assert_eq!(a.depth(), 4);
        assert_eq!(Ast::parse("(joan)").unwrap(), Ast::leaf("joan"));
    }

    #[test]
    fn malformed_trees_are_rejected() {
        assert!(Ast::parse("act (mary").is_err());
        assert!(Ast::parse("").is_err());
        assert!(Ast::parse("act mary)").is_err());
    }
}
