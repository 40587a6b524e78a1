//! Grammar files: `abstract` and `concrete` modules in a GF-like surface
//! syntax. Identifiers inside lin bodies stay unresolved (`LinExpr::Var`,
//! `Pattern::Var`) until the concrete module is checked.

use super::{GrammarError, LinExpr, Pattern};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SrcPos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Ident,
    Str,
    Sym,
}

#[derive(Clone, Debug)]
struct Tok {
    kind: Kind,
    text: String,
    pos: SrcPos,
}

const KEYWORDS: &[&str] = &[
    "abstract", "concrete", "of", "flags", "cat", "fun", "data", "param", "lincat", "lin", "table",
];

const SECTIONS: &[&str] = &["flags", "cat", "fun", "data", "param", "lincat", "lin"];

fn lex(text: &str, file: &str) -> Result<Vec<Tok>, GrammarError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut out = Vec::new();
    let err = |line, col, message: String| GrammarError::Syntax {
        file: file.to_string(),
        line,
        col,
        message,
    };
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = SrcPos { line, col };
        if c.is_whitespace() {
            bump!();
        } else if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
        } else if c == '{' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && !(chars[i] == '-' && chars.get(i + 1) == Some(&'}')) {
                bump!();
            }
            if i >= chars.len() {
                return Err(err(pos.line, pos.col, "unterminated comment".into()));
            }
            bump!();
            bump!();
        } else if c.is_alphabetic() || c == '_' && chars.get(i + 1).is_some_and(|d| d.is_alphanumeric() || *d == '_') {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                s.push(chars[i]);
                bump!();
            }
            out.push(Tok {
                kind: Kind::Ident,
                text: s,
                pos,
            });
        } else if c == '"' {
            bump!();
            let mut s = String::new();
            while i < chars.len() && chars[i] != '"' {
                if chars[i] == '\n' {
                    return Err(err(pos.line, pos.col, "unterminated string".into()));
                }
                s.push(chars[i]);
                bump!();
            }
            if i >= chars.len() {
                return Err(err(pos.line, pos.col, "unterminated string".into()));
            }
            bump!();
            out.push(Tok {
                kind: Kind::Str,
                text: s,
                pos,
            });
        } else {
            let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let text = if ["++", "**", "=>", "->"].contains(&two.as_str()) {
                bump!();
                bump!();
                two
            } else if "{}()[];:=,|.!_*".contains(c) {
                bump!();
                c.to_string()
            } else {
                return Err(err(line, col, format!("unexpected character `{c}`")));
            };
            out.push(Tok {
                kind: Kind::Sym,
                text,
                pos,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FunSrc {
    pub name: String,
    pub args: Vec<String>,
    pub result: String,
}

#[derive(Clone, Debug)]
pub struct AbstractSrc {
    pub name: String,
    pub extends: Vec<String>,
    pub startcat: Option<String>,
    pub cats: Vec<(String, SrcPos)>,
    pub funs: Vec<FunSrc>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeSrc {
    Str,
    Named(String),
    Table(Box<TypeSrc>, Box<TypeSrc>),
    Record(Vec<(String, TypeSrc)>),
}

#[derive(Clone, Debug)]
pub struct LinSrc {
    pub fun: String,
    pub pos: SrcPos,
    pub params: Vec<String>,
    pub body: LinExpr,
}

#[derive(Clone, Debug)]
pub struct ConcreteSrc {
    pub name: String,
    pub pos: SrcPos,
    pub file: String,
    pub abstract_name: String,
    pub extends: Vec<String>,
    pub params: Vec<(String, Vec<String>, SrcPos)>,
    pub lincats: Vec<(String, TypeSrc, SrcPos)>,
    pub lins: Vec<LinSrc>,
}

#[derive(Clone, Debug)]
pub enum ModuleSrc {
    Abstract(AbstractSrc),
    Concrete(ConcreteSrc),
}

struct Cursor<'a> {
    toks: Vec<Tok>,
    i: usize,
    file: &'a str,
}

type PResult<T> = Result<T, GrammarError>;

impl Cursor<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i)
    }

    fn pos(&self) -> SrcPos {
        match self.peek() {
            Some(t) => t.pos,
            None => self.toks.last().map_or(SrcPos { line: 1, col: 1 }, |t| SrcPos {
                line: t.pos.line,
                col: t.pos.col + t.text.chars().count(),
            }),
        }
    }

    fn err(&self, message: impl Into<String>) -> GrammarError {
        let p = self.pos();
        GrammarError::Syntax {
            file: self.file.to_string(),
            line: p.line,
            col: p.col,
            message: message.into(),
        }
    }

    fn found(&self) -> String {
        self.peek().map_or("end of file".into(), |t| format!("`{}`", t.text))
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.kind != Kind::Str && t.text == text)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<()> {
        if self.eat(text) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{text}`, found {}", self.found())))
        }
    }

    fn at_ident(&self) -> bool {
        self.peek()
            .is_some_and(|t| t.kind == Kind::Ident && !KEYWORDS.contains(&t.text.as_str()))
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SrcPos)> {
        if self.at_ident() {
            let t = &self.toks[self.i];
            let r = (t.text.clone(), t.pos);
            self.i += 1;
            Ok(r)
        } else {
            Err(self.err(format!("expected {what}, found {}", self.found())))
        }
    }

    fn ident_list(&mut self, what: &str) -> PResult<Vec<(String, SrcPos)>> {
        let mut out = vec![self.ident(what)?];
        while self.eat(",") {
            out.push(self.ident(what)?);
        }
        Ok(out)
    }
}

pub fn parse_grammar_file(text: &str, file: &str) -> PResult<Vec<ModuleSrc>> {
    let toks = lex(text, file)?;
    let mut c = Cursor { toks, i: 0, file };
    let mut out = Vec::new();
    while c.peek().is_some() {
        if c.eat("abstract") {
            out.push(ModuleSrc::Abstract(abstract_module(&mut c)?));
        } else if c.eat("concrete") {
            out.push(ModuleSrc::Concrete(concrete_module(&mut c)?));
        } else {
            return Err(c.err(format!("expected `abstract` or `concrete`, found {}", c.found())));
        }
    }
    Ok(out)
}

/// `= [A, B **] {`
fn header_extends(c: &mut Cursor) -> PResult<Vec<String>> {
    c.expect("=")?;
    let mut extends = Vec::new();
    if !c.at("{") {
        extends = c.ident_list("a module name")?.into_iter().map(|(n, _)| n).collect();
        c.expect("**")?;
    }
    c.expect("{")?;
    Ok(extends)
}

fn abstract_module(c: &mut Cursor) -> PResult<AbstractSrc> {
    let (name, _) = c.ident("an abstract module name")?;
    let extends = header_extends(c)?;
    let mut m = AbstractSrc {
        name,
        extends,
        startcat: None,
        cats: Vec::new(),
        funs: Vec::new(),
    };
    while !c.eat("}") {
        let section = c.peek().map(|t| t.text.clone()).unwrap_or_default();
        if !SECTIONS.contains(&section.as_str()) || section == "param" || section.starts_with("lin") {
            return Err(c.err(format!("expected `flags`, `cat`, `fun` or `}}`, found {}", c.found())));
        }
        c.i += 1;
        while c.at_ident() {
            match section.as_str() {
                "flags" => {
                    let (flag, _) = c.ident("a flag name")?;
                    c.expect("=")?;
                    let (value, _) = c.ident("a flag value")?;
                    if flag == "startcat" {
                        m.startcat = Some(value);
                    }
                }
                "cat" => m.cats.extend(c.ident_list("a category name")?),
                _ => {
                    let names = c.ident_list("a function name")?;
                    c.expect(":")?;
                    let mut cats = vec![c.ident("a category")?.0];
                    while c.eat("->") {
                        cats.push(c.ident("a category")?.0);
                    }
                    let result = cats.pop().expect("nonempty");
                    for (n, _) in names {
                        m.funs.push(FunSrc {
                            name: n,
                            args: cats.clone(),
                            result: result.clone(),
                        });
                    }
                }
            }
            c.expect(";")?;
        }
    }
    Ok(m)
}

fn concrete_module(c: &mut Cursor) -> PResult<ConcreteSrc> {
    let (name, pos) = c.ident("a concrete module name")?;
    c.expect("of")?;
    let (abstract_name, _) = c.ident("an abstract module name")?;
    let extends = header_extends(c)?;
    let mut m = ConcreteSrc {
        name,
        pos,
        file: c.file.to_string(),
        abstract_name,
        extends,
        params: Vec::new(),
        lincats: Vec::new(),
        lins: Vec::new(),
    };
    while !c.eat("}") {
        let section = c.peek().map(|t| t.text.clone()).unwrap_or_default();
        if !["flags", "param", "lincat", "lin"].contains(&section.as_str()) {
            return Err(c.err(format!(
                "expected `param`, `lincat`, `lin` or `}}`, found {}",
                c.found()
            )));
        }
        c.i += 1;
        while c.at_ident() {
            match section.as_str() {
                "flags" => {
                    c.ident("a flag name")?;
                    c.expect("=")?;
                    c.ident("a flag value")?;
                }
                "param" => {
                    let (n, p) = c.ident("a parameter type name")?;
                    c.expect("=")?;
                    let mut ctors = vec![c.ident("a constructor")?.0];
                    while c.eat("|") {
                        ctors.push(c.ident("a constructor")?.0);
                    }
                    m.params.push((n, ctors, p));
                }
                "lincat" => {
                    let cats = c.ident_list("a category name")?;
                    c.expect("=")?;
                    let ty = type_src(c)?;
                    for (n, p) in cats {
                        m.lincats.push((n, ty.clone(), p));
                    }
                }
                _ => {
                    let (fun, p) = c.ident("a function name")?;
                    let mut params = Vec::new();
                    while c.at_ident() || c.at("_") {
                        if c.eat("_") {
                            params.push("_".to_string());
                        } else {
                            params.push(c.ident("a parameter")?.0);
                        }
                    }
                    c.expect("=")?;
                    let body = expr(c)?;
                    m.lins.push(LinSrc {
                        fun,
                        pos: p,
                        params,
                        body,
                    });
                }
            }
            c.expect(";")?;
        }
    }
    Ok(m)
}

fn type_src(c: &mut Cursor) -> PResult<TypeSrc> {
    let lhs = if c.eat("{") {
        let mut fields = Vec::new();
        while !c.eat("}") {
            let names = c.ident_list("a field name")?;
            c.expect(":")?;
            let t = type_src(c)?;
            for (n, _) in names {
                fields.push((n, t.clone()));
            }
            if !c.eat(";") && !c.at("}") {
                return Err(c.err(format!("expected `;` or `}}`, found {}", c.found())));
            }
        }
        TypeSrc::Record(fields)
    } else if c.eat("(") {
        let t = type_src(c)?;
        c.expect(")")?;
        t
    } else {
        let (n, _) = c.ident("a type")?;
        if n == "Str" {
            TypeSrc::Str
        } else {
            TypeSrc::Named(n)
        }
    };
    if c.eat("=>") {
        Ok(TypeSrc::Table(Box::new(lhs), Box::new(type_src(c)?)))
    } else {
        Ok(lhs)
    }
}

fn expr(c: &mut Cursor) -> PResult<LinExpr> {
    let first = select(c)?;
    if c.eat("++") {
        Ok(LinExpr::Concat(Box::new(first), Box::new(expr(c)?)))
    } else {
        Ok(first)
    }
}

fn select(c: &mut Cursor) -> PResult<LinExpr> {
    let mut e = proj(c)?;
    while c.eat("!") {
        e = LinExpr::Select(Box::new(e), Box::new(proj(c)?));
    }
    Ok(e)
}

fn proj(c: &mut Cursor) -> PResult<LinExpr> {
    let mut e = atom(c)?;
    while c.eat(".") {
        e = LinExpr::Proj(Box::new(e), c.ident("a field name")?.0);
    }
    Ok(e)
}

fn atom(c: &mut Cursor) -> PResult<LinExpr> {
    if let Some(t) = c.peek() {
        if t.kind == Kind::Str {
            let s = t.text.clone();
            c.i += 1;
            return Ok(if s.trim().is_empty() {
                LinExpr::Empty
            } else {
                LinExpr::Str(s)
            });
        }
    }
    if c.eat("[") {
        c.expect("]")?;
        return Ok(LinExpr::Empty);
    }
    if c.eat("(") {
        let e = expr(c)?;
        c.expect(")")?;
        return Ok(e);
    }
    if c.eat("{") {
        let mut fields = Vec::new();
        while !c.eat("}") {
            let names = c.ident_list("a field name")?;
            c.expect("=")?;
            let e = expr(c)?;
            for (n, _) in names {
                fields.push((n, e.clone()));
            }
            if !c.eat(";") && !c.at("}") {
                return Err(c.err(format!("expected `;` or `}}`, found {}", c.found())));
            }
        }
        return Ok(LinExpr::Record(fields));
    }
    if c.eat("table") {
        c.expect("{")?;
        let mut cases = Vec::new();
        while !c.eat("}") {
            let pat = if c.eat("_") {
                Pattern::Wild
            } else {
                Pattern::Var(c.ident("a pattern")?.0)
            };
            c.expect("=>")?;
            cases.push((pat, expr(c)?));
            if !c.eat(";") && !c.at("}") {
                return Err(c.err(format!("expected `;` or `}}`, found {}", c.found())));
            }
        }
        if cases.is_empty() {
            return Err(c.err("a table needs at least one case"));
        }
        return Ok(LinExpr::Table(None, cases));
    }
    if c.at_ident() {
        return Ok(LinExpr::Var(c.ident("an identifier")?.0));
    }
    Err(c.err(format!("expected an expression, found {}", c.found())))
}
