//! The theory file format. Term and notation bodies are kept as token runs;
//! they are parsed later against the vocabulary in scope at that point.

use crate::syntax::{lex, Pos, TokKind, Token};

use super::ModuleError;

#[derive(Clone, Debug)]
pub struct DeclSrc {
    pub name: String,
    pub pos: Pos,
    pub ty: Option<TermSrc>,
    pub definiens: Option<TermSrc>,
    pub notation: Option<NotationSrc>,
}

#[derive(Clone, Debug)]
pub struct TermSrc {
    pub tokens: Vec<Token>,
    /// Position of the delimiter that ends the term.
    pub end: Pos,
}

#[derive(Clone, Debug)]
pub struct NotationSrc {
    pub tokens: Vec<Token>,
    pub precedence: Option<u32>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum TheoryItem {
    Include(String, Pos),
    Decl(DeclSrc),
}

#[derive(Clone, Debug)]
pub struct TheorySrc {
    pub name: String,
    pub pos: Pos,
    pub meta: Option<(String, Pos)>,
    pub items: Vec<TheoryItem>,
}

#[derive(Clone, Debug)]
pub enum ViewItem {
    Include(String, Pos),
    Assign { name: String, pos: Pos, value: TermSrc },
}

#[derive(Clone, Debug)]
pub struct ViewSrc {
    pub name: String,
    pub pos: Pos,
    pub source: (String, Pos),
    pub target: (String, Pos),
    pub items: Vec<ViewItem>,
}

#[derive(Clone, Debug)]
pub enum ModuleSrc {
    Theory(TheorySrc),
    View(ViewSrc),
}

impl ModuleSrc {
    pub fn name(&self) -> &str {
        match self {
            ModuleSrc::Theory(t) => &t.name,
            ModuleSrc::View(v) => &v.name,
        }
    }
}

struct Cursor<'a> {
    toks: Vec<Token>,
    i: usize,
    file: &'a str,
    eof: Pos,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.i)
    }

    fn pos(&self) -> Pos {
        self.peek().map_or(self.eof, Token::pos)
    }

    fn err(&self, message: impl Into<String>) -> ModuleError {
        ModuleError::Syntax {
            file: self.file.to_string(),
            pos: self.pos(),
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.i).cloned();
        self.i += 1;
        t
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.text == text)
    }

    fn expect(&mut self, text: &str) -> Result<Pos, ModuleError> {
        if self.at(text) {
            let p = self.pos();
            self.i += 1;
            Ok(p)
        } else {
            let found = self
                .peek()
                .map_or("end of file".to_string(), |t| format!("`{}`", t.text));
            Err(self.err(format!("expected `{text}`, found {found}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ModuleError> {
        match self.peek() {
            Some(t) if t.kind == TokKind::Ident => {
                let r = (t.text.clone(), t.pos());
                self.i += 1;
                Ok(r)
            }
            Some(t) => Err(self.err(format!("expected {what}, found `{}`", t.text))),
            None => Err(self.err(format!("expected {what}, found end of file"))),
        }
    }

    /// Collects tokens up to (not including) one of `stops` at bracket depth zero.
    fn run_until(&mut self, stops: &[&str]) -> Result<TermSrc, ModuleError> {
        let mut depth = 0i32;
        let mut tokens = Vec::new();
        loop {
            let Some(t) = self.peek() else {
                return Err(self.err(format!("expected one of {}", quoted(stops))));
            };
            if t.kind == TokKind::Symbol {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => depth -= 1,
                    _ => {}
                }
            }
            if depth <= 0 && stops.contains(&t.text.as_str()) {
                return Ok(TermSrc { tokens, end: t.pos() });
            }
            if t.text == "end" && t.kind == TokKind::Ident && depth <= 0 {
                return Err(self.err(format!("expected one of {} before `end`", quoted(stops))));
            }
            tokens.push(t.clone());
            self.i += 1;
        }
    }
}

fn quoted(xs: &[&str]) -> String {
    xs.iter().map(|s| format!("`{s}`")).collect::<Vec<_>>().join(", ")
}

pub fn parse_modules(text: &str, file: &str) -> Result<Vec<ModuleSrc>, ModuleError> {
    let toks = lex(text, Pos { line: 1, col: 1 }).map_err(|e| ModuleError::Syntax {
        file: file.to_string(),
        pos: e.pos,
        message: e.message,
    })?;
    let eof = toks.last().map_or(Pos { line: 1, col: 1 }, |t| Pos {
        line: t.line,
        col: t.col + t.text.chars().count(),
    });
    let mut c = Cursor { toks, i: 0, file, eof };
    let mut out = Vec::new();
    while let Some(t) = c.peek() {
        match t.text.as_str() {
            "theory" => out.push(ModuleSrc::Theory(theory(&mut c)?)),
            "view" => out.push(ModuleSrc::View(view(&mut c)?)),
            other => return Err(c.err(format!("expected `theory` or `view`, found `{other}`"))),
        }
    }
    Ok(out)
}

fn theory(c: &mut Cursor) -> Result<TheorySrc, ModuleError> {
    c.expect("theory")?;
    let (name, pos) = c.ident("a theory name")?;
    let meta = if c.at(":") {
        c.next();
        Some(c.ident("a meta-theory name")?)
    } else {
        None
    };
    c.expect("=")?;
    let mut items = Vec::new();
    while !c.at("end") {
        if c.at("include") {
            c.next();
            let (n, p) = c.ident("an included theory name")?;
            c.expect(";")?;
            items.push(TheoryItem::Include(n, p));
            continue;
        }
        items.push(TheoryItem::Decl(declaration(c)?));
    }
    c.expect("end")?;
    Ok(TheorySrc { name, pos, meta, items })
}

fn declaration(c: &mut Cursor) -> Result<DeclSrc, ModuleError> {
    let (name, pos) = c.ident("a declaration name")?;
    let mut d = DeclSrc {
        name,
        pos,
        ty: None,
        definiens: None,
        notation: None,
    };
    if c.at(":") {
        c.next();
        d.ty = Some(c.run_until(&["=", "#", ";"])?);
    }
    if c.at("=") {
        c.next();
        d.definiens = Some(c.run_until(&["#", ";"])?);
    }
    if c.at("#") {
        let npos = c.pos();
        c.next();
        let mut run = c.run_until(&[";"])?.tokens;
        let mut precedence = None;
        if run.len() >= 2 && run[run.len() - 2].text == "prec" && run[run.len() - 1].kind == TokKind::Number {
            let n = run.pop().expect("checked");
            run.pop();
            precedence = Some(n.text.parse().map_err(|_| ModuleError::Syntax {
                file: c.file.to_string(),
                pos: n.pos(),
                message: format!("precedence `{}` out of range", n.text),
            })?);
        }
        d.notation = Some(NotationSrc {
            tokens: run,
            precedence,
            pos: npos,
        });
    }
    if d.ty.is_none() && d.definiens.is_none() {
        return Err(ModuleError::Syntax {
            file: c.file.to_string(),
            pos: d.pos,
            message: format!("declaration `{}` needs a type or a definiens", d.name),
        });
    }
    c.expect(";")?;
    Ok(d)
}

fn view(c: &mut Cursor) -> Result<ViewSrc, ModuleError> {
    c.expect("view")?;
    let (name, pos) = c.ident("a view name")?;
    c.expect(":")?;
    let source = c.ident("a source theory name")?;
    if c.peek().is_some_and(|t| t.kind == TokKind::Arrow) {
        c.next();
    } else {
        return Err(c.err("expected `->` between source and target theory"));
    }
    let target = c.ident("a target theory name")?;
    c.expect("=")?;
    let mut items = Vec::new();
    while !c.at("end") {
        if c.at("include") {
            c.next();
            let (n, p) = c.ident("an included view name")?;
            c.expect(";")?;
            items.push(ViewItem::Include(n, p));
            continue;
        }
        let (n, p) = c.ident("a source constant name")?;
        c.expect("=")?;
        let value = c.run_until(&[";"])?;
        c.expect(";")?;
        items.push(ViewItem::Assign { name: n, pos: p, value });
    }
    c.expect("end")?;
    Ok(ViewSrc {
        name,
        pos,
        source,
        target,
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theory_with_notations() {
        let src = "theory P : LF =\n  prop : type # o ;\n  and : o -> o -> o # %1 ∧ %2 prec 10 ;\n  or = [a,b] ¬ (¬ a ∧ ¬ b) # %1 ∨ %2 prec 8 ;\nend";
        let ms = parse_modules(src, "p.thy").unwrap();
        let ModuleSrc::Theory(t) = &ms[0] else { panic!() };
        assert_eq!(t.meta.as_ref().unwrap().0, "LF");
        assert_eq!(t.items.len(), 3);
        let TheoryItem::Decl(or) = &t.items[2] else { panic!() };
        assert!(or.ty.is_none());
        assert_eq!(or.notation.as_ref().unwrap().precedence, Some(8));
        // [ a , b ] ¬ ( ¬ a ∧ ¬ b )
        assert_eq!(or.definiens.as_ref().unwrap().tokens.len(), 13);
    }

    #[test]
    fn view_with_include_and_stub_comments() {
        let src = "view V : A -> B =\n include W ;\n c = [x] x ;\n // d = ; // : Type\nend";
        let ms = parse_modules(src, "v.view").unwrap();
        let ModuleSrc::View(v) = &ms[0] else { panic!() };
        assert_eq!(v.items.len(), 2);
    }

    #[test]
    fn missing_semicolon_is_located() {
        let e = parse_modules("theory T =\n a : type ;\n b : type\nend", "t.thy").unwrap_err();
        assert!(e.to_string().starts_with("t.thy:4:1"), "{e}");
    }
}
