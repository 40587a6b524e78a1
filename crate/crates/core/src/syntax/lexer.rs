use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokKind {
    /// Letters, digits, `_`, `'`; may contain `?` for qualification (`T?c`).
    Ident,
    Number,
    /// `->` or `→`.
    Arrow,
    /// `%n`, only meaningful inside notations.
    Placeholder(usize),
    /// Any other single character.
    Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub kind: TokKind,
    pub line: usize,
    pub col: usize,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }

    pub fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

impl std::error::Error for LexError {}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Tokenizes theory-file text. `//` starts a comment running to end of line.
/// Positions are 1-based and start at `origin`.
pub fn lex(text: &str, origin: Pos) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (origin.line.max(1), origin.col.max(1));
    macro_rules! advance {
        ($n:expr) => {
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        };
    }
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Token>, s: String, kind| {
            out.push(Token {
                text: s,
                kind,
                line: l0,
                col: c0,
            })
        };
        if c.is_whitespace() {
            advance!(1);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
        } else if ident_start(c) {
            let mut j = i + 1;
            loop {
                if j < chars.len() && ident_continue(chars[j]) {
                    j += 1;
                } else if j + 1 < chars.len() && chars[j] == '?' && ident_start(chars[j + 1]) {
                    j += 2;
                } else {
                    break;
                }
            }
            let s: String = chars[i..j].iter().collect();
            push(&mut out, s, TokKind::Ident);
            advance!(j - i);
        } else if c.is_ascii_digit() {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            push(&mut out, s, TokKind::Number);
            advance!(j - i);
        } else if c == '%' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j == i + 1 {
                return Err(LexError {
                    pos: Pos { line, col },
                    message: "`%` must be followed by an argument number".into(),
                });
            }
            let s: String = chars[i..j].iter().collect();
            let n = s[1..].parse().map_err(|_| LexError {
                pos: Pos { line, col },
                message: format!("placeholder {s} out of range"),
            })?;
            push(&mut out, s, TokKind::Placeholder(n));
            advance!(j - i);
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            push(&mut out, "->".into(), TokKind::Arrow);
            advance!(2);
        } else if c == '→' {
            push(&mut out, "->".into(), TokKind::Arrow);
            advance!(1);
        } else {
            push(&mut out, c.to_string(), TokKind::Symbol);
            advance!(1);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &str) -> Vec<String> {
        lex(s, Pos::default()).unwrap().into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn primes_and_symbols() {
        assert_eq!(texts("love' joan' ∧ ¬x"), ["love'", "joan'", "∧", "¬", "x"]);
    }

    #[test]
    fn arrows_normalize() {
        assert_eq!(texts("o -> o → type"), ["o", "->", "o", "->", "type"]);
    }

    #[test]
    fn qualified_names_and_comments() {
        assert_eq!(texts("T?c x // trailing ? comment\ny"), ["T?c", "x", "y"]);
    }

    #[test]
    fn placeholders() {
        let toks = lex("%1 ∧ %2 prec 10", Pos::default()).unwrap();
        assert_eq!(toks[0].kind, TokKind::Placeholder(1));
        assert_eq!(toks[4].kind, TokKind::Number);
    }

    #[test]
    fn positions() {
        let toks = lex("a\n  b", Pos::default()).unwrap();
        assert_eq!((toks[1].line, toks[1].col), (2, 3));
    }
}
