use super::{Ast, ConcreteGrammar, GrammarError, LinExpr, Pattern};

/// A string position: a literal token, or the surface string of argument
/// `index` at table keys `keys`. Argument references only occur while
/// compiling to a context-free grammar.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sym {
    Tok(String),
    Arg { index: usize, keys: Vec<String> },
}

/// Values of linearization expressions. Tables are total: one entry per
/// constructor of the key type, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Str(Vec<Sym>),
    Param(String),
    Table(String, Vec<(String, Value)>),
    Record(Vec<(String, Value)>),
}

impl Value {
    pub fn field(&self, f: &str) -> Option<&Value> {
        match self {
            Value::Record(fs) => fs.iter().find(|(n, _)| n == f).map(|(_, v)| v),
            _ => None,
        }
    }

    pub fn select(&self, key: &str) -> Option<&Value> {
        match self {
            Value::Table(_, es) => es.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }

    /// Token count of the shortest string form in this value's surface.
    pub fn min_surface_len(&self) -> usize {
        match self.surface() {
            Value::Str(s) => s.len(),
            Value::Table(_, es) => es.iter().map(|(_, v)| v.min_surface_len()).min().unwrap_or(0),
            _ => 0,
        }
    }

    /// The surface of a lincat value: the record's `s`, or the value itself.
    pub fn surface(&self) -> &Value {
        match self {
            Value::Record(_) => self.field("s").expect("lincat records carry `s`"),
            v => v,
        }
    }
}

pub(crate) fn eval(
    conc: &ConcreteGrammar,
    e: &LinExpr,
    args: &[Value],
    env: &mut Vec<(String, Value)>,
) -> Result<Value, GrammarError> {
    Ok(match e {
        LinExpr::Str(s) => Value::Str(s.split_whitespace().map(|t| Sym::Tok(t.to_string())).collect()),
        LinExpr::Empty => Value::Str(Vec::new()),
        LinExpr::Concat(a, b) => {
            let (Value::Str(mut x), Value::Str(y)) = (eval(conc, a, args, env)?, eval(conc, b, args, env)?) else {
                unreachable!("checked: concatenation of strings")
            };
            x.extend(y);
            Value::Str(x)
        }
        LinExpr::Arg(i) => args[*i].clone(),
        LinExpr::Var(n) => env
            .iter()
            .rev()
            .find(|(m, _)| m == n)
            .map(|(_, v)| v.clone())
            .expect("checked: pattern variables are bound"),
        LinExpr::Param(c) => Value::Param(c.clone()),
        LinExpr::Proj(r, f) => eval(conc, r, args, env)?
            .field(f)
            .cloned()
            .expect("checked: projected fields exist"),
        LinExpr::Select(t, k) => {
            let t = eval(conc, t, args, env)?;
            let Value::Param(k) = eval(conc, k, args, env)? else {
                unreachable!("checked: table keys are parameters")
            };
            t.select(&k).cloned().ok_or(GrammarError::IncompleteTable(k))?
        }
        LinExpr::Record(fs) => Value::Record(
            fs.iter()
                .map(|(n, f)| Ok((n.clone(), eval(conc, f, args, env)?)))
                .collect::<Result<_, GrammarError>>()?,
        ),
        LinExpr::Table(key, cases) => {
            let key = key.as_ref().expect("checked tables carry their key type");
            let mut entries = Vec::new();
            for k in &conc.params[key].constructors {
                let (pat, body) = cases
                    .iter()
                    .find(|(p, _)| match p {
                        Pattern::Ctor(c) => c == k,
                        _ => true,
                    })
                    .ok_or_else(|| GrammarError::IncompleteTable(k.clone()))?;
                let bound = if let Pattern::Var(n) = pat {
                    env.push((n.clone(), Value::Param(k.clone())));
                    true
                } else {
                    false
                };
                let v = eval(conc, body, args, env);
                if bound {
                    env.pop();
                }
                entries.push((k.clone(), v?));
            }
            Value::Table(key.clone(), entries)
        }
    })
}

/// The full linearization value of a well-formed tree.
pub(crate) fn lin_value(conc: &ConcreteGrammar, ast: &Ast) -> Result<Value, GrammarError> {
    let args = ast
        .children
        .iter()
        .map(|c| lin_value(conc, c))
        .collect::<Result<Vec<_>, _>>()?;
    let lin = conc.lins.get(&ast.fun).ok_or_else(|| GrammarError::UnknownFunction {
        grammar: conc.name.clone(),
        function: ast.fun.clone(),
    })?;
    eval(conc, &lin.body, &args, &mut Vec::new())
}

/// The surface string, taking the first key of every table level.
pub(crate) fn linearize(conc: &ConcreteGrammar, ast: &Ast) -> Result<String, GrammarError> {
    let v = lin_value(conc, ast)?;
    let mut s = v.surface();
    while let Value::Table(_, es) = s {
        s = &es[0].1;
    }
    let Value::Str(toks) = s else {
        unreachable!("checked: surfaces are strings")
    };
    Ok(toks
        .iter()
        .map(|t| match t {
            Sym::Tok(t) => t.as_str(),
            Sym::Arg { .. } => unreachable!("concrete values hold no argument references"),
        })
        .collect::<Vec<_>>()
        .join(" "))
}
