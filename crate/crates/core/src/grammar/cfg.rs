//! Compilation of a concrete syntax to a context-free grammar. A category
//! splits into one nonterminal per inherent parameter valuation and table
//! key path; each lin becomes one production per argument valuation and key
//! path, with argument references turned into nonterminals.

use std::collections::HashMap;
use std::fmt;

use super::eval::{eval, Sym, Value};
use super::{AbstractGrammar, Ast, ConcreteGrammar, GrammarError, LinType};

/// Upper bound on nonterminals and on rule instances per function.
pub const DEFAULT_NONTERMINAL_BOUND: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Nonterminal {
    pub cat: String,
    pub inherent: Vec<String>,
    pub keys: Vec<String>,
}

impl fmt::Display for Nonterminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cat)?;
        if self.inherent.is_empty() && self.keys.is_empty() {
            return Ok(());
        }
        let all: Vec<&str> = self.inherent.iter().chain(&self.keys).map(String::as_str).collect();
        write!(f, "[{}]", all.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CfgSym {
    T(String),
    /// A nonterminal and the argument position of the function it fills.
    N(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<CfgSym>,
    pub fun: String,
    pub arity: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Cfg {
    nonterminals: Vec<Nonterminal>,
    index: HashMap<Nonterminal, usize>,
    productions: Vec<Production>,
    by_lhs: Vec<Vec<usize>>,
    nullable: Vec<bool>,
    first_keys: HashMap<String, Vec<String>>,
}

impl Cfg {
    pub fn nonterminals(&self) -> &[Nonterminal] {
        &self.nonterminals
    }

    pub fn nonterminal(&self, id: usize) -> &Nonterminal {
        &self.nonterminals[id]
    }

    pub fn lookup(&self, nt: &Nonterminal) -> Option<usize> {
        self.index.get(nt).copied()
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn productions_of(&self, nt: usize) -> &[usize] {
        &self.by_lhs[nt]
    }

    pub fn is_nullable(&self, nt: usize) -> bool {
        self.nullable[nt]
    }

    /// Nonterminals a sentence of `cat` is parsed from: every inherent
    /// valuation, at the first key of every table level.
    pub fn start_nonterminals(&self, cat: &str) -> Vec<usize> {
        let Some(first) = self.first_keys.get(cat) else {
            return Vec::new();
        };
        (0..self.nonterminals.len())
            .filter(|&i| self.nonterminals[i].cat == cat && &self.nonterminals[i].keys == first)
            .collect()
    }

    /// Every (sentence, tree) pair derivable from `nt` within `depth`
    /// nested productions. Exponential; meant for tests on small grammars.
    pub fn derivations(&self, nt: usize, depth: usize) -> Vec<(Vec<String>, Ast)> {
        if depth == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for &p in &self.by_lhs[nt] {
            let prod = &self.productions[p];
            let mut partial: Vec<(Vec<String>, Vec<Option<Ast>>)> = vec![(Vec::new(), vec![None; prod.arity])];
            for s in &prod.rhs {
                match s {
                    CfgSym::T(t) => partial.iter_mut().for_each(|(w, _)| w.push(t.clone())),
                    CfgSym::N(n, a) => {
                        let subs = self.derivations(*n, depth - 1);
                        let mut next = Vec::new();
                        for (w, cs) in &partial {
                            for (sw, st) in &subs {
                                let mut w = w.clone();
                                w.extend(sw.iter().cloned());
                                let mut cs = cs.clone();
                                cs[*a] = Some(st.clone());
                                next.push((w, cs));
                            }
                        }
                        partial = next;
                    }
                }
            }
            for (w, cs) in partial {
                let children = cs.into_iter().map(|c| c.expect("each argument occurs once")).collect();
                out.push((w, Ast::node(prod.fun.clone(), children)));
            }
        }
        out
    }

    fn intern(&mut self, nt: Nonterminal) -> usize {
        if let Some(&i) = self.index.get(&nt) {
            return i;
        }
        let i = self.nonterminals.len();
        self.index.insert(nt.clone(), i);
        self.nonterminals.push(nt);
        self.by_lhs.push(Vec::new());
        i
    }
}

impl fmt::Display for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.productions {
            write!(f, "{} ->", self.nonterminals[p.lhs])?;
            for s in &p.rhs {
                match s {
                    CfgSym::T(t) => write!(f, " \"{t}\"")?,
                    CfgSym::N(n, _) => write!(f, " {}", self.nonterminals[*n])?,
                }
            }
            writeln!(f, "    [{}]", p.fun)?;
        }
        Ok(())
    }
}

fn product(conc: &ConcreteGrammar, types: impl Iterator<Item = String>) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for t in types {
        let ctors = &conc.params[&t].constructors;
        out = out
            .into_iter()
            .flat_map(|p: Vec<String>| {
                ctors.iter().map(move |c| {
                    let mut q = p.clone();
                    q.push(c.clone());
                    q
                })
            })
            .collect();
    }
    out
}

fn valuations(conc: &ConcreteGrammar, l: &LinType) -> Vec<Vec<String>> {
    product(conc, l.inherent.iter().map(|(_, p)| p.clone()))
}

fn key_paths(conc: &ConcreteGrammar, l: &LinType) -> Vec<Vec<String>> {
    product(conc, l.keys.iter().cloned())
}

/// The symbolic value of argument `index` at inherent valuation `inh`.
fn arg_value(conc: &ConcreteGrammar, index: usize, l: &LinType, inh: &[String]) -> Value {
    fn surface(conc: &ConcreteGrammar, index: usize, keys: &[String], path: &mut Vec<String>) -> Value {
        match keys.split_first() {
            None => Value::Str(vec![Sym::Arg {
                index,
                keys: path.clone(),
            }]),
            Some((k, rest)) => Value::Table(
                k.clone(),
                conc.params[k]
                    .constructors
                    .iter()
                    .map(|c| {
                        path.push(c.clone());
                        let v = surface(conc, index, rest, path);
                        path.pop();
                        (c.clone(), v)
                    })
                    .collect(),
            ),
        }
    }
    let s = surface(conc, index, &l.keys, &mut Vec::new());
    if l.plain {
        return s;
    }
    let mut fields = vec![("s".to_string(), s)];
    fields.extend(
        l.inherent
            .iter()
            .zip(inh)
            .map(|((n, _), v)| (n.clone(), Value::Param(v.clone()))),
    );
    Value::Record(fields)
}

pub(crate) fn compile(abs: &AbstractGrammar, conc: &ConcreteGrammar, bound: usize) -> Result<Cfg, GrammarError> {
    let blowup = || GrammarError::ParamBlowup {
        concrete: conc.name.clone(),
        bound,
    };
    let mut cfg = Cfg::default();
    for (cat, l) in &conc.lincats {
        let first = l.keys.iter().map(|k| conc.params[k].constructors[0].clone()).collect();
        cfg.first_keys.insert(cat.clone(), first);
    }

    for (fun, sig) in &abs.funs {
        let lin = &conc.lins[fun];
        let arg_lincats: Vec<&LinType> = sig.args.iter().map(|c| &conc.lincats[c]).collect();
        let arg_vals: Vec<Vec<Vec<String>>> = arg_lincats.iter().map(|l| valuations(conc, l)).collect();
        let combos = arg_vals
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.len()))
            .filter(|&n| n <= bound)
            .ok_or_else(blowup)?;
        let res_l = &conc.lincats[&sig.result];
        let paths = key_paths(conc, res_l);

        for combo in 0..combos {
            // Mixed-radix decoding of `combo` into one valuation per argument.
            let mut rest = combo;
            let mut chosen = Vec::with_capacity(arg_vals.len());
            for vs in arg_vals.iter().rev() {
                chosen.push(&vs[rest % vs.len()]);
                rest /= vs.len();
            }
            chosen.reverse();

            let args: Vec<Value> = chosen
                .iter()
                .enumerate()
                .map(|(i, inh)| arg_value(conc, i, arg_lincats[i], inh))
                .collect();
            let result = eval(conc, &lin.body, &args, &mut Vec::new())?;
            let inherent: Vec<String> = res_l
                .inherent
                .iter()
                .map(|(n, _)| match result.field(n) {
                    Some(Value::Param(c)) => c.clone(),
                    _ => unreachable!("checked: inherent fields are parameters"),
                })
                .collect();

            for path in &paths {
                let mut v = result.surface();
                for k in path {
                    v = v.select(k).expect("tables are total");
                }
                let Value::Str(syms) = v else {
                    unreachable!("checked: surfaces are strings")
                };
                let lhs = Nonterminal {
                    cat: sig.result.clone(),
                    inherent: inherent.clone(),
                    keys: path.clone(),
                };
                let mut counts = vec![0usize; args.len()];
                for s in syms {
                    if let Sym::Arg { index, .. } = s {
                        counts[*index] += 1;
                    }
                }
                if let Some(i) = counts.iter().position(|&n| n != 1) {
                    return Err(GrammarError::ArgumentUsage {
                        concrete: conc.name.clone(),
                        function: fun.clone(),
                        argument: lin.params[i].clone(),
                        count: counts[i],
                        nonterminal: lhs.to_string(),
                    });
                }
                let lhs = cfg.intern(lhs);
                let mut rhs = Vec::with_capacity(syms.len());
                for s in syms {
                    rhs.push(match s {
                        Sym::Tok(t) => CfgSym::T(t.clone()),
                        Sym::Arg { index, keys } => {
                            let nt = cfg.intern(Nonterminal {
                                cat: sig.args[*index].clone(),
                                inherent: chosen[*index].clone(),
                                keys: keys.clone(),
                            });
                            CfgSym::N(nt, *index)
                        }
                    });
                }
                if cfg.nonterminals.len() > bound {
                    return Err(blowup());
                }
                cfg.by_lhs[lhs].push(cfg.productions.len());
                cfg.productions.push(Production {
                    lhs,
                    rhs,
                    fun: fun.clone(),
                    arity: args.len(),
                });
            }
        }
    }

    cfg.nullable = vec![false; cfg.nonterminals.len()];
    loop {
        let mut changed = false;
        for p in &cfg.productions {
            if !cfg.nullable[p.lhs] && p.rhs.iter().all(|s| matches!(s, CfgSym::N(n, _) if cfg.nullable[*n])) {
                cfg.nullable[p.lhs] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(cfg)
}
