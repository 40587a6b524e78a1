//! Earley recognition with nullable prediction, then extraction of every
//! tree from the completed-production facts. Derivations that re-enter the
//! same nonterminal over the same span are cut, so the tree set is finite.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::cfg::{Cfg, CfgSym};
use super::Ast;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Item {
    prod: usize,
    dot: usize,
    origin: usize,
}

/// The first token is also matched case-insensitively (sentence-initial
/// capitalization).
fn matches(terminal: &str, tokens: &[&str], at: usize) -> bool {
    let Some(tok) = tokens.get(at) else { return false };
    *tok == terminal || at == 0 && tok.to_lowercase() == terminal.to_lowercase()
}

struct Chart {
    /// Completed productions `(prod, i, j)`.
    complete: HashSet<(usize, usize, usize)>,
    /// Nonterminals known to span `(nt, i, j)`.
    spans: HashSet<(usize, usize, usize)>,
}

fn recognize(cfg: &Cfg, starts: &[usize], tokens: &[&str]) -> Chart {
    let n = tokens.len();
    let mut sets: Vec<Vec<Item>> = vec![Vec::new(); n + 1];
    let mut seen: Vec<HashSet<Item>> = vec![HashSet::new(); n + 1];
    // Items of each set whose next symbol is a given nonterminal.
    let mut waiting: Vec<HashMap<usize, Vec<Item>>> = vec![HashMap::new(); n + 1];
    let mut chart = Chart {
        complete: HashSet::new(),
        spans: HashSet::new(),
    };
    fn add(sets: &mut [Vec<Item>], seen: &mut [HashSet<Item>], j: usize, it: Item) {
        if seen[j].insert(it) {
            sets[j].push(it);
        }
    }
    for &s in starts {
        for &p in cfg.productions_of(s) {
            add(
                &mut sets,
                &mut seen,
                0,
                Item {
                    prod: p,
                    dot: 0,
                    origin: 0,
                },
            );
        }
    }
    for j in 0..=n {
        let mut k = 0;
        while k < sets[j].len() {
            let it = sets[j][k];
            k += 1;
            let prod = &cfg.productions()[it.prod];
            match prod.rhs.get(it.dot) {
                None => {
                    chart.complete.insert((it.prod, it.origin, j));
                    chart.spans.insert((prod.lhs, it.origin, j));
                    let ws = waiting[it.origin].get(&prod.lhs).cloned().unwrap_or_default();
                    for w in ws {
                        add(&mut sets, &mut seen, j, Item { dot: w.dot + 1, ..w });
                    }
                }
                Some(CfgSym::T(t)) => {
                    if matches(t, tokens, j) {
                        add(&mut sets, &mut seen, j + 1, Item { dot: it.dot + 1, ..it });
                    }
                }
                Some(CfgSym::N(m, _)) => {
                    waiting[j].entry(*m).or_default().push(it);
                    for &p in cfg.productions_of(*m) {
                        add(
                            &mut sets,
                            &mut seen,
                            j,
                            Item {
                                prod: p,
                                dot: 0,
                                origin: j,
                            },
                        );
                    }
                    if cfg.is_nullable(*m) {
                        add(&mut sets, &mut seen, j, Item { dot: it.dot + 1, ..it });
                    }
                }
            }
        }
    }
    chart
}

struct Extractor<'a> {
    cfg: &'a Cfg,
    tokens: &'a [&'a str],
    chart: Chart,
    memo: HashMap<(usize, usize, usize), Rc<Vec<Ast>>>,
    active: HashSet<(usize, usize, usize)>,
}

impl Extractor<'_> {
    fn trees(&mut self, nt: usize, i: usize, j: usize) -> Rc<Vec<Ast>> {
        if let Some(r) = self.memo.get(&(nt, i, j)) {
            return r.clone();
        }
        if !self.active.insert((nt, i, j)) {
            return Rc::new(Vec::new());
        }
        let mut out = Vec::new();
        for &p in self.cfg.productions_of(nt) {
            if self.chart.complete.contains(&(p, i, j)) {
                let arity = self.cfg.productions()[p].arity;
                self.match_rhs(p, 0, i, j, &mut vec![None; arity], &mut out);
            }
        }
        let mut seen = HashSet::new();
        let uniq: Vec<Ast> = out.into_iter().filter(|t| seen.insert(t.clone())).collect();
        self.active.remove(&(nt, i, j));
        let r = Rc::new(uniq);
        self.memo.insert((nt, i, j), r.clone());
        r
    }

    fn match_rhs(
        &mut self,
        p: usize,
        k: usize,
        pos: usize,
        j: usize,
        children: &mut Vec<Option<Ast>>,
        out: &mut Vec<Ast>,
    ) {
        let cfg = self.cfg;
        let prod = &cfg.productions()[p];
        match prod.rhs.get(k) {
            None => {
                if pos == j {
                    let cs = children
                        .iter()
                        .map(|c| c.clone().expect("each argument occurs once"))
                        .collect();
                    out.push(Ast::node(prod.fun.clone(), cs));
                }
            }
            Some(CfgSym::T(t)) => {
                if pos < j && matches(t, self.tokens, pos) {
                    self.match_rhs(p, k + 1, pos + 1, j, children, out);
                }
            }
            Some(CfgSym::N(m, a)) => {
                for e in pos..=j {
                    if !self.chart.spans.contains(&(*m, pos, e)) {
                        continue;
                    }
                    let subs = self.trees(*m, pos, e);
                    for t in subs.iter() {
                        children[*a] = Some(t.clone());
                        self.match_rhs(p, k + 1, e, j, children, out);
                    }
                    children[*a] = None;
                }
            }
        }
    }
}

/// All distinct trees for `tokens` from the start nonterminals of `cat`, in
/// start-nonterminal, production and split order.
pub(crate) fn parse(cfg: &Cfg, cat: &str, tokens: &[&str]) -> Vec<Ast> {
    let starts = cfg.start_nonterminals(cat);
    let chart = recognize(cfg, &starts, tokens);
    let mut ex = Extractor {
        cfg,
        tokens,
        chart,
        memo: HashMap::new(),
        active: HashSet::new(),
    };
    let mut out: Vec<Ast> = Vec::new();
    let mut seen = HashSet::new();
    for s in starts {
        if ex.chart.spans.contains(&(s, 0, tokens.len())) {
            for t in ex.trees(s, 0, tokens.len()).iter() {
                if seen.insert(t.clone()) {
                    out.push(t.clone());
                }
            }
        }
    }
    out
}
