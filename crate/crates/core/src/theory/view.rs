use indexmap::IndexMap;

use super::file::{ViewItem, ViewSrc};
use super::graph::FlatTheory;
use super::{Loc, ModuleError, TheoryGraph};
use crate::kernel::{check, elaborate, normalize, Context, QName, Term};
use crate::syntax::{parse_tokens, Resolution};

/// A theory morphism from `source` to `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct View {
    pub name: String,
    pub source: String,
    pub target: String,
    pub includes: Vec<String>,
    /// Assignments written in this view, in file order.
    pub own: IndexMap<QName, Term>,
    /// Own assignments together with those of included views.
    assignments: IndexMap<QName, Term>,
}

impl View {
    pub fn assignments(&self) -> &IndexMap<QName, Term> {
        &self.assignments
    }

    pub fn assignment(&self, q: &QName) -> Option<&Term> {
        self.assignments.get(q)
    }
}

/// Undefined source constants that a view leaves unassigned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalityReport {
    pub view: String,
    pub missing: Vec<QName>,
}

impl TotalityReport {
    pub fn is_total(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Homomorphic translation along a view. Assigned constants are replaced,
/// defined source constants are unfolded and translated, constants shared
/// with the target stay fixed. Fails with the first constant it cannot map.
pub(crate) fn translate(
    assignments: &IndexMap<QName, Term>,
    source: &FlatTheory,
    target: &FlatTheory,
    t: &Term,
) -> Result<Term, QName> {
    let tr = |u: &Term| translate(assignments, source, target, u);
    match t {
        Term::Const(q) => {
            if let Some(a) = assignments.get(q) {
                return Ok(a.clone());
            }
            if let Some(def) = source.get(q).and_then(|d| d.definiens.as_ref()) {
                return tr(def);
            }
            if target.contains(q) {
                return Ok(t.clone());
            }
            Err(q.clone())
        }
        Term::Var(_) | Term::Sort(_) => Ok(t.clone()),
        Term::App(f, a) => Ok(Term::app(tr(f)?, tr(a)?)),
        Term::Lam(x, ty, b) => {
            let ty = ty.as_ref().map(|ty| tr(ty)).transpose()?;
            Ok(Term::lam(x.clone(), ty, tr(b)?))
        }
        Term::Pi(x, d, c) => Ok(Term::pi(x.clone(), tr(d)?, tr(c)?)),
    }
}

impl TheoryGraph {
    /// Undefined constants of the flattened source without an assignment.
    pub fn check_totality(&self, view: &str) -> Result<TotalityReport, ModuleError> {
        let v = self.view_ref(view)?;
        let source = self.flatten(&v.source)?;
        let target = self.flatten(&v.target)?;
        let missing = source
            .declarations()
            .filter(|d| d.definiens.is_none() && !v.assignments.contains_key(&d.name) && !target.contains(&d.name))
            .map(|d| d.name.clone())
            .collect();
        Ok(TotalityReport {
            view: v.name.clone(),
            missing,
        })
    }

    /// Translates a source term along the view. The result is not normalized.
    pub fn apply_view(&self, view: &str, t: &Term) -> Result<Term, ModuleError> {
        let v = self.view_ref(view)?;
        let source = self.flatten(&v.source)?;
        let target = self.flatten(&v.target)?;
        translate(&v.assignments, &source, &target, t).map_err(|constant| ModuleError::PartialView {
            view: v.name.clone(),
            constant,
        })
    }

    fn view_ref(&self, name: &str) -> Result<&View, ModuleError> {
        self.view(name).ok_or_else(|| ModuleError::UnresolvedReference {
            loc: Loc::default(),
            kind: "view",
            name: name.to_string(),
        })
    }

    pub(super) fn load_view(&mut self, src: &ViewSrc, file: &str) -> Result<(), ModuleError> {
        let at = |pos| Loc {
            file: file.to_string(),
            pos,
        };
        self.fresh_module_name(&src.name, &at(src.pos))?;
        let resolve_theory = |(name, pos): &(String, crate::syntax::Pos)| {
            self.flatten(name).map_err(|_| ModuleError::UnresolvedReference {
                loc: at(*pos),
                kind: "theory",
                name: name.clone(),
            })
        };
        let source = resolve_theory(&src.source)?;
        let target = resolve_theory(&src.target)?;
        let bad = |pos, message: String| ModuleError::BadView {
            loc: at(pos),
            view: src.name.clone(),
            message,
        };

        let mut inherited: IndexMap<QName, Term> = IndexMap::new();
        let mut includes = Vec::new();
        let mut own_src: Vec<(QName, Term, String, crate::syntax::Pos)> = Vec::new();
        for item in &src.items {
            match item {
                ViewItem::Include(n, p) => {
                    let w = self.view(n).ok_or_else(|| ModuleError::UnresolvedReference {
                        loc: at(*p),
                        kind: "view",
                        name: n.clone(),
                    })?;
                    if !source.contains_theory(&w.source) || !target.contains_theory(&w.target) {
                        return Err(bad(
                            *p,
                            format!(
                                "included view {n} maps {} to {}, which is not part of {} to {}",
                                w.source, w.target, src.source.0, src.target.0
                            ),
                        ));
                    }
                    for (q, a) in &w.assignments {
                        if let Some(old) = inherited.get(q) {
                            if old != a {
                                return Err(bad(*p, format!("conflicting assignments for {q}")));
                            }
                        }
                        inherited.insert(q.clone(), a.clone());
                    }
                    includes.push(n.clone());
                }
                ViewItem::Assign { name, pos, value } => {
                    let q = match QName::parse_qualified(name) {
                        Some(q) if source.contains(&q) => q,
                        Some(_) => return Err(unknown_source(at(*pos), name)),
                        None => match source.vocabulary().resolve(name) {
                            Resolution::Unique(q) => q.clone(),
                            Resolution::Ambiguous(_) => {
                                return Err(bad(
                                    *pos,
                                    format!("`{name}` is ambiguous in {}; qualify it", src.source.0),
                                ))
                            }
                            Resolution::Unknown => return Err(unknown_source(at(*pos), name)),
                        },
                    };
                    let decl = source.get(&q).expect("resolved in source");
                    if decl.definiens.is_some() {
                        return Err(bad(
                            *pos,
                            format!("{q} has a definiens; only undefined constants are assigned"),
                        ));
                    }
                    if decl.implicit_args() > 0 {
                        return Err(bad(*pos, format!("{q} has implicit arguments and cannot be assigned")));
                    }
                    if inherited.contains_key(&q) || own_src.iter().any(|(o, ..)| o == &q) {
                        return Err(ModuleError::DuplicateName {
                            loc: at(*pos),
                            module: src.name.clone(),
                            name: name.clone(),
                        });
                    }
                    let rhs = parse_tokens(target.vocabulary(), &value.tokens, &[], value.end).map_err(|error| {
                        ModuleError::Term {
                            loc: at(*pos),
                            decl: name.clone(),
                            error,
                        }
                    })?;
                    own_src.push((q, rhs, name.clone(), *pos));
                }
            }
        }

        // Assignments are checked against their translated source types once
        // all of them are known. A type that mentions an unassigned constant
        // cannot be translated; totality reports that constant separately.
        let mut all = inherited;
        for (q, rhs, ..) in &own_src {
            all.insert(q.clone(), rhs.clone());
        }
        let ctx = Context::new();
        let mut own = IndexMap::new();
        for (q, rhs, name, pos) in own_src {
            let src_ty = source
                .get(&q)
                .and_then(|d| d.ty.clone())
                .expect("loaded declarations carry types");
            let checked = match translate(&all, &source, &target, &src_ty) {
                Ok(expected) => {
                    let expected = normalize(target.as_ref(), &expected).map_err(|error| ModuleError::Type {
                        loc: at(pos),
                        decl: name.clone(),
                        error,
                    })?;
                    check(target.as_ref(), &ctx, &rhs, &expected).map_err(|error| ModuleError::Type {
                        loc: at(pos),
                        decl: name.clone(),
                        error,
                    })?
                }
                Err(_) => elaborate(target.as_ref(), &ctx, &rhs, None).map_or(rhs, |(el, _)| el),
            };
            all.insert(q.clone(), checked.clone());
            own.insert(q, checked);
        }
        self.insert_view(View {
            name: src.name.clone(),
            source: src.source.0.clone(),
            target: src.target.0.clone(),
            includes,
            own,
            assignments: all,
        });
        Ok(())
    }
}

fn unknown_source(loc: Loc, name: &str) -> ModuleError {
    ModuleError::UnresolvedReference {
        loc,
        kind: "source constant",
        name: name.to_string(),
    }
}
