use super::{bottom, top, Logic, TableauError};
use crate::kernel::{alpha_eq, normalize, QName, Term};

impl Logic {
    /// The Herbrand domain: undefined constants whose type is the individuals
    /// type, in declaration order.
    pub fn domain(&self) -> Result<Vec<Term>, TableauError> {
        let ind = self.individuals.as_ref().ok_or(TableauError::NoDomainType)?;
        Ok(self
            .theory
            .declarations()
            .filter(|d| d.definiens.is_none() && d.ty.as_ref().is_some_and(|t| alpha_eq(t, ind)))
            .map(|d| Term::constant(d.name.clone()))
            .collect())
    }

    /// Replaces every quantifier, outside in, by the finite conjunction or
    /// disjunction of its instances over the domain. Quantifier-free terms
    /// are returned unchanged.
    pub fn ground(&self, t: &Term) -> Result<Term, TableauError> {
        let c = &self.connectives;
        if let (Term::Const(q), [body]) = (t.spine().0, t.spine().1.as_slice()) {
            let junction = if c.forall.as_ref() == Some(q) {
                Some((c.and.as_ref().ok_or(TableauError::MissingConnective("and"))?, top()))
            } else if c.exists.as_ref() == Some(q) {
                Some((c.or.as_ref().ok_or(TableauError::MissingConnective("or"))?, bottom()))
            } else {
                None
            };
            if let Some((op, unit)) = junction {
                return self.instances(op, unit, body);
            }
        }
        Ok(match t {
            Term::App(f, a) => Term::app(self.ground(f)?, self.ground(a)?),
            Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.clone(), Box::new(self.ground(b)?)),
            _ => t.clone(),
        })
    }

    fn instances(&self, op: &QName, unit: Term, body: &Term) -> Result<Term, TableauError> {
        let mut parts = Vec::new();
        for d in self.domain()? {
            let inst = normalize(self.theory.as_ref(), &Term::app(body.clone(), d))?;
            parts.push(self.ground(&inst)?);
        }
        let op = Term::constant(op.clone());
        Ok(parts
            .into_iter()
            .reduce(|acc, p| Term::apps(op.clone(), [acc, p]))
            .unwrap_or(unit))
    }
}
