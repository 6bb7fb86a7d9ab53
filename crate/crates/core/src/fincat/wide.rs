use thiserror::Error;

use super::{subcategory, CatRef, FinCat, FunctorData, Mor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WideError {
    #[error("identity `{0}` is missing")]
    MissingIdentity(String),
    #[error("isomorphism `{0}` is missing")]
    MissingIso(String),
    #[error("not closed under composition: `{g}.{f}`")]
    NotClosed { g: String, f: String },
}

/// A wide subcategory containing every isomorphism of its carrier.
#[derive(Clone, Debug, PartialEq)]
pub struct WideSubcat {
    carrier: CatRef,
    member: Vec<bool>,
}

impl WideSubcat {
    pub fn new(carrier: CatRef, member: Vec<bool>) -> Result<Self, WideError> {
        assert_eq!(member.len(), carrier.morphism_count());
        let c = &*carrier;
        for m in c.morphisms() {
            if member[m.0] {
                continue;
            }
            if c.is_identity(m) {
                return Err(WideError::MissingIdentity(c.morphism_name(m).to_owned()));
            }
            if c.is_iso(m) {
                return Err(WideError::MissingIso(c.morphism_name(m).to_owned()));
            }
        }
        for f in c.morphisms().filter(|f| member[f.0]) {
            for o in c.objects() {
                for &g in c.hom(c.target(f), o) {
                    if member[g.0] && !member[c.comp(g, f).0] {
                        return Err(WideError::NotClosed {
                            g: c.morphism_name(g).to_owned(),
                            f: c.morphism_name(f).to_owned(),
                        });
                    }
                }
            }
        }
        Ok(WideSubcat { carrier, member })
    }

    pub fn from_predicate(carrier: CatRef, pred: impl Fn(&FinCat, Mor) -> bool) -> Result<Self, WideError> {
        let member = carrier.morphisms().map(|m| pred(&carrier, m)).collect();
        Self::new(carrier, member)
    }

    pub fn all(carrier: CatRef) -> Self {
        let member = vec![true; carrier.morphism_count()];
        WideSubcat { carrier, member }
    }

    pub fn isos(carrier: CatRef) -> Self {
        let member = carrier.morphisms().map(|m| carrier.is_iso(m)).collect();
        WideSubcat { carrier, member }
    }

    pub fn carrier(&self) -> &CatRef {
        &self.carrier
    }

    pub fn contains(&self, m: Mor) -> bool {
        self.member[m.0]
    }

    pub fn members(&self) -> impl Iterator<Item = Mor> + '_ {
        self.carrier.morphisms().filter(|m| self.member[m.0])
    }

    pub fn mask(&self) -> &[bool] {
        &self.member
    }

    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_all(&self) -> bool {
        self.member.iter().all(|&b| b)
    }

    pub fn intersect(&self, other: &WideSubcat) -> WideSubcat {
        WideSubcat {
            carrier: self.carrier.clone(),
            member: self.member.iter().zip(&other.member).map(|(a, b)| *a && *b).collect(),
        }
    }

    /// The same morphism set inside a different carrier with identical
    /// morphism indices (e.g. the opposite category).
    pub fn transfer(&self, carrier: CatRef) -> WideSubcat {
        assert_eq!(carrier.morphism_count(), self.member.len());
        WideSubcat {
            carrier,
            member: self.member.clone(),
        }
    }

    /// Preimage along a functor into the carrier.
    pub fn preimage(&self, p: &FunctorData) -> WideSubcat {
        let member = p.source().morphisms().map(|m| self.member[p.mor(m).0]).collect();
        WideSubcat {
            carrier: p.source().clone(),
            member,
        }
    }

    /// The subcategory as a standalone category, with its inclusion functor.
    pub fn as_category(&self) -> (CatRef, FunctorData) {
        subcategory(&self.carrier, &self.member)
    }

    /// Morphism names, in canonical order.
    pub fn names(&self) -> Vec<String> {
        self.members()
            .map(|m| self.carrier.morphism_name(m).to_owned())
            .collect()
    }
}

/// Smallest wide subcategory containing `generators` and all isomorphisms.
pub fn wide_closure(c: &CatRef, generators: &[Mor]) -> WideSubcat {
    let mut member: Vec<bool> = c.morphisms().map(|m| c.is_iso(m)).collect();
    let mut frontier: Vec<Mor> = Vec::new();
    for &g in generators {
        if !member[g.0] {
            member[g.0] = true;
        }
    }
    frontier.extend(c.morphisms().filter(|m| member[m.0]));
    while let Some(f) = frontier.pop() {
        // post- and pre-compose with every member
        let (s, t) = (c.source(f), c.target(f));
        let mut fresh = Vec::new();
        for o in c.objects() {
            for &g in c.hom(t, o) {
                if member[g.0] {
                    fresh.push(c.comp(g, f));
                }
            }
            for &h in c.hom(o, s) {
                if member[h.0] {
                    fresh.push(c.comp(f, h));
                }
            }
        }
        for m in fresh {
            if !member[m.0] {
                member[m.0] = true;
                frontier.push(m);
            }
        }
    }
    WideSubcat {
        carrier: c.clone(),
        member,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::build_standard;

    #[test]
    fn closure_of_nothing_is_isos() {
        let two = build_standard("two").unwrap().shared();
        let w = wide_closure(&two, &[]);
        assert_eq!(w.len(), 2);
        let wi = build_standard("walking_iso").unwrap().shared();
        assert!(wide_closure(&wi, &[]).is_all());
    }

    #[test]
    fn missing_iso_is_rejected() {
        let wi = build_standard("walking_iso").unwrap().shared();
        let member = wi.morphisms().map(|m| wi.is_identity(m)).collect();
        assert!(matches!(WideSubcat::new(wi, member), Err(WideError::MissingIso(_))));
    }
}
