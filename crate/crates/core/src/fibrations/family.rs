use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::FibrationError;
use crate::fincat::{CatRef, FinCat, FunctorData, Mor, NatTransData, Ob};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// A normalized pseudofunctor `C -> Cat` (covariant) or `C^op -> Cat`
/// (contravariant).
///
/// Identity morphisms are sent to identity functors. For a composable pair
/// `(g, f)` the coherence iso goes from the composite of transports to the
/// transport of `g ∘ f`:
/// covariant `F(g) F(f) ⇒ F(gf)`, contravariant `F(f) F(g) ⇒ F(gf)`.
#[derive(Clone, Debug)]
pub struct IndexedFamily {
    base: CatRef,
    variance: Variance,
    fibers: Vec<CatRef>,
    transports: Vec<FunctorData>,
    coherence: HashMap<(Mor, Mor), NatTransData>,
}

fn same(a: &CatRef, b: &CatRef) -> bool {
    std::sync::Arc::ptr_eq(a, b) || **a == **b
}

impl IndexedFamily {
    /// Validates endpoints, normalization and the cocycle condition. Missing
    /// coherence entries are taken to be identities, which requires the
    /// composite to agree strictly with the transport.
    pub fn new(
        base: CatRef,
        variance: Variance,
        fibers: Vec<CatRef>,
        transports: Vec<FunctorData>,
        coherence: HashMap<(Mor, Mor), NatTransData>,
    ) -> Result<Self, FibrationError> {
        let bad = |s: String| Err(FibrationError::MalformedFamily(s));
        if fibers.len() != base.object_count() || transports.len() != base.morphism_count() {
            return bad("wrong number of fibers or transports".into());
        }
        for m in base.morphisms() {
            let (s, t) = (base.source(m), base.target(m));
            let (from, to) = match variance {
                Variance::Covariant => (s, t),
                Variance::Contravariant => (t, s),
            };
            let tr = &transports[m.0];
            if !same(tr.source(), &fibers[from.0]) || !same(tr.target(), &fibers[to.0]) {
                return bad(format!("transport of `{}` has wrong endpoints", base.morphism_name(m)));
            }
            if base.is_identity(m) && !tr.is_identity() {
                return bad(format!("transport of `{}` is not the identity", base.morphism_name(m)));
            }
        }
        let mut family = IndexedFamily {
            base,
            variance,
            fibers,
            transports,
            coherence: HashMap::new(),
        };
        let mut given = coherence;
        let base = family.base.clone();
        for f in base.morphisms() {
            for g in base.morphisms() {
                if base.source(g) != base.target(f) {
                    continue;
                }
                let gf = base.comp(g, f);
                let composite = family.composite(g, f)?;
                let target = &family.transports[gf.0];
                let mu = match given.remove(&(g, f)) {
                    Some(mu) => mu,
                    None if composite == *target => NatTransData::identity(target),
                    None => {
                        return bad(format!(
                            "no coherence for ({}, {}) and the composite is not strict",
                            base.morphism_name(g),
                            base.morphism_name(f)
                        ))
                    }
                };
                if *mu.source() != composite || mu.target() != target || !mu.is_iso() {
                    return bad(format!(
                        "coherence for ({}, {}) is not an iso between the right functors",
                        base.morphism_name(g),
                        base.morphism_name(f)
                    ));
                }
                if (base.is_identity(g) || base.is_identity(f)) && !mu.is_identity() {
                    return bad(format!(
                        "coherence for ({}, {}) is not normalized",
                        base.morphism_name(g),
                        base.morphism_name(f)
                    ));
                }
                family.coherence.insert((g, f), mu);
            }
        }
        if let Some((g, _)) = given.keys().next() {
            return bad(format!(
                "coherence given for a non-composable pair at `{}`",
                base.morphism_name(*g)
            ));
        }
        family.check_cocycle()?;
        Ok(family)
    }

    /// A strict functor, all coherence isos identities.
    pub fn strict(
        base: CatRef,
        variance: Variance,
        fibers: Vec<CatRef>,
        transports: Vec<FunctorData>,
    ) -> Result<Self, FibrationError> {
        Self::new(base, variance, fibers, transports, HashMap::new())
    }

    /// Builds a strict family from named transports; identities are implicit.
    pub fn from_named(
        base: CatRef,
        variance: Variance,
        fibers: &[(&str, CatRef)],
        transports: &[(&str, FunctorData)],
    ) -> Result<Self, FibrationError> {
        let mut fib = vec![None; base.object_count()];
        for (name, c) in fibers {
            let o = base
                .object(name)
                .ok_or_else(|| FibrationError::MalformedFamily(format!("unknown object `{name}`")))?;
            fib[o.0] = Some(c.clone());
        }
        let fib: Vec<CatRef> = fib
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| FibrationError::MalformedFamily(format!("no fiber at `{}`", base.object_name(Ob(i)))))
            })
            .collect::<Result<_, _>>()?;
        let mut tr = vec![None; base.morphism_count()];
        for (name, f) in transports {
            let m = base
                .morphism(name)
                .ok_or_else(|| FibrationError::MalformedFamily(format!("unknown morphism `{name}`")))?;
            tr[m.0] = Some(f.clone());
        }
        let tr = base
            .morphisms()
            .map(|m| match tr[m.0].take() {
                Some(f) => Ok(f),
                None if base.is_identity(m) => Ok(FunctorData::identity(fib[base.source(m).0].clone())),
                None => Err(FibrationError::MalformedFamily(format!(
                    "no transport for `{}`",
                    base.morphism_name(m)
                ))),
            })
            .collect::<Result<_, _>>()?;
        Self::strict(base, variance, fib, tr)
    }

    /// The family with every fiber equal to `fiber` and identity transports.
    pub fn constant(base: CatRef, variance: Variance, fiber: CatRef) -> Self {
        let fibers = vec![fiber.clone(); base.object_count()];
        let transports = vec![FunctorData::identity(fiber); base.morphism_count()];
        Self::strict(base, variance, fibers, transports).expect("constant family")
    }

    pub fn base(&self) -> &CatRef {
        &self.base
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn fiber(&self, c: Ob) -> &CatRef {
        &self.fibers[c.0]
    }

    pub fn fibers(&self) -> &[CatRef] {
        &self.fibers
    }

    pub fn transport(&self, m: Mor) -> &FunctorData {
        &self.transports[m.0]
    }

    pub fn transports(&self) -> &[FunctorData] {
        &self.transports
    }

    /// Coherence iso for the composable pair `(g, f)`.
    pub fn coherence(&self, g: Mor, f: Mor) -> &NatTransData {
        &self.coherence[&(g, f)]
    }

    /// Whether every coherence iso is an identity.
    pub fn is_strict(&self) -> bool {
        self.coherence.values().all(NatTransData::is_identity)
    }

    /// Composable pairs with a non-identity coherence iso, by name.
    pub fn nontrivial_coherence(&self) -> BTreeMap<(String, String), usize> {
        let mut out = BTreeMap::new();
        for (&(g, f), mu) in &self.coherence {
            let n = mu
                .components()
                .iter()
                .filter(|&&m| !mu.target().target().is_identity(m))
                .count();
            if n > 0 {
                out.insert(
                    (
                        self.base.morphism_name(g).to_owned(),
                        self.base.morphism_name(f).to_owned(),
                    ),
                    n,
                );
            }
        }
        out
    }

    /// The composite of transports for `(g, f)` in the order dictated by the
    /// variance.
    pub fn composite(&self, g: Mor, f: Mor) -> Result<FunctorData, FibrationError> {
        let (fg, ff) = (&self.transports[g.0], &self.transports[f.0]);
        Ok(match self.variance {
            Variance::Covariant => fg.after(ff)?,
            Variance::Contravariant => ff.after(fg)?,
        })
    }

    fn check_cocycle(&self) -> Result<(), FibrationError> {
        let b = &self.base;
        for f in b.morphisms() {
            for g in b.morphisms().filter(|&g| b.source(g) == b.target(f)) {
                for h in b.morphisms().filter(|&h| b.source(h) == b.target(g)) {
                    let (gf, hg) = (b.comp(g, f), b.comp(h, g));
                    let (lhs, rhs) = match self.variance {
                        Variance::Covariant => (
                            self.coherence(h, gf)
                                .after(&self.coherence(g, f).whisker_post(self.transport(h))?)?,
                            self.coherence(hg, f)
                                .after(&self.coherence(h, g).whisker_pre(self.transport(f))?)?,
                        ),
                        Variance::Contravariant => (
                            self.coherence(hg, f)
                                .after(&self.coherence(h, g).whisker_post(self.transport(f))?)?,
                            self.coherence(h, gf)
                                .after(&self.coherence(g, f).whisker_pre(self.transport(h))?)?,
                        ),
                    };
                    if lhs.components() != rhs.components() {
                        let n = |m: Mor| b.morphism_name(m).to_owned();
                        return Err(FibrationError::IncoherentFamily {
                            h: n(h),
                            g: n(g),
                            f: n(f),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The same data read as a family over the opposite base with the other
    /// variance.
    pub fn over_opposite(&self) -> IndexedFamily {
        let base: CatRef = std::sync::Arc::new(crate::fincat::opposite(&self.base));
        let variance = match self.variance {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        };
        let coherence = self
            .coherence
            .iter()
            .map(|(&(g, f), mu)| ((f, g), mu.clone()))
            .collect();
        IndexedFamily {
            base,
            variance,
            fibers: self.fibers.clone(),
            transports: self.transports.clone(),
            coherence,
        }
    }

    /// The fiber categories as a list of names, for reports.
    pub fn describe(&self) -> Vec<(String, usize, usize)> {
        self.base
            .objects()
            .map(|c| {
                let f: &FinCat = &self.fibers[c.0];
                (
                    self.base.object_name(c).to_owned(),
                    f.object_count(),
                    f.morphism_count(),
                )
            })
            .collect()
    }
}
