use std::sync::Arc;

use thiserror::Error;

use super::{opposite, CatRef, FinCat, Mor, Ob};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctorError {
    #[error("map has the wrong size: expected {expected}, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("`{0}` is not mapped to a morphism between the images of its endpoints")]
    EndpointMismatch(String),
    #[error("identity of `{0}` is not preserved")]
    IdentityNotPreserved(String),
    #[error("composite `{g}.{f}` is not preserved")]
    CompositeNotPreserved { g: String, f: String },
    #[error("functors do not compose: {0}")]
    NotComposable(String),
    #[error("transformation component at `{0}` has the wrong endpoints")]
    ComponentMismatch(String),
    #[error("naturality fails at `{0}`")]
    NotNatural(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
}

pub(crate) fn same_cat(a: &CatRef, b: &CatRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A validated functor between finite categories.
#[derive(Clone, Debug)]
pub struct FunctorData {
    source: CatRef,
    target: CatRef,
    ob_map: Vec<Ob>,
    mor_map: Vec<Mor>,
}

impl PartialEq for FunctorData {
    fn eq(&self, other: &Self) -> bool {
        self.ob_map == other.ob_map
            && self.mor_map == other.mor_map
            && same_cat(&self.source, &other.source)
            && same_cat(&self.target, &other.target)
    }
}

impl FunctorData {
    pub fn new(source: CatRef, target: CatRef, ob_map: Vec<Ob>, mor_map: Vec<Mor>) -> Result<Self, FunctorError> {
        if ob_map.len() != source.object_count() {
            return Err(FunctorError::WrongArity {
                expected: source.object_count(),
                got: ob_map.len(),
            });
        }
        if mor_map.len() != source.morphism_count() {
            return Err(FunctorError::WrongArity {
                expected: source.morphism_count(),
                got: mor_map.len(),
            });
        }
        let f = FunctorData {
            source,
            target,
            ob_map,
            mor_map,
        };
        f.check()?;
        Ok(f)
    }

    /// Builds a functor from a morphism map alone; the object map is read off
    /// identities.
    pub fn from_morphism_map(source: CatRef, target: CatRef, mor_map: Vec<Mor>) -> Result<Self, FunctorError> {
        if mor_map.len() != source.morphism_count() {
            return Err(FunctorError::WrongArity {
                expected: source.morphism_count(),
                got: mor_map.len(),
            });
        }
        let ob_map = source
            .objects()
            .map(|o| target.source(mor_map[source.identity(o).0]))
            .collect();
        Self::new(source, target, ob_map, mor_map)
    }

    /// Builds a functor from name maps.
    pub fn from_names(
        source: CatRef,
        target: CatRef,
        objects: &[(&str, &str)],
        morphisms: &[(&str, &str)],
    ) -> Result<Self, FunctorError> {
        let mut ob_map = vec![None; source.object_count()];
        for (a, b) in objects {
            let a = source
                .object(a)
                .ok_or_else(|| FunctorError::UnknownName(a.to_string()))?;
            let b = target
                .object(b)
                .ok_or_else(|| FunctorError::UnknownName(b.to_string()))?;
            ob_map[a.0] = Some(b);
        }
        let mut mor_map = vec![None; source.morphism_count()];
        for (a, b) in morphisms {
            let a = source
                .morphism(a)
                .ok_or_else(|| FunctorError::UnknownName(a.to_string()))?;
            let b = target
                .morphism(b)
                .ok_or_else(|| FunctorError::UnknownName(b.to_string()))?;
            mor_map[a.0] = Some(b);
        }
        // identities may be left implicit
        for o in source.objects() {
            if let Some(t) = ob_map[o.0] {
                let id = source.identity(o);
                mor_map[id.0].get_or_insert(target.identity(t));
            }
        }
        let ob_map = ob_map
            .into_iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| FunctorError::UnknownName(source.object_name(Ob(i)).to_owned())))
            .collect::<Result<_, _>>()?;
        let mor_map = mor_map
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| FunctorError::UnknownName(source.morphism_name(Mor(i)).to_owned())))
            .collect::<Result<_, _>>()?;
        Self::new(source, target, ob_map, mor_map)
    }

    fn check(&self) -> Result<(), FunctorError> {
        let (s, t) = (&*self.source, &*self.target);
        for m in s.morphisms() {
            let fm = self.mor_map[m.0];
            if fm.0 >= t.morphism_count()
                || t.source(fm) != self.ob_map[s.source(m).0]
                || t.target(fm) != self.ob_map[s.target(m).0]
            {
                return Err(FunctorError::EndpointMismatch(s.morphism_name(m).to_owned()));
            }
        }
        for o in s.objects() {
            if self.mor_map[s.identity(o).0] != t.identity(self.ob_map[o.0]) {
                return Err(FunctorError::IdentityNotPreserved(s.object_name(o).to_owned()));
            }
        }
        for f in s.morphisms() {
            for c in s.objects() {
                for &g in s.hom(s.target(f), c) {
                    let lhs = self.mor_map[s.comp(g, f).0];
                    let rhs = t.comp(self.mor_map[g.0], self.mor_map[f.0]);
                    if lhs != rhs {
                        return Err(FunctorError::CompositeNotPreserved {
                            g: s.morphism_name(g).to_owned(),
                            f: s.morphism_name(f).to_owned(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(c: CatRef) -> Self {
        FunctorData {
            ob_map: c.objects().collect(),
            mor_map: c.morphisms().collect(),
            source: c.clone(),
            target: c,
        }
    }

    /// The constant functor at `object`.
    pub fn constant(source: CatRef, target: CatRef, object: Ob) -> Self {
        let id = target.identity(object);
        FunctorData {
            ob_map: vec![object; source.object_count()],
            mor_map: vec![id; source.morphism_count()],
            source,
            target,
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FunctorData) -> Result<FunctorData, FunctorError> {
        if !same_cat(&first.target, &self.source) {
            return Err(FunctorError::NotComposable(format!(
                "{:?} -> {:?}",
                first.target, self.source
            )));
        }
        Ok(FunctorData {
            source: first.source.clone(),
            target: self.target.clone(),
            ob_map: first.ob_map.iter().map(|o| self.ob_map[o.0]).collect(),
            mor_map: first.mor_map.iter().map(|m| self.mor_map[m.0]).collect(),
        })
    }

    pub fn source(&self) -> &CatRef {
        &self.source
    }

    pub fn target(&self) -> &CatRef {
        &self.target
    }

    pub fn ob(&self, o: Ob) -> Ob {
        self.ob_map[o.0]
    }

    pub fn mor(&self, m: Mor) -> Mor {
        self.mor_map[m.0]
    }

    pub fn object_map(&self) -> &[Ob] {
        &self.ob_map
    }

    pub fn morphism_map(&self) -> &[Mor] {
        &self.mor_map
    }

    pub fn is_identity(&self) -> bool {
        same_cat(&self.source, &self.target)
            && self.ob_map.iter().enumerate().all(|(i, o)| o.0 == i)
            && self.mor_map.iter().enumerate().all(|(i, m)| m.0 == i)
    }

    /// Bijective on objects and on morphisms.
    pub fn is_isomorphism(&self) -> bool {
        let mut hit_o = vec![false; self.target.object_count()];
        let mut hit_m = vec![false; self.target.morphism_count()];
        self.source.object_count() == self.target.object_count()
            && self.source.morphism_count() == self.target.morphism_count()
            && self.ob_map.iter().all(|o| !std::mem::replace(&mut hit_o[o.0], true))
            && self.mor_map.iter().all(|m| !std::mem::replace(&mut hit_m[m.0], true))
    }

    /// Inverse of an isomorphism of categories.
    pub fn inverse(&self) -> Option<FunctorData> {
        if !self.is_isomorphism() {
            return None;
        }
        let mut ob_map = vec![Ob(0); self.target.object_count()];
        for (i, o) in self.ob_map.iter().enumerate() {
            ob_map[o.0] = Ob(i);
        }
        let mut mor_map = vec![Mor(0); self.target.morphism_count()];
        for (i, m) in self.mor_map.iter().enumerate() {
            mor_map[m.0] = Mor(i);
        }
        Some(FunctorData {
            source: self.target.clone(),
            target: self.source.clone(),
            ob_map,
            mor_map,
        })
    }

    /// The same assignment viewed between opposite categories.
    pub fn opposite(&self) -> FunctorData {
        self.opposite_between(Arc::new(opposite(&self.source)), Arc::new(opposite(&self.target)))
    }

    /// Like [`FunctorData::opposite`] but reusing already-built opposites.
    pub fn opposite_between(&self, source_op: CatRef, target_op: CatRef) -> FunctorData {
        FunctorData {
            source: source_op,
            target: target_op,
            ob_map: self.ob_map.clone(),
            mor_map: self.mor_map.clone(),
        }
    }

    /// Restricts the functor to the subcategory `sub` whose objects and
    /// morphisms are named like those of the source, landing in `target_sub`.
    pub fn restrict(&self, sub: CatRef, target_sub: CatRef) -> Result<FunctorData, FunctorError> {
        let lookup_m = |m: Mor| -> Result<Mor, FunctorError> {
            let name = sub.morphism_name(m);
            let here = self
                .source
                .morphism(name)
                .ok_or_else(|| FunctorError::UnknownName(name.to_owned()))?;
            let image = self.target.morphism_name(self.mor(here));
            target_sub
                .morphism(image)
                .ok_or_else(|| FunctorError::UnknownName(image.to_owned()))
        };
        let mor_map = sub.morphisms().map(lookup_m).collect::<Result<Vec<_>, _>>()?;
        FunctorData::from_morphism_map(sub, target_sub, mor_map)
    }
}

/// A validated natural transformation `source ⇒ target`.
#[derive(Clone, Debug, PartialEq)]
pub struct NatTransData {
    source: FunctorData,
    target: FunctorData,
    components: Vec<Mor>,
}

impl NatTransData {
    pub fn new(source: FunctorData, target: FunctorData, components: Vec<Mor>) -> Result<Self, FunctorError> {
        if !same_cat(&source.source, &target.source) || !same_cat(&source.target, &target.target) {
            return Err(FunctorError::NotComposable("parallel functors expected".into()));
        }
        if components.len() != source.source.object_count() {
            return Err(FunctorError::WrongArity {
                expected: source.source.object_count(),
                got: components.len(),
            });
        }
        let t = NatTransData {
            source,
            target,
            components,
        };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<(), FunctorError> {
        let c = &*self.source.source;
        let d = &*self.source.target;
        for x in c.objects() {
            let a = self.components[x.0];
            if a.0 >= d.morphism_count() || d.source(a) != self.source.ob(x) || d.target(a) != self.target.ob(x) {
                return Err(FunctorError::ComponentMismatch(c.object_name(x).to_owned()));
            }
        }
        for f in c.morphisms() {
            let (x, y) = (c.source(f), c.target(f));
            let lhs = d.comp(self.target.mor(f), self.components[x.0]);
            let rhs = d.comp(self.components[y.0], self.source.mor(f));
            if lhs != rhs {
                return Err(FunctorError::NotNatural(c.morphism_name(f).to_owned()));
            }
        }
        Ok(())
    }

    pub fn identity(f: &FunctorData) -> Self {
        let d = f.target();
        NatTransData {
            components: f.ob_map.iter().map(|&o| d.identity(o)).collect(),
            source: f.clone(),
            target: f.clone(),
        }
    }

    pub fn source(&self) -> &FunctorData {
        &self.source
    }

    pub fn target(&self) -> &FunctorData {
        &self.target
    }

    pub fn component(&self, x: Ob) -> Mor {
        self.components[x.0]
    }

    pub fn components(&self) -> &[Mor] {
        &self.components
    }

    /// Vertical composite `self ∘ first`.
    pub fn after(&self, first: &NatTransData) -> Result<NatTransData, FunctorError> {
        if first.target != self.source {
            return Err(FunctorError::NotComposable("vertical composite".into()));
        }
        let d = self.source.target();
        let components = first
            .components
            .iter()
            .zip(&self.components)
            .map(|(&a, &b)| d.comp(b, a))
            .collect();
        Ok(NatTransData {
            source: first.source.clone(),
            target: self.target.clone(),
            components,
        })
    }

    /// Whiskering `outer ∘ self`.
    pub fn whisker_post(&self, outer: &FunctorData) -> Result<NatTransData, FunctorError> {
        Ok(NatTransData {
            source: outer.after(&self.source)?,
            target: outer.after(&self.target)?,
            components: self.components.iter().map(|&m| outer.mor(m)).collect(),
        })
    }

    /// Whiskering `self ∘ inner`.
    pub fn whisker_pre(&self, inner: &FunctorData) -> Result<NatTransData, FunctorError> {
        Ok(NatTransData {
            source: self.source.after(inner)?,
            target: self.target.after(inner)?,
            components: inner.ob_map.iter().map(|o| self.components[o.0]).collect(),
        })
    }

    /// The first object whose component is not invertible.
    pub fn first_non_iso(&self) -> Option<Ob> {
        let d = self.source.target();
        self.source.source().objects().find(|x| !d.is_iso(self.components[x.0]))
    }

    pub fn is_iso(&self) -> bool {
        self.first_non_iso().is_none()
    }

    pub fn inverse(&self) -> Option<NatTransData> {
        let d = self.source.target();
        let components = self
            .components
            .iter()
            .map(|&m| d.inverse(m))
            .collect::<Option<Vec<_>>>()?;
        Some(NatTransData {
            source: self.target.clone(),
            target: self.source.clone(),
            components,
        })
    }

    /// Same components, read as a transformation between opposite functors
    /// (which reverses its direction).
    pub fn opposite_between(&self, source_op: &FunctorData, target_op: &FunctorData) -> NatTransData {
        NatTransData {
            source: target_op.clone(),
            target: source_op.clone(),
            components: self.components.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        let d = self.source.target();
        self.source == self.target && self.components.iter().all(|&m| d.is_identity(m))
    }
}

impl FinCat {
    /// Convenience: `Arc`-wrap a category.
    pub fn shared(self) -> CatRef {
        Arc::new(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::build_standard;

    #[test]
    fn identity_functor_is_isomorphism() {
        let sq = build_standard("sq").unwrap().shared();
        let id = FunctorData::identity(sq.clone());
        assert!(id.is_identity());
        assert!(id.is_isomorphism());
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn rejects_non_functorial_map() {
        let two = build_standard("two").unwrap().shared();
        let pt = build_standard("pt").unwrap().shared();
        // send f to a non-identity endpoint pair: impossible in pt, so use two -> two swapping
        let err =
            FunctorData::from_names(two.clone(), two.clone(), &[("0", "1"), ("1", "0")], &[("f", "f")]).unwrap_err();
        assert!(matches!(err, FunctorError::EndpointMismatch(_)));
        let bang = FunctorData::constant(two.clone(), pt.clone(), Ob(0));
        assert_eq!(bang.mor(two.mor("f")), pt.identity(Ob(0)));
    }

    #[test]
    fn naturality_is_checked() {
        let two = build_standard("two").unwrap().shared();
        let c0 = FunctorData::constant(two.clone(), two.clone(), two.ob("0"));
        let c1 = FunctorData::constant(two.clone(), two.clone(), two.ob("1"));
        let f = two.mor("f");
        let t = NatTransData::new(c0.clone(), c1.clone(), vec![f, f]).unwrap();
        assert!(!t.is_iso());
        let id = FunctorData::identity(two.clone());
        // id => c1 with components (f, id_1) is natural
        NatTransData::new(id.clone(), c1.clone(), vec![f, two.identity(two.ob("1"))]).unwrap();
        // c1 => id is not even well-typed at 0
        assert!(NatTransData::new(c1, id, vec![f, f]).is_err());
    }
}
