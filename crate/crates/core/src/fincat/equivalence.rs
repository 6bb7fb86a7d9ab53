use serde::Serialize;

use super::{FunctorData, Ob};

/// Verdict of [`check_equivalence`], with the first counterexample found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub fully_faithful: bool,
    /// A pair of source objects on which the hom map is not bijective.
    pub hom_counterexample: Option<(String, String)>,
    pub essentially_surjective: bool,
    /// A target object not isomorphic to any image.
    pub missed_object: Option<String>,
}

impl EquivalenceReport {
    pub fn is_equivalence(&self) -> bool {
        self.fully_faithful && self.essentially_surjective
    }
}

pub fn check_equivalence(f: &FunctorData) -> EquivalenceReport {
    let (a, b) = (f.source(), f.target());
    let mut hom_counterexample = None;
    'outer: for x in a.objects() {
        for y in a.objects() {
            let src = a.hom(x, y);
            let tgt = b.hom(f.ob(x), f.ob(y));
            let mut images: Vec<_> = src.iter().map(|&m| f.mor(m)).collect();
            images.sort();
            images.dedup();
            if images.len() != src.len() || images.len() != tgt.len() {
                hom_counterexample = Some((a.object_name(x).to_owned(), a.object_name(y).to_owned()));
                break 'outer;
            }
        }
    }
    let missed = b
        .objects()
        .find(|&z| !a.objects().any(|x| b.find_iso(f.ob(x), z).is_some()));
    EquivalenceReport {
        fully_faithful: hom_counterexample.is_none(),
        hom_counterexample,
        essentially_surjective: missed.is_none(),
        missed_object: missed.map(|z: Ob| b.object_name(z).to_owned()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::standard::{pt, sq, two, walking_iso};

    #[test]
    fn identity_is_equivalence() {
        let c = sq().shared();
        assert!(check_equivalence(&FunctorData::identity(c)).is_equivalence());
    }

    #[test]
    fn point_in_two_misses_one() {
        let (p, t) = (pt().shared(), two().shared());
        let i = FunctorData::constant(p, t, Ob(0));
        let r = check_equivalence(&i);
        assert!(r.fully_faithful);
        assert_eq!(r.missed_object.as_deref(), Some("1"));
    }

    #[test]
    fn walking_iso_is_contractible() {
        let (w, p) = (walking_iso().shared(), pt().shared());
        assert!(check_equivalence(&FunctorData::constant(w, p, Ob(0))).is_equivalence());
    }
}
