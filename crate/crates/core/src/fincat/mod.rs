//! Validated finite categories.
//!
//! A [`FinCat`] stores its objects and morphisms in canonical (lexicographic)
//! order together with a dense composition table. Every value of this type has
//! passed [`CategoryBuilder::build`], so composition is total on composable
//! pairs, identities are two-sided units and composition is associative.

mod constructions;
mod equivalence;
mod functor;
pub mod standard;
mod wide;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use constructions::*;
pub use equivalence::{check_equivalence, EquivalenceReport};
pub use functor::{FunctorData, FunctorError, NatTransData};
pub use standard::{build_standard, FixtureError};
pub use wide::{wide_closure, WideSubcat};

/// Index of an object in a [`FinCat`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Ob(pub usize);

/// Index of a morphism in a [`FinCat`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mor(pub usize);

pub type CatRef = Arc<FinCat>;

const UNDEFINED: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("object `{0}` has no identity morphism")]
    MissingIdentity(String),
    #[error("composite `{g}.{f}` is ill-typed")]
    IllTypedComposite { g: String, f: String },
    #[error("composite `{g}.{f}` is not defined")]
    MissingComposite { g: String, f: String },
    #[error("identity `{identity}` is not a unit for `{morphism}`")]
    IdentityLaw { identity: String, morphism: String },
    #[error("composition is not associative on `{h}`, `{g}`, `{f}`")]
    NonAssociative { h: String, g: String, f: String },
    #[error("category has {0} morphisms, over the limit of {1}")]
    TooLarge(usize, usize),
}

/// Largest number of morphisms a dense composition table is allowed to hold.
pub const MAX_MORPHISMS: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
struct MorphismRecord {
    name: String,
    source: Ob,
    target: Ob,
}

/// A validated finite category.
#[derive(Clone)]
pub struct FinCat {
    objects: Vec<String>,
    morphisms: Vec<MorphismRecord>,
    identities: Vec<Mor>,
    table: Vec<u32>,
    homs: Vec<Vec<Mor>>,
    object_index: HashMap<String, Ob>,
    morphism_index: HashMap<String, Mor>,
}

impl PartialEq for FinCat {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.table == other.table
    }
}

impl Eq for FinCat {}

impl fmt::Debug for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinCat({} objects, {} morphisms)",
            self.objects.len(),
            self.morphisms.len()
        )
    }
}

impl FinCat {
    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = Ob> + '_ {
        (0..self.objects.len()).map(Ob)
    }

    pub fn morphisms(&self) -> impl ExactSizeIterator<Item = Mor> + '_ {
        (0..self.morphisms.len()).map(Mor)
    }

    pub fn object_name(&self, o: Ob) -> &str {
        &self.objects[o.0]
    }

    pub fn morphism_name(&self, m: Mor) -> &str {
        &self.morphisms[m.0].name
    }

    pub fn object(&self, name: &str) -> Option<Ob> {
        self.object_index.get(name).copied()
    }

    pub fn morphism(&self, name: &str) -> Option<Mor> {
        self.morphism_index.get(name).copied()
    }

    /// Looks up an object by name, panicking with a readable message if absent.
    /// Intended for fixtures and tests where the name is known statically.
    pub fn ob(&self, name: &str) -> Ob {
        self.object(name).unwrap_or_else(|| panic!("no object named `{name}`"))
    }

    /// Morphism counterpart of [`FinCat::ob`].
    pub fn mor(&self, name: &str) -> Mor {
        self.morphism(name)
            .unwrap_or_else(|| panic!("no morphism named `{name}`"))
    }

    pub fn source(&self, m: Mor) -> Ob {
        self.morphisms[m.0].source
    }

    pub fn target(&self, m: Mor) -> Ob {
        self.morphisms[m.0].target
    }

    pub fn identity(&self, o: Ob) -> Mor {
        self.identities[o.0]
    }

    pub fn is_identity(&self, m: Mor) -> bool {
        self.identities[self.source(m).0] == m
    }

    /// `g ∘ f`, defined iff `target(f) == source(g)`.
    pub fn compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        let v = self.table[g.0 * self.morphisms.len() + f.0];
        (v != UNDEFINED).then_some(Mor(v as usize))
    }

    /// `g ∘ f` for a pair already known to be composable.
    pub fn comp(&self, g: Mor, f: Mor) -> Mor {
        self.compose(g, f).unwrap_or_else(|| {
            panic!(
                "`{}` and `{}` are not composable",
                self.morphism_name(g),
                self.morphism_name(f)
            )
        })
    }

    /// Composes a path given in application order reversed, i.e.
    /// `comp_path(&[h, g, f]) == h ∘ g ∘ f`.
    pub fn comp_path(&self, path: &[Mor]) -> Mor {
        let (last, rest) = path.split_last().expect("empty path");
        rest.iter().rev().fold(*last, |acc, &m| self.comp(m, acc))
    }

    pub fn hom(&self, a: Ob, b: Ob) -> &[Mor] {
        &self.homs[a.0 * self.objects.len() + b.0]
    }

    /// A two-sided inverse of `m`, if one exists.
    pub fn inverse(&self, m: Mor) -> Option<Mor> {
        let (s, t) = (self.source(m), self.target(m));
        self.hom(t, s)
            .iter()
            .copied()
            .find(|&n| self.comp(n, m) == self.identity(s) && self.comp(m, n) == self.identity(t))
    }

    pub fn is_iso(&self, m: Mor) -> bool {
        self.inverse(m).is_some()
    }

    /// The least isomorphism `a → b` in canonical order.
    pub fn find_iso(&self, a: Ob, b: Ob) -> Option<Mor> {
        self.hom(a, b).iter().copied().find(|&m| self.is_iso(m))
    }

    pub fn is_thin(&self) -> bool {
        self.homs.iter().all(|h| h.len() <= 1)
    }

    /// Rebuilds the raw tables, e.g. to feed them through validation again.
    pub fn to_builder(&self) -> CategoryBuilder {
        let mut b = CategoryBuilder::new();
        for name in &self.objects {
            b.add_object(name);
        }
        for r in &self.morphisms {
            b.add_morphism(&r.name, r.source.0, r.target.0);
        }
        for o in self.objects() {
            b.set_identity(o.0, self.identity(o).0);
        }
        for g in self.morphisms() {
            for f in self.morphisms() {
                if let Some(h) = self.compose(g, f) {
                    b.set_composite(g.0, f.0, h.0);
                }
            }
        }
        b
    }
}

/// Raw, unvalidated category tables indexed by insertion order.
#[derive(Clone, Debug, Default)]
pub struct CategoryBuilder {
    objects: Vec<String>,
    morphisms: Vec<(String, usize, usize)>,
    identities: HashMap<usize, usize>,
    composites: HashMap<(usize, usize), usize>,
}

impl CategoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_object(&mut self, name: impl Into<String>) -> usize {
        self.objects.push(name.into());
        self.objects.len() - 1
    }

    pub fn add_morphism(&mut self, name: impl Into<String>, source: usize, target: usize) -> usize {
        self.morphisms.push((name.into(), source, target));
        self.morphisms.len() - 1
    }

    pub fn rename_morphism(&mut self, old: &str, new: &str) {
        if let Some(r) = self.morphisms.iter_mut().find(|r| r.0 == old) {
            r.0 = new.to_owned();
        }
    }

    pub fn set_identity(&mut self, object: usize, morphism: usize) {
        self.identities.insert(object, morphism);
    }

    /// Records `g ∘ f = h`.
    pub fn set_composite(&mut self, g: usize, f: usize, h: usize) {
        self.composites.insert((g, f), h);
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphism_endpoints(&self, m: usize) -> (usize, usize) {
        (self.morphisms[m].1, self.morphisms[m].2)
    }

    /// Fills in every composite `g ∘ f` of a composable pair using `rule`.
    pub fn fill_composites(&mut self, mut rule: impl FnMut(usize, usize) -> usize) {
        let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); self.objects.len()];
        for (i, (_, s, _)) in self.morphisms.iter().enumerate() {
            outgoing[*s].push(i);
        }
        for f in 0..self.morphisms.len() {
            let t = self.morphisms[f].2;
            for &g in &outgoing[t] {
                let h = rule(g, f);
                self.composites.insert((g, f), h);
            }
        }
    }

    /// Validates the tables and produces a canonically ordered [`FinCat`].
    pub fn build(self) -> Result<FinCat, CategoryError> {
        let n = self.objects.len();
        let m = self.morphisms.len();
        if m > MAX_MORPHISMS {
            return Err(CategoryError::TooLarge(m, MAX_MORPHISMS));
        }
        let mut seen = HashSet::new();
        for name in self.objects.iter().chain(self.morphisms.iter().map(|r| &r.0)) {
            if !seen.insert(name.as_str()) {
                return Err(CategoryError::DuplicateId(name.clone()));
            }
        }
        for (name, s, t) in &self.morphisms {
            if *s >= n || *t >= n {
                return Err(CategoryError::UnknownObject(format!("endpoint of `{name}`")));
            }
        }

        // canonical order
        let mut obj_order: Vec<usize> = (0..n).collect();
        obj_order.sort_by(|&a, &b| self.objects[a].cmp(&self.objects[b]));
        let mut obj_new = vec![0; n];
        for (new, &old) in obj_order.iter().enumerate() {
            obj_new[old] = new;
        }
        let mut mor_order: Vec<usize> = (0..m).collect();
        mor_order.sort_by(|&a, &b| self.morphisms[a].0.cmp(&self.morphisms[b].0));
        let mut mor_new = vec![0; m];
        for (new, &old) in mor_order.iter().enumerate() {
            mor_new[old] = new;
        }

        let objects: Vec<String> = obj_order.iter().map(|&i| self.objects[i].clone()).collect();
        let morphisms: Vec<MorphismRecord> = mor_order
            .iter()
            .map(|&i| {
                let (name, s, t) = &self.morphisms[i];
                MorphismRecord {
                    name: name.clone(),
                    source: Ob(obj_new[*s]),
                    target: Ob(obj_new[*t]),
                }
            })
            .collect();

        let mut identities = vec![Mor(usize::MAX); n];
        for old in 0..n {
            let Some(&id) = self.identities.get(&old) else {
                return Err(CategoryError::MissingIdentity(self.objects[old].clone()));
            };
            if id >= m {
                return Err(CategoryError::MissingIdentity(self.objects[old].clone()));
            }
            let rec = &morphisms[mor_new[id]];
            if rec.source.0 != obj_new[old] || rec.target.0 != obj_new[old] {
                return Err(CategoryError::MissingIdentity(self.objects[old].clone()));
            }
            identities[obj_new[old]] = Mor(mor_new[id]);
        }

        let mut table = vec![UNDEFINED; m * m];
        for (&(g, f), &h) in &self.composites {
            let name = |i: usize| self.morphisms.get(i).map(|r| r.0.clone()).unwrap_or_default();
            if g >= m || f >= m || h >= m {
                return Err(CategoryError::IllTypedComposite { g: name(g), f: name(f) });
            }
            let (gs, gt) = (self.morphisms[g].1, self.morphisms[g].2);
            let (fs, ft) = (self.morphisms[f].1, self.morphisms[f].2);
            let (hs, ht) = (self.morphisms[h].1, self.morphisms[h].2);
            if ft != gs || hs != fs || ht != gt {
                return Err(CategoryError::IllTypedComposite { g: name(g), f: name(f) });
            }
            table[mor_new[g] * m + mor_new[f]] = mor_new[h] as u32;
        }

        let mut homs = vec![Vec::new(); n * n];
        for (i, r) in morphisms.iter().enumerate() {
            homs[r.source.0 * n + r.target.0].push(Mor(i));
        }
        let object_index = objects.iter().enumerate().map(|(i, s)| (s.clone(), Ob(i))).collect();
        let morphism_index = morphisms
            .iter()
            .enumerate()
            .map(|(i, r)| (r.name.clone(), Mor(i)))
            .collect();
        let cat = FinCat {
            objects,
            morphisms,
            identities,
            table,
            homs,
            object_index,
            morphism_index,
        };
        cat.check_laws()?;
        Ok(cat)
    }
}

impl FinCat {
    fn check_laws(&self) -> Result<(), CategoryError> {
        let n = self.object_count();
        // totality on composable pairs
        for f in self.morphisms() {
            let t = self.target(f);
            for c in 0..n {
                for &g in self.hom(t, Ob(c)) {
                    if self.compose(g, f).is_none() {
                        return Err(CategoryError::MissingComposite {
                            g: self.morphism_name(g).to_owned(),
                            f: self.morphism_name(f).to_owned(),
                        });
                    }
                }
            }
        }
        for f in self.morphisms() {
            let ids = self.identity(self.source(f));
            let idt = self.identity(self.target(f));
            for (id, ok) in [(ids, self.comp(f, ids) == f), (idt, self.comp(idt, f) == f)] {
                if !ok {
                    return Err(CategoryError::IdentityLaw {
                        identity: self.morphism_name(id).to_owned(),
                        morphism: self.morphism_name(f).to_owned(),
                    });
                }
            }
        }
        for f in self.morphisms() {
            for b in 0..n {
                for &g in self.hom(self.target(f), Ob(b)) {
                    let gf = self.comp(g, f);
                    for c in 0..n {
                        for &h in self.hom(Ob(b), Ob(c)) {
                            if self.comp(h, gf) != self.comp(self.comp(h, g), f) {
                                return Err(CategoryError::NonAssociative {
                                    h: self.morphism_name(h).to_owned(),
                                    g: self.morphism_name(g).to_owned(),
                                    f: self.morphism_name(f).to_owned(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Validates raw tables given by name.
///
/// `identities` maps object names to identity morphism names and
/// `composites` lists triples `(g, f, h)` meaning `g ∘ f = h`. Composites
/// with an identity may be omitted; they are filled in.
pub fn validate_category(
    objects: &[&str],
    morphisms: &[(&str, &str, &str)],
    identities: &[(&str, &str)],
    composites: &[(&str, &str, &str)],
) -> Result<FinCat, CategoryError> {
    let mut b = CategoryBuilder::new();
    let mut obj_ix = HashMap::new();
    for o in objects {
        obj_ix.insert(*o, b.add_object(*o));
    }
    let mut mor_ix = HashMap::new();
    for (name, s, t) in morphisms {
        let s = *obj_ix
            .get(s)
            .ok_or_else(|| CategoryError::UnknownObject(s.to_string()))?;
        let t = *obj_ix
            .get(t)
            .ok_or_else(|| CategoryError::UnknownObject(t.to_string()))?;
        mor_ix.insert(*name, b.add_morphism(*name, s, t));
    }
    let lookup = |name: &str| {
        mor_ix
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::UnknownMorphism(name.to_owned()))
    };
    let mut id_of = HashMap::new();
    for (o, m) in identities {
        let oi = *obj_ix
            .get(o)
            .ok_or_else(|| CategoryError::UnknownObject(o.to_string()))?;
        let mi = lookup(m)?;
        b.set_identity(oi, mi);
        id_of.insert(oi, mi);
    }
    for (name, s, t) in morphisms {
        let f = mor_ix[name];
        let (s, t) = (obj_ix[s], obj_ix[t]);
        if let Some(&ids) = id_of.get(&s) {
            b.set_composite(f, ids, f);
        }
        if let Some(&idt) = id_of.get(&t) {
            b.set_composite(idt, f, f);
        }
    }
    for (g, f, h) in composites {
        b.set_composite(lookup(g)?, lookup(f)?, lookup(h)?);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_category_validates() {
        let c = validate_category(&["*"], &[("id", "*", "*")], &[("*", "id")], &[]).unwrap();
        assert_eq!(c.object_count(), 1);
        assert_eq!(c.morphism_count(), 1);
    }

    #[test]
    fn walking_arrow_validates() {
        let c = validate_category(
            &["0", "1"],
            &[("id_0", "0", "0"), ("id_1", "1", "1"), ("f", "0", "1")],
            &[("0", "id_0"), ("1", "id_1")],
            &[],
        )
        .unwrap();
        assert_eq!(c.morphism_count(), 3);
        assert_eq!(c.hom(c.ob("0"), c.ob("1")), &[c.mor("f")]);
    }

    #[test]
    fn ill_typed_composite_is_rejected() {
        let err = validate_category(
            &["A", "B", "C"],
            &[
                ("id_A", "A", "A"),
                ("id_B", "B", "B"),
                ("id_C", "C", "C"),
                ("f", "A", "B"),
                ("g", "B", "C"),
                ("h", "B", "C"),
            ],
            &[("A", "id_A"), ("B", "id_B"), ("C", "id_C")],
            &[("g", "f", "h")],
        )
        .unwrap_err();
        assert!(matches!(err, CategoryError::IllTypedComposite { .. }));
    }

    #[test]
    fn missing_identity_and_duplicates() {
        let err = validate_category(&["A"], &[("f", "A", "A")], &[], &[]).unwrap_err();
        assert_eq!(err, CategoryError::MissingIdentity("A".into()));
        let err = validate_category(&["A", "A"], &[], &[], &[]).unwrap_err();
        assert_eq!(err, CategoryError::DuplicateId("A".into()));
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // (a.a).a = b.a = a but a.(a.a) = a.b = b
        let err = validate_category(
            &["*"],
            &[("e", "*", "*"), ("a", "*", "*"), ("b", "*", "*")],
            &[("*", "e")],
            &[("a", "a", "b"), ("a", "b", "b"), ("b", "a", "a"), ("b", "b", "b")],
        )
        .unwrap_err();
        assert!(matches!(err, CategoryError::NonAssociative { .. }));
    }

    #[test]
    fn missing_composite_is_reported() {
        let err = validate_category(&["*"], &[("e", "*", "*"), ("a", "*", "*")], &[("*", "e")], &[]).unwrap_err();
        assert!(matches!(err, CategoryError::MissingComposite { .. }));
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let c = validate_category(
            &["b", "a"],
            &[("z", "a", "b"), ("id_b", "b", "b"), ("id_a", "a", "a")],
            &[("a", "id_a"), ("b", "id_b")],
            &[],
        )
        .unwrap();
        assert_eq!(c.object_name(Ob(0)), "a");
        assert_eq!(c.morphism_name(Mor(0)), "id_a");
        assert_eq!(c.morphism_name(Mor(2)), "z");
    }
}
