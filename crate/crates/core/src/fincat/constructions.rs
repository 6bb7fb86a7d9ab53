use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use super::{CatRef, CategoryBuilder, CategoryError, FinCat, FunctorData, Mor, Ob};

/// Incremental construction of a category whose objects and morphisms carry
/// structured keys. After [`Assembly::finish`] the keys are available in the
/// canonical order of the built category.
pub struct Assembly<O, M> {
    builder: CategoryBuilder,
    ob_keys: Vec<O>,
    mor_keys: Vec<M>,
    ob_index: HashMap<O, usize>,
    mor_index: HashMap<M, usize>,
    ob_names: Vec<String>,
    mor_names: Vec<String>,
}

/// A built category together with the keys of its objects and morphisms.
pub struct Assembled<O, M> {
    pub cat: CatRef,
    pub ob_keys: Vec<O>,
    pub mor_keys: Vec<M>,
    pub ob_of: HashMap<O, Ob>,
    pub mor_of: HashMap<M, Mor>,
}

impl<O: Clone + Eq + Hash, M: Clone + Eq + Hash> Default for Assembly<O, M> {
    fn default() -> Self {
        Self::new()
    }
}

impl<O: Clone + Eq + Hash, M: Clone + Eq + Hash> Assembly<O, M> {
    pub fn new() -> Self {
        Assembly {
            builder: CategoryBuilder::new(),
            ob_keys: Vec::new(),
            mor_keys: Vec::new(),
            ob_index: HashMap::new(),
            mor_index: HashMap::new(),
            ob_names: Vec::new(),
            mor_names: Vec::new(),
        }
    }

    pub fn object(&mut self, key: O, name: String) -> usize {
        if let Some(&i) = self.ob_index.get(&key) {
            return i;
        }
        let i = self.builder.add_object(name.clone());
        self.ob_index.insert(key.clone(), i);
        self.ob_keys.push(key);
        self.ob_names.push(name);
        i
    }

    pub fn morphism(&mut self, key: M, name: String, source: &O, target: &O) -> usize {
        if let Some(&i) = self.mor_index.get(&key) {
            return i;
        }
        let (s, t) = (self.ob_index[source], self.ob_index[target]);
        let i = self.builder.add_morphism(name.clone(), s, t);
        self.mor_index.insert(key.clone(), i);
        self.mor_keys.push(key);
        self.mor_names.push(name);
        i
    }

    pub fn has_object(&self, key: &O) -> bool {
        self.ob_index.contains_key(key)
    }

    pub fn morphism_count(&self) -> usize {
        self.mor_keys.len()
    }

    pub fn finish(
        mut self,
        identity: impl Fn(&O) -> M,
        mut compose: impl FnMut(&M, &M) -> M,
    ) -> Result<Assembled<O, M>, CategoryError> {
        for (i, o) in self.ob_keys.iter().enumerate() {
            let id = identity(o);
            let m = *self
                .mor_index
                .get(&id)
                .ok_or_else(|| CategoryError::MissingIdentity(self.ob_names[i].clone()))?;
            self.builder.set_identity(i, m);
        }
        let mut missing = None;
        {
            let keys = &self.mor_keys;
            let index = &self.mor_index;
            let names = &self.mor_names;
            self.builder.fill_composites(|g, f| {
                let h = compose(&keys[g], &keys[f]);
                match index.get(&h) {
                    Some(&i) => i,
                    None => {
                        missing.get_or_insert((names[g].clone(), names[f].clone()));
                        g
                    }
                }
            });
        }
        if let Some((g, f)) = missing {
            return Err(CategoryError::MissingComposite { g, f });
        }
        let cat = self.builder.build()?;
        let mut ob_keys = vec![None; cat.object_count()];
        let mut ob_of = HashMap::new();
        for (k, name) in self.ob_keys.into_iter().zip(&self.ob_names) {
            let o = cat.ob(name);
            ob_of.insert(k.clone(), o);
            ob_keys[o.0] = Some(k);
        }
        let mut mor_keys = vec![None; cat.morphism_count()];
        let mut mor_of = HashMap::new();
        for (k, name) in self.mor_keys.into_iter().zip(&self.mor_names) {
            let m = cat.mor(name);
            mor_of.insert(k.clone(), m);
            mor_keys[m.0] = Some(k);
        }
        Ok(Assembled {
            cat: Arc::new(cat),
            ob_keys: ob_keys.into_iter().map(Option::unwrap).collect(),
            mor_keys: mor_keys.into_iter().map(Option::unwrap).collect(),
            ob_of,
            mor_of,
        })
    }
}

/// Same identifiers, reversed arrows.
pub fn opposite(c: &FinCat) -> FinCat {
    let mut b = CategoryBuilder::new();
    for o in c.objects() {
        b.add_object(c.object_name(o));
    }
    for m in c.morphisms() {
        b.add_morphism(c.morphism_name(m), c.target(m).0, c.source(m).0);
    }
    for o in c.objects() {
        b.set_identity(o.0, c.identity(o).0);
    }
    for g in c.morphisms() {
        for f in c.morphisms() {
            if let Some(h) = c.compose(g, f) {
                b.set_composite(f.0, g.0, h.0);
            }
        }
    }
    // canonical order is by name, so indices are preserved
    b.build().expect("opposite of a valid category")
}

/// The subcategory on all objects with the given morphisms, and its inclusion.
/// The mask must contain identities and be closed under composition.
pub fn subcategory(c: &CatRef, member: &[bool]) -> (CatRef, FunctorData) {
    let objects = vec![true; c.object_count()];
    subcategory_on(c, &objects, member)
}

/// The subcategory on the given objects and morphisms, and its inclusion.
pub fn subcategory_on(c: &CatRef, objects: &[bool], member: &[bool]) -> (CatRef, FunctorData) {
    let mut a: Assembly<Ob, Mor> = Assembly::new();
    for o in c.objects().filter(|o| objects[o.0]) {
        a.object(o, c.object_name(o).to_owned());
    }
    for m in c.morphisms().filter(|m| member[m.0]) {
        debug_assert!(objects[c.source(m).0] && objects[c.target(m).0]);
        a.morphism(m, c.morphism_name(m).to_owned(), &c.source(m), &c.target(m));
    }
    let built = a
        .finish(|&o| c.identity(o), |&g, &f| c.comp(g, f))
        .expect("subcategory closed under composition");
    let incl = FunctorData::new(
        built.cat.clone(),
        c.clone(),
        built.ob_keys.clone(),
        built.mor_keys.clone(),
    )
    .expect("inclusion is a functor");
    (built.cat, incl)
}

/// The full subcategory on the given objects.
pub fn full_subcategory(c: &CatRef, objects: &[bool]) -> (CatRef, FunctorData) {
    let member: Vec<bool> = c
        .morphisms()
        .map(|m| objects[c.source(m).0] && objects[c.target(m).0])
        .collect();
    subcategory_on(c, objects, &member)
}

/// The wide subcategory of isomorphisms.
pub fn groupoid_core(c: &CatRef) -> (CatRef, FunctorData) {
    let member: Vec<bool> = c.morphisms().map(|m| c.is_iso(m)).collect();
    subcategory(c, &member)
}

/// The strict fiber of `p` over `x`: objects over `x`, morphisms over `id_x`.
pub fn fiber(p: &FunctorData, x: Ob) -> (CatRef, FunctorData) {
    let e = p.source();
    let idx = p.target().identity(x);
    let objects: Vec<bool> = e.objects().map(|o| p.ob(o) == x).collect();
    let member: Vec<bool> = e.morphisms().map(|m| p.mor(m) == idx).collect();
    subcategory_on(e, &objects, &member)
}

/// The arrow category `Fun(two, C)` with its codomain projection.
///
/// Objects are named like the morphisms of `C`; a commutative square
/// `(u, v): m => n` is named `m=>n[u,v]`.
pub fn arrow_category(c: &CatRef) -> (CatRef, FunctorData) {
    let mut a: Assembly<Mor, (Mor, Mor, Mor, Mor)> = Assembly::new();
    for m in c.morphisms() {
        a.object(m, c.morphism_name(m).to_owned());
    }
    for m in c.morphisms() {
        for n in c.morphisms() {
            for &u in c.hom(c.source(m), c.source(n)) {
                for &v in c.hom(c.target(m), c.target(n)) {
                    if c.comp(v, m) == c.comp(n, u) {
                        let name = format!(
                            "{}=>{}[{},{}]",
                            c.morphism_name(m),
                            c.morphism_name(n),
                            c.morphism_name(u),
                            c.morphism_name(v)
                        );
                        a.morphism((m, n, u, v), name, &m, &n);
                    }
                }
            }
        }
    }
    let built = a
        .finish(
            |&m| (m, m, c.identity(c.source(m)), c.identity(c.target(m))),
            |&(_, n2, u2, v2), &(m1, _, u1, v1)| (m1, n2, c.comp(u2, u1), c.comp(v2, v1)),
        )
        .expect("arrow category");
    let ob_map = built.ob_keys.iter().map(|&m| c.target(m)).collect();
    let mor_map = built.mor_keys.iter().map(|k| k.3).collect();
    let cod = FunctorData::new(built.cat.clone(), c.clone(), ob_map, mor_map).expect("codomain");
    (built.cat, cod)
}

/// The slice `C/x` with its forgetful functor. Objects are named like the
/// morphisms into `x`; a morphism `u: m -> n` is named `m=>n[u]`.
pub fn slice(c: &CatRef, x: Ob) -> (CatRef, FunctorData) {
    let mut a: Assembly<Mor, (Mor, Mor, Mor)> = Assembly::new();
    let over: Vec<Mor> = c.morphisms().filter(|&m| c.target(m) == x).collect();
    for &m in &over {
        a.object(m, c.morphism_name(m).to_owned());
    }
    for &m in &over {
        for &n in &over {
            for &u in c.hom(c.source(m), c.source(n)) {
                if c.comp(n, u) == m {
                    let name = format!("{}=>{}[{}]", c.morphism_name(m), c.morphism_name(n), c.morphism_name(u));
                    a.morphism((m, n, u), name, &m, &n);
                }
            }
        }
    }
    let built = a
        .finish(
            |&m| (m, m, c.identity(c.source(m))),
            |&(_, n2, u2), &(m1, _, u1)| (m1, n2, c.comp(u2, u1)),
        )
        .expect("slice");
    let ob_map = built.ob_keys.iter().map(|&m| c.source(m)).collect();
    let mor_map = built.mor_keys.iter().map(|k| k.2).collect();
    let fgt = FunctorData::new(built.cat.clone(), c.clone(), ob_map, mor_map).expect("forgetful");
    (built.cat, fgt)
}

/// Object of an iso-comma category `F ↓≅ G`: `(a, b, φ: F a ≅ G b)`.
pub type IsoCommaObject = (Ob, Ob, Mor);

/// The iso-comma category (homotopy pullback) of `F: A -> C` and
/// `G: B -> C`, with its two projections.
pub fn iso_comma(f: &FunctorData, g: &FunctorData) -> (CatRef, FunctorData, FunctorData, Vec<IsoCommaObject>) {
    comma_like(f, g, true)
}

/// The strict fiber product `A ×_C B` with its projections.
pub fn strict_pullback(f: &FunctorData, g: &FunctorData) -> (CatRef, FunctorData, FunctorData, Vec<IsoCommaObject>) {
    comma_like(f, g, false)
}

fn comma_like(f: &FunctorData, g: &FunctorData, isos: bool) -> (CatRef, FunctorData, FunctorData, Vec<IsoCommaObject>) {
    let (a, b, c) = (f.source(), g.source(), f.target());
    let mut asm: Assembly<IsoCommaObject, (IsoCommaObject, IsoCommaObject, Mor, Mor)> = Assembly::new();
    let mut objs = Vec::new();
    for x in a.objects() {
        for y in b.objects() {
            let (fx, gy) = (f.ob(x), g.ob(y));
            let candidates: Vec<Mor> = if isos {
                c.hom(fx, gy).iter().copied().filter(|&m| c.is_iso(m)).collect()
            } else if fx == gy {
                vec![c.identity(fx)]
            } else {
                vec![]
            };
            for phi in candidates {
                let key = (x, y, phi);
                let name = format!("({};{};{})", a.object_name(x), b.object_name(y), c.morphism_name(phi));
                asm.object(key, name);
                objs.push(key);
            }
        }
    }
    for &s in &objs {
        for &t in &objs {
            for &u in a.hom(s.0, t.0) {
                for &v in b.hom(s.1, t.1) {
                    if c.comp(t.2, f.mor(u)) == c.comp(g.mor(v), s.2) {
                        let name = format!(
                            "({};{};{})>({};{};{})[{};{}]",
                            a.object_name(s.0),
                            b.object_name(s.1),
                            c.morphism_name(s.2),
                            a.object_name(t.0),
                            b.object_name(t.1),
                            c.morphism_name(t.2),
                            a.morphism_name(u),
                            b.morphism_name(v)
                        );
                        asm.morphism((s, t, u, v), name, &s, &t);
                    }
                }
            }
        }
    }
    let built = asm
        .finish(
            |&o| (o, o, a.identity(o.0), b.identity(o.1)),
            |&(_, t, u2, v2), &(s, _, u1, v1)| (s, t, a.comp(u2, u1), b.comp(v2, v1)),
        )
        .expect("comma construction");
    let p1 = FunctorData::new(
        built.cat.clone(),
        a.clone(),
        built.ob_keys.iter().map(|k| k.0).collect(),
        built.mor_keys.iter().map(|k| k.2).collect(),
    )
    .expect("first projection");
    let p2 = FunctorData::new(
        built.cat.clone(),
        b.clone(),
        built.ob_keys.iter().map(|k| k.1).collect(),
        built.mor_keys.iter().map(|k| k.3).collect(),
    )
    .expect("second projection");
    (built.cat.clone(), p1, p2, built.ob_keys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::standard::{powerset, pt, sq, two, walking_iso};

    #[test]
    fn opposite_is_involutive() {
        let c = sq();
        assert_eq!(opposite(&opposite(&c)), c);
        assert_eq!(opposite(&pt()), pt());
    }

    #[test]
    fn arrow_category_of_two() {
        let (ar, cod) = arrow_category(&two().shared());
        assert_eq!(ar.object_count(), 3);
        // squares: id_0 -> id_0, id_0 -> f, id_0 -> id_1, f -> f, f -> id_1, id_1 -> id_1
        assert_eq!(ar.morphism_count(), 6);
        assert_eq!(cod.source().object_count(), 3);
    }

    #[test]
    fn cores() {
        let (c, _) = groupoid_core(&two().shared());
        assert_eq!(c.morphism_count(), 2);
        let wi = walking_iso().shared();
        assert_eq!(*groupoid_core(&wi).0, *wi);
    }

    #[test]
    fn slices_of_a_poset() {
        let p = powerset(&["1", "2"]).shared();
        let (s, _) = slice(&p, p.ob("{1,2}"));
        assert_eq!(s.object_count(), 4);
        assert_eq!(s.morphism_count(), 9);
    }
}
