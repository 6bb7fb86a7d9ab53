use std::collections::HashMap;

use super::{is_cartesian, is_cocartesian, lifts_at, FibrationError, IndexedFamily, LiftKind, Variance};
use crate::fincat::{fiber, Assembly, CatRef, FunctorData, Mor, NatTransData, Ob};

/// A choice of (co)cartesian lift for each base morphism and anchor object.
/// Identities are always lifted to identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cleavage {
    kind: LiftKind,
    lifts: HashMap<(Mor, Ob), Mor>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LiftOrder {
    Least,
    Greatest,
}

impl Cleavage {
    /// The least (or greatest) lift in canonical order for every pair.
    pub fn choose(p: &FunctorData, kind: LiftKind, order: LiftOrder) -> Result<Self, FibrationError> {
        let (e, c) = (p.source(), p.target());
        let mut lifts = HashMap::new();
        for m in c.morphisms() {
            let anchor = match kind {
                LiftKind::Cartesian => c.target(m),
                LiftKind::Cocartesian => c.source(m),
            };
            for at in e.objects().filter(|&o| p.ob(o) == anchor) {
                let chosen = if c.is_identity(m) {
                    Some(e.identity(at))
                } else {
                    let good = lifts_at(p, m, at, kind).into_iter().filter(|&n| match kind {
                        LiftKind::Cartesian => is_cartesian(p, n),
                        LiftKind::Cocartesian => is_cocartesian(p, n),
                    });
                    match order {
                        LiftOrder::Least => good.min(),
                        LiftOrder::Greatest => good.max(),
                    }
                };
                let n = chosen.ok_or_else(|| FibrationError::NotFibration {
                    kind: kind.as_str(),
                    morphism: c.morphism_name(m).to_owned(),
                    at: e.object_name(at).to_owned(),
                })?;
                lifts.insert((m, at), n);
            }
        }
        Ok(Cleavage { kind, lifts })
    }

    pub fn kind(&self) -> LiftKind {
        self.kind
    }

    pub fn lift(&self, m: Mor, at: Ob) -> Option<Mor> {
        self.lifts.get(&(m, at)).copied()
    }

    pub fn len(&self) -> usize {
        self.lifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lifts.is_empty()
    }

    /// Lifts sorted by base morphism and anchor.
    pub fn entries(&self) -> Vec<((Mor, Ob), Mor)> {
        let mut v: Vec<_> = self.lifts.iter().map(|(&k, &m)| (k, m)).collect();
        v.sort();
        v
    }
}

/// The total category of a family with its projection and canonical lifts.
///
/// Objects are keyed `(c, x)` and named `c|x`. A morphism is keyed
/// `(f, anchor, φ)`: for the cocartesian construction the anchor is the source
/// object `x` and `φ: F(f) x -> x'`; for the cartesian one the anchor is the
/// target object `x'` and `φ: x -> F(f) x'`. Names are `f|φ@anchor`.
#[derive(Clone, Debug)]
pub struct Grothendieck {
    pub total: CatRef,
    pub projection: FunctorData,
    pub cleavage: Cleavage,
    pub ob_keys: Vec<(Ob, Ob)>,
    pub mor_keys: Vec<(Mor, Ob, Mor)>,
    ob_of: HashMap<(Ob, Ob), Ob>,
}

impl Grothendieck {
    pub fn object(&self, c: Ob, x: Ob) -> Ob {
        self.ob_of[&(c, x)]
    }

    /// For each base object, the isomorphism from the strict fiber of the
    /// projection onto the family's fiber.
    pub fn fiber_comparison(&self, family: &IndexedFamily) -> Result<Vec<FunctorData>, FibrationError> {
        family
            .base()
            .objects()
            .map(|c| {
                let (fib, incl) = fiber(&self.projection, c);
                let obs = fib.objects().map(|o| self.ob_keys[incl.ob(o).0].1).collect();
                let mors = fib.morphisms().map(|m| self.mor_keys[incl.mor(m).0].2).collect();
                Ok(FunctorData::new(fib, family.fiber(c).clone(), obs, mors)?)
            })
            .collect()
    }
}

fn inverse_coherence(family: &IndexedFamily) -> HashMap<(Mor, Mor), NatTransData> {
    let b = family.base();
    let mut out = HashMap::new();
    for f in b.morphisms() {
        for g in b.morphisms().filter(|&g| b.source(g) == b.target(f)) {
            let inv = family.coherence(g, f).inverse().expect("coherence is invertible");
            out.insert((g, f), inv);
        }
    }
    out
}

/// The cocartesian unstraightening of a covariant family.
pub fn grothendieck_cocartesian(family: &IndexedFamily) -> Result<Grothendieck, FibrationError> {
    if family.variance() != Variance::Covariant {
        return Err(FibrationError::MalformedFamily("expected a covariant family".into()));
    }
    let b = family.base();
    let inv = inverse_coherence(family);
    let mut a: Assembly<(Ob, Ob), (Mor, Ob, Mor)> = Assembly::new();
    for c in b.objects() {
        let fc = family.fiber(c);
        for x in fc.objects() {
            a.object((c, x), format!("{}|{}", b.object_name(c), fc.object_name(x)));
        }
    }
    for f in b.morphisms() {
        let (c, d) = (b.source(f), b.target(f));
        let (fc, fd, tr) = (family.fiber(c), family.fiber(d), family.transport(f));
        for x in fc.objects() {
            for y in fd.objects() {
                for &phi in fd.hom(tr.ob(x), y) {
                    let name = format!("{}|{}@{}", b.morphism_name(f), fd.morphism_name(phi), fc.object_name(x));
                    a.morphism((f, x, phi), name, &(c, x), &(d, y));
                }
            }
        }
    }
    let built = a
        .finish(
            |&(c, x)| (b.identity(c), x, family.fiber(c).identity(x)),
            |&(g, _, psi), &(f, x, phi)| {
                let gf = b.comp(g, f);
                let fe = family.fiber(b.target(g));
                let step = family.transport(g).mor(phi);
                let mu_inv = inv[&(g, f)].component(x);
                (gf, x, fe.comp_path(&[psi, step, mu_inv]))
            },
        )
        .map_err(|e| FibrationError::MalformedFamily(e.to_string()))?;
    finish(family, built, LiftKind::Cocartesian)
}

/// The cartesian unstraightening of a contravariant family.
pub fn grothendieck_cartesian(family: &IndexedFamily) -> Result<Grothendieck, FibrationError> {
    if family.variance() != Variance::Contravariant {
        return Err(FibrationError::MalformedFamily(
            "expected a contravariant family".into(),
        ));
    }
    let b = family.base();
    let mut a: Assembly<(Ob, Ob), (Mor, Ob, Mor)> = Assembly::new();
    for c in b.objects() {
        let fc = family.fiber(c);
        for x in fc.objects() {
            a.object((c, x), format!("{}|{}", b.object_name(c), fc.object_name(x)));
        }
    }
    for f in b.morphisms() {
        let (c, d) = (b.source(f), b.target(f));
        let (fc, fd, tr) = (family.fiber(c), family.fiber(d), family.transport(f));
        for y in fd.objects() {
            for x in fc.objects() {
                for &phi in fc.hom(x, tr.ob(y)) {
                    let name = format!("{}|{}@{}", b.morphism_name(f), fc.morphism_name(phi), fd.object_name(y));
                    a.morphism((f, y, phi), name, &(c, x), &(d, y));
                }
            }
        }
    }
    let built = a
        .finish(
            |&(c, x)| (b.identity(c), x, family.fiber(c).identity(x)),
            |&(g, z, psi), &(f, _, phi)| {
                let gf = b.comp(g, f);
                let fc = family.fiber(b.source(f));
                let step = family.transport(f).mor(psi);
                let mu = family.coherence(g, f).component(z);
                (gf, z, fc.comp_path(&[mu, step, phi]))
            },
        )
        .map_err(|e| FibrationError::MalformedFamily(e.to_string()))?;
    finish(family, built, LiftKind::Cartesian)
}

/// Dispatches on the variance of the family.
pub fn grothendieck(family: &IndexedFamily) -> Result<Grothendieck, FibrationError> {
    match family.variance() {
        Variance::Covariant => grothendieck_cocartesian(family),
        Variance::Contravariant => grothendieck_cartesian(family),
    }
}

fn finish(
    family: &IndexedFamily,
    built: crate::fincat::Assembled<(Ob, Ob), (Mor, Ob, Mor)>,
    kind: LiftKind,
) -> Result<Grothendieck, FibrationError> {
    let b = family.base();
    let ob_map = built.ob_keys.iter().map(|k| k.0).collect();
    let mor_map = built.mor_keys.iter().map(|k| k.0).collect();
    let projection = FunctorData::new(built.cat.clone(), b.clone(), ob_map, mor_map)?;
    let mut lifts = HashMap::new();
    for f in b.morphisms() {
        let tr = family.transport(f);
        let (anchor_base, other) = match kind {
            LiftKind::Cocartesian => (b.source(f), b.target(f)),
            LiftKind::Cartesian => (b.target(f), b.source(f)),
        };
        for x in family.fiber(anchor_base).objects() {
            let moved = tr.ob(x);
            let id = family.fiber(other).identity(moved);
            let m = built.mor_of[&(f, x, id)];
            lifts.insert((f, built.ob_of[&(anchor_base, x)]), m);
        }
    }
    Ok(Grothendieck {
        total: built.cat,
        projection,
        cleavage: Cleavage { kind, lifts },
        ob_keys: built.ob_keys,
        mor_keys: built.mor_keys,
        ob_of: built.ob_of,
    })
}
