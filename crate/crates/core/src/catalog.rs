//! Bundled families, transformations and triples used by the tests and the
//! command line.

use std::sync::Arc;

use crate::fibrations::{self_indexing, FamilyMorphism, FibrationError, IndexedFamily, Variance};
use crate::fincat::standard::{chain, finset, finset_injective, powerset, pt, sq, two, walking_iso};
use crate::fincat::{CatRef, FinCat, FunctorData, Mor, Ob, WideSubcat};
use crate::spans::{validate_adequate_triple, AdequateTriple, SpanError};

fn covariant_over_two(at0: CatRef, at1: CatRef, f: FunctorData) -> IndexedFamily {
    IndexedFamily::from_named(
        two().shared(),
        Variance::Covariant,
        &[("0", at0), ("1", at1)],
        &[("f", f)],
    )
    .expect("fixture family")
}

/// `two -> pt` over the walking arrow.
pub fn f0() -> IndexedFamily {
    let (t, p) = (two().shared(), pt().shared());
    covariant_over_two(t.clone(), p.clone(), FunctorData::constant(t, p, Ob(0)))
}

/// `pt -> two` at the initial object.
pub fn f1() -> IndexedFamily {
    let (t, p) = (two().shared(), pt().shared());
    covariant_over_two(p.clone(), t.clone(), FunctorData::constant(p, t, Ob(0)))
}

/// `pt -> two` at the terminal object, which has no right adjoint.
pub fn broken() -> IndexedFamily {
    let (t, p) = (two().shared(), pt().shared());
    covariant_over_two(p.clone(), t.clone(), FunctorData::constant(p, t, Ob(1)))
}

pub fn constant(base: CatRef, variance: Variance, fiber: CatRef) -> IndexedFamily {
    IndexedFamily::constant(base, variance, fiber)
}

fn elements(name: &str) -> Vec<String> {
    let inner = name.trim_start_matches('{').trim_end_matches('}');
    inner.split(',').filter(|s| !s.is_empty()).map(str::to_owned).collect()
}

/// The functor between thin categories given on object names.
pub fn thin_functor(source: CatRef, target: CatRef, on: impl Fn(&str) -> String) -> FunctorData {
    let obs: Vec<Ob> = source
        .objects()
        .map(|o| target.ob(&on(source.object_name(o))))
        .collect();
    let mors = source
        .morphisms()
        .map(|m| target.hom(obs[source.source(m).0], obs[source.target(m).0])[0])
        .collect();
    FunctorData::new(source, target, obs, mors).expect("monotone map")
}

/// Subsets of each `A ⊆ {1,2}`, restricted along inclusions by intersection.
/// Every restriction has both adjoints.
pub fn galois() -> IndexedFamily {
    let base: CatRef = powerset(&["1", "2"]).shared();
    let fibers: Vec<CatRef> = base
        .objects()
        .map(|a| {
            let els = elements(base.object_name(a));
            let refs: Vec<&str> = els.iter().map(String::as_str).collect();
            powerset(&refs).shared()
        })
        .collect();
    let transports = base
        .morphisms()
        .map(|m| {
            let (a, b) = (base.source(m), base.target(m));
            let keep = elements(base.object_name(a));
            thin_functor(fibers[b.0].clone(), fibers[a.0].clone(), |s| {
                let kept: Vec<String> = elements(s).into_iter().filter(|e| keep.contains(e)).collect();
                format!("{{{}}}", kept.join(","))
            })
        })
        .collect();
    IndexedFamily::strict(base, Variance::Contravariant, fibers, transports).expect("galois family")
}

/// Contravariant over `two` with `F(f): pt -> two` at the initial object, which
/// has no left adjoint.
pub fn no_left_adjoint() -> IndexedFamily {
    let (t, p) = (two().shared(), pt().shared());
    IndexedFamily::from_named(
        two().shared(),
        Variance::Contravariant,
        &[("0", t.clone()), ("1", p.clone())],
        &[("f", FunctorData::constant(p, t, Ob(0)))],
    )
    .expect("fixture family")
}

pub fn sq_self_indexing() -> IndexedFamily {
    self_indexing(&sq().shared()).expect("sq has pullbacks").family
}

/// Self-indexing of the walking isomorphism; its coherence is not trivial.
pub fn walking_iso_self_indexing() -> IndexedFamily {
    self_indexing(&walking_iso().shared())
        .expect("walking_iso has pullbacks")
        .family
}

/// Named families with their expected marked class: everything.
pub fn families() -> Vec<(&'static str, IndexedFamily)> {
    let (b, p, t) = (two().shared(), pt().shared(), two().shared());
    vec![
        ("f0", f0()),
        ("f1", f1()),
        ("broken", broken()),
        ("const_pt", constant(b.clone(), Variance::Covariant, p)),
        ("const_two", constant(b, Variance::Covariant, t)),
        ("galois", galois()),
        ("no_left_adjoint", no_left_adjoint()),
        ("sq_self_indexing", sq_self_indexing()),
        ("walking_iso_self_indexing", walking_iso_self_indexing()),
    ]
}

/// Transformations between covariant families over `two`, with whether each
/// is right adjointable.
pub fn transformations() -> Result<Vec<(&'static str, FamilyMorphism, bool)>, FibrationError> {
    let (b, p, t) = (two().shared(), pt().shared(), two().shared());
    let const_pt = constant(b.clone(), Variance::Covariant, p.clone());
    let const_two = constant(b, Variance::Covariant, t.clone());
    let at = |o: usize| FunctorData::constant(p.clone(), t.clone(), Ob(o));
    let id_pt = FunctorData::identity(p.clone());
    let id_two = FunctorData::identity(t.clone());
    Ok(vec![
        (
            "include_point",
            FamilyMorphism::new(const_pt, f1(), vec![id_pt, at(0)])?,
            true,
        ),
        (
            "collapse",
            FamilyMorphism::new(
                f1(),
                const_two.clone(),
                vec![at(0), FunctorData::constant(t.clone(), t.clone(), Ob(0))],
            )?,
            true,
        ),
        (
            "identity_on_top",
            FamilyMorphism::new(f1(), const_two, vec![at(0), id_two])?,
            false,
        ),
    ])
}

fn triple(c: FinCat, left: impl Fn(&FinCat, Mor) -> bool) -> Result<AdequateTriple, SpanError> {
    let c: CatRef = Arc::new(c);
    let l = WideSubcat::from_predicate(c.clone(), left).expect("closed class");
    validate_adequate_triple(l, WideSubcat::all(c))
}

/// The bundled adequate triples `(C, L, all)`.
pub fn triples() -> Result<Vec<(&'static str, AdequateTriple)>, SpanError> {
    Ok(vec![
        ("two", triple(two(), |_, _| true)?),
        ("sq", triple(sq(), |_, _| true)?),
        ("walking_iso", triple(walking_iso(), |_, _| true)?),
        ("chain3", triple(chain(3), |_, _| true)?),
        ("powerset12", triple(powerset(&["1", "2"]), |_, _| true)?),
        ("finset3_inj", triple(finset(3), finset_injective)?),
    ])
}
