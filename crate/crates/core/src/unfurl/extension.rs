use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use super::cocartesian::{homwise_scan, Lifter};
use super::{UnfurlError, UnfurlKind, UnfurlPackage};
use crate::fibrations::{classify_fibration, grothendieck_cocartesian, unique_over, LiftKind, Variance};
use crate::fincat::{CatRef, FunctorData, Mor, NatTransData, Ob};
use crate::limits::{find_left_adjoint, AdjunctionData};
use crate::spans::{span_of_triple_map, SpanHom, TripleMap};

/// Moves between the family's fibers and the total category of a package.
struct Total<'a> {
    pkg: &'a UnfurlPackage,
    lifter: Lifter<'a>,
    by_key: HashMap<(Mor, Ob, Mor), Mor>,
}

impl<'a> Total<'a> {
    fn new(pkg: &'a UnfurlPackage) -> Self {
        let g = &pkg.grothendieck;
        let by_key = g.mor_keys.iter().enumerate().map(|(i, &k)| (k, Mor(i))).collect();
        Total {
            pkg,
            lifter: Lifter::new(&g.projection, Some(&g.cleavage)),
            by_key,
        }
    }

    fn p(&self) -> &FunctorData {
        &self.pkg.grothendieck.projection
    }

    fn e(&self) -> &CatRef {
        &self.pkg.grothendieck.total
    }

    fn ob(&self, c: Ob, x: Ob) -> Ob {
        self.pkg.grothendieck.object(c, x)
    }

    fn fiber_ob(&self, e: Ob) -> Ob {
        self.pkg.grothendieck.ob_keys[e.0].1
    }

    fn fiber_mor(&self, m: Mor) -> Mor {
        self.pkg.grothendieck.mor_keys[m.0].2
    }

    /// The morphism over `id_c` with fiber component `phi`.
    fn embed(&self, c: Ob, phi: Mor) -> Mor {
        let fib = self.pkg.family.fiber(c);
        let anchor = match self.pkg.family.variance() {
            Variance::Covariant => fib.source(phi),
            Variance::Contravariant => fib.target(phi),
        };
        self.by_key[&(self.pkg.family.base().identity(c), anchor, phi)]
    }

    fn lift(&self, m: Mor, at: Ob, kind: LiftKind) -> Result<Mor, UnfurlError> {
        self.lifter
            .lift(m, at, kind)
            .ok_or(UnfurlError::Coherence("missing lift in the total category"))
    }

    fn transport(&self, s: &SpanHom) -> Result<FunctorData, UnfurlError> {
        let fam = &self.pkg.family;
        let (src, tgt) = (fam.fiber(s.x), fam.fiber(s.y));
        let lifts = src
            .objects()
            .map(|x| {
                self.lifter
                    .two_step(s.left, s.right, self.ob(s.x, x))
                    .ok_or(UnfurlError::Coherence("span has no two-step lift"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let obs = lifts.iter().map(|l| self.fiber_ob(l.y)).collect();
        let e = self.e();
        let mut mors = Vec::with_capacity(src.morphism_count());
        for phi in src.morphisms() {
            let (a, b) = (&lifts[src.source(phi).0], &lifts[src.target(phi).0]);
            let m = self.embed(s.x, phi);
            let alpha = unique_over(self.p(), a.apex, b.apex, |v| e.comp(b.left, v) == e.comp(m, a.left))?;
            let beta = unique_over(self.p(), a.y, b.y, |v| e.comp(v, a.right) == e.comp(b.right, alpha))?;
            mors.push(self.fiber_mor(beta));
        }
        Ok(FunctorData::new(src.clone(), tgt.clone(), obs, mors)?)
    }

    /// `T(id, m) ⊣ T(m, id)` with unit and counit from unique factorization.
    fn adjunction(&self, m: Mor) -> Result<AdjunctionData, UnfurlError> {
        let (fam, b, e) = (&self.pkg.family, self.pkg.family.base(), self.e());
        let (c, d) = (b.source(m), b.target(m));
        let fw = self.transport(&SpanHom {
            x: c,
            y: d,
            apex: c,
            left: b.identity(c),
            right: m,
        })?;
        let bw = self.transport(&SpanHom {
            x: d,
            y: c,
            apex: c,
            left: m,
            right: b.identity(c),
        })?;
        let mut unit = Vec::new();
        for x in fam.fiber(c).objects() {
            let ex = self.ob(c, x);
            let cc = self.lift(m, ex, LiftKind::Cocartesian)?;
            let ct = self.lift(m, e.target(cc), LiftKind::Cartesian)?;
            unit.push(self.fiber_mor(unique_over(self.p(), ex, e.source(ct), |v| e.comp(ct, v) == cc)?));
        }
        let mut counit = Vec::new();
        for y in fam.fiber(d).objects() {
            let ey = self.ob(d, y);
            let ct = self.lift(m, ey, LiftKind::Cartesian)?;
            let cc = self.lift(m, e.source(ct), LiftKind::Cocartesian)?;
            counit.push(self.fiber_mor(unique_over(self.p(), e.target(cc), ey, |v| e.comp(v, cc) == ct)?));
        }
        let unit = NatTransData::new(FunctorData::identity(fam.fiber(c).clone()), bw.after(&fw)?, unit)?;
        let counit = NatTransData::new(fw.after(&bw)?, FunctorData::identity(fam.fiber(d).clone()), counit)?;
        Ok(AdjunctionData {
            left: fw,
            right: bw,
            unit,
            counit,
        })
    }
}

/// The functor between fibers obtained by lifting a base span in two steps.
pub fn transport_along_span(pkg: &UnfurlPackage, s: &SpanHom) -> Result<FunctorData, UnfurlError> {
    if !pkg.base.is_span(s) {
        return Err(UnfurlError::Coherence("not a span of the base triple"));
    }
    Total::new(pkg).transport(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjunctionCheck {
    pub morphism: String,
    pub triangles: bool,
    /// The transport along the span that contains the morphism as its
    /// non-identity leg on the family's side equals the family's own
    /// transport.
    pub matches_family: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionReport {
    /// `None` for the co construction, which has no restriction check.
    pub restriction_iso: Option<bool>,
    pub restriction_failure: Option<String>,
    pub adjunctions: Vec<AdjunctionCheck>,
}

impl ExtensionReport {
    pub fn holds(&self) -> bool {
        self.restriction_iso != Some(false) && self.adjunctions.iter().all(|a| a.triangles && a.matches_family)
    }
}

/// Checks that the span-level transport restricts to the family and that
/// forward and backward transports along marked morphisms are adjoint.
pub fn verify_extension(pkg: &UnfurlPackage) -> Result<ExtensionReport, UnfurlError> {
    let t = Total::new(pkg);
    let restriction_failure = match pkg.kind {
        UnfurlKind::Covariant => restriction_covariant(&t)?,
        UnfurlKind::Contravariant => restriction_contravariant(&t)?,
        UnfurlKind::Co => None,
    };
    let restriction_iso = (pkg.kind != UnfurlKind::Co).then_some(restriction_failure.is_none());
    let b = pkg.family.base();
    let mut adjunctions = Vec::new();
    for m in pkg.marked.members() {
        let adj = t.adjunction(m)?;
        let own = match pkg.family.variance() {
            Variance::Covariant => &adj.left,
            Variance::Contravariant => &adj.right,
        };
        adjunctions.push(AdjunctionCheck {
            morphism: b.morphism_name(m).to_owned(),
            triangles: adj.triangles_hold(),
            matches_family: own == pkg.family.transport(m),
        });
    }
    Ok(ExtensionReport {
        restriction_iso,
        restriction_failure,
        adjunctions,
    })
}

/// A category over the base (or its opposite) compared against the strict
/// pullback of the span functor along the inclusion of the base.
struct Reference<'r> {
    cat: &'r CatRef,
    over: &'r FunctorData,
    ob: Vec<Ob>,
}

fn restriction(
    t: &Total,
    r: Reference,
    span_of: impl Fn(Mor) -> SpanHom,
    iota: impl Fn(Mor) -> SpanHom,
) -> Result<Option<String>, UnfurlError> {
    let (hs, hc, fun) = (&t.pkg.span.source, &t.pkg.span.target, &t.pkg.span.on_classes);
    let e = t.e();
    let distinct: HashSet<Ob> = r.ob.iter().copied().collect();
    if distinct.len() != e.object_count() || r.cat.object_count() != e.object_count() {
        return Ok(Some("objects do not match".into()));
    }
    let base = r.over.target();
    let included = |f: Mor| {
        hc.class(&iota(f))
            .ok_or(UnfurlError::Coherence("base morphism is not a span"))
    };
    let mut image = HashSet::new();
    for f in base.morphisms() {
        image.insert(included(f)?);
    }
    let mut cls = Vec::with_capacity(r.cat.morphism_count());
    for m in r.cat.morphisms() {
        let sigma = hs
            .class(&span_of(m))
            .ok_or(UnfurlError::Coherence("restricted morphism is not a span"))?;
        let ends = (hs.cat.source(sigma), hs.cat.target(sigma));
        if ends != (r.ob[r.cat.source(m).0], r.ob[r.cat.target(m).0]) || fun.mor(sigma) != included(r.over.mor(m))? {
            return Ok(Some(format!("`{}` is sent to the wrong class", r.cat.morphism_name(m))));
        }
        cls.push(sigma);
    }
    for g in r.cat.morphisms() {
        for f in r.cat.morphisms() {
            if let Some(h) = r.cat.compose(g, f) {
                if cls[h.0] != hs.cat.comp(cls[g.0], cls[f.0]) {
                    return Ok(Some(format!(
                        "composite of `{}` and `{}` is not preserved",
                        r.cat.morphism_name(g),
                        r.cat.morphism_name(f)
                    )));
                }
            }
        }
    }
    if cls.iter().collect::<HashSet<_>>().len() != cls.len() {
        return Ok(Some("two morphisms share a class".into()));
    }
    let over = hs.cat.morphisms().filter(|&s| image.contains(&fun.mor(s))).count();
    if over != cls.len() {
        return Ok(Some(format!("{over} classes over the base, {} morphisms", cls.len())));
    }
    Ok(None)
}

fn restriction_covariant(t: &Total) -> Result<Option<String>, UnfurlError> {
    let (e, b) = (t.e(), t.pkg.family.base());
    let r = Reference {
        cat: e,
        over: t.p(),
        ob: e.objects().collect(),
    };
    let forward = |c: &CatRef, m: Mor| SpanHom {
        x: c.source(m),
        y: c.target(m),
        apex: c.source(m),
        left: c.identity(c.source(m)),
        right: m,
    };
    restriction(t, r, |m| forward(e, m), |f| forward(b, f))
}

/// Compares with the cocartesian unstraightening of the family read over the
/// opposite base. A morphism `(f, x, phi)` there becomes the span with the
/// chosen cartesian lift of `f` at `x` as left leg and `phi` as right leg.
fn restriction_contravariant(t: &Total) -> Result<Option<String>, UnfurlError> {
    let (fam, b) = (&t.pkg.family, t.pkg.family.base());
    let g = grothendieck_cocartesian(&fam.over_opposite())?;
    let r = Reference {
        cat: &g.total,
        over: &g.projection,
        ob: g.ob_keys.iter().map(|&(c, x)| t.ob(c, x)).collect(),
    };
    let span_of = |m: Mor| {
        let (f, x, phi) = g.mor_keys[m.0];
        let (a, bb) = (b.source(f), b.target(f));
        let fa = fam.fiber(a);
        let fx = fam.transport(f).ob(x);
        SpanHom {
            x: t.ob(bb, x),
            y: t.ob(a, fa.target(phi)),
            apex: t.ob(a, fx),
            left: t.by_key[&(f, x, fa.identity(fx))],
            right: t.by_key[&(b.identity(a), fa.target(phi), phi)],
        }
    };
    let backward = |f: Mor| SpanHom {
        x: b.target(f),
        y: b.source(f),
        apex: b.source(f),
        left: f,
        right: b.identity(b.source(f)),
    };
    restriction(t, r, span_of, backward)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoTransportReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

/// For every span class `(f, g)` of the base, compares the two-step transport
/// with `g_! f^*` through the comparison induced by the units of `g_! ⊣ g^*`.
pub fn check_co_transports(pkg: &UnfurlPackage) -> Result<CoTransportReport, UnfurlError> {
    if pkg.kind != UnfurlKind::Co {
        return Err(UnfurlError::Unsupported(
            "transport comparison applies to the co construction",
        ));
    }
    let t = Total::new(pkg);
    let (fam, b, e) = (&pkg.family, pkg.family.base(), t.e());
    let mut adjoints = HashMap::new();
    for g in b.morphisms() {
        let adj = find_left_adjoint(fam.transport(g))
            .ok_or_else(|| UnfurlError::LeftAdjointMissing(b.morphism_name(g).to_owned()))?;
        adjoints.insert(g, adj);
    }
    let mut failures = Vec::new();
    for s in &pkg.span.target.reps {
        let name = pkg.base.span_name(s);
        let tr = match t.transport(s) {
            Ok(tr) => tr,
            Err(err) => {
                failures.push(format!("{name}: {err}"));
                continue;
            }
        };
        let l = &adjoints[&s.right];
        let expected = l.left.after(fam.transport(s.left))?;
        let mut comps = Vec::new();
        for x in fam.fiber(s.x).objects() {
            let st = t
                .lifter
                .two_step(s.left, s.right, t.ob(s.x, x))
                .ok_or(UnfurlError::Coherence("span has no two-step lift"))?;
            let y = t.fiber_ob(st.apex);
            let Some(&unit) = t.by_key.get(&(s.right, l.left.ob(y), l.unit.component(y))) else {
                return Err(UnfurlError::Coherence("unit is not a morphism of the total category"));
            };
            match unique_over(t.p(), st.y, e.target(unit), |v| e.comp(v, st.right) == unit) {
                Ok(theta) => comps.push(t.fiber_mor(theta)),
                Err(_) => break,
            }
        }
        if comps.len() != fam.fiber(s.x).object_count() {
            failures.push(format!("{name}: no comparison with g_! f^*"));
            continue;
        }
        match NatTransData::new(tr, expected, comps) {
            Ok(theta) if theta.is_iso() => {}
            Ok(_) => failures.push(format!("{name}: comparison is not invertible")),
            Err(err) => failures.push(format!("{name}: {err}")),
        }
    }
    Ok(CoTransportReport {
        checked: pkg.span.target.reps.len(),
        failures,
    })
}

/// The co construction's checks recomputed on the leg-swapped triples, where
/// they become homwise left fibrations and a class-level cocartesian
/// fibration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub homwise_left_fibrations: bool,
    pub underlying_cocartesian: bool,
    pub agrees: bool,
}

pub fn check_duality(pkg: &UnfurlPackage) -> Result<DualityReport, UnfurlError> {
    let co = pkg
        .one_cartesian
        .as_ref()
        .ok_or(UnfurlError::Unsupported("duality compares the co construction"))?;
    let q = TripleMap::new(
        Arc::new(pkg.total().swapped()),
        Arc::new(pkg.base.swapped()),
        pkg.map.functor.clone(),
    )?;
    let span = span_of_triple_map(&q)?;
    let (bad, _) = homwise_scan(&q, LiftKind::Cartesian)?;
    let under = classify_fibration(&span.on_classes)
        .verdict("cocartesian")
        .is_some_and(|v| v.holds);
    let homwise = bad.is_none();
    Ok(DualityReport {
        homwise_left_fibrations: homwise,
        underlying_cocartesian: under,
        agrees: homwise == co.homwise_left_fibrations && under == co.underlying_cartesian,
    })
}
