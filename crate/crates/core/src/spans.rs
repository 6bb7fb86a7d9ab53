//! Adequate triples and their span bicategories.
//!
//! A span `X <-l- U -r-> Y` has `l` in the left class and `r` in the right
//! class. Spans compose in diagrammatic order: `compose_spans(s, t)` is "first
//! `s`, then `t`", formed by pulling back the right leg of `s` against the left
//! leg of `t`. A 2-cell `s ⇒ s'` is a morphism of apexes commuting with legs.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use serde::Serialize;
use thiserror::Error;

use crate::fincat::{Assembly, CatRef, FinCat, FunctorData, FunctorError, Mor, Ob, WideSubcat};
use crate::limits::{factor_through, is_pullback_square, Cone, LimitError, PullbackChoice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpanError {
    #[error("no pullback of `{l}` along `{r}`")]
    MissingPullback { l: String, r: String },
    #[error("pullback of `{l}` along `{r}` through `{apex}`: leg `{leg}` leaves its class")]
    StabilityViolation {
        l: String,
        r: String,
        apex: String,
        leg: String,
    },
    #[error("left and right classes live on different categories")]
    CarrierMismatch,
    #[error("spans are not composable")]
    NotComposable,
    #[error("`{0}` is not a span of this triple")]
    NotASpan(String),
    #[error("not a map of adequate triples: {0}")]
    NotTripleMap(String),
    #[error("coherence cell not found: {0}")]
    MissingCoherence(String),
    #[error(transparent)]
    Functor(#[from] FunctorError),
}

/// A category with left and right classes of morphisms.
///
/// Pullbacks of a left morphism along a right one are computed on demand and
/// cached. [`validate_adequate_triple`] fills the cache for every such cospan
/// and marks the triple as certified.
#[derive(Debug)]
pub struct AdequateTriple {
    carrier: CatRef,
    left: WideSubcat,
    right: WideSubcat,
    certified: bool,
    cache: RwLock<HashMap<(Mor, Mor), PullbackChoice>>,
}

impl Clone for AdequateTriple {
    fn clone(&self) -> Self {
        AdequateTriple {
            carrier: self.carrier.clone(),
            left: self.left.clone(),
            right: self.right.clone(),
            certified: self.certified,
            cache: RwLock::new(self.cache.read().expect("cache lock").clone()),
        }
    }
}

impl PartialEq for AdequateTriple {
    fn eq(&self, other: &Self) -> bool {
        self.left == other.left && self.right == other.right
    }
}

pub type TripleRef = Arc<AdequateTriple>;

fn name(c: &FinCat, m: Mor) -> String {
    c.morphism_name(m).to_owned()
}

impl AdequateTriple {
    /// An unvalidated triple; pullbacks are checked one at a time as they
    /// are needed.
    pub fn local(left: WideSubcat, right: WideSubcat) -> Result<Self, SpanError> {
        if left.carrier() != right.carrier() {
            return Err(SpanError::CarrierMismatch);
        }
        Ok(AdequateTriple {
            carrier: left.carrier().clone(),
            left,
            right,
            certified: false,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn carrier(&self) -> &CatRef {
        &self.carrier
    }

    pub fn left(&self) -> &WideSubcat {
        &self.left
    }

    pub fn right(&self) -> &WideSubcat {
        &self.right
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Number of cached pullback certificates.
    pub fn certificate_len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    /// The certificate entries, sorted by cospan.
    pub fn certificate(&self) -> BTreeMap<(Mor, Mor), PullbackChoice> {
        self.cache
            .read()
            .expect("cache lock")
            .iter()
            .map(|(k, v)| (*k, v.clone()))
            .collect()
    }

    /// The chosen pullback of `l ∈ L` along `r ∈ R`, with leg stability
    /// checked over every apex.
    pub fn pullback(&self, l: Mor, r: Mor) -> Result<PullbackChoice, SpanError> {
        if let Some(pb) = self.cache.read().expect("cache lock").get(&(l, r)) {
            return Ok(pb.clone());
        }
        let pb = self.compute_pullback(l, r)?;
        self.cache.write().expect("cache lock").insert((l, r), pb.clone());
        Ok(pb)
    }

    fn compute_pullback(&self, l: Mor, r: Mor) -> Result<PullbackChoice, SpanError> {
        let c = &*self.carrier;
        let pb = pullback_with_isos(c, l, r).map_err(|e| match e {
            LimitError::NotFound { l, r } | LimitError::MismatchedCospan { l, r } => {
                SpanError::MissingPullback { l, r }
            }
            other => SpanError::MissingPullback {
                l: other.to_string(),
                r: String::new(),
            },
        })?;
        for cone in &pb.all {
            let bad = if !self.left.contains(cone.to_y) {
                Some(cone.to_y)
            } else if !self.right.contains(cone.to_x) {
                Some(cone.to_x)
            } else {
                None
            };
            if let Some(leg) = bad {
                return Err(SpanError::StabilityViolation {
                    l: name(c, l),
                    r: name(c, r),
                    apex: c.object_name(cone.apex).to_owned(),
                    leg: name(c, leg),
                });
            }
        }
        Ok(pb)
    }

    /// The same classes with roles exchanged, `(C, R, L)`.
    pub fn swapped(&self) -> AdequateTriple {
        let cache = self
            .cache
            .read()
            .expect("cache lock")
            .values()
            .map(|pb| {
                let swap = |k: &Cone| Cone {
                    apex: k.apex,
                    to_x: k.to_y,
                    to_y: k.to_x,
                };
                let all = pb.all.iter().map(swap).collect();
                (
                    (pb.r, pb.l),
                    PullbackChoice {
                        l: pb.r,
                        r: pb.l,
                        apex: pb.apex,
                        r_prime: pb.l_prime,
                        l_prime: pb.r_prime,
                        all,
                    },
                )
            })
            .collect();
        AdequateTriple {
            carrier: self.carrier.clone(),
            left: self.right.clone(),
            right: self.left.clone(),
            certified: self.certified,
            cache: RwLock::new(cache),
        }
    }

    pub fn is_span(&self, s: &SpanHom) -> bool {
        let c = &*self.carrier;
        c.source(s.left) == s.apex
            && c.source(s.right) == s.apex
            && c.target(s.left) == s.x
            && c.target(s.right) == s.y
            && self.left.contains(s.left)
            && self.right.contains(s.right)
    }

    pub fn span(&self, left: Mor, right: Mor) -> Result<SpanHom, SpanError> {
        let c = &*self.carrier;
        let s = SpanHom {
            x: c.target(left),
            y: c.target(right),
            apex: c.source(left),
            left,
            right,
        };
        if self.is_span(&s) {
            Ok(s)
        } else {
            Err(SpanError::NotASpan(format!("<{}|{}>", name(c, left), name(c, right))))
        }
    }

    pub fn identity_span(&self, x: Ob) -> SpanHom {
        let id = self.carrier.identity(x);
        SpanHom {
            x,
            y: x,
            apex: x,
            left: id,
            right: id,
        }
    }

    /// Every span from `x` to `y`, in canonical order of `(left, right)`.
    pub fn spans_between(&self, x: Ob, y: Ob) -> Vec<SpanHom> {
        let c = &*self.carrier;
        let mut out = Vec::new();
        for u in c.objects() {
            for &l in c.hom(u, x) {
                if !self.left.contains(l) {
                    continue;
                }
                for &r in c.hom(u, y) {
                    if self.right.contains(r) {
                        out.push(SpanHom {
                            x,
                            y,
                            apex: u,
                            left: l,
                            right: r,
                        });
                    }
                }
            }
        }
        out.sort_by_key(|s| (s.left, s.right));
        out
    }

    pub fn span_name(&self, s: &SpanHom) -> String {
        format!("<{}|{}>", name(&self.carrier, s.left), name(&self.carrier, s.right))
    }
}

/// Least pullback, with `all` obtained by precomposing with isomorphisms.
pub fn pullback_with_isos(c: &FinCat, l: Mor, r: Mor) -> Result<PullbackChoice, LimitError> {
    if c.target(l) != c.target(r) {
        return Err(LimitError::MismatchedCospan {
            l: name(c, l),
            r: name(c, r),
        });
    }
    // The first universal cone in canonical order; other universal cones are
    // exactly its reindexings along isomorphisms.
    let all_cones = crate::limits::cones(c, l, r);
    let first = all_cones
        .iter()
        .find(|k| {
            all_cones
                .iter()
                .all(|cone| crate::limits::factorizations(c, k, cone).len() == 1)
        })
        .copied()
        .ok_or_else(|| LimitError::NotFound {
            l: name(c, l),
            r: name(c, r),
        })?;
    let mut all = Vec::new();
    for w in c.objects() {
        for &phi in c.hom(w, first.apex) {
            if c.is_iso(phi) {
                all.push(Cone {
                    apex: w,
                    to_x: c.comp(first.to_x, phi),
                    to_y: c.comp(first.to_y, phi),
                });
            }
        }
    }
    all.sort();
    Ok(PullbackChoice {
        l,
        r,
        apex: first.apex,
        r_prime: first.to_x,
        l_prime: first.to_y,
        all,
    })
}

/// Checks every cospan `l ∈ L`, `r ∈ R` and certifies the triple.
pub fn validate_adequate_triple(left: WideSubcat, right: WideSubcat) -> Result<AdequateTriple, SpanError> {
    let mut t = AdequateTriple::local(left, right)?;
    let c = t.carrier.clone();
    for l in t.left.members() {
        for r in t.right.members() {
            if c.target(l) == c.target(r) {
                t.pullback(l, r)?;
            }
        }
    }
    t.certified = true;
    Ok(t)
}

/// A span `X <-left- apex -right-> Y`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SpanHom {
    pub x: Ob,
    pub y: Ob,
    pub apex: Ob,
    pub left: Mor,
    pub right: Mor,
}

/// A morphism of spans `source ⇒ target` given by `f: source.apex -> target.apex`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Span2Cell {
    pub source: SpanHom,
    pub target: SpanHom,
    pub f: Mor,
}

impl Span2Cell {
    pub fn new(c: &FinCat, source: SpanHom, target: SpanHom, f: Mor) -> Option<Self> {
        let ok = source.x == target.x
            && source.y == target.y
            && c.source(f) == source.apex
            && c.target(f) == target.apex
            && c.comp(target.left, f) == source.left
            && c.comp(target.right, f) == source.right;
        ok.then_some(Span2Cell { source, target, f })
    }

    pub fn identity(c: &FinCat, s: SpanHom) -> Self {
        Span2Cell {
            source: s,
            target: s,
            f: c.identity(s.apex),
        }
    }

    /// Vertical composite `self` after `first`.
    pub fn after(&self, c: &FinCat, first: &Span2Cell) -> Span2Cell {
        assert_eq!(first.target, self.source, "2-cells not composable");
        Span2Cell {
            source: first.source,
            target: self.target,
            f: c.comp(self.f, first.f),
        }
    }

    pub fn inverse(&self, c: &FinCat) -> Option<Span2Cell> {
        c.inverse(self.f).map(|g| Span2Cell {
            source: self.target,
            target: self.source,
            f: g,
        })
    }

    pub fn is_identity(&self, c: &FinCat) -> bool {
        self.source == self.target && c.is_identity(self.f)
    }

    pub fn is_iso(&self, c: &FinCat) -> bool {
        c.is_iso(self.f)
    }
}

/// A composite span with the projections of its apex onto the two factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Composite {
    pub span: SpanHom,
    pub first: SpanHom,
    pub second: SpanHom,
    pub to_first: Mor,
    pub to_second: Mor,
    pub certificate: PullbackChoice,
}

impl Composite {
    fn cone(&self) -> Cone {
        Cone {
            apex: self.span.apex,
            to_x: self.to_second,
            to_y: self.to_first,
        }
    }
}

/// `t` after `s`, through the chosen pullback of `t.left` along `s.right`.
pub fn compose_spans(t: &AdequateTriple, s: &SpanHom, u: &SpanHom) -> Result<Composite, SpanError> {
    if s.y != u.x {
        return Err(SpanError::NotComposable);
    }
    let c = &*t.carrier;
    let pb = t.pullback(u.left, s.right)?;
    let left = c.comp(s.left, pb.l_prime);
    let right = c.comp(u.right, pb.r_prime);
    if !t.left.contains(left) || !t.right.contains(right) {
        return Err(SpanError::StabilityViolation {
            l: name(c, u.left),
            r: name(c, s.right),
            apex: c.object_name(pb.apex).to_owned(),
            leg: name(c, if t.left.contains(left) { right } else { left }),
        });
    }
    Ok(Composite {
        span: SpanHom {
            x: s.x,
            y: u.y,
            apex: pb.apex,
            left,
            right,
        },
        first: *s,
        second: *u,
        to_first: pb.l_prime,
        to_second: pb.r_prime,
        certificate: pb,
    })
}

/// `α ▷ u`: the 2-cell between `s;u` and `s';u` induced by `α: s ⇒ s'`.
pub fn whisker_right(t: &AdequateTriple, alpha: &Span2Cell, u: &SpanHom) -> Result<Span2Cell, SpanError> {
    let c = &*t.carrier;
    let from = compose_spans(t, &alpha.source, u)?;
    let to = compose_spans(t, &alpha.target, u)?;
    let cone = Cone {
        apex: from.span.apex,
        to_x: from.to_second,
        to_y: c.comp(alpha.f, from.to_first),
    };
    let f = factor_through(c, &to.cone(), &cone).ok_or_else(|| SpanError::MissingCoherence("right whisker".into()))?;
    Ok(Span2Cell {
        source: from.span,
        target: to.span,
        f,
    })
}

/// `s ◁ β`: the 2-cell between `s;u` and `s;u'` induced by `β: u ⇒ u'`.
pub fn whisker_left(t: &AdequateTriple, s: &SpanHom, beta: &Span2Cell) -> Result<Span2Cell, SpanError> {
    let c = &*t.carrier;
    let from = compose_spans(t, s, &beta.source)?;
    let to = compose_spans(t, s, &beta.target)?;
    let cone = Cone {
        apex: from.span.apex,
        to_x: c.comp(beta.f, from.to_second),
        to_y: from.to_first,
    };
    let f = factor_through(c, &to.cone(), &cone).ok_or_else(|| SpanError::MissingCoherence("left whisker".into()))?;
    Ok(Span2Cell {
        source: from.span,
        target: to.span,
        f,
    })
}

/// The associator `(s;t);u ⇒ s;(t;u)`: the unique morphism of apexes
/// compatible with the projections onto the three factors.
pub fn associator(t: &AdequateTriple, s: &SpanHom, m: &SpanHom, u: &SpanHom) -> Result<Span2Cell, SpanError> {
    let c = &*t.carrier;
    let sm = compose_spans(t, s, m)?;
    let lhs = compose_spans(t, &sm.span, u)?;
    let mu = compose_spans(t, m, u)?;
    let rhs = compose_spans(t, s, &mu.span)?;
    // projections of the left bracketing onto s, m, u
    let p_s = c.comp(sm.to_first, lhs.to_first);
    let p_m = c.comp(sm.to_second, lhs.to_first);
    let p_u = lhs.to_second;
    // factor (p_m, p_u) through m;u, then (p_s, that) through s;(m;u)
    let inner = factor_through(
        c,
        &mu.cone(),
        &Cone {
            apex: lhs.span.apex,
            to_x: p_u,
            to_y: p_m,
        },
    )
    .ok_or_else(|| SpanError::MissingCoherence("associator, inner factor".into()))?;
    let f = factor_through(
        c,
        &rhs.cone(),
        &Cone {
            apex: lhs.span.apex,
            to_x: inner,
            to_y: p_s,
        },
    )
    .ok_or_else(|| SpanError::MissingCoherence("associator".into()))?;
    Span2Cell::new(c, lhs.span, rhs.span, f).ok_or_else(|| SpanError::MissingCoherence("associator legs".into()))
}

/// Left unitor `id;s ⇒ s`.
pub fn left_unitor(t: &AdequateTriple, s: &SpanHom) -> Result<Span2Cell, SpanError> {
    let comp = compose_spans(t, &t.identity_span(s.x), s)?;
    Span2Cell::new(&t.carrier, comp.span, *s, comp.to_second)
        .ok_or_else(|| SpanError::MissingCoherence("left unitor".into()))
}

/// Right unitor `s;id ⇒ s`.
pub fn right_unitor(t: &AdequateTriple, s: &SpanHom) -> Result<Span2Cell, SpanError> {
    let comp = compose_spans(t, s, &t.identity_span(s.y))?;
    Span2Cell::new(&t.carrier, comp.span, *s, comp.to_first)
        .ok_or_else(|| SpanError::MissingCoherence("right unitor".into()))
}

/// Counts and first failure of a coherence sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CoherenceReport {
    pub associators: usize,
    pub triangles: usize,
    pub pentagons: usize,
    pub unitors: usize,
    pub failure: Option<String>,
}

impl CoherenceReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn composable<'a>(sample: &'a [SpanHom], after: &'a SpanHom) -> impl Iterator<Item = &'a SpanHom> + 'a {
    sample.iter().filter(move |s| s.x == after.y)
}

/// Checks unitors and associators are invertible and that the triangle and
/// pentagon identities hold on every composable tuple drawn from `sample`.
pub fn check_coherence(t: &AdequateTriple, sample: &[SpanHom], pentagons: bool) -> Result<CoherenceReport, SpanError> {
    let c = &*t.carrier;
    let mut rep = CoherenceReport::default();
    for s in sample {
        let (l, r) = (left_unitor(t, s)?, right_unitor(t, s)?);
        rep.unitors += 2;
        if !l.is_iso(c) || !r.is_iso(c) {
            rep.failure = Some(format!("unitor of {} is not invertible", t.span_name(s)));
            return Ok(rep);
        }
    }
    for s in sample {
        for m in composable(sample, s) {
            // triangle: (s ◁ λ_m) ∘ α_{s,id,m} = ρ_s ▷ m
            let id = t.identity_span(s.y);
            let a = associator(t, s, &id, m)?;
            let lhs = whisker_left(t, s, &left_unitor(t, m)?)?.after(c, &a);
            let rhs = whisker_right(t, &right_unitor(t, s)?, m)?;
            rep.triangles += 1;
            if lhs != rhs {
                rep.failure = Some(format!("triangle fails at {}, {}", t.span_name(s), t.span_name(m)));
                return Ok(rep);
            }
            for u in composable(sample, m) {
                let a = associator(t, s, m, u)?;
                rep.associators += 1;
                if !a.is_iso(c) {
                    rep.failure = Some(format!(
                        "associator of {}, {}, {} is not invertible",
                        t.span_name(s),
                        t.span_name(m),
                        t.span_name(u)
                    ));
                    return Ok(rep);
                }
                if !pentagons {
                    continue;
                }
                for v in composable(sample, u) {
                    let sm = compose_spans(t, s, m)?.span;
                    let mu = compose_spans(t, m, u)?.span;
                    let uv = compose_spans(t, u, v)?.span;
                    let lhs = associator(t, s, m, &uv)?.after(c, &associator(t, &sm, u, v)?);
                    let rhs = whisker_left(t, s, &associator(t, m, u, v)?)?
                        .after(c, &associator(t, s, &mu, v)?)
                        .after(c, &whisker_right(t, &a, v)?);
                    rep.pentagons += 1;
                    if lhs != rhs {
                        rep.failure = Some(format!(
                            "pentagon fails at {}, {}, {}, {}",
                            t.span_name(s),
                            t.span_name(m),
                            t.span_name(u),
                            t.span_name(v)
                        ));
                        return Ok(rep);
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// The category of spans `x ⇸ y` and their 2-cells.
#[derive(Clone, Debug)]
pub struct SpanHomCategory {
    pub cat: CatRef,
    /// The span behind each object.
    pub spans: Vec<SpanHom>,
    /// The mediating morphism behind each morphism.
    pub cells: Vec<Mor>,
    pub index: HashMap<SpanHom, Ob>,
}

impl SpanHomCategory {
    pub fn cell(&self, m: Mor) -> Span2Cell {
        Span2Cell {
            source: self.spans[self.cat.source(m).0],
            target: self.spans[self.cat.target(m).0],
            f: self.cells[m.0],
        }
    }

    pub fn morphism_for(&self, cell: &Span2Cell) -> Option<Mor> {
        let (s, t) = (self.index.get(&cell.source)?, self.index.get(&cell.target)?);
        self.cat
            .hom(*s, *t)
            .iter()
            .copied()
            .find(|&m| self.cells[m.0] == cell.f)
    }
}

pub fn span_hom_category(t: &AdequateTriple, x: Ob, y: Ob) -> SpanHomCategory {
    let c = &*t.carrier;
    let spans = t.spans_between(x, y);
    let mut a: Assembly<SpanHom, (SpanHom, SpanHom, Mor)> = Assembly::new();
    for s in &spans {
        a.object(*s, t.span_name(s));
    }
    for s in &spans {
        for s2 in &spans {
            for &f in c.hom(s.apex, s2.apex) {
                if c.comp(s2.left, f) == s.left && c.comp(s2.right, f) == s.right {
                    let nm = format!("{}=>{}[{}]", t.span_name(s), t.span_name(s2), name(c, f));
                    a.morphism((*s, *s2, f), nm, s, s2);
                }
            }
        }
    }
    let built = a
        .finish(
            |s| (*s, *s, c.identity(s.apex)),
            |&(_, s3, g), &(s1, _, f)| (s1, s3, c.comp(g, f)),
        )
        .expect("span hom category");
    SpanHomCategory {
        cells: built.mor_keys.iter().map(|k| k.2).collect(),
        index: built.ob_of.clone(),
        spans: built.ob_keys,
        cat: built.cat,
    }
}

/// Whether two spans are related by a leg-compatible isomorphism.
pub fn spans_isomorphic(c: &FinCat, s: &SpanHom, u: &SpanHom) -> bool {
    s.x == u.x
        && s.y == u.y
        && c.hom(s.apex, u.apex)
            .iter()
            .any(|&f| c.is_iso(f) && c.comp(u.left, f) == s.left && c.comp(u.right, f) == s.right)
}

/// The 1-category of spans up to leg-compatible isomorphism.
#[derive(Clone, Debug)]
pub struct HomotopySpanCategory {
    pub cat: CatRef,
    /// Canonical representative of each morphism.
    pub reps: Vec<SpanHom>,
    class_of: HashMap<SpanHom, Mor>,
}

impl HomotopySpanCategory {
    /// The class of a span.
    pub fn class(&self, s: &SpanHom) -> Option<Mor> {
        self.class_of.get(s).copied()
    }

    /// Number of spans indexed.
    pub fn span_count(&self) -> usize {
        self.class_of.len()
    }
}

pub fn homotopy_span_category(t: &AdequateTriple) -> Result<HomotopySpanCategory, SpanError> {
    let c = &*t.carrier;
    let mut rep_of: HashMap<SpanHom, SpanHom> = HashMap::new();
    let mut reps: Vec<SpanHom> = Vec::new();
    for x in c.objects() {
        for y in c.objects() {
            let mut local: Vec<SpanHom> = Vec::new();
            let mut between = t.spans_between(x, y);
            // identity spans represent their class
            if x == y {
                let id = t.identity_span(x);
                between.retain(|s| *s != id);
                between.insert(0, id);
            }
            for s in between {
                let rep = local.iter().find(|r| spans_isomorphic(c, &s, r)).copied();
                match rep {
                    Some(r) => {
                        rep_of.insert(s, r);
                    }
                    None => {
                        local.push(s);
                        rep_of.insert(s, s);
                    }
                }
            }
            reps.extend(local);
        }
    }
    let mut a: Assembly<Ob, SpanHom> = Assembly::new();
    for x in c.objects() {
        a.object(x, c.object_name(x).to_owned());
    }
    for r in &reps {
        a.morphism(*r, t.span_name(r), &r.x, &r.y);
    }
    let mut err = None;
    let built = a
        .finish(
            |&x| t.identity_span(x),
            |g, f| match compose_spans(t, f, g) {
                Ok(comp) => rep_of[&comp.span],
                Err(e) => {
                    err.get_or_insert(e);
                    *g
                }
            },
        )
        .map_err(|e| SpanError::NotASpan(e.to_string()));
    if let Some(e) = err {
        return Err(e);
    }
    let built = built?;
    let class_of = rep_of.iter().map(|(s, r)| (*s, built.mor_of[r])).collect();
    Ok(HomotopySpanCategory {
        cat: built.cat,
        reps: built.mor_keys,
        class_of,
    })
}

/// A functor between the carriers of two triples, validated as a map of
/// adequate triples.
#[derive(Clone, Debug)]
pub struct TripleMap {
    pub source: TripleRef,
    pub target: TripleRef,
    pub functor: FunctorData,
}

impl TripleMap {
    pub fn new(source: TripleRef, target: TripleRef, functor: FunctorData) -> Result<Self, SpanError> {
        let (e, c) = (source.carrier(), target.carrier());
        if functor.source() != e || functor.target() != c {
            return Err(SpanError::NotTripleMap("functor endpoints".into()));
        }
        for m in e.morphisms() {
            if source.left().contains(m) && !target.left().contains(functor.mor(m)) {
                return Err(SpanError::NotTripleMap(format!(
                    "`{}` leaves the left class",
                    name(e, m)
                )));
            }
            if source.right().contains(m) && !target.right().contains(functor.mor(m)) {
                return Err(SpanError::NotTripleMap(format!(
                    "`{}` leaves the right class",
                    name(e, m)
                )));
            }
        }
        for l in source.left().members() {
            for r in source.right().members() {
                if e.target(l) != e.target(r) {
                    continue;
                }
                let pb = source.pullback(l, r)?;
                let v = is_pullback_square(
                    c,
                    functor.mor(pb.r_prime),
                    functor.mor(pb.l_prime),
                    functor.mor(l),
                    functor.mor(r),
                )
                .map_err(|e| SpanError::NotTripleMap(e.to_string()))?;
                if !v.is_pullback {
                    return Err(SpanError::NotTripleMap(format!(
                        "pullback of `{}` along `{}` is not preserved",
                        name(e, l),
                        name(e, r)
                    )));
                }
            }
        }
        Ok(TripleMap {
            source,
            target,
            functor,
        })
    }

    pub fn map_span(&self, s: &SpanHom) -> SpanHom {
        let p = &self.functor;
        SpanHom {
            x: p.ob(s.x),
            y: p.ob(s.y),
            apex: p.ob(s.apex),
            left: p.mor(s.left),
            right: p.mor(s.right),
        }
    }
}

/// The functors induced by a map of triples: on span classes, and on each
/// span hom category.
#[derive(Clone, Debug)]
pub struct SpanFunctor {
    pub source: HomotopySpanCategory,
    pub target: HomotopySpanCategory,
    pub on_classes: FunctorData,
}

impl SpanFunctor {
    /// The functor `Hom(x, y) -> Hom(p x, p y)` of span hom categories.
    pub fn homwise(
        &self,
        p: &TripleMap,
        x: Ob,
        y: Ob,
    ) -> Result<(SpanHomCategory, SpanHomCategory, FunctorData), SpanError> {
        homwise_functor(p, x, y)
    }
}

pub fn homwise_functor(
    p: &TripleMap,
    x: Ob,
    y: Ob,
) -> Result<(SpanHomCategory, SpanHomCategory, FunctorData), SpanError> {
    let src = span_hom_category(&p.source, x, y);
    let tgt = span_hom_category(&p.target, p.functor.ob(x), p.functor.ob(y));
    let ob_map: Vec<Ob> = src.spans.iter().map(|s| tgt.index[&p.map_span(s)]).collect();
    let mor_map: Vec<Mor> = src
        .cat
        .morphisms()
        .map(|m| {
            let cell = src.cell(m);
            let image = Span2Cell {
                source: p.map_span(&cell.source),
                target: p.map_span(&cell.target),
                f: p.functor.mor(cell.f),
            };
            tgt.morphism_for(&image).expect("image 2-cell")
        })
        .collect();
    let f = FunctorData::new(src.cat.clone(), tgt.cat.clone(), ob_map, mor_map)?;
    Ok((src, tgt, f))
}

pub fn span_of_triple_map(p: &TripleMap) -> Result<SpanFunctor, SpanError> {
    let source = homotopy_span_category(&p.source)?;
    let target = homotopy_span_category(&p.target)?;
    let ob_map: Vec<Ob> = p.functor.object_map().to_vec();
    let mor_map: Vec<Mor> = source
        .reps
        .iter()
        .map(|s| target.class(&p.map_span(s)).expect("image span"))
        .collect();
    let on_classes = FunctorData::new(source.cat.clone(), target.cat.clone(), ob_map, mor_map)?;
    Ok(SpanFunctor {
        source,
        target,
        on_classes,
    })
}

/// The adjunction `forward ⊣ backward` in spans attached to `l: X -> Y`.
#[derive(Clone, Debug, Serialize)]
pub struct SpanAdjunction {
    /// `X <-id- X -l-> Y`.
    pub forward: SpanHom,
    /// `Y <-l- X -id-> X`.
    pub backward: SpanHom,
    /// `id_X ⇒ forward;backward`, the diagonal into the kernel pair.
    pub unit: Span2Cell,
    /// `backward;forward ⇒ id_Y`, given by `l`.
    pub counit: Span2Cell,
    pub kernel_pair: Ob,
    pub first_triangle: bool,
    pub second_triangle: bool,
}

pub fn span_adjunction(t: &AdequateTriple, l: Mor) -> Result<SpanAdjunction, SpanError> {
    let c = &*t.carrier;
    let (x, y) = (c.source(l), c.target(l));
    let id_x = c.identity(x);
    let forward = t.span(id_x, l)?;
    let backward = t.span(l, id_x)?;
    let fb = compose_spans(t, &forward, &backward)?;
    let bf = compose_spans(t, &backward, &forward)?;
    // the diagonal: unique map X -> X ×_Y X with both projections the identity
    let delta = factor_through(
        c,
        &Cone {
            apex: fb.span.apex,
            to_x: fb.to_second,
            to_y: fb.to_first,
        },
        &Cone {
            apex: x,
            to_x: id_x,
            to_y: id_x,
        },
    )
    .ok_or_else(|| SpanError::MissingCoherence("diagonal".into()))?;
    let unit = Span2Cell::new(c, t.identity_span(x), fb.span, delta)
        .ok_or_else(|| SpanError::MissingCoherence("unit".into()))?;
    let counit_f = c.comp(l, bf.to_first);
    let counit = Span2Cell::new(c, bf.span, t.identity_span(y), counit_f)
        .ok_or_else(|| SpanError::MissingCoherence("counit".into()))?;

    // forward ≅ id;forward ⇒ (f;b);f ≅ f;(b;f) ⇒ f;id ≅ forward
    let lam = left_unitor(t, &forward)?.inverse(c).expect("unitor invertible");
    let step1 = whisker_right(t, &unit, &forward)?;
    let assoc = associator(t, &forward, &backward, &forward)?;
    let step3 = whisker_left(t, &forward, &counit)?;
    let rho = right_unitor(t, &forward)?;
    let first = rho.after(c, &step3.after(c, &assoc.after(c, &step1.after(c, &lam))));
    // backward ≅ b;id ⇒ b;(f;b) ≅ (b;f);b ⇒ id;b ≅ backward
    let rho_inv = right_unitor(t, &backward)?.inverse(c).expect("unitor invertible");
    let s1 = whisker_left(t, &backward, &unit)?;
    let assoc_inv = associator(t, &backward, &forward, &backward)?
        .inverse(c)
        .ok_or_else(|| SpanError::MissingCoherence("associator inverse".into()))?;
    let s3 = whisker_right(t, &counit, &backward)?;
    let lam2 = left_unitor(t, &backward)?;
    let second = lam2.after(c, &s3.after(c, &assoc_inv.after(c, &s1.after(c, &rho_inv))));
    Ok(SpanAdjunction {
        forward,
        backward,
        unit,
        counit,
        kernel_pair: fb.span.apex,
        first_triangle: first.is_identity(c),
        second_triangle: second.is_identity(c),
    })
}

/// `(C, R, L)` together with the comparison `hSpan(C, L, R)^op -> hSpan(C, R, L)`.
pub struct TripleOp {
    pub triple: AdequateTriple,
    pub comparison: FunctorData,
    pub is_isomorphism: bool,
}

pub fn triple_op(t: &AdequateTriple) -> Result<TripleOp, SpanError> {
    let swapped = t.swapped();
    let here = homotopy_span_category(t)?;
    let there = homotopy_span_category(&swapped)?;
    let here_op = Arc::new(crate::fincat::opposite(&here.cat));
    let mor_map: Vec<Mor> = here
        .reps
        .iter()
        .map(|s| {
            let flipped = SpanHom {
                x: s.y,
                y: s.x,
                apex: s.apex,
                left: s.right,
                right: s.left,
            };
            there.class(&flipped).expect("flipped span")
        })
        .collect();
    let ob_map = here_op.objects().collect();
    let comparison = FunctorData::new(here_op, there.cat.clone(), ob_map, mor_map)?;
    Ok(TripleOp {
        is_isomorphism: comparison.is_isomorphism(),
        triple: swapped,
        comparison,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::standard::{cospan, powerset};

    fn poset_triple() -> AdequateTriple {
        let p = powerset(&["1", "2"]).shared();
        validate_adequate_triple(WideSubcat::all(p.clone()), WideSubcat::all(p)).unwrap()
    }

    #[test]
    fn cospan_has_no_pullback() {
        let c = cospan().shared();
        let err = validate_adequate_triple(WideSubcat::all(c.clone()), WideSubcat::all(c)).unwrap_err();
        assert!(matches!(err, SpanError::MissingPullback { .. }));
    }

    #[test]
    fn poset_composition_is_meet() {
        let t = poset_triple();
        let c = t.carrier().clone();
        let s = t.span(c.mor("{1}->{1,2}"), c.mor("{1}->{1,2}")).unwrap();
        let u = t.span(c.mor("{2}->{1,2}"), c.mor("{2}->{1,2}")).unwrap();
        let comp = compose_spans(&t, &s, &u).unwrap();
        assert_eq!(c.object_name(comp.span.apex), "{}");
    }

    #[test]
    fn poset_associators_are_identities() {
        let t = poset_triple();
        let c = t.carrier().clone();
        let x = c.ob("{1,2}");
        let sample = t.spans_between(x, x);
        let rep = check_coherence(&t, &sample, true).unwrap();
        assert!(rep.passed(), "{rep:?}");
        for s in &sample {
            for u in &sample {
                for v in &sample {
                    assert!(associator(&t, s, u, v).unwrap().is_identity(&c));
                }
            }
        }
    }

    #[test]
    fn empty_hom_is_singleton() {
        let t = poset_triple();
        let h = homotopy_span_category(&t).unwrap();
        let e = t.carrier().ob("{}");
        assert_eq!(h.cat.hom(e, e).len(), 1);
    }
}
