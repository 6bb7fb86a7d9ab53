use std::collections::HashMap;
use std::rc::Rc;

use serde::Serialize;

use super::UnfurlError;
use crate::fibrations::{classify_fibration, lift_verdict, Cleavage, Counterexample, LiftKind, LiftTable};
use crate::fincat::{check_equivalence, iso_comma, FunctorData, Mor, Ob};
use crate::limits::{factor_through, Cone};
use crate::spans::{
    compose_spans, span_of_triple_map, whisker_left, AdequateTriple, Span2Cell, SpanFunctor, SpanHom, SpanHomCategory,
    TripleMap,
};

/// Chooses (co)cartesian lifts in the total category: from a canonical
/// cleavage when its kind matches, otherwise the least lift in canonical
/// order. Identities lift to identities.
pub(crate) struct Lifter<'a> {
    pub p: &'a FunctorData,
    pub table: LiftTable,
    pub canonical: Option<&'a Cleavage>,
}

impl<'a> Lifter<'a> {
    pub fn new(p: &'a FunctorData, canonical: Option<&'a Cleavage>) -> Self {
        Lifter {
            p,
            table: LiftTable::new(p),
            canonical,
        }
    }

    pub fn lift(&self, m: Mor, at: Ob, kind: LiftKind) -> Option<Mor> {
        let (e, c) = (self.p.source(), self.p.target());
        if c.is_identity(m) {
            return Some(e.identity(at));
        }
        if let Some(cl) = self.canonical.filter(|cl| cl.kind() == kind) {
            if let Some(l) = cl.lift(m, at) {
                return Some(l);
            }
        }
        e.morphisms().find(|&n| {
            self.p.mor(n) == m
                && self.table.is(kind, n)
                && match kind {
                    LiftKind::Cartesian => e.target(n) == at,
                    LiftKind::Cocartesian => e.source(n) == at,
                }
        })
    }

    /// The lift of the span `l, r` at `at`: a cartesian lift of `l` ending at
    /// `at`, then a cocartesian lift of `r` from its source.
    pub fn two_step(&self, l: Mor, r: Mor, at: Ob) -> Option<SpanHom> {
        let e = self.p.source();
        let lt = self.lift(l, at, LiftKind::Cartesian)?;
        let u = e.source(lt);
        let rt = self.lift(r, u, LiftKind::Cocartesian)?;
        Some(SpanHom {
            x: at,
            y: e.target(rt),
            apex: u,
            left: lt,
            right: rt,
        })
    }
}

/// Verdicts of the 1-cocartesian check on a map of triples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OneCocartesianReport {
    /// (a) every homwise functor is a right fibration.
    pub homwise_right_fibrations: bool,
    pub homwise_counterexample: Option<String>,
    /// (b) the class-level functor is a cocartesian fibration.
    pub underlying_cocartesian: bool,
    pub underlying_counterexample: Option<Counterexample>,
    /// (c) for every two-step lift the square of hom categories is a pullback.
    pub hom_squares: bool,
    pub hom_square_counterexample: Option<String>,
    /// The two-step lifts are cocartesian at the class level.
    pub two_step_lifts_cocartesian: bool,
    /// (a) and (b) hold exactly when (c) does.
    pub consistent: bool,
    pub hom_pairs: usize,
    pub lifts_checked: usize,
}

impl OneCocartesianReport {
    pub fn passed(&self) -> bool {
        self.homwise_right_fibrations
            && self.underlying_cocartesian
            && self.hom_squares
            && self.two_step_lifts_cocartesian
            && self.consistent
    }
}

/// Whether `h` is a right fibration (`Cartesian`) or left fibration
/// (`Cocartesian`) of 1-categories: lifts exist and every morphism is
/// (co)cartesian. Returns the first offending morphism or lift.
pub fn homwise_fibration_failure(h: &FunctorData, kind: LiftKind) -> Option<String> {
    let table = LiftTable::new(h);
    let e = h.source();
    if let Some(m) = e.morphisms().find(|&m| !table.is(kind, m)) {
        return Some(format!("`{}` is not {}", e.morphism_name(m), kind.as_str()));
    }
    let v = lift_verdict(h, &table, kind.as_str(), kind, h.target().morphisms(), false);
    v.counterexample.map(|c| match c {
        Counterexample::Lift { morphism, at, .. } => format!("no {} lift of `{morphism}` at `{at}`", kind.as_str()),
        Counterexample::Square { top, .. } => top,
    })
}

pub(crate) struct HomCache<'a> {
    triple: &'a AdequateTriple,
    homs: HashMap<(Ob, Ob), Rc<SpanHomCategory>>,
}

impl<'a> HomCache<'a> {
    pub fn new(triple: &'a AdequateTriple) -> Self {
        HomCache {
            triple,
            homs: HashMap::new(),
        }
    }

    pub fn get(&mut self, x: Ob, y: Ob) -> Rc<SpanHomCategory> {
        let t = self.triple;
        self.homs
            .entry((x, y))
            .or_insert_with(|| Rc::new(crate::spans::span_hom_category(t, x, y)))
            .clone()
    }
}

/// The homwise functor between given hom categories.
pub(crate) fn homwise_between(
    q: &TripleMap,
    src: &SpanHomCategory,
    tgt: &SpanHomCategory,
) -> Result<FunctorData, UnfurlError> {
    let ob_map = src.spans.iter().map(|s| tgt.index[&q.map_span(s)]).collect();
    let mor_map = src
        .cat
        .morphisms()
        .map(|m| {
            let cell = src.cell(m);
            let image = Span2Cell {
                source: q.map_span(&cell.source),
                target: q.map_span(&cell.target),
                f: q.functor.mor(cell.f),
            };
            tgt.morphism_for(&image).expect("image 2-cell")
        })
        .collect();
    Ok(FunctorData::new(src.cat.clone(), tgt.cat.clone(), ob_map, mor_map)?)
}

/// Precomposition `u ↦ s;u` from `Hom(y, z)` to `Hom(x, z)`.
pub(crate) fn precompose(
    t: &AdequateTriple,
    s: &SpanHom,
    from: &SpanHomCategory,
    to: &SpanHomCategory,
) -> Result<FunctorData, UnfurlError> {
    let mut obs = Vec::new();
    for u in &from.spans {
        obs.push(to.index[&compose_spans(t, s, u)?.span]);
    }
    let mut mors = Vec::new();
    for m in from.cat.morphisms() {
        let cell = whisker_left(t, s, &from.cell(m))?;
        mors.push(to.morphism_for(&cell).expect("whiskered cell"));
    }
    Ok(FunctorData::new(from.cat.clone(), to.cat.clone(), obs, mors)?)
}

/// Is the square of hom categories at the lift `st` and target `z` a
/// pullback, i.e. is `Hom(y~, z) -> Hom(x~, z) ×≅ Hom(y, p z)` an equivalence?
fn hom_square(
    q: &TripleMap,
    st: &SpanHom,
    z: Ob,
    ecache: &mut HomCache,
    ccache: &mut HomCache,
) -> Result<bool, UnfurlError> {
    let (et, ct) = (&*q.source, &*q.target);
    let c = ct.carrier();
    let p = &q.functor;
    let sigma = q.map_span(st);
    let hom_yz = ecache.get(st.y, z);
    let hom_xz = ecache.get(st.x, z);
    let chom_yz = ccache.get(sigma.y, p.ob(z));
    let chom_xz = ccache.get(sigma.x, p.ob(z));
    let pre_e = precompose(et, st, &hom_yz, &hom_xz)?;
    let pre_c = precompose(ct, &sigma, &chom_yz, &chom_xz)?;
    let p_xz = homwise_between(q, &hom_xz, &chom_xz)?;
    let p_yz = homwise_between(q, &hom_yz, &chom_yz)?;
    let (comma, pr1, pr2, keys) = iso_comma(&p_xz, &pre_c);
    let key_index: HashMap<_, Ob> = keys.iter().enumerate().map(|(i, k)| (*k, Ob(i))).collect();
    let mut obs = Vec::new();
    for u in &hom_yz.spans {
        let ce = compose_spans(et, st, u)?;
        let cc = compose_spans(ct, &sigma, &q.map_span(u))?;
        let probe = Cone {
            apex: p.ob(ce.span.apex),
            to_x: p.mor(ce.to_second),
            to_y: p.mor(ce.to_first),
        };
        let through = Cone {
            apex: cc.span.apex,
            to_x: cc.to_second,
            to_y: cc.to_first,
        };
        let f = factor_through(c, &through, &probe).ok_or(UnfurlError::Coherence("image of a composite"))?;
        let cell = Span2Cell {
            source: q.map_span(&ce.span),
            target: cc.span,
            f,
        };
        let phi = chom_xz
            .morphism_for(&cell)
            .ok_or(UnfurlError::Coherence("comparison cell"))?;
        let a = hom_xz.index[&ce.span];
        let b = chom_yz.index[&q.map_span(u)];
        obs.push(key_index[&(a, b, phi)]);
    }
    let mut mors = Vec::new();
    for m in hom_yz.cat.morphisms() {
        let (s, t) = (obs[hom_yz.cat.source(m).0], obs[hom_yz.cat.target(m).0]);
        let (want1, want2) = (pre_e.mor(m), p_yz.mor(m));
        let found = comma
            .hom(s, t)
            .iter()
            .copied()
            .find(|&k| pr1.mor(k) == want1 && pr2.mor(k) == want2)
            .ok_or(UnfurlError::Coherence("comparison morphism"))?;
        mors.push(found);
    }
    let k = FunctorData::new(hom_yz.cat.clone(), comma, obs, mors)?;
    Ok(check_equivalence(&k).is_equivalence())
}

/// The three-way 1-cocartesian check of a map of triples `q: E -> C`.
///
/// `canonical` optionally supplies preferred lifts in `E`.
pub fn check_one_cocartesian(q: &TripleMap, canonical: Option<&Cleavage>) -> Result<OneCocartesianReport, UnfurlError> {
    let span = span_of_triple_map(q)?;
    check_one_cocartesian_with(q, &span, canonical)
}

pub(crate) fn check_one_cocartesian_with(
    q: &TripleMap,
    span: &SpanFunctor,
    canonical: Option<&Cleavage>,
) -> Result<OneCocartesianReport, UnfurlError> {
    let e = q.source.carrier().clone();
    let mut ecache = HomCache::new(&q.source);
    let mut ccache = HomCache::new(&q.target);

    let mut homwise_counterexample = None;
    let mut hom_pairs = 0;
    'pairs: for x in e.objects() {
        for y in e.objects() {
            hom_pairs += 1;
            let src = ecache.get(x, y);
            let tgt = ccache.get(q.functor.ob(x), q.functor.ob(y));
            let h = homwise_between(q, &src, &tgt)?;
            if let Some(bad) = homwise_fibration_failure(&h, LiftKind::Cartesian) {
                homwise_counterexample = Some(format!("{} -> {}: {bad}", e.object_name(x), e.object_name(y)));
                break 'pairs;
            }
        }
    }

    let classes = classify_fibration(&span.on_classes);
    let under = classes.verdict("cocartesian").expect("cocartesian verdict").clone();
    let class_table = LiftTable::new(&span.on_classes);

    let lifter = Lifter::new(&q.functor, canonical);
    let base = span.target.cat.clone();
    let mut hom_square_counterexample = None;
    let mut two_step_ok = true;
    let mut lifts_checked = 0;
    'lifts: for sigma in base.morphisms() {
        let rep = span.target.reps[sigma.0];
        for at in e.objects().filter(|&o| q.functor.ob(o) == rep.x) {
            lifts_checked += 1;
            let Some(st) = lifter.two_step(rep.left, rep.right, at) else {
                hom_square_counterexample = Some(format!(
                    "no two-step lift of {} at {}",
                    base.morphism_name(sigma),
                    e.object_name(at)
                ));
                two_step_ok = false;
                break 'lifts;
            };
            let class = span
                .source
                .class(&st)
                .ok_or(UnfurlError::Coherence("two-step lift is not a span"))?;
            if !class_table.cocartesian[class.0] {
                two_step_ok = false;
            }
            for z in e.objects() {
                if !hom_square(q, &st, z, &mut ecache, &mut ccache)? {
                    hom_square_counterexample = Some(format!(
                        "lift {} of {} against {}",
                        q.source.span_name(&st),
                        base.morphism_name(sigma),
                        e.object_name(z)
                    ));
                    break 'lifts;
                }
            }
        }
    }
    let a = homwise_counterexample.is_none();
    let b = under.holds;
    let c = hom_square_counterexample.is_none();
    Ok(OneCocartesianReport {
        homwise_right_fibrations: a,
        homwise_counterexample,
        underlying_cocartesian: b,
        underlying_counterexample: under.counterexample,
        hom_squares: c,
        hom_square_counterexample,
        two_step_lifts_cocartesian: two_step_ok,
        consistent: (a && b) == c,
        hom_pairs,
        lifts_checked,
    })
}

/// The dual check used for the co construction: homwise left fibrations and
/// a class-level cartesian fibration.
///
/// The co construction reverses 2-cells, so a left fibration there is a
/// right fibration between the hom categories as stored here, with 2-cells
/// running from the source apex to the target apex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OneCartesianReport {
    pub homwise_left_fibrations: bool,
    pub homwise_counterexample: Option<String>,
    pub underlying_cartesian: bool,
    pub underlying_counterexample: Option<Counterexample>,
    pub hom_pairs: usize,
}

impl OneCartesianReport {
    pub fn passed(&self) -> bool {
        self.homwise_left_fibrations && self.underlying_cartesian
    }
}

/// First hom pair on which `q` is not homwise a fibration of the given kind,
/// and the number of pairs examined.
pub(crate) fn homwise_scan(q: &TripleMap, kind: LiftKind) -> Result<(Option<String>, usize), UnfurlError> {
    let e = q.source.carrier().clone();
    let mut ecache = HomCache::new(&q.source);
    let mut ccache = HomCache::new(&q.target);
    let mut hom_pairs = 0;
    for x in e.objects() {
        for y in e.objects() {
            hom_pairs += 1;
            let src = ecache.get(x, y);
            let tgt = ccache.get(q.functor.ob(x), q.functor.ob(y));
            let h = homwise_between(q, &src, &tgt)?;
            if let Some(bad) = homwise_fibration_failure(&h, kind) {
                let at = format!("{} -> {}: {bad}", e.object_name(x), e.object_name(y));
                return Ok((Some(at), hom_pairs));
            }
        }
    }
    Ok((None, hom_pairs))
}

pub fn check_one_cartesian(q: &TripleMap, span: &SpanFunctor) -> Result<OneCartesianReport, UnfurlError> {
    let (homwise_counterexample, hom_pairs) = homwise_scan(q, LiftKind::Cartesian)?;
    let classes = classify_fibration(&span.on_classes);
    let under = classes.verdict("cartesian").expect("cartesian verdict").clone();
    Ok(OneCartesianReport {
        homwise_left_fibrations: homwise_counterexample.is_none(),
        homwise_counterexample,
        underlying_cartesian: under.holds,
        underlying_counterexample: under.counterexample,
        hom_pairs,
    })
}
