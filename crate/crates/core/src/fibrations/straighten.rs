use std::collections::HashMap;

use super::{grothendieck, Cleavage, FibrationError, IndexedFamily, LiftKind, Variance};
use crate::fincat::{fiber, CatRef, FunctorData, Mor, NatTransData, Ob};

struct Fibers {
    cats: Vec<CatRef>,
    incl: Vec<FunctorData>,
    ob_back: Vec<Option<Ob>>,
    mor_back: Vec<Option<Mor>>,
}

impl Fibers {
    fn new(p: &FunctorData) -> Self {
        let (e, c) = (p.source(), p.target());
        let mut ob_back = vec![None; e.object_count()];
        let mut mor_back = vec![None; e.morphism_count()];
        let mut cats = Vec::new();
        let mut incl = Vec::new();
        for o in c.objects() {
            let (fib, i) = fiber(p, o);
            for x in fib.objects() {
                ob_back[i.ob(x).0] = Some(x);
            }
            for m in fib.morphisms() {
                mor_back[i.mor(m).0] = Some(m);
            }
            cats.push(fib);
            incl.push(i);
        }
        Fibers {
            cats,
            incl,
            ob_back,
            mor_back,
        }
    }
}

fn missing(p: &FunctorData, cl: &Cleavage, m: Mor, at: Ob) -> FibrationError {
    FibrationError::NotFibration {
        kind: cl.kind().as_str(),
        morphism: p.target().morphism_name(m).to_owned(),
        at: p.source().object_name(at).to_owned(),
    }
}

/// The unique morphism `a -> b` over `id` satisfying `pred`.
pub(crate) fn unique_over(p: &FunctorData, a: Ob, b: Ob, pred: impl Fn(Mor) -> bool) -> Result<Mor, FibrationError> {
    let e = p.source();
    let id = p.target().identity(p.ob(b));
    let found: Vec<Mor> = e
        .hom(a, b)
        .iter()
        .copied()
        .filter(|&v| p.mor(v) == id && pred(v))
        .collect();
    match found.as_slice() {
        [v] => Ok(*v),
        _ => Err(FibrationError::MalformedFamily(format!(
            "{} factorizations from `{}` to `{}` over the identity",
            found.len(),
            e.object_name(a),
            e.object_name(b)
        ))),
    }
}

/// The family classified by a fibration with a chosen cleavage: covariant for
/// a cocartesian cleavage, contravariant for a cartesian one. Transports move
/// objects along the chosen lifts; coherence isos come from unique
/// factorization.
pub fn straighten(p: &FunctorData, cleavage: &Cleavage) -> Result<IndexedFamily, FibrationError> {
    let (e, c) = (p.source(), p.target());
    let fibers = Fibers::new(p);
    let lift = |m: Mor, at: Ob| cleavage.lift(m, at).ok_or_else(|| missing(p, cleavage, m, at));
    let back_ob = |o: Ob| fibers.ob_back[o.0].expect("object lies in a fiber");
    let back_mor = |m: Mor| fibers.mor_back[m.0].expect("morphism lies over an identity");
    let mut transports = Vec::new();
    for f in c.morphisms() {
        let (s, t) = (c.source(f), c.target(f));
        if c.is_identity(f) {
            transports.push(FunctorData::identity(fibers.cats[s.0].clone()));
            continue;
        }
        let (from, to) = match cleavage.kind() {
            LiftKind::Cocartesian => (s, t),
            LiftKind::Cartesian => (t, s),
        };
        let (src, inc) = (&fibers.cats[from.0], &fibers.incl[from.0]);
        let mut obs = Vec::new();
        for x in src.objects() {
            let l = lift(f, inc.ob(x))?;
            let moved = match cleavage.kind() {
                LiftKind::Cocartesian => e.target(l),
                LiftKind::Cartesian => e.source(l),
            };
            obs.push(back_ob(moved));
        }
        let mut mors = Vec::new();
        for phi in src.morphisms() {
            let (x, y) = (inc.ob(src.source(phi)), inc.ob(src.target(phi)));
            let (lx, ly) = (lift(f, x)?, lift(f, y)?);
            let phi_e = inc.mor(phi);
            let psi = match cleavage.kind() {
                LiftKind::Cocartesian => {
                    unique_over(p, e.target(lx), e.target(ly), |v| e.comp(v, lx) == e.comp(ly, phi_e))?
                }
                LiftKind::Cartesian => {
                    unique_over(p, e.source(lx), e.source(ly), |v| e.comp(ly, v) == e.comp(phi_e, lx))?
                }
            };
            mors.push(back_mor(psi));
        }
        transports.push(FunctorData::new(src.clone(), fibers.cats[to.0].clone(), obs, mors)?);
    }
    let variance = match cleavage.kind() {
        LiftKind::Cocartesian => Variance::Covariant,
        LiftKind::Cartesian => Variance::Contravariant,
    };
    let mut coherence = HashMap::new();
    for f in c.morphisms() {
        for g in c.morphisms().filter(|&g| c.source(g) == c.target(f)) {
            if c.is_identity(f) || c.is_identity(g) {
                continue;
            }
            let gf = c.comp(g, f);
            let (composite, start) = match variance {
                Variance::Covariant => (transports[g.0].after(&transports[f.0])?, c.source(f)),
                Variance::Contravariant => (transports[f.0].after(&transports[g.0])?, c.target(g)),
            };
            let inc = &fibers.incl[start.0];
            let mut comps = Vec::new();
            for x in fibers.cats[start.0].objects() {
                let x = inc.ob(x);
                let mu = match variance {
                    Variance::Covariant => {
                        let lf = lift(f, x)?;
                        let lg = lift(g, e.target(lf))?;
                        let lgf = lift(gf, x)?;
                        let two = e.comp(lg, lf);
                        unique_over(p, e.target(lg), e.target(lgf), |v| e.comp(v, two) == lgf)?
                    }
                    Variance::Contravariant => {
                        let lg = lift(g, x)?;
                        let lf = lift(f, e.source(lg))?;
                        let lgf = lift(gf, x)?;
                        let two = e.comp(lg, lf);
                        unique_over(p, e.source(lf), e.source(lgf), |v| e.comp(lgf, v) == two)?
                    }
                };
                comps.push(back_mor(mu));
            }
            let mu = NatTransData::new(composite, transports[gf.0].clone(), comps)?;
            coherence.insert((g, f), mu);
        }
    }
    IndexedFamily::new(c.clone(), variance, fibers.cats, transports, coherence)
}

/// Checks that `iso` is a levelwise isomorphism `a -> b` commuting strictly
/// with transports and coherence.
pub fn check_levelwise_iso(a: &IndexedFamily, b: &IndexedFamily, iso: &[FunctorData]) -> Result<(), FibrationError> {
    let fail = |s: String| Err(FibrationError::NotLevelwiseIso(s));
    let base = a.base();
    if **base != **b.base() || a.variance() != b.variance() || iso.len() != base.object_count() {
        return fail("bases, variances or arity differ".into());
    }
    for c in base.objects() {
        let i = &iso[c.0];
        if **i.source() != **a.fiber(c) || **i.target() != **b.fiber(c) || !i.is_isomorphism() {
            return fail(format!("no isomorphism of fibers over `{}`", base.object_name(c)));
        }
    }
    let contra = a.variance() == Variance::Contravariant;
    for f in base.morphisms() {
        let (s, t) = (base.source(f), base.target(f));
        let (from, to) = if contra { (t, s) } else { (s, t) };
        let lhs = iso[to.0].after(a.transport(f))?;
        let rhs = b.transport(f).after(&iso[from.0])?;
        if lhs.object_map() != rhs.object_map() || lhs.morphism_map() != rhs.morphism_map() {
            return fail(format!("transport of `{}` does not commute", base.morphism_name(f)));
        }
    }
    for f in base.morphisms() {
        for g in base.morphisms().filter(|&g| base.source(g) == base.target(f)) {
            let (start, end) = if contra {
                (base.target(g), base.source(f))
            } else {
                (base.source(f), base.target(g))
            };
            let (ma, mb) = (a.coherence(g, f), b.coherence(g, f));
            for x in a.fiber(start).objects() {
                if iso[end.0].mor(ma.component(x)) != mb.component(iso[start.0].ob(x)) {
                    return fail(format!(
                        "coherence for ({}, {}) differs",
                        base.morphism_name(g),
                        base.morphism_name(f)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Unstraighten, straighten along the canonical lifts, and compare with the
/// input through the fiber comparison isomorphisms.
pub fn round_trip(family: &IndexedFamily) -> Result<(), FibrationError> {
    let g = grothendieck(family)?;
    let back = straighten(&g.projection, &g.cleavage)?;
    let iso = g.fiber_comparison(family)?;
    check_levelwise_iso(&back, family, &iso)
}

/// Natural isos between the transports obtained from two cleavages of the
/// same kind, one per base morphism. Fails if some component is missing or
/// the components are not natural.
pub fn compare_cleavages(p: &FunctorData, a: &Cleavage, b: &Cleavage) -> Result<Vec<NatTransData>, FibrationError> {
    if a.kind() != b.kind() {
        return Err(FibrationError::NotLevelwiseIso("cleavages of different kinds".into()));
    }
    let (sa, sb) = (straighten(p, a)?, straighten(p, b)?);
    let (e, c) = (p.source(), p.target());
    let fibers = Fibers::new(p);
    let mut out = Vec::new();
    for f in c.morphisms() {
        let (ta, tb) = (sa.transport(f), sb.transport(f));
        let from = match a.kind() {
            LiftKind::Cocartesian => c.source(f),
            LiftKind::Cartesian => c.target(f),
        };
        let inc = &fibers.incl[from.0];
        let mut comps = Vec::new();
        for x in ta.source().objects() {
            let at = inc.ob(x);
            let (la, lb) = (a.lift(f, at).unwrap(), b.lift(f, at).unwrap());
            let theta = match a.kind() {
                LiftKind::Cocartesian => unique_over(p, e.target(la), e.target(lb), |v| e.comp(v, la) == lb)?,
                LiftKind::Cartesian => unique_over(p, e.source(la), e.source(lb), |v| e.comp(lb, v) == la)?,
            };
            comps.push(fibers.mor_back[theta.0].expect("over an identity"));
        }
        let nt = NatTransData::new(ta.clone(), tb.clone(), comps)?;
        if !nt.is_iso() {
            return Err(FibrationError::NotLevelwiseIso(format!(
                "lifts of `{}` are not isomorphic",
                c.morphism_name(f)
            )));
        }
        out.push(nt);
    }
    Ok(out)
}
