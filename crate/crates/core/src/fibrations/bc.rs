use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::{
    grothendieck, is_cocartesian, lift_verdict, Counterexample, FibrationError, FibrationReport, Grothendieck,
    IndexedFamily, LiftKind, LiftTable, Variance, Verdict,
};
use crate::fincat::{subcategory, FunctorData, Mor, NatTransData, WideSubcat};
use crate::limits::{
    check_square_adjointable, find_left_adjoint, find_right_adjoint, is_pullback_square, AdjointSide, FunctorSquare,
};
use crate::spans::{pullback_with_isos, validate_adequate_triple, AdequateTriple, TripleMap, TripleRef};

pub const CARTESIAN_OVER_L: &str = "cartesian lifts over L";
pub const COCARTESIAN_OVER_R: &str = "cocartesian lifts over R";
pub const SQUARE_FORWARD: &str = "square: r' cocartesian implies l cartesian";
pub const SQUARE_BACKWARD: &str = "square: l cartesian implies r' cocartesian";

/// Checks the three Beck-Chevalley conditions, the square condition in both
/// directions separately.
///
/// Squares are `r': X' -> X`, `l': X' -> Y'`, `l: X -> Y`, `r: Y' -> Y` with
/// `l r' = r l'`, image a pullback, `p(l) ∈ L`, `p(r') ∈ R`, `r` cocartesian
/// and `l'` cartesian.
pub fn check_bc_fibration(p: &FunctorData, t: &AdequateTriple) -> FibrationReport {
    let table = LiftTable::new(p);
    let (e, c) = (p.source(), p.target());
    let one = lift_verdict(
        p,
        &table,
        CARTESIAN_OVER_L,
        LiftKind::Cartesian,
        t.left().members(),
        false,
    );
    let two = lift_verdict(
        p,
        &table,
        COCARTESIAN_OVER_R,
        LiftKind::Cocartesian,
        t.right().members(),
        false,
    );
    let mut memo: HashMap<(Mor, Mor, Mor, Mor), bool> = HashMap::new();
    let mut forward = (0, None);
    let mut backward = (0, None);
    for l in e.morphisms().filter(|&l| t.left().contains(p.mor(l))) {
        let (x, y) = (e.source(l), e.target(l));
        for r in e.morphisms().filter(|&r| e.target(r) == y && table.cocartesian[r.0]) {
            let y1 = e.source(r);
            for l1 in e.morphisms().filter(|&m| e.target(m) == y1 && table.cartesian[m.0]) {
                let x1 = e.source(l1);
                let rl1 = e.comp(r, l1);
                for &r1 in e.hom(x1, x) {
                    if !t.right().contains(p.mor(r1)) || e.comp(l, r1) != rl1 {
                        continue;
                    }
                    let key = (p.mor(r1), p.mor(l1), p.mor(l), p.mor(r));
                    let pb = *memo.entry(key).or_insert_with(|| {
                        is_pullback_square(c, key.0, key.1, key.2, key.3)
                            .map(|v| v.is_pullback)
                            .unwrap_or(false)
                    });
                    if !pb {
                        continue;
                    }
                    let square = || Counterexample::Square {
                        top: e.morphism_name(r1).to_owned(),
                        left: e.morphism_name(l1).to_owned(),
                        right: e.morphism_name(l).to_owned(),
                        bottom: e.morphism_name(r).to_owned(),
                    };
                    let (cc, ca) = (table.cocartesian[r1.0], table.cartesian[l.0]);
                    forward.0 += 1;
                    backward.0 += 1;
                    if cc && !ca && forward.1.is_none() {
                        forward.1 = Some(square());
                    }
                    if ca && !cc && backward.1.is_none() {
                        backward.1 = Some(square());
                    }
                }
            }
        }
    }
    let square_verdict = |name: &str, (checked, bad): (usize, Option<Counterexample>)| Verdict {
        condition: name.to_owned(),
        holds: bad.is_none(),
        witnesses: Vec::new(),
        counterexample: bad,
        checked,
    };
    FibrationReport {
        verdicts: vec![
            one,
            two,
            square_verdict(SQUARE_FORWARD, forward),
            square_verdict(SQUARE_BACKWARD, backward),
        ],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjointExistence {
    pub morphism: String,
    pub exists: bool,
}

/// A pullback square `h: X' -> X`, `k: X' -> Y'`, `f: X -> Y`, `g: Y' -> Y`
/// with `g` marked, and the verdict on its mate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareCheck {
    pub h: String,
    pub k: String,
    pub f: String,
    pub g: String,
    pub is_iso: bool,
    pub first_non_iso: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjointabilityReport {
    pub variance: Variance,
    pub side: AdjointSide,
    pub adjoints: Vec<AdjointExistence>,
    pub squares: Vec<SquareCheck>,
    pub holds: bool,
}

fn square_of(family: &IndexedFamily, h: Mor, k: Mor, f: Mor, g: Mor) -> Result<FunctorSquare, FibrationError> {
    let tr = |m: Mor| family.transport(m).clone();
    let inv = |mu: &NatTransData| mu.inverse().expect("coherence is invertible");
    let sq = match family.variance() {
        Variance::Covariant => {
            let witness = inv(family.coherence(g, k)).after(family.coherence(f, h))?;
            FunctorSquare::new(tr(h), tr(k), tr(f), tr(g), witness)
        }
        Variance::Contravariant => {
            let witness = inv(family.coherence(f, h)).after(family.coherence(g, k))?;
            FunctorSquare::new(tr(g), tr(f), tr(k), tr(h), witness)
        }
    };
    sq.map_err(|e| FibrationError::MalformedFamily(e.to_string()))
}

/// Adjoint existence for every marked morphism and mate invertibility for
/// every pullback square (all apexes) with a marked bottom edge `g`.
///
/// Covariant families use the square `F(h), F(k), F(f), F(g)` with the
/// transports along `h` and `g` horizontal; contravariant families use
/// `F(g), F(f), F(k), F(h)`, again with the transports along the marked
/// morphism and its pullback horizontal.
pub fn check_adjointable(
    family: &IndexedFamily,
    marked: &WideSubcat,
    side: AdjointSide,
) -> Result<AdjointabilityReport, FibrationError> {
    let c = family.base();
    let mut adjoints = Vec::new();
    for m in marked.members() {
        let tr = family.transport(m);
        let exists = match side {
            AdjointSide::Left => find_left_adjoint(tr).is_some(),
            AdjointSide::Right => find_right_adjoint(tr).is_some(),
        };
        adjoints.push(AdjointExistence {
            morphism: c.morphism_name(m).to_owned(),
            exists,
        });
    }
    let mut squares = Vec::new();
    let n = |m: Mor| c.morphism_name(m).to_owned();
    if adjoints.iter().all(|a| a.exists) {
        for g in marked.members() {
            for f in c.morphisms().filter(|&f| c.target(f) == c.target(g)) {
                let Ok(pb) = pullback_with_isos(c, f, g) else {
                    squares.push(SquareCheck {
                        h: String::new(),
                        k: String::new(),
                        f: n(f),
                        g: n(g),
                        is_iso: false,
                        first_non_iso: Some("no pullback".into()),
                    });
                    continue;
                };
                for cone in &pb.all {
                    let (h, k) = (cone.to_x, cone.to_y);
                    let sq = square_of(family, h, k, f, g)?;
                    let (is_iso, first_non_iso) = match check_square_adjointable(&sq, side) {
                        Ok(bc) => (bc.is_iso, bc.first_non_iso),
                        Err(e) => (false, Some(e.to_string())),
                    };
                    squares.push(SquareCheck {
                        h: n(h),
                        k: n(k),
                        f: n(f),
                        g: n(g),
                        is_iso,
                        first_non_iso,
                    });
                }
            }
        }
    }
    let holds = adjoints.iter().all(|a| a.exists) && squares.iter().all(|s| s.is_iso);
    Ok(AdjointabilityReport {
        variance: family.variance(),
        side,
        adjoints,
        squares,
        holds,
    })
}

/// The triple on the base against which the unstraightening of a family is
/// expected to be a Beck-Chevalley fibration: `(C, marked, all)` for a
/// covariant family, `(C, all, marked)` for a contravariant one.
pub fn expected_triple(family: &IndexedFamily, marked: &WideSubcat) -> Result<AdequateTriple, FibrationError> {
    let all = WideSubcat::all(family.base().clone());
    Ok(match family.variance() {
        Variance::Covariant => validate_adequate_triple(marked.clone(), all)?,
        Variance::Contravariant => validate_adequate_triple(all, marked.clone())?,
    })
}

/// The side on which a family over `expected_triple` must be adjointable.
pub fn expected_side(variance: Variance) -> AdjointSide {
    match variance {
        Variance::Covariant => AdjointSide::Right,
        Variance::Contravariant => AdjointSide::Left,
    }
}

/// `(E, E_L^cart, E_R) -> (C, L, R)`, validated as a map of triples.
pub fn restricted_triple(p: &FunctorData, t: &TripleRef) -> Result<TripleMap, FibrationError> {
    let report = check_bc_fibration(p, t);
    if let Some(v) = report.verdicts.iter().find(|v| !v.holds) {
        return Err(FibrationError::NotBCFibration(v.condition.clone()));
    }
    let table = LiftTable::new(p);
    let e = p.source().clone();
    let left = WideSubcat::from_predicate(e.clone(), |_, m| t.left().contains(p.mor(m)) && table.cartesian[m.0])
        .map_err(|err| FibrationError::NotBCFibration(err.to_string()))?;
    let right = t.right().preimage(p);
    let source = validate_adequate_triple(left, right)?;
    Ok(TripleMap::new(Arc::new(source), t.clone(), p.clone())?)
}

/// Whether every cocartesian lift over R stays cocartesian for the
/// restriction `E_R -> C_R`.
pub fn cocartesian_in_restriction(p: &FunctorData, t: &AdequateTriple) -> Result<bool, FibrationError> {
    let e = p.source();
    let er = t.right().preimage(p);
    let (sub_e, _) = subcategory(e, er.mask());
    let (sub_c, _) = subcategory(p.target(), t.right().mask());
    let q = p.restrict(sub_e.clone(), sub_c)?;
    for m in er.members().filter(|&m| is_cocartesian(p, m)) {
        let here = sub_e.mor(e.morphism_name(m));
        if !is_cocartesian(&q, here) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A strictly natural transformation between families of the same variance
/// over the same base.
#[derive(Clone, Debug)]
pub struct FamilyMorphism {
    pub source: IndexedFamily,
    pub target: IndexedFamily,
    pub components: Vec<FunctorData>,
}

impl FamilyMorphism {
    pub fn new(
        source: IndexedFamily,
        target: IndexedFamily,
        components: Vec<FunctorData>,
    ) -> Result<Self, FibrationError> {
        let bad = |s: String| Err(FibrationError::MalformedFamily(s));
        let b = source.base().clone();
        if *b != **target.base() || source.variance() != target.variance() {
            return bad("families over different bases or of different variance".into());
        }
        if components.len() != b.object_count() {
            return bad("wrong number of components".into());
        }
        for x in b.objects() {
            let a = &components[x.0];
            if **a.source() != **source.fiber(x) || **a.target() != **target.fiber(x) {
                return bad(format!("component at `{}` has wrong endpoints", b.object_name(x)));
            }
        }
        let contra = source.variance() == Variance::Contravariant;
        for m in b.morphisms() {
            let (s, t) = (b.source(m), b.target(m));
            let (from, to) = if contra { (t, s) } else { (s, t) };
            let lhs = target.transport(m).after(&components[from.0])?;
            let rhs = components[to.0].after(source.transport(m))?;
            if lhs != rhs {
                return bad(format!("not natural at `{}`", b.morphism_name(m)));
            }
        }
        for f in b.morphisms() {
            for g in b.morphisms().filter(|&g| b.source(g) == b.target(f)) {
                let (start, end) = if contra {
                    (b.target(g), b.source(f))
                } else {
                    (b.source(f), b.target(g))
                };
                let (ms, mt) = (source.coherence(g, f), target.coherence(g, f));
                let (a0, a1) = (&components[start.0], &components[end.0]);
                for x in source.fiber(start).objects() {
                    if a1.mor(ms.component(x)) != mt.component(a0.ob(x)) {
                        return bad(format!(
                            "does not respect coherence at ({}, {})",
                            b.morphism_name(g),
                            b.morphism_name(f)
                        ));
                    }
                }
            }
        }
        Ok(FamilyMorphism {
            source,
            target,
            components,
        })
    }

    /// The naturality square at `m` with the transports horizontal and the
    /// components vertical.
    pub fn square(&self, m: Mor) -> Result<FunctorSquare, FibrationError> {
        let b = self.source.base();
        let (s, t) = (b.source(m), b.target(m));
        let (from, to) = match self.source.variance() {
            Variance::Covariant => (s, t),
            Variance::Contravariant => (t, s),
        };
        FunctorSquare::strict(
            self.source.transport(m).clone(),
            self.components[from.0].clone(),
            self.components[to.0].clone(),
            self.target.transport(m).clone(),
        )
        .map_err(|e| FibrationError::MalformedFamily(e.to_string()))
    }

    /// Whether every naturality square along a marked morphism is
    /// adjointable on the given side.
    pub fn is_adjointable(&self, marked: &WideSubcat, side: AdjointSide) -> Result<bool, FibrationError> {
        for m in marked.members() {
            match check_square_adjointable(&self.square(m)?, side) {
                Ok(bc) if bc.is_iso => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// The induced functor of total categories over the base.
    pub fn unstraighten(&self) -> Result<(Grothendieck, Grothendieck, FunctorData), FibrationError> {
        let (gs, gt) = (grothendieck(&self.source)?, grothendieck(&self.target)?);
        let b = self.source.base();
        let contra = self.source.variance() == Variance::Contravariant;
        let obs = gs
            .ob_keys
            .iter()
            .map(|&(c, x)| gt.object(c, self.components[c.0].ob(x)))
            .collect();
        let mut lookup = HashMap::new();
        for (i, k) in gt.mor_keys.iter().enumerate() {
            lookup.insert(*k, Mor(i));
        }
        let mut mors = Vec::new();
        for &(f, anchor, phi) in &gs.mor_keys {
            let (anchor_base, fiber_base) = if contra {
                (b.target(f), b.source(f))
            } else {
                (b.source(f), b.target(f))
            };
            let key = (
                f,
                self.components[anchor_base.0].ob(anchor),
                self.components[fiber_base.0].mor(phi),
            );
            mors.push(lookup[&key]);
        }
        let h = FunctorData::new(gs.total.clone(), gt.total.clone(), obs, mors)?;
        Ok((gs, gt, h))
    }
}

/// Whether `h: E -> E'` over the base sends cartesian morphisms over L and
/// cocartesian morphisms over R to morphisms of the same kind.
pub fn preserves_bc_lifts(h: &FunctorData, p: &FunctorData, q: &FunctorData, t: &AdequateTriple) -> bool {
    let (tp, tq) = (LiftTable::new(p), LiftTable::new(q));
    p.source().morphisms().all(|m| {
        let over = p.mor(m);
        let cart_ok = !(t.left().contains(over) && tp.cartesian[m.0]) || tq.cartesian[h.mor(m).0];
        let cocart_ok = !(t.right().contains(over) && tp.cocartesian[m.0]) || tq.cocartesian[h.mor(m).0];
        cart_ok && cocart_ok
    })
}
