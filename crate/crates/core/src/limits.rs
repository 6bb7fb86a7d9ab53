//! Pullbacks by exhaustive cone search, adjoints from extremal objects of
//! comma categories, and mates of squares of functors.

use serde::Serialize;
use thiserror::Error;

use crate::fincat::{FinCat, FunctorData, FunctorError, Mor, NatTransData, Ob};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LimitError {
    #[error("`{l}` and `{r}` do not share a target")]
    MismatchedCospan { l: String, r: String },
    #[error("no pullback of `{l}` along `{r}`")]
    NotFound { l: String, r: String },
    #[error("square does not commute")]
    NonCommuting,
    #[error("square and adjunctions do not fit together: {0}")]
    IncompatibleSquare(String),
    #[error("no {side} adjoint for {which}")]
    AdjointMissing { side: &'static str, which: String },
    #[error(transparent)]
    Functor(#[from] FunctorError),
}

/// A cone `(apex, to_x, to_y)` over a cospan `l: X -> Z <- Y: r`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cone {
    pub apex: Ob,
    /// `r': W -> X`, the leg opposite `r`.
    pub to_x: Mor,
    /// `l': W -> Y`, the leg opposite `l`.
    pub to_y: Mor,
}

/// The chosen (least) pullback of a cospan, with every other valid apex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackChoice {
    pub l: Mor,
    pub r: Mor,
    pub apex: Ob,
    /// `r': W -> X`.
    pub r_prime: Mor,
    /// `l': W -> Y`.
    pub l_prime: Mor,
    pub all: Vec<Cone>,
}

impl PullbackChoice {
    pub fn cone(&self) -> Cone {
        Cone {
            apex: self.apex,
            to_x: self.r_prime,
            to_y: self.l_prime,
        }
    }
}

/// All cones over `l: X -> Z <- Y: r`, in canonical order.
pub fn cones(c: &FinCat, l: Mor, r: Mor) -> Vec<Cone> {
    let (x, y) = (c.source(l), c.source(r));
    let mut out = Vec::new();
    for w in c.objects() {
        for &a in c.hom(w, x) {
            let la = c.comp(l, a);
            for &b in c.hom(w, y) {
                if c.comp(r, b) == la {
                    out.push(Cone {
                        apex: w,
                        to_x: a,
                        to_y: b,
                    });
                }
            }
        }
    }
    out
}

/// The morphisms `u: V -> W` through which `cone` factors via `through`.
pub fn factorizations(c: &FinCat, through: &Cone, cone: &Cone) -> Vec<Mor> {
    c.hom(cone.apex, through.apex)
        .iter()
        .copied()
        .filter(|&u| c.comp(through.to_x, u) == cone.to_x && c.comp(through.to_y, u) == cone.to_y)
        .collect()
}

/// The unique factorization of `cone` through `through`, if it exists.
pub fn factor_through(c: &FinCat, through: &Cone, cone: &Cone) -> Option<Mor> {
    match factorizations(c, through, cone).as_slice() {
        [u] => Some(*u),
        _ => None,
    }
}

fn universal_against(c: &FinCat, candidate: &Cone, all: &[Cone]) -> Option<Cone> {
    all.iter()
        .find(|cone| factorizations(c, candidate, cone).len() != 1)
        .copied()
}

pub fn pullback(c: &FinCat, l: Mor, r: Mor) -> Result<PullbackChoice, LimitError> {
    if c.target(l) != c.target(r) {
        return Err(LimitError::MismatchedCospan {
            l: c.morphism_name(l).to_owned(),
            r: c.morphism_name(r).to_owned(),
        });
    }
    let all_cones = cones(c, l, r);
    let universal: Vec<Cone> = all_cones
        .iter()
        .filter(|k| universal_against(c, k, &all_cones).is_none())
        .copied()
        .collect();
    let Some(first) = universal.first().copied() else {
        return Err(LimitError::NotFound {
            l: c.morphism_name(l).to_owned(),
            r: c.morphism_name(r).to_owned(),
        });
    };
    Ok(PullbackChoice {
        l,
        r,
        apex: first.apex,
        r_prime: first.to_x,
        l_prime: first.to_y,
        all: universal,
    })
}

/// Outcome of [`is_pullback_square`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareVerdict {
    pub is_pullback: bool,
    /// A cone that does not factor uniquely.
    pub counterexample: Option<Cone>,
}

/// Decides whether the commuting square `l ∘ r' = r ∘ l'` is a pullback.
pub fn is_pullback_square(c: &FinCat, r_prime: Mor, l_prime: Mor, l: Mor, r: Mor) -> Result<SquareVerdict, LimitError> {
    if c.source(r_prime) != c.source(l_prime)
        || c.target(r_prime) != c.source(l)
        || c.target(l_prime) != c.source(r)
        || c.target(l) != c.target(r)
        || c.comp(l, r_prime) != c.comp(r, l_prime)
    {
        return Err(LimitError::NonCommuting);
    }
    let candidate = Cone {
        apex: c.source(r_prime),
        to_x: r_prime,
        to_y: l_prime,
    };
    let bad = universal_against(c, &candidate, &cones(c, l, r));
    Ok(SquareVerdict {
        is_pullback: bad.is_none(),
        counterexample: bad,
    })
}

/// An adjunction `left ⊣ right` with unit `id ⇒ right ∘ left` and counit
/// `left ∘ right ⇒ id`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjunctionData {
    pub left: FunctorData,
    pub right: FunctorData,
    pub unit: NatTransData,
    pub counit: NatTransData,
}

impl AdjunctionData {
    pub fn identity(f: &FunctorData) -> Self {
        let id_src = FunctorData::identity(f.source().clone());
        let id_tgt = FunctorData::identity(f.target().clone());
        debug_assert!(f.is_identity());
        AdjunctionData {
            left: f.clone(),
            right: f.clone(),
            unit: NatTransData::identity(&id_src),
            counit: NatTransData::identity(&id_tgt),
        }
    }

    /// Checks both triangle identities.
    pub fn triangles_hold(&self) -> bool {
        let (a, b) = (self.left.source(), self.left.target());
        // ε_{F a} ∘ F(η_a) = id_{F a}
        let first = a.objects().all(|x| {
            let fx = self.left.ob(x);
            b.comp(self.counit.component(fx), self.left.mor(self.unit.component(x))) == b.identity(fx)
        });
        // G(ε_b) ∘ η_{G b} = id_{G b}
        let second = b.objects().all(|y| {
            let gy = self.right.ob(y);
            a.comp(self.right.mor(self.counit.component(y)), self.unit.component(gy)) == a.identity(gy)
        });
        first && second
    }

    /// `F2 F1 ⊣ G1 G2` from `F1 ⊣ G1` (this) and `F2 ⊣ G2` (`then`).
    pub fn then(&self, then: &AdjunctionData) -> Result<AdjunctionData, LimitError> {
        let left = then.left.after(&self.left)?;
        let right = self.right.after(&then.right)?;
        let a = self.left.source();
        let unit_comps: Vec<Mor> = a
            .objects()
            .map(|x| {
                let inner = self.unit.component(x);
                let mid = self.right.mor(then.unit.component(self.left.ob(x)));
                a.comp(mid, inner)
            })
            .collect();
        let c = then.left.target();
        let counit_comps: Vec<Mor> = c
            .objects()
            .map(|z| {
                let inner = then.left.mor(self.counit.component(then.right.ob(z)));
                c.comp(then.counit.component(z), inner)
            })
            .collect();
        let unit = NatTransData::new(FunctorData::identity(a.clone()), right.after(&left)?, unit_comps)?;
        let counit = NatTransData::new(left.after(&right)?, FunctorData::identity(c.clone()), counit_comps)?;
        Ok(AdjunctionData {
            left,
            right,
            unit,
            counit,
        })
    }
}

/// Left adjoint of `g: A -> B` from initial objects of the comma categories
/// `b ↓ g`, or `None` if one of them has no initial object.
pub fn find_left_adjoint(g: &FunctorData) -> Option<AdjunctionData> {
    let (a, b) = (g.source(), g.target());
    let mut f_ob = Vec::with_capacity(b.object_count());
    let mut unit = Vec::with_capacity(b.object_count());
    for y in b.objects() {
        // objects of y ↓ g: (x, u: y -> g x)
        let comma: Vec<(Ob, Mor)> = a
            .objects()
            .flat_map(|x| b.hom(y, g.ob(x)).iter().map(move |&u| (x, u)))
            .collect();
        let initial = comma.iter().copied().find(|&(x0, eta)| {
            comma
                .iter()
                .all(|&(x, u)| a.hom(x0, x).iter().filter(|&&al| b.comp(g.mor(al), eta) == u).count() == 1)
        })?;
        f_ob.push(initial.0);
        unit.push(initial.1);
    }
    let lift = |x0: Ob, eta: Mor, x: Ob, u: Mor| -> Mor {
        *a.hom(x0, x)
            .iter()
            .find(|&&al| b.comp(g.mor(al), eta) == u)
            .expect("initial object factors")
    };
    let f_mor: Vec<Mor> = b
        .morphisms()
        .map(|beta| {
            let (s, t) = (b.source(beta), b.target(beta));
            lift(f_ob[s.0], unit[s.0], f_ob[t.0], b.comp(unit[t.0], beta))
        })
        .collect();
    let left = FunctorData::new(b.clone(), a.clone(), f_ob.clone(), f_mor).ok()?;
    let counit: Vec<Mor> = a
        .objects()
        .map(|x| {
            let gx = g.ob(x);
            lift(f_ob[gx.0], unit[gx.0], x, b.identity(gx))
        })
        .collect();
    let unit = NatTransData::new(FunctorData::identity(b.clone()), g.after(&left).ok()?, unit).ok()?;
    let counit = NatTransData::new(left.after(g).ok()?, FunctorData::identity(a.clone()), counit).ok()?;
    let adj = AdjunctionData {
        left,
        right: g.clone(),
        unit,
        counit,
    };
    adj.triangles_hold().then_some(adj)
}

/// Right adjoint of `f: A -> B` from terminal objects of `f ↓ b`.
pub fn find_right_adjoint(f: &FunctorData) -> Option<AdjunctionData> {
    let (a, b) = (f.source(), f.target());
    let mut g_ob = Vec::with_capacity(b.object_count());
    let mut counit = Vec::with_capacity(b.object_count());
    for y in b.objects() {
        let comma: Vec<(Ob, Mor)> = a
            .objects()
            .flat_map(|x| b.hom(f.ob(x), y).iter().map(move |&v| (x, v)))
            .collect();
        let terminal = comma.iter().copied().find(|&(x0, eps)| {
            comma
                .iter()
                .all(|&(x, v)| a.hom(x, x0).iter().filter(|&&al| b.comp(eps, f.mor(al)) == v).count() == 1)
        })?;
        g_ob.push(terminal.0);
        counit.push(terminal.1);
    }
    let lift = |x0: Ob, eps: Mor, x: Ob, v: Mor| -> Mor {
        *a.hom(x, x0)
            .iter()
            .find(|&&al| b.comp(eps, f.mor(al)) == v)
            .expect("terminal object factors")
    };
    let g_mor: Vec<Mor> = b
        .morphisms()
        .map(|beta| {
            let (s, t) = (b.source(beta), b.target(beta));
            lift(g_ob[t.0], counit[t.0], g_ob[s.0], b.comp(beta, counit[s.0]))
        })
        .collect();
    let right = FunctorData::new(b.clone(), a.clone(), g_ob.clone(), g_mor).ok()?;
    let unit: Vec<Mor> = a
        .objects()
        .map(|x| {
            let fx = f.ob(x);
            lift(g_ob[fx.0], counit[fx.0], x, b.identity(fx))
        })
        .collect();
    let unit = NatTransData::new(FunctorData::identity(a.clone()), right.after(f).ok()?, unit).ok()?;
    let counit = NatTransData::new(f.after(&right).ok()?, FunctorData::identity(b.clone()), counit).ok()?;
    let adj = AdjunctionData {
        left: f.clone(),
        right,
        unit,
        counit,
    };
    adj.triangles_hold().then_some(adj)
}

/// A square of functors
///
/// ```text
///   A --top--> B
///   |          |
///  left      right
///   v          v
///   C --bottom-> D
/// ```
///
/// with a witness `right ∘ top ⇒ bottom ∘ left`.
#[derive(Clone, Debug)]
pub struct FunctorSquare {
    pub top: FunctorData,
    pub left: FunctorData,
    pub right: FunctorData,
    pub bottom: FunctorData,
    pub witness: NatTransData,
}

impl FunctorSquare {
    pub fn new(
        top: FunctorData,
        left: FunctorData,
        right: FunctorData,
        bottom: FunctorData,
        witness: NatTransData,
    ) -> Result<Self, LimitError> {
        let sq = FunctorSquare {
            top,
            left,
            right,
            bottom,
            witness,
        };
        sq.check()?;
        Ok(sq)
    }

    /// A strictly commuting square with identity witness.
    pub fn strict(
        top: FunctorData,
        left: FunctorData,
        right: FunctorData,
        bottom: FunctorData,
    ) -> Result<Self, LimitError> {
        let rt = right.after(&top)?;
        let witness = NatTransData::identity(&rt);
        Self::new(top, left, right, bottom, witness)
    }

    fn check(&self) -> Result<(), LimitError> {
        let rt = self.right.after(&self.top)?;
        let bl = self.bottom.after(&self.left)?;
        if *self.witness.source() != rt || *self.witness.target() != bl {
            return Err(LimitError::IncompatibleSquare("witness endpoints".into()));
        }
        Ok(())
    }

    /// The transposed square (top and left swapped); needs an invertible witness.
    pub fn transpose(&self) -> Result<Self, LimitError> {
        let inv = self
            .witness
            .inverse()
            .ok_or_else(|| LimitError::IncompatibleSquare("witness is not invertible".into()))?;
        Ok(FunctorSquare {
            top: self.left.clone(),
            left: self.top.clone(),
            right: self.bottom.clone(),
            bottom: self.right.clone(),
            witness: inv,
        })
    }
}

/// A computed mate with its componentwise invertibility verdict.
#[derive(Clone, Debug)]
pub struct BeckChevalleyMap {
    pub mate: NatTransData,
    pub is_iso: bool,
    /// Name of the first object with a non-invertible component.
    pub first_non_iso: Option<String>,
}

impl BeckChevalleyMap {
    fn from_mate(mate: NatTransData) -> Self {
        let bad = mate.first_non_iso();
        let name = bad.map(|o| mate.source().source().object_name(o).to_owned());
        BeckChevalleyMap {
            is_iso: bad.is_none(),
            first_non_iso: name,
            mate,
        }
    }
}

/// The mate `bottom_! ∘ right ⇒ left ∘ top_!` of a square, for left adjoints
/// `top_! ⊣ top` and `bottom_! ⊣ bottom`: unit of `top`, then the witness,
/// then the counit of `bottom`.
pub fn beck_chevalley_map(
    sq: &FunctorSquare,
    top_adj: &AdjunctionData,
    bottom_adj: &AdjunctionData,
) -> Result<BeckChevalleyMap, LimitError> {
    if top_adj.right != sq.top || bottom_adj.right != sq.bottom {
        return Err(LimitError::IncompatibleSquare(
            "adjunctions do not match the horizontal sides".into(),
        ));
    }
    let q = sq.top.target();
    let s = sq.left.target();
    let top_l = &top_adj.left;
    let bot_l = &bottom_adj.left;
    let comps: Vec<Mor> = q
        .objects()
        .map(|y| {
            let eta = top_adj.unit.component(y);
            let p = top_l.ob(y);
            let step1 = bot_l.mor(sq.right.mor(eta));
            let step2 = bot_l.mor(sq.witness.component(p));
            let step3 = bottom_adj.counit.component(sq.left.ob(p));
            s.comp_path(&[step3, step2, step1])
        })
        .collect();
    let source = bot_l.after(&sq.right)?;
    let target = sq.left.after(top_l)?;
    let mate = NatTransData::new(source, target, comps)?;
    Ok(BeckChevalleyMap::from_mate(mate))
}

/// The mate `left ∘ top_* ⇒ bottom_* ∘ right` for right adjoints
/// `top ⊣ top_*` and `bottom ⊣ bottom_*`; needs an invertible witness.
pub fn beck_chevalley_map_right(
    sq: &FunctorSquare,
    top_adj: &AdjunctionData,
    bottom_adj: &AdjunctionData,
) -> Result<BeckChevalleyMap, LimitError> {
    if top_adj.left != sq.top || bottom_adj.left != sq.bottom {
        return Err(LimitError::IncompatibleSquare(
            "adjunctions do not match the horizontal sides".into(),
        ));
    }
    let inv = sq
        .witness
        .inverse()
        .ok_or_else(|| LimitError::IncompatibleSquare("witness is not invertible".into()))?;
    let s = sq.left.target();
    let top_r = &top_adj.right;
    let bot_r = &bottom_adj.right;
    let comps: Vec<Mor> = sq
        .top
        .target()
        .objects()
        .map(|y| {
            let x = top_r.ob(y);
            let step1 = bottom_adj.unit.component(sq.left.ob(x));
            let step2 = bot_r.mor(inv.component(x));
            let step3 = bot_r.mor(sq.right.mor(top_adj.counit.component(y)));
            s.comp_path(&[step3, step2, step1])
        })
        .collect();
    let source = sq.left.after(top_r)?;
    let target = bot_r.after(&sq.right)?;
    let mate = NatTransData::new(source, target, comps)?;
    Ok(BeckChevalleyMap::from_mate(mate))
}

/// Which adjoints a square is tested against.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum AdjointSide {
    Left,
    Right,
}

/// Whether the square is adjointable along its horizontal sides: the required
/// adjoints exist and the mate is invertible.
pub fn check_square_adjointable(sq: &FunctorSquare, side: AdjointSide) -> Result<BeckChevalleyMap, LimitError> {
    let missing = |which: &str| LimitError::AdjointMissing {
        side: match side {
            AdjointSide::Left => "left",
            AdjointSide::Right => "right",
        },
        which: which.to_owned(),
    };
    match side {
        AdjointSide::Left => {
            let t = find_left_adjoint(&sq.top).ok_or_else(|| missing("top"))?;
            let b = find_left_adjoint(&sq.bottom).ok_or_else(|| missing("bottom"))?;
            beck_chevalley_map(sq, &t, &b)
        }
        AdjointSide::Right => {
            let t = find_right_adjoint(&sq.top).ok_or_else(|| missing("top"))?;
            let b = find_right_adjoint(&sq.bottom).ok_or_else(|| missing("bottom"))?;
            beck_chevalley_map_right(sq, &t, &b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::standard::{finset, powerset, pt, sq, two};

    #[test]
    fn meet_is_intersection() {
        let p = powerset(&["1", "2"]);
        let pb = pullback(&p, p.mor("{1}->{1,2}"), p.mor("{2}->{1,2}")).unwrap();
        assert_eq!(p.object_name(pb.apex), "{}");
    }

    #[test]
    fn square_pullback() {
        let c = sq();
        let pb = pullback(&c, c.mor("g"), c.mor("k")).unwrap();
        assert_eq!(c.object_name(pb.apex), "W");
        assert_eq!((pb.r_prime, pb.l_prime), (c.mor("f"), c.mor("h")));
        assert!(
            is_pullback_square(&c, c.mor("f"), c.mor("h"), c.mor("g"), c.mor("k"))
                .unwrap()
                .is_pullback
        );
    }

    #[test]
    fn kernel_pair_in_finset() {
        let c = finset(4);
        let l = c.mor("2->1:00");
        let pb = pullback(&c, l, l).unwrap();
        assert_eq!(c.object_name(pb.apex), "4");
    }

    #[test]
    fn adjoints_of_two_to_pt() {
        let (t, p) = (two().shared(), pt().shared());
        let bang = FunctorData::constant(t.clone(), p, Ob(0));
        let r = find_right_adjoint(&bang).unwrap();
        assert_eq!(t.object_name(r.right.ob(Ob(0))), "1");
        let l = find_left_adjoint(&bang).unwrap();
        assert_eq!(t.object_name(l.left.ob(Ob(0))), "0");
    }

    #[test]
    fn identity_mate_is_identity() {
        let c = sq().shared();
        let id = FunctorData::identity(c);
        let s = FunctorSquare::strict(id.clone(), id.clone(), id.clone(), id.clone()).unwrap();
        let adj = AdjunctionData::identity(&id);
        let m = beck_chevalley_map(&s, &adj, &adj).unwrap();
        assert!(m.is_iso && m.mate.is_identity());
        let m = beck_chevalley_map_right(&s, &adj, &adj).unwrap();
        assert!(m.mate.is_identity());
    }
}
