use spanforge::fibrations::*;
use spanforge::fincat::standard::{pt, sq, two, walking_iso};
use spanforge::fincat::{check_equivalence, CatRef, FunctorData, Ob};

fn f0() -> IndexedFamily {
    let (b, t, p) = (two().shared(), two().shared(), pt().shared());
    let f = FunctorData::constant(t.clone(), p.clone(), Ob(0));
    IndexedFamily::from_named(b, Variance::Covariant, &[("0", t), ("1", p)], &[("f", f)]).unwrap()
}

fn pair_count(fam: &IndexedFamily) -> usize {
    let b = fam.base();
    let mut n = 0;
    for f in b.morphisms() {
        let (fs, ft, tr) = (fam.fiber(b.source(f)), fam.fiber(b.target(f)), fam.transport(f));
        for x in fs.objects() {
            for y in ft.objects() {
                n += ft.hom(tr.ob(x), y).len();
            }
        }
    }
    n
}

#[test]
fn f0_total_category_counts() {
    let fam = f0();
    let g = grothendieck_cocartesian(&fam).unwrap();
    assert_eq!(g.total.object_count(), 3);
    assert_eq!(g.total.morphism_count(), pair_count(&fam));
    assert_eq!(g.total.morphism_count(), 6);
    let lift = g
        .cleavage
        .lift(g.projection.target().mor("f"), g.object(Ob(0), Ob(0)))
        .unwrap();
    assert!(is_cocartesian(&g.projection, lift));
    let report = classify_fibration(&g.projection);
    assert!(report.verdict("cocartesian").unwrap().holds);
    assert!(report.revalidate(&g.projection));
}

#[test]
fn fiberwise_non_iso_is_not_cartesian() {
    let g = grothendieck_cocartesian(&f0()).unwrap();
    let e = &g.total;
    let m = e.mor("id_0|f@0");
    assert!(!is_cartesian(&g.projection, m));
    assert!(!is_cocartesian(&g.projection, m));
}

#[test]
fn two_to_point_is_not_discrete() {
    let p = FunctorData::constant(two().shared(), pt().shared(), Ob(0));
    let r = classify_fibration(&p);
    assert!(r.verdict("cartesian").unwrap().holds);
    assert!(r.verdict("cocartesian").unwrap().holds);
    assert!(!r.verdict("right discrete").unwrap().holds);
    assert!(!r.verdict("left discrete").unwrap().holds);
}

#[test]
fn identity_is_everything() {
    let p = FunctorData::identity(sq().shared());
    assert!(classify_fibration(&p).holds());
}

#[test]
fn round_trips() {
    assert!(round_trip(&f0()).is_ok());
    let c: CatRef = sq().shared();
    assert!(round_trip(&self_indexing(&c).unwrap().family).is_ok());
    let w: CatRef = walking_iso().shared();
    let si = self_indexing(&w).unwrap();
    assert!(!si.family.is_strict());
    assert!(round_trip(&si.family).is_ok());
}

#[test]
fn sq_self_indexing_is_the_arrow_category() {
    let c: CatRef = sq().shared();
    let si = self_indexing(&c).unwrap();
    let g = grothendieck_cartesian(&si.family).unwrap();
    let (phi, cod) = arrow_comparison(&si, &g).unwrap();
    assert!(phi.is_isomorphism());
    assert_eq!(cod.after(&phi).unwrap(), g.projection);
    assert!(check_equivalence(&phi).is_equivalence());
    let r = classify_fibration(&cod);
    assert!(r.verdict("cartesian").unwrap().holds);
}

#[test]
fn reversed_cleavage_agrees_up_to_iso() {
    let w: CatRef = walking_iso().shared();
    let g = grothendieck_cartesian(&self_indexing(&w).unwrap().family).unwrap();
    let least = Cleavage::choose(&g.projection, LiftKind::Cartesian, LiftOrder::Least).unwrap();
    let most = Cleavage::choose(&g.projection, LiftKind::Cartesian, LiftOrder::Greatest).unwrap();
    assert_eq!(
        compare_cleavages(&g.projection, &least, &most).unwrap().len(),
        w.morphism_count()
    );
}

fn f1() -> IndexedFamily {
    let (b, t, p) = (two().shared(), two().shared(), pt().shared());
    let incl = FunctorData::constant(p.clone(), t.clone(), Ob(0));
    IndexedFamily::from_named(b, Variance::Covariant, &[("0", p), ("1", t)], &[("f", incl)]).unwrap()
}

fn agree(fam: &IndexedFamily) -> (bool, bool) {
    use spanforge::fincat::WideSubcat;
    let marked = WideSubcat::all(fam.base().clone());
    let adj = check_adjointable(fam, &marked, expected_side(fam.variance())).unwrap();
    let t = expected_triple(fam, &marked).unwrap();
    let g = grothendieck(fam).unwrap();
    let bc = check_bc_fibration(&g.projection, &t);
    assert!(bc.revalidate(&g.projection));
    (adj.holds, bc.holds())
}

#[test]
fn bc_agrees_with_adjointability() {
    let (a, b) = agree(&f0());
    assert!(!a, "F0 is not right adjointable");
    assert_eq!(a, b);
    let (a, b) = agree(&f1());
    assert!(a);
    assert_eq!(a, b);
    let c: CatRef = sq().shared();
    let (a, b) = agree(&self_indexing(&c).unwrap().family);
    assert_eq!(a, b);
    let w: CatRef = walking_iso().shared();
    let (a, b) = agree(&self_indexing(&w).unwrap().family);
    assert!(a);
    assert_eq!(a, b);
}

#[test]
fn broken_transport_fails_both_checks() {
    let (a, b) = agree(&spanforge::catalog::broken());
    assert!(!a && !b);
}

#[test]
fn transformations_match_bc_morphisms() {
    use spanforge::fincat::WideSubcat;
    use spanforge::limits::AdjointSide;
    for (name, alpha, expected) in spanforge::catalog::transformations().unwrap() {
        let marked = WideSubcat::all(alpha.source.base().clone());
        let adjointable = alpha.is_adjointable(&marked, AdjointSide::Right).unwrap();
        let t = expected_triple(&alpha.source, &marked).unwrap();
        let (gs, gt, h) = alpha.unstraighten().unwrap();
        let preserves = preserves_bc_lifts(&h, &gs.projection, &gt.projection, &t);
        assert_eq!(adjointable, expected, "{name}");
        assert_eq!(preserves, adjointable, "{name}");
    }
}
