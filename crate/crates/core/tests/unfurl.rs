use spanforge::catalog;
use spanforge::fibrations::{IndexedFamily, Variance};
use spanforge::fincat::standard::{pt, sq, two};
use spanforge::fincat::{CatRef, FinCat, Ob, WideSubcat};
use spanforge::limits::find_right_adjoint;
use spanforge::spans::SpanHom;
use spanforge::unfurl::*;

fn all(fam: &IndexedFamily) -> WideSubcat {
    WideSubcat::all(fam.base().clone())
}

#[test]
fn f1_covariant_package() {
    let fam = catalog::f1();
    let pkg = unfurl_covariant(&fam, &all(&fam)).unwrap();
    assert!(pkg.certified);
    let ext = verify_extension(&pkg).unwrap();
    assert!(ext.holds());
}

#[test]
fn f0_is_rejected() {
    let fam = catalog::f0();
    let err = unfurl_covariant(&fam, &all(&fam)).unwrap_err();
    assert!(matches!(err, UnfurlError::NotAdjointable(_)), "{err}");
}

#[test]
fn sq_contravariant_package() {
    let fam = catalog::sq_self_indexing();
    let pkg = unfurl_contravariant(&fam, &all(&fam)).unwrap();
    assert!(pkg.certified);
    let ext = verify_extension(&pkg).unwrap();
    assert!(ext.holds());
}

#[test]
fn galois_co_package() {
    let fam = catalog::galois();
    let pkg = unfurl_co(&fam, &all(&fam)).unwrap();
    assert!(pkg.certified);
    let d = check_duality(&pkg).unwrap();
    assert!(d.agrees);
}

#[test]
fn missing_left_adjoint_is_named() {
    let fam = catalog::no_left_adjoint();
    let err = unfurl_co(&fam, &all(&fam)).unwrap_err();
    assert_eq!(err, UnfurlError::LeftAdjointMissing("f".into()));
}

fn span(c: &FinCat, left: &str, right: &str) -> SpanHom {
    let (l, r) = (c.mor(left), c.mor(right));
    SpanHom {
        x: c.target(l),
        y: c.target(r),
        apex: c.source(l),
        left: l,
        right: r,
    }
}

#[test]
fn constant_point_unfurls_to_an_isomorphism() {
    let fam = catalog::constant(two().shared(), Variance::Covariant, pt().shared());
    let pkg = unfurl_covariant(&fam, &all(&fam)).unwrap();
    assert!(pkg.certified);
    assert!(pkg.span.on_classes.is_isomorphism());
    let ext = verify_extension(&pkg).unwrap();
    assert_eq!(ext.restriction_iso, Some(true));
}

#[test]
fn forward_span_restricts_to_the_family() {
    let fam = catalog::f1();
    let pkg = unfurl_covariant(&fam, &all(&fam)).unwrap();
    let b = fam.base();
    let t = transport_along_span(&pkg, &span(b, "id_0", "f")).unwrap();
    assert_eq!(&t, fam.transport(b.mor("f")));
    let id = transport_along_span(&pkg, &span(b, "id_1", "id_1")).unwrap();
    assert!(id.is_identity());
}

#[test]
fn f0_fails_only_on_squares() {
    // the transport has a right adjoint picking the terminal object, but the
    // kernel pair square of f is not adjointable
    let fam = catalog::f0();
    let f = fam.base().mor("f");
    let adj = find_right_adjoint(fam.transport(f)).unwrap();
    assert_eq!(adj.right.ob(Ob(0)), Ob(1));
    assert!(adj.triangles_hold());
    match unfurl_covariant(&fam, &all(&fam)) {
        Err(UnfurlError::NotAdjointable(why)) => assert!(why.contains("mate"), "{why}"),
        other => panic!("{other:?}"),
    }
}

/// Meet in a thin category, by enumeration.
fn meet(c: &FinCat, a: Ob, b: Ob) -> Ob {
    let below = |z: Ob, x: Ob| !c.hom(z, x).is_empty();
    let lower: Vec<Ob> = c.objects().filter(|&z| below(z, a) && below(z, b)).collect();
    *lower.iter().find(|&&z| lower.iter().all(|&w| below(w, z))).unwrap()
}

#[test]
fn sq_transport_is_pullback_then_postcompose() {
    let c: CatRef = sq().shared();
    let fam = catalog::sq_self_indexing();
    let pkg = unfurl_contravariant(&fam, &all(&fam)).unwrap();
    let s = span(&c, "f", "h");
    let t = transport_along_span(&pkg, &s).unwrap();
    let (over_x, over_y) = (fam.fiber(c.ob("X")), fam.fiber(c.ob("Y")));
    for m in over_x.objects() {
        let a = c.source(c.mor(over_x.object_name(m)));
        let z = meet(&c, a, c.ob("W"));
        let expected = c.hom(z, c.ob("Y"))[0];
        assert_eq!(over_y.object_name(t.ob(m)), c.morphism_name(expected));
    }
}

fn subsets(name: &str) -> Vec<String> {
    name.trim_matches(|ch| ch == '{' || ch == '}')
        .split(',')
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

#[test]
fn galois_transport_restricts_then_extends() {
    // along X <- X∧Y -> Y a subset S of X goes to S ∩ Y, viewed in Y
    let fam = catalog::galois();
    let pkg = unfurl_co(&fam, &all(&fam)).unwrap();
    let b = fam.base();
    let s = span(b, "{1}->{1,2}", "id_{1}");
    let t = transport_along_span(&pkg, &s).unwrap();
    let (src, tgt) = (fam.fiber(s.x), fam.fiber(s.y));
    for o in src.objects() {
        let keep: Vec<String> = subsets(src.object_name(o)).into_iter().filter(|e| e == "1").collect();
        assert_eq!(tgt.object_name(t.ob(o)), format!("{{{}}}", keep.join(",")));
    }
    let s = span(b, "{}->{1}", "{}->{2}");
    let t = transport_along_span(&pkg, &s).unwrap();
    for o in fam.fiber(s.x).objects() {
        assert_eq!(fam.fiber(s.y).object_name(t.ob(o)), "{}");
    }
    let report = check_co_transports(&pkg).unwrap();
    assert!(report.failures.is_empty());
    assert_eq!(report.checked, 25);
}

#[test]
fn co_package_has_no_restriction_check() {
    let fam = catalog::galois();
    let pkg = unfurl_co(&fam, &all(&fam)).unwrap();
    let ext = verify_extension(&pkg).unwrap();
    assert_eq!(ext.restriction_iso, None);
    assert!(ext.holds());
}
