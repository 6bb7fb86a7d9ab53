use std::sync::Arc;
use std::time::{Duration, Instant};

use spanforge::catalog;
use spanforge::fincat::standard::{cospan, finset, finset_injective, powerset};
use spanforge::fincat::{CatRef, WideSubcat};
use spanforge::spans::*;

fn all_all(c: CatRef) -> Result<AdequateTriple, SpanError> {
    validate_adequate_triple(WideSubcat::all(c.clone()), WideSubcat::all(c))
}

fn finset3_inj() -> AdequateTriple {
    let c: CatRef = Arc::new(finset(3));
    let inj = WideSubcat::from_predicate(c.clone(), finset_injective).unwrap();
    validate_adequate_triple(inj, WideSubcat::all(c)).unwrap()
}

#[test]
fn bundled_triples_validate_quickly() {
    let start = Instant::now();
    let t = all_all(powerset(&["1", "2"]).shared()).unwrap();
    assert!(t.is_certified());
    assert!(start.elapsed() < Duration::from_secs(1));
    let start = Instant::now();
    let t = finset3_inj();
    assert!(t.is_certified());
    assert!(t.certificate_len() > 0);
    assert!(start.elapsed() < Duration::from_secs(1));
}

#[test]
fn walking_cospan_has_no_pullback() {
    let err = all_all(cospan().shared()).unwrap_err();
    assert!(matches!(err, SpanError::MissingPullback { .. }), "{err}");
}

#[test]
fn finset3_coherence_on_small_objects() {
    let t = finset3_inj();
    let c = t.carrier().clone();
    let small: Vec<_> = c.objects().filter(|&o| c.object_name(o) != "3").collect();
    let mut sample = Vec::new();
    for &x in &small {
        for &y in &small {
            sample.extend(t.spans_between(x, y));
        }
    }
    let start = Instant::now();
    let report = check_coherence(&t, &sample, true).unwrap();
    assert!(report.passed(), "{:?}", report.failure);
    assert!(report.pentagons > 0);
    assert!(start.elapsed() < Duration::from_secs(30), "{:?}", start.elapsed());
    // the class-level category is validated, hence strictly associative
    let h = homotopy_span_category(&t).unwrap();
    assert!(h.cat.morphism_count() > 0);
}

#[test]
fn span_adjunctions_on_bundled_triples() {
    for (name, t) in catalog::triples().unwrap() {
        for l in t.left().members() {
            let adj = span_adjunction(&t, l).unwrap();
            assert!(
                adj.first_triangle && adj.second_triangle,
                "{name}: {}",
                t.carrier().morphism_name(l)
            );
        }
    }
}

#[test]
fn non_monic_adjunction_in_finset4() {
    let c: CatRef = finset(4).shared();
    let t = AdequateTriple::local(WideSubcat::all(c.clone()), WideSubcat::all(c.clone())).unwrap();
    let l = c.mor("2->1:00");
    let adj = span_adjunction(&t, l).unwrap();
    assert!(adj.first_triangle && adj.second_triangle);
    // kernel pair of 2 -> 1 has four elements
    assert_eq!(c.object_name(adj.kernel_pair), "4");
}

#[test]
fn triple_op_round_trips() {
    for (name, t) in catalog::triples().unwrap() {
        let op = triple_op(&t).unwrap();
        assert!(op.is_isomorphism, "{name}");
        let back = triple_op(&op.triple).unwrap();
        assert!(
            back.triple.left() == t.left() && back.triple.right() == t.right(),
            "{name}"
        );
    }
}
