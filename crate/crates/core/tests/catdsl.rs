use std::time::Instant;

use spanforge::catalog;
use spanforge::catdsl::*;
use spanforge::fincat::standard::{build_standard, sq};
use spanforge::fincat::{FinCat, FunctorData};

const SQ: &str = "category sq { objects W X Y Z  gen f: W->X  gen g: X->Z  gen h: W->Y  gen k: Y->Z  rel g.f = k.h }";

/// Same objects, morphisms, endpoints, identities and composites, by name.
fn same_by_names(a: &FinCat, b: &FinCat) -> bool {
    if a.object_count() != b.object_count() || a.morphism_count() != b.morphism_count() {
        return false;
    }
    let on = |c: &FinCat, m| {
        (
            c.object_name(c.source(m)).to_owned(),
            c.object_name(c.target(m)).to_owned(),
            c.is_identity(m),
        )
    };
    for m in a.morphisms() {
        let Some(n) = b.morphism(a.morphism_name(m)) else {
            return false;
        };
        if on(a, m) != on(b, n) {
            return false;
        }
    }
    for f in a.morphisms() {
        for g in a.morphisms().filter(|&g| a.source(g) == a.target(f)) {
            let h = b.comp(b.mor(a.morphism_name(g)), b.mor(a.morphism_name(f)));
            if b.morphism_name(h) != a.morphism_name(a.comp(g, f)) {
                return false;
            }
        }
    }
    true
}

fn corpus() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for spec in [
        "pt",
        "two",
        "sq",
        "walking_iso",
        "cospan",
        "powerset(1,2)",
        "finset(3)",
        "chain(4)",
        "cyclic(3)",
    ] {
        out.push((spec.to_owned(), write_category("C", &build_standard(spec).unwrap())));
    }
    for (name, fam) in catalog::families() {
        out.push((name.to_owned(), write_family(name, &fam)));
    }
    for (name, t) in catalog::triples().unwrap() {
        out.push((name.to_owned(), write_triple(name, &t)));
    }
    out.push(("sq gen".into(), SQ.into()));
    out.push((
        "tasks".into(),
        format!(
            "{}\n{SQ}\ntriple T on sq {{ left: all; right: all }}\n\
             task a span-adjunction {{ triple: T; morphism: f }}\n\
             task b unfurl-cov {{ family: f1 }}\n\
             task c bc-fibration {{ family: f1; marked: isos }}\n",
            write_family("f1", &catalog::f1())
        ),
    ));
    out
}

#[test]
fn pt_example() {
    let ws = parse("category pt { objects A }").unwrap();
    let c = &ws.categories["pt"];
    assert_eq!((c.object_count(), c.morphism_count()), (1, 1));
    let canonical = serialize(&ws);
    assert_eq!(serialize(&parse(&canonical).unwrap()), canonical);
}

#[test]
fn sq_closes_to_the_fixture() {
    let ws = parse(SQ).unwrap();
    let c = ws.categories["sq"].clone();
    // one composite W -> Z beyond the generators and identities
    assert_eq!(c.morphism_count(), 9);
    assert_eq!(c.comp(c.mor("g"), c.mor("f")), c.comp(c.mor("k"), c.mor("h")));
    let fixture = sq().shared();
    let objects = [("W", "W"), ("X", "X"), ("Y", "Y"), ("Z", "Z")];
    let morphisms = [("f", "f"), ("g", "g"), ("h", "h"), ("k", "k"), ("g.f", "d")];
    let iso = FunctorData::from_names(c, fixture, &objects, &morphisms).unwrap();
    assert!(iso.is_isomorphism());
}

#[test]
fn undeclared_relation_name() {
    let text = "category c { objects A B  gen f: A->B  gen g: B->B  rel g.f = q }";
    let err = parse(text).unwrap_err();
    let [DslError::UnknownReference { name, span, .. }] = &err.0[..] else {
        panic!("{err}")
    };
    assert_eq!(name, "q");
    assert_eq!(&text[span.start..span.end], "rel g.f = q");
}

#[test]
fn corpus_round_trips() {
    let start = Instant::now();
    for (label, text) in corpus() {
        let ws = parse(&text).unwrap_or_else(|e| panic!("{label}: {e}"));
        let s = serialize(&ws);
        let again = parse(&s).unwrap_or_else(|e| panic!("{label}: {e}\n{s}"));
        assert!(again == ws, "{label}");
        assert_eq!(serialize(&again), s, "{label}");
        for (name, c) in &ws.categories {
            assert!(same_by_names(c, &again.categories[name]), "{label}: {name}");
        }
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn written_categories_match_their_source() {
    for spec in ["sq", "walking_iso", "powerset(1,2)", "finset(3)", "cyclic(4)"] {
        let c = build_standard(spec).unwrap();
        let ws = parse(&write_category("C", &c)).unwrap();
        assert!(same_by_names(&c, &ws.categories["C"]), "{spec}");
    }
}

#[test]
fn written_families_match_their_source() {
    for (name, fam) in catalog::families() {
        let ws = parse(&write_family(name, &fam)).unwrap();
        let back = &ws.families[name];
        assert_eq!(back.is_strict(), fam.is_strict(), "{name}");
        assert_eq!(back.describe(), fam.describe(), "{name}");
        assert_eq!(back.nontrivial_coherence(), fam.nontrivial_coherence(), "{name}");
    }
}

fn permutations<T: Clone>(v: &[T]) -> Vec<Vec<T>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

#[test]
fn generator_order_does_not_matter() {
    let gens = [
        "gen f: W->X",
        "gen g: X->Z",
        "gen h: W->Y",
        "gen k: Y->Z",
        "gen e: Z->Z",
    ];
    let mut seen = None;
    for p in permutations(&gens) {
        let text = format!(
            "category c {{ objects Z Y X W  {}  rel e.e = id_Z  rel g.f = k.h }}",
            p.join("  ")
        );
        let ws = parse(&text).unwrap();
        let out = (serialize(&ws), write_category("c", &ws.categories["c"]));
        match &seen {
            None => seen = Some(out),
            Some(s) => assert_eq!(*s, out),
        }
    }
}

#[test]
fn budget_is_enforced() {
    let free = "category c { objects A  gen e: A->A }";
    let err = parse_with_budget(free, 50).unwrap_err();
    assert!(matches!(
        err.0[..],
        [DslError::ClosureBudgetExceeded { budget: 50, .. }]
    ));
    let cyclic = parse("category c { objects A  gen e: A->A  rel e.e.e = id_A }").unwrap();
    assert_eq!(cyclic.categories["c"].morphism_count(), 3);
}

#[test]
fn validation_codes() {
    let code = |text: &str| match &parse(text).unwrap_err().0[0] {
        DslError::ValidationError { code, .. } => *code,
        e => panic!("{e}"),
    };
    let nonassoc = "category c table { objects A  mor e: A->A  mor u: A->A  comp e.e = u  comp u.e = e  comp e.u = id_A  comp u.u = u }";
    assert_eq!(code(nonassoc), "NonAssociative");
    assert_eq!(
        code("category c = cospan\ntriple T on c { left: all; right: all }"),
        "MissingPullback"
    );
    assert_eq!(code("category c = finset(99)"), "ParamOutOfRange");
    assert_eq!(code("category c = nope"), "UnknownFixture");
    assert_eq!(
        code("category c { objects A B  gen f: A->B  rel f = id_A }"),
        "IllTypedRelation"
    );
}

#[test]
fn diagnostics_point_inside_the_text() {
    let bad = [
        "category",
        "category c { objects A  gen f: A->Q }",
        "category c { objects A  gen f A->A }",
        "category c = two\nfunctor F: c -> d { }",
        "category c = two\nwide w on c { nothing }",
        "category c = cospan\ntriple T on c { left: all; right: all }",
        "category c = two\ntask t frobnicate { }",
        "category c = two\ntriple T on c { left: all; right: all }\ntask t span-adjunction { triple: T }",
        "category \"unterminated",
        "category c { objects A  gen e: A->A }",
        "category c = two\ncategory c = pt",
        "category c table { objects A  mor e: A->A  comp e.e = e  comp e.e = id_A }",
        "\n\n   family F covariant over nowhere { }",
        "category c = two  @",
    ];
    for text in bad {
        let Err(d) = parse_with_budget(text, 100) else {
            panic!("accepted: {text}")
        };
        assert!(!d.0.is_empty());
        for e in d.0 {
            let s = e.span();
            assert!(s.start <= s.end && s.end <= text.len(), "{text}: {e}");
            let before = &text[..s.start];
            assert_eq!(s.line, before.matches('\n').count() + 1, "{text}: {e}");
            let col = before.rsplit('\n').next().unwrap().chars().count() + 1;
            assert_eq!(s.column, col, "{text}: {e}");
        }
    }
}

#[test]
fn export_is_stable() {
    let text = corpus().pop().unwrap().1;
    let text = &text;
    let a = serde_json::to_string(&export_json(&parse(text).unwrap())).unwrap();
    let b = serde_json::to_string(&export_json(&parse(text).unwrap())).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["tasks"].as_array().unwrap().len(), 3);
}

#[test]
fn diagnostics_golden() {
    let cases = [
        ("category c { objects A B\n  gen f: A->B\n  rel g.f = q }\n", "3:3: unknown generator `g`"),
        ("category c = two\nfunctor F: c -> d { }\n", "2:17: unknown category `d`"),
        (
            "category c = cospan\ntriple T on c { left: all; right: all }\n",
            "2:8: MissingPullback: no pullback of `u` along `v`",
        ),
        ("category c {\n  objects A\n  gen f A->A\n}\n", "3:9: syntax error: expected `:`"),
        ("category c = pt\ncategory c = two\n", "2:10: DuplicateId: `c` is declared twice"),
    ];
    for (text, expected) in cases {
        assert_eq!(parse(text).unwrap_err().to_string(), expected);
    }
}
