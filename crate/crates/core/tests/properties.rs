use proptest::prelude::*;
use spanforge::catalog;
use spanforge::catdsl::{parse, parse_with_budget, serialize, write_category};
use spanforge::fibrations::{classify_fibration, grothendieck, Variance};
use spanforge::fincat::standard::build_standard;
use spanforge::fincat::{opposite, CatRef, FinCat};

const FIXTURES: &[&str] = &[
    "pt",
    "two",
    "sq",
    "walking_iso",
    "cospan",
    "powerset(1,2)",
    "chain(3)",
    "cyclic(3)",
    "finset(2)",
];

/// Generators `(name, i, j)` on objects `O0..On` with `i < j`, so the free
/// category is finite.
fn dag() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..5).prop_flat_map(|n| {
        let edge = (0..n - 1).prop_flat_map(move |i| (Just(i), i + 1..n));
        (Just(n), prop::collection::vec(edge, 0..6))
    })
}

fn dag_text(n: usize, edges: &[(usize, usize)], order: &[usize], rels: &str) -> String {
    let objects: Vec<String> = (0..n).map(|i| format!("O{i}")).collect();
    let gens: Vec<String> = order
        .iter()
        .map(|&e| format!("gen g{e}: O{} -> O{}", edges[e].0, edges[e].1))
        .collect();
    format!(
        "category c {{ objects {}  {}  {rels} }}",
        objects.join(" "),
        gens.join("  ")
    )
}

/// Number of paths between every pair, counted by dynamic programming.
fn path_count(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut total = 0;
    for s in 0..n {
        let mut ways = vec![0usize; n];
        ways[s] = 1;
        for v in s..n {
            for &(a, b) in edges {
                if a == v {
                    ways[b] += ways[v];
                }
            }
        }
        total += ways.iter().sum::<usize>();
    }
    total
}

fn check_laws(c: &FinCat) {
    for f in c.morphisms() {
        assert_eq!(c.comp(f, c.identity(c.source(f))), f);
        assert_eq!(c.comp(c.identity(c.target(f)), f), f);
        for g in c.morphisms().filter(|&g| c.source(g) == c.target(f)) {
            for h in c.morphisms().filter(|&h| c.source(h) == c.target(g)) {
                assert_eq!(c.comp(h, c.comp(g, f)), c.comp(c.comp(h, g), f));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_closure_counts_paths((n, edges) in dag(), seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..edges.len()).collect();
        let ws = parse(&dag_text(n, &edges, &order, "")).unwrap();
        let c = &ws.categories["c"];
        prop_assert_eq!(c.morphism_count(), path_count(n, &edges));
        check_laws(c);
        // a pseudo-random reordering of the generator lines
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let again = parse(&dag_text(n, &edges, &order, "")).unwrap();
        prop_assert_eq!(serialize(&again), serialize(&ws));
        prop_assert_eq!(write_category("c", &again.categories["c"]), write_category("c", c));
    }

    #[test]
    fn identifying_parallel_generators((n, edges) in dag(), pick in any::<prop::sample::Index>()) {
        let parallel: Vec<(usize, usize)> = (0..edges.len())
            .flat_map(|a| (0..edges.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| a < b && edges[a] == edges[b])
            .collect();
        prop_assume!(!parallel.is_empty());
        let (a, b) = *pick.get(&parallel);
        let order: Vec<usize> = (0..edges.len()).collect();
        let ws = parse(&dag_text(n, &edges, &order, &format!("rel g{b} = g{a}"))).unwrap();
        let c = &ws.categories["c"];
        check_laws(c);
        // same as dropping the larger generator
        let mut fewer = edges.clone();
        fewer.remove(b);
        prop_assert_eq!(c.morphism_count(), path_count(n, &fewer));
        let (ga, gb) = (format!("g{}", a), format!("g{}", b));
        prop_assert!(c.morphism(&ga).is_some());
        prop_assert!(c.morphism(&gb).is_none());
    }

    #[test]
    fn monogenic_monoids(n in 1usize..9, m in 0usize..8) {
        prop_assume!(m < n);
        let path = |k: usize| if k == 0 { "id_A".to_owned() } else { vec!["e"; k].join(".") };
        let text = format!("category c {{ objects A  gen e: A->A  rel {} = {} }}", path(n), path(m));
        let ws = parse(&text).unwrap();
        // <e | e^n = e^m> has exactly n elements
        prop_assert_eq!(ws.categories["c"].morphism_count(), n);
        check_laws(&ws.categories["c"]);
    }

    #[test]
    fn parse_serialize_parse(ix in 0..FIXTURES.len()) {
        let c = build_standard(FIXTURES[ix]).unwrap();
        let text = write_category("C", &c);
        let ws = parse(&text).unwrap();
        let s = serialize(&ws);
        let again = parse(&s).unwrap();
        prop_assert!(again == ws);
        prop_assert_eq!(serialize(&again), s);
    }

    #[test]
    fn mutated_inputs_keep_spans_in_bounds(ix in 0..FIXTURES.len(), at in any::<prop::sample::Index>(), junk in "[a-z{}:;.=\"@ -]{0,3}", cut in 0usize..4) {
        let text = write_category("C", &build_standard(FIXTURES[ix]).unwrap());
        let mut chars: Vec<char> = text.chars().collect();
        let i = at.index(chars.len());
        let end = (i + cut).min(chars.len());
        chars.splice(i..end, junk.chars());
        let text: String = chars.into_iter().collect();
        if let Err(d) = parse_with_budget(&text, 200) {
            for e in d.0 {
                let s = e.span();
                prop_assert!(s.start <= s.end && s.end <= text.len() && text.is_char_boundary(s.start));
                prop_assert_eq!(s.line, text[..s.start].matches('\n').count() + 1);
            }
        }
    }

    #[test]
    fn fixture_laws_and_double_opposite(ix in 0..FIXTURES.len()) {
        let c = build_standard(FIXTURES[ix]).unwrap();
        check_laws(&c);
        let oo = opposite(&opposite(&c));
        prop_assert_eq!(write_category("C", &oo), write_category("C", &c));
    }

    #[test]
    fn constant_families_are_products(b in 0..FIXTURES.len(), f in 0..FIXTURES.len(), cov in any::<bool>()) {
        let base: CatRef = build_standard(FIXTURES[b]).unwrap().shared();
        let fiber: CatRef = build_standard(FIXTURES[f]).unwrap().shared();
        let v = if cov { Variance::Covariant } else { Variance::Contravariant };
        let fam = catalog::constant(base.clone(), v, fiber.clone());
        let g = grothendieck(&fam).unwrap();
        prop_assert_eq!(g.total.object_count(), base.object_count() * fiber.object_count());
        prop_assert_eq!(g.total.morphism_count(), base.morphism_count() * fiber.morphism_count());
        let r = classify_fibration(&g.projection);
        prop_assert!(r.verdict("cartesian").unwrap().holds);
        prop_assert!(r.verdict("cocartesian").unwrap().holds);
    }
}
