//! The bundled fixture categories.

use std::collections::HashMap;

use thiserror::Error;

use super::{CategoryBuilder, FinCat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("parameter of `{name}` out of range: {detail}")]
    ParamOutOfRange { name: String, detail: String },
}

/// Largest `n` accepted by [`finset`].
pub const FINSET_MAX: usize = 4;

/// Builds a fixture from a name such as `two`, `finset(3)`, `powerset(1,2)`
/// or `powerset({1,2})`.
pub fn build_standard(spec: &str) -> Result<FinCat, FixtureError> {
    let spec = spec.trim();
    let (name, args) = match spec.find('(') {
        Some(i) if spec.ends_with(')') => (&spec[..i], Some(&spec[i + 1..spec.len() - 1])),
        _ => (spec, None),
    };
    let range = |detail: &str| FixtureError::ParamOutOfRange {
        name: name.to_owned(),
        detail: detail.to_owned(),
    };
    let number = || -> Result<usize, FixtureError> {
        args.and_then(|a| a.trim().parse().ok())
            .ok_or_else(|| range("expected a non-negative integer"))
    };
    match (name, args) {
        ("pt", None) => Ok(pt()),
        ("two", None) => Ok(two()),
        ("sq", None) => Ok(sq()),
        ("walking_iso", None) => Ok(walking_iso()),
        ("cospan", None) => Ok(cospan()),
        ("powerset", Some(a)) => {
            let a = a.trim().trim_start_matches('{').trim_end_matches('}');
            let elems: Vec<&str> = a.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            if elems.len() > 5 {
                return Err(range("at most 5 elements"));
            }
            Ok(powerset(&elems))
        }
        ("finset", Some(_)) => {
            let n = number()?;
            if n > FINSET_MAX {
                return Err(range(&format!("n must be at most {FINSET_MAX}")));
            }
            Ok(finset(n))
        }
        ("chain", Some(_)) => {
            let n = number()?;
            if !(1..=12).contains(&n) {
                return Err(range("length must be between 1 and 12"));
            }
            Ok(chain(n))
        }
        ("cyclic", Some(_)) => {
            let n = number()?;
            if !(1..=12).contains(&n) {
                return Err(range("order must be between 1 and 12"));
            }
            Ok(cyclic(n))
        }
        _ => Err(FixtureError::UnknownFixture(spec.to_owned())),
    }
}

/// Builds a thin category (preorder) from object names and a reflexive,
/// transitive relation. Morphisms are named `a->b`, identities `id_a`.
pub fn preorder(objects: &[String], leq: impl Fn(usize, usize) -> bool) -> FinCat {
    let mut b = CategoryBuilder::new();
    for o in objects {
        b.add_object(o.clone());
    }
    let mut arrow = HashMap::new();
    for i in 0..objects.len() {
        for j in 0..objects.len() {
            if i == j {
                let m = b.add_morphism(format!("id_{}", objects[i]), i, i);
                b.set_identity(i, m);
                arrow.insert((i, j), m);
            } else if leq(i, j) {
                arrow.insert((i, j), b.add_morphism(format!("{}->{}", objects[i], objects[j]), i, j));
            }
        }
    }
    let ends: Vec<(usize, usize)> = (0..b.morphism_count()).map(|m| b.morphism_endpoints(m)).collect();
    b.fill_composites(|g, f| arrow[&(ends[f].0, ends[g].1)]);
    b.build().expect("preorder fixture")
}

pub fn pt() -> FinCat {
    let mut b = CategoryBuilder::new();
    b.add_object("*");
    let id = b.add_morphism("id_*", 0, 0);
    b.set_identity(0, id);
    b.fill_composites(|_, _| id);
    b.build().expect("pt")
}

/// The walking arrow `f: 0 -> 1`.
pub fn two() -> FinCat {
    let mut b = CategoryBuilder::new();
    for o in ["0", "1"] {
        b.add_object(o);
    }
    let i0 = b.add_morphism("id_0", 0, 0);
    let i1 = b.add_morphism("id_1", 1, 1);
    let f = b.add_morphism("f", 0, 1);
    b.set_identity(0, i0);
    b.set_identity(1, i1);
    b.fill_composites(|g, h| if g == i0 || g == i1 { h } else { g.max(h).max(f) });
    b.build().expect("two")
}

/// Commutative square `g.f = k.h = d` with `f: W->X`, `g: X->Z`, `h: W->Y`,
/// `k: Y->Z`.
pub fn sq() -> FinCat {
    let mut b = CategoryBuilder::new();
    let [w, x, y, z] = ["W", "X", "Y", "Z"].map(|o| b.add_object(o));
    let ids = [w, x, y, z].map(|o| {
        let name = format!("id_{}", ["W", "X", "Y", "Z"][o]);
        let m = b.add_morphism(name, o, o);
        b.set_identity(o, m);
        m
    });
    let f = b.add_morphism("f", w, x);
    let g = b.add_morphism("g", x, z);
    let h = b.add_morphism("h", w, y);
    let k = b.add_morphism("k", y, z);
    let d = b.add_morphism("d", w, z);
    b.fill_composites(|a, c| {
        if ids.contains(&a) {
            c
        } else if ids.contains(&c) {
            a
        } else {
            debug_assert!((a, c) == (g, f) || (a, c) == (k, h));
            d
        }
    });
    b.build().expect("sq")
}

/// Two objects `a`, `b` with inverse isomorphisms `i: a->b`, `j: b->a`.
pub fn walking_iso() -> FinCat {
    let mut b = CategoryBuilder::new();
    b.add_object("a");
    b.add_object("b");
    let ia = b.add_morphism("id_a", 0, 0);
    let ib = b.add_morphism("id_b", 1, 1);
    b.add_morphism("i", 0, 1);
    b.add_morphism("j", 1, 0);
    b.set_identity(0, ia);
    b.set_identity(1, ib);
    let ends: Vec<_> = (0..4).map(|m| b.morphism_endpoints(m)).collect();
    b.fill_composites(|g, f| match (ends[f].0, ends[g].1) {
        (0, 0) => ia,
        (1, 1) => ib,
        (0, 1) => 2,
        _ => 3,
    });
    b.build().expect("walking_iso")
}

/// The cospan `u: a -> c <- b: v`; it has no pullback of `u` along `v`.
pub fn cospan() -> FinCat {
    let names = ["a".to_owned(), "b".to_owned(), "c".to_owned()];
    let mut c = preorder(&names, |i, j| i == j || j == 2);
    // rename the two arrows to u and v
    let mut b = c.to_builder();
    b.rename_morphism("a->c", "u");
    b.rename_morphism("b->c", "v");
    c = b.build().expect("cospan");
    c
}

/// The subset lattice of `elems`; objects are written `{}`, `{1}`, `{1,2}`.
pub fn powerset(elems: &[&str]) -> FinCat {
    let n = elems.len();
    let name = |mask: usize| {
        let parts: Vec<&str> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| elems[i]).collect();
        format!("{{{}}}", parts.join(","))
    };
    let names: Vec<String> = (0..1usize << n).map(name).collect();
    preorder(&names, |i, j| i & !j == 0)
}

/// The chain `0 < 1 < ... < n-1`.
pub fn chain(n: usize) -> FinCat {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    preorder(&names, |i, j| i <= j)
}

/// The cyclic group of order `n` as a one-object category; `e` is the
/// identity and `r{i}` is rotation by `i`.
pub fn cyclic(n: usize) -> FinCat {
    let mut b = CategoryBuilder::new();
    b.add_object("*");
    let e = b.add_morphism("e", 0, 0);
    for i in 1..n {
        b.add_morphism(format!("r{i}"), 0, 0);
    }
    b.set_identity(0, e);
    b.fill_composites(|g, f| (g + f) % n);
    b.build().expect("cyclic")
}

/// Skeleton of finite sets of size at most `n` with all functions.
///
/// Objects are `0..=n`. A function `a -> b` is named `a->b:` followed by its
/// images, e.g. `2->1:00`; identities are named `id_a`.
pub fn finset(n: usize) -> FinCat {
    let mut b = CategoryBuilder::new();
    for a in 0..=n {
        b.add_object(a.to_string());
    }
    let mut index: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
    let mut table: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for a in 0..=n {
        for t in 0..=n {
            for images in all_functions(a, t) {
                let is_id = a == t && images.iter().enumerate().all(|(i, &v)| i == v);
                let name = if is_id {
                    format!("id_{a}")
                } else {
                    let digits: String = images.iter().map(|v| v.to_string()).collect();
                    format!("{a}->{t}:{digits}")
                };
                let m = b.add_morphism(name, a, t);
                if is_id {
                    b.set_identity(a, m);
                }
                index.insert((a, t, images.clone()), m);
                table.push((a, t, images));
            }
        }
    }
    b.fill_composites(|g, f| {
        let (fa, _, fi) = &table[f];
        let (_, gt, gi) = &table[g];
        let h: Vec<usize> = fi.iter().map(|&x| gi[x]).collect();
        index[&(*fa, *gt, h)]
    });
    b.build().expect("finset")
}

/// All functions `{0..a} -> {0..b}` as image vectors, in lexicographic order.
pub fn all_functions(a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..a {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Decodes a `finset` morphism name into `(source size, target size, images)`.
pub fn finset_function(c: &FinCat, m: super::Mor) -> (usize, usize, Vec<usize>) {
    let a: usize = c.object_name(c.source(m)).parse().expect("finset object");
    let b: usize = c.object_name(c.target(m)).parse().expect("finset object");
    if c.is_identity(m) {
        return (a, b, (0..a).collect());
    }
    let name = c.morphism_name(m);
    let digits = name.rsplit(':').next().unwrap_or("");
    (
        a,
        b,
        digits
            .chars()
            .map(|d| d.to_digit(10).expect("digit") as usize)
            .collect(),
    )
}

/// Is the `finset` morphism injective?
pub fn finset_injective(c: &FinCat, m: super::Mor) -> bool {
    let (_, _, img) = finset_function(c, m);
    let mut seen = std::collections::HashSet::new();
    img.into_iter().all(|x| seen.insert(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_sizes() {
        assert_eq!(pt().morphism_count(), 1);
        assert_eq!(two().morphism_count(), 3);
        assert_eq!(sq().morphism_count(), 9);
        assert_eq!(walking_iso().morphism_count(), 4);
        assert_eq!(cospan().morphism_count(), 5);
        assert_eq!(cyclic(3).morphism_count(), 3);
        assert_eq!(chain(3).morphism_count(), 6);
    }

    #[test]
    fn names_parse() {
        assert_eq!(build_standard("powerset({1,2})").unwrap().object_count(), 4);
        assert_eq!(build_standard("powerset(1,2)").unwrap(), powerset(&["1", "2"]));
        assert!(matches!(
            build_standard("finset(7)"),
            Err(FixtureError::ParamOutOfRange { .. })
        ));
        assert!(matches!(build_standard("nope"), Err(FixtureError::UnknownFixture(_))));
    }

    #[test]
    fn finset_names_decode() {
        let c = finset(2);
        let m = c.mor("2->1:00");
        assert_eq!(finset_function(&c, m), (2, 1, vec![0, 0]));
        assert!(!finset_injective(&c, m));
        assert!(finset_injective(&c, c.mor("id_2")));
    }
}
