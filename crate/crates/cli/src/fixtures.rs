//! The bundled fixture catalog as `.cat` files.

use spanforge::catalog;
use spanforge::catdsl::{quote, write_family, write_triple};
use spanforge::fibrations::Variance;

fn unfurl_kind(name: &str, variance: Variance) -> &'static str {
    match (name, variance) {
        ("galois" | "no_left_adjoint", _) => "unfurl-co",
        (_, Variance::Covariant) => "unfurl-cov",
        (_, Variance::Contravariant) => "unfurl-con",
    }
}

/// File names with their contents, in a fixed order.
pub fn catalog_files() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (name, fam) in catalog::families() {
        let mut text = write_family(name, &fam);
        let f = quote(name);
        text.push_str(&format!(
            "\ntask adjointable adjointable {{ family: {f} }}\n\
             task bc bc-fibration {{ family: {f} }}\n\
             task unfurl {} {{ family: {f} }}\n",
            unfurl_kind(name, fam.variance())
        ));
        out.push((format!("{name}.cat"), text));
    }
    for (name, t) in catalog::triples().expect("bundled triples") {
        let mut text = write_triple(name, &t);
        let c = t.carrier();
        for (i, l) in t.left().members().filter(|&l| !c.is_identity(l)).enumerate() {
            text.push_str(&format!(
                "task l{i} span-adjunction {{ triple: {}; morphism: {} }}\n",
                quote(name),
                quote(c.morphism_name(l))
            ));
        }
        out.push((format!("{name}.cat"), text));
    }
    out.push((
        "finset4_local.cat".into(),
        "category F4 = finset(4)\n\
         triple finset4_local on F4 local { left: all; right: all }\n\
         task l span-adjunction { triple: finset4_local; morphism: \"2->1:00\" }\n"
            .into(),
    ));
    out
}
