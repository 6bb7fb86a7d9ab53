use std::fmt::Write;

use serde_json::{json, Value};

use super::ast::*;
use super::lexer::is_bare;
use super::{TaskTarget, Workspace};
use crate::fibrations::{IndexedFamily, Variance};
use crate::fincat::{FinCat, FunctorData, WideSubcat};
use crate::spans::AdequateTriple;

const KEYWORDS: &[&str] = &[
    "category",
    "functor",
    "wide",
    "triple",
    "family",
    "task",
    "table",
    "objects",
    "gen",
    "rel",
    "mor",
    "identity",
    "comp",
    "on",
    "local",
    "left",
    "right",
    "all",
    "isos",
    "covariant",
    "contravariant",
    "over",
    "fiber",
    "transport",
    "coherence",
];

/// `name` as it must be written in `.cat` text.
pub fn quote(name: &str) -> String {
    let bare = !name.is_empty() && name.chars().all(is_bare) && !name.contains("->") && !KEYWORDS.contains(&name);
    if bare {
        return name.to_owned();
    }
    let mut s = String::from("\"");
    for c in name.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            c => s.push(c),
        }
    }
    s.push('"');
    s
}

fn n(name: &Name) -> String {
    quote(&name.text)
}

fn class(c: &ClassRef) -> String {
    match c {
        ClassRef::All => "all".into(),
        ClassRef::Isos => "isos".into(),
        ClassRef::Named(x) => n(x),
    }
}

fn path(p: &[Name]) -> String {
    p.iter().map(n).collect::<Vec<_>>().join(".")
}

fn decl(out: &mut String, d: &Decl) {
    match d {
        Decl::Category(c) => match &c.body {
            CategoryBody::Fixture { fixture, args } => {
                let _ = write!(out, "category {} = {}", n(&c.name), n(fixture));
                if !args.is_empty() {
                    let a: Vec<String> = args.iter().map(n).collect();
                    let _ = write!(out, "({})", a.join(", "));
                }
                out.push('\n');
            }
            CategoryBody::Gen { objects, gens, rels } => {
                let _ = writeln!(out, "category {} {{", n(&c.name));
                let o: Vec<String> = objects.iter().map(n).collect();
                let _ = writeln!(out, "  objects {}", o.join(" "));
                for a in gens {
                    let _ = writeln!(out, "  gen {}: {} -> {}", n(&a.name), n(&a.source), n(&a.target));
                }
                for r in rels {
                    let _ = writeln!(out, "  rel {} = {}", path(&r.lhs), path(&r.rhs));
                }
                out.push_str("}\n");
            }
            CategoryBody::Table {
                objects,
                mors,
                identities,
                comps,
            } => {
                let _ = writeln!(out, "category {} table {{", n(&c.name));
                let o: Vec<String> = objects.iter().map(n).collect();
                let _ = writeln!(out, "  objects {}", o.join(" "));
                for a in mors {
                    let _ = writeln!(out, "  mor {}: {} -> {}", n(&a.name), n(&a.source), n(&a.target));
                }
                for (o, m) in identities {
                    let _ = writeln!(out, "  identity {} = {}", n(o), n(m));
                }
                for c in comps {
                    let _ = writeln!(out, "  comp {}.{} = {}", n(&c.g), n(&c.f), n(&c.h));
                }
                out.push_str("}\n");
            }
        },
        Decl::Functor(f) => {
            let _ = writeln!(out, "functor {}: {} -> {} {{", n(&f.name), n(&f.source), n(&f.target));
            for (a, b) in &f.entries {
                let _ = writeln!(out, "  {} -> {}", n(a), n(b));
            }
            out.push_str("}\n");
        }
        Decl::Wide(w) => match &w.body {
            WideBody::Class(c) => {
                let _ = writeln!(out, "wide {} on {} = {}", n(&w.name), n(&w.on), class(c));
            }
            WideBody::Members(ms) => {
                let m: Vec<String> = ms.iter().map(n).collect();
                let _ = writeln!(out, "wide {} on {} {{ {} }}", n(&w.name), n(&w.on), m.join(" "));
            }
        },
        Decl::Triple(t) => {
            let local = if t.local { " local" } else { "" };
            let _ = writeln!(
                out,
                "triple {} on {}{local} {{ left: {}; right: {} }}",
                n(&t.name),
                n(&t.on),
                class(&t.left),
                class(&t.right)
            );
        }
        Decl::Family(f) => {
            let v = if f.covariant { "covariant" } else { "contravariant" };
            let _ = writeln!(out, "family {} {v} over {} {{", n(&f.name), n(&f.base));
            for (o, c) in &f.fibers {
                let _ = writeln!(out, "  fiber {} = {}", n(o), n(c));
            }
            for (m, t) in &f.transports {
                let _ = writeln!(out, "  transport {} = {}", n(m), n(t));
            }
            for c in &f.coherence {
                let _ = write!(out, "  coherence {} {} {{", n(&c.g), n(&c.f));
                for (x, m) in &c.components {
                    let _ = write!(out, " {} -> {};", n(x), n(m));
                }
                out.push_str(" }\n");
            }
            out.push_str("}\n");
        }
        Decl::Task(t) => {
            let _ = write!(out, "task {} {} {{", n(&t.name), n(&t.kind));
            for (k, v) in &t.fields {
                let _ = write!(out, " {}: {};", n(k), n(v));
            }
            out.push_str(" }\n");
        }
    }
}

/// Canonical text for a workspace; parsing it gives back an equal workspace.
pub fn serialize(ws: &Workspace) -> String {
    let mut out = String::new();
    for (i, d) in ws.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        decl(&mut out, d);
    }
    out
}

fn id_name(c: &FinCat, o: crate::fincat::Ob) -> String {
    format!("id_{}", c.object_name(o))
}

/// A category in table mode.
pub fn write_category(name: &str, c: &FinCat) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "category {} table {{", quote(name));
    let o: Vec<String> = c.objects().map(|o| quote(c.object_name(o))).collect();
    let _ = writeln!(out, "  objects {}", o.join(" "));
    for m in c.morphisms() {
        let (s, t) = (c.source(m), c.target(m));
        if c.is_identity(m) && c.morphism_name(m) == id_name(c, s) {
            continue;
        }
        let _ = writeln!(
            out,
            "  mor {}: {} -> {}",
            quote(c.morphism_name(m)),
            quote(c.object_name(s)),
            quote(c.object_name(t))
        );
    }
    for o in c.objects() {
        let id = c.identity(o);
        if c.morphism_name(id) != id_name(c, o) {
            let _ = writeln!(
                out,
                "  identity {} = {}",
                quote(c.object_name(o)),
                quote(c.morphism_name(id))
            );
        }
    }
    for f in c.morphisms().filter(|&f| !c.is_identity(f)) {
        for g in c
            .morphisms()
            .filter(|&g| !c.is_identity(g) && c.source(g) == c.target(f))
        {
            let h = c.comp(g, f);
            let _ = writeln!(
                out,
                "  comp {}.{} = {}",
                quote(c.morphism_name(g)),
                quote(c.morphism_name(f)),
                quote(c.morphism_name(h))
            );
        }
    }
    out.push_str("}\n");
    out
}

/// A functor between categories declared as `source` and `target`. Identity
/// morphisms are left implicit.
pub fn write_functor(name: &str, source: &str, target: &str, f: &FunctorData) -> String {
    let (s, t) = (f.source(), f.target());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "functor {}: {} -> {} {{",
        quote(name),
        quote(source),
        quote(target)
    );
    for o in s.objects() {
        let _ = writeln!(
            out,
            "  {} -> {}",
            quote(s.object_name(o)),
            quote(t.object_name(f.ob(o)))
        );
    }
    for m in s.morphisms().filter(|&m| !s.is_identity(m)) {
        let _ = writeln!(
            out,
            "  {} -> {}",
            quote(s.morphism_name(m)),
            quote(t.morphism_name(f.mor(m)))
        );
    }
    out.push_str("}\n");
    out
}

/// A family together with its base, one category per fiber and one functor
/// per non-identity transport, named after `name`.
pub fn write_family(name: &str, fam: &IndexedFamily) -> String {
    let b = fam.base();
    let base = format!("{name}.base");
    let fiber = |o| format!("{name}.fiber.{}", b.object_name(o));
    let transport = |m| format!("{name}.transport.{}", b.morphism_name(m));
    let mut out = write_category(&base, b);
    for o in b.objects() {
        out.push('\n');
        out.push_str(&write_category(&fiber(o), fam.fiber(o)));
    }
    let ends = |m| match fam.variance() {
        Variance::Covariant => (b.source(m), b.target(m)),
        Variance::Contravariant => (b.target(m), b.source(m)),
    };
    for m in b.morphisms().filter(|&m| !b.is_identity(m)) {
        let (x, y) = ends(m);
        out.push('\n');
        out.push_str(&write_functor(&transport(m), &fiber(x), &fiber(y), fam.transport(m)));
    }
    let v = match fam.variance() {
        Variance::Covariant => "covariant",
        Variance::Contravariant => "contravariant",
    };
    let _ = writeln!(out, "\nfamily {} {v} over {} {{", quote(name), quote(&base));
    for o in b.objects() {
        let _ = writeln!(out, "  fiber {} = {}", quote(b.object_name(o)), quote(&fiber(o)));
    }
    for m in b.morphisms().filter(|&m| !b.is_identity(m)) {
        let _ = writeln!(
            out,
            "  transport {} = {}",
            quote(b.morphism_name(m)),
            quote(&transport(m))
        );
    }
    for f in b.morphisms().filter(|&f| !b.is_identity(f)) {
        for g in b
            .morphisms()
            .filter(|&g| !b.is_identity(g) && b.source(g) == b.target(f))
        {
            let mu = fam.coherence(g, f);
            if mu.is_identity() {
                continue;
            }
            let (s, e) = (mu.source().source(), mu.target().target());
            let _ = write!(
                out,
                "  coherence {} {} {{",
                quote(b.morphism_name(g)),
                quote(b.morphism_name(f))
            );
            for (x, &c) in s.objects().zip(mu.components()) {
                let _ = write!(out, " {} -> {};", quote(s.object_name(x)), quote(e.morphism_name(c)));
            }
            out.push_str(" }\n");
        }
    }
    out.push_str("}\n");
    out
}

fn names(v: &[Name]) -> Value {
    Value::from(v.iter().map(|x| x.text.clone()).collect::<Vec<_>>())
}

/// Structured view of a workspace: the canonical declarations plus sizes of
/// the resolved categories and the task list.
pub fn export_json(ws: &Workspace) -> Value {
    let categories: serde_json::Map<String, Value> = ws
        .categories
        .iter()
        .map(|(k, c)| {
            let objects: Vec<&str> = c.objects().map(|o| c.object_name(o)).collect();
            let morphisms: Vec<Value> = c
                .morphisms()
                .map(|m| {
                    json!([
                        c.morphism_name(m),
                        c.object_name(c.source(m)),
                        c.object_name(c.target(m))
                    ])
                })
                .collect();
            (k.clone(), json!({ "objects": objects, "morphisms": morphisms }))
        })
        .collect();
    let tasks: Vec<Value> = ws
        .tasks
        .values()
        .map(|t| match &t.target {
            TaskTarget::Family { family, marked } => {
                json!({ "name": t.name, "kind": t.kind, "family": family, "marked": marked.names() })
            }
            TaskTarget::Morphism { triple, morphism } => json!({
                "name": t.name,
                "kind": t.kind,
                "triple": triple,
                "morphism": ws.triples[triple].carrier().morphism_name(*morphism),
            }),
        })
        .collect();
    let wides: serde_json::Map<String, Value> = ws
        .decls
        .iter()
        .filter_map(|d| match d {
            Decl::Wide(w) => match &w.body {
                WideBody::Members(m) => Some((w.name.text.clone(), names(m))),
                WideBody::Class(c) => Some((w.name.text.clone(), Value::from(class(c)))),
            },
            _ => None,
        })
        .collect();
    json!({
        "declarations": ws.decls,
        "categories": categories,
        "wide": wides,
        "tasks": tasks,
    })
}

fn write_wide(out: &mut String, name: &str, on: &str, w: &WideSubcat) {
    let c = w.carrier();
    if w.len() == c.morphism_count() {
        let _ = writeln!(out, "wide {} on {} = all", quote(name), quote(on));
        return;
    }
    let m: Vec<String> = w
        .members()
        .filter(|&m| !c.is_identity(m))
        .map(|m| quote(c.morphism_name(m)))
        .collect();
    let _ = writeln!(out, "wide {} on {} {{ {} }}", quote(name), quote(on), m.join(" "));
}

/// A triple with its carrier and both classes, named after `name`.
pub fn write_triple(name: &str, t: &AdequateTriple) -> String {
    let carrier = format!("{name}.carrier");
    let (l, r) = (format!("{name}.left"), format!("{name}.right"));
    let mut out = write_category(&carrier, t.carrier());
    out.push('\n');
    write_wide(&mut out, &l, &carrier, t.left());
    write_wide(&mut out, &r, &carrier, t.right());
    let local = if t.is_certified() { "" } else { " local" };
    let _ = writeln!(
        out,
        "triple {} on {}{local} {{ left: {}; right: {} }}",
        quote(name),
        quote(&carrier),
        quote(&l),
        quote(&r)
    );
    out
}
