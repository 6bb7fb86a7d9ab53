use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use super::ast::*;
use super::closure::{close, ClosureError, Generator, Rel};
use super::{Diagnostics, DslError, Span, Task, TaskKind, TaskTarget, Workspace};
use crate::fibrations::{FibrationError, IndexedFamily, Variance};
use crate::fincat::{
    build_standard, validate_category, wide_closure, CatRef, CategoryError, FinCat, FixtureError, FunctorData,
    FunctorError, Mor, NatTransData, WideSubcat,
};
use crate::spans::{validate_adequate_triple, AdequateTriple, SpanError};

type R<T> = Result<T, DslError>;

fn unknown(kind: &'static str, n: &Name) -> DslError {
    DslError::UnknownReference {
        kind,
        name: n.text.clone(),
        span: n.span,
    }
}

fn invalid(code: &'static str, message: impl ToString, span: Span) -> DslError {
    DslError::ValidationError {
        code,
        message: message.to_string(),
        span,
    }
}

fn category_code(e: &CategoryError) -> &'static str {
    match e {
        CategoryError::DuplicateId(_) => "DuplicateId",
        CategoryError::UnknownObject(_) | CategoryError::UnknownMorphism(_) => "UnknownReference",
        CategoryError::MissingIdentity(_) => "MissingIdentity",
        CategoryError::IllTypedComposite { .. } => "IllTypedComposite",
        CategoryError::MissingComposite { .. } => "MissingComposite",
        CategoryError::IdentityLaw { .. } => "IdentityLaw",
        CategoryError::NonAssociative { .. } => "NonAssociative",
        CategoryError::TooLarge(..) => "TooLarge",
    }
}

fn span_code(e: &SpanError) -> &'static str {
    match e {
        SpanError::MissingPullback { .. } => "MissingPullback",
        SpanError::StabilityViolation { .. } => "StabilityViolation",
        SpanError::CarrierMismatch => "CarrierMismatch",
        _ => "SpanError",
    }
}

fn fibration_code(e: &FibrationError) -> &'static str {
    match e {
        FibrationError::IncoherentFamily { .. } => "IncoherentFamily",
        _ => "MalformedFamily",
    }
}

fn get<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, n: &Name) -> R<&'a T> {
    map.get(&n.text).ok_or_else(|| unknown(kind, n))
}

fn object(c: &FinCat, n: &Name) -> R<crate::fincat::Ob> {
    c.object(&n.text).ok_or_else(|| unknown("object", n))
}

fn morphism(c: &FinCat, n: &Name) -> R<Mor> {
    c.morphism(&n.text).ok_or_else(|| unknown("morphism", n))
}

pub(crate) fn resolve(decls: Vec<Decl>, budget: usize) -> Result<Workspace, Diagnostics> {
    let mut ws = Workspace::default();
    let mut errs = Vec::new();
    let mut seen = HashSet::new();
    for d in &decls {
        let name = d.name();
        if !seen.insert((d.rank(), name.text.clone())) {
            errs.push(invalid(
                "DuplicateId",
                format!("`{}` is declared twice", name.text),
                name.span,
            ));
            continue;
        }
        let key = name.text.clone();
        let done = match d {
            Decl::Category(c) => category(c, budget).map(|cat| {
                ws.categories.insert(key, Arc::new(cat));
            }),
            Decl::Functor(f) => functor(&ws, f).map(|f| {
                ws.functors.insert(key, f);
            }),
            Decl::Wide(w) => wide(&ws, w).map(|w| {
                ws.wides.insert(key, w);
            }),
            Decl::Family(f) => family(&ws, f).map(|f| {
                ws.families.insert(key, f);
            }),
            Decl::Triple(t) => triple(&ws, t).map(|t| {
                ws.triples.insert(key, Arc::new(t));
            }),
            Decl::Task(t) => task(&ws, t).map(|t| {
                ws.tasks.insert(key, t);
            }),
        };
        if let Err(e) = done {
            errs.push(e);
        }
    }
    if errs.is_empty() {
        ws.decls = decls;
        Ok(ws)
    } else {
        Err(Diagnostics(errs))
    }
}

fn object_index(objects: &[Name]) -> R<HashMap<&str, usize>> {
    let mut ix = HashMap::new();
    for (i, o) in objects.iter().enumerate() {
        if ix.insert(o.text.as_str(), i).is_some() {
            return Err(invalid(
                "DuplicateId",
                format!("object `{}` is declared twice", o.text),
                o.span,
            ));
        }
    }
    Ok(ix)
}

fn category(d: &CategoryDecl, budget: usize) -> R<FinCat> {
    match &d.body {
        CategoryBody::Fixture { fixture, args } => {
            let spec = if args.is_empty() {
                fixture.text.clone()
            } else {
                let a: Vec<&str> = args.iter().map(|n| n.text.as_str()).collect();
                format!("{}({})", fixture.text, a.join(","))
            };
            build_standard(&spec).map_err(|e| {
                let code = match e {
                    FixtureError::UnknownFixture(_) => "UnknownFixture",
                    FixtureError::ParamOutOfRange { .. } => "ParamOutOfRange",
                };
                invalid(code, e, fixture.span)
            })
        }
        CategoryBody::Gen { objects, gens, rels } => generated(d, objects, gens, rels, budget),
        CategoryBody::Table {
            objects,
            mors,
            identities,
            comps,
        } => {
            object_index(objects)?;
            for w in comps.windows(2) {
                if (&w[0].g, &w[0].f) == (&w[1].g, &w[1].f) && w[0].h != w[1].h {
                    let msg = format!("`{}.{}` is given two values", w[1].g.text, w[1].f.text);
                    return Err(invalid("ConflictingComposite", msg, w[1].g.span));
                }
            }
            let known: HashSet<&str> = objects.iter().map(|o| o.text.as_str()).collect();
            for a in mors {
                for end in [&a.source, &a.target] {
                    if !known.contains(end.text.as_str()) {
                        return Err(unknown("object", end));
                    }
                }
            }
            let mut all: Vec<(String, String, String)> = mors
                .iter()
                .map(|a| (a.name.text.clone(), a.source.text.clone(), a.target.text.clone()))
                .collect();
            let mut ids: Vec<(String, String)> = identities
                .iter()
                .map(|(o, m)| (o.text.clone(), m.text.clone()))
                .collect();
            for o in objects {
                if ids.iter().any(|(x, _)| *x == o.text) {
                    continue;
                }
                let id = format!("id_{}", o.text);
                if !all.iter().any(|(n, _, _)| *n == id) {
                    all.push((id.clone(), o.text.clone(), o.text.clone()));
                }
                ids.push((o.text.clone(), id));
            }
            let obs: Vec<&str> = objects.iter().map(|o| o.text.as_str()).collect();
            let ms: Vec<(&str, &str, &str)> = all
                .iter()
                .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
                .collect();
            let is: Vec<(&str, &str)> = ids.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let cs: Vec<(&str, &str, &str)> = comps
                .iter()
                .map(|c| (c.g.text.as_str(), c.f.text.as_str(), c.h.text.as_str()))
                .collect();
            validate_category(&obs, &ms, &is, &cs).map_err(|e| invalid(category_code(&e), e, d.name.span))
        }
    }
}

enum Step {
    Gen(usize),
    Id(usize),
}

fn generated(d: &CategoryDecl, objects: &[Name], gens: &[Arrow], rels: &[Relation], budget: usize) -> R<FinCat> {
    let ob = object_index(objects)?;
    let mut generators = Vec::new();
    let mut gen_ix: HashMap<&str, usize> = HashMap::new();
    for a in gens {
        let s = *ob
            .get(a.source.text.as_str())
            .ok_or_else(|| unknown("object", &a.source))?;
        let t = *ob
            .get(a.target.text.as_str())
            .ok_or_else(|| unknown("object", &a.target))?;
        if gen_ix.insert(a.name.text.as_str(), generators.len()).is_some() {
            return Err(invalid(
                "DuplicateId",
                format!("generator `{}` is declared twice", a.name.text),
                a.name.span,
            ));
        }
        generators.push(Generator {
            name: a.name.text.clone(),
            source: s,
            target: t,
        });
    }
    let mut out = Vec::new();
    for r in rels {
        let side = |path: &[Name]| -> R<(usize, usize, Vec<usize>)> {
            let mut steps = Vec::new();
            for n in path.iter().rev() {
                if let Some(&g) = gen_ix.get(n.text.as_str()) {
                    steps.push(Step::Gen(g));
                } else if let Some(&o) = n.text.strip_prefix("id_").and_then(|o| ob.get(o)) {
                    steps.push(Step::Id(o));
                } else {
                    return Err(DslError::UnknownReference {
                        kind: "generator",
                        name: n.text.clone(),
                        span: r.span,
                    });
                }
            }
            let ends = |s: &Step| match *s {
                Step::Gen(g) => (generators[g].source, generators[g].target),
                Step::Id(o) => (o, o),
            };
            let (src, mut cur) = ends(&steps[0]);
            for s in &steps[1..] {
                let (a, b) = ends(s);
                if a != cur {
                    return Err(invalid(
                        "IllTypedComposite",
                        "path in relation is not composable",
                        r.span,
                    ));
                }
                cur = b;
            }
            let word = steps
                .iter()
                .filter_map(|s| match s {
                    Step::Gen(g) => Some(*g),
                    Step::Id(_) => None,
                })
                .collect();
            Ok((src, cur, word))
        };
        let (ls, lt, lhs) = side(&r.lhs)?;
        let (rs, rt, rhs) = side(&r.rhs)?;
        if (ls, lt) != (rs, rt) {
            return Err(invalid(
                "IllTypedRelation",
                "sides of the relation have different endpoints",
                r.span,
            ));
        }
        out.push(Rel { source: ls, lhs, rhs });
    }
    let names: Vec<String> = objects.iter().map(|o| o.text.clone()).collect();
    close(&names, &generators, &out, budget).map_err(|e| match e {
        ClosureError::Budget => DslError::ClosureBudgetExceeded {
            category: d.name.text.clone(),
            budget,
            span: d.name.span,
        },
        ClosureError::Category(e) => invalid(category_code(&e), e, d.name.span),
    })
}

fn functor_error(e: FunctorError, span: Span) -> DslError {
    invalid("InvalidFunctor", e, span)
}

fn functor(ws: &Workspace, d: &FunctorDecl) -> R<FunctorData> {
    let src = get(&ws.categories, "category", &d.source)?.clone();
    let tgt = get(&ws.categories, "category", &d.target)?.clone();
    let mut obs: Vec<(String, String)> = Vec::new();
    let mut mors: Vec<(String, String)> = Vec::new();
    for (a, b) in &d.entries {
        if src.object(&a.text).is_some() {
            object(&tgt, b)?;
            obs.push((a.text.clone(), b.text.clone()));
        } else {
            let m = morphism(&src, a).map_err(|_| unknown("object or morphism", a))?;
            let n = morphism(&tgt, b)?;
            mors.push((a.text.clone(), b.text.clone()));
            for (x, y) in [(src.source(m), tgt.source(n)), (src.target(m), tgt.target(n))] {
                let x = src.object_name(x).to_owned();
                if !obs.iter().any(|(o, _)| *o == x) {
                    obs.push((x, tgt.object_name(y).to_owned()));
                }
            }
        }
    }
    let o: Vec<(&str, &str)> = obs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let m: Vec<(&str, &str)> = mors.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    FunctorData::from_names(src, tgt, &o, &m).map_err(|e| functor_error(e, d.name.span))
}

fn class_on(ws: &Workspace, c: &CatRef, r: &ClassRef, span: Span) -> R<WideSubcat> {
    match r {
        ClassRef::All => Ok(WideSubcat::all(c.clone())),
        ClassRef::Isos => Ok(WideSubcat::isos(c.clone())),
        ClassRef::Named(n) => {
            let w = get(&ws.wides, "wide subcategory", n)?;
            if **w.carrier() != **c {
                return Err(invalid(
                    "CarrierMismatch",
                    format!("`{}` lives on another category", n.text),
                    span,
                ));
            }
            Ok(w.clone())
        }
    }
}

fn wide(ws: &Workspace, d: &WideDecl) -> R<WideSubcat> {
    let c = get(&ws.categories, "category", &d.on)?.clone();
    match &d.body {
        WideBody::Class(r) => class_on(ws, &c, r, d.name.span),
        WideBody::Members(ms) => {
            let gens: Vec<Mor> = ms.iter().map(|n| morphism(&c, n)).collect::<R<_>>()?;
            Ok(wide_closure(&c, &gens))
        }
    }
}

fn family(ws: &Workspace, d: &FamilyDecl) -> R<IndexedFamily> {
    let base = get(&ws.categories, "category", &d.base)?.clone();
    let mut fibers: Vec<Option<CatRef>> = vec![None; base.object_count()];
    for (o, c) in &d.fibers {
        fibers[object(&base, o)?.0] = Some(get(&ws.categories, "category", c)?.clone());
    }
    let fibers: Vec<CatRef> = fibers
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            f.ok_or_else(|| {
                let o = base.object_name(crate::fincat::Ob(i));
                invalid("MalformedFamily", format!("no fiber over `{o}`"), d.name.span)
            })
        })
        .collect::<R<_>>()?;
    let mut transports: Vec<Option<FunctorData>> = vec![None; base.morphism_count()];
    for (m, f) in &d.transports {
        transports[morphism(&base, m)?.0] = Some(get(&ws.functors, "functor", f)?.clone());
    }
    let transports: Vec<FunctorData> = base
        .morphisms()
        .map(|m| match transports[m.0].take() {
            Some(f) => Ok(f),
            None if base.is_identity(m) => Ok(FunctorData::identity(fibers[base.source(m).0].clone())),
            None => Err(invalid(
                "MalformedFamily",
                format!("no transport along `{}`", base.morphism_name(m)),
                d.name.span,
            )),
        })
        .collect::<R<_>>()?;
    let variance = if d.covariant {
        Variance::Covariant
    } else {
        Variance::Contravariant
    };
    let mut coherence = HashMap::new();
    for c in &d.coherence {
        let (g, f) = (morphism(&base, &c.g)?, morphism(&base, &c.f)?);
        let Some(gf) = base.compose(g, f) else {
            return Err(invalid(
                "IllTypedComposite",
                "coherence for a non-composable pair",
                c.g.span,
            ));
        };
        let (tg, tf) = (&transports[g.0], &transports[f.0]);
        let (start, end, composite) = match variance {
            Variance::Covariant => (base.source(f), base.target(g), tg.after(tf)),
            Variance::Contravariant => (base.target(g), base.source(f), tf.after(tg)),
        };
        let composite = composite.map_err(|e| functor_error(e, c.g.span))?;
        let (fs, fe) = (&fibers[start.0], &fibers[end.0]);
        let mut comps: Vec<Option<Mor>> = vec![None; fs.object_count()];
        for (x, m) in &c.components {
            comps[object(fs, x)?.0] = Some(morphism(fe, m)?);
        }
        let comps: Vec<Mor> = comps
            .into_iter()
            .map(|m| m.ok_or_else(|| invalid("MalformedFamily", "coherence is missing a component", c.g.span)))
            .collect::<R<_>>()?;
        let nat =
            NatTransData::new(composite, transports[gf.0].clone(), comps).map_err(|e| functor_error(e, c.g.span))?;
        coherence.insert((g, f), nat);
    }
    IndexedFamily::new(base, variance, fibers, transports, coherence)
        .map_err(|e| invalid(fibration_code(&e), e, d.name.span))
}

fn triple(ws: &Workspace, d: &TripleDecl) -> R<AdequateTriple> {
    let c = get(&ws.categories, "category", &d.on)?.clone();
    let left = class_on(ws, &c, &d.left, d.name.span)?;
    let right = class_on(ws, &c, &d.right, d.name.span)?;
    let t = if d.local {
        AdequateTriple::local(left, right)
    } else {
        validate_adequate_triple(left, right)
    };
    t.map_err(|e| invalid(span_code(&e), e, d.name.span))
}

fn task(ws: &Workspace, d: &TaskDecl) -> R<Task> {
    let kind = TaskKind::parse(&d.kind.text)
        .ok_or_else(|| invalid("UnknownTask", format!("no task kind `{}`", d.kind.text), d.kind.span))?;
    let allowed: &[&str] = if kind == TaskKind::SpanAdjunction {
        &["triple", "morphism"]
    } else {
        &["family", "marked"]
    };
    let mut fields: HashMap<&str, &Name> = HashMap::new();
    for (k, v) in &d.fields {
        if !allowed.contains(&k.text.as_str()) {
            return Err(invalid(
                "UnknownField",
                format!("`{}` does not take `{}`", kind.as_str(), k.text),
                k.span,
            ));
        }
        fields.insert(k.text.as_str(), v);
    }
    let field = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| invalid("MissingField", format!("`{}` needs `{k}`", kind.as_str()), d.name.span))
    };
    let target = if kind == TaskKind::SpanAdjunction {
        let tn = field("triple")?;
        let t = get(&ws.triples, "triple", tn)?;
        let m = morphism(t.carrier(), field("morphism")?)?;
        if !t.left().contains(m) {
            return Err(invalid(
                "NotInLeftClass",
                format!("`{}` is not in the left class", t.carrier().morphism_name(m)),
                d.name.span,
            ));
        }
        TaskTarget::Morphism {
            triple: tn.text.clone(),
            morphism: m,
        }
    } else {
        let fname = field("family")?;
        let fam = get(&ws.families, "family", fname)?;
        let marked = match fields.get("marked") {
            None => WideSubcat::all(fam.base().clone()),
            Some(n) if !ws.wides.contains_key(&n.text) && n.text == "all" => WideSubcat::all(fam.base().clone()),
            Some(n) if !ws.wides.contains_key(&n.text) && n.text == "isos" => WideSubcat::isos(fam.base().clone()),
            Some(n) => class_on(ws, fam.base(), &ClassRef::Named((*n).clone()), n.span)?,
        };
        TaskTarget::Family {
            family: fname.text.clone(),
            marked,
        }
    };
    Ok(Task {
        name: d.name.text.clone(),
        kind,
        target,
    })
}
