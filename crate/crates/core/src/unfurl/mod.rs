//! Extending adjointable families to span categories.
//!
//! Each pipeline unstraightens the family, restricts the total category to a
//! map of triples and records every verification in a ledger. A package is
//! certified only when every ledger entry passes.

mod cocartesian;
mod extension;

pub use cocartesian::*;
pub use extension::*;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::fibrations::{
    check_adjointable, check_bc_fibration, cocartesian_in_restriction, grothendieck, restricted_triple,
    AdjointabilityReport, FibrationError, FibrationReport, Grothendieck, IndexedFamily, Variance,
};
use crate::fincat::{FunctorError, WideSubcat};
use crate::limits::{find_left_adjoint, AdjointSide};
use crate::spans::{span_of_triple_map, validate_adequate_triple, SpanError, SpanFunctor, TripleMap, TripleRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnfurlError {
    #[error("family is not adjointable: {0}")]
    NotAdjointable(String),
    #[error("base triple is not adequate: {0}")]
    NotAdequate(SpanError),
    #[error("transport along `{0}` has no left adjoint")]
    LeftAdjointMissing(String),
    #[error("restriction differs from the total category on hom ({0}, {1})")]
    RestrictionMismatch(String, String),
    #[error("expected a {0} family")]
    WrongVariance(&'static str),
    #[error("not available for this package: {0}")]
    Unsupported(&'static str),
    #[error("coherence data missing: {0}")]
    Coherence(&'static str),
    #[error(transparent)]
    Fibration(#[from] FibrationError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnfurlKind {
    Covariant,
    Contravariant,
    Co,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl LedgerEntry {
    fn new(check: &str, passed: bool, detail: impl Into<String>) -> Self {
        LedgerEntry {
            check: check.to_owned(),
            passed,
            detail: detail.into(),
        }
    }
}

/// The result of an unfurling pipeline.
#[derive(Clone, Debug)]
pub struct UnfurlPackage {
    pub kind: UnfurlKind,
    pub family: IndexedFamily,
    pub marked: WideSubcat,
    pub grothendieck: Grothendieck,
    pub base: TripleRef,
    /// `(E, E_L^cart, E_R) -> (C, L, R)`; the total triple is `map.source`.
    pub map: TripleMap,
    pub span: SpanFunctor,
    pub adjointability: AdjointabilityReport,
    pub bc: FibrationReport,
    pub one_cocartesian: Option<OneCocartesianReport>,
    pub one_cartesian: Option<OneCartesianReport>,
    pub ledger: Vec<LedgerEntry>,
    pub certified: bool,
}

impl UnfurlPackage {
    pub fn total(&self) -> &TripleRef {
        &self.map.source
    }
}

fn first_failure(r: &AdjointabilityReport) -> String {
    if let Some(a) = r.adjoints.iter().find(|a| !a.exists) {
        return format!("no adjoint for `{}`", a.morphism);
    }
    match r.squares.iter().find(|s| !s.is_iso) {
        Some(s) => format!(
            "mate of the square ({}, {}, {}, {}) is not invertible at {}",
            s.h,
            s.k,
            s.f,
            s.g,
            s.first_non_iso.as_deref().unwrap_or("?")
        ),
        None => "unknown".into(),
    }
}

struct Setup {
    family: IndexedFamily,
    marked: WideSubcat,
    adjointability: AdjointabilityReport,
    base: TripleRef,
}

fn build(kind: UnfurlKind, s: Setup) -> Result<UnfurlPackage, UnfurlError> {
    let g = grothendieck(&s.family)?;
    let p = g.projection.clone();
    let bc = check_bc_fibration(&p, &s.base);
    let map = restricted_triple(&p, &s.base)?;
    let span = span_of_triple_map(&map)?;
    let mut ledger = vec![
        LedgerEntry::new(
            "adjointable",
            s.adjointability.holds,
            format!("{} squares", s.adjointability.squares.len()),
        ),
        LedgerEntry::new(
            "beck-chevalley fibration",
            bc.holds(),
            bc.verdicts
                .iter()
                .map(|v| format!("{}: {}", v.condition, v.checked))
                .collect::<Vec<_>>()
                .join("; "),
        ),
        LedgerEntry::new("witnesses revalidate", bc.revalidate(&p), ""),
        LedgerEntry::new(
            "cocartesian lifts survive restriction",
            cocartesian_in_restriction(&p, &s.base)?,
            "",
        ),
        LedgerEntry::new(
            "class-level sizes",
            true,
            format!(
                "{} spans in {} classes over {} classes",
                span.source.span_count(),
                span.source.cat.morphism_count(),
                span.target.cat.morphism_count()
            ),
        ),
    ];
    let mut one_cocartesian = None;
    let mut one_cartesian = None;
    match kind {
        UnfurlKind::Covariant | UnfurlKind::Contravariant => {
            let r = check_one_cocartesian_with(&map, &span, Some(&g.cleavage))?;
            ledger.push(LedgerEntry::new(
                "homwise right fibrations",
                r.homwise_right_fibrations,
                r.homwise_counterexample
                    .clone()
                    .unwrap_or_else(|| format!("{} hom pairs", r.hom_pairs)),
            ));
            ledger.push(LedgerEntry::new("underlying cocartesian", r.underlying_cocartesian, ""));
            ledger.push(LedgerEntry::new(
                "hom squares are pullbacks",
                r.hom_squares,
                r.hom_square_counterexample
                    .clone()
                    .unwrap_or_else(|| format!("{} lifts", r.lifts_checked)),
            ));
            ledger.push(LedgerEntry::new(
                "two-step lifts cocartesian",
                r.two_step_lifts_cocartesian,
                "",
            ));
            ledger.push(LedgerEntry::new("recognition consistent", r.consistent, ""));
            one_cocartesian = Some(r);
        }
        UnfurlKind::Co => {
            let r = check_one_cartesian(&map, &span)?;
            ledger.push(LedgerEntry::new(
                "homwise left fibrations",
                r.homwise_left_fibrations,
                r.homwise_counterexample
                    .clone()
                    .unwrap_or_else(|| format!("{} hom pairs", r.hom_pairs)),
            ));
            ledger.push(LedgerEntry::new("underlying cartesian", r.underlying_cartesian, ""));
            one_cartesian = Some(r);
        }
    }
    let mut pkg = UnfurlPackage {
        kind,
        family: s.family,
        marked: s.marked,
        grothendieck: g,
        base: s.base,
        map,
        span,
        adjointability: s.adjointability,
        bc,
        one_cocartesian,
        one_cartesian,
        ledger,
        certified: false,
    };
    if kind == UnfurlKind::Co {
        let t = check_co_transports(&pkg)?;
        pkg.ledger.push(LedgerEntry::new(
            "transport is g_! f^*",
            t.failures.is_empty(),
            t.failures
                .first()
                .cloned()
                .unwrap_or_else(|| format!("{} spans", t.checked)),
        ));
    }
    pkg.certified = pkg.ledger.iter().all(|e| e.passed);
    Ok(pkg)
}

fn triple(left: WideSubcat, right: WideSubcat) -> Result<TripleRef, UnfurlError> {
    validate_adequate_triple(left, right)
        .map(Arc::new)
        .map_err(UnfurlError::NotAdequate)
}

/// Covariant unfurling over `Span(C, L, C)` of a right `L`-adjointable family.
pub fn unfurl_covariant(family: &IndexedFamily, marked: &WideSubcat) -> Result<UnfurlPackage, UnfurlError> {
    if family.variance() != Variance::Covariant {
        return Err(UnfurlError::WrongVariance("covariant"));
    }
    let adjointability = check_adjointable(family, marked, AdjointSide::Right)?;
    if !adjointability.holds {
        return Err(UnfurlError::NotAdjointable(first_failure(&adjointability)));
    }
    let base = triple(marked.clone(), WideSubcat::all(family.base().clone()))?;
    build(
        UnfurlKind::Covariant,
        Setup {
            family: family.clone(),
            marked: marked.clone(),
            adjointability,
            base,
        },
    )
}

/// Contravariant unfurling over `Span(C, C, R)` of a left `R`-adjointable
/// family.
pub fn unfurl_contravariant(family: &IndexedFamily, marked: &WideSubcat) -> Result<UnfurlPackage, UnfurlError> {
    if family.variance() != Variance::Contravariant {
        return Err(UnfurlError::WrongVariance("contravariant"));
    }
    let adjointability = check_adjointable(family, marked, AdjointSide::Left)?;
    if !adjointability.holds {
        return Err(UnfurlError::NotAdjointable(first_failure(&adjointability)));
    }
    let base = triple(WideSubcat::all(family.base().clone()), marked.clone())?;
    build(
        UnfurlKind::Contravariant,
        Setup {
            family: family.clone(),
            marked: marked.clone(),
            adjointability,
            base,
        },
    )
}

/// The co construction over `Span(C, R, C)` for a right `R`-adjointable
/// contravariant family all of whose transports have left adjoints.
pub fn unfurl_co(family: &IndexedFamily, marked: &WideSubcat) -> Result<UnfurlPackage, UnfurlError> {
    if family.variance() != Variance::Contravariant {
        return Err(UnfurlError::WrongVariance("contravariant"));
    }
    let b = family.base();
    if let Some(m) = b
        .morphisms()
        .find(|&m| find_left_adjoint(family.transport(m)).is_none())
    {
        return Err(UnfurlError::LeftAdjointMissing(b.morphism_name(m).to_owned()));
    }
    let adjointability = check_adjointable(family, marked, AdjointSide::Right)?;
    if !adjointability.holds {
        return Err(UnfurlError::NotAdjointable(first_failure(&adjointability)));
    }
    let base = triple(marked.clone(), WideSubcat::all(b.clone()))?;
    build(
        UnfurlKind::Co,
        Setup {
            family: family.clone(),
            marked: marked.clone(),
            adjointability,
            base,
        },
    )
}
