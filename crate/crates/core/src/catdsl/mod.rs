//! The `.cat` text format: categories, functors, wide subcategories,
//! families, triples and check requests.
//!
//! ```text
//! category sq { objects W X Y Z  gen f: W->X  gen g: X->Z  gen h: W->Y  gen k: Y->Z  rel g.f = k.h }
//! category F3 = finset(3)
//! wide inj on F3 { "1->2:01" }
//! triple T on sq { left: all; right: all }
//! ```
//!
//! Names that are not bare identifiers, or that collide with a keyword, are
//! written in double quotes.

mod ast;
mod closure;
mod lexer;
mod parse;
mod print;
mod resolve;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use ast::*;
pub use print::{export_json, quote, serialize, write_category, write_family, write_functor, write_triple};

use crate::fibrations::IndexedFamily;
use crate::fincat::{CatRef, FunctorData, Mor, WideSubcat};
use crate::spans::TripleRef;

/// Default bound on the number of morphisms a generated category may reach
/// while it is being closed.
pub const DEFAULT_BUDGET: usize = 10_000;

/// A byte range in the source with the line and column of its start.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl Span {
    /// From the start of `self` to the end of `other`.
    pub fn to(self, other: Span) -> Span {
        Span {
            end: other.end.max(self.end),
            ..self
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "error")]
pub enum DslError {
    #[error("{span}: syntax error: {message}")]
    SyntaxError { message: String, span: Span },
    #[error("{span}: unknown {kind} `{name}`")]
    UnknownReference {
        kind: &'static str,
        name: String,
        span: Span,
    },
    #[error("{span}: {code}: {message}")]
    ValidationError {
        code: &'static str,
        message: String,
        span: Span,
    },
    #[error("{span}: closing `{category}` exceeds the budget of {budget} morphisms")]
    ClosureBudgetExceeded {
        category: String,
        budget: usize,
        span: Span,
    },
}

impl DslError {
    pub fn span(&self) -> Span {
        match self {
            DslError::SyntaxError { span, .. }
            | DslError::UnknownReference { span, .. }
            | DslError::ValidationError { span, .. }
            | DslError::ClosureBudgetExceeded { span, .. } => *span,
        }
    }
}

/// Every diagnostic produced for one input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct Diagnostics(pub Vec<DslError>);

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    UnfurlCov,
    UnfurlCon,
    UnfurlCo,
    BcFibration,
    Adjointable,
    SpanAdjunction,
    OneCocartesian,
    Universality,
}

impl TaskKind {
    pub const ALL: [TaskKind; 8] = [
        TaskKind::UnfurlCov,
        TaskKind::UnfurlCon,
        TaskKind::UnfurlCo,
        TaskKind::BcFibration,
        TaskKind::Adjointable,
        TaskKind::SpanAdjunction,
        TaskKind::OneCocartesian,
        TaskKind::Universality,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::UnfurlCov => "unfurl-cov",
            TaskKind::UnfurlCon => "unfurl-con",
            TaskKind::UnfurlCo => "unfurl-co",
            TaskKind::BcFibration => "bc-fibration",
            TaskKind::Adjointable => "adjointable",
            TaskKind::SpanAdjunction => "span-adjunction",
            TaskKind::OneCocartesian => "one-cocartesian",
            TaskKind::Universality => "universality",
        }
    }

    pub fn parse(s: &str) -> Option<TaskKind> {
        TaskKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Clone, Debug)]
pub enum TaskTarget {
    /// A family with its marked class.
    Family { family: String, marked: WideSubcat },
    /// A morphism of a triple's left class.
    Morphism { triple: String, morphism: Mor },
}

#[derive(Clone, Debug)]
pub struct Task {
    pub name: String,
    pub kind: TaskKind,
    pub target: TaskTarget,
}

/// A parsed and validated `.cat` file. Equality compares the canonical
/// declarations.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub decls: Vec<Decl>,
    pub categories: BTreeMap<String, CatRef>,
    pub functors: BTreeMap<String, FunctorData>,
    pub wides: BTreeMap<String, WideSubcat>,
    pub families: BTreeMap<String, IndexedFamily>,
    pub triples: BTreeMap<String, TripleRef>,
    pub tasks: BTreeMap<String, Task>,
}

impl PartialEq for Workspace {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls
    }
}

pub fn parse(text: &str) -> Result<Workspace, Diagnostics> {
    parse_with_budget(text, DEFAULT_BUDGET)
}

pub fn parse_with_budget(text: &str, budget: usize) -> Result<Workspace, Diagnostics> {
    let decls = parse_decls(text).map_err(|e| Diagnostics(vec![e]))?;
    resolve::resolve(decls, budget)
}

/// Declarations in canonical order, without validation.
pub fn parse_decls(text: &str) -> Result<Vec<Decl>, DslError> {
    let toks = lexer::lex(text)?;
    let eof = lexer::Lines::new(text).span(text, text.len(), text.len());
    let mut decls = parse::Parser::new(&toks, eof).file()?;
    for d in decls.iter_mut() {
        d.canonicalize();
    }
    decls.sort_by(|a, b| (a.rank(), a.name()).cmp(&(b.rank(), b.name())));
    Ok(decls)
}
