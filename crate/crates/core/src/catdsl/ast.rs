use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use super::Span;

/// An identifier with its location. Equality and order ignore the span.
#[derive(Clone, Debug, Serialize)]
#[serde(into = "String")]
pub struct Name {
    pub text: String,
    pub span: Span,
}

impl Name {
    pub fn new(text: impl Into<String>) -> Self {
        Name {
            text: text.into(),
            span: Span::default(),
        }
    }
}

impl From<Name> for String {
    fn from(n: Name) -> String {
        n.text
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Name {}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> Ordering {
        self.text.cmp(&other.text)
    }
}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.text.hash(state)
    }
}

/// `f: A -> B`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Arrow {
    pub name: Name,
    pub source: Name,
    pub target: Name,
}

/// `g.f = h` in a gen block, sides as written (outermost first).
#[derive(Clone, Debug, Serialize)]
pub struct Relation {
    pub lhs: Vec<Name>,
    pub rhs: Vec<Name>,
    pub span: Span,
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.lhs == other.lhs && self.rhs == other.rhs
    }
}

impl Eq for Relation {}

impl PartialOrd for Relation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Relation {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.lhs, &self.rhs).cmp(&(&other.lhs, &other.rhs))
    }
}

/// `g.f = h` in a table block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Composite {
    pub g: Name,
    pub f: Name,
    pub h: Name,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CategoryBody {
    Fixture {
        fixture: Name,
        args: Vec<Name>,
    },
    Gen {
        objects: Vec<Name>,
        gens: Vec<Arrow>,
        rels: Vec<Relation>,
    },
    Table {
        objects: Vec<Name>,
        mors: Vec<Arrow>,
        identities: Vec<(Name, Name)>,
        comps: Vec<Composite>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CategoryDecl {
    pub name: Name,
    pub body: CategoryBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctorDecl {
    pub name: Name,
    pub source: Name,
    pub target: Name,
    pub entries: Vec<(Name, Name)>,
}

/// A class of morphisms: a named wide subcategory or a builtin.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassRef {
    All,
    Isos,
    Named(Name),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WideBody {
    Class(ClassRef),
    Members(Vec<Name>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WideDecl {
    pub name: Name,
    pub on: Name,
    pub body: WideBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleDecl {
    pub name: Name,
    pub on: Name,
    pub local: bool,
    pub left: ClassRef,
    pub right: ClassRef,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CoherenceDecl {
    pub g: Name,
    pub f: Name,
    pub components: Vec<(Name, Name)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyDecl {
    pub name: Name,
    pub covariant: bool,
    pub base: Name,
    pub fibers: Vec<(Name, Name)>,
    pub transports: Vec<(Name, Name)>,
    pub coherence: Vec<CoherenceDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TaskDecl {
    pub name: Name,
    pub kind: Name,
    pub fields: Vec<(Name, Name)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "decl", rename_all = "snake_case")]
pub enum Decl {
    Category(CategoryDecl),
    Functor(FunctorDecl),
    Wide(WideDecl),
    Triple(TripleDecl),
    Family(FamilyDecl),
    Task(TaskDecl),
}

impl Decl {
    pub fn name(&self) -> &Name {
        match self {
            Decl::Category(d) => &d.name,
            Decl::Functor(d) => &d.name,
            Decl::Wide(d) => &d.name,
            Decl::Triple(d) => &d.name,
            Decl::Family(d) => &d.name,
            Decl::Task(d) => &d.name,
        }
    }

    /// Declarations are resolved and printed in this order.
    pub fn rank(&self) -> u8 {
        match self {
            Decl::Category(_) => 0,
            Decl::Functor(_) => 1,
            Decl::Wide(_) => 2,
            Decl::Family(_) => 3,
            Decl::Triple(_) => 4,
            Decl::Task(_) => 5,
        }
    }

    /// Sorts every unordered list and orients relations.
    pub fn canonicalize(&mut self) {
        match self {
            Decl::Category(d) => match &mut d.body {
                CategoryBody::Fixture { .. } => {}
                CategoryBody::Gen { objects, gens, rels } => {
                    objects.sort();
                    gens.sort();
                    for r in rels.iter_mut() {
                        if r.rhs < r.lhs {
                            std::mem::swap(&mut r.lhs, &mut r.rhs);
                        }
                    }
                    rels.sort();
                    rels.dedup();
                }
                CategoryBody::Table {
                    objects,
                    mors,
                    identities,
                    comps,
                } => {
                    objects.sort();
                    mors.sort();
                    identities.sort();
                    comps.sort();
                }
            },
            Decl::Functor(d) => d.entries.sort(),
            Decl::Wide(d) => {
                if let WideBody::Members(m) = &mut d.body {
                    m.sort();
                    m.dedup();
                }
            }
            Decl::Triple(_) => {}
            Decl::Family(d) => {
                d.fibers.sort();
                d.transports.sort();
                for c in d.coherence.iter_mut() {
                    c.components.sort();
                }
                d.coherence.sort();
            }
            Decl::Task(d) => d.fields.sort(),
        }
    }
}
