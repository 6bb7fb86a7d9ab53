//! Indexed families of categories, their total categories, and
//! Beck-Chevalley fibrations.

mod bc;
mod family;
mod grothendieck;
mod lifts;
mod selfindex;
mod straighten;

pub use bc::*;
pub use family::*;
pub use grothendieck::*;
pub use lifts::*;
pub use selfindex::*;
pub use straighten::*;

use thiserror::Error;

use crate::fincat::FunctorError;
use crate::spans::SpanError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibrationError {
    #[error("malformed family: {0}")]
    MalformedFamily(String),
    #[error("coherence fails the cocycle condition on ({h}, {g}, {f})")]
    IncoherentFamily { h: String, g: String, f: String },
    #[error("no {kind} lift of `{morphism}` at `{at}`")]
    NotFibration {
        kind: &'static str,
        morphism: String,
        at: String,
    },
    #[error("families are not levelwise isomorphic: {0}")]
    NotLevelwiseIso(String),
    #[error("not a Beck-Chevalley fibration: {0}")]
    NotBCFibration(String),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Span(#[from] SpanError),
}
