//! Finite category theory for span categories, Beck-Chevalley fibrations and
//! unfurling, decided by exhaustive search on small inputs.

pub mod catalog;
pub mod catdsl;
pub mod fibrations;
pub mod fincat;
pub mod limits;
pub mod spans;
pub mod unfurl;
