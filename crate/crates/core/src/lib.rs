//! Even lattices, discriminant forms and lattice embeddings, with
//! applications to hyper-Kähler lattice theory.

pub mod arith;
pub mod catalog;
pub mod discform;
pub mod dsl;
pub mod embed;
pub mod error;
pub mod hk;
pub mod lattice;
pub mod numtheory;
pub mod par;
pub mod search;

pub use discform::{
    discriminant_form, forms_equivalent, DiscriminantGroup, FiniteQuadraticForm, GenusDescriptor, QmodTwoZ,
};
pub use dsl::parse_lattice_expr;
pub use error::{Error, Result};
pub use lattice::{Lattice, LatticeVector, PrimitiveEmbedding, Signature};
