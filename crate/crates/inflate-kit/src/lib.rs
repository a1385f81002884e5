//! Sheaves of finite sets on finite posets, generalized inflations of
//! simplicial posets, and exact integer homology for verifying the resulting
//! homotopy wedge decompositions.
//!
//! The pipeline: a [`poset::Poset`] carries an Alexandrov topology whose
//! opens are upper ideals; a [`sheaf::Diagram`] on it is a sheaf of finite
//! sets; [`inflation::completion`] glues the stalks into the étale poset;
//! inflating a simplicial poset along a flabby inhabited diagram produces a
//! space whose homology decomposes over the base's simplices, and
//! [`verify::verify_inflation`] checks that decomposition degree by degree
//! with exact arithmetic.

pub mod error;
pub mod exec;
pub mod homology;
pub mod inflation;
pub mod limits;
pub mod poset;
pub mod sheaf;
pub mod simplicial;
pub mod verify;

pub use error::{Error, Result};
pub use limits::Limits;
