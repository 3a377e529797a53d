pub mod atf;
pub mod classes;
pub mod json;
pub mod scalar;
pub mod triples;

pub use atf::{RationalQuad, SpecializedQuad, SymbolicQuad};
pub use scalar::{Int, QuadExt, Rational};
