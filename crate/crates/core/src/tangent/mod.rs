//! Tangent-bundle calculus: geodesic spray, lifts, the horizontal/vertical
//! splitting and the primitive bracket families that span the accessibility
//! algebra of an affine connection control system.

mod primitive;
mod split;
mod word;

pub use primitive::{
    accessibility_space, primitive_generators, recursion_coefficients, AccessRanks, Caps, FamilyTag, Primitive,
    PrimitiveSet, TangentError, TangentPoint,
};
pub use split::{geodesic_spray, lift, nabla_h_coeffs, LiftMode, SplitCalculus, SplitField};
pub use word::{BracketWord, WordEvaluator, WordParseError};
