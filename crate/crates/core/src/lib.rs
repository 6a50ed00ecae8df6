//! Exact computation with rook-Brauer type diagram algebras: multiplication,
//! link-state ideals, idempotent constructions and the homology of the
//! trivial module.

pub mod diagram;
pub mod family;
pub mod homology;
pub mod idempotent;
pub mod linkstate;
pub mod ring;
pub mod verify;
mod unionfind;

pub use diagram::{Diagram, DiagramError, DiagramFeatures, DoubleNode, Node, ScaledDiagram};
pub use family::{AlgebraContext, AlgebraElement, ContextSpec, Family, FamilyError};
pub use linkstate::{Constraint, LinkState, LinkStateError};
pub use ring::{RingElem, RingError, RingSpec};
