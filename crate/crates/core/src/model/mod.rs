//! Value types shared by the parser, reasoner and decision layers.

mod concept;
mod degree;
mod kb;
mod quantity;

pub use concept::ConceptExpr;
pub use degree::{Degree, DegreeInterval, DegreeRangeError, IntervalConflict};
pub use kb::{FuzzyAssertion, FuzzyGci, KbError, KnowledgeBase, RoleAssertion, RoleKind};
pub use quantity::{Comparator, ConcretePredicate, Quantity, UnitMismatch};
