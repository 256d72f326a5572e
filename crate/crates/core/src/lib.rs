//! Fuzzy decision bases.
//!
//! A knowledge base whose concept memberships carry degrees in `[0, 1]` is
//! parsed from text ([`text`]), saturated into sound degree intervals under
//! standard fuzzy logic ([`reasoner`]), and used to score and rank choices
//! against an expert's weighted attributes ([`decision`]).
//!
//! ```
//! use fdlb::{decision, reasoner, text};
//!
//! let kb = text::parse_kb(
//!     "assert t1 : Light @ 0.6;\n\
//!      assert t2 : Light;\n",
//! )
//! .unwrap();
//! let ubox = text::parse_ubox("ubox buyer { Light = 40; }").unwrap();
//! let sat = reasoner::saturate(&kb).unwrap();
//! let base = decision::FuzzyDecisionBase::new(&sat, &ubox, ["t1", "t2"]).unwrap();
//! let report = decision::rank(&base).unwrap();
//! assert_eq!(report.ideal, "t2");
//! assert_eq!(report.ranking[1].score.to_string(), "24");
//! ```

pub mod decision;
pub mod model;
pub mod par;
pub mod reasoner;
pub mod text;

pub use model::{
    Comparator, ConceptExpr, ConcretePredicate, Degree, DegreeInterval, KnowledgeBase, Quantity,
};
