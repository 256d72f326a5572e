use std::collections::BTreeSet;
use std::fmt;

use super::ConcretePredicate;

/// A class description. Structural equality is the identity used throughout
/// the reasoner; [`ConceptExpr::normalize`] gives the canonical form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConceptExpr {
    Top,
    Bottom,
    Atom(String),
    Not(Box<ConceptExpr>),
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    Or(Box<ConceptExpr>, Box<ConceptExpr>),
    /// `∃R.C` over an abstract role.
    Exists(String, Box<ConceptExpr>),
    /// `∃r.P` over a concrete functional role.
    Restriction(String, ConcretePredicate),
    /// `∀R.C` over an abstract role.
    Forall(String, Box<ConceptExpr>),
}

impl ConceptExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        ConceptExpr::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: ConceptExpr) -> Self {
        ConceptExpr::Not(Box::new(c))
    }

    pub fn and(l: ConceptExpr, r: ConceptExpr) -> Self {
        ConceptExpr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: ConceptExpr, r: ConceptExpr) -> Self {
        ConceptExpr::Or(Box::new(l), Box::new(r))
    }

    pub fn exists(role: impl Into<String>, c: ConceptExpr) -> Self {
        ConceptExpr::Exists(role.into(), Box::new(c))
    }

    pub fn forall(role: impl Into<String>, c: ConceptExpr) -> Self {
        ConceptExpr::Forall(role.into(), Box::new(c))
    }

    pub fn restriction(role: impl Into<String>, p: ConcretePredicate) -> Self {
        ConceptExpr::Restriction(role.into(), p)
    }

    /// Negation normal form with canonically ordered `AND`/`OR` operands.
    ///
    /// Negation is pushed through `AND`, `OR` and the quantifiers using the
    /// min/max/`1 - x` dualities; it survives only directly above atoms and
    /// concrete restrictions. `NOT TOP` and `NOT BOTTOM` become `BOTTOM` and
    /// `TOP`.
    pub fn normalize(&self) -> ConceptExpr {
        nnf(self, false)
    }

    /// The normalized form of `NOT self`.
    pub fn dual(&self) -> ConceptExpr {
        nnf(self, true)
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            ConceptExpr::Not(inner) => matches!(
                **inner,
                ConceptExpr::Atom(_)
                    | ConceptExpr::Restriction(..)
                    | ConceptExpr::Top
                    | ConceptExpr::Bottom
            ),
            ConceptExpr::And(l, r) | ConceptExpr::Or(l, r) => l.is_nnf() && r.is_nnf(),
            ConceptExpr::Exists(_, c) | ConceptExpr::Forall(_, c) => c.is_nnf(),
            _ => true,
        }
    }

    /// Pre-order traversal of all subexpressions, including `self`.
    pub fn subexpressions(&self) -> Vec<&ConceptExpr> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            out.push(e);
            match e {
                ConceptExpr::Not(c) | ConceptExpr::Exists(_, c) | ConceptExpr::Forall(_, c) => {
                    stack.push(c)
                }
                ConceptExpr::And(l, r) | ConceptExpr::Or(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
                _ => {}
            }
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        self.subexpressions()
            .into_iter()
            .filter_map(|e| match e {
                ConceptExpr::Atom(a) => Some(a.as_str()),
                _ => None,
            })
            .collect()
    }

    fn precedence(&self) -> u8 {
        match self {
            ConceptExpr::Or(..) => 0,
            ConceptExpr::And(..) => 1,
            _ => 2,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            ConceptExpr::Top => f.write_str("TOP"),
            ConceptExpr::Bottom => f.write_str("BOTTOM"),
            ConceptExpr::Atom(a) => f.write_str(a),
            ConceptExpr::Not(c) => {
                f.write_str("NOT ")?;
                c.fmt_at(f, 2)
            }
            // Both operators are left-associative, so a right operand of the
            // same operator needs parentheses.
            ConceptExpr::And(l, r) => {
                l.fmt_at(f, 1)?;
                f.write_str(" AND ")?;
                r.fmt_at(f, 2)
            }
            ConceptExpr::Or(l, r) => {
                l.fmt_at(f, 0)?;
                f.write_str(" OR ")?;
                r.fmt_at(f, 1)
            }
            ConceptExpr::Exists(role, c) => {
                write!(f, "EXISTS {role} . ")?;
                c.fmt_at(f, 2)
            }
            ConceptExpr::Restriction(role, p) => write!(f, "EXISTS {role} . {p}"),
            ConceptExpr::Forall(role, c) => {
                write!(f, "FORALL {role} . ")?;
                c.fmt_at(f, 2)
            }
        }
    }
}

fn canonical_pair(l: ConceptExpr, r: ConceptExpr) -> (Box<ConceptExpr>, Box<ConceptExpr>) {
    if l <= r {
        (Box::new(l), Box::new(r))
    } else {
        (Box::new(r), Box::new(l))
    }
}

fn nnf(e: &ConceptExpr, negated: bool) -> ConceptExpr {
    use ConceptExpr::*;
    match (e, negated) {
        (Top, false) | (Bottom, true) => Top,
        (Top, true) | (Bottom, false) => Bottom,
        (Atom(_), false) | (Restriction(..), false) => e.clone(),
        (Atom(_), true) | (Restriction(..), true) => Not(Box::new(e.clone())),
        (Not(c), n) => nnf(c, !n),
        (And(l, r), false) | (Or(l, r), true) => {
            let (a, b) = canonical_pair(nnf(l, negated), nnf(r, negated));
            And(a, b)
        }
        (Or(l, r), false) | (And(l, r), true) => {
            let (a, b) = canonical_pair(nnf(l, negated), nnf(r, negated));
            Or(a, b)
        }
        (Exists(role, c), false) | (Forall(role, c), true) => {
            Exists(role.clone(), Box::new(nnf(c, negated)))
        }
        (Forall(role, c), false) | (Exists(role, c), true) => {
            Forall(role.clone(), Box::new(nnf(c, negated)))
        }
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
