use std::fmt;

/// Which side of a degree interval a derivation tightens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Lower,
    Upper,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::Lower => "lower",
            Bound::Upper => "upper",
        })
    }
}

/// Derivation rules of the saturation calculus. Every rule is sound under
/// min/max/`1 - x` semantics with Kleene-Dienes implication; role assertions
/// are crisp.
///
/// The rules fall into ten families (see [`Rule::family`]):
///
/// | family | rules |
/// |--------|-------|
/// | R1  | asserted lower bounds |
/// | R2  | conjunction: `lo(C⊓D) ≥ min`, `hi(C⊓D) ≤ min`, `lo(C) ≥ lo(C⊓D)`, `hi(C) ≤ hi(C⊓D)` when `lo(D) > hi(C⊓D)` |
/// | R3  | disjunction, the duals of R2 |
/// | R4  | negation: the interval of `¬C` is `[1 - hi(C), 1 - lo(C)]` |
/// | R5  | concrete restriction with a known functional value: exactly 0 or 1 |
/// | R6  | `∃R.C`: `lo ≥ max` over fillers, filler `hi ≤ hi(∃R.C)`; on closed roles also `hi ≤ max` and the single-witness case |
/// | R7  | `∀R.C`: filler `lo ≥ lo(∀R.C)`, `hi(∀R.C) ≤ min` over fillers |
/// | R8  | `∀R.C` on closed roles: `lo ≥ min` over fillers (1 with none), and the single-counterexample case |
/// | R9  | `<C ⊑ D, t>`: `lo(C) > 1 - t` gives `lo(D) ≥ t`; likewise `lo(¬D) > 1 - t` gives `lo(¬C) ≥ t` |
/// | R10 | `⊤` is `[1, 1]`, `⊥` is `[0, 0]` |
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Assertion,
    ConjunctionIntro,
    ConjunctionUpper,
    ConjunctionElim,
    ConjunctionUpperElim,
    DisjunctionIntro,
    DisjunctionUpper,
    DisjunctionUpperElim,
    DisjunctionElim,
    Negation,
    ConcreteValue,
    ExistsIntro,
    ExistsUpperElim,
    ExistsClosedUpper,
    ExistsClosedElim,
    ForallElim,
    ForallUpper,
    ForallClosedIntro,
    ForallClosedUpperElim,
    Inclusion,
    InclusionContrapositive,
    Top,
    Bottom,
}

impl Rule {
    pub fn family(self) -> &'static str {
        use Rule::*;
        match self {
            Assertion => "R1",
            ConjunctionIntro | ConjunctionUpper | ConjunctionElim | ConjunctionUpperElim => "R2",
            DisjunctionIntro | DisjunctionUpper | DisjunctionUpperElim | DisjunctionElim => "R3",
            Negation => "R4",
            ConcreteValue => "R5",
            ExistsIntro | ExistsUpperElim | ExistsClosedUpper | ExistsClosedElim => "R6",
            ForallElim | ForallUpper => "R7",
            ForallClosedIntro | ForallClosedUpperElim => "R8",
            Inclusion | InclusionContrapositive => "R9",
            Top | Bottom => "R10",
        }
    }

    pub fn name(self) -> &'static str {
        use Rule::*;
        match self {
            Assertion => "assertion",
            ConjunctionIntro => "conjunction-up (min)",
            ConjunctionUpper => "conjunction upper bound",
            ConjunctionElim => "conjunction-down",
            ConjunctionUpperElim => "conjunction-down upper bound",
            DisjunctionIntro => "disjunction-up (max)",
            DisjunctionUpper => "disjunction upper bound",
            DisjunctionUpperElim => "disjunction-down upper bound",
            DisjunctionElim => "disjunction-down",
            Negation => "negation",
            ConcreteValue => "concrete restriction",
            ExistsIntro => "exists-up",
            ExistsUpperElim => "exists-down upper bound",
            ExistsClosedUpper => "exists upper bound (closed role)",
            ExistsClosedElim => "exists-down (closed role)",
            ForallElim => "forall-down",
            ForallUpper => "forall upper bound",
            ForallClosedIntro => "forall-up (closed role)",
            ForallClosedUpperElim => "forall-down upper bound (closed role)",
            Inclusion => "inclusion modus ponens",
            InclusionContrapositive => "inclusion modus tollens",
            Top => "axiom of TOP",
            Bottom => "axiom of BOTTOM",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.family(), self.name())
    }
}
