//! Entailed membership degrees by monotone saturation.
//!
//! Fuzzy interpretations map each individual and concept to a degree in
//! `[0, 1]` (conjunction is `min`, disjunction `max`, negation `1 - x`,
//! inclusion `inf max(1 - C, D)`, `∃` a supremum over role fillers). They are
//! not enumerated here. Instead a sound derivation calculus ([`Rule`])
//! narrows a [`DegreeInterval`] per `(individual, expression)` pair until no
//! rule applies; the true degree lies inside that interval in every model.
//!
//! The closure contains every concept of the knowledge base, every atom,
//! their subexpressions, and the normalized negation of each. Derived
//! degrees are drawn from the finite set generated by the input degrees
//! under `min`, `max` and `1 - x`, and intervals only shrink, so saturation
//! always terminates. The least fixpoint is unique, which makes the result
//! independent of statement order.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::model::{
    ConceptExpr, Degree, DegreeInterval, FuzzyAssertion, FuzzyGci, KbError, KnowledgeBase,
    Quantity,
};
use crate::par::{self, Execution};

mod engine;
mod rules;

use engine::{Engine, EventId, EventOrigin, ExprId, IndId};
pub use rules::{Bound, Rule};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
    #[error("ill-formed concept: {0}")]
    IllFormed(#[from] KbError),
    #[error("query exposed an inconsistency")]
    Inconsistent(ConsistencyReport),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("no derivation for `{individual} : {concept}`: its interval is [0, 1]")]
    NoDerivation {
        individual: String,
        concept: ConceptExpr,
    },
}

/// The knowledge-base fact a leaf derivation rests on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Assertion(FuzzyAssertion),
    Inclusion(FuzzyGci),
    ConcreteValue { role: String, value: Quantity },
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Assertion(a) => write!(f, "assert {a}"),
            Origin::Inclusion(g) => write!(f, "axiom {g}"),
            Origin::ConcreteValue { role, value } => write!(f, "{role} = {value}"),
        }
    }
}

/// One derived bound with the derivations of its premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub individual: String,
    pub concept: ConceptExpr,
    pub bound: Bound,
    pub value: Degree,
    pub rule: Rule,
    pub origin: Option<Origin>,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    /// Recomputes this bound from its premises. Returns `None` if any node of
    /// the tree does not reproduce its recorded value or a side condition
    /// fails.
    pub fn replay(&self) -> Option<Degree> {
        let vals = self
            .premises
            .iter()
            .map(Derivation::replay)
            .collect::<Option<Vec<_>>>()?;
        let first = vals.first().copied();
        let rest = vals.get(1..).unwrap_or_default();
        use Rule::*;
        let v = match self.rule {
            Assertion => match &self.origin {
                Some(Origin::Assertion(a)) => a.degree,
                _ => return None,
            },
            ConcreteValue => match (&self.concept, &self.origin) {
                (ConceptExpr::Restriction(_, p), Some(Origin::ConcreteValue { value, .. })) => {
                    p.degree(value).ok()?
                }
                _ => return None,
            },
            Top => Degree::ONE,
            Bottom => Degree::ZERO,
            ConjunctionIntro | ForallClosedIntro => vals.iter().copied().min().unwrap_or(Degree::ONE),
            DisjunctionUpper | ExistsClosedUpper => vals.iter().copied().max().unwrap_or(Degree::ZERO),
            Negation => first?.complement(),
            Inclusion | InclusionContrapositive => match &self.origin {
                Some(Origin::Inclusion(g)) if first? > g.degree.complement() => g.degree,
                _ => return None,
            },
            ConjunctionUpperElim | ForallClosedUpperElim => {
                let v = first?;
                if !rest.iter().all(|&o| o > v) {
                    return None;
                }
                v
            }
            DisjunctionElim | ExistsClosedElim => {
                let v = first?;
                if !rest.iter().all(|&o| o < v) {
                    return None;
                }
                v
            }
            ConjunctionUpper | ConjunctionElim | DisjunctionIntro | DisjunctionUpperElim
            | ExistsIntro | ExistsUpperElim | ForallElim | ForallUpper => first?,
        };
        (v == self.value).then_some(v)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    /// Depth-first iterator over the nodes of the tree.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = vec![self];
        for p in &self.premises {
            out.extend(p.nodes());
        }
        out
    }

    fn write_tree(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let side = match self.bound {
            Bound::Lower => "lo",
            Bound::Upper => "hi",
        };
        write!(
            f,
            "{:indent$}{}: {side}({} : {}) = {}",
            "",
            self.rule,
            self.individual,
            self.concept,
            self.value,
            indent = depth * 2
        )?;
        if let Some(o) = &self.origin {
            write!(f, "  [{o}]")?;
        }
        writeln!(f)?;
        for p in &self.premises {
            p.write_tree(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_tree(f, 0)
    }
}

/// Derivations behind the current interval of one `(individual, concept)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub individual: String,
    pub concept: ConceptExpr,
    pub interval: DegreeInterval,
    pub lower: Option<Derivation>,
    pub upper: Option<Derivation>,
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} : {}  {}", self.individual, self.concept, self.interval)?;
        if let Some(d) = &self.lower {
            writeln!(f, "lower bound {}", d.value)?;
            d.write_tree(f, 1)?;
        }
        if let Some(d) = &self.upper {
            writeln!(f, "upper bound {}", d.value)?;
            d.write_tree(f, 1)?;
        }
        Ok(())
    }
}

/// Two derivations that cannot both hold: `lower.value > upper.value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub individual: String,
    pub concept: ConceptExpr,
    pub lower: Derivation,
    pub upper: Derivation,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "conflict on {} : {}: lower bound {} exceeds upper bound {}",
            self.individual, self.concept, self.lower.value, self.upper.value
        )?;
        self.lower.write_tree(f, 1)?;
        self.upper.write_tree(f, 1)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub conflicts: Vec<Conflict>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.conflicts.is_empty()
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_consistent() {
            return writeln!(f, "consistent");
        }
        writeln!(f, "inconsistent: {} conflict(s)", self.conflicts.len())?;
        for c in &self.conflicts {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Whether a membership degree can be read off the saturated knowledge base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entailment {
    /// The interval was tightened; the degree is its lower bound.
    Decided(Degree),
    /// The interval is still `[0, 1]`.
    Undecided,
}

impl Entailment {
    pub fn degree(self) -> Option<Degree> {
        match self {
            Entailment::Decided(d) => Some(d),
            Entailment::Undecided => None,
        }
    }
}

/// A consistent knowledge base at its fixpoint. Immutable; queries outside
/// the closure work on a private extension.
#[derive(Clone, Debug)]
pub struct SaturatedKb {
    kb: KnowledgeBase,
    assertions: Vec<FuzzyAssertion>,
    gcis: Vec<FuzzyGci>,
    engine: Engine,
}

fn conflicts_of(kb: &KnowledgeBase, engine: &Engine) -> ConsistencyReport {
    let view = View {
        assertions: kb.assertions().cloned().collect(),
        gcis: kb.tbox().cloned().collect(),
        engine,
    };
    ConsistencyReport {
        conflicts: engine
            .conflicts
            .iter()
            .map(|c| Conflict {
                individual: engine.individuals[c.ind].clone(),
                concept: engine.exprs[c.expr].clone(),
                lower: view.derivation(c.lo_event),
                upper: view.derivation(c.hi_event),
            })
            .collect(),
    }
}

/// Saturates `kb`. Fails with the list of conflicts if the knowledge base is
/// inconsistent.
pub fn saturate(kb: &KnowledgeBase) -> Result<SaturatedKb, ConsistencyReport> {
    saturate_with(kb, &[])
}

/// Like [`saturate`], with `extra` expressions added to the closure up front.
pub fn saturate_with(
    kb: &KnowledgeBase,
    extra: &[ConceptExpr],
) -> Result<SaturatedKb, ConsistencyReport> {
    let engine = Engine::new(kb, extra);
    if !engine.conflicts.is_empty() {
        return Err(conflicts_of(kb, &engine));
    }
    Ok(SaturatedKb {
        kb: kb.clone(),
        assertions: kb.assertions().cloned().collect(),
        gcis: kb.tbox().cloned().collect(),
        engine,
    })
}

/// Saturates many knowledge bases, in parallel when enabled.
pub fn saturate_all(
    mode: Execution,
    kbs: &[KnowledgeBase],
) -> Vec<Result<SaturatedKb, ConsistencyReport>> {
    par::map(mode, kbs, saturate)
}

pub fn check_consistency(kb: &KnowledgeBase) -> ConsistencyReport {
    match saturate(kb) {
        Ok(sat) => sat.check_consistency(),
        Err(report) => report,
    }
}

struct View<'a> {
    assertions: Vec<FuzzyAssertion>,
    gcis: Vec<FuzzyGci>,
    engine: &'a Engine,
}

impl View<'_> {
    fn derivation(&self, ev: EventId) -> Derivation {
        let e = &self.engine.events[ev];
        let origin = match e.origin {
            EventOrigin::None => None,
            EventOrigin::Assertion(i) => Some(Origin::Assertion(self.assertions[i].clone())),
            EventOrigin::Inclusion(g) => Some(Origin::Inclusion(self.gcis[g].clone())),
            EventOrigin::ConcreteValue(role) => {
                let value = self.engine.value(role, e.ind).cloned();
                value.map(|value| Origin::ConcreteValue {
                    role: self.engine.roles[role].name.clone(),
                    value,
                })
            }
        };
        Derivation {
            individual: self.engine.individuals[e.ind].clone(),
            concept: self.engine.exprs[e.expr].clone(),
            bound: e.bound,
            value: e.value,
            rule: e.rule,
            origin,
            premises: e.premises.iter().map(|&p| self.derivation(p)).collect(),
        }
    }
}

impl SaturatedKb {
    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    /// Always consistent: inconsistent knowledge bases never saturate.
    pub fn check_consistency(&self) -> ConsistencyReport {
        ConsistencyReport::default()
    }

    fn view<'a>(&'a self, engine: &'a Engine) -> View<'a> {
        View {
            assertions: self.assertions.clone(),
            gcis: self.gcis.clone(),
            engine,
        }
    }

    /// Resolves `(individual, concept)` to a cell, extending a private copy of
    /// the fixpoint when the concept is outside the closure.
    fn locate(
        &self,
        individual: &str,
        concept: &ConceptExpr,
    ) -> Result<(Cow<'_, Engine>, IndId, ExprId), QueryError> {
        let ind = self
            .engine
            .individual(individual)
            .ok_or_else(|| QueryError::UnknownIndividual(individual.to_string()))?;
        self.kb.validate_concept(concept)?;
        let nnf = concept.normalize();
        if let Some(expr) = self.engine.lookup(&nnf) {
            return Ok((Cow::Borrowed(&self.engine), ind, expr));
        }
        let mut local = self.engine.clone();
        let expr = local.extend(&nnf);
        if !local.conflicts.is_empty() {
            return Err(QueryError::Inconsistent(conflicts_of(&self.kb, &local)));
        }
        Ok((Cow::Owned(local), ind, expr))
    }

    pub fn instance_interval(
        &self,
        individual: &str,
        concept: &ConceptExpr,
    ) -> Result<DegreeInterval, QueryError> {
        let (engine, ind, expr) = self.locate(individual, concept)?;
        Ok(engine.cell(ind, expr).interval)
    }

    /// The entailed degree, or `Undecided` when nothing narrowed `[0, 1]`.
    /// A derived upper bound of 0 decides the degree as 0.
    pub fn entailed_lower_bound(
        &self,
        individual: &str,
        concept: &ConceptExpr,
    ) -> Result<Entailment, QueryError> {
        let iv = self.instance_interval(individual, concept)?;
        Ok(if iv.is_vacuous() {
            Entailment::Undecided
        } else {
            Entailment::Decided(iv.lo())
        })
    }

    /// Derivation trees for the current lower and upper bound.
    pub fn explain(
        &self,
        individual: &str,
        concept: &ConceptExpr,
    ) -> Result<Explanation, ExplainError> {
        let (engine, ind, expr) = self.locate(individual, concept)?;
        let cell = engine.cell(ind, expr);
        if cell.interval.is_vacuous() {
            return Err(ExplainError::NoDerivation {
                individual: individual.to_string(),
                concept: concept.clone(),
            });
        }
        let view = self.view(&engine);
        Ok(Explanation {
            individual: individual.to_string(),
            concept: engine.exprs[expr].clone(),
            interval: cell.interval,
            lower: cell.lo_event.map(|e| view.derivation(e)),
            upper: cell.hi_event.map(|e| view.derivation(e)),
        })
    }

    /// Every interval in the closure, keyed by individual and normalized
    /// expression.
    pub fn interval_map(&self) -> BTreeMap<(String, ConceptExpr), DegreeInterval> {
        let e = &self.engine;
        let mut out = BTreeMap::new();
        for expr in 0..e.expr_count() {
            for (ind, name) in e.individuals.iter().enumerate() {
                out.insert(
                    (name.clone(), e.exprs[expr].clone()),
                    e.cell(ind, expr).interval,
                );
            }
        }
        out
    }

    /// Every degree that appears as a derived bound.
    pub fn derived_degrees(&self) -> BTreeSet<Degree> {
        self.engine.events.iter().map(|e| e.value).collect()
    }

    pub fn derivation_count(&self) -> usize {
        self.engine.events.len()
    }

    /// Runs every rule again from the fixpoint.
    pub fn resaturate(&self) -> SaturatedKb {
        let mut engine = self.engine.clone();
        engine.rerun();
        SaturatedKb {
            engine,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_concept, parse_kb};

    fn sat(text: &str) -> SaturatedKb {
        saturate(&parse_kb(text).unwrap()).unwrap()
    }

    fn interval(s: &SaturatedKb, ind: &str, concept: &str) -> DegreeInterval {
        let c = parse_concept(concept, s.kb()).unwrap();
        s.instance_interval(ind, &c).unwrap()
    }

    fn d(s: &str) -> Degree {
        Degree::parse(s).unwrap()
    }

    #[test]
    fn gci_chain() {
        let s = sat("assert d : A @ 0.9;\n\
                     axiom A SUBSUMED-BY B @ 0.7;\n\
                     axiom B SUBSUMED-BY C @ 0.8;");
        assert_eq!(interval(&s, "d", "B").lo(), d("0.7"));
        assert_eq!(interval(&s, "d", "C").lo(), d("0.8"));
    }

    #[test]
    fn gci_needs_premise_above_complement() {
        // 0.3 is not above 1 - 0.6, so nothing is derived.
        let s = sat("assert d : A @ 0.3;\naxiom A SUBSUMED-BY B @ 0.6;");
        assert!(interval(&s, "d", "B").is_vacuous());
    }

    #[test]
    fn clash_between_assertion_and_negation() {
        let kb = parse_kb("assert a : C @ 0.7;\nassert a : NOT C @ 0.5;").unwrap();
        let report = saturate(&kb).unwrap_err();
        assert!(!report.is_consistent());
        let c = &report.conflicts[0];
        assert_eq!(c.individual, "a");
        assert!(c.lower.value > c.upper.value);
        assert_eq!(c.lower.replay(), Some(c.lower.value));
        assert_eq!(c.upper.replay(), Some(c.upper.value));
    }

    #[test]
    fn top_and_bottom() {
        let s = sat("assert a : A;");
        assert_eq!(interval(&s, "a", "TOP"), DegreeInterval::exact(Degree::ONE));
        assert_eq!(interval(&s, "a", "BOTTOM"), DegreeInterval::exact(Degree::ZERO));
        let ex = s.explain("a", &ConceptExpr::Top).unwrap();
        let lower = ex.lower.unwrap();
        assert_eq!(lower.rule, Rule::Top);
        assert_eq!(lower.size(), 1);
        assert!(ex.upper.is_none());
        assert!(saturate(&parse_kb("assert a : BOTTOM @ 0.1;").unwrap()).is_err());
    }

    #[test]
    fn unknown_pairs_are_vacuous() {
        let s = sat("assert a : A;\nassert b : B;");
        assert!(interval(&s, "b", "A").is_vacuous());
        assert!(matches!(
            s.explain("b", &ConceptExpr::atom("A")),
            Err(ExplainError::NoDerivation { .. })
        ));
        assert_eq!(
            s.instance_interval("zed", &ConceptExpr::atom("A")),
            Err(QueryError::UnknownIndividual("zed".into()))
        );
        assert!(matches!(
            s.instance_interval("a", &ConceptExpr::exists("r", ConceptExpr::Top)),
            Err(QueryError::IllFormed(_))
        ));
    }

    #[test]
    fn conjunction_and_disjunction_on_the_fly() {
        let s = sat("assert a : A @ 0.5;\nassert a : B @ 0.9;\nassert a : NOT C @ 0.8;");
        assert_eq!(interval(&s, "a", "A AND B").lo(), d("0.5"));
        assert_eq!(interval(&s, "a", "A OR B").lo(), d("0.9"));
        assert_eq!(interval(&s, "a", "B AND C").hi(), d("0.2"));
        assert_eq!(interval(&s, "a", "NOT (B AND C)").lo(), d("0.8"));
    }

    #[test]
    fn disjointness_via_bottom() {
        let kb = parse_kb("axiom P AND W SUBSUMED-BY BOTTOM;\nassert e : P;").unwrap();
        let s = saturate(&kb).unwrap();
        assert_eq!(interval(&s, "e", "W"), DegreeInterval::exact(Degree::ZERO));
        let mut clash = kb.clone();
        clash
            .assert_concept("e", ConceptExpr::atom("W"), Degree::ONE)
            .unwrap();
        let report = check_consistency(&clash);
        assert!(!report.is_consistent());
        let mentions_axiom = report.conflicts.iter().any(|c| {
            c.lower
                .nodes()
                .into_iter()
                .chain(c.upper.nodes())
                .any(|n| matches!(&n.origin, Some(Origin::Inclusion(g)) if g.rhs == ConceptExpr::Bottom))
        });
        assert!(mentions_axiom, "{report}");
    }

    #[test]
    fn quantifiers_over_fillers() {
        let open = sat("role r : abstract;\n\
                        assert (a, b) : r;\n\
                        assert b : C @ 0.7;\n\
                        assert a : FORALL r . D @ 0.6;");
        assert_eq!(interval(&open, "a", "EXISTS r . C").lo(), d("0.7"));
        assert_eq!(interval(&open, "b", "D").lo(), d("0.6"));
        // Without closure nothing bounds FORALL from below.
        assert!(interval(&open, "a", "FORALL r . C").lo().is_zero());

        let closed = sat("role r : abstract closed;\n\
                          assert (a, b) : r;\n\
                          assert (a, c) : r;\n\
                          assert b : C @ 0.7;\n\
                          assert c : C @ 0.4;\n\
                          assert lonely : TOP;");
        assert_eq!(interval(&closed, "a", "FORALL r . C").lo(), d("0.4"));
        assert_eq!(interval(&closed, "lonely", "FORALL r . C").lo(), Degree::ONE);
        assert_eq!(interval(&closed, "lonely", "EXISTS r . C").hi(), Degree::ZERO);
    }

    #[test]
    fn concrete_values_are_crisp() {
        let s = sat("role w : concrete(g);\nassert (t, 710 g) : w;");
        assert_eq!(interval(&s, "t", "EXISTS w LE 900 g"), DegreeInterval::exact(Degree::ONE));
        assert_eq!(interval(&s, "t", "EXISTS w GT 900 g"), DegreeInterval::exact(Degree::ZERO));
        assert_eq!(
            interval(&s, "t", "NOT EXISTS w GT 900 g"),
            DegreeInterval::exact(Degree::ONE)
        );
        let ex = s
            .explain("t", &parse_concept("EXISTS w LE 900 g", s.kb()).unwrap())
            .unwrap();
        assert_eq!(ex.lower.as_ref().unwrap().rule, Rule::ConcreteValue);
        assert_eq!(ex.lower.unwrap().replay(), Some(Degree::ONE));
    }

    #[test]
    fn closure_interns_each_expression_once() {
        // The negated restriction is met before the restriction itself.
        let s = sat("role w : concrete(g);\n\
                     axiom NOT EXISTS w GT 900 g SUBSUMED-BY A;\n\
                     assert t : EXISTS w GT 900 g AND B;");
        let distinct: BTreeSet<_> = s.engine.exprs.iter().collect();
        assert_eq!(distinct.len(), s.engine.expr_count());
        let again = s.resaturate();
        assert_eq!(again.derivation_count(), s.derivation_count());
    }

    #[test]
    fn resaturation_is_a_no_op() {
        let s = sat("assert d : A @ 0.9;\naxiom A SUBSUMED-BY B @ 0.7;");
        let again = s.resaturate();
        assert_eq!(again.interval_map(), s.interval_map());
        assert_eq!(again.derivation_count(), s.derivation_count());
    }
}
