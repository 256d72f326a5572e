//! Weighted and fuzzy utilities over a saturated knowledge base.
//!
//! A [`UtilityBox`] weights atomic attributes for one expert. A choice earns
//! `weight · n` for every attribute it belongs to with entailed degree `n`;
//! the σ-utility only counts attributes entailed with degree 1.

use std::fmt;

use indexmap::IndexMap;
use rust_decimal::Decimal;
use thiserror::Error;

use crate::model::ConceptExpr;
use crate::par::{self, Execution};
use crate::reasoner::{Entailment, QueryError, SaturatedKb};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum UboxError {
    #[error("attribute `{0}` is weighted twice")]
    DuplicateAttribute(String),
    #[error("attribute `{attribute}` has negative weight {weight}")]
    NegativeWeight { attribute: String, weight: Decimal },
}

/// One expert's attribute weights, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UtilityBox {
    expert: String,
    entries: IndexMap<String, Decimal>,
}

impl UtilityBox {
    pub fn new(expert: impl Into<String>) -> Self {
        UtilityBox {
            expert: expert.into(),
            entries: IndexMap::new(),
        }
    }

    pub fn insert(&mut self, attribute: impl Into<String>, weight: Decimal) -> Result<(), UboxError> {
        let attribute = attribute.into();
        if weight.is_sign_negative() && !weight.is_zero() {
            return Err(UboxError::NegativeWeight { attribute, weight });
        }
        if self.entries.contains_key(&attribute) {
            return Err(UboxError::DuplicateAttribute(attribute));
        }
        self.entries.insert(attribute, weight.normalize());
        Ok(())
    }

    pub fn expert(&self) -> &str {
        &self.expert
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Decimal)> + '_ {
        self.entries.iter().map(|(a, &w)| (a.as_str(), w))
    }

    pub fn weight(&self, attribute: &str) -> Option<Decimal> {
        self.entries.get(attribute).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every weight multiplied by `factor`, which must be non-negative.
    pub fn scaled(&self, factor: Decimal) -> Result<UtilityBox, UboxError> {
        let mut out = UtilityBox::new(self.expert.clone());
        for (a, w) in self.entries() {
            out.insert(a, w * factor)?;
        }
        Ok(out)
    }

    /// Entries of both boxes; fails if an attribute appears in both.
    pub fn union(&self, other: &UtilityBox) -> Result<UtilityBox, UboxError> {
        let mut out = self.clone();
        for (a, w) in other.entries() {
            out.insert(a, w)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("attribute `{0}` is not an atomic concept of the knowledge base")]
    UnknownAttribute(String),
    #[error("choice `{0}` is not an individual of the knowledge base")]
    UnknownChoice(String),
    #[error("the choice set is empty")]
    EmptyChoiceSet,
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// Contribution of one weighted attribute to one choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeScore {
    pub attribute: String,
    pub weight: Decimal,
    pub degree: Entailment,
    pub contribution: Decimal,
}

impl AttributeScore {
    pub fn is_decided(&self) -> bool {
        matches!(self.degree, Entailment::Decided(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceScore {
    pub choice: String,
    pub score: Decimal,
    pub attributes: Vec<AttributeScore>,
}

/// Scores of every choice for one expert.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionReport {
    pub expert: String,
    /// Descending score, ties by choice name.
    pub ranking: Vec<ChoiceScore>,
    pub ideal: String,
    /// `(choice, attribute)` pairs whose degree could not be derived.
    pub undecided: Vec<(String, String)>,
}

impl DecisionReport {
    pub fn complete(&self) -> bool {
        self.undecided.is_empty()
    }

    pub fn score(&self, choice: &str) -> Option<Decimal> {
        self.ranking.iter().find(|c| c.choice == choice).map(|c| c.score)
    }
}

impl fmt::Display for DecisionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "expert {}", self.expert)?;
        for (i, c) in self.ranking.iter().enumerate() {
            let mark = if c.choice == self.ideal { " *" } else { "" };
            writeln!(f, "  {}. {} {}{mark}", i + 1, c.choice, c.score)?;
            for a in &c.attributes {
                let n = match a.degree {
                    Entailment::Decided(d) => d.to_string(),
                    Entailment::Undecided => "undecided".to_string(),
                };
                writeln!(
                    f,
                    "       {:<24} {:>8} x {:<9} = {}",
                    a.attribute, a.weight, n, a.contribution
                )?;
            }
        }
        if !self.complete() {
            writeln!(f, "  undecided:")?;
            for (c, a) in &self.undecided {
                writeln!(f, "    {c} : {a}")?;
            }
        }
        Ok(())
    }
}

fn check_attribute(sat: &SaturatedKb, attribute: &str) -> Result<ConceptExpr, DecisionError> {
    if sat.kb().has_concept(attribute) {
        Ok(ConceptExpr::atom(attribute))
    } else {
        Err(DecisionError::UnknownAttribute(attribute.to_string()))
    }
}

fn check_choice(sat: &SaturatedKb, choice: &str) -> Result<(), DecisionError> {
    if sat.kb().has_individual(choice) {
        Ok(())
    } else {
        Err(DecisionError::UnknownChoice(choice.to_string()))
    }
}

/// Sum of the weights of the attributes `choice` belongs to with degree 1.
pub fn sigma_utility(sat: &SaturatedKb, ubox: &UtilityBox, choice: &str) -> Result<Decimal, DecisionError> {
    check_choice(sat, choice)?;
    let mut total = Decimal::ZERO;
    for (attribute, weight) in ubox.entries() {
        let c = check_attribute(sat, attribute)?;
        if let Entailment::Decided(d) = sat.entailed_lower_bound(choice, &c)? {
            if d.is_one() {
                total += weight;
            }
        }
    }
    Ok(total.normalize())
}

/// `weight · n` for the entailed degree `n`; 0 when undecided.
pub fn fuzzy_utility_value(
    sat: &SaturatedKb,
    attribute: &str,
    weight: Decimal,
    choice: &str,
) -> Result<AttributeScore, DecisionError> {
    check_choice(sat, choice)?;
    let c = check_attribute(sat, attribute)?;
    let degree = sat.entailed_lower_bound(choice, &c)?;
    let contribution = match degree {
        Entailment::Decided(n) => (weight * n.value()).normalize(),
        Entailment::Undecided => Decimal::ZERO,
    };
    Ok(AttributeScore {
        attribute: attribute.to_string(),
        weight,
        degree,
        contribution,
    })
}

fn score_choice(sat: &SaturatedKb, ubox: &UtilityBox, choice: &str) -> Result<ChoiceScore, DecisionError> {
    let attributes = ubox
        .entries()
        .map(|(a, w)| fuzzy_utility_value(sat, a, w, choice))
        .collect::<Result<Vec<_>, _>>()?;
    let score = attributes
        .iter()
        .map(|a| a.contribution)
        .sum::<Decimal>()
        .normalize();
    Ok(ChoiceScore {
        choice: choice.to_string(),
        score,
        attributes,
    })
}

/// Sum of the fuzzy utility values of every entry of `ubox`.
pub fn ubox_fuzzy_utility(sat: &SaturatedKb, ubox: &UtilityBox, choice: &str) -> Result<Decimal, DecisionError> {
    check_choice(sat, choice)?;
    Ok(score_choice(sat, ubox, choice)?.score)
}

/// A saturated knowledge base, a set of choices, and one expert's weights.
#[derive(Clone, Debug)]
pub struct FuzzyDecisionBase<'a> {
    sat: &'a SaturatedKb,
    ubox: &'a UtilityBox,
    choices: Vec<String>,
}

impl<'a> FuzzyDecisionBase<'a> {
    /// Duplicate choices are dropped; the rest keep their order.
    pub fn new<I, S>(sat: &'a SaturatedKb, ubox: &'a UtilityBox, choices: I) -> Result<Self, DecisionError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = Vec::<String>::new();
        for c in choices {
            let c = c.into();
            check_choice(sat, &c)?;
            if !seen.contains(&c) {
                seen.push(c);
            }
        }
        for (a, _) in ubox.entries() {
            check_attribute(sat, a)?;
        }
        Ok(FuzzyDecisionBase {
            sat,
            ubox,
            choices: seen,
        })
    }

    /// Every individual of the knowledge base is a choice.
    pub fn all_individuals(sat: &'a SaturatedKb, ubox: &'a UtilityBox) -> Result<Self, DecisionError> {
        Self::new(sat, ubox, sat.kb().individuals().iter().cloned())
    }

    pub fn saturated(&self) -> &SaturatedKb {
        self.sat
    }

    pub fn ubox(&self) -> &UtilityBox {
        self.ubox
    }

    pub fn choices(&self) -> &[String] {
        &self.choices
    }
}

/// The choice with the highest fuzzy utility; ties go to the smallest name.
pub fn ideal_fuzzy_choice(base: &FuzzyDecisionBase<'_>) -> Result<String, DecisionError> {
    Ok(rank(base)?.ideal)
}

pub fn rank(base: &FuzzyDecisionBase<'_>) -> Result<DecisionReport, DecisionError> {
    if base.choices.is_empty() {
        return Err(DecisionError::EmptyChoiceSet);
    }
    let mut ranking = base
        .choices
        .iter()
        .map(|c| score_choice(base.sat, base.ubox, c))
        .collect::<Result<Vec<_>, _>>()?;
    let undecided = ranking
        .iter()
        .flat_map(|c| {
            c.attributes
                .iter()
                .filter(|a| !a.is_decided())
                .map(|a| (c.choice.clone(), a.attribute.clone()))
        })
        .collect();
    ranking.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.choice.cmp(&b.choice)));
    Ok(DecisionReport {
        expert: base.ubox.expert().to_string(),
        ideal: ranking[0].choice.clone(),
        ranking,
        undecided,
    })
}

/// The `(choice, attribute)` pairs whose degree is undecided; empty iff the
/// decision base is complete.
pub fn completeness_report(base: &FuzzyDecisionBase<'_>) -> Result<Vec<(String, String)>, DecisionError> {
    let mut out = Vec::new();
    for c in &base.choices {
        for (a, _) in base.ubox.entries() {
            let concept = check_attribute(base.sat, a)?;
            if base.sat.entailed_lower_bound(c, &concept)? == Entailment::Undecided {
                out.push((c.clone(), a.to_string()));
            }
        }
    }
    Ok(out)
}

/// Ranks the same choices for several experts. Results follow the order of
/// `uboxes`.
pub fn rank_experts(
    mode: Execution,
    sat: &SaturatedKb,
    uboxes: &[UtilityBox],
    choices: &[String],
) -> Vec<Result<DecisionReport, DecisionError>> {
    par::map(mode, uboxes, |u| {
        let base = FuzzyDecisionBase::new(sat, u, choices.iter().cloned())?;
        rank(&base)
    })
}
