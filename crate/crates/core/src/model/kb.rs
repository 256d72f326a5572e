use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{ConceptExpr, Degree, Quantity};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleKind {
    /// Ordinary role between individuals. A closed role's asserted fillers
    /// are taken to be all of its fillers.
    Abstract { closed: bool },
    /// Functional role into a concrete domain with a fixed unit.
    Concrete { unit: String },
}

/// Fuzzy general concept inclusion `<lhs ⊑ rhs, degree>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuzzyGci {
    pub lhs: ConceptExpr,
    pub rhs: ConceptExpr,
    pub degree: Degree,
}

impl FuzzyGci {
    /// A degree-0 inclusion is read as "members of `lhs` are not members of
    /// `rhs` at all" and stored as the crisp inclusion `lhs ⊑ NOT rhs`.
    pub fn new(lhs: ConceptExpr, rhs: ConceptExpr, degree: Degree) -> Self {
        if degree.is_zero() {
            FuzzyGci {
                lhs,
                rhs: ConceptExpr::not(rhs),
                degree: Degree::ONE,
            }
        } else {
            FuzzyGci { lhs, rhs, degree }
        }
    }
}

impl fmt::Display for FuzzyGci {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} SUBSUMED-BY {} @ {}", self.lhs, self.rhs, self.degree)
    }
}

/// `<individual : concept, degree>`, a lower bound on membership.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuzzyAssertion {
    pub individual: String,
    pub concept: ConceptExpr,
    pub degree: Degree,
}

impl fmt::Display for FuzzyAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} @ {}", self.individual, self.concept, self.degree)
    }
}

/// Crisp role assertion `(subject, object) : role`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleAssertion {
    pub subject: String,
    pub object: String,
    pub role: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("role `{0}` is not declared")]
    UndeclaredRole(String),
    #[error("role `{0}` is declared twice")]
    DuplicateRole(String),
    #[error("role `{role}` is not {expected}")]
    RoleKind { role: String, expected: &'static str },
    #[error("unit mismatch on role `{role}`: declared `{expected}`, found `{found}`")]
    UnitMismatch {
        role: String,
        expected: String,
        found: String,
    },
    #[error("individual `{individual}` already has a value for functional role `{role}`")]
    DuplicateConcreteFact { individual: String, role: String },
}

/// Role declarations, TBox and ABox. Every mutation is validated, so a value
/// of this type always satisfies the declaration and functionality
/// invariants. Axioms and assertions are kept as sets, so two knowledge bases
/// are equal regardless of the order statements were added in.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    roles: BTreeMap<String, RoleKind>,
    concepts: BTreeSet<String>,
    individuals: BTreeSet<String>,
    tbox: BTreeSet<FuzzyGci>,
    assertions: BTreeSet<FuzzyAssertion>,
    role_assertions: BTreeSet<RoleAssertion>,
    concrete_facts: BTreeMap<(String, String), Quantity>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
            && self.concepts.is_empty()
            && self.tbox.is_empty()
            && self.assertions.is_empty()
            && self.role_assertions.is_empty()
            && self.concrete_facts.is_empty()
    }

    pub fn declare_role(&mut self, name: impl Into<String>, kind: RoleKind) -> Result<(), KbError> {
        let name = name.into();
        if self.roles.contains_key(&name) {
            return Err(KbError::DuplicateRole(name));
        }
        self.roles.insert(name, kind);
        Ok(())
    }

    pub fn declare_concept(&mut self, name: impl Into<String>) {
        self.concepts.insert(name.into());
    }

    /// Checks that every role in `c` is declared with the right kind and that
    /// concrete thresholds use the role's unit.
    pub fn validate_concept(&self, c: &ConceptExpr) -> Result<(), KbError> {
        for e in c.subexpressions() {
            match e {
                ConceptExpr::Exists(role, _) | ConceptExpr::Forall(role, _) => {
                    match self.role(role)? {
                        RoleKind::Abstract { .. } => {}
                        RoleKind::Concrete { .. } => {
                            return Err(KbError::RoleKind {
                                role: role.clone(),
                                expected: "an abstract role",
                            })
                        }
                    }
                }
                ConceptExpr::Restriction(role, p) => {
                    self.check_unit(role, &p.threshold.unit)?;
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn role(&self, role: &str) -> Result<&RoleKind, KbError> {
        self.roles
            .get(role)
            .ok_or_else(|| KbError::UndeclaredRole(role.to_string()))
    }

    fn check_unit(&self, role: &str, unit: &str) -> Result<(), KbError> {
        match self.role(role)? {
            RoleKind::Concrete { unit: declared } if declared == unit => Ok(()),
            RoleKind::Concrete { unit: declared } => Err(KbError::UnitMismatch {
                role: role.to_string(),
                expected: declared.clone(),
                found: unit.to_string(),
            }),
            RoleKind::Abstract { .. } => Err(KbError::RoleKind {
                role: role.to_string(),
                expected: "a concrete functional role",
            }),
        }
    }

    fn register_atoms(&mut self, c: &ConceptExpr) {
        for a in c.atoms() {
            if !self.concepts.contains(a) {
                self.concepts.insert(a.to_string());
            }
        }
    }

    pub fn add_gci(&mut self, gci: FuzzyGci) -> Result<(), KbError> {
        self.validate_concept(&gci.lhs)?;
        self.validate_concept(&gci.rhs)?;
        self.register_atoms(&gci.lhs);
        self.register_atoms(&gci.rhs);
        self.tbox.insert(gci);
        Ok(())
    }

    /// `lhs ≡ rhs` becomes the two inclusions `lhs ⊑ rhs` and `rhs ⊑ lhs`.
    pub fn add_equivalence(
        &mut self,
        lhs: ConceptExpr,
        rhs: ConceptExpr,
        degree: Degree,
    ) -> Result<(), KbError> {
        self.validate_concept(&lhs)?;
        self.validate_concept(&rhs)?;
        self.add_gci(FuzzyGci::new(lhs.clone(), rhs.clone(), degree))?;
        self.add_gci(FuzzyGci::new(rhs, lhs, degree))
    }

    pub fn assert_concept(
        &mut self,
        individual: impl Into<String>,
        concept: ConceptExpr,
        degree: Degree,
    ) -> Result<(), KbError> {
        self.validate_concept(&concept)?;
        self.register_atoms(&concept);
        let individual = individual.into();
        self.individuals.insert(individual.clone());
        self.assertions.insert(FuzzyAssertion {
            individual,
            concept,
            degree,
        });
        Ok(())
    }

    pub fn assert_role(
        &mut self,
        subject: impl Into<String>,
        object: impl Into<String>,
        role: impl Into<String>,
    ) -> Result<(), KbError> {
        let role = role.into();
        if let RoleKind::Concrete { .. } = self.role(&role)? {
            return Err(KbError::RoleKind {
                role,
                expected: "an abstract role",
            });
        }
        let (subject, object) = (subject.into(), object.into());
        self.individuals.insert(subject.clone());
        self.individuals.insert(object.clone());
        self.role_assertions.insert(RoleAssertion {
            subject,
            object,
            role,
        });
        Ok(())
    }

    pub fn assert_value(
        &mut self,
        individual: impl Into<String>,
        value: Quantity,
        role: impl Into<String>,
    ) -> Result<(), KbError> {
        let (individual, role) = (individual.into(), role.into());
        self.check_unit(&role, &value.unit)?;
        let key = (individual.clone(), role.clone());
        if self.concrete_facts.contains_key(&key) {
            return Err(KbError::DuplicateConcreteFact { individual, role });
        }
        self.individuals.insert(individual);
        self.concrete_facts.insert(key, value);
        Ok(())
    }

    pub fn roles(&self) -> impl Iterator<Item = (&str, &RoleKind)> {
        self.roles.iter().map(|(n, k)| (n.as_str(), k))
    }

    pub fn role_kind(&self, role: &str) -> Option<&RoleKind> {
        self.roles.get(role)
    }

    pub fn concepts(&self) -> &BTreeSet<String> {
        &self.concepts
    }

    pub fn has_concept(&self, name: &str) -> bool {
        self.concepts.contains(name)
    }

    pub fn individuals(&self) -> &BTreeSet<String> {
        &self.individuals
    }

    pub fn has_individual(&self, name: &str) -> bool {
        self.individuals.contains(name)
    }

    pub fn tbox(&self) -> impl Iterator<Item = &FuzzyGci> {
        self.tbox.iter()
    }

    pub fn assertions(&self) -> impl Iterator<Item = &FuzzyAssertion> {
        self.assertions.iter()
    }

    pub fn role_assertions(&self) -> impl Iterator<Item = &RoleAssertion> {
        self.role_assertions.iter()
    }

    /// `(individual, role, value)` triples.
    pub fn concrete_facts(&self) -> impl Iterator<Item = (&str, &str, &Quantity)> {
        self.concrete_facts
            .iter()
            .map(|((i, r), q)| (i.as_str(), r.as_str(), q))
    }

    pub fn concrete_value(&self, individual: &str, role: &str) -> Option<&Quantity> {
        self.concrete_facts
            .get(&(individual.to_string(), role.to_string()))
    }

    /// Every distinct degree constant appearing in assertions and axioms.
    pub fn degree_constants(&self) -> BTreeSet<Degree> {
        self.assertions
            .iter()
            .map(|a| a.degree)
            .chain(self.tbox.iter().map(|g| g.degree))
            .collect()
    }
}
