use std::str::FromStr;

use rust_decimal::Decimal;

use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, DiagnosticKind, Span};
use crate::decision::{UboxError, UtilityBox};
use crate::model::{
    Comparator, ConceptExpr, ConcretePredicate, Degree, FuzzyGci, KbError, KnowledgeBase,
    Quantity, RoleKind,
};

const RESERVED: &[&str] = &[
    "AND", "OR", "NOT", "EXISTS", "FORALL", "TOP", "BOTTOM", "EQUIV", "GT", "GE", "LT", "LE",
];

type PResult<T> = Result<T, Diagnostic>;

#[derive(Debug)]
enum RoleUse {
    Abstract,
    Concrete { unit: String, unit_span: Span },
}

#[derive(Debug)]
struct RoleRef {
    name: String,
    span: Span,
    usage: RoleUse,
}

#[derive(Debug)]
enum Stmt {
    Role {
        name: String,
        span: Span,
        kind: RoleKind,
    },
    Concept {
        name: String,
        span: Span,
    },
    Gci {
        lhs: ConceptExpr,
        rhs: ConceptExpr,
        degree: Degree,
        equiv: bool,
    },
    Assert {
        individual: String,
        concept: ConceptExpr,
        degree: Degree,
    },
    RoleAssert {
        subject: String,
        object: String,
    },
    Value {
        individual: String,
        value: Quantity,
    },
}

/// A statement with the role references it makes, for span-accurate checks.
struct Located {
    stmt: Stmt,
    span: Span,
    refs: Vec<RoleRef>,
}

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    refs: Vec<RoleRef>,
}

fn syntax(msg: impl Into<String>, span: Span) -> Diagnostic {
    Diagnostic::error(DiagnosticKind::Syntax, msg, span)
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token]) -> Self {
        Parser {
            toks,
            pos: 0,
            refs: Vec::new(),
        }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn peek_is_word(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(w) if w == word)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        if self.peek_is_word(word) {
            self.next();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        syntax(
            format!("expected {expected}, found {}", t.tok.describe()),
            t.span,
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.peek().tok == tok {
            Ok(self.next().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<Span> {
        if self.peek_is_word(word) {
            Ok(self.next().span)
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match &self.peek().tok {
            Tok::Ident(w) if !RESERVED.contains(&w.as_str()) => {
                let t = self.next();
                let Tok::Ident(w) = t.tok else { unreachable!() };
                Ok((w, t.span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn number(&mut self) -> PResult<(String, Span)> {
        match &self.peek().tok {
            Tok::Number(_) => {
                let t = self.next();
                let Tok::Number(n) = t.tok else { unreachable!() };
                Ok((n, t.span))
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn decimal(&mut self) -> PResult<(Decimal, Span)> {
        let (n, span) = self.number()?;
        let d = Decimal::from_str(&n)
            .map_err(|e| syntax(format!("invalid number `{n}`: {e}"), span))?;
        Ok((d, span))
    }

    fn degree(&mut self) -> PResult<Degree> {
        let (n, span) = self.number()?;
        Degree::parse(&n)
            .map_err(|e| Diagnostic::error(DiagnosticKind::DegreeRange, e.to_string(), span))
    }

    fn optional_degree(&mut self) -> PResult<Degree> {
        if self.eat(&Tok::At) {
            self.degree()
        } else {
            Ok(Degree::ONE)
        }
    }

    /// Skips past the next `;` (or to `stop`) after a syntax error.
    fn synchronize(&mut self, stop: Option<&Tok>) {
        loop {
            let t = &self.peek().tok;
            if *t == Tok::Eof || Some(t) == stop {
                return;
            }
            if self.next().tok == Tok::Semi {
                return;
            }
        }
    }

    fn concept(&mut self) -> PResult<ConceptExpr> {
        let mut lhs = self.conjunction()?;
        while self.eat_word("OR") {
            let rhs = self.conjunction()?;
            lhs = ConceptExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<ConceptExpr> {
        let mut lhs = self.unary()?;
        while self.eat_word("AND") {
            let rhs = self.unary()?;
            lhs = ConceptExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<ConceptExpr> {
        if self.eat_word("NOT") {
            return Ok(ConceptExpr::not(self.unary()?));
        }
        if self.eat_word("TOP") {
            return Ok(ConceptExpr::Top);
        }
        if self.eat_word("BOTTOM") {
            return Ok(ConceptExpr::Bottom);
        }
        if self.eat_word("EXISTS") {
            let (role, span) = self.ident("a role name")?;
            self.eat(&Tok::Dot);
            let comparator = match &self.peek().tok {
                Tok::Ident(w) => Comparator::from_keyword(w),
                _ => None,
            };
            if let Some(comparator) = comparator {
                self.next();
                let (magnitude, _) = self.decimal()?;
                let (unit, unit_span) = self.ident("a unit")?;
                self.refs.push(RoleRef {
                    name: role.clone(),
                    span,
                    usage: RoleUse::Concrete {
                        unit: unit.clone(),
                        unit_span,
                    },
                });
                let p = ConcretePredicate::new(comparator, Quantity::new(magnitude, unit));
                return Ok(ConceptExpr::restriction(role, p));
            }
            self.refs.push(RoleRef {
                name: role.clone(),
                span,
                usage: RoleUse::Abstract,
            });
            return Ok(ConceptExpr::exists(role, self.unary()?));
        }
        if self.eat_word("FORALL") {
            let (role, span) = self.ident("a role name")?;
            self.eat(&Tok::Dot);
            self.refs.push(RoleRef {
                name: role.clone(),
                span,
                usage: RoleUse::Abstract,
            });
            return Ok(ConceptExpr::forall(role, self.unary()?));
        }
        if self.eat(&Tok::LParen) {
            let c = self.concept()?;
            self.expect(Tok::RParen)?;
            return Ok(c);
        }
        let (name, _) = self.ident("a concept")?;
        Ok(ConceptExpr::Atom(name))
    }

    fn inclusion_tail(&mut self, lhs: ConceptExpr) -> PResult<Stmt> {
        let equiv = if self.eat(&Tok::SubsumedBy) {
            false
        } else if self.eat_word("EQUIV") {
            true
        } else {
            return Err(self.unexpected("`SUBSUMED-BY` or `EQUIV`"));
        };
        let rhs = self.concept()?;
        let degree = self.optional_degree()?;
        Ok(Stmt::Gci {
            lhs,
            rhs,
            degree,
            equiv,
        })
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let head = self.peek().clone();
        let Tok::Ident(word) = &head.tok else {
            return Err(self.unexpected("`role`, `concept`, `axiom` or `assert`"));
        };
        let stmt = match word.as_str() {
            "role" => {
                self.next();
                let (name, span) = self.ident("a role name")?;
                self.expect(Tok::Colon)?;
                let kind = if self.eat_word("abstract") {
                    RoleKind::Abstract {
                        closed: self.eat_word("closed"),
                    }
                } else if self.eat_word("concrete") {
                    self.expect(Tok::LParen)?;
                    let (unit, _) = self.ident("a unit")?;
                    self.expect(Tok::RParen)?;
                    RoleKind::Concrete { unit }
                } else {
                    return Err(self.unexpected("`abstract` or `concrete`"));
                };
                Stmt::Role { name, span, kind }
            }
            "concept" => {
                self.next();
                let (name, span) = self.ident("a concept name")?;
                if self.peek().tok == Tok::Semi {
                    Stmt::Concept { name, span }
                } else {
                    self.inclusion_tail(ConceptExpr::Atom(name))?
                }
            }
            "axiom" => {
                self.next();
                let lhs = self.concept()?;
                self.inclusion_tail(lhs)?
            }
            "assert" => {
                self.next();
                if self.eat(&Tok::LParen) {
                    let (subject, _) = self.ident("an individual")?;
                    self.expect(Tok::Comma)?;
                    let value = if let Tok::Number(_) = self.peek().tok {
                        let (magnitude, _) = self.decimal()?;
                        let (unit, unit_span) = self.ident("a unit")?;
                        Some((Quantity::new(magnitude, unit), unit_span))
                    } else {
                        None
                    };
                    let object = match value {
                        Some(_) => None,
                        None => Some(self.ident("an individual or a value")?.0),
                    };
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::Colon)?;
                    let (role, role_span) = self.ident("a role name")?;
                    match (value, object) {
                        (Some((value, unit_span)), _) => {
                            self.refs.push(RoleRef {
                                name: role,
                                span: role_span,
                                usage: RoleUse::Concrete {
                                    unit: value.unit.clone(),
                                    unit_span,
                                },
                            });
                            Stmt::Value {
                                individual: subject,
                                value,
                            }
                        }
                        (None, Some(object)) => {
                            self.refs.push(RoleRef {
                                name: role,
                                span: role_span,
                                usage: RoleUse::Abstract,
                            });
                            Stmt::RoleAssert { subject, object }
                        }
                        (None, None) => unreachable!(),
                    }
                } else {
                    let (individual, _) = self.ident("an individual")?;
                    self.expect(Tok::Colon)?;
                    let concept = self.concept()?;
                    let degree = self.optional_degree()?;
                    Stmt::Assert {
                        individual,
                        concept,
                        degree,
                    }
                }
            }
            _ => return Err(self.unexpected("`role`, `concept`, `axiom` or `assert`")),
        };
        self.expect(Tok::Semi)?;
        Ok(stmt)
    }
}

fn check_ref(kb: &KnowledgeBase, r: &RoleRef) -> Option<Diagnostic> {
    let Some(kind) = kb.role_kind(&r.name) else {
        return Some(Diagnostic::error(
            DiagnosticKind::UndeclaredRole,
            format!("role `{}` is not declared", r.name),
            r.span,
        ));
    };
    match (&r.usage, kind) {
        (RoleUse::Abstract, RoleKind::Abstract { .. }) => None,
        (RoleUse::Concrete { unit, unit_span }, RoleKind::Concrete { unit: declared }) => {
            (unit != declared).then(|| {
                Diagnostic::error(
                    DiagnosticKind::UnitMismatch,
                    format!(
                        "unit `{unit}` does not match unit `{declared}` of role `{}`",
                        r.name
                    ),
                    *unit_span,
                )
            })
        }
        (RoleUse::Abstract, RoleKind::Concrete { .. }) => Some(Diagnostic::error(
            DiagnosticKind::RoleKind,
            format!("role `{}` is concrete but used as an abstract role", r.name),
            r.span,
        )),
        (RoleUse::Concrete { .. }, RoleKind::Abstract { .. }) => Some(Diagnostic::error(
            DiagnosticKind::RoleKind,
            format!("role `{}` is abstract but used with a concrete value", r.name),
            r.span,
        )),
    }
}

fn kb_error_diagnostic(err: KbError, span: Span) -> Diagnostic {
    let kind = match err {
        KbError::UndeclaredRole(_) => DiagnosticKind::UndeclaredRole,
        KbError::DuplicateRole(_) => DiagnosticKind::DuplicateRole,
        KbError::RoleKind { .. } => DiagnosticKind::RoleKind,
        KbError::UnitMismatch { .. } => DiagnosticKind::UnitMismatch,
        KbError::DuplicateConcreteFact { .. } => DiagnosticKind::DuplicateConcreteFact,
    };
    Diagnostic::error(kind, err.to_string(), span)
}

fn parse_statements(text: &str) -> (Vec<Located>, Vec<Diagnostic>) {
    let (toks, mut diags) = lex(text);
    let mut p = Parser::new(&toks);
    let mut stmts = Vec::new();
    while !p.at_eof() {
        let start = p.peek().span;
        p.refs.clear();
        match p.statement() {
            Ok(stmt) => stmts.push(Located {
                stmt,
                span: start,
                refs: std::mem::take(&mut p.refs),
            }),
            Err(d) => {
                diags.push(d);
                p.synchronize(None);
            }
        }
    }
    (stmts, diags)
}

fn apply(kb: &mut KnowledgeBase, loc: Located, diags: &mut Vec<Diagnostic>) {
    let errors: Vec<_> = loc.refs.iter().filter_map(|r| check_ref(kb, r)).collect();
    if !errors.is_empty() {
        diags.extend(errors);
        return;
    }
    // Functional-role duplicates are the only failure left after the checks
    // above; report them at the role name.
    let role_span = loc.refs.first().map_or(loc.span, |r| r.span);
    let role_name = loc.refs.first().map(|r| r.name.clone());
    let result = match loc.stmt {
        Stmt::Role { .. } | Stmt::Concept { .. } => Ok(()),
        Stmt::Gci {
            lhs,
            rhs,
            degree,
            equiv: true,
        } => kb.add_equivalence(lhs, rhs, degree),
        Stmt::Gci {
            lhs, rhs, degree, ..
        } => kb.add_gci(FuzzyGci::new(lhs, rhs, degree)),
        Stmt::Assert {
            individual,
            concept,
            degree,
        } => kb.assert_concept(individual, concept, degree),
        Stmt::RoleAssert { subject, object } => {
            kb.assert_role(subject, object, role_name.unwrap_or_default())
        }
        Stmt::Value { individual, value } => {
            kb.assert_value(individual, value, role_name.unwrap_or_default())
        }
    };
    if let Err(e) = result {
        diags.push(kb_error_diagnostic(e, role_span));
    }
}

/// Parses a knowledge base, returning it (if there were no errors) together
/// with every diagnostic, warnings included.
pub fn parse_kb_with_diagnostics(text: &str) -> (Option<KnowledgeBase>, Vec<Diagnostic>) {
    let (stmts, mut diags) = parse_statements(text);
    let mut kb = KnowledgeBase::new();

    // Declarations first, so roles may be used before the line declaring them.
    let mut rest = Vec::with_capacity(stmts.len());
    for loc in stmts {
        match &loc.stmt {
            Stmt::Role { name, span, kind } => {
                if let Err(e) = kb.declare_role(name.clone(), kind.clone()) {
                    diags.push(kb_error_diagnostic(e, *span));
                }
            }
            Stmt::Concept { name, span } => {
                if kb.has_concept(name) {
                    diags.push(Diagnostic::warning(
                        DiagnosticKind::Redeclaration,
                        format!("concept `{name}` is declared more than once"),
                        *span,
                    ));
                }
                kb.declare_concept(name.clone());
            }
            _ => rest.push(loc),
        }
    }
    for loc in rest {
        apply(&mut kb, loc, &mut diags);
    }

    diags.sort_by_key(|d| d.span);
    let ok = !diags.iter().any(Diagnostic::is_error);
    (ok.then_some(kb), diags)
}

/// Parses a knowledge base. Any error diagnostic means no knowledge base.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, Vec<Diagnostic>> {
    match parse_kb_with_diagnostics(text) {
        (Some(kb), _) => Ok(kb),
        (None, diags) => Err(diags.into_iter().filter(Diagnostic::is_error).collect()),
    }
}

/// Parses a single concept expression and checks its roles against `kb`.
pub fn parse_concept(text: &str, kb: &KnowledgeBase) -> Result<ConceptExpr, Vec<Diagnostic>> {
    let (toks, mut diags) = lex(text);
    let mut p = Parser::new(&toks);
    match p.concept() {
        Ok(c) if p.at_eof() => {
            diags.extend(p.refs.iter().filter_map(|r| check_ref(kb, r)));
            if diags.is_empty() {
                return Ok(c);
            }
        }
        Ok(_) => diags.push(p.unexpected("end of input")),
        Err(d) => diags.push(d),
    }
    Err(diags)
}

/// Parses `ubox NAME { Attribute = weight; ... }`.
pub fn parse_ubox(text: &str) -> Result<UtilityBox, Vec<Diagnostic>> {
    let (toks, mut diags) = lex(text);
    let mut p = Parser::new(&toks);
    let header = (|| {
        p.expect_word("ubox")?;
        let (id, _) = p.ident("an expert identifier")?;
        p.expect(Tok::LBrace)?;
        Ok::<_, Diagnostic>(id)
    })();
    let id = match header {
        Ok(id) => id,
        Err(d) => {
            diags.push(d);
            return Err(diags);
        }
    };
    let mut ubox = UtilityBox::new(id);
    while p.peek().tok != Tok::RBrace && !p.at_eof() {
        let entry = (|| {
            let (attr, attr_span) = p.ident("an attribute name")?;
            p.expect(Tok::Eq)?;
            let (weight, weight_span) = p.decimal()?;
            p.expect(Tok::Semi)?;
            Ok::<_, Diagnostic>((attr, attr_span, weight, weight_span))
        })();
        match entry {
            Ok((attr, attr_span, weight, weight_span)) => match ubox.insert(attr, weight) {
                Ok(()) => {}
                Err(e @ UboxError::DuplicateAttribute(_)) => diags.push(Diagnostic::error(
                    DiagnosticKind::DuplicateAttribute,
                    e.to_string(),
                    attr_span,
                )),
                Err(e @ UboxError::NegativeWeight { .. }) => diags.push(Diagnostic::error(
                    DiagnosticKind::NegativeWeight,
                    e.to_string(),
                    weight_span,
                )),
            },
            Err(d) => {
                diags.push(d);
                p.synchronize(Some(&Tok::RBrace));
            }
        }
    }
    if let Err(d) = p.expect(Tok::RBrace) {
        diags.push(d);
    } else if !p.at_eof() {
        diags.push(p.unexpected("end of input"));
    }
    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }
    Ok(ubox)
}
