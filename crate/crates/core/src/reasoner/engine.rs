//! Worklist saturation over `(individual, expression)` cells.
//!
//! Each cell holds a [`DegreeInterval`]. Rules are grouped into propagators
//! that read and tighten a handful of cells; when a cell changes, exactly the
//! propagators that read it are re-queued. Every tightening is recorded as an
//! [`Event`] whose premises are strictly earlier events, so the log is a DAG
//! that can be replayed.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::model::{
    ConceptExpr, ConcretePredicate, Degree, DegreeInterval, KnowledgeBase, Quantity, RoleKind,
};

use super::rules::{Bound, Rule};

pub(crate) type ExprId = usize;
pub(crate) type IndId = usize;
pub(crate) type EventId = usize;
pub(crate) type RoleId = usize;

#[derive(Clone, Debug)]
enum Node {
    Top,
    Bottom,
    /// Atom, negated atom or negated concrete restriction: no structural rules.
    Literal,
    And(ExprId, ExprId),
    Or(ExprId, ExprId),
    Exists(RoleId, ExprId),
    Forall(RoleId, ExprId),
    Restriction(RoleId, ConcretePredicate),
}

#[derive(Clone, Debug)]
pub(crate) enum EventOrigin {
    None,
    Assertion(usize),
    Inclusion(usize),
    ConcreteValue(RoleId),
}

#[derive(Clone, Debug)]
pub(crate) struct Event {
    pub ind: IndId,
    pub expr: ExprId,
    pub bound: Bound,
    pub value: Degree,
    pub rule: Rule,
    pub premises: Vec<EventId>,
    pub origin: EventOrigin,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Cell {
    pub interval: DegreeInterval,
    pub lo_event: Option<EventId>,
    pub hi_event: Option<EventId>,
}

impl Default for Cell {
    fn default() -> Self {
        Cell {
            interval: DegreeInterval::VACUOUS,
            lo_event: None,
            hi_event: None,
        }
    }
}

/// A derivation that would have emptied a cell. The offending event is in the
/// log; the cell keeps its previous interval.
#[derive(Clone, Debug)]
pub(crate) struct ConflictRecord {
    pub ind: IndId,
    pub expr: ExprId,
    pub lo_event: EventId,
    pub hi_event: EventId,
}

#[derive(Clone, Debug)]
pub(crate) struct RoleInfo {
    pub name: String,
    pub closed: bool,
}

#[derive(Clone, Debug)]
struct GciInfo {
    lhs: ExprId,
    rhs: ExprId,
    degree: Degree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Prop {
    Local(IndId, ExprId),
    Dual(IndId, ExprId),
    Gci(IndId, usize, bool),
}

#[derive(Clone, Debug)]
pub(crate) struct Engine {
    pub exprs: Vec<ConceptExpr>,
    nodes: Vec<Node>,
    index: HashMap<ConceptExpr, ExprId>,
    dual: Vec<ExprId>,
    parents: Vec<Vec<ExprId>>,
    /// `(gci, contrapositive)` pairs whose premise is this expression.
    triggers: Vec<Vec<(usize, bool)>>,
    gcis: Vec<GciInfo>,
    pub individuals: Vec<String>,
    ind_index: HashMap<String, IndId>,
    pub roles: Vec<RoleInfo>,
    role_index: HashMap<String, RoleId>,
    fillers: HashMap<(RoleId, IndId), Vec<IndId>>,
    predecessors: HashMap<(RoleId, IndId), Vec<IndId>>,
    values: HashMap<(RoleId, IndId), Quantity>,
    /// `cells[expr][ind]`.
    cells: Vec<Vec<Cell>>,
    pub events: Vec<Event>,
    pub conflicts: Vec<ConflictRecord>,
    conflicted: HashSet<(IndId, ExprId)>,
    queue: VecDeque<Prop>,
    queued: HashSet<Prop>,
    /// Expressions below this id have had their propagators queued.
    seeded_exprs: usize,
}

impl Engine {
    /// Builds the engine for `kb`: interns the closure (every KB concept,
    /// every atom, `extra`, and their duals), seeds asserted facts, and runs
    /// to the fixpoint.
    pub fn new(kb: &KnowledgeBase, extra: &[ConceptExpr]) -> Engine {
        let individuals: Vec<String> = kb.individuals().iter().cloned().collect();
        let ind_index = individuals
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let mut roles = Vec::new();
        let mut role_index = HashMap::new();
        for (name, kind) in kb.roles() {
            role_index.insert(name.to_string(), roles.len());
            roles.push(RoleInfo {
                name: name.to_string(),
                closed: matches!(kind, RoleKind::Abstract { closed: true }),
            });
        }
        let mut engine = Engine {
            exprs: Vec::new(),
            nodes: Vec::new(),
            index: HashMap::new(),
            dual: Vec::new(),
            parents: Vec::new(),
            triggers: Vec::new(),
            gcis: Vec::new(),
            individuals,
            ind_index,
            roles,
            role_index,
            fillers: HashMap::new(),
            predecessors: HashMap::new(),
            values: HashMap::new(),
            cells: Vec::new(),
            events: Vec::new(),
            conflicts: Vec::new(),
            conflicted: HashSet::new(),
            queue: VecDeque::new(),
            queued: HashSet::new(),
            seeded_exprs: 0,
        };

        for ra in kb.role_assertions() {
            let r = engine.role_index[&ra.role];
            let (s, o) = (engine.ind_index[&ra.subject], engine.ind_index[&ra.object]);
            engine.fillers.entry((r, s)).or_default().push(o);
            engine.predecessors.entry((r, o)).or_default().push(s);
        }
        for (ind, role, q) in kb.concrete_facts() {
            let key = (engine.role_index[role], engine.ind_index[ind]);
            engine.values.insert(key, q.clone());
        }

        engine.intern(&ConceptExpr::Top);
        for atom in kb.concepts() {
            engine.intern(&ConceptExpr::Atom(atom.clone()));
        }
        for gci in kb.tbox() {
            let lhs = engine.intern(&gci.lhs.normalize());
            let rhs = engine.intern(&gci.rhs.normalize());
            let g = engine.gcis.len();
            engine.gcis.push(GciInfo {
                lhs,
                rhs,
                degree: gci.degree,
            });
            engine.triggers[lhs].push((g, false));
            let not_rhs = engine.dual[rhs];
            engine.triggers[not_rhs].push((g, true));
        }
        for a in kb.assertions() {
            engine.intern(&a.concept.normalize());
        }
        for e in extra {
            engine.intern(&e.normalize());
        }

        engine.seed_new_exprs();
        for (i, a) in kb.assertions().enumerate() {
            let ind = engine.ind_index[&a.individual];
            let expr = engine.index[&a.concept.normalize()];
            engine.raise(
                ind,
                expr,
                a.degree,
                Rule::Assertion,
                vec![],
                EventOrigin::Assertion(i),
            );
        }
        for g in 0..engine.gcis.len() {
            for ind in 0..engine.individuals.len() {
                engine.enqueue(Prop::Gci(ind, g, false));
                engine.enqueue(Prop::Gci(ind, g, true));
            }
        }
        engine.run();
        engine
    }

    pub fn individual(&self, name: &str) -> Option<IndId> {
        self.ind_index.get(name).copied()
    }

    pub fn lookup(&self, nnf: &ConceptExpr) -> Option<ExprId> {
        self.index.get(nnf).copied()
    }

    pub fn cell(&self, ind: IndId, expr: ExprId) -> &Cell {
        &self.cells[expr][ind]
    }

    pub fn value(&self, role: RoleId, ind: IndId) -> Option<&Quantity> {
        self.values.get(&(role, ind))
    }

    pub fn expr_count(&self) -> usize {
        self.exprs.len()
    }

    /// Adds `nnf` (and its subexpressions and duals) to the closure and
    /// saturates the new cells. Existing cells are not weakened.
    pub fn extend(&mut self, nnf: &ConceptExpr) -> ExprId {
        let id = self.intern(nnf);
        self.seed_new_exprs();
        self.run();
        id
    }

    /// Re-queues every propagator and runs again. On a fixpoint this logs
    /// nothing new.
    pub fn rerun(&mut self) {
        for expr in 0..self.exprs.len() {
            for ind in 0..self.individuals.len() {
                self.enqueue(Prop::Local(ind, expr));
                self.enqueue(Prop::Dual(ind, expr));
            }
        }
        for g in 0..self.gcis.len() {
            for ind in 0..self.individuals.len() {
                self.enqueue(Prop::Gci(ind, g, false));
                self.enqueue(Prop::Gci(ind, g, true));
            }
        }
        self.run();
    }

    fn intern(&mut self, e: &ConceptExpr) -> ExprId {
        if let Some(&id) = self.index.get(e) {
            return id;
        }
        let node = match e {
            ConceptExpr::Top => Node::Top,
            ConceptExpr::Bottom => Node::Bottom,
            ConceptExpr::Atom(_) => Node::Literal,
            ConceptExpr::Not(inner) => {
                self.intern(inner);
                Node::Literal
            }
            ConceptExpr::And(l, r) => Node::And(self.intern(l), self.intern(r)),
            ConceptExpr::Or(l, r) => Node::Or(self.intern(l), self.intern(r)),
            ConceptExpr::Exists(role, c) => Node::Exists(self.role_index[role], self.intern(c)),
            ConceptExpr::Forall(role, c) => Node::Forall(self.role_index[role], self.intern(c)),
            ConceptExpr::Restriction(role, p) => Node::Restriction(self.role_index[role], p.clone()),
        };
        // Interning a child also interns its dual, which may be `e` itself.
        if let Some(&id) = self.index.get(e) {
            return id;
        }
        let id = self.exprs.len();
        match node {
            Node::And(l, r) | Node::Or(l, r) => {
                self.parents[l].push(id);
                if r != l {
                    self.parents[r].push(id);
                }
            }
            Node::Exists(_, c) | Node::Forall(_, c) => self.parents[c].push(id),
            _ => {}
        }
        self.exprs.push(e.clone());
        self.nodes.push(node);
        self.dual.push(usize::MAX);
        self.parents.push(Vec::new());
        self.triggers.push(Vec::new());
        self.cells.push(vec![Cell::default(); self.individuals.len()]);
        self.index.insert(e.clone(), id);
        let d = self.intern(&e.dual());
        self.dual[id] = d;
        self.dual[d] = id;
        id
    }

    fn seed_new_exprs(&mut self) {
        for expr in self.seeded_exprs..self.exprs.len() {
            for ind in 0..self.individuals.len() {
                match self.nodes[expr] {
                    Node::Top => {
                        self.raise(ind, expr, Degree::ONE, Rule::Top, vec![], EventOrigin::None)
                    }
                    Node::Bottom => {
                        self.lower(ind, expr, Degree::ZERO, Rule::Bottom, vec![], EventOrigin::None)
                    }
                    _ => {}
                }
                self.enqueue(Prop::Local(ind, expr));
                self.enqueue(Prop::Dual(ind, expr));
            }
        }
        self.seeded_exprs = self.exprs.len();
    }

    fn enqueue(&mut self, p: Prop) {
        if self.queued.insert(p) {
            self.queue.push_back(p);
        }
    }

    fn run(&mut self) {
        while let Some(p) = self.queue.pop_front() {
            self.queued.remove(&p);
            match p {
                Prop::Local(ind, expr) => self.local(ind, expr),
                Prop::Dual(ind, expr) => self.negation(ind, expr),
                Prop::Gci(ind, g, contra) => self.inclusion(ind, g, contra),
            }
        }
    }

    fn touched(&mut self, ind: IndId, expr: ExprId) {
        self.enqueue(Prop::Local(ind, expr));
        self.enqueue(Prop::Dual(ind, self.dual[expr]));
        for i in 0..self.parents[expr].len() {
            let p = self.parents[expr][i];
            match self.nodes[p] {
                Node::Exists(r, _) | Node::Forall(r, _) => {
                    let preds = self.predecessors.get(&(r, ind)).cloned().unwrap_or_default();
                    for a in preds {
                        self.enqueue(Prop::Local(a, p));
                    }
                }
                _ => self.enqueue(Prop::Local(ind, p)),
            }
        }
        for i in 0..self.triggers[expr].len() {
            let (g, contra) = self.triggers[expr][i];
            self.enqueue(Prop::Gci(ind, g, contra));
        }
    }

    fn lo(&self, ind: IndId, expr: ExprId) -> (Degree, Option<EventId>) {
        let c = &self.cells[expr][ind];
        (c.interval.lo(), c.lo_event)
    }

    fn hi(&self, ind: IndId, expr: ExprId) -> (Degree, Option<EventId>) {
        let c = &self.cells[expr][ind];
        (c.interval.hi(), c.hi_event)
    }

    fn push_event(&mut self, event: Event) -> EventId {
        self.events.push(event);
        self.events.len() - 1
    }

    fn conflict(&mut self, ind: IndId, expr: ExprId, lo_event: EventId, hi_event: EventId) {
        if self.conflicted.insert((ind, expr)) {
            self.conflicts.push(ConflictRecord {
                ind,
                expr,
                lo_event,
                hi_event,
            });
        }
    }

    /// Tightens the lower bound of a cell if `value` is stronger.
    fn raise(
        &mut self,
        ind: IndId,
        expr: ExprId,
        value: Degree,
        rule: Rule,
        premises: Vec<EventId>,
        origin: EventOrigin,
    ) {
        let cell = self.cells[expr][ind];
        if value <= cell.interval.lo() {
            return;
        }
        let ev = self.push_event(Event {
            ind,
            expr,
            bound: Bound::Lower,
            value,
            rule,
            premises,
            origin,
        });
        match cell.interval.refine(Some(value), None) {
            Ok(iv) => {
                let c = &mut self.cells[expr][ind];
                c.interval = iv;
                c.lo_event = Some(ev);
                self.touched(ind, expr);
            }
            Err(_) => {
                let hi_ev = cell.hi_event.expect("an upper bound below 1 has a derivation");
                self.conflict(ind, expr, ev, hi_ev);
            }
        }
    }

    /// Tightens the upper bound of a cell if `value` is stronger.
    fn lower(
        &mut self,
        ind: IndId,
        expr: ExprId,
        value: Degree,
        rule: Rule,
        premises: Vec<EventId>,
        origin: EventOrigin,
    ) {
        let cell = self.cells[expr][ind];
        if value >= cell.interval.hi() {
            return;
        }
        let ev = self.push_event(Event {
            ind,
            expr,
            bound: Bound::Upper,
            value,
            rule,
            premises,
            origin,
        });
        match cell.interval.refine(None, Some(value)) {
            Ok(iv) => {
                let c = &mut self.cells[expr][ind];
                c.interval = iv;
                c.hi_event = Some(ev);
                self.touched(ind, expr);
            }
            Err(_) => {
                let lo_ev = cell.lo_event.expect("a lower bound above 0 has a derivation");
                self.conflict(ind, expr, lo_ev, ev);
            }
        }
    }

    fn negation(&mut self, ind: IndId, expr: ExprId) {
        let d = self.dual[expr];
        let (dhi, dhi_ev) = self.hi(ind, d);
        if let Some(ev) = dhi_ev {
            self.raise(ind, expr, dhi.complement(), Rule::Negation, vec![ev], EventOrigin::None);
        }
        let (dlo, dlo_ev) = self.lo(ind, d);
        if let Some(ev) = dlo_ev {
            self.lower(ind, expr, dlo.complement(), Rule::Negation, vec![ev], EventOrigin::None);
        }
    }

    fn inclusion(&mut self, ind: IndId, g: usize, contrapositive: bool) {
        let gci = &self.gcis[g];
        let t = gci.degree;
        let (premise, conclusion, rule) = if contrapositive {
            (self.dual[gci.rhs], self.dual[gci.lhs], Rule::InclusionContrapositive)
        } else {
            (gci.lhs, gci.rhs, Rule::Inclusion)
        };
        let (lo, ev) = self.lo(ind, premise);
        if let Some(ev) = ev {
            if lo > t.complement() {
                self.raise(ind, conclusion, t, rule, vec![ev], EventOrigin::Inclusion(g));
            }
        }
    }

    fn local(&mut self, ind: IndId, expr: ExprId) {
        match self.nodes[expr].clone() {
            Node::Top | Node::Bottom | Node::Literal => {}
            Node::And(l, r) => self.conjunction(ind, expr, l, r),
            Node::Or(l, r) => self.disjunction(ind, expr, l, r),
            Node::Exists(role, c) => self.exists(ind, expr, role, c),
            Node::Forall(role, c) => self.forall(ind, expr, role, c),
            Node::Restriction(role, p) => {
                if let Some(v) = self.values.get(&(role, ind)) {
                    // Units were checked when the knowledge base was built.
                    let d = p.degree(v).expect("unit checked at load time");
                    let origin = || EventOrigin::ConcreteValue(role);
                    self.raise(ind, expr, d, Rule::ConcreteValue, vec![], origin());
                    self.lower(ind, expr, d, Rule::ConcreteValue, vec![], origin());
                }
            }
        }
    }

    fn conjunction(&mut self, a: IndId, e: ExprId, l: ExprId, r: ExprId) {
        let none = EventOrigin::None;
        let ((llo, lle), (rlo, rle)) = (self.lo(a, l), self.lo(a, r));
        if let (Some(x), Some(y)) = (lle, rle) {
            self.raise(a, e, llo.min(rlo), Rule::ConjunctionIntro, vec![x, y], none.clone());
        }
        let ((lhi, lhe), (rhi, rhe)) = (self.hi(a, l), self.hi(a, r));
        let (mhi, mhe) = if lhi <= rhi { (lhi, lhe) } else { (rhi, rhe) };
        if let Some(x) = mhe {
            self.lower(a, e, mhi, Rule::ConjunctionUpper, vec![x], none.clone());
        }
        let (elo, ele) = self.lo(a, e);
        if let Some(x) = ele {
            self.raise(a, l, elo, Rule::ConjunctionElim, vec![x], none.clone());
            self.raise(a, r, elo, Rule::ConjunctionElim, vec![x], none.clone());
        }
        let (ehi, ehe) = self.hi(a, e);
        if let Some(x) = ehe {
            for (target, other) in [(l, r), (r, l)] {
                let (olo, ole) = self.lo(a, other);
                if let Some(y) = ole {
                    if olo > ehi {
                        self.lower(a, target, ehi, Rule::ConjunctionUpperElim, vec![x, y], none.clone());
                    }
                }
            }
        }
    }

    fn disjunction(&mut self, a: IndId, e: ExprId, l: ExprId, r: ExprId) {
        let none = EventOrigin::None;
        let ((llo, lle), (rlo, rle)) = (self.lo(a, l), self.lo(a, r));
        let (mlo, mle) = if llo >= rlo { (llo, lle) } else { (rlo, rle) };
        if let Some(x) = mle {
            self.raise(a, e, mlo, Rule::DisjunctionIntro, vec![x], none.clone());
        }
        let ((lhi, lhe), (rhi, rhe)) = (self.hi(a, l), self.hi(a, r));
        if let (Some(x), Some(y)) = (lhe, rhe) {
            self.lower(a, e, lhi.max(rhi), Rule::DisjunctionUpper, vec![x, y], none.clone());
        }
        let (ehi, ehe) = self.hi(a, e);
        if let Some(x) = ehe {
            self.lower(a, l, ehi, Rule::DisjunctionUpperElim, vec![x], none.clone());
            self.lower(a, r, ehi, Rule::DisjunctionUpperElim, vec![x], none.clone());
        }
        let (elo, ele) = self.lo(a, e);
        if let Some(x) = ele {
            for (target, other) in [(l, r), (r, l)] {
                let (ohi, ohe) = self.hi(a, other);
                if let Some(y) = ohe {
                    if ohi < elo {
                        self.raise(a, target, elo, Rule::DisjunctionElim, vec![x, y], none.clone());
                    }
                }
            }
        }
    }

    fn exists(&mut self, a: IndId, e: ExprId, role: RoleId, c: ExprId) {
        let none = EventOrigin::None;
        let fillers = self.fillers.get(&(role, a)).cloned().unwrap_or_default();
        let best = fillers
            .iter()
            .filter_map(|&b| match self.lo(b, c) {
                (v, Some(ev)) => Some((v, ev)),
                _ => None,
            })
            .max_by_key(|&(v, _)| v);
        if let Some((v, ev)) = best {
            self.raise(a, e, v, Rule::ExistsIntro, vec![ev], none.clone());
        }
        let (ehi, ehe) = self.hi(a, e);
        if let Some(x) = ehe {
            for &b in &fillers {
                self.lower(b, c, ehi, Rule::ExistsUpperElim, vec![x], none.clone());
            }
        }
        if !self.roles[role].closed {
            return;
        }
        let his: Vec<_> = fillers.iter().map(|&b| self.hi(b, c)).collect();
        if his.iter().all(|(_, ev)| ev.is_some()) {
            let max = his.iter().map(|(v, _)| *v).max().unwrap_or(Degree::ZERO);
            let premises = his.iter().filter_map(|(_, ev)| *ev).collect();
            self.lower(a, e, max, Rule::ExistsClosedUpper, premises, none.clone());
        }
        let (elo, ele) = self.lo(a, e);
        if let Some(x) = ele {
            for (i, &b) in fillers.iter().enumerate() {
                let others: Option<Vec<EventId>> = his
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &(v, ev))| if v < elo { ev } else { None })
                    .collect();
                if let Some(mut premises) = others {
                    premises.insert(0, x);
                    self.raise(b, c, elo, Rule::ExistsClosedElim, premises, none.clone());
                }
            }
        }
    }

    fn forall(&mut self, a: IndId, e: ExprId, role: RoleId, c: ExprId) {
        let none = EventOrigin::None;
        let fillers = self.fillers.get(&(role, a)).cloned().unwrap_or_default();
        let (elo, ele) = self.lo(a, e);
        if let Some(x) = ele {
            for &b in &fillers {
                self.raise(b, c, elo, Rule::ForallElim, vec![x], none.clone());
            }
        }
        let worst = fillers
            .iter()
            .filter_map(|&b| match self.hi(b, c) {
                (v, Some(ev)) => Some((v, ev)),
                _ => None,
            })
            .min_by_key(|&(v, _)| v);
        if let Some((v, ev)) = worst {
            self.lower(a, e, v, Rule::ForallUpper, vec![ev], none.clone());
        }
        if !self.roles[role].closed {
            return;
        }
        let los: Vec<_> = fillers.iter().map(|&b| self.lo(b, c)).collect();
        if los.iter().all(|(_, ev)| ev.is_some()) {
            let min = los.iter().map(|(v, _)| *v).min().unwrap_or(Degree::ONE);
            let premises = los.iter().filter_map(|(_, ev)| *ev).collect();
            self.raise(a, e, min, Rule::ForallClosedIntro, premises, none.clone());
        }
        let (ehi, ehe) = self.hi(a, e);
        if let Some(x) = ehe {
            for (i, &b) in fillers.iter().enumerate() {
                let others: Option<Vec<EventId>> = los
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &(v, ev))| if v > ehi { ev } else { None })
                    .collect();
                if let Some(mut premises) = others {
                    premises.insert(0, x);
                    self.lower(b, c, ehi, Rule::ForallClosedUpperElim, premises, none.clone());
                }
            }
        }
    }
}
